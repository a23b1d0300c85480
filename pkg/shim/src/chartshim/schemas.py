"""Request and response bodies for the three inference routes.

Requests reject unknown fields outright (4xx) so a client bug cannot
silently change what gets cached or recorded.  Responses always carry
the service protocol version.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, model_validator


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class EntailRequest(_Strict):
    prompt: str
    image_uri: str | None = None
    table_linearized: str | None = None

    @model_validator(mode="after")
    def _exactly_one_subject(self) -> "EntailRequest":
        if (self.image_uri is None) == (self.table_linearized is None):
            raise ValueError("provide exactly one of image_uri or table_linearized")
        return self

    def envelope(self) -> dict:
        return self.model_dump(exclude_none=True)


class EntailResponse(BaseModel):
    logit_yes: float
    logit_no: float
    version: str


class Chart2TableRequest(_Strict):
    image_uri: str

    def envelope(self) -> dict:
        return self.model_dump()


class Chart2TableResponse(BaseModel):
    title: str
    table_linearized: str
    version: str


class RectifyRequest(_Strict):
    title: str
    table_linearized: str
    caption: str
    template_id: str = "default"

    def envelope(self) -> dict:
        return self.model_dump()


class RectifyResponse(BaseModel):
    raw_response: str
    version: str


class HealthResponse(BaseModel):
    status: str
    version: str
    mode: str
