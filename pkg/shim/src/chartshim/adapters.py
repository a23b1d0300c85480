"""Model adapters: the seam between the service and an actual model.

An adapter is any object exposing some of ``entail(envelope)``,
``chart2table(envelope)``, and ``rectify(envelope)``.  Each method gets
the validated request envelope as a plain dict and returns either the
response payload dict or, for entail, a bare yes/no string that is
mapped onto pseudo-logits of fixed magnitude.

Adapters are addressed by a dotted path ``package.module:attribute``;
the attribute may be an adapter instance, an adapter class, or a
zero-argument factory.
"""

from __future__ import annotations

import importlib
from typing import Any

YES_NO_LOGIT = 10.0


class AdapterError(RuntimeError):
    """The adapter failed or produced an unusable answer."""


def load_adapter(spec: str) -> Any:
    module_name, sep, attr = spec.partition(":")
    if not sep or not module_name or not attr:
        raise ValueError(f"adapter spec {spec!r} is not of the form module:attribute")
    try:
        module = importlib.import_module(module_name)
    except ImportError as exc:
        raise ValueError(f"cannot import adapter module {module_name!r}: {exc}") from exc
    try:
        target = getattr(module, attr)
    except AttributeError as exc:
        raise ValueError(f"module {module_name!r} has no attribute {attr!r}") from exc
    # Classes and factories are called; instances pass through.
    if isinstance(target, type) or (
        callable(target) and not _looks_like_adapter(target)
    ):
        target = target()
    if not _looks_like_adapter(target):
        raise ValueError(f"{spec!r} resolved to an object with no adapter methods")
    return target


def _looks_like_adapter(obj: Any) -> bool:
    return any(
        callable(getattr(obj, name, None))
        for name in ("entail", "chart2table", "rectify")
    )


def logits_from_yes_no(answer: str) -> dict:
    token = answer.strip().lower().rstrip(".!")
    if token == "yes":
        return {"logit_yes": YES_NO_LOGIT, "logit_no": -YES_NO_LOGIT}
    if token == "no":
        return {"logit_yes": -YES_NO_LOGIT, "logit_no": YES_NO_LOGIT}
    raise AdapterError(f"expected a yes/no answer, got {answer!r}")
