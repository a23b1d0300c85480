"""Inference service for the chart-factuality backend wire protocol."""

__version__ = "0.1.0"
