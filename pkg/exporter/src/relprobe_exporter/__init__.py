"""relprobe-exporter: materialize model-derived interchange files for the scoring engine."""

__version__ = "0.1.0"
