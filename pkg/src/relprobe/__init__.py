"""relprobe: measure object-relation knowledge extractable from word-representation models."""

__version__ = "0.1.0"
