"""nisqkit - classical toolkit for near-term quantum computing techniques."""

__version__ = "1.0.0"
