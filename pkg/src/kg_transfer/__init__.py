"""kg_transfer: learned short-term to long-term transfer for temporal KG memory."""

__version__ = "0.1.0"
