from __future__ import annotations


class KgTransferError(Exception):
    """Root of every error raised by kg_transfer."""


class ConfigError(KgTransferError, ValueError):
    """Invalid or infeasible configuration (world, trainer, experiment file)."""


class UsageError(KgTransferError, ValueError):
    """An operation was called outside its contract (length mismatch, finished episode, ...)."""


class VocabularyError(KgTransferError, ValueError):
    """An entity or relation is unknown to the vocabulary in use."""


class CheckpointError(KgTransferError, ValueError):
    """A checkpoint cannot be loaded into the requested network."""


class DecisionLogError(KgTransferError, ValueError):
    """A decision log or trace file is malformed."""
