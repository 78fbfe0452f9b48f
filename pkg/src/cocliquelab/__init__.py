"""Verification lab for maximal cocliques in generating graphs of PSL(2, q)."""

__version__ = "0.1.0"

ARTIFACT_VERSION = __version__
