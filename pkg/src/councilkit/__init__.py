"""councilkit: curation, search, and n-gram analytics for council meeting records."""

__version__ = "0.1.0"
