"""Resumable, cost-accounted video-editing data synthesis pipeline."""

__version__ = "0.1.0"
