"""Services for OrderForge."""

from src.services.batch import BatchService
from src.services.pipelines import PIPELINES, replay, run_pipeline

__all__ = [
    "BatchService",
    "PIPELINES",
    "replay",
    "run_pipeline",
]
