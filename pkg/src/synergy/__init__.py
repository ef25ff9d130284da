"""Synergistic sorting, multiselection, deferred rank/select and compressed multisets."""
from .core import InstrumentedArray, detect_runs, detect_pivot_positions

__all__ = ["InstrumentedArray", "detect_runs", "detect_pivot_positions"]
