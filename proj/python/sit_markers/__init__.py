"""Multimodal behavioural markers from simulated-interaction recordings.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports it.
"""

from ._core import (
    SitmError,
    SynthSpec,
    chi_square_2x2,
    evaluate,
    extract,
    hrv_metrics,
    mann_whitney_u,
    plotdata,
    project_gaze,
    pulse_rate,
    synth,
)

__all__ = [
    "SitmError",
    "SynthSpec",
    "chi_square_2x2",
    "evaluate",
    "extract",
    "hrv_metrics",
    "mann_whitney_u",
    "plotdata",
    "project_gaze",
    "pulse_rate",
    "synth",
]

__version__ = "0.1.0"
