"""Single-photon Mach-Zehnder interferometer with beamsplitters that exist only in parts of spacetime.

The photon is a wavepacket with finite extent in both time and space.  A
beamsplitter acts only where the packet overlaps its presence region, so
inserting or removing it "late" changes the detection statistics by exactly
the overlapping fraction of the packet.
"""

from .closed_form import (
    DetectionCurve,
    DetectorWindow,
    detection_curve,
    detection_probability,
    final_amplitude,
    final_density,
    total_probabilities,
)
from .engine import GridState, StepLog, run_pipeline, state_probabilities
from .errors import (
    AnnihilationError,
    ConfigError,
    DomainError,
    DomainOverflowError,
    PevError,
    PhysicsError,
    ResolutionError,
    SnappingError,
    TruncationError,
    TruncationWarning,
)
from .grid import AxisGrid
from .optics import Beamsplitter, BranchKey, Detector, branch_coefficient
from .regions import SpacetimeRegion
from .scenarios import (
    PRESETS,
    DetectorSpec,
    Geometry,
    Photon,
    Scenario,
    load_config,
    parse_config,
    preset,
    render,
    validate,
)

__all__ = [
    "AnnihilationError",
    "AxisGrid",
    "Beamsplitter",
    "BranchKey",
    "ConfigError",
    "DetectionCurve",
    "Detector",
    "DetectorSpec",
    "DetectorWindow",
    "DomainError",
    "DomainOverflowError",
    "Geometry",
    "GridState",
    "PRESETS",
    "PevError",
    "Photon",
    "PhysicsError",
    "ResolutionError",
    "Scenario",
    "SnappingError",
    "SpacetimeRegion",
    "StepLog",
    "TruncationError",
    "TruncationWarning",
    "branch_coefficient",
    "detection_curve",
    "detection_probability",
    "final_amplitude",
    "final_density",
    "load_config",
    "parse_config",
    "preset",
    "render",
    "run_pipeline",
    "state_probabilities",
    "total_probabilities",
    "validate",
]
