"""Two-channel algebra of the interferometer.

Channel states are length-2 complex arrays ``(c1, c2)`` on the arm basis
``|1>, |2>``.  The photon always enters in channel 1, so each of the four
gating branches (inside/outside the first beamsplitter's region, times
inside/outside the second's) maps it to a fixed output vector.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import NamedTuple

import numpy as np

_S = 1.0 / math.sqrt(2.0)

#: B1|1> = (|1> + |2>)/sqrt2, B1|2> = (-|1> + |2>)/sqrt2  (columns are images).
BS1_MATRIX = _S * np.array([[1.0, -1.0], [1.0, 1.0]], dtype=complex)
#: B2|1> = (|1> - |2>)/sqrt2, B2|2> = (|1> + |2>)/sqrt2.
BS2_MATRIX = _S * np.array([[1.0, 1.0], [-1.0, 1.0]], dtype=complex)


class Beamsplitter(str, Enum):
    BS1 = "bs1"
    BS2 = "bs2"


class Detector(str, Enum):
    D1 = "d1"
    D2 = "d2"

    @property
    def channel(self) -> int:
        return 0 if self is Detector.D1 else 1


class BranchKey(NamedTuple):
    in_bs1: bool
    in_bs2: bool


ALL_BRANCHES = tuple(BranchKey(a, b) for a in (True, False) for b in (True, False))


def channel_vec(c1=1.0, c2=0.0) -> np.ndarray:
    return np.array([c1, c2], dtype=complex)


def bs_matrix(which: Beamsplitter) -> np.ndarray:
    return BS1_MATRIX if Beamsplitter(which) is Beamsplitter.BS1 else BS2_MATRIX


def apply_bs(which: Beamsplitter, v) -> np.ndarray:
    return bs_matrix(which) @ np.asarray(v, dtype=complex)


def mirror_matrix(kappa1: float, kappa2: float) -> np.ndarray:
    return np.diag([np.exp(1j * kappa1), np.exp(1j * kappa2)])


def apply_mirror(kappa1: float, kappa2: float, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.array([np.exp(1j * kappa1) * v[0], np.exp(1j * kappa2) * v[1]])


def branch_amplitudes(key: BranchKey, kappa1: float, kappa2: float) -> np.ndarray:
    """Output channel amplitudes for unit input in channel 1, per branch."""
    e1, e2 = np.exp(1j * kappa1), np.exp(1j * kappa2)
    if key.in_bs1 and key.in_bs2:
        return 0.5 * np.array([e1 + e2, -e1 + e2])
    if key.in_bs2:
        return _S * e1 * np.array([1.0, -1.0])
    if key.in_bs1:
        return _S * np.array([e1, e2])
    return np.array([e1, 0.0])


def branch_coefficient(key: BranchKey, detector: Detector, kappa1: float, kappa2: float) -> float:
    """Density weight of a branch at a detector; the two detectors' weights sum to 1."""
    detector = Detector(detector)
    if key.in_bs1 and key.in_bs2:
        c = math.cos(kappa1 - kappa2)
        return 0.5 * (1.0 + c) if detector is Detector.D1 else 0.5 * (1.0 - c)
    if key.in_bs1 or key.in_bs2:
        return 0.5
    return 1.0 if detector is Detector.D1 else 0.0


def coefficient_table(detector: Detector, kappa1: float, kappa2: float) -> np.ndarray:
    """Weights indexed as ``table[in_bs1, in_bs2]`` (booleans as 0/1)."""
    table = np.empty((2, 2))
    for key in ALL_BRANCHES:
        table[int(key.in_bs1), int(key.in_bs2)] = branch_coefficient(key, detector, kappa1, kappa2)
    return table


def amplitude_table(kappa1: float, kappa2: float) -> np.ndarray:
    """Output amplitudes indexed as ``table[in_bs1, in_bs2, channel]``."""
    table = np.empty((2, 2, 2), dtype=complex)
    for key in ALL_BRANCHES:
        table[int(key.in_bs1), int(key.in_bs2)] = branch_amplitudes(key, kappa1, kappa2)
    return table
