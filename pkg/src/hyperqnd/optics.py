"""Linear-optical elements and (hyper-)Bell state constructors.

Each photon carries two qubits, ``<photon>.pol`` and ``<photon>.spatial``.
A hyperentangled pair of photons X, Y lives on the register
``(X.pol, Y.pol, X.spatial, Y.spatial)``.
"""
from __future__ import annotations

from enum import Enum
from typing import NamedTuple

import numpy as np

from . import hilbert as hb
from .errors import RegisterError
from .hilbert import PureState

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


class Dof(str, Enum):
    POL = "pol"
    SPATIAL = "spatial"

    def qubit(self, photon: str) -> hb.QubitLabel:
        return hb.pol(photon) if self is Dof.POL else hb.spat(photon)


class BellLabel(Enum):
    PHI_PLUS = ("even", +1)
    PHI_MINUS = ("even", -1)
    PSI_PLUS = ("odd", +1)
    PSI_MINUS = ("odd", -1)

    @property
    def parity(self) -> str:
        return self.value[0]

    @property
    def phase(self) -> int:
        return self.value[1]

    @property
    def symbol(self) -> str:
        return ("phi" if self.parity == "even" else "psi") + ("+" if self.phase > 0 else "-")

    def __str__(self) -> str:
        return self.symbol


PHI_PLUS, PHI_MINUS = BellLabel.PHI_PLUS, BellLabel.PHI_MINUS
PSI_PLUS, PSI_MINUS = BellLabel.PSI_PLUS, BellLabel.PSI_MINUS


class HyperBellLabel(NamedTuple):
    pol: BellLabel
    spat: BellLabel

    def __str__(self) -> str:
        return f"({self.pol},{self.spat})"


HYPER_BELL_LABELS: tuple[HyperBellLabel, ...] = tuple(
    HyperBellLabel(p, s) for p in BellLabel for s in BellLabel
)
TARGET = HyperBellLabel(PHI_PLUS, PHI_PLUS)


def pair_register(x: str, y: str) -> tuple[hb.QubitLabel, ...]:
    return (hb.pol(x), hb.pol(y), hb.spat(x), hb.spat(y))


def bell_state(pair: tuple[str, str], dof: Dof | str, label: BellLabel) -> PureState:
    x, y = pair
    if x == y:
        raise RegisterError("a Bell pair needs two distinct photons")
    dof = Dof(dof)
    amps = np.zeros(4, dtype=complex)
    if label.parity == "even":
        amps[0b00], amps[0b11] = 1, label.phase
    else:
        amps[0b01], amps[0b10] = 1, label.phase
    return PureState((dof.qubit(x), dof.qubit(y)), amps / np.sqrt(2))


def hyper_bell_state(pair: tuple[str, str], label: HyperBellLabel) -> PureState:
    return bell_state(pair, Dof.POL, label.pol) @ bell_state(pair, Dof.SPATIAL, label.spat)


def hyper_bell_weights(state: PureState, pair: tuple[str, str]) -> dict[HyperBellLabel, float]:
    """Squared overlaps of a normalized pair state with the 16 hyper-Bell states.

    Coherences between labels are discarded; the weights sum to 1.
    """
    state = hb.reorder(state, pair_register(*pair))
    return {lab: abs(hb.inner(hyper_bell_state(pair, lab), state)) ** 2
            for lab in HYPER_BELL_LABELS}


def identify_hyper_bell(state: PureState, pair: tuple[str, str]) -> tuple[HyperBellLabel, float]:
    """Closest hyper-Bell label and its fidelity with ``state``."""
    weights = hyper_bell_weights(state, pair)
    best = max(weights, key=weights.get)
    return best, weights[best]


def hadamard_pol(state: PureState, photon: str) -> PureState:
    """Half-wave plate at 22.5 degrees: R -> (R+L)/sqrt2, L -> (R-L)/sqrt2."""
    return hb.apply_local_unitary(state, hb.pol(photon), H)


def hadamard_spatial(state: PureState, photon: str) -> PureState:
    """50:50 beam splitter acting on the two paths of one photon."""
    return hb.apply_local_unitary(state, hb.spat(photon), H)


def sigma_z_pol(state: PureState, photon: str) -> PureState:
    return hb.apply_local_unitary(state, hb.pol(photon), Z)


def sigma_x_pol(state: PureState, photon: str) -> PureState:
    return hb.apply_local_unitary(state, hb.pol(photon), X)


def sigma_z_spatial(state: PureState, photon: str) -> PureState:
    return hb.apply_local_unitary(state, hb.spat(photon), Z)


def sigma_x_spatial(state: PureState, photon: str) -> PureState:
    return hb.apply_local_unitary(state, hb.spat(photon), X)


def phase_to_bit_frame(state: PureState, photon: str) -> PureState:
    # applied to both photons of a pair this swaps phase-flip and bit-flip errors
    return hadamard_pol(hadamard_spatial(state, photon), photon)
