"""Parity-check QND gadgets built on a cavity-NV spin.

The circular-polarization beam-splitter networks are not modeled as
geometry. Each photon passage is compiled into a diagonal map on
(photon qubits, NV spin):

* P-QND: only the R component meets the cavity and picks up the reflection
  amplitude for the current spin value; L bypasses with amplitude 1.
* S-QND: only the path-2 component meets the cavity; the half-wave-plate
  phase flip that follows makes the effect polarization independent.

In the ideal limit (r, r0) = (1, -1) both reduce to a phase of -1 on
(interacting component, spin +1), which flips |+> <-> |-> once per
interacting photon.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import hilbert as hb
from .cavity import IDEAL_PAIR, ReflectionPair, lossy_reflection_rule
from .errors import NormalizationError, RegisterError
from .hilbert import L, PATH1, PATH2, R, SPIN_MINUS, SPIN_PLUS, PureState
from .optics import H


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"

    @classmethod
    def of(cls, a: int, b: int) -> Parity:
        return cls.EVEN if a == b else cls.ODD


@dataclass(frozen=True)
class ParityOutcome:
    parity: Parity
    nv_post: str  # "+" or "-"
    photon_post: PureState
    transmission: float = 1.0  # squared norm kept by a lossy interaction


PLUS_SPIN = np.array([1, 1], dtype=complex) / np.sqrt(2)


def _mode(mode: ReflectionPair | None) -> ReflectionPair:
    return IDEAL_PAIR if mode is None else ReflectionPair(*mode)


def _fresh_owner(state: PureState, stem: str) -> str:
    owners = {q.owner for q in state.register}
    k = 1
    while f"{stem}{k}" in owners:
        k += 1
    return f"{stem}{k}"


def p_unit_factor(rp: ReflectionPair) -> dict[tuple[int, int], complex]:
    """Factor on (photon.pol, spin) for one pass through the P-QND."""
    rule = lossy_reflection_rule(rp)
    return {
        (R, SPIN_MINUS): rule[R, SPIN_MINUS],
        (R, SPIN_PLUS): rule[R, SPIN_PLUS],
        (L, SPIN_MINUS): 1.0,
        (L, SPIN_PLUS): 1.0,
    }


def s_unit_factor(rp: ReflectionPair) -> dict[tuple[int, int, int], complex]:
    """Factor on (photon.pol, photon.spatial, spin) for one pass through the S-QND."""
    rule = lossy_reflection_rule(rp)
    hwp = {R: 1.0, L: -1.0}
    out = {}
    for p in (R, L):
        for s in (SPIN_MINUS, SPIN_PLUS):
            out[p, PATH1, s] = 1.0
            out[p, PATH2, s] = hwp[p] * rule[p, s]
    return out


def _parity_check(state: PureState, photons: tuple[str, str], which: str,
                  mode: ReflectionPair | None) -> list[tuple[ParityOutcome, float]]:
    if not state.is_normalized():
        raise NormalizationError("QND input must be normalized")
    rp = _mode(mode)
    e = hb.spin(_fresh_owner(state, "e"))
    s = state @ PureState((e,), PLUS_SPIN)
    for x in photons:
        if which == "P":
            s, _ = hb.apply_diagonal_map(s, (hb.pol(x), e), p_unit_factor(rp))
        else:
            s, _ = hb.apply_diagonal_map(s, (hb.pol(x), hb.spat(x), e), s_unit_factor(rp))
    transmission = s.norm_sq
    out = []
    # columns of H are |+>, |->
    for branch in hb.measure(s.normalized(), [e], H):
        k = branch.result(e)
        outcome = ParityOutcome(Parity.EVEN if k == 0 else Parity.ODD, "+-"[k],
                                branch.post_state, transmission)
        out.append((outcome, branch.probability))
    return out


def p_qnd(state: PureState, photons: tuple[str, str],
          mode: ReflectionPair | None = None) -> list[tuple[ParityOutcome, float]]:
    """Polarization parity check on two photons via a fresh NV spin in |+>.

    Returns the even and the odd branch (in that order) with Born
    probabilities. ``mode`` is ``None`` for the ideal gadget or a
    :class:`ReflectionPair` for the lossy one; lossy branches are
    renormalized and carry the surviving squared norm as ``transmission``.
    """
    return _parity_check(state, photons, "P", mode)


def s_qnd(state: PureState, photons: tuple[str, str],
          mode: ReflectionPair | None = None) -> list[tuple[ParityOutcome, float]]:
    """Spatial-mode parity check on two photons; see :func:`p_qnd`."""
    return _parity_check(state, photons, "S", mode)


def nv_readout(spin_state: PureState, mode: ReflectionPair | None = None) -> dict[int, float]:
    """Read an NV spin in the (-1, +1) basis by scattering an auxiliary photon.

    The photon starts in (R+L)/sqrt2 and is measured in the linear basis;
    (R+L)/sqrt2 reports spin -1 and (R-L)/sqrt2 reports spin +1.
    """
    if spin_state.n_qubits != 1 or spin_state.register[0].kind is not hb.Kind.SPIN:
        raise RegisterError("nv_readout expects a single NV spin")
    if not spin_state.is_normalized():
        raise NormalizationError("spin state must be normalized")
    e = spin_state.register[0]
    p = hb.pol(_fresh_owner(spin_state, "p"))
    s = spin_state @ PureState((p,), PLUS_SPIN)
    s, _ = hb.apply_diagonal_map(s, (p, e), p_unit_factor(_mode(mode)))
    branches = hb.measure(s.normalized(), [p], H)
    return {-1: branches[0].probability, +1: branches[1].probability}


def qnd_process_fidelity(which: str, rp: ReflectionPair, input_state: PureState,
                         photons: tuple[str, str] | None = None) -> float:
    """Outcome-averaged fidelity of a lossy QND against the ideal one.

    For each NV outcome the renormalized lossy photonic post-state is
    compared with the ideal post-state for the same outcome; outcomes the
    ideal gadget never produces count as fidelity 0.
    """
    which = which.upper()
    if which not in ("P", "S"):
        raise ValueError("which must be 'P' or 'S'")
    if photons is None:
        owners = list(dict.fromkeys(q.owner for q in input_state.register))
        if len(owners) != 2:
            raise RegisterError("cannot infer the photon pair from the register")
        photons = tuple(owners)
    ideal = _parity_check(input_state, photons, which, None)
    lossy = _parity_check(input_state, photons, which, rp)
    total = 0.0
    for (lo, p_lo), (io, p_io) in zip(lossy, ideal):
        if p_lo > 0 and p_io > 1e-15:
            total += p_lo * hb.fidelity(lo.photon_post, io.photon_post)
    return total


def single_pass_fidelity(rp: ReflectionPair) -> float:
    """Fidelity of one (R+L)/sqrt2 photon scattering off an NV in |+>, lossy vs ideal."""
    e = hb.spin("e1")
    x = hb.pol("p1")
    start = PureState((x,), PLUS_SPIN) @ PureState((e,), PLUS_SPIN)
    ideal, _ = hb.apply_diagonal_map(start, (x, e), p_unit_factor(IDEAL_PAIR))
    lossy, _ = hb.apply_diagonal_map(start, (x, e), p_unit_factor(rp))
    return hb.fidelity(lossy.normalized(), ideal)
