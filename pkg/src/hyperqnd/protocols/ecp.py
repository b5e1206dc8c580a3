"""Hyperentanglement concentration of partially hyperentangled pure pairs.

Each pair starts in (a|RR> + b|LL>) (c|11> + d|22>). A round pairs two
identical copies, checks polarization parity on one side and spatial parity
on the other, and measures the second copy out. Per DOF an odd outcome gives
a maximally entangled DOF; an even outcome leaves the squared-amplitude
residual (a^2, b^2)/norm, which is fed to the next round together with an
identical copy. A DOF that is already maximal stays maximal on either parity.

Because the two DOFs evolve independently, the round tree is a product of
two small Markov chains; :func:`ecp_success_probability` expands the tree
explicitly and :func:`ecp_success_simulated` drives the same tree with the
four-photon circuit instead of the per-DOF step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .. import hilbert as hb
from .. import optics as op
from ..cavity import ReflectionPair
from ..errors import DomainError
from ..hilbert import PureState
from ..qnd import Parity, p_qnd, s_qnd
from .epp import PAIR_AB

AMP_TOL = 1e-12


@dataclass(frozen=True)
class Maximal:
    def __str__(self) -> str:
        return "maximal"


@dataclass(frozen=True)
class Residual:
    a: float
    b: float

    def __post_init__(self):
        # a zero amplitude is reachable through float underflow after many rounds
        if not (self.a >= 0 and self.b >= 0):
            raise DomainError(f"residual amplitudes must be nonnegative, got {self.a!r}, {self.b!r}")
        if abs(self.a**2 + self.b**2 - 1) > AMP_TOL:
            raise DomainError(f"residual amplitudes are not normalized: {self.a!r}, {self.b!r}")

    @classmethod
    def from_squares(cls, a2: float, b2: float) -> Residual:
        s = a2 + b2
        return cls(math.sqrt(a2 / s), math.sqrt(b2 / s))

    def __str__(self) -> str:
        return f"residual({self.a:.6g}, {self.b:.6g})"


MAXIMAL = Maximal()
EcpDofState = Union[Maximal, Residual]


@dataclass(frozen=True)
class EcpNode:
    pol: EcpDofState
    spat: EcpDofState
    reach_prob: float

    @property
    def success(self) -> bool:
        return isinstance(self.pol, Maximal) and isinstance(self.spat, Maximal)


@dataclass(frozen=True)
class EcpResult:
    per_round: list[float]
    total: float

    @property
    def cumulative(self) -> list[float]:
        return list(np.cumsum(self.per_round))


def ecp_dof_step(s: EcpDofState) -> list[tuple[str, float, EcpDofState]]:
    """Outcomes of one round for a single DOF: (parity, probability, next state)."""
    if isinstance(s, Maximal):
        return [("odd", 0.5, MAXIMAL), ("even", 0.5, MAXIMAL)]
    a2, b2 = s.a**2, s.b**2
    odd = 2 * a2 * b2
    even = a2 * a2 + b2 * b2
    return [("odd", odd, MAXIMAL), ("even", even, Residual.from_squares(a2 * a2, b2 * b2))]


def _check_amplitude(name: str, x: float):
    if not 0.0 < x < 1.0:
        raise DomainError(f"{name} must lie strictly between 0 and 1, got {x!r}")


def _root(alpha: float, gamma: float) -> EcpNode:
    _check_amplitude("alpha", alpha)
    _check_amplitude("gamma", gamma)
    return EcpNode(Residual(alpha, math.sqrt(1 - alpha**2)),
                   Residual(gamma, math.sqrt(1 - gamma**2)), 1.0)


def ecp_expand(node: EcpNode) -> list[EcpNode]:
    """Children of one node after a round; identical children are merged."""
    children: dict[tuple, EcpNode] = {}
    for _, pp, pol in ecp_dof_step(node.pol):
        for _, ps, sp in ecp_dof_step(node.spat):
            p = node.reach_prob * pp * ps
            key = (pol, sp)
            if key in children:
                p += children[key].reach_prob
            children[key] = EcpNode(pol, sp, p)
    return list(children.values())


def ecp_success_probability(alpha: float, gamma: float, n: int) -> EcpResult:
    """Per-round first-success probabilities p(1..n) and their sum.

    ``alpha`` and ``gamma`` are the |RR> and |11> amplitudes; the partner
    amplitudes are sqrt(1 - alpha^2) and sqrt(1 - gamma^2).
    """
    if n < 0:
        raise DomainError("number of rounds must be nonnegative")
    frontier = [_root(alpha, gamma)]
    per_round = []
    for _ in range(n):
        succ = 0.0
        nxt: dict[tuple, EcpNode] = {}
        for node in frontier:
            for child in ecp_expand(node):
                if child.success:
                    succ += child.reach_prob
                    continue
                key = (child.pol, child.spat)
                if key in nxt:
                    child = EcpNode(child.pol, child.spat, child.reach_prob + nxt[key].reach_prob)
                nxt[key] = child
        per_round.append(succ)
        frontier = list(nxt.values())
    return EcpResult(per_round, float(sum(per_round)))


def ecp_dof_bound(a: float) -> float:
    """Largest achievable per-DOF success probability, 2 min(a^2, b^2)."""
    return 2 * min(a * a, 1 - a * a)


def _check_normalized(alpha, beta, gamma, delta):
    if abs(alpha**2 + beta**2 - 1) > 1e-9 or abs(gamma**2 + delta**2 - 1) > 1e-9:
        raise DomainError("amplitudes must satisfy alpha^2+beta^2 = gamma^2+delta^2 = 1")


def ecp_round_formulas(alpha: float, beta: float, gamma: float, delta: float) -> dict[str, float]:
    """Closed-form first- and second-round probabilities."""
    _check_normalized(alpha, beta, gamma, delta)
    ab2 = (alpha * beta) ** 2
    gd2 = (gamma * delta) ** 2
    s_pol = alpha**4 + beta**4
    s_spat = gamma**4 + delta**4
    return {
        "p1": 4 * ab2 * gd2,
        "p1_even_even": s_pol * s_spat,
        "p1_mixed_pol": 2 * ab2 * s_spat,
        "p1_mixed_spat": 2 * gd2 * s_pol,
        "p2_1": 4 * ab2**2 * gd2**2 / (s_pol * s_spat),
        "p2_2": 4 * gd2**2 * ab2 / s_spat,
        "p2_3": 4 * ab2**2 * gd2 / s_pol,
    }


# ---- circuit-level simulation ------------------------------------------------

@dataclass(frozen=True)
class EcpClass:
    pol_parity: Parity
    spat_parity: Parity
    probability: float
    residual: PureState | None  # normalized AB state after detections and corrections
    consistency: float  # min fidelity between residuals of different detector outcomes

    def dof_amplitudes(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return pair_amplitudes(self.residual)


def partial_pair(pair: tuple[str, str], pol_amps, spat_amps) -> PureState:
    x, y = pair
    p = np.zeros(4, dtype=complex)
    p[0b00], p[0b11] = pol_amps
    s = np.zeros(4, dtype=complex)
    s[0b00], s[0b11] = spat_amps
    return PureState((hb.pol(x), hb.pol(y)), p) @ PureState((hb.spat(x), hb.spat(y)), s)


def pair_amplitudes(state: PureState) -> tuple[tuple[float, float], tuple[float, float]]:
    """Read (RR, LL) and (11, 22) amplitudes from a product pol x spatial pair state.

    The global phase is removed; amplitudes are returned as nonnegative reals
    normalized per DOF.
    """
    state = hb.reorder(state, op.pair_register(*PAIR_AB))
    m = state.amplitudes.reshape(4, 4)
    u, sv, vh = np.linalg.svd(m)
    if sv[1] > 1e-9 * sv[0]:
        raise DomainError("pair state is not a product of its two DOFs")
    pol_vec, spat_vec = u[:, 0], vh[0]
    pol = (abs(pol_vec[0b00]), abs(pol_vec[0b11]))
    sp = (abs(spat_vec[0b00]), abs(spat_vec[0b11]))
    npol, nsp = math.hypot(*pol), math.hypot(*sp)
    return (pol[0] / npol, pol[1] / npol), (sp[0] / nsp, sp[1] / nsp)


def ecp_round_simulated(alpha: float, beta: float, gamma: float, delta: float,
                        mode: ReflectionPair | None = None) -> dict[tuple[Parity, Parity], EcpClass]:
    """One concentration round on two identical copies, enumerated exactly.

    Alice checks polarization parity of (A, C), Bob checks spatial parity of
    (B, D). In every class photons C and D then pass Hadamards in both DOFs
    and are detected; B receives a phase flip in each DOF whose detector pair
    clicked with odd parity. Keys are (pol parity, spatial parity).
    """
    _check_normalized(alpha, beta, gamma, delta)
    copy_ab = partial_pair(("A", "B"), (alpha, beta), (gamma, delta))
    copy_cd = partial_pair(("C", "D"), (alpha, beta), (gamma, delta))
    state = copy_ab @ copy_cd
    classes = {}
    for po, pp in p_qnd(state, ("A", "C"), mode):
        for so, ps in s_qnd(po.photon_post, ("B", "D"), mode):
            prob = pp * ps
            key = (po.parity, so.parity)
            if prob <= 0:
                classes[key] = EcpClass(*key, 0.0, None, 1.0)
                continue
            s = so.photon_post
            for x in ("C", "D"):
                s = op.hadamard_spatial(op.hadamard_pol(s, x), x)
            residual, consistency = None, 1.0
            for m in hb.measure(s, [hb.pol("C"), hb.pol("D"), hb.spat("C"), hb.spat("D")]):
                if m.probability <= 1e-15:
                    continue
                res = dict(m.outcome)
                ab = m.post_state
                if res[hb.pol("C")] != res[hb.pol("D")]:
                    ab = op.sigma_z_pol(ab, "B")
                if res[hb.spat("C")] != res[hb.spat("D")]:
                    ab = op.sigma_z_spatial(ab, "B")
                if residual is None:
                    residual = ab
                else:
                    consistency = min(consistency, hb.fidelity(residual, ab))
            classes[key] = EcpClass(*key, prob, residual, consistency)
    return classes


def _amps(s: EcpDofState) -> tuple[float, float]:
    if isinstance(s, Maximal):
        return (1 / math.sqrt(2), 1 / math.sqrt(2))
    return (s.a, s.b)


def _passes(s: EcpDofState, parity: Parity) -> bool:
    return isinstance(s, Maximal) or parity is Parity.ODD


def ecp_success_simulated(alpha: float, gamma: float, n: int,
                          mode: ReflectionPair | None = None) -> EcpResult:
    """Same round tree as :func:`ecp_success_probability`, driven by the circuit.

    Each node's state is prepared as two copies, run through
    :func:`ecp_round_simulated`, and the children's DOF states are read back
    from the residual amplitudes.
    """
    if n < 0:
        raise DomainError("number of rounds must be nonnegative")
    frontier = [_root(alpha, gamma)]
    per_round = []
    for _ in range(n):
        succ = 0.0
        nxt: dict[tuple, EcpNode] = {}
        for node in frontier:
            (a, b), (c, d) = _amps(node.pol), _amps(node.spat)
            for (pp, ps), cls in ecp_round_simulated(a, b, c, d, mode).items():
                if cls.probability <= 0:
                    continue
                p = node.reach_prob * cls.probability
                ok_pol, ok_spat = _passes(node.pol, pp), _passes(node.spat, ps)
                if ok_pol and ok_spat:
                    succ += p
                    continue
                (ra, rb), (rc, rd) = cls.dof_amplitudes()
                pol = MAXIMAL if ok_pol else Residual.from_squares(ra * ra, rb * rb)
                sp = MAXIMAL if ok_spat else Residual.from_squares(rc * rc, rd * rd)
                key = (_round_key(pol), _round_key(sp))
                if key in nxt:
                    p += nxt[key].reach_prob
                nxt[key] = EcpNode(pol, sp, p)
        per_round.append(succ)
        frontier = list(nxt.values())
    return EcpResult(per_round, float(sum(per_round)))


def _round_key(s: EcpDofState):
    # merge nodes whose amplitudes agree up to float noise
    return s if isinstance(s, Maximal) else (round(s.a, 12), round(s.b, 12))
