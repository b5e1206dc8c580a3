"""Hyperentanglement purification with polarization and spatial parity checks.

Two analytic routes live here: the per-DOF fidelity recurrence, and an
exhaustive four-photon simulation that pushes every pair of hyper-Bell
components through the QND gadgets, post-selection, Hadamards, detections
and phase corrections.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

from .. import hilbert as hb
from .. import optics as op
from ..cavity import ReflectionPair
from ..errors import DomainError
from ..optics import HYPER_BELL_LABELS, TARGET, BellLabel, HyperBellLabel
from ..qnd import Parity, p_qnd, s_qnd

PAIR_AB = ("A", "B")
PAIR_CD = ("C", "D")
ENSEMBLE_TOL = 1e-12


@dataclass(frozen=True)
class EppEnsemble:
    """Classical mixture of hyper-Bell states for one photon pair."""

    weights: Mapping[HyperBellLabel, float]

    def __post_init__(self):
        w = {lab: float(self.weights.get(lab, 0.0)) for lab in HYPER_BELL_LABELS}
        if any(v < -ENSEMBLE_TOL for v in w.values()):
            raise DomainError("ensemble weights must be nonnegative")
        if abs(sum(w.values()) - 1.0) > ENSEMBLE_TOL:
            raise DomainError(f"ensemble weights sum to {sum(w.values())!r}, not 1")
        object.__setattr__(self, "weights", {k: max(v, 0.0) for k, v in w.items()})

    @classmethod
    def bit_flip(cls, f1: float, f2: float) -> EppEnsemble:
        """phi+/psi+ mixture in each DOF with phi+ weights ``f1`` (pol), ``f2`` (spatial)."""
        _check_fidelity(f1, f2)
        pol = {BellLabel.PHI_PLUS: f1, BellLabel.PSI_PLUS: 1 - f1}
        sp = {BellLabel.PHI_PLUS: f2, BellLabel.PSI_PLUS: 1 - f2}
        return cls({HyperBellLabel(p, s): wp * ws for p, wp in pol.items() for s, ws in sp.items()})

    @property
    def f1(self) -> float:
        return sum(w for lab, w in self.weights.items() if lab.pol is BellLabel.PHI_PLUS)

    @property
    def f2(self) -> float:
        return sum(w for lab, w in self.weights.items() if lab.spat is BellLabel.PHI_PLUS)

    @property
    def fidelity(self) -> float:
        return self.weights[TARGET]

    def dominant(self) -> HyperBellLabel:
        return max(self.weights, key=self.weights.get)

    def support(self) -> list[tuple[HyperBellLabel, float]]:
        return [(lab, w) for lab, w in self.weights.items() if w > 0]


@dataclass(frozen=True)
class EppRoundResult:
    kept_ensemble: EppEnsemble
    yield_prob: float
    discarded_prob: float
    f1_prime: float
    f2_prime: float

    @property
    def fidelity(self) -> float:
        return self.kept_ensemble.fidelity


@dataclass(frozen=True)
class EppStep:
    n: int
    f1: float
    f2: float
    fidelity: float
    cumulative_yield: float


def _check_fidelity(*fs: float):
    for f in fs:
        if not 0.0 <= f <= 1.0:
            raise DomainError(f"fidelity {f!r} outside [0, 1]")


def _purify(f: float) -> tuple[float, float]:
    keep = f * f + (1 - f) ** 2
    return f * f / keep, keep


def epp_recurrence(f1: float, f2: float) -> tuple[float, float, float]:
    """One purification round: (f1', f2', yield).

    A pair survives only if both DOFs pass, so the yield is the product of
    the per-DOF pass probabilities.
    """
    _check_fidelity(f1, f2)
    g1, k1 = _purify(f1)
    g2, k2 = _purify(f2)
    return g1, g2, k1 * k2


def epp_iterate(f1: float, f2: float, n: int) -> list[EppStep]:
    """Trajectory of ``n`` rounds, starting with the unpurified row ``n = 0``."""
    if n < 0:
        raise DomainError("number of rounds must be nonnegative")
    _check_fidelity(f1, f2)
    rows = [EppStep(0, f1, f2, f1 * f2, 1.0)]
    cum = 1.0
    for k in range(1, n + 1):
        f1, f2, y = epp_recurrence(f1, f2)
        cum *= y
        rows.append(EppStep(k, f1, f2, f1 * f2, cum))
    return rows


# ---- circuit-level simulation ------------------------------------------------

@dataclass
class _Branch:
    prob: float
    state: hb.PureState
    parities: dict = field(default_factory=dict)


def _expand(branches: list[_Branch], gadget, photons, key, mode) -> list[_Branch]:
    out = []
    for b in branches:
        for outcome, p in gadget(b.state, photons, mode):
            if p > 0:
                out.append(_Branch(b.prob * p, outcome.photon_post, {**b.parities, key: outcome.parity}))
    return out


@lru_cache(maxsize=None)
def epp_component(lab_ab: HyperBellLabel, lab_cd: HyperBellLabel,
                  mode: ReflectionPair | None = None) -> tuple[float, dict[HyperBellLabel, float]]:
    """Run one round on the pure input |lab_ab>_AB |lab_cd>_CD.

    Returns the probability that the round keeps AB and the (unnormalized)
    distribution of AB's output label given keep.
    """
    state = op.hyper_bell_state(PAIR_AB, lab_ab) @ op.hyper_bell_state(PAIR_CD, lab_cd)
    branches = [_Branch(1.0, state)]
    branches = _expand(branches, p_qnd, ("A", "C"), "pol_AC", mode)
    branches = _expand(branches, p_qnd, ("B", "D"), "pol_BD", mode)
    branches = _expand(branches, s_qnd, ("A", "C"), "spat_AC", mode)
    branches = _expand(branches, s_qnd, ("B", "D"), "spat_BD", mode)

    kept: dict[HyperBellLabel, float] = {}
    for b in branches:
        par = b.parities
        if par["pol_AC"] != par["pol_BD"] or par["spat_AC"] != par["spat_BD"]:
            continue
        s = b.state
        if par["pol_AC"] is Parity.ODD:
            s = op.sigma_x_pol(op.sigma_x_pol(s, "C"), "D")
        if par["spat_AC"] is Parity.ODD:
            s = op.sigma_x_spatial(op.sigma_x_spatial(s, "C"), "D")
        for x in PAIR_CD:
            s = op.hadamard_spatial(op.hadamard_pol(s, x), x)
        detected = [hb.pol("C"), hb.pol("D"), hb.spat("C"), hb.spat("D")]
        for m in hb.measure(s, detected):
            if m.probability == 0:
                continue
            ab = m.post_state
            res = dict(m.outcome)
            if res[hb.pol("C")] != res[hb.pol("D")]:
                ab = op.sigma_z_pol(ab, "B")
            if res[hb.spat("C")] != res[hb.spat("D")]:
                ab = op.sigma_z_spatial(ab, "B")
            for lab, w in op.hyper_bell_weights(ab, PAIR_AB).items():
                if w > 0:
                    kept[lab] = kept.get(lab, 0.0) + b.prob * m.probability * w
    return sum(kept.values()), kept


def epp_round_simulated(ensemble: EppEnsemble, mode: ReflectionPair | None = None) -> EppRoundResult:
    """Exhaustive branch enumeration of one purification round.

    Every ordered pair of components (AB, CD) is weighted by the product of
    their ensemble weights; the output ensemble is the kept mass per label,
    renormalized.
    """
    kept: dict[HyperBellLabel, float] = {}
    total_kept = 0.0
    for lab_ab, w_ab in ensemble.support():
        for lab_cd, w_cd in ensemble.support():
            p_keep, dist = epp_component(lab_ab, lab_cd, mode)
            total_kept += w_ab * w_cd * p_keep
            for lab, w in dist.items():
                kept[lab] = kept.get(lab, 0.0) + w_ab * w_cd * w
    if total_kept <= 0:
        raise DomainError("no component survives the purification round")
    norm = sum(kept.values())
    out = EppEnsemble({k: v / norm for k, v in kept.items()})
    return EppRoundResult(out, total_kept, 1.0 - total_kept, out.f1, out.f2)


def epp_iterate_simulated(ensemble: EppEnsemble, n: int) -> list[EppStep]:
    rows = [EppStep(0, ensemble.f1, ensemble.f2, ensemble.fidelity, 1.0)]
    cum = 1.0
    for k in range(1, n + 1):
        res = epp_round_simulated(ensemble)
        cum *= res.yield_prob
        ensemble = res.kept_ensemble
        rows.append(EppStep(k, res.f1_prime, res.f2_prime, res.fidelity, cum))
    return rows
