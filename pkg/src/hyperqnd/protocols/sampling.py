"""Seeded Monte Carlo over the exact branch distributions.

Shots are drawn with one ``numpy.random.Generator`` per call, so identical
seeds give identical output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..optics import HYPER_BELL_LABELS, TARGET
from .ecp import ecp_success_probability
from .epp import EppEnsemble, epp_component, epp_round_simulated


@dataclass(frozen=True)
class SampleStats:
    shots: int
    successes: int
    rate: float
    stderr: float
    exact: float
    # EPP: fraction of surviving pairs in the target label; ECP: first-success round histogram
    extra: dict

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.rate == self.exact else math.inf
        return (self.rate - self.exact) / self.stderr


@dataclass(frozen=True)
class EppRun:
    ensemble: EppEnsemble
    n: int


@dataclass(frozen=True)
class EcpRun:
    alpha: float
    gamma: float
    n: int


def _binomial_stats(successes: int, shots: int) -> tuple[float, float]:
    p = successes / shots
    return p, math.sqrt(p * (1 - p) / shots)


def _check_shots(shots: int, n: int):
    if shots < 1:
        raise DomainError("shots must be at least 1")
    if n < 0:
        raise DomainError("number of rounds must be nonnegative")


class _EppTable:
    """Cumulative outcome table indexed by (AB label, CD label), filled on demand.

    Outcome k < 16 keeps AB in label k; outcome 16 discards.
    """

    def __init__(self):
        n = len(HYPER_BELL_LABELS)
        self.cdf = np.zeros((n, n, n + 1))
        self.filled = np.zeros((n, n), dtype=bool)

    def rows(self, ab: np.ndarray, cd: np.ndarray) -> np.ndarray:
        labels = HYPER_BELL_LABELS
        for i, j in set(zip(ab.tolist(), cd.tolist())):
            if self.filled[i, j]:
                continue
            p_keep, dist = epp_component(labels[i], labels[j])
            probs = [dist.get(lab, 0.0) for lab in labels] + [max(0.0, 1.0 - p_keep)]
            self.cdf[i, j] = np.cumsum(probs)
            self.filled[i, j] = True
        return self.cdf[ab, cd]


def sample_epp(ensemble: EppEnsemble, n: int, shots: int, seed: int) -> SampleStats:
    """Follow ``shots`` AB pairs through ``n`` rounds.

    Each round the pair meets a partner drawn from that round's exact input
    ensemble, and the round's outcome is drawn from the component table.
    ``rate`` is the fraction of pairs surviving all rounds.
    """
    _check_shots(shots, n)
    rng = np.random.default_rng(seed)
    labels = HYPER_BELL_LABELS
    table = _EppTable()

    def weights(ens):
        w = np.array([ens.weights[lab] for lab in labels])
        return w / w.sum()

    alive = np.ones(shots, dtype=bool)
    current = rng.choice(len(labels), size=shots, p=weights(ensemble))
    ens, exact = ensemble, 1.0
    for _ in range(n):
        partner = rng.choice(len(labels), size=shots, p=weights(ens))
        u = rng.random(shots)
        rows = table.rows(current, partner)
        outcome = (u[:, None] >= rows[:, :-1]).sum(axis=1)
        outcome = np.minimum(outcome, len(labels))
        alive &= outcome < len(labels)
        current = np.where(alive, outcome, current)
        res = epp_round_simulated(ens)
        exact *= res.yield_prob
        ens = res.kept_ensemble
    successes = int(alive.sum())
    rate, se = _binomial_stats(successes, shots)
    target = labels.index(TARGET)
    good = int((alive & (current == target)).sum())
    extra = {
        "target_fraction": good / successes if successes else float("nan"),
        "exact_fidelity": ens.fidelity,
    }
    return SampleStats(shots, successes, rate, se, exact, extra)


def sample_ecp(alpha: float, gamma: float, n: int, shots: int, seed: int) -> SampleStats:
    """Walk ``shots`` pairs down the concentration tree for up to ``n`` rounds.

    The two DOFs draw their parities independently each round; a shot
    succeeds at the first round after which both DOFs are maximal.
    """
    _check_shots(shots, n)
    rng = np.random.default_rng(seed)
    # per-DOF odd probability at residual depth k: 2 a_k^2 b_k^2
    def odd_table(a):
        a2 = a * a
        out = []
        for _ in range(max(n, 1)):
            b2 = 1 - a2
            out.append(2 * a2 * b2)
            s = a2 * a2 + b2 * b2
            a2 = a2 * a2 / s
        return np.array(out)

    tables = (odd_table(alpha), odd_table(gamma))
    maximal = np.zeros((2, shots), dtype=bool)
    first = np.zeros(shots, dtype=int)  # 0 = not yet succeeded
    for k in range(n):
        for d in range(2):
            u = rng.random(shots)
            maximal[d] |= u < tables[d][k]  # depth == round index while residual
        newly = (first == 0) & maximal[0] & maximal[1]
        first[newly] = k + 1
    successes = int((first > 0).sum())
    rate, se = _binomial_stats(successes, shots)
    hist = np.bincount(first, minlength=n + 1)[1:].tolist()
    exact = ecp_success_probability(alpha, gamma, n).total
    return SampleStats(shots, successes, rate, se, exact, {"first_success_round": hist})


def sample_protocol(run: EppRun | EcpRun, shots: int, seed: int) -> SampleStats:
    if isinstance(run, EppRun):
        return sample_epp(run.ensemble, run.n, shots, seed)
    if isinstance(run, EcpRun):
        return sample_ecp(run.alpha, run.gamma, run.n, shots, seed)
    raise TypeError(f"unknown run type {type(run).__name__}")
