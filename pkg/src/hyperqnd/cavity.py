"""One-sided cavity with an embedded NV center.

All rates and frequencies are in units of 2*pi*GHz. ``gamma``, ``eta`` and
``kappa`` are the full rates; the reflection formula uses their halves.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

from .errors import DomainError
from .hilbert import L, R, SPIN_MINUS, SPIN_PLUS


@dataclass(frozen=True)
class CavityParams:
    g: float
    gamma: float
    eta: float
    kappa: float
    omega_c: float = 0.0
    omega_e: float = 0.0

    def __post_init__(self):
        for name in ("g", "gamma", "eta", "kappa"):
            v = getattr(self, name)
            if not v >= 0:
                raise DomainError(f"{name} must be a nonnegative rate, got {v!r}")

    @property
    def resonant(self) -> bool:
        return self.omega_c == self.omega_e

    def uncoupled(self) -> CavityParams:
        return replace(self, g=0.0)


def nv_reference_params() -> CavityParams:
    """gamma = 2pi x 15 MHz, eta = 10 kappa = 2pi x 10 GHz, g = 0.1 eta."""
    eta = 10.0
    return CavityParams(g=0.1 * eta, gamma=0.015, eta=eta, kappa=eta / 10)


class ReflectionPair(NamedTuple):
    r: complex
    r0: complex


IDEAL_PAIR = ReflectionPair(1.0 + 0j, -1.0 + 0j)


def reflection_coefficient(params: CavityParams, omega: float | None = None) -> complex:
    """Steady-state reflection amplitude a_out/a_in at probe frequency ``omega``.

    ``omega`` defaults to the cavity frequency.
    """
    p = params
    w = p.omega_c if omega is None else omega
    atom = 1j * (p.omega_e - w) + p.gamma / 2
    g2 = p.g * p.g
    num = atom * (1j * (p.omega_c - w) - p.eta / 2 + p.kappa / 2) + g2
    den = atom * (1j * (p.omega_c - w) + p.eta / 2 + p.kappa / 2) + g2
    if abs(den) <= 1e-300:
        raise DomainError("reflection coefficient denominator vanishes")
    return complex(num / den)


def reflection_pair(params: CavityParams, omega: float | None = None) -> ReflectionPair:
    return ReflectionPair(reflection_coefficient(params, omega),
                          reflection_coefficient(params.uncoupled(), omega))


def ideal_reflection_rule() -> dict[tuple[int, int], complex]:
    """Spin-selective phase on (polarization, spin) in the strong-coupling limit."""
    return lossy_reflection_rule(IDEAL_PAIR)


def lossy_reflection_rule(rp: ReflectionPair) -> dict[tuple[int, int], complex]:
    # R couples to the transition when the spin is -1, L when it is +1
    r, r0 = complex(rp.r), complex(rp.r0)
    return {
        (R, SPIN_MINUS): r,
        (R, SPIN_PLUS): r0,
        (L, SPIN_MINUS): r0,
        (L, SPIN_PLUS): r,
    }


def _check_magnitudes(abs_r0: float, abs_r: float):
    for name, v in (("abs_r0", abs_r0), ("abs_r", abs_r)):
        if not 0.0 <= v <= 1.0 + 1e-9:
            raise DomainError(f"{name} must lie in [0, 1], got {v!r}")


def fidelity_closed_form_P(abs_r0: float, abs_r: float) -> float:
    """Fidelity of the polarization parity-check QND on an even-parity input."""
    _check_magnitudes(abs_r0, abs_r)
    a, b = abs_r0, abs_r
    s2 = a**2 + b**2 + 2
    return (s2**2 * (a + b + 2) ** 2) / (16 * (a**4 + b**4 + 2) * s2)


def fidelity_closed_form_S(abs_r0: float, abs_r: float) -> float:
    """Fidelity of the spatial-mode parity-check QND on an even-parity input."""
    _check_magnitudes(abs_r0, abs_r)
    a, b = abs_r0, abs_r
    m = max(a, b)
    if m == 0.0:
        raise DomainError("closed-form S fidelity is undefined at |r0| = |r| = 0")
    # scale-free ratio, evaluated on rescaled magnitudes to avoid underflow
    x, y = a / m, b / m
    ratio = (x**2 + y**2) ** 2 / (x**4 + y**4)
    return (0.5 + ratio / 4) * (a + b + 2) ** 2 / (4 * (a**2 + b**2 + 2))
