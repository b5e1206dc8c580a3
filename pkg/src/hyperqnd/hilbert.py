"""Dense state-vector kernel for small labeled qubit registers.

A register is an ordered tuple of :class:`QubitLabel`. Amplitudes are stored
as a flat complex vector with the first label as the most significant bit.
Basis orders are fixed per qubit kind:

* polarization: (R, L)
* spatial mode: (path-1, path-2)
* NV spin: (-1, +1)

Every value is immutable; operations return new states.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import NormalizationError, RegisterError

NORM_TOL = 1e-12
UNITARY_TOL = 1e-12

# basis indices
R, L = 0, 1
PATH1, PATH2 = 0, 1
SPIN_MINUS, SPIN_PLUS = 0, 1


class Kind(str, Enum):
    POL = "pol"
    SPATIAL = "spatial"
    SPIN = "spin"


@dataclass(frozen=True, order=True)
class QubitLabel:
    owner: str
    kind: Kind

    def __str__(self) -> str:
        return f"{self.owner}.{self.kind.value}"


def pol(owner: str) -> QubitLabel:
    return QubitLabel(owner, Kind.POL)


def spat(owner: str) -> QubitLabel:
    return QubitLabel(owner, Kind.SPATIAL)


def spin(owner: str) -> QubitLabel:
    return QubitLabel(owner, Kind.SPIN)


def _check_register(register: Sequence[QubitLabel]) -> tuple[QubitLabel, ...]:
    register = tuple(register)
    if len(set(register)) != len(register):
        raise RegisterError(f"duplicate labels in register {[str(q) for q in register]}")
    return register


@dataclass(frozen=True, eq=False)
class PureState:
    """Amplitude vector over a labeled register (not necessarily normalized)."""

    register: tuple[QubitLabel, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        register = _check_register(self.register)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(register):
            raise RegisterError(
                f"{amps.size} amplitudes do not fit a {len(register)}-qubit register"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "register", register)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return len(self.register)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_sq - 1.0) <= tol

    def normalized(self) -> PureState:
        n = self.norm_sq
        if n == 0.0:
            raise NormalizationError("cannot normalize the zero vector")
        return PureState(self.register, self.amplitudes / np.sqrt(n))

    def axis(self, label: QubitLabel) -> int:
        try:
            return self.register.index(label)
        except ValueError:
            raise RegisterError(f"label {label} not in register") from None

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis of length 2 per qubit."""
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def amplitude(self, indices: Mapping[QubitLabel, int] | Sequence[int]) -> complex:
        if isinstance(indices, Mapping):
            indices = [indices[q] for q in self.register]
        return complex(self.tensor()[tuple(indices)])

    def __matmul__(self, other: PureState) -> PureState:
        """Tensor product; ``self`` labels come first."""
        return PureState(self.register + other.register,
                         np.kron(self.amplitudes, other.amplitudes))

    def __repr__(self) -> str:
        labels = ", ".join(str(q) for q in self.register)
        return f"PureState([{labels}], norm_sq={self.norm_sq:.6g})"


@dataclass(frozen=True)
class MeasurementBranch:
    outcome: tuple[tuple[QubitLabel, int], ...]
    probability: float
    post_state: PureState

    def result(self, label: QubitLabel) -> int:
        return dict(self.outcome)[label]


def basis_ket(register: Sequence[QubitLabel], indices: Sequence[int]) -> PureState:
    register = _check_register(register)
    if len(indices) != len(register):
        raise RegisterError("one basis index per label is required")
    for q, i in zip(register, indices):
        if i not in (0, 1):
            raise RegisterError(f"basis index {i!r} out of range for {q}")
    amps = np.zeros(2 ** len(register), dtype=complex)
    pos = 0
    for i in indices:
        pos = 2 * pos + i
    amps[pos] = 1.0
    return PureState(register, amps)


def basis_indices(state: PureState, position: int) -> dict[QubitLabel, int]:
    """Inverse of the ordering used by :func:`basis_ket`."""
    bits = np.unravel_index(position, (2,) * state.n_qubits)
    return {q: int(b) for q, b in zip(state.register, bits)}


def superpose(terms: Iterable[tuple[complex, PureState]], normalize: bool = False) -> PureState:
    terms = list(terms)
    if not terms:
        raise RegisterError("superpose needs at least one term")
    register = terms[0][1].register
    total = np.zeros_like(terms[0][1].amplitudes)
    for c, s in terms:
        if s.register != register:
            raise RegisterError("all terms must share one register")
        total = total + c * s.amplitudes
    out = PureState(register, total)
    return out.normalized() if normalize else out


def product_state(*states: PureState) -> PureState:
    out = states[0]
    for s in states[1:]:
        out = out @ s
    return out


def reorder(state: PureState, register: Sequence[QubitLabel]) -> PureState:
    """Same state with its qubits permuted into ``register`` order."""
    register = _check_register(register)
    if set(register) != set(state.register):
        raise RegisterError("reorder needs the same set of labels")
    perm = [state.axis(q) for q in register]
    return PureState(register, np.transpose(state.tensor(), perm).reshape(-1))


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    return u.shape == (2, 2) and np.allclose(u.conj().T @ u, np.eye(2), atol=tol, rtol=0)


def _apply_matrix(state: PureState, label: QubitLabel, u: np.ndarray) -> PureState:
    ax = state.axis(label)
    t = np.tensordot(u, state.tensor(), axes=([1], [ax]))
    t = np.moveaxis(t, 0, ax)
    return PureState(state.register, t.reshape(-1))


def apply_local_unitary(state: PureState, label: QubitLabel, u: np.ndarray) -> PureState:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError(f"matrix is not a 2x2 unitary:\n{u}")
    return _apply_matrix(state, label, u)


DiagonalFactor = Callable[[tuple[int, ...]], complex] | Mapping[tuple[int, ...], complex]


def factor_table(factor: DiagonalFactor, k: int) -> np.ndarray:
    """Tabulate a diagonal factor on ``k`` qubits as a ``(2,)*k`` array."""
    table = np.empty((2,) * k, dtype=complex)
    lookup = factor.__getitem__ if isinstance(factor, Mapping) else factor
    for idx in product((0, 1), repeat=k):
        table[idx] = lookup(idx)
    return table


def apply_diagonal_map(state: PureState, labels: Sequence[QubitLabel],
                       factor: DiagonalFactor) -> tuple[PureState, float]:
    """Multiply each amplitude by ``factor`` of its joint index on ``labels``.

    The map need not be unitary. Returns the new (unnormalized) state and its
    squared norm.
    """
    labels = _check_register(labels)
    axes = [state.axis(q) for q in labels]
    table = factor_table(factor, len(labels))
    # bring the factor's axes into register order, then broadcast
    order = np.argsort(axes)
    table = np.transpose(table, order)
    shape = [1] * state.n_qubits
    for ax in axes:
        shape[ax] = 2
    out = PureState(state.register, (state.tensor() * table.reshape(shape)).reshape(-1))
    return out, out.norm_sq


def measure(state: PureState, labels: Sequence[QubitLabel],
            basis: np.ndarray | Sequence[np.ndarray] | None = None) -> list[MeasurementBranch]:
    """Projective measurement of ``labels``, enumerating every outcome.

    ``basis`` gives, per label, a unitary whose columns are the measurement
    basis vectors (outcome ``k`` is column ``k``). A single matrix is used for
    all labels; ``None`` means the computational basis. Measured labels are
    removed from each branch's post-state.
    """
    if not state.is_normalized():
        raise NormalizationError(f"measure needs a normalized state (norm_sq={state.norm_sq!r})")
    labels = _check_register(labels)
    if basis is None:
        bases = [None] * len(labels)
    elif isinstance(basis, np.ndarray) and basis.ndim == 2:
        bases = [basis] * len(labels)
    else:
        bases = list(basis)
    rotated = state
    for q, u in zip(labels, bases):
        if u is not None:
            u = np.asarray(u, dtype=complex)
            if not is_unitary(u):
                raise ValueError(f"basis for {q} is not unitary")
            rotated = _apply_matrix(rotated, q, u.conj().T)
    axes = [rotated.axis(q) for q in labels]
    rest = tuple(q for q in rotated.register if q not in labels)
    t = np.moveaxis(rotated.tensor(), axes, range(len(axes)))
    branches = []
    for idx in product((0, 1), repeat=len(labels)):
        sub = t[idx].reshape(-1)
        p = float(np.vdot(sub, sub).real)
        post = PureState(rest, sub / np.sqrt(p) if p > 0 else sub)
        branches.append(MeasurementBranch(tuple(zip(labels, idx)), p, post))
    return branches


def inner(a: PureState, b: PureState) -> complex:
    if a.register != b.register:
        raise RegisterError("inner product needs identical registers")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: PureState, b: PureState) -> float:
    """Squared overlap of two normalized states."""
    for s in (a, b):
        if not s.is_normalized(1e-9):
            raise NormalizationError("fidelity needs normalized states")
    return min(1.0, abs(inner(a, b)) ** 2)
