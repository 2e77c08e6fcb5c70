"""Concrete finite theory models behind one interface.

Five models are supported: classical probability vectors, finite-dimensional
quantum theory, Doubled Quantum Theory (quantum theory with a total-parity
superselection rule), the square bit and the half-disk toy theory.

Doubled quantum states are stored as a pair of (unnormalised) blocks, one per
sector, so block-diagonality holds by construction. For a composite of two
doubled systems the sector spaces are laid out as::

    sector 0 = (H0 (x) H0) (+) (H1 (x) H1)
    sector 1 = (H0 (x) H1) (+) (H1 (x) H0)

with the first factor's index running slowest inside each summand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np
from scipy.linalg import block_diag

from . import numerics
from .errors import (
    InvalidState,
    ModelMismatch,
    NotComposite,
    NotPure,
    UnsupportedComposition,
    UnsupportedModel,
)
from .numerics import DEFAULT_TOL, Tolerance


class Kind(str, Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"
    DOUBLED_QUANTUM = "doubled_quantum"
    SQUARE_BIT = "square_bit"
    HALF_DISK = "half_disk"


@dataclass(frozen=True)
class TheoryModel:
    """A system type. ``d`` is the Hilbert/sample-space dimension, or the
    per-sector dimension for doubled quantum systems.

    ``factors`` records how a composite was built (needed for marginals); it
    does not take part in equality, so ``Quantum(6)`` equals ``Quantum(2)*Quantum(3)``.
    """

    kind: Kind
    d: int = 2
    factors: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind in (Kind.SQUARE_BIT, Kind.HALF_DISK) and self.d != 2:
            raise ValueError(f"{self.kind.value} has fixed dimension 2")

    @property
    def is_composite(self) -> bool:
        return len(self.factors) == 2

    def __str__(self):
        if self.kind in (Kind.SQUARE_BIT, Kind.HALF_DISK):
            return self.kind.value
        return f"{self.kind.value}({self.d})"


def Classical(d: int) -> TheoryModel:
    return TheoryModel(Kind.CLASSICAL, d)


def Quantum(d: int) -> TheoryModel:
    return TheoryModel(Kind.QUANTUM, d)


def DoubledQuantum(d: int) -> TheoryModel:
    return TheoryModel(Kind.DOUBLED_QUANTUM, d)


def SquareBit() -> TheoryModel:
    return TheoryModel(Kind.SQUARE_BIT, 2)


def HalfDisk() -> TheoryModel:
    return TheoryModel(Kind.HALF_DISK, 2)


def dimension(model: TheoryModel) -> int:
    """Cardinality of the pure maximal sets of ``model``."""
    if model.kind is Kind.DOUBLED_QUANTUM:
        return 2 * model.d
    return model.d


def _check_same(a: TheoryModel, b: TheoryModel):
    if a != b:
        raise ModelMismatch(f"model mismatch: {a} vs {b}")


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True, eq=False)
class State:
    """A normalised state.

    payload per model: classical -> probability vector; quantum -> density
    matrix; doubled quantum -> (block0, block1) whose traces sum to one;
    square bit / half-disk -> real vector (x, y, 1).
    """

    model: TheoryModel
    payload: Any
    tol: Tolerance = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "payload", _coerce_payload(self.model, self.payload))
        _validate_state(self.model, self.payload, self.tol)


@dataclass(frozen=True, eq=False)
class Effect:
    """Dual of a state: row vector, operator, block pair or affine functional."""

    model: TheoryModel
    payload: Any

    def __post_init__(self):
        object.__setattr__(self, "payload", _coerce_payload(self.model, self.payload))


@dataclass(frozen=True, eq=False)
class Reversible:
    """A reversible transformation.

    payload per model: classical -> permutation array (basis i goes to
    ``perm[i]``); quantum -> unitary; doubled quantum -> ``(U0, U1, swap)``,
    acting as ``(U0 (+) U1) E`` with ``E`` the sector exchange when ``swap``;
    square bit -> dihedral index 0..7; half-disk -> 0 (identity) or 1 (reflection).
    """

    model: TheoryModel
    payload: Any

    def __post_init__(self):
        object.__setattr__(self, "payload", _coerce_reversible(self.model, self.payload))


@dataclass(frozen=True, eq=False)
class PureMaximalSet:
    states: list
    dagger_effects: list

    def __len__(self):
        return len(self.states)


@dataclass(frozen=True, eq=False)
class Diagonalisation:
    """``state = sum_i spectrum[i] * states[i]``.

    ``basis`` is a full pure maximal set whose first entries carry the
    spectrum (spectrum is zero-padded to its length). ``non_unique`` marks the
    canonical-but-arbitrary decompositions used for the non-sharp toy models,
    where ``basis`` is None.
    """

    spectrum: np.ndarray
    states: list
    basis: PureMaximalSet | None = None
    non_unique: bool = False


# ---------------------------------------------------------------------------
# payload plumbing


def _coerce_payload(model, payload):
    k = model.kind
    if k is Kind.CLASSICAL:
        p = np.asarray(payload, dtype=float).reshape(-1)
        if p.shape != (model.d,):
            raise InvalidState(f"expected length {model.d}, got {p.shape}")
        return p
    if k is Kind.QUANTUM:
        m = np.asarray(payload, dtype=complex)
        if m.shape != (model.d, model.d):
            raise InvalidState(f"expected {model.d}x{model.d} matrix, got {m.shape}")
        return m
    if k is Kind.DOUBLED_QUANTUM:
        b0, b1 = payload
        b0 = np.asarray(b0, dtype=complex)
        b1 = np.asarray(b1, dtype=complex)
        for b in (b0, b1):
            if b.shape != (model.d, model.d):
                raise InvalidState(f"expected {model.d}x{model.d} blocks, got {b.shape}")
        return (b0, b1)
    v = np.asarray(payload, dtype=float).reshape(-1)
    if v.shape == (2,):
        v = np.array([v[0], v[1], 1.0])
    if v.shape != (3,):
        raise InvalidState("planar models take (x, y, 1) vectors")
    return v


def _validate_state(model, payload, tol):
    k = model.kind
    if k is Kind.CLASSICAL:
        if np.any(payload < -tol.psd_tol) or abs(payload.sum() - 1) > tol.eq_tol:
            raise InvalidState("not a probability vector")
        return
    if k is Kind.QUANTUM:
        _check_psd(payload, tol)
        if abs(np.trace(payload).real - 1) > tol.eq_tol:
            raise InvalidState("density matrix must have unit trace")
        return
    if k is Kind.DOUBLED_QUANTUM:
        for b in payload:
            _check_psd(b, tol)
        total = np.trace(payload[0]).real + np.trace(payload[1]).real
        if abs(total - 1) > tol.eq_tol:
            raise InvalidState("block traces must sum to one")
        return
    x, y, w = payload
    if abs(w - 1) > tol.eq_tol:
        raise InvalidState("third component is the normalisation and must be 1")
    if k is Kind.SQUARE_BIT:
        if abs(x) > 1 + tol.eq_tol or abs(y) > 1 + tol.eq_tol:
            raise InvalidState("square-bit state outside the square")
    else:
        if x * x + y * y > 1 + tol.eq_tol or y < -tol.eq_tol:
            raise InvalidState("half-disk state outside the half-disk")


def _check_psd(m, tol):
    if m.size == 0:
        return
    if np.max(np.abs(m - m.conj().T)) > tol.eq_tol:
        raise InvalidState("operator is not Hermitian")
    if np.linalg.eigvalsh((m + m.conj().T) / 2).min() < -tol.psd_tol:
        raise InvalidState("operator is not positive semidefinite")


_ROT = np.array([[0, -1], [1, 0]], dtype=int)
_FLIP = np.array([[1, 0], [0, -1]], dtype=int)


def _dihedral_elements():
    rots = [np.linalg.matrix_power(_ROT, k) for k in range(4)]
    return tuple(r.copy() for r in rots) + tuple(r @ _FLIP for r in rots)


DIHEDRAL = _dihedral_elements()
"""The 8 symmetries of the square: rotations R^k (0..3) then R^k F (4..7), F: (x,y)->(x,-y)."""

HALF_DISK_ELEMENTS = (np.eye(2, dtype=int), np.array([[-1, 0], [0, 1]], dtype=int))

SQUARE_VERTICES = tuple(
    np.array(v, dtype=float) for v in [(-1, 1, 1), (-1, -1, 1), (1, -1, 1), (1, 1, 1)]
)
"""alpha_1..alpha_4, counterclockwise from the top-left corner."""


def _coerce_reversible(model, payload):
    k = model.kind
    if k is Kind.CLASSICAL:
        perm = np.asarray(payload, dtype=int).reshape(-1)
        if sorted(perm.tolist()) != list(range(model.d)):
            raise ValueError("not a permutation")
        return perm
    if k is Kind.QUANTUM:
        u = np.asarray(payload, dtype=complex)
        if u.shape != (model.d, model.d) or not numerics.is_unitary(u, 1e-9):
            raise ValueError("not a unitary of the right size")
        return u
    if k is Kind.DOUBLED_QUANTUM:
        if len(payload) == 2:
            u0, u1 = payload
            swap = False
        else:
            u0, u1, swap = payload
        u0 = np.asarray(u0, dtype=complex)
        u1 = np.asarray(u1, dtype=complex)
        for u in (u0, u1):
            if u.shape != (model.d, model.d) or not numerics.is_unitary(u, 1e-9):
                raise ValueError("sector unitaries must be d x d unitaries")
        return (u0, u1, bool(swap))
    idx = int(payload)
    n = 8 if k is Kind.SQUARE_BIT else 2
    if not 0 <= idx < n:
        raise ValueError(f"group element index out of range 0..{n - 1}")
    return idx


# ---------------------------------------------------------------------------
# linear structure


def mix(weights: Sequence[float], states: Sequence[State], tol: Tolerance = DEFAULT_TOL) -> State:
    """Convex combination of states of one model."""
    if not states:
        raise ValueError("need at least one state")
    model = states[0].model
    for s in states:
        _check_same(model, s.model)
    return State(model, _combine([s.payload for s in states], weights, model), tol)


def _combine(payloads, weights, model):
    if model.kind is Kind.DOUBLED_QUANTUM:
        b0 = sum(w * p[0] for w, p in zip(weights, payloads))
        b1 = sum(w * p[1] for w, p in zip(weights, payloads))
        return (b0, b1)
    return sum(w * p for w, p in zip(weights, payloads))


def state_vector(s: State) -> np.ndarray:
    """Flatten a state into a real vector (used for spans, ranks and distances)."""
    p = s.payload
    if s.model.kind is Kind.DOUBLED_QUANTUM:
        parts = [p[0], p[1]]
    else:
        parts = [np.asarray(p)]
    out = []
    for a in parts:
        a = np.asarray(a)
        out.append(a.real.reshape(-1))
        if np.iscomplexobj(a):
            out.append(a.imag.reshape(-1))
    return np.concatenate(out)


def state_distance(s: State, t: State) -> float:
    """Max-norm distance between payloads."""
    _check_same(s.model, t.model)
    if s.model.kind is Kind.DOUBLED_QUANTUM:
        return max(numerics.max_abs(s.payload[0] - t.payload[0]),
                   numerics.max_abs(s.payload[1] - t.payload[1]))
    return numerics.max_abs(s.payload - t.payload)


def as_matrix(s: State) -> np.ndarray:
    """Density matrix of a quantum state, or the direct sum for doubled quantum states."""
    if s.model.kind is Kind.QUANTUM:
        return s.payload
    if s.model.kind is Kind.DOUBLED_QUANTUM:
        return block_diag(*s.payload)
    raise UnsupportedModel(f"{s.model} has no density-matrix form")


# ---------------------------------------------------------------------------
# pairing and effects


def pair(a: Effect, s: State, tol: Tolerance = DEFAULT_TOL) -> float:
    """Probability of effect ``a`` on state ``s``, clamped to [0, 1]."""
    _check_same(a.model, s.model)
    k = s.model.kind
    if k is Kind.QUANTUM:
        v = np.trace(a.payload @ s.payload).real
    elif k is Kind.DOUBLED_QUANTUM:
        v = np.trace(a.payload[0] @ s.payload[0]).real + np.trace(a.payload[1] @ s.payload[1]).real
    else:
        v = float(np.dot(a.payload, s.payload))
    if v < -tol.eq_tol or v > 1 + tol.eq_tol:
        raise InvalidState(f"pairing {v} outside [0, 1]: invalid effect for this state")
    return float(min(max(v, 0.0), 1.0))


def deterministic_effect(model: TheoryModel) -> Effect:
    k = model.kind
    if k is Kind.CLASSICAL:
        return Effect(model, np.ones(model.d))
    if k is Kind.QUANTUM:
        return Effect(model, np.eye(model.d))
    if k is Kind.DOUBLED_QUANTUM:
        return Effect(model, (np.eye(model.d), np.eye(model.d)))
    return Effect(model, np.array([0.0, 0.0, 1.0]))


# ---------------------------------------------------------------------------
# composition


def compose_systems(a: TheoryModel, b: TheoryModel) -> TheoryModel:
    if a.kind != b.kind or a.kind in (Kind.SQUARE_BIT, Kind.HALF_DISK):
        raise UnsupportedComposition(f"cannot compose {a} with {b}")
    if a.kind is Kind.DOUBLED_QUANTUM:
        return TheoryModel(a.kind, 2 * a.d * b.d, (a, b))
    return TheoryModel(a.kind, a.d * b.d, (a, b))


def tensor_states(s: State, t: State, tol: Tolerance = DEFAULT_TOL) -> State:
    model = compose_systems(s.model, t.model)
    if model.kind is Kind.DOUBLED_QUANTUM:
        a0, a1 = s.payload
        b0, b1 = t.payload
        block0 = block_diag(np.kron(a0, b0), np.kron(a1, b1))
        block1 = block_diag(np.kron(a0, b1), np.kron(a1, b0))
        return State(model, (block0, block1), tol)
    return State(model, np.kron(s.payload, t.payload), tol)


def tensor_effects(a: Effect, b: Effect) -> Effect:
    model = compose_systems(a.model, b.model)
    if model.kind is Kind.DOUBLED_QUANTUM:
        a0, a1 = a.payload
        b0, b1 = b.payload
        return Effect(model, (block_diag(np.kron(a0, b0), np.kron(a1, b1)),
                              block_diag(np.kron(a0, b1), np.kron(a1, b0))))
    return Effect(model, np.kron(a.payload, b.payload))


def marginal(s: State, keep: int, tol: Tolerance = DEFAULT_TOL) -> State:
    """Reduced state of factor ``keep`` (0 = A, 1 = B) of a composite state."""
    model = s.model
    if not model.is_composite:
        raise NotComposite(f"{model} is not a composite system")
    if keep not in (0, 1):
        raise ValueError("keep must be 0 or 1")
    fa, fb = model.factors
    target = model.factors[keep]
    if model.kind is Kind.CLASSICAL:
        p = s.payload.reshape(fa.d, fb.d)
        return State(target, p.sum(axis=1 - keep), tol)
    if model.kind is Kind.QUANTUM:
        return State(target, numerics.partial_trace(s.payload, (fa.d, fb.d), keep), tol)
    n = fa.d * fb.d
    dims = (fa.d, fb.d)
    blk0, blk1 = s.payload

    def part(block, i):
        sl = slice(i * n, (i + 1) * n)
        return numerics.partial_trace(block[sl, sl], dims, keep)

    # summands: sector0 = (0,0),(1,1); sector1 = (0,1),(1,0) as (A, B) sectors
    if keep == 0:
        out0 = part(blk0, 0) + part(blk1, 0)
        out1 = part(blk0, 1) + part(blk1, 1)
    else:
        out0 = part(blk0, 0) + part(blk1, 1)
        out1 = part(blk0, 1) + part(blk1, 0)
    return State(target, (out0, out1), tol)



def dqt_pure_state(model: TheoryModel, sector: int, vector, tol: Tolerance = DEFAULT_TOL) -> State:
    """Pure doubled-quantum state from a vector inside one sector."""
    if model.kind is not Kind.DOUBLED_QUANTUM:
        raise ModelMismatch("dqt_pure_state needs a doubled quantum model")
    v = np.asarray(vector, dtype=complex).reshape(-1)
    v = v / np.linalg.norm(v)
    proj = numerics.ket_to_projector(v)
    zero = np.zeros_like(proj)
    return State(model, (proj, zero) if sector == 0 else (zero, proj), tol)


def dqt_basis_vector(d: int, index: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[index] = 1
    return e


# ---------------------------------------------------------------------------
# reversible transformations


def apply_reversible(u: Reversible, s: State, tol: Tolerance = DEFAULT_TOL) -> State:
    _check_same(u.model, s.model)
    k = s.model.kind
    p = s.payload
    if k is Kind.CLASSICAL:
        out = np.empty_like(p)
        out[u.payload] = p
    elif k is Kind.QUANTUM:
        out = u.payload @ p @ u.payload.conj().T
    elif k is Kind.DOUBLED_QUANTUM:
        u0, u1, swap = u.payload
        b0, b1 = (p[1], p[0]) if swap else p
        out = (u0 @ b0 @ u0.conj().T, u1 @ b1 @ u1.conj().T)
    else:
        g = DIHEDRAL[u.payload] if k is Kind.SQUARE_BIT else HALF_DISK_ELEMENTS[u.payload]
        xy = g @ p[:2]
        out = np.array([xy[0], xy[1], p[2]])
    return State(s.model, out, tol)


def inverse(u: Reversible) -> Reversible:
    k = u.model.kind
    if k is Kind.CLASSICAL:
        return Reversible(u.model, np.argsort(u.payload))
    if k is Kind.QUANTUM:
        return Reversible(u.model, u.payload.conj().T)
    if k is Kind.DOUBLED_QUANTUM:
        u0, u1, swap = u.payload
        if swap:
            return Reversible(u.model, (u1.conj().T, u0.conj().T, True))
        return Reversible(u.model, (u0.conj().T, u1.conj().T, False))
    if k is Kind.SQUARE_BIT:
        g_inv = DIHEDRAL[u.payload].T  # orthogonal integer matrix
        return Reversible(u.model, next(i for i, g in enumerate(DIHEDRAL) if np.array_equal(g, g_inv)))
    return Reversible(u.model, u.payload)


def identity_reversible(model: TheoryModel) -> Reversible:
    k = model.kind
    if k is Kind.CLASSICAL:
        return Reversible(model, np.arange(model.d))
    if k is Kind.QUANTUM:
        return Reversible(model, np.eye(model.d))
    if k is Kind.DOUBLED_QUANTUM:
        return Reversible(model, (np.eye(model.d), np.eye(model.d), False))
    return Reversible(model, 0)


def finite_group(model: TheoryModel) -> list[Reversible] | None:
    """All reversibles for the finite-group models; None for continuous groups."""
    if model.kind is Kind.SQUARE_BIT:
        return [Reversible(model, i) for i in range(8)]
    if model.kind is Kind.HALF_DISK:
        return [Reversible(model, i) for i in range(2)]
    return None


def random_reversible(model: TheoryModel, rng: np.random.Generator) -> Reversible:
    k = model.kind
    if k is Kind.CLASSICAL:
        return Reversible(model, rng.permutation(model.d))
    if k is Kind.QUANTUM:
        return Reversible(model, numerics.haar_random_unitary(model.d, rng=rng))
    if k is Kind.DOUBLED_QUANTUM:
        u0 = numerics.haar_random_unitary(model.d, rng=rng)
        u1 = numerics.haar_random_unitary(model.d, rng=rng)
        return Reversible(model, (u0, u1, bool(rng.integers(2))))
    n = 8 if k is Kind.SQUARE_BIT else 2
    return Reversible(model, int(rng.integers(n)))


def random_state(model: TheoryModel, rng: np.random.Generator, rank: int | None = None) -> State:
    """A random valid state; ``rank`` limits the number of mixed pure components
    (per sector for doubled quantum systems). ``rank=1`` always gives a pure state."""
    k = model.kind
    if k is Kind.CLASSICAL:
        p = rng.dirichlet(np.ones(model.d))
        if rank is not None:
            p[rng.permutation(model.d)[rank:]] = 0
            p /= p.sum()
        return State(model, p)
    if k is Kind.QUANTUM:
        return State(model, _random_density(model.d, rng, rank))
    if k is Kind.DOUBLED_QUANTUM:
        if rank == 1:
            return dqt_pure_state(model, int(rng.integers(2)),
                                  rng.standard_normal(model.d) + 1j * rng.standard_normal(model.d))
        m = rng.uniform()
        b0 = _random_density(model.d, rng, rank) * m
        b1 = _random_density(model.d, rng, rank) * (1 - m)
        return State(model, (b0, b1))
    if k is Kind.SQUARE_BIT:
        if rank == 1:
            return State(model, SQUARE_VERTICES[int(rng.integers(4))])
        return State(model, rng.uniform(-1, 1, size=2))
    r = 1.0 if rank == 1 else np.sqrt(rng.uniform())
    th = rng.uniform(0, np.pi)
    return State(model, [r * np.cos(th), r * np.sin(th)])


def _random_density(d, rng, rank=None):
    r = d if rank is None else rank
    g = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# pure states, duality, diagonalisation


def pure_maximal_set(model: TheoryModel, choice_seed=None) -> PureMaximalSet:
    """A maximal set of perfectly distinguishable pure states with its daggers.

    Quantum and doubled-quantum bases are Haar-random when ``choice_seed`` is
    given, and standard otherwise.
    """
    k = model.kind
    if k is Kind.CLASSICAL:
        eye = np.eye(model.d)
        return PureMaximalSet([State(model, e) for e in eye], [Effect(model, e) for e in eye])
    if k is Kind.QUANTUM:
        u = np.eye(model.d, dtype=complex) if choice_seed is None else \
            numerics.haar_random_unitary(model.d, choice_seed)
        return quantum_basis_set(model, u)
    if k is Kind.DOUBLED_QUANTUM:
        if choice_seed is None:
            u0 = u1 = np.eye(model.d, dtype=complex)
        else:
            rng = np.random.default_rng(choice_seed)
            u0 = numerics.haar_random_unitary(model.d, rng=rng)
            u1 = numerics.haar_random_unitary(model.d, rng=rng)
        return dqt_basis_set(model, u0, u1)
    if k is Kind.SQUARE_BIT:
        pts = [SQUARE_VERTICES[0], SQUARE_VERTICES[1]]
        states = [State(model, p) for p in pts]
        return PureMaximalSet(states, [dagger(s) for s in states])
    raise UnsupportedModel("the half-disk has no finite maximal structure in this library")


def quantum_basis_set(model: TheoryModel, columns) -> PureMaximalSet:
    cols = np.asarray(columns, dtype=complex)
    states = [State(model, numerics.ket_to_projector(cols[:, i])) for i in range(model.d)]
    return PureMaximalSet(states, [Effect(model, s.payload) for s in states])


def dqt_basis_set(model: TheoryModel, cols0, cols1) -> PureMaximalSet:
    """Sector-0 basis states first, then sector-1."""
    states = [dqt_pure_state(model, 0, cols0[:, i]) for i in range(model.d)]
    states += [dqt_pure_state(model, 1, cols1[:, i]) for i in range(model.d)]
    return PureMaximalSet(states, [Effect(model, s.payload) for s in states])


def is_pure(s: State, tol: Tolerance = DEFAULT_TOL) -> bool:
    k = s.model.kind
    if k is Kind.CLASSICAL:
        return bool(np.isclose(s.payload.max(), 1, atol=tol.eq_tol))
    if k is Kind.QUANTUM:
        return _rank(s.payload, tol) == 1
    if k is Kind.DOUBLED_QUANTUM:
        return _rank(s.payload[0], tol) + _rank(s.payload[1], tol) == 1
    if k is Kind.SQUARE_BIT:
        return any(np.allclose(s.payload, v, atol=tol.eq_tol) for v in SQUARE_VERTICES)
    x, y, _ = s.payload
    return bool(abs(x * x + y * y - 1) <= tol.eq_tol)


def _rank(m, tol):
    if not m.size:
        return 0
    return int(np.sum(np.linalg.eigvalsh((m + m.conj().T) / 2) > tol.psd_tol))


def dagger(alpha: State, tol: Tolerance = DEFAULT_TOL) -> Effect:
    """The unique pure effect occurring with probability 1 on the pure state ``alpha``."""
    if not is_pure(alpha, tol):
        raise NotPure("dagger is only defined on pure states")
    k = alpha.model.kind
    p = alpha.payload
    if k is Kind.CLASSICAL:
        e = np.zeros(alpha.model.d)
        e[int(np.argmax(p))] = 1
        return Effect(alpha.model, e)
    if k is Kind.QUANTUM:
        return Effect(alpha.model, _nearest_projector(p))
    if k is Kind.DOUBLED_QUANTUM:
        t0 = np.trace(p[0]).real
        if t0 > 0.5:
            return Effect(alpha.model, (_nearest_projector(p[0]), np.zeros_like(p[1])))
        return Effect(alpha.model, (np.zeros_like(p[0]), _nearest_projector(p[1])))
    x, y, _ = p
    if k is Kind.SQUARE_BIT:
        # facet functional through alpha and its horizontal neighbour
        return Effect(alpha.model, 0.5 * np.array([0.0, np.sign(y), 1.0]))
    return Effect(alpha.model, 0.5 * np.array([x, y, 1.0]))


def _nearest_projector(m):
    vals, vecs = numerics.hermitian_eigendecomposition(m)
    return numerics.ket_to_projector(vecs[:, 0])


def diagonalise(s: State, tol: Tolerance = DEFAULT_TOL) -> Diagonalisation:
    """Decompose ``s`` as a mixture of perfectly distinguishable pure states.

    The spectrum is descending, ties keeping basis order (sector 0 before
    sector 1 for doubled quantum states). For the square bit and half-disk a
    canonical decomposition is returned with ``non_unique=True``.
    """
    model = s.model
    k = model.kind
    if k is Kind.CLASSICAL:
        order = numerics.stable_descending_order(s.payload)
        eye = np.eye(model.d)
        states = [State(model, eye[i]) for i in order]
        basis = PureMaximalSet(states, [Effect(model, eye[i]) for i in order])
        return Diagonalisation(s.payload[order].copy(), states, basis)
    if k is Kind.QUANTUM:
        vals, vecs = numerics.hermitian_eigendecomposition(s.payload, tol)
        basis = quantum_basis_set(model, vecs)
        return Diagonalisation(numerics.clamp_spectrum(vals, tol), basis.states, basis)
    if k is Kind.DOUBLED_QUANTUM:
        v0, c0 = numerics.hermitian_eigendecomposition(s.payload[0], tol)
        v1, c1 = numerics.hermitian_eigendecomposition(s.payload[1], tol)
        full = dqt_basis_set(model, c0, c1)
        vals = np.concatenate([v0, v1])
        order = numerics.stable_descending_order(vals)
        basis = PureMaximalSet([full.states[i] for i in order], [full.dagger_effects[i] for i in order])
        return Diagonalisation(numerics.clamp_spectrum(vals[order], tol), basis.states, basis)
    x, y, _ = s.payload
    if k is Kind.SQUARE_BIT:
        weights = np.array([(1 - x) * (1 + y), (1 - x) * (1 - y), (1 + x) * (1 - y), (1 + x) * (1 + y)]) / 4
        order = numerics.stable_descending_order(weights)
        states = [State(model, SQUARE_VERTICES[i]) for i in order]
        return Diagonalisation(np.clip(weights[order], 0, None), states, None, non_unique=True)
    # half-disk: split along the horizontal chord through the state
    a = np.sqrt(max(1 - y * y, 0.0))
    if a <= tol.eq_tol:
        return Diagonalisation(np.array([1.0]), [State(model, [0.0, 1.0])], None, non_unique=True)
    w = np.array([(a + x) / (2 * a), (a - x) / (2 * a)])
    pts = [State(model, [a, y]), State(model, [-a, y])]
    order = numerics.stable_descending_order(w)
    return Diagonalisation(np.clip(w[order], 0, None), [pts[i] for i in order], None, non_unique=True)
