"""Channel representations and the constructive channel machinery.

Covers the unital <-> doubly stochastic correspondence, random-reversible
(RaRe) channels assembled from Birkhoff terms, the control-unitary realisation
of rational RaRe channels as basic noisy operations, and the Landau-Streater
channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from . import models as m
from . import numerics
from .errors import (
    DimensionMismatch,
    IrrationalWeights,
    ModelMismatch,
    NotUnital,
    UnsupportedModel,
)
from .majorisation import birkhoff_decompose
from .microcanonical import microcanonical_state
from .models import Effect, Kind, PureMaximalSet, Reversible, State, TheoryModel
from .numerics import DEFAULT_TOL, Tolerance, is_doubly_stochastic


@dataclass(frozen=True, eq=False)
class MixtureOfReversibles:
    terms: list  # [(weight, Reversible)]


@dataclass(frozen=True, eq=False)
class MeasureAndPrepare:
    """``s -> sum_j pair(effects[j], s) * states[j]``."""

    effects: list
    states: list


@dataclass(frozen=True, eq=False)
class OperatorSum:
    """Kraus operators; for doubled quantum systems they act on the full direct sum."""

    kraus: list


@dataclass(frozen=True, eq=False)
class DoublyStochasticInduced:
    matrix: np.ndarray
    basis_in: PureMaximalSet
    basis_out: PureMaximalSet


@dataclass(frozen=True, eq=False)
class BasicNoisy:
    realization: "NoisyRealization"


@dataclass(frozen=True, eq=False)
class Channel:
    model_in: TheoryModel
    model_out: TheoryModel
    representation: object

    @property
    def kind(self) -> str:
        return type(self.representation).__name__


def identity_channel(model: TheoryModel) -> Channel:
    return Channel(model, model, MixtureOfReversibles([(1.0, m.identity_reversible(model))]))


def mixture_channel(terms) -> Channel:
    terms = [(float(w), u) for w, u in terms]
    model = terms[0][1].model
    weights = np.array([w for w, _ in terms])
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-9:
        raise ValueError("mixture weights must form a probability vector")
    return Channel(model, model, MixtureOfReversibles(terms))


def apply_channel(c: Channel, s: State, tol: Tolerance = DEFAULT_TOL) -> State:
    if s.model != c.model_in:
        raise ModelMismatch(f"channel expects {c.model_in}, got {s.model}")
    rep = c.representation
    if isinstance(rep, MixtureOfReversibles):
        outs = [m.apply_reversible(u, s, tol) for _, u in rep.terms]
        return m.mix([w for w, _ in rep.terms], outs, tol)
    if isinstance(rep, MeasureAndPrepare):
        probs = [m.pair(e, s, tol) for e in rep.effects]
        return m.mix(probs, rep.states, tol)
    if isinstance(rep, DoublyStochasticInduced):
        return apply_channel(_as_measure_prepare(c), s, tol)
    if isinstance(rep, OperatorSum):
        return _apply_kraus(c.model_out, rep.kraus, s, tol)
    if isinstance(rep, BasicNoisy):
        return apply_noisy(rep.realization, s, tol)
    raise TypeError(f"unknown channel representation {type(rep)}")


def _apply_kraus(model_out, kraus, s, tol):
    rho = m.as_matrix(s)
    out = sum(k @ rho @ k.conj().T for k in kraus)
    if model_out.kind is Kind.QUANTUM:
        return State(model_out, out, tol)
    d = model_out.d
    if numerics.max_abs(out[:d, d:]) > tol.eq_tol:
        raise ModelMismatch("Kraus channel breaks the sector superselection rule")
    return State(model_out, (out[:d, :d], out[d:, d:]), tol)


def _as_measure_prepare(c: Channel) -> Channel:
    rep = c.representation
    d = rep.matrix
    prepared = [m.mix(d[:, j], rep.basis_out.states) for j in range(d.shape[1])]
    return Channel(c.model_in, c.model_out, MeasureAndPrepare(list(rep.basis_in.dagger_effects), prepared))


# ---------------------------------------------------------------------------
# unitality and the doubly stochastic correspondence


def is_unital(c: Channel, tol: float = DEFAULT_TOL.eq_tol) -> bool:
    """Whether ``c`` sends the input microcanonical state to the output one."""
    chi_in = microcanonical_state(c.model_in)
    chi_out = microcanonical_state(c.model_out)
    return m.state_distance(apply_channel(c, chi_in), chi_out) <= tol


def _check_basis(model, basis, name):
    if len(basis) != m.dimension(model):
        raise DimensionMismatch(f"{name} has {len(basis)} elements, expected {m.dimension(model)}")
    for st in basis.states:
        if st.model != model:
            raise ModelMismatch(f"{name} lives in {st.model}, expected {model}")


def unital_from_doubly_stochastic(model: TheoryModel, d_matrix, basis_in: PureMaximalSet,
                                  basis_out: PureMaximalSet, tol: Tolerance = DEFAULT_TOL) -> Channel:
    """Measure in ``basis_in``; on outcome j prepare ``sum_i D[i, j] basis_out[i]``."""
    d_matrix = np.asarray(d_matrix, dtype=float)
    n = m.dimension(model)
    if d_matrix.shape != (n, n):
        raise DimensionMismatch(f"expected a {n}x{n} matrix, got {d_matrix.shape}")
    if not is_doubly_stochastic(d_matrix, tol):
        raise ValueError("matrix is not doubly stochastic")
    _check_basis(model, basis_in, "basis_in")
    _check_basis(model, basis_out, "basis_out")
    return Channel(model, model, DoublyStochasticInduced(d_matrix, basis_in, basis_out))


def doubly_stochastic_from_channel(c: Channel, basis_in: PureMaximalSet, basis_out: PureMaximalSet,
                                   tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``D[i, j] = pair(dagger(basis_out[i]), c(basis_in[j]))``.

    Raises NotUnital (carrying the matrix) when the result is not doubly stochastic.
    """
    outs = [apply_channel(c, a, tol) for a in basis_in.states]
    d = np.array([[m.pair(e, o, tol) for o in outs] for e in basis_out.dagger_effects])
    if not is_doubly_stochastic(d, tol):
        raise NotUnital("channel matrix is not doubly stochastic", matrix=d)
    return d


# ---------------------------------------------------------------------------
# RaRe channels from Birkhoff terms


def _ket(s: State):
    """(sector, vector) of a pure quantum / doubled-quantum state."""
    if s.model.kind is Kind.QUANTUM:
        return 0, _top_vector(s.payload)
    b0, b1 = s.payload
    if np.trace(b0).real >= np.trace(b1).real:
        return 0, _top_vector(b0)
    return 1, _top_vector(b1)


def _top_vector(mat):
    _, vecs = numerics.hermitian_eigendecomposition(mat)
    return vecs[:, 0]


def reversible_mapping(model: TheoryModel, sources: list, targets: list,
                       tol: Tolerance = DEFAULT_TOL) -> Reversible:
    """A reversible sending pure ``sources[j]`` to ``targets[j]`` (both full maximal sets)."""
    k = model.kind
    if k is Kind.CLASSICAL:
        a = [int(np.argmax(s.payload)) for s in sources]
        b = [int(np.argmax(t.payload)) for t in targets]
        perm = np.empty(model.d, dtype=int)
        perm[a] = b
        return Reversible(model, perm)
    if k is Kind.QUANTUM:
        u = sum(np.outer(_ket(t)[1], _ket(s)[1].conj()) for s, t in zip(sources, targets))
        return Reversible(model, u)
    if k is Kind.DOUBLED_QUANTUM:
        pairs = [(_ket(s), _ket(t)) for s, t in zip(sources, targets)]
        maps = {(si, ti) for (si, _), (ti, _) in pairs}
        if maps <= {(0, 0), (1, 1)}:
            swap = False
        elif maps <= {(0, 1), (1, 0)}:
            swap = True
        else:
            raise UnsupportedModel(
                "no doubled-quantum reversible realises this map: it straddles the sectors "
                f"inconsistently (sector moves {sorted(maps)})")
        us = [np.zeros((model.d, model.d), dtype=complex) for _ in range(2)]
        for (si, vs), (ti, vt) in pairs:
            us[ti] += np.outer(vt, vs.conj())
        return Reversible(model, (us[0], us[1], swap))
    raise UnsupportedModel(f"{model}: basis-to-basis reversibles are not available")


def rare_from_birkhoff(model: TheoryModel, basis_in: PureMaximalSet, basis_out: PureMaximalSet,
                       d_matrix, tol: Tolerance = DEFAULT_TOL) -> Channel:
    """``sum_k c_k U_k`` where ``U_k`` sends ``basis_in[j]`` to ``basis_out[perm_k[j]]``."""
    if model.kind not in (Kind.CLASSICAL, Kind.QUANTUM, Kind.DOUBLED_QUANTUM):
        raise UnsupportedModel(f"{model} lacks strong symmetry; no Birkhoff RaRe construction")
    _check_basis(model, basis_in, "basis_in")
    _check_basis(model, basis_out, "basis_out")
    decomposition = birkhoff_decompose(d_matrix, tol)
    terms = []
    for w, perm in decomposition:
        targets = [basis_out.states[perm[j]] for j in range(len(perm))]
        terms.append((float(w), reversible_mapping(model, basis_in.states, targets, tol)))
    return Channel(model, model, MixtureOfReversibles(terms))


# ---------------------------------------------------------------------------
# noisy operations


@dataclass(frozen=True, eq=False)
class NoisyRealization:
    """``s -> discard_anc[ U (s (x) ancilla_state) U^dagger ]``.

    It is a basic noisy operation only when the ancilla is prepared in its
    microcanonical state (see :attr:`is_basic`).
    """

    system_model: TheoryModel
    ancilla_model: TheoryModel
    ancilla_state: State
    global_reversible: Reversible
    discarded_effect: Effect
    approximation_error: float = 0.0
    weights: tuple = field(default=())

    @property
    def is_basic(self) -> bool:
        chi = microcanonical_state(self.ancilla_model)
        return m.state_distance(self.ancilla_state, chi) <= DEFAULT_TOL.eq_tol


def rationalize_weights(weights, max_denominator: int = 10_000):
    """Continued-fraction approximations with a common denominator.

    Returns ``(fractions, error)`` with ``error`` the largest absolute deviation.
    """
    fracs = [Fraction(float(w)).limit_denominator(max_denominator) for w in weights]
    total = sum(fracs)
    if total != 1:
        # push the rounding slack onto the largest weight
        i = max(range(len(fracs)), key=lambda t: fracs[t])
        fracs[i] += 1 - total
        if fracs[i] < 0:
            raise IrrationalWeights("weights cannot be rationalised to a probability vector")
    err = max(abs(float(f) - float(w)) for f, w in zip(fracs, weights))
    return fracs, err


def noisy_realization(r: Channel, max_denominator: int = 10_000, require_exact: bool = False,
                      tol: Tolerance = DEFAULT_TOL) -> NoisyRealization:
    """Realise a rational RaRe quantum channel with a control unitary.

    With weights ``n_k / n`` the ancilla is ``Quantum(n)`` in state ``I/n`` and
    the global unitary is ``sum_m V_m (x) |m><m|`` where the list ``V`` holds
    ``n_k`` copies of ``U_k``. Weights that are not exactly representable with
    denominator ``<= max_denominator`` are approximated (error recorded)
    unless ``require_exact`` is set.
    """
    rep = r.representation
    if not isinstance(rep, MixtureOfReversibles):
        raise TypeError("noisy_realization needs a MixtureOfReversibles channel")
    if r.model_in.kind is not Kind.QUANTUM:
        raise UnsupportedModel("control-unitary realisation is implemented for quantum systems only")
    weights = [w for w, _ in rep.terms]
    fracs, err = rationalize_weights(weights, max_denominator)
    if require_exact and err > tol.eq_tol:
        raise IrrationalWeights(f"weights are not rational with denominator <= {max_denominator}")
    n = lcm(*(f.denominator for f in fracs))
    v_list = []
    for f, (_, u) in zip(fracs, rep.terms):
        v_list += [u.payload] * int(f * n)
    system = r.model_in
    ancilla = m.Quantum(n)
    d = system.d
    control = np.zeros((d * n, d * n), dtype=complex)
    for k, v in enumerate(v_list):
        proj = np.zeros((n, n))
        proj[k, k] = 1
        control += np.kron(v, proj)
    joint = m.compose_systems(system, ancilla)
    return NoisyRealization(
        system_model=system,
        ancilla_model=ancilla,
        ancilla_state=microcanonical_state(ancilla),
        global_reversible=Reversible(joint, control),
        discarded_effect=m.deterministic_effect(ancilla),
        approximation_error=err,
        weights=tuple(fracs),
    )


def apply_noisy(nr: NoisyRealization, s: State, tol: Tolerance = DEFAULT_TOL) -> State:
    joint = m.tensor_states(s, nr.ancilla_state, tol)
    evolved = m.apply_reversible(nr.global_reversible, joint, tol)
    return m.marginal(evolved, 0, tol)


def noisy_channel(nr: NoisyRealization) -> Channel:
    return Channel(nr.system_model, nr.system_model, BasicNoisy(nr))


def noisy_is_unital_check(nr: NoisyRealization, tol: Tolerance = DEFAULT_TOL) -> bool:
    chi = microcanonical_state(nr.system_model)
    return m.state_distance(apply_noisy(nr, chi, tol), chi) <= tol.eq_tol


def identity_realization(model: TheoryModel) -> NoisyRealization:
    return noisy_realization(identity_channel(model))


# ---------------------------------------------------------------------------
# Landau-Streater


def spin_operators(j: float):
    """(Jx, Jy, Jz) in the |j, m> basis with m descending."""
    two_j = round(2 * j)
    if two_j < 1 or abs(2 * j - two_j) > 1e-12:
        raise ValueError("j must be a positive half-integer")
    dim = two_j + 1
    ms = j - np.arange(dim)
    jp = np.zeros((dim, dim))
    for i in range(1, dim):
        mm = ms[i]
        jp[i - 1, i] = np.sqrt(j * (j + 1) - mm * (mm + 1))
    jm = jp.T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    jz = np.diag(ms).astype(complex)
    return jx.astype(complex), jy, jz


def landau_streater(j: float) -> Channel:
    """``rho -> (Jx rho Jx + Jy rho Jy + Jz rho Jz) / (j (j + 1))`` on ``Quantum(2j + 1)``."""
    ops = spin_operators(j)
    scale = np.sqrt(j * (j + 1))
    model = m.Quantum(ops[0].shape[0])
    return Channel(model, model, OperatorSum([o / scale for o in ops]))


# ---------------------------------------------------------------------------
# equality on a spanning set


def spanning_states(model: TheoryModel, seed=0, n_random: int = 20) -> list:
    """Basis states of a fixed maximal set, the microcanonical state and seeded random states."""
    states = list(m.pure_maximal_set(model).states)
    states.append(microcanonical_state(model))
    rng = np.random.default_rng(seed)
    states += [m.random_state(model, rng) for _ in range(n_random)]
    return states


def channel_distance(c1: Channel, c2: Channel, states) -> float:
    return max(m.state_distance(apply_channel(c1, s), apply_channel(c2, s)) for s in states)


def trace_preservation_error(c: Channel, states) -> float:
    u = m.deterministic_effect(c.model_out)
    return max(abs(_raw_pair(u, apply_channel(c, s)) - 1) for s in states)


def _raw_pair(effect, s):
    if s.model.kind is Kind.DOUBLED_QUANTUM:
        return sum(np.trace(e @ b).real for e, b in zip(effect.payload, s.payload))
    if s.model.kind is Kind.QUANTUM:
        return np.trace(effect.payload @ s.payload).real
    return float(np.dot(effect.payload, s.payload))
