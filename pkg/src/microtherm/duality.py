"""Entanglement-thermodynamics duality for pure bipartite quantum states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import channels as ch
from . import models as m
from . import numerics
from .convertibility import Answer, rare_convertible
from .errors import DimensionMismatch, NotNormalized, PathDisagreement
from .majorisation import majorises, pad, shannon_monotone
from .models import State
from .numerics import DEFAULT_TOL, Tolerance


@dataclass(frozen=True, eq=False)
class PureBipartiteState:
    """``|Psi> = sum_ij amplitudes[i, j] |i>|j>`` on ``C^dA (x) C^dB``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 2:
            raise ValueError("amplitudes must be a dA x dB matrix")
        object.__setattr__(self, "amplitudes", a)

    @property
    def dims(self) -> tuple[int, int]:
        return self.amplitudes.shape

    @property
    def ket(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def normalized(self, tol: Tolerance = DEFAULT_TOL) -> "PureBipartiteState":
        if abs(np.linalg.norm(self.amplitudes) - 1) > tol.eq_tol:
            raise NotNormalized("amplitude matrix must have unit Frobenius norm")
        return self

    def as_state(self) -> State:
        da, db = self.dims
        model = m.compose_systems(m.Quantum(da), m.Quantum(db))
        return State(model, numerics.ket_to_projector(self.ket))


def random_pure_bipartite(da: int, db: int, rng: np.random.Generator, rank: int | None = None):
    g = rng.standard_normal((da, db)) + 1j * rng.standard_normal((da, db))
    if rank is not None:
        u, s, vh = np.linalg.svd(g)
        s[rank:] = 0
        g = (u[:, : len(s)] * s) @ vh[: len(s)]
    return PureBipartiteState(g / np.linalg.norm(g))


def bell_state(d: int = 2) -> PureBipartiteState:
    return PureBipartiteState(np.eye(d) / np.sqrt(d))


def product_state(da: int = 2, db: int = 2) -> PureBipartiteState:
    a = np.zeros((da, db))
    a[0, 0] = 1
    return PureBipartiteState(a)


def schmidt(psi: PureBipartiteState, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Squared Schmidt coefficients, descending (length ``min(dA, dB)``)."""
    psi.normalized(tol)
    s = np.linalg.svd(psi.amplitudes, compute_uv=False)
    lam = s ** 2
    return lam / lam.sum()


def marginal(psi: PureBipartiteState, keep: int) -> State:
    return m.marginal(psi.as_state(), keep)


def entanglement_entropy(psi: PureBipartiteState) -> float:
    return 0.0 - shannon_monotone(schmidt(psi))


@dataclass
class DualityClauses:
    schmidt_majorisation: bool
    marginal_a_rare: bool
    marginal_b_rare: bool

    @property
    def agree(self) -> bool:
        return self.schmidt_majorisation == self.marginal_a_rare == self.marginal_b_rare

    def as_tuple(self):
        return (self.schmidt_majorisation, self.marginal_a_rare, self.marginal_b_rare)


def _marginal_rare(psi, phi, keep, tol):
    """RaRe convertibility of psi's marginal into phi's marginal on factor ``keep``."""
    verdict = rare_convertible(marginal(psi, keep), marginal(phi, keep), tol)
    if verdict.answer is Answer.UNKNOWN:
        raise PathDisagreement("quantum RaRe verdicts are never Unknown")
    return verdict.answer is Answer.YES


def duality_clauses(phi: PureBipartiteState, psi: PureBipartiteState,
                    tol: Tolerance = DEFAULT_TOL) -> DualityClauses:
    """The three equivalent conditions for LOCC conversion of ``phi`` into ``psi``."""
    if phi.dims != psi.dims:
        raise DimensionMismatch(f"states live on {phi.dims} and {psi.dims}")
    sp, sq = pad(schmidt(phi, tol), schmidt(psi, tol))
    return DualityClauses(
        majorises(sq, sp, tol),
        _marginal_rare(psi, phi, 0, tol),
        _marginal_rare(psi, phi, 1, tol),
    )


def locc_convertible(phi: PureBipartiteState, psi: PureBipartiteState,
                     tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether ``phi`` converts to ``psi`` by LOCC: Schmidt majorisation, cross-checked
    against the RaRe convertibility of the marginals."""
    clauses = duality_clauses(phi, psi, tol)
    if not clauses.agree:
        raise PathDisagreement(f"duality clauses disagree: {clauses.as_tuple()}")
    return clauses.schmidt_majorisation


def symmetric_purification(rho: State) -> PureBipartiteState:
    """``sum_i sqrt(p_i) |a_i>|a_i>`` over the eigenbasis of ``rho``; both marginals equal ``rho``."""
    if rho.model.kind is not m.Kind.QUANTUM:
        raise m.UnsupportedModel("symmetric purification is implemented for quantum states")
    vals, vecs = numerics.hermitian_eigendecomposition(rho.payload)
    vals = np.clip(vals, 0.0, None)
    amps = (vecs * np.sqrt(vals)) @ vecs.T
    return PureBipartiteState(amps)


def local_exchangeability_witness(psi: PureBipartiteState, tol: Tolerance = DEFAULT_TOL):
    """Unitary channels C: A -> B and D: B -> A with ``(C (x) D) Psi = SWAP Psi``.

    From ``Psi = sum_i s_i |a_i>|b_i>``: C sends ``a_i -> b_i`` and D sends
    ``b_i -> a_i``. The full SVD supplies complete bases when Psi is not of full
    Schmidt rank.
    """
    da, db = psi.dims
    if da != db:
        raise DimensionMismatch("local exchangeability witness needs dA == dB")
    psi.normalized(tol)
    u, _, vh = np.linalg.svd(psi.amplitudes)
    a_basis = u
    b_basis = vh.T  # columns are b_i, since M = sum_i s_i a_i b_i^T
    c_mat = b_basis @ a_basis.conj().T
    d_mat = a_basis @ b_basis.conj().T
    model = m.Quantum(da)
    c = ch.mixture_channel([(1.0, m.Reversible(model, c_mat))])
    d = ch.mixture_channel([(1.0, m.Reversible(model, d_mat))])
    return c, d


def swap_ket(psi: PureBipartiteState) -> np.ndarray:
    return psi.amplitudes.T.reshape(-1)


def exchange_residual(psi: PureBipartiteState, c: ch.Channel, d: ch.Channel) -> float:
    """``min_phase max|(C (x) D)Psi - e^{i phase} SWAP Psi|`` with both channels single unitaries.

    The phase is fixed by aligning the largest-magnitude amplitude.
    """
    (_, uc), = c.representation.terms
    (_, ud), = d.representation.terms
    out = np.kron(uc.payload, ud.payload) @ psi.ket
    target = swap_ket(psi)
    i = int(np.argmax(np.abs(target)))
    phase = out[i] / target[i] if abs(target[i]) > 0 else 1.0
    phase = phase / abs(phase) if abs(phase) > 0 else 1.0
    return numerics.max_abs(out - phase * target)
