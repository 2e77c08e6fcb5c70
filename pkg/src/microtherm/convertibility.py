"""Decision procedures for RaRe, noisy and unital convertibility of states."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import block_diag

from . import channels as ch
from . import models as m
from . import numerics
from .errors import ModelMismatch, NonUniqueSpectrum
from .majorisation import hlp_witness, majorisation_gap, majorises
from .models import Kind, State
from .numerics import DEFAULT_TOL, Tolerance


class Relation(str, Enum):
    RARE = "RaRe"
    NOISY = "Noisy"
    UNITAL = "Unital"


class Answer(str, Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


@dataclass
class ConvertibilityVerdict:
    relation: Relation
    answer: Answer
    witness: ch.Channel | None = None
    obstruction: str | None = None
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.answer is Answer.YES and self.witness is None:
            raise ValueError("a Yes verdict needs a witness channel")
        if self.answer is Answer.NO and not self.obstruction:
            raise ValueError("a No verdict needs an obstruction")

    def to_dict(self):
        return {
            "relation": self.relation.value,
            "answer": self.answer.value,
            "witness": None if self.witness is None else self.witness.kind,
            "obstruction": self.obstruction,
            "notes": list(self.notes),
        }


_SHARP = (Kind.CLASSICAL, Kind.QUANTUM, Kind.DOUBLED_QUANTUM)


def _prepare(rho: State, sigma: State):
    if rho.model != sigma.model:
        raise ModelMismatch(f"states live in different models: {rho.model} vs {sigma.model}")
    if rho.model.kind not in _SHARP:
        raise NonUniqueSpectrum(f"{rho.model} has no unique spectra; convertibility is not decided")
    return m.diagonalise(rho), m.diagonalise(sigma)


def _fmt(v):
    return "(" + ", ".join(f"{x:.6g}" for x in v) + ")"


def _majorisation_obstruction(p, q):
    return f"majorisation fails at prefix {majorisation_gap(p, q)}: spectrum {_fmt(p)} does not majorise {_fmt(q)}"


def _verify(witness, rho, sigma, tol=1e-8):
    err = m.state_distance(ch.apply_channel(witness, rho), sigma)
    if err > tol:
        raise RuntimeError(f"internal error: witness misses the target by {err:.3g}")
    return witness


def unital_convertible(rho: State, sigma: State, tol: Tolerance = DEFAULT_TOL) -> ConvertibilityVerdict:
    """Yes iff the spectrum of ``rho`` majorises that of ``sigma``; the witness
    measures in the eigenbasis of rho and prepares mixtures of sigma's eigenstates."""
    dr, ds = _prepare(rho, sigma)
    p, q = dr.spectrum, ds.spectrum
    if not majorises(p, q, tol):
        return ConvertibilityVerdict(Relation.UNITAL, Answer.NO, obstruction=_majorisation_obstruction(p, q))
    d = hlp_witness(p, q, tol)
    witness = ch.unital_from_doubly_stochastic(rho.model, d, dr.basis, ds.basis, tol)
    return ConvertibilityVerdict(Relation.UNITAL, Answer.YES, _verify(witness, rho, sigma))


def dqt_sector_mass(s: State) -> tuple[float, float]:
    """Traces of the two sector blocks of a doubled-quantum state."""
    if s.model.kind is not Kind.DOUBLED_QUANTUM:
        raise ModelMismatch("sector mass is defined for doubled quantum states only")
    return float(np.trace(s.payload[0]).real), float(np.trace(s.payload[1]).real)


def rare_convertible(rho: State, sigma: State, tol: Tolerance = DEFAULT_TOL) -> ConvertibilityVerdict:
    dr, ds = _prepare(rho, sigma)
    p, q = dr.spectrum, ds.spectrum
    if not majorises(p, q, tol):
        # every RaRe channel is unital
        return ConvertibilityVerdict(Relation.RARE, Answer.NO, obstruction=_majorisation_obstruction(p, q))
    if rho.model.kind is Kind.DOUBLED_QUANTUM:
        return _dqt_rare(rho, sigma, p, q, tol)
    d = hlp_witness(p, q, tol)
    witness = ch.rare_from_birkhoff(rho.model, dr.basis, ds.basis, d, tol)
    return ConvertibilityVerdict(Relation.RARE, Answer.YES, _verify(witness, rho, sigma))


def _block_eig(block, tol):
    vals, vecs = numerics.hermitian_eigendecomposition(block, tol)
    return np.clip(vals, 0.0, None), vecs


def _dqt_rare(rho, sigma, p, q, tol):
    model = rho.model
    mr = np.array(dqt_sector_mass(rho))
    ms = np.array(dqt_sector_mass(sigma))
    slack = tol.eq_tol
    # a mixture of sector-preserving and sector-exchanging reversibles sends the
    # mass pair to a convex combination of (m0, m1) and (m1, m0)
    lo, hi = sorted(mr)
    if not lo - slack <= ms[0] <= hi + slack:
        return ConvertibilityVerdict(
            Relation.RARE, Answer.NO,
            obstruction=f"sector mass {_fmt(mr)} cannot reach {_fmt(ms)}: "
                        "random reversibles only average the mass pair with its exchange")
    mutually = majorises(q, p, tol)
    (vr0, cr0), (vr1, cr1) = (_block_eig(b, tol) for b in rho.payload)
    (vs0, cs0), (vs1, cs1) = (_block_eig(b, tol) for b in sigma.payload)
    if mutually:
        # equal spectra: by strict concavity of the entropy a mixture of states
        # isospectral to sigma equals sigma only if every term does, so a single
        # reversible is needed; reversibles keep or exchange the sector blocks
        straight = np.allclose(vr0, vs0, atol=slack) and np.allclose(vr1, vs1, atol=slack)
        crossed = np.allclose(vr0, vs1, atol=slack) and np.allclose(vr1, vs0, atol=slack)
        if not (straight or crossed):
            if not (np.allclose(mr, ms, atol=slack) or np.allclose(mr, ms[::-1], atol=slack)):
                reason = f"sector mass {_fmt(mr)} != {_fmt(ms)} (not even after sector exchange)"
            else:
                reason = f"sector block spectra {_fmt(vr0)}|{_fmt(vr1)} vs {_fmt(vs0)}|{_fmt(vs1)} differ"
            return ConvertibilityVerdict(
                Relation.RARE, Answer.NO,
                obstruction=f"{reason}; equal spectra require a single reversible, and none exists")
    # first mix with the sector exchange, t * id + (1 - t) * E, so the masses
    # match; then a sector-preserving witness inside each block
    if abs(mr[0] - mr[1]) > slack:
        weights = [float(np.clip((ms[0] - mr[1]) / (mr[0] - mr[1]), 0.0, 1.0))]
    else:
        weights = [1.0, 0.0, 0.5]
    for t in weights:
        mixed = [t * rho.payload[0] + (1 - t) * rho.payload[1], t * rho.payload[1] + (1 - t) * rho.payload[0]]
        src = [_block_eig(b, tol) for b in mixed]
        inner = _blockwise_witness(model, src, ((vs0, cs0), (vs1, cs1)), tol)
        if inner is not None:
            witness = _after_exchange_mix(inner, t)
            return ConvertibilityVerdict(Relation.RARE, Answer.YES, _verify(witness, rho, sigma))
    return ConvertibilityVerdict(
        Relation.RARE, Answer.UNKNOWN,
        notes=["sector-mass and spectral tests pass but no sector-respecting witness was found; "
               "doubled-quantum RaRe convertibility is not settled beyond these checks"])


def _after_exchange_mix(inner: ch.Channel, t: float) -> ch.Channel:
    """``inner o (t * id + (1 - t) * E)`` as one mixture of reversibles."""
    model = inner.model_in
    terms = []
    for w, u in inner.representation.terms:
        u0, u1, swap = u.payload
        if t > 0:
            terms.append((t * w, u))
        if t < 1:
            terms.append(((1 - t) * w, m.Reversible(model, (u0, u1, not swap))))
    return ch.mixture_channel(terms)


def _blockwise_witness(model, src, dst, tol):
    """Sector-preserving witness from one doubly stochastic matrix per sector,
    if the sector masses line up and each block spectrum majorises its target."""
    mats = []
    for (vr, _), (vs, _) in zip(src, dst):
        mass_r, mass_s = vr.sum(), vs.sum()
        if abs(mass_r - mass_s) > tol.eq_tol:
            return None
        if mass_r <= tol.eq_tol:
            mats.append(np.eye(len(vr)))
            continue
        if not majorises(vr / mass_r, vs / mass_s, tol):
            return None
        mats.append(hlp_witness(vr / mass_r, vs / mass_s, tol))
    basis_in = m.dqt_basis_set(model, src[0][1], src[1][1])
    basis_out = m.dqt_basis_set(model, dst[0][1], dst[1][1])
    return ch.rare_from_birkhoff(model, basis_in, basis_out, block_diag(*mats), tol)


def noisy_convertible(rho: State, sigma: State, tol: Tolerance = DEFAULT_TOL,
                      max_ancilla: int = 64) -> ConvertibilityVerdict:
    """Sandwiched between the RaRe and unital verdicts.

    For classical and quantum systems all three coincide. The witness is the
    control-unitary realisation of the RaRe witness when its weights are
    exactly rational with an ancilla of dimension ``<= max_ancilla``, and the
    RaRe witness itself otherwise (RaRe channels are noisy operations).
    """
    unital = unital_convertible(rho, sigma, tol)
    if unital.answer is Answer.NO:
        return ConvertibilityVerdict(Relation.NOISY, Answer.NO, obstruction=unital.obstruction,
                                     notes=["noisy operations are unital"])
    rare = rare_convertible(rho, sigma, tol)
    if rare.answer is not Answer.YES:
        return ConvertibilityVerdict(
            Relation.NOISY, Answer.UNKNOWN,
            notes=["unital says Yes, RaRe does not; the noisy relation lies in between"])
    witness = rare.witness
    notes = ["RaRe channels are noisy operations"]
    if rho.model.kind is Kind.QUANTUM:
        weights = [w for w, _ in witness.representation.terms]
        fracs, err = ch.rationalize_weights(weights, max_ancilla)
        n = np.lcm.reduce([f.denominator for f in fracs])
        if err <= tol.eq_tol * 1e-1 and n <= max_ancilla:
            realization = ch.noisy_realization(witness, max_denominator=max_ancilla)
            witness = ch.noisy_channel(realization)
            notes = [f"control-unitary realisation with ancilla dimension {n}"]
    return ConvertibilityVerdict(Relation.NOISY, Answer.YES, _verify(witness, rho, sigma), notes=notes)


def decide(relation, rho: State, sigma: State, tol: Tolerance = DEFAULT_TOL) -> ConvertibilityVerdict:
    relation = Relation(relation) if not isinstance(relation, Relation) else relation
    fn = {Relation.RARE: rare_convertible, Relation.NOISY: noisy_convertible,
          Relation.UNITAL: unital_convertible}[relation]
    return fn(rho, sigma, tol)


# ---------------------------------------------------------------------------
# the doubled-qubit counterexample


def counterexample_states():
    """rho = (|0,0><0,0| + |0,1><0,1|)/2 inside sector 0, and
    sigma = |0,0><0,0|/2 (+) |1,0><1,0|/2 across both sectors."""
    model = m.DoubledQuantum(2)
    zero = np.zeros((2, 2))
    rho = State(model, (np.eye(2) / 2, zero))
    e0 = np.diag([1.0, 0.0])
    sigma = State(model, (e0 / 2, e0 / 2))
    return rho, sigma


def counterexample_report() -> dict:
    rho, sigma = counterexample_states()
    spec_r = m.diagonalise(rho).spectrum
    spec_s = m.diagonalise(sigma).spectrum
    fwd = unital_convertible(rho, sigma)
    back = unital_convertible(sigma, rho)
    rare = rare_convertible(rho, sigma)
    noisy = noisy_convertible(rho, sigma)
    report = {
        "model": str(rho.model),
        "spectra": [_nonzero(spec_r), _nonzero(spec_s)],
        "sector_mass": [list(dqt_sector_mass(rho)), list(dqt_sector_mass(sigma))],
        "unital_both_ways": [fwd.answer.value, back.answer.value],
        "rare": rare.answer.value,
        "rare_obstruction": rare.obstruction,
        "noisy": noisy.answer.value,
        "verdicts": {v.relation.value: v.to_dict() for v in (fwd, rare, noisy)},
    }
    checks = {
        "spectra_half_half": report["spectra"] == [[0.5, 0.5], [0.5, 0.5]],
        "unital_both_ways": report["unital_both_ways"] == ["Yes", "Yes"],
        "sector_masses_differ": report["sector_mass"] == [[1.0, 0.0], [0.5, 0.5]],
        "rare_no": report["rare"] == "No",
    }
    report["checks"] = checks
    report["all_reproduced"] = all(checks.values())
    return report


def _nonzero(spec):
    return [float(x) for x in spec if x > 0]


__all__ = [
    "Answer", "ConvertibilityVerdict", "Relation", "counterexample_report", "counterexample_states",
    "decide", "dqt_sector_mass", "noisy_convertible", "rare_convertible", "unital_convertible",
]

