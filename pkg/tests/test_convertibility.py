import numpy as np
import pytest

from microtherm import channels as ch
from microtherm import convertibility as cv
from microtherm import majorisation as mj
from microtherm import microcanonical as mc
from microtherm import models as m
from microtherm.convertibility import Answer, Relation
from microtherm.errors import ModelMismatch, NonUniqueSpectrum
from microtherm.models import State


def _quantum_pairs(n, seed):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        d = int(rng.integers(2, 5))
        q = m.Quantum(d)
        rank = int(rng.integers(1, d + 1))
        rho = m.random_state(q, rng, rank=rank)
        if rng.random() < 0.5:
            # sigma on the majorised side of rho
            p = m.diagonalise(rho).spectrum
            qv = mj.random_majorised_pair(d, rng)[1] if rng.random() < 0.2 else \
                sum(w * p[rng.permutation(d)] for w in rng.dirichlet(np.ones(3)))
            sigma = m.mix(qv, m.pure_maximal_set(q, choice_seed=int(rng.integers(1 << 30))).states)
        else:
            sigma = m.random_state(q, rng)
        yield rho, sigma


def _check_witness(v, rho, sigma):
    if v.answer is Answer.YES:
        assert m.state_distance(ch.apply_channel(v.witness, rho), sigma) <= 1e-8


class TestUnital:
    def test_pure_to_chi(self):
        q = m.Quantum(3)
        v = cv.unital_convertible(State(q, np.diag([1.0, 0, 0])), mc.microcanonical_state(q))
        assert v.answer is Answer.YES
        assert ch.is_unital(v.witness)

    def test_chi_to_pure(self):
        q = m.Quantum(2)
        v = cv.unital_convertible(mc.microcanonical_state(q), State(q, np.diag([1.0, 0])))
        assert v.answer is Answer.NO
        assert "majorisation fails at prefix 1" in v.obstruction

    def test_dqt_counterexample_both_ways(self):
        rho, sigma = cv.counterexample_states()
        assert cv.unital_convertible(rho, sigma).answer is Answer.YES
        assert cv.unital_convertible(sigma, rho).answer is Answer.YES

    def test_square_bit_has_no_unique_spectrum(self):
        sq = m.SquareBit()
        with pytest.raises(NonUniqueSpectrum):
            cv.unital_convertible(State(sq, [0.1, 0.2]), State(sq, [0, 0]))

    def test_model_mismatch(self):
        with pytest.raises(ModelMismatch):
            cv.unital_convertible(mc.microcanonical_state(m.Quantum(2)), mc.microcanonical_state(m.Quantum(3)))


class TestRare:
    def test_equal_states(self):
        rng = np.random.default_rng(0)
        rho = m.random_state(m.Quantum(3), rng)
        v = cv.rare_convertible(rho, rho)
        assert v.answer is Answer.YES
        _check_witness(v, rho, rho)

    def test_dqt_counterexample(self):
        rho, sigma = cv.counterexample_states()
        v = cv.rare_convertible(rho, sigma)
        assert v.answer is Answer.NO
        assert "sector mass (1, 0) != (0.5, 0.5)" in v.obstruction

    def test_dqt_equal_masses_yes(self):
        d = m.DoubledQuantum(2)
        rng = np.random.default_rng(1)
        for _ in range(20):
            rho = m.random_state(d, rng)
            u = m.random_reversible(d, rng)
            sigma = m.apply_reversible(u, rho)
            v = cv.rare_convertible(rho, sigma)
            assert v.answer is Answer.YES
            _check_witness(v, rho, sigma)

    def test_dqt_pure_to_chi(self):
        d = m.DoubledQuantum(2)
        rho = m.dqt_pure_state(d, 0, [1, 0])
        v = cv.rare_convertible(rho, mc.microcanonical_state(d))
        assert v.answer is Answer.YES
        _check_witness(v, rho, mc.microcanonical_state(d))

    def test_dqt_partial_exchange(self):
        # masses (0.8, 0.2) -> (0.6, 0.4) need a weight-3/4 mixture with the sector exchange
        d = m.DoubledQuantum(2)
        rho = State(d, (np.diag([0.8, 0.0]), np.diag([0.2, 0.0])))
        sigma = State(d, (np.diag([0.3, 0.3]), np.diag([0.2, 0.2])))
        v = cv.rare_convertible(rho, sigma)
        assert v.answer is Answer.YES
        _check_witness(v, rho, sigma)
        assert any(u.payload[2] for _, u in v.witness.representation.terms)

    def test_dqt_mass_outside_exchange_hull(self):
        d = m.DoubledQuantum(2)
        # spectrum (0.6, 0.4) majorises (0.4, 0.4, 0.1, 0.1), but mass 0.8 is outside [0.4, 0.6]
        rho = State(d, (np.diag([0.6, 0.0]), np.diag([0.4, 0.0])))
        sigma = State(d, (np.diag([0.4, 0.4]), np.diag([0.1, 0.1])))
        assert cv.unital_convertible(rho, sigma).answer is Answer.YES
        v = cv.rare_convertible(rho, sigma)
        assert v.answer is Answer.NO
        assert "sector mass" in v.obstruction

    def test_dqt_rare_never_contradicts_sector_mass(self):
        d = m.DoubledQuantum(2)
        rng = np.random.default_rng(2)
        for _ in range(100):
            rho, sigma = m.random_state(d, rng), m.random_state(d, rng, rank=1)
            v = cv.rare_convertible(sigma, rho)
            if v.answer is Answer.YES:
                _check_witness(v, sigma, rho)
                assert v.witness.kind == "MixtureOfReversibles"


class TestNoisy:
    def test_quantum_rational_uses_control_unitary(self):
        q = m.Quantum(2)
        rho, sigma = State(q, np.diag([1.0, 0])), mc.microcanonical_state(q)
        v = cv.noisy_convertible(rho, sigma)
        assert v.answer is Answer.YES
        assert v.witness.kind == "BasicNoisy"
        _check_witness(v, rho, sigma)

    def test_no_when_majorisation_fails(self):
        for model in (m.Quantum(2), m.Classical(3), m.DoubledQuantum(2)):
            chi = mc.microcanonical_state(model)
            pure = m.pure_maximal_set(model).states[0]
            assert cv.noisy_convertible(chi, pure).answer is Answer.NO

    def test_dqt_counterexample_unknown(self):
        rho, sigma = cv.counterexample_states()
        v = cv.noisy_convertible(rho, sigma)
        assert v.answer is Answer.UNKNOWN
        assert v.witness is None and v.obstruction is None


class TestVerdictInvariants:
    def test_yes_needs_witness(self):
        with pytest.raises(ValueError):
            cv.ConvertibilityVerdict(Relation.RARE, Answer.YES)

    def test_no_needs_obstruction(self):
        with pytest.raises(ValueError):
            cv.ConvertibilityVerdict(Relation.RARE, Answer.NO)

    def test_to_dict(self):
        rho, sigma = cv.counterexample_states()
        d = cv.rare_convertible(rho, sigma).to_dict()
        assert d["relation"] == "RaRe" and d["answer"] == "No" and d["witness"] is None


class TestQuantumCollapse:
    def test_three_relations_agree(self):
        for rho, sigma in _quantum_pairs(300, seed=3):
            p, q = m.diagonalise(rho).spectrum, m.diagonalise(sigma).spectrum
            verdicts = [cv.decide(r, rho, sigma) for r in Relation]
            answers = {v.answer for v in verdicts}
            assert len(answers) == 1
            assert answers.pop() is (Answer.YES if mj.majorises(p, q) else Answer.NO)
            for v in verdicts:
                _check_witness(v, rho, sigma)
            if verdicts[0].answer is Answer.YES:
                assert mj.shannon_monotone(p) >= mj.shannon_monotone(q) - 1e-9

    def test_classical(self):
        c = m.Classical(4)
        rng = np.random.default_rng(4)
        for _ in range(50):
            rho = m.random_state(c, rng, rank=2)
            mix = sum(w * mj.permutation_matrix(rng.permutation(4)) for w in rng.dirichlet(np.ones(3)))
            sigma = State(c, mix @ rho.payload)
            for r in Relation:
                v = cv.decide(r, rho, sigma)
                assert v.answer is Answer.YES
                _check_witness(v, rho, sigma)

    def test_decide_accepts_strings(self):
        q = m.Quantum(2)
        assert cv.decide("Unital", mc.microcanonical_state(q), mc.microcanonical_state(q)).answer is Answer.YES


class TestSectorMass:
    def test_values(self):
        rho, sigma = cv.counterexample_states()
        assert cv.dqt_sector_mass(rho) == (1.0, 0.0)
        assert cv.dqt_sector_mass(sigma) == (0.5, 0.5)
        assert cv.dqt_sector_mass(mc.microcanonical_state(m.DoubledQuantum(2))) == (0.5, 0.5)

    def test_wrong_model(self):
        with pytest.raises(ModelMismatch):
            cv.dqt_sector_mass(mc.microcanonical_state(m.Quantum(2)))

    def test_preserved_by_sector_preserving_mixtures(self):
        d = m.DoubledQuantum(2)
        rng = np.random.default_rng(5)
        s = m.random_state(d, rng)
        for _ in range(200):
            u = m.random_reversible(d, rng)
            u = m.Reversible(d, (u.payload[0], u.payload[1], False))
            assert cv.dqt_sector_mass(m.apply_reversible(u, s)) == pytest.approx(cv.dqt_sector_mass(s), abs=1e-14)
        for _ in range(50):
            terms = [(w, m.Reversible(d, m.random_reversible(d, rng).payload[:2]))
                     for w in rng.dirichlet(np.ones(3))]
            out = ch.apply_channel(ch.mixture_channel(terms), s)
            assert cv.dqt_sector_mass(out) == pytest.approx(cv.dqt_sector_mass(s), abs=1e-14)

    def test_sector_exchange_swaps_mass(self):
        d = m.DoubledQuantum(2)
        rho, _ = cv.counterexample_states()
        eye = np.eye(2)
        out = m.apply_reversible(m.Reversible(d, (eye, eye, True)), rho)
        assert cv.dqt_sector_mass(out) == (0.0, 1.0)


def test_counterexample_report():
    rep = cv.counterexample_report()
    assert rep["spectra"] == [[0.5, 0.5], [0.5, 0.5]]
    assert rep["unital_both_ways"] == ["Yes", "Yes"]
    assert rep["sector_mass"] == [[1.0, 0.0], [0.5, 0.5]]
    assert rep["rare"] == "No"
    assert rep["all_reproduced"]
