import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microtherm import models as m
from microtherm import numerics
from microtherm.errors import (
    InvalidState,
    ModelMismatch,
    NotComposite,
    NotPure,
    UnsupportedComposition,
    UnsupportedModel,
)
from microtherm.models import Effect, State

SHARP = [m.Classical(3), m.Quantum(2), m.Quantum(3), m.DoubledQuantum(2)]
ALL_WITH_GROUP = SHARP + [m.SquareBit()]


def _ket(*amps):
    return np.array(amps, dtype=complex)


class TestPair:
    def test_quantum(self):
        q = m.Quantum(2)
        proj = np.diag([1.0, 0.0])
        assert m.pair(Effect(q, proj), State(q, proj)) == pytest.approx(1.0)

    def test_square_bit_facet(self):
        sq = m.SquareBit()
        a1 = Effect(sq, [0, 0.5, 0.5])
        assert m.pair(a1, State(sq, m.SQUARE_VERTICES[1])) == pytest.approx(0.0, abs=1e-15)
        assert m.pair(a1, State(sq, m.SQUARE_VERTICES[0])) == pytest.approx(1.0)

    def test_classical_coordinate(self):
        c = m.Classical(3)
        assert m.pair(Effect(c, [0, 1, 0]), State(c, [0.2, 0.5, 0.3])) == pytest.approx(0.5)

    def test_mismatch(self):
        with pytest.raises(ModelMismatch):
            m.pair(Effect(m.Classical(2), [1, 0]), State(m.Classical(3), [1, 0, 0]))

    def test_out_of_range_effect(self):
        c = m.Classical(2)
        with pytest.raises(InvalidState):
            m.pair(Effect(c, [2, 0]), State(c, [1, 0]))


class TestStateValidation:
    def test_bad_trace(self):
        with pytest.raises(InvalidState):
            State(m.Quantum(2), np.eye(2))

    def test_not_psd(self):
        with pytest.raises(InvalidState):
            State(m.Quantum(2), np.diag([1.5, -0.5]))

    def test_outside_square(self):
        with pytest.raises(InvalidState):
            State(m.SquareBit(), [1.5, 0])

    def test_half_disk_lower_half(self):
        with pytest.raises(InvalidState):
            State(m.HalfDisk(), [0, -0.5])

    def test_dqt_block_traces(self):
        with pytest.raises(InvalidState):
            State(m.DoubledQuantum(2), (np.eye(2) / 2, np.eye(2) / 2))


class TestDeterministicEffect:
    @pytest.mark.parametrize("model", ALL_WITH_GROUP + [m.HalfDisk()])
    def test_unit_on_random_states(self, model):
        rng = np.random.default_rng(0)
        u = m.deterministic_effect(model)
        for _ in range(20):
            assert m.pair(u, m.random_state(model, rng)) == pytest.approx(1.0, abs=1e-12)

    def test_payloads(self):
        np.testing.assert_array_equal(m.deterministic_effect(m.Quantum(3)).payload, np.eye(3))
        b0, b1 = m.deterministic_effect(m.DoubledQuantum(2)).payload
        np.testing.assert_array_equal(b0, np.eye(2))
        np.testing.assert_array_equal(b1, np.eye(2))
        np.testing.assert_array_equal(m.deterministic_effect(m.SquareBit()).payload, [0, 0, 1])


class TestComposition:
    def test_quantum(self):
        ab = m.compose_systems(m.Quantum(2), m.Quantum(3))
        assert ab == m.Quantum(6)
        assert m.dimension(ab) == 6

    def test_dqt_sector_dimension(self):
        ab = m.compose_systems(m.DoubledQuantum(2), m.DoubledQuantum(2))
        assert ab.d == 8
        assert m.dimension(ab) == 16

    @pytest.mark.parametrize("other", [m.SquareBit(), m.Quantum(2)])
    def test_square_bit_unsupported(self, other):
        with pytest.raises(UnsupportedComposition):
            m.compose_systems(m.SquareBit(), other)

    def test_mixed_kinds_unsupported(self):
        with pytest.raises(UnsupportedComposition):
            m.compose_systems(m.Classical(2), m.Quantum(2))

    @pytest.mark.parametrize("a,b", [(m.Classical(2), m.Classical(3)), (m.Quantum(2), m.Quantum(4)),
                                     (m.DoubledQuantum(2), m.DoubledQuantum(3)),
                                     (m.DoubledQuantum(1), m.DoubledQuantum(2))])
    def test_information_locality(self, a, b):
        assert m.dimension(m.compose_systems(a, b)) == m.dimension(a) * m.dimension(b)


class TestTensor:
    def test_quantum_projectors(self):
        q = m.Quantum(2)
        t = m.tensor_states(State(q, np.diag([1.0, 0])), State(q, np.diag([0, 1.0])))
        np.testing.assert_allclose(t.payload, numerics.ket_to_projector(_ket(0, 1, 0, 0)))

    def test_classical(self):
        c = m.Classical(2)
        t = m.tensor_states(State(c, [1, 0]), State(c, [0.5, 0.5]))
        np.testing.assert_allclose(t.payload, [0.5, 0.5, 0, 0])

    def test_dqt_sector_bookkeeping(self):
        d = m.DoubledQuantum(2)
        t = m.tensor_states(m.dqt_pure_state(d, 0, [1, 0]), m.dqt_pure_state(d, 1, [1, 0]))
        assert np.trace(t.payload[0]).real == 0
        assert np.trace(t.payload[1]).real == pytest.approx(1.0)

    @pytest.mark.parametrize("a,b", [(m.Classical(2), m.Classical(3)), (m.Quantum(2), m.Quantum(3)),
                                     (m.DoubledQuantum(2), m.DoubledQuantum(2))])
    def test_product_effects_factorise(self, a, b):
        rng = np.random.default_rng(1)
        for _ in range(10):
            s, t = m.random_state(a, rng), m.random_state(b, rng)
            ea = m.pure_maximal_set(a, choice_seed=int(rng.integers(1 << 30))).dagger_effects[0]
            eb = m.pure_maximal_set(b, choice_seed=int(rng.integers(1 << 30))).dagger_effects[-1]
            lhs = m.pair(m.tensor_effects(ea, eb), m.tensor_states(s, t))
            assert lhs == pytest.approx(m.pair(ea, s) * m.pair(eb, t), abs=1e-9)

    def test_dqt_local_tomography_ranks(self):
        a = m.DoubledQuantum(2)
        ab = m.compose_systems(a, a)
        rng = np.random.default_rng(2)
        products = np.array([m.state_vector(m.tensor_states(m.random_state(a, rng), m.random_state(a, rng)))
                             for _ in range(200)])
        joint = np.array([m.state_vector(m.random_state(ab, rng)) for _ in range(300)])
        assert np.linalg.matrix_rank(products, tol=1e-8) == 64
        assert np.linalg.matrix_rank(joint, tol=1e-8) == 128


class TestReversible:
    def test_pauli_x(self):
        q = m.Quantum(2)
        x = m.Reversible(q, [[0, 1], [1, 0]])
        out = m.apply_reversible(x, State(q, np.diag([1.0, 0])))
        np.testing.assert_allclose(out.payload, np.diag([0, 1.0]))

    def test_dqt_preserves_sector_mass_exactly(self):
        d = m.DoubledQuantum(3)
        rng = np.random.default_rng(3)
        for _ in range(50):
            s = m.random_state(d, rng)
            u = m.Reversible(d, (numerics.haar_random_unitary(3, rng=rng), numerics.haar_random_unitary(3, rng=rng)))
            out = m.apply_reversible(u, s)
            for b_in, b_out in zip(s.payload, out.payload):
                assert np.trace(b_out).real == pytest.approx(np.trace(b_in).real, abs=1e-14)

    def test_square_bit_reflection(self):
        sq = m.SquareBit()
        flip = next(i for i, g in enumerate(m.DIHEDRAL) if np.array_equal(g, [[1, 0], [0, -1]]))
        out = m.apply_reversible(m.Reversible(sq, flip), State(sq, m.SQUARE_VERTICES[0]))
        np.testing.assert_allclose(out.payload, m.SQUARE_VERTICES[1])

    @pytest.mark.parametrize("model", ALL_WITH_GROUP + [m.HalfDisk(), m.Classical(5)])
    def test_inverse_round_trip(self, model):
        rng = np.random.default_rng(4)
        for _ in range(25):
            s = m.random_state(model, rng)
            u = m.random_reversible(model, rng)
            back = m.apply_reversible(m.inverse(u), m.apply_reversible(u, s))
            assert m.state_distance(back, s) <= 1e-9

    def test_model_mismatch(self):
        with pytest.raises(ModelMismatch):
            m.apply_reversible(m.identity_reversible(m.Quantum(2)), State(m.Quantum(3), np.eye(3) / 3))

    def test_dihedral_group_closed(self):
        mats = [g.tolist() for g in m.DIHEDRAL]
        assert len({str(x) for x in mats}) == 8
        for g in m.DIHEDRAL:
            for h in m.DIHEDRAL:
                assert (g @ h).tolist() in mats


class TestPureMaximalSet:
    @pytest.mark.parametrize("model", ALL_WITH_GROUP + [m.Classical(4), m.DoubledQuantum(3)])
    def test_biorthogonality(self, model):
        for seed in range(100):
            b = m.pure_maximal_set(model, choice_seed=seed)
            gram = np.array([[m.pair(e, s) for s in b.states] for e in b.dagger_effects])
            np.testing.assert_allclose(gram, np.eye(len(b)), atol=1e-9)

    def test_classical_point_masses(self):
        b = m.pure_maximal_set(m.Classical(3))
        np.testing.assert_array_equal([s.payload for s in b.states], np.eye(3))

    def test_quantum_gram(self):
        b = m.pure_maximal_set(m.Quantum(2), choice_seed=11)
        kets = np.column_stack([np.linalg.eigh(s.payload)[1][:, -1] for s in b.states])
        np.testing.assert_allclose(kets.conj().T @ kets, np.eye(2), atol=1e-10)

    def test_dqt_two_per_sector(self):
        b = m.pure_maximal_set(m.DoubledQuantum(2))
        sectors = [int(np.trace(s.payload[1]).real > 0.5) for s in b.states]
        assert sectors == [0, 0, 1, 1]

    def test_half_disk_unsupported(self):
        with pytest.raises(UnsupportedModel):
            m.pure_maximal_set(m.HalfDisk())


class TestDagger:
    def test_quantum(self):
        q = m.Quantum(2)
        proj = numerics.ket_to_projector(_ket(1, 1j) / np.sqrt(2))
        np.testing.assert_allclose(m.dagger(State(q, proj)).payload, proj, atol=1e-12)

    def test_classical(self):
        np.testing.assert_array_equal(m.dagger(State(m.Classical(4), [0, 1, 0, 0])).payload, [0, 1, 0, 0])

    def test_dqt_sector_one(self):
        d = m.DoubledQuantum(2)
        e0, e1 = m.dagger(m.dqt_pure_state(d, 1, [1, 0])).payload
        np.testing.assert_allclose(e0, 0)
        np.testing.assert_allclose(e1, np.diag([1.0, 0]))

    def test_not_pure(self):
        with pytest.raises(NotPure):
            m.dagger(State(m.Quantum(2), np.eye(2) / 2))

    @pytest.mark.parametrize("model", [m.SquareBit(), m.HalfDisk()])
    def test_planar(self, model):
        rng = np.random.default_rng(5)
        for _ in range(10):
            s = m.random_state(model, rng, rank=1)
            assert m.pair(m.dagger(s), s) == pytest.approx(1.0)


class TestDiagonalise:
    def test_quantum_diagonal(self):
        dg = m.diagonalise(State(m.Quantum(2), np.diag([0.7, 0.3])))
        np.testing.assert_allclose(dg.spectrum, [0.7, 0.3])

    def test_classical_sorted(self):
        dg = m.diagonalise(State(m.Classical(3), [0.2, 0.5, 0.3]))
        np.testing.assert_allclose(dg.spectrum, [0.5, 0.3, 0.2])

    def test_dqt_sigma_spans_both_sectors(self):
        d = m.DoubledQuantum(2)
        e0 = np.diag([1.0, 0])
        dg = m.diagonalise(State(d, (e0 / 2, e0 / 2)))
        np.testing.assert_allclose(dg.spectrum[:2], [0.5, 0.5])
        np.testing.assert_allclose(dg.states[0].payload[0], e0)
        np.testing.assert_allclose(dg.states[1].payload[1], e0)

    @pytest.mark.parametrize("model", SHARP + [m.DoubledQuantum(3), m.Quantum(5)])
    def test_reconstruction_and_invariance(self, model):
        rng = np.random.default_rng(6)
        for _ in range(30):
            s = m.random_state(model, rng)
            dg = m.diagonalise(s)
            assert np.all(np.diff(dg.spectrum) <= 1e-15)
            assert m.state_distance(m.mix(dg.spectrum, dg.states), s) <= 1e-9
            moved = m.apply_reversible(m.random_reversible(model, rng), s)
            np.testing.assert_allclose(m.diagonalise(moved).spectrum, dg.spectrum, atol=1e-9)

    @pytest.mark.parametrize("model", [m.SquareBit(), m.HalfDisk()])
    def test_planar_flagged(self, model):
        s = m.random_state(model, np.random.default_rng(7))
        dg = m.diagonalise(s)
        assert dg.non_unique
        assert m.state_distance(m.mix(dg.spectrum, dg.states), s) <= 1e-9


class TestMarginal:
    def test_bell(self):
        q = m.compose_systems(m.Quantum(2), m.Quantum(2))
        bell = State(q, numerics.ket_to_projector(_ket(1, 0, 0, 1) / np.sqrt(2)))
        np.testing.assert_allclose(m.marginal(bell, 0).payload, np.eye(2) / 2, atol=1e-12)

    @pytest.mark.parametrize("a,b", [(m.Classical(2), m.Classical(3)), (m.Quantum(3), m.Quantum(2)),
                                     (m.DoubledQuantum(2), m.DoubledQuantum(3))])
    def test_product(self, a, b):
        rng = np.random.default_rng(8)
        s, t = m.random_state(a, rng), m.random_state(b, rng)
        st_ = m.tensor_states(s, t)
        assert m.state_distance(m.marginal(st_, 0), s) <= 1e-12
        assert m.state_distance(m.marginal(st_, 1), t) <= 1e-12

    def test_dqt_entangled_across_summands(self):
        # (|0,0>|0,0> + |1,0>|1,0>)/sqrt2 lives in sector 0 of the composite
        a = m.DoubledQuantum(2)
        ab = m.compose_systems(a, a)
        v = np.zeros(8, dtype=complex)
        v[0] = v[4] = 1 / np.sqrt(2)
        psi = m.dqt_pure_state(ab, 0, v)
        red = m.marginal(psi, 0)
        e0 = np.diag([1.0, 0])
        np.testing.assert_allclose(red.payload[0], e0 / 2, atol=1e-12)
        np.testing.assert_allclose(red.payload[1], e0 / 2, atol=1e-12)

    def test_not_composite(self):
        with pytest.raises(NotComposite):
            m.marginal(State(m.Quantum(2), np.eye(2) / 2), 0)


def test_dimension():
    assert m.dimension(m.Quantum(4)) == 4
    assert m.dimension(m.DoubledQuantum(2)) == 4
    assert m.dimension(m.SquareBit()) == 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=6), st.integers(0, 2**32 - 1))
def test_mix_is_linear_in_pairing(weights, seed):
    w = np.asarray(weights) + 1e-3
    w = w / w.sum()
    model = m.Quantum(3)
    rng = np.random.default_rng(seed)
    states = [m.random_state(model, rng) for _ in w]
    e = m.pure_maximal_set(model, choice_seed=seed).dagger_effects[0]
    assert m.pair(e, m.mix(w, states)) == pytest.approx(sum(wi * m.pair(e, s) for wi, s in zip(w, states)),
                                                       abs=1e-12)
