import json

import numpy as np
import pytest

from microtherm import channels as ch
from microtherm import convertibility as cv
from microtherm import duality as du
from microtherm import microcanonical as mc
from microtherm import models as m
from microtherm import serialize as io
from microtherm.errors import ParseError

MODELS = [m.Classical(3), m.Quantum(2), m.Quantum(4), m.DoubledQuantum(2), m.SquareBit(), m.HalfDisk(),
          m.compose_systems(m.Quantum(2), m.Quantum(3)), m.compose_systems(m.DoubledQuantum(2), m.DoubledQuantum(2))]


def _through_text(obj):
    return json.loads(io.dumps(obj))


@pytest.mark.parametrize("model", MODELS)
def test_state_round_trip(model):
    rng = np.random.default_rng(0)
    for _ in range(10):
        s = m.random_state(model, rng)
        back = io.state_from_json(_through_text(io.state_to_json(s)))
        assert back.model == s.model
        assert m.state_distance(back, s) <= 1e-12


@pytest.mark.parametrize("model", [m.Classical(3), m.Quantum(3), m.DoubledQuantum(2), m.SquareBit(), m.HalfDisk()])
def test_reversible_round_trip(model):
    rng = np.random.default_rng(1)
    s = m.random_state(model, rng)
    for _ in range(10):
        u = m.random_reversible(model, rng)
        back = io.reversible_from_json(_through_text(io.reversible_to_json(u)))
        assert m.state_distance(m.apply_reversible(back, s), m.apply_reversible(u, s)) <= 1e-12


def test_composite_factors_survive():
    ab = m.compose_systems(m.Quantum(2), m.Quantum(3))
    back = io.model_from_json(_through_text(io.model_to_json(ab)))
    assert back.factors == ab.factors


def test_schema_shapes():
    q = io.state_to_json(mc.microcanonical_state(m.Quantum(2)))
    assert q["model"] == {"kind": "quantum", "d": 2}
    assert set(q["payload"]) == {"re", "im"}
    assert set(io.state_to_json(mc.microcanonical_state(m.DoubledQuantum(2)))["payload"]) == {"block0", "block1"}
    assert io.state_to_json(mc.microcanonical_state(m.Classical(2)))["payload"] == {"probs": [0.5, 0.5]}
    assert io.state_to_json(mc.microcanonical_state(m.SquareBit()))["payload"] == {"xy": [0.0, 0.0]}


def test_channel_round_trips():
    q = m.Quantum(3)
    rng = np.random.default_rng(2)
    rho, sigma = m.random_state(q, rng, rank=1), m.random_state(q, rng)
    channels = [cv.decide(r, rho, sigma).witness for r in cv.Relation]
    channels.append(ch.landau_streater(1))
    channels.append(ch.noisy_channel(ch.noisy_realization(
        ch.mixture_channel([(0.5, m.random_reversible(q, rng)), (0.5, m.random_reversible(q, rng))]))))
    d = m.DoubledQuantum(2)
    channels.append(cv.rare_convertible(m.dqt_pure_state(d, 0, [1, 0]), mc.microcanonical_state(d)).witness)
    for c in channels:
        back = io.channel_from_json(_through_text(io.channel_to_json(c)))
        assert back.kind == c.kind
        states = ch.spanning_states(c.model_in, seed=3)
        assert ch.channel_distance(c, back, states) <= 1e-12


def test_bipartite_round_trip():
    psi = du.random_pure_bipartite(2, 3, np.random.default_rng(4))
    back = io.bipartite_from_json(_through_text(io.bipartite_to_json(psi)))
    assert np.max(np.abs(back.amplitudes - psi.amplitudes)) <= 1e-12
    assert io.bipartite_to_json(psi)["dims"] == [2, 3]


def test_bit_exact():
    s = m.random_state(m.Quantum(3), np.random.default_rng(5))
    back = io.state_from_json(_through_text(io.state_to_json(s)))
    np.testing.assert_array_equal(back.payload, s.payload)


@pytest.mark.parametrize("bad", [
    {"model": {"kind": "quantum", "d": 2}},
    {"model": {"kind": "qutrit"}, "payload": {}},
    {"model": {"kind": "quantum", "d": 2}, "payload": {"re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}},
    {"model": {"kind": "quantum", "d": 2}, "payload": {"re": [[1, 0], [0, 0]], "im": [[0, 0]]}},
    {"model": {"kind": "classical", "d": 0}, "payload": {"probs": []}},
    {"model": {"kind": "classical", "d": 2}, "payload": {"probs": [0.5, 0.6]}},
    {"model": "quantum", "payload": {}},
])
def test_bad_states(bad):
    with pytest.raises(ParseError):
        io.state_from_json(bad)


def test_bad_bipartite():
    with pytest.raises(ParseError):
        io.bipartite_from_json({"dims": [2, 2], "re": [1, 0, 0], "im": [0, 0, 0]})
    with pytest.raises(ParseError):
        io.bipartite_from_json({"dims": [2, 2], "re": [1, 1, 0, 0], "im": [0, 0, 0, 0]})


def test_model_spec():
    assert io.parse_model_spec("quantum:3") == m.Quantum(3)
    assert io.parse_model_spec("square-bit") == m.SquareBit()
    assert io.parse_model_spec("doubled_quantum:2") == m.DoubledQuantum(2)
    with pytest.raises(ParseError):
        io.parse_model_spec("quantum:x")


def test_load_errors(tmp_path):
    with pytest.raises(ParseError):
        io.load_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        io.load_json(bad)
