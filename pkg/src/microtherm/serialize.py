"""JSON encoding of models, states, effects, reversibles, channels and pure
bipartite states.

Complex arrays are stored as parallel ``re``/``im`` row-major lists. Python
floats round-trip exactly through ``json``, so encode/decode is lossless.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from . import channels as ch
from . import models as m
from .duality import PureBipartiteState
from .errors import MicrothermError, ParseError
from .models import Effect, Kind, PureMaximalSet, Reversible, State, TheoryModel
from .numerics import DEFAULT_TOL, Tolerance

_PLANAR = (Kind.SQUARE_BIT, Kind.HALF_DISK)


def _complex(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def _uncomplex(obj) -> np.ndarray:
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"expected a {{re, im}} array: {e}") from None
    if re.shape != im.shape:
        raise ParseError(f"re/im shapes differ: {re.shape} vs {im.shape}")
    return re + 1j * im


def _key(obj, name):
    try:
        return obj[name]
    except (KeyError, TypeError):
        raise ParseError(f"missing field {name!r}") from None


# ---------------------------------------------------------------------------
# models


def model_to_json(model: TheoryModel) -> dict:
    out = {"kind": model.kind.value, "d": model.d}
    if model.is_composite:
        out["factors"] = [model_to_json(f) for f in model.factors]
    return out


def model_from_json(obj) -> TheoryModel:
    if not isinstance(obj, dict):
        raise ParseError("model must be a JSON object")
    if "factors" in obj:
        a, b = (model_from_json(f) for f in obj["factors"])
        model = m.compose_systems(a, b)
    else:
        try:
            kind = Kind(_key(obj, "kind"))
        except ValueError:
            raise ParseError(f"unknown model kind {obj['kind']!r}") from None
        d = 2 if kind in _PLANAR else obj.get("d", 2)
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise ParseError(f"dimension must be a positive integer, got {d!r}")
        model = TheoryModel(kind, d)
    if "d" in obj and obj["d"] != model.d:
        raise ParseError(f"declared dimension {obj['d']} does not match {model}")
    return model


def parse_model_spec(spec: str) -> TheoryModel:
    """``quantum:3``, ``classical:4``, ``doubled_quantum:2``, ``square_bit``, ``half_disk``."""
    name, _, d = spec.strip().partition(":")
    name = name.replace("-", "_").lower()
    obj = {"kind": name}
    if d:
        try:
            obj["d"] = int(d)
        except ValueError:
            raise ParseError(f"bad dimension in model spec {spec!r}") from None
    return model_from_json(obj)


# ---------------------------------------------------------------------------
# states and effects


def _payload_to_json(model, payload, planar_key):
    k = model.kind
    if k is Kind.CLASSICAL:
        return {"probs": np.asarray(payload, dtype=float).tolist()}
    if k is Kind.QUANTUM:
        return _complex(payload)
    if k is Kind.DOUBLED_QUANTUM:
        return {"block0": _complex(payload[0]), "block1": _complex(payload[1])}
    v = np.asarray(payload, dtype=float)
    return {planar_key: (v[:2] if planar_key == "xy" else v).tolist()}


def _payload_from_json(model, obj, planar_key):
    k = model.kind
    if k is Kind.CLASSICAL:
        return np.asarray(_key(obj, "probs"), dtype=float)
    if k is Kind.QUANTUM:
        return _uncomplex(obj)
    if k is Kind.DOUBLED_QUANTUM:
        return (_uncomplex(_key(obj, "block0")), _uncomplex(_key(obj, "block1")))
    return np.asarray(_key(obj, planar_key), dtype=float)


def state_to_json(s: State) -> dict:
    return {"model": model_to_json(s.model), "payload": _payload_to_json(s.model, s.payload, "xy")}


def state_from_json(obj, tol: Tolerance = DEFAULT_TOL) -> State:
    model = model_from_json(_key(obj, "model"))
    try:
        return State(model, _payload_from_json(model, _key(obj, "payload"), "xy"), tol)
    except ParseError:
        raise
    except (MicrothermError, ValueError, TypeError) as e:
        raise ParseError(f"invalid state: {e}") from None


def effect_to_json(e: Effect) -> dict:
    return {"model": model_to_json(e.model), "payload": _payload_to_json(e.model, e.payload, "affine")}


def effect_from_json(obj) -> Effect:
    model = model_from_json(_key(obj, "model"))
    return Effect(model, _payload_from_json(model, _key(obj, "payload"), "affine"))


# ---------------------------------------------------------------------------
# reversibles and channels


def reversible_to_json(u: Reversible) -> dict:
    k = u.model.kind
    if k is Kind.CLASSICAL:
        payload = {"perm": np.asarray(u.payload).tolist()}
    elif k is Kind.QUANTUM:
        payload = _complex(u.payload)
    elif k is Kind.DOUBLED_QUANTUM:
        u0, u1, swap = u.payload
        payload = {"u0": _complex(u0), "u1": _complex(u1), "swap": bool(swap)}
    else:
        payload = {"element": int(u.payload)}
    return {"model": model_to_json(u.model), "payload": payload}


def reversible_from_json(obj) -> Reversible:
    model = model_from_json(_key(obj, "model"))
    p = _key(obj, "payload")
    k = model.kind
    if k is Kind.CLASSICAL:
        payload = _key(p, "perm")
    elif k is Kind.QUANTUM:
        payload = _uncomplex(p)
    elif k is Kind.DOUBLED_QUANTUM:
        payload = (_uncomplex(_key(p, "u0")), _uncomplex(_key(p, "u1")), bool(p.get("swap", False)))
    else:
        payload = _key(p, "element")
    try:
        return Reversible(model, payload)
    except ValueError as e:
        raise ParseError(f"invalid reversible: {e}") from None


def _basis_to_json(b: PureMaximalSet) -> dict:
    return {"states": [state_to_json(s) for s in b.states],
            "dagger_effects": [effect_to_json(e) for e in b.dagger_effects]}


def _basis_from_json(obj) -> PureMaximalSet:
    return PureMaximalSet([state_from_json(s) for s in _key(obj, "states")],
                          [effect_from_json(e) for e in _key(obj, "dagger_effects")])


def _fraction(x) -> str:
    return f"{x.numerator}/{x.denominator}"


def _realization_to_json(nr: ch.NoisyRealization) -> dict:
    return {
        "system_model": model_to_json(nr.system_model),
        "ancilla_model": model_to_json(nr.ancilla_model),
        "ancilla_state": state_to_json(nr.ancilla_state),
        "global_reversible": reversible_to_json(nr.global_reversible),
        "discarded_effect": effect_to_json(nr.discarded_effect),
        "approximation_error": float(nr.approximation_error),
        "weights": [_fraction(w) for w in nr.weights],
    }


def _realization_from_json(obj) -> ch.NoisyRealization:
    return ch.NoisyRealization(
        system_model=model_from_json(_key(obj, "system_model")),
        ancilla_model=model_from_json(_key(obj, "ancilla_model")),
        ancilla_state=state_from_json(_key(obj, "ancilla_state")),
        global_reversible=reversible_from_json(_key(obj, "global_reversible")),
        discarded_effect=effect_from_json(_key(obj, "discarded_effect")),
        approximation_error=float(obj.get("approximation_error", 0.0)),
        weights=tuple(Fraction(w) for w in obj.get("weights", [])),
    )


def channel_to_json(c: ch.Channel) -> dict:
    rep = c.representation
    if isinstance(rep, ch.MixtureOfReversibles):
        body = {"terms": [{"weight": float(w), "reversible": reversible_to_json(u)} for w, u in rep.terms]}
    elif isinstance(rep, ch.MeasureAndPrepare):
        body = {"effects": [effect_to_json(e) for e in rep.effects],
                "states": [state_to_json(s) for s in rep.states]}
    elif isinstance(rep, ch.OperatorSum):
        body = {"kraus": [_complex(k) for k in rep.kraus]}
    elif isinstance(rep, ch.DoublyStochasticInduced):
        body = {"matrix": np.asarray(rep.matrix, dtype=float).tolist(),
                "basis_in": _basis_to_json(rep.basis_in), "basis_out": _basis_to_json(rep.basis_out)}
    elif isinstance(rep, ch.BasicNoisy):
        body = {"realization": _realization_to_json(rep.realization)}
    else:
        raise TypeError(f"cannot serialise {type(rep).__name__}")
    return {"model_in": model_to_json(c.model_in), "model_out": model_to_json(c.model_out),
            "representation": {"type": c.kind, **body}}


def channel_from_json(obj) -> ch.Channel:
    model_in = model_from_json(_key(obj, "model_in"))
    model_out = model_from_json(_key(obj, "model_out"))
    rep = _key(obj, "representation")
    kind = _key(rep, "type")
    if kind == "MixtureOfReversibles":
        r = ch.MixtureOfReversibles([(float(_key(t, "weight")), reversible_from_json(_key(t, "reversible")))
                                     for t in _key(rep, "terms")])
    elif kind == "MeasureAndPrepare":
        r = ch.MeasureAndPrepare([effect_from_json(e) for e in _key(rep, "effects")],
                                 [state_from_json(s) for s in _key(rep, "states")])
    elif kind == "OperatorSum":
        r = ch.OperatorSum([_uncomplex(k) for k in _key(rep, "kraus")])
    elif kind == "DoublyStochasticInduced":
        r = ch.DoublyStochasticInduced(np.asarray(_key(rep, "matrix"), dtype=float),
                                       _basis_from_json(_key(rep, "basis_in")),
                                       _basis_from_json(_key(rep, "basis_out")))
    elif kind == "BasicNoisy":
        r = ch.BasicNoisy(_realization_from_json(_key(rep, "realization")))
    else:
        raise ParseError(f"unknown channel representation {kind!r}")
    return ch.Channel(model_in, model_out, r)


# ---------------------------------------------------------------------------
# pure bipartite states


def bipartite_to_json(psi: PureBipartiteState) -> dict:
    return {"dims": list(psi.dims), **_complex(psi.amplitudes.reshape(-1))}


def bipartite_from_json(obj, tol: Tolerance = DEFAULT_TOL) -> PureBipartiteState:
    dims = _key(obj, "dims")
    if (not isinstance(dims, list) or len(dims) != 2
            or not all(isinstance(x, int) and x >= 1 for x in dims)):
        raise ParseError(f"dims must be two positive integers, got {dims!r}")
    amps = _uncomplex(obj)
    if amps.shape != (dims[0] * dims[1],):
        raise ParseError(f"expected {dims[0] * dims[1]} amplitudes, got shape {amps.shape}")
    psi = PureBipartiteState(amps.reshape(dims))
    try:
        return psi.normalized(tol)
    except MicrothermError as e:
        raise ParseError(str(e)) from None


# ---------------------------------------------------------------------------
# files


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON ({e})") from None


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj) + "\n")
