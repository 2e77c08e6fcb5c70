"""Microcanonical states, the twirl, and invariant-distribution analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from . import models as m
from . import numerics
from .errors import NotMicrocanonical, UnsupportedModel
from .models import Kind, State, TheoryModel
from .numerics import DEFAULT_TOL, Tolerance


def microcanonical_state(model: TheoryModel, tol: Tolerance = DEFAULT_TOL) -> State:
    """Uniform mixture over a pure maximal set (I/d in quantum theory)."""
    k = model.kind
    if k is Kind.CLASSICAL:
        return State(model, np.full(model.d, 1.0 / model.d), tol)
    if k is Kind.QUANTUM:
        return State(model, np.eye(model.d) / model.d, tol)
    if k is Kind.DOUBLED_QUANTUM:
        block = np.eye(model.d) / (2 * model.d)
        return State(model, (block, block.copy()), tol)
    if k is Kind.SQUARE_BIT:
        return State(model, [0.0, 0.0], tol)
    raise NotMicrocanonical("the half-disk has no unique invariant state")


def twirl(model: TheoryModel, s: State, mode: str = "exact", samples: int = 10_000, seed=0,
          tol: Tolerance = DEFAULT_TOL) -> State:
    """Average ``s`` over the reversible group.

    ``mode="exact"`` uses the group average in closed form (enumeration for
    finite groups); ``mode="monte_carlo"`` averages ``samples`` reversibles
    drawn from the invariant measure with a seeded generator.
    """
    m._check_same(model, s.model)
    k = model.kind
    if mode == "exact":
        if k in (Kind.SQUARE_BIT, Kind.HALF_DISK):
            imgs = [m.apply_reversible(g, s, tol).payload for g in m.finite_group(model)]
            return State(model, np.mean(imgs, axis=0), tol)
        if k is Kind.CLASSICAL and model.d <= 7:
            acc = np.zeros(model.d)
            for perm in permutations(range(model.d)):
                acc[list(perm)] += s.payload
            return State(model, acc / math.factorial(model.d), tol)
        # invariant measure is unique and transitive on pure states
        return microcanonical_state(model, tol)
    if mode != "monte_carlo":
        raise ValueError(f"unknown twirl mode {mode!r}")
    rng = np.random.default_rng(seed)
    if k is Kind.QUANTUM:
        us = numerics.haar_random_unitaries(model.d, samples, rng)
        out = np.einsum("nij,jk,nlk->il", us, s.payload, us.conj()) / samples
        return State(model, out, tol)
    if k is Kind.DOUBLED_QUANTUM:
        u0 = numerics.haar_random_unitaries(model.d, samples, rng)
        u1 = numerics.haar_random_unitaries(model.d, samples, rng)
        swaps = rng.integers(2, size=samples).astype(bool)
        b0, b1 = s.payload
        in0 = np.where(swaps[:, None, None], b1, b0)
        in1 = np.where(swaps[:, None, None], b0, b1)
        out0 = np.einsum("nij,njk,nlk->il", u0, in0, u0.conj()) / samples
        out1 = np.einsum("nij,njk,nlk->il", u1, in1, u1.conj()) / samples
        return State(model, (out0, out1), tol)
    group = m.finite_group(model)
    if group is not None:
        idx = rng.integers(len(group), size=samples)
        imgs = [m.apply_reversible(group[i], s, tol).payload for i in idx]
        return State(model, np.mean(imgs, axis=0), tol)
    acc = np.zeros(model.d)
    for _ in range(samples):
        acc[rng.permutation(model.d)] += s.payload
    return State(model, acc / samples, tol)


def check_informational_equilibrium(a: TheoryModel, b: TheoryModel, tol: float = 1e-12) -> bool:
    """Whether the product of microcanonical states is the composite's microcanonical state."""
    ab = m.compose_systems(a, b)
    prod = m.tensor_states(microcanonical_state(a), microcanonical_state(b))
    return m.state_distance(prod, microcanonical_state(ab)) <= tol


@dataclass
class InvariantDistributionReport:
    """Orbit structure of the reversible group on pure states.

    ``witness_distributions`` are finitely supported measures given as lists
    of ``(parameter, weight)`` pairs; for the half-disk the parameter is the
    polar angle of the pure state.
    """

    unique: bool
    orbit_count: int | str
    witness_distributions: list = field(default_factory=list)

    def to_dict(self):
        return {
            "unique": self.unique,
            "orbit_count": self.orbit_count,
            "witness_distributions": [[[float(t), float(w)] for t, w in dist]
                                      for dist in self.witness_distributions],
        }


def half_disk_state(theta: float) -> State:
    return State(m.HalfDisk(), [math.cos(theta), math.sin(theta)])


def half_disk_angle(s: State) -> float:
    return math.atan2(s.payload[1], s.payload[0])


def pushforward(dist, group_element) -> list:
    """Image of a finitely supported measure on half-disk angles under a group element."""
    out = {}
    for theta, w in dist:
        img = half_disk_angle(m.apply_reversible(group_element, half_disk_state(theta)))
        key = round(img, 12)
        out[key] = out.get(key, 0.0) + w
    return sorted(out.items())


def is_invariant_distribution(dist, model: TheoryModel, atol: float = 1e-12) -> bool:
    base = sorted((round(t, 12), w) for t, w in dist)
    for g in m.finite_group(model):
        img = pushforward(dist, g)
        if len(img) != len(base):
            return False
        for (t1, w1), (t2, w2) in zip(base, img):
            if abs(t1 - t2) > atol or abs(w1 - w2) > atol:
                return False
    return True


def _vertex_orbits(model):
    """Orbits of the dihedral group on the square's vertices, by exhaustive enumeration."""
    verts = [State(model, v) for v in m.SQUARE_VERTICES]
    orbits = []
    seen = set()
    for i, v in enumerate(verts):
        if i in seen:
            continue
        orbit = set()
        for g in m.finite_group(model):
            img = m.apply_reversible(g, v).payload
            orbit.add(next(j for j, w in enumerate(m.SQUARE_VERTICES) if np.allclose(img, w)))
        seen |= orbit
        orbits.append(sorted(orbit))
    return orbits


def invariant_distribution_report(model: TheoryModel) -> InvariantDistributionReport:
    k = model.kind
    if k is Kind.HALF_DISK:
        witnesses = [
            [(math.pi / 2, 1.0)],
            [(math.pi / 4, 0.5), (3 * math.pi / 4, 0.5)],
        ]
        return InvariantDistributionReport(False, "infinite", witnesses)
    if k is Kind.SQUARE_BIT:
        orbits = _vertex_orbits(model)
        if len(orbits) == 1:
            return InvariantDistributionReport(True, 1)
        return InvariantDistributionReport(False, len(orbits))
    if k in (Kind.CLASSICAL, Kind.QUANTUM, Kind.DOUBLED_QUANTUM):
        # the symmetric group / unitary group (with sector exchange) is transitive on pure states
        return InvariantDistributionReport(True, 1)
    raise UnsupportedModel(str(model))


def check_minimally_resourceful(model: TheoryModel, s: State, samples: int = 100, seed=0,
                                tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether ``s`` is fixed by every reversible (exhaustive for finite groups)."""
    m._check_same(model, s.model)
    group = m.finite_group(model)
    if group is None and model.kind is Kind.CLASSICAL and model.d <= 7:
        group = [m.Reversible(model, list(p)) for p in permutations(range(model.d))]
    if group is None:
        rng = np.random.default_rng(seed)
        group = [m.random_reversible(model, rng) for _ in range(samples)]
        if model.kind is Kind.DOUBLED_QUANTUM:
            eye = np.eye(model.d)
            group.append(m.Reversible(model, (eye, eye, True)))
    return all(m.state_distance(m.apply_reversible(g, s, tol), s) <= tol.eq_tol for g in group)
