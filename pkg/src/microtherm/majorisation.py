"""Majorisation preorder, doubly stochastic witnesses and Schur-convex monotones."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linear_sum_assignment

from .errors import InvalidAlpha, LengthMismatch, NotDoublyStochastic, NotMajorised
from .numerics import DEFAULT_TOL, Tolerance, is_doubly_stochastic, stable_descending_order


def as_spectrum(values, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Validate a probability vector and return it sorted descending."""
    v = np.asarray(values, dtype=float).reshape(-1)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ValueError("spectrum must be a non-empty finite vector")
    if np.any(v < -tol.eq_tol) or abs(v.sum() - 1) > tol.eq_tol:
        raise ValueError("spectrum must be a probability vector")
    return np.clip(v[stable_descending_order(v)], 0.0, None)


def pad(p, q, allow: bool = True):
    """Zero-pad the shorter of two vectors to a common length."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if len(p) == len(q):
        return p, q
    if not allow:
        raise LengthMismatch(f"lengths {len(p)} and {len(q)} differ")
    n = max(len(p), len(q))
    return np.pad(p, (0, n - len(p))), np.pad(q, (0, n - len(q)))


def majorisation_gap(p, q, tol: Tolerance = DEFAULT_TOL):
    """First prefix length (1-based) where ``p`` fails to dominate ``q``, or None."""
    p, q = pad(as_spectrum(p, tol), as_spectrum(q, tol))
    cp, cq = np.cumsum(p), np.cumsum(q)
    bad = np.nonzero(cp < cq - tol.eq_tol)[0]
    return int(bad[0]) + 1 if bad.size else None


def majorises(p, q, tol: Tolerance = DEFAULT_TOL, allow_padding: bool = True) -> bool:
    """True iff ``p`` majorises ``q`` (descending prefix sums of p dominate those of q)."""
    p, q = pad(as_spectrum(p, tol), as_spectrum(q, tol), allow_padding)
    if abs(p.sum() - q.sum()) > tol.eq_tol:
        return False
    return bool(np.all(np.cumsum(p) >= np.cumsum(q) - tol.eq_tol))


def t_transform(n: int, j: int, k: int, lam: float) -> np.ndarray:
    """``lam * I + (1 - lam) * Q_jk`` where Q_jk swaps coordinates j and k."""
    t = np.eye(n)
    t[[j, k], [j, k]] = lam
    t[j, k] = t[k, j] = 1 - lam
    return t


def hlp_witness(p, q, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Doubly stochastic D with ``D @ p == q`` for descending spectra p majorising q.

    Built as a product of at most ``n - 1`` T-transforms: take the first index
    k where p falls short of q, and the last index j < k where p exceeds q,
    then move the smaller of the two discrepancies from j to k.
    """
    p, q = pad(as_spectrum(p, tol), as_spectrum(q, tol))
    if not majorises(p, q, tol):
        raise NotMajorised(f"p does not majorise q (prefix {majorisation_gap(p, q, tol)})")
    n = len(p)
    x = p.copy()
    d = np.eye(n)
    eps = 1e-14
    for _ in range(2 * n):
        short = np.nonzero(x < q - eps)[0]
        if short.size == 0:
            break
        k = int(short[0])
        over = np.nonzero(x[:k] > q[:k] + eps)[0]
        if over.size == 0:
            break
        j = int(over[-1])
        delta = min(x[j] - q[j], q[k] - x[k])
        t = t_transform(n, j, k, 1 - delta / (x[j] - x[k]))
        snap_j = x[j] - q[j] <= q[k] - x[k]
        x = t @ x
        if snap_j:
            x[j] = q[j]
        else:
            x[k] = q[k]
        d = t @ d
    return d


@dataclass(frozen=True)
class BirkhoffDecomposition:
    """``sum(w * P(perm))`` with ``P(perm)[perm[j], j] = 1``."""

    weights: np.ndarray
    permutations: list

    def __iter__(self):
        return iter(zip(self.weights, self.permutations))

    def __len__(self):
        return len(self.permutations)

    def reconstruct(self) -> np.ndarray:
        n = len(self.permutations[0])
        out = np.zeros((n, n))
        for w, perm in self:
            out[perm, np.arange(n)] += w
        return out


def permutation_matrix(perm) -> np.ndarray:
    """Matrix sending basis vector j to basis vector ``perm[j]``."""
    perm = np.asarray(perm)
    out = np.zeros((len(perm), len(perm)))
    out[perm, np.arange(len(perm))] = 1
    return out


def birkhoff_decompose(d_matrix, tol: Tolerance = DEFAULT_TOL) -> BirkhoffDecomposition:
    """Greedy Birkhoff peeling followed by a Caratheodory reduction.

    Each step finds a maximum-weight perfect matching on the positive support,
    subtracts the largest feasible multiple of that permutation, and repeats.
    The term list is then pruned to at most ``(n - 1)**2 + 1`` entries.
    """
    m = np.asarray(d_matrix, dtype=float)
    if not is_doubly_stochastic(m, tol):
        raise NotDoublyStochastic("matrix is not doubly stochastic")
    n = m.shape[0]
    residual = np.clip(m, 0.0, None)
    weights, perms = [], []
    cutoff = tol.eq_tol * 1e-2
    for _ in range(n * n + 1):
        if residual.sum() <= cutoff * n:
            break
        cost = np.where(residual > cutoff, -residual, n * n + 1.0)
        rows, cols = linear_sum_assignment(cost)
        if np.any(residual[rows, cols] <= cutoff):
            break
        w = residual[rows, cols].min()
        perm = np.empty(n, dtype=int)
        perm[cols] = rows  # column j maps to row perm[j]
        weights.append(w)
        perms.append(perm)
        residual[rows, cols] -= w
    weights = np.array(weights)
    weights = weights / weights.sum()
    weights, perms = _caratheodory(weights, perms, (n - 1) ** 2 + 1)
    return BirkhoffDecomposition(weights, perms)


def _caratheodory(weights, perms, limit):
    """Drop terms via affine dependencies until at most ``limit`` remain."""
    weights = np.array(weights, dtype=float)
    perms = list(perms)
    while len(perms) > limit:
        cols = [np.append(permutation_matrix(p).ravel(), 1.0) for p in perms]
        ns = null_space(np.array(cols).T)
        if ns.shape[1] == 0:
            break
        c = ns[:, 0]
        if not np.any(c > 1e-12):
            c = -c
        pos = c > 1e-12
        ratio = np.full(len(c), np.inf)
        ratio[pos] = weights[pos] / c[pos]
        i = int(np.argmin(ratio))
        weights = weights - ratio[i] * c
        weights[i] = 0.0
        keep = weights > 1e-15
        weights = np.clip(weights[keep], 0, None)
        weights /= weights.sum()
        perms = [p for p, k in zip(perms, keep) if k]
    return weights, perms


# ---------------------------------------------------------------------------
# monotones


def shannon_monotone(p) -> float:
    """Negative Shannon entropy (natural log)."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(np.sum(nz * np.log(nz)))


def renyi_monotone(p, alpha) -> float:
    """Negative Renyi entropy of order ``alpha``; ``alpha=np.inf`` gives ``log max p``."""
    if alpha == np.inf:
        return float(np.log(np.max(p)))
    if alpha <= 0 or alpha == 1:
        raise InvalidAlpha("alpha must be positive and != 1 (use shannon_monotone for alpha=1)")
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-np.log(np.sum(nz ** alpha)) / (1 - alpha))


def random_majorised_pair(d: int, rng: np.random.Generator, steps: int | None = None):
    """Random descending ``p`` and a ``q`` obtained from it by random T-transforms."""
    p = np.sort(rng.dirichlet(np.full(d, rng.choice([0.3, 1.0, 3.0]))))[::-1]
    q = p.copy()
    for _ in range(steps if steps is not None else int(rng.integers(1, 2 * d + 1))):
        j, k = rng.choice(d, size=2, replace=False)
        q = t_transform(d, j, k, rng.uniform()) @ q
    return p, np.sort(q)[::-1]


def schur_convexity_probe(monotone, d: int, trials: int, seed=0, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Sample majorisation-ordered pairs and check ``monotone(p) >= monotone(q)``."""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        p, q = random_majorised_pair(d, rng)
        if monotone(p) < monotone(q) - tol.eq_tol:
            return False
    return True
