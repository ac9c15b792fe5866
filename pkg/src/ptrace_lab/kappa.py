"""The template constant kappa(c) for partial-trace norm inequalities.

kappa(c) is the supremum of the dual gauge of the clipped sums
(sum_i lambda^(i)_{j_i} - c)_+ over vectors lambda^(i) in the dual-gauge
unit ball, with only the r largest grid entries kept. Ky Fan norms admit
closed forms; Schatten norms a two-value parametrization for c < 1; a
projected multi-start ascent provides lower bounds everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import product

import numpy as np

from .inequalities import NormSpec, dual_gauge, kyfan_tilde


@dataclass(frozen=True)
class KappaQuery:
    spec: NormSpec
    c: float
    n: int
    dims: tuple[int, ...]
    r: int

    def __post_init__(self) -> None:
        if self.c < 0.0:
            raise ValueError("c must be non-negative")
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != self.n or any(d < 1 for d in dims):
            raise ValueError(f"expected {self.n} positive dimensions, got {self.dims}")
        object.__setattr__(self, "dims", dims)
        total = int(np.prod(dims))
        if not 1 <= int(self.r) <= total:
            raise ValueError(f"rank cap {self.r} outside [1, {total}]")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "c", float(self.c))

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))


@dataclass(frozen=True)
class LambdaProfile:
    """Clipped, sorted grid values and the vectors that generated them."""

    values: np.ndarray
    generator: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class KappaEstimate:
    """Brute-force outcome: a certified lower bound plus start diagnostics."""

    value: float
    spread: float
    starts: int


@dataclass
class KappaResult:
    value: float
    branch: str
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "branch": self.branch,
            "bound": "lower" if self.branch == "brute-force" else "exact",
            "diagnostics": self.diagnostics,
        }


def build_lambda(lams, c: float, r: int) -> LambdaProfile:
    """All clipped sums over the multi-index grid, sorted, truncated to r."""
    arrays = []
    for lam in lams:
        a = np.asarray(lam, dtype=float).reshape(-1)
        if a.size and a.min() < 0.0:
            raise ValueError("profile components must be non-negative")
        arrays.append(a)
    grid = reduce(np.add.outer, arrays).reshape(-1)
    values = np.clip(grid - c, 0.0, None)
    values = np.sort(values)[::-1][: int(r)]
    return LambdaProfile(values=values, generator=tuple(arrays))


def _corner(d: int, ones: int) -> np.ndarray:
    v = np.zeros(d)
    v[:ones] = 1.0
    return v


def kappa_kyfan(q: KappaQuery) -> float:
    """Closed forms for the Ky Fan constant; unequal dims fall back to the
    brute-force lower bound."""
    if q.spec.kind != "kyfan":
        raise ValueError("kappa_kyfan needs a kyfan norm spec")
    if len(set(q.dims)) != 1:
        return kappa_bruteforce(q, budget=32).value
    k = q.spec.k
    d = q.dims[0]
    if q.r <= k:
        return max(q.n - q.c, 0.0)
    if q.c == 1.0 and q.r == q.total_dim:
        return float(kyfan_tilde(q.n, d, k))
    # evaluate on the canonical corner optimizers, best over ones-counts
    best = 0.0
    top = min(d, k)
    for counts in product(range(1, top + 1), repeat=q.n):
        lams = [_corner(d, j) for j in counts]
        profile = build_lambda(lams, q.c, q.r)
        best = max(best, dual_gauge(profile.values, q.spec))
    return best


# ---------------------------------------------------------------------------
# Schatten: two-value (plus zero level) parametrization for c < 1


def _level_structures(d: int) -> list[tuple[int, int]]:
    # (count at alpha, count at beta); the remainder sits at zero
    return [(m1, m2) for m1 in range(1, d + 1) for m2 in range(0, d - m1 + 1)]


def _levels(alpha: float, counts: tuple[int, int], d: int, q: float):
    m1, m2 = counts
    levels = [(alpha, m1)]
    if m2:
        mass = 1.0 - m1 * alpha**q
        if mass < 0.0:
            mass = 0.0
        levels.append(((mass / m2) ** (1.0 / q), m2))
    rest = d - m1 - m2
    if rest:
        levels.append((0.0, rest))
    return levels

def _pair_objective(
    la: float,
    lb: float,
    counts_a: tuple[int, int],
    counts_b: tuple[int, int],
    da: int,
    db: int,
    q: float,
    c: float,
    r: int,
) -> float:
    levels_a = _levels(la, counts_a, da, q)
    levels_b = _levels(lb, counts_b, db, q)
    cells = []
    for va, na in levels_a:
        for vb, nb in levels_b:
            v = va + vb - c
            if v > 0.0:
                cells.append((v, na * nb))
    cells.sort(reverse=True)
    total = 0.0
    slots = r
    for v, count in cells:
        take = min(count, slots)
        total += take * v**q
        slots -= take
        if slots == 0:
            break
    return total ** (1.0 / q)


def _alpha_domain(counts: tuple[int, int], q: float) -> tuple[float, float]:
    m1, m2 = counts
    hi = (1.0 / m1) ** (1.0 / q)
    lo = (1.0 / (m1 + m2)) ** (1.0 / q) if m2 else hi
    return lo, hi


def _golden_max(f, lo: float, hi: float, iters: int = 80) -> tuple[float, float]:
    if hi <= lo:
        return lo, f(lo)
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - phi * (b - a)
    x2 = a + phi * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if b - a < 1e-10:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - phi * (b - a)
            f1 = f(x1)
    x = x1 if f1 >= f2 else x2
    return x, max(f1, f2)


def kappa_schatten(q: KappaQuery) -> float:
    """Closed forms for c >= 1 (and all of p = 1); the parametrized optimum
    for c in [0, 1). More than two factors routes to brute force."""
    if q.spec.kind != "schatten":
        raise ValueError("kappa_schatten needs a schatten norm spec")
    if q.n != 2:
        return kappa_bruteforce(q, budget=64).value
    c = q.c
    p = q.spec.p
    if p == 1.0:
        return max(2.0 - c, 0.0)
    if c >= 2.0:
        return 0.0
    if c >= 1.0:
        return 2.0 - c
    qd = q.spec.dual_exponent  # finite since p > 1
    da, db = q.dims
    best = 0.0
    for counts_a in _level_structures(da):
        for counts_b in _level_structures(db):
            lo_a, hi_a = _alpha_domain(counts_a, qd)
            lo_b, hi_b = _alpha_domain(counts_b, qd)
            grid_a = np.geomspace(max(lo_a, 1e-6), hi_a, 24) if hi_a > lo_a else [hi_a]
            grid_b = np.geomspace(max(lo_b, 1e-6), hi_b, 24) if hi_b > lo_b else [hi_b]

            def f(la, lb):
                return _pair_objective(
                    la, lb, counts_a, counts_b, da, db, qd, c, q.r
                )

            cell = max(
                ((f(la, lb), la, lb) for la in grid_a for lb in grid_b),
                key=lambda t: t[0],
            )
            val, la, lb = cell
            for _ in range(4):
                la, _v = _golden_max(lambda x: f(x, lb), lo_a, hi_a)
                lb, val_new = _golden_max(lambda x: f(la, x), lo_b, hi_b)
                if val_new <= val + 1e-12:
                    val = max(val, val_new)
                    break
                val = val_new
            best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# brute force: projected multi-start ascent


def _project(x: np.ndarray, spec: NormSpec) -> np.ndarray:
    x = np.clip(x, 0.0, None)
    if spec.kind == "kyfan":
        x = np.clip(x, 0.0, 1.0)
        s = x.sum()
        if s > spec.k:
            x = x * (spec.k / s)
        return x
    g = dual_gauge(x, spec)
    if g > 1.0:
        x = x / g
    return x


def _split(flat: np.ndarray, dims: tuple[int, ...]) -> list[np.ndarray]:
    out = []
    at = 0
    for d in dims:
        out.append(flat[at : at + d])
        at += d
    return out


def kappa_bruteforce(q: KappaQuery, budget: int, seed: int = 0) -> KappaEstimate:
    """Multi-start projected ascent on the variational form; the best value
    is a lower bound on kappa, never a certificate of optimality."""
    if q.total_dim > 256:
        raise ValueError("brute force is capped at total dimension 256")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    spec = q.spec
    dims = q.dims

    def objective(flat: np.ndarray) -> float:
        lams = [_project(x, spec) for x in _split(flat, dims)]
        return dual_gauge(build_lambda(lams, q.c, q.r).values, spec)

    starts: list[np.ndarray] = []
    if spec.kind == "kyfan":
        tops = [min(d, spec.k) for d in dims]
        combos = list(product(*[range(1, t + 1) for t in tops]))
        if len(combos) > 64:
            combos = [tuple(tops)]
        for combo in combos:
            starts.append(
                np.concatenate([_corner(d, j) for d, j in zip(dims, combo)])
            )
    else:
        starts.append(np.concatenate([_corner(d, 1) for d in dims]))
        qd = spec.dual_exponent
        if math.isfinite(qd):
            starts.append(
                np.concatenate([np.full(d, (1.0 / d) ** (1.0 / qd)) for d in dims])
            )
        else:
            starts.append(np.concatenate([np.ones(d) for d in dims]))
    rng = np.random.default_rng([seed, q.total_dim])
    for _ in range(budget):
        starts.append(rng.random(sum(dims)))

    results = []
    for x0 in starts:
        x = np.concatenate(
            [_project(part, spec) for part in _split(np.asarray(x0, float), dims)]
        )
        val = objective(x)
        step = 0.1
        stale = 0
        for _ in range(150):
            grad = np.zeros_like(x)
            h = 1e-7
            for i in range(x.size):
                bumped = x.copy()
                bumped[i] += h
                grad[i] = (objective(bumped) - val) / h
            gn = float(np.linalg.norm(grad))
            if gn < 1e-12:
                break
            cand = np.concatenate(
                [
                    _project(part, spec)
                    for part in _split(x + step * grad / gn, dims)
                ]
            )
            cand_val = objective(cand)
            if cand_val > val + 1e-14:
                x, val = cand, cand_val
                step = min(step * 1.5, 1.0)
                stale = 0
            else:
                step *= 0.5
                stale += 1
                if stale > 12:
                    break
        results.append(val)
    best = float(max(results))
    return KappaEstimate(
        value=best, spread=best - float(min(results)), starts=len(starts)
    )


def kappa_value(q: KappaQuery, budget: int = 32, seed: int = 0) -> KappaResult:
    """Route a query to the closed form, the parametrized optimizer, or the
    brute-force lower bound, and label which path produced the value."""
    if q.spec.kind == "kyfan":
        if len(set(q.dims)) != 1:
            est = kappa_bruteforce(q, budget=budget, seed=seed)
            return KappaResult(
                est.value,
                "brute-force",
                {"spread": est.spread, "starts": est.starts},
            )
        if q.r <= q.spec.k or (q.c == 1.0 and q.r == q.total_dim):
            return KappaResult(kappa_kyfan(q), "closed-form", {})
        return KappaResult(kappa_kyfan(q), "corner-eval", {})
    if q.n != 2:
        est = kappa_bruteforce(q, budget=budget, seed=seed)
        return KappaResult(
            est.value, "brute-force", {"spread": est.spread, "starts": est.starts}
        )
    if q.spec.p == 1.0 or q.c >= 1.0:
        return KappaResult(kappa_schatten(q), "closed-form", {})
    return KappaResult(kappa_schatten(q), "parametrized", {})
