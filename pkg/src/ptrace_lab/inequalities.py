"""Norm inequalities between a composite matrix and its partial traces.

Schatten and Ky Fan norms, their dual symmetric gauges, weak submajorization,
and one checker per inequality. Checkers never decide mathematics: they
evaluate both sides and report the slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Tolerance, as_matrix, default_tolerance, rank_tol, singular_values
from .reports import InequalityReport
from .tensor import TensorSpace, embed_factor, kronecker_sum, partial_trace

MAJORIZATION_TOL = 1e-10


@dataclass(frozen=True)
class NormSpec:
    """A unitarily invariant norm: schatten(p) or kyfan(k)."""

    kind: str
    p: float | None = None
    k: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "schatten":
            if self.p is None or not (self.p >= 1.0):
                raise ValueError("schatten exponent must satisfy p >= 1")
            object.__setattr__(self, "p", float(self.p))
            if self.k is not None:
                raise ValueError("schatten spec does not take k")
        elif self.kind == "kyfan":
            if self.k is None or int(self.k) < 1:
                raise ValueError("kyfan order must be a positive integer")
            object.__setattr__(self, "k", int(self.k))
            if self.p is not None:
                raise ValueError("kyfan spec does not take p")
        else:
            raise ValueError(f"unknown norm kind {self.kind!r}")

    @classmethod
    def schatten(cls, p: float) -> "NormSpec":
        return cls(kind="schatten", p=float(p))

    @classmethod
    def kyfan(cls, k: int) -> "NormSpec":
        return cls(kind="kyfan", k=int(k))

    @property
    def dual_exponent(self) -> float:
        """q with 1/p + 1/q = 1; only meaningful for schatten."""
        if self.kind != "schatten":
            raise ValueError("dual exponent is a schatten notion")
        if self.p == 1.0:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    @property
    def label(self) -> str:
        if self.kind == "schatten":
            p = self.p
            text = "inf" if math.isinf(p) else (f"{p:g}")
            return f"schatten-{text}"
        return f"kyfan-{self.k}"


def norm(m, spec: NormSpec) -> float:
    """Schatten p or Ky Fan k norm of m."""
    s = singular_values(as_matrix(m))
    if s.size == 0:
        return 0.0
    if spec.kind == "kyfan":
        return float(np.sum(s[: spec.k]))
    p = spec.p
    if math.isinf(p):
        return float(s[0])
    if p == 1.0:
        return float(np.sum(s))
    return float(np.sum(s**p) ** (1.0 / p))


def dual_gauge(x, spec: NormSpec) -> float:
    """The dual symmetric gauge applied to a non-negative vector.

    schatten(p) -> l_q with 1/p + 1/q = 1; kyfan(k) -> max of the sup norm
    and the scaled sum.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size and float(x.min()) < 0.0:
        raise ValueError("gauge arguments must be non-negative")
    if x.size == 0:
        return 0.0
    if spec.kind == "kyfan":
        return float(max(x.max(), x.sum() / spec.k))
    q = spec.dual_exponent
    if math.isinf(q):
        return float(x.max())
    if q == 1.0:
        return float(x.sum())
    return float(np.sum(x**q) ** (1.0 / q))


def _padded_cumsums(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.sort(np.asarray(x, dtype=float).reshape(-1))[::-1]
    y = np.sort(np.asarray(y, dtype=float).reshape(-1))[::-1]
    width = max(x.size, y.size)
    x = np.pad(x, (0, width - x.size))
    y = np.pad(y, (0, width - y.size))
    return np.cumsum(x), np.cumsum(y)


def majorization_gap(x, y) -> float:
    """Largest partial-sum excess of x over y (positive = violation)."""
    cx, cy = _padded_cumsums(x, y)
    if cx.size == 0:
        return 0.0
    return float(np.max(cx - cy))


def weak_submajorize(x, y) -> bool:
    """Partial sums of sorted x all below those of sorted y, within 1e-10."""
    return majorization_gap(x, y) <= MAJORIZATION_TOL


def _matrix_abs(c: np.ndarray) -> np.ndarray:
    # |c| = (c* c)^{1/2} via the polar factor of the SVD
    _, s, vh = np.linalg.svd(c)
    return vh.conj().T @ (s[:, None] * vh)


def _traced_onto(m: np.ndarray, space: TensorSpace, i: int) -> np.ndarray:
    others = tuple(j for j in range(1, space.n_factors + 1) if j != i)
    return partial_trace(m, space, out=others)


def kyfan_tilde(n: int, d: int, k: int) -> int:
    """The Ky Fan template constant at c = 1 for n equal factors of size d."""
    if k <= d:
        return n * d ** (n - 1) - (d**n - (d - k) ** n) // k
    return (n - 1) * k ** (n - 1)


def _pow(base: float, expo: float) -> float:
    # log-domain guard: norms can exceed 1 while expo grows
    if base <= 0.0:
        return 0.0
    return math.exp(expo * math.log(base))


def check_kron_majorization(
    cs, space: TensorSpace, tol: Tolerance | None = None
) -> InequalityReport:
    """Singular values of the embedded sum against those of the embedded
    absolute values: weak submajorization must hold."""
    if len(cs) != space.n_factors:
        raise ValueError(
            f"expected {space.n_factors} summands, got {len(cs)}"
        )
    cs = [as_matrix(c, square=True) for c in cs]
    lhs_vec = singular_values(kronecker_sum(cs, space))
    rhs_sum = sum(
        embed_factor(_matrix_abs(c), space, i + 1) for i, c in enumerate(cs)
    )
    rhs_vec = singular_values(rhs_sum)
    gap = majorization_gap(lhs_vec, rhs_vec)
    return InequalityReport.from_bound(
        name="kron-majorization",
        lhs=gap,
        rhs=0.0,
        tolerance=MAJORIZATION_TOL,
        constants={"n": space.n_factors},
    )


def check_individual_bound(
    m, space: TensorSpace, spec: NormSpec, tol: Tolerance | None = None
) -> tuple[InequalityReport, InequalityReport]:
    """Per-factor bound |||M_i||| <= nu * |||M||| on a bipartite space."""
    tol = tol or default_tolerance()
    if space.n_factors != 2:
        raise ValueError("the individual bound is stated for bipartite spaces")
    a = space.check_matrix(m)
    r = rank_tol(a, tol)
    if spec.kind == "schatten":
        nu = _pow(float(r), 1.0 - (0.0 if math.isinf(spec.p) else 1.0 / spec.p))
    else:
        nu = max(1.0, r / spec.k)
    whole = norm(a, spec)
    reports = []
    for i in (1, 2):
        part = _traced_onto(a, space, i)
        reports.append(
            InequalityReport.from_bound(
                name=f"individual-{spec.label}-factor{i}",
                lhs=norm(part, spec),
                rhs=nu * whole,
                constants={"nu": nu, "r": r, "factor": i},
            )
        )
    return reports[0], reports[1]


def check_template(
    m,
    space: TensorSpace,
    spec: NormSpec,
    c: float,
    kappa: float,
    tol: Tolerance | None = None,
) -> InequalityReport:
    """Sum of partial-trace norms against c * trace norm + kappa * |||M|||."""
    if c < 0.0:
        raise ValueError("the template weight c must be non-negative")
    a = space.check_matrix(m)
    lhs = sum(norm(_traced_onto(a, space, i), spec) for i in range(1, space.n_factors + 1))
    rhs = c * norm(a, NormSpec.schatten(1)) + kappa * norm(a, spec)
    return InequalityReport.from_bound(
        name=f"template-{spec.label}",
        lhs=lhs,
        rhs=rhs,
        constants={"c": c, "kappa": kappa, "n": space.n_factors},
    )


def check_kyfan_family(
    m,
    space: TensorSpace,
    k: int,
    variant: str = "general",
    c: float = 1.0,
    tol: Tolerance | None = None,
) -> InequalityReport:
    """The Ky Fan instances of the template, with their closed constants."""
    tol = tol or default_tolerance()
    dims = set(space.dims)
    if len(dims) != 1:
        raise ValueError("the Ky Fan family is stated for equal local dimensions")
    d = space.dims[0]
    n = space.n_factors
    spec = NormSpec.kyfan(k)
    a = space.check_matrix(m)
    lhs = sum(norm(_traced_onto(a, space, i), spec) for i in range(1, n + 1))
    trace_norm = norm(a, NormSpec.schatten(1))
    kyfan_norm = norm(a, spec)
    if variant == "general":
        kt = kyfan_tilde(n, d, k)
        rhs = trace_norm + kt * kyfan_norm
        constants = {"kappa_tilde": kt, "k": k, "n": n, "d": d}
    elif variant == "n2":
        if n != 2:
            raise ValueError("the n2 variant needs exactly two factors")
        rhs = trace_norm + k * kyfan_norm
        constants = {"kappa_tilde": k, "k": k, "n": n, "d": d}
    elif variant == "lowrank":
        r = rank_tol(a, tol)
        if r > k:
            raise ValueError(
                f"the low-rank variant needs rank <= k, got rank {r} > k = {k}"
            )
        rhs = c * trace_norm + max(n - c, 0.0) * kyfan_norm
        constants = {"c": c, "k": k, "n": n, "d": d, "r": r}
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return InequalityReport.from_bound(
        name=f"kyfan-family-{variant}", lhs=lhs, rhs=rhs, constants=constants
    )


def check_audenaert_family(
    m, space: TensorSpace, p: float, gamma: float = 1.0, tol: Tolerance | None = None
) -> tuple[InequalityReport, InequalityReport]:
    """Two reports: the plain sum bound with (n-1) trace norms, and the
    rank-weighted power bound with exponent gamma."""
    if gamma < 1.0:
        raise ValueError("the power variant needs gamma >= 1")
    tol = tol or default_tolerance()
    spec = NormSpec.schatten(p)
    a = space.check_matrix(m)
    n = space.n_factors
    parts = [norm(_traced_onto(a, space, i), spec) for i in range(1, n + 1)]
    whole = norm(a, spec)
    trace_norm = norm(a, NormSpec.schatten(1))
    plain = InequalityReport.from_bound(
        name="audenaert-sum",
        lhs=sum(parts),
        rhs=(n - 1) * trace_norm + whole,
        constants={"p": p, "n": n},
    )
    r = rank_tol(a, tol)
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    weight = 1.0 + _pow(float(r), gamma * (1.0 - inv_p)) * (n - 1)
    powered = InequalityReport.from_bound(
        name="audenaert-rank-power",
        lhs=sum(_pow(x, gamma) for x in parts),
        rhs=weight * _pow(whole, gamma),
        constants={"p": p, "gamma": gamma, "r": r, "n": n},
    )
    return plain, powered


def check_large_rank(
    m, space: TensorSpace, p: float, tol: Tolerance | None = None
) -> InequalityReport:
    """Rank-free bound with the dimension factor n * d^((n-1)(1-1/p))."""
    dims = set(space.dims)
    if len(dims) != 1:
        raise ValueError("the large-rank bound is stated for equal local dimensions")
    d = space.dims[0]
    n = space.n_factors
    spec = NormSpec.schatten(p)
    a = space.check_matrix(m)
    lhs = sum(norm(_traced_onto(a, space, i), spec) for i in range(1, n + 1))
    inv_p = 0.0 if math.isinf(p) else 1.0 / p
    factor = n * _pow(float(d), (n - 1) * (1.0 - inv_p))
    return InequalityReport.from_bound(
        name="large-rank",
        lhs=lhs,
        rhs=factor * norm(a, spec),
        constants={"p": p, "n": n, "d": d, "factor": factor},
    )


def check_rank_one_gamma(
    m, space: TensorSpace, gamma: float, tol: Tolerance | None = None
) -> InequalityReport:
    """For rank-one M: ||A||_2^g + ||B||_2^g <= ||M||_2^g + |tr M|^g, g >= 2."""
    if gamma < 2.0:
        raise ValueError("the rank-one bound needs gamma >= 2")
    tol = tol or default_tolerance()
    if space.n_factors != 2:
        raise ValueError("the rank-one bound is stated for bipartite spaces")
    a = space.check_matrix(m)
    r = rank_tol(a, tol)
    if r != 1:
        raise ValueError(f"the rank-one bound needs a rank-one input, got rank {r}")
    pa = np.linalg.norm(_traced_onto(a, space, 1))
    pb = np.linalg.norm(_traced_onto(a, space, 2))
    fro = np.linalg.norm(a)
    tr = abs(np.trace(a))
    return InequalityReport.from_bound(
        name="rank-one-power",
        lhs=_pow(float(pa), gamma) + _pow(float(pb), gamma),
        rhs=_pow(float(fro), gamma) + _pow(float(tr), gamma),
        constants={"gamma": gamma},
    )


def check_normal_rank_r(
    m, space: TensorSpace, tol: Tolerance | None = None
) -> InequalityReport:
    """For normal M of rank r: ||M_A||_2^2 + ||M_B||_2^2 <= r||M||_2^2 + |tr M|^2/r.

    Non-normal inputs are rejected: beyond normal matrices the statement is
    an open question, and a checker must not blur that line.
    """
    tol = tol or default_tolerance()
    if space.n_factors != 2:
        raise ValueError("this bound is stated for bipartite spaces")
    a = space.check_matrix(m)
    fro = float(np.linalg.norm(a))
    defect = float(np.linalg.norm(a @ a.conj().T - a.conj().T @ a))
    if defect > 1e-8 * (1.0 + fro * fro):
        raise ValueError(
            f"only normal inputs are accepted (normality defect {defect:.3e}); "
            "the non-normal case is not settled"
        )
    r = max(rank_tol(a, tol), 1)
    pa = float(np.linalg.norm(_traced_onto(a, space, 1)))
    pb = float(np.linalg.norm(_traced_onto(a, space, 2)))
    tr = abs(np.trace(a))
    return InequalityReport.from_bound(
        name="normal-rank-r",
        lhs=pa * pa + pb * pb,
        rhs=r * fro * fro + tr * tr / r,
        constants={"r": r},
    )
