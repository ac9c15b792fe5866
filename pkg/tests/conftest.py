"""Shared oracles for the test suite.

Everything here recomputes quantities by a route independent of the code
under test: characteristic polynomials instead of svd, explicit index loops
instead of reshape tricks, projector algebra instead of library spectra.
"""

import numpy as np

from ptrace_lab import JordanSpec


def charpoly_singular_values(m) -> np.ndarray:
    """Singular values via the characteristic polynomial of m* m.

    Faddeev-LeVerrier recursion for the coefficients, companion-matrix roots;
    shares no code path with numpy's svd. Accurate to ~1e-7 relative on the
    small well-scaled matrices used in tests.
    """
    a = np.asarray(m, dtype=complex)
    h = a.conj().T @ a
    n = h.shape[0]
    coeffs = [1.0 + 0.0j]
    mk = np.zeros_like(h)
    for k in range(1, n + 1):
        mk = h @ (mk + coeffs[-1] * np.eye(n))
        coeffs.append(-np.trace(mk) / k)
    roots = np.roots(np.array(coeffs))
    vals = np.clip(roots.real, 0.0, None)
    return np.sort(np.sqrt(vals))[::-1]


def loop_partial_traces(m, d_a: int, d_b: int):
    """Both partial traces of a bipartite matrix by explicit index loops."""
    a = np.zeros((d_a, d_a), dtype=complex)
    b = np.zeros((d_b, d_b), dtype=complex)
    for i in range(d_a):
        for j in range(d_a):
            for k in range(d_b):
                a[i, j] += m[i * d_b + k, j * d_b + k]
    for k in range(d_b):
        for l in range(d_b):
            for i in range(d_a):
                b[k, l] += m[i * d_b + k, i * d_b + l]
    return a, b


def loop_flip(d: int) -> np.ndarray:
    """Swap operator on d (x) d built entry by entry."""
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def werner_oracle(d: int, alpha: float):
    """Spectral form of the Werner state: weights on the symmetric and
    antisymmetric projectors, plus the projectors themselves."""
    f = loop_flip(d)
    eye = np.eye(d * d)
    p_sym = (eye + f) / 2.0
    p_anti = (eye - f) / 2.0
    denom = d * d + alpha * d
    return (1.0 + alpha) / denom, (1.0 - alpha) / denom, p_sym, p_anti


def _mild_basis(seed: int, d: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    return np.eye(d) + 0.3 * g


def jordan_battery():
    """Twenty canonical pairs admitting a joint rank-one dilation.

    Covers matching nonzero blocks, zero blocks shifted by one in every
    direction, pure nilpotents, and mild random similarities on either or
    both sides.
    """
    z = 0j
    cases = [
        # identical 1x1
        (((1.0 + z, 1),), ((1.0 + z, 1),), None, None),
        # same nonzero block, zero block grows
        (((1.0 + z, 2), (z, 1)), ((1.0 + z, 2), (z, 2)), None, None),
        # pure nilpotent, size drops by one
        (((z, 3),), ((z, 2),), None, None),
        # split nilpotent against a single chain
        (((z, 2), (z, 1)), ((z, 3),), None, None),
        # complex eigenvalue, trivial
        (((2.0 + 1.0j, 1),), ((2.0 + 1.0j, 1),), None, None),
        # complex block, zero pair (1,1) -> (2,)
        (((1.0 + 2.0j, 2), (z, 1), (z, 1)), ((1.0 + 2.0j, 2), (z, 2)), None, None),
        # pure nonzero chain, no zeros at all
        (((-1.0 + z, 3),), ((-1.0 + z, 3),), None, None),
        # diagonalizable, three distinct eigenvalues
        (
            ((1.0 + z, 1), (2.0 + z, 1), (3.0 + z, 1)),
            ((1.0 + z, 1), (2.0 + z, 1), (3.0 + z, 1)),
            None,
            11,
        ),
        # zero block shrinks
        (((0.5 + z, 2), (z, 2)), ((0.5 + z, 2), (z, 1)), None, None),
        # long nilpotent, equal
        (((z, 4),), ((z, 4),), None, None),
        # long nilpotent, off by one
        (((z, 4),), ((z, 3),), None, None),
        # interlaced zero sizes (3,1) vs (2,2)
        (((z, 3), (z, 1)), ((z, 2), (z, 2)), None, None),
        # nonzero anchor plus redistributed zeros
        (((1.0 + z, 1), (z, 3)), ((1.0 + z, 1), (z, 2), (z, 1)), None, None),
        # basis on the left target only
        (((1.5 + z, 2), (z, 1)), ((1.5 + z, 2), (z, 2)), 21, None),
        # basis on the right target only
        (((z, 2), (z, 1)), ((z, 2), (z, 2)), None, 22),
        # bases on both sides
        (((2.0 - 1.0j, 2), (z, 2)), ((2.0 - 1.0j, 2), (z, 1)), 23, 24),
        # imaginary eigenvalue with bases
        (((1.0j, 2),), ((1.0j, 2),), 25, 26),
        # extra trailing zero block appears
        (((3.0 + z, 1), (z, 1)), ((3.0 + z, 1), (z, 1), (z, 1)), None, None),
        # two zero chains both shifted down
        (((2.0 + z, 2), (z, 2), (z, 1)), ((2.0 + z, 2), (z, 1), (z, 1)), None, None),
        # mixed complex anchor, zero chain grows
        (((1.0 - 1.0j, 1), (z, 2)), ((1.0 - 1.0j, 1), (z, 3)), 27, None),
    ]
    out = []
    for blocks_a, blocks_b, seed_a, seed_b in cases:
        dim_a = sum(s for _, s in blocks_a)
        dim_b = sum(s for _, s in blocks_b)
        basis_a = _mild_basis(seed_a, dim_a) if seed_a is not None else None
        basis_b = _mild_basis(seed_b, dim_b) if seed_b is not None else None
        out.append(
            (
                JordanSpec(blocks=blocks_a, basis=basis_a),
                JordanSpec(blocks=blocks_b, basis=basis_b),
            )
        )
    return out
