"""Centered cardinal B-spline shape functions.

The degree-p kernel B_p is supported on [-(p+1)/2, (p+1)/2], integrates to
one and satisfies the partition of unity sum_m B_p(u - m) = 1.  Both the
kernel and its antiderivative are represented as polynomial pieces on the
p+1 unit knot intervals so that the particle coupling can evaluate line
integrals exactly (no quadrature anywhere in the particle-grid transfer).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_DEGREE = 4


def _bspline_pieces(p: int):
    """Polynomial pieces of B_p in the local variable s = u - t_j on the
    knot intervals [t_j, t_j+1], t_j = j - (p+1)/2, as Fraction coeffs."""
    pieces = [[Fraction(1)]]  # B_0: indicator of one unit interval
    for _ in range(p):
        # B_{q+1}(u) = int_{u-1/2}^{u+1/2} B_q; build cumulative integral
        q = len(pieces[0]) - 1
        anti = []  # antiderivative pieces with accumulated constants
        acc = Fraction(0)
        for c in pieces:
            a = [acc] + [c[m] / (m + 1) for m in range(q + 1)]
            anti.append(a)
            acc = sum(a[m] for m in range(len(a)))  # value at s = 1
        # A(u) with A evaluated pieceswise; new piece j on local s in [0,1]:
        # B_{q+1}(t_j + s) = A(t_j + s + 1/2) - A(t_j + s - 1/2)
        # where t_j + 1/2 lands mid-knot of the old grid shifted by one piece
        def A_shift(j, shift):
            # polynomial in s of A evaluated at old piece index j+shift
            idx = j + shift
            if idx < 0:
                return [Fraction(0)]
            if idx >= len(anti):
                return [Fraction(1)]
            return anti[idx]

        new = []
        for j in range(len(pieces) + 1):
            hi = A_shift(j, 0)
            lo = A_shift(j, -1)
            n = max(len(hi), len(lo))
            hi = hi + [Fraction(0)] * (n - len(hi))
            lo = lo + [Fraction(0)] * (n - len(lo))
            new.append([hi[m] - lo[m] for m in range(n)])
        pieces = new
    return pieces


@lru_cache(maxsize=None)
def spline_tables(p: int) -> tuple[np.ndarray, np.ndarray]:
    """(value, antiderivative) coefficient tables for B_p.

    ``bc`` has shape (p+1, p+1): piece j evaluated at local s in [0, 1) is
    sum_m bc[j, m] s**m with u = j - (p+1)/2 + s.  ``ac`` has shape
    (p+1, p+3): ac[j, 0] is the accumulated antiderivative at the left
    knot and ac[j, 1:] the integrated piece coefficients, so the full
    antiderivative runs from 0 to 1 across the support.
    """
    if not 0 <= p <= MAX_DEGREE:
        raise ValueError(f"spline degree must be in 0..{MAX_DEGREE}, got {p}")
    pieces = _bspline_pieces(p)
    bc = np.zeros((p + 1, p + 1))
    ac = np.zeros((p + 1, p + 3))
    acc = Fraction(0)
    for j, c in enumerate(pieces):
        for m, cm in enumerate(c):
            bc[j, m] = float(cm)
            ac[j, m + 1] = float(cm / (m + 1))
        ac[j, 0] = float(acc)
        acc += sum(cm / (m + 1) for m, cm in enumerate(c))
    assert abs(float(acc) - 1.0) < 1e-14
    return bc, ac


def spline_value(p: int, u) -> np.ndarray:
    """Vectorized B_p(u) (reference path; the hot loops live in coupling)."""
    bc, _ = spline_tables(p)
    u = np.asarray(u, dtype=float)
    t = u + (p + 1) / 2.0
    # left-open piece convention: piece j covers (j, j+1], matching the
    # particle kernels at exactly knot-aligned evaluation points
    j = np.clip(np.ceil(t).astype(int) - 1, 0, p)
    s = t - j
    inside = (t > 0) & (t <= p + 1)
    val = np.zeros_like(u)
    for m in range(p, -1, -1):
        val = val * s + bc[j, m]
    return np.where(inside, val, 0.0)


def spline_antiderivative(p: int, u) -> np.ndarray:
    """Vectorized A_p(u) = int_{-inf}^u B_p, clamped to [0, 1] outside."""
    _, ac = spline_tables(p)
    u = np.asarray(u, dtype=float)
    t = u + (p + 1) / 2.0
    j = np.clip(np.ceil(t).astype(int) - 1, 0, p)
    s = t - j
    val = np.zeros_like(u)
    for m in range(p + 2, 0, -1):
        val = val * s + ac[j, m]
    val = val * s + ac[j, 0]
    return np.clip(np.where(t < 0, 0.0, np.where(t > p + 1, 1.0, val)), 0.0, 1.0)
