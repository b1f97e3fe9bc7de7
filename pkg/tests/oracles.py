"""Independent exact-arithmetic oracles used by the test suite.

Everything in here is written directly from the definitions (2x2 minors,
wedge expansions, exhaustive search) without importing package internals,
so agreement with the package is meaningful evidence of correctness.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

# storage order of line coordinates: indices into (x, y, z, w)
MINOR_INDEX = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))


def exact_line(x, y):
    """Exact minors of the line through two rational homogeneous points."""
    return tuple(x[i] * y[j] - x[j] * y[i] for i, j in MINOR_INDEX)


def exact_product(a, b):
    """Exact Pluecker product in the storage order (rational arithmetic)."""
    return (
        a[0] * b[3] + a[1] * b[4] + a[2] * b[5]
        + a[3] * b[0] + a[4] * b[1] + a[5] * b[2]
    )


def exact_point_on_line(p, x, y):
    """Whether p lies on the line through x and y: all 3x3 minors vanish."""
    m = [list(x), list(y), list(p)]
    for cols in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        det = _det3([[row[c] for c in cols] for row in m])
        if det != 0:
            return False
    return True


def _det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def exact_det4(rows):
    """Exact 4x4 determinant by Laplace expansion along the first row."""
    total = 0
    for j in range(4):
        minor = [
            [rows[i][k] for k in range(4) if k != j] for i in range(1, 4)
        ]
        sign = -1 if j % 2 else 1
        total += sign * rows[0][j] * _det3(minor)
    return total


def rational_point(rng, span=6, denominator=5):
    """Random finite rational homogeneous point with w = 1."""
    num = rng.integers(-span * denominator, span * denominator + 1, size=3)
    return tuple(Fraction(int(n), denominator) for n in num) + (Fraction(1),)


def random_line(rng):
    """A random rational line given by two distinct sample points."""
    while True:
        x = rational_point(rng)
        y = rational_point(rng)
        if any(c != 0 for c in exact_line(x, y)):
            return x, y


def line_pair(rng, intersecting):
    """Two rational lines, sharing a point iff ``intersecting``.

    Skew pairs are drawn with a normalized product margin above 1e-6 so
    floating point classification has room to agree with the oracle.
    """
    while True:
        if intersecting:
            common = rational_point(rng)
            x1, y1 = common, rational_point(rng)
            x2, y2 = common, rational_point(rng)
        else:
            x1, y1 = random_line(rng)
            x2, y2 = random_line(rng)
        try:
            a = exact_line(x1, y1)
            b = exact_line(x2, y2)
        except ZeroDivisionError:  # pragma: no cover
            continue
        if not any(c != 0 for c in a) or not any(c != 0 for c in b):
            continue
        prod = exact_product(a, b)
        if intersecting:
            if prod != 0:  # pragma: no cover - construction guarantees 0
                continue
            # distinct lines only
            af = np.array([float(c) for c in a])
            bf = np.array([float(c) for c in b])
            cos = abs(af @ bf) / (np.linalg.norm(af) * np.linalg.norm(bf))
            if cos > 1.0 - 1e-6:
                continue
            return (x1, y1), (x2, y2), prod
        if prod == 0:
            continue
        af = np.array([float(c) for c in a])
        bf = np.array([float(c) for c in b])
        margin = abs(float(prod)) / (np.linalg.norm(af) * np.linalg.norm(bf))
        if margin > 1e-6:
            return (x1, y1), (x2, y2), prod


def float_line(pair):
    """Unnormalized float coordinate vector of a rational two-point line."""
    x, y = pair
    return np.array([float(c) for c in exact_line(x, y)])


def fit_plane_residual(points):
    """Max distance of points to their best-fit affine plane (SVD oracle)."""
    pts = np.asarray(points, dtype=float)
    center = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - center)
    normal = vt[-1]
    return float(np.max(np.abs((pts - center) @ normal)))


def _pairing(a, b):
    """Pluecker pairing of float 6-vectors (restated for independence)."""
    return float(a[:3] @ b[3:] + a[3:] @ b[:3])


def _into_polar(v, h):
    """Component of ``v`` lying in the polar hyperplane of the line ``h``."""
    w = np.concatenate([h[3:], h[:3]])
    return v - (_pairing(v, h) / _pairing(w, h)) * w


def random_projection_setup(rng):
    """Random admissible input for a line-space central projection.

    Returns ``(center, target, q, qprime)``: two unit line vectors whose
    normalized pairing is bounded away from zero, and a polar pair
    ``<q, qprime> = 0`` of unit vectors in the polar hyperplane of
    ``center``, neither proportional to ``center``.
    """
    while True:
        center = float_line(random_line(rng))
        center = center / np.linalg.norm(center)
        target = float_line(random_line(rng))
        target = target / np.linalg.norm(target)
        if abs(_pairing(center, target)) > 0.05:
            break
    while True:
        q = _into_polar(rng.standard_normal(6), center)
        if np.linalg.norm(q) > 0.1:
            q = q / np.linalg.norm(q)
            break
    while True:
        raw = _into_polar(rng.standard_normal(6), center)
        corrector = _into_polar(np.concatenate([q[3:], q[:3]]), center)
        denom = _pairing(corrector, q)
        if abs(denom) < 1e-3:
            continue
        qprime = raw - (_pairing(raw, q) / denom) * corrector
        if np.linalg.norm(qprime) > 1e-3:
            qprime = qprime / np.linalg.norm(qprime)
            break
    return center, target, q, qprime
