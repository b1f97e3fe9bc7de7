"""Generators for test meshes: grids, umbrellas, and random nets with
planar vertex stars.

The random generators build nets whose vertex stars are planar by
construction (each star is laid out inside an explicitly chosen plane),
so they satisfy the asymptotic-net conditions up to roundoff while
leaving plenty of randomness for genericity.  Callers that need strict
genericity (skew faces, non-meeting opposite edge lines) should keep
drawing with fresh seeds until validation passes; the generators
already reject the grossest degeneracies.
"""

from __future__ import annotations

import numpy as np


# --- combinatorics ----------------------------------------------------------


def grid_graph(nx: int, ny: int):
    """Quad grid with ``nx`` × ``ny`` faces.

    Vertices are indexed ``iy * (nx + 1) + ix``; faces ``iy * nx + ix``,
    each oriented counterclockwise in the (ix, iy) plane.
    """
    def v(ix, iy):
        return iy * (nx + 1) + ix

    quads = [
        (v(ix, iy), v(ix + 1, iy), v(ix + 1, iy + 1), v(ix, iy + 1))
        for iy in range(ny)
        for ix in range(nx)
    ]
    return (nx + 1) * (ny + 1), quads


def umbrella_graph(k: int):
    """``k`` quads around a central vertex of degree ``k``.

    Vertex 0 is the center, ``1 .. k`` the spokes, ``k+1 .. 2k`` the rim
    corners; quad ``i`` is (center, spoke_i, rim_i, spoke_{i+1}).
    """
    if k < 3:
        raise ValueError("an umbrella needs at least 3 quads")
    quads = [
        (0, 1 + i, 1 + k + i, 1 + (i + 1) % k)
        for i in range(k)
    ]
    return 2 * k + 1, quads


def moebius_quads():
    """Three quads glued into a Möbius band (no consistent orientation)."""
    return 6, [(0, 1, 4, 3), (1, 2, 5, 4), (2, 3, 0, 5)]


def cylinder_quads():
    """Three quads glued into an orientable ring (strips close up)."""
    return 6, [(0, 1, 4, 3), (1, 2, 5, 4), (2, 0, 3, 5)]


# --- exact nets on the quadric z = x y --------------------------------------


def quadric_grid(nx: int, ny: int, spacing: float = 1.0, origin=(0.0, 0.0)):
    """Grid net lying on the doubly ruled surface z = x y.

    Returns ``(vertex_count, quads, positions)``.  The coordinate lines
    x = const and y = const are straight lines of the surface, so every
    vertex star is planar (the tangent plane z = y0 x + x0 y − x0 y0).
    """
    vertex_count, quads = grid_graph(nx, ny)
    positions = np.empty((vertex_count, 3))
    for iy in range(ny + 1):
        for ix in range(nx + 1):
            x = origin[0] + ix * spacing
            y = origin[1] + iy * spacing
            positions[iy * (nx + 1) + ix] = (x, y, x * y)
    return vertex_count, quads, positions


# --- random nets with planar stars -------------------------------------------


def _unit(v):
    return np.asarray(v, dtype=float) / np.linalg.norm(v)


def _random_unit(rng):
    while True:
        v = rng.normal(size=3)
        n = np.linalg.norm(v)
        if n > 1e-3:
            return v / n


def _random_coeff(rng, lo=0.35, hi=1.3):
    return rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi)


def _skew_enough(p0, p1, p2, p3, floor=1e-3):
    e = np.array([p1 - p0, p2 - p0, p3 - p0])
    scale = np.mean([np.linalg.norm(d) for d in (
        p1 - p0, p2 - p1, p3 - p2, p0 - p3)])
    return abs(np.linalg.det(e)) > floor * scale**3


def random_grid3x3_net(rng, max_tries: int = 200):
    """Random net on a 2×2 block of faces with planar vertex stars.

    Returns ``(vertex_count, quads, positions)`` for ``grid_graph(2, 2)``.
    The center star is placed in a random plane; each boundary-mid star
    gets its own random plane through the mid–center line; the corners
    land on the intersection lines of adjacent mid planes.
    """
    vertex_count, quads = grid_graph(2, 2)
    mids = {(0, 1): None, (1, 0): None, (1, 2): None, (2, 1): None}
    corners = {
        (0, 0): ((0, 1), (1, 0)),
        (2, 0): ((1, 0), (2, 1)),
        (0, 2): ((0, 1), (1, 2)),
        (2, 2): ((2, 1), (1, 2)),
    }

    def vid(ix, iy):
        return iy * 3 + ix

    for _ in range(max_tries):
        positions = np.zeros((vertex_count, 3))
        center = rng.uniform(-0.5, 0.5, size=3)
        u = _random_unit(rng)
        w = _random_unit(rng)
        if abs(u @ w) > 0.9:
            continue
        w = _unit(w - (u @ w) * u)
        positions[vid(1, 1)] = center
        ok = True
        for key in mids:
            a, b = rng.uniform(0.4, 1.2) * rng.choice([-1, 1]), rng.uniform(
                -1.0, 1.0
            )
            mids[key] = center + a * u + b * w
            positions[vid(*key)] = mids[key]
        planes = {}
        for key, mid in mids.items():
            d1 = mid - center
            d2 = _random_unit(rng)
            n = np.cross(d1, d2)
            if np.linalg.norm(n) < 1e-2 * np.linalg.norm(d1):
                ok = False
                break
            planes[key] = _unit(n)
        if not ok:
            continue
        for key, (ka, kb) in corners.items():
            d = np.cross(planes[ka], planes[kb])
            if np.linalg.norm(d) < 1e-3:
                ok = False
                break
            positions[vid(*key)] = center + _random_coeff(rng) * _unit(d)
        if not ok:
            continue
        if all(
            _skew_enough(*(positions[list(q)])) for q in quads
        ):
            return vertex_count, quads, positions
    raise RuntimeError("failed to draw a generic 3x3 net")


def random_umbrella_net(k: int, rng, max_tries: int = 200):
    """Random ``k``-quad umbrella with planar vertex stars.

    Returns ``(vertex_count, quads, positions)`` for ``umbrella_graph(k)``.
    Spokes lie in a random plane through the center; rim corners are
    chained so each spoke's star stays planar, with the last corner
    placed on the intersection line that closes the loop.
    """
    vertex_count, quads = umbrella_graph(k)

    for _ in range(max_tries):
        positions = np.zeros((vertex_count, 3))
        center = rng.uniform(-0.5, 0.5, size=3)
        u = _random_unit(rng)
        w = _random_unit(rng)
        if abs(u @ w) > 0.9:
            continue
        w = _unit(w - (u @ w) * u)
        positions[0] = center
        angles = np.sort(rng.uniform(0, 2 * np.pi, size=k))
        if np.min(np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))) < 0.3:
            continue
        radii = rng.uniform(0.5, 1.4, size=k)
        spokes = [
            center + r * (np.cos(t) * u + np.sin(t) * w)
            for r, t in zip(radii, angles)
        ]
        for i, s in enumerate(spokes):
            positions[1 + i] = s
        rim = [None] * k
        rim[0] = center + rng.uniform(0.5, 1.4) * _random_unit(rng)
        ok = True
        for i in range(1, k - 1):
            a = _random_coeff(rng)
            b = _random_coeff(rng)
            rim[i] = spokes[i] + a * (center - spokes[i]) + b * (
                rim[i - 1] - spokes[i]
            )
            if np.linalg.norm(rim[i] - center) < 0.2:
                ok = False
                break
        if not ok:
            continue
        n1 = np.cross(spokes[k - 1] - center, rim[k - 2] - center)
        n2 = np.cross(spokes[0] - center, rim[0] - center)
        d = np.cross(n1, n2)
        if np.linalg.norm(d) < 1e-3:
            continue
        rim[k - 1] = center + _random_coeff(rng, 0.5, 1.4) * _unit(d)
        for i, m in enumerate(rim):
            positions[1 + k + i] = m
        if all(_skew_enough(*(positions[list(q)])) for q in quads):
            return vertex_count, quads, positions
    raise RuntimeError("failed to draw a generic umbrella net")


def perturbed(positions, rng, scale: float, vertices=None):
    """Copy of ``positions`` with gaussian noise of size ``scale`` added
    to the listed vertices (all of them when ``vertices`` is None)."""
    out = np.array(positions, dtype=float)
    idx = range(len(out)) if vertices is None else vertices
    for v in idx:
        out[v] += rng.normal(scale=scale, size=3)
    return out
