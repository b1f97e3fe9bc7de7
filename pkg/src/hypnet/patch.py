"""Hyperboloid patches bounded by a quad: ruling arcs, sampling, C1 reports.

Each ruling family of a face's adapted hyperboloid is a conic in its
ruling plane.  The arc of that conic between the face's two opposite
edge lines is a rational quadratic curve; evaluating it sweeps the
straight rulings of the patch, and intersecting the two families
samples the surface point grid.  A patch bounded by the quad exists
only when the swept rulings actually cross the quad, which singles out
one of the two conic branches per family -- and no branch at all when
the ruling orientation disagrees with the twist of the corresponding
edge pair, for instance after exchanging the two family labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    CoincidentLines,
    DegenerateConic,
    NoAdaptedPatch,
    NumericallyInfinitePoint,
    PatchError,
    SkewLines,
)
from .plucker import (
    W_TOL,
    canonical,
    hom,
    intersect_lines,
    line_direction,
    line_from_points,
    plucker_product,
    self_product,
    span,
)
from .hyperboloid import FaceHyperboloid, family_parameter_of, hyperboloid_from_parameter

#: Pairing threshold below which two arc endpoint lines intersect and the
#: rational quadratic between them degenerates.
DEGENERATE_CONIC_EPS = 1e-10

#: Skewness tolerance used when intersecting rulings of opposite families.
#: Looser than the generic line-meet tolerance because the cross products
#: of propagated rulings inherit the net's planarity and closure residuals.
PATCH_MEET_TOL = 1e-6

#: Parameter step for the second-order fold probes of the C1 report.
CUSP_DELTA = 1e-3

#: Offsets below this fraction of the edge length are treated as noise by
#: the fold probe rather than as evidence of a cusp.
CUSP_OFFSET_FLOOR = 1e-13


@dataclass(frozen=True, eq=False)
class ConicArc:
    """Rational quadratic arc of ruling lines between two edge lines.

    ``arc(t) = (1-t)^2 h0 + c t^2 h1 + branch t (1-t) q`` with the
    weight ``c`` chosen so that every point of the arc is isotropic,
    hence a real line.  ``branch`` selects one of the two complementary
    arcs of the conic through ``h0`` and ``h1``.
    """

    h0: np.ndarray
    h1: np.ndarray
    q: np.ndarray
    c: float
    branch: int

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        w0 = (1.0 - t) ** 2
        w1 = self.c * t**2
        wq = self.branch * t * (1.0 - t)
        return (
            np.multiply.outer(w0, self.h0)
            + np.multiply.outer(w1, self.h1)
            + np.multiply.outer(wq, self.q)
        )


def conic_arc(h, h_opposite, q, branch: int) -> ConicArc:
    """Arc of the ruling conic from ``h`` to ``h_opposite`` through plane
    point ``q``, on the branch ``+1`` or ``-1``.

    The three 6-vectors must span a plane in which ``q`` is polar to
    both endpoint lines (the configuration produced by an adapted
    hyperboloid).  The returned callable evaluates to isotropic
    6-vectors for every parameter, exactly in the algebra and to
    roundoff in floats.  Raises :class:`DegenerateConic` when the two
    endpoint lines intersect or when ``q`` itself is isotropic.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    h0 = canonical(h)
    h1 = canonical(h_opposite)
    qh = canonical(q)
    pairing = plucker_product(h0, h1)
    if abs(pairing) < DEGENERATE_CONIC_EPS:
        raise DegenerateConic(
            f"endpoint lines intersect: <h, h'> = {pairing:.3e}"
        )
    s_q = self_product(qh)
    if abs(s_q) < DEGENERATE_CONIC_EPS:
        raise DegenerateConic("plane point is isotropic; the arc collapses")
    c = -s_q / (2.0 * pairing)
    return ConicArc(h0=h0, h1=h1, q=qh, c=float(c), branch=int(branch))


@dataclass(frozen=True, eq=False)
class HyperboloidPatch:
    """Piece of a face's hyperboloid bounded by the quad's edges.

    ``ruling1(t)`` runs from the first-family edge line at ``t = 0`` to
    its opposite at ``t = 1``; ``ruling2(s)`` does the same for the
    second family.  ``corner_map`` sends the parameter corners
    ``(0, 0), (0, 1), (1, 0), (1, 1)`` to the vertex ids in the roles
    ``x, x1, x2, x12``.
    """

    face: int
    frame: object
    ruling1: Callable
    ruling2: Callable
    corner_map: dict


def _crossing_parameter(ruling, cross_line, A, B):
    """Barycentric coordinate along segment ``A -> B`` where ``ruling``
    meets the segment's supporting line, or ``None`` when the crossing
    is numerically at infinity or the lines fail to meet."""
    try:
        p = intersect_lines(ruling, cross_line, tol=PATCH_MEET_TOL)
    except (SkewLines, CoincidentLines):
        return None
    if abs(float(p[3])) < W_TOL:
        return None
    pt = p[:3] / p[3]
    d = B - A
    return float((pt - A) @ d) / float(d @ d)


def restrict_to_patch(hb: FaceHyperboloid, frame, positions) -> HyperboloidPatch:
    """Bounded patch of ``hb`` over its quad, or :class:`NoAdaptedPatch`.

    For each ruling family the two conic branches between the opposite
    edge lines are tried; the adapted branch is the one whose middle
    ruling crosses both opposite closed edge segments in their
    interiors.  Exactly one branch qualifies when the hyperboloid
    sweeps the quad; none does when the family's orientation is
    incompatible with the quad's twist (e.g. swapped family labels).
    """
    if tuple(frame.h_edges) != tuple(hb.frame.h_edges) or not np.array_equal(
        frame.h_lines, hb.frame.h_lines
    ):
        raise ValueError("frame does not match the hyperboloid's role frame")
    pos = np.asarray(positions, dtype=float)
    x, x1, x2, x12 = (pos[v] for v in frame.corners)
    families = (
        (1, frame.h_lines[0], frame.h_lines[1], hb.q1, ((x, x2), (x1, x12)),
         (frame.h_lines[2], frame.h_lines[3])),
        (2, frame.h_lines[2], frame.h_lines[3], hb.q2, ((x, x1), (x2, x12)),
         (frame.h_lines[0], frame.h_lines[1])),
    )
    arcs = {}
    for family, h, h_opp, q, segments, cross_lines in families:
        winners = []
        for branch in (1, -1):
            arc = conic_arc(h, h_opp, q, branch)
            mid = arc(0.5)
            ok = True
            for (A, B), cross in zip(segments, cross_lines):
                u = _crossing_parameter(mid, cross, A, B)
                if u is None or not 0.0 < u < 1.0:
                    ok = False
                    break
            if ok:
                winners.append(arc)
        if len(winners) != 1:
            reason = "no" if not winners else "both"
            raise NoAdaptedPatch(
                f"{reason} ruling branch of family ({family}) sweeps the "
                f"quad of face {frame.face}",
                face=frame.face,
                family=family,
            )
        arcs[family] = winners[0]
    return HyperboloidPatch(
        face=frame.face,
        frame=frame,
        ruling1=arcs[1],
        ruling2=arcs[2],
        corner_map={
            (0, 0): frame.corners[0],
            (0, 1): frame.corners[1],
            (1, 0): frame.corners[2],
            (1, 1): frame.corners[3],
        },
    )


def _point_at(patch: HyperboloidPatch, t: float, s: float, label="") -> np.ndarray:
    p = intersect_lines(
        patch.ruling1(t), patch.ruling2(s), tol=PATCH_MEET_TOL
    )
    if abs(float(p[3])) < W_TOL:
        raise NumericallyInfinitePoint(
            f"sample {label or (t, s)} of face {patch.face} is numerically "
            "at infinity"
        )
    return p[:3] / p[3]


def sample(p: HyperboloidPatch, n: int, m: int) -> np.ndarray:
    """``(n, m, 3)`` grid of surface points at uniform parameters.

    Point ``(i, j)`` is the intersection of ``ruling1(t_i)`` with
    ``ruling2(s_j)``; rows of constant ``j`` are collinear along
    ``ruling2(s_j)`` and the four parameter corners evaluate to the
    quad's vertices.  Raises :class:`NumericallyInfinitePoint` naming
    the offending indices when a grid point escapes to infinity.
    """
    if n < 2 or m < 2:
        raise ValueError("need at least two samples per direction")
    ts = np.linspace(0.0, 1.0, n)
    ss = np.linspace(0.0, 1.0, m)
    lines1 = [p.ruling1(t) for t in ts]
    lines2 = [p.ruling2(s) for s in ss]
    points = np.empty((n, m, 3), dtype=float)
    for i, r1 in enumerate(lines1):
        for j, r2 in enumerate(lines2):
            q = intersect_lines(r1, r2, tol=PATCH_MEET_TOL)
            if abs(float(q[3])) < W_TOL:
                raise NumericallyInfinitePoint(
                    f"sample ({i}, {j}) of face {p.face} is numerically "
                    "at infinity"
                )
            points[i, j] = q[:3] / q[3]
    return points


# --- independent per-face interpolants ---------------------------------------------


def bilinear_parameter(frame, positions) -> float:
    """Family coordinate of the bilinear interpolant of the quad corners.

    The doubly ruled surface traced bilinearly between the four corner
    positions is a member of the face's hyperboloid family; its
    first-family plane contains the line joining the midpoints of the
    two second-family edges, which pins down the axis point and hence
    the coordinate.
    """
    pos = np.asarray(positions, dtype=float)
    x, x1, x2, x12 = (pos[v] for v in frame.corners)
    mids = hom([0.5 * (x + x2), 0.5 * (x1 + x12)])
    mid = canonical(line_from_points(mids[0], mids[1]))
    plane = span(np.vstack([frame.h_lines[0], frame.h_lines[1], mid]))
    b = frame.H_line.basis.T
    residue = b - plane.basis.T @ (plane.basis @ b)
    _, _, vt = np.linalg.svd(residue, full_matrices=False)
    q = canonical(frame.H_line.basis.T @ vt[-1])
    return float(family_parameter_of(frame, q))


def bilinear_patches(a) -> dict:
    """Independent corner-interpolating bilinear patch for every face.

    The patches share boundary curves (the straight edges) but their
    quadrics are chosen face by face, so across a generic net they meet
    only with position continuity.  Useful as a contrast to a
    propagated family, which meets tangent-plane continuously.
    """
    out = {}
    for f in range(a.graph.face_count):
        frame = a.face_frame(f)
        lam = bilinear_parameter(frame, a.positions)
        hb = hyperboloid_from_parameter(frame, lam)
        out[f] = restrict_to_patch(hb, frame, a.positions)
    return out


# --- tangent-plane continuity report -----------------------------------------------


class _EdgeSide:
    """One patch's parametrization of a shared edge.

    Exposes the cross-family ruling through any point of the edge via
    the fractional-linear schedule between the ruling parameter and the
    barycentric coordinate along the segment, plus probe points a small
    parameter step into the patch's interior.
    """

    def __init__(self, patch: HyperboloidPatch, e: int, A, B):
        self.patch = patch
        self.role = patch.frame.h_edges.index(e)
        self.A = A
        self.B = B
        schedule = [self._edge_coordinate(sigma) for sigma in (0.0, 0.5, 1.0)]
        a, b, c = schedule
        if abs(c - b) < 1e-12:
            raise PatchError(
                f"degenerate ruling schedule on edge {e}", edge=e
            )
        gamma = (2.0 * b - a - c) / (c - b)
        self.alpha = c * (gamma + 1.0) - a
        self.beta = a
        self.gamma = gamma

    def _params(self, sigma: float, into: float):
        if self.role == 0:
            return into, sigma
        if self.role == 1:
            return 1.0 - into, sigma
        if self.role == 2:
            return sigma, into
        return sigma, 1.0 - into

    def _edge_coordinate(self, sigma: float) -> float:
        t, s = self._params(sigma, 0.0)
        pt = _point_at(self.patch, t, s)
        d = self.B - self.A
        return float((pt - self.A) @ d) / float(d @ d)

    def parameter_at(self, u: float) -> float:
        den = self.alpha - u * self.gamma
        if abs(den) < 1e-14 * (abs(self.alpha) + abs(u * self.gamma) + 1.0):
            raise PatchError("edge schedule has a pole inside the segment")
        return (u - self.beta) / den

    def cross_ruling(self, sigma: float) -> np.ndarray:
        arc = self.patch.ruling2 if self.role in (0, 1) else self.patch.ruling1
        return arc(sigma)

    def normal_at(self, u: float) -> np.ndarray:
        sigma = self.parameter_at(u)
        edge_dir = self.B - self.A
        cross_dir = line_direction(self.cross_ruling(sigma))
        n = np.cross(edge_dir, cross_dir)
        norm = np.linalg.norm(n)
        if norm < 1e-14:
            raise PatchError("ruling is parallel to the edge; no tangent plane")
        return n / norm

    def probe_point(self, u: float, delta: float) -> np.ndarray:
        sigma = self.parameter_at(u)
        t, s = self._params(sigma, delta)
        return _point_at(self.patch, t, s)


def check_c1(patches: dict, a, samples_per_edge: int = 9) -> dict:
    """Tangent-plane continuity report across interior edges.

    At uniform interior points of every shared edge the tangent plane
    of each side is spanned by the edge and the cross-family ruling
    through the point; the report records the largest angle between the
    two sides' planes (folded to ``[0, pi/2]``).  Second-order probes a
    small parameter step into each patch flag edges where both surface
    sheets leave the common tangent plane to the same side -- a fold
    (cusp) that plane angles alone cannot see.  The report never raises
    on geometric grounds; it only describes.
    """
    g = a.graph
    pos = np.asarray(a.positions, dtype=float)
    edges = {}
    cusp_edges = []
    max_angle = 0.0
    worst_edge = None
    for e in range(g.edge_count):
        f1, f2 = g.edge_faces(e)
        if f1 is None or f2 is None:
            continue
        if f1 not in patches or f2 not in patches:
            continue
        va, vb = g.edge_vertices(e)
        A, B = pos[va], pos[vb]
        sides = (_EdgeSide(patches[f1], e, A, B), _EdgeSide(patches[f2], e, A, B))
        edge_len = float(np.linalg.norm(B - A))
        angle = 0.0
        cusp = False
        for i in range(samples_per_edge):
            u = (i + 1.0) / (samples_per_edge + 1.0)
            n1 = sides[0].normal_at(u)
            n2 = sides[1].normal_at(u)
            sine = float(np.linalg.norm(np.cross(n1, n2)))
            cosine = abs(float(n1 @ n2))
            angle = max(angle, float(np.arctan2(sine, cosine)))
            base = A + u * (B - A)
            u_probe = u + CUSP_DELTA
            offsets = [
                float(n1 @ (side.probe_point(u_probe, CUSP_DELTA) - base))
                for side in sides
            ]
            floor = CUSP_OFFSET_FLOOR * edge_len
            if (
                offsets[0] * offsets[1] > 0.0
                and min(abs(offsets[0]), abs(offsets[1])) > floor
            ):
                cusp = True
        edges[e] = {"max_angle": angle, "cusp": cusp}
        if cusp:
            cusp_edges.append(e)
        if angle > max_angle:
            max_angle = angle
            worst_edge = e
    return {
        "samples_per_edge": samples_per_edge,
        "edge_count": len(edges),
        "max_angle": max_angle,
        "worst_edge": worst_edge,
        "cusp_edges": cusp_edges,
        "edges": edges,
    }
