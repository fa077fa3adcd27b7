"""Discrete modulus of connecting path families on weighted grid graphs.

The continuum modulus of the family of curves joining the two boundary
components is approximated by the convex program

    minimize   sum_e  w_e * rho_e^p
    subject to sum_{e in path} len_e * rho_e >= 1   for every source-sink path,

where ``len_e`` is the Euclidean edge length (line-integral weight) and
``w_e`` is the measure weight of the flow tube the edge represents, so the
objective is a Riemann sum of the p-energy.  The program is solved by
constraint generation: keep an active set of paths, maximize the Lagrangian
dual by projected gradient ascent with Polyak steps, and separate with a
nonnegative-weight shortest-path search; a path whose rho-length falls below
1 - tol joins the active set.

Grids are structured log-polar (log-spherical for n = 3) products aligned
with the shapes, which keeps level sets of the extremal densities along grid
lines and gives fast convergence.  Image grids push nodes through a mapping,
recompute edge lengths as image chords and tube weights as image cell areas;
for full rings the grid is pre-rotated layer by layer to follow the map's
angular drift, so that the image grid stays close to orthogonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize
from scipy.sparse.csgraph import dijkstra

from .constants import sphere_area
from .geometry import Annulus, ApollonianSemiring, HalfSemiring, Shape
from .maps import Identity, Mapping

DEFAULT_TOL = 1e-3
PATH_CAP = 10_000


class ConvergenceError(RuntimeError):
    """Constraint generation hit its cap; carries the best bounds so far."""

    def __init__(self, msg, best_energy=None, shortest=None):
        super().__init__(msg)
        self.best_energy = best_energy
        self.shortest = shortest


@dataclass(eq=False)
class GridGraph:
    """Weighted discretization of a shape with two marked boundary node sets."""

    nodes: np.ndarray          # (N, n)
    edges: np.ndarray          # (E, 2) int
    lengths: np.ndarray        # (E,) Euclidean lengths
    weights: np.ndarray        # (E,) energy measure weights
    source: np.ndarray         # node ids on the inner boundary
    sink: np.ndarray           # node ids on the outer boundary
    p: float                   # modulus exponent (ambient dimension for conformal)
    dim: int
    kind: str                  # "ring" or "semiring" (modulus normalization)
    resolution: tuple

    def __post_init__(self):
        if len(self.source) == 0 or len(self.sink) == 0:
            raise ValueError("source and sink sets must be nonempty")
        if set(self.source.tolist()) & set(self.sink.tolist()):
            raise ValueError("source and sink sets must be disjoint")
        if np.any(self.lengths <= 0):
            raise ValueError("every edge length must be positive")
        if np.any(self.weights <= 0):
            raise ValueError("every edge weight must be positive")


@dataclass(frozen=True)
class ModulusEstimate:
    m_gamma: float             # estimated modulus of the connecting family
    mo: float                  # derived ring/semiring modulus
    iterations: int            # constraint-generation rounds
    duality_gap: float         # admissibility violation of rho at termination
    resolution: tuple
    n_paths: int
    rho: np.ndarray = field(repr=False, default=None)


def mo_from_gamma(m_gamma: float, kind: str, n: int) -> float:
    """Ring/semiring modulus from the connecting-family modulus.

    Rings use (omega_{n-1} / M)^(1/(n-1)); semirings carry the reflection
    factor 2 next to M.
    """
    if m_gamma <= 0:
        raise ValueError(f"connecting-family modulus must be positive, got {m_gamma}")
    if kind == "ring":
        return (sphere_area(n) / m_gamma) ** (1.0 / (n - 1.0))
    if kind == "semiring":
        return (sphere_area(n) / (2.0 * m_gamma)) ** (1.0 / (n - 1.0))
    raise ValueError(f"unknown shape kind {kind!r}")


# ---------------------------------------------------------------------------
# grid construction
# ---------------------------------------------------------------------------

def _polar_template(K: int, M: int, r0: float, r1: float, wrap: bool, span: float,
                    offsets: np.ndarray | None):
    """Log-polar product grid in (r, theta) parameters.

    Returns node parameters (K*M, 2), edge list, per-edge flow-tube corner
    parameters (E, 4, 2), and the source/sink node ids.  ``offsets`` rotates
    every layer k by offsets[k].
    """
    radii = np.exp(np.linspace(math.log(r0), math.log(r1), K))
    if wrap:
        theta = np.arange(M) * (span / M)
        dth = span / M
    else:
        theta = np.linspace(0.0, span, M)
        dth = span / (M - 1)
    off = np.zeros(K) if offsets is None else np.asarray(offsets, float)

    node_r = np.repeat(radii, M)
    node_t = np.tile(theta, K) + np.repeat(off, M)
    params = np.stack([node_r, node_t], axis=1)

    def nid(k, m):
        return k * M + (m % M if wrap else m)

    r_half = np.sqrt(radii[:-1] * radii[1:])
    r_lo = np.concatenate([[radii[0]], r_half])
    r_hi = np.concatenate([r_half, [radii[-1]]])

    edges = []
    corners = []
    for k in range(K - 1):           # radial edges
        for m in range(M):
            edges.append((nid(k, m), nid(k + 1, m)))
            t = theta[m]
            if wrap:
                tm, tp = t - dth / 2, t + dth / 2
            else:
                tm, tp = max(0.0, t - dth / 2), min(span, t + dth / 2)
            corners.append(((radii[k], tm + off[k]), (radii[k], tp + off[k]),
                            (radii[k + 1], tp + off[k + 1]), (radii[k + 1], tm + off[k + 1])))
    m_stop = M if wrap else M - 1
    for k in range(K):               # angular edges
        for m in range(m_stop):
            edges.append((nid(k, m), nid(k, m + 1)))
            t0, t1 = theta[m] + off[k], theta[m] + dth + off[k]
            corners.append(((r_lo[k], t0), (r_lo[k], t1), (r_hi[k], t1), (r_hi[k], t0)))

    src = np.array([nid(0, m) for m in range(M)])
    snk = np.array([nid(K - 1, m) for m in range(M)])
    return params, np.array(edges), np.array(corners), src, snk


def _shoelace(quads: np.ndarray) -> np.ndarray:
    x, y = quads[..., 0], quads[..., 1]
    return 0.5 * np.abs(np.sum(x * np.roll(y, -1, axis=-1) - np.roll(x, -1, axis=-1) * y, axis=-1))


def _embed_2d(params: np.ndarray) -> np.ndarray:
    r, t = params[..., 0], params[..., 1]
    return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)


def _apollonian_embed(pole: np.ndarray):
    """Conformal chart of the Apollonian semiring in the plane.

    The Moebius map z -> pole * (1 + w)/(1 - w) carries the half-annulus
    {r0 <= |w| <= r1, Re w <= 0} onto the region of the unit disk between two
    Apollonian circles about +/- pole; grid orthogonality is preserved.
    """
    xi = complex(pole[0], pole[1])

    def chart(x: np.ndarray) -> np.ndarray:
        w = (x[..., 0] + 1j * x[..., 1]) * 1j     # rotate half-plane Re<=0 onto param span
        z = xi * (1.0 + w) / (1.0 - w)
        return np.stack([z.real, z.imag], axis=-1)

    return chart


def _materialize_2d(params, corners, chart, mapping: Mapping | None):
    pts = chart(_embed_2d(params))
    crn = chart(_embed_2d(corners))
    if mapping is not None:
        pts = mapping(pts)
        crn = mapping(crn.reshape(-1, 2)).reshape(corners.shape[:-1] + (2,))
    return pts, _shoelace(crn)


def _build_2d(shape: Shape, K: int, M: int, mapping: Mapping | None,
              offsets: np.ndarray | None) -> GridGraph:
    if isinstance(shape, Annulus):
        wrap, span = True, 2.0 * math.pi
        center = shape.center

        def chart(x):
            return x + center
    elif isinstance(shape, HalfSemiring):
        wrap, span = False, math.pi
        center = shape.center

        def chart(x):
            return x + center
    elif isinstance(shape, ApollonianSemiring):
        wrap, span = False, math.pi
        chart = _apollonian_embed(shape.pole)
    else:
        raise TypeError(f"unsupported shape {type(shape).__name__}")

    params, edges, corners, src, snk = _polar_template(K, M, shape.r0, shape.r1, wrap, span, offsets)
    pts, weights = _materialize_2d(params, corners, chart, mapping)
    lengths = np.linalg.norm(pts[edges[:, 1]] - pts[edges[:, 0]], axis=1)
    return GridGraph(nodes=pts, edges=edges, lengths=lengths, weights=weights,
                     source=src, sink=snk, p=float(shape.n), dim=shape.n,
                     kind=shape.kind, resolution=(K, M))


def _build_3d(shape: Shape, K: int, J: int) -> GridGraph:
    """Log-spherical product grid; azimuthal count is 2*J.

    Tube weights come from the two-point flux rule: weight = face area times
    center distance, so that weight/length^2 is the conductance of the tube.
    Polar cells are cell-centered, which keeps nodes off the axis.
    """
    if isinstance(shape, Annulus):
        hemi = False
    elif isinstance(shape, HalfSemiring):
        hemi = True
    else:
        raise NotImplementedError("three-dimensional grids support annuli and half semirings only")
    I = 2 * J
    radii = np.exp(np.linspace(math.log(shape.r0), math.log(shape.r1), K))
    phimax = math.pi / 2 if hemi else math.pi
    dphi = phimax / J
    phis = (np.arange(J) + 0.5) * dphi
    dpsi = 2.0 * math.pi / I
    psis = np.arange(I) * dpsi

    def nid(k, j, i):
        return (k * J + j) * I + (i % I)

    rr, pp, ss = np.meshgrid(radii, phis, psis, indexing="ij")
    nodes = np.stack([rr * np.sin(pp) * np.cos(ss),
                      rr * np.sin(pp) * np.sin(ss),
                      rr * np.cos(pp)], axis=-1).reshape(-1, 3) + shape.center

    r_half = np.sqrt(radii[:-1] * radii[1:])
    r_lo = np.concatenate([[radii[0]], r_half])
    r_hi = np.concatenate([r_half, [radii[-1]]])

    edges, lengths, weights = [], [], []
    for k in range(K):
        ring_area = 0.5 * (r_hi[k] ** 2 - r_lo[k] ** 2)
        for j in range(J):
            cell_solid = dpsi * (math.cos(phis[j] - dphi / 2) - math.cos(phis[j] + dphi / 2))
            for i in range(I):
                a = nid(k, j, i)
                if k < K - 1:
                    b = nid(k + 1, j, i)
                    edges.append((a, b))
                    lengths.append(np.linalg.norm(nodes[b] - nodes[a]))
                    weights.append(r_half[k] ** 2 * cell_solid * (radii[k + 1] - radii[k]))
                if j < J - 1:
                    b = nid(k, j + 1, i)
                    edges.append((a, b))
                    lengths.append(np.linalg.norm(nodes[b] - nodes[a]))
                    weights.append(math.sin(phis[j] + dphi / 2) * dpsi * ring_area * radii[k] * dphi)
                b = nid(k, j, i + 1)
                edges.append((a, b))
                lengths.append(np.linalg.norm(nodes[b] - nodes[a]))
                weights.append(dphi * ring_area * radii[k] * math.sin(phis[j]) * dpsi)

    src = np.array([nid(0, j, i) for j in range(J) for i in range(I)])
    snk = np.array([nid(K - 1, j, i) for j in range(J) for i in range(I)])
    return GridGraph(nodes=nodes, edges=np.array(edges), lengths=np.array(lengths),
                     weights=np.array(weights), source=src, sink=snk,
                     p=float(shape.n), dim=shape.n, kind=shape.kind, resolution=(K, J, I))


def build_grid(shape: Shape, radial_cells: int, angular_cells: int) -> GridGraph:
    """Structured grid aligned with the shape.

    Radii are log-uniform in [r0, r1]; angles uniform on the (hemi)circle or
    (hemi)sphere.  The inner boundary layer is the source set, the outer the
    sink.  Apollonian grids are built in the conformal bipolar chart, so their
    level sets follow the Apollonian spheres.
    """
    if radial_cells < 8 or angular_cells < 8:
        raise ValueError("resolution too small: need at least 8 cells each way")
    if shape.n == 2:
        return _build_2d(shape, radial_cells, angular_cells, None, None)
    if shape.n == 3:
        return _build_3d(shape, radial_cells, angular_cells)
    raise NotImplementedError("grids are implemented for n in {2, 3}")


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------

class _ShortestPathOracle:
    """Supersource/supersink Dijkstra over the undirected edge list."""

    def __init__(self, graph: GridGraph):
        N = len(graph.nodes)
        E = len(graph.edges)
        self.N, self.E = N, E
        self.super_s, self.super_t = N, N + 1
        rows = np.concatenate([graph.edges[:, 0], graph.edges[:, 1],
                               np.full(len(graph.source), self.super_s), graph.sink])
        cols = np.concatenate([graph.edges[:, 1], graph.edges[:, 0],
                               graph.source, np.full(len(graph.sink), self.super_t)])
        eids = np.concatenate([np.arange(E), np.arange(E),
                               np.full(len(graph.source) + len(graph.sink), -1)])
        # stable CSR slot -> edge id mapping (offset avoids losing explicit zeros)
        marker = sp.csr_matrix((eids + 2.0, (rows, cols)), shape=(N + 2, N + 2))
        self.slot_edge = (marker.data - 2.0).astype(np.int64)
        self.indices = marker.indices
        self.indptr = marker.indptr
        self.edge_of = {}
        for i, (a, b) in enumerate(graph.edges):
            self.edge_of[(int(a), int(b))] = i
            self.edge_of[(int(b), int(a))] = i

    def run(self, edge_weights: np.ndarray):
        data = np.where(self.slot_edge >= 0, edge_weights[np.clip(self.slot_edge, 0, None)], 0.0)
        G = sp.csr_matrix((data, self.indices, self.indptr), shape=(self.N + 2, self.N + 2))
        dist, pred = dijkstra(G, directed=True, indices=self.super_s, return_predecessors=True)
        return dist, pred

    def extract(self, pred, sink_node: int) -> tuple[int, ...]:
        out = []
        v = int(sink_node)
        while pred[v] >= 0:
            u = int(pred[v])
            if u < self.N and v < self.N:
                out.append(self.edge_of[(u, v)])
            v = u
        return tuple(reversed(out))


def _dual_ascent(A: sp.csr_matrix, lam: np.ndarray, weights: np.ndarray,
                 p: float, viol_target: float, max_iter: int):
    """Maximize the Lagrangian dual over lam >= 0 (projected quasi-Newton).

    For multipliers lam the inner minimizer is rho_e = (g_e / (p w_e))^(1/(p-1))
    with g = A^T lam, giving the smooth concave dual
    phi(lam) = (1 - p) sum w rho^p + sum lam, whose gradient is the violation
    vector 1 - A rho.  The bound-constrained ascent runs until the projected
    gradient (the active-set admissibility violation) falls below the target;
    quasi-Newton steps converge orders of magnitude faster here than plain
    Polyak subgradient steps, which stall on warm restarts.
    """
    q = 1.0 / (p - 1.0)
    holder = {}

    def neg_dual(lm):
        g = A.T @ lm
        rho = (g / (p * weights)) ** q
        Ar = A @ rho
        energy = float(np.sum(weights * rho ** p))
        phi = (1.0 - p) * energy + float(lm.sum())
        holder["rho"] = rho
        return -phi, Ar - 1.0

    res = minimize(neg_dual, lam, jac=True, method="L-BFGS-B",
                   bounds=[(0.0, None)] * len(lam),
                   options={"maxiter": max_iter, "ftol": 1e-15,
                            "gtol": 0.1 * viol_target, "maxcor": 20})
    neg_dual(res.x)
    return res.x, holder["rho"], int(res.nit)


def modulus_connect(graph: GridGraph, tol: float = DEFAULT_TOL,
                    max_paths: int = PATH_CAP) -> ModulusEstimate:
    """Discrete modulus of the source-to-sink path family.

    Terminates when the rho-shortest source-sink path has rho-length at least
    1 - tol; the returned density is rescaled down if it ended strictly
    super-admissible, so the reported energy sum w rho^p tracks the graph
    optimum to O(tol).  Deterministic: fixed iteration order, no randomness.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must be in (0, 1), got {tol}")
    p = graph.p
    if p <= 1:
        raise ValueError("modulus exponent must exceed 1")
    oracle = _ShortestPathOracle(graph)
    lengths, weights = graph.lengths, graph.weights

    # seed with the geometrically shortest path to every sink node
    dist, pred = oracle.run(lengths)
    if not math.isfinite(dist[oracle.super_t]):
        raise ValueError("graph is disconnected between source and sink")
    paths: list[tuple[int, ...]] = []
    seen = set()
    for t in graph.sink:
        key = oracle.extract(pred, t)
        if key and key not in seen:
            seen.add(key)
            paths.append(key)

    # the seed batch starts from zero multipliers; the as-if-alone warm start
    # below overshoots when constraints overlap, which stalls the ascent
    lam = np.zeros(len(paths))
    rho = np.zeros(len(lengths))
    rounds = 0
    stall = 0
    d_star = 0.0
    while True:
        rounds += 1
        indptr = np.cumsum([0] + [len(pe) for pe in paths])
        indices = np.fromiter((e for pe in paths for e in pe), dtype=np.int64, count=indptr[-1])
        data = lengths[indices]
        A = sp.csr_matrix((data, indices, indptr), shape=(len(paths), len(lengths)))
        if len(lam) < len(paths):
            # seed each new multiplier as if its path were the only constraint
            fresh = []
            for pe in paths[len(lam):]:
                le = lengths[list(pe)]
                we = weights[list(pe)]
                c = float(np.sum(le * (le / (p * we)) ** (1.0 / (p - 1.0))))
                fresh.append(c ** (1.0 - p))
            lam = np.concatenate([lam, np.array(fresh)])
        lam, rho, _ = _dual_ascent(A, lam, weights, p,
                                   viol_target=0.25 * tol,
                                   max_iter=2000 * (1 + stall))

        dist, pred = oracle.run(lengths * rho)
        d_star = float(dist[oracle.super_t])
        if d_star >= 1.0 - tol:
            break
        added = 0
        for t in graph.sink:
            if dist[t] < 1.0 - tol:
                key = oracle.extract(pred, t)
                if key and key not in seen:
                    seen.add(key)
                    paths.append(key)
                    added += 1
        if len(paths) > max_paths:
            raise ConvergenceError(
                f"path cap {max_paths} exceeded",
                best_energy=float(np.sum(weights * rho ** p)), shortest=d_star)
        if added == 0:
            stall += 1
            if stall > 3:
                raise ConvergenceError(
                    "dual ascent stalled short of admissibility",
                    best_energy=float(np.sum(weights * rho ** p)), shortest=d_star)
        else:
            stall = 0

    if d_star > 1.0:
        rho = rho / d_star
        d_star = 1.0
    m_gamma = float(np.sum(weights * rho ** p))
    return ModulusEstimate(
        m_gamma=m_gamma,
        mo=mo_from_gamma(m_gamma, graph.kind, graph.dim),
        iterations=rounds,
        duality_gap=max(0.0, 1.0 - d_star),
        resolution=graph.resolution,
        n_paths=len(paths),
        rho=rho,
    )


def modulus_separate(graph: GridGraph, tol: float = DEFAULT_TOL) -> float:
    """Modulus of the separating family via duality: M(connect)^(1/(1-n))."""
    est = modulus_connect(graph, tol=tol)
    return est.m_gamma ** (1.0 / (1.0 - graph.dim))


# ---------------------------------------------------------------------------
# image grids
# ---------------------------------------------------------------------------

def _circular_unwrap(angles: np.ndarray, reference: float) -> float:
    """Circular mean of ``angles`` unwrapped near ``reference``."""
    z = np.exp(1j * angles).mean()
    mean = math.atan2(z.imag, z.real)
    k = round((reference - mean) / (2.0 * math.pi))
    return mean + 2.0 * math.pi * k


def _angular_drift(mapping: Mapping, shape: Annulus, K: int, samples: int = 64) -> np.ndarray:
    """Per-layer mean rotation of the image of each circle about the image center.

    Pre-rotating layer k by -drift[k] makes the image grid of a rotation-like
    map stay orthogonal (a sheared image grid systematically underestimates
    the modulus).  For maps without angular drift this is ~0 and harmless.
    """
    radii = np.exp(np.linspace(math.log(shape.r0), math.log(shape.r1), K))
    th = np.arange(samples) * (2.0 * math.pi / samples)
    ring = np.stack([np.cos(th), np.sin(th)], axis=1)
    img_inner = mapping(shape.center + radii[0] * ring)
    center_img = img_inner.mean(axis=0)
    drift = np.zeros(K)
    prev = 0.0
    for k in range(K):
        pts = mapping(shape.center + radii[k] * ring)
        rel = pts - center_img
        dang = np.arctan2(rel[:, 1], rel[:, 0]) - th
        prev = _circular_unwrap(dang, prev)
        drift[k] = prev
    return drift


def build_image_grid(mapping: Mapping, shape: Shape, resolution: tuple[int, int]) -> GridGraph:
    """Grid of the image of ``shape`` under ``mapping``.

    Every grid node is pushed through the map, edge lengths become image chord
    lengths and tube weights image cell areas.  Planar shapes only; the map
    must be nonsingular on the closed shape.
    """
    if shape.n != 2:
        raise NotImplementedError("image grids are implemented for n = 2")
    K, M = resolution
    if K < 8 or M < 8:
        raise ValueError("resolution too small: need at least 8 cells each way")
    offsets = None
    if isinstance(shape, Annulus) and not isinstance(mapping, Identity):
        offsets = -_angular_drift(mapping, shape, K)
    return _build_2d(shape, K, M, mapping, offsets)


def image_modulus(mapping: Mapping, shape: Shape, resolution: tuple[int, int],
                  tol: float = DEFAULT_TOL) -> ModulusEstimate:
    """Modulus of the image of ``shape`` under ``mapping`` (path solver on the
    pushed-forward grid)."""
    return modulus_connect(build_image_grid(mapping, shape, resolution), tol=tol)
