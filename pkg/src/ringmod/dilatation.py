"""Matrix dilatation coefficients and directional dilatations at a point.

For an invertible matrix A with largest/smallest singular values ||A|| and
l(A), the classical coefficients are

    inner  H_I = |det A| / l(A)^n,
    outer  H_O = ||A||^n / |det A|,
    linear H   = ||A|| / l(A),

which satisfy H <= min(H_I, H_O) <= H^(n/2) <= max(H_I, H_O) <= H^(n-1).

The directional quantities measure stretching relative to the unit vector
u = (x - x0)/|x - x0|:

    min_directional_stretch(A, u) = min_{|h|=1} |Ah| / |h.u|  = 1/|A^{-T} u|,
    max_directional_stretch(A, u) = max_{|h|=1} |Ah| * |h.u|,

and combine with the Jacobian determinant J into the angular and normal
dilatations D = J / min^n and T = (max^n / J)^(1/(n-1)).  Both can be < 1,
unlike the classical coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .maps import Mapping, jacobian


class IrregularPointError(ValueError):
    """Jacobian is singular (or orientation-reversing) at the sample point."""


@dataclass(frozen=True)
class MatrixDilatations:
    norm: float       # largest singular value
    small: float      # smallest singular value
    det_abs: float
    inner: float      # |det| / small^n
    outer: float      # norm^n / |det|
    linear: float     # norm / small


def matrix_dilatations(A) -> MatrixDilatations:
    """All dilatation coefficients of an invertible matrix."""
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    sv = np.linalg.svd(A, compute_uv=False)
    big, small = float(sv[0]), float(sv[-1])
    det = float(np.prod(sv))
    if big == 0.0 or small < 1e-13 * big:
        raise IrregularPointError("matrix is singular")
    return MatrixDilatations(
        norm=big,
        small=small,
        det_abs=det,
        inner=det / small ** n,
        outer=big ** n / det,
        linear=big / small,
    )


def min_directional_stretch(A, u) -> float:
    """min over |h| = 1 of |Ah| / |h.u|, in closed form 1/|A^{-T} u|.

    Substituting g = Ah and Cauchy-Schwarz on h.u = g.(A^{-T}u) shows the
    minimum equals 1/|A^{-T}u|, attained at h parallel to A^{-1}A^{-T}u.
    Directions with h.u = 0 give +inf and never attain the minimum.
    """
    A = np.asarray(A, dtype=float)
    u = np.asarray(u, dtype=float)
    try:
        v = np.linalg.solve(A.T, u)
    except np.linalg.LinAlgError as exc:
        raise IrregularPointError("matrix is singular") from exc
    return 1.0 / float(np.linalg.norm(v))


def _min_stretch_batch(A: np.ndarray, u: np.ndarray) -> np.ndarray:
    v = np.linalg.solve(np.swapaxes(A, -1, -2), u[..., None])[..., 0]
    return 1.0 / np.linalg.norm(v, axis=-1)


@lru_cache(maxsize=8)
def _guard_directions(n: int, count: int) -> np.ndarray:
    """Fixed quasi-random unit directions for the sampled lower-bound guard."""
    rng = np.random.default_rng(20240611)
    h = rng.standard_normal((count, n))
    return h / np.linalg.norm(h, axis=1, keepdims=True)


GUARD_SAMPLES = 10_000


def _pgd_max(A: np.ndarray, u: np.ndarray, H0: np.ndarray, iters: int = 240) -> tuple[np.ndarray, np.ndarray]:
    """Projected-gradient ascent of |Ah|^2 (h.u)^2 on the sphere, batched over rows of H0."""
    B = A.T @ A
    H = H0 / np.linalg.norm(H0, axis=1, keepdims=True)
    step = np.full(len(H), 0.5)

    def value(h):
        Bh = h @ B.T
        return np.einsum("ij,ij->i", h, Bh) * (h @ u) ** 2

    F = value(H)
    for _ in range(iters):
        Bh = H @ B.T
        hu = H @ u
        G = 2.0 * hu[:, None] ** 2 * Bh + 2.0 * np.einsum("ij,ij->i", H, Bh)[:, None] * hu[:, None] * u[None, :]
        G -= np.einsum("ij,ij->i", G, H)[:, None] * H
        cand = H + step[:, None] * G
        cand /= np.linalg.norm(cand, axis=1, keepdims=True)
        Fc = value(cand)
        better = Fc > F
        H[better] = cand[better]
        F[better] = Fc[better]
        step = np.where(better, step * 1.3, step * 0.5)
        if step.max() < 1e-15:
            break
    return H, F


def max_directional_stretch(A, u, guard_samples: int = GUARD_SAMPLES) -> float:
    """max over |h| = 1 of |Ah| * |h.u|.

    No closed form is available; a multi-start projected-gradient ascent
    (starts: +/- coordinate axes, +/- u, right singular vectors) is refined to
    ~1e-10 and guarded from below by ``guard_samples`` fixed quasi-random
    directions -- if sampling beats the optimizer, the ascent restarts from
    the sampled best, so the result is never below the sampled maximum.
    """
    A = np.asarray(A, dtype=float)
    u = np.asarray(u, dtype=float)
    n = A.shape[0]
    _, _, Vt = np.linalg.svd(A)
    starts = np.concatenate([np.eye(n), -np.eye(n), u[None, :], -u[None, :], Vt], axis=0)
    near_zero = np.abs(starts @ u) < 1e-9
    starts[near_zero] += 1e-6 * u
    _, F = _pgd_max(A, u, starts)
    best = float(np.sqrt(F.max()))

    if guard_samples > 0:
        dirs = _guard_directions(n, guard_samples)
        vals = np.linalg.norm(dirs @ A.T, axis=1) * np.abs(dirs @ u)
        k = int(np.argmax(vals))
        if vals[k] > best:
            _, F2 = _pgd_max(A, u, dirs[k][None, :])
            best = max(best, float(np.sqrt(F2.max())), float(vals[k]))
    return best


BATCH_GUARD_SAMPLES = 2048


def _pgd_max_joint(A: np.ndarray, u: np.ndarray, H: np.ndarray, iters: int = 200) -> np.ndarray:
    """Ascent of |A h|^2 (h.u)^2 jointly over points and starts.

    A: (N, n, n), u: (N, n), H: (N, S, n); returns the best squared objective
    per point.  Same iteration as the single-point optimizer, vectorized so
    quadrature grids stay cheap.
    """
    B = np.swapaxes(A, -1, -2) @ A
    H = H / np.linalg.norm(H, axis=-1, keepdims=True)
    step = np.full(H.shape[:2], 0.5)

    def value(h):
        Bh = np.einsum("nij,nsj->nsi", B, h)
        return np.einsum("nsi,nsi->ns", h, Bh) * np.einsum("nsi,ni->ns", h, u) ** 2

    F = value(H)
    for _ in range(iters):
        Bh = np.einsum("nij,nsj->nsi", B, H)
        hu = np.einsum("nsi,ni->ns", H, u)
        hBh = np.einsum("nsi,nsi->ns", H, Bh)
        G = 2.0 * hu[..., None] ** 2 * Bh + 2.0 * (hBh * hu)[..., None] * u[:, None, :]
        G -= np.einsum("nsi,nsi->ns", G, H)[..., None] * H
        cand = H + step[..., None] * G
        cand /= np.linalg.norm(cand, axis=-1, keepdims=True)
        Fc = value(cand)
        better = Fc > F
        H = np.where(better[..., None], cand, H)
        F = np.where(better, Fc, F)
        step = np.where(better, step * 1.3, step * 0.5)
        if step.max() < 1e-15:
            break
    return F.max(axis=1)


def _max_stretch_batch(A: np.ndarray, u: np.ndarray,
                       guard_samples: int = BATCH_GUARD_SAMPLES,
                       chunk: int = 512) -> np.ndarray:
    """max_directional_stretch over a batch of (matrix, direction) pairs.

    Multi-start ascent vectorized over the whole batch, then a sampled guard
    (fewer directions than the single-point operation; any point where the
    sample wins gets one extra ascent from the sampled direction).
    """
    A = np.asarray(A, dtype=float)
    u = np.asarray(u, dtype=float)
    N, n = u.shape
    Vt = np.linalg.svd(A)[2]                         # (N, n, n) rows = singular directions
    eye = np.broadcast_to(np.eye(n), (N, n, n))
    starts = np.concatenate([eye, -eye, u[:, None, :], -u[:, None, :], Vt], axis=1)
    dots = np.einsum("nsi,ni->ns", starts, u)
    starts = starts + np.where(np.abs(dots) < 1e-9, 1e-6, 0.0)[..., None] * u[:, None, :]
    out = np.sqrt(_pgd_max_joint(A, u, starts))

    if guard_samples > 0:
        dirs = _guard_directions(n, guard_samples)
        for lo in range(0, N, chunk):
            hi = min(lo + chunk, N)
            Ah = np.einsum("bij,kj->bki", A[lo:hi], dirs)      # (b, K, n)
            vals = np.linalg.norm(Ah, axis=-1) * np.abs(dirs @ u[lo:hi].T).T
            smax = vals.max(axis=1)
            ks = vals.argmax(axis=1)
            beat = smax > out[lo:hi]
            if np.any(beat):
                idx = np.nonzero(beat)[0]
                F2 = _pgd_max_joint(A[lo + idx], u[lo + idx], dirs[ks[idx]][:, None, :])
                out[lo + idx] = np.maximum(smax[idx], np.sqrt(F2))
    return out


@dataclass(frozen=True, eq=False)
class DilatationSample:
    """All dilatation data of a map at x relative to the reference point x0."""

    x: np.ndarray
    x0: np.ndarray
    u: np.ndarray
    min_stretch: float        # min |Ah|/|h.u|
    max_stretch: float        # max |Ah| |h.u|
    angular: float            # D = J / min_stretch^n
    normal: float             # T = (max_stretch^n / J)^(1/(n-1))
    jac_det: float
    matrix: MatrixDilatations

    def to_json(self) -> dict:
        return {
            "x": list(self.x),
            "x0": list(self.x0),
            "u": list(self.u),
            "min_stretch": self.min_stretch,
            "max_stretch": self.max_stretch,
            "angular": self.angular,
            "normal": self.normal,
            "jac_det": self.jac_det,
            "matrix": {
                "norm": self.matrix.norm,
                "small": self.matrix.small,
                "det_abs": self.matrix.det_abs,
                "inner": self.matrix.inner,
                "outer": self.matrix.outer,
                "linear": self.matrix.linear,
            },
        }


def directional_sample(mapping: Mapping, x, x0, jacobian_mode: str = "analytic") -> DilatationSample:
    """Evaluate every dilatation of ``mapping`` at x relative to x0.

    Requires x != x0 and a regular, orientation-preserving point (J > 0);
    anything else raises IrregularPointError rather than extending the
    definitions by convention.
    """
    x = np.asarray(x, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    n = x.shape[-1]
    d = np.linalg.norm(x - x0)
    if d == 0.0:
        raise ValueError("x and x0 must be distinct")
    u = (x - x0) / d
    A, J = jacobian(mapping, x, mode=jacobian_mode)
    J = float(J)
    if not np.isfinite(J) or J <= 0.0:
        raise IrregularPointError(f"irregular point: det = {J}")
    mn = min_directional_stretch(A, u)
    mx = max_directional_stretch(A, u)
    return DilatationSample(
        x=x,
        x0=x0,
        u=u,
        min_stretch=mn,
        max_stretch=mx,
        angular=J / mn ** n,
        normal=(mx ** n / J) ** (1.0 / (n - 1.0)),
        jac_det=J,
        matrix=matrix_dilatations(A),
    )


def angular_dilatation_field(mapping: Mapping, x0):
    """Vectorized x -> D(x, x0); cheap (uses the closed-form minimum)."""
    x0 = np.asarray(x0, dtype=float)

    def field(X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        n = X.shape[-1]
        diff = X - x0
        u = diff / np.linalg.norm(diff, axis=-1, keepdims=True)
        A = mapping.jacobian(X)
        J = np.linalg.det(A)
        if np.any(J <= 0):
            raise IrregularPointError("irregular point inside the integration region")
        return J / _min_stretch_batch(A, u) ** n

    return field


def normal_dilatation_field(mapping: Mapping, x0):
    """Vectorized x -> T(x, x0); runs the batched sphere optimizer."""
    x0 = np.asarray(x0, dtype=float)

    def field(X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        n = X.shape[-1]
        diff = X - x0
        u = diff / np.linalg.norm(diff, axis=-1, keepdims=True)
        A = mapping.jacobian(X)
        J = np.linalg.det(A)
        if np.any(J <= 0):
            raise IrregularPointError("irregular point inside the integration region")
        mx = _max_stretch_batch(A, u)
        return (mx ** n / J) ** (1.0 / (n - 1.0))

    return field
