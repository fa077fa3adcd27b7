"""Test mappings of R^n with vectorized evaluation and Jacobians.

Every map accepts points of shape (n,) or batches (..., n) and is a
deterministic, pure function of (map, point).  Analytic Jacobians are exact;
the finite-difference fallback uses central differences with a relative step.

Evaluation refuses points closer than SINGULAR_EPS to a map's singular set
(quadrature and solvers are expected to keep their sample points away from
singular sets).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SINGULAR_EPS = 1e-12

# central-difference step scale, h = FD_STEP_SCALE * max(1, |x|)
FD_STEP_SCALE = 1e-6


class MapDomainError(ValueError):
    """A point lies on (or too close to) the singular set of a map."""


def _as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] < 2:
        raise ValueError("points must have at least 2 coordinates")
    return x


class Mapping:
    """Base class; subclasses implement _eval/_jacobian on (..., n) batches."""

    def __call__(self, x) -> np.ndarray:
        x = _as_points(x)
        self._check_domain(x)
        return self._eval(x)

    def jacobian(self, x) -> np.ndarray:
        """Analytic Jacobian matrices, shape (..., n, n)."""
        x = _as_points(x)
        self._check_domain(x)
        return self._jacobian(x)

    def jacobian_fd(self, x, h: float | None = None) -> np.ndarray:
        """Central-difference Jacobian; componentwise error O(h^2)."""
        x = _as_points(x)
        self._check_domain(x)
        n = x.shape[-1]
        if h is None:
            h = FD_STEP_SCALE * max(1.0, float(np.max(np.linalg.norm(x.reshape(-1, n), axis=-1))))
        if h <= 0:
            raise ValueError("finite-difference step must be positive")
        cols = []
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            cols.append((self(x + e) - self(x - e)) / (2.0 * h))
        return np.stack(cols, axis=-1)

    def singularity_distance(self, x) -> np.ndarray:
        """Distance from each point to the map's singular set (inf if none)."""
        x = _as_points(x)
        return self._singularity_distance(x)

    def _check_domain(self, x):
        d = self._singularity_distance(x)
        if np.any(d < SINGULAR_EPS):
            raise MapDomainError(f"{self.describe()}: point within {SINGULAR_EPS} of singular set")

    def _singularity_distance(self, x) -> np.ndarray:
        return np.full(x.shape[:-1], np.inf)

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Identity(Mapping):
    def _eval(self, x):
        return x.copy()

    def _jacobian(self, x):
        n = x.shape[-1]
        return np.broadcast_to(np.eye(n), x.shape[:-1] + (n, n)).copy()

    def describe(self):
        return "identity"


@dataclass(frozen=True)
class RadialStretch(Mapping):
    """x -> |x|^(a-1) x for a > 0; singular at the origin.

    At |x| = r the derivative has singular values {a r^(a-1)} radially and
    {r^(a-1)} tangentially, so det = a r^(n(a-1)).
    """

    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"stretch exponent must be positive, got {self.a}")

    def _eval(self, x):
        r = np.linalg.norm(x, axis=-1, keepdims=True)
        return r ** (self.a - 1.0) * x

    def _jacobian(self, x):
        n = x.shape[-1]
        r = np.linalg.norm(x, axis=-1)
        u = x / r[..., None]
        eye = np.broadcast_to(np.eye(n), x.shape[:-1] + (n, n))
        uu = u[..., :, None] * u[..., None, :]
        return (r ** (self.a - 1.0))[..., None, None] * (eye + (self.a - 1.0) * uu)

    def _singularity_distance(self, x):
        return np.linalg.norm(x, axis=-1)

    def describe(self):
        return f"radial:a={self.a}"


@dataclass(frozen=True)
class RotationTwist(Mapping):
    """Rotate the (x1, x2)-plane by the radius-dependent angle log(x1^2+x2^2).

    Volume preserving (det = 1 everywhere); singular on the axis x1 = x2 = 0.
    Remaining coordinates are left unchanged.
    """

    def _eval(self, x):
        rho2 = x[..., 0] ** 2 + x[..., 1] ** 2
        th = np.log(rho2)
        c, s = np.cos(th), np.sin(th)
        out = x.copy()
        out[..., 0] = x[..., 0] * c - x[..., 1] * s
        out[..., 1] = x[..., 1] * c + x[..., 0] * s
        return out

    def _jacobian(self, x):
        n = x.shape[-1]
        x1, x2 = x[..., 0], x[..., 1]
        rho2 = x1 ** 2 + x2 ** 2
        th = np.log(rho2)
        c, s = np.cos(th), np.sin(th)
        J = np.zeros(x.shape[:-1] + (n, n))
        for i in range(2, n):
            J[..., i, i] = 1.0
        # d/dz [R(th(z)) z] = R(th) (I + (2/rho^2) (Jz) z^T), Jz = (-x2, x1)
        g = 2.0 / rho2
        m00 = 1.0 + g * (-x2) * x1
        m01 = g * (-x2) * x2
        m10 = g * x1 * x1
        m11 = 1.0 + g * x1 * x2
        J[..., 0, 0] = c * m00 - s * m10
        J[..., 0, 1] = c * m01 - s * m11
        J[..., 1, 0] = s * m00 + c * m10
        J[..., 1, 1] = s * m01 + c * m11
        return J

    def _singularity_distance(self, x):
        return np.hypot(x[..., 0], x[..., 1])

    def describe(self):
        return "twist"


@dataclass(frozen=True, eq=False)
class Linear(Mapping):
    """x -> A x for an invertible matrix A."""

    matrix: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("linear map needs a square matrix")
        if abs(np.linalg.det(A)) < 1e-300:
            raise ValueError("linear map matrix must be invertible")
        A = A.copy()
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    def _eval(self, x):
        return x @ self.matrix.T

    def _jacobian(self, x):
        n = x.shape[-1]
        return np.broadcast_to(self.matrix, x.shape[:-1] + (n, n)).copy()

    def describe(self):
        flat = ",".join(repr(float(v)) for v in self.matrix.ravel())
        return f"linear:{flat}"


@dataclass(frozen=True, eq=False)
class Composition(Mapping):
    """Apply the listed maps in order: stages[0] first."""

    stages: tuple

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages:
            raise ValueError("composition needs at least one stage")
        object.__setattr__(self, "stages", stages)

    def _eval(self, x):
        for m in self.stages:
            x = m(x)
        return x

    def _jacobian(self, x):
        J = None
        for m in self.stages:
            Jm = m.jacobian(x)
            J = Jm if J is None else Jm @ J
            x = m(x)
        return J

    def _singularity_distance(self, x):
        d = np.full(x.shape[:-1], np.inf)
        for m in self.stages:
            d = np.minimum(d, m._singularity_distance(x))
            if np.any(d < SINGULAR_EPS):
                break
            x = m._eval(x)
        return d

    def describe(self):
        return "compose:" + ";".join(m.describe() for m in self.stages)


def jacobian(mapping: Mapping, x, mode: str = "analytic", h: float | None = None):
    """Jacobian matrix and determinant at x.

    mode 'analytic' uses the exact derivative, 'fd' central differences with
    step h (default FD_STEP_SCALE * max(1, |x|)).
    """
    if mode == "analytic":
        J = mapping.jacobian(x)
    elif mode == "fd":
        J = mapping.jacobian_fd(x, h=h)
    else:
        raise ValueError(f"unknown jacobian mode {mode!r}")
    return J, np.linalg.det(J)


def parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError as exc:
        raise ValueError(f"bad vector {text!r}") from exc


def parse_map(spec: str) -> Mapping:
    """Parse the map mini-language.

    Forms: 'identity', 'radial:a=<float>', 'twist',
    'linear:<n^2 comma-separated floats, row-major>',
    'compose:<spec>;<spec>;...' (stages may not nest another compose).
    """
    spec = spec.strip()
    if spec == "identity":
        return Identity()
    if spec == "twist":
        return RotationTwist()
    if spec.startswith("radial:"):
        body = spec[len("radial:"):]
        if not body.startswith("a="):
            raise ValueError(f"radial map needs a=<float>, got {spec!r}")
        return RadialStretch(a=float(body[2:]))
    if spec.startswith("linear:"):
        vals = parse_vector(spec[len("linear:"):])
        n = int(round(len(vals) ** 0.5))
        if n * n != len(vals):
            raise ValueError(f"linear map needs n^2 entries, got {len(vals)}")
        return Linear(matrix=vals.reshape(n, n))
    if spec.startswith("compose:"):
        parts = [p for p in spec[len("compose:"):].split(";") if p.strip()]
        return Composition(stages=tuple(parse_map(p) for p in parts))
    raise ValueError(f"unknown map spec {spec!r}")
