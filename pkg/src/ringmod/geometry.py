"""Ring and semiring geometries and their exact conformal moduli.

Three shapes are supported, all with modulus log(r1/r0):

* ``Annulus``      -- {x : r0 <= |x - c| <= r1}
* ``HalfSemiring`` -- {x in closed upper half-space : r0 <= |x - x0| <= r1}
  with the center x0 on the bounding hyperplane,
* ``ApollonianSemiring`` -- {x in closed unit ball : r0 <= |x-xi|/|x+xi| <= r1}
  for a pole xi on the unit sphere.

Shapes are closed sets; boundary sample points are allowed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import sphere_area
from .maps import parse_vector


def _freeze(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float).copy()
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class Annulus:
    """Spherical ring {r0 <= |x - center| <= r1} in R^n."""

    n: int
    r0: float
    r1: float
    center: np.ndarray = None

    kind = "ring"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be >= 2")
        if not (0 < self.r0 < self.r1 < math.inf):
            raise ValueError(f"need 0 < r0 < r1, got ({self.r0}, {self.r1})")
        c = np.zeros(self.n) if self.center is None else np.asarray(self.center, float)
        if c.shape != (self.n,):
            raise ValueError("center has wrong dimension")
        if not np.all(np.isfinite(c)):
            raise ValueError("center must be finite")
        object.__setattr__(self, "center", _freeze(c))

    @property
    def x0(self) -> np.ndarray:
        return self.center


@dataclass(frozen=True, eq=False)
class HalfSemiring:
    """Half ring {x in H^n : r0 <= |x - x0| <= r1}, x0 on the boundary plane.

    The upper half-space H^n is {x : x_n >= 0}; x0 must have last
    coordinate exactly 0.
    """

    n: int
    r0: float
    r1: float
    center: np.ndarray = None

    kind = "semiring"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be >= 2")
        if not (0 < self.r0 < self.r1 < math.inf):
            raise ValueError(f"need 0 < r0 < r1, got ({self.r0}, {self.r1})")
        c = np.zeros(self.n) if self.center is None else np.asarray(self.center, float)
        if c.shape != (self.n,):
            raise ValueError("center has wrong dimension")
        if c[-1] != 0.0:
            raise ValueError("semiring center must lie on the boundary hyperplane x_n = 0")
        object.__setattr__(self, "center", _freeze(c))

    @property
    def x0(self) -> np.ndarray:
        return self.center


@dataclass(frozen=True, eq=False)
class ApollonianSemiring:
    """Region of the unit ball between two Apollonian spheres about +/- xi.

    The level sets |x - xi| / |x + xi| = const for |xi| = 1 foliate the ball;
    the shape collects levels in [r0, r1] with 0 < r0 < r1 < inf.
    """

    n: int
    r0: float
    r1: float
    pole: np.ndarray = None

    kind = "semiring"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("dimension must be >= 2")
        if not (0 < self.r0 < self.r1 < math.inf):
            raise ValueError(f"need 0 < r0 < r1 < inf, got ({self.r0}, {self.r1})")
        p = np.zeros(self.n) if self.pole is None else np.asarray(self.pole, float)
        if self.pole is None:
            p[0] = 1.0
        if p.shape != (self.n,):
            raise ValueError("pole has wrong dimension")
        nrm = np.linalg.norm(p)
        if abs(nrm - 1.0) > 1e-6:
            raise ValueError(f"pole must lie on the unit sphere, |xi| = {nrm}")
        object.__setattr__(self, "pole", _freeze(p / nrm))

    @property
    def x0(self) -> np.ndarray:
        return self.pole


Shape = Annulus | HalfSemiring | ApollonianSemiring


def exact_modulus(shape: Shape) -> float:
    """Conformal modulus; equals log(r1/r0) for every supported shape."""
    return math.log(shape.r1 / shape.r0)


def gamma_family_modulus(shape: Shape) -> float:
    """Exact modulus of the family of curves connecting the two boundaries.

    Rings give omega_{n-1} * (log(r1/r0))^(1-n); the semiring kinds carry the
    extra factor 1/2 from reflecting across the flat boundary.
    """
    m = exact_modulus(shape)
    half = 0.5 if shape.kind == "semiring" else 1.0
    return half * sphere_area(shape.n) * m ** (1 - shape.n)


def _parse_kv(body: str):
    """Split 'k=v,k=v,vec=1,2,3' honoring trailing bare components of vectors."""
    out: dict[str, str] = {}
    current_vec = None
    for tok in body.split(","):
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k.strip()] = v
            current_vec = k.strip() if k.strip() in ("c", "x0", "xi") else None
        elif current_vec is not None:
            out[current_vec] += "," + tok
        else:
            raise ValueError(f"stray token {tok!r} in shape spec")
    return out


def parse_shape(spec: str) -> Shape:
    """Parse the shape mini-language.

    Forms: 'annulus:n=<int>,r0=<f>,r1=<f>[,c=<vec>]',
    'semiring:n=<int>,r=<f>,R=<f>[,x0=<vec>]',
    'apollonian:n=<int>,r0=<f>,r1=<f>,xi=<vec>'.  Vectors are comma-separated
    floats and must come last.
    """
    spec = spec.strip()
    head, _, body = spec.partition(":")
    kv = _parse_kv(body)
    try:
        if head == "annulus":
            c = parse_vector(kv["c"]) if "c" in kv else None
            return Annulus(n=int(kv["n"]), r0=float(kv["r0"]), r1=float(kv["r1"]), center=c)
        if head == "semiring":
            c = parse_vector(kv["x0"]) if "x0" in kv else None
            return HalfSemiring(n=int(kv["n"]), r0=float(kv["r"]), r1=float(kv["R"]), center=c)
        if head == "apollonian":
            p = parse_vector(kv["xi"]) if "xi" in kv else None
            return ApollonianSemiring(n=int(kv["n"]), r0=float(kv["r0"]), r1=float(kv["r1"]), pole=p)
    except KeyError as exc:
        raise ValueError(f"shape spec {spec!r} is missing key {exc}") from None
    raise ValueError(f"unknown shape kind {head!r}")
