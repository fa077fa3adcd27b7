"""Planar ring special functions and the dimension-n constant bounds.

The planar quantities are exact, built on the arithmetic-geometric mean:

* ``elliptic_K(k)``       complete elliptic integral of the first kind,
* ``grotzsch_mu(r)``      modulus of the ring between the unit circle and the
                          radial slit [1/r, inf), i.e. mu(r) = (pi/2) K'/K,
* ``mo_grotzsch2(s)``     planar extremal ring modulus mu(1/s), s > 1,
* ``mo_teichmuller2(t)``  = 2 mu(1/sqrt(t+1)), via the classical identity
                          linking the two extremal rings,
* ``compute_A2()``        the supremum over t > 1 of mo_teichmuller2(t) - log t
                          (known to be pi; recovered numerically here).

For n >= 3 no closed forms exist; ``constants_for`` returns the standard
bounds 4 <= lambda_n <= 2^(n/(n-1)) e^(n(n-2)/(n-1)) and the derived upper
bound A_n <= log((3 + 2 sqrt 2) lambda_n^2 / 4), plus Q_n = 4 exp(A_n / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_AGM_REL_TOL = 1e-15
_AGM_MAX_ITER = 60


def _agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean; quadratic convergence makes 60 iterations safe."""
    for _ in range(_AGM_MAX_ITER):
        if abs(a - b) < _AGM_REL_TOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def elliptic_K(k: float) -> float:
    """Complete elliptic integral of the first kind, 0 <= k < 1.

    K(k) = agm-based evaluation of the integral of (1 - k^2 sin^2 t)^(-1/2)
    over [0, pi/2]; absolute error below 1e-12 away from k = 1.
    """
    if not 0.0 <= k < 1.0:
        raise ValueError(f"elliptic modulus must satisfy 0 <= k < 1, got {k}")
    kc = math.sqrt((1.0 - k) * (1.0 + k))
    return math.pi / (2.0 * _agm(1.0, kc))


def grotzsch_mu(r: float) -> float:
    """mu(r) for 0 < r <= 1, with mu(1) = 0.

    Evaluated as (pi/2) agm(1, r') / agm(1, r) with r' = sqrt(1 - r^2); this
    form avoids the catastrophic cancellation of K(sqrt(1-r^2)) at small r and
    stays accurate down to r ~ 1e-300.
    """
    if not 0.0 < r <= 1.0:
        raise ValueError(f"mu needs 0 < r <= 1, got {r}")
    if r == 1.0:
        return 0.0
    rc = math.sqrt((1.0 - r) * (1.0 + r))
    return (math.pi / 2.0) * _agm(1.0, rc) / _agm(1.0, r)


def mo_grotzsch2(s: float) -> float:
    """Planar modulus of the extremal ring separating |x|<=1 from [s, inf)."""
    if not s > 1.0:
        raise ValueError(f"need s > 1, got {s}")
    return grotzsch_mu(1.0 / s)


def mo_teichmuller2(t: float) -> float:
    """Planar modulus of the extremal ring separating [-1,0] from [t, inf)."""
    if not t > 0.0:
        raise ValueError(f"need t > 0, got {t}")
    return 2.0 * grotzsch_mu(1.0 / math.sqrt(t + 1.0))


def phi2(s: float) -> float:
    """exp(mo_grotzsch2(s)); behaves like 4s for large s."""
    return math.exp(mo_grotzsch2(s))


def psi2(t: float) -> float:
    """exp(mo_teichmuller2(t)); behaves like 16t for large t."""
    return math.exp(mo_teichmuller2(t))


@dataclass(frozen=True)
class A2Result:
    value: float
    argmax_t: float
    attained_at_boundary: bool
    method: str = "grid+golden-section on t = 1 + e^s"


def _gap2(t: float) -> float:
    return mo_teichmuller2(t) - math.log(t)


def compute_A2(grid_points: int = 161) -> A2Result:
    """Numerically maximize mo_teichmuller2(t) - log t over t in (1, inf).

    The substitution t = 1 + e^s with s in [-40, 40] compactifies the search;
    a coarse grid locates the maximum and golden-section refines it.  The
    maximum sits at the open boundary t -> 1+, where the gap tends to pi;
    that boundary supremum is reported with ``attained_at_boundary`` set.
    """
    s_lo, s_hi = -40.0, 40.0
    ss = [s_lo + i * (s_hi - s_lo) / (grid_points - 1) for i in range(grid_points)]
    vals = [_gap2(1.0 + math.exp(s)) for s in ss]
    i = max(range(grid_points), key=vals.__getitem__)

    a = ss[max(i - 1, 0)]
    b = ss[min(i + 1, grid_points - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = _gap2(1.0 + math.exp(c)), _gap2(1.0 + math.exp(d))
    for _ in range(200):
        if b - a < 1e-14:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _gap2(1.0 + math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _gap2(1.0 + math.exp(d))
    s_best = 0.5 * (a + b)
    t_best = 1.0 + math.exp(s_best)
    # the interval is open at t = 1; flag a supremum that sits on that edge
    at_boundary = (t_best - 1.0) < 1e-6 or i == 0
    return A2Result(value=_gap2(t_best), argmax_t=t_best, attained_at_boundary=at_boundary)


@dataclass(frozen=True)
class SpecialConstants:
    """lambda_n bounds, A_n (exact for n = 2, upper bound otherwise), and Q_n."""

    n: int
    lambda_lower: float
    lambda_upper: float
    a_value: float
    a_is_exact: bool
    q_value: float


def constants_for(n: int) -> SpecialConstants:
    """Constant bounds in dimension n.

    n = 2 returns the exact values lambda_2 = 4 and A_2 = pi.  For n >= 3 only
    the upper bounds are known; Q_n is computed from the A_n upper bound,
    which keeps every place Q_n is used conservative.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if n == 2:
        lam_lo = lam_hi = 4.0
        a = math.pi
        exact = True
    else:
        lam_lo = 4.0
        lam_hi = 2.0 ** (n / (n - 1.0)) * math.exp(n * (n - 2.0) / (n - 1.0))
        a = math.log((3.0 + 2.0 * math.sqrt(2.0)) * lam_hi ** 2 / 4.0)
        exact = False
    return SpecialConstants(
        n=n,
        lambda_lower=lam_lo,
        lambda_upper=lam_hi,
        a_value=a,
        a_is_exact=exact,
        q_value=4.0 * math.exp(a / 2.0),
    )
