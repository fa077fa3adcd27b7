import math

import numpy as np
import pytest

from ringmod import (
    Identity,
    IrregularPointError,
    Linear,
    RadialStretch,
    RotationTwist,
    directional_sample,
    matrix_dilatations,
    max_directional_stretch,
    min_directional_stretch,
)

SQ2 = math.sqrt(2.0)


def test_matrix_dilatations_examples():
    md = matrix_dilatations(np.eye(3))
    assert (md.norm, md.small, md.inner, md.outer, md.linear) == (1, 1, 1, 1, 1)
    md = matrix_dilatations(np.diag([2.0, 0.5]))
    assert md.norm == pytest.approx(2.0)
    assert md.small == pytest.approx(0.5)
    assert md.det_abs == pytest.approx(1.0)
    assert md.inner == pytest.approx(4.0)
    assert md.outer == pytest.approx(4.0)
    assert md.linear == pytest.approx(4.0)
    with pytest.raises(IrregularPointError):
        matrix_dilatations(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_twist_jacobian_coefficients():
    tw = RotationTwist()
    x = np.array([0.4, -0.7])
    md = matrix_dilatations(tw.jacobian(x))
    assert md.inner == pytest.approx((1 + SQ2) ** 2, abs=1e-9)
    assert md.outer == pytest.approx((1 + SQ2) ** 2, abs=1e-9)


def test_coefficient_chain_random():
    rng = np.random.default_rng(42)
    for n in (2, 3, 4):
        for _ in range(300):
            A = rng.standard_normal((n, n))
            if abs(np.linalg.det(A)) < 1e-6:
                continue
            md = matrix_dilatations(A)
            h = md.linear
            lo, hi = min(md.inner, md.outer), max(md.inner, md.outer)
            tol = 1e-9 * max(1.0, hi)
            assert h <= lo + tol
            assert lo <= h ** (n / 2.0) + tol
            assert h ** (n / 2.0) <= hi + tol
            assert hi <= h ** (n - 1.0) + tol


def test_min_stretch_closed_form_vs_sampling():
    rng = np.random.default_rng(3)
    th = np.arange(100_000) * (2 * math.pi / 100_000)
    H = np.stack([np.cos(th), np.sin(th)], axis=1)
    for _ in range(100):
        A = rng.standard_normal((2, 2))
        if abs(np.linalg.det(A)) < 1e-2:
            continue
        u = rng.standard_normal(2)
        u /= np.linalg.norm(u)
        dots = np.abs(H @ u)
        mask = dots > 1e-9
        sampled = np.min(np.linalg.norm(H[mask] @ A.T, axis=1) / dots[mask])
        assert min_directional_stretch(A, u) == pytest.approx(sampled, rel=1e-3)


def test_min_stretch_radial():
    a = 0.8
    u = np.array([1.0, 0.0])
    A = RadialStretch(a=a).jacobian(u)
    assert min_directional_stretch(A, u) == pytest.approx(a, abs=1e-12)


@pytest.mark.parametrize("a,expected", [
    (0.8, 0.8),                       # boundary maximum at h = u since a^2 > 1/2
    (0.5, 0.5773502691896258),        # interior maximum, value 1/sqrt(3)
])
def test_max_stretch_radial_cases(a, expected):
    u = np.array([1.0, 0.0])
    A = RadialStretch(a=a).jacobian(u)
    assert max_directional_stretch(A, u) == pytest.approx(expected, abs=1e-9)


def test_max_stretch_identity():
    u = np.array([0.0, 1.0])
    assert max_directional_stretch(np.eye(2), u) == pytest.approx(1.0, abs=1e-10)


def test_max_stretch_never_below_sampling():
    rng = np.random.default_rng(8)
    for n in (2, 3):
        dirs = rng.standard_normal((20_000, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        for _ in range(25):
            A = rng.standard_normal((n, n))
            u = rng.standard_normal(n)
            u /= np.linalg.norm(u)
            sampled = np.max(np.linalg.norm(dirs @ A.T, axis=1) * np.abs(dirs @ u))
            assert max_directional_stretch(A, u) >= sampled - 1e-9


def test_directional_sample_identity():
    s = directional_sample(Identity(), np.array([0.3, 0.4]), np.zeros(2))
    assert s.angular == pytest.approx(1.0)
    assert s.normal == pytest.approx(1.0)


def test_directional_sample_twist():
    s = directional_sample(RotationTwist(), np.array([0.5, 0.2]), np.zeros(2))
    assert s.jac_det == pytest.approx(1.0, abs=1e-12)
    assert s.angular == pytest.approx(1.0, abs=1e-8)
    # frozen oracle: dense sampling with 2e6 directions at this point
    assert s.max_stretch == pytest.approx(2.3237010677002248, abs=1e-8)


def test_directional_sample_radial():
    s = directional_sample(RadialStretch(a=0.8), np.array([1.0, 0.0]), np.zeros(2))
    assert s.angular == pytest.approx(1.25, abs=1e-10)
    assert s.normal == pytest.approx(0.8, abs=1e-9)


def test_directional_chains_random():
    rng = np.random.default_rng(12)
    for mapping in (RotationTwist(), RadialStretch(a=0.8), RadialStretch(a=1.5)):
        for _ in range(60):
            n = int(rng.integers(2, 4))
            x = rng.standard_normal(n)
            if np.linalg.norm(x[:2]) < 0.1 or np.linalg.norm(x) < 0.1:
                continue
            x0 = x + rng.standard_normal(n)
            if np.linalg.norm(x - x0) < 1e-6:
                continue
            s = directional_sample(mapping, x, x0)
            hi, ho = s.matrix.inner, s.matrix.outer
            tol = 1e-9 * max(1.0, hi)
            assert 1.0 / ho <= s.angular + tol
            assert s.angular <= hi + tol
            assert 1.0 / ho <= hi ** (1.0 / (1.0 - n)) + tol
            assert hi ** (1.0 / (1.0 - n)) <= s.normal + tol
            assert s.normal <= ho ** (1.0 / (n - 1.0)) + tol
            assert ho ** (1.0 / (n - 1.0)) <= hi + tol
            assert s.matrix.small <= s.min_stretch + tol
            assert s.max_stretch <= s.matrix.norm + tol
            # the stretch along the reference direction sits between the two
            along_u = np.linalg.norm(mapping.jacobian(x) @ s.u)
            assert s.min_stretch <= along_u + tol
            assert along_u <= s.max_stretch + tol


def test_rotation_invariance():
    rng = np.random.default_rng(21)
    A = rng.standard_normal((3, 3))
    u = rng.standard_normal(3)
    u /= np.linalg.norm(u)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    assert min_directional_stretch(Q @ A, u) == pytest.approx(
        min_directional_stretch(A, u), abs=1e-10)
    assert max_directional_stretch(Q @ A, u) == pytest.approx(
        max_directional_stretch(A, u), abs=1e-10)


def test_conformal_gives_unit_dilatations():
    rng = np.random.default_rng(77)
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    mapping = Linear(matrix=2.5 * Q)
    s = directional_sample(mapping, np.array([1.0, 2.0, -1.0]), np.zeros(3))
    assert s.angular == pytest.approx(1.0, abs=1e-10)
    assert s.normal == pytest.approx(1.0, abs=1e-9)


def test_irregular_points_refused():
    with pytest.raises(ValueError):
        directional_sample(Identity(), np.array([1.0, 1.0]), np.array([1.0, 1.0]))
    flip = Linear(matrix=np.diag([1.0, -1.0]))    # orientation-reversing
    with pytest.raises(IrregularPointError):
        directional_sample(flip, np.array([1.0, 0.5]), np.zeros(2))
