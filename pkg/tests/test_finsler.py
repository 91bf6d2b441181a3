"""Tests for the fundamental-object tower.

Oracles:

* closed forms for the Euclidean, warped-flat and hyperbolic metrics
  (Christoffel symbols, sprays, nonlinear connection computed by hand);
* independent central finite differences on plain float evaluations of the
  norm (no shared AD code path) for the Randers metric;
* homogeneity and the Euler-type contraction identities every Finsler
  structure must satisfy;
* metric compatibility of the horizontal coefficients.
"""

import math

import numpy as np
import pytest

from finslerconn.ad import ChartJets
from finslerconn.expr import ExprScalarField
from finslerconn.finsler import (
    ChartPoint,
    DomainError,
    FinslerStructure,
    HilbertFormField,
    cartan_tensor,
    fundamental_tensor,
    geodesic_spray,
    hilbert_form,
    horizontal_christoffel,
    inverse_fundamental_tensor,
    nonlinear_connection,
)
from finslerconn.samples import (
    curved_three_dim,
    euclidean,
    hyperbolic,
    randers,
    warped_flat,
)

P2 = ChartPoint([0.3, -0.2], [0.7, 1.1])
P3 = ChartPoint([0.2, -0.3, 0.4], [0.9, 0.5, 1.2])


def _norm_value(F, x, y):
    """Plain float evaluation of L, bypassing all derivative machinery."""
    return float(F.norm.eval(ChartJets.at(x, y, 0)).val)


# ---------------------------------------------------------------------------
# closed-form oracles


def test_euclidean_is_flat():
    F = euclidean()
    assert np.allclose(fundamental_tensor(F, P2), np.eye(2), atol=1e-12)
    assert np.allclose(cartan_tensor(F, P2), 0.0, atol=1e-12)
    assert np.allclose(geodesic_spray(F, P2), 0.0, atol=1e-12)
    assert np.allclose(nonlinear_connection(F, P2), 0.0, atol=1e-12)
    assert np.allclose(horizontal_christoffel(F, P2), 0.0, atol=1e-12)
    ell = hilbert_form(F, P2)
    assert np.allclose(ell, P2.y / np.linalg.norm(P2.y), atol=1e-12)


def test_warped_flat_closed_forms():
    # L^2 = e^(2 x1) y1^2 + y2^2: metric diag(e^(2 x1), 1), and the only
    # nonzero Christoffel symbol is [1; 1 1] = 1
    F = warped_flat()
    p = ChartPoint([0.3, 0.5], [0.8, -0.4])
    g = fundamental_tensor(F, p)
    assert np.allclose(g, np.diag([math.exp(0.6), 1.0]), atol=1e-12)
    Gam = horizontal_christoffel(F, p)
    expected = np.zeros((2, 2, 2))
    expected[0, 0, 0] = 1.0
    assert np.allclose(Gam, expected, atol=1e-10)
    spray = geodesic_spray(F, p)
    assert spray[0] == pytest.approx(0.5 * p.y[0] ** 2, abs=1e-12)
    assert spray[1] == pytest.approx(0.0, abs=1e-12)
    N = nonlinear_connection(F, p)
    assert np.allclose(N, [[p.y[0], 0.0], [0.0, 0.0]], atol=1e-10)


def test_hyperbolic_closed_forms():
    # a = diag(1, e^(2 x1)): Christoffels [1; 2 2] = -e^(2 x1), [2; 1 2] = 1
    F = hyperbolic()
    p = ChartPoint([0.4, -0.1], [0.6, 0.9])
    e2x = math.exp(0.8)
    assert np.allclose(fundamental_tensor(F, p), np.diag([1.0, e2x]), atol=1e-12)
    Gam = horizontal_christoffel(F, p)
    expected = np.zeros((2, 2, 2))
    expected[0, 1, 1] = -e2x
    expected[1, 0, 1] = expected[1, 1, 0] = 1.0
    assert np.allclose(Gam, expected, atol=1e-10)
    spray = geodesic_spray(F, p)
    assert spray[0] == pytest.approx(-0.5 * e2x * p.y[1] ** 2, abs=1e-11)
    assert spray[1] == pytest.approx(p.y[0] * p.y[1], abs=1e-11)
    N = nonlinear_connection(F, p)
    assert np.allclose(
        N, [[0.0, -e2x * p.y[1]], [p.y[1], p.y[0]]], atol=1e-10
    )


def test_riemannian_cartan_tensor_vanishes():
    for F in (hyperbolic(), warped_flat(), curved_three_dim()):
        p = P2 if F.n == 2 else P3
        assert np.allclose(cartan_tensor(F, p), 0.0, atol=1e-11), F.name


# ---------------------------------------------------------------------------
# independent finite-difference oracles (Randers)


def test_fundamental_tensor_matches_finite_differences():
    F = randers()
    p = ChartPoint([0.25, -0.15], [0.9, 0.55])
    h = 1e-4

    def L2(dy):
        return _norm_value(F, p.x, p.y + dy) ** 2

    g_fd = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            ei = np.zeros(2)
            ej = np.zeros(2)
            ei[i] = h
            ej[j] = h
            g_fd[i, j] = 0.5 * (
                L2(ei + ej) - L2(ei - ej) - L2(-ei + ej) + L2(-ei - ej)
            ) / (4 * h * h)
    assert np.allclose(fundamental_tensor(F, p), g_fd, rtol=1e-6, atol=1e-7)


def test_cartan_tensor_matches_finite_differences():
    F = randers()
    p = ChartPoint([0.25, -0.15], [0.9, 0.55])
    h = 8e-4

    def g_at(dy):
        return fundamental_tensor(F, ChartPoint(p.x, p.y + dy))

    T_fd = np.zeros((2, 2, 2))
    for k in range(2):
        ek = np.zeros(2)
        ek[k] = h
        T_fd[:, :, k] = (g_at(ek) - g_at(-ek)) / (4 * h)  # T = (1/2) dg/dy
    assert np.allclose(cartan_tensor(F, p), T_fd, rtol=1e-5, atol=1e-7)


def test_spray_matches_finite_differences():
    F = randers()
    p = ChartPoint([0.25, -0.15], [0.9, 0.55])
    h = 1e-4
    n = 2

    def L2(dx, dy):
        return _norm_value(F, p.x + dx, p.y + dy) ** 2

    rhs = np.zeros(n)
    for l in range(n):
        el = np.zeros(n)
        el[l] = h
        dL2_dxl = (L2(el, 0) - L2(-el, 0)) / (2 * h)
        mixed = 0.0
        for m in range(n):
            em = np.zeros(n)
            em[m] = h
            cross = (
                L2(em, el) - L2(em, -el) - L2(-em, el) + L2(-em, -el)
            ) / (4 * h * h)
            mixed += p.y[m] * cross
        rhs[l] = mixed - dL2_dxl
    G_fd = 0.25 * inverse_fundamental_tensor(F, p) @ rhs
    assert np.allclose(geodesic_spray(F, p), G_fd, rtol=1e-6, atol=1e-7)


def test_nonlinear_connection_is_y_gradient_of_spray():
    F = randers()
    p = ChartPoint([0.25, -0.15], [0.9, 0.55])
    h = 1e-5
    N_fd = np.zeros((2, 2))
    for j in range(2):
        ej = np.zeros(2)
        ej[j] = h
        Gp = geodesic_spray(F, ChartPoint(p.x, p.y + ej))
        Gm = geodesic_spray(F, ChartPoint(p.x, p.y - ej))
        N_fd[:, j] = (Gp - Gm) / (2 * h)
    assert np.allclose(nonlinear_connection(F, p), N_fd, rtol=1e-6, atol=1e-6)


# ---------------------------------------------------------------------------
# homogeneity and Euler identities


ALL_SAMPLES = [euclidean(), hyperbolic(), randers(), warped_flat(), curved_three_dim()]


@pytest.mark.parametrize("F", ALL_SAMPLES, ids=lambda F: F.name)
def test_homogeneity_degrees(F):
    p = P2 if F.n == 2 else P3
    lam = 1.7
    q = ChartPoint(p.x, lam * p.y)
    L_p = _norm_value(F, p.x, p.y)
    L_q = _norm_value(F, q.x, q.y)
    assert L_q == pytest.approx(lam * L_p, rel=1e-9)
    assert np.allclose(fundamental_tensor(F, q), fundamental_tensor(F, p), atol=1e-9)
    assert np.allclose(
        cartan_tensor(F, q), cartan_tensor(F, p) / lam, atol=1e-9
    )
    assert np.allclose(geodesic_spray(F, q), lam**2 * geodesic_spray(F, p), atol=1e-8)
    assert np.allclose(
        nonlinear_connection(F, q), lam * nonlinear_connection(F, p), atol=1e-8
    )
    assert np.allclose(
        horizontal_christoffel(F, q), horizontal_christoffel(F, p), atol=1e-8
    )


@pytest.mark.parametrize("F", ALL_SAMPLES, ids=lambda F: F.name)
def test_euler_contractions(F):
    p = P2 if F.n == 2 else P3
    y = p.y
    L = _norm_value(F, p.x, p.y)
    g = fundamental_tensor(F, p)
    T = cartan_tensor(F, p)
    ell = hilbert_form(F, p)
    assert ell @ y == pytest.approx(L, rel=1e-12)
    assert y @ g @ y == pytest.approx(L**2, rel=1e-12)
    assert np.allclose(g @ y / L, ell, atol=1e-11)
    assert np.allclose(np.einsum("ijk,k->ij", T, y), 0.0, atol=1e-10)
    assert np.allclose(np.einsum("ijk,j->ik", T, y), 0.0, atol=1e-10)
    N = nonlinear_connection(F, p)
    G = geodesic_spray(F, p)
    assert np.allclose(N @ y, 2.0 * G, atol=1e-9)
    Gam = horizontal_christoffel(F, p)
    assert np.allclose(np.einsum("ijk,j,k->i", Gam, y, y), 2.0 * G, atol=1e-9)
    # the spray-compatible horizontal coefficients also contract to N
    assert np.allclose(np.einsum("ijk,k->ij", Gam, y), N, atol=1e-9)


@pytest.mark.parametrize("F", ALL_SAMPLES, ids=lambda F: F.name)
def test_horizontal_coefficients_are_metric_compatible(F):
    # delta_j g_kl = Gamma^m_(jk) g_ml + Gamma^m_(jl) g_km
    p = P2 if F.n == 2 else P3
    tw = F.tower(p, 4)
    g = tw.g.val
    Gam = tw.Gamma.val
    for j in range(F.n):
        Dg = tw.delta(tw.g, j).val
        rhs = np.einsum("mk,ml->kl", Gam[:, j, :], g) + np.einsum(
            "ml,mk->kl", Gam[:, j, :], g
        )
        assert np.allclose(Dg, rhs, atol=1e-10), (F.name, j)
    assert np.allclose(Gam, np.swapaxes(Gam, 1, 2), atol=1e-12)


# ---------------------------------------------------------------------------
# domain errors and validation


def test_zero_section_rejected():
    with pytest.raises(DomainError):
        ChartPoint([0.1, 0.2], [0.0, 0.0])


def test_negative_norm_rejected():
    F = FinslerStructure(2, ExprScalarField(2, "y1"))
    with pytest.raises(DomainError, match="positive"):
        F.tower(ChartPoint([0.0, 0.0], [-1.0, 0.5]), 2).L


def test_quartic_norm_fails_convexity():
    # L = (y1^4 + y2^4)^(1/4) is positive and 1-homogeneous, but its
    # fundamental tensor degenerates on the axes
    F = FinslerStructure(2, ExprScalarField(2, "(y1^4 + y2^4)^(1/4)"))
    with pytest.raises(DomainError, match="positive definite"):
        F.tower(ChartPoint([0.0, 0.0], [1.0, 0.0]), 2).g


def test_validate_at_catches_wrong_homogeneity():
    F = FinslerStructure(2, ExprScalarField(2, "y1^2 + y2^2"))
    with pytest.raises(DomainError, match="homogeneous"):
        F.validate_at(ChartPoint([0.0, 0.0], [1.0, 1.0]))


def test_validate_at_accepts_samples():
    for F in ALL_SAMPLES:
        F.validate_at(P2 if F.n == 2 else P3)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        euclidean().tower(P3, 2)


# ---------------------------------------------------------------------------
# tower plumbing


def test_tower_is_cached_per_point_and_order():
    F = randers()
    assert F.tower(P2, 4) is F.tower(P2, 4)
    assert F.tower(P2, 4) is not F.tower(P2, 5)
    other = ChartPoint(P2.x, P2.y + 0.1)
    assert F.tower(P2, 4) is not F.tower(other, 4)


def test_hilbert_form_field_matches_tower():
    F = randers()
    field = HilbertFormField(F.norm, F.n)
    jets = ChartJets.at(P2.x, P2.y, 2)
    assert np.allclose(field.eval(jets).val, hilbert_form(F, P2), atol=1e-13)


def test_value_helpers_return_copies():
    F = randers()
    a = fundamental_tensor(F, P2)
    a[0, 0] = 99.0
    assert fundamental_tensor(F, P2)[0, 0] != 99.0
