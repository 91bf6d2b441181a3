"""Deformations of the metric connection by six parameter fields.

A deformation is specified by two scalar weights ``f1, f2``, three one-forms
``A, B, u`` and an endomorphism field ``phi`` on the chart (all may depend on
position and direction).  From these the module constructs the unique regular
connection triple ``(N', H', V')`` that

* keeps the vertical coefficients of the metric connection (``V' = T``) and
  stays vertically metric-compatible,
* has the prescribed horizontal metric deficit
  ``2 f1 A_j g_kl + f2 (B_k g_lj + B_l g_jk)``,
* has quarter-symmetric horizontal torsion ``u_k phi^i_j - u_j phi^i_k``.

Setting all six parameters to zero recovers the metric connection exactly.

The construction runs through three derived objects, each exposed here:

* :func:`tautological_shift` -- the vertical displacement of the canonical
  spray,
* :func:`frame_shift` -- the tilt of each horizontal frame leg, so the
  deformed nonlinear connection is ``N - frame_shift``,
* :func:`difference_tensor` -- the remaining correction to the horizontal
  coefficients beyond the tilt.

:func:`horizontal_from_compatibility` rebuilds the horizontal coefficients
directly from the defining conditions by the Christoffel trick; because the
conditions pin the connection uniquely, that gives the verification suite a
second, independent route to every coefficient.  :func:`torsion_relations`
and :func:`curvature_relations` evaluate the residuals of the identities that
tie the deformed torsions and curvatures back to the metric ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ad import ChartJets, CovectorField, MatrixField, ScalarField, Series
from .ad import ConstantScalar, ZeroCovector, ZeroMatrix
from .connection import (
    CARTAN,
    Connection,
    cov_deriv,
    curvature_h,
    curvature_mixed,
    curvature_v,
    torsions,
)
from .finsler import ChartPoint, FinslerStructure, Tower

__all__ = [
    "DeformationParams",
    "DeformationData",
    "deformation_data",
    "build",
    "phi_split",
    "raise_covector",
    "tautological_shift",
    "frame_shift",
    "difference_tensor",
    "associated_spray",
    "associated_nonlinear",
    "horizontal_from_compatibility",
    "construction_residuals",
    "torsion_relations",
    "curvature_relations",
]


@dataclass(eq=False)
class DeformationParams:
    """The six defining fields of a deformation.

    ``f1`` and ``f2`` weigh the two metric-deficit shapes, ``A`` and ``B``
    are the one-forms appearing in them, ``u`` and ``phi`` prescribe the
    quarter-symmetric horizontal torsion.  All six are fields evaluated on
    chart jets, so constant and position/direction-dependent parameters are
    handled uniformly.
    """

    f1: ScalarField
    f2: ScalarField
    A: CovectorField
    B: CovectorField
    u: CovectorField
    phi: MatrixField
    name: str = ""

    @classmethod
    def zero(cls, n: int, name: str = "zero") -> "DeformationParams":
        """The trivial deformation: builds the metric connection itself."""
        return cls(
            f1=ConstantScalar(0.0),
            f2=ConstantScalar(0.0),
            A=ZeroCovector(n),
            B=ZeroCovector(n),
            u=ZeroCovector(n),
            phi=ZeroMatrix(n),
            name=name,
        )

    def describe(self) -> str:
        parts = []
        for label in ("f1", "f2", "A", "B", "u", "phi"):
            field = getattr(self, label)
            text = getattr(field, "describe", lambda: type(field).__name__)()
            parts.append(f"{label}={text}")
        return ", ".join(parts)


def _expect(series: Series, shape: tuple[int, ...], label: str) -> Series:
    if series.shape != shape:
        raise ValueError(
            f"parameter field {label} evaluated to shape {series.shape}, "
            f"expected {shape}"
        )
    return series


class DeformationData:
    """Every series one deformation needs, evaluated on one tower.

    Constructed through :func:`deformation_data` so repeated queries on the
    same tower share the work.  The attributes follow the construction
    stages: parameter values, split/raised forms, the two shift fields, the
    difference tensor, and finally the deformed coefficient triple.
    """

    def __init__(self, params: DeformationParams, t: Tower):
        self.params = params
        self.t = t
        n = t.n
        jets = t.jets
        self.eye = jets.const(np.eye(n))
        self.f1 = _expect(params.f1.eval(jets), (), "f1")
        self.f2 = _expect(params.f2.eval(jets), (), "f2")
        self.A = _expect(params.A.eval(jets), (n,), "A")
        self.B = _expect(params.B.eval(jets), (n,), "B")
        self.u = _expect(params.u.eval(jets), (n,), "u")
        self.phi = _expect(params.phi.eval(jets), (n, n), "phi")

    # -- split and raised forms ----------------------------------------------

    @cached_property
    def gphi(self) -> Series:
        """Lowered endomorphism g(phi e_j, e_l), shape (n, n)."""
        return (self.phi[:, :, None] * self.t.g[:, None, :]).sum(axis=0)

    @cached_property
    def gphi1(self) -> Series:
        return 0.5 * (self.gphi + self.gphi.transpose(1, 0))

    @cached_property
    def gphi2(self) -> Series:
        return 0.5 * (self.gphi - self.gphi.transpose(1, 0))

    @cached_property
    def phi1(self) -> Series:
        """g-symmetric part of phi (an endomorphism again), shape (n, n)."""
        return (self.t.gi[:, None, :] * self.gphi1[None, :, :]).sum(axis=2)

    @cached_property
    def phi2(self) -> Series:
        """g-antisymmetric part of phi, shape (n, n)."""
        return (self.t.gi[:, None, :] * self.gphi2[None, :, :]).sum(axis=2)

    @cached_property
    def avec(self) -> Series:
        """The vector g-dual to A."""
        return (self.t.gi * self.A[None, :]).sum(axis=1)

    @cached_property
    def bvec(self) -> Series:
        return (self.t.gi * self.B[None, :]).sum(axis=1)

    @cached_property
    def uvec(self) -> Series:
        return (self.t.gi * self.u[None, :]).sum(axis=1)

    # -- tautological contractions -------------------------------------------

    @cached_property
    def A_eta(self) -> Series:
        return (self.A * self.t.ys).sum(axis=0)

    @cached_property
    def u_eta(self) -> Series:
        return (self.u * self.t.ys).sum(axis=0)

    @cached_property
    def phi1_eta(self) -> Series:
        return (self.phi1 * self.t.ys[None, :]).sum(axis=1)

    @cached_property
    def phi2_eta(self) -> Series:
        return (self.phi2 * self.t.ys[None, :]).sum(axis=1)

    @cached_property
    def w(self) -> Series:
        """(phi1 - phi2) applied to the tautological field."""
        return self.phi1_eta - self.phi2_eta

    @cached_property
    def ell_phi1(self) -> Series:
        """Covector l(phi1(e_k)), shape (n,)."""
        return (self.t.ell[:, None] * self.phi1).sum(axis=0)

    @cached_property
    def ell_phi1_eta(self) -> Series:
        return (self.t.ell * self.phi1_eta).sum(axis=0)

    # -- small contraction helpers -------------------------------------------

    def _tvec(self, v: Series) -> Series:
        """T^i_pj v^p, shape (n, n): the Cartan tensor eating one vector."""
        return (self.t.T_mix * v[None, :, None]).sum(axis=1)

    def _tlow(self, v: Series) -> Series:
        """T_pjk v^p, shape (n, n): lowered Cartan tensor eating one vector."""
        return (self.t.T_low * v[:, None, None]).sum(axis=0)

    @cached_property
    def S(self) -> Series:
        """Vertical curvature of the metric connection, shape (n, n, n, n)."""
        return curvature_v(CARTAN, self.t)

    def _s_second(self, v: Series) -> Series:
        """S(e_j, v) e_k as [i, j, k]: the vector fills the second argument."""
        contr = (self.S * v[None, None, None, :]).sum(axis=3)  # [i, k, j]
        return contr.transpose(0, 2, 1)

    def _s_first(self, v: Series) -> Series:
        """S(v, e_j) e_k as [i, j, k]; antisymmetry flips the sign."""
        return -self._s_second(v)

    # -- the three construction stages ---------------------------------------

    @cached_property
    def eta_shift(self) -> Series:
        """Vertical displacement of the canonical spray, shape (n,)."""
        t = self.t
        return (
            self.f1 * (2.0 * self.A_eta * t.ys - t.L2 * self.avec)
            + self.f2 * t.L2 * self.bvec
            + t.L * self.ell_phi1_eta * self.uvec
            - self.u_eta * self.w
        )

    @cached_property
    def frame_shift(self) -> Series:
        """Tilt of the j-th horizontal frame leg, shape (n, n) as [i, j]."""
        t = self.t
        ys, ell, L, L2 = t.ys, t.ell, t.L, t.L2
        return (
            self.f1
            * (
                ys[:, None] * self.A[None, :]
                + self.A_eta * self.eye
                - L * (self.avec[:, None] * ell[None, :])
                + L2 * self._tvec(self.avec)
            )
            + self.f2
            * (
                L * (self.bvec[:, None] * ell[None, :])
                - L2 * self._tvec(self.bvec)
            )
            - self.u_eta * self.phi1
            + self.u_eta * self._tvec(self.w)
            + L * (self.uvec[:, None] * self.ell_phi1[None, :])
            - L * self.ell_phi1_eta * self._tvec(self.uvec)
            + self.phi2_eta[:, None] * self.u[None, :]
        )

    @cached_property
    def difference(self) -> Series:
        """Difference tensor [i, j, k]: horizontal correction beyond the tilt.

        Slot j is the horizontal direction, slot k the vector acted on.  The
        whole tensor is what the deformed covariant derivative adds to the
        metric one after the frame tilt has been accounted for.
        """
        t = self.t
        g, ys, ell, L, L2 = t.g, t.ys, t.ell, t.L, t.L2
        a_block = (
            self.avec[:, None, None] * g[None, :, :]
            - self.A[None, :, None] * self.eye[:, None, :]
            - self.A[None, None, :] * self.eye[:, :, None]
            - L * (self._tvec(self.avec)[:, :, None] * ell[None, None, :])
            + ys[:, None, None] * self._tlow(self.avec)[None, :, :]
            + L2 * self._s_second(self.avec)
        )
        b_block = (
            self.bvec[:, None, None] * g[None, :, :]
            - L * (self._tvec(self.bvec)[:, :, None] * ell[None, None, :])
            + ys[:, None, None] * self._tlow(self.bvec)[None, :, :]
            + L2 * self._s_second(self.bvec)
        )
        tm1 = (self.t.T_mix[:, :, :, None] * self.phi1[None, :, None, :]).sum(axis=1)
        mt1 = (self.phi1[:, :, None, None] * self.t.T_mix[None, :, :, :]).sum(axis=1)
        return (
            self.f1 * a_block
            - self.f2 * b_block
            - (self.gphi1 + self._tlow(self.phi2_eta))[None, :, :]
            * self.uvec[:, None, None]
            - self.u[None, :, None] * self.phi2[:, None, :]
            + L * (self._tvec(self.uvec)[:, :, None] * self.ell_phi1[None, None, :])
            - self.u_eta * (self._s_first(self.w) + tm1 - mt1)
            + (self._tvec(self.phi2_eta) + self.phi1)[:, :, None] * self.u[None, None, :]
            + L * self.ell_phi1_eta * self._s_first(self.uvec)
            - self._tlow(self.uvec)[None, :, :] * self.phi1_eta[:, None, None]
        )

    # -- the deformed coefficient triple --------------------------------------

    @cached_property
    def nonlinear(self) -> Series:
        """Deformed nonlinear connection, shape (n, n)."""
        return self.t.N - self.frame_shift

    @cached_property
    def horizontal(self) -> Series:
        """Deformed horizontal coefficients, shape (n, n, n)."""
        tilt = (self.t.T_mix[:, :, None, :] * self.frame_shift[None, :, :, None]).sum(
            axis=1
        )
        return self.t.Gamma + tilt + self.difference

    @cached_property
    def spray(self) -> Series:
        """Deformed spray coefficients, shape (n,).

        Coefficient form of the spray the deformed nonlinear connection
        generates; the vector-field picture shifts the metric spray by the
        vertical lift of ``eta_shift``, which in coefficients (extracted
        from the ``-2 G^i`` slot) halves and flips the sign.
        """
        return self.t.G - 0.5 * self.eta_shift


def deformation_data(params: DeformationParams, t: Tower) -> DeformationData:
    """The (tower-cached) evaluation of a deformation at one point."""
    key = (params, "deformation-data")
    out = t.cache.get(key)
    if out is None:
        out = DeformationData(params, t)
        t.cache[key] = out
    return out


def build(params: DeformationParams) -> Connection:
    """The deformed connection as a coefficient triple.

    The returned object is cached on ``params``, so torsions and curvatures
    memoized per (connection, tower) pair are shared across call sites.
    """
    conn = params.__dict__.get("_connection")
    if conn is None:
        conn = Connection(
            name=params.name or "deformed",
            nlc=lambda t: deformation_data(params, t).nonlinear,
            hor=lambda t: deformation_data(params, t).horizontal,
            ver=lambda t: t.T_mix,
        )
        params.__dict__["_connection"] = conn
    return conn


# ---------------------------------------------------------------------------
# independent reconstruction from the defining conditions


def horizontal_from_compatibility(params: DeformationParams, t: Tower) -> Series:
    """Horizontal coefficients solved from the defining conditions alone.

    Uses only the nonlinear tilt plus the prescribed metric deficit and
    torsion, cycled through the Christoffel trick -- never the difference
    tensor -- so agreement with :func:`build` confirms both routes.
    """
    d = deformation_data(params, t)
    n = t.n
    g = t.g
    dg = Series.stack([t.delta(g, j) for j in range(n)])  # [j, k, l]
    tilt = 2.0 * (t.T_low[:, None, :, :] * d.frame_shift[:, :, None, None]).sum(axis=0)
    E = (
        dg
        + tilt
        - 2.0 * d.f1 * (d.A[:, None, None] * g[None, :, :])
        - d.f2
        * (
            d.B[None, :, None] * g.transpose(1, 0)[:, None, :]
            + d.B[None, None, :] * g[:, :, None]
        )
    )
    Q = d.u[None, :, None] * d.gphi[:, None, :] - d.u[:, None, None] * d.gphi[None, :, :]
    low = 0.5 * (
        E
        + E.transpose(2, 0, 1)
        - E.transpose(1, 2, 0)
        + Q
        - Q.transpose(0, 2, 1)
        - Q.transpose(2, 0, 1)
    )
    return (t.gi[:, None, None, :] * low[None, :, :, :]).sum(axis=3)


# ---------------------------------------------------------------------------
# value-level API


_ORDER = 4


def phi_split(
    params: DeformationParams, F: FinslerStructure, point: ChartPoint
) -> tuple[np.ndarray, np.ndarray]:
    """(phi1, phi2) at a point: the g-symmetric/antisymmetric split of phi."""
    d = deformation_data(params, F.tower(point, _ORDER))
    return d.phi1.val.copy(), d.phi2.val.copy()


def raise_covector(form, F: FinslerStructure, point: ChartPoint) -> np.ndarray:
    """g-dual vector of a one-form (a field or plain components) at a point."""
    t = F.tower(point, 2)
    if hasattr(form, "eval"):
        comps = form.eval(t.jets)
    else:
        comps = t.jets.const(np.asarray(form, dtype=float))
    comps = _expect(comps, (t.n,), "form")
    return (t.gi * comps[None, :]).sum(axis=1).val.copy()


def tautological_shift(
    params: DeformationParams, F: FinslerStructure, point: ChartPoint
) -> np.ndarray:
    """Vertical displacement of the canonical spray at a point, shape (n,)."""
    return deformation_data(params, F.tower(point, _ORDER)).eta_shift.val.copy()


def frame_shift(
    params: DeformationParams,
    F: FinslerStructure,
    point: ChartPoint,
    j: int | None = None,
) -> np.ndarray:
    """Horizontal frame tilt at a point: column j, or the full (n, n) matrix."""
    fs = deformation_data(params, F.tower(point, _ORDER)).frame_shift.val
    return fs.copy() if j is None else fs[:, j].copy()


def difference_tensor(
    params: DeformationParams,
    F: FinslerStructure,
    point: ChartPoint,
    j: int | None = None,
    Y=None,
) -> np.ndarray:
    """Difference tensor at a point: full [i, j, k], or applied to (e_j, Y)."""
    NT = deformation_data(params, F.tower(point, _ORDER)).difference.val
    if j is None and Y is None:
        return NT.copy()
    if j is None or Y is None:
        raise ValueError("pass both the frame index and the vector, or neither")
    return NT[:, j, :] @ np.asarray(Y, dtype=float)


def associated_spray(
    params: DeformationParams, F: FinslerStructure, point: ChartPoint
) -> np.ndarray:
    """Spray coefficients of the deformed connection at a point, shape (n,)."""
    return deformation_data(params, F.tower(point, _ORDER)).spray.val.copy()


def associated_nonlinear(
    params: DeformationParams, F: FinslerStructure, point: ChartPoint
) -> np.ndarray:
    """Deformed nonlinear connection at a point, shape (n, n).

    No homogeneity in y is asserted for position/direction-dependent
    parameters; the coefficients are reported as computed.
    """
    return deformation_data(params, F.tower(point, _ORDER)).nonlinear.val.copy()


# ---------------------------------------------------------------------------
# identity residuals


def _rel(diff: Series, *refs: Series) -> float:
    """Max-abs residual, relative to 1 + the largest participating value."""
    num = float(np.max(np.abs(diff.val))) if diff.shape else abs(float(diff.val))
    scale = 1.0 + max(
        (float(np.max(np.abs(r.val))) for r in refs if r.val.size), default=0.0
    )
    return num / scale


def construction_residuals(
    params: DeformationParams, F: FinslerStructure, point: ChartPoint
) -> dict[str, float]:
    """Internal consistency of the build at one point.

    * ``deflection``: contracting the horizontal coefficients with y must
      reproduce the nonlinear connection.
    * ``spray-from-nonlinear``: half the y-contraction of the nonlinear
      connection must reproduce the deformed spray.
    * ``spray-shift-consistency``: twice the spray displacement must equal
      the tautological shift.
    * ``shift-contraction``: the frame tilt contracted with y must equal the
      tautological shift.
    * ``compatibility-route``: the horizontal coefficients must match the
      Christoffel-trick reconstruction from the defining conditions.
    """
    t = F.tower(point, _ORDER)
    d = deformation_data(params, t)
    ys = t.ys
    defl = (d.horizontal * ys[None, None, :]).sum(axis=2)
    from_n = 0.5 * (d.nonlinear * ys[None, :]).sum(axis=1)
    compat = horizontal_from_compatibility(params, t)
    return {
        "deflection": _rel(defl - d.nonlinear, defl, d.nonlinear),
        "spray-from-nonlinear": _rel(from_n - d.spray, from_n, d.spray),
        "spray-shift-consistency": _rel(
            2.0 * (t.G - d.spray) - d.eta_shift, d.eta_shift, t.G
        ),
        "shift-contraction": _rel(
            (d.frame_shift * ys[None, :]).sum(axis=1) - d.eta_shift, d.eta_shift
        ),
        "compatibility-route": _rel(d.horizontal - compat, d.horizontal, compat),
    }


def torsion_relations(
    params: DeformationParams,
    F: FinslerStructure,
    point: ChartPoint,
    order: int = _ORDER,
) -> dict[str, float]:
    """Residuals of the five torsion identities at one point.

    Each row compares a torsion of the deformed connection, computed from
    its coefficients by the generic machinery, against its closed form in
    terms of metric-connection data and the shift fields:

    * ``hv-coincides``: the vertical torsion is the Cartan tensor.
    * ``hh-quarter-form``: the horizontal torsion is ``u_k phi^i_j - u_j
      phi^i_k``.
    * ``vv-vanishes``: the vertical antisymmetry torsion is zero.
    * ``vhv-shift-rule``: the deflection-type torsion differs from the
      metric one by the vertical derivative of the frame tilt plus the
      difference tensor.
    * ``vh-shift-rule``: the nonlinear-curvature torsion differs from the
      metric one by the frame brackets of the tilt.
    """
    t = F.tower(point, order)
    d = deformation_data(params, t)
    conn = build(params)
    n = t.n
    tb = torsions(conn, t)
    tc = torsions(CARTAN, t)
    fs = d.frame_shift

    quarter = (
        d.phi[:, :, None] * d.u[None, None, :] - d.phi[:, None, :] * d.u[None, :, None]
    )

    # vertical derivative of the tilt, with the Cartan tensor correction
    dyfs = Series.stack([fs.d(n + k) for k in range(n)], axis=2)  # [i, j, k]
    tfs = (t.T_mix[:, :, :, None] * fs[None, :, None, :]).sum(axis=1)  # [i, k, j]
    vhv_rhs = tc.vhv - (dyfs + tfs.transpose(0, 2, 1)) - d.difference

    # frame brackets of the tilt (all derivatives along the metric frame)
    dfs = Series.stack([t.delta(fs, a) for a in range(n)])  # [a, l, m]
    dN_y = Series.stack([t.N.d(n + m) for m in range(n)], axis=2)  # [l, j, m]
    dyfs_m = Series.stack([fs.d(n + m) for m in range(n)])  # [m, l, a]
    lean = (dN_y[:, :, :, None] * fs[None, None, :, :]).sum(axis=2)  # [l, j, k]
    drag = (dyfs_m[:, :, None, :] * fs[:, None, :, None]).sum(axis=0)  # [l, j, k]
    vh_rhs = (
        tc.vh
        + dfs.transpose(1, 0, 2)  # delta_j fs[l, k]
        + lean
        - dfs.transpose(1, 2, 0)  # delta_k fs[l, j]
        - lean.transpose(0, 2, 1)
        + drag
        - drag.transpose(0, 2, 1)
    )

    return {
        "hv-coincides": _rel(tb.hv - t.T_mix, tb.hv),
        "hh-quarter-form": _rel(tb.hh - quarter, tb.hh, quarter),
        "vv-vanishes": _rel(tb.vv, t.T_mix),
        "vhv-shift-rule": _rel(tb.vhv - vhv_rhs, tb.vhv, vhv_rhs),
        "vh-shift-rule": _rel(tb.vh - vh_rhs, tb.vh, vh_rhs),
    }


def curvature_relations(
    params: DeformationParams,
    F: FinslerStructure,
    point: ChartPoint,
    order: int = 5,
) -> dict[str, float]:
    """Residuals of the three curvature identities at one point.

    * ``v-curvature-coincides``: the vertical curvatures agree (both are
      built from the shared vertical coefficients).
    * ``hv-curvature-expansion``: the deformed mixed curvature equals the
      metric one plus the vertical covariant derivative of the difference
      tensor, a Cartan-tensor contraction of it, and a vertical-curvature
      term fed by the frame tilt.
    * ``h-curvature-expansion``: the deformed horizontal curvature equals
      the metric one plus mixed/vertical curvatures fed by the tilt and an
      alternated block of derivative and quadratic difference-tensor terms.
    """
    t = F.tower(point, order)
    d = deformation_data(params, t)
    conn = build(params)
    NT = d.difference
    fs = d.frame_shift
    S = curvature_v(CARTAN, t)
    P = curvature_mixed(CARTAN, t)
    R = curvature_h(CARTAN, t)

    rows: dict[str, float] = {}
    Sd = curvature_v(conn, t)
    rows["v-curvature-coincides"] = _rel(Sd - S, Sd, S)

    covNv = cov_deriv(CARTAN, t, NT, horizontal=False)  # [l, i, j, m]
    Pd = curvature_mixed(conn, t)
    nt_tm = (NT[:, :, :, None, None] * t.T_mix[None, :, None, :, :]).sum(axis=1)
    hv_rhs = (
        P
        + covNv.transpose(1, 3, 2, 0)  # vertical derivative along k
        + nt_tm.transpose(0, 1, 3, 2)  # NT[i, p, m] T^p_kj
        + (S[:, :, :, None, :] * fs[None, None, :, :, None]).sum(axis=2)
    )
    rows["hv-curvature-expansion"] = _rel(Pd - hv_rhs, Pd, hv_rhs)

    covNh = cov_deriv(CARTAN, t, NT, horizontal=True)  # [l, i, j, m]
    Rd = curvature_h(conn, t)
    p_fs = (P[:, :, :, :, None] * fs[None, None, None, :, :]).sum(axis=3)  # [i,m,a,b]
    s_fs = (S[:, :, :, None, :] * fs[None, None, :, :, None]).sum(axis=2)  # [i,m,j,q]
    s_fs2 = (s_fs[:, :, :, :, None] * fs[None, None, None, :, :]).sum(axis=3)
    b_vert = (covNv[:, :, :, :, None] * fs[:, None, None, None, :]).sum(axis=0)
    tilt_t = (t.T_mix[:, :, :, None] * fs[None, :, None, :]).sum(axis=1)  # [p, j, k]
    b_quad = (NT[:, :, :, None, None] * NT[None, None, :, :, :]).sum(axis=2)
    b_drag = (NT[:, :, :, None, None] * tilt_t[None, :, None, :, :]).sum(axis=1)
    block = (
        covNh.transpose(1, 3, 2, 0)
        + b_vert.transpose(0, 2, 1, 3)
        + b_quad.transpose(0, 3, 2, 1)
        + b_drag
    )
    h_rhs = (
        R
        + p_fs
        - p_fs.transpose(0, 1, 3, 2)
        + s_fs2
        + block
        - block.transpose(0, 1, 3, 2)
    )
    rows["h-curvature-expansion"] = _rel(Rd - h_rhs, Rd, h_rhs)
    return rows
