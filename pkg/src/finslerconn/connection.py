"""Generic machinery for Finsler connections given by coefficient triples.

A connection here is a triple of coefficient fields ``(N, H, V)`` on the
slit tangent bundle: a nonlinear connection ``N^i_j``, horizontal
coefficients ``H^i_jk`` and vertical coefficients ``V^i_jk``, each produced
from a :class:`~finslerconn.finsler.Tower` on demand.  The index layout is
fixed throughout the package::

    H[i, j, k]  --  output component i, direction j, argument k
    (the covariant derivative of the k-th frame field along the j-th
    horizontal frame field has i-th component H[i, j, k])

and curvature-type tensors are stored as ``C[i, m, j, k]``: output ``i``,
value slot ``m``, then the two argument slots ``j, k`` (for the mixed
curvature ``j`` is the horizontal one).  The curvature convention is

    K(X, Y)Z = D_Y D_X Z - D_X D_Y Z + D_[X,Y] Z,

whose Riemannian limit has ``K(e_j, e_k) e_m`` equal to *minus* the
classical Riemann tensor ``R^i_mjk``; the trace convention of
:func:`ricci` is chosen so it reduces to the classical Ricci tensor.

Everything returns :class:`~finslerconn.ad.Series`, so results can be
differentiated further (covariant derivatives of curvature for the second
Bianchi identities, for instance).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ad import ChartJets, Series
from .finsler import ChartPoint, FinslerStructure, Tower

__all__ = [
    "Connection",
    "CARTAN",
    "TorsionBundle",
    "contract_index",
    "nonlinear_curvature",
    "torsions",
    "curvature_h",
    "curvature_mixed",
    "curvature_v",
    "contract_value_slot",
    "cov_deriv",
    "metric_deficit",
    "ricci",
    "RicciEndomorphism",
]


@dataclass(eq=False)
class Connection:
    """A named coefficient triple; each part maps a tower to a series.

    Results are memoized on the tower, so repeated queries (torsions, then
    curvatures, then identity checks at the same point) pay once.
    """

    name: str
    nlc: Callable[[Tower], Series]
    hor: Callable[[Tower], Series]
    ver: Callable[[Tower], Series]

    def N(self, t: Tower) -> Series:
        return self._memo(t, "N", self.nlc)

    def H(self, t: Tower) -> Series:
        return self._memo(t, "H", self.hor)

    def V(self, t: Tower) -> Series:
        return self._memo(t, "V", self.ver)

    def _memo(self, t: Tower, slot: str, producer) -> Series:
        key = (self, slot)
        out = t.cache.get(key)
        if out is None:
            out = producer(t)
            t.cache[key] = out
        return out

    def delta(self, t: Tower, s: Series, j: int) -> Series:
        """Horizontal derivative of a series using this connection's N."""
        N = self.N(t)
        out = s.d(j)
        for m in range(t.n):
            out = out - N[m, j] * s.d(t.n + m)
        return out


CARTAN = Connection(
    name="cartan",
    nlc=lambda t: t.N,
    hor=lambda t: t.Gamma,
    ver=lambda t: t.T_mix,
)
"""The metric-compatible reference connection every deformation starts from."""


# ---------------------------------------------------------------------------
# small contraction helpers


def contract_index(A: Series, W: Series, axis: int) -> Series:
    """Contract ``A[i, p]`` against index ``axis`` of ``W``, in place.

    Returns a series shaped like ``W`` with that index replaced by ``i``.
    """
    nd = len(W.shape)
    perm = (axis,) + tuple(a for a in range(nd) if a != axis)
    Wt = W.transpose(*perm)
    expand = (slice(None), slice(None)) + (None,) * (nd - 1)
    res = (A[expand] * Wt[(None,)]).sum(axis=1)
    inv = tuple(int(i) for i in np.argsort(perm))
    return res.transpose(*inv)


def _pair(A: Series, B: Series) -> Series:
    """``A[i, k, l] B[l, j, m] -> out[i, m, j, k]`` (curvature product block)."""
    prod = (A[:, :, :, None, None] * B[None, None, :, :, :]).sum(axis=2)  # [i,k,j,m]
    return prod.transpose(0, 3, 2, 1)


def _with_value_slot(V: Series, C: Series) -> Series:
    """``V[i, l, m] C[l, j, k] -> out[i, m, j, k]`` (vertical payoff block)."""
    return (V[:, :, :, None, None] * C[None, :, None, :, :]).sum(axis=1)


def _alt(C: Series) -> Series:
    """Antisymmetrize a curvature-layout series in its two argument slots."""
    return C - C.transpose(0, 1, 3, 2)


# ---------------------------------------------------------------------------
# torsions


@dataclass(frozen=True)
class TorsionBundle:
    """The five torsion tensors of a connection triple, as series.

    * ``hh[i, j, k]``: horizontal antisymmetry ``H^i_jk - H^i_kj``
    * ``hv[i, j, k]``: the vertical coefficients themselves
    * ``vh[i, j, k]``: curvature of the nonlinear connection,
      ``delta_k N^i_j - delta_j N^i_k``
    * ``vhv[i, j, k]``: deflection-type torsion ``dN^i_j/dy_k - H^i_jk``
    * ``vv[i, j, k]``: vertical antisymmetry ``V^i_jk - V^i_kj``

    The ``vhv`` formula assumes the vertical coefficients annihilate the
    tautological field (true for every connection this package builds,
    where V is either the Cartan tensor or zero).
    """

    hh: Series
    hv: Series
    vh: Series
    vhv: Series
    vv: Series


def nonlinear_curvature(conn: Connection, t: Tower) -> Series:
    """``vh`` torsion: R[l, j, k] = delta_k N^l_j - delta_j N^l_k."""
    key = (conn, "nonlinear_curvature")
    out = t.cache.get(key)
    if out is None:
        N = conn.N(t)
        dN = Series.stack([conn.delta(t, N, j) for j in range(t.n)])  # [a, l, j]
        # delta_k N^l_j as [l, j, k], then antisymmetrize the argument slots
        D = dN.transpose(1, 2, 0)
        out = D - D.transpose(0, 2, 1)
        t.cache[key] = out
    return out


def torsions(conn: Connection, t: Tower) -> TorsionBundle:
    n = t.n
    H = conn.H(t)
    V = conn.V(t)
    N = conn.N(t)
    dyN = Series.stack([N.d(n + k) for k in range(n)], axis=2)  # [i, j, k]
    return TorsionBundle(
        hh=H - H.transpose(0, 2, 1),
        hv=V,
        vh=nonlinear_curvature(conn, t),
        vhv=dyN - H,
        vv=V - V.transpose(0, 2, 1),
    )


# ---------------------------------------------------------------------------
# curvatures


def curvature_h(conn: Connection, t: Tower) -> Series:
    """Horizontal curvature R[i, m, j, k] of the triple."""
    n = t.n
    H = conn.H(t)
    V = conn.V(t)
    dH = Series.stack([conn.delta(t, H, a) for a in range(n)])  # [a, i, j, m]
    A = dH.transpose(1, 3, 2, 0)  # A[i, m, j, k] = delta_k H^i_jm
    B = _pair(H, H)  # B[i, m, j, k] = H^i_kl H^l_jm
    return _alt(A) + _alt(B) + _with_value_slot(V, nonlinear_curvature(conn, t))


def curvature_mixed(conn: Connection, t: Tower) -> Series:
    """Mixed curvature P[i, m, j, k]; j is horizontal, k vertical."""
    n = t.n
    H = conn.H(t)
    V = conn.V(t)
    N = conn.N(t)
    dyH = Series.stack([H.d(n + a) for a in range(n)])  # [a, i, j, m]
    dV = Series.stack([conn.delta(t, V, a) for a in range(n)])  # [a, i, k, m]
    dyN = Series.stack([N.d(n + k) for k in range(n)], axis=2)  # [l, j, k]
    return (
        dyH.transpose(1, 3, 2, 0)  # dH^i_jm / dy_k
        + _pair(V, H)  # V^i_kl H^l_jm
        - dV.transpose(1, 3, 0, 2)  # delta_j V^i_km
        - _pair(H, V).transpose(0, 1, 3, 2)  # H^i_jl V^l_km
        + _with_value_slot(V, dyN)  # (dN^l_j/dy_k) V^i_lm
    )


def curvature_v(conn: Connection, t: Tower) -> Series:
    """Vertical curvature S[i, m, j, k] of the triple."""
    n = t.n
    V = conn.V(t)
    dyV = Series.stack([V.d(n + a) for a in range(n)])  # [a, i, j, m]
    A = dyV.transpose(1, 3, 2, 0)  # dV^i_jm / dy_k
    B = _pair(V, V)
    return _alt(A) + _alt(B)


def contract_value_slot(C: Series, t: Tower) -> Series:
    """Plug the tautological field into the value slot: C[i, m, j, k] y^m."""
    return (C * t.ys[None, :, None, None]).sum(axis=1)


# ---------------------------------------------------------------------------
# covariant derivatives


def cov_deriv(conn: Connection, t: Tower, W: Series, horizontal: bool) -> Series:
    """Covariant derivative of a (1, s) tensor-of-series, s >= 0.

    ``W`` has its upper index on axis 0 and lower indices after it.  The
    result gains a leading direction axis: ``out[l, i, a_1..a_s]``.
    """
    n = t.n
    C = conn.H(t) if horizontal else conn.V(t)
    nlow = len(W.shape) - 1
    rows = []
    for l in range(n):
        if horizontal:
            out = conn.delta(t, W, l)
        else:
            out = W.d(n + l)
        out = out + contract_index(C[:, l, :], W, 0)
        for s in range(nlow):
            out = out - contract_index(C.transpose(2, 1, 0)[:, l, :], W, 1 + s)
        rows.append(out)
    return Series.stack(rows)


def metric_deficit(conn: Connection, t: Tower, horizontal: bool) -> Series:
    """Covariant derivative of the fundamental tensor, out[j, k, l].

    Horizontal: ``delta_j g_kl - H^m_jk g_ml - H^m_jl g_km`` (with this
    connection's own nonlinear part inside delta); vertical analog with V
    and the fiber derivative.  Vanishing is metric compatibility.
    """
    n = t.n
    g = t.g
    C = conn.H(t) if horizontal else conn.V(t)
    rows = []
    for j in range(n):
        if horizontal:
            base = conn.delta(t, g, j)
        else:
            base = g.d(n + j)
        corr = (C.transpose(1, 0, 2)[j][:, :, None] * g[:, None, :]).sum(axis=0)
        rows.append(base - corr - corr.transpose(1, 0))
    return Series.stack(rows)


# ---------------------------------------------------------------------------
# traces


def ricci(conn: Connection, t: Tower) -> Series:
    """Horizontal Ricci trace ric[m, k] = sum_i R[i, m, k, i].

    Reduces to the classical Ricci tensor in the Riemannian limit.
    """
    R = curvature_h(conn, t)
    n = t.n
    rows = []
    for m in range(n):
        rows.append(
            Series.stack([
                sum((R[i, m, k, i] for i in range(n)), start=t.jets.const(0.0))
                for k in range(n)
            ])
        )
    return Series.stack(rows)


class RicciEndomorphism:
    """The Ricci trace of the reference metric connection, raised to an
    endomorphism with the inverse fundamental tensor.

    Usable as a matrix field input wherever a curvature-derived
    endomorphism is wanted.
    """

    def __init__(self, structure: FinslerStructure):
        self.structure = structure
        self.n = structure.n

    def eval(self, jets: ChartJets) -> Series:
        point = ChartPoint(jets.x0, jets.y0)
        t = self.structure.tower(point, jets.ring.order)
        ric = ricci(CARTAN, t)
        return (t.gi[:, :, None] * ric[None, :, :]).sum(axis=1)

    def describe(self) -> str:
        return "metric Ricci endomorphism"
