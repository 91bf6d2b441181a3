"""Matsumoto processes and the four-connection family of a deformation.

Two classical transformations act on connection triples:

* the **P1-process** grafts the deflection-type torsion onto the horizontal
  coefficients (argument order swapped, so the torsion's first slot receives
  the vector being differentiated),
* the **C-process** strips the vertical coefficients by their own torsion,
  which for every connection here zeroes them.

Applying them to a deformed connection produces a commuting square of four
connections sharing one nonlinear part -- the deformation-level analog of
the classical square Cartan / Hashiguchi / Chern-Rund / Berwald, to which
the whole family collapses when the six parameters vanish.

:func:`diagram_residuals` evaluates every edge of that picture at a point:
the four process edges of the deformed square, the four process edges of
the classical square (whose targets are built independently from tower
data), and the five collapse edges joining the two squares under zero
parameters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ad import Series
from .connection import CARTAN, Connection, torsions
from .deformation import DeformationParams, build, deformation_data
from .finsler import ChartPoint, FinslerStructure, Tower

__all__ = [
    "HASHIGUCHI",
    "CHERN_RUND",
    "BERWALD",
    "CLASSICAL",
    "ConnectionFamily",
    "p1_process",
    "c_process",
    "derive_family",
    "berwald_coefficients",
    "diagram_residuals",
]


def berwald_coefficients(t: Tower) -> Series:
    """Fiber derivative of the nonlinear connection, [i, j, k] = dN^i_j/dy^k.

    Symmetric in (j, k) because N is itself a fiber derivative of the spray.
    """
    return Series.stack([t.N.d(t.n + k) for k in range(t.n)], axis=2)


HASHIGUCHI = Connection(
    name="hashiguchi",
    nlc=lambda t: t.N,
    hor=berwald_coefficients,
    ver=lambda t: t.T_mix,
)
"""Classical target of the P1-process applied to the metric connection."""

CHERN_RUND = Connection(
    name="chern-rund",
    nlc=lambda t: t.N,
    hor=lambda t: t.Gamma,
    ver=lambda t: 0.0 * t.T_mix,
)
"""Classical target of the C-process applied to the metric connection."""

BERWALD = Connection(
    name="berwald",
    nlc=lambda t: t.N,
    hor=berwald_coefficients,
    ver=lambda t: 0.0 * t.T_mix,
)
"""Classical target of both processes composed, in either order."""

CLASSICAL = {
    "cartan": CARTAN,
    "hashiguchi": HASHIGUCHI,
    "chern-rund": CHERN_RUND,
    "berwald": BERWALD,
}


def p1_process(conn: Connection) -> Connection:
    """Add the deflection-type torsion to the horizontal coefficients.

    The torsion enters with its arguments swapped -- its first slot takes
    the vector being differentiated -- so the new coefficients are
    ``H^i_jk + (dN^i_k/dy^j - H^i_kj)``.  The nonlinear and vertical parts
    are untouched.  On the metric connection this lands exactly on the
    Hashiguchi connection, which pins the argument order.
    """

    def hor(t: Tower) -> Series:
        return conn.H(t) + torsions(conn, t).vhv.transpose(0, 2, 1)

    return Connection(name=f"p1({conn.name})", nlc=conn.nlc, hor=hor, ver=conn.ver)


def c_process(conn: Connection) -> Connection:
    """Subtract its own vertical torsion from the vertical coefficients.

    For every connection in this module the vertical torsion coincides with
    the vertical coefficients, so the result has vertical part zero.  The
    nonlinear and horizontal parts are untouched.
    """

    def ver(t: Tower) -> Series:
        return conn.V(t) - torsions(conn, t).hv

    return Connection(name=f"c({conn.name})", nlc=conn.nlc, hor=conn.hor, ver=ver)


@dataclass(eq=False)
class ConnectionFamily:
    """The four connections one deformation generates, sharing one N.

    ``base`` is the deformed connection itself; the other three arise from
    it by the two processes.  ``berwald`` is defined as the C-process of
    ``hashiguchi``; that it equals the P1-process of ``chern_rund`` is the
    commuting-square statement checked by :func:`diagram_residuals`.
    """

    base: Connection
    hashiguchi: Connection
    chern_rund: Connection
    berwald: Connection

    def members(self):
        return (
            ("base", self.base),
            ("hashiguchi", self.hashiguchi),
            ("chern-rund", self.chern_rund),
            ("berwald", self.berwald),
        )


def derive_family(params: DeformationParams) -> ConnectionFamily:
    """Build the deformed connection and its three process derivatives."""
    family = params.__dict__.get("_family")
    if family is None:
        base = build(params)
        hashiguchi = p1_process(base)
        family = ConnectionFamily(
            base=base,
            hashiguchi=hashiguchi,
            chern_rund=c_process(base),
            berwald=c_process(hashiguchi),
        )
        params.__dict__["_family"] = family
    return family


# ---------------------------------------------------------------------------
# the full diagram at a point


def _rel(diff: Series, *refs: Series) -> float:
    num = float(np.max(np.abs(diff.val)))
    scale = 1.0 + max(
        (float(np.max(np.abs(r.val))) for r in refs if r.val.size), default=0.0
    )
    return num / scale


def _triple_residual(got: Connection, want: Connection, t: Tower) -> float:
    return max(
        _rel(got.N(t) - want.N(t), want.N(t)),
        _rel(got.H(t) - want.H(t), want.H(t)),
        _rel(got.V(t) - want.V(t), want.V(t)),
    )


def diagram_residuals(
    params: DeformationParams,
    F: FinslerStructure,
    point: ChartPoint,
    order: int = 4,
) -> dict[str, float]:
    """Residual of every edge of the two-square process diagram at a point.

    * ``deformed:*`` -- the four process edges of the deformed square.  The
      two P1 edges are compared against the closed form ``(h)h-torsion +
      dN/dy`` (swapped), the two C edges against vertical part zero; the
      edge into ``berwald`` from ``chern_rund`` is the commuting-square
      statement, since ``berwald`` is defined through ``hashiguchi``.
    * ``classical:*`` -- the same four edges on the metric side, where each
      target is constructed independently from tower data rather than by a
      process, so these edges pin the process conventions.
    * ``collapse:*`` -- the five zero-parameter edges joining the squares:
      each family member against its classical counterpart, plus the spray
      and nonlinear connection against the canonical ones.
    """
    t = F.tower(point, order)
    fam = derive_family(params)
    rows: dict[str, float] = {}

    # deformed square
    dyN = Series.stack([fam.base.N(t).d(t.n + k) for k in range(t.n)], axis=2)
    p1_closed = torsions(fam.base, t).hh + dyN.transpose(0, 2, 1)
    rows["deformed:base-to-hashiguchi"] = _rel(
        fam.hashiguchi.H(t) - p1_closed, p1_closed
    )
    rows["deformed:base-to-chern-rund"] = max(
        _rel(fam.chern_rund.V(t), t.T_mix),
        _rel(fam.chern_rund.H(t) - fam.base.H(t), fam.base.H(t)),
    )
    rows["deformed:hashiguchi-to-berwald"] = max(
        _rel(fam.berwald.V(t), t.T_mix),
        _rel(fam.berwald.H(t) - fam.hashiguchi.H(t), fam.hashiguchi.H(t)),
    )
    rows["deformed:chern-rund-to-berwald"] = _triple_residual(
        p1_process(fam.chern_rund), fam.berwald, t
    )

    # classical square, targets built independently from tower data
    rows["classical:cartan-to-hashiguchi"] = _triple_residual(
        p1_process(CARTAN), HASHIGUCHI, t
    )
    rows["classical:cartan-to-chern-rund"] = _triple_residual(
        c_process(CARTAN), CHERN_RUND, t
    )
    rows["classical:hashiguchi-to-berwald"] = _triple_residual(
        c_process(HASHIGUCHI), BERWALD, t
    )
    rows["classical:chern-rund-to-berwald"] = _triple_residual(
        p1_process(CHERN_RUND), BERWALD, t
    )

    # collapse edges under zero parameters
    zero = DeformationParams.zero(t.n)
    zfam = derive_family(zero)
    for (label, member), classical in zip(
        zfam.members(), (CARTAN, HASHIGUCHI, CHERN_RUND, BERWALD)
    ):
        rows[f"collapse:{label}"] = _triple_residual(member, classical, t)
    zdata = deformation_data(zero, t)
    rows["collapse:spray-and-nonlinear"] = max(
        _rel(zdata.spray - t.G, t.G), _rel(zdata.nonlinear - t.N, t.N)
    )
    return rows
