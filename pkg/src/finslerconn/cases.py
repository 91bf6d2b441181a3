"""Registry of classical connection types recovered from the six parameters.

Constraining the deformation parameters reproduces a catalog of familiar
special connections (quarter-symmetric, semi-symmetric, recurrent,
non-metric, ...), each of which comes with a closed-form expression for the
difference tensor between the deformed and the metric connection.  This
module pins all twenty-six members of that catalog:

* :data:`CATALOG` maps a case id to its constraints, the free choices the
  user must still supply, and the closed-form difference tensor transcribed
  term by term from its traditional printed display.
* :func:`preset` binds the constraints to a structure and returns ready
  :class:`~finslerconn.deformation.DeformationParams`.
* :func:`check_case` builds the deformation and compares its difference
  tensor against the closed form at sample points.

Four entries (ids 11-14) are flagged ``typo``: their traditional displays
put the wrong one-form in the vertical-curvature slot (the one-form of the
weight that the case constraints switch off, so the printed term silently
vanishes).  For those, :func:`check_case` asserts the regenerated form and
reports the literal form's residual alongside, so the discrepancy stays
visible without failing the catalog.  The discrepancy is only observable
where the vertical curvature is nonzero; in dimension two the Cartan tensor
has rank one and the vertical curvature collapses, which is why the sample
collection includes a three-dimensional quartic norm.

Entry 3 is flagged ``convention``: its weight is the metric Ricci
endomorphism, so the numbers depend on the curvature sign convention fixed
in :mod:`finslerconn.connection`; it also has no printed display of its own
(``has_display`` is false) and is checked against the general formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .ad import (
    ChartJets,
    ConstantCovector,
    ConstantMatrix,
    ConstantScalar,
    CovectorField,
    IdentityMatrix,
    MatrixField,
    ScalarField,
    Series,
    ZeroCovector,
    ZeroMatrix,
)
from .connection import RicciEndomorphism
from .deformation import DeformationParams, deformation_data
from .expr import ExprCovectorField, ExprMatrixField, ExprScalarField
from .finsler import ChartPoint, FinslerStructure, HilbertFormField

__all__ = [
    "CaseError",
    "CasePreset",
    "MetricSplitPart",
    "CATALOG",
    "preset",
    "default_free_choices",
    "closed_form_delta",
    "check_case",
    "catalog",
]


class CaseError(ValueError):
    """Raised for unknown case ids or incomplete/misnamed free choices."""


class MetricSplitPart:
    """The g-symmetric or g-antisymmetric part of an endomorphism field.

    Several catalog entries constrain the torsion weight to one half of the
    metric split ``phi = phi1 + phi2`` (``g(phi1 X, Y)`` symmetric,
    ``g(phi2 X, Y)`` antisymmetric).  Wrapping an arbitrary endomorphism in
    this field enforces the constraint exactly: lower with the metric of
    ``structure``, project, raise back.
    """

    def __init__(self, structure: FinslerStructure, inner: MatrixField, part: str):
        if part not in ("symmetric", "antisymmetric"):
            raise ValueError("part must be 'symmetric' or 'antisymmetric'")
        self.structure = structure
        self.inner = inner
        self.part = part

    def eval(self, jets: ChartJets) -> Series:
        t = self.structure.tower(ChartPoint(jets.x0, jets.y0), jets.ring.order)
        low = (self.inner.eval(jets)[:, :, None] * t.g[:, None, :]).sum(axis=0)
        if self.part == "symmetric":
            low = 0.5 * (low + low.transpose(1, 0))
        else:
            low = 0.5 * (low - low.transpose(1, 0))
        return (t.gi[:, None, :] * low[None, :, :]).sum(axis=2)

    def describe(self) -> str:
        inner = getattr(self.inner, "describe", lambda: type(self.inner).__name__)()
        return f"{self.part} metric part of ({inner})"


# ---------------------------------------------------------------------------
# point workspace: every value the closed forms consume, as plain arrays
# ---------------------------------------------------------------------------


class _Workspace:
    """Values of the tower and deformation data at one chart point.

    The closed forms below are pure index gymnastics on these arrays, laid
    out ``[i, j, k]`` with ``i`` the output component, ``j`` the frame index
    of the first slot and ``k`` contracting the second-slot vector.
    """

    def __init__(
        self,
        params: DeformationParams,
        F: FinslerStructure,
        point: ChartPoint,
        order: int = 4,
    ):
        t = F.tower(point, order)
        d = deformation_data(params, t)
        self.n = F.n
        self.g = t.g.val
        self.Tm = t.T_mix.val
        self.Tl = t.T_low.val
        self.ell = t.ell.val
        self.L = float(t.L.val)
        self.L2 = float(t.L2.val)
        self.y = np.asarray(point.y, dtype=float)
        self.eye = np.eye(self.n)
        self.f1 = float(d.f1.val)
        self.f2 = float(d.f2.val)
        self.A = d.A.val
        self.B = d.B.val
        self.u = d.u.val
        self.avec = d.avec.val
        self.bvec = d.bvec.val
        self.uvec = d.uvec.val
        self.u_eta = float(d.u_eta.val)
        self.phi1 = d.phi1.val
        self.phi2 = d.phi2.val
        self.gphi1 = d.gphi1.val
        self.phi1_eta = d.phi1_eta.val
        self.phi2_eta = d.phi2_eta.val
        self.w = d.w.val
        self.ell_phi1 = d.ell_phi1.val
        self.ell_phi1_eta = float(d.ell_phi1_eta.val)
        self.S = d.S.val
        self.difference = d.difference.val

    # -- contractions of the Cartan tensor and vertical curvature ---------

    def tv(self, v: np.ndarray) -> np.ndarray:
        """``T(v, e_j)^i`` as an [i, j] array."""
        return np.einsum("ipj,p->ij", self.Tm, v)

    def tl3(self, v: np.ndarray) -> np.ndarray:
        """Totally lowered ``T(v, e_j, e_k)`` as a [j, k] array."""
        return np.einsum("pjk,p->jk", self.Tl, v)

    def s_second(self, v: np.ndarray) -> np.ndarray:
        """``S(e_j, v)Y`` as an [i, j, k] array (v in the second slot)."""
        return np.einsum("ikjb,b->ijk", self.S, v)

    def s_first(self, v: np.ndarray) -> np.ndarray:
        """``S(v, e_j)Y``; the vertical curvature is slot-antisymmetric."""
        return -self.s_second(v)

    def tt_outer(self, c: np.ndarray) -> np.ndarray:
        """``T(T(e_j, Y), c)`` as an [i, j, k] array."""
        return np.einsum("ipq,pjk,q->ijk", self.Tm, self.Tm, c)

    def tt_inner(self, c: np.ndarray) -> np.ndarray:
        """``T(T(c, Y), e_j)`` as an [i, j, k] array."""
        return np.einsum("ipj,pqk,q->ijk", self.Tm, self.Tm, c)

    def tm1(self) -> np.ndarray:
        """``T(phi1 Y, e_j)`` as an [i, j, k] array."""
        return np.einsum("ipj,pk->ijk", self.Tm, self.phi1)

    def mt1(self) -> np.ndarray:
        """``phi1(T(e_j, Y))`` as an [i, j, k] array."""
        return np.einsum("ip,pjk->ijk", self.phi1, self.Tm)


# ---------------------------------------------------------------------------
# shared formula blocks
# ---------------------------------------------------------------------------


def _a_block(ws: _Workspace, cov: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """First-weight block: g(.,Y)v - cov(.)Y - cov(Y). - L l(Y)T(v,.)
    + T(v,.,Y) eta + L^2 S(., v)Y."""
    return (
        vec[:, None, None] * ws.g[None, :, :]
        - cov[None, :, None] * ws.eye[:, None, :]
        - cov[None, None, :] * ws.eye[:, :, None]
        - ws.L * ws.tv(vec)[:, :, None] * ws.ell[None, None, :]
        + ws.y[:, None, None] * ws.tl3(vec)[None, :, :]
        + ws.L2 * ws.s_second(vec)
    )


def _a_block_exp(ws: _Workspace, cov: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Same block with the vertical-curvature term written out through the
    quadratic identity S(., v)Y = T(T(v,Y),.) - T(T(.,Y),v), matching the
    displays that print it that way."""
    return (
        vec[:, None, None] * ws.g[None, :, :]
        - cov[None, :, None] * ws.eye[:, None, :]
        - cov[None, None, :] * ws.eye[:, :, None]
        - ws.L * ws.tv(vec)[:, :, None] * ws.ell[None, None, :]
        + ws.y[:, None, None] * ws.tl3(vec)[None, :, :]
        + ws.L2 * (ws.tt_inner(vec) - ws.tt_outer(vec))
    )


def _b_block(
    ws: _Workspace, vec: np.ndarray, s_vec: np.ndarray | None = None
) -> np.ndarray:
    """Second-weight block: g(.,Y)v - L l(Y)T(v,.) + T(v,.,Y) eta
    + L^2 S(., s)Y, with the curvature slot defaulting to v itself.

    The ``s_vec`` override exists purely so the literal typo displays (which
    put the switched-off first weight there) can be evaluated as printed.
    """
    sv = vec if s_vec is None else s_vec
    return (
        vec[:, None, None] * ws.g[None, :, :]
        - ws.L * ws.tv(vec)[:, :, None] * ws.ell[None, None, :]
        + ws.y[:, None, None] * ws.tl3(vec)[None, :, :]
        + ws.L2 * ws.s_second(sv)
    )


def _b_block_exp(ws: _Workspace, vec: np.ndarray) -> np.ndarray:
    """Second-weight block with the expanded quadratic curvature term."""
    return (
        vec[:, None, None] * ws.g[None, :, :]
        - ws.L * ws.tv(vec)[:, :, None] * ws.ell[None, None, :]
        + ws.y[:, None, None] * ws.tl3(vec)[None, :, :]
        + ws.L2 * (ws.tt_inner(vec) - ws.tt_outer(vec))
    )


def _phi_tail_full(ws: _Workspace) -> np.ndarray:
    """The torsion-weight terms with a general endomorphism."""
    uv = ws.uvec
    out = -(ws.gphi1 + ws.tl3(ws.phi2_eta))[None, :, :] * uv[:, None, None]
    out -= ws.u[None, :, None] * ws.phi2[:, None, :]
    out += ws.L * ws.tv(uv)[:, :, None] * ws.ell_phi1[None, None, :]
    out -= ws.u_eta * (ws.s_first(ws.w) + ws.tm1() - ws.mt1())
    out += (ws.tv(ws.phi2_eta) + ws.phi1)[:, :, None] * ws.u[None, None, :]
    out += ws.L * ws.ell_phi1_eta * ws.s_first(uv)
    out -= ws.tl3(uv)[None, :, :] * ws.phi1_eta[:, None, None]
    return out


def _phi_tail_sym(ws: _Workspace) -> np.ndarray:
    """The torsion-weight terms when the weight is g-symmetric."""
    uv = ws.uvec
    out = -ws.gphi1[None, :, :] * uv[:, None, None]
    out += ws.L * ws.tv(uv)[:, :, None] * ws.ell_phi1[None, None, :]
    out -= ws.u_eta * (ws.s_first(ws.phi1_eta) + ws.tm1() - ws.mt1())
    out += ws.phi1[:, :, None] * ws.u[None, None, :]
    out += ws.L * ws.ell_phi1_eta * ws.s_first(uv)
    out -= ws.tl3(uv)[None, :, :] * ws.phi1_eta[:, None, None]
    return out


def _phi_tail_antisym(ws: _Workspace) -> np.ndarray:
    """The torsion-weight terms when the weight is g-antisymmetric."""
    uv = ws.uvec
    out = -ws.tl3(ws.phi2_eta)[None, :, :] * uv[:, None, None]
    out -= ws.u[None, :, None] * ws.phi2[:, None, :]
    out += ws.tv(ws.phi2_eta)[:, :, None] * ws.u[None, None, :]
    out += ws.u_eta * ws.s_first(ws.phi2_eta)
    return out


def _id_tail(ws: _Workspace) -> np.ndarray:
    """The torsion-weight terms when the weight is the identity."""
    uv = ws.uvec
    out = -uv[:, None, None] * ws.g[None, :, :]
    out += ws.eye[:, :, None] * ws.u[None, None, :]
    out += ws.L * ws.tv(uv)[:, :, None] * ws.ell[None, None, :]
    out += ws.L2 * (ws.tt_outer(uv) - ws.tt_inner(uv))
    out -= ws.y[:, None, None] * ws.tl3(uv)[None, :, :]
    return out


# ---------------------------------------------------------------------------
# the twenty-six closed forms
# ---------------------------------------------------------------------------


def _delta_1(ws: _Workspace, literal: bool = False) -> np.ndarray:
    av = ws.avec
    out = -ws.f1 * (
        ws.A[None, :, None] * ws.eye[:, None, :]
        + ws.A[None, None, :] * ws.eye[:, :, None]
    )
    out += av[:, None, None] * ws.g[None, :, :]
    out -= ws.L * ws.tv(av)[:, :, None] * ws.ell[None, None, :]
    out += ws.L2 * ws.s_second(av)
    out += ws.y[:, None, None] * ws.tl3(av)[None, :, :]
    return out + _phi_tail_full(ws)


def _delta_2(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return _phi_tail_full(ws)


def _delta_4(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return _phi_tail_sym(ws)


def _delta_5(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return _phi_tail_antisym(ws)


def _delta_6(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return 0.5 * _a_block(ws, ws.A, ws.avec) + _phi_tail_full(ws)


def _delta_7(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return ws.f1 * _a_block(ws, ws.A, ws.avec) + _phi_tail_sym(ws)


def _delta_8(ws: _Workspace, literal: bool = False) -> np.ndarray:
    # Printed with the metric and weight g-terms merged: g(. - phi1(.), Y)u.
    uv = ws.uvec
    out = (ws.g - ws.gphi1)[None, :, :] * uv[:, None, None]
    out -= ws.u[None, :, None] * ws.eye[:, None, :]
    out -= ws.u[None, None, :] * ws.eye[:, :, None]
    out -= ws.L * ws.tv(uv)[:, :, None] * ws.ell[None, None, :]
    out += ws.y[:, None, None] * ws.tl3(uv)[None, :, :]
    out += ws.L2 * ws.s_second(uv)
    out += ws.L * ws.tv(uv)[:, :, None] * ws.ell_phi1[None, None, :]
    out -= ws.u_eta * (ws.s_first(ws.phi1_eta) + ws.tm1() - ws.mt1())
    out += ws.phi1[:, :, None] * ws.u[None, None, :]
    out += ws.L * ws.ell_phi1_eta * ws.s_first(uv)
    out -= ws.tl3(uv)[None, :, :] * ws.phi1_eta[:, None, None]
    return out


def _delta_9(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return ws.f1 * _a_block(ws, ws.A, ws.avec) + _phi_tail_antisym(ws)


def _delta_10(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return _a_block(ws, ws.u, ws.uvec) + _phi_tail_antisym(ws)


def _delta_11(ws: _Workspace, literal: bool = False) -> np.ndarray:
    sv = ws.avec if literal else None
    return -ws.f2 * _b_block(ws, ws.bvec, s_vec=sv) + _phi_tail_sym(ws)


def _delta_12(ws: _Workspace, literal: bool = False) -> np.ndarray:
    sv = ws.avec if literal else None
    return -ws.f2 * _b_block(ws, ws.uvec, s_vec=sv) + _phi_tail_sym(ws)


def _delta_13(ws: _Workspace, literal: bool = False) -> np.ndarray:
    sv = ws.avec if literal else None
    return -ws.f2 * _b_block(ws, ws.bvec, s_vec=sv) + _phi_tail_antisym(ws)


def _delta_14(ws: _Workspace, literal: bool = False) -> np.ndarray:
    sv = ws.avec if literal else None
    return -ws.f2 * _b_block(ws, ws.uvec, s_vec=sv) + _phi_tail_antisym(ws)


def _delta_15(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return _id_tail(ws)


def _delta_16(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return (
        -(1.0 / ws.L) * ws.y[:, None, None] * ws.g[None, :, :]
        + ws.eye[:, :, None] * ws.ell[None, None, :]
    )


def _delta_17(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return ws.f1 * _a_block_exp(ws, ws.A, ws.avec) + _id_tail(ws)


def _delta_18(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return 0.5 * _a_block_exp(ws, ws.A, ws.avec) + _id_tail(ws)


def _delta_19(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return -0.5 * (
        (1.0 / ws.L) * ws.y[:, None, None] * ws.g[None, :, :]
        + ws.ell[None, :, None] * ws.eye[:, None, :]
        - ws.ell[None, None, :] * ws.eye[:, :, None]
    )


def _delta_20(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return -ws.f2 * _b_block_exp(ws, ws.bvec) + _id_tail(ws)


def _delta_21(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return _b_block_exp(ws, ws.bvec) + _id_tail(ws)


def _delta_22(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return ws.eye[:, :, None] * ws.u[None, None, :]


def _delta_23(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return ws.f1 * _a_block(ws, ws.A, ws.avec) - ws.f2 * _b_block(ws, ws.bvec)


def _delta_24(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return 0.5 * _a_block(ws, ws.A, ws.avec)


def _delta_25(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return (
        ws.A[None, :, None] * ws.eye[:, None, :]
        + ws.A[None, None, :] * ws.eye[:, :, None]
    )


def _delta_26(ws: _Workspace, literal: bool = False) -> np.ndarray:
    return 0.5 * (
        (1.0 / ws.L) * ws.y[:, None, None] * ws.g[None, :, :]
        - ws.ell[None, :, None] * ws.eye[:, None, :]
        - ws.ell[None, None, :] * ws.eye[:, :, None]
    )


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


def _as_scalar(value, n: int) -> ScalarField:
    if hasattr(value, "eval"):
        return value
    if isinstance(value, str):
        return ExprScalarField(n, value)
    return ConstantScalar(float(value))


def _as_form(value, n: int) -> CovectorField:
    if hasattr(value, "eval"):
        return value
    comps = tuple(value)
    if all(isinstance(c, str) for c in comps):
        return ExprCovectorField(n, comps)
    return ConstantCovector(tuple(float(c) for c in comps))


def _as_matrix(value, n: int) -> MatrixField:
    if hasattr(value, "eval"):
        return value
    rows = tuple(tuple(r) for r in value)
    if all(isinstance(c, str) for row in rows for c in row):
        return ExprMatrixField(n, rows)
    return ConstantMatrix(tuple(tuple(float(c) for c in row) for row in rows))


def _assemble(
    F: FinslerStructure,
    case_id: int,
    f1=0.0,
    f2=0.0,
    A: CovectorField | None = None,
    B: CovectorField | None = None,
    u: CovectorField | None = None,
    phi: MatrixField | None = None,
) -> DeformationParams:
    n = F.n
    return DeformationParams(
        f1=_as_scalar(f1, n),
        f2=_as_scalar(f2, n),
        A=A if A is not None else ZeroCovector(n),
        B=B if B is not None else ZeroCovector(n),
        u=u if u is not None else ZeroCovector(n),
        phi=phi if phi is not None else ZeroMatrix(n),
        name=f"case-{case_id}",
    )


def _sym(F: FinslerStructure, phi: MatrixField) -> MetricSplitPart:
    return MetricSplitPart(F, phi, "symmetric")


def _antisym(F: FinslerStructure, phi: MatrixField) -> MetricSplitPart:
    return MetricSplitPart(F, phi, "antisymmetric")


@dataclass(frozen=True)
class CasePreset:
    """One catalog entry: constraints, free choices, and its closed form."""

    id: int
    title: str
    constraints: str
    free: tuple[str, ...]
    typo: bool = False
    convention: bool = False
    has_display: bool = True
    build: Callable[[FinslerStructure, dict], DeformationParams] = field(
        default=None, repr=False
    )
    delta: Callable[[_Workspace, bool], np.ndarray] = field(default=None, repr=False)


_PRESETS: list[CasePreset] = [
    CasePreset(
        1,
        "generalized quarter-symmetric recurrent metric",
        "A = B; f1 = 1 - t; f2 = -t",
        ("t", "A", "u", "phi"),
        build=lambda F, c: _assemble(
            F, 1, f1=1.0 - c["t"], f2=-c["t"], A=c["A"], B=c["A"], u=c["u"],
            phi=c["phi"],
        ),
        delta=_delta_1,
    ),
    CasePreset(
        2,
        "quarter-symmetric metric",
        "f1 = 0; f2 = 0",
        ("u", "phi"),
        build=lambda F, c: _assemble(F, 2, u=c["u"], phi=c["phi"]),
        delta=_delta_2,
    ),
    CasePreset(
        3,
        "Ricci quarter-symmetric metric",
        "f1 = 0; f2 = 0; phi = metric Ricci endomorphism",
        ("u",),
        convention=True,
        has_display=False,
        build=lambda F, c: _assemble(F, 3, u=c["u"], phi=RicciEndomorphism(F)),
        delta=_delta_2,
    ),
    CasePreset(
        4,
        "quarter-symmetric metric, symmetric weight",
        "f1 = 0; f2 = 0; phi g-symmetric",
        ("u", "phi"),
        build=lambda F, c: _assemble(F, 4, u=c["u"], phi=_sym(F, c["phi"])),
        delta=_delta_4,
    ),
    CasePreset(
        5,
        "quarter-symmetric metric, antisymmetric weight",
        "f1 = 0; f2 = 0; phi g-antisymmetric",
        ("u", "phi"),
        build=lambda F, c: _assemble(F, 5, u=c["u"], phi=_antisym(F, c["phi"])),
        delta=_delta_5,
    ),
    CasePreset(
        6,
        "quarter-symmetric h-recurrent",
        "f1 = 1/2; f2 = 0",
        ("A", "u", "phi"),
        build=lambda F, c: _assemble(
            F, 6, f1=0.5, A=c["A"], u=c["u"], phi=c["phi"]
        ),
        delta=_delta_6,
    ),
    CasePreset(
        7,
        "quarter-symmetric recurrent, symmetric weight",
        "f2 = 0; phi g-symmetric",
        ("f1", "A", "u", "phi"),
        build=lambda F, c: _assemble(
            F, 7, f1=c["f1"], A=c["A"], u=c["u"], phi=_sym(F, c["phi"])
        ),
        delta=_delta_7,
    ),
    CasePreset(
        8,
        "quarter-symmetric drift-recurrent, symmetric weight",
        "f1 = 1; f2 = 0; A = u; phi g-symmetric",
        ("u", "phi"),
        build=lambda F, c: _assemble(
            F, 8, f1=1.0, A=c["u"], u=c["u"], phi=_sym(F, c["phi"])
        ),
        delta=_delta_8,
    ),
    CasePreset(
        9,
        "quarter-symmetric recurrent, antisymmetric weight",
        "f2 = 0; phi g-antisymmetric",
        ("f1", "A", "u", "phi"),
        build=lambda F, c: _assemble(
            F, 9, f1=c["f1"], A=c["A"], u=c["u"], phi=_antisym(F, c["phi"])
        ),
        delta=_delta_9,
    ),
    CasePreset(
        10,
        "quarter-symmetric drift-recurrent, antisymmetric weight",
        "f1 = 1; f2 = 0; A = u; phi g-antisymmetric",
        ("u", "phi"),
        build=lambda F, c: _assemble(
            F, 10, f1=1.0, A=c["u"], u=c["u"], phi=_antisym(F, c["phi"])
        ),
        delta=_delta_10,
    ),
    CasePreset(
        11,
        "quarter-symmetric non-metric, second weight, symmetric part",
        "f1 = 0; phi g-symmetric",
        ("f2", "B", "u", "phi"),
        typo=True,
        build=lambda F, c: _assemble(
            F, 11, f2=c["f2"], B=c["B"], u=c["u"], phi=_sym(F, c["phi"])
        ),
        delta=_delta_11,
    ),
    CasePreset(
        12,
        "quarter-symmetric non-metric, drift second weight, symmetric part",
        "f1 = 0; B = u; phi g-symmetric",
        ("f2", "u", "phi"),
        typo=True,
        build=lambda F, c: _assemble(
            F, 12, f2=c["f2"], B=c["u"], u=c["u"], phi=_sym(F, c["phi"])
        ),
        delta=_delta_12,
    ),
    CasePreset(
        13,
        "quarter-symmetric non-metric, second weight, antisymmetric part",
        "f1 = 0; phi g-antisymmetric",
        ("f2", "B", "u", "phi"),
        typo=True,
        build=lambda F, c: _assemble(
            F, 13, f2=c["f2"], B=c["B"], u=c["u"], phi=_antisym(F, c["phi"])
        ),
        delta=_delta_13,
    ),
    CasePreset(
        14,
        "quarter-symmetric non-metric, drift second weight, antisymmetric part",
        "f1 = 0; B = u; phi g-antisymmetric",
        ("f2", "u", "phi"),
        typo=True,
        build=lambda F, c: _assemble(
            F, 14, f2=c["f2"], B=c["u"], u=c["u"], phi=_antisym(F, c["phi"])
        ),
        delta=_delta_14,
    ),
    CasePreset(
        15,
        "semi-symmetric metric",
        "f1 = 0; f2 = 0; phi = identity",
        ("u",),
        build=lambda F, c: _assemble(F, 15, u=c["u"], phi=IdentityMatrix(F.n)),
        delta=_delta_15,
    ),
    CasePreset(
        16,
        "semi-symmetric metric, Hilbert-form drift",
        "f1 = 0; f2 = 0; u = Hilbert form; phi = identity",
        (),
        build=lambda F, c: _assemble(
            F, 16, u=HilbertFormField(F.norm, F.n), phi=IdentityMatrix(F.n)
        ),
        delta=_delta_16,
    ),
    CasePreset(
        17,
        "semi-symmetric recurrent",
        "f2 = 0; phi = identity",
        ("f1", "A", "u"),
        build=lambda F, c: _assemble(
            F, 17, f1=c["f1"], A=c["A"], u=c["u"], phi=IdentityMatrix(F.n)
        ),
        delta=_delta_17,
    ),
    CasePreset(
        18,
        "semi-symmetric recurrent, half weight",
        "f1 = 1/2; f2 = 0; phi = identity",
        ("A", "u"),
        build=lambda F, c: _assemble(
            F, 18, f1=0.5, A=c["A"], u=c["u"], phi=IdentityMatrix(F.n)
        ),
        delta=_delta_18,
    ),
    CasePreset(
        19,
        "special semi-symmetric h-recurrent",
        "f1 = 1/2; f2 = 0; A = u = Hilbert form; phi = identity",
        (),
        build=lambda F, c: _assemble(
            F,
            19,
            f1=0.5,
            A=HilbertFormField(F.norm, F.n),
            u=HilbertFormField(F.norm, F.n),
            phi=IdentityMatrix(F.n),
        ),
        delta=_delta_19,
    ),
    CasePreset(
        20,
        "semi-symmetric non-metric, second weight",
        "f1 = 0; phi = identity",
        ("f2", "B", "u"),
        build=lambda F, c: _assemble(
            F, 20, f2=c["f2"], B=c["B"], u=c["u"], phi=IdentityMatrix(F.n)
        ),
        delta=_delta_20,
    ),
    CasePreset(
        21,
        "semi-symmetric non-metric, unit second weight",
        "f1 = 0; f2 = -1; phi = identity",
        ("B", "u"),
        build=lambda F, c: _assemble(
            F, 21, f2=-1.0, B=c["B"], u=c["u"], phi=IdentityMatrix(F.n)
        ),
        delta=_delta_21,
    ),
    CasePreset(
        22,
        "semi-symmetric non-metric, drift only",
        "f1 = 0; f2 = -1; B = u; phi = identity",
        ("u",),
        build=lambda F, c: _assemble(
            F, 22, f2=-1.0, B=c["u"], u=c["u"], phi=IdentityMatrix(F.n)
        ),
        delta=_delta_22,
    ),
    CasePreset(
        23,
        "symmetric non-metric",
        "u = 0",
        ("f1", "f2", "A", "B"),
        build=lambda F, c: _assemble(
            F, 23, f1=c["f1"], f2=c["f2"], A=c["A"], B=c["B"]
        ),
        delta=_delta_23,
    ),
    CasePreset(
        24,
        "symmetric recurrent, Weyl type",
        "f1 = 1/2; f2 = 0; u = 0",
        ("A",),
        build=lambda F, c: _assemble(F, 24, f1=0.5, A=c["A"]),
        delta=_delta_24,
    ),
    CasePreset(
        25,
        "symmetric, dual weights",
        "f1 = -1; f2 = -1; A = B; u = 0",
        ("A",),
        build=lambda F, c: _assemble(F, 25, f1=-1.0, f2=-1.0, A=c["A"], B=c["A"]),
        delta=_delta_25,
    ),
    CasePreset(
        26,
        "special symmetric h-recurrent",
        "f1 = 1/2; f2 = 0; A = Hilbert form; u = 0",
        (),
        build=lambda F, c: _assemble(
            F, 26, f1=0.5, A=HilbertFormField(F.norm, F.n)
        ),
        delta=_delta_26,
    ),
]

CATALOG: dict[int, CasePreset] = {p.id: p for p in _PRESETS}


def _require(case_id: int) -> CasePreset:
    try:
        return CATALOG[int(case_id)]
    except (KeyError, TypeError, ValueError):
        raise CaseError(f"unknown case id {case_id!r}; valid ids are 1..26") from None


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------


def preset(case_id: int, F: FinslerStructure, **free) -> DeformationParams:
    """Parameters satisfying a catalog entry's constraints on ``F``.

    Free choices not fixed by the constraints must be passed by keyword
    (see ``CATALOG[case_id].free``); scalars accept numbers, expression
    strings or fields, one-forms accept component tuples or fields, and
    endomorphisms accept row grids or fields.
    """
    spec = _require(case_id)
    missing = [k for k in spec.free if k not in free]
    if missing:
        raise CaseError(
            f"case {spec.id} needs free choices for: {', '.join(missing)}"
        )
    extra = sorted(set(free) - set(spec.free))
    if extra:
        allowed = ", ".join(spec.free) if spec.free else "none"
        raise CaseError(
            f"case {spec.id} does not take {', '.join(extra)}; "
            f"free choices are: {allowed}"
        )
    n = F.n
    coerced: dict = {}
    for key, value in free.items():
        if key == "t":
            coerced[key] = float(value)
        elif key in ("f1", "f2"):
            coerced[key] = _as_scalar(value, n)
        elif key in ("A", "B", "u"):
            coerced[key] = _as_form(value, n)
        else:
            coerced[key] = _as_matrix(value, n)
    return spec.build(F, coerced)


def default_free_choices(case_id: int, F: FinslerStructure, seed: int = 0) -> dict:
    """Deterministic, mildly position/direction-dependent free choices.

    Scalar weights are bounded away from zero on the sampling box so that
    no case accidentally degenerates into a smaller one.
    """
    spec = _require(case_id)
    n = F.n
    rng = np.random.default_rng(10_000 + 97 * spec.id + seed)

    def coeff(lo: float = -0.3, hi: float = 0.3) -> float:
        return float(np.round(rng.uniform(lo, hi), 3))

    def var() -> str:
        i = int(rng.integers(1, n + 1))
        return f"x{i}" if int(rng.integers(2)) else f"y{i}"

    def form() -> ExprCovectorField:
        return ExprCovectorField(
            n, tuple(f"{coeff()} + {coeff(-0.15, 0.15)}*{var()}" for _ in range(n))
        )

    def matrix() -> ExprMatrixField:
        rows = tuple(
            tuple(
                f"{1.0 + coeff(-0.2, 0.2)} + {coeff(-0.1, 0.1)}*{var()}"
                if i == j
                else f"{coeff(-0.25, 0.25)} + {coeff(-0.1, 0.1)}*{var()}"
                for j in range(n)
            )
            for i in range(n)
        )
        return ExprMatrixField(n, rows)

    out: dict = {}
    for key in spec.free:
        if key == "t":
            out[key] = float(np.round(rng.uniform(0.2, 0.8), 3))
        elif key in ("f1", "f2"):
            out[key] = ExprScalarField(
                n, f"{coeff(0.3, 0.7)} + {coeff(-0.1, 0.1)}*{var()}"
            )
        elif key in ("A", "B", "u"):
            out[key] = form()
        elif key == "phi":
            out[key] = matrix()
    return out


def closed_form_delta(
    case_id: int,
    params: DeformationParams,
    F: FinslerStructure,
    point: ChartPoint,
    j: int | None = None,
    Y=None,
    literal: bool = False,
) -> np.ndarray:
    """The catalog's closed-form difference tensor at a point.

    Returns the full ``[i, j, k]`` array, or the vector obtained by feeding
    in the frame index ``j`` and a vector ``Y``.  With ``literal=True`` the
    typo-flagged entries are evaluated exactly as printed (wrong one-form in
    the vertical-curvature slot); other entries ignore the flag.
    """
    spec = _require(case_id)
    delta = spec.delta(_Workspace(params, F, point), bool(literal))
    if j is None and Y is None:
        return delta
    if j is None or Y is None:
        raise ValueError("pass both the frame index and the vector, or neither")
    return delta[:, j, :] @ np.asarray(Y, dtype=float)


def _rel(diff: np.ndarray, *refs: np.ndarray) -> float:
    scale = 1.0 + max(float(np.max(np.abs(r))) for r in refs)
    return float(np.max(np.abs(diff))) / scale


def _default_points(F: FinslerStructure, count: int = 4) -> list[ChartPoint]:
    """Deterministic sample points, directions in the positive shell."""
    rng = np.random.default_rng(1234 + F.n)
    return [
        ChartPoint(
            rng.uniform(-0.4, 0.4, F.n).tolist(),
            rng.uniform(0.5, 1.4, F.n).tolist(),
        )
        for _ in range(count)
    ]


def check_case(
    case_id: int,
    F: FinslerStructure,
    points: Iterable[ChartPoint] | None = None,
    free: Mapping | None = None,
    seed: int = 0,
    tolerance: float = 1e-7,
) -> dict:
    """Compare the built difference tensor with the catalog closed form.

    Returns a plain dict: the worst relative residual over the points, the
    literal-form residual for typo-flagged entries (reported, not asserted),
    and a ``passed`` verdict against ``tolerance``.
    """
    spec = _require(case_id)
    choices = (
        default_free_choices(case_id, F, seed) if free is None else dict(free)
    )
    params = preset(case_id, F, **choices)
    pts = _default_points(F) if points is None else list(points)
    worst = 0.0
    worst_literal = 0.0 if spec.typo else None
    for p in pts:
        ws = _Workspace(params, F, p)
        built = ws.difference
        target = spec.delta(ws, False)
        worst = max(worst, _rel(built - target, built, target))
        if spec.typo:
            printed = spec.delta(ws, True)
            worst_literal = max(
                worst_literal, _rel(built - printed, built, printed)
            )
    return {
        "id": spec.id,
        "title": spec.title,
        "constraints": spec.constraints,
        "structure": getattr(F, "name", ""),
        "points": len(pts),
        "typo": spec.typo,
        "convention": spec.convention,
        "residual": worst,
        "literal_residual": worst_literal,
        "tolerance": float(tolerance),
        "passed": worst < tolerance,
    }


def catalog() -> list[dict]:
    """Machine-readable view of the registry, ordered by id."""
    return [
        {
            "id": p.id,
            "title": p.title,
            "constraints": p.constraints,
            "free": list(p.free),
            "typo": p.typo,
            "convention": p.convention,
            "has_display": p.has_display,
        }
        for p in _PRESETS
    ]
