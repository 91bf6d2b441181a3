"""The fundamental objects of a Finsler structure in local coordinates.

Starting from a positively homogeneous norm ``L(x, y)`` on a chart, this
module derives (as truncated Taylor series at a chart point, so later
modules can keep differentiating them):

* the fundamental tensor ``g_ij = 1/2 d^2(L^2)/dy_i dy_j`` and its inverse,
* the Cartan tensor ``T_ijk = 1/4 d^3(L^2)/dy_i dy_j dy_k`` (lowered and
  mixed),
* the Hilbert form components ``l_i = dL/dy_i``,
* the geodesic spray coefficients ``G^i``, the canonical nonlinear
  connection ``N^i_j = dG^i/dy_j``, and the metric horizontal coefficients
  built from horizontal derivatives ``delta_j = d/dx_j - N^m_j d/dy_m``.

:class:`Tower` bundles these for one (structure, point, order) and is the
single currency the connection/curvature modules trade in.  Everything is
lazy and cached; invalid inputs (non-positive norm, degenerate fundamental
tensor) raise :class:`DomainError` when first touched.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ad import ChartJets, CovectorField, ScalarField, Series, matinv

__all__ = [
    "DomainError",
    "ChartPoint",
    "FinslerStructure",
    "Tower",
    "HilbertFormField",
    "fundamental_tensor",
    "inverse_fundamental_tensor",
    "cartan_tensor",
    "hilbert_form",
    "geodesic_spray",
    "nonlinear_connection",
    "horizontal_christoffel",
]


class DomainError(ValueError):
    """The structure is not Finsler at the requested chart point."""


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """A point (x, y) of the slit tangent bundle in one chart."""

    x: np.ndarray
    y: np.ndarray

    def __init__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or y.shape != x.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if not np.any(y):
            raise DomainError("y = 0 lies outside the slit tangent bundle")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def key(self) -> tuple:
        return (self.x.tobytes(), self.y.tobytes())


class FinslerStructure:
    """A chart dimension together with a norm field ``L(x, y)``."""

    def __init__(self, n: int, norm: ScalarField, name: str = ""):
        self.n = n
        self.norm = norm
        self.name = name
        self._towers: dict[tuple, "Tower"] = {}

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        label = self.name or getattr(self.norm, "describe", lambda: "norm")()
        return f"FinslerStructure(n={self.n}, {label})"

    def tower(self, point: ChartPoint, order: int) -> "Tower":
        """The (cached) Taylor tower of fundamental objects at a point."""
        if point.n != self.n:
            raise ValueError(f"point has dimension {point.n}, structure has {self.n}")
        key = point.key() + (order,)
        tw = self._towers.get(key)
        if tw is None:
            if len(self._towers) >= 1024:
                self._towers.pop(next(iter(self._towers)))
            tw = Tower(self, point, order)
            self._towers[key] = tw
        return tw

    def validate_at(self, point: ChartPoint, scale: float = 1.7) -> None:
        """Check positivity, homogeneity and strong convexity at one point.

        Raises :class:`DomainError` with a specific message on failure.
        """
        tw = self.tower(point, 2)
        L = float(tw.L.val)
        scaled = ChartPoint(point.x, scale * point.y)
        L_scaled = float(self.norm.eval(ChartJets.at(scaled.x, scaled.y, 0)).val)
        if not np.isclose(L_scaled, scale * L, rtol=1e-8, atol=1e-10):
            raise DomainError(
                f"norm is not positively 1-homogeneous at {point}: "
                f"L(x, {scale}y) = {L_scaled:.6g} vs {scale}*L = {scale * L:.6g}"
            )
        tw.g  # touching it performs the positivity/convexity checks


class Tower:
    """Lazily computed Taylor series of the fundamental objects at a point.

    ``order`` is the truncation order of the underlying ring; each derived
    object is valid to a correspondingly lower order (the series track this
    themselves and refuse to hand out untrusted coefficients).

    The ``cache`` dict is free space for other modules to memoize values
    derived from this tower (keyed by their own conventions).
    """

    def __init__(self, structure: FinslerStructure, point: ChartPoint, order: int):
        self.structure = structure
        self.point = point
        self.order = order
        self.n = structure.n
        self.jets = ChartJets.at(point.x, point.y, order)
        self.cache: dict = {}

    # -- base layer ----------------------------------------------------------

    @cached_property
    def L(self) -> Series:
        s = self.structure.norm.eval(self.jets)
        if not float(s.val) > 0.0:
            raise DomainError(
                f"norm must be positive away from y = 0, got L = {float(s.val):.6g} "
                f"at x = {self.point.x.tolist()}, y = {self.point.y.tolist()}"
            )
        return s

    @cached_property
    def L2(self) -> Series:
        return self.L * self.L

    @cached_property
    def g(self) -> Series:
        """Fundamental tensor, shape (n, n)."""
        n = self.n
        grads = [self.L2.d(n + i) for i in range(n)]
        rows = [
            Series.stack([grads[i].d(n + j) * 0.5 for j in range(n)]) for i in range(n)
        ]
        g = Series.stack(rows)
        eig = np.linalg.eigvalsh(g.val)
        if eig[0] <= 0.0:
            raise DomainError(
                f"fundamental tensor is not positive definite at "
                f"x = {self.point.x.tolist()}, y = {self.point.y.tolist()} "
                f"(eigenvalues {eig.tolist()})"
            )
        return g

    @cached_property
    def gi(self) -> Series:
        """Inverse fundamental tensor, shape (n, n)."""
        return matinv(self.g)

    @cached_property
    def T_low(self) -> Series:
        """Lowered Cartan tensor T_ijk, shape (n, n, n), totally symmetric."""
        n = self.n
        return Series.stack([self.g.d(n + k) * 0.5 for k in range(n)], axis=2)

    @cached_property
    def T_mix(self) -> Series:
        """Mixed Cartan tensor T^i_jk = g^il T_ljk, shape (n, n, n)."""
        return (self.gi[:, :, None, None] * self.T_low[None, :, :, :]).sum(axis=1)

    @cached_property
    def ell(self) -> Series:
        """Hilbert form components l_i = dL/dy_i, shape (n,)."""
        n = self.n
        return Series.stack([self.L.d(n + i) for i in range(n)])

    # -- spray layer ---------------------------------------------------------

    @cached_property
    def G(self) -> Series:
        """Geodesic spray coefficients G^i, shape (n,)."""
        n = self.n
        grads = [self.L2.d(n + l) for l in range(n)]
        rows = []
        for l in range(n):
            mixed = Series.stack([grads[l].d(m) for m in range(n)])
            rows.append((mixed * self.jets.ys).sum(axis=0) - self.L2.d(l))
        rhs = Series.stack(rows)
        return 0.25 * (self.gi * rhs[None, :]).sum(axis=1)

    @cached_property
    def N(self) -> Series:
        """Canonical nonlinear connection N^i_j = dG^i/dy_j, shape (n, n)."""
        n = self.n
        return Series.stack([self.G.d(n + j) for j in range(n)], axis=1)

    def delta(self, s: Series, j: int) -> Series:
        """Horizontal derivative delta_j = d/dx_j - N^m_j d/dy_m of a series."""
        out = s.d(j)
        for m in range(self.n):
            out = out - self.N[m, j] * s.d(self.n + m)
        return out

    @cached_property
    def Gamma(self) -> Series:
        """Metric horizontal coefficients, shape (n, n, n), [i, j, k].

        Symmetric in (j, k); together with ``N`` and ``T_mix`` these are the
        coefficients of the metric connection this whole package deforms.
        """
        D = Series.stack([self.delta(self.g, j) for j in range(self.n)])  # D[a,b,c]
        # low[j,k,l] = (delta_j g_lk + delta_k g_jl - delta_l g_jk) / 2
        low = 0.5 * (
            D.transpose(0, 2, 1) + D.transpose(2, 0, 1) - D.transpose(1, 2, 0)
        )
        return (self.gi[:, None, None, :] * low[None, :, :, :]).sum(axis=3)

    # -- convenience ---------------------------------------------------------

    @property
    def ys(self) -> Series:
        return self.jets.ys


class HilbertFormField:
    """The Hilbert form of a structure as a reusable covector field.

    Handy wherever an input one-form is chosen to be ``l`` itself.
    """

    def __init__(self, norm: ScalarField, n: int):
        self.norm = norm
        self.n = n

    def eval(self, jets: ChartJets) -> Series:
        L = self.norm.eval(jets)
        return Series.stack([L.d(self.n + i) for i in range(self.n)])

    def describe(self) -> str:
        return "Hilbert form of the norm"


# ---------------------------------------------------------------------------
# value-level convenience API


def fundamental_tensor(F: FinslerStructure, point: ChartPoint) -> np.ndarray:
    """g_ij at a point, shape (n, n)."""
    return F.tower(point, 2).g.val.copy()


def inverse_fundamental_tensor(F: FinslerStructure, point: ChartPoint) -> np.ndarray:
    """g^ij at a point, shape (n, n)."""
    return F.tower(point, 2).gi.val.copy()


def cartan_tensor(
    F: FinslerStructure, point: ChartPoint, mixed: bool = False
) -> np.ndarray:
    """T_ijk (or T^i_jk with ``mixed=True``) at a point, shape (n, n, n)."""
    tw = F.tower(point, 3)
    return (tw.T_mix if mixed else tw.T_low).val.copy()


def hilbert_form(F: FinslerStructure, point: ChartPoint) -> np.ndarray:
    """l_i at a point, shape (n,)."""
    return F.tower(point, 1).ell.val.copy()


def geodesic_spray(F: FinslerStructure, point: ChartPoint) -> np.ndarray:
    """Spray coefficients G^i at a point, shape (n,)."""
    return F.tower(point, 2).G.val.copy()


def nonlinear_connection(F: FinslerStructure, point: ChartPoint) -> np.ndarray:
    """Canonical nonlinear connection N^i_j at a point, shape (n, n)."""
    return F.tower(point, 3).N.val.copy()


def horizontal_christoffel(F: FinslerStructure, point: ChartPoint) -> np.ndarray:
    """Metric horizontal coefficients [i, j, k] at a point, shape (n, n, n)."""
    return F.tower(point, 3).Gamma.val.copy()
