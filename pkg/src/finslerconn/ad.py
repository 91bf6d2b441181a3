"""Truncated multivariate Taylor arithmetic (forward-mode AD of any order).

Everything in this package that needs derivatives -- the metric tensor from
a norm function, spray and connection coefficients from the metric,
curvature from the coefficients -- runs on the :class:`Series` type defined
here: a dense truncated Taylor expansion in the ``2n`` chart variables
``(x_1..x_n, y_1..y_n)`` around a point.  Products, quotients, analytic
functions and partial derivatives are exact operations on the coefficient
vectors, so nested derivatives of computed quantities (e.g. a y-derivative
of a coefficient that itself contains x-derivatives of the metric) come out
to machine precision instead of finite-difference accuracy.

Two details matter for correctness downstream:

* ``Series.valid`` tracks the largest total degree whose coefficients are
  trustworthy.  A product of series valid to orders ``p`` and ``q`` is valid
  to ``min(p, q)``; a derivative drops the order by one; analytic functions
  preserve it.  Extracting a coefficient past the valid order raises
  :class:`TruncationError`, so a pipeline that was evaluated at too low an
  order fails loudly instead of returning silently wrong zeros.
* A ``Series`` holds a whole numpy *batch* of expansions (``coef`` has shape
  ``(*batch, ring.dim)``), so tensors of series (metric components, spray
  coefficients, curvature stacks) are vectorized; multiplication uses a
  precomputed sparse pair table per ring.

Typical usage::

    jets = ChartJets.at(x=[0.1, 0.2], y=[0.4, 1.0], order=4)
    s = (jets.ys[0] ** 2 + jets.ys[1] ** 2).sqrt()   # |y| as a series
    s.extract((0, 0, 1, 0))                          # d|y| / dy_1
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence, runtime_checkable

import numpy as np
import scipy.sparse as sp

__all__ = [
    "TruncationError",
    "TaylorRing",
    "ring",
    "Series",
    "ChartJets",
    "Jet",
    "ScalarField",
    "CovectorField",
    "MatrixField",
    "ConstantScalar",
    "ConstantCovector",
    "ConstantMatrix",
    "ZeroCovector",
    "ZeroMatrix",
    "IdentityMatrix",
    "partial",
    "hessian_y",
    "third_y",
    "matmul",
    "matinv",
]

MAX_PARTIAL_ORDER = 4


class TruncationError(Exception):
    """A coefficient or derivative past the trusted truncation order was used."""


# ---------------------------------------------------------------------------
# rings


class TaylorRing:
    """The polynomial ring in ``nvars`` variables, truncated past ``order``.

    Monomials are enumerated in graded order (all of degree 0, then 1, ...),
    which makes every degree cutoff a prefix of the coefficient vector.
    """

    def __init__(self, nvars: int, order: int):
        if nvars < 1:
            raise ValueError("need at least one variable")
        if order < 0:
            raise ValueError("order must be non-negative")
        self.nvars = nvars
        self.order = order
        mons: list[tuple[int, ...]] = []
        for total in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(nvars), total):
                e = [0] * nvars
                for v in combo:
                    e[v] += 1
                mons.append(tuple(e))
        self.monomials = mons
        self.index = {m: i for i, m in enumerate(mons)}
        self.dim = len(mons)
        self.degree = np.array([sum(m) for m in mons], dtype=np.int64)
        # number of monomials of degree <= d, for d = 0..order
        self._prefix = np.searchsorted(self.degree, np.arange(order + 2), side="left")
        self._fact = np.array(
            [math.prod(math.factorial(e) for e in m) for m in mons], dtype=float
        )
        self._mul_cache: tuple[np.ndarray, np.ndarray, sp.csr_matrix] | None = None
        self._diff_cache: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"TaylorRing(nvars={self.nvars}, order={self.order}, dim={self.dim})"

    def _mul_table(self) -> tuple[np.ndarray, np.ndarray, sp.csr_matrix]:
        if self._mul_cache is None:
            I: list[int] = []
            J: list[int] = []
            K: list[int] = []
            for i, mi in enumerate(self.monomials):
                budget = self.order - int(self.degree[i])
                stop = int(self._prefix[budget + 1])
                for j in range(stop):
                    mj = self.monomials[j]
                    I.append(i)
                    J.append(j)
                    K.append(self.index[tuple(a + b for a, b in zip(mi, mj))])
            npairs = len(K)
            scatter = sp.csr_matrix(
                (np.ones(npairs), (np.arange(npairs), np.array(K))),
                shape=(npairs, self.dim),
            )
            self._mul_cache = (np.array(I), np.array(J), scatter)
        return self._mul_cache

    def _diff_table(self, var: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        tab = self._diff_cache.get(var)
        if tab is None:
            src, dst, fac = [], [], []
            for i, m in enumerate(self.monomials):
                if m[var]:
                    src.append(i)
                    fac.append(float(m[var]))
                    lower = m[:var] + (m[var] - 1,) + m[var + 1 :]
                    dst.append(self.index[lower])
            tab = (np.array(src), np.array(dst), np.array(fac))
            self._diff_cache[var] = tab
        return tab

    def mul_coef(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Ring product along the last axis, numpy-broadcast over the rest."""
        I, J, scatter = self._mul_table()
        W = a[..., I] * b[..., J]
        batch = W.shape[:-1]
        flat = W.reshape(-1, W.shape[-1]) @ scatter
        return np.asarray(flat).reshape(*batch, self.dim)


_RINGS: dict[tuple[int, int], TaylorRing] = {}


def ring(nvars: int, order: int) -> TaylorRing:
    """Shared ring factory; multiplication/derivative tables are reused."""
    key = (nvars, order)
    rg = _RINGS.get(key)
    if rg is None:
        rg = TaylorRing(nvars, order)
        _RINGS[key] = rg
    return rg


# ---------------------------------------------------------------------------
# series


def _binom_real(r: float, m: int) -> float:
    out = 1.0
    for i in range(m):
        out *= (r - i) / (i + 1)
    return out


class Series:
    """A numpy batch of truncated Taylor expansions over one ring."""

    __slots__ = ("ring", "coef", "valid")

    # keep numpy from hijacking ndarray <op> Series elementwise
    __array_ufunc__ = None

    def __init__(self, rg: TaylorRing, coef: np.ndarray, valid: int):
        valid = int(min(valid, rg.order))
        if valid < 0:
            raise TruncationError("series has no trusted coefficients left")
        self.ring = rg
        self.coef = np.asarray(coef, dtype=float)
        self.valid = valid

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, rg: TaylorRing, value, valid: int | None = None) -> "Series":
        value = np.asarray(value, dtype=float)
        coef = np.zeros(value.shape + (rg.dim,))
        coef[..., 0] = value
        return cls(rg, coef, rg.order if valid is None else valid)

    @classmethod
    def seed(cls, rg: TaylorRing, var: int, value: float) -> "Series":
        """The coordinate function ``value + (v_var - value)`` as a series."""
        coef = np.zeros(rg.dim)
        coef[0] = value
        if rg.order >= 1:
            e = tuple(1 if i == var else 0 for i in range(rg.nvars))
            coef[rg.index[e]] = 1.0
        return cls(rg, coef, rg.order)

    @staticmethod
    def stack(items: Sequence["Series"], axis: int = 0) -> "Series":
        rg = items[0].ring
        valid = min(s.valid for s in items)
        return Series(rg, np.stack([s.coef for s in items], axis=axis), valid)

    # -- shape helpers ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coef.shape[:-1]

    def __getitem__(self, key) -> "Series":
        if not isinstance(key, tuple):
            key = (key,)
        return Series(self.ring, self.coef[key + (slice(None),)], self.valid)

    def sum(self, axis: int) -> "Series":
        if axis < 0:
            raise ValueError("sum axis must index batch dimensions (>= 0)")
        return Series(self.ring, self.coef.sum(axis=axis), self.valid)

    def transpose(self, *axes: int) -> "Series":
        """Permute batch axes; the trailing ring axis stays in place."""
        if any(a < 0 for a in axes):
            raise ValueError("transpose axes must index batch dimensions (>= 0)")
        perm = tuple(axes) + (self.coef.ndim - 1,)
        return Series(self.ring, np.transpose(self.coef, perm), self.valid)

    def copy(self) -> "Series":
        return Series(self.ring, self.coef.copy(), self.valid)

    # -- extraction ---------------------------------------------------------

    @property
    def val(self) -> np.ndarray:
        """Constant term(s): the function value(s) at the expansion point."""
        return self.coef[..., 0]

    def extract(self, alpha: Sequence[int]) -> np.ndarray:
        """Partial-derivative value(s) for the multi-index ``alpha``."""
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.ring.nvars:
            raise ValueError(f"multi-index must have length {self.ring.nvars}")
        k = sum(alpha)
        if k > self.valid:
            raise TruncationError(
                f"order-{k} coefficient requested from a series valid to order {self.valid}"
            )
        return self.coef[..., self.ring.index[alpha]] * math.prod(
            math.factorial(a) for a in alpha
        )

    # -- arithmetic ---------------------------------------------------------

    def _lift(self, other) -> "Series | None":
        if isinstance(other, Series):
            if other.ring is not self.ring:
                raise ValueError("series from different rings")
            return other
        if isinstance(other, (int, float, np.floating, np.integer, np.ndarray)):
            return Series.const(self.ring, other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Series(self.ring, self.coef + o.coef, min(self.valid, o.valid))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Series(self.ring, self.coef - o.coef, min(self.valid, o.valid))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Series(self.ring, o.coef - self.coef, min(self.valid, o.valid))

    def __neg__(self):
        return Series(self.ring, -self.coef, self.valid)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Series(self.ring, self.coef * float(other), self.valid)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return Series(
            self.ring, self.ring.mul_coef(self.coef, o.coef), min(self.valid, o.valid)
        )

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Series(self.ring, self.coef / float(other), self.valid)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.recip()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.recip()

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            return self._int_pow(int(p))
        if isinstance(p, (float, np.floating)):
            if float(p).is_integer():
                return self._int_pow(int(p))
            return self.powr(float(p))
        return NotImplemented

    def _int_pow(self, p: int) -> "Series":
        if p < 0:
            return self.recip()._int_pow(-p)
        out = Series.const(self.ring, np.ones(self.shape), self.valid)
        base = self
        while p:
            if p & 1:
                out = out * base
            base = base * base if p > 1 else base
            p >>= 1
        return out

    # -- derivatives --------------------------------------------------------

    def d(self, var: int) -> "Series":
        """Partial derivative with respect to ring variable ``var``."""
        if self.valid < 1:
            raise TruncationError("cannot differentiate a series valid only to order 0")
        src, dst, fac = self.ring._diff_table(var)
        out = np.zeros_like(self.coef)
        out[..., dst] = self.coef[..., src] * fac
        return Series(self.ring, out, self.valid - 1)

    # -- analytic functions -------------------------------------------------

    def _compose(self, dcoefs: list[np.ndarray]) -> "Series":
        """Evaluate sum_m dcoefs[m] * (s - s0)^m in the ring (Horner)."""
        rg = self.ring
        t = self.coef.copy()
        t[..., 0] = 0.0
        acc = np.zeros(np.broadcast_shapes(self.shape, dcoefs[-1].shape) + (rg.dim,))
        acc[..., 0] = dcoefs[rg.order]
        for m in range(rg.order - 1, -1, -1):
            acc = rg.mul_coef(acc, t)
            acc[..., 0] += dcoefs[m]
        return Series(rg, acc, self.valid)

    def recip(self) -> "Series":
        c0 = self.val
        if np.any(c0 == 0.0):
            raise ZeroDivisionError("series with zero constant term has no reciprocal")
        dcoefs = [((-1.0) ** m) / c0 ** (m + 1) for m in range(self.ring.order + 1)]
        return self._compose(dcoefs)

    def powr(self, r: float) -> "Series":
        c0 = self.val
        if np.any(c0 <= 0.0):
            raise ValueError("fractional power of a series needs a positive value")
        dcoefs = [_binom_real(r, m) * c0 ** (r - m) for m in range(self.ring.order + 1)]
        return self._compose(dcoefs)

    def sqrt(self) -> "Series":
        return self.powr(0.5)

    def exp(self) -> "Series":
        e0 = np.exp(self.val)
        dcoefs = [e0 / math.factorial(m) for m in range(self.ring.order + 1)]
        return self._compose(dcoefs)

    def log(self) -> "Series":
        c0 = self.val
        if np.any(c0 <= 0.0):
            raise ValueError("log of a series needs a positive value")
        dcoefs = [np.log(c0)] + [
            ((-1.0) ** (m + 1)) / (m * c0**m) for m in range(1, self.ring.order + 1)
        ]
        return self._compose(dcoefs)

    def sin(self) -> "Series":
        c0 = self.val
        dcoefs = [np.sin(c0 + m * math.pi / 2) / math.factorial(m) for m in range(self.ring.order + 1)]
        return self._compose(dcoefs)

    def cos(self) -> "Series":
        c0 = self.val
        dcoefs = [np.cos(c0 + m * math.pi / 2) / math.factorial(m) for m in range(self.ring.order + 1)]
        return self._compose(dcoefs)

    def abs(self) -> "Series":
        c0 = self.val
        if self.ring.order >= 1 and np.any(c0 == 0.0):
            raise ValueError("abs is not differentiable at 0")
        sign = np.where(c0 >= 0.0, 1.0, -1.0)
        return Series(self.ring, self.coef * sign[..., None], self.valid)


# ---------------------------------------------------------------------------
# matrix helpers over the ring


def matmul(a: Series, b: Series) -> Series:
    """Matrix product of two (n, n)-batched series."""
    return (a[:, :, None] * b[None, :, :]).sum(axis=1)


def matinv(g: Series) -> Series:
    """Inverse of an (n, n)-batched series matrix via a Neumann expansion.

    Requires the constant-term matrix to be invertible; the correction part
    is nilpotent in the truncated ring, so the expansion terminates exactly.
    """
    n = g.coef.shape[0]
    if g.coef.ndim != 3 or g.coef.shape[1] != n:
        raise ValueError("matinv expects an (n, n) series batch")
    rg = g.ring
    b0 = np.linalg.inv(g.val)
    b0g = Series(rg, np.einsum("ij,jkd->ikd", b0, g.coef), g.valid)
    rem = Series.const(rg, np.eye(n), g.valid) - b0g  # constant term is 0
    acc = Series.const(rg, np.eye(n), g.valid)
    power = rem
    for _ in range(rg.order):
        acc = acc + power
        power = matmul(power, rem)
    return Series(rg, np.einsum("ijd,jk->ikd", acc.coef, b0), g.valid)


# ---------------------------------------------------------------------------
# chart seeding


@dataclass
class ChartJets:
    """Coordinate series ``x_i = x0_i + dx_i``, ``y_i = y0_i + dy_i``.

    The ring has ``2n`` variables: 0..n-1 are the x-slots, n..2n-1 the
    y-slots.  Every field in the package is evaluated on one of these.
    """

    ring: TaylorRing
    x0: np.ndarray
    y0: np.ndarray
    xs: Series
    ys: Series

    @classmethod
    def at(cls, x, y, order: int) -> "ChartJets":
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or y.shape != x.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        n = x.shape[0]
        rg = ring(2 * n, order)
        xs = Series.stack([Series.seed(rg, i, x[i]) for i in range(n)])
        ys = Series.stack([Series.seed(rg, n + i, y[i]) for i in range(n)])
        return cls(rg, x, y, xs, ys)

    @property
    def n(self) -> int:
        return self.x0.shape[0]

    def const(self, value) -> Series:
        return Series.const(self.ring, value)


# ---------------------------------------------------------------------------
# fields


@runtime_checkable
class ScalarField(Protocol):
    """Anything evaluable to a scalar series on chart jets."""

    def eval(self, jets: ChartJets) -> Series: ...


@runtime_checkable
class CovectorField(Protocol):
    """Evaluates to an (n,)-batched series of components."""

    def eval(self, jets: ChartJets) -> Series: ...


@runtime_checkable
class MatrixField(Protocol):
    """Evaluates to an (n, n)-batched series; entry [i, j] is the i-th
    component of the image of the j-th frame vector."""

    def eval(self, jets: ChartJets) -> Series: ...


@dataclass(frozen=True)
class ConstantScalar:
    value: float = 0.0

    def eval(self, jets: ChartJets) -> Series:
        return jets.const(float(self.value))

    def describe(self) -> str:
        return f"constant {self.value}"


@dataclass(frozen=True)
class ConstantCovector:
    values: tuple[float, ...]

    def eval(self, jets: ChartJets) -> Series:
        return jets.const(np.asarray(self.values, dtype=float))

    def describe(self) -> str:
        return f"constant covector {list(self.values)}"


@dataclass(frozen=True)
class ConstantMatrix:
    values: tuple[tuple[float, ...], ...]

    def eval(self, jets: ChartJets) -> Series:
        return jets.const(np.asarray(self.values, dtype=float))

    def describe(self) -> str:
        return "constant matrix"


@dataclass(frozen=True)
class ZeroCovector:
    n: int

    def eval(self, jets: ChartJets) -> Series:
        return jets.const(np.zeros(self.n))

    def describe(self) -> str:
        return "zero covector"


@dataclass(frozen=True)
class ZeroMatrix:
    n: int

    def eval(self, jets: ChartJets) -> Series:
        return jets.const(np.zeros((self.n, self.n)))

    def describe(self) -> str:
        return "zero matrix"


@dataclass(frozen=True)
class IdentityMatrix:
    n: int

    def eval(self, jets: ChartJets) -> Series:
        return jets.const(np.eye(self.n))

    def describe(self) -> str:
        return "identity"


# ---------------------------------------------------------------------------
# jets as a user-facing wrapper


class Jet:
    """A scalar truncated Taylor expansion at a chart point."""

    __slots__ = ("series", "n")

    def __init__(self, series: Series, n: int):
        if series.shape != ():
            raise ValueError("Jet wraps a single scalar series")
        self.series = series
        self.n = n

    @property
    def order(self) -> int:
        return self.series.valid

    @property
    def value(self) -> float:
        return float(self.series.val)

    def partial(self, alpha: Sequence[int]) -> float:
        """Partial derivative for a multi-index over (x_1..x_n, y_1..y_n)."""
        return float(self.series.extract(alpha))

    def _wrap(self, s: Series) -> "Jet":
        return Jet(s, self.n)

    def __add__(self, other):
        other = other.series if isinstance(other, Jet) else other
        return self._wrap(self.series + other)

    __radd__ = __add__

    def __sub__(self, other):
        other = other.series if isinstance(other, Jet) else other
        return self._wrap(self.series - other)

    def __rsub__(self, other):
        other = other.series if isinstance(other, Jet) else other
        return self._wrap(other - self.series)

    def __neg__(self):
        return self._wrap(-self.series)

    def __mul__(self, other):
        other = other.series if isinstance(other, Jet) else other
        return self._wrap(self.series * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = other.series if isinstance(other, Jet) else other
        return self._wrap(self.series / other)

    def __rtruediv__(self, other):
        other = other.series if isinstance(other, Jet) else other
        return self._wrap(other / self.series)

    def __pow__(self, p):
        return self._wrap(self.series**p)


def _jets_for(point, order: int) -> ChartJets:
    return ChartJets.at(point.x, point.y, order)


def partial(field: ScalarField, point, alpha: Sequence[int]) -> float:
    """Partial derivative of a scalar field at a chart point.

    ``alpha`` is a multi-index over ``(x_1..x_n, y_1..y_n)`` with total order
    at most ``MAX_PARTIAL_ORDER``; ``point`` needs ``.x``/``.y`` arrays.
    """
    alpha = tuple(int(a) for a in alpha)
    k = sum(alpha)
    if k > MAX_PARTIAL_ORDER:
        raise ValueError(f"partial() supports orders up to {MAX_PARTIAL_ORDER}")
    jets = _jets_for(point, k)
    return float(field.eval(jets).extract(alpha))


def hessian_y(field: ScalarField, point) -> np.ndarray:
    """Symmetrized y-Hessian of a scalar field at a chart point."""
    jets = _jets_for(point, 2)
    s = field.eval(jets)
    n = jets.n
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            alpha = [0] * (2 * n)
            alpha[n + i] += 1
            alpha[n + j] += 1
            out[i, j] = s.extract(alpha)
    return 0.5 * (out + out.T)


def third_y(field: ScalarField, point) -> np.ndarray:
    """Symmetrized third y-derivative tensor of a scalar field."""
    jets = _jets_for(point, 3)
    s = field.eval(jets)
    n = jets.n
    out = np.empty((n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                alpha = [0] * (2 * n)
                alpha[n + i] += 1
                alpha[n + j] += 1
                alpha[n + k] += 1
                out[i, j, k] = s.extract(alpha)
    sym = np.zeros_like(out)
    for perm in itertools.permutations((0, 1, 2)):
        sym += np.transpose(out, perm)
    return sym / 6.0
