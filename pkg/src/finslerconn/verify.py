"""Seeded verification suites over the package's whole identity surface.

Every identity the other modules implement is turned into a reportable,
deterministic check here: the four defining conditions of the deformed
connection, its internal construction routes, the torsion and curvature
identities, the five differential curvature identities of Bianchi type,
the process diagram, the classical case catalog, finite-difference
cross-checks of the jet substrate, and the closed forms of the
constant-curvature surface sample.

Each suite draws chart points from a :class:`SamplePlan` (independent
seeded substreams per metric and suite), aggregates worst-case residuals
into :class:`CheckRow` entries, and wraps them in a :class:`CheckReport`
whose payload serializes deterministically for a given seed.  Residuals
are relative -- ``max|difference| / (1 + max|participant|)`` -- so one
tolerance scale works across norms of different magnitude.  Tolerances
are tiered by derivative depth (see :data:`DEFAULT_TOLERANCES`) and every
number can be overridden by name.

Every suite accepts ``fuzz=True``, which injects a ``1e-3`` coefficient
perturbation into one side of its comparisons.  A healthy suite must then
fail, so a fuzz run doubles as a sensitivity control: it proves the
comparisons have teeth and none of the green rows is vacuous.
"""

from __future__ import annotations

import hashlib
import json
import zlib
from dataclasses import dataclass, fields
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ad import ChartJets
from .cases import catalog, check_case, closed_form_delta, default_free_choices, preset
from .connection import (
    CARTAN,
    Connection,
    cov_deriv,
    curvature_h,
    curvature_mixed,
    curvature_v,
    metric_deficit,
    ricci,
    torsions,
)
from .deformation import (
    DeformationParams,
    build,
    construction_residuals,
    curvature_relations,
    deformation_data,
    torsion_relations,
)
from .expr import ExprCovectorField, ExprMatrixField, ExprScalarField
from .finsler import ChartPoint, FinslerStructure
from .processes import ConnectionFamily, derive_family, diagram_residuals
from .samples import euclidean, hyperbolic, randers

__all__ = [
    "DEFAULT_TOLERANCES",
    "SamplePlan",
    "CheckRow",
    "CheckReport",
    "sample_points",
    "random_params",
    "cartan_flat",
    "default_metrics",
    "theorem_residuals",
    "bianchi_residuals",
    "first_bianchi_residual",
    "fd_residuals",
    "constant_curvature_residuals",
    "check_theorem",
    "check_construction",
    "check_torsions",
    "check_curvatures",
    "check_bianchi",
    "check_processes",
    "check_cases",
    "fd_crosscheck",
    "check_constant_curvature",
    "run_all",
]


DEFAULT_TOLERANCES: dict[str, float] = {
    "first-order": 1e-8,
    "theorem": 1e-7,
    "torsion": 1e-7,
    "torsion-exact": 1e-12,
    "curvature": 1e-7,
    "curvature-general": 1e-6,
    "bianchi": 1e-6,
    "riemann": 1e-7,
    "processes": 1e-8,
    "collapse": 1e-10,
    "cases": 1e-7,
    "fd": 1e-5,
}
"""Named tolerance tiers, override any of them by name.

``first-order`` covers identities with at most one derivative of built
coefficients, ``curvature`` the second-derivative identities on quadratic
norms (``curvature-general`` on norms with nonzero Cartan torsion),
``bianchi`` the third-derivative differential identities, ``collapse``
the zero-parameter reductions that should be exact up to roundoff, and
``fd`` the finite-difference cross-checks whose floor is the difference
stencil, not the arithmetic.
"""

_FUZZ_SIZE = 1e-3


def _tols(overrides: Mapping[str, float] | None) -> dict[str, float]:
    merged = dict(DEFAULT_TOLERANCES)
    if overrides:
        unknown = sorted(set(overrides) - set(merged))
        if unknown:
            raise ValueError(
                f"unknown tolerance name(s) {unknown}; "
                f"known names: {sorted(merged)}"
            )
        merged.update({name: float(value) for name, value in overrides.items()})
    return merged


def _rel(diff: np.ndarray, *refs: np.ndarray) -> float:
    """Max-abs of ``diff`` relative to 1 + the largest participating value."""
    num = float(np.max(np.abs(diff)))
    scale = 1.0 + max(
        (float(np.max(np.abs(r))) for r in refs if r.size), default=0.0
    )
    return num / scale


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class SamplePlan:
    """Seeded sampling recipe shared by every suite.

    Chart positions are uniform in the centered box ``[-box, box]^n`` and
    fiber coordinates are uniform in the positive shell ``[shell[0],
    shell[1]]^n``, which keeps all samples inside the common domain of the
    bundled norms (the drift norm and the quartic norm restrict the usable
    cone, and the shell floor keeps the fiber away from the removed zero
    section).  Each (metric, suite) pair draws from its own substream of
    ``seed``, so adding a suite or metric never reshuffles the others.

    The point counts are per metric.  ``param_sets`` is the number of
    random parameter packs the defining-conditions suite exercises.
    """

    seed: int = 42
    box: float = 0.5
    shell: tuple[float, float] = (0.4, 1.6)
    param_sets: int = 5
    theorem_points: int = 50
    construction_points: int = 25
    torsion_points: int = 50
    curvature_points: int = 20
    bianchi_points: int = 6
    process_points: int = 12
    case_points: int = 4
    fd_points: int = 10

    def __post_init__(self) -> None:
        lo, hi = self.shell
        if lo < 0.1:
            raise ValueError(f"fiber shell floor {lo} is below the 0.1 minimum")
        if hi <= lo:
            raise ValueError(f"fiber shell {self.shell} is empty")
        if self.box <= 0:
            raise ValueError("chart box must have positive half-width")
        for f in fields(self):
            if f.name.endswith(("_points", "_sets")) and getattr(self, f.name) < 1:
                raise ValueError(f"{f.name} must be at least 1")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "box": self.box,
            "shell": list(self.shell),
            "param_sets": self.param_sets,
            "theorem_points": self.theorem_points,
            "construction_points": self.construction_points,
            "torsion_points": self.torsion_points,
            "curvature_points": self.curvature_points,
            "bianchi_points": self.bianchi_points,
            "process_points": self.process_points,
            "case_points": self.case_points,
            "fd_points": self.fd_points,
        }


def _rng(seed: int, *labels: str) -> np.random.Generator:
    """Independent deterministic substream for a (seed, labels...) path."""
    entropy = [int(seed)] + [zlib.crc32(label.encode("utf8")) for label in labels]
    return np.random.default_rng(entropy)


def sample_points(
    F: FinslerStructure, plan: SamplePlan, count: int, label: str = ""
) -> list[ChartPoint]:
    """Draw ``count`` chart points from the plan's substream for ``label``."""
    rng = _rng(plan.seed, F.name or "metric", label)
    lo, hi = plan.shell
    return [
        ChartPoint(
            rng.uniform(-plan.box, plan.box, F.n), rng.uniform(lo, hi, F.n)
        )
        for _ in range(count)
    ]


def _poly(rng: np.random.Generator, n: int) -> str:
    """A short random polynomial in the chart variables.

    Degree at most two, every coefficient inside ``[-1, 1]``; the constant
    term is kept away from zero so scalar weights do not vanish on a whole
    hypersurface of the sample box by accident.
    """
    names = [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
    c0 = rng.uniform(0.25, 0.85) * rng.choice([-1.0, 1.0])
    terms = [f"{c0:.3f}"]
    for var in rng.choice(names, size=2, replace=False):
        terms.append(f"{rng.uniform(-0.5, 0.5):+.3f}*{var}")
    a, b = rng.choice(names, size=2, replace=True)
    terms.append(f"{rng.uniform(-0.3, 0.3):+.3f}*{a}*{b}")
    return " ".join(terms)


def random_params(
    n: int, rng: np.random.Generator, name: str = "random"
) -> DeformationParams:
    """A full random parameter pack of low-degree polynomial fields.

    All six parameters are position- and direction-dependent, so the
    identities are exercised away from every special case, and every
    coefficient lies in ``[-1, 1]``.
    """
    form = lambda: ExprCovectorField(n, tuple(_poly(rng, n) for _ in range(n)))
    return DeformationParams(
        f1=ExprScalarField(n, _poly(rng, n)),
        f2=ExprScalarField(n, _poly(rng, n)),
        A=form(),
        B=form(),
        u=form(),
        phi=ExprMatrixField(
            n, tuple(tuple(_poly(rng, n) for _ in range(n)) for _ in range(n))
        ),
        name=name,
    )


def random_param_sets(F: FinslerStructure, plan: SamplePlan) -> list[DeformationParams]:
    """The plan's random parameter packs for one metric."""
    return [
        random_params(
            F.n, _rng(plan.seed, F.name or "metric", f"params-{i}"), name=f"random-{i}"
        )
        for i in range(plan.param_sets)
    ]


def cartan_flat(F: FinslerStructure) -> bool:
    """Whether the norm is quadratic in the fiber (vanishing Cartan tensor).

    Decided numerically at one interior probe point; quadratic norms get
    the tighter curvature tolerances.
    """
    probe = ChartPoint(np.full(F.n, 0.11), np.linspace(0.8, 1.2, F.n))
    return float(np.max(np.abs(F.tower(probe, 3).T_mix.val))) < 1e-10


def default_metrics() -> list[FinslerStructure]:
    """The bundled desk-scale metric list: flat, curved quadratic, drift."""
    return [euclidean(2), hyperbolic(), randers()]


# ---------------------------------------------------------------------------
# rows and reports


@dataclass(frozen=True)
class CheckRow:
    """One aggregated check: worst residual against one tolerance."""

    suite: str
    label: str
    residual: float
    tolerance: float
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "label": self.label,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "note": self.note,
        }


@dataclass
class CheckReport:
    """Rows plus the sampling metadata that reproduces them.

    The payload is plain JSON-serializable data with sorted keys, so two
    runs from the same configuration and seed produce byte-identical
    serializations; anything time-dependent belongs outside the payload.
    """

    suite: str
    rows: list[CheckRow]
    meta: dict

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(row.passed for row in self.rows)

    def failures(self) -> list[CheckRow]:
        return [row for row in self.rows if not row.passed]

    def payload(self) -> dict:
        return {
            "suite": self.suite,
            "meta": self.meta,
            "rows": [row.to_dict() for row in self.rows],
            "passed": self.passed,
        }

    def payload_json(self) -> str:
        return json.dumps(self.payload(), sort_keys=True, indent=2)

    def digest(self) -> str:
        canonical = json.dumps(self.payload(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf8")).hexdigest()

    def summary(self) -> str:
        lines = []
        for row in self.rows:
            verdict = "pass" if row.passed else "FAIL"
            lines.append(
                f"{verdict:4s}  {row.suite:28s} {row.label:40s} "
                f"{row.residual:10.3e} < {row.tolerance:8.1e}"
            )
        state = "all checks passed" if self.passed else (
            f"{len(self.failures())} of {len(self.rows)} checks failed"
        )
        lines.append(f"{self.suite}: {state}")
        return "\n".join(lines)


def _report(
    suite: str,
    residuals: Mapping[str, float],
    tol_of: Mapping[str, str],
    tols: Mapping[str, float],
    meta: dict,
    notes: Mapping[str, str] | None = None,
) -> CheckReport:
    """Wrap aggregated residuals into rows, resolving tolerance names."""
    rows = []
    notes = notes or {}
    for label, residual in residuals.items():
        tol = tols[tol_of[label]]
        rows.append(
            CheckRow(
                suite=suite,
                label=label,
                residual=float(residual),
                tolerance=tol,
                passed=bool(residual < tol),
                note=notes.get(label, ""),
            )
        )
    return CheckReport(suite, rows, meta)


def _aggregate(per_point: Iterable[Mapping[str, float]]) -> dict[str, float]:
    """Worst residual per label over a stream of per-point dictionaries."""
    worst: dict[str, float] = {}
    for rowset in per_point:
        for label, value in rowset.items():
            worst[label] = max(worst.get(label, 0.0), float(value))
    return worst


def _meta(F: FinslerStructure, plan: SamplePlan, points: int, **extra) -> dict:
    out = {"metric": F.name, "seed": plan.seed, "points": points}
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# fuzz-injection plumbing


def _clone_params(params: DeformationParams) -> DeformationParams:
    """Same six fields under a fresh identity (fresh memo caches)."""
    return DeformationParams(
        f1=params.f1,
        f2=params.f2,
        A=params.A,
        B=params.B,
        u=params.u,
        phi=params.phi,
        name=f"{params.name}+fuzz" if params.name else "fuzz",
    )


def _perturbed(conn: Connection, slot: str, size: float = _FUZZ_SIZE) -> Connection:
    """A copy of ``conn`` with one coefficient of one block shifted by ``size``."""
    if slot not in ("nlc", "hor", "ver"):
        raise ValueError(f"unknown coefficient block {slot!r}")

    def produce(t):
        base = {"nlc": conn.N, "hor": conn.H, "ver": conn.V}[slot](t)
        bump = np.zeros(base.shape)
        bump[(0,) * bump.ndim] = size
        return base + t.jets.const(bump)

    return Connection(
        name=f"{conn.name}+bump-{slot}",
        nlc=produce if slot == "nlc" else conn.nlc,
        hor=produce if slot == "hor" else conn.hor,
        ver=produce if slot == "ver" else conn.ver,
    )


def _fuzzed_params(params: DeformationParams, slot: str) -> DeformationParams:
    """A pack whose built connection carries a bumped coefficient block.

    The clone shares the six parameter fields, so every closed form stays
    what it should be, while its memoized connection is replaced by the
    perturbed one; identity suites that compare built coefficients against
    closed forms must then fail.
    """
    clone = _clone_params(params)
    clone.__dict__["_connection"] = _perturbed(build(params), slot)
    return clone


# ---------------------------------------------------------------------------
# defining conditions


def theorem_residuals(
    params: DeformationParams,
    F: FinslerStructure,
    point: ChartPoint,
    order: int = 4,
    conn: Connection | None = None,
) -> dict[str, float]:
    """Residuals of the four defining conditions at one point.

    * ``condition-(i)``: the horizontal metric deficit equals its closed
      two-weight shape ``2 f1 A_j g_kl + f2 (B_k g_lj + B_l g_jk)``.
    * ``condition-(ii)``: the vertical metric deficit vanishes.
    * ``condition-(iii)``: the horizontal torsion is the quarter form
      ``u_k phi^i_j - u_j phi^i_k``.
    * ``condition-(iv)``: the lowered vertical coefficients are totally
      symmetric.
    """
    t = F.tower(point, order)
    d = deformation_data(params, t)
    conn = build(params) if conn is None else conn
    g = t.g.val
    f1 = float(d.f1.val)
    f2 = float(d.f2.val)
    A, B, u, phi = d.A.val, d.B.val, d.u.val, d.phi.val

    deficit_h = metric_deficit(conn, t, horizontal=True).val
    closed_h = (2.0 * f1) * np.einsum("j,kl->jkl", A, g) + f2 * (
        np.einsum("k,lj->jkl", B, g) + np.einsum("l,jk->jkl", B, g)
    )
    deficit_v = metric_deficit(conn, t, horizontal=False).val
    hh = torsions(conn, t).hh.val
    quarter = np.einsum("k,ij->ijk", u, phi) - np.einsum("j,ik->ijk", u, phi)
    lowered = np.einsum("mi,mjk->ijk", g, conn.V(t).val)
    symmetry = max(
        _rel(lowered - lowered.transpose(1, 0, 2), lowered),
        _rel(lowered - lowered.transpose(0, 2, 1), lowered),
    )
    return {
        "condition-(i)-horizontal-deficit": _rel(deficit_h - closed_h, deficit_h, closed_h),
        "condition-(ii)-vertical-deficit": _rel(deficit_v, g),
        "condition-(iii)-quarter-torsion": _rel(hh - quarter, hh, quarter),
        "condition-(iv)-vertical-symmetry": symmetry,
    }


_THEOREM_TOLS = {
    "condition-(i)-horizontal-deficit": "theorem",
    "condition-(ii)-vertical-deficit": "theorem",
    "condition-(iii)-quarter-torsion": "theorem",
    "condition-(iv)-vertical-symmetry": "theorem",
}


def check_theorem(
    params: DeformationParams | Sequence[DeformationParams],
    F: FinslerStructure,
    plan: SamplePlan | None = None,
    tolerances: Mapping[str, float] | None = None,
    fuzz: bool = False,
) -> CheckReport:
    """Defining conditions over sampled points and parameter packs.

    ``params`` may be a single pack or a sequence; the report keeps the
    worst residual per condition across all packs and points.
    """
    plan = plan or SamplePlan()
    tols = _tols(tolerances)
    packs = [params] if isinstance(params, DeformationParams) else list(params)
    points = sample_points(F, plan, plan.theorem_points, "theorem-fuzz" if fuzz else "theorem")

    def stream():
        for pack in packs:
            conn = _perturbed(build(pack), "hor") if fuzz else None
            for p in points:
                yield theorem_residuals(pack, F, p, conn=conn)

    worst = _aggregate(stream())
    meta = _meta(
        F, plan, len(points), packs=[pack.name for pack in packs], fuzz=fuzz
    )
    return _report(f"theorem[{F.name}]", worst, _THEOREM_TOLS, tols, meta)


# ---------------------------------------------------------------------------
# construction routes, torsions, curvatures (aggregating the pointwise suites)


_CONSTRUCTION_TOLS = {
    "deflection": "first-order",
    "spray-from-nonlinear": "first-order",
    "spray-shift-consistency": "first-order",
    "shift-contraction": "first-order",
    "compatibility-route": "first-order",
}


def check_construction(
    params: DeformationParams,
    F: FinslerStructure,
    plan: SamplePlan | None = None,
    tolerances: Mapping[str, float] | None = None,
    fuzz: bool = False,
) -> CheckReport:
    """Internal consistency of the build: deflection, spray, both routes."""
    plan = plan or SamplePlan()
    tols = _tols(tolerances)
    label = "construction-fuzz" if fuzz else "construction"
    points = sample_points(F, plan, plan.construction_points, label)

    def one(p: ChartPoint) -> Mapping[str, float]:
        if fuzz:
            # Shift one horizontal coefficient in the memoized data the
            # pointwise suite is about to read.
            t = F.tower(p, 4)
            d = deformation_data(params, t)
            bump = np.zeros(d.horizontal.shape)
            bump[0, 0, 0] = _FUZZ_SIZE
            d.__dict__["horizontal"] = d.horizontal + t.jets.const(bump)
        return construction_residuals(params, F, p)

    worst = _aggregate(one(p) for p in points)
    meta = _meta(F, plan, len(points), pack=params.name, fuzz=fuzz)
    return _report(f"construction[{F.name}]", worst, _CONSTRUCTION_TOLS, tols, meta)


_TORSION_TOLS = {
    "hv-coincides": "torsion-exact",
    "hh-quarter-form": "first-order",
    "vv-vanishes": "first-order",
    "vhv-shift-rule": "torsion",
    "vh-shift-rule": "torsion",
}


def check_torsions(
    params: DeformationParams,
    F: FinslerStructure,
    plan: SamplePlan | None = None,
    tolerances: Mapping[str, float] | None = None,
    fuzz: bool = False,
) -> CheckReport:
    """The five torsion identities over sampled points."""
    plan = plan or SamplePlan()
    tols = _tols(tolerances)
    pack = _fuzzed_params(params, "ver") if fuzz else params
    points = sample_points(F, plan, plan.torsion_points, "torsions-fuzz" if fuzz else "torsions")
    worst = _aggregate(torsion_relations(pack, F, p) for p in points)
    meta = _meta(F, plan, len(points), pack=params.name, fuzz=fuzz)
    return _report(f"torsions[{F.name}]", worst, _TORSION_TOLS, tols, meta)


def check_curvatures(
    params: DeformationParams,
    F: FinslerStructure,
    plan: SamplePlan | None = None,
    tolerances: Mapping[str, float] | None = None,
    fuzz: bool = False,
) -> CheckReport:
    """The three curvature identities over sampled points.

    Quadratic norms get the tighter expansion tolerance; norms with
    nonzero Cartan torsion get the general one.
    """
    plan = plan or SamplePlan()
    tols = _tols(tolerances)
    expansion = "curvature" if cartan_flat(F) else "curvature-general"
    tol_of = {
        "v-curvature-coincides": "first-order",
        "hv-curvature-expansion": expansion,
        "h-curvature-expansion": expansion,
    }
    pack = _fuzzed_params(params, "ver") if fuzz else params
    points = sample_points(F, plan, plan.curvature_points, "curvatures-fuzz" if fuzz else "curvatures")
    worst = _aggregate(curvature_relations(pack, F, p) for p in points)
    meta = _meta(F, plan, len(points), pack=params.name, fuzz=fuzz)
    return _report(f"curvatures[{F.name}]", worst, tol_of, tols, meta)


# ---------------------------------------------------------------------------
# differential curvature identities


def _cyc3(M: np.ndarray) -> np.ndarray:
    """Cyclic sum over the three argument axes 1, 2, 3."""
    if M.ndim == 4:
        return M + M.transpose(0, 2, 3, 1) + M.transpose(0, 3, 1, 2)
    return M + M.transpose(0, 2, 3, 1, 4) + M.transpose(0, 3, 1, 2, 4)


def bianchi_residuals(
    params: DeformationParams,
    F: FinslerStructure,
    point: ChartPoint,
    order: int = 6,
    perturbation: float = 0.0,
) -> dict[str, float]:
    """Residuals of the five differential curvature identities at a point.

    The identities tie covariant derivatives of the three curvatures and
    two torsions together; with ``X = e_a``, ``Y = e_b``, ``Z = e_c`` and
    value argument ``e_m``, each is contracted into an explicit index sum
    below (cyclic sums written out, alternations as explicit swaps).  The
    default order leaves one trusted coefficient layer for the outermost
    covariant derivative of a curvature of the built connection.

    The identities are structural -- they hold for any coefficient triple
    expressed through its own torsions and curvatures -- so the
    fuzz-injection hook perturbs one entry of each curvature array after
    extraction, not the connection itself.
    """
    t = F.tower(point, order)
    conn = build(params)
    tb = torsions(conn, t)
    R_s = curvature_h(conn, t)
    P_s = curvature_mixed(conn, t)
    S_s = curvature_v(conn, t)

    V, Q = tb.hv.val, tb.hh.val
    Phat, Rhat, vv = tb.vhv.val, tb.vh.val, tb.vv.val
    R, P, S = R_s.val, P_s.val, S_s.val
    if perturbation:
        R, P, S = R.copy(), P.copy(), S.copy()
        R[(0,) * R.ndim] += perturbation
        P[(0,) * P.ndim] += perturbation
        S[(0,) * S.ndim] += perturbation

    covT_h = cov_deriv(conn, t, tb.hv, horizontal=True).val
    covQ_v = cov_deriv(conn, t, tb.hh, horizontal=False).val
    covQ_h = cov_deriv(conn, t, tb.hh, horizontal=True).val
    covS_h = cov_deriv(conn, t, S_s, horizontal=True).val
    covP_v = cov_deriv(conn, t, P_s, horizontal=False).val
    covP_h = cov_deriv(conn, t, P_s, horizontal=True).val
    covR_v = cov_deriv(conn, t, R_s, horizontal=False).val
    covR_h = cov_deriv(conn, t, R_s, horizontal=True).val

    # (a) mixed curvature antisymmetrized in its two horizontal arguments
    lhs_a = np.einsum("icab->iabc", P) - np.einsum("iacb->iabc", P)
    rhs_a = (
        np.einsum("ciba->iabc", covT_h)
        - np.einsum("aibc->iabc", covT_h)
        - np.einsum("bica->iabc", covQ_v)
        + np.einsum("ibp,pca->iabc", V, Q)
        - np.einsum("ipa,pcb->iabc", V, Phat)
        + np.einsum("ipc,pab->iabc", V, Phat)
        - np.einsum("icp,pba->iabc", Q, V)
        + np.einsum("iap,pbc->iabc", Q, V)
    )

    # (b) cyclic sum of the horizontal curvature
    lhs_b = _cyc3(
        np.einsum("icab->iabc", R) - np.einsum("ipc,pab->iabc", V, Rhat)
    )
    rhs_b = _cyc3(
        np.einsum("iap,pbc->iabc", Q, Q) - np.einsum("aibc->iabc", covQ_h)
    )

    # (c) horizontal derivative of the vertical curvature
    lhs_c = np.einsum("cimab->iabcm", covS_h) - np.einsum("imcp,pab->iabcm", P, vv)
    inner_c = (
        -np.einsum("bimca->iabcm", covP_v)
        + np.einsum("impb,pac->iabcm", P, V)
        + np.einsum("impb,pca->iabcm", S, Phat)
    )
    rhs_c = inner_c - inner_c.transpose(0, 2, 1, 3, 4)

    # (d) vertical derivative of the horizontal curvature
    lhs_d = np.einsum("aimbc->iabcm", covR_v)
    rhs_d = np.einsum("impa,pbc->iabcm", S, Rhat) - np.einsum(
        "impa,pbc->iabcm", P, Q
    )
    inner_d = (
        np.einsum("cimba->iabcm", covP_h)
        + np.einsum("imcp,pba->iabcm", P, Phat)
        + np.einsum("impb,pac->iabcm", R, V)
    )
    rhs_d = rhs_d + inner_d - inner_d.transpose(0, 1, 3, 2, 4)

    # (e) cyclic sum of the horizontal derivative of the horizontal curvature
    core_e = (
        np.einsum("aimbc->iabcm", covR_h)
        + np.einsum("imap,pbc->iabcm", P, Rhat)
        + np.einsum("impc,pab->iabcm", R, Q)
    )
    sum_e = _cyc3(core_e)

    return {
        "bianchi-(a)": _rel(lhs_a - rhs_a, lhs_a, rhs_a),
        "bianchi-(b)": _rel(lhs_b - rhs_b, lhs_b, rhs_b),
        "bianchi-(c)": _rel(lhs_c - rhs_c, lhs_c, rhs_c),
        "bianchi-(d)": _rel(lhs_d - rhs_d, lhs_d, rhs_d),
        "bianchi-(e)": _rel(sum_e, core_e),
    }


_BIANCHI_TOLS = {f"bianchi-({k})": "bianchi" for k in "abcde"}


def first_bianchi_residual(
    F: FinslerStructure,
    point: ChartPoint,
    order: int = 5,
    perturbation: float = 0.0,
) -> float:
    """Cyclic sum of the metric horizontal curvature at one point.

    For a quadratic norm the metric connection's horizontal curvature is
    the Riemann tensor of the underlying metric and its cyclic sum over
    the three frame arguments vanishes -- the classical first identity.
    ``perturbation`` shifts one curvature entry before the sum.
    """
    t = F.tower(point, order)
    R = curvature_h(CARTAN, t).val
    if perturbation:
        R = R.copy()
        R[(0,) * R.ndim] += perturbation
    return _rel(_cyc3(np.einsum("icab->iabc", R)), R)


def check_bianchi(
    params: DeformationParams,
    F: FinslerStructure,
    plan: SamplePlan | None = None,
    tolerances: Mapping[str, float] | None = None,
    fuzz: bool = False,
) -> CheckReport:
    """The five differential identities over sampled points.

    On quadratic norms a ``first-bianchi-metric`` row is added: the
    classical first identity for the metric connection, at its own
    (tighter) tolerance.
    """
    plan = plan or SamplePlan()
    tols = _tols(tolerances)
    size = _FUZZ_SIZE if fuzz else 0.0
    points = sample_points(F, plan, plan.bianchi_points, "bianchi-fuzz" if fuzz else "bianchi")
    worst = _aggregate(
        bianchi_residuals(params, F, p, perturbation=size) for p in points
    )
    tol_of = dict(_BIANCHI_TOLS)
    if cartan_flat(F):
        worst["first-bianchi-metric"] = max(
            first_bianchi_residual(F, p, perturbation=size) for p in points
        )
        tol_of["first-bianchi-metric"] = "riemann"
    meta = _meta(F, plan, len(points), pack=params.name, fuzz=fuzz)
    return _report(f"bianchi[{F.name}]", worst, tol_of, tols, meta)


# ---------------------------------------------------------------------------
# process diagram


def check_processes(
    params: DeformationParams,
    F: FinslerStructure,
    plan: SamplePlan | None = None,
    tolerances: Mapping[str, float] | None = None,
    fuzz: bool = False,
) -> CheckReport:
    """Every edge of the two-square process diagram over sampled points."""
    plan = plan or SamplePlan()
    tols = _tols(tolerances)
    pack = params
    if fuzz:
        pack = _clone_params(params)
        fam = derive_family(params)
        pack.__dict__["_connection"] = fam.base
        pack.__dict__["_family"] = ConnectionFamily(
            base=fam.base,
            hashiguchi=_perturbed(fam.hashiguchi, "hor"),
            chern_rund=fam.chern_rund,
            berwald=fam.berwald,
        )
    points = sample_points(F, plan, plan.process_points, "processes-fuzz" if fuzz else "processes")
    worst = _aggregate(diagram_residuals(pack, F, p) for p in points)
    tol_of = {
        label: "collapse" if label.startswith("collapse:") else "processes"
        for label in worst
    }
    meta = _meta(F, plan, len(points), pack=params.name, fuzz=fuzz)
    return _report(f"processes[{F.name}]", worst, tol_of, tols, meta)


# ---------------------------------------------------------------------------
# case catalog


def check_cases(
    F: FinslerStructure,
    plan: SamplePlan | None = None,
    tolerances: Mapping[str, float] | None = None,
    fuzz: bool = False,
) -> CheckReport:
    """All catalog entries against their closed forms over sampled points.

    Typo-flagged entries are asserted against the regenerated form; the
    literal printed form's residual is carried in the row note so the
    discrepancy stays visible without failing the catalog.
    """
    plan = plan or SamplePlan()
    tols = _tols(tolerances)
    points = sample_points(F, plan, plan.case_points, "cases-fuzz" if fuzz else "cases")
    rows: list[CheckRow] = []
    for entry in catalog():
        cid = entry["id"]
        if fuzz:
            free = default_free_choices(cid, F, seed=plan.seed)
            pack = preset(cid, F, **free)
            residual = 0.0
            for p in points[: min(len(points), 2)]:
                got = deformation_data(pack, F.tower(p, 4)).difference.val.copy()
                got[(0,) * got.ndim] += _FUZZ_SIZE
                want = closed_form_delta(cid, pack, F, p)
                residual = max(residual, _rel(got - want, got, want))
            note = "difference tensor perturbed by 1e-3"
        else:
            result = check_case(
                cid, F, points=points, seed=plan.seed, tolerance=tols["cases"]
            )
            residual = result["residual"]
            note = result["title"]
            if result["typo"]:
                note += (
                    f"; literal printed form residual "
                    f"{result['literal_residual']:.2e} (reported, not asserted)"
                )
            if result["convention"]:
                note += "; depends on the curvature sign convention"
        tol = tols["cases"]
        rows.append(
            CheckRow(
                suite=f"cases[{F.name}]",
                label=f"case-{cid:02d}",
                residual=float(residual),
                tolerance=tol,
                passed=bool(residual < tol),
                note=note,
            )
        )
    meta = _meta(F, plan, len(points), fuzz=fuzz)
    return CheckReport(f"cases[{F.name}]", rows, meta)


# ---------------------------------------------------------------------------
# finite-difference cross-checks


def fd_residuals(
    F: FinslerStructure,
    point: ChartPoint,
    perturbation: float = 0.0,
) -> dict[str, float]:
    """Jet-computed fundamental objects against central finite differences.

    The fundamental tensor and the spray are rebuilt from direct norm
    evaluations alone (second differences of the energy and its closed
    spray formula with a finite-difference metric inverse); the Cartan
    tensor, nonlinear connection and horizontal coefficients difference
    jet-computed lower-order objects at shifted points, anchoring each
    derivative relation in the chain independently.  ``perturbation`` is
    added to one entry of every finite-difference reconstruction (the
    fuzz-injection hook).
    """
    t = F.tower(point, 4)
    n = t.n
    x0 = np.asarray(point.x, dtype=float)
    y0 = np.asarray(point.y, dtype=float)

    def energy(x: np.ndarray, y: np.ndarray) -> float:
        L = float(F.norm.eval(ChartJets.at(x, y, 0)).val)
        return 0.5 * L * L

    def e_x(i: int, h: float) -> np.ndarray:
        out = np.zeros(n)
        out[i] = h
        return out

    h2 = 1e-3
    g_fd = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            g_fd[i, j] = (
                energy(x0, y0 + e_x(i, h2) + e_x(j, h2))
                - energy(x0, y0 + e_x(i, h2) - e_x(j, h2))
                - energy(x0, y0 - e_x(i, h2) + e_x(j, h2))
                + energy(x0, y0 - e_x(i, h2) - e_x(j, h2))
            ) / (4.0 * h2 * h2)

    # spray from its closed formula, all ingredients finite-differenced
    dx_energy = np.array(
        [
            (energy(x0 + e_x(l, 1e-4), y0) - energy(x0 - e_x(l, 1e-4), y0)) / 2e-4
            for l in range(n)
        ]
    )
    mixed = np.zeros((n, n))  # d^2 energy / dy_l dx_m
    for l in range(n):
        for m in range(n):
            mixed[l, m] = (
                energy(x0 + e_x(m, h2), y0 + e_x(l, h2))
                - energy(x0 + e_x(m, h2), y0 - e_x(l, h2))
                - energy(x0 - e_x(m, h2), y0 + e_x(l, h2))
                + energy(x0 - e_x(m, h2), y0 - e_x(l, h2))
            ) / (4.0 * h2 * h2)
    G_fd = 0.5 * np.linalg.inv(g_fd) @ (mixed @ y0 - dx_energy)

    # first differences of jet-computed lower-order objects
    h1 = 1e-4

    def g_at(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return F.tower(ChartPoint(x, y), 2).g.val

    def spray_at(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return F.tower(ChartPoint(x, y), 3).G.val

    T_fd = np.zeros((n, n, n))
    dyg = np.zeros((n, n, n))  # dyg[k, i, j] = d g_ij / dy_k
    for k in range(n):
        dyg[k] = (g_at(x0, y0 + e_x(k, h1)) - g_at(x0, y0 - e_x(k, h1))) / (2 * h1)
        T_fd[:, :, k] = 0.5 * dyg[k]
    N_fd = np.stack(
        [
            (spray_at(x0, y0 + e_x(j, h1)) - spray_at(x0, y0 - e_x(j, h1))) / (2 * h1)
            for j in range(n)
        ],
        axis=1,
    )

    dxg = np.stack(
        [
            (g_at(x0 + e_x(j, h1), y0) - g_at(x0 - e_x(j, h1), y0)) / (2 * h1)
            for j in range(n)
        ]
    )
    N0 = t.N.val
    delta_g = dxg - np.einsum("mj,mlk->jlk", N0, dyg)
    gi = np.linalg.inv(g_at(x0, y0))
    Gamma_fd = 0.5 * np.einsum(
        "il,jlk->ijk",
        gi,
        delta_g + np.einsum("kjl->jlk", delta_g) - np.einsum("ljk->jlk", delta_g),
    )

    if perturbation:
        g_fd[0, 0] += perturbation
        T_fd[0, 0, 0] += perturbation
        G_fd[0] += perturbation
        N_fd[0, 0] += perturbation
        Gamma_fd[0, 0, 0] += perturbation

    return {
        "fd-fundamental-tensor": _rel(g_fd - t.g.val, t.g.val),
        "fd-cartan-tensor": _rel(T_fd - t.T_low.val, t.T_low.val, np.array([1.0])),
        "fd-spray": _rel(G_fd - t.G.val, t.G.val),
        "fd-nonlinear": _rel(N_fd - t.N.val, t.N.val),
        "fd-horizontal": _rel(Gamma_fd - t.Gamma.val, t.Gamma.val),
    }


_FD_TOLS = {
    "fd-fundamental-tensor": "fd",
    "fd-cartan-tensor": "fd",
    "fd-spray": "fd",
    "fd-nonlinear": "fd",
    "fd-horizontal": "fd",
}


def fd_crosscheck(
    F: FinslerStructure,
    plan: SamplePlan | None = None,
    tolerances: Mapping[str, float] | None = None,
    fuzz: bool = False,
) -> CheckReport:
    """Finite-difference cross-checks of the jet chain over sampled points."""
    plan = plan or SamplePlan()
    tols = _tols(tolerances)
    points = sample_points(F, plan, plan.fd_points, "fd-fuzz" if fuzz else "fd")
    size = _FUZZ_SIZE if fuzz else 0.0
    worst = _aggregate(fd_residuals(F, p, perturbation=size) for p in points)
    meta = _meta(F, plan, len(points), fuzz=fuzz)
    return _report(f"fd[{F.name}]", worst, _FD_TOLS, tols, meta)


# ---------------------------------------------------------------------------
# constant-curvature closed forms


def constant_curvature_residuals(
    F: FinslerStructure, point: ChartPoint, perturbation: float = 0.0
) -> dict[str, float]:
    """Closed-form checks on the constant-curvature surface sample.

    ``F`` must be :func:`finslerconn.samples.hyperbolic`: the quadratic
    norm whose metric is ``diag(1, exp(2 x1))``.  Its Christoffel symbols
    have two nonzero families, its sectional curvature is the constant
    ``-1``, and its Ricci trace is minus the metric; all three closed
    forms are compared against the jet-computed metric connection data.
    """
    t = F.tower(point, 5)
    if t.n != 2:
        raise ValueError("the constant-curvature sample is a surface")
    e2 = float(np.exp(2.0 * point.x[0]))
    g_closed = np.diag([1.0, e2])

    Gamma = np.zeros((2, 2, 2))
    Gamma[0, 1, 1] = -e2
    Gamma[1, 0, 1] = Gamma[1, 1, 0] = 1.0
    dGamma = np.zeros((2, 2, 2, 2))  # dGamma[l, i, j, k] = d_l Gamma^i_jk
    dGamma[0, 0, 1, 1] = -2.0 * e2

    # classical curvature from the closed Christoffel symbols
    lead = np.einsum("jikm->imjk", dGamma)
    quad = np.einsum("ijl,lkm->imjk", Gamma, Gamma)
    riemann = (
        lead
        - lead.transpose(0, 1, 3, 2)
        + quad
        - quad.transpose(0, 1, 3, 2)
    )
    ric_closed = -g_closed

    if perturbation:
        g_closed = g_closed.copy()
        g_closed[0, 0] += perturbation
        Gamma = Gamma.copy()
        Gamma[0, 0, 0] += perturbation
        riemann = riemann.copy()
        riemann[(0,) * 4] += perturbation
        ric_closed = ric_closed.copy()
        ric_closed[0, 0] += perturbation

    return {
        "constant-curvature-metric": _rel(t.g.val - g_closed, g_closed),
        "constant-curvature-christoffel": _rel(t.Gamma.val - Gamma, Gamma),
        "constant-curvature-riemann": _rel(
            curvature_h(CARTAN, t).val + riemann, riemann
        ),
        "constant-curvature-ricci": _rel(
            ricci(CARTAN, t).val - ric_closed, ric_closed
        ),
    }


_CONSTANT_TOLS = {
    "constant-curvature-metric": "riemann",
    "constant-curvature-christoffel": "riemann",
    "constant-curvature-riemann": "riemann",
    "constant-curvature-ricci": "riemann",
}


def check_constant_curvature(
    plan: SamplePlan | None = None,
    tolerances: Mapping[str, float] | None = None,
    fuzz: bool = False,
    F: FinslerStructure | None = None,
) -> CheckReport:
    """Closed-form rows on the bundled constant-curvature surface."""
    plan = plan or SamplePlan()
    tols = _tols(tolerances)
    F = hyperbolic() if F is None else F
    label = "constant-curvature-fuzz" if fuzz else "constant-curvature"
    points = sample_points(F, plan, plan.fd_points, label)
    size = _FUZZ_SIZE if fuzz else 0.0
    worst = _aggregate(
        constant_curvature_residuals(F, p, perturbation=size) for p in points
    )
    meta = _meta(F, plan, len(points), fuzz=fuzz)
    return _report("constant-curvature", worst, _CONSTANT_TOLS, tols, meta)


# ---------------------------------------------------------------------------
# the whole battery


def run_all(
    metrics: Sequence[FinslerStructure] | None = None,
    plan: SamplePlan | None = None,
    tolerances: Mapping[str, float] | None = None,
    fuzz: bool = False,
) -> CheckReport:
    """Every suite over every metric, merged into one report.

    ``metrics=None`` uses the bundled desk-scale list; an explicitly empty
    list is a configuration error.  The constant-curvature closed-form
    suite always runs on its own bundled sample.  With ``fuzz=True`` every
    suite receives its injection and the merged report must fail.
    """
    plan = plan or SamplePlan()
    tols = _tols(tolerances)
    if metrics is None:
        metrics = default_metrics()
    metrics = list(metrics)
    if not metrics:
        raise ValueError("metric list is empty; configure at least one norm")

    rows: list[CheckRow] = []
    for F in metrics:
        packs = random_param_sets(F, plan)
        rows += check_theorem(packs, F, plan, tols, fuzz).rows
        rows += check_construction(packs[0], F, plan, tols, fuzz).rows
        rows += check_torsions(packs[0], F, plan, tols, fuzz).rows
        rows += check_curvatures(packs[0], F, plan, tols, fuzz).rows
        rows += check_bianchi(packs[0], F, plan, tols, fuzz).rows
        rows += check_processes(packs[0], F, plan, tols, fuzz).rows
        rows += check_cases(F, plan, tols, fuzz).rows
        rows += fd_crosscheck(F, plan, tols, fuzz).rows
    rows += check_constant_curvature(plan, tols, fuzz).rows

    meta = {
        "seed": plan.seed,
        "metrics": [F.name for F in metrics],
        "plan": plan.to_dict(),
        "tolerances": tols,
        "fuzz": fuzz,
    }
    return CheckReport("all", rows, meta)
