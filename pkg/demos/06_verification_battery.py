"""Run the seeded verification battery and inspect its report.

The battery draws deterministic parameter packs and chart points, runs
every suite (defining conditions, construction identities, torsion and
curvature closed forms, differential identities, process diagram, case
catalog, finite-difference and closed-form oracles), and returns a
report whose JSON payload is byte-identical across runs at a fixed seed.
A fuzz mode injects a deliberate defect into every suite's subject and
must flip every suite to failing -- the control that proves the checks
can actually see the objects they assert about.
"""

from __future__ import annotations

import argparse

from finslerconn.samples import euclidean, hyperbolic, randers
from finslerconn.verify import SamplePlan, run_all


def quick_plan(seed: int) -> SamplePlan:
    return SamplePlan(
        seed=seed, param_sets=2, theorem_points=6, construction_points=4,
        torsion_points=4, curvature_points=3, bianchi_points=2,
        process_points=3, case_points=1, fd_points=2,
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument(
        "--full", action="store_true",
        help="default-scale plan (~13 s) instead of the quick one",
    )
    args = parser.parse_args(argv)

    metrics = [euclidean(2), hyperbolic(), randers(0.5)]
    plan = SamplePlan(seed=args.seed) if args.full else quick_plan(args.seed)

    report = run_all(metrics=metrics, plan=plan)
    suites: dict[str, tuple[int, float]] = {}
    for row in report.rows:
        count, worst = suites.get(row.suite, (0, 0.0))
        suites[row.suite] = (count + 1, max(worst, row.residual))
    print(f"{'suite':30s} {'rows':>5} {'worst residual':>15}")
    for suite, (count, worst) in suites.items():
        print(f"{suite:30s} {count:>5} {worst:>15.3e}")
    print(f"\n{report.summary()}")
    print(f"payload digest: {report.digest()}")

    again = run_all(metrics=metrics, plan=plan)
    print(f"rerun digest:   {again.digest()} "
          f"({'identical' if again.digest() == report.digest() else 'DIFFERS'})")

    fuzzed = run_all(metrics=metrics, plan=plan, fuzz=True)
    broken = {r.suite for r in fuzzed.failures()}
    print(f"\nfuzz control: {len(fuzzed.failures())} rows fail across "
          f"{len(broken)} suite instances (must be every suite)")
    ok = (
        report.passed
        and again.digest() == report.digest()
        and not fuzzed.passed
    )
    print("battery green, deterministic, and fuzz-sensitive" if ok
          else "PROBLEM -- see above")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
