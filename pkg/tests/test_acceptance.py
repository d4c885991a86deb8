"""End-to-end acceptance criteria, evaluated at their stated tolerances.

Each preset runs once per session at its full size. Every criterion test
prints a single ``[PASS]``/``[FAIL]`` line and then asserts the verdict.
"""

import time

import pytest

from camw import experiments, verification

pytestmark = pytest.mark.slow

ORACLE_TOL = 1e-9
DISTRIBUTION_TOL = 1e-12
ORACLE_BUDGET_S = 60.0
SECONDS_PER_RUN = 10.0


class PresetRun:
    def __init__(self, name):
        self.spec = experiments.preset_spec(name)
        start = time.perf_counter()
        # Simulation checks conservation every slot and raises on a breach
        self.output = experiments.run_scenarios(self.spec)
        self.seconds = time.perf_counter() - start
        self.runs = len(self.output.results)


@pytest.fixture(scope="session")
def presets():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = PresetRun(name)
        return cache[name]

    get.cache = cache
    return get


def verdict_line(report, verdict):
    report(verdict.line())
    assert verdict.passed, verdict.line()


def test_oracle_equivalence(report):
    start = time.perf_counter()
    suites = [verification.queue1_equivalence(), verification.queue2_equivalence()]
    elapsed = time.perf_counter() - start
    ok = all(s.passed and s.max_error <= ORACLE_TOL for s in suites) and elapsed < ORACLE_BUDGET_S
    detail = "; ".join(s.line()[7:] for s in suites)
    verdict = experiments.Verdict("oracle equivalence", ok, [detail, f"total {elapsed:.1f}s (<{ORACLE_BUDGET_S:g}s)"])
    verdict_line(report, verdict)


def test_distribution_sanity(report):
    suite = verification.distribution_sanity()
    ok = suite.passed and suite.max_error <= DISTRIBUTION_TOL
    verdict_line(report, experiments.Verdict("distribution sanity", ok, [suite.line()[7:]]))


def test_queue1_stability(presets, report):
    run = presets("fig5")
    verdict = experiments.check_fig5(run.output.summary)
    per_run = run.seconds / run.runs
    verdict.details.append(f"{per_run:.2f}s per run")
    verdict.passed &= per_run < SECONDS_PER_RUN
    verdict_line(report, verdict)


def test_queue2_averages(presets, report):
    verdict_line(report, experiments.check_queue2_averages(presets("fig7").output.summary))


def test_queue1_efficiency_vs_load(presets, report):
    verdict_line(report, experiments.check_fig6(presets("fig6").output.summary))


def test_queue2_efficiency_trend(presets, report):
    verdict_line(report, experiments.check_fig8(presets("fig8").output.summary))


def test_determinism_and_conservation(presets, report):
    first = presets("fig7")
    again = experiments.run_scenarios(first.spec)
    same_rows = again.rows_csv().encode() == first.output.rows_csv().encode()
    same_summary = again.summary_csv().encode() == first.output.summary_csv().encode()
    results = [r for run in presets.cache.values() for r in run.output.results]
    conserved = all(
        r.metrics.total_arrivals - r.metrics.total_departures == int(r.metrics.queue_total[-1])
        for r in results
    )
    verdict = experiments.Verdict(
        "determinism and conservation",
        same_rows and same_summary and conserved,
        [f"rerun byte-identical: rows {same_rows}, summary {same_summary}; conservation held in {len(results)} runs"],
    )
    verdict_line(report, verdict)
