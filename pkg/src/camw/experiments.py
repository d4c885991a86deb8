"""Scenario configuration, seeded replication sweeps, CSV output and acceptance checks."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import os
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from scipy import stats

from camw.domain import PHASES, QueueModel, Scheduler, SimConfig, TieBreak
from camw.simulator import Metrics, Simulation

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "CAMW_OUTPUT_DIR"

ROW_COLUMNS = (
    "scheduler",
    "model",
    "rho",
    "lambda1",
    "lambda2",
    "n",
    "seed",
    "slot",
    "mean_queue",
    "total_queue",
    "cum_arrivals",
    "cum_departures",
    "efficiency",
    "blocking_events",
)

SUMMARY_COLUMNS = (
    "preset",
    "scheduler",
    "model",
    "rho",
    "lambda1",
    "lambda2",
    "n",
    "replications",
    "mean_queue",
    "mean_queue_std",
    "final_queue",
    "final_queue_std",
    "efficiency",
    "efficiency_std",
    "blocking_events",
)

TRACE_COLUMNS = (
    "slot",
    "phase",
    "q_NS",
    "q_SN",
    "q_EW",
    "q_WE",
    "dep_NS",
    "dep_SN",
    "dep_EW",
    "dep_WE",
    "blocked_NS",
    "blocked_SN",
    "blocked_EW",
    "blocked_WE",
)

# total arrival rate per approach that the phase structure can serve at best
APPROACH_CAPACITY = 0.5
LOAD_GRID = tuple(round(0.05 * k, 2) for k in range(1, 11))

PRESETS: Dict[str, dict] = {
    "fig5": {
        "model": "QueueI",
        "lambda1": 0.18,
        "lambda2": 0.12,
        "n": 2,
        "horizon": 10_000,
        "rhos": [0.4, 0.7, 1.0],
        "schedulers": ["CAMW", "MaxWeight"],
        "replications": 10,
    },
    "fig6": {
        "model": "QueueI",
        "n": 2,
        "horizon": 10_000,
        "rhos": [0.1, 0.4, 0.7, 1.0],
        "loads": list(LOAD_GRID),
        "class_ratio": 1.5,
        "schedulers": ["CAMW", "MaxWeight"],
        "replications": 3,
    },
    "fig7": {
        "model": "QueueII",
        "lambda1": 0.2,
        "lambda2": 0.2,
        "n": 2,
        "horizon": 10_000,
        "rhos": [0.1, 0.9],
        "schedulers": ["CAMW", "MaxWeight"],
        "replications": 10,
    },
    "fig8": {
        "model": "QueueII",
        "n": 2,
        "horizon": 10_000,
        "rhos": [0.1, 0.4, 0.7, 1.0],
        "loads": list(LOAD_GRID),
        "class_ratio": 1.0,
        "schedulers": ["CAMW", "MaxWeight"],
        "replications": 3,
    },
}

CONFIG_KEYS = {
    "name",
    "preset",
    "model",
    "lambda1",
    "lambda2",
    "rho",
    "rhos",
    "loads",
    "class_ratio",
    "n",
    "horizon",
    "seed",
    "scheduler",
    "schedulers",
    "tie_break",
    "prior",
    "replications",
    "report_interval",
    "out",
    "learning_inference",
    "physical_absorption",
    "fixed_cycle",
}


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending field."""


@dataclass(frozen=True)
class RunKey:
    scheduler: Scheduler
    rho: float
    lambda1: float
    lambda2: float
    replicate: int
    seed: int


@dataclass(frozen=True)
class ScenarioSpec:
    base: SimConfig
    name: str = "scenario"
    rhos: Tuple[float, ...] = (1.0,)
    loads: Optional[Tuple[float, ...]] = None
    class_ratio: float = 1.0
    schedulers: Tuple[Scheduler, ...] = (Scheduler.CAMW,)
    replications: int = 1
    report_interval: int = 100
    out: Optional[str] = None

    def class_rates(self) -> List[Tuple[float, float]]:
        if self.loads is None:
            return [(self.base.lambda1, self.base.lambda2)]
        rates = []
        for load in self.loads:
            lambda2 = load / (1.0 + self.class_ratio)
            rates.append((load - lambda2, lambda2))
        return rates

    def runs(self) -> List[Tuple[RunKey, SimConfig]]:
        """Cartesian product of sweep axes, schedulers and replicates, in a stable order."""
        out = []
        for lambda1, lambda2 in self.class_rates():
            for rho in self.rhos:
                for rep in range(self.replications):
                    seed = derive_seed(self.base.seed, rho, lambda1, lambda2, rep)
                    for sched in self.schedulers:
                        cfg = replace(
                            self.base, rho=rho, lambda1=lambda1, lambda2=lambda2, scheduler=sched, seed=seed
                        )
                        out.append((RunKey(sched, rho, lambda1, lambda2, rep, seed), cfg))
        return out


def derive_seed(base_seed: int, rho: float, lambda1: float, lambda2: float, replicate: int) -> int:
    """Stable 63-bit run seed from the base seed, sweep coordinates and replicate index.

    Schedulers are deliberately left out so that they compete on common
    random numbers.
    """
    key = f"{base_seed}|{rho:.6g}|{lambda1:.6g}|{lambda2:.6g}|{replicate}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") >> 1


def _prob(data: dict, key: str, default=None) -> float:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{key}': expected a number, got {value!r}")
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"field '{key}': probability {value} outside [0, 1]")
    return float(value)


def _positive_int(data: dict, key: str, default: int, minimum: int = 1) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"field '{key}': expected an integer >= {minimum}, got {value!r}")
    return value


def _enum(cls, data: dict, key: str, default):
    value = data.get(key, default)
    try:
        return cls(value)
    except ValueError:
        choices = ", ".join(e.value for e in cls)
        raise ConfigError(f"field '{key}': {value!r} is not one of {choices}") from None


def spec_from_dict(data: dict) -> ScenarioSpec:
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    merged: dict = {}
    preset = data.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"field 'preset': unknown preset {preset!r} (choose from {', '.join(PRESETS)})")
        merged.update(PRESETS[preset])
        merged["name"] = preset
    merged.update(data)

    model = _enum(QueueModel, merged, "model", "QueueI")
    n = _positive_int(merged, "n", 2)
    horizon = _positive_int(merged, "horizon", 10_000, minimum=0)
    seed = merged.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"field 'seed': expected a 64-bit non-negative integer, got {seed!r}")
    tie_break = _enum(TieBreak, merged, "tie_break", "LowestPhaseIndex")

    loads = None
    class_ratio = 1.0
    if "loads" in merged:
        if not isinstance(merged["loads"], list) or not merged["loads"]:
            raise ConfigError("field 'loads': expected a non-empty list of total arrival rates")
        loads = tuple(_prob({"loads": v}, "loads") for v in merged["loads"])
        ratio = merged.get("class_ratio", 1.0)
        if isinstance(ratio, bool) or not isinstance(ratio, (int, float)) or ratio < 0:
            raise ConfigError(f"field 'class_ratio': expected a non-negative number, got {ratio!r}")
        class_ratio = float(ratio)
        lambda1 = loads[0] * class_ratio / (1.0 + class_ratio)
        lambda2 = loads[0] - lambda1
    else:
        if "lambda1" not in merged or "lambda2" not in merged:
            raise ConfigError("fields 'lambda1' and 'lambda2' are required unless 'loads' is given")
        lambda1 = _prob(merged, "lambda1")
        lambda2 = _prob(merged, "lambda2")
        if lambda1 + lambda2 > 1.0 + 1e-12:
            raise ConfigError(f"fields 'lambda1'/'lambda2': λ1+λ2 exceeds 1 ({lambda1} + {lambda2})")

    if "rhos" in merged and "rho" in data and "rhos" not in data:
        merged.pop("rhos")  # an explicit rho narrows a preset sweep
    if "rhos" in merged:
        if not isinstance(merged["rhos"], list) or not merged["rhos"]:
            raise ConfigError("field 'rhos': expected a non-empty list")
        rhos = tuple(_prob({"rhos": v}, "rhos") for v in merged["rhos"])
    else:
        rhos = (_prob(merged, "rho", 1.0),)

    if "schedulers" in merged and "scheduler" in data and "schedulers" not in data:
        merged.pop("schedulers")
    if "schedulers" in merged:
        if not isinstance(merged["schedulers"], list) or not merged["schedulers"]:
            raise ConfigError("field 'schedulers': expected a non-empty list")
        schedulers = tuple(_enum(Scheduler, {"schedulers": v}, "schedulers", None) for v in merged["schedulers"])
    else:
        schedulers = (_enum(Scheduler, merged, "scheduler", "CAMW"),)

    prior = None
    if merged.get("prior") is not None:
        raw = merged["prior"]
        if not isinstance(raw, list) or len(raw) != 2:
            raise ConfigError("field 'prior': expected [p1, p2]")
        p1, p2 = (_prob({"prior": v}, "prior") for v in raw)
        if abs(p1 + p2 - 1.0) > 1e-9:
            raise ConfigError("field 'prior': p1 + p2 must equal 1")
        prior = (p1, p2)

    cycle = merged.get("fixed_cycle", [p.id for p in PHASES])
    if not isinstance(cycle, list) or not cycle or any(
        isinstance(c, bool) or not isinstance(c, int) or not 1 <= c <= len(PHASES) for c in cycle
    ):
        raise ConfigError(f"field 'fixed_cycle': expected a non-empty list of phase ids 1..{len(PHASES)}")

    for flag in ("learning_inference", "physical_absorption"):
        if flag in merged and not isinstance(merged[flag], bool):
            raise ConfigError(f"field '{flag}': expected true or false")

    base = SimConfig(
        model=model,
        rho=rhos[0],
        lambda1=lambda1,
        lambda2=lambda2,
        n=n,
        horizon=horizon,
        seed=seed,
        scheduler=schedulers[0],
        tie_break=tie_break,
        prior_override=prior,
        learning_inference=merged.get("learning_inference", True),
        physical_absorption=merged.get("physical_absorption", False),
        fixed_cycle=tuple(cycle),
    )
    out = merged.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("field 'out': expected a path string")
    return ScenarioSpec(
        base=base,
        name=str(merged.get("name", "scenario")),
        rhos=rhos,
        loads=loads,
        class_ratio=class_ratio,
        schedulers=schedulers,
        replications=_positive_int(merged, "replications", 1),
        report_interval=_positive_int(merged, "report_interval", 100),
        out=out,
    )


def parse_config(text: str, **overrides) -> ScenarioSpec:
    """Parse JSON scenario text; keyword ``overrides`` win over the file (``None`` is ignored)."""
    if text.strip():
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError("line 1: top-level value must be an object")
    else:
        data = {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return spec_from_dict(data)


def preset_spec(name: str, **overrides) -> ScenarioSpec:
    return parse_config("", preset=name, **overrides)


def fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.6g}"
    return str(value)


@dataclass
class RunResult:
    key: RunKey
    config: SimConfig
    metrics: Metrics

    def rows(self, interval: int) -> List[dict]:
        m = self.metrics
        slots = list(range(interval, m.horizon + 1, interval))
        if not slots or slots[-1] != m.horizon:
            slots.append(m.horizon)
        out = []
        for slot in slots:
            if slot == 0:
                total = arrivals = departures = blocking = 0
            else:
                t = slot - 1
                total = int(m.queue_total[t])
                arrivals = int(m.cum_arrivals[t])
                departures = int(m.cum_departures[t])
                blocking = int(m.cum_blocking[t])
            out.append(
                {
                    "scheduler": self.config.scheduler.value,
                    "model": self.config.model.value,
                    "rho": self.config.rho,
                    "lambda1": self.config.lambda1,
                    "lambda2": self.config.lambda2,
                    "n": self.config.n,
                    "seed": self.config.seed,
                    "slot": slot,
                    "mean_queue": total / 4,
                    "total_queue": total,
                    "cum_arrivals": arrivals,
                    "cum_departures": departures,
                    "efficiency": departures / arrivals if arrivals else 1.0,
                    "blocking_events": blocking,
                }
            )
        return out


def _mean_std(values: Sequence[float]) -> Tuple[float, float]:
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else math.nan
    return mean, std


def summarize(results: Iterable[RunResult], preset: str = "") -> List[dict]:
    """Aggregate replicates per (scheduler, rho, lambda1, lambda2); order follows sorted keys."""
    groups: Dict[tuple, List[RunResult]] = {}
    for r in results:
        c = r.config
        key = (c.model.value, c.lambda1 + c.lambda2, c.lambda1, c.rho, c.scheduler.value, c.lambda2, c.n)
        groups.setdefault(key, []).append(r)
    summary = []
    for key in sorted(groups):
        model, _, lambda1, rho, sched, lambda2, n = key
        group = sorted(groups[key], key=lambda r: r.key.replicate)
        mq, mq_sd = _mean_std([r.metrics.average_queue for r in group])
        fq, fq_sd = _mean_std([r.metrics.final_queue for r in group])
        eff, eff_sd = _mean_std([r.metrics.efficiency for r in group])
        summary.append(
            {
                "preset": preset,
                "scheduler": sched,
                "model": model,
                "rho": rho,
                "lambda1": lambda1,
                "lambda2": lambda2,
                "n": n,
                "replications": len(group),
                "mean_queue": mq,
                "mean_queue_std": mq_sd,
                "final_queue": fq,
                "final_queue_std": fq_sd,
                "efficiency": eff,
                "efficiency_std": eff_sd,
                "blocking_events": statistics.fmean([r.metrics.blocking_events for r in group]),
            }
        )
    return summary


def render_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buffer.getvalue()


def write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write output {path}: {exc.strerror or exc}") from exc


def trace_csv(result: RunResult) -> str:
    rows = []
    for rec in result.metrics.trace or []:
        row = {"slot": rec.slot, "phase": rec.phase}
        for k, name in enumerate(("NS", "SN", "EW", "WE")):
            row[f"q_{name}"] = rec.queues[k]
            row[f"dep_{name}"] = rec.departures[k]
            row[f"blocked_{name}"] = rec.blocked[k]
        rows.append(row)
    return render_csv(rows, TRACE_COLUMNS)


def default_output(spec: ScenarioSpec) -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "results")) / f"{spec.name}.csv"


@dataclass
class ScenarioOutput:
    spec: ScenarioSpec
    results: List[RunResult]
    rows: List[dict] = field(default_factory=list)
    summary: List[dict] = field(default_factory=list)

    def rows_csv(self) -> str:
        return render_csv(self.rows, ROW_COLUMNS)

    def summary_csv(self) -> str:
        return render_csv(self.summary, SUMMARY_COLUMNS)


def run_scenarios(
    spec: ScenarioSpec,
    out: Optional[Path] = None,
    trace: bool = False,
    write: bool = False,
) -> ScenarioOutput:
    """Run every scenario of ``spec``; rows are ordered by scenario key, not completion.

    With ``write`` the run rows go to ``out`` (or the default output path),
    the summary next to it as ``<stem>_summary.csv`` and, with ``trace``,
    one per-slot trace per run under ``<stem>_traces/``.
    """
    results = []
    for key, cfg in spec.runs():
        metrics = Simulation(cfg, trace=trace).run()
        results.append(RunResult(key, cfg, metrics))
        logger.info(
            "%s rho=%g lambda=(%.4g, %.4g) rep=%d: mean queue %.4g, efficiency %.4g",
            cfg.scheduler.value, cfg.rho, cfg.lambda1, cfg.lambda2, key.replicate,
            metrics.average_queue, metrics.efficiency,
        )
    output = ScenarioOutput(spec, results)
    for r in results:
        output.rows.extend(r.rows(spec.report_interval))
    output.summary = summarize(results, preset=spec.name)
    if write:
        path = Path(out) if out is not None else Path(spec.out) if spec.out else default_output(spec)
        write_text(path, output.rows_csv())
        write_text(path.with_name(f"{path.stem}_summary.csv"), output.summary_csv())
        if trace:
            trace_dir = path.with_name(f"{path.stem}_traces")
            for r in results:
                name = f"{r.config.scheduler.value}_rho{fmt(r.config.rho)}_l{fmt(r.config.lambda1 + r.config.lambda2)}_rep{r.key.replicate}.csv"
                write_text(trace_dir / name, trace_csv(r))
    return output


def read_summary(path) -> List[dict]:
    """Load a summary CSV written by :func:`run_scenarios`."""
    numeric = {"rho", "lambda1", "lambda2", "mean_queue", "mean_queue_std", "final_queue",
               "final_queue_std", "efficiency", "efficiency_std", "blocking_events"}
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for raw in csv.DictReader(fh):
            row = dict(raw)
            for col in numeric:
                row[col] = float(row[col]) if row.get(col, "") != "" else math.nan
            row["n"] = int(row["n"])
            row["replications"] = int(row["replications"])
            rows.append(row)
    return rows


# --- acceptance -----------------------------------------------------------

REFERENCE_QUEUE2 = {("MaxWeight", 0.1): 10.6601, ("CAMW", 0.1): 9.0236, ("CAMW", 0.9): 4.3873}


@dataclass
class Verdict:
    name: str
    passed: bool
    details: List[str] = field(default_factory=list)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}" + (
            ": " + "; ".join(self.details) if self.details else ""
        )


class MissingPresetData(LookupError):
    pass


def _select(summaries: Sequence[dict], preset: str, **where) -> List[dict]:
    rows = [
        r for r in summaries
        if r["preset"] == preset and all(math.isclose(float(r[k]), v) if isinstance(v, float) else r[k] == v
                                         for k, v in where.items())
    ]
    if not rows:
        raise MissingPresetData(f"no summary rows for preset {preset!r} with {where}")
    return rows


def _one(summaries, preset, **where) -> dict:
    return _select(summaries, preset, **where)[0]


def _load(row: dict) -> float:
    return round(row["lambda1"] + row["lambda2"], 9)


def check_fig5(summaries: Sequence[dict]) -> Verdict:
    v = Verdict("fig5: Queue I stability", True)
    get = lambda sched, rho: _one(summaries, "fig5", scheduler=sched, rho=rho)
    for rho in (1.0, 0.7, 0.4):
        for sched in ("CAMW", "MaxWeight"):
            if get(sched, rho)["replications"] < 10:
                v.passed = False
                v.details.append(f"{sched} rho={rho}: fewer than 10 seeds")
    c, m = get("CAMW", 1.0), get("MaxWeight", 1.0)
    rel = abs(c["mean_queue"] - m["mean_queue"]) / max(c["mean_queue"], m["mean_queue"])
    ok = c["final_queue"] < 20 and m["final_queue"] < 20 and rel <= 0.25
    v.details.append(
        f"rho=1.0 final CAMW {c['final_queue']:.2f} MW {m['final_queue']:.2f} (<20), "
        f"mean gap {rel:.1%} (<=25%)"
    )
    c7, m7 = get("CAMW", 0.7), get("MaxWeight", 0.7)
    ok7 = c7["final_queue"] < 20 and m7["final_queue"] > 5 * c7["final_queue"]
    v.details.append(f"rho=0.7 final CAMW {c7['final_queue']:.2f} (<20), MW {m7['final_queue']:.1f} (>5x)")
    c4, m4 = get("CAMW", 0.4), get("MaxWeight", 0.4)
    ok4 = c4["final_queue"] > 50 and m4["final_queue"] > 50
    v.details.append(f"rho=0.4 final CAMW {c4['final_queue']:.1f} MW {m4['final_queue']:.1f} (>50)")
    v.passed = v.passed and ok and ok7 and ok4
    return v


def check_queue2_averages(summaries: Sequence[dict]) -> Verdict:
    v = Verdict("fig7: Queue II average queue sizes", True)
    got = {}
    for (sched, rho), target in REFERENCE_QUEUE2.items():
        row = _one(summaries, "fig7", scheduler=sched, rho=rho)
        if row["replications"] < 10:
            v.passed = False
            v.details.append(f"{sched} rho={rho}: fewer than 10 seeds")
        got[(sched, rho)] = row["mean_queue"]
        within = abs(row["mean_queue"] - target) <= 0.25 * target
        v.passed &= within
        v.details.append(f"{sched} rho={rho} {row['mean_queue']:.3f} vs {target} ({'ok' if within else 'out of ±25%'})")
    mw9 = _one(summaries, "fig7", scheduler="MaxWeight", rho=0.9)["mean_queue"]
    orderings = (
        got[("CAMW", 0.1)] < got[("MaxWeight", 0.1)]
        and got[("CAMW", 0.9)] < mw9
        and got[("CAMW", 0.9)] < got[("CAMW", 0.1)]
    )
    v.details.append(f"orderings {'hold' if orderings else 'violated'}")
    v.passed &= orderings
    return v


def check_fig6(summaries: Sequence[dict]) -> Verdict:
    v = Verdict("fig6: Queue I efficiency vs load", True)
    loads = sorted({_load(r) for r in _select(summaries, "fig6")})
    for load in loads:
        c = [r for r in _select(summaries, "fig6", scheduler="CAMW", rho=1.0) if _load(r) == load][0]
        m = [r for r in _select(summaries, "fig6", scheduler="MaxWeight", rho=1.0) if _load(r) == load][0]
        gap = abs(c["efficiency"] - m["efficiency"])
        if gap > 0.03:
            v.passed = False
            v.details.append(f"rho=1.0 load {load:g}: gap {gap:.3f} > 0.03")
    v.details.append(f"rho=1.0 agreement checked at {len(loads)} loads")
    top = max(loads)
    for rho in (0.4, 0.7):
        for load in loads:
            if load <= APPROACH_CAPACITY / 2:
                continue
            c = [r for r in _select(summaries, "fig6", scheduler="CAMW", rho=rho) if _load(r) == load][0]
            m = [r for r in _select(summaries, "fig6", scheduler="MaxWeight", rho=rho) if _load(r) == load][0]
            if not m["efficiency"] < c["efficiency"]:
                v.passed = False
                v.details.append(f"rho={rho} load {load:g}: MW {m['efficiency']:.3f} not below CAMW {c['efficiency']:.3f}")
            if load == top:
                gap = c["efficiency"] - m["efficiency"]
                v.details.append(f"rho={rho} gap at load {top:g}: {gap:.3f} (>=0.2)")
                if gap < 0.2:
                    v.passed = False
    return v


def check_fig8(summaries: Sequence[dict]) -> Verdict:
    v = Verdict("fig8: Queue II efficiency trend", True)
    loads = sorted({_load(r) for r in _select(summaries, "fig8")})
    rhos = sorted({r["rho"] for r in _select(summaries, "fig8")})
    top = max(loads)

    def eff(sched, rho, load):
        return [r for r in _select(summaries, "fig8", scheduler=sched, rho=rho) if _load(r) == load][0]["efficiency"]

    trend = [eff("CAMW", rho, top) for rho in rhos]
    rho_stat = stats.spearmanr(rhos, trend).statistic if len(set(trend)) > 1 else 0.0
    v.details.append(f"CAMW efficiency at load {top:g} over rho {rhos}: {[round(x, 4) for x in trend]}, spearman {rho_stat:.2f}")
    if not rho_stat > 0:
        v.passed = False
    spread = max(max(eff("MaxWeight", r, load) for r in rhos) - min(eff("MaxWeight", r, load) for r in rhos) for load in loads)
    v.details.append(f"MW spread over rho {spread:.4f} (<=0.02)")
    if spread > 0.02:
        v.passed = False
    best = max(
        (eff("CAMW", r, load) - eff("MaxWeight", r, load)) / eff("MaxWeight", r, load)
        for r in rhos for load in loads
    )
    v.details.append(f"peak relative improvement {best:.1%} (>=10%)")
    if best < 0.10:
        v.passed = False
    return v


SUMMARY_CHECKS = (check_fig5, check_queue2_averages, check_fig6, check_fig8)


def check_acceptance(summaries: Sequence[dict], oracle_reports: Optional[Sequence] = None) -> List[Verdict]:
    """Evaluate the acceptance criteria that summaries and oracle reports can decide.

    Raises :class:`MissingPresetData` when a required preset is absent.
    """
    verdicts = []
    for report in oracle_reports or ():
        verdicts.append(Verdict(report.name, report.passed, [report.line()]))
    for check in SUMMARY_CHECKS:
        verdicts.append(check(summaries))
    return verdicts
