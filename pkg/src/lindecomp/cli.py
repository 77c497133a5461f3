"""Batch harness: simulate -> strip to public view -> attack -> compare.

Subcommands::

    lindecomp list
    lindecomp run --protocol stickel --trials 50 --seed 1 --out report.json
    lindecomp bench --dims 50 100 200 400

Reports are JSON. Per-trial RNG streams are seeded with ``(seed, trial)``,
so a run is reproducible bit for bit; wall-clock times are only written when
``--timing`` is given.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import platform
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, attacks
from .actions import ExplicitLinear, FlatSpace
from .attacks import ATTACKS, CROSS_ATTACKS, PublicData
from .protocols import CATALOG, TAGS, ProtocolInstance, make_params, simulate
from .spanclosure import cubic_bound, span_closure

log = logging.getLogger("lindecomp")


@dataclass
class ExperimentConfig:
    protocol: str
    params: dict = field(default_factory=dict)
    trials: int = 1
    seed: int = 0
    out: str | None = None
    trace: bool = False
    emit_private: bool = False
    transcripts: bool = False
    large: bool = False
    timing: bool = False

    def __post_init__(self):
        if self.protocol not in CATALOG:
            raise ValueError(f"unknown protocol {self.protocol!r}; choose from {', '.join(TAGS)}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.large:
            if self.protocol != "hkks":
                raise ValueError("--large only applies to hkks")
            self.params = {**self.params, "large": True}
        make_params(self.protocol, self.params)  # raises on unknown or malformed overrides


@dataclass
class TrialRecord:
    trial: int
    success: bool
    basis_dim: int = 0
    passes: int = 0
    field_ops: int = 0
    gen_ops: int = 0
    wall_time: float | None = None
    cross_success: bool | None = None
    key: list | None = None
    cross_key: list | None = None
    error: str | None = None


@dataclass
class Report:
    protocol: str
    config: dict
    records: list[TrialRecord]
    environment: dict
    transcripts: list | None = None

    @property
    def successes(self) -> int:
        return sum(r.success for r in self.records)

    @property
    def success_rate(self) -> float:
        return self.successes / len(self.records)

    @property
    def all_succeeded(self) -> bool:
        return all(r.success and r.cross_success is not False for r in self.records)

    def to_json(self, timing: bool = False) -> dict:
        recs = []
        for r in self.records:
            d = dataclasses.asdict(r)
            if not timing:
                d.pop("wall_time")
            recs.append(d)
        doc = {
            "protocol": self.protocol,
            "config": self.config,
            "environment": self.environment,
            "trials": len(self.records),
            "successes": self.successes,
            "success_rate": self.success_rate,
            "records": recs,
        }
        if self.transcripts is not None:
            doc["transcripts"] = self.transcripts
        return doc


def environment_stamp() -> dict:
    return {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def strip_to_public(pub: PublicData) -> PublicData:
    """Round-trip through JSON so the attack sees nothing but public data."""
    return PublicData.from_json(json.loads(json.dumps(pub.to_json())))


def run_trial(tag: str, params: dict, seed: int, trial: int):
    inst = ProtocolInstance(tag, params, (seed, trial))
    tr = simulate(inst)
    pub = strip_to_public(tr.public_view)
    t0 = time.perf_counter()
    rec = ATTACKS[tag](pub)
    wall = time.perf_counter() - t0
    ok = bool(np.array_equal(rec.key, tr.honest_key))
    record = TrialRecord(
        trial=trial,
        success=ok,
        basis_dim=int(rec.stats.get("basis_dim", 0)),
        passes=int(rec.stats.get("passes", 0)),
        field_ops=int(rec.stats.get("field_ops", 0)),
        gen_ops=tr.gen_ops,
        wall_time=wall,
        key=rec.key.tolist(),
    )
    if tag in CROSS_ATTACKS:
        other = CROSS_ATTACKS[tag](pub)
        record.cross_key = other.key.tolist()
        record.cross_success = bool(np.array_equal(other.key, rec.key))
    return record, tr


def run_experiment(cfg: ExperimentConfig) -> Report:
    records = []
    transcripts = [] if (cfg.transcripts or cfg.emit_private) else None
    attacks.TRACE = sys.stderr if cfg.trace else None
    try:
        for i in range(cfg.trials):
            try:
                record, tr = run_trial(cfg.protocol, cfg.params, cfg.seed, i)
                if transcripts is not None:
                    transcripts.append(tr.to_json(emit_private=cfg.emit_private))
            except Exception as exc:  # recorded, not fatal to the batch
                record = TrialRecord(trial=i, success=False, error=f"{type(exc).__name__}: {exc}")
            if cfg.trace:
                print(
                    f"[{cfg.protocol}] trial={i} success={record.success} dim={record.basis_dim} "
                    f"passes={record.passes} ops={record.field_ops}",
                    file=sys.stderr,
                )
            records.append(record)
    finally:
        attacks.TRACE = None
    config = {"protocol": cfg.protocol, "params": cfg.params, "trials": cfg.trials, "seed": cfg.seed}
    report = Report(cfg.protocol, config, records, environment_stamp(), transcripts)
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(report.to_json(cfg.timing), indent=2, sort_keys=True) + "\n")
    return report


def list_protocols() -> str:
    lines = []
    for tag in TAGS:
        info = CATALOG[tag]
        lines.append(f"{tag:<18} {info.name} [{info.family}]")
        for f in dataclasses.fields(info.params):
            lines.append(f"    {f.name} = {f.default!r}")
    return "\n".join(lines)


def closure_benchmark(dims, n_actions: int = 2, n_seeds: int = 1, p: int = 7, seed: int = 0, frontier: bool = False):
    """Span closure under random explicit actions on F_p^d, one row per ``d``."""
    rows = []
    for d in dims:
        rng = np.random.default_rng([seed, d])
        space = FlatSpace.vector_space(p, d)
        U = [ExplicitLinear(rng.integers(0, p, size=(d, d)), space) for _ in range(n_actions)]
        W = rng.integers(0, p, size=(n_seeds, d))
        t0 = time.perf_counter()
        basis = span_closure(W, U, space, frontier=frontier)
        rows.append(
            {
                "d": d,
                "rank": basis.dim,
                "passes": basis.stats.passes,
                "field_ops": basis.stats.field_ops,
                "ops_per_d3": basis.stats.field_ops / d**3,
                "cubic_bound": cubic_bound(d, n_actions, n_seeds),
                "seconds": time.perf_counter() - t0,
            }
        )
    return rows


def loglog_slope(rows) -> float:
    d = np.log([r["d"] for r in rows])
    ops = np.log([r["field_ops"] for r in rows])
    return float(np.polyfit(d, ops, 1)[0])


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"--param expects k=v, got {item!r}")
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lindecomp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list supported protocols and their parameters")

    run = sub.add_parser("run", help="simulate, attack and verify a batch of instances")
    run.add_argument("--protocol", required=True, choices=TAGS)
    run.add_argument("--trials", type=int, default=10)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--param", action="append", default=[], metavar="K=V")
    run.add_argument("--out", default=None, help="write the JSON report here")
    run.add_argument("--trace", action="store_true", help="per-trial and per-basis-vector trace on stderr")
    run.add_argument("--emit-private", action="store_true", help="include transcripts with private views")
    run.add_argument("--transcripts", action="store_true", help="include public transcripts")
    run.add_argument("--large", action="store_true", help="hkks over 3x3 matrices over F_7[A_5]")
    run.add_argument("--timing", action="store_true", help="record wall-clock times")

    bench = sub.add_parser("bench", help="closure op counts against the cubic bound")
    bench.add_argument("--dims", type=int, nargs="+", default=[50, 100, 200, 400])
    bench.add_argument("--actions", type=int, default=2)
    bench.add_argument("--seeds", type=int, default=1)
    bench.add_argument("--p", type=int, default=7)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--frontier", action="store_true")
    bench.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)

    if args.command == "list":
        print(list_protocols())
        return 0

    if args.command == "bench":
        rows = closure_benchmark(args.dims, args.actions, args.seeds, args.p, args.seed, args.frontier)
        print(f"{'d':>6} {'rank':>6} {'passes':>6} {'field_ops':>14} {'ops/d^3':>9} {'ops/bound':>9}")
        for r in rows:
            print(
                f"{r['d']:>6} {r['rank']:>6} {r['passes']:>6} {r['field_ops']:>14} "
                f"{r['ops_per_d3']:>9.3f} {r['field_ops'] / r['cubic_bound']:>9.3f}"
            )
        slope = loglog_slope(rows) if len(rows) > 1 else float("nan")
        print(f"log-log slope: {slope:.3f}")
        if args.out:
            Path(args.out).write_text(json.dumps({"rows": rows, "slope": slope}, indent=2) + "\n")
        return 0

    try:
        cfg = ExperimentConfig(
            protocol=args.protocol,
            params=_parse_params(args.param),
            trials=args.trials,
            seed=args.seed,
            out=args.out,
            trace=args.trace,
            emit_private=args.emit_private,
            transcripts=args.transcripts,
            large=args.large,
            timing=args.timing,
        )
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_experiment(cfg)
    print(f"{cfg.protocol}: {report.successes}/{len(report.records)} keys recovered exactly")
    for r in report.records:
        if r.error:
            log.warning("trial %d failed: %s", r.trial, r.error)
    return 0 if report.all_succeeded else 1


if __name__ == "__main__":
    sys.exit(main())
