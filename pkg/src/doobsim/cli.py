"""Command line: ``doobsim verify``, ``doobsim decompose``, ``doobsim list-suites``.

Exit codes: 0 all suites pass, 1 any failure or invalid report, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np

from .core_paths import DomainError, read_path_csv
from .decompositions import decompose
from .random_times import TIMES_CSV_COLUMNS, pseudo_stopping_time

GENERATORS = ("stopped-bm", "gbm", "bessel3", "diffusion", "poisson")
CONFIG_KEYS = ("generator", "n_paths", "step", "horizon", "seed", "suite", "out", "workers",
               "dump_times", "dump_samples")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    generator: str | None = None
    n_paths: int = 100_000
    step: float = 1e-3
    horizon: float | None = None
    seed: int = 42
    suite: list = field(default_factory=list)
    out: str | None = None
    workers: int = 1
    dump_times: str | None = None
    dump_samples: str | None = None

    def validate(self, suites):
        if self.generator is not None and self.generator not in GENERATORS:
            raise UsageError(f"unknown generator {self.generator!r}; choose from {', '.join(GENERATORS)}")
        if not isinstance(self.n_paths, int) or self.n_paths < 1:
            raise UsageError("--n-paths must be a positive integer")
        if not (isinstance(self.step, (int, float)) and math.isfinite(self.step) and self.step > 0):
            raise UsageError("--step must be > 0")
        if self.horizon is not None and not self.horizon > 0:
            raise UsageError("--horizon must be > 0")
        if not isinstance(self.seed, int) or self.seed < 0 or self.seed >= 1 << 64:
            raise UsageError("--seed must be an integer in [0, 2^64)")
        if not isinstance(self.workers, int) or self.workers < 0:
            raise UsageError("--workers must be >= 0")
        names = self.suite or [s.name for s in suites.values()
                               if self.generator is None or self.generator in s.generators]
        unknown = [n for n in names if n not in suites]
        if unknown:
            raise UsageError(f"unknown suite(s): {', '.join(unknown)}; see list-suites")
        for n in names:
            s = suites[n]
            if self.generator is not None and self.generator not in s.generators:
                raise UsageError(f"suite {n} does not run on generator {self.generator}")
            if s.ks and self.n_paths < 1000:
                raise UsageError(f"suite {n} runs a KS test and needs --n-paths >= 1000")
        if not names:
            raise UsageError("no suites selected")
        return names


def _load_config(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a flat JSON object")
    bad = [k for k in data if k not in CONFIG_KEYS]
    if bad:
        raise UsageError(f"unknown config key(s): {', '.join(bad)}")
    return data


def _split_suites(values):
    out = []
    for v in values or []:
        if isinstance(v, str):
            out.extend(x for x in v.split(",") if x)
        else:
            out.append(v)
    return out


def build_run_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        for k, v in _load_config(args.config).items():
            setattr(cfg, k, _split_suites([v] if isinstance(v, str) else v) if k == "suite" else v)
    for k in CONFIG_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            setattr(cfg, k, _split_suites(v) if k == "suite" else v)
    return cfg


def _indexed_name(base: str, name: str, many: bool) -> str:
    if not many:
        return base
    p = FsPath(base)
    return str(p.with_name(f"{p.stem}.{name}{p.suffix}"))


def _write_samples(path, samples: dict):
    cols = list(samples)
    n = len(next(iter(samples.values()))) if samples else 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(["path_id"] + cols) + "\n")
        for i in range(n):
            fh.write(",".join([str(i)] + [repr(float(samples[c][i])) for c in cols]) + "\n")


def _write_times(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=TIMES_CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v)
                        for k, v in r.items()})


def cmd_verify(args) -> int:
    from .suites import SUITES, SuiteConfig

    cfg = build_run_config(args)
    names = cfg.validate(SUITES)
    sc = SuiteConfig(n_paths=cfg.n_paths, seed=cfg.seed, step=float(cfg.step),
                     horizon=cfg.horizon, workers=cfg.workers, generator=cfg.generator)
    reports = []
    many = len(names) > 1
    for name in names:
        res = SUITES[name].run(sc)
        rep = res.report
        reports.append(rep)
        print(f"{rep.status:7s} {name:28s} statistic={rep.statistic:.6g} "
              f"threshold={rep.threshold:.6g} n={rep.n} ({rep.runtime_ms} ms)", flush=True)
        if cfg.out and many:
            with open(_indexed_name(cfg.out, name, True), "w", encoding="utf-8") as fh:
                fh.write(rep.to_json() + "\n")
        if cfg.dump_samples and res.samples:
            _write_samples(_indexed_name(cfg.dump_samples, name, many), res.samples)
        if cfg.dump_times and res.times:
            _write_times(_indexed_name(cfg.dump_times, name, many), res.times)
    all_ok = all(r.status == "PASS" for r in reports)
    if cfg.out:
        summary = {"pass": all_ok, "seed": cfg.seed, "n_paths": cfg.n_paths, "step": cfg.step,
                   "suites": names, "reports": [r.to_dict() for r in reports]}
        if not many:
            summary.update(reports[0].to_dict())
        with open(cfg.out, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if all_ok else 1


def cmd_decompose(args) -> int:
    try:
        path = read_path_csv(args.input)
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    if np.any(path.values <= 0):
        raise UsageError("decompose needs a strictly positive path")
    d = decompose(path)
    out = args.out or str(FsPath(args.input).with_suffix("")) + ".decomposed.csv"
    with open(out, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("t,N,S,Z,M,A\n")
        cols = [d.N.values, d.S.values, d.Z.values, d.M.values, d.A.values]
        for i, t in enumerate(path.times):
            fh.write(",".join(repr(float(v)) for v in [t] + [c[i] for c in cols]) + "\n")
    summary = d.summary()
    rho, r_rho = pseudo_stopping_time(d.N, d.S, summary["g_index"])
    summary.update({"rho_index": rho, "r_rho": r_rho, "output": out})
    summary_path = args.summary or str(FsPath(out).with_suffix(".json"))
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_list_suites(args=None) -> int:
    from .suites import SUITES

    width = max(len(n) for n in SUITES)
    for name in sorted(SUITES):
        print(f"{name:{width}s}  {SUITES[name].citation}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="doobsim", description="Monte Carlo verification of maximal identities "
                "and path decompositions for positive continuous martingales.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--config", help="flat JSON file mirroring the flags")
    v.add_argument("--generator", default=None)
    v.add_argument("--n-paths", dest="n_paths", type=int, default=None)
    v.add_argument("--step", type=float, default=None)
    v.add_argument("--horizon", type=float, default=None)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--suite", action="append", default=None,
                   help="suite name (repeatable or comma separated; default: all)")
    v.add_argument("--out", default=None, help="summary report JSON")
    v.add_argument("--workers", type=int, default=None, help="worker processes (0 = all cores)")
    v.add_argument("--dump-times", dest="dump_times", default=None)
    v.add_argument("--dump-samples", dest="dump_samples", default=None)

    d = sub.add_parser("decompose", help="decompose a path CSV")
    d.add_argument("input")
    d.add_argument("--out", default=None, help="output CSV (t,N,S,Z,M,A)")
    d.add_argument("--summary", default=None, help="summary JSON")

    sub.add_parser("list-suites", help="list the available suites")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "decompose":
            return cmd_decompose(args)
        if args.command == "list-suites":
            return cmd_list_suites(args)
        parser.print_help(sys.stderr)
        return 2
    except (UsageError, DomainError) as exc:
        print(f"doobsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
