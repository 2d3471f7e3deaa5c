"""Command-line front end.

    lvalues zeta job.cfg --precision 12
    lvalues verify --set p=2 --set 'coeffs=["t^3", "1"]'
    lvalues --corpus corpus/ --jobs 4 --out reports/

Configs are flat ``key = value`` files; ``#`` starts a comment.  Reports are
one ``name = value`` line per quantity, series as coefficient lists
``[c0,c1,...]`` of T^0, T^-1, ... and polynomials low degree first.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .basering import max_ideals_up_to, residue_field, ring_make
from .drinfeld import DrinfeldModule, euler_product, exp_series
from .errors import ConfigError, LValueError
from .exactalg import field_make
from .lattice import Lattice, class_module, lattice_index, unit_lattice, verify_main_theorem
from .nuclear import CompactSpace, det_compact, det_finite, lvalue_trace, theta_from_drinfeld
from .series import TruncSeries

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_UNCERTIFIED = 2
EXIT_CONFIG = 64

COMMANDS = ("zeta", "lvalue", "euler", "exp-coeffs", "units", "class-module", "trace-check",
            "primes", "verify")
METHODS = ("trace", "euler")
KEYS = ("command", "p", "e", "extension", "coeffs", "precision", "degree_bound", "method", "terms")


@dataclass(frozen=True)
class JobConfig:
    p: int = 2
    e: int = 1
    extension: str = "none"
    coeffs: tuple[str, ...] = ("1",)
    precision: int = 8
    degree_bound: int | None = None
    method: str = "trace"
    terms: int = 4
    command: str | None = None

    @property
    def D(self) -> int:
        return self.degree_bound if self.degree_bound is not None else self.precision

    def dump(self) -> str:
        lines = []
        if self.command:
            lines.append(f"command = {self.command}")
        lines += [
            f"p = {self.p}",
            f"e = {self.e}",
            f"extension = {self.extension}",
            f"coeffs = {json.dumps(list(self.coeffs))}",
            f"precision = {self.precision}",
            f"degree_bound = {self.D}",
            f"method = {self.method}",
            f"terms = {self.terms}",
        ]
        return "\n".join(lines) + "\n"

    def validate(self) -> "JobConfig":
        if self.command is not None and self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {', '.join(METHODS)}")
        if self.precision < 1:
            raise ConfigError("precision must be >= 1")
        if self.D < 1:
            raise ConfigError("degree_bound must be >= 1")
        if self.terms < 0:
            raise ConfigError("terms must be >= 0")
        return self


def _int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from exc


def apply_setting(cfg: JobConfig, key: str, value: str) -> JobConfig:
    key = key.strip().replace("-", "_")
    value = value.strip()
    if key not in KEYS:
        raise ConfigError(f"unknown key {key!r}")
    if key in ("p", "e", "precision", "terms"):
        return replace(cfg, **{key: _int(key, value)})
    if key == "degree_bound":
        return replace(cfg, degree_bound=_int(key, value))
    if key == "coeffs":
        try:
            items = json.loads(value)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"coeffs must be a JSON list of strings: {exc}") from exc
        if not isinstance(items, list) or not all(isinstance(x, (str, int)) for x in items):
            raise ConfigError("coeffs must be a JSON list of strings")
        return replace(cfg, coeffs=tuple(str(x).strip() for x in items))
    if key == "extension":
        return replace(cfg, extension=value or "none")
    return replace(cfg, **{key: value})


def parse_config(text: str, base: JobConfig | None = None) -> JobConfig:
    cfg = base or JobConfig()
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value'")
        key, value = line.split("=", 1)
        cfg = apply_setting(cfg, key, value)
    return cfg.validate()


# ---------------------------------------------------------------------------
# building blocks


@dataclass
class Report:
    config: JobConfig
    lines: list[tuple[str, str]] = field(default_factory=list)
    verdict: str = "OK"
    code: int = EXIT_OK
    timings: list[tuple[str, float]] = field(default_factory=list)

    def add(self, name: str, value) -> None:
        self.lines.append((name, _fmt(value)))

    def render(self, with_timings: bool = False) -> str:
        out = ["# lvalues report"]
        out += [f"config.{ln}" for ln in self.config.dump().splitlines()]
        out += [f"{k} = {v}" for k, v in self.lines]
        if with_timings:
            out += [f"time.{k} = {v:.3f}" for k, v in self.timings]
        out.append(f"verdict = {self.verdict}")
        return "\n".join(out) + "\n"


def _fmt(value) -> str:
    if isinstance(value, TruncSeries):
        return value.machine()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(str(v) for v in value) + "]"
    return str(value)


def _module(cfg: JobConfig, carlitz: bool = False) -> DrinfeldModule:
    try:
        F = field_make(cfg.p, cfg.e)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    R = ring_make(F, None if cfg.extension in ("none", "") else cfg.extension)
    if carlitz:
        return DrinfeldModule.carlitz(R)
    return DrinfeldModule.parse(R, cfg.coeffs)


def _poly_list(p) -> list[int]:
    return list(p.coeffs)


@contextlib.contextmanager
def _timed(report: Report, name: str):
    t0 = time.perf_counter()
    try:
        yield
    finally:
        report.timings.append((name, time.perf_counter() - t0))


# ---------------------------------------------------------------------------
# commands


def _lvalue(report: Report, E: DrinfeldModule, name: str) -> None:
    cfg = report.config
    N = cfg.precision
    if cfg.method == "euler":
        with _timed(report, "euler"):
            val, diag = euler_product(E, cfg.D, N)
        report.add(name, val)
        report.add(f"{name}.stable_to", diag.stable_to)
        report.add(f"{name}.ideals", diag.ideals)
        report.add(f"{name}.certified", False)
    else:
        with _timed(report, "trace"):
            val = lvalue_trace(E, N)
        report.add(name, val)
        report.add(f"{name}.certified", True)


def cmd_zeta(report: Report) -> None:
    _lvalue(report, _module(report.config, carlitz=True), "zeta")


def cmd_lvalue(report: Report) -> None:
    _lvalue(report, _module(report.config), "lvalue")


def cmd_euler(report: Report) -> None:
    cfg = report.config
    E = _module(cfg)
    with _timed(report, "euler"):
        val, diag = euler_product(E, cfg.D, cfg.precision)
    report.add("euler", val)
    report.add("euler.stable_to", diag.stable_to)
    report.add("euler.ideals", diag.ideals)


def cmd_exp(report: Report) -> None:
    cfg = report.config
    E = _module(cfg)
    s = exp_series(E, cfg.terms, cfg.precision)
    bounds = s.dvals
    for i, e in enumerate(s.e):
        report.add(f"e_{i}", e)
        report.add(f"e_{i}.val_bound", "inf" if bounds[i] == float("inf") else int(bounds[i]))


def cmd_units(report: Report) -> None:
    cfg = report.config
    E = _module(cfg)
    U = unit_lattice(E, cfg.precision)
    idx = lattice_index(Lattice.standard(E.ring), U.lattice, cfg.precision)
    for j, b in enumerate(U.lattice.basis):
        report.add(f"unit_{j}", b)
        report.add(f"unit_{j}.degree", U.degrees[j])
    report.add("index.degree", idx.degree())
    report.add("index", [idx[i] for i in range(idx.lead, idx.lead + cfg.precision)])
    report.add("window", list(U.window))


def cmd_class(report: Report) -> None:
    E = _module(report.config)
    H = class_module(E)
    report.add("dim_h", H.module.dim)
    report.add("size_h", _poly_list(H.size))
    report.add("size_h.text", H.size)
    report.add("radius", H.radius)


def cmd_trace_check(report: Report) -> None:
    cfg = report.config
    E = _module(cfg)
    N = cfg.precision
    F = E.ring.spec
    ops = theta_from_drinfeld(E, N)
    compact = det_compact(ops, CompactSpace(E.ring))
    finite = TruncSeries.one(F, N)
    for m in max_ideals_up_to(E.ring, cfg.D):
        finite = finite * det_finite(ops, residue_field(E.ring, m))
    prod = finite * compact
    agree = next((i for i, c in enumerate(prod.coeffs) if c != (1 if i == 0 else 0)), N)
    report.add("det_compact", compact)
    report.add("det_finite_product", finite)
    report.add("product", prod)
    report.add("stable_to", agree)


def cmd_primes(report: Report) -> None:
    cfg = report.config
    E = _module(cfg)
    ideals = max_ideals_up_to(E.ring, cfg.D)
    report.add("primes", len(ideals))
    for i, m in enumerate(ideals):
        report.add(f"prime_{i}", m)
        report.add(f"prime_{i}.degree", m.deg_k)


def cmd_verify(report: Report) -> None:
    cfg = report.config
    E = _module(cfg)
    with _timed(report, "verify"):
        r = verify_main_theorem(E, cfg.precision)
    report.add("lhs", r.lhs)
    report.add("rhs", r.rhs)
    report.add("index.degree", r.index.degree())
    report.add("index", [r.index[i] for i in range(r.index.lead, r.index.lead + cfg.precision)])
    report.add("size_h", _poly_list(r.size_h))
    report.add("size_h.text", r.size_h)
    report.add("equal", r.equal)
    report.add("quotient_is_poly", r.quotient_is_poly)
    report.add("quotient_matches", r.quotient_matches)
    report.verdict = r.verdict
    report.code = EXIT_OK if r.verdict == "VERIFIED" else EXIT_MISMATCH


DISPATCH = {
    "zeta": cmd_zeta,
    "lvalue": cmd_lvalue,
    "euler": cmd_euler,
    "exp-coeffs": cmd_exp,
    "units": cmd_units,
    "class-module": cmd_class,
    "trace-check": cmd_trace_check,
    "primes": cmd_primes,
    "verify": cmd_verify,
}


def run_job(cfg: JobConfig) -> Report:
    report = Report(cfg)
    if cfg.command is None:
        raise ConfigError("no command given")
    try:
        DISPATCH[cfg.command](report)
    except ConfigError:
        raise
    except LValueError as exc:
        report.add("error", f"{type(exc).__name__}: {exc}")
        report.verdict = "NOT_CERTIFIED"
        report.code = EXIT_UNCERTIFIED
    return report


# ---------------------------------------------------------------------------
# corpus mode


def _corpus_one(path: str, out_dir: str | None, timings: bool) -> tuple[str, int, str]:
    name = Path(path).name
    try:
        cfg = parse_config(Path(path).read_text())
        report = run_job(cfg)
        text, code, verdict = report.render(timings), report.code, report.verdict
    except ConfigError as exc:
        text, code, verdict = f"# lvalues report\nerror = {exc}\nverdict = CONFIG_ERROR\n", EXIT_CONFIG, "CONFIG_ERROR"
    if out_dir:
        Path(out_dir, Path(name).stem + ".report").write_text(text)
    return name, code, verdict


def run_corpus(directory: str, out_dir: str | None, jobs: int, timings: bool = False) -> int:
    files = sorted(str(p) for p in Path(directory).glob("*.cfg"))
    if not files:
        raise ConfigError(f"no *.cfg files in {directory}")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_corpus_one, files, [out_dir] * len(files), [timings] * len(files)))
    else:
        results = [_corpus_one(f, out_dir, timings) for f in files]
    worst = 0
    for name, code, verdict in results:
        print(f"{name}: {verdict}")
        worst = max(worst, code)
    return worst


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lvalues", description="L-values of Drinfeld modules")
    ap.add_argument("command", nargs="?", choices=COMMANDS)
    ap.add_argument("config", nargs="?", help="job configuration file")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override a configuration key (repeatable)")
    ap.add_argument("--precision", type=int, help="number of coefficients N")
    ap.add_argument("--degree-bound", type=int, help="Euler product degree bound D")
    ap.add_argument("--method", choices=METHODS)
    ap.add_argument("--corpus", metavar="DIR", help="run every *.cfg in DIR")
    ap.add_argument("--jobs", type=int, default=1, help="parallel workers in corpus mode")
    ap.add_argument("--out", metavar="PATH", help="report file, or directory in corpus mode")
    ap.add_argument("--timings", action="store_true", help="append wall-clock timings to reports")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.corpus:
            return run_corpus(args.corpus, args.out, max(1, args.jobs), args.timings)
        if not args.command:
            raise ConfigError("a command or --corpus is required")
        cfg = JobConfig()
        if args.config:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                raise ConfigError(str(exc)) from exc
            cfg = parse_config(text)
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            cfg = apply_setting(cfg, *item.split("=", 1))
        if args.precision is not None:
            cfg = replace(cfg, precision=args.precision)
        if args.degree_bound is not None:
            cfg = replace(cfg, degree_bound=args.degree_bound)
        if args.method:
            cfg = replace(cfg, method=args.method)
        cfg = replace(cfg, command=args.command).validate()
        report = run_job(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = report.render(args.timings)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return report.code


if __name__ == "__main__":
    sys.exit(main())
