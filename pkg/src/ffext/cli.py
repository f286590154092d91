"""Command-line front end.

    ffext field --p 3 --k 2
    ffext variety --q 7 --poly "x1^2 - x2^2"
    ffext extension --poly "x1^2+x2^2-1" --q 5:31 --out circle.csv
    ffext distance --q 25 --size-e 74 --size-f 74 --trials 100
    ffext verify --suite all --q 5,9,13

Exit codes: 0 success, 1 a verification check failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

from . import __version__
from .curves import contains_line, katz_constant, parse_poly, schwartz_zippel_margin, variety_of
from .distance_lab import GENERATORS, ExperimentRow, falconer_experiment, summarize
from .errors import FFExtError
from .extension_lab import ExtensionReport, autocorrelation_profile, extension_report
from .finite_field import (construct_field, field_of_order, gauss_sum, gauss_sum_closed_form,
                           odd_prime_powers, prime_power)
from .verify import SUITES, run_suite, summary

SCHEMA = 1
DEFAULT_SEED = 42


class ConfigError(FFExtError):
    pass


@dataclass
class RunConfig:
    command: str
    qs: list = dc_field(default_factory=list)
    seed: int = DEFAULT_SEED
    fmt: str = "csv"
    out: str | None = None
    timestamp: bool = True
    jobs: int = 1


def parse_q_range(text: str) -> list[int]:
    """``a:b`` gives every odd prime power in [a, b]; ``a,b,c`` is taken literally."""
    text = text.strip()
    if ":" in text:
        lo, _, hi = text.partition(":")
        try:
            lo_i, hi_i = int(lo), int(hi)
        except ValueError as exc:
            raise ConfigError(f"bad q range {text!r}") from exc
        qs = odd_prime_powers(lo_i, hi_i)
        if not qs:
            raise ConfigError(f"no odd prime powers in {text!r}")
        return qs
    try:
        qs = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad q list {text!r}") from exc
    for q in qs:
        pk = prime_power(q)
        if pk is None or pk[0] == 2:
            raise ConfigError(f"q = {q} is not an odd prime power")
    if not qs:
        raise ConfigError("empty q list")
    return qs


def resolve_jobs(requested: int | None) -> int:
    env = os.environ.get("FFEXT_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"FFEXT_JOBS must be an integer, got {env!r}") from exc
    if requested is None:
        return os.cpu_count() or 1
    if requested < 1:
        raise ConfigError("--jobs must be at least 1")
    return requested


def _csv_text(fields, rows, timestamp: bool) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA}\n")
    if timestamp:
        buf.write(f"# generated={_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(records: list[dict], extra: dict | None = None) -> str:
    doc = {"schema": SCHEMA, "rows": records}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2) + "\n"


def _emit(cfg: RunConfig, fields, rows, records, extra=None) -> None:
    outputs = []
    if cfg.fmt in ("csv", "both"):
        outputs.append((".csv", _csv_text(fields, rows, cfg.timestamp)))
    if cfg.fmt in ("json", "both"):
        outputs.append((".json", _json_text(records, extra)))
    if cfg.out is None:
        for _, text in outputs:
            sys.stdout.write(text)
        return
    base, ext = os.path.splitext(cfg.out)
    for suffix, text in outputs:
        path = cfg.out if (cfg.fmt != "both" or ext == suffix) else base + suffix
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- commands ---------------------------------------------------------------------

def cmd_field(args) -> int:
    if args.q is not None:
        f = field_of_order(args.q)
    else:
        f = construct_field(args.p, args.k)
    direct, closed = gauss_sum(f), gauss_sum_closed_form(f)
    info = {
        "p": f.p,
        "k": f.k,
        "q": f.q,
        "modulus": f.modulus_text(),
        "generator": int(f.generator),
        "gauss_sum_direct": [direct.real, direct.imag],
        "gauss_sum_closed_form": [closed.real, closed.imag],
        "gauss_sum_error": abs(direct - closed),
    }
    if args.format == "json":
        print(json.dumps(info, indent=2))
    else:
        print(f"F_{f.q} = F_{f.p}[x]/({info['modulus']})")
        print(f"G1 direct      = {_fmt_complex(direct)}")
        print(f"G1 closed form = {_fmt_complex(closed)}")
        print(f"|difference|   = {info['gauss_sum_error']:.3e}")
    return 0


def _fmt_complex(z: complex) -> str:
    re_, im = round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0
    if im == 0:
        return f"{re_:.10g}"
    if re_ == 0:
        return f"{im:.10g}i"
    return f"{re_:.10g} {'+' if im >= 0 else '-'} {abs(im):.10g}i"


def cmd_variety(args) -> int:
    f = field_of_order(args.q)
    poly = parse_poly(args.poly, f)
    v = variety_of(poly)
    witness = contains_line(poly)
    info = {
        "q": f.q,
        "poly": str(poly),
        "cardinality": v.cardinality,
        "size_over_q": v.cardinality / f.q,
        "contains_line": witness is not None,
        "line_witness": None if witness is None else witness.describe(f),
        "schwartz_zippel_margin": schwartz_zippel_margin(v),
    }
    if v.cardinality:
        prof = autocorrelation_profile(v)
        info.update(
            katz_constant=katz_constant(v),
            autocorr_max=prof.max_count,
            autocorr_threshold=prof.threshold,
            exceptional_points=len(prof.exceptional),
            autocorr_max_regular=prof.max_regular,
        )
    if args.format == "json":
        print(json.dumps(info, indent=2))
    else:
        for k, val in info.items():
            print(f"{k}: {val}")
    return 0


def _extension_item(item):
    poly_text, q, p_exp, r_exp, restarts, seed = item
    return extension_report(parse_poly(poly_text, field_of_order(q)), p_exp, r_exp, restarts, seed)


def cmd_extension(args, cfg: RunConfig) -> int:
    items = [(args.poly, q, args.p_exp, args.r_exp, args.restarts, cfg.seed) for q in cfg.qs]
    # parse up front so bad input exits 2 before any work
    for q in cfg.qs:
        parse_poly(args.poly, field_of_order(q))
    if cfg.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(_extension_item, items))
    else:
        reports = [_extension_item(it) for it in items]
    reports.sort(key=lambda r: r.q)
    _emit(cfg, ExtensionReport.CSV_FIELDS, [r.csv_row() for r in reports], [r.to_dict() for r in reports])
    return 0


def cmd_distance(args, cfg: RunConfig) -> int:
    for g in args.generator:
        if g not in GENERATORS:
            raise ConfigError(f"unknown generator {g!r}; choose from {sorted(GENERATORS)}")
    rows: list[ExperimentRow] = []
    for q in cfg.qs:
        if args.density is not None:
            if not 0 < args.density <= 1:
                raise ConfigError("--density must lie in (0, 1]")
            size_e = size_f = max(1, round(args.density * q * q))
        else:
            if args.size_e is None:
                raise ConfigError("give --size-e/--size-f or --density")
            size_e = args.size_e
            size_f = args.size_f if args.size_f is not None else args.size_e
        rows.extend(falconer_experiment(q, size_e, size_f, args.trials, cfg.seed, tuple(args.generator)))
    rows.sort(key=lambda r: (r.q, r.generator, r.trial))
    _emit(cfg, ExperimentRow.CSV_FIELDS, [r.csv_row() for r in rows], [r.to_dict() for r in rows],
          extra={"summary": summarize(rows)})
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    checks = run_suite(args.suite, cfg.qs, args.tol)
    doc = summary(checks)
    text = json.dumps(doc, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for c in checks:
        if not c.passed:
            print(f"FAIL {c.name} q={c.q} measured={c.measured:.3e} bound={c.bound:.3e}", file=sys.stderr)
    return 0 if doc["pass"] else 1


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ffext", description="Finite-field extension and distance experiments.")
    ap.add_argument("--version", action="version", version=f"ffext {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, default_fmt="csv"):
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--out", default=None, help="output path (stdout if omitted)")
        sp.add_argument("--format", choices=("csv", "json", "both"), default=default_fmt)
        sp.add_argument("--no-timestamp", action="store_true", help="omit the timestamp header line")
        sp.add_argument("--jobs", type=int, default=None, help="worker processes (env FFEXT_JOBS overrides)")

    sp = sub.add_parser("field", help="field construction facts and Gauss sums")
    sp.add_argument("--p", type=int)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--q", type=int)
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("variety", help="statistics of one curve")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--poly", required=True)
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("extension", help="R*(p -> r) estimates over a q sweep")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--q", required=True, help="a:b range or comma list")
    sp.add_argument("--p-exp", type=float, default=2.0)
    sp.add_argument("--r-exp", type=float, default=4.0)
    sp.add_argument("--restarts", type=int, default=32)
    common(sp)

    sp = sub.add_parser("distance", help="distance-set experiment")
    sp.add_argument("--q", required=True, help="a:b range or comma list")
    sp.add_argument("--size-e", type=int)
    sp.add_argument("--size-f", type=int)
    sp.add_argument("--density", type=float)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--generator", nargs="+", default=["uniform"])
    common(sp)

    sp = sub.add_parser("verify", help="run invariant suites")
    sp.add_argument("--suite", choices=SUITES + ("all",), default="all")
    sp.add_argument("--q", default="5,9,13", help="a:b range or comma list")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--out", default=None)
    sp.add_argument("--jobs", type=int, default=None)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "field":
            if (args.p is None) == (args.q is None):
                raise ConfigError("give exactly one of --p or --q")
            return cmd_field(args)
        if args.command == "variety":
            return cmd_variety(args)
        cfg = RunConfig(
            command=args.command,
            qs=parse_q_range(args.q),
            seed=getattr(args, "seed", DEFAULT_SEED),
            fmt=getattr(args, "format", "json"),
            out=args.out,
            timestamp=not getattr(args, "no_timestamp", False),
            jobs=resolve_jobs(args.jobs),
        )
        if args.command == "extension":
            return cmd_extension(args, cfg)
        if args.command == "distance":
            return cmd_distance(args, cfg)
        return cmd_verify(args, cfg)
    except FFExtError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
