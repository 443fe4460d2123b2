"""Command-line interface: ``bernrand analyze|audit|partition|verify``.

Machine-readable output goes to stdout; diagnostics go to stderr.

Exit codes: 0 success, 1 a verification check failed, 2 usage, input or
configuration error, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from collections import defaultdict
from fractions import Fraction

from . import __version__
from .bitio import FORMATS, DecodeError, Window, decode
from .codes import ConfigurationError, ResourceError, register_backend
from .config import FileConfig, load_config, parse_bool
from .deficiency import DeficiencyReport, Config, engine, tenths_grid
from .measures import BitString, CountClass, MeasureSpec
from .oracle import SweepSpec, run_validity_sweep
from .partition import build_partition, cell_of, std_estimate
from .randtests import COUNT, COUNTCLASS, get_test

SCHEMA_VERSION = 1
IMPOSSIBLE_LABEL = "impossible-under-P"
AUDIT_WINDOW = Window(1024, 512)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3

# flag name -> (builtin default, converter); None values fall back to the config file, then here
_SETTINGS = {
    "code": ("markov-index", str),
    "count-q": ("cell", str),
    "grid": ("arcsine", str),
    "precision-bits": (64, int),
    "anchor": (Fraction(1, 2), Fraction),
    "fine-step": (Fraction(1, 1000), Fraction),
    "tests": (None, str),
    "json": (False, parse_bool),
    "seed": (None, int),
    "threshold": (None, float),
    "format": (None, str),
    "window": (None, Window.parse),
    "p-grid": ("tenths", str),
    "providers": (None, str),
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing


def _global_flags() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    o = g.add_argument_group("global options")
    o.add_argument("--config", metavar="FILE", help="key = value file mirroring these flags")
    o.add_argument("--code", help="code-length provider for the within-class code")
    o.add_argument("--count-q", dest="count_q", help="count distribution r(k): cell, uniform, kt, mix")
    o.add_argument("--tests", help="comma-separated test names")
    o.add_argument("--grid", help="p grid: arcsine, tenths, fine, arcsine+fine")
    o.add_argument("--precision-bits", dest="precision_bits", type=int, help="53 or 64")
    o.add_argument("--anchor", help="weight of the zero test mixed into T (0 disables)")
    o.add_argument("--json", action="store_const", const=True, default=None, help="emit JSON")
    o.add_argument("--seed", type=int, help="seed for sampled runs")
    return g


def build_parser() -> argparse.ArgumentParser:
    g = _global_flags()
    parser = argparse.ArgumentParser(prog="bernrand", description="Randomness deficiency of finite binary sequences.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("analyze", "deficiency report per sequence or window"), ("audit", "analyze with window defaults")):
        a = sub.add_parser(name, parents=[g], help=help_)
        src = a.add_argument_group("input")
        src.add_argument("--bits", action="append", default=[], metavar="01STRING")
        src.add_argument("--hex", action="append", default=[], metavar="HEX")
        src.add_argument("--file", action="append", default=[], metavar="PATH", help="'-' reads stdin")
        a.add_argument("--format", choices=FORMATS, help="decoding for --file (default raw) and inline input")
        a.add_argument("--window", help="LENGTH:STRIDE")
        a.add_argument("--threshold", type=float, help="flag reports with d_bern_grid >= this many bits")

    p = sub.add_parser("partition", parents=[g], help="dump the arcsine partition of 0..N")
    p.add_argument("n", type=int)
    p.add_argument("--cell-of", dest="cell_of", type=int, metavar="K", help="only the cell containing K")

    v = sub.add_parser("verify", parents=[g], help="exact validity sweep with a CHECK ledger")
    mode = v.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--sampled", type=int, metavar="COUNT")
    v.add_argument("--n", required=True, dest="n_range", help="e.g. 1..12, 8,10,12")
    v.add_argument("--p-grid", dest="p_grid", help="'tenths' or comma-separated rationals")
    v.add_argument("--providers", help="comma-separated provider names")
    v.add_argument("--ledger", metavar="FILE", help="write the ledger here instead of stdout")
    return parser


def parse_n_range(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ".." in part:
                lo, hi = (int(v) for v in part.split(".."))
                if lo > hi:
                    raise UsageError(f"empty range {part!r}")
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"bad n range {text!r}") from None
    return tuple(out)


def parse_p_grid(text: str) -> tuple[Fraction, ...]:
    if text == "tenths":
        return tuple(tenths_grid())
    try:
        ps = tuple(Fraction(v.strip()) for v in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad p grid {text!r}") from None
    if any(not 0 <= p <= 1 for p in ps):
        raise UsageError("p grid values must lie in [0, 1]")
    return ps


def _split_names(text: str | None) -> tuple[str, ...] | None:
    if text is None:
        return None
    return tuple(t.strip() for t in text.split(",") if t.strip())


def resolve_settings(args: argparse.Namespace) -> dict:
    """Merge flag values over the config file over built-in defaults."""
    file_cfg = load_config(args.config) if args.config else FileConfig()
    for name, spec in sorted(file_cfg.backends.items()):
        register_backend(name, spec)
    out = {}
    for key, (default, conv) in _SETTINGS.items():
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            out[key] = conv(flag) if isinstance(flag, str) and conv is not str else flag
        elif key in file_cfg.values:
            try:
                out[key] = conv(file_cfg.values[key])
            except (ValueError, ZeroDivisionError):
                raise ConfigurationError(f"bad value for {key}: {file_cfg.values[key]!r}") from None
        else:
            out[key] = default
    return out


def make_config(settings: dict) -> Config:
    return Config(
        count_q=settings["count-q"],
        code=settings["code"],
        grid=settings["grid"],
        anchor=settings["anchor"],
        fine_step=settings["fine-step"],
        precision_bits=settings["precision-bits"],
    )


# ---------------------------------------------------------------------------
# analyze / audit


def _read_source(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def gather_inputs(args, settings) -> list[tuple[str, BitString]]:
    fmt = settings["format"]
    items = []
    for text in args.bits:
        items.append(("bits", decode(text, fmt or "ascii01")))
    for text in args.hex:
        items.append(("hex", decode(text, fmt or "hex")))
    for path in args.file:
        items.append((path, decode(_read_source(path), fmt or "raw")))
    if not items:
        raise UsageError("no input; give --bits, --hex or --file")
    for label, x in items:
        if x.n == 0:
            raise UsageError(f"input {label} decodes to an empty sequence")
    return items


def _json_number(v):
    if isinstance(v, float):
        if v == math.inf:
            return IMPOSSIBLE_LABEL
        if v == -math.inf:
            return "-inf"
        if math.isnan(v):
            return None
    return v


def _test_values(x: BitString, p_hat: float, names: tuple[str, ...]) -> dict:
    out = {}
    for name in names:
        test = get_test(name)
        if test.target_kind == COUNTCLASS:
            value = test(x, CountClass(x.n, x.k))
        elif test.target_kind == COUNT:
            value = test(x.k, MeasureSpec.binomial(x.n, p_hat))
        else:
            value = test(x, MeasureSpec.bernoulli(x.n, p_hat))
        out[name] = _json_number(value)
    return out


def report_record(rep: DeficiencyReport, index: int, source: str, offset: int | None, settings: dict) -> dict:
    rec = {"index": index, "source": source, "offset": offset, "n": rep.x.n, "k": rep.x.k}
    for f in DeficiencyReport.FIELDS:
        rec[f] = _json_number(getattr(rep, f))
    rec["clamped"] = {
        f: _json_number(max(0, getattr(rep, f))) for f in DeficiencyReport.FIELDS if f.startswith("d_")
    }
    rec["p_star"] = _json_number(rep.p_star)
    rec["estimate"] = dict(rep.estimate)
    names = _split_names(settings["tests"])
    if names:
        rec["tests"] = _test_values(rep.x, rep.estimate["p_hat"], names)
    if settings["threshold"] is not None:
        rec["flagged"] = rep.d_bern_grid >= settings["threshold"]
    return rec


def run_reports(units: list[tuple[str, int | None, BitString]], config: Config):
    """Reports in input order; units of equal length share one batched evaluation."""
    by_len: dict[int, list[int]] = defaultdict(list)
    for i, (_, _, x) in enumerate(units):
        by_len[x.n].append(i)
    reports: list[DeficiencyReport | None] = [None] * len(units)
    for n, idx in sorted(by_len.items()):
        for i, rep in zip(idx, engine(n, config).reports([units[i][2] for i in idx])):
            reports[i] = rep
    return reports


def cmd_analyze(args, settings, out, default_window: Window | None = None) -> int:
    config = make_config(settings)
    window = settings["window"] or default_window
    units = []
    for source, x in gather_inputs(args, settings):
        if window is None:
            units.append((source, None, x))
        elif window.length > x.n:
            if settings["window"] is not None:
                raise UsageError(f"window length {window.length} exceeds input length {x.n} ({source})")
            units.append((source, None, x))
        else:
            units.extend((source, start, w) for start, w in window.split(x))
    reports = run_reports(units, config)
    records = [report_record(r, i, s, off, settings) for i, ((s, off, _), r) in enumerate(zip(units, reports))]
    if settings["json"]:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": args.command,
            "config": config.echo(),
            "window": None if window is None else {"length": window.length, "stride": window.stride},
            "reports": records,
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        for rec in records:
            out.write(_text_report(rec))
    return EXIT_OK


def _text_report(rec: dict) -> str:
    head = f"# report {rec['index']} source={rec['source']}"
    if rec["offset"] is not None:
        head += f" offset={rec['offset']}"
    lines = [head, f"n {rec['n']}", f"k {rec['k']}"]
    lines += [f"{f} {rec[f]}" for f in DeficiencyReport.FIELDS]
    lines.append(f"p_star {rec['p_star']}")
    lines += [f"test.{k} {v}" for k, v in rec.get("tests", {}).items()]
    if "flagged" in rec:
        lines.append(f"flagged {str(rec['flagged']).lower()}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# partition


def _ratio(n: int, lo: int, hi: int) -> float | None:
    mid = (lo + hi) / 2
    if mid <= 0 or mid >= n:
        return None
    return (hi - lo + 1) / float(std_estimate(n, mid))


def _partition_rows(n: int):
    part = build_partition(n)
    if not part.lazy:
        yield from part.cell_rows()
        return
    # lazy: derive each cell from consecutive anchors without storing them
    a = part.anchors
    for s in range(len(a)):
        lo = max(math.ceil(a[s]), 0)
        hi = n if s + 1 == len(a) else min(math.ceil(a[s + 1]) - 1, n)
        if lo <= hi:
            yield s, lo, hi


def cmd_partition(args, settings, out) -> int:
    n = args.n
    if not 1 <= n <= 10**9:
        raise UsageError("partition needs 1 <= n <= 10^9")
    part = build_partition(n)
    if args.cell_of is not None:
        if not 0 <= args.cell_of <= n:
            raise UsageError(f"--cell-of must lie in 0..{n}")
        cell = cell_of(part, args.cell_of)
        k = args.cell_of
        ratio = len(cell) / float(std_estimate(n, k)) if 0 < k < n else None
        rows = [(part.anchor_index(k), cell.start, cell.stop - 1, ratio)]
    else:
        rows = ((s, lo, hi, _ratio(n, lo, hi)) for s, lo, hi in _partition_rows(n))
    if settings["json"]:
        cells = [
            {"s_index": s, "lo": lo, "hi": hi, "width": hi - lo + 1, "width_ratio": r} for s, lo, hi, r in rows
        ]
        doc = {"schema_version": SCHEMA_VERSION, "command": "partition", "n": n, "num_cells": part.num_cells, "cells": cells}
        out.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    out.write(f"# n={n} num_cells={part.num_cells}\n")
    out.write("# s_index lo hi width width_ratio\n")
    for s, lo, hi, r in rows:
        out.write(f"{s} {lo} {hi} {hi - lo + 1} {'-' if r is None else f'{r:.6f}'}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args, settings, out) -> int:
    n_range = parse_n_range(args.n_range)
    if args.sampled is not None:
        if settings["seed"] is None:
            raise UsageError("--sampled needs --seed")
        spec = SweepSpec(
            n_range,
            mode="sampled",
            sample_count=args.sampled,
            seed=settings["seed"],
            config=make_config(settings),
        )
    else:
        spec = SweepSpec(
            n_range,
            p_grid=parse_p_grid(settings["p-grid"]),
            providers=_split_names(settings["providers"]),
            tests=_split_names(settings["tests"]),
            seed=settings["seed"],
        )
    ledger = run_validity_sweep(spec)
    if settings["json"]:
        text = json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "command": "verify",
                "header": ledger.header,
                "checks": [c.line() for c in ledger.checks],
                "ok": ledger.ok,
            },
            indent=2,
        ) + "\n"
    else:
        text = ledger.render()
    if args.ledger:
        with open(args.ledger, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    n_fail = len(ledger.failed)
    print(f"bernrand: {len(ledger.checks)} checks, {n_fail} failed", file=sys.stderr)
    return EXIT_OK if ledger.ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = resolve_settings(args)
        if args.command == "analyze":
            return cmd_analyze(args, settings, out)
        if args.command == "audit":
            return cmd_analyze(args, settings, out, default_window=AUDIT_WINDOW)
        if args.command == "partition":
            return cmd_partition(args, settings, out)
        return cmd_verify(args, settings, out)
    except ResourceError as e:
        print(f"bernrand: resource limit: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except DecodeError as e:
        print(f"bernrand: decode error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ConfigurationError, ValueError) as e:
        print(f"bernrand: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
