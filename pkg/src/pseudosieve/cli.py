"""Command-line front end: search, verify, oracle, analyze, serve.

Runs in-process by default. With --server URL (or PSEUDOSIEVE_SERVER set)
the data subcommands become thin HTTP clients of a running service, keeping
flags and output identical either way. Progress goes to stderr, results to
stdout, usage errors exit nonzero without side effects.
"""

import argparse
import os
import sys
import time
from decimal import Decimal, InvalidOperation
from pathlib import Path

from .analysis import (
    BRUTE_FORCE_BOUND_LIMIT,
    brute_force_min,
    bundled_table,
    conjecture_ratio,
    crossover_table,
    load_table_file,
    table_stats,
)
from .errors import PseudosieveError
from .search import build_search_config, minima_by_level, run_search, verify_value
from .wheel import CUBE, MODES, SQUARE, parse_moduli_config

POLL_SECONDS = 0.25


def parse_exact_int(text: str) -> int:
    """Integer parser admitting scientific notation with exact value.

    "2e11" and "7.5e24" are integers and accepted; "1.23e1" is 12.3 and
    rejected, as is anything non-numeric.
    """
    text = text.strip()
    try:
        return int(text, 10)
    except ValueError:
        pass
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not value.is_finite() or value != value.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an exact integer: {text!r}")
    return int(value)


def _env_workers() -> int | None:
    raw = os.environ.get("PSEUDOSIEVE_WORKERS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        return None
    return n if n >= 1 else None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pseudosieve",
        description="Search for pseudosquares and pseudocubes with doubly-focused enumeration.",
    )
    parser.add_argument(
        "--server",
        default=os.environ.get("PSEUDOSIEVE_SERVER"),
        metavar="URL",
        help="run against a pseudosieve service instead of in-process "
        "(default from PSEUDOSIEVE_SERVER)",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_search = sub.add_parser("search", help="run a windowed search")
    p_search.add_argument("--mode", required=True, choices=MODES)
    p_search.add_argument("--pmax", required=True, type=parse_exact_int, help="prime level")
    p_search.add_argument("--from", dest="x_lo", required=True, type=parse_exact_int)
    p_search.add_argument("--to", dest="x_hi", required=True, type=parse_exact_int)
    p_search.add_argument("--workers", type=int, default=None)
    p_search.add_argument("--checkpoint", metavar="PATH")
    p_search.add_argument("--resume", action="store_true")
    p_search.add_argument("--output", metavar="DIR")
    p_search.add_argument(
        "--moduli",
        default="auto",
        metavar="FILE",
        help="'auto' (default), 'production', or a moduli config file",
    )
    p_search.add_argument("--block-cap", dest="block_cap", type=parse_exact_int, default=None)

    p_verify = sub.add_parser("verify", help="test one value at a prime level")
    p_verify.add_argument("--mode", required=True, choices=MODES)
    p_verify.add_argument("--value", required=True, type=parse_exact_int)
    p_verify.add_argument("--pmax", required=True, type=parse_exact_int)

    p_oracle = sub.add_parser("oracle", help="brute-force minimum up to a bound")
    p_oracle.add_argument("--mode", required=True, choices=MODES)
    p_oracle.add_argument("--pmax", required=True, type=parse_exact_int)
    p_oracle.add_argument(
        "--bound", required=True, type=parse_exact_int, help=f"scan limit, <= {BRUTE_FORCE_BOUND_LIMIT}"
    )

    p_analyze = sub.add_parser("analyze", help="table statistics and crossover ratios")
    p_analyze.add_argument("--table", required=True, metavar="FILE")
    p_analyze.add_argument("--crossover", action="store_true")
    p_analyze.add_argument(
        "--crossover-table",
        dest="crossover_table",
        metavar="FILE",
        help="table of the other kind (default: the bundled one)",
    )

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


# ---------------------------------------------------------------------------
# in-process handlers


def _load_moduli(selector: str):
    if selector in ("auto", "production"):
        return selector
    return parse_moduli_config(Path(selector).read_text(encoding="utf-8"))


def _print_search_results(candidates, p_max: int) -> None:
    if candidates:
        print(f"minimum {min(c.x for c in candidates)}")
        for level, x in minima_by_level(candidates, p_max):
            print(f"level {level} {x}")
    else:
        print("minimum none")
    print(f"found {len(candidates)}")


def _cmd_search(args) -> int:
    workers = args.workers if args.workers is not None else _env_workers() or 1
    kwargs = {}
    if args.block_cap is not None:
        kwargs["block_cap"] = args.block_cap
    config = build_search_config(
        args.mode,
        args.pmax,
        args.x_lo,
        args.x_hi,
        workers=workers,
        moduli=_load_moduli(args.moduli),
        checkpoint_path=args.checkpoint,
        output_dir=args.output,
        **kwargs,
    )

    def progress(done: int, total: int, found: int) -> None:
        print(f"progress: {done}/{total} intervals, {found} candidates", file=sys.stderr, flush=True)

    candidates = run_search(config, resume=args.resume, progress=progress)
    _print_search_results(candidates, args.pmax)
    return 0


def _cmd_verify(args) -> int:
    print("true" if verify_value(args.mode, args.value, args.pmax) else "false")
    return 0


def _cmd_oracle(args) -> int:
    result = brute_force_min(args.mode, args.pmax, args.bound)
    print(result if result is not None else "none")
    return 0


def _format_rows(rows) -> list[str]:
    widths = [max(len(cell) for cell in col) for col in zip(*rows)]
    return ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]


def _cmd_analyze(args) -> int:
    records = load_table_file(args.table)
    rows = [("n", "prime", "L", "c(n)")]
    ratios = []
    for rec in records:
        c = conjecture_ratio(rec)
        ratios.append(c)
        rows.append((str(rec.n), str(rec.prime), str(rec.value), f"{c:.6g}"))
    for line in _format_rows(rows):
        print(line)
    lo, hi, mean = table_stats(ratios)
    print(f"count {len(ratios)} min {lo:.6g} max {hi:.6g} mean {mean:.6g}")

    if args.crossover:
        kind = records[0].kind
        if args.crossover_table:
            other = load_table_file(args.crossover_table)
        else:
            other = bundled_table(CUBE if kind == SQUARE else SQUARE)
        squares = records if kind == SQUARE else other
        cubes = records if kind == CUBE else other
        pairs = crossover_table(squares, cubes)
        if not pairs:
            print("crossover none")
            return 0
        cross_rows = [("n", "ratio")] + [(str(n), f"{r:.6g}") for n, r in pairs]
        for line in _format_rows(cross_rows):
            print(f"crossover {line}")
        lo, hi, mean = table_stats([r for _, r in pairs])
        print(f"crossover count {len(pairs)} min {lo:.6g} max {hi:.6g} mean {mean:.6g}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# thin HTTP client


def _client_search(base: str, args) -> int:
    import httpx

    workers = args.workers if args.workers is not None else _env_workers() or 1
    payload = {
        "mode": args.mode,
        "p_max": args.pmax,
        "x_lo": str(args.x_lo),
        "x_hi": str(args.x_hi),
        "workers": workers,
        "checkpoint_path": args.checkpoint,
        "output_dir": args.output,
        "resume": args.resume,
    }
    if args.moduli in ("auto", "production"):
        payload["moduli"] = args.moduli
    else:
        payload["moduli_text"] = Path(args.moduli).read_text(encoding="utf-8")
    if args.block_cap is not None:
        payload["block_cap"] = args.block_cap
    with httpx.Client(base_url=base, timeout=30.0) as client:
        r = client.post("/search/jobs", json=payload)
        r.raise_for_status()
        job_id = r.json()["job_id"]
        last = None
        while True:
            r = client.get(f"/search/jobs/{job_id}")
            r.raise_for_status()
            js = r.json()
            marker = (js["done"], js["total"], js["found"])
            if js["state"] in ("running", "done") and marker != last and js["total"]:
                print(
                    f"progress: {js['done']}/{js['total']} intervals, {js['found']} candidates",
                    file=sys.stderr,
                    flush=True,
                )
                last = marker
            if js["state"] == "done":
                break
            if js["state"] == "failed":
                print(f"error: {js['error']}", file=sys.stderr)
                return 1
            time.sleep(POLL_SECONDS)
        r = client.get(f"/search/jobs/{job_id}/results")
        r.raise_for_status()
        body = r.json()
    if body["minimum"] is None:
        print("minimum none")
    else:
        print(f"minimum {body['minimum']}")
        for row in body["levels"]:
            print(f"level {row['p']} {row['x']}")
    print(f"found {body['count']}")
    return 0


def _client_verify(base: str, args) -> int:
    import httpx

    r = httpx.post(
        f"{base}/verify",
        json={"mode": args.mode, "value": str(args.value), "p_max": args.pmax},
        timeout=300.0,
    )
    r.raise_for_status()
    print("true" if r.json()["result"] else "false")
    return 0


def _client_oracle(base: str, args) -> int:
    import httpx

    r = httpx.post(
        f"{base}/oracle",
        json={"mode": args.mode, "p_max": args.pmax, "bound": str(args.bound)},
        timeout=600.0,
    )
    r.raise_for_status()
    minimum = r.json()["minimum"]
    print(minimum if minimum is not None else "none")
    return 0


def _client_analyze(base: str, args) -> int:
    import httpx

    payload = {
        "table_text": Path(args.table).read_text(encoding="utf-8"),
        "crossover": args.crossover,
        "crossover_text": (
            Path(args.crossover_table).read_text(encoding="utf-8")
            if args.crossover_table
            else None
        ),
    }
    r = httpx.post(f"{base}/analyze", json=payload, timeout=300.0)
    r.raise_for_status()
    body = r.json()
    rows = [("n", "prime", "L", "c(n)")] + [
        (str(e["n"]), str(e["prime"]), e["value"], f"{e['ratio']:.6g}") for e in body["rows"]
    ]
    for line in _format_rows(rows):
        print(line)
    s = body["stats"]
    print(f"count {s['count']} min {s['min']:.6g} max {s['max']:.6g} mean {s['mean']:.6g}")
    if args.crossover:
        pairs = body.get("crossover") or []
        if not pairs:
            print("crossover none")
            return 0
        cross_rows = [("n", "ratio")] + [(str(e["n"]), f"{e['ratio']:.6g}") for e in pairs]
        for line in _format_rows(cross_rows):
            print(f"crossover {line}")
        s = body["crossover_stats"]
        print(f"crossover count {s['count']} min {s['min']:.6g} max {s['max']:.6g} mean {s['mean']:.6g}")
    return 0


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.server and args.subcommand in ("search", "verify", "oracle", "analyze"):
            base = args.server.rstrip("/")
            handler = {
                "search": _client_search,
                "verify": _client_verify,
                "oracle": _client_oracle,
                "analyze": _client_analyze,
            }[args.subcommand]
            return handler(base, args)
        handler = {
            "search": _cmd_search,
            "verify": _cmd_verify,
            "oracle": _cmd_oracle,
            "analyze": _cmd_analyze,
            "serve": _cmd_serve,
        }[args.subcommand]
        return handler(args)
    except PseudosieveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
