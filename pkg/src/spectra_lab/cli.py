"""spectra-lab command line: one command, one computation, one JSON report.

Every report carries the command, the map document, all parameters, the
result, wall time and the package version. Output is canonical JSON (sorted
keys, shortest round-trip floats, rationals as strings). Exit codes: 0 ok,
2 invalid input, 3 budget exceeded, 4 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .errors import BudgetExceeded, InternalAssertion, InvalidInput, SpectraError
from .rational_map import RationalMap, parse_normalize

SCHEMA_VERSION = 1


# -- map documents ---------------------------------------------------------------------------

def _parse_rational(tok) -> Fraction:
    if isinstance(tok, bool) or not isinstance(tok, (str, int)):
        raise InvalidInput(f"coefficient {tok!r} must be an integer or a 'p/q' string")
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"cannot parse coefficient {tok!r}") from None


def parse_map_document(doc) -> RationalMap:
    """{"num": [...], "den": [...]}, ascending degree, exact rationals."""
    if not isinstance(doc, dict) or set(doc) - {"num", "den", "name"} or not {"num", "den"} <= set(doc):
        raise InvalidInput('map document must be an object with keys "num" and "den"')
    num, den = doc["num"], doc["den"]
    if not isinstance(num, list) or not isinstance(den, list) or not num or not den:
        raise InvalidInput('"num" and "den" must be non-empty arrays')
    return parse_normalize([_parse_rational(t) for t in num], [_parse_rational(t) for t in den])


def load_map(path: str) -> tuple:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InvalidInput(f"cannot read map file {path!r}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"map file is not valid JSON: {exc.msg}") from None
    return doc, parse_map_document(doc)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, allow_nan=False, ensure_ascii=True, indent=None,
                      separators=(",", ":"))


# -- commands ----------------------------------------------------------------------------------

def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidInput(msg)


def run_spectrum(f: RationalMap, args) -> dict:
    from .dynatomic import galois_classes, length_spectrum
    from .rog import class_norm

    _require(args.period >= 1, "period must be >= 1")
    _require(args.precision >= 53, "precision must be >= 53 bits")
    classes = galois_classes(f, args.period, exact_only=args.exact_only)
    ls = length_spectrum(f, args.period, args.precision)
    return {
        "classes": [dict(c.to_json(), norm=str(class_norm(c.minpoly))) for c in classes],
        "lengths": ls.to_json(),
    }


def run_rank(f: RationalMap, args) -> dict:
    from .pcf import rank_growth

    _require(args.max_period >= 1, "max period must be >= 1")
    rg = rank_growth(f, args.max_period)
    return {"dims": rg.dims}


def run_sieve(f: RationalMap, args) -> dict:
    from .sieve import sieve

    _require(args.prime_min <= args.prime_max, "empty prime window")
    _require(args.jobs >= 1, "jobs must be >= 1")
    _require(args.ext_degree in (1, 2), "extension degree must be 1 or 2")
    return sieve(f, args.prime_min, args.prime_max, args.ext_degree, jobs=args.jobs).to_json()


def run_certify(f: RationalMap, args) -> dict:
    from .rog import independence_certificate, rank, verify_upper_triangle

    _require(args.target_dim >= 1, "target dimension must be >= 1")
    cert = independence_certificate(f, args.target_dim, args.prime_max, args.max_period,
                                    kmax=args.ext_degree)
    ok, _ = verify_upper_triangle(cert)  # recomputed from the rows before emission
    if ok and rank([cv.vector for cv, _ in cert.rows]) != len(cert.rows):  # pragma: no cover
        raise InternalAssertion("certificate rows are dependent")
    out = cert.to_json()
    if cert.achieved_dim < args.target_dim:
        raise _PartialResult(out, BudgetExceeded(
            f"budget exceeded: achieved dimension {cert.achieved_dim} < target {args.target_dim}"))
    return out


def run_lyapunov(f: RationalMap, args) -> dict:
    from .numeric import lyapunov_estimate

    _require(args.samples >= 1 and args.burn >= 1, "samples and burn-in must be >= 1")
    return lyapunov_estimate(f, args.samples, args.burn, args.seed).to_json()


def run_pcf(f: RationalMap, args) -> dict:
    from .pcf import classify

    return classify(f, args.step_budget, args.height_budget_bits, args.rank_periods).to_json()


def run_equidist(f: RationalMap, args) -> dict:
    from .numeric import equidist_gap

    _require(args.period >= 1, "period must be >= 1")
    _require(args.samples >= 1 and args.burn >= 1, "samples and burn-in must be >= 1")
    return equidist_gap(f, args.period, args.fn, args.samples, args.seed, args.burn).to_json()


class _PartialResult(Exception):
    """A result worth printing that still ends with a nonzero exit code."""

    def __init__(self, result, error: SpectraError):
        super().__init__(str(error))
        self.result = result
        self.error = error


COMMANDS = {
    "spectrum": run_spectrum,
    "rank": run_rank,
    "sieve": run_sieve,
    "certify": run_certify,
    "lyapunov": run_lyapunov,
    "pcf": run_pcf,
    "equidist": run_equidist,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spectra-lab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--map", required=True, help="map document (JSON file, or - for stdin)")
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        return p

    p = cmd("spectrum", "multiplier classes and length spectrum for one period")
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--exact-only", action="store_true", help="classes of exact period only")
    p.add_argument("--precision", type=int, default=53, help="bits for the length values")

    p = cmd("rank", "rank of norm vectors for periods 1..N")
    p.add_argument("--max-period", type=int, required=True)

    p = cmd("sieve", "prime hits for wandering critical points")
    p.add_argument("--prime-min", type=int, required=True)
    p.add_argument("--prime-max", type=int, required=True)
    p.add_argument("--ext-degree", type=int, default=2)
    p.add_argument("--jobs", type=int, default=1)

    p = cmd("certify", "upper-triangle independence certificate")
    p.add_argument("--target-dim", type=int, required=True)
    p.add_argument("--prime-max", type=int, default=100)
    p.add_argument("--max-period", type=int, default=4)
    p.add_argument("--ext-degree", type=int, default=2)

    p = cmd("lyapunov", "Lyapunov exponent by backward-orbit sampling")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--burn", type=int, default=50)
    p.add_argument("--seed", type=int, required=True)

    p = cmd("pcf", "critical orbit closure and verdict")
    p.add_argument("--step-budget", type=int, default=64)
    p.add_argument("--height-budget-bits", type=int, default=4096)
    p.add_argument("--rank-periods", type=int, default=3)

    p = cmd("equidist", "periodic-point average vs maximal-entropy measure")
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--fn", required=True, help="test function id (const, coord1, coord2, coord3, coord1sq)")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--burn", type=int, default=50)
    return ap


def _params(args) -> dict:
    skip = {"command", "map", "output"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(args: argparse.Namespace) -> tuple:
    """Run parsed arguments; returns (exit_code, report or None, error message or None)."""
    report = {"command": args.command, "params": _params(args), "version": __version__,
              "schema_version": SCHEMA_VERSION}
    t0 = time.perf_counter()
    try:
        doc, f = load_map(args.map)
        report["map"] = {"num": [str(_parse_rational(t)) for t in doc["num"]],
                         "den": [str(_parse_rational(t)) for t in doc["den"]]}
        report["result"] = COMMANDS[args.command](f, args)
        code, err = 0, None
    except _PartialResult as exc:
        report["result"] = exc.result
        code, err = exc.error.exit_code, str(exc.error)
    except SpectraError as exc:
        return exc.exit_code, None, str(exc)
    report["timing_ms"] = round((time.perf_counter() - t0) * 1000.0, 3)
    if err:
        report["error"] = err
    return code, report, err


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help/--version, 2 for usage errors
        return int(exc.code or 0)
    try:
        code, report, err = run(args)
    except Exception as exc:  # anything unexpected maps to 4, never to a stray exit code
        code, report, err = 4, None, f"internal error: {type(exc).__name__}: {exc}"
    if report is not None:
        text = canonical_json(report)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    if err:
        print(canonical_json({"error": err, "exit_code": code}), file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
