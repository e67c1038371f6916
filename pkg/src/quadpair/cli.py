"""Command-line front end: experiment sweeps, verification suites, CSV/JSON
emission.

Output is byte-deterministic for a fixed configuration and seed: floats are
printed with 17 significant digits, JSON keys are sorted, CSV uses plain
newlines and UTF-8.  A plain-text config file of ``key = value`` lines (with
``#`` comments) supplies defaults; explicit flags override it.  Results never
depend on the thread setting.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import QuadpairError
from .exactreal import DEFAULT_BITS, eval_with_retry, is_prime, parse_alpha
from . import latcount, modcount, paircorr
from .constructor import construct_alpha, interval, verify_avoidance

SUBCOMMANDS = (
    "paircorr",
    "r0",
    "badset",
    "dispersion",
    "construct",
    "verify-avoidance",
    "expsum",
    "lattice",
    "vcounts",
    "conjecture2",
    "divisor-ap",
    "suite",
)


@dataclass
class ExperimentConfig:
    subcommand: str
    alpha: Optional[str] = None
    n: Optional[int] = None
    x_values: list = field(default_factory=list)
    q_lo: Optional[int] = None
    q_hi: Optional[int] = None
    eta: Fraction = Fraction(1, 200)
    bits: int = DEFAULT_BITS
    seed: int = 0
    threads: Optional[int] = None
    out: Optional[str] = None
    fmt: str = "csv"


@dataclass
class RunReport:
    config: dict
    rows: list
    suite_passed: Optional[bool] = None
    diagnostics: dict = field(default_factory=dict)
    wall_clock: float = 0.0


def fmt_float(v) -> str:
    return f"{float(v):.17g}"


def load_config(path: str) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _write_text(path: Optional[str], text: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_rows(args, header: list[str], rows: list[dict]) -> None:
    if args.format == "json":
        text = json.dumps(rows, sort_keys=True, indent=2) + "\n"
    else:
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(str(row[h]) for h in header))
        text = "\n".join(lines) + "\n"
    _write_text(args.out, text)


def _emit_json(args, payload) -> None:
    _write_text(args.out, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _fractions(text: str) -> list[Fraction]:
    return [Fraction(part) for part in text.split(",") if part != ""]


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None):
        return int(args.threads)
    env = os.environ.get("PAIRCORR_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_paircorr(args) -> int:
    spec = parse_alpha(args.alpha)
    n = int(args.N)
    xs = _fractions(args.X)
    bits = int(args.bits)
    seq = eval_with_retry(spec, lambda a: paircorr.quadratic_sequence(a, n), bits)
    rows = []
    for x in xs:
        res = paircorr.pair_correlation(seq, x)
        r0 = paircorr.weighted_pair_correlation(seq, x).r0 if x > 0 else ""
        rows.append(
            {
                "alpha": args.alpha,
                "N": n,
                "X": fmt_float(x),
                "R": fmt_float(res.r),
                "R0": fmt_float(r0) if r0 != "" else "",
                "method": res.method,
            }
        )
    _emit_rows(args, ["alpha", "N", "X", "R", "R0", "method"], rows)
    return 0


def _cmd_r0(args) -> int:
    spec = parse_alpha(args.alpha)
    n = int(args.N)
    xs = _fractions(args.X)
    seq = eval_with_retry(spec, lambda a: paircorr.quadratic_sequence(a, n), int(args.bits))
    rows = []
    for x in xs:
        rep = paircorr.verify_integral_identities(seq, x)
        rows.append(
            {
                "alpha": args.alpha,
                "N": n,
                "X": fmt_float(x),
                "R0": fmt_float(rep.r0),
                "intL": fmt_float(rep.int_l),
                "intL2": fmt_float(rep.int_l2),
                "coverage_ok": rep.int_l_ok,
                "square_ok": rep.square_ok,
                "square_applicable": rep.square_applicable,
                "additive_ok": rep.additive_ok,
            }
        )
    _emit_rows(
        args,
        ["alpha", "N", "X", "R0", "intL", "intL2", "coverage_ok", "square_ok", "square_applicable", "additive_ok"],
        rows,
    )
    return 0


def _cmd_badset(args) -> int:
    eta = Fraction(args.eta)
    rows = []
    for q in range(int(args.qlo), int(args.qhi) + 1):
        members = modcount.bad_set(q, eta)
        rows.append(
            {
                "q": q,
                "eta": str(eta),
                "card": len(members),
                "members": ";".join(map(str, members)),
            }
        )
    _emit_rows(args, ["q", "eta", "card", "members"], rows)
    return 0


def _cmd_dispersion(args) -> int:
    eta = Fraction(args.eta)
    if args.q:
        moduli = [int(t) for t in args.q.split(",")]
    elif args.qlo and args.qhi:
        moduli = list(range(int(args.qlo), int(args.qhi) + 1))
    else:
        raise ValueError("dispersion needs --q or both --qlo and --qhi")
    n = int(args.N) if args.N else None
    rows = []
    for q in moduli:
        rep = modcount.dispersion_report(q, n=n, eta=eta)
        rows.append(
            {
                "q": q,
                "q1": rep.q1,
                "eta": str(eta),
                "sum_delta_star_sq": fmt_float(rep.sum_delta_sq),
                "bound": fmt_float(rep.bound_value),
                "ratio": fmt_float(rep.ratio),
                "card_bad_set": rep.card_bad_set if rep.card_bad_set is not None else "",
            }
        )
    _emit_rows(
        args, ["q", "q1", "eta", "sum_delta_star_sq", "bound", "ratio", "card_bad_set"], rows
    )
    return 0


def _cmd_construct(args) -> int:
    lo_text, _, hi_text = args.interval.partition(":")
    base = interval(Fraction(lo_text), Fraction(hi_text))
    res = construct_alpha(
        base,
        int(args.qstart),
        int(args.qmax),
        Fraction(args.eta),
        lemma2_constant=Fraction(args.lemma2_constant),
        strict_budget=not args.no_strict_budget,
    )
    _emit_json(args, res.certificate)
    return 0


def _cmd_verify_avoidance(args) -> int:
    if args.alpha:
        value = parse_alpha(args.alpha).value(int(args.bits))
        label = args.alpha
    else:
        value = Fraction(args.x)
        label = args.x
    hits = verify_avoidance(value, int(args.qstart), int(args.qmax), Fraction(args.eta))
    payload = {
        "x": label,
        "q_start": int(args.qstart),
        "q_max": int(args.qmax),
        "eta": str(Fraction(args.eta)),
        "violations": [{"q": b.q, "a": b.a, "class": b.cls} for b in hits],
    }
    _emit_json(args, payload)
    return 0


def _cmd_expsum(args) -> int:
    from .expsum import quad_sum

    b = tuple(int(t) for t in args.b.split(","))
    if len(b) != 4:
        raise ValueError("--b needs four comma-separated integers")
    val = quad_sum(b, int(args.q))
    _emit_json(args, {"re": val.re, "im": val.im, "err": val.err, "method": val.method})
    return 0


def _cmd_lattice(args) -> int:
    beta_spec = parse_alpha(args.beta)
    delta = Fraction(args.delta)
    rows = []
    for m_text in args.M.split(","):
        m = int(m_text)
        beta = beta_spec.value(int(args.bits))
        count = latcount.near_multiple_count(m, beta, delta)
        basis = latcount.pair_lattice(m, beta, delta)
        res = latcount.lattice_square_count(basis)
        rows.append(
            {
                "M": m,
                "beta": args.beta,
                "delta": fmt_float(delta),
                "R": count,
                "lambda1": fmt_float(basis.lambda1),
                "count": res.count,
                "main": fmt_float(res.main),
                "error_term": fmt_float(res.error_term),
            }
        )
    _emit_rows(
        args, ["M", "beta", "delta", "R", "lambda1", "count", "main", "error_term"], rows
    )
    return 0


def _cmd_vcounts(args) -> int:
    alpha = parse_alpha(args.alpha).value(int(args.bits))
    p0 = int(args.P0) if args.P0 else None
    p1 = int(args.P1) if args.P1 else None
    spec = latcount.VCountSpec(int(args.A), int(args.B), Fraction(args.delta), alpha, p0, p1)
    payload = {
        "A": spec.a_bound,
        "B": spec.b_bound,
        "delta": str(Fraction(args.delta)),
        "alpha": args.alpha,
        "V": latcount.v_count(spec),
        "V_star": latcount.v_star_count(spec),
    }
    if p0 is not None:
        bins = latcount.v2_count(spec)
        payload["V1"] = latcount.v1_count(spec)
        payload["V2"] = {str(k): v for k, v in sorted(bins.items())}
        payload["partition_ok"] = payload["V"] == payload["V1"] + sum(bins.values())
    _emit_json(args, payload)
    return 0


def _cmd_conjecture2(args) -> int:
    n = int(args.N)
    q = int(args.q)
    rng = random.Random(int(args.seed))
    rows = []
    for _ in range(int(args.samples)):
        c = rng.randrange(1, q)
        while math.gcd(c, q) != 1:
            c = rng.randrange(1, q)
        res = modcount.hyperbola_ap_count(n, q, c)
        rows.append(
            {
                "N": n,
                "q": q,
                "c": c,
                "count": res.count,
                "expected": fmt_float(res.expected),
                "ratio": fmt_float(res.ratio),
            }
        )
    _emit_rows(args, ["N", "q", "c", "count", "expected", "ratio"], rows)
    return 0


def _cmd_divisor_ap(args) -> int:
    total = modcount.divisor_sum_ap(int(args.M), int(args.q), int(args.s))
    _emit_json(args, {"M": int(args.M), "q": int(args.q), "s": int(args.s), "sum": total})
    return 0


def _cmd_suite(args) -> int:
    from .acceptance import run_suite

    t0 = time.time()
    names = args.only.split(",") if args.only else None
    results = run_suite(level=args.level, names=names)
    all_ok = all(r.passed for r in results)
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {status}  [{r.elapsed:7.2f}s]  {r.details}")
    lines.append(f"suite: {'PASS' if all_ok else 'FAIL'} ({time.time() - t0:.2f}s total)")
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        report = RunReport(
            config={"level": args.level, "threads": _resolve_threads(args)},
            rows=[
                {"name": r.name, "passed": r.passed, "details": r.details, "seconds": r.elapsed}
                for r in results
            ],
            suite_passed=all_ok,
            wall_clock=time.time() - t0,
        )
        _write_text(
            args.out,
            json.dumps(
                {
                    "config": report.config,
                    "criteria": report.rows,
                    "suite_passed": report.suite_passed,
                    "wall_clock": report.wall_clock,
                },
                sort_keys=True,
                indent=2,
            )
            + "\n",
        )
    return 0 if all_ok else 1


def demo_counterexample(q: int, x, seed: int = 0) -> paircorr.PairCorrResult:
    """Pair correlation of a value engineered next to a/q: the pairs summing
    to q land within 1/(4N) of an integer multiple, forcing R >= ~1/2."""
    if not is_prime(q):
        raise ValueError("modulus must be prime")
    x = Fraction(x)
    if not Fraction(1, 4) < x < Fraction(1, 2):
        raise ValueError("window must lie in (1/4, 1/2)")
    rng = random.Random(seed)
    a = rng.randrange(1, q)
    alpha = Fraction(a, q) + Fraction(1, 4 * q ** 3)
    seq = paircorr.quadratic_sequence(alpha, q)
    return paircorr.pair_correlation(seq, x)


# ---------------------------------------------------------------------------
# argument plumbing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value defaults file")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", default="0")
    p.add_argument("--threads", default=None, help="worker count (results never depend on it)")
    p.add_argument("--bits", default=str(DEFAULT_BITS))
    p.add_argument("--eta", default="1/200")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadpair")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("paircorr", help="pair correlation of a quadratic sequence")
    p.add_argument("--alpha", required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--X", required=True, help="comma-separated window values")
    _add_common(p)
    p.set_defaults(handler=_cmd_paircorr)

    p = sub.add_parser("r0", help="weighted correlation and integral identities")
    p.add_argument("--alpha", required=True)
    p.add_argument("--N", required=True)
    p.add_argument("--X", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_r0)

    p = sub.add_parser("badset", help="bad residue sets per modulus")
    p.add_argument("--qlo", required=True)
    p.add_argument("--qhi", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_badset)

    p = sub.add_parser("dispersion", help="dispersion sums vs the benchmark")
    p.add_argument("--q", help="comma-separated moduli")
    p.add_argument("--qlo")
    p.add_argument("--qhi")
    p.add_argument("--N", help="box mode bound (default: running-max mode)")
    _add_common(p)
    p.set_defaults(handler=_cmd_dispersion)

    p = sub.add_parser("construct", help="interval refinement construction")
    p.add_argument("--interval", required=True, help="lo:hi with rational endpoints")
    p.add_argument("--qstart", required=True)
    p.add_argument("--qmax", required=True)
    p.add_argument("--lemma2-constant", dest="lemma2_constant", default="1")
    p.add_argument(
        "--no-strict-budget",
        action="store_true",
        help="proceed past the measure precondition, verifying survival per step",
    )
    _add_common(p)
    p.set_defaults(handler=_cmd_construct)

    p = sub.add_parser("verify-avoidance", help="check a value against the exclusion families")
    p.add_argument("--alpha", help="alpha spec string")
    p.add_argument("--x", help="rational value, e.g. 7/20")
    p.add_argument("--qstart", required=True)
    p.add_argument("--qmax", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_verify_avoidance)

    p = sub.add_parser("expsum", help="quadric exponential sum")
    p.add_argument("--b", required=True, help="four comma-separated integers")
    p.add_argument("--q", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_expsum)

    p = sub.add_parser("lattice", help="near-multiple counts and square sections")
    p.add_argument("--M", required=True, help="comma-separated bounds")
    p.add_argument("--beta", required=True, help="alpha spec string")
    p.add_argument("--delta", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_lattice)

    p = sub.add_parser("vcounts", help="coprime triple box counts")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--P0")
    p.add_argument("--P1")
    _add_common(p)
    p.set_defaults(handler=_cmd_vcounts)

    p = sub.add_parser("conjecture2", help="hyperbola box counts at unit residues")
    p.add_argument("--N", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--samples", default="50")
    _add_common(p)
    p.set_defaults(handler=_cmd_conjecture2)

    p = sub.add_parser("divisor-ap", help="divisor sum in a progression")
    p.add_argument("--M", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--s", required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_divisor_ap)

    p = sub.add_parser("suite", help="run the acceptance criteria")
    p.add_argument("--level", choices=("desk", "quick"), default="desk")
    p.add_argument("--only", help="comma-separated criterion names, e.g. A1,A3")
    _add_common(p)
    p.set_defaults(handler=_cmd_suite)

    return parser


def _apply_config(args) -> None:
    if not getattr(args, "config", None):
        return
    values = load_config(args.config)
    for key, value in values.items():
        if not hasattr(args, key):
            continue
        # flags given on the command line win; argparse filled those already
        if getattr(args, key) in (None, False) or _is_default(args, key):
            setattr(args, key, value)


_DEFAULTS = {"format": "csv", "seed": "0", "bits": str(DEFAULT_BITS), "eta": "1/200", "samples": "50", "level": "desk", "lemma2_constant": "1"}


def _is_default(args, key: str) -> bool:
    return key in _DEFAULTS and getattr(args, key) == _DEFAULTS[key]


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        _apply_config(args)
        return args.handler(args)
    except (QuadpairError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
