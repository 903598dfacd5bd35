"""Command-line front end.

Every subcommand writes deterministic JSON (or CSV where offered) to
``--out``, to ``$HECKE_EXPONENTS_OUT/<subcommand>.<ext>`` when that variable is
set, or to stdout otherwise.  Exit codes: 0 success, 1 verification failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Sequence

import mpmath

from .eisspace import check_sigma_proportionality, eis_coefficients
from .equidist import EquidistConfig, convergence_report
from .hecke import HDivisor, QuadPoint, divisor_tail, exp_sum, hecke_orbit, reduce_gamma0
from .identity import identity_series, verify
from .jsonio import dumps
from .modforms import SquareFreeError, cusp_table, parse_form, validate
from .qseries import PrecisionError, format_rat, parse_rat
from .thetaexp import extract_exponents

__all__ = ["RunConfig", "build_parser", "run", "main"]

OUT_ENV = "HECKE_EXPONENTS_OUT"
DEFAULT_PRECISION = 256
DEFAULT_MMAX = 200
DEFAULT_SIGN = "forced"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation; round-trips through :meth:`to_dict` / :meth:`from_dict`."""

    command: str
    level: int | None = None
    form: str | None = None
    eta: str | None = None
    precision: int = DEFAULT_PRECISION
    mmin: int = 1
    mmax: int = DEFAULT_MMAX
    m: int | None = None
    sign: str = DEFAULT_SIGN
    point: str | None = None
    constants: str | None = None
    out: str | None = None
    csv: str | None = None
    fmt: str = "json"
    workers: int = 1
    only: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["only"] is not None:
            d["only"] = list(d["only"])
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        data = dict(data)
        if data.get("only") is not None:
            data["only"] = tuple(data["only"])
        return cls(**data)

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        data = {f.name: getattr(ns, f.name) for f in fields(cls) if getattr(ns, f.name, None) is not None}
        return cls.from_dict(data)

    def record(self) -> dict:
        """Result-defining fields of this subcommand (no output locations, no parallelism)."""
        d = self.to_dict()
        keep = _RELEVANT.get(self.command, ())
        return {k: d[k] for k in ("command", *keep) if d[k] is not None}


_RELEVANT = {
    "exponents": ("level", "form", "precision"),
    "eisenstein": ("level", "form", "constants", "precision"),
    "verify-identity": ("level", "form", "eta", "mmax", "sign"),
    "hecke-orbit": ("level", "point", "m"),
    "equidist": ("level", "form", "mmin", "mmax"),
    "selftest": ("only",),
}


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------
def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hecke-exponents",
                                description="Product exponents, Eisenstein corrections and Hecke-orbit "
                                            "values of J_{N,1} for forms on Gamma_0(N).")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, level_required=False, form=True):
        sp.add_argument("--level", "-N", type=_positive, required=level_required, help="level N")
        if form:
            sp.add_argument("--form", help="builtin:Delta|E4|E6 or an eta spec 'N; d:r, ...'")
        sp.add_argument("--out", help="output path (default: $%s/<command>.<ext> or stdout)" % OUT_ENV)
        sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    sp = sub.add_parser("exponents", help="product exponents c(n) of a form")
    common(sp)
    sp.add_argument("--precision", "-P", type=_positive, default=DEFAULT_PRECISION,
                    help="number of exponents c(1..P) (default %(default)s)")

    sp = sub.add_parser("eisenstein", help="cusp table and Eisenstein-space solution")
    common(sp, level_required=True)
    sp.add_argument("--constants", help="cusp constants 'd:c, ...' instead of a form")
    sp.add_argument("--precision", "-P", type=_positive, default=DEFAULT_PRECISION)

    sp = sub.add_parser("verify-identity", help="check the closed formula for J-values on the divisor")
    common(sp, level_required=True)
    sp.add_argument("--eta", help="eta spec 'd:r, ...' (alternative to --form)")
    sp.add_argument("--mmax", type=_positive, default=DEFAULT_MMAX)
    sp.add_argument("--sign", choices=("forced", "paper"), default=DEFAULT_SIGN,
                    help="sign convention whose failure sets exit code 1 (default %(default)s)")

    sp = sub.add_parser("hecke-orbit", help="Hecke orbit of a point, reduced to the fundamental domain")
    common(sp, level_required=True, form=False)
    sp.add_argument("--point", required=True, help="'x,y' for x + iy, or 'i', 'rho'")
    sp.add_argument("--m", type=_positive, required=True)

    sp = sub.add_parser("equidist", help="normalised Hecke-orbit statistic and convergence summary")
    common(sp, level_required=True)
    sp.add_argument("--mmin", type=_positive, default=1)
    sp.add_argument("--mmax", type=_positive, default=DEFAULT_MMAX)
    sp.add_argument("--csv", dest="csv", help="also write the per-m CSV here")
    sp.add_argument("--workers", "-j", type=_positive, default=1)

    sp = sub.add_parser("selftest", help="run the acceptance checks")
    sp.add_argument("--only", type=_positive, nargs="+", help="criterion numbers to run")
    sp.add_argument("--workers", "-j", type=_positive, default=1)
    sp.add_argument("--out", help="write the results as JSON here")
    return p


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------
def _emit(text: str, cfg_out: str | None, command: str, ext: str) -> None:
    path = cfg_out
    if path is None and os.environ.get(OUT_ENV):
        path = str(Path(os.environ[OUT_ENV]) / f"{command}.{ext}")
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


def _form(args):
    spec = args.eta or args.form
    if not spec:
        raise UsageError("a form is required (--form or --eta)")
    level = args.level
    if level is None and spec.strip().startswith("builtin:"):
        level = 1
    try:
        f = parse_form(spec, level)
    except SquareFreeError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if hasattr(f, "r"):
        v = validate(f)
        if not v:
            raise UsageError("invalid eta quotient: " + "; ".join(v.diagnostics))
    return f, spec


def _point(text: str):
    t = text.strip().lower()
    if t == "i":
        return QuadPoint.i()
    if t in ("rho", "ρ"):
        return QuadPoint.rho()
    try:
        x, y = (s.strip() for s in t.split(","))
    except ValueError:
        raise UsageError(f"point must be 'x,y', 'i' or 'rho', got {text!r}") from None
    try:
        xr, yr = parse_rat(x), parse_rat(y)
        return QuadPoint(Fraction(xr.numerator, xr.denominator), Fraction(yr.numerator, yr.denominator) ** 2)
    except ValueError:
        pass
    try:
        return complex(float(x), float(y))
    except ValueError:
        raise UsageError(f"cannot parse point {text!r}") from None


def _point_dict(z) -> dict:
    if isinstance(z, QuadPoint):
        return {"re": float(z.x), "im": z.imag, "exact": {"x": format_rat(z.x), "y_squared": format_rat(z.y2)}}
    return {"re": float(z.real), "im": float(z.imag)}


def _parse_constants(text: str) -> dict[int, object]:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            d, c = item.split(":")
            out[int(d)] = parse_rat(c.strip())
        except ValueError:
            raise UsageError(f"malformed cusp constant {item!r}; expected 'd:c'") from None
    return out


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------
def _cmd_exponents(args) -> int:
    f, spec = _form(args)
    P = args.precision
    ex = extract_exponents(f.series(P + 1), f.weight)
    cs = [ex[n] for n in range(1, P + 1)]
    if args.fmt == "csv":
        text = "n,c\n" + "".join(f"{n},{format_rat(c)}\n" for n, c in enumerate(cs, 1))
    else:
        text = dumps({"command": "exponents", "config": args.record(), "form": spec, "N": getattr(f, "N", None), "weight": f.weight,
                      "h": ex.h, "precision": P, "exponents": [_int_or_rat(c) for c in cs]})
    _emit(text, args.out, "exponents", args.fmt)
    return 0


def _int_or_rat(x):
    return int(x) if x.denominator == 1 else format_rat(x)


def _cmd_eisenstein(args) -> int:
    N, P = args.level, args.precision
    if args.constants:
        consts = _parse_constants(args.constants)
        table = cusp_table(N)
        label = None
    else:
        f, label = _form(args)
        table = cusp_table(N, f)
        consts = {r.d: r.ftheta_const for r in table.rows}
    sol = eis_coefficients(N, consts, P)
    rep = check_sigma_proportionality(sol, P - 1)
    if args.fmt == "csv":
        text = table.to_csv()
    else:
        text = dumps({"command": "eisenstein", "config": args.record(), "form": label, "cusps": table.to_dict(),
                      "solution": sol.to_dict(),
                      "sigma_proportional": {"ok": rep.ok, "checked": rep.checked,
                                             "first_violation": rep.first_violation}})
    _emit(text, args.out, "eisenstein", args.fmt)
    return 0 if rep.ok else 1


def _cmd_verify(args) -> int:
    f, spec = _form(args)
    ident = identity_series(f, args.mmax + 1)
    rep = verify(ident, args.mmax)
    if args.fmt == "csv":
        lines = ["m,j_value,lhs,rhs_forced,rhs_paper,match_forced,match_paper"]
        for r in rep.rows:
            d = r.to_dict()
            lines.append(",".join(str(d[k]) for k in ("m", "j_value", "lhs", "rhs_forced", "rhs_paper",
                                                     "match_forced", "match_paper")))
        text = "\n".join(lines) + "\n"
    else:
        body = rep.to_dict()
        body["form"] = spec
        body["selected_sign"] = args.sign
        body["ok"] = rep.ok(args.sign)
        text = dumps({"command": "verify-identity", "config": args.record(), **body})
    _emit(text, args.out, "verify-identity", args.fmt)
    return 0 if rep.ok(args.sign) else 1


def _cmd_orbit(args) -> int:
    z = _point(args.point)
    orbit = hecke_orbit(z, args.m)
    rows = []
    for w in orbit:
        zt, g = reduce_gamma0(args.level, w)
        rows.append({"point": _point_dict(w), "reduced": _point_dict(zt), "witness": list(g)})
    D = HDivisor(tuple((w, 1) for w in orbit), args.level)
    tail = divisor_tail(D, 1)
    e = exp_sum(tail)
    if args.fmt == "csv":
        text = "re,im,reduced_re,reduced_im\n" + "".join(
            f"{r['point']['re']:.17g},{r['point']['im']:.17g},{r['reduced']['re']:.17g},{r['reduced']['im']:.17g}\n"
            for r in rows)
    else:
        text = dumps({"command": "hecke-orbit", "config": args.record(), "N": args.level, "m": args.m, "point": _point_dict(z),
                      "count": len(rows), "orbit": rows, "tail_count": len(tail),
                      "exp_sum_tail": {"re": mpmath.nstr(e.real, 17), "im": mpmath.nstr(e.imag, 17)}})
    _emit(text, args.out, "hecke-orbit", args.fmt)
    return 0


def _cmd_equidist(args) -> int:
    f, spec = _form(args)
    ms = tuple(m for m in range(args.mmin, args.mmax + 1) if gcd(m, args.level) == 1)
    if len(ms) < 10:
        raise UsageError(f"at least 10 admissible m are needed, got {len(ms)}")
    cfg = EquidistConfig(args.level, f, f.h_divisor(), ms, label=spec)
    rep = convergence_report(cfg, workers=args.workers)
    if args.fmt == "csv":
        _emit(rep.to_csv(), args.out, "equidist", "csv")
    else:
        _emit(dumps({"command": "equidist", "config": args.record(), **rep.to_dict()}),
              args.out, "equidist", "json")
    if args.csv:
        _emit(rep.to_csv(), args.csv, "equidist", "csv")
    return 0


def _cmd_selftest(args) -> int:
    from .checks import run_all

    results = run_all(workers=args.workers, only=args.only,
                      echo=lambda line: print(line, flush=True))
    ok = all(r.ok for r in results)
    print(f"{sum(r.ok for r in results)}/{len(results)} criteria passed", flush=True)
    if args.out:
        _emit(dumps({"command": "selftest", "ok": ok, "results": [r.to_dict() for r in results]}),
              args.out, "selftest", "json")
    return 0 if ok else 1


_COMMANDS = {
    "exponents": _cmd_exponents,
    "eisenstein": _cmd_eisenstein,
    "verify-identity": _cmd_verify,
    "hecke-orbit": _cmd_orbit,
    "equidist": _cmd_equidist,
    "selftest": _cmd_selftest,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)
    cfg = RunConfig.from_namespace(ns)
    try:
        return _COMMANDS[cfg.command](cfg)
    except (UsageError, SquareFreeError, PrecisionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
