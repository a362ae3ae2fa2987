"""Command-line interface.

Exit codes: 0 success, 1 verification failure (or undecided), 2 construction
failure, 3 invalid input (including unknown options and unwritable paths).
"""

from __future__ import annotations

import re
import sys
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext
from fractions import Fraction
from typing import Optional, Sequence

import click

from .circle import Angle
from .construction import (
    BuildConfig,
    ConstructionError,
    ConstructionState,
    ExcludedPoint,
    HorizonLimited,
    _dyadic_str,
    build,
    gamma_eval,
    load_state,
    save_state,
)
from .dynamics import f_limit, fm
from .export import FORMATS, ExportError, export_boxes, export_curve, export_map, export_orbit
from .scalar import Scalar
from .verify import SUITES, verify_suite

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONSTRUCTION = 2
EXIT_INPUT = 3

_ANGLE = re.compile(r"^\s*(?:(-?\d+)\*)?\s*(?:([+-]?)\s*([0-9./]+))?\s*$")


class InputError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"not a rational number: {text!r}") from e


def parse_angle(text: str) -> Angle:
    """``3*`` (orbit point), ``-2*+1/1024``, ``0.25`` or ``1/3``; angle brackets are ignored."""
    t = text.strip().strip("<>")
    m = _ANGLE.match(t)
    if not t or m is None or (m.group(1) is None and m.group(3) is None):
        raise InputError(f"cannot parse angle {text!r}")
    k = int(m.group(1)) if m.group(1) is not None else 0
    q = Fraction(0)
    if m.group(3) is not None:
        if m.group(1) is not None and not m.group(2):
            raise InputError(f"cannot parse angle {text!r}: offset needs a sign")
        q = parse_rational(m.group(3))
        if m.group(2) == "-":
            q = -q
    return Angle(k, q)


def _bound(q: Fraction, up: bool, digits: int = 20) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_CEILING if up else ROUND_FLOOR
        return str(Decimal(q.numerator) / Decimal(q.denominator))


def format_value(x: Scalar, digits: int = 20) -> str:
    """Short exact values print exactly; everything else as an outward-rounded interval."""
    if x.is_exact():
        text = _dyadic_str(x.lo)
        if len(text) <= 40:
            return text
    return f"[{_bound(x.lo, False, digits)}, {_bound(x.hi, True, digits)}]"


def _state(path: Optional[str], depth: int) -> ConstructionState:
    if path:
        return load_state(path)
    return build(BuildConfig(depth=depth))


_state_opt = click.option("--state", "state_path", type=click.Path(dir_okay=False), default=None,
                          help="State file written by 'build' (default: build in memory).")
_depth_opt = click.option("--depth", type=click.IntRange(0, 40), default=6, show_default=True,
                          help="Depth used when no state file is given.")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli() -> None:
    """Certified construction of the skew product counterexample."""


@cli.command("build")
@click.option("--depth", type=click.IntRange(0, 40), default=6, show_default=True)
@click.option("--orbit-horizon", type=click.IntRange(2, None), default=None,
              help="Orbit horizon L (default 4*depth, at least depth+2).")
@click.option("--precision-bits", type=click.IntRange(64, 4096), default=192, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the state here.")
def build_cmd(depth: int, orbit_horizon: Optional[int], precision_bits: int, out: Optional[str]) -> None:
    if orbit_horizon is not None and depth > orbit_horizon - 2:
        raise click.BadParameter("the orbit horizon must be at least depth + 2", param_hint="--orbit-horizon")
    st = build(BuildConfig(depth=depth, orbit_horizon=orbit_horizon, precision_bits=precision_bits))
    for lv in st.levels:
        boxes = ", ".join(f"{ell} ({lv.provenance[ell].branch})" if ell in lv.provenance else str(ell)
                          for ell in sorted(lv.boxes))
        click.echo(f"level {lv.j}: n={lv.n} alpha={lv.alpha} delta={lv.delta} boxes {boxes}")
    if out:
        try:
            save_state(st, out)
        except OSError as e:
            raise ExportError(f"cannot write {out}: {e.strerror or e}") from e
        click.echo(f"state written to {out}")


@cli.group("eval")
def eval_group() -> None:
    """Evaluate the curve or a fiber map at a point."""


@eval_group.command("gamma")
@click.option("--level", "-j", type=int, default=None, help="Curve level j (default: the limit curve).")
@click.option("--theta", required=True)
@click.option("--eps", default="1/1024", show_default=True)
@_state_opt
@_depth_opt
def eval_gamma(level: Optional[int], theta: str, eps: str, state_path: Optional[str], depth: int) -> None:
    th = parse_angle(theta)
    e = parse_rational(eps)
    st = _state(state_path, depth)
    if level is not None:
        if level < -1 or level > st.J:
            raise InputError(f"level {level} is not constructed (0..{st.J})")
        cv = gamma_eval(st, level, th)
    else:
        if e <= 0:
            raise InputError("eps must be positive")
        cv = st.gamma_limit(th, e)
    click.echo(format_value(cv.value))
    click.echo(f"status: {cv.status}")


@eval_group.command("map")
@click.option("--level", "-m", "m", type=int, default=None, help="Map level m (default: the limit map).")
@click.option("--theta", required=True)
@click.option("--x", "x", required=True)
@click.option("--eps", default="1/1024", show_default=True)
@_state_opt
@_depth_opt
def eval_map(m: Optional[int], theta: str, x: str, eps: str, state_path: Optional[str], depth: int) -> None:
    th = parse_angle(theta)
    xv = parse_rational(x)
    e = parse_rational(eps)
    if not -2 <= xv <= 2:
        raise InputError("x must lie in [-2, 2]")
    if e <= 0:
        raise InputError("eps must be positive")
    st = _state(state_path, depth)
    if m is not None and m < 0:
        raise InputError("m must be non-negative")
    mv = f_limit(st, th, xv, e) if m is None else fm(st, m, th, xv, e)
    click.echo(format_value(mv.value))
    click.echo(f"status: {mv.status}")


class VerificationFailed(click.ClickException):
    exit_code = EXIT_VERIFY


@cli.command("verify")
@click.option("--suite", type=click.Choice(SUITES), default="all", show_default=True)
@click.option("--samples", type=click.IntRange(1, None), default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=click.IntRange(1, 64), default=1, show_default=True)
@click.option("--report", type=click.Path(dir_okay=False), default=None)
@_state_opt
@_depth_opt
def verify_cmd(suite: str, samples: int, seed: int, workers: int, report: Optional[str],
               state_path: Optional[str], depth: int) -> None:
    st = _state(state_path, depth)
    rep = verify_suite(st, suite, samples, seed, workers)
    text = rep.to_text()
    if report:
        try:
            with open(report, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise ExportError(f"cannot write {report}: {e.strerror or e}") from e
    for r in rep.records:
        click.echo(f"[{r.status}] {r.check_id} ({r.samples} samples)")
    click.echo(f"overall {rep.status}")
    if not rep.ok:
        raise VerificationFailed(f"verification {rep.status}")


@cli.command("plot")
@click.option("--what", type=click.Choice(("gamma", "boxes", "map", "orbit")), required=True)
@click.option("--level", type=int, default=None, help="Curve level, box depth or map level.")
@click.option("--x", "x", default="0", show_default=True, help="Fiber coordinate for --what map.")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="svg", show_default=True)
@click.option("--grid", type=click.IntRange(2, 1 << 16), default=512, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_state_opt
@_depth_opt
def plot_cmd(what: str, level: Optional[int], x: str, fmt: str, grid: int, out: str,
             state_path: Optional[str], depth: int) -> None:
    st = _state(state_path, depth)
    if level is not None and (level < 0 or (what != "map" and level > st.J)):
        raise InputError(f"level {level} out of range for depth {st.J}")
    if what == "gamma":
        export_curve(st, st.J if level is None else level, fmt, out, grid)
    elif what == "boxes":
        export_boxes(st, fmt, out, level)
    elif what == "map":
        export_map(st, 1 if level is None else level, fmt, out, parse_rational(x), grid)
    else:
        export_orbit(st, fmt, out)
    click.echo(f"{what} written to {out}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        cli.main(args=args, prog_name="skewbox", standalone_mode=False)
    except click.exceptions.Exit as e:
        return int(e.exit_code)
    except VerificationFailed as e:
        click.echo(e.format_message(), err=True)
        return EXIT_VERIFY
    except click.UsageError as e:
        ctx = e.ctx
        if ctx is not None:
            click.echo(ctx.get_usage(), err=True)
        click.echo(f"error: {e.format_message()}", err=True)
        return EXIT_INPUT
    except click.Abort:
        return EXIT_INPUT
    except ConstructionError as e:
        click.echo(f"construction failed: {e}", err=True)
        click.echo(f"first failing clause: {e.clause}", err=True)
        return EXIT_CONSTRUCTION
    except (InputError, ExportError, ExcludedPoint, HorizonLimited, ValueError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_INPUT
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
