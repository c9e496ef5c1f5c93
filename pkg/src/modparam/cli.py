"""Command-line interface: curve records, subcommands and serialized output"""

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union
import argparse
import json
import logging
import sys

import mpmath
import pandas as pd

from modparam.arith.reconstruct import NoRationalInBall
from modparam.arith.scalars import ScalarError
from modparam.arith.series import SeriesError
from modparam.config import RunConfig
from modparam.congruence import (
    CongruenceError,
    difference_rational_form,
    parametrization_congruence,
    reduced_basis,
    reduced_basis_table,
)
from modparam.curve import AffinePoint, CurveError, EllipticCurve
from modparam.gamma0 import Cusp, CosetDecompositionFailed, cusps, is_squarefree
from modparam.jfunction import RecognitionError
from modparam.modpoly import (
    ModularPolynomialError,
    build_modular_function,
    cm_criterion,
    divisor_of,
    modular_degree,
    modular_polynomial,
    preimage_search,
)
from modparam.param import MAX_EICHLER_TERMS, ModularParametrization, ParametrizationError
from modparam.periods import PeriodError, closure_defect, eichler_trace, terms_needed


logger = logging.getLogger(__name__)

BUNDLED_CURVES = Path(__file__).parent / "data" / "curves.txt"


class CurveFileError(Exception):
    """Base exception for curve file handling"""

    pass


class ParseError(CurveFileError):
    """Raised for a malformed curve record"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class UnknownCurve(CurveFileError):
    """Raised when a label is not among the loaded records"""

    pass


DOMAIN_ERRORS = (
    CurveFileError,
    CurveError,
    SeriesError,
    ScalarError,
    NoRationalInBall,
    PeriodError,
    ParametrizationError,
    CosetDecompositionFailed,
    RecognitionError,
    ModularPolynomialError,
    CongruenceError,
)


@dataclass
class CurveRecord:
    """One line of a curve file: label, a-invariants, conductor and overrides"""

    ainvs: Tuple[int, int, int, int, int]
    conductor: int
    label: Optional[str] = None
    manin: int = 1
    degree: Optional[int] = None

    def __post_init__(self):
        """Validate the record"""
        if len(self.ainvs) != 5:
            raise ValueError(f"Expected five a-invariants, got {len(self.ainvs)}")
        if self.conductor < 1:
            raise ValueError("Conductor must be positive")
        if self.manin < 1:
            raise ValueError("Manin constant must be positive")
        if self.degree is not None and self.degree < 1:
            raise ValueError("Modular degree must be positive")

    def curve(self) -> EllipticCurve:
        """Weierstrass model; raises SingularCurve for a zero discriminant"""
        return EllipticCurve(*self.ainvs, conductor=self.conductor, label=self.label)

    def to_line(self) -> str:
        parts = [self.label] if self.label else []
        parts.append(",".join(str(a) for a in self.ainvs))
        parts.append(str(self.conductor))
        if self.manin != 1:
            parts.append(f"manin={self.manin}")
        if self.degree is not None:
            parts.append(f"degree={self.degree}")
        return " ".join(parts)


def parse_curve_line(line: str, line_number: Optional[int] = None) -> Optional[CurveRecord]:
    """
    Parse `label? a1,a2,a3,a4,a6 N [manin=k] [degree=d]`

    Returns None for blank and comment lines.

    Raises:
        ParseError: If the line is malformed
    """
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    tokens = text.split()
    label = None
    if "," not in tokens[0]:
        label = tokens.pop(0)
    if len(tokens) < 2:
        raise ParseError("expected a-invariants and a conductor", line_number)
    try:
        ainvs = tuple(int(a) for a in tokens[0].split(","))
        conductor = int(tokens[1])
    except ValueError as exc:
        raise ParseError(f"non-integer field in {text!r}", line_number) from exc
    if len(ainvs) != 5:
        raise ParseError(f"expected five a-invariants, got {len(ainvs)}", line_number)
    options = {}
    for token in tokens[2:]:
        key, sep, value = token.partition("=")
        if not sep or key not in ("manin", "degree"):
            raise ParseError(f"unknown option {token!r}", line_number)
        try:
            options[key] = int(value)
        except ValueError as exc:
            raise ParseError(f"option {key} must be an integer", line_number) from exc
    try:
        return CurveRecord(ainvs, conductor, label, **options)
    except ValueError as exc:
        raise ParseError(str(exc), line_number) from exc


def parse_curve_file(path: Union[str, Path]) -> List[CurveRecord]:
    """
    Read curve records, one per line

    Raises:
        ParseError: With the line number of a malformed record
        SingularCurve: If a record has zero discriminant
    """
    records = []
    with open(path, encoding="utf-8") as handle:
        for number, line in enumerate(handle, start=1):
            record = parse_curve_line(line, number)
            if record is None:
                continue
            record.curve()
            records.append(record)
    logger.debug(f"Loaded {len(records)} curve records from {path}")
    return records


def bundled_curves() -> List[CurveRecord]:
    return parse_curve_file(BUNDLED_CURVES)


def find_curve(label: str, extra: Optional[Union[str, Path]] = None) -> CurveRecord:
    """Look a label up in the given curve file, then in the bundled records"""
    records = (parse_curve_file(extra) if extra else []) + bundled_curves()
    for record in records:
        if record.label == label:
            return record
    raise UnknownCurve(f"No curve labelled {label!r}")


def parse_cusp(text: str, level: int) -> Cusp:
    """'oo', '0' or 'a/c', matched against the cusp representatives of the level"""
    if text in ("oo", "inf", "infinity"):
        return cusps(level)[0]
    value = Fraction(text)
    for cusp in cusps(level):
        if not cusp.is_infinity and Fraction(cusp.numerator, cusp.denominator) == value:
            return cusp
    raise ValueError(f"{text} is not a cusp representative of Gamma_0({level})")


def parse_point(text: str) -> AffinePoint:
    x, y = (Fraction(v) for v in text.split(","))
    return AffinePoint(x, y)


def _parametrization(
    record: CurveRecord, config: RunConfig, n_max: Optional[int] = None, lam: int = 1
) -> ModularParametrization:
    return ModularParametrization(
        record.curve(),
        n_max=n_max or config.n_max,
        bits=config.bits,
        manin=record.manin,
        lam=lam,
        counting_budget=config.counting_budget,
    )


def _modpoly_n_max(record: CurveRecord, order: Optional[int], config: RunConfig) -> int:
    """Expansion length so that the widest cusp still reaches q^order"""
    if order is None:
        return config.n_max
    return record.conductor * order + 8


def _emit(payload, args, config: RunConfig) -> None:
    if isinstance(payload, pd.DataFrame):
        if config.output_format == "csv":
            text = payload.to_csv()
        else:
            text = payload.to_json(orient="split")
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + ("" if text.endswith("\n") else "\n"), encoding="utf-8")
        logger.info(f"Wrote {args.out}")
    else:
        sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))


def boundary_path(level: int, arc_points: int = 8) -> List[mpmath.mpc]:
    """
    Images of the bottom arc of the fundamental domain under (0, -1; 1, j)

    The N arcs chain end to start, and the last end point is the image of
    the first start point under (1, 0; -N, 1), so the trace closes up to a
    period.
    """
    start = -((level - 1) // 2)
    arc = [
        mpmath.expj(mpmath.pi * (2 - mpmath.mpf(k) / arc_points) / 3)
        for k in range(arc_points + 1)
    ]
    path: List[mpmath.mpc] = []
    for j in range(start, start + level):
        images = [-1 / (z + j) for z in arc]
        path.extend(images if not path else images[1:])
    return path


def eichler_plot(
    record: CurveRecord, config: RunConfig, samples: int = 4, arc_points: int = 8, path=None
) -> Tuple[pd.DataFrame, Tuple]:
    """
    Trace of epsilon along a path as a frame (re_z, im_z, re_eps, im_eps)

    Returns:
        The frame and the lattice coordinates of the closure defect
    """
    parametrization = _parametrization(record, config)
    path = path if path is not None else boundary_path(record.conductor, arc_points)
    with mpmath.workprec(config.bits):
        lattice = parametrization.lattice
        # Gamma_0(N)-reduced points keep imaginary part about sqrt(3) / (2N)
        height = mpmath.sqrt(3) / (2 * record.conductor)
        f = parametrization.newform(min(terms_needed(height, config.bits), MAX_EICHLER_TERMS))
        trace = eichler_trace(f, path, samples, config.bits, lattice)
        defect = lattice.coordinates(closure_defect(trace))
    rows = [
        {
            "re_z": float(mpmath.re(z)),
            "im_z": float(mpmath.im(z)),
            "re_eps": float(mpmath.re(e)),
            "im_eps": float(mpmath.im(e)),
        }
        for z, e in trace
    ]
    df = pd.DataFrame(rows, columns=["re_z", "im_z", "re_eps", "im_eps"])
    return df, tuple(mpmath.nstr(c, 12) for c in defect)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--curves-file", help="extra curve records to search before the bundled ones"
    )
    common.add_argument("--bits", type=int, help="numeric precision in bits")
    common.add_argument(
        "--format", dest="output_format", choices=("json", "csv"), help="table output format"
    )
    common.add_argument("--log-level", help="logging level")
    common.add_argument("--out", help="write output to this file instead of stdout")

    parser = argparse.ArgumentParser(
        prog="modparam",
        description="Modular parametrizations of elliptic curves at every cusp of Gamma_0(N).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[common], help="X, Y expansions at a cusp")
    p.add_argument("--curve", required=True)
    p.add_argument("--cusp", default="oo", help="'oo', '0' or 'a/c'; 'all' for every cusp")
    p.add_argument("--order", type=int, help="truncation order of X")
    p.add_argument("--lam", type=int, default=1, help="multiplication endomorphism")

    function_commands = (
        ("modpoly", "coefficients of the modular polynomial"),
        ("divisor", "divisor of a function"),
    )
    for name, text in function_commands:
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--curve", required=True)
        p.add_argument("--expr", required=True, help="rational expression in X and Y")
        p.add_argument("--order", type=int, help="q-order reached by the symmetric functions")
        p.add_argument("--degree-bound", type=int, help="largest denominator degree in j")
        if name == "modpoly":
            p.add_argument("--count", type=int, default=1, help="number of top coefficients")

    point_commands = (
        ("preimage", "CM preimages of a rational point"),
        ("cm-check", "CM test of the preimages"),
    )
    for name, text in point_commands:
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--curve", required=True)
        p.add_argument("--point", required=True, help="x,y")
        p.add_argument("--j", required=True, help="rational CM j-invariant of the preimages")
        if name == "cm-check":
            p.add_argument("--m", type=int, required=True, help="exact divisor of the level")

    p = sub.add_parser("congruence", parents=[common], help="congruence of two X-parametrizations")
    p.add_argument("--curve", required=True)
    p.add_argument("--curve2", required=True)
    p.add_argument("--mod", type=int, required=True)
    p.add_argument("--order", type=int, help="expansion order at infinity")
    p.add_argument("--form", action="store_true", help="include the rational form of X_1 - X_2")

    p = sub.add_parser("basis", parents=[common], help="row-reduced basis of Q[X, Y]")
    p.add_argument("--curve", required=True)
    p.add_argument("--pole-order", type=int, default=7)
    p.add_argument("--order", type=int, default=10, help="largest exponent shown")

    p = sub.add_parser(
        "eichler-plot", parents=[common], help="epsilon along the fundamental domain boundary"
    )
    p.add_argument("--curve", required=True)
    p.add_argument("--samples", type=int, default=4, help="points per path segment")
    p.add_argument("--arc-points", type=int, default=8)

    p = sub.add_parser("degrees", parents=[common], help="modular degree and a_n table")
    p.add_argument("--curve", required=True)
    p.add_argument("--order", type=int, default=20, help="number of a_n")
    return parser


def run_subcommand(args: argparse.Namespace, config: RunConfig) -> None:
    record = find_curve(args.curve, args.curves_file)
    command = args.command

    if command == "expand":
        parametrization = _parametrization(record, config, args.order, args.lam)
        if args.cusp == "all":
            payload = [e.to_dict() for e in parametrization.expansions()]
        else:
            payload = parametrization.expansion(parse_cusp(args.cusp, record.conductor)).to_dict()
        _emit(payload, args, config)

    elif command in ("modpoly", "divisor"):
        n_max = _modpoly_n_max(record, args.order, config)
        parametrization = _parametrization(record, config, n_max)
        F = build_modular_function(parametrization, args.expr)
        bound = args.degree_bound if args.degree_bound is not None else config.degree_bound
        if command == "modpoly":
            result = modular_polynomial(F, args.count)
            for i in sorted(result.series, reverse=True):
                result.recognize(i, bound)
            _emit(result.to_dict(), args, config)
        else:
            _emit(divisor_of(F, bound).to_dict(), args, config)

    elif command in ("preimage", "cm-check"):
        if not is_squarefree(record.conductor):
            raise ValueError(f"Preimage search needs a squarefree level, got {record.conductor}")
        parametrization = _parametrization(record, config)
        found = preimage_search(parametrization, parse_point(args.point), Fraction(args.j))
        if command == "preimage":
            _emit([p.to_dict() for p in found], args, config)
        else:
            verdicts = [
                dict(cm_criterion(p.z0, args.m, level=record.conductor).to_dict(), z0=str(p.z0))
                for p in found
            ]
            _emit(verdicts, args, config)

    elif command == "congruence":
        other = find_curve(args.curve2, args.curves_file)
        order = args.order or config.n_max
        first = _parametrization(record, config, order)
        second = _parametrization(other, config, order)
        verdict = parametrization_congruence(first, second, args.mod, (record.degree, other.degree))
        if verdict.window_checked is None and verdict.decision == "proved":
            logger.warning("Proved verdict without a soundness window")
        payload = verdict.to_dict()
        if args.form:
            payload["form"] = difference_rational_form(first, second).to_dict()
        _emit(payload, args, config)

    elif command == "basis":
        parametrization = _parametrization(record, config, max(args.order + 2, config.n_max))
        table = reduced_basis_table(reduced_basis(parametrization, args.pole_order), args.order)
        _emit(table, args, config)

    elif command == "eichler-plot":
        df, defect = eichler_plot(record, config, args.samples, args.arc_points)
        text = df.to_csv(index=False)
        text += f"# closure defect in lattice coordinates: {defect[0]} {defect[1]}\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)

    elif command == "degrees":
        parametrization = _parametrization(record, config)
        degree = modular_degree(parametrization, record.degree)
        f = parametrization.newform(args.order)
        table = pd.DataFrame(
            {"n": range(1, args.order + 1), "a_n": [f[n] for n in range(1, args.order + 1)]}
        ).set_index("n")
        if config.output_format == "csv":
            _emit(table, args, config)
        else:
            payload = {"label": record.label, "degree": degree, "a_n": table["a_n"].tolist()}
            _emit(payload, args, config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig.from_env(
            bits=args.bits, output_format=args.output_format, log_level=args.log_level
        )
    except ValueError as exc:
        parser.error(str(exc))
    logging.basicConfig(
        level=getattr(logging, config.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        run_subcommand(args, config)
    except DOMAIN_ERRORS as exc:
        logger.error(f"{args.command} failed: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError) as exc:
        logger.error(f"{args.command} rejected its input: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
