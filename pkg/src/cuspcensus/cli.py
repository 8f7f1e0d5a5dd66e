"""Command-line front end.

Every subcommand emits one JSON report (or a text rendering with --text).
Exit codes: 0 success, Proven, or a count; 2 NotProvenByThisBound; 3 input
error; 4 resource exhaustion.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from . import __version__
from .bounds import (
    PAPER_DELTA0,
    Verdict,
    delta0_derivation,
    finiteness_enumerate,
    one_cusp_certificate,
)
from .cusps import (
    DEFAULT_HEIGHT,
    CensusBudgetExceeded,
    CocompactError,
    SearchExhausted,
    SignatureError,
    cusp_pipeline,
)
from .exactnum import DEFAULT_PRECISION_BITS, PrecisionExhausted
from .genus import DEFAULT_BUDGET, InadmissiblePrime, default_prime, spinor_genus_classes
from .qforms.binary import class_number, reduced_forms
from .qforms.lattice import GramLattice, NotPositiveDefinite
from .qforms.rational import DegenerateForm, RationalForm
from .qforms.textio import FormatError, integral_rows, parse_gram

EXIT_OK = 0
EXIT_NOT_PROVEN = 2
EXIT_INPUT = 3
EXIT_RESOURCE = 4

PRECISION_ENV = "CUSPCENSUS_PRECISION_BITS"


class UsageError(Exception):
    pass


class ResourceError(Exception):
    def __init__(self, message: str, partial: Optional[dict] = None):
        super().__init__(message)
        self.partial = partial


INPUT_ERRORS = (
    UsageError,
    FormatError,
    CocompactError,
    SignatureError,
    DegenerateForm,
    NotPositiveDefinite,
    InadmissiblePrime,
    ValueError,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as NotProven
    def error(self, message):
        raise UsageError(message)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _precision(args) -> int:
    if args.precision is not None:
        bits = args.precision
    else:
        env = os.environ.get(PRECISION_ENV)
        if env is None:
            return DEFAULT_PRECISION_BITS
        try:
            bits = int(env)
        except ValueError:
            raise UsageError(f"{PRECISION_ENV} must be an integer, got {env!r}") from None
    if bits < 16:
        raise UsageError("precision must be at least 16 bits")
    return bits


# --- subcommand bodies: each returns (result dict, verdict string, exit code)


def run_onecusp(args) -> tuple[dict, str, int]:
    if args.dim < 4:
        raise UsageError(f"--dim must be >= 4, got {args.dim}")
    report = one_cusp_certificate(args.dim, _precision(args))
    code = EXIT_OK if report.verdict is Verdict.PROVEN else EXIT_NOT_PROVEN
    return report.to_json(), report.verdict.value, code


def run_classnumber(args) -> tuple[dict, str, int]:
    d = args.d
    if d >= 0:
        raise UsageError(f"discriminant must be negative, got {d}")
    h = class_number(d)
    forms = [[f.a, f.b, f.c] for f in reduced_forms(d)]
    return {"discriminant": d, "class_number": h, "reduced_forms": forms}, str(h), EXIT_OK


def run_cusps(args, text: str) -> tuple[dict, str, int]:
    q = RationalForm(parse_gram(text))
    try:
        cert = cusp_pipeline(
            q,
            prime=args.prime,
            budget=args.budget,
            search_height=args.height,
            galois_bound=args.galois_bound,
        )
    except SearchExhausted as exc:
        raise ResourceError(str(exc)) from None
    except CensusBudgetExceeded as exc:
        raise ResourceError(str(exc), {"partial_census": exc.census.to_json()}) from None
    return cert.to_json(), f"principal_cusps={cert.principal_cusps}", EXIT_OK


def run_census(args, text: str) -> tuple[dict, str, int]:
    lat = GramLattice(integral_rows(parse_gram(text)))
    lat.require_positive_definite()
    p = args.prime if args.prime is not None else default_prime(lat)
    census = spinor_genus_classes(lat, p, args.budget)
    if not census.exhausted:
        raise ResourceError(
            f"budget of {args.budget} classes reached before closure",
            {"partial_census": census.to_json()},
        )
    return census.to_json(), f"classes={census.class_count}", EXIT_OK


def run_delta0(args) -> tuple[dict, str, int]:
    der = delta0_derivation()
    verdict = "MeetsPaperValue" if der.meets_paper_value else "BelowPaperValue"
    return der.to_json(), verdict, EXIT_OK


def run_enumerate(args) -> tuple[dict, str, int]:
    delta0 = args.delta0 if args.delta0 is not None else PAPER_DELTA0
    try:
        res = finiteness_enumerate(args.max_cusps, delta0, _precision(args))
    except RuntimeError as exc:
        raise ResourceError(str(exc)) from None
    return res.to_json(), f"types={len(res)}", EXIT_OK


# --- report assembly


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def build_report(
    argv: list[str],
    body: Callable[[], tuple[dict, str, int]],
    input_info: Optional[dict] = None,
) -> tuple[dict, int]:
    start = time.perf_counter_ns()
    report: dict = {"tool": "cuspcensus", "version": __version__, "command": list(argv)}
    report["input"] = input_info
    try:
        result, verdict, code = body()
        report["result"] = result
        report["verdict"] = verdict
    except ResourceError as exc:
        code = EXIT_RESOURCE
        report["error"] = {"kind": "resource", "message": str(exc)}
        if exc.partial:
            report["result"] = exc.partial
    except PrecisionExhausted as exc:
        code = EXIT_RESOURCE
        report["error"] = {"kind": "precision", "message": str(exc)}
    except CocompactError as exc:
        code = EXIT_INPUT
        report["error"] = {"kind": "cocompact", "message": str(exc)}
    except FormatError as exc:
        code = EXIT_INPUT
        report["error"] = {"kind": "parse", "message": str(exc)}
    except INPUT_ERRORS as exc:
        code = EXIT_INPUT
        report["error"] = {"kind": "input", "message": str(exc)}
    report["exit_code"] = code
    report["timing"] = {"elapsed_ns": time.perf_counter_ns() - start}
    return report, code


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}


def render_text(report: dict) -> str:
    lines = [f"cuspcensus {report['version']}: {' '.join(report['command'])}"]
    if report.get("input"):
        lines.append(f"input {report['input']['path']} sha256 {report['input']['sha256']}")
    if "error" in report:
        lines.append(f"error ({report['error']['kind']}): {report['error']['message']}")
    else:
        lines.append(f"verdict: {report['verdict']}")
        res = report["result"]
        for key, val in res.items():
            if isinstance(val, (dict, list)):
                val = json.dumps(val, separators=(",", ":"))
                if len(val) > 200:
                    val = val[:197] + "..."
            lines.append(f"  {key}: {val}")
    lines.append(f"exit code {report['exit_code']}, {report['timing']['elapsed_ns'] / 1e9:.3f} s")
    return "\n".join(lines) + "\n"


def serialize(report: dict, as_text: bool, compact: bool = False) -> str:
    if as_text:
        return render_text(report)
    if compact:
        return json.dumps(report, separators=(",", ":")) + "\n"
    return json.dumps(report, indent=2) + "\n"


def write_atomic(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _file_job(job: tuple) -> tuple[str, dict, int]:
    """One form file through cusps/census; module-level so it pickles for batch workers."""
    command, args, path, argv = job
    runner = run_cusps if command == "cusps" else run_census
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        report, code = build_report(argv, _raise(UsageError(f"cannot read {path}: {exc.strerror}")))
        return path, report, code
    info = {"path": path, "sha256": _digest(data)}

    def body():
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError("input is not UTF-8 text") from None
        return runner(args, text)

    report, code = build_report(argv, body, info)
    return path, report, code


def _raise(exc: Exception):
    def body():
        raise exc

    return body


def _batch_paths(list_file: str) -> list[str]:
    base = Path(list_file).parent
    out = []
    for raw in Path(list_file).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            p = Path(line)
            out.append(str(p if p.is_absolute() else base / p))
    return out


def _out_name(command: str, args, path: Optional[str]) -> str:
    if path is not None:
        return Path(path).stem
    if command == "onecusp":
        return f"onecusp-n{args.dim}"
    if command == "classnumber":
        return f"classnumber-d{args.d}"
    if command == "enumerate":
        return "enumerate-x" + str(args.max_cusps).replace("/", "_")
    return command


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--text", action="store_true", help="human-readable output instead of JSON")
    common.add_argument("--out", metavar="DIR", help="write reports into DIR instead of stdout")
    common.add_argument(
        "--precision", type=int, metavar="BITS", help=f"starting interval precision (env {PRECISION_ENV})"
    )

    parser = _Parser(prog="cuspcensus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cuspcensus {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("onecusp", parents=[common], help="one-cusp volume bound in Spin(n,1)")
    p.add_argument("--dim", type=int, required=True, metavar="N")

    p = sub.add_parser("classnumber", parents=[common], help="class number of a negative discriminant")
    p.add_argument("d", type=int)

    for name, helptext in (
        ("cusps", "cusp count of the principal lattice of a form of signature (n,1)"),
        ("census", "spinor-genus census of a definite integral lattice"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file", nargs="?", help="Gram matrix in the qforms text format")
        p.add_argument("--batch", metavar="LIST", help="file listing one input path per line")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for --batch")
        p.add_argument("--prime", type=int, help="neighbor prime (default: smallest admissible)")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="cap on census classes")
        if name == "cusps":
            p.add_argument("--height", type=int, default=DEFAULT_HEIGHT, help="isotropic search height")
            p.add_argument("--galois-bound", type=_fraction, help="bound for the Galois-cohomology term")

    sub.add_parser("delta0", parents=[common], help="derive the local-factor constant")

    p = sub.add_parser("enumerate", parents=[common], help="types admitting at most x cusps")
    p.add_argument("--max-cusps", type=_fraction, required=True, metavar="X")
    p.add_argument("--delta0", type=_fraction, help="constant for the local factors (default 3/200)")
    return parser


def _emit(report: dict, args, command: str, path: Optional[str], compact: bool = False) -> None:
    if args.out:
        content = serialize(report, args.text)
        suffix = ".txt" if args.text else ".json"
        write_atomic(Path(args.out) / (_out_name(command, args, path) + suffix), content)
    else:
        sys.stdout.write(serialize(report, args.text, compact))


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"cuspcensus: usage error: {exc}\n")
        report, code = build_report(argv, _raise(exc))
        sys.stdout.write(serialize(report, "--text" in argv))
        return code

    command = args.command
    if command in ("cusps", "census"):
        problem = None
        if (args.file is None) == (args.batch is None):
            problem = "give exactly one of FILE or --batch"
        elif args.jobs < 1:
            problem = "--jobs must be positive"
        if problem:
            report, code = build_report(argv, _raise(UsageError(problem)))
            _emit(report, args, command, None)
            return code
        try:
            paths = [args.file] if args.file else _batch_paths(args.batch)
        except OSError as exc:
            report, code = build_report(argv, _raise(UsageError(f"cannot read batch list: {exc}")))
            _emit(report, args, command, None)
            return code
        jobs = [(command, args, path, argv) for path in paths]
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_file_job, jobs))
        else:
            results = [_file_job(job) for job in jobs]
        worst = EXIT_OK
        for path, report, code in results:
            # batch output on stdout is JSON Lines, in list order
            _emit(report, args, command, path, compact=bool(args.batch))
            worst = max(worst, code)
        return worst

    runners = {
        "onecusp": run_onecusp,
        "classnumber": run_classnumber,
        "delta0": run_delta0,
        "enumerate": run_enumerate,
    }
    report, code = build_report(argv, lambda: runners[command](args))
    _emit(report, args, command, None)
    return code


if __name__ == "__main__":
    sys.exit(main())
