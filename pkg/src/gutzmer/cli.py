"""Command-line entry point: ``gutzmer verify|transform|classify``.

Exit codes
----------
0   every check passed (transform and classify: job done, verdict conclusive)
1   at least one check failed
2   no failure, but some result is LOW_CONFIDENCE or INCONCLUSIVE
64  invalid configuration or usage
65  input that cannot be parsed (including empty input)
74  input or output file that cannot be read or written

Reports are deterministic for a fixed configuration: the only varying data,
the timestamp and the runtimes, sit under the top-level ``"timing"`` key.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .diagnostics import BUILTIN_INPUTS, SUITES, builtin_image, classify, growth_profile, run_suite
from .quadrature import LowConfidenceWarning, max_nodes
from .reports import Verdict, VerificationReport, to_jsonable
from .space_model import SpaceKind, SpaceModel, make_space, slot_count
from .transform import BargmannImage, SpectralCoeffs, bargmann_forward

__all__ = [
    "ConfigError",
    "ParseError",
    "RunConfig",
    "exit_code_for",
    "read_coefficients",
    "write_coefficients",
    "cmd_verify",
    "cmd_transform",
    "cmd_classify",
    "main",
]

EXIT_OK, EXIT_FAIL, EXIT_WEAK = 0, 1, 2
EXIT_USAGE, EXIT_DATAERR, EXIT_IOERR = 64, 65, 74

DEFAULT_LMAX = {"verify": 8, "transform": 48, "classify": 48}


class ConfigError(ValueError):
    """Invalid flags or environment."""


class ParseError(ValueError):
    """Unreadable coefficient input."""


@dataclass(frozen=True)
class RunConfig:
    space: SpaceModel
    t: float
    lmax: int
    tol: float | None = None
    seed: int = 0
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t > 0):
            raise ConfigError("--t must be a positive number")
        if self.lmax < 1:
            raise ConfigError("--lmax must be at least 1")
        if self.tol is not None and not (math.isfinite(self.tol) and self.tol > 0):
            raise ConfigError("--tol must be a positive number")
        if self.format not in ("json", "csv"):
            raise ConfigError("--format must be json or csv")

    def to_dict(self) -> dict:
        return {"space": self.space.name, "t": self.t, "lmax": self.lmax, "tol": self.tol,
                "seed": self.seed, "format": self.format}


def exit_code_for(verdicts) -> int:
    """0 if all pass, 1 on any failure, 2 if the rest is only weak evidence."""
    verdicts = [Verdict(v) for v in verdicts]
    if any(v is Verdict.FAIL for v in verdicts):
        return EXIT_FAIL
    if any(v is not Verdict.PASS for v in verdicts):
        return EXIT_WEAK
    return EXIT_OK


# ---------------------------------------------------------------------------
# coefficient files


def coefficients_to_json(coeffs: SpectralCoeffs, t: float | None = None) -> str:
    """``{space, lmax, t?, data}`` with ``data`` the ragged blocks of ``[re, im]`` pairs."""
    doc = {"space": coeffs.space.kind.value, "lmax": coeffs.lmax}
    if t is not None:
        doc["t"] = float(t)
    doc["data"] = [[[float(z.real), float(z.imag)] for z in block] for block in coeffs.ragged()]
    return json.dumps(doc, allow_nan=False) + "\n"


def coefficients_from_json(text: str) -> tuple[SpectralCoeffs, float | None]:
    """Inverse of :func:`coefficients_to_json`; raises :class:`ParseError`."""
    if not text.strip():
        raise ParseError("empty input")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "space" not in doc or "data" not in doc:
        raise ParseError("expected an object with fields space, lmax, data")
    try:
        space = make_space(doc["space"])
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    data = doc["data"]
    if not isinstance(data, list) or not data:
        raise ParseError("data must be a non-empty list of blocks")
    lmax = doc.get("lmax", len(data) - 1)
    if not isinstance(lmax, int) or isinstance(lmax, bool) or lmax != len(data) - 1:
        raise ParseError(f"lmax {lmax!r} does not match {len(data)} blocks")
    t = doc.get("t")
    if t is not None and (not isinstance(t, (int, float)) or isinstance(t, bool) or not t > 0):
        raise ParseError("t must be a positive number")
    blocks = []
    for lam, block in enumerate(data):
        try:
            arr = np.asarray(block, dtype=float)
        except (TypeError, ValueError):
            raise ParseError(f"block {lam} is not a list of [re, im] pairs") from None
        if arr.shape != (slot_count(space, lam), 2):
            raise ParseError(f"block {lam} must hold {slot_count(space, lam)} [re, im] pairs")
        if not np.all(np.isfinite(arr)):
            raise ParseError(f"block {lam} has non-finite entries")
        blocks.append(arr[:, 0] + 1j * arr[:, 1])
    return SpectralCoeffs.from_ragged(space, blocks), (None if t is None else float(t))


def read_coefficients(path: str) -> tuple[SpectralCoeffs, float | None]:
    """Read a coefficient file (``-`` is stdin)."""
    text = sys.stdin.read() if path == "-" else _read_text(path)
    return coefficients_from_json(text)


def write_coefficients(path: str, coeffs: SpectralCoeffs, t: float | None = None) -> None:
    _write_text(path, coefficients_to_json(coeffs, t))


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# report rendering


def _envelope(command: str, cfg: RunConfig, body: dict, runtimes: dict, code: int) -> dict:
    return {
        "tool": "gutzmer",
        "version": __version__,
        "command": command,
        "config": cfg.to_dict(),
        **body,
        "exit_code": code,
        "timing": {"timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                   "runtime_ms": runtimes},
    }


def _dump_json(doc: dict) -> str:
    return json.dumps(to_jsonable(doc), indent=2) + "\n"


def _csv_text(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(row.get(k)) for k in columns})
    return buf.getvalue()


def _csv_cell(value):
    value = to_jsonable(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return "" if value is None else value


REPORT_COLUMNS = ["check_name", "space", "verdict", "rel_error", "tolerance", "params",
                  "fitted_constants", "notes"]


# ---------------------------------------------------------------------------
# commands


def cmd_verify(suite: str, cfg: RunConfig) -> int:
    """Run a suite and write its report; the exit code follows the verdicts."""
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    start = time.perf_counter()
    reports: list[VerificationReport] = run_suite(suite, cfg.space, cfg.t, cfg.lmax, cfg.seed, cfg.tol)
    total_ms = int(round(1000 * (time.perf_counter() - start)))
    code = exit_code_for(r.verdict for r in reports)
    if cfg.format == "csv":
        text = _csv_text([r.to_dict(include_runtime=False) for r in reports], REPORT_COLUMNS)
    else:
        counts = {v.value: sum(r.verdict is v for r in reports) for v in Verdict}
        body = {"suite": suite, "summary": counts,
                "reports": [r.to_dict(include_runtime=False) for r in reports]}
        runtimes = {"total": total_ms, "checks": [r.runtime_ms for r in reports]}
        text = _dump_json(_envelope("verify", cfg, body, runtimes, code))
    _write_text(cfg.out, text)
    return code


def _load_input(source: str, cfg: RunConfig, allow_image: bool) -> BargmannImage:
    """Builtin name or coefficient file; files without ``t`` hold preimage coefficients."""
    if source in BUILTIN_INPUTS:
        return builtin_image(source, cfg.space, cfg.t, cfg.lmax, cfg.seed)
    coeffs, t_file = read_coefficients(source)
    if coeffs.space.kind is not cfg.space.kind:
        raise ConfigError(f"input is on {coeffs.space.name} but --space is {cfg.space.name}")
    if t_file is None:
        return bargmann_forward(coeffs, cfg.t)
    if not allow_image:
        raise ParseError("input already carries t; transform expects preimage coefficients")
    if not math.isclose(t_file, cfg.t, rel_tol=1e-12):
        raise ConfigError(f"input has t={t_file!r} but --t is {cfg.t!r}")
    return BargmannImage(coeffs, t_file)


def cmd_transform(source: str, cfg: RunConfig, profile_path: str | None = None) -> int:
    """Write the image coefficients and, optionally, an ``(H, sup|F|)`` table."""
    image = _load_input(source, cfg, allow_image=False)
    if cfg.format == "csv":
        rows = [{"lambda": int(l), "j": int(j), "re": float(z.real), "im": float(z.imag)}
                for l, j, z in zip(image.coeffs.lams, image.coeffs.js, image.coeffs.data)]
        _write_text(cfg.out, _csv_text(rows, ["lambda", "j", "re", "im"]))
    else:
        write_coefficients(cfg.out, image.coeffs, image.t)
    if profile_path is not None:
        prof = growth_profile(image, image.t)
        rows = [{"H": float(h), "sup_abs": float(v), "envelope_residual": float(r)}
                for h, v, r in zip(prof.H_grid, prof.sup_abs, prof.envelope_residual)]
        _write_text(profile_path, _csv_text(rows, ["H", "sup_abs", "envelope_residual"]))
    return EXIT_OK


def cmd_classify(source: str, cfg: RunConfig) -> int:
    """Write classifier verdicts and fitted orders; INCONCLUSIVE gives exit 2."""
    start = time.perf_counter()
    image = _load_input(source, cfg, allow_image=True)
    result = classify(image, image.t)
    total_ms = int(round(1000 * (time.perf_counter() - start)))
    result = {"input": source, **result}
    code = EXIT_WEAK if result["label"] == "INCONCLUSIVE" else EXIT_OK
    if cfg.format == "csv":
        text = _csv_text([result], list(result))
    else:
        text = _dump_json(_envelope("classify", cfg, {"result": result}, {"total": total_ms}, code))
    _write_text(cfg.out, text)
    return code


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _common(p: argparse.ArgumentParser, command: str) -> None:
    p.add_argument("--space", required=True, choices=[k.value for k in SpaceKind],
                   help="symmetric space: circle (S^1), sphere2 (S^2) or su2 (SU(2), class functions)")
    p.add_argument("--t", type=float, required=True, help="heat time t > 0")
    p.add_argument("--lmax", type=int, default=None,
                   help=f"spectral band limit (default {DEFAULT_LMAX[command]})")
    p.add_argument("--seed", type=int, default=0, help="seed for random test functions (default 0)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json", help="output format (default json)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gutzmer",
        description="Segal-Bargmann transform and holomorphic Sobolev spaces on S^1, S^2 and SU(2).",
        epilog="Environment: GUTZMER_MAX_NODES caps the node count of adaptive quadrature doubling. "
               "Exit codes: 0 pass, 1 fail, 2 low confidence or inconclusive, 64 usage, "
               "65 unparseable input, 74 I/O error.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a verification suite",
                       description="Run a verification suite and write one report per check.")
    v.add_argument("suite", choices=list(SUITES), help="suite to run")
    _common(v, "verify")
    v.add_argument("--tol", type=float, default=None,
                   help="override the relative tolerance of the identity checks")

    tr = sub.add_parser("transform", help="apply the heat kernel transform",
                        description="Transform preimage coefficients (file or builtin) and write the "
                                    "image coefficients.")
    tr.add_argument("input", help=f"coefficient file, '-' for stdin, or one of {', '.join(BUILTIN_INPUTS)}")
    _common(tr, "transform")
    tr.add_argument("--profile", default=None, help="also write an (H, sup|F|) CSV table to this path")

    c = sub.add_parser("classify", help="classify the growth of an image",
                       description="Classify an image as SMOOTH, DISTRIBUTION, UNBOUNDED or INCONCLUSIVE "
                                   "from its growth along the imaginary directions.")
    c.add_argument("input", help=f"coefficient file, '-' for stdin, or one of {', '.join(BUILTIN_INPUTS)}")
    _common(c, "classify")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        max_nodes()  # validate the environment before any work
        cfg = RunConfig(space=make_space(args.space), t=args.t,
                        lmax=DEFAULT_LMAX[args.command] if args.lmax is None else args.lmax,
                        tol=getattr(args, "tol", None), seed=args.seed, out=args.out, format=args.format)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LowConfidenceWarning)
            if args.command == "verify":
                return cmd_verify(args.suite, cfg)
            if args.command == "transform":
                return cmd_transform(args.input, cfg, args.profile)
            return cmd_classify(args.input, cfg)
    except ParseError as exc:
        print(f"gutzmer: invalid input: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    except (ConfigError, ValueError) as exc:
        print(f"gutzmer: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"gutzmer: {exc}", file=sys.stderr)
        return EXIT_IOERR


if __name__ == "__main__":
    sys.exit(main())
