#!/usr/bin/env python3
"""
Grid Factor Engine - Main Application
Command layer: parses arguments, builds the run configuration and the engine
components, and prints results as JSON or CSV.

Exit codes: 0 ok, 1 verification failure, 2 resource or range error,
3 bad arguments.
"""

import argparse
import csv
import io
import json
import sys
import traceback
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

from core.alphabet import ColumnKind
from core.counting import STRATEGIES, TwoFactorCounter
from core.errors import GridFactorError, InvalidArgumentError, VerificationFailure
from core.grid_spec import GridFamily, GridSpec
from core.invariants import VerificationSuite
from core.matrix_store import MatrixStore, serialize_matrix
from core.oracle import OracleCensus, CodeMatrix, build_grid, decode, outlet_walk, validate
from core.run_config import OUTPUT_FORMATS, RunConfig
from core.run_logger import EnumerationLogger
from core.structure import StructureVerifier

EXIT_OK = 0
EXIT_BAD_ARGUMENTS = InvalidArgumentError.exit_code


class GridFactorArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that reports bad arguments with exit code 3"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_ARGUMENTS, f"{self.prog}: error: {message}\n")


class GridFactorApplication:
    """
    Main application controller
    Coordinates the matrix store, counter, structure verifier and oracle
    """

    def __init__(self, config: Optional[RunConfig] = None, stdout: Optional[TextIO] = None):
        self.config = config or RunConfig()
        self.stdout = stdout or sys.stdout

        try:
            self.logger = EnumerationLogger(self.config.log_dir, verbose=self.config.verbose)
        except OSError as e:
            print(f"warning: logging disabled ({e})", file=sys.stderr)
            self.logger = None

        self.store = MatrixStore(self.config, self.logger)
        self.counter = TwoFactorCounter(self.config, self.logger, self.store)
        self.verifier = StructureVerifier(self.config, self.logger, self.store)
        self.oracle = OracleCensus(self.config, self.logger)

        if self.logger:
            self.logger.log_system_event("APPLICATION_START", f"threads={self.config.resolved_threads()}")

    # output helpers

    def _emit_json(self, payload):
        self.stdout.write(json.dumps(payload, indent=2) + "\n")

    def _emit_csv(self, header: Sequence[str], rows: List[Sequence]):
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        self.stdout.write(buffer.getvalue())

    @property
    def _csv(self) -> bool:
        return self.config.output == "csv"

    # commands

    def matrix(self, m: int, kind: str, out_path: Optional[str] = None) -> str:
        """Build (or load) the matrix and emit its serialized form"""
        matrix = self.store.get(m, kind)
        if self._csv:
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(["v", "w", "mult"])
            for v, w, mult in matrix.entries():
                writer.writerow([matrix.word_at(v), matrix.word_at(w), mult])
            text = buffer.getvalue()
        else:
            text = serialize_matrix(matrix)

        if out_path:
            path = Path(out_path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            if self.logger:
                self.logger.log_file_operation("MATRIX_WRITE", str(path))
        else:
            self.stdout.write(text)
        return text

    def structure(self, m: int, kind: str):
        report = self.verifier.verify(m, kind)
        if self._csv:
            self._emit_csv(
                ["s_label", "size", "contains", "bipartite"],
                [[c.s_label, c.size, " ".join(c.contains), c.bipartition is not None] for c in report.components],
            )
        else:
            self._emit_json(report.to_dict())
        return report

    def count(self, family: str, m: int, n: int, p: Optional[int] = None, strategy: str = "auto",
              modulus: Optional[int] = None):
        spec = GridSpec.of(family, m, n, p)
        result = self.counter.count(spec, strategy=strategy, modulus=modulus)
        if result.degenerate:
            print(f"warning: {result.degenerate}; the count is the formula value", file=sys.stderr)
        if self._csv:
            self._emit_csv(["family", "m", "n", "p", "count", "method"],
                           [[spec.family.value, spec.m, spec.n, "" if spec.p is None else spec.p,
                             result.count, result.method]])
        else:
            self._emit_json(result.to_dict(include_timing=self.config.timing))
        return result

    def oracle_census(self, family: str, m: int, n: int, p: Optional[int] = None, histogram: bool = False,
                      compare: bool = False):
        spec = GridSpec.of(family, m, n, p)
        census = self.oracle.run(spec)
        formula = self.counter.count(spec).count if compare else None

        if self._csv:
            header = ["family", "m", "n", "p", "total"]
            row = [spec.family.value, spec.m, spec.n, "" if spec.p is None else spec.p, census.total]
            if histogram:
                header.append("hamiltonian")
                row.append(census.hamiltonian)
            if compare:
                header.append("formula")
                row.append(formula)
            self._emit_csv(header, [row])
        else:
            payload = census.to_dict(histogram=histogram, include_timing=self.config.timing)
            if compare:
                payload["formula"] = str(formula)
                payload["agrees"] = formula == census.total
            self._emit_json(payload)

        if compare and formula != census.total:
            raise VerificationFailure(f"{spec}: census {census.total} differs from formula {formula}")
        return census

    def decode_code(self, family: str, m: int, n: int, columns: str, p: Optional[int] = None):
        """Validate a code matrix and describe the 2-factor it encodes"""
        spec = GridSpec.of(family, m, n, p)
        code = CodeMatrix.parse(columns)
        ok, reason = validate(spec, code)
        payload = {"spec": spec.to_dict(), "columns": code.to_text(), "valid": ok, "reason": reason}
        if ok:
            factor = decode(spec, code, build_grid(spec))
            payload["cycles"] = factor.cycle_count()
            payload["cycle_lengths"] = factor.cycle_lengths()
            payload["walk"] = [str(word) for word in outlet_walk(code, spec.kind)]
        if self._csv:
            self._emit_csv(["columns", "valid", "cycles", "reason"],
                           [[code.to_text(), ok, payload.get("cycles", ""), reason]])
        else:
            self._emit_json(payload)
        if not ok:
            raise VerificationFailure(f"{spec}: {reason}")
        return payload

    def verify(self, m_max: int, kind: Optional[str] = None, report_dir: Optional[str] = None,
               differentials: bool = True):
        if m_max < 1:
            raise InvalidArgumentError(f"--m-max must be at least 1, got {m_max}")
        kinds = [kind] if kind else None
        suite = VerificationSuite(self.config, self.logger, self.store)
        outcome = suite.run(m_max, kinds, differentials=differentials)

        if report_dir:
            directory = Path(report_dir)
            directory.mkdir(parents=True, exist_ok=True)
            for report in outcome.reports:
                path = directory / f"structure_{report.kind.value}_m{report.m}.json"
                path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
                if self.logger:
                    self.logger.log_file_operation("REPORT_WRITE", str(path))

        if self._csv:
            self._emit_csv(["check", "message", "witness"],
                           [[v.check, v.message, v.witness or ""] for v in outcome.all_violations()])
        else:
            self._emit_json(outcome.to_dict())

        if not outcome.ok:
            raise VerificationFailure(f"{len(outcome.all_violations())} violations")
        return outcome

    def sweep(self, families: Sequence[str], m_min: int, m_max: int, n_min: int, n_max: int):
        """Count table over ranges of m and n, all twists for TG and KB"""
        if m_min < 1 or n_min < 1 or m_max < m_min or n_max < n_min:
            raise InvalidArgumentError(f"Bad sweep ranges m={m_min}..{m_max} n={n_min}..{n_max}")
        rows = []
        for name in families:
            family = GridFamily.parse(name)
            for m in range(m_min, m_max + 1):
                twists = range(m) if family.twisted else [None]
                for n in range(n_min, n_max + 1):
                    for p in twists:
                        result = self.counter.count(GridSpec(family, m, n, p))
                        rows.append([family.value, m, n, "" if p is None else p, result.count])
        if self._csv:
            self._emit_csv(["family", "m", "n", "p", "count"], rows)
        else:
            self._emit_json([
                {"family": f, "m": m, "n": n, "p": None if p == "" else p, "count": str(c)}
                for f, m, n, p, c in rows
            ])
        return rows

    def shutdown(self):
        if self.logger:
            self.logger.log_system_event("APPLICATION_SHUTDOWN")
            self.logger.close()


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--output", choices=OUTPUT_FORMATS, default=None, help="result format (default json)")
    parser.add_argument("--threads", default=None, help="worker threads, or 'auto'")
    parser.add_argument("--width-cap", type=int, default=None, help="largest width for matrix builds")
    parser.add_argument("--census-cap", type=int, default=None, help="largest vertex count for the census")
    parser.add_argument("--dense-cap", type=int, default=None, help="largest dimension for dense powers")
    parser.add_argument("--cache-dir", default=None, help="matrix cache directory")
    parser.add_argument("--no-cache", action="store_true", help="neither read nor write the matrix cache")
    parser.add_argument("--log-dir", default=None, help="directory for log files")
    parser.add_argument("--verbose", action="store_true", help="mirror log events to stderr")
    parser.add_argument("--timing", action="store_true", help="include elapsed seconds in JSON output")


def _add_grid(parser: argparse.ArgumentParser):
    parser.add_argument("--family", required=True, choices=[f.value for f in GridFamily])
    parser.add_argument("--m", type=int, required=True)
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--p", type=int, default=None, help="twist (tg and kb only)")


def build_parser() -> argparse.ArgumentParser:
    parser = GridFactorArgumentParser(prog="gridfactor", description="Exact 2-factor counts on width-m grid graphs")
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=GridFactorArgumentParser)
    kinds = [k.value for k in ColumnKind]

    matrix = commands.add_parser("matrix", parents=[common], help="build and print a transfer matrix")
    matrix.add_argument("--m", type=int, required=True)
    matrix.add_argument("--kind", choices=kinds, required=True)
    matrix.add_argument("--out", default=None, help="write to this file instead of stdout")

    structure = commands.add_parser("structure", parents=[common], help="component structure report")
    structure.add_argument("--m", type=int, required=True)
    structure.add_argument("--kind", choices=kinds, required=True)

    count = commands.add_parser("count", parents=[common], help="exact 2-factor count")
    _add_grid(count)
    count.add_argument("--strategy", choices=STRATEGIES, default="auto")
    count.add_argument("--modulus", type=int, default=None, help="reduce modulo this value (not exact)")

    oracle = commands.add_parser("oracle", parents=[common], help="brute-force census")
    _add_grid(oracle)
    oracle.add_argument("--histogram", action="store_true", help="split the total by number of cycles")
    oracle.add_argument("--compare", action="store_true", help="also compute the formula count and compare")

    decode_cmd = commands.add_parser("decode", parents=[common], help="validate and decode a code matrix")
    _add_grid(decode_cmd)
    decode_cmd.add_argument("--columns", required=True, help='column words, e.g. "bfdb cabb dfac"')

    verify = commands.add_parser("verify", parents=[common], help="run the invariant suite")
    verify.add_argument("--m-max", type=int, required=True)
    verify.add_argument("--kind", choices=kinds, default=None)
    verify.add_argument("--report-dir", default=None, help="write one structure report per width and kind")
    verify.add_argument("--no-differentials", action="store_true", help="skip the census comparisons")

    sweep = commands.add_parser("sweep", parents=[common], help="count table over ranges of m and n")
    sweep.add_argument("--families", default=",".join(f.value for f in GridFamily))
    sweep.add_argument("--m-min", type=int, default=2)
    sweep.add_argument("--m-max", type=int, required=True)
    sweep.add_argument("--n-min", type=int, default=1)
    sweep.add_argument("--n-max", type=int, required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig.from_env(
        output=args.output,
        threads=args.threads,
        width_cap=args.width_cap,
        census_vertex_cap=args.census_cap,
        dense_dim_cap=args.dense_cap,
        cache_dir=Path(args.cache_dir) if args.cache_dir else None,
        use_cache=False if args.no_cache else None,
        log_dir=args.log_dir,
        verbose=args.verbose or None,
        timing=args.timing or None,
    )


def run_command(app: GridFactorApplication, args: argparse.Namespace):
    if args.command == "matrix":
        return app.matrix(args.m, args.kind, args.out)
    if args.command == "structure":
        return app.structure(args.m, args.kind)
    if args.command == "count":
        return app.count(args.family, args.m, args.n, args.p, args.strategy, args.modulus)
    if args.command == "oracle":
        return app.oracle_census(args.family, args.m, args.n, args.p, args.histogram, args.compare)
    if args.command == "decode":
        return app.decode_code(args.family, args.m, args.n, args.columns, args.p)
    if args.command == "verify":
        return app.verify(args.m_max, args.kind, args.report_dir, not args.no_differentials)
    if args.command == "sweep":
        families = [name.strip() for name in args.families.split(",") if name.strip()]
        return app.sweep(families, args.m_min, args.m_max, args.n_min, args.n_max)
    raise InvalidArgumentError(f"Unknown command {args.command!r}")


def main(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None) -> int:
    """Main application entry point; returns the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_BAD_ARGUMENTS

    try:
        config = config_from_args(args)
    except GridFactorError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code

    app = GridFactorApplication(config, stdout)
    try:
        run_command(app, args)
        return EXIT_OK
    except GridFactorError as e:
        print(f"error: {e}", file=sys.stderr)
        if app.logger:
            app.logger.log_error(type(e).__name__, str(e))
        return e.exit_code
    except Exception as e:
        print(f"fatal error: {e}", file=sys.stderr)
        if app.logger:
            app.logger.log_error("UNEXPECTED", str(e), traceback.format_exc())
        return 1
    finally:
        app.shutdown()


if __name__ == "__main__":
    sys.exit(main())
