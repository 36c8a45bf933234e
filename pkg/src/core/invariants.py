#!/usr/bin/env python3
"""
Invariant Suite Component
Matrix-level algebraic checks, independent entry recomputation, and
count-versus-census differentials, gathered into the suite the verify
command runs.
"""

import time
import traceback
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from core.alphabet import (
    ColumnKind,
    complement_index,
    reverse_index,
    rho_index,
)
from core.counting import Pairing, TwoFactorCounter, closing_pairings, dense_power, sparse_powers
from core.errors import GridFactorError, MatrixIntegrityError
from core.grid_spec import GridFamily, GridSpec
from core.matrix_store import MatrixStore
from core.oracle import OracleCensus
from core.run_config import RunConfig
from core.run_logger import EnumerationLogger
from core.structure import StructureReport, Violation, verify_matrix
from core.transfer import (
    TransferMatrix,
    enumerate_columns,
    expected_column_count,
    linear_embeds_in_circular,
    multiplicity,
)

MULTIPLICITY_CHECK_MAX_M = 8
ENUMERATION_CHECK_MAX_M = 10
STRATEGY_CHECK_MAX_M = 8
STRATEGY_CHECK_LENGTHS = (1, 2, 3, 4, 5, 6)
DIFFERENTIAL_MAX_M = 4


def check_matrix(matrix: TransferMatrix) -> List[Violation]:
    """Symmetry, entry ranges, total mass, the entry-2 rule and the word symmetries"""
    m, kind = matrix.m, matrix.kind
    circular = kind is ColumnKind.CIRCULAR
    violations: List[Violation] = []
    tag = f"m={m} {kind.value}"

    def word(v: int) -> str:
        return str(matrix.word_at(v))

    allowed = {1, 2} if circular else {1}
    for v, w, mult in matrix.entries():
        if mult not in allowed:
            violations.append(Violation("entry-range", f"{tag}: entry {mult} outside {sorted(allowed)}",
                                        f"{word(v)},{word(w)}"))
            break
    if not matrix.is_symmetric():
        violations.append(Violation("symmetry", f"{tag}: matrix is not symmetric"))

    expected = expected_column_count(m, kind)
    if matrix.total_mass() != expected:
        violations.append(Violation("column-count", f"{tag}: total entry mass {matrix.total_mass()}, "
                                                    f"expected {expected}"))

    for v, w, mult in matrix.entries():
        doubled = circular and m % 2 == 0 and w == complement_index(v, m)
        if (mult == 2) != doubled:
            violations.append(Violation("entry-two", f"{tag}: entry {mult} breaks the rule for doubled entries",
                                        f"{word(v)},{word(w)}"))
            break

    for v, w, mult in matrix.entries():
        if matrix.entry(reverse_index(w, m), reverse_index(v, m)) != mult:
            violations.append(Violation("bar-equivariance", f"{tag}: entry changes under reversal",
                                        f"{word(v)},{word(w)}"))
            break

    if circular:
        for v, w, mult in matrix.entries():
            if matrix.entry(rho_index(v, m), rho_index(w, m)) != mult:
                violations.append(Violation("rotation-equivariance", f"{tag}: entry changes under rotation",
                                            f"{word(v)},{word(w)}"))
                break
    return violations


def check_multiplicity(matrix: TransferMatrix) -> List[Violation]:
    """Recompute every entry by up/down propagation and compare"""
    for v in range(matrix.dim):
        row = matrix.row(v)
        for w in range(matrix.dim):
            recomputed = multiplicity(matrix.word_at(v), matrix.word_at(w), matrix.kind)
            if recomputed != row.get(w, 0):
                return [Violation("multiplicity", f"m={matrix.m} {matrix.kind.value}: propagation gives "
                                                  f"{recomputed}, enumeration {row.get(w, 0)}",
                                  f"{matrix.word_at(v)},{matrix.word_at(w)}")]
    return []


def check_enumeration(m: int, kind: Union[str, ColumnKind]) -> List[Violation]:
    kind = ColumnKind.parse(kind)
    produced = sum(1 for _ in enumerate_columns(m, kind))
    expected = expected_column_count(m, kind)
    if produced != expected:
        return [Violation("column-count", f"m={m} {kind.value}: enumerated {produced} columns, expected {expected}")]
    return []


def check_linear_embedding(linear: TransferMatrix, circular: TransferMatrix) -> List[Violation]:
    offending = linear_embeds_in_circular(linear, circular)
    if offending is None:
        return []
    v, w = offending
    return [Violation("linear-embedding", f"m={linear.m}: linear entry {linear.entry(v, w)} exceeds circular "
                                          f"entry {circular.entry(v, w)}",
                      f"{linear.word_at(v)},{linear.word_at(w)}")]


def check_strategies(matrix: TransferMatrix, lengths: Iterable[int] = STRATEGY_CHECK_LENGTHS,
                     pairings: Optional[Sequence[Tuple[str, Pairing]]] = None) -> List[Violation]:
    """Dense binary-exponentiation powers against sparse row products, for every closing pairing"""
    pairings = closing_pairings(matrix.m) if pairings is None else pairings
    perms = [(label, [matrix.index_of(pairing(matrix.word_at(v))) for v in range(matrix.dim)])
             for label, pairing in pairings]
    for n, rows in sparse_powers(matrix, lengths):
        power = dense_power(matrix, n, dim_cap=None)
        for label, perm in perms:
            dense = sum(int(power[perm[v], v]) for v in range(matrix.dim))
            chained = sum(rows[perm[v]].get(v, 0) for v in range(matrix.dim))
            if dense != chained:
                return [Violation("strategy-agreement", f"m={matrix.m} {matrix.kind.value} n={n} {label}: "
                                                        f"dense {dense}, sparse {chained}")]
    return []


def differential_specs(m_max: int = DIFFERENTIAL_MAX_M) -> List[GridSpec]:
    """Small grids on which formula counts are compared with the brute-force census"""
    specs: List[GridSpec] = []
    for m in range(2, m_max + 1):
        for n in range(1, 4):
            specs.append(GridSpec(GridFamily.RG, m, n))
        specs.append(GridSpec(GridFamily.TKC, m, 3))
        specs.append(GridSpec(GridFamily.MS, m, 3))
        if m >= 3:
            specs.append(GridSpec(GridFamily.TNC, m, 3))
            for p in range(m):
                specs.append(GridSpec(GridFamily.TG, m, 3, p))
                specs.append(GridSpec(GridFamily.KB, m, 3, p))
    return specs


@dataclass
class Differential:
    spec: GridSpec
    formula: int
    census: int

    @property
    def agrees(self) -> bool:
        return self.formula == self.census

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(), "formula": str(self.formula), "census": str(self.census)}


def check_differentials(counter: TwoFactorCounter, oracle: OracleCensus,
                        specs: Sequence[GridSpec]) -> Tuple[List[Differential], List[Violation]]:
    results, violations = [], []
    for spec in specs:
        differential = Differential(spec, counter.count(spec).count, oracle.run(spec).total)
        results.append(differential)
        if not differential.agrees:
            violations.append(Violation("differential", f"{spec}: formula {differential.formula}, "
                                                        f"census {differential.census}"))
    return results, violations


@dataclass
class VerificationOutcome:
    """Everything the verify command reports"""

    m_max: int
    kinds: List[ColumnKind]
    reports: List[StructureReport] = field(default_factory=list)
    differentials: List[Differential] = field(default_factory=list)
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and all(report.ok for report in self.reports)

    def all_violations(self) -> List[Violation]:
        collected = list(self.violations)
        for report in self.reports:
            collected.extend(report.violations)
        return collected

    def to_dict(self) -> dict:
        return {
            "m_max": self.m_max,
            "kinds": [kind.value for kind in self.kinds],
            "ok": self.ok,
            "structure": [
                {"m": report.m, "kind": report.kind.value, "sizes": report.sizes, "ok": report.ok}
                for report in self.reports
            ],
            "differentials": [differential.to_dict() for differential in self.differentials],
            "violations": [violation.to_dict() for violation in self.all_violations()],
        }


class VerificationSuite:
    """
    Runs structure reports, matrix invariants and oracle differentials for m = 1..m_max
    """

    def __init__(self, config: Optional[RunConfig] = None, logger: Optional[EnumerationLogger] = None,
                 store: Optional[MatrixStore] = None):
        self.config = config or RunConfig()
        self.logger = logger
        self.store = store or MatrixStore(self.config, logger)
        self.counter = TwoFactorCounter(self.config, logger, self.store)
        self.oracle = OracleCensus(self.config, logger)

    def run(self, m_max: int, kinds: Optional[Sequence[Union[str, ColumnKind]]] = None,
            differentials: bool = True) -> VerificationOutcome:
        kinds = [ColumnKind.parse(kind) for kind in (kinds or (ColumnKind.LINEAR, ColumnKind.CIRCULAR))]
        outcome = VerificationOutcome(m_max, kinds)
        started = time.perf_counter()

        for m in range(1, m_max + 1):
            built: Dict[ColumnKind, TransferMatrix] = {}
            for kind in kinds:
                try:
                    matrix = self.store.get(m, kind)
                except MatrixIntegrityError as e:
                    outcome.violations.append(Violation("matrix-integrity", str(e)))
                    continue
                built[kind] = matrix
                outcome.reports.append(verify_matrix(matrix))
                outcome.violations.extend(check_matrix(matrix))
                if m <= MULTIPLICITY_CHECK_MAX_M:
                    outcome.violations.extend(check_multiplicity(matrix))
                if m <= ENUMERATION_CHECK_MAX_M:
                    outcome.violations.extend(check_enumeration(m, kind))
                if m <= STRATEGY_CHECK_MAX_M:
                    outcome.violations.extend(check_strategies(matrix))
            if len(built) == 2:
                outcome.violations.extend(check_linear_embedding(built[ColumnKind.LINEAR],
                                                                 built[ColumnKind.CIRCULAR]))

        if differentials:
            specs = [spec for spec in differential_specs(min(m_max, DIFFERENTIAL_MAX_M)) if spec.kind in kinds]
            try:
                outcome.differentials, found = check_differentials(self.counter, self.oracle, specs)
                outcome.violations.extend(found)
            except MatrixIntegrityError as e:
                outcome.violations.append(Violation("matrix-integrity", str(e)))
            except GridFactorError as e:
                if self.logger:
                    self.logger.log_error("VERIFY", str(e), traceback.format_exc())
                raise

        if self.logger:
            self.logger.log_computation(
                "VERIFY",
                f"m_max={m_max} kinds={[k.value for k in kinds]} violations={len(outcome.all_violations())} "
                f"({time.perf_counter() - started:.3f}s)",
                "SUCCESS" if outcome.ok else "VIOLATION",
            )
        return outcome
