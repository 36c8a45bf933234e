#!/usr/bin/env python3
"""
Counting Component
Exact 2-factor counts for the six grid families from powers of the transfer
matrix M of the family's column kind:

    RG, TnC   (M^n)[0^m, 0^m]
    TkC       sum over v of (M^n)[v, v]
    MS        sum over v of (M^n)[bar(v), v]
    TG(p)     sum over v of (M^n)[rho^p(v), v]
    KB(p)     sum over v of (M^n)[bar(rho^p(v)), v]

A closing condition pairs the outlet word of the last column with the inlet
word of the first one through a bijection pi. Summing over all pairs (u, v)
with u = pi(v) collapses to a single sum over v, which is what pairing_sum
evaluates.
"""

import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Tuple

import numpy as np

from core.alphabet import BinaryWord, bar_binary, rho
from core.errors import InvalidArgumentError, ResourceLimitError
from core.grid_spec import GridFamily, GridSpec
from core.matrix_store import MatrixStore
from core.run_config import RunConfig
from core.run_logger import EnumerationLogger
from core.transfer import TransferMatrix

Pairing = Callable[[BinaryWord], BinaryWord]

STRATEGIES = ("auto", "dense", "matvec")
DENSE_METHOD = "dense-power"
MATVEC_METHOD = "matvec"

# object-dtype dense products cost dim^3 Python multiplications
_OBJECT_DENSE_DIM = 128
_INT64_LIMIT = 2 ** 63


def identity_pairing(v: BinaryWord) -> BinaryWord:
    return v


def bar_pairing(v: BinaryWord) -> BinaryWord:
    return bar_binary(v)


def rho_pairing(p: int) -> Pairing:
    def pairing(v: BinaryWord) -> BinaryWord:
        return rho(v, p)

    return pairing


def bar_rho_pairing(p: int) -> Pairing:
    def pairing(v: BinaryWord) -> BinaryWord:
        return bar_binary(rho(v, p))

    return pairing


def pairing_for(spec: GridSpec) -> Optional[Pairing]:
    """The closing bijection of a wrapped family, or None for RG and TnC"""
    family = spec.family
    if family is GridFamily.TKC:
        return identity_pairing
    if family is GridFamily.MS:
        return bar_pairing
    if family is GridFamily.TG:
        return rho_pairing(spec.p)
    if family is GridFamily.KB:
        return bar_rho_pairing(spec.p)
    return None


def closing_pairings(m: int) -> List[Tuple[str, Pairing]]:
    """The closing bijections the wrapped families of width m use, labelled by family"""
    pairings: List[Tuple[str, Pairing]] = [("tkc", identity_pairing), ("ms", bar_pairing)]
    pairings += [(f"tg p={p}", rho_pairing(p)) for p in range(1, m)]
    pairings += [(f"kb p={p}", bar_rho_pairing(p)) for p in range(1, m)]
    return pairings


def _permutation(matrix: TransferMatrix, pairing: Pairing) -> List[int]:
    perm = [matrix.index_of(pairing(matrix.word_at(v))) for v in range(matrix.dim)]
    if len(set(perm)) != matrix.dim:
        raise InvalidArgumentError("Pairing is not a bijection on binary words")
    return perm


def _int64_safe(matrix: TransferMatrix, n: int) -> bool:
    return matrix.max_row_sum() ** max(n, 1) < _INT64_LIMIT


def dense_power(matrix: TransferMatrix, n: int, dim_cap: Optional[int] = 1024,
                modulus: Optional[int] = None) -> np.ndarray:
    """
    M^n by binary exponentiation

    int64 is used when every entry of every partial power is below 2^63
    (entries of M^k never exceed (max row sum)^k); otherwise exact Python
    integers in an object array.
    """
    if n < 0:
        raise InvalidArgumentError(f"Power must be nonnegative, got {n}")
    dtype = np.int64 if modulus is None and _int64_safe(matrix, n) else object
    base = matrix.dense(dim_cap=dim_cap, dtype=dtype)
    result = np.identity(matrix.dim, dtype=dtype)

    def reduce(array: np.ndarray) -> np.ndarray:
        return array % modulus if modulus is not None else array

    while n:
        if n & 1:
            result = reduce(np.dot(result, base))
        n >>= 1
        if n:
            base = reduce(np.dot(base, base))
    return result


def _step(rows, vector: Dict[int, int], modulus: Optional[int] = None) -> Dict[int, int]:
    nxt: Dict[int, int] = {}
    for row, weight in vector.items():
        for col, mult in rows.get(row, {}).items():
            nxt[col] = nxt.get(col, 0) + weight * mult
    if modulus is not None:
        nxt = {col: value % modulus for col, value in nxt.items() if value % modulus}
    return nxt


def _chain(matrix: TransferMatrix, start: int, n: int, modulus: Optional[int] = None) -> Dict[int, int]:
    """Row vector e_start * M^n as a sparse map"""
    vector = {start: 1}
    for _ in range(n):
        vector = _step(matrix.rows, vector, modulus)
        if not vector:
            break
    return vector


def sparse_powers(matrix: TransferMatrix, lengths: Iterable[int]) -> Iterator[Tuple[int, Dict[int, Dict[int, int]]]]:
    """
    Rows of M^n for each requested n, as sparse maps, by repeated products with M

    Lengths are visited in increasing order; each power is one step from the
    previous one.
    """
    powers = {v: {v: 1} for v in range(matrix.dim)}
    current = 0
    for n in sorted(set(lengths)):
        if n < 0:
            raise InvalidArgumentError(f"Power must be nonnegative, got {n}")
        while current < n:
            powers = {v: _step(matrix.rows, vector) for v, vector in powers.items()}
            current += 1
        yield n, powers


def power_entry(matrix: TransferMatrix, n: int, v, w, modulus: Optional[int] = None) -> int:
    """(M^n)[v, w] from a single sparse chain"""
    return _chain(matrix, matrix.index_of(v), n, modulus).get(matrix.index_of(w), 0)


def choose_strategy(matrix: TransferMatrix, n: int, strategy: str = "auto",
                    dense_dim_cap: int = 1024, modulus: Optional[int] = None) -> str:
    if strategy not in STRATEGIES:
        raise InvalidArgumentError(f"Unknown strategy {strategy!r} (expected one of {STRATEGIES})")
    if strategy == "dense":
        if matrix.dim > dense_dim_cap:
            raise ResourceLimitError(f"Dense power of dimension {matrix.dim} exceeds the cap {dense_dim_cap}")
        return DENSE_METHOD
    if strategy == "matvec":
        return MATVEC_METHOD
    if matrix.dim > dense_dim_cap:
        return MATVEC_METHOD
    if modulus is None and _int64_safe(matrix, n):
        return DENSE_METHOD
    return DENSE_METHOD if matrix.dim <= _OBJECT_DENSE_DIM else MATVEC_METHOD


def pairing_sum(
    matrix: TransferMatrix,
    n: int,
    pairing: Pairing,
    strategy: str = "auto",
    dense_dim_cap: int = 1024,
    threads: int = 1,
    modulus: Optional[int] = None,
) -> int:
    """
    Sum over all words v of (M^n)[pairing(v), v]

    Args:
        matrix: Transfer matrix M
        n: Power (number of columns)
        pairing: Bijection on binary words of the matrix width
        strategy: "dense" (one binary-exponentiation power), "matvec" (one
            sparse chain per start word) or "auto"
        dense_dim_cap: Largest dimension the dense strategy may materialize
        threads: Workers for the matvec chains
        modulus: Reduce modulo this value (the result is then not the exact count)

    Returns:
        The sum as an exact Python integer
    """
    return _pairing_sum(matrix, n, pairing, strategy, dense_dim_cap, threads, modulus)[0]


def _pairing_sum(matrix, n, pairing, strategy, dense_dim_cap, threads, modulus):
    perm = _permutation(matrix, pairing)
    method = choose_strategy(matrix, n, strategy, dense_dim_cap, modulus)
    if method == DENSE_METHOD:
        power = dense_power(matrix, n, dim_cap=dense_dim_cap, modulus=modulus)
        total = sum(int(power[perm[v], v]) for v in range(matrix.dim))
    else:
        active = set(matrix.rows) if n > 0 else set(range(matrix.dim))
        targets = [v for v in range(matrix.dim) if perm[v] in active]

        def term(v: int) -> int:
            return _chain(matrix, perm[v], n, modulus).get(v, 0)

        if threads > 1 and len(targets) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                terms = list(pool.map(term, targets))
        else:
            terms = [term(v) for v in targets]
        total = sum(terms)
    if modulus is not None:
        total %= modulus
    return total, method


@dataclass(frozen=True)
class CountResult:
    """
    One count together with how it was obtained

    degenerate marks specs whose grid has loops or parallel edges: the count is
    the formula value and has no simple-graph reading.
    """

    spec: GridSpec
    count: int
    method: str
    exact: bool = True
    modulus: Optional[int] = None
    degenerate: Optional[str] = None
    elapsed_seconds: Optional[float] = None

    def to_dict(self, include_timing: bool = False) -> dict:
        payload = {"spec": self.spec.to_dict(), "count": str(self.count), "method": self.method}
        if not self.exact:
            payload["exact"] = False
            payload["modulus"] = str(self.modulus)
        if self.degenerate:
            payload["note"] = "formula-value; no simple-graph interpretation"
            payload["degenerate_reason"] = self.degenerate
        if include_timing and self.elapsed_seconds is not None:
            payload["elapsed_seconds"] = round(self.elapsed_seconds, 6)
        return payload


class TwoFactorCounter:
    """
    Counts 2-factors of grid graphs through the transfer matrices of a MatrixStore
    """

    def __init__(self, config: Optional[RunConfig] = None, logger: Optional[EnumerationLogger] = None,
                 store: Optional[MatrixStore] = None):
        self.config = config or RunConfig()
        self.logger = logger
        self.store = store or MatrixStore(self.config, logger)

    def count(self, spec: GridSpec, strategy: str = "auto", modulus: Optional[int] = None) -> CountResult:
        """
        Count the 2-factors of one grid

        Raises:
            ResourceLimitError: width above the cap
            InvalidArgumentError: unknown strategy or non-positive modulus
        """
        if modulus is not None and modulus < 1:
            raise InvalidArgumentError(f"Modulus must be positive, got {modulus}")
        started = time.perf_counter()
        try:
            matrix = self.store.get(spec.m, spec.kind)
            pairing = pairing_for(spec)
            if pairing is None:
                method = choose_strategy(matrix, spec.n, strategy, self.config.dense_dim_cap, modulus)
                if method == DENSE_METHOD:
                    power = dense_power(matrix, spec.n, self.config.dense_dim_cap, modulus)
                    value = int(power[0, 0])
                else:
                    value = power_entry(matrix, spec.n, 0, 0, modulus)
                if modulus is not None:
                    value %= modulus
            else:
                value, method = _pairing_sum(matrix, spec.n, pairing, strategy, self.config.dense_dim_cap,
                                             self.config.resolved_threads(), modulus)
        except Exception as e:
            if self.logger:
                self.logger.log_error("COUNT", f"{spec}: {e}", traceback.format_exc())
            raise

        result = CountResult(
            spec=spec,
            count=value,
            method=method,
            exact=modulus is None,
            modulus=modulus,
            degenerate=spec.simple_graph_problem(),
            elapsed_seconds=time.perf_counter() - started,
        )
        if self.logger:
            self.logger.log_computation("COUNT", f"{spec} = {value} via {method}")
        return result


def count(spec: GridSpec, config: Optional[RunConfig] = None) -> int:
    """Exact number of 2-factors of the grid described by spec"""
    return TwoFactorCounter(config).count(spec).count
