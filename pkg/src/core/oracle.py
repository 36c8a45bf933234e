#!/usr/bin/env python3
"""
Oracle Component
Builds each grid graph explicitly, enumerates its 2-factors by backtracking
and converts between 2-factors and code matrices in both directions.

Vertices are (row, column) pairs, both 1-based. Every vertex has up to four
ports (up, down, left, right); a code letter records which two ports carry
2-factor edges.
"""

import itertools
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx

from core.alphabet import (
    AlphaWord,
    BinaryWord,
    CodeLetter,
    ColumnKind,
    bar_letter,
    column_violation,
    inlet,
    lr_arc,
    outlet,
)
from core.errors import CodeMatrixError, GridRangeError, InvalidWordError, ResourceLimitError
from core.grid_spec import GridFamily, GridSpec
from core.run_config import RunConfig
from core.run_logger import EnumerationLogger

Vertex = Tuple[int, int]
Edge = Tuple[Vertex, Vertex]

PORTS = ("up", "down", "left", "right")
_OPPOSITE = {"up": "down", "down": "up", "left": "right", "right": "left"}


def wrap_row(spec: GridSpec, i: int) -> int:
    """Row of the first column that row i of the last column is glued to"""
    return _glued_row(spec.family, spec.m, spec.p, i)


def _glued_row(family: GridFamily, m: int, p: Optional[int], i: int) -> int:
    if family is GridFamily.TKC:
        return i
    if family is GridFamily.MS:
        return m - i + 1
    if family is GridFamily.TG:
        return (i - p - 1) % m + 1
    if family is GridFamily.KB:
        return (m + p - i) % m + 1
    raise GridRangeError(f"{family.label} has no closing edges")


@dataclass
class GridGraph:
    """
    An explicit grid graph with port labels on every edge end
    """

    spec: GridSpec
    graph: nx.Graph
    ports: Dict[Vertex, Dict[str, Vertex]]
    order: List[Vertex]

    @property
    def vertex_count(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def edge_count(self) -> int:
        return self.graph.number_of_edges()

    def degrees(self) -> Dict[Vertex, int]:
        return dict(self.graph.degree())

    def is_regular(self, degree: int) -> bool:
        return all(d == degree for _, d in self.graph.degree())


def build_grid(spec: GridSpec) -> GridGraph:
    """
    Build the grid graph of a spec

    Raises:
        GridRangeError: when the requested grid would have loops or parallel edges
    """
    problem = spec.simple_graph_problem()
    if problem:
        raise GridRangeError(problem)

    m, n = spec.m, spec.n
    circular = spec.kind is ColumnKind.CIRCULAR
    links: List[Tuple[Vertex, str, Vertex, str]] = []
    for j in range(1, n + 1):
        for i in range(1, m):
            links.append(((i, j), "down", (i + 1, j), "up"))
        if circular:
            links.append(((m, j), "down", (1, j), "up"))
    for j in range(1, n):
        for i in range(1, m + 1):
            links.append(((i, j), "right", (i, j + 1), "left"))
    if spec.family.wraps:
        for i in range(1, m + 1):
            links.append(((i, n), "right", (wrap_row(spec, i), 1), "left"))

    order = [(i, j) for i in range(1, m + 1) for j in range(1, n + 1)]
    graph = nx.Graph()
    graph.add_nodes_from(order)
    ports: Dict[Vertex, Dict[str, Vertex]] = {v: {} for v in order}
    for u, port_u, v, port_v in links:
        if u == v:
            raise GridRangeError(f"{spec} has a loop at {u}")
        if graph.has_edge(u, v) or port_u in ports[u] or port_v in ports[v]:
            raise GridRangeError(f"{spec} has parallel edges between {u} and {v}")
        graph.add_edge(u, v)
        ports[u][port_u] = v
        ports[v][port_v] = u
    return GridGraph(spec, graph, ports, order)


def _edge(u: Vertex, v: Vertex) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class TwoFactor:
    """A spanning subgraph in which every vertex has degree 2"""

    edges: FrozenSet[Edge]

    @classmethod
    def from_edges(cls, edges) -> "TwoFactor":
        return cls(frozenset(_edge(u, v) for u, v in edges))

    def as_graph(self) -> nx.Graph:
        return nx.Graph(list(self.edges))

    def cycle_count(self) -> int:
        return nx.number_connected_components(self.as_graph())

    def cycle_lengths(self) -> List[int]:
        return sorted(len(c) for c in nx.connected_components(self.as_graph()))

    def is_hamiltonian(self) -> bool:
        return self.cycle_count() == 1


@dataclass(frozen=True)
class CodeMatrix:
    """
    An m x n array of code letters, held column by column (top row first)
    """

    columns: Tuple[Tuple[CodeLetter, ...], ...]

    def __post_init__(self):
        if not self.columns:
            raise InvalidWordError("A code matrix needs at least one column")
        heights = {len(column) for column in self.columns}
        if len(heights) != 1 or 0 in heights:
            raise InvalidWordError(f"Code matrix columns have unequal or zero heights: {sorted(heights)}")

    @classmethod
    def parse(cls, text: Union[str, Sequence[str]]) -> "CodeMatrix":
        """Parse whitespace-separated column words, e.g. "bfdb cabb dfac" """
        words = text.split() if isinstance(text, str) else list(text)
        return cls(tuple(tuple(CodeLetter.from_symbol(ch) for ch in word) for word in words))

    @property
    def m(self) -> int:
        return len(self.columns[0])

    @property
    def n(self) -> int:
        return len(self.columns)

    def letter(self, i: int, j: int) -> CodeLetter:
        """Letter at row i, column j (1-based)"""
        return self.columns[j - 1][i - 1]

    def column_text(self, j: int) -> str:
        return "".join(letter.value for letter in self.columns[j - 1])

    def to_text(self) -> str:
        return " ".join(self.column_text(j) for j in range(1, self.n + 1))

    def __str__(self) -> str:
        return self.to_text()


def closing_column(first: AlphaWord, family: Union[str, GridFamily], p: Optional[int] = None) -> AlphaWord:
    """
    The column the last column must be lr-compatible with, row by row

    TkC uses the first column itself; MS its bar; TG the first column read from
    row r - p at row r; KB the bar-reflected first column read from row m+p+1-r.
    """
    family = GridFamily.parse(family)
    m = first.m
    letters = first.letters
    if family is GridFamily.TKC:
        return first
    if family is GridFamily.MS:
        return AlphaWord(tuple(bar_letter(x) for x in reversed(letters)), first.kind)
    if family in (GridFamily.TG, GridFamily.KB):
        if p is None:
            raise GridRangeError(f"{family.label} needs a twist p")
        virtual = []
        for r in range(1, m + 1):
            letter = letters[_glued_row(family, m, p % m, r) - 1]
            virtual.append(bar_letter(letter) if family is GridFamily.KB else letter)
        return AlphaWord(tuple(virtual), first.kind)
    raise GridRangeError(f"{family.label} has no closing column")


def validate(spec: GridSpec, code: CodeMatrix) -> Tuple[bool, str]:
    """
    Check that a code matrix describes a 2-factor of the grid

    Returns:
        Tuple of (is_valid, message naming the first violated condition)
    """
    if code.m != spec.m or code.n != spec.n:
        return False, f"shape {code.m}x{code.n} does not match {spec} ({spec.m}x{spec.n})"

    for j in range(1, code.n + 1):
        problem = column_violation(code.columns[j - 1], spec.kind)
        if problem is not None:
            return False, f"column condition, column {j} ({code.column_text(j)}): {problem}"

    for j in range(1, code.n):
        for i in range(1, code.m + 1):
            left, right = code.letter(i, j), code.letter(i, j + 1)
            if not lr_arc(left, right):
                return False, f"row condition, row {i} columns {j},{j + 1}: '{left}' cannot sit left of '{right}'"

    if not spec.family.wraps:
        for i in range(1, code.m + 1):
            if code.letter(i, 1).left:
                return False, f"boundary condition, row {i}: '{code.letter(i, 1)}' uses a left edge in column 1"
            if code.letter(i, code.n).right:
                return False, f"boundary condition, row {i}: '{code.letter(i, code.n)}' uses a right edge in column {code.n}"
        return True, "valid"

    first = AlphaWord(code.columns[0], spec.kind)
    target = closing_column(first, spec.family, spec.p)
    for i in range(1, code.m + 1):
        last = code.letter(i, code.n)
        if not lr_arc(last, target.letters[i - 1]):
            return False, (
                f"closing condition, row {i}: '{last}' in column {code.n} cannot precede "
                f"'{target.letters[i - 1]}' of the closing column {target.symbols}"
            )
    return True, "valid"


def decode(spec: GridSpec, code: CodeMatrix, grid: Optional[GridGraph] = None) -> TwoFactor:
    """
    Turn a valid code matrix into its 2-factor

    Raises:
        CodeMatrixError: if validate rejects the matrix
        GridRangeError: if the grid itself is degenerate
    """
    ok, reason = validate(spec, code)
    if not ok:
        raise CodeMatrixError(f"Invalid code matrix for {spec}: {reason}")
    grid = grid or build_grid(spec)
    edges = set()
    for (i, j) in grid.order:
        incidence = code.letter(i, j).incidence
        for port in PORTS:
            if getattr(incidence, port):
                edges.add(_edge((i, j), grid.ports[(i, j)][port]))
    factor = TwoFactor(frozenset(edges))
    degree = dict(factor.as_graph().degree())
    if any(degree.get(v, 0) != 2 for v in grid.order):
        raise CodeMatrixError(f"Code matrix for {spec} does not give every vertex degree 2")
    return factor


def encode(grid: GridGraph, factor: TwoFactor) -> CodeMatrix:
    """
    Read each vertex's two factor edges as a code letter

    Raises:
        CodeMatrixError: if some vertex does not have exactly two factor edges
    """
    m, n = grid.spec.m, grid.spec.n
    columns = []
    for j in range(1, n + 1):
        column = []
        for i in range(1, m + 1):
            ports = grid.ports[(i, j)]
            used = {port: port in ports and _edge((i, j), ports[port]) in factor.edges for port in PORTS}
            try:
                column.append(CodeLetter.from_incidence(used["up"], used["down"], used["left"], used["right"]))
            except InvalidWordError:
                raise CodeMatrixError(f"Vertex {(i, j)} does not have exactly two factor edges")
        columns.append(tuple(column))
    return CodeMatrix(tuple(columns))


def outlet_walk(code: CodeMatrix, kind: Union[str, ColumnKind] = ColumnKind.CIRCULAR) -> List[BinaryWord]:
    """
    Inlet of the first column followed by the outlet of every column

    Consecutive words are joined by a nonzero transfer-matrix entry.
    """
    words = [AlphaWord(column, ColumnKind.parse(kind)) for column in code.columns]
    return [inlet(words[0])] + [outlet(word) for word in words]


class _FactorSearch:
    """
    Backtracking over vertices in row-major order

    At each vertex the edges to earlier vertices are already decided; the search
    picks the missing edges among edges to later vertices with spare degree and
    prunes when a later vertex can no longer reach degree 2.
    """

    def __init__(self, grid: GridGraph):
        self.grid = grid
        self.order = grid.order
        index = {v: k for k, v in enumerate(self.order)}
        self.forward = [sorted(index[w] for w in grid.graph[v] if index[w] > k) for k, v in enumerate(self.order)]
        self.size = len(self.order)
        self.degree = [0] * self.size
        self.open_count = [grid.graph.degree(v) for v in self.order]
        self.partners: List[List[int]] = [[] for _ in range(self.size)]

    def choices(self, k: int) -> List[Tuple[int, ...]]:
        need = 2 - self.degree[k]
        candidates = [w for w in self.forward[k] if self.degree[w] < 2]
        if need < 0 or need > len(candidates):
            return []
        return list(itertools.combinations(candidates, need))

    def _apply(self, k: int, chosen: Tuple[int, ...]) -> bool:
        for w in chosen:
            self.degree[k] += 1
            self.degree[w] += 1
            self.partners[k].append(w)
            self.partners[w].append(k)
        feasible = True
        for w in self.forward[k]:
            self.open_count[w] -= 1
            if self.degree[w] + self.open_count[w] < 2:
                feasible = False
        return feasible

    def _undo(self, k: int, chosen: Tuple[int, ...]):
        for w in self.forward[k]:
            self.open_count[w] += 1
        for w in reversed(chosen):
            self.degree[k] -= 1
            self.degree[w] -= 1
            self.partners[k].pop()
            self.partners[w].pop()

    def walk(self, start: int = 0) -> Iterator[List[List[int]]]:
        """Yield the shared partner lists at every completed factor; copy before keeping them"""
        def step(k: int) -> Iterator[List[List[int]]]:
            if k == self.size:
                yield self.partners
                return
            for chosen in self.choices(k):
                if self._apply(k, chosen):
                    yield from step(k + 1)
                self._undo(k, chosen)

        return step(start)

    def run(self, visit: Callable[[List[List[int]]], None], start: int = 0):
        for partners in self.walk(start):
            visit(partners)

    def run_branch(self, first_choice: Tuple[int, ...], visit: Callable[[List[List[int]]], None]):
        if self._apply(0, first_choice):
            self.run(visit, start=1)
        self._undo(0, first_choice)


def _cycle_count(partners: List[List[int]]) -> int:
    seen = [False] * len(partners)
    cycles = 0
    for start in range(len(partners)):
        if seen[start]:
            continue
        cycles += 1
        previous, current = -1, start
        while not seen[current]:
            seen[current] = True
            a, b = partners[current]
            previous, current = current, (b if a == previous else a)
    return cycles


def _check_vertex_cap(grid: GridGraph, vertex_cap: Optional[int]):
    if vertex_cap is not None and grid.vertex_count > vertex_cap:
        raise ResourceLimitError(
            f"{grid.spec} has {grid.vertex_count} vertices, above the census cap {vertex_cap}"
        )


def enumerate_two_factors(grid: GridGraph, vertex_cap: Optional[int] = 36) -> Iterator[TwoFactor]:
    """
    Every 2-factor of the grid, lazily, in the search's deterministic order

    Raises:
        ResourceLimitError: when the grid has more vertices than vertex_cap
    """
    _check_vertex_cap(grid, vertex_cap)
    order = grid.order
    return (
        TwoFactor(frozenset(_edge(order[k], order[w]) for k, ws in enumerate(partners) for w in ws if k < w))
        for partners in _FactorSearch(grid).walk()
    )


@dataclass
class CensusResult:
    """Number of 2-factors of one grid, split by number of cycles"""

    spec: GridSpec
    total: int = 0
    by_cycle_count: Dict[int, int] = field(default_factory=dict)
    elapsed_seconds: Optional[float] = None

    @property
    def hamiltonian(self) -> int:
        return self.by_cycle_count.get(1, 0)

    def to_dict(self, histogram: bool = False, include_timing: bool = False) -> dict:
        payload = {"spec": self.spec.to_dict(), "total": str(self.total)}
        if histogram:
            payload["by_cycle_count"] = {str(k): str(v) for k, v in sorted(self.by_cycle_count.items())}
            payload["hamiltonian"] = str(self.hamiltonian)
        if include_timing and self.elapsed_seconds is not None:
            payload["elapsed_seconds"] = round(self.elapsed_seconds, 6)
        return payload


def _branch_histogram(grid: GridGraph, first_choice: Optional[Tuple[int, ...]]) -> Dict[int, int]:
    histogram: Dict[int, int] = {}

    def visit(partners: List[List[int]]):
        cycles = _cycle_count(partners)
        histogram[cycles] = histogram.get(cycles, 0) + 1

    search = _FactorSearch(grid)
    if first_choice is None:
        search.run(visit)
    else:
        search.run_branch(first_choice, visit)
    return histogram


def census(grid: GridGraph, vertex_cap: Optional[int] = 36, threads: int = 1) -> CensusResult:
    """
    Count all 2-factors of a grid and histogram them by cycle count

    The search splits on the first vertex's edge choice; branch histograms are
    merged in choice order.

    Raises:
        ResourceLimitError: when the grid has more vertices than vertex_cap
    """
    _check_vertex_cap(grid, vertex_cap)
    branches = _FactorSearch(grid).choices(0) if grid.vertex_count else []
    if threads > 1 and len(branches) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(lambda choice: _branch_histogram(grid, choice), branches))
    else:
        partials = [_branch_histogram(grid, choice) for choice in branches]

    result = CensusResult(grid.spec)
    for partial in partials:
        for cycles, amount in partial.items():
            result.by_cycle_count[cycles] = result.by_cycle_count.get(cycles, 0) + amount
    result.by_cycle_count = dict(sorted(result.by_cycle_count.items()))
    result.total = sum(result.by_cycle_count.values())
    return result


class OracleCensus:
    """
    Brute-force census service: builds grids, enforces the vertex cap, logs runs
    """

    def __init__(self, config: Optional[RunConfig] = None, logger: Optional[EnumerationLogger] = None):
        self.config = config or RunConfig()
        self.logger = logger

    def run(self, spec: GridSpec) -> CensusResult:
        started = time.perf_counter()
        try:
            grid = build_grid(spec)
            result = census(grid, self.config.census_vertex_cap, self.config.resolved_threads())
        except Exception as e:
            if self.logger:
                self.logger.log_error("CENSUS", f"{spec}: {e}", traceback.format_exc())
            raise
        result.elapsed_seconds = time.perf_counter() - started
        if self.logger:
            self.logger.log_computation(
                "CENSUS", f"{spec} total={result.total} hamiltonian={result.hamiltonian}"
            )
        return result
