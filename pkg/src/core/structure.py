#!/usr/bin/env python3
"""
Structure Component
Component decomposition of the quotient transfer digraphs and executable
checks of their structure:

- even width, circular: m/2 + 1 components, one per |Z| value; the Z = 0
  component holds 0^m and 1^m, the others are bipartite into Z > 0 / Z < 0
- odd width, circular: two components split by the parity of Z, mapped onto
  each other by bitwise complement
- linear: floor(m/2) + 1 components split by |Z|; for odd m the word
  (01)^k 0 is isolated

Violations are collected as data. Nothing here raises on a failed check.
"""

import time
import traceback
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import networkx as nx

from core.alphabet import (
    AlphaWord,
    BinaryWord,
    ColumnKind,
    complement_index,
    inlet,
    outlet,
    reverse_index,
    z_value_index,
)
from core.errors import InvalidArgumentError
from core.matrix_store import MatrixStore
from core.run_config import RunConfig
from core.run_logger import EnumerationLogger
from core.transfer import TransferMatrix, build_matrix, excluded_linear_word

Label = Union[int, str]


@dataclass(frozen=True)
class Violation:
    """One failed check with a readable witness"""

    check: str
    message: str
    witness: Optional[str] = None

    def to_dict(self) -> dict:
        payload = {"check": self.check, "message": self.message}
        if self.witness is not None:
            payload["witness"] = self.witness
        return payload


class SpecialRole(Enum):
    QUEEN = "queen"
    COURT_LADY = "court_lady"


@dataclass(frozen=True)
class SpecialWord:
    role: SpecialRole
    m: int
    s: int
    word: BinaryWord


def queen(m: int, s: int) -> SpecialWord:
    """
    Queen word of component s

    Even m: 0^m for s = 0, else (01)^s 0^(m-2s), 1 <= s <= m/2.
    Odd m: (01)^(s-1) 0^(m-2s+2), 1 <= s <= floor(m/2) + 1.
    """
    if m < 1:
        raise InvalidArgumentError(f"Width must be at least 1, got {m}")
    if m % 2 == 0:
        if not 0 <= s <= m // 2:
            raise InvalidArgumentError(f"Queen index s must lie in 0..{m // 2} for m = {m}, got {s}")
        text = "01" * s + "0" * (m - 2 * s)
    else:
        if not 1 <= s <= m // 2 + 1:
            raise InvalidArgumentError(f"Queen index s must lie in 1..{m // 2 + 1} for m = {m}, got {s}")
        text = "01" * (s - 1) + "0" * (m - 2 * s + 2)
    return SpecialWord(SpecialRole.QUEEN, m, s, BinaryWord.parse(text))


def court_lady(m: int, s: int) -> SpecialWord:
    """Court lady word for odd m: (10)^(s+1) 0^(m-2s-2), and (10)^(m//2) 1 for s = m//2"""
    if m < 1 or m % 2 == 0:
        raise InvalidArgumentError(f"Court ladies exist only for odd m, got {m}")
    k = m // 2
    if not 0 <= s <= k:
        raise InvalidArgumentError(f"Court lady index s must lie in 0..{k} for m = {m}, got {s}")
    text = "10" * k + "1" if s == k else "10" * (s + 1) + "0" * (m - 2 * s - 2)
    return SpecialWord(SpecialRole.COURT_LADY, m, s, BinaryWord.parse(text))


def connecting_word(m: int, s: int) -> AlphaWord:
    """
    The circular column f (af)^s a b^(m-2s-2)

    Its inlet is the court lady of index s and its outlet the queen of index
    s + 2, which joins those two words by an arc for odd m.
    """
    if m < 3 or m % 2 == 0:
        raise InvalidArgumentError(f"Connecting words exist for odd m >= 3, got {m}")
    if not 0 <= s <= m // 2 - 1:
        raise InvalidArgumentError(f"Connecting word index s must lie in 0..{m // 2 - 1} for m = {m}, got {s}")
    text = "f" + "af" * s + "a" + "b" * (m - 2 * s - 2)
    return AlphaWord.parse(text, ColumnKind.CIRCULAR)


def support_graph(matrix: TransferMatrix) -> nx.Graph:
    """Undirected support of the matrix; loops kept, isolated words left out"""
    graph = nx.Graph()
    graph.add_nodes_from(matrix.support())
    graph.add_edges_from((v, w) for v, w, _ in matrix.entries())
    return graph


def arc_digraph(matrix: TransferMatrix) -> nx.DiGraph:
    digraph = nx.DiGraph()
    digraph.add_nodes_from(matrix.support())
    digraph.add_edges_from((v, w) for v, w, _ in matrix.entries())
    return digraph


def component_indices(matrix: TransferMatrix) -> List[List[int]]:
    """Components as sorted index lists, largest first, ties by smallest index"""
    parts = [sorted(part) for part in nx.connected_components(support_graph(matrix))]
    parts.sort(key=lambda part: (-len(part), part[0]))
    return parts


def components(matrix: TransferMatrix) -> List[FrozenSet[BinaryWord]]:
    """Connected components of the graph v - w for every nonzero entry (v, w)"""
    return [frozenset(matrix.word_at(v) for v in part) for part in component_indices(matrix)]


def _bipartition_indices(part: Sequence[int], matrix: TransferMatrix) -> Optional[Tuple[List[int], List[int]]]:
    if any(matrix.entry(v, v) for v in part):
        return None
    sub = support_graph(matrix).subgraph(part)
    if not nx.is_bipartite(sub):
        return None
    coloring = nx.bipartite.color(sub)
    top = max(part, key=lambda v: (z_value_index(v, matrix.m), -v))
    red = sorted(v for v in part if coloring[v] == coloring[top])
    green = sorted(v for v in part if coloring[v] != coloring[top])
    return red, green


def bipartition(component, matrix: TransferMatrix) -> Optional[Tuple[FrozenSet[BinaryWord], FrozenSet[BinaryWord]]]:
    """
    Two-colour a component along its arcs

    Returns:
        (class_R, class_G) with class_R the colour class holding the word of
        largest Z, or None if the component has a loop or an odd cycle
    """
    part = sorted(matrix.index_of(v) for v in component)
    split = _bipartition_indices(part, matrix)
    if split is None:
        return None
    red, green = split
    return frozenset(matrix.word_at(v) for v in red), frozenset(matrix.word_at(v) for v in green)


@dataclass
class IsomorphismResult:
    ok: bool
    witness: Dict[str, str] = field(default_factory=dict)
    failure: Optional[str] = None


def complement_isomorphism(matrix: TransferMatrix) -> IsomorphismResult:
    """
    Check that complement maps the component of 1^m onto the component of 0^m
    and preserves every entry (odd circular widths)
    """
    m = matrix.m
    if matrix.kind is not ColumnKind.CIRCULAR or m % 2 == 0:
        raise InvalidArgumentError("The complement isomorphism is checked on odd circular matrices")
    for v, w, mult in matrix.entries():
        image = matrix.entry(complement_index(v, m), complement_index(w, m))
        if image != mult:
            return IsomorphismResult(
                ok=False,
                failure=(f"entry({matrix.word_at(v)},{matrix.word_at(w)}) = {mult} but the complemented "
                         f"entry is {image}"),
            )
    parts = component_indices(matrix)
    ones = (1 << m) - 1
    a_part = next((set(part) for part in parts if ones in part), set())
    n_part = next((set(part) for part in parts if 0 in part), set())
    mapped = {complement_index(v, m) for v in a_part}
    if mapped != n_part:
        return IsomorphismResult(ok=False, failure="complement does not map the 1^m component onto the 0^m component")
    witness = {str(matrix.word_at(v)): str(matrix.word_at(complement_index(v, m))) for v in sorted(a_part)}
    return IsomorphismResult(ok=True, witness=witness)


@dataclass
class ComponentInfo:
    vertices: List[int]
    s_label: Label
    contains: List[str]
    bipartition: Optional[Tuple[List[int], List[int]]]
    strongly_connected: bool

    @property
    def size(self) -> int:
        return len(self.vertices)

    def to_dict(self, m: int) -> dict:
        def word(v: int) -> str:
            return str(BinaryWord.from_index(v, m))

        return {
            "size": self.size,
            "s_label": self.s_label,
            "contains": self.contains,
            "strongly_connected": self.strongly_connected,
            "vertices": [word(v) for v in self.vertices],
            "bipartition": None if self.bipartition is None else {
                "red": [word(v) for v in self.bipartition[0]],
                "green": [word(v) for v in self.bipartition[1]],
            },
        }


@dataclass
class StructureReport:
    """Component decomposition of one quotient digraph and every violated check"""

    m: int
    kind: ColumnKind
    components: List[ComponentInfo]
    violations: List[Violation] = field(default_factory=list)
    isomorphism_witness: Optional[Dict[str, str]] = None

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def sizes(self) -> List[int]:
        return [component.size for component in self.components]

    def component(self, label: Label) -> Optional[ComponentInfo]:
        return next((c for c in self.components if c.s_label == label), None)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "kind": self.kind.value,
            "ok": self.ok,
            "components": [component.to_dict(self.m) for component in self.components],
            "isomorphism_witness": self.isomorphism_witness,
            "violations": [violation.to_dict() for violation in self.violations],
        }


def _label_order(label: Label) -> Tuple[int, int]:
    if label == "A":
        return 0, 0
    if label == "N":
        return 2, 0
    if isinstance(label, int):
        return 1, label
    return 3, 0


def expected_sizes(m: int, kind: Union[str, ColumnKind]) -> Dict[Label, int]:
    """Component sizes by label for a width and kind"""
    kind = ColumnKind.parse(kind)
    if kind is ColumnKind.CIRCULAR and m % 2 == 1:
        return {"A": 2 ** (m - 1), "N": 2 ** (m - 1)}
    if m % 2 == 0:
        sizes: Dict[Label, int] = {"A": comb(m, m // 2)}
        sizes.update({s: 2 * comb(m, m // 2 - s) for s in range(1, m // 2 + 1)})
        return sizes
    sizes = {"A": comb(m, (m - 1) // 2)}
    sizes.update({s: comb(m + 1, (m + 1) // 2 - s) for s in range(1, m // 2 + 1)})
    return sizes


class _Checker:
    def __init__(self, matrix: TransferMatrix):
        self.matrix = matrix
        self.m = matrix.m
        self.kind = matrix.kind
        self.violations: List[Violation] = []
        self.z = [z_value_index(v, self.m) for v in range(matrix.dim)]

    def word(self, v: int) -> str:
        return str(self.matrix.word_at(v))

    def fail(self, check: str, message: str, witness: Optional[str] = None):
        self.violations.append(Violation(check, message, witness))


def _label_components(checker: _Checker, parts: List[List[int]]) -> List[Label]:
    m = checker.m
    ones = (1 << m) - 1
    labels: List[Label] = []
    odd_circular = checker.kind is ColumnKind.CIRCULAR and m % 2 == 1
    for part in parts:
        if odd_circular:
            parities = {checker.z[v] % 2 for v in part}
            label: Label = "A" if ones in part else "N" if 0 in part else "?"
            wanted = 0 if label == "A" else 1
            if parities != {wanted}:
                odd_one = next(v for v in part if checker.z[v] % 2 != wanted)
                checker.fail("z-parity", f"component {label} mixes Z parities", checker.word(odd_one))
        else:
            levels = {abs(checker.z[v]) for v in part}
            if len(levels) == 1:
                s = levels.pop()
                label = "A" if s == 0 else s
            else:
                label = "?"
                checker.fail("z-classes", f"component mixes |Z| values {sorted(levels)}",
                             ",".join(checker.word(v) for v in part[:4]))
        labels.append(label)
    seen = [label for label in labels if label != "?"]
    if len(seen) != len(set(seen)):
        checker.fail("z-classes", f"two components share a label: {labels}")
    return labels


def _check_partition(checker: _Checker, parts: List[List[int]]):
    matrix, m = checker.matrix, checker.m
    covered = sum(len(part) for part in parts)
    excluded = excluded_linear_word(m) if checker.kind is ColumnKind.LINEAR else None
    expected_isolated = [excluded.index] if excluded is not None else []
    if matrix.isolated() != expected_isolated:
        checker.fail("isolated-words", f"isolated words {[checker.word(v) for v in matrix.isolated()]}, "
                                       f"expected {[checker.word(v) for v in expected_isolated]}")
    if covered != matrix.dim - len(expected_isolated):
        checker.fail("partition", f"components cover {covered} words, expected {matrix.dim - len(expected_isolated)}")
    expected_count = 2 if checker.kind is ColumnKind.CIRCULAR and m % 2 == 1 else m // 2 + 1
    if len(parts) != expected_count:
        checker.fail("component-count", f"{len(parts)} components, expected {expected_count}")


def _check_sizes(checker: _Checker, infos: List[ComponentInfo]):
    expected = expected_sizes(checker.m, checker.kind)
    actual = {info.s_label: info.size for info in infos}
    for label, size in expected.items():
        if actual.get(label) != size:
            checker.fail("component-size", f"component {label} has size {actual.get(label)}, expected {size}")
    if checker.kind is ColumnKind.LINEAR:
        b_sizes = [actual.get(s, 0) for s in range(1, checker.m // 2 + 1)]
        if any(a < b for a, b in zip(b_sizes, b_sizes[1:])):
            checker.fail("component-size", f"B component sizes {b_sizes} increase with s")


def _check_anchors(checker: _Checker, infos: List[ComponentInfo]):
    m = checker.m
    a_info = next((info for info in infos if info.s_label == "A"), None)
    if a_info is None:
        checker.fail("anchors", "no component is labelled A")
        return
    if "1^m" not in a_info.contains:
        checker.fail("anchors", "component A does not contain 1^m")
    if checker.kind is ColumnKind.CIRCULAR:
        if m % 2 == 0 and "0^m" not in a_info.contains:
            checker.fail("anchors", "component A does not contain 0^m")
        if m % 2 == 1:
            n_info = next((info for info in infos if info.s_label == "N"), None)
            if n_info is None or "0^m" not in n_info.contains:
                checker.fail("anchors", "no component N contains 0^m")


def _check_bipartite(checker: _Checker, infos: List[ComponentInfo]):
    m = checker.m
    for info in infos:
        if not isinstance(info.s_label, int):
            continue
        if info.bipartition is None:
            checker.fail("bipartite", f"component B({info.s_label}) is not bipartite")
            continue
        red, green = info.bipartition
        if any(checker.z[v] <= 0 for v in red) or any(checker.z[v] >= 0 for v in green):
            checker.fail("bipartite", f"classes of B({info.s_label}) do not follow the sign of Z",
                         f"red={[checker.word(v) for v in red[:4]]} green={[checker.word(v) for v in green[:4]]}")
        same_class_wanted = checker.kind is ColumnKind.LINEAR and m % 2 == 1
        red_set = set(red)
        for v in info.vertices:
            same = (v in red_set) == (reverse_index(v, m) in red_set)
            if same != same_class_wanted:
                checker.fail("bar-classes",
                             f"word and its reversal {'share' if same else 'split'} classes in B({info.s_label})",
                             checker.word(v))
                break


def _check_bar_rule(checker: _Checker, parts: List[List[int]]):
    owner = {v: k for k, part in enumerate(parts) for v in part}
    for v, k in owner.items():
        if owner.get(reverse_index(v, checker.m)) != k:
            checker.fail("bar-component", "word and its reversal lie in different components", checker.word(v))
            return


def _check_parity(checker: _Checker):
    for v, w, _ in checker.matrix.entries():
        if bin(v).count("1") % 2 != bin(w).count("1") % 2:
            checker.fail("popcount-parity", "entry joins words of different weight parity",
                         f"{checker.word(v)}->{checker.word(w)}")
            return


def _check_queens(checker: _Checker, parts: List[List[int]]):
    m = checker.m
    owner = {v: k for k, part in enumerate(parts) for v in part}
    queens = [queen(m, s) for s in range(0, m // 2 + 1)]
    for first in queens:
        for second in queens:
            if first.s < second.s and (second.s - first.s) % 2 == 0:
                if owner.get(first.word.index) == owner.get(second.word.index):
                    checker.fail("queens", f"queens {first.s} and {second.s} share a component",
                                 f"{first.word},{second.word}")


def _check_connecting_arcs(checker: _Checker):
    m = checker.m
    for s in range(0, m // 2):
        word = connecting_word(m, s)
        lady, target = court_lady(m, s).word, queen(m, s + 2).word
        if inlet(word) != lady or outlet(word) != target:
            checker.fail("connecting-word", f"connecting word {word} has inlet {inlet(word)} and "
                                            f"outlet {outlet(word)}, expected {lady} and {target}")
        elif checker.matrix.entry(lady, target) == 0:
            checker.fail("connecting-word", f"no arc from {lady} to {target}", str(word))


def verify_matrix(matrix: TransferMatrix) -> StructureReport:
    """Run every structure check on a built matrix"""
    checker = _Checker(matrix)
    m = matrix.m
    parts = component_indices(matrix)
    labels = _label_components(checker, parts)
    arcs = arc_digraph(matrix)
    ones = (1 << m) - 1

    infos = []
    for part, label in zip(parts, labels):
        contains = [name for name, v in (("0^m", 0), ("1^m", ones)) if v in part]
        strongly = nx.is_strongly_connected(arcs.subgraph(part))
        if not strongly:
            checker.fail("strong-connectivity", f"component {label} is not strongly connected",
                         checker.word(part[0]))
        split = _bipartition_indices(part, matrix) if isinstance(label, int) else None
        infos.append(ComponentInfo(part, label, contains, split, strongly))
    infos.sort(key=lambda info: (_label_order(info.s_label), info.vertices[0]))

    _check_partition(checker, parts)
    _check_sizes(checker, infos)
    _check_anchors(checker, infos)
    _check_bipartite(checker, infos)
    _check_bar_rule(checker, parts)
    _check_parity(checker)

    witness = None
    if matrix.kind is ColumnKind.CIRCULAR:
        if m % 2 == 0:
            _check_queens(checker, parts)
        else:
            _check_connecting_arcs(checker)
            result = complement_isomorphism(matrix)
            if result.ok:
                witness = result.witness
            else:
                checker.fail("complement-isomorphism", result.failure)

    return StructureReport(m, matrix.kind, infos, checker.violations, witness)


def verify_structure(m: int, kind: Union[str, ColumnKind], matrix: Optional[TransferMatrix] = None,
                     width_cap: Optional[int] = 14) -> StructureReport:
    """
    Build (or take) the matrix for (m, kind) and check its component structure

    Raises:
        InvalidArgumentError: if a supplied matrix has another width or kind
        ResourceLimitError: if m exceeds width_cap
    """
    kind = ColumnKind.parse(kind)
    if matrix is None:
        matrix = build_matrix(m, kind, width_cap=width_cap)
    elif matrix.m != m or matrix.kind is not kind:
        raise InvalidArgumentError(f"Matrix is width {matrix.m} {matrix.kind.value}, expected {m} {kind.value}")
    return verify_matrix(matrix)


class StructureVerifier:
    """
    Structure checks over matrices supplied by a MatrixStore, with logging
    """

    def __init__(self, config: Optional[RunConfig] = None, logger: Optional[EnumerationLogger] = None,
                 store: Optional[MatrixStore] = None):
        self.config = config or RunConfig()
        self.logger = logger
        self.store = store or MatrixStore(self.config, logger)

    def verify(self, m: int, kind: Union[str, ColumnKind]) -> StructureReport:
        started = time.perf_counter()
        try:
            report = verify_matrix(self.store.get(m, kind))
        except Exception as e:
            if self.logger:
                self.logger.log_error("STRUCTURE", f"m={m} kind={kind}: {e}", traceback.format_exc())
            raise
        if self.logger:
            self.logger.log_computation(
                "STRUCTURE",
                f"m={m} kind={report.kind.value} sizes={report.sizes} "
                f"({time.perf_counter() - started:.3f}s)",
                "SUCCESS" if report.ok else "VIOLATION",
            )
        return report
