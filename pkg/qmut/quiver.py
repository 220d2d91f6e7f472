"""

Quivers with real weights: the data model, mutation, structural queries and
canonical forms.

A quiver of rank n is stored as a skew-symmetric n x n matrix b of CycloReal
values sharing one ambient order; b[i][j] > 0 encodes an arrow i -> j of
weight b[i][j]. Vertices are numbered from 0.

"""
from fractions import Fraction
from functools import reduce
import itertools
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import networkx as nx

from .config import DEFAULT_SETTINGS
from .cyclo import (
    AngleLabel,
    Coeffs,
    CycloReal,
    from_label,
    lcm,
    lift,
    sign,
    to_label,
    weight,
)
from .errors import NotLabelValuedError, RankBoundError, VertexIndexError

WeightLike = Union[CycloReal, AngleLabel, int, Fraction, str]
Matrix = Tuple[Tuple[CycloReal, ...], ...]
Permutation = Tuple[int, ...]
CanonicalKey = bytes


def as_weight(value: WeightLike) -> CycloReal:
    if isinstance(value, CycloReal):
        return value
    if isinstance(value, AngleLabel):
        return from_label(value)
    if isinstance(value, str):
        return weight(value)
    return CycloReal.constant(value)


class Quiver:
    """An immutable quiver with real weights."""

    __slots__ = ("ambient", "b")

    ambient: int
    b: Matrix

    def __init__(
        self, matrix: Sequence[Sequence[WeightLike]], ambient: Optional[int] = None
    ) -> None:
        rows = [[as_weight(entry) for entry in row] for row in matrix]
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise ValueError("exchange matrix must be square")
        if ambient is None:
            ambient = reduce(lcm, (x.ambient for row in rows for x in row), 1)
        self.ambient = ambient
        self.b = tuple(tuple(lift(x, ambient) for x in row) for row in rows)
        for i in range(n):
            if self.b[i][i]:
                raise ValueError(f"diagonal entry {i} is not zero")
            for j in range(i + 1, n):
                if self.b[i][j] != -self.b[j][i]:
                    raise ValueError(f"entries ({i}, {j}) break skew-symmetry")

    @classmethod
    def _raw(cls, ambient: int, b: Matrix) -> "Quiver":
        obj = object.__new__(cls)
        obj.ambient = ambient
        obj.b = b
        return obj

    @classmethod
    def from_arrows(
        cls,
        rank: int,
        arrows: Iterable[Tuple[int, int, WeightLike]],
        ambient: Optional[int] = None,
    ) -> "Quiver":
        """Builds a quiver from (source, target, weight) triples."""
        zero = CycloReal.constant(0)
        matrix: List[List[CycloReal]] = [[zero] * rank for _ in range(rank)]
        for source, target, value in arrows:
            for vertex in (source, target):
                if not 0 <= vertex < rank:
                    raise VertexIndexError(f"vertex {vertex} out of range for rank {rank}")
            if source == target:
                raise ValueError(f"loop at vertex {source}")
            if matrix[source][target] or matrix[target][source]:
                raise ValueError(f"duplicate arrow between {source} and {target}")
            w = as_weight(value)
            matrix[source][target] = w
            matrix[target][source] = -w
        return cls(matrix, ambient)

    @classmethod
    def path(cls, weights: Sequence[WeightLike]) -> "Quiver":
        """The linearly oriented path 0 -> 1 -> ... with the given weights."""
        return cls.from_arrows(
            len(weights) + 1, [(i, i + 1, w) for i, w in enumerate(weights)]
        )

    @classmethod
    def triangle(cls, b01: WeightLike, b12: WeightLike, b20: WeightLike) -> "Quiver":
        """The rank-3 quiver (b01, b12, b20) in signed notation.

        All three positive gives the oriented cycle 0 -> 1 -> 2 -> 0; a negative
        last entry (a, b, -c) gives the acyclic quiver with 0 -> 2.

        """
        x, y, z = as_weight(b01), as_weight(b12), as_weight(b20)
        return cls([[0, x, -z], [-x, 0, y], [z, -y, 0]])

    @classmethod
    def from_skew_symmetrizable(cls, matrix: Sequence[Sequence[int]]) -> "Quiver":
        """The skew-symmetrization of an integer skew-symmetrizable matrix.

        Each entry becomes sgn(b_ij) sqrt(-b_ij b_ji); the products must lie in 0..4.

        """
        roots = {
            0: CycloReal.constant(0),
            1: CycloReal.constant(1),
            2: from_label(AngleLabel(1, 4)),
            3: from_label(AngleLabel(1, 6)),
            4: CycloReal.constant(2),
        }
        n = len(matrix)
        rows: List[List[CycloReal]] = []
        for i in range(n):
            row = []
            for j in range(n):
                product = -matrix[i][j] * matrix[j][i]
                if product not in roots or (matrix[i][j] == 0) != (matrix[j][i] == 0):
                    raise ValueError(f"entries ({i}, {j}) are not skew-symmetrizable")
                root = roots[product]
                row.append(root if matrix[i][j] > 0 else -root)
            rows.append(row)
        return cls(rows)

    @property
    def rank(self) -> int:
        return len(self.b)

    def weight(self, i: int, j: int) -> CycloReal:
        return abs(self.b[i][j])

    def arrows(self) -> Iterator[Tuple[int, int, CycloReal]]:
        """Yields (source, target, weight) for every arrow."""
        n = self.rank
        for i in range(n):
            for j in range(i + 1, n):
                s = sign(self.b[i][j])
                if s > 0:
                    yield i, j, self.b[i][j]
                elif s < 0:
                    yield j, i, self.b[j][i]

    def neighbours(self, vertex: int) -> List[int]:
        return [j for j, x in enumerate(self.b[vertex]) if x]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Quiver):
            return NotImplemented
        return self.b == other.b

    def __hash__(self) -> int:
        return hash(self.b)

    def __repr__(self) -> str:
        parts = []
        for source, target, w in self.arrows():
            label = to_label(w)
            parts.append(f"{source}->{target}:{label if label is not None else float(w)}")
        return f"Quiver(rank={self.rank}, ambient={self.ambient}, [{', '.join(parts)}])"


def _check_vertex(quiver: Quiver, k: int) -> None:
    if not 0 <= k < quiver.rank:
        raise VertexIndexError(f"vertex {k} out of range for rank {quiver.rank}")


def mutate(quiver: Quiver, k: int) -> Quiver:
    """Mutates at vertex k by the real exchange rule.

    b'_ij = -b_ij if k is i or j, otherwise b_ij + sgn(b_ik) max(b_ik b_kj, 0).

    """
    _check_vertex(quiver, k)
    b = quiver.b
    n = quiver.rank
    signs = [sign(b[i][k]) for i in range(n)]
    rows = [list(row) for row in b]
    for i in range(n):
        for j in range(i + 1, n):
            if i == k or j == k:
                new = -b[i][j]
            elif signs[i] > 0 and signs[j] < 0:
                new = b[i][j] + b[i][k] * b[k][j]
            elif signs[i] < 0 and signs[j] > 0:
                new = b[i][j] - b[i][k] * b[k][j]
            else:
                continue
            rows[i][j] = new
            rows[j][i] = -new
    return Quiver._raw(quiver.ambient, tuple(map(tuple, rows)))


def mutate_sequence(quiver: Quiver, sequence: Iterable[int]) -> Quiver:
    for k in sequence:
        quiver = mutate(quiver, k)
    return quiver


def opposite(quiver: Quiver) -> Quiver:
    return Quiver._raw(quiver.ambient, tuple(tuple(-x for x in row) for row in quiver.b))


def subquiver(quiver: Quiver, vertices: Sequence[int]) -> Quiver:
    """Restricts to the given vertices, in the given order."""
    if not vertices:
        raise ValueError("subquiver needs at least one vertex")
    for v in vertices:
        _check_vertex(quiver, v)
    if len(set(vertices)) != len(vertices):
        raise ValueError(f"repeated vertex in {vertices}")
    return Quiver._raw(
        quiver.ambient, tuple(tuple(quiver.b[i][j] for j in vertices) for i in vertices)
    )


def permute(quiver: Quiver, perm: Sequence[int]) -> Quiver:
    """Relabels so that new vertex i is old vertex perm[i]."""
    return subquiver(quiver, perm)


def underlying_graph(quiver: Quiver) -> nx.Graph:
    """The undirected graph on the vertices with an edge for every nonzero weight."""
    graph = nx.Graph()
    graph.add_nodes_from(range(quiver.rank))
    graph.add_edges_from((i, j) for i, j, _ in quiver.arrows())
    return graph


def arrow_digraph(quiver: Quiver) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(quiver.rank))
    graph.add_weighted_edges_from(quiver.arrows())
    return graph


def is_acyclic(quiver: Quiver) -> bool:
    return nx.is_directed_acyclic_graph(arrow_digraph(quiver))


def sinks_sources(quiver: Quiver) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """Returns (sinks, sources); an isolated vertex is both."""
    graph = arrow_digraph(quiver)
    sinks = frozenset(v for v in graph if graph.out_degree(v) == 0)
    sources = frozenset(v for v in graph if graph.in_degree(v) == 0)
    return sinks, sources


def components(quiver: Quiver) -> List[List[int]]:
    """Vertex sets of the connected components, each sorted, ordered by smallest vertex."""
    return sorted(sorted(part) for part in nx.connected_components(underlying_graph(quiver)))


def is_connected(quiver: Quiver) -> bool:
    return len(components(quiver)) == 1


class Cycle(NamedTuple):
    vertices: Tuple[int, ...]
    oriented: bool


def chordless_cycles(quiver: Quiver) -> List[Cycle]:
    """All induced cycles of length >= 3 of the underlying graph.

    Each cycle starts at its smallest vertex, continues to the smaller of its
    two neighbours on the cycle, and is listed once.

    """
    found = []
    for cycle in nx.chordless_cycles(underlying_graph(quiver)):
        if len(cycle) < 3:
            continue
        start = cycle.index(min(cycle))
        rotated = cycle[start:] + cycle[:start]
        if rotated[-1] < rotated[1]:
            rotated = rotated[:1] + rotated[:0:-1]
        found.append(tuple(rotated))
    return [Cycle(vertices, _is_oriented(quiver, vertices)) for vertices in sorted(found)]


def _is_oriented(quiver: Quiver, cycle: Sequence[int]) -> bool:
    signs = {
        sign(quiver.b[cycle[i]][cycle[(i + 1) % len(cycle)]]) for i in range(len(cycle))
    }
    return len(signs) == 1


Token = Coeffs
KeyTuple = Tuple[Token, ...]


def _vertex_colours(quiver: Quiver) -> List[int]:
    """Colours vertices by their incident weights, refined by neighbour colours."""
    n = quiver.rank
    b = quiver.b
    invariants = [
        tuple(sorted(b[v][j].coeffs for j in range(n) if j != v)) for v in range(n)
    ]
    colours = _rank_invariants(invariants)
    for _ in range(n):
        refined = [
            (
                colours[v],
                tuple(sorted((b[v][j].coeffs, colours[j]) for j in range(n) if j != v)),
            )
            for v in range(n)
        ]
        new = _rank_invariants(refined)
        if len(set(new)) == len(set(colours)):
            break
        colours = new
    return colours


def _rank_invariants(invariants: Sequence[tuple]) -> List[int]:
    distinct = sorted(set(invariants))
    index = {value: i for i, value in enumerate(distinct)}
    return [index[value] for value in invariants]


def _candidate_orders(quiver: Quiver) -> Iterator[Permutation]:
    colours = _vertex_colours(quiver)
    blocks: Dict[int, List[int]] = {}
    for v, colour in enumerate(colours):
        blocks.setdefault(colour, []).append(v)
    ordered = [blocks[colour] for colour in sorted(blocks)]
    for choice in itertools.product(*(itertools.permutations(block) for block in ordered)):
        yield tuple(itertools.chain.from_iterable(choice))


def _key_tuple(quiver: Quiver, perm: Permutation) -> KeyTuple:
    b = quiver.b
    n = len(perm)
    return tuple(b[perm[i]][perm[j]].coeffs for i in range(n) for j in range(i + 1, n))


def _check_bound(quiver: Quiver, bound: Optional[int]) -> None:
    if bound is None:
        bound = DEFAULT_SETTINGS.canonical_rank_bound
    if quiver.rank > bound:
        raise RankBoundError(f"rank {quiver.rank} exceeds canonical-form bound {bound}")


def canonical_permutations(
    quiver: Quiver, bound: Optional[int] = None
) -> Tuple[KeyTuple, List[Permutation]]:
    """Returns the minimal key tuple and every ordering that attains it."""
    _check_bound(quiver, bound)
    best: Optional[KeyTuple] = None
    perms: List[Permutation] = []
    for perm in _candidate_orders(quiver):
        key = _key_tuple(quiver, perm)
        if best is None or key < best:
            best = key
            perms = [perm]
        elif key == best:
            perms.append(perm)
    assert best is not None
    return best, perms


def _encode(ambient: int, rank: int, key: KeyTuple) -> CanonicalKey:
    entries = ";".join(",".join(str(c) for c in token) for token in key)
    return f"{ambient}:{rank}:{entries}".encode("ascii")


def canonical_form(
    quiver: Quiver, mod_opposite: bool = False, bound: Optional[int] = None
) -> CanonicalKey:
    """Returns a key equal for two quivers iff they differ by a vertex permutation.

    With mod_opposite, reversing all arrows is also allowed.

    """
    key, _ = canonical_permutations(quiver, bound)
    if mod_opposite:
        key = min(key, canonical_permutations(opposite(quiver), bound)[0])
    return _encode(quiver.ambient, quiver.rank, key)


def canonical_quiver(quiver: Quiver, bound: Optional[int] = None) -> Quiver:
    """The representative of the isomorphism class that canonical_form encodes."""
    _, perms = canonical_permutations(quiver, bound)
    return permute(quiver, perms[0])


class LabelFailure(NamedTuple):
    source: int
    target: int
    weight: CycloReal


LabelMap = Dict[Tuple[int, int], AngleLabel]


def weight_labels(quiver: Quiver) -> Union[LabelMap, LabelFailure]:
    """Maps every arrow (source, target) to its label, or reports the first failure."""
    labels: LabelMap = {}
    for source, target, w in quiver.arrows():
        label = to_label(w)
        if label is None:
            return LabelFailure(source, target, w)
        labels[(source, target)] = label
    return labels


def highest_denominator(quiver: Quiver) -> int:
    """The largest reduced label denominator over all arrows (1 for no arrows)."""
    labels = weight_labels(quiver)
    if isinstance(labels, LabelFailure):
        raise NotLabelValuedError(
            f"arrow {labels.source}->{labels.target} of weight {float(labels.weight):.6f}"
            " is not label-valued"
        )
    return max((label.den for label in labels.values()), default=1)
