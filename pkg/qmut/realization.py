"""

Geometric realizations of quivers by reflections.

A realization assigns to the vertices vectors v_1, ..., v_n of norm 2 in some
real quadratic space with |(v_i, v_j)| = |b_ij|. Only the Gram matrix of the
vectors is stored, so no embedding dimension has to be chosen. Mutation acts on
the vectors by partial reflection:

    v_j -> v_j - (v_j, v_k) v_k   if b_jk > 0
    v_k -> -v_k

and on the Gram matrix by the corresponding congruence.

"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import enum
from functools import reduce
import itertools
import logging
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .config import DEFAULT_SETTINGS, Settings
from .cyclo import CycloReal, lcm, lift, sign
from .errors import NotLabelValuedError, RealizationError, VertexIndexError
from .explorer import (
    ClassReport,
    ExploreBudget,
    MutationPath,
    Verdict,
    Witness,
    explore,
    extend_classification,
)
from .quiver import (
    CanonicalKey,
    LabelFailure,
    Matrix,
    Quiver,
    WeightLike,
    as_weight,
    canonical_form,
    canonical_permutations,
    chordless_cycles,
    components,
    is_acyclic,
    is_connected,
    mutate,
    subquiver,
    weight_labels,
)

logger = logging.getLogger(__name__)

SignVector = Tuple[int, ...]


class Realization:
    """The Gram matrix of a tuple of norm-2 vectors."""

    __slots__ = ("ambient", "gram")

    ambient: int
    gram: Matrix

    def __init__(
        self, matrix: Sequence[Sequence[WeightLike]], ambient: Optional[int] = None
    ) -> None:
        rows = [[as_weight(entry) for entry in row] for row in matrix]
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise ValueError("Gram matrix must be square")
        if ambient is None:
            ambient = reduce(lcm, (x.ambient for row in rows for x in row), 1)
        self.ambient = ambient
        self.gram = tuple(tuple(lift(x, ambient) for x in row) for row in rows)
        for i in range(n):
            if self.gram[i][i] != 2:
                raise ValueError(f"diagonal entry {i} is not 2")
            for j in range(i + 1, n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError(f"entries ({i}, {j}) break symmetry")

    @classmethod
    def _raw(cls, ambient: int, gram: Matrix) -> "Realization":
        obj = object.__new__(cls)
        obj.ambient = ambient
        obj.gram = gram
        return obj

    @property
    def rank(self) -> int:
        return len(self.gram)

    def product(self, i: int, j: int) -> CycloReal:
        return self.gram[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Realization):
            return NotImplemented
        return self.gram == other.gram

    def __hash__(self) -> int:
        return hash(self.gram)

    def __repr__(self) -> str:
        rows = "; ".join(
            " ".join(f"{float(x):.4f}" for x in row) for row in self.gram
        )
        return f"Realization(rank={self.rank}, ambient={self.ambient}, [{rows}])"


def _from_rows(ambient: int, rows: Sequence[Sequence[CycloReal]]) -> Realization:
    return Realization._raw(ambient, tuple(tuple(row) for row in rows))


def permute_realization(realization: Realization, perm: Sequence[int]) -> Realization:
    """Relabels so that new vertex i is old vertex perm[i]."""
    g = realization.gram
    return _from_rows(realization.ambient, [[g[a][b] for b in perm] for a in perm])


def conjugate_signs(realization: Realization, signs: Sequence[int]) -> Realization:
    """Replaces v_i by signs[i] v_i."""
    g = realization.gram
    n = realization.rank
    return _from_rows(
        realization.ambient,
        [[g[i][j] if signs[i] == signs[j] else -g[i][j] for j in range(n)] for i in range(n)],
    )


@dataclass(frozen=True)
class SignAssignment:
    """A sign for every arrow: +1 marks a positive scalar product.

    Keys are (source, target) pairs of the arrows of the quiver.

    """

    signs: Mapping[Tuple[int, int], int]

    def positive_arrows(self) -> List[Tuple[int, int]]:
        return sorted(arrow for arrow, s in self.signs.items() if s > 0)

    def realization(self, quiver: Quiver) -> Realization:
        """The Gram matrix with (v_i, v_j) = sign * weight on every arrow."""
        arrows = {(source, target) for source, target, _ in quiver.arrows()}
        if arrows != set(self.signs):
            raise RealizationError("sign assignment does not match the arrows of the quiver")
        n = quiver.rank
        zero = CycloReal.constant(0, quiver.ambient)
        rows = [[zero] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = CycloReal.constant(2, quiver.ambient)
        for source, target, w in quiver.arrows():
            value = w if self.signs[(source, target)] > 0 else -w
            rows[source][target] = rows[target][source] = value
        return _from_rows(quiver.ambient, rows)


def sign_assignment_of(realization: Realization, quiver: Quiver) -> SignAssignment:
    """Reads off the signs a compatible realization puts on the arrows."""
    if not check_compatibility(realization, quiver):
        raise RealizationError("realization is not compatible with the quiver")
    return SignAssignment(
        {
            (source, target): sign(realization.gram[source][target])
            for source, target, _ in quiver.arrows()
        }
    )


# Checks


def check_compatibility(realization: Realization, quiver: Quiver) -> bool:
    """|(v_i, v_j)| = |b_ij| off the diagonal."""
    if realization.rank != quiver.rank:
        return False
    n = quiver.rank
    return all(
        abs(realization.gram[i][j]) == quiver.weight(i, j)
        for i in range(n)
        for j in range(i + 1, n)
    )


def _positive_count(realization: Realization, cycle: Sequence[int]) -> int:
    return sum(
        1
        for i in range(len(cycle))
        if sign(realization.gram[cycle[i]][cycle[(i + 1) % len(cycle)]]) > 0
    )


def _cycle_parity_ok(realization: Realization, cycle: Sequence[int], oriented: bool) -> bool:
    return _positive_count(realization, cycle) % 2 == (1 if oriented else 0)


def admissibility_failures(realization: Realization, quiver: Quiver) -> List[str]:
    """Describes every broken condition; empty for an admissible realization."""
    if not check_compatibility(realization, quiver):
        return ["Gram matrix and exchange matrix disagree in absolute value"]
    failures = []
    n = quiver.rank
    # triangles first, then the longer chordless cycles
    for triple in itertools.combinations(range(n), 3):
        sub = subquiver(quiver, triple)
        if len(list(sub.arrows())) != 3:
            continue
        oriented = not is_acyclic(sub)
        if not _cycle_parity_ok(realization, triple, oriented):
            failures.append(f"triangle {triple} has the wrong number of positive products")
    for cycle in chordless_cycles(quiver):
        if len(cycle.vertices) == 3:
            continue
        if not _cycle_parity_ok(realization, cycle.vertices, cycle.oriented):
            kind = "oriented" if cycle.oriented else "non-oriented"
            failures.append(
                f"chordless {kind} cycle {cycle.vertices} has the wrong number of"
                " positive products"
            )
    return failures


def check_admissible(realization: Realization, quiver: Quiver) -> bool:
    return not admissibility_failures(realization, quiver)


# Initial realizations


def _acyclic_realization(quiver: Quiver) -> Realization:
    n = quiver.rank
    two = CycloReal.constant(2, quiver.ambient)
    rows = [
        [two if i == j else -quiver.weight(i, j) for j in range(n)] for i in range(n)
    ]
    return _from_rows(quiver.ambient, rows)


def _double_arrow_pairs(quiver: Quiver) -> Iterator[Tuple[int, int]]:
    """Pairs (kept, copy) joined by a double arrow with matching neighbourhoods."""
    n = quiver.rank
    for a, c in itertools.permutations(range(n), 2):
        if quiver.weight(a, c) != 2:
            continue
        if any(quiver.weight(a, i) != quiver.weight(c, i) for i in range(n) if i not in (a, c)):
            continue
        rest = [v for v in range(n) if v != c]
        if is_acyclic(subquiver(quiver, rest)):
            yield a, c


def _double_arrow_realization(quiver: Quiver, kept: int, copy: int) -> Realization:
    n = quiver.rank
    rows = [list(row) for row in _acyclic_realization(quiver).gram]
    for i in range(n):
        if i != copy:
            rows[copy][i] = rows[i][copy] = rows[kept][i]
    return _from_rows(quiver.ambient, rows)


def _direct_realization(quiver: Quiver) -> Optional[Realization]:
    if is_acyclic(quiver):
        return _acyclic_realization(quiver)
    for kept, copy in _double_arrow_pairs(quiver):
        realization = _double_arrow_realization(quiver, kept, copy)
        if check_admissible(realization, quiver):
            return realization
    return None


def initial_realization(
    quiver: Quiver,
    budget: ExploreBudget = ExploreBudget(),
    settings: Settings = DEFAULT_SETTINGS,
) -> Realization:
    """Builds an admissible realization.

    Acyclic quivers get (v_i, v_j) = -w_ij. A quiver with a double arrow a -> c
    whose ends see the same weights, and which is acyclic once c is removed,
    gets v_c with the products of v_a. Otherwise the mutation class is searched
    for a quiver of one of these shapes and its realization is carried back.

    """
    direct = _direct_realization(quiver)
    if direct is not None:
        return direct
    parts = components(quiver)
    if len(parts) > 1:
        return _block_realization(
            quiver, parts, [initial_realization(subquiver(quiver, p), budget, settings) for p in parts]
        )
    report = explore(quiver, budget, settings=settings)
    if report.verdict is not Verdict.FINITE:
        raise RealizationError(
            f"no realizable representative: the class is {report.verdict.value}"
        )
    for key in sorted(report.members):
        member = report.members[key]
        realization = _direct_realization(member)
        if realization is None:
            continue
        logger.debug("realizing through a member at distance %d", len(report.paths[key]))
        for k in reversed(report.paths[key]):
            realization = mutate_realization(realization, member, k)
            member = mutate(member, k)
        assert member == quiver, "mutating back did not return to the quiver"
        return realization
    raise RealizationError("no member of the class is acyclic or has a copied double arrow")


def _block_realization(
    quiver: Quiver, parts: Sequence[Sequence[int]], blocks: Sequence[Realization]
) -> Realization:
    n = quiver.rank
    zero = CycloReal.constant(0, quiver.ambient)
    rows = [[zero] * n for _ in range(n)]
    for part, block in zip(parts, blocks):
        for a, i in enumerate(part):
            for b, j in enumerate(part):
                rows[i][j] = lift(block.gram[a][b], quiver.ambient)
    return _from_rows(quiver.ambient, rows)


# Mutation


def mutate_realization(realization: Realization, quiver: Quiver, k: int) -> Realization:
    """Applies the partial reflection at k as a congruence of the Gram matrix."""
    if not 0 <= k < quiver.rank:
        raise VertexIndexError(f"vertex {k} out of range for rank {quiver.rank}")
    if not check_compatibility(realization, quiver):
        raise RealizationError("realization is not compatible with the quiver")
    g = realization.gram
    n = realization.rank
    one = CycloReal.constant(1, realization.ambient)
    # row j of the change-of-coordinates matrix, as {column: coefficient}
    rows: List[Dict[int, CycloReal]] = []
    for j in range(n):
        if j == k:
            rows.append({k: -one})
        elif sign(quiver.b[j][k]) > 0:
            rows.append({j: one, k: -g[j][k]})
        else:
            rows.append({j: one})
    new = [list(row) for row in g]
    for i in range(n):
        for j in range(i, n):
            total = CycloReal.constant(0, realization.ambient)
            for a, x in rows[i].items():
                for b, y in rows[j].items():
                    total = total + x * y * g[a][b]
            new[i][j] = new[j][i] = total
    assert all(new[i][i] == 2 for i in range(n)), "partial reflection broke the norms"
    return _from_rows(realization.ambient, new)


# Sign systems


def _solve_gf2(matrix: np.ndarray, rhs: np.ndarray) -> Optional[np.ndarray]:
    """Solves matrix @ x = rhs over GF(2), free variables set to 0."""
    a = (np.asarray(matrix, dtype=np.uint8) & 1).copy()
    b = (np.asarray(rhs, dtype=np.uint8) & 1).copy()
    m, n = a.shape
    augmented = np.concatenate([a, b[:, None]], axis=1)
    pivot_columns: List[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        candidates = np.nonzero(augmented[r:, c])[0]
        if not len(candidates):
            continue
        pivot = r + int(candidates[0])
        if pivot != r:
            augmented[[r, pivot]] = augmented[[pivot, r]]
        for rr in range(m):
            if rr != r and augmented[rr, c]:
                augmented[rr, :] ^= augmented[r, :]
        pivot_columns.append(c)
        r += 1
    for rr in range(r, m):
        if augmented[rr, n]:
            return None
    x = np.zeros(n, dtype=np.uint8)
    for rr, c in enumerate(pivot_columns):
        x[c] = augmented[rr, n]
    return x


def admissible_sign_assignment(quiver: Quiver) -> Optional[SignAssignment]:
    """Solves the parity conditions for the arrow signs.

    One equation per chordless cycle: the number of positive arrows is odd on
    oriented cycles and even on the others. Returns None when no assignment
    exists, i.e. when the quiver has no admissible realization.

    """
    labels = weight_labels(quiver)
    if isinstance(labels, LabelFailure):
        raise NotLabelValuedError(f"arrow {labels.source}->{labels.target} is not label-valued")
    arrows = sorted(labels)
    if not arrows:
        return SignAssignment({})
    index = {}
    for column, (source, target) in enumerate(arrows):
        index[(source, target)] = index[(target, source)] = column
    cycles = chordless_cycles(quiver)
    matrix = np.zeros((len(cycles), len(arrows)), dtype=np.uint8)
    rhs = np.zeros(len(cycles), dtype=np.uint8)
    for row, cycle in enumerate(cycles):
        vs = cycle.vertices
        for i in range(len(vs)):
            matrix[row, index[(vs[i], vs[(i + 1) % len(vs)])]] = 1
        rhs[row] = 1 if cycle.oriented else 0
    solution = _solve_gf2(matrix, rhs) if len(cycles) else np.zeros(len(arrows), dtype=np.uint8)
    if solution is None:
        return None
    return SignAssignment(
        {arrow: 1 if solution[column] else -1 for column, arrow in enumerate(arrows)}
    )


# Corank


def gram_corank(realization: Realization, cross_check: bool = True) -> int:
    """n minus the rank of the Gram matrix, by fraction-free elimination."""
    rows = [list(row) for row in realization.gram]
    n = len(rows)
    zero = CycloReal.constant(0, realization.ambient)
    previous = CycloReal.constant(1, realization.ambient)
    previous_inverse = previous
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, n) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, n):
            factor = rows[r][col]
            for c in range(col + 1, n):
                numerator = p * rows[r][c] - factor * rows[rank][c]
                value = numerator * previous_inverse
                assert value * previous == numerator, f"inexact division at ({r}, {c})"
                rows[r][c] = value
            rows[r][col] = zero
        previous = p
        previous_inverse = p.inverse()
        rank += 1
    corank = n - rank
    if cross_check:
        approximate = float_corank(realization)
        if approximate != corank:
            logger.warning(
                "exact corank %d disagrees with the singular value count %d",
                corank,
                approximate,
            )
    return corank


def float_corank(realization: Realization, tol: float = 1e-8) -> int:
    """Counts singular values below tol; a floating-point cross-check only."""
    n = realization.rank
    if n == 0:
        return 0
    matrix = np.array([[float(x) for x in row] for row in realization.gram], dtype=float)
    values = np.linalg.svd(matrix, compute_uv=False)
    return int(np.sum(values < tol))


class QuiverType(str, enum.Enum):
    FINITE = "finite"
    AFFINE = "affine"
    EXTENDED_AFFINE = "extended_affine"


def quiver_type(corank: int) -> QuiverType:
    if corank < 0:
        raise ValueError(f"corank cannot be negative: {corank}")
    if corank == 0:
        return QuiverType.FINITE
    if corank == 1:
        return QuiverType.AFFINE
    return QuiverType.EXTENDED_AFFINE


# Acute-angled sign changes


def acute_sign_flip(realization: Realization) -> Optional[SignVector]:
    """Finds signs e with e_i e_j (v_i, v_j) <= 0 for all i != j.

    The first sign is fixed to +1, so 2^(n-1) patterns are tried.

    """
    n = realization.rank
    if n == 0:
        return ()
    signs_of = [[sign(x) for x in row] for row in realization.gram]
    for tail in itertools.product((1, -1), repeat=n - 1):
        signs = (1,) + tail
        if all(
            signs[i] * signs[j] * signs_of[i][j] <= 0
            for i in range(n)
            for j in range(i + 1, n)
        ):
            return signs
    return None


# Whole classes


class RealizationViolation(NamedTuple):
    path: MutationPath
    reason: str


@dataclass
class RealizationReport:
    verdict: Verdict
    pairs: int
    quivers: int
    corank: int
    violations: List[RealizationViolation] = field(default_factory=list)
    infiniteness_witness: Optional[Witness] = None

    @property
    def ok(self) -> bool:
        return self.verdict is Verdict.FINITE and not self.violations

    @property
    def quiver_type(self) -> QuiverType:
        return quiver_type(self.corank)


def _normalise_signs(realization: Realization) -> Realization:
    """Picks the sign conjugate whose spanning-forest products are all negative."""
    n = realization.rank
    g = realization.gram
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from((i, j) for i, j in itertools.combinations(range(n), 2) if g[i][j])
    signs = [0] * n
    for part in nx.connected_components(graph):
        root = min(part)
        signs[root] = 1
        for u, v in nx.bfs_edges(graph, root):
            signs[v] = signs[u] if sign(g[u][v]) < 0 else -signs[u]
    return conjugate_signs(realization, signs)


PairKey = Tuple[CanonicalKey, Tuple[object, ...]]


def pair_key(
    quiver: Quiver, realization: Realization, bound: Optional[int] = None
) -> PairKey:
    """Equal for two (quiver, Gram matrix) pairs iff they differ by a vertex
    permutation and sign changes of the vectors."""
    quiver_key = canonical_form(quiver, bound=bound)
    _, perms = canonical_permutations(quiver, bound)
    best = min(
        tuple(
            x.coeffs
            for row in _normalise_signs(permute_realization(realization, perm)).gram
            for x in row
        )
        for perm in perms
    )
    return quiver_key, best


class _PairNode(NamedTuple):
    key: PairKey
    quiver: Quiver
    realization: Realization
    path: MutationPath




def verify_class_realization(
    quiver: Quiver,
    budget: ExploreBudget = ExploreBudget(),
    settings: Settings = DEFAULT_SETTINGS,
    check_corank: bool = False,
) -> RealizationReport:
    """Propagates an initial realization through the whole mutation class.

    Every reached (quiver, Gram matrix) pair is checked for compatibility and
    admissibility; pairs are counted up to vertex permutations and sign changes
    of the vectors. With check_corank, the corank is recomputed at every pair.
    The class is explored first; an infinite class is reported with the
    witness found there.

    """
    explored = explore(quiver, budget, settings=settings)
    if explored.verdict is not Verdict.FINITE:
        logger.info("class is %s, realization not propagated", explored.verdict.value)
        witness = explored.infiniteness_witness
        return RealizationReport(
            explored.verdict, 0, explored.size, 0, infiniteness_witness=witness
        )
    seed_realization = initial_realization(quiver, budget, settings)
    corank = gram_corank(seed_realization)
    bound = settings.canonical_rank_bound
    seed_key = pair_key(quiver, seed_realization, bound)
    seen = {seed_key}
    quiver_keys = {seed_key[0]}
    violations: List[RealizationViolation] = []
    frontier = [_PairNode(seed_key, quiver, seed_realization, ())]

    def expand(node: _PairNode) -> List[Tuple[_PairNode, List[str]]]:
        children = []
        for k in range(node.quiver.rank):
            child_quiver = mutate(node.quiver, k)
            child_realization = mutate_realization(node.realization, node.quiver, k)
            key = pair_key(child_quiver, child_realization, bound)
            if key in seen:
                continue
            child = _PairNode(key, child_quiver, child_realization, node.path + (k,))
            problems = admissibility_failures(child_realization, child_quiver)
            if check_corank and not problems:
                child_corank = gram_corank(child_realization, cross_check=False)
                if child_corank != corank:
                    problems.append(f"corank changed from {corank} to {child_corank}")
            children.append((child, problems))
        return children

    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        while frontier:
            next_frontier = []
            for children in pool.map(expand, frontier):
                for child, problems in children:
                    if child.key in seen:
                        continue
                    if len(seen) >= budget.max_nodes:
                        logger.info("realization budget of %d pairs exhausted", budget.max_nodes)
                        return RealizationReport(
                            Verdict.BUDGET_EXHAUSTED, len(seen), len(quiver_keys), corank, violations
                        )
                    seen.add(child.key)
                    quiver_keys.add(child.key[0])
                    if problems:
                        violations.extend(
                            RealizationViolation(child.path, problem) for problem in problems
                        )
                        continue
                    next_frontier.append(child)
            frontier = sorted(next_frontier, key=lambda node: node.key)
    if violations:
        logger.warning(
            "%d realization violations in a class of %d quivers",
            len(violations),
            len(quiver_keys),
        )
    return RealizationReport(Verdict.FINITE, len(seen), len(quiver_keys), corank, violations)


class UnrealizableClass(NamedTuple):
    report: ClassReport
    quiver: Quiver
    path: MutationPath


def _integer_alphabet() -> List[CycloReal]:
    return [CycloReal.constant(x) for x in (0, 1, -1, 2, -2)]


def _rank3_classes(
    alphabet: Sequence[CycloReal], budget: ExploreBudget, settings: Settings
) -> List[ClassReport]:
    known = set()
    found = []
    for b01, b12, b02 in itertools.product(alphabet, repeat=3):
        quiver = Quiver([[0, b01, b02], [-b01, 0, b12], [-b02, -b12, 0]])
        if not is_connected(quiver) or canonical_form(quiver) in known:
            continue
        report = explore(quiver, budget, settings=settings)
        if report.verdict is Verdict.FINITE:
            known.update(report.members)
            found.append(report)
    return found


def find_unrealizable_classes(
    rank: int,
    alphabet: Optional[Sequence[CycloReal]] = None,
    budget: ExploreBudget = ExploreBudget(),
    settings: Settings = DEFAULT_SETTINGS,
) -> List[UnrealizableClass]:
    """Finds the connected finite classes of the given rank with a member
    whose sign system has no solution.

    Classes are built by attaching vertices, one rank at a time, starting from
    all finite rank-3 classes over the alphabet (by default the integer
    weights 0, +-1, +-2).

    """
    if rank < 3:
        raise ValueError(f"rank must be at least 3, not {rank}")
    if alphabet is None:
        alphabet = _integer_alphabet()
    classes = _rank3_classes(alphabet, budget, settings)
    for current in range(3, rank):
        classes = extend_classification(classes, alphabet, budget, settings)
        logger.info("%d finite classes at rank %d", len(classes), current + 1)
    result = []
    for report in classes:
        for key in sorted(report.members):
            member = report.members[key]
            if admissible_sign_assignment(member) is None:
                result.append(UnrealizableClass(report, member, report.paths[key]))
                break
    return result
