"""

Enumeration of mutation classes.

explore() walks a mutation class breadth first, one canonical form per
isomorphism class, and stops early when a reached quiver violates one of the
rules that force mutation-infiniteness:

- an arrow of weight larger than 2;
- an arrow whose weight is not of the form 2cos(pi m/d);
- at rank > 3, a subquiver equal to the Markov quiver (2, 2, 2);
- a connected rank-3 subquiver whose own class is infinite.

"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import enum
from fractions import Fraction
import itertools
import logging
import threading
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from .config import DEFAULT_SETTINGS, Settings
from .cyclo import AngleLabel, CycloReal, from_label, to_label
from .errors import NotLabelValuedError
from .quiver import (
    CanonicalKey,
    Quiver,
    canonical_form,
    canonical_permutations,
    chordless_cycles,
    components,
    highest_denominator,
    is_acyclic,
    is_connected,
    mutate,
    mutate_sequence,
    sinks_sources,
    subquiver,
)

logger = logging.getLogger(__name__)

MutationPath = Tuple[int, ...]


class Verdict(str, enum.Enum):
    FINITE = "finite"
    INFINITE = "infinite"
    BUDGET_EXHAUSTED = "budget_exhausted"


class Rule(str, enum.Enum):
    WEIGHT_ABOVE_TWO = "weight_above_two"
    NOT_LABEL_VALUED = "not_label_valued"
    MARKOV_SUBQUIVER = "markov_subquiver"
    INFINITE_RANK3_SUBQUIVER = "infinite_rank3_subquiver"


@dataclass(frozen=True)
class ExploreBudget:
    """Limits for explore().

    max_weight_check toggles the two weight rules; rank3_rule toggles the
    Markov and rank-3 subquiver rules.

    """

    max_nodes: int = DEFAULT_SETTINGS.max_nodes
    max_weight_check: bool = True
    rank3_rule: bool = True

    def __post_init__(self) -> None:
        if self.max_nodes < 1:
            raise ValueError(f"max_nodes must be at least 1, not {self.max_nodes}")


class Violation(NamedTuple):
    rule: Rule
    vertices: Tuple[int, ...]


class Witness(NamedTuple):
    """A mutation sequence from the seed to a quiver that breaks a rule."""

    sequence: MutationPath
    rule: Rule
    vertices: Tuple[int, ...]
    quiver: Quiver


@dataclass
class ClassReport:
    verdict: Verdict
    size: int
    representatives: List[Quiver]
    highest_denominator: Optional[int] = None
    acyclic_orbits: List[List[Quiver]] = field(default_factory=list)
    infiniteness_witness: Optional[Witness] = None
    mod_opposite: bool = False
    members: Dict[CanonicalKey, Quiver] = field(default_factory=dict, repr=False)
    paths: Dict[CanonicalKey, MutationPath] = field(default_factory=dict, repr=False)
    components: List["ClassReport"] = field(default_factory=list)

    @property
    def seed(self) -> Quiver:
        return self.representatives[0]

    @property
    def keys(self) -> FrozenSet[CanonicalKey]:
        return frozenset(self.members)

    def acyclic_members(self) -> List[Quiver]:
        return [self.members[key] for key in sorted(self.members) if is_acyclic(self.members[key])]


# Rank-3 classification


class Rank3Result(NamedTuple):
    verdict: Verdict
    certificate: str
    quiver: Optional[Quiver]


class TriangleCheck(NamedTuple):
    passed: bool
    cyclic: bool
    labels: Tuple[Fraction, Fraction, Fraction]
    equality_required: bool
    reason: str


_ACYCLIC_NORMAL_FORMS = {
    (Fraction(1, 3), Fraction(1, 3)): "(1, 1, 0)",
    (Fraction(1, 4), Fraction(1, 3)): "(1, sqrt2, 0)",
    (Fraction(1, 5), Fraction(1, 3)): "(1, 2cos(pi/5), 0)",
    (Fraction(1, 5), Fraction(2, 5)): "(2cos(pi/5), 2cos(2pi/5), 0)",
    (Fraction(1, 3), Fraction(2, 5)): "(1, 2cos(2pi/5), 0)",
}


def _triangle_labels(quiver: Quiver) -> List[AngleLabel]:
    labels = []
    for i, j in ((0, 1), (1, 2), (0, 2)):
        w = quiver.weight(i, j)
        label = to_label(w)
        if label is None:
            raise NotLabelValuedError(f"weight {float(w):.6f} between {i} and {j}")
        labels.append(label)
    return labels


def check_triangle_condition(quiver: Quiver) -> TriangleCheck:
    """Checks the angle conditions every finite rank-3 quiver satisfies.

    A missing arrow counts as the label 1/2. For an acyclic triangle the three
    labels must sum to at least 1; for an oriented one, some label t must be
    at most the sum m + s of the other two. Equality is required as soon as
    some label has reduced denominator above 5. Weight-2 arrows only occur in
    oriented triangles (2, x, x).

    """
    if quiver.rank != 3:
        raise ValueError(f"triangle condition needs rank 3, not {quiver.rank}")
    labels = _triangle_labels(quiver)
    fractions = (labels[0].fraction, labels[1].fraction, labels[2].fraction)
    cycles = chordless_cycles(quiver)
    cyclic = len(cycles) == 1 and cycles[0].oriented
    high = any(label.den > 5 for label in labels)
    doubles = sum(1 for f in fractions if f == 0)

    def result(passed: bool, reason: str) -> TriangleCheck:
        return TriangleCheck(passed, cyclic, fractions, high, reason)

    if not cyclic:
        if doubles:
            return result(False, "double arrow outside an oriented triangle")
        total = sum(fractions)
        if total < 1:
            return result(False, f"label sum {total} is below 1")
        if high and total != 1:
            return result(False, f"label sum {total} must equal 1")
        return result(True, f"label sum {total}")
    if doubles:
        others = sorted(fractions)[1:]
        if doubles == 3 or (doubles == 1 and others[0] == others[1]):
            return result(True, "oriented triangle (2, x, x)")
        return result(False, "double arrow with unequal neighbours")
    for t_index in range(3):
        t = fractions[t_index]
        m, s = (f for i, f in enumerate(fractions) if i != t_index)
        if m + s > t and not high:
            return result(True, f"{m} + {s} + (1 - {t}) > 1")
        if m + s == t:
            return result(True, f"{m} + {s} + (1 - {t}) = 1")
    return result(False, "no permutation satisfies the cyclic condition")


def _rank3_filter(quiver: Quiver) -> Optional[str]:
    for source, target, w in quiver.arrows():
        if w > 2:
            return f"weight above 2 on {source}->{target}"
        if to_label(w) is None:
            return f"weight on {source}->{target} is not label-valued"
    check = check_triangle_condition(quiver)
    if not check.passed:
        return check.reason
    return None


def _normal_form_name(quiver: Quiver) -> Optional[str]:
    arrows = list(quiver.arrows())
    labels = sorted(to_label(w).fraction for _, _, w in arrows)  # type: ignore[union-attr]
    if len(arrows) == 2:
        return _ACYCLIC_NORMAL_FORMS.get((labels[0], labels[1]))
    if len(arrows) == 3 and not is_acyclic(quiver):
        if labels == [0, 0, 0]:
            return "(2, 2, 2)"
        if labels[0] == 0 and labels[1] == labels[2] and labels[1].numerator == 1:
            d = labels[1].denominator
            return f"(2, 2cos(pi/{d}), 2cos(pi/{d}))"
    return None


_RANK3_CACHE: Dict[CanonicalKey, Rank3Result] = {}
_RANK3_LOCK = threading.Lock()


def classify_rank3(quiver: Quiver) -> Rank3Result:
    """Decides whether a rank-3 quiver is mutation-finite.

    Finite results carry the name of the normal form reached in the class;
    infinite ones carry the violated condition and the offending quiver.

    """
    if quiver.rank != 3:
        raise ValueError(f"classify_rank3 needs rank 3, not {quiver.rank}")
    if not is_connected(quiver):
        return Rank3Result(Verdict.FINITE, "disconnected", quiver)
    key = canonical_form(quiver, mod_opposite=True)
    with _RANK3_LOCK:
        cached = _RANK3_CACHE.get(key)
    if cached is not None:
        return cached
    result = _classify_rank3(quiver)
    with _RANK3_LOCK:
        _RANK3_CACHE.setdefault(key, result)
    return result


def _classify_rank3(seed: Quiver) -> Rank3Result:
    reason = _rank3_filter(seed)
    if reason is not None:
        return Rank3Result(Verdict.INFINITE, reason, seed)
    seen = {canonical_form(seed): seed}
    frontier = [seed]
    while frontier:
        next_frontier = []
        for quiver in frontier:
            for k in range(3):
                child = mutate(quiver, k)
                key = canonical_form(child)
                if key in seen:
                    continue
                reason = _rank3_filter(child)
                if reason is not None:
                    return Rank3Result(Verdict.INFINITE, reason, child)
                seen[key] = child
                next_frontier.append(child)
        frontier = next_frontier
    for key in sorted(seen):
        name = _normal_form_name(seen[key])
        if name is not None:
            return Rank3Result(Verdict.FINITE, name, seen[key])
    logger.warning("finite rank-3 class of %r has no recognised normal form", seed)
    return Rank3Result(Verdict.FINITE, "unrecognised", None)


# Exploration


def _is_markov(quiver: Quiver) -> bool:
    cycles = chordless_cycles(quiver)
    return (
        len(cycles) == 1
        and cycles[0].oriented
        and all(w == 2 for _, _, w in quiver.arrows())
    )


def find_violation(quiver: Quiver, budget: ExploreBudget = ExploreBudget()) -> Optional[Violation]:
    """Returns the first infiniteness rule the quiver breaks, if any.

    Quivers of rank below 3 are always mutation-finite.

    """
    if quiver.rank < 3:
        return None
    if budget.max_weight_check:
        for source, target, w in quiver.arrows():
            if w > 2:
                return Violation(Rule.WEIGHT_ABOVE_TWO, (source, target))
            if to_label(w) is None:
                return Violation(Rule.NOT_LABEL_VALUED, (source, target))
    if budget.rank3_rule:
        for triple in itertools.combinations(range(quiver.rank), 3):
            sub = subquiver(quiver, triple)
            if not is_connected(sub):
                continue
            if quiver.rank > 3 and _is_markov(sub):
                return Violation(Rule.MARKOV_SUBQUIVER, triple)
            if classify_rank3(sub).verdict is Verdict.INFINITE:
                return Violation(Rule.INFINITE_RANK3_SUBQUIVER, triple)
    return None


class _Node(NamedTuple):
    key: CanonicalKey
    quiver: Quiver
    path: MutationPath


class _Child(NamedTuple):
    key: CanonicalKey
    quiver: Quiver
    path: MutationPath
    violation: Optional[Violation]


def explore(
    quiver: Quiver,
    budget: ExploreBudget = ExploreBudget(),
    mod_opposite: bool = False,
    settings: Settings = DEFAULT_SETTINGS,
) -> ClassReport:
    """Explores the mutation class of quiver.

    Disconnected input is explored one component at a time; the combined
    report is finite only if every component is, and its size is the product
    of the component sizes.

    """
    parts = components(quiver)
    if len(parts) == 1:
        return _explore_connected(quiver, budget, mod_opposite, settings)
    reports = [
        _explore_connected(subquiver(quiver, part), budget, mod_opposite, settings)
        for part in parts
    ]
    verdicts = {report.verdict for report in reports}
    if Verdict.INFINITE in verdicts:
        verdict = Verdict.INFINITE
    elif Verdict.BUDGET_EXHAUSTED in verdicts:
        verdict = Verdict.BUDGET_EXHAUSTED
    else:
        verdict = Verdict.FINITE
    size = 1
    for report in reports:
        size *= report.size
    witness = next((r.infiniteness_witness for r in reports if r.infiniteness_witness), None)
    denominators = [r.highest_denominator for r in reports]
    return ClassReport(
        verdict=verdict,
        size=size,
        representatives=[quiver],
        highest_denominator=(
            max(denominators) if verdict is Verdict.FINITE and None not in denominators else None
        ),
        infiniteness_witness=witness,
        mod_opposite=mod_opposite,
        components=reports,
    )


def _explore_connected(
    seed: Quiver, budget: ExploreBudget, mod_opposite: bool, settings: Settings
) -> ClassReport:
    def key_of(q: Quiver) -> CanonicalKey:
        return canonical_form(q, mod_opposite, settings.canonical_rank_bound)

    seed_key = key_of(seed)
    violation = find_violation(seed, budget)
    if violation is not None:
        return _infinite_report(seed, (), violation, seed, mod_opposite)

    members: Dict[CanonicalKey, Quiver] = {seed_key: seed}
    paths: Dict[CanonicalKey, MutationPath] = {seed_key: ()}
    frontier = [_Node(seed_key, seed, ())]

    def expand(node: _Node) -> List[_Child]:
        children = []
        for k in range(node.quiver.rank):
            child = mutate(node.quiver, k)
            key = key_of(child)
            if key in members:
                continue
            children.append(_Child(key, child, node.path + (k,), find_violation(child, budget)))
        return children

    level = 0
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        while frontier:
            level += 1
            logger.debug("level %d: frontier %d, class so far %d", level, len(frontier), len(members))
            next_frontier = []
            for children in pool.map(expand, frontier):
                for child in children:
                    if child.key in members:
                        continue
                    if child.violation is not None:
                        return _infinite_report(
                            seed, child.path, child.violation, child.quiver, mod_opposite
                        )
                    if len(members) >= budget.max_nodes:
                        logger.info("budget of %d canonical forms exhausted", budget.max_nodes)
                        return ClassReport(
                            verdict=Verdict.BUDGET_EXHAUSTED,
                            size=len(members),
                            representatives=[seed],
                            mod_opposite=mod_opposite,
                        )
                    members[child.key] = child.quiver
                    paths[child.key] = child.path
                    next_frontier.append(_Node(child.key, child.quiver, child.path))
            frontier = sorted(next_frontier, key=lambda node: node.key)

    report = ClassReport(
        verdict=Verdict.FINITE,
        size=len(members),
        representatives=_representatives(seed, seed_key, members, settings.sample_size),
        highest_denominator=_class_denominator(members.values()),
        mod_opposite=mod_opposite,
        members=members,
        paths=paths,
    )
    report.acyclic_orbits = acyclic_orbits(report)
    logger.info("finite class of size %d (rank %d)", report.size, seed.rank)
    return report


def _class_denominator(quivers: Iterable[Quiver]) -> Optional[int]:
    """The highest label denominator over a class, or None if some weight is not a label."""
    try:
        return max(highest_denominator(q) for q in quivers)
    except NotLabelValuedError:
        return None


def _representatives(
    seed: Quiver, seed_key: CanonicalKey, members: Dict[CanonicalKey, Quiver], sample_size: int
) -> List[Quiver]:
    result = [seed]
    for key in sorted(members):
        if key == seed_key:
            continue
        quiver = members[key]
        if len(result) < sample_size or is_acyclic(quiver):
            result.append(quiver)
    return result


def _infinite_report(
    seed: Quiver,
    path: MutationPath,
    violation: Violation,
    quiver: Quiver,
    mod_opposite: bool,
) -> ClassReport:
    logger.info("infinite: %s at %s after %s", violation.rule.value, violation.vertices, path)
    return ClassReport(
        verdict=Verdict.INFINITE,
        size=0,
        representatives=[seed],
        infiniteness_witness=Witness(path, violation.rule, violation.vertices, quiver),
        mod_opposite=mod_opposite,
    )


def replay_witness(seed: Quiver, witness: Witness) -> Optional[Violation]:
    """Re-applies the witness sequence and re-checks the rule it names."""
    quiver = mutate_sequence(seed, witness.sequence)
    if witness.rule in (Rule.WEIGHT_ABOVE_TWO, Rule.NOT_LABEL_VALUED):
        source, target = witness.vertices
        w = quiver.b[source][target]
        if witness.rule is Rule.WEIGHT_ABOVE_TWO and w > 2:
            return Violation(witness.rule, witness.vertices)
        if witness.rule is Rule.NOT_LABEL_VALUED and to_label(abs(w)) is None:
            return Violation(witness.rule, witness.vertices)
        return None
    sub = subquiver(quiver, witness.vertices)
    if witness.rule is Rule.MARKOV_SUBQUIVER and _is_markov(sub):
        return Violation(witness.rule, witness.vertices)
    if (
        witness.rule is Rule.INFINITE_RANK3_SUBQUIVER
        and classify_rank3(sub).verdict is Verdict.INFINITE
    ):
        return Violation(witness.rule, witness.vertices)
    return None


# Acyclic representatives


def acyclic_orbits(report: ClassReport) -> List[List[Quiver]]:
    """Groups the acyclic members of a finite class under sink/source mutations."""
    if report.verdict is not Verdict.FINITE:
        raise ValueError(f"acyclic orbits need a finite class, not {report.verdict.value}")
    acyclic = {
        key: quiver for key, quiver in report.members.items() if is_acyclic(quiver)
    }
    parent = {key: key for key in acyclic}

    def find(key: CanonicalKey) -> CanonicalKey:
        while parent[key] != key:
            parent[key] = parent[parent[key]]
            key = parent[key]
        return key

    for key, quiver in acyclic.items():
        sinks, sources = sinks_sources(quiver)
        for vertex in sorted(sinks | sources):
            other = canonical_form(mutate(quiver, vertex), report.mod_opposite)
            assert other in acyclic, "sink/source mutation left the acyclic members"
            a, b = find(key), find(other)
            if a != b:
                parent[max(a, b)] = min(a, b)

    orbits: Dict[CanonicalKey, List[CanonicalKey]] = {}
    for key in sorted(acyclic):
        orbits.setdefault(find(key), []).append(key)
    return [[acyclic[key] for key in orbits[root]] for root in sorted(orbits)]


# Incremental classification


def _check_alphabet(alphabet: Sequence[CycloReal]) -> None:
    values = set(alphabet)
    if 0 not in values:
        raise ValueError("alphabet must contain 0")
    for value in alphabet:
        if -value not in values:
            raise ValueError(f"alphabet is not closed under negation: missing {-value!r}")


def denominator_alphabet(labels: Iterable[AngleLabel]) -> List[CycloReal]:
    """The signed weights of the given labels, plus 0, in one ambient."""
    values = [CycloReal.constant(0)]
    for label in labels:
        w = from_label(label)
        if w:
            values.extend([w, -w])
    return values


def _attach(quiver: Quiver, column: Sequence[CycloReal]) -> Quiver:
    """Adds a vertex with b[i][new] = column[i]."""
    n = quiver.rank
    rows = [list(quiver.b[i]) + [column[i]] for i in range(n)]
    rows.append([-x for x in column] + [CycloReal.constant(0)])
    return Quiver(rows)


class _TriangleFilter:
    """Caches whether a triangle (old pair, new vertex) can occur in a finite quiver."""

    def __init__(self) -> None:
        self._cache: Dict[Tuple[object, ...], bool] = {}
        self._lock = threading.Lock()

    def allows(self, bij: CycloReal, xi: CycloReal, xj: CycloReal, at_rank: int) -> bool:
        token = (bij.ambient, bij.coeffs, xi.ambient, xi.coeffs, xj.ambient, xj.coeffs, at_rank > 3)
        with self._lock:
            cached = self._cache.get(token)
        if cached is not None:
            return cached
        zero = CycloReal.constant(0)
        # vertices i, j, new: b[i][new] = xi, b[j][new] = xj
        sub = Quiver([[zero, bij, xi], [-bij, zero, xj], [-xi, -xj, zero]])
        if not is_connected(sub):
            allowed = True
        elif at_rank > 3 and _is_markov(sub):
            allowed = False
        else:
            allowed = classify_rank3(sub).verdict is Verdict.FINITE
        with self._lock:
            self._cache[token] = allowed
        return allowed


def _columns(
    quiver: Quiver, alphabet: Sequence[CycloReal], triangles: _TriangleFilter
) -> Iterable[List[CycloReal]]:
    """Backtracks over new columns whose triangles with every old pair stay finite."""
    n = quiver.rank
    column: List[CycloReal] = []

    def extend(j: int) -> Iterable[List[CycloReal]]:
        if j == n:
            yield list(column)
            return
        for value in alphabet:
            if all(
                triangles.allows(quiver.b[i][j], column[i], value, n + 1) for i in range(j)
            ):
                column.append(value)
                yield from extend(j + 1)
                column.pop()

    yield from extend(0)


def extend_classification(
    base: Sequence[ClassReport],
    alphabet: Sequence[CycloReal],
    budget: ExploreBudget = ExploreBudget(),
    settings: Settings = DEFAULT_SETTINGS,
    mod_opposite: bool = True,
) -> List[ClassReport]:
    """Finds the finite classes of rank r + 1 that contain a quiver from base.

    One vertex is attached to one representative of every base class in every
    way allowed by the alphabet; connected results are explored and the finite
    classes returned, each once. With mod_opposite a class and its opposite
    count as one, and only the first one found is returned.

    """
    _check_alphabet(alphabet)
    triangles = _TriangleFilter()
    known: Set[CanonicalKey] = set()
    rejected: Set[CanonicalKey] = set()
    found: List[ClassReport] = []
    for report in base:
        if report.verdict is not Verdict.FINITE:
            raise ValueError("extend_classification needs finite base classes")
        seed = report.seed
        candidates = 0
        for column in _columns(seed, alphabet, triangles):
            quiver = _attach(seed, column)
            if not is_connected(quiver):
                continue
            candidates += 1
            key = canonical_form(quiver, mod_opposite, settings.canonical_rank_bound)
            if key in known or key in rejected:
                continue
            result = explore(quiver, budget, settings=settings)
            if result.verdict is Verdict.FINITE:
                known.update(
                    canonical_form(member, mod_opposite, settings.canonical_rank_bound)
                    for member in result.members.values()
                )
                found.append(result)
                logger.info("new rank-%d class of size %d", quiver.rank, result.size)
            else:
                rejected.add(key)
        logger.debug("rank-%d base class gave %d connected candidates", seed.rank, candidates)
    return sorted(found, key=lambda report: (report.size, min(report.members)))


# Paths between quivers


def find_mutation_path(
    first: Quiver, second: Quiver, max_depth: int
) -> Optional[List[int]]:
    """Finds a mutation sequence taking first to a quiver isomorphic to second.

    Searches from both ends at once; the combined length is at most max_depth.

    """
    if first.rank != second.rank:
        raise ValueError("quivers of different rank are never mutation-equivalent")
    start, goal = canonical_form(first), canonical_form(second)
    if start == goal:
        return []
    forward: Dict[CanonicalKey, Tuple[Quiver, MutationPath]] = {start: (first, ())}
    backward: Dict[CanonicalKey, Tuple[Quiver, MutationPath]] = {goal: (second, ())}
    fronts = {True: [start], False: [goal]}
    depth = 0
    while depth < max_depth and fronts[True] and fronts[False]:
        depth += 1
        is_forward = len(fronts[True]) <= len(fronts[False])
        own, other = (forward, backward) if is_forward else (backward, forward)
        new_front = []
        for key in fronts[is_forward]:
            quiver, path = own[key]
            for k in range(quiver.rank):
                child = mutate(quiver, k)
                child_key = canonical_form(child)
                if child_key in own:
                    continue
                own[child_key] = (child, path + (k,))
                if child_key in other:
                    return _join_paths(forward[child_key], backward[child_key])
                new_front.append(child_key)
        fronts[is_forward] = sorted(new_front)
    return None


def _join_paths(
    forward: Tuple[Quiver, MutationPath], backward: Tuple[Quiver, MutationPath]
) -> List[int]:
    (meet_a, path_a), (meet_b, path_b) = forward, backward
    _, perms_a = canonical_permutations(meet_a)
    _, perms_b = canonical_permutations(meet_b)
    b_to_a = {b: a for a, b in zip(perms_a[0], perms_b[0])}
    return list(path_a) + [b_to_a[v] for v in reversed(path_b)]


def odd_sqrt2_cycles(quiver: Quiver) -> List[Tuple[int, ...]]:
    """Chordless cycles carrying an odd number of arrows of weight sqrt 2."""
    root2 = from_label(AngleLabel(1, 4))
    result = []
    for cycle in chordless_cycles(quiver):
        vs = cycle.vertices
        count = sum(
            1 for i in range(len(vs)) if quiver.weight(vs[i], vs[(i + 1) % len(vs)]) == root2
        )
        if count % 2:
            result.append(vs)
    return result
