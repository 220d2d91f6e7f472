"""

The three infinite families of rank-4 mutation-finite quivers with highest
denominator d > 5, presented in standard form.

A standard form (family, n, k, q, m, s) is the rank-4 quiver with arrows

    1 -> 4 : q      2 -> 3 : k      3 -> 1 : s
    4 -> 2 : m      4 -> 3 : s + q  2 -> 1 : m + q

where a label x stands for the weight 2cos(pi x / d), d = 2n + 1 for the odd
family and d = 2n for the two even ones. Label 0 is a double arrow and, for
even d, label n is a vanishing arrow.

"""
from dataclasses import dataclass, field, replace
import enum
from functools import lru_cache
import logging
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from .cyclo import AngleLabel, CycloReal, from_label
from .errors import ConditionError
from .quiver import (
    CanonicalKey,
    Quiver,
    canonical_form,
    mutate,
    permute,
)

logger = logging.getLogger(__name__)


class Family(str, enum.Enum):
    ODD = "ODD"
    EVEN_A = "EVEN_A"
    EVEN_B = "EVEN_B"


VertexMap = Tuple[int, int, int, int]

# opposite-quiver symmetry of the standard form, swapping m and s
_TAU = {1: 4, 2: 3, 3: 2, 4: 1}


@dataclass(frozen=True, order=True)
class StandardForm:
    family: Family
    n: int
    k: int
    q: int
    m: int
    s: int

    @property
    def d(self) -> int:
        return 2 * self.n + 1 if self.family is Family.ODD else 2 * self.n

    def labels(self) -> Dict[str, int]:
        return {
            "k": self.k,
            "q": self.q,
            "m": self.m,
            "s": self.s,
            "m+q": self.m + self.q,
            "s+q": self.s + self.q,
        }

    def violations(self) -> List[str]:
        """Names the family conditions this tuple breaks."""
        n, k, q, m, s = self.n, self.k, self.q, self.m, self.s
        problems = []
        if n < 2:
            problems.append("n >= 2")
        if not all(0 <= x <= n for x in (k, q, m, s)):
            problems.append("k, q, m, s in [0, n]")
        if self.family is Family.ODD:
            if k + q not in (n, n + 1):
                problems.append("k + q in {n, n + 1}")
            if not 2 * k > n >= 2 * q:
                problems.append("k > n/2 >= q")
        else:
            allowed = (n - 1, n + 1) if self.family is Family.EVEN_A else (n,)
            if k + q not in allowed:
                problems.append(f"k + q in {set(allowed)}")
            if not k >= n // 2 >= q:
                problems.append("k >= floor(n/2) >= q")
        if k + q + m + s != self.d:
            problems.append("k + q + m + s = d")
        if not (q <= s <= n - q and q <= m <= n - q):
            problems.append("q <= s, m <= n - q")
        if not (s > 0 and m > 0):
            problems.append("s, m > 0")
        return problems

    def is_valid(self) -> bool:
        return not self.violations()

    def validate(self) -> None:
        problems = self.violations()
        if problems:
            raise ConditionError(f"{self} violates {', '.join(problems)}")

    def swapped(self) -> "StandardForm":
        return replace(self, m=self.s, s=self.m)

    def __str__(self) -> str:
        return (
            f"{self.family.value}(n={self.n}, k={self.k}, q={self.q}, m={self.m},"
            f" s={self.s})"
        )


def standard_forms(family: Family, n: int) -> Iterator[StandardForm]:
    """Yields every valid tuple of the family, in lexicographic (k, q, m, s) order."""
    for k in range(n + 1):
        for q in range(n + 1):
            for m in range(n + 1):
                s = (2 * n + 1 if family is Family.ODD else 2 * n) - k - q - m
                if 0 <= s <= n:
                    sf = StandardForm(family, n, k, q, m, s)
                    if sf.is_valid():
                        yield sf


def seed_form(family: Family, n: int) -> StandardForm:
    """The lexicographically smallest valid tuple."""
    for sf in standard_forms(family, n):
        return sf
    raise ConditionError(f"no valid standard form for {family.value}, n={n}")


def realize_standard_form(sf: StandardForm) -> Quiver:
    sf.validate()
    d = sf.d

    def w(x: int) -> CycloReal:
        return from_label(AngleLabel(x, d), d)

    arrows = [
        (0, 3, w(sf.q)),
        (1, 2, w(sf.k)),
        (2, 0, w(sf.s)),
        (3, 1, w(sf.m)),
        (3, 2, w(sf.s + sf.q)),
        (1, 0, w(sf.m + sf.q)),
    ]
    return Quiver.from_arrows(4, arrows, ambient=d)


class ParamMutation(NamedTuple):
    """The mutated standard form and where each old vertex went (1-based)."""

    form: StandardForm
    vertex_map: VertexMap
    case: str


def _at_vertex_1(sf: StandardForm) -> ParamMutation:
    k, q, m, s = sf.k, sf.q, sf.m, sf.s
    if m + 2 * q <= sf.n:
        return ParamMutation(replace(sf, m=m + q, s=s - q), (4, 2, 3, 1), "1a")
    return ParamMutation(replace(sf, k=m + q, q=s - q, s=k, m=q), (2, 3, 1, 4), "1b")


def _at_vertex_2(sf: StandardForm) -> ParamMutation:
    k, q, m, s = sf.k, sf.q, sf.m, sf.s
    if 2 * m + q <= sf.n:
        return ParamMutation(replace(sf, k=s, q=m, s=m + q, m=k - m), (3, 1, 2, 4), "2a")
    return ParamMutation(replace(sf, k=m + q, q=k - m, s=m, m=s), (2, 3, 4, 1), "2b")


def param_mutation(sf: StandardForm, vertex: int) -> ParamMutation:
    """Mutates a standard form at vertex 1..4 on the parameter level.

    Mutating the realized quiver at the vertex and renaming old vertex v to
    vertex_map[v - 1] gives exactly the realization of the returned form.
    Vertices 3 and 4 go through the symmetry (14)(23), which also swaps m and s.

    """
    sf.validate()
    if vertex == 1:
        return _at_vertex_1(sf)
    if vertex == 2:
        return _at_vertex_2(sf)
    if vertex not in (3, 4):
        raise ValueError(f"standard forms have vertices 1..4, not {vertex}")
    inner = param_mutation(sf.swapped(), _TAU[vertex])
    image = [_TAU[inner.vertex_map[_TAU[v] - 1]] for v in range(1, 5)]
    vertex_map = (image[0], image[1], image[2], image[3])
    return ParamMutation(inner.form.swapped(), vertex_map, inner.case + "'")


def _inverse(vertex_map: VertexMap) -> Tuple[int, ...]:
    """The permutation (0-based) that renames old vertex v to vertex_map[v]."""
    perm = [0] * 4
    for old, new in enumerate(vertex_map):
        perm[new - 1] = old
    return tuple(perm)


def mutate_realized(sf: StandardForm, vertex: int, vertex_map: VertexMap) -> Quiver:
    """Matrix-level mutation of realize(sf), renamed along vertex_map."""
    return permute(mutate(realize_standard_form(sf), vertex - 1), _inverse(vertex_map))


@lru_cache(maxsize=64)
def _realized_keys(family: Family, n: int) -> Dict[CanonicalKey, Tuple[StandardForm, ...]]:
    keys: Dict[CanonicalKey, List[StandardForm]] = {}
    for sf in standard_forms(family, n):
        keys.setdefault(canonical_form(realize_standard_form(sf)), []).append(sf)
    return {key: tuple(forms) for key, forms in keys.items()}


def extract(quiver: Quiver, family: Family, n: int) -> Optional[StandardForm]:
    """Finds a valid standard form of the family whose realization is isomorphic to quiver."""
    if quiver.rank != 4:
        return None
    forms = _realized_keys(family, n).get(canonical_form(quiver))
    return forms[0] if forms else None


def realized_class_size(family: Family, n: int) -> int:
    """Number of isomorphism classes among the realizations of valid tuples."""
    return len(_realized_keys(family, n))


class ClosureFailure(NamedTuple):
    form: StandardForm
    vertex: int
    reason: str


@dataclass
class ClosureReport:
    family: Family
    n: int
    tuple_count: int = 0
    checked_matrices: int = 0
    failures: List[ClosureFailure] = field(default_factory=list)
    class_size: Optional[int] = None
    realized_forms: Optional[int] = None

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_closure(
    family: Family, n: int, matrix_check: bool = True, explore_class: bool = False
) -> ClosureReport:
    """Checks that the parameter maps stay inside the family.

    With matrix_check, every parameter map is compared with matrix mutation of
    the realized quiver. With explore_class, the mutation class of the seed is
    explored and its size compared with the number of realized forms.

    """
    if n < 2:
        raise ValueError(f"n must be at least 2, not {n}")
    report = ClosureReport(family, n)
    for sf in standard_forms(family, n):
        report.tuple_count += 1
        for vertex in range(1, 5):
            result = param_mutation(sf, vertex)
            problems = result.form.violations()
            if problems:
                report.failures.append(
                    ClosureFailure(sf, vertex, f"case {result.case} gives {result.form}")
                )
                continue
            back = param_mutation(result.form, result.vertex_map[vertex - 1])
            if canonical_form(realize_standard_form(back.form)) != canonical_form(
                realize_standard_form(sf)
            ):
                report.failures.append(
                    ClosureFailure(sf, vertex, f"mutating back gives {back.form}")
                )
            if matrix_check:
                report.checked_matrices += 1
                mutated = mutate_realized(sf, vertex, result.vertex_map)
                if mutated != realize_standard_form(result.form):
                    report.failures.append(
                        ClosureFailure(
                            sf, vertex, f"matrix mutation disagrees in case {result.case}"
                        )
                    )
    if explore_class:
        from .explorer import Verdict, explore

        class_report = explore(realize_standard_form(seed_form(family, n)))
        if class_report.verdict is Verdict.FINITE:
            report.class_size = class_report.size
        report.realized_forms = realized_class_size(family, n)
    if report.failures:
        logger.warning(
            "closure fails for %s n=%d: %d problems", family.value, n, len(report.failures)
        )
    return report


def vanishing_labels(sf: StandardForm) -> List[str]:
    """Names of the labels equal to n, i.e. the arrows of weight 0 for even d."""
    if sf.family is Family.ODD:
        return []
    return [name for name, value in sf.labels().items() if value == sf.n]


def vanishing_arrow_catalogue(family: Family, n: int) -> List[StandardForm]:
    """All valid tuples of an even family with at least one vanishing arrow."""
    if family is Family.ODD:
        raise ValueError("odd denominators have no vanishing arrows")
    return [sf for sf in standard_forms(family, n) if vanishing_labels(sf)]


def vanishing_pattern(sf: StandardForm) -> str:
    """Classifies the vanishing arrows of a catalogue entry.

    One of "k", "m,m+q", "s,s+q", "m+q", "s+q" or "m+q,s+q".

    """
    return ",".join(vanishing_labels(sf))


def same_class(first: StandardForm, second: StandardForm) -> bool:
    """Two valid standard forms are mutation-equivalent iff d and the family agree."""
    first.validate()
    second.validate()
    return first.d == second.d and first.family is second.family
