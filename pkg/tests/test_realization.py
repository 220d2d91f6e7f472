import pytest

from qmut.cyclo import CycloReal
from qmut.documents import gram_from_dict, gram_to_dict, value_to_dict
from qmut.errors import RealizationError, VertexIndexError
from qmut.explorer import ExploreBudget, Verdict, replay_witness
from qmut.quiver import Quiver, mutate
from qmut.realization import (
    QuiverType,
    Realization,
    SignAssignment,
    acute_sign_flip,
    admissibility_failures,
    admissible_sign_assignment,
    check_admissible,
    check_compatibility,
    conjugate_signs,
    find_unrealizable_classes,
    float_corank,
    gram_corank,
    initial_realization,
    mutate_realization,
    permute_realization,
    quiver_type,
    sign_assignment_of,
    verify_class_realization,
)
from qmut.tables import load_seed
from .tests import PHI, quiver_from_labels

A3 = Quiver.path([1, 1])
H3 = Quiver.path([1, PHI])
ORIENTED = Quiver.triangle(1, 1, 1)
ACYCLIC_TRIANGLE = Quiver.triangle(1, 1, -1)


def test_initial_realization_of_acyclic_quiver() -> None:
    realization = initial_realization(H3)
    assert realization.ambient == 5
    assert realization.product(0, 1) == -1
    assert realization.product(1, 2) == -PHI
    assert realization.product(0, 2) == 0
    assert all(realization.product(i, i) == 2 for i in range(3))
    assert check_admissible(realization, H3)


def test_realization_validation() -> None:
    with pytest.raises(ValueError):
        Realization([[2, 1], [1, 1]])
    with pytest.raises(ValueError):
        Realization([[2, 1], [-1, 2]])
    with pytest.raises(ValueError):
        Realization([[2, 1, 0], [1, 2, 0]])


def test_compatibility() -> None:
    realization = initial_realization(A3)
    assert check_compatibility(realization, A3)
    assert not check_compatibility(realization, H3)
    assert not check_compatibility(realization, Quiver.path([1]))


def test_triangle_parity() -> None:
    all_negative = Realization([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    # an oriented triangle needs an odd number of positive products
    assert not check_admissible(all_negative, ORIENTED)
    assert admissibility_failures(all_negative, ORIENTED)
    one_positive = Realization([[2, 1, -1], [1, 2, -1], [-1, -1, 2]])
    assert check_admissible(one_positive, ORIENTED)
    assert check_admissible(all_negative, ACYCLIC_TRIANGLE)
    assert not check_admissible(one_positive, ACYCLIC_TRIANGLE)


def test_incompatible_realization_is_reported() -> None:
    failures = admissibility_failures(initial_realization(H3), A3)
    assert failures == ["Gram matrix and exchange matrix disagree in absolute value"]


def test_mutation_at_source_flips_one_sign() -> None:
    realization = initial_realization(H3)
    # vertex 0 is a source of the path
    assert mutate_realization(realization, H3, 0) == conjugate_signs(realization, (-1, 1, 1))


def test_mutating_twice_flips_one_sign() -> None:
    quiver = load_seed("H3''")
    realization = initial_realization(quiver)
    for k in range(quiver.rank):
        once = mutate_realization(realization, quiver, k)
        twice = mutate_realization(once, mutate(quiver, k), k)
        signs = tuple(-1 if i == k else 1 for i in range(quiver.rank))
        assert twice == conjugate_signs(realization, signs)


def test_mutation_keeps_admissibility() -> None:
    realization = initial_realization(ACYCLIC_TRIANGLE)
    # the middle vertex closes a triangle with a double arrow
    mutated = mutate_realization(realization, ACYCLIC_TRIANGLE, 1)
    quiver = mutate(ACYCLIC_TRIANGLE, 1)
    assert quiver.weight(0, 2) == 2
    assert mutated.product(0, 2) == -2
    assert mutated.product(0, 1) == -1
    assert mutated.product(1, 2) == 1
    assert check_admissible(mutated, quiver)


def test_mutate_realization_rejects_bad_input() -> None:
    realization = initial_realization(A3)
    with pytest.raises(VertexIndexError):
        mutate_realization(realization, A3, 3)
    with pytest.raises(RealizationError):
        mutate_realization(realization, H3, 0)


def test_initial_realization_through_class() -> None:
    # neither acyclic nor a copied double arrow: found through a mutation
    realization = initial_realization(ORIENTED)
    assert check_admissible(realization, ORIENTED)
    assert sorted(sign_assignment_of(realization, ORIENTED).signs.values()).count(1) % 2 == 1


def test_initial_realization_of_infinite_class() -> None:
    with pytest.raises(RealizationError):
        initial_realization(Quiver.triangle(PHI, PHI, PHI))


def test_double_arrow_realization() -> None:
    # 1 and 2 see vertex 0 alike and are joined by a double arrow
    quiver = Quiver.from_arrows(3, [(0, 1, 1), (2, 0, 1), (1, 2, 2)])
    realization = initial_realization(quiver)
    assert check_admissible(realization, quiver)
    assert realization.product(1, 2) == 2
    assert realization.product(0, 1) == realization.product(0, 2)
    assert gram_corank(realization) == 1


def test_admissible_sign_assignment() -> None:
    acyclic = admissible_sign_assignment(A3)
    assert acyclic is not None
    assert set(acyclic.signs.values()) == {-1}
    assert acyclic.positive_arrows() == []
    oriented = admissible_sign_assignment(ORIENTED)
    assert oriented is not None
    assert len(oriented.positive_arrows()) == 1
    assert check_admissible(oriented.realization(ORIENTED), ORIENTED)
    with pytest.raises(RealizationError):
        SignAssignment({(0, 1): -1}).realization(A3)


def test_sign_system_without_solution() -> None:
    # a tournament on four vertices with exactly one oriented triangle
    quiver = Quiver.from_arrows(
        4, [(0, 1, 1), (1, 2, 1), (2, 0, 1), (0, 3, 1), (1, 3, 1), (2, 3, 1)]
    )
    assert admissible_sign_assignment(quiver) is None


def test_corank() -> None:
    assert gram_corank(initial_realization(H3)) == 0
    assert gram_corank(initial_realization(load_seed("H4"))) == 0
    affine = initial_realization(ACYCLIC_TRIANGLE)
    assert gram_corank(affine) == 1
    assert float_corank(affine) == 1
    kronecker = Realization([[2, -2], [-2, 2]])
    assert gram_corank(kronecker) == 1
    assert gram_corank(permute_realization(affine, (2, 0, 1))) == 1


def test_quiver_type() -> None:
    assert quiver_type(0) is QuiverType.FINITE
    assert quiver_type(1) is QuiverType.AFFINE
    assert quiver_type(2) is QuiverType.EXTENDED_AFFINE
    with pytest.raises(ValueError):
        quiver_type(-1)


def test_acute_sign_flip() -> None:
    assert acute_sign_flip(initial_realization(H3)) == (1, 1, 1)
    flipped = conjugate_signs(initial_realization(A3), (1, -1, 1))
    signs = acute_sign_flip(flipped)
    assert signs is not None
    assert signs[0] == 1
    all_positive = Realization([[2, 1, 1], [1, 2, 1], [1, 1, 2]])
    assert acute_sign_flip(all_positive) is None


def test_verify_finite_classes() -> None:
    for quiver, size in [(A3, 4), (ORIENTED, 4), (H3, 6)]:
        report = verify_class_realization(quiver)
        assert report.ok, report.violations[:3]
        assert report.quivers == size
        assert report.corank == 0
        assert report.quiver_type is QuiverType.FINITE


def test_verify_affine_class() -> None:
    report = verify_class_realization(ACYCLIC_TRIANGLE, check_corank=True)
    assert report.ok
    assert report.quivers == 2
    assert report.quiver_type is QuiverType.AFFINE


def test_verify_budget() -> None:
    report = verify_class_realization(A3, ExploreBudget(max_nodes=2))
    assert report.verdict is Verdict.BUDGET_EXHAUSTED
    assert not report.ok


def test_gram_documents() -> None:
    realization = initial_realization(H3)
    data = gram_to_dict(realization.gram, realization.ambient)
    assert data["rank"] == 3
    assert len(data["entries"]) == 2
    ambient, rows = gram_from_dict(data)
    assert Realization(rows, ambient) == realization
    assert value_to_dict(CycloReal.constant(-1, 5)) == {
        "label": {"num": 1, "den": 3},
        "sign": -1,
    }


@pytest.mark.slow
def test_unrealizable_classes_have_no_sign_system() -> None:
    for found in find_unrealizable_classes(4):
        assert found.report.verdict is Verdict.FINITE
        assert admissible_sign_assignment(found.quiver) is None
    with pytest.raises(ValueError):
        find_unrealizable_classes(2)


def test_verify_infinite_class() -> None:
    report = verify_class_realization(Quiver.path([PHI, PHI]))
    assert report.verdict is Verdict.INFINITE
    assert not report.ok
    assert report.infiniteness_witness is not None
    assert report.infiniteness_witness.sequence == ()
    # every rank 3 subquiver of the seed is finite; a mutation exposes the violation
    seed = quiver_from_labels(4, 5, [(0, 1, "1/5"), (1, 2, "2/5"), (2, 3, "1/5")])
    report = verify_class_realization(seed)
    assert report.verdict is Verdict.INFINITE
    witness = report.infiniteness_witness
    assert witness is not None
    assert witness.sequence
    assert replay_witness(seed, witness) is not None
