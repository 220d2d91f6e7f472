import pytest

from qmut.cyclo import AngleLabel, from_label
from qmut.errors import ConditionError
from qmut.explorer import Verdict, explore, find_mutation_path
from qmut.quiver import (
    canonical_form,
    highest_denominator,
    mutate,
    mutate_sequence,
    weight_labels,
)
from qmut.series import (
    Family,
    StandardForm,
    extract,
    mutate_realized,
    param_mutation,
    realize_standard_form,
    realized_class_size,
    same_class,
    seed_form,
    standard_forms,
    vanishing_arrow_catalogue,
    vanishing_labels,
    vanishing_pattern,
    verify_closure,
)
from qmut.tables import load_seed


def test_seed_forms() -> None:
    assert seed_form(Family.ODD, 3) == StandardForm(Family.ODD, 3, 2, 1, 2, 2)
    assert seed_form(Family.EVEN_A, 4) == StandardForm(Family.EVEN_A, 4, 2, 1, 2, 3)
    assert seed_form(Family.EVEN_B, 4) == StandardForm(Family.EVEN_B, 4, 2, 2, 2, 2)
    assert seed_form(Family.ODD, 3).d == 7
    assert seed_form(Family.EVEN_B, 4).d == 8


def test_conditions() -> None:
    base = StandardForm(Family.ODD, 3, 3, 0, 3, 1)
    assert base.is_valid()
    assert StandardForm(Family.ODD, 3, 1, 2, 2, 2).violations()
    with pytest.raises(ConditionError):
        StandardForm(Family.EVEN_B, 4, 3, 0, 3, 2).validate()
    assert all(sf.is_valid() for family in Family for sf in standard_forms(family, 6))
    assert base.swapped() == StandardForm(Family.ODD, 3, 3, 0, 1, 3)


def test_realize_base_quiver() -> None:
    # q = 0, k = m = n, s = 1: a double arrow, three arrows n/d and two arrows 1/d
    quiver = realize_standard_form(StandardForm(Family.ODD, 3, 3, 0, 3, 1))
    assert quiver.ambient == 7
    labels = sorted(weight_labels(quiver).values())
    assert labels == [AngleLabel(0, 1)] + [AngleLabel(1, 7)] * 2 + [AngleLabel(3, 7)] * 3


def test_realizations_are_label_valued() -> None:
    for family in Family:
        for sf in standard_forms(family, 5):
            d = sf.d
            assert d % highest_denominator(realize_standard_form(sf)) == 0


def test_realization_matches_seed_files() -> None:
    for name, family, n in [
        ("ODD n=3", Family.ODD, 3),
        ("EVEN_A n=4", Family.EVEN_A, 4),
        ("EVEN_B n=4", Family.EVEN_B, 4),
    ]:
        assert canonical_form(load_seed(name)) == canonical_form(
            realize_standard_form(seed_form(family, n))
        )


def test_param_mutation_cases() -> None:
    sf = StandardForm(Family.ODD, 3, 3, 0, 3, 1)
    first = param_mutation(sf, 1)
    assert first.case == "1a"
    assert first.form == StandardForm(Family.ODD, 3, 3, 0, 3, 1)
    second = param_mutation(sf, 2)
    assert second.case == "2b"
    assert second.form == StandardForm(Family.ODD, 3, 3, 0, 1, 3)
    assert param_mutation(sf, 3).case.endswith("'")
    with pytest.raises(ValueError):
        param_mutation(sf, 5)


def test_param_mutation_agrees_with_matrix_mutation() -> None:
    for family in Family:
        for n in range(2, 7):
            for sf in standard_forms(family, n):
                for vertex in range(1, 5):
                    result = param_mutation(sf, vertex)
                    assert mutate_realized(sf, vertex, result.vertex_map) == realize_standard_form(
                        result.form
                    ), f"{sf} at {vertex}"


def test_param_mutation_twice_returns() -> None:
    for sf in standard_forms(Family.EVEN_A, 7):
        for vertex in range(1, 5):
            result = param_mutation(sf, vertex)
            back = param_mutation(result.form, result.vertex_map[vertex - 1])
            assert canonical_form(realize_standard_form(back.form)) == canonical_form(
                realize_standard_form(sf)
            )


def test_closure() -> None:
    for family in Family:
        for n in range(2, 13):
            report = verify_closure(family, n)
            assert report.ok, report.failures[:3]
            assert report.checked_matrices == 4 * report.tuple_count


@pytest.mark.slow
def test_closure_without_matrices() -> None:
    for family in Family:
        for n in range(13, 41):
            assert verify_closure(family, n, matrix_check=False).ok


def test_closure_rejects_small_n() -> None:
    with pytest.raises(ValueError):
        verify_closure(Family.ODD, 1)


def test_class_of_seed_matches_realized_forms() -> None:
    for family, n in [(Family.ODD, 3), (Family.EVEN_A, 4), (Family.EVEN_A, 3), (Family.EVEN_B, 3)]:
        report = verify_closure(family, n, explore_class=True)
        assert report.class_size == report.realized_forms == realized_class_size(family, n)


def test_extract() -> None:
    sf = seed_form(Family.EVEN_A, 5)
    quiver = mutate(realize_standard_form(sf), 2)
    found = extract(quiver, Family.EVEN_A, 5)
    assert found is not None
    assert canonical_form(realize_standard_form(found)) == canonical_form(quiver)
    assert extract(quiver, Family.EVEN_B, 5) is None


def test_vanishing_catalogue() -> None:
    for family in (Family.EVEN_A, Family.EVEN_B):
        for n in range(2, 21):
            catalogue = vanishing_arrow_catalogue(family, n)
            expected = [sf for sf in standard_forms(family, n) if n in sf.labels().values()]
            assert catalogue == expected
            for sf in catalogue:
                names = vanishing_labels(sf)
                # q = n is impossible and k = n leaves every other arrow in place
                assert "q" not in names
                if "k" in names:
                    assert names == ["k"]
                assert vanishing_pattern(sf) in {
                    "k",
                    "m,m+q",
                    "s,s+q",
                    "m+q",
                    "s+q",
                    "m+q,s+q",
                }


def test_vanishing_examples() -> None:
    assert vanishing_pattern(seed_form(Family.EVEN_A, 4)) == "s+q"
    assert vanishing_pattern(seed_form(Family.EVEN_B, 4)) == "m+q,s+q"
    assert any(sf.k == 4 for sf in vanishing_arrow_catalogue(Family.EVEN_A, 4))
    assert vanishing_labels(seed_form(Family.ODD, 3)) == []
    with pytest.raises(ValueError):
        vanishing_arrow_catalogue(Family.ODD, 3)


def test_vanishing_arrow_has_weight_zero() -> None:
    quiver = realize_standard_form(seed_form(Family.EVEN_A, 4))
    # s + q = n: the arrow 4 -> 3 vanishes
    assert not quiver.b[3][2]
    assert quiver.b[1][2] == from_label(AngleLabel(2, 8), 8)


def test_same_class() -> None:
    forms = list(standard_forms(Family.EVEN_A, 4))
    assert all(same_class(forms[0], other) for other in forms)
    assert not same_class(seed_form(Family.EVEN_A, 4), seed_form(Family.EVEN_B, 4))
    assert not same_class(seed_form(Family.ODD, 3), seed_form(Family.ODD, 4))


def test_series_classes_are_finite() -> None:
    for family, n in [(Family.ODD, 3), (Family.EVEN_A, 4), (Family.EVEN_B, 4)]:
        report = explore(realize_standard_form(seed_form(family, n)))
        assert report.verdict is Verdict.FINITE
        assert report.highest_denominator == seed_form(family, n).d


def test_same_class_agrees_with_mutation_paths() -> None:
    groups = [
        list(standard_forms(Family.ODD, 3)),
        list(standard_forms(Family.EVEN_A, 3)) + list(standard_forms(Family.EVEN_B, 3)),
        list(standard_forms(Family.EVEN_A, 4)) + list(standard_forms(Family.EVEN_B, 4)),
    ]
    for forms in groups:
        for first in forms:
            seed = realize_standard_form(first)
            report = explore(seed)
            for second in forms:
                target = realize_standard_form(second)
                path = report.paths.get(canonical_form(target))
                assert same_class(first, second) == (path is not None), (first, second)
                if path is not None:
                    found = find_mutation_path(seed, target, len(path))
                    assert found is not None
                    assert canonical_form(mutate_sequence(seed, found)) == canonical_form(target)
