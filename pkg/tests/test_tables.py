import json

from hypothesis import HealthCheck, given, settings, strategies as st
import pytest

from qmut.cyclo import CycloReal, from_label, labels_up_to
from qmut.explorer import ExploreBudget, Verdict, explore
from qmut.quiver import Quiver
from qmut.realization import acute_sign_flip, initial_realization
from qmut.series import Family, realize_standard_form, seed_form
from qmut.tables import (
    CLASSES,
    EXPECTED_EXTENSIONS,
    SEED_FILES,
    Row,
    class_report,
    classification_table,
    identify_class,
    load_seed,
    realization_table,
    render_json,
    render_text,
    series_table,
    sizes_table,
)


def test_load_seed() -> None:
    for name in SEED_FILES:
        assert load_seed(name).rank in (3, 4, 5, 6)
    with pytest.raises(KeyError):
        load_seed("E8")


def test_identify_class() -> None:
    report = explore(load_seed("H3'"))
    assert identify_class(report) == "H3'"
    assert identify_class(explore(Quiver.path([1, 1]))) is None


def test_class_list() -> None:
    assert len(CLASSES) == 17
    assert {spec.seed for spec in CLASSES if spec.seed} <= set(SEED_FILES)
    for spec in CLASSES:
        if spec.seed is not None:
            assert load_seed(spec.seed).rank == spec.rank
    assert sum(EXPECTED_EXTENSIONS.values()) == 11


def test_render() -> None:
    rows = [Row("H3", 6, 6, True), Row("H4", 18, 17, False, "short")]
    text = render_text(rows)
    assert text.splitlines()[0].split() == ["name", "expected", "computed", "ok", "detail"]
    assert "FAIL" in text.splitlines()[2]
    data = json.loads(render_json("sizes", rows))
    assert data["table"] == "sizes"
    assert data["rows"][1] == {
        "name": "H4",
        "expected": 18,
        "computed": 17,
        "ok": False,
        "detail": "short",
    }


@pytest.mark.slow
def test_sizes_table() -> None:
    rows = sizes_table()
    assert [row.name for row in rows if not row.ok] == []
    for row, spec in zip(rows, CLASSES):
        assert row.detail.startswith(f"rank {spec.rank}, finite"), row


@pytest.mark.slow
def test_classification_table() -> None:
    assert all(row.ok for row in classification_table())


@pytest.mark.slow
def test_series_table() -> None:
    assert all(row.ok for row in series_table(max_n=10, matrix_n=8, size_n=5))


@pytest.mark.slow
def test_realization_table() -> None:
    rows = realization_table()
    assert [row.name for row in rows if not row.ok] == []


@pytest.mark.slow
def test_acyclic_members_have_acute_sign_flips() -> None:
    for spec in CLASSES:
        report = class_report(spec)
        assert report is not None, spec.name
        for orbit in report.acyclic_orbits:
            assert acute_sign_flip(initial_realization(orbit[0])) is not None


SERIES_SEEDS = [(Family.ODD, 3), (Family.EVEN_A, 4), (Family.EVEN_B, 4), (Family.ODD, 4)]


@pytest.mark.slow
@settings(max_examples=100, deadline=None, suppress_health_check=list(HealthCheck))
@given(data=st.data())
def test_series_quivers_do_not_extend(data: st.DataObject) -> None:
    family, n = data.draw(st.sampled_from(SERIES_SEEDS))
    seed = realize_standard_form(seed_form(family, n))
    d = seed.ambient
    weights = [
        from_label(label, d) for label in labels_up_to(d) if d % label.den == 0 or label.den <= 3
    ]
    zero = CycloReal.constant(0, d)
    column = data.draw(
        st.lists(st.sampled_from(weights + [zero]), min_size=4, max_size=4).filter(
            lambda xs: any(xs)
        )
    )
    signs = data.draw(st.lists(st.sampled_from([1, -1]), min_size=4, max_size=4))
    rows = [list(row) + [zero] for row in seed.b] + [[zero] * 5]
    for i, (x, s) in enumerate(zip(column, signs)):
        rows[i][4], rows[4][i] = s * x, -s * x
    verdict = explore(Quiver(rows, ambient=d), ExploreBudget(max_nodes=20000)).verdict
    assert verdict is not Verdict.FINITE
