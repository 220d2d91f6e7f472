from pathlib import Path

import pytest

from qmut.cyclo import AngleLabel
from qmut.documents import (
    document_from_dict,
    document_to_dict,
    document_to_quiver,
    load_quiver,
    parse_document,
    quiver_to_document,
    save_quiver,
)
from qmut.errors import DocumentError
from qmut.quiver import Quiver
from .tests import PHI, check

SEEDS = Path(__file__).parent.parent / "qmut" / "seeds"

H3_TEXT = """
{
  "schema_version": 1,
  "name": "H3",
  "rank": 3,
  "ambient": 5,
  "arrows": [
    {"from": 2, "to": 3, "label": {"num": 1, "den": 5}},
    {"from": 1, "to": 2, "label": {"num": 1, "den": 3}}
  ]
}
"""


def test_parse() -> None:
    document = parse_document(H3_TEXT)
    assert document.rank == 3
    assert document.ambient == 5
    assert document.name == "H3"
    assert document_to_quiver(document) == Quiver.path([1, PHI])


def test_round_trip() -> None:
    check(H3_TEXT)
    for path in sorted(SEEDS.glob("*.json")):
        check(path.read_text(encoding="utf-8"))


def test_dumped_form() -> None:
    data = document_to_dict(quiver_to_document(Quiver.path([1, PHI]), name="H3"))
    assert data == {
        "schema_version": 1,
        "name": "H3",
        "rank": 3,
        "ambient": 5,
        "arrows": [
            {"from": 1, "to": 2, "label": {"num": 1, "den": 3}},
            {"from": 2, "to": 3, "label": {"num": 1, "den": 5}},
        ],
    }


def test_unlabeled_weights_use_coefficients() -> None:
    quiver = Quiver.path([PHI + 1])
    document = quiver_to_document(quiver)
    assert document.arrows[0].label is None
    assert document.arrows[0].coeffs == (1, 1)
    assert document_to_quiver(document) == quiver


def test_rational_labels_in_any_ambient() -> None:
    document = document_from_dict(
        {"rank": 2, "ambient": 7, "arrows": [{"from": 1, "to": 2, "label": {"num": 0, "den": 1}}]}
    )
    quiver = document_to_quiver(document)
    assert quiver.ambient == 7
    assert quiver.b[0][1] == 2


def _arrow_document(**arrow: object) -> dict:
    return {"rank": 3, "ambient": 5, "arrows": [arrow]}


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"ambient": 5, "arrows": []},
        {"rank": True, "ambient": 5},
        {"rank": 0, "ambient": 5},
        {"rank": 2, "ambient": 0},
        {"schema_version": 2, "rank": 2, "ambient": 1},
        {"rank": 2, "ambient": 1, "arrows": {}},
        _arrow_document(**{"from": 1, "to": 4, "label": {"num": 1, "den": 3}}),
        _arrow_document(**{"from": 2, "to": 2, "label": {"num": 1, "den": 3}}),
        _arrow_document(**{"from": 1, "to": 2}),
        _arrow_document(**{"from": 1, "to": 2, "label": {"num": 1, "den": 3}, "coeffs": ["1"]}),
        _arrow_document(**{"from": 1, "to": 2, "label": {"num": 1, "den": 2}}),
        _arrow_document(**{"from": 1, "to": 2, "label": {"num": 3, "den": 5}}),
        _arrow_document(**{"from": 1, "to": 2, "coeffs": []}),
        _arrow_document(**{"from": 1, "to": 2, "coeffs": ["x"]}),
        {"rank": 2, "ambient": 1, "name": 3},
    ],
)
def test_invalid_documents(data: object) -> None:
    with pytest.raises(DocumentError):
        document_from_dict(data)


def test_duplicate_arrow() -> None:
    data = {
        "rank": 2,
        "ambient": 1,
        "arrows": [
            {"from": 1, "to": 2, "label": {"num": 1, "den": 3}},
            {"from": 2, "to": 1, "label": {"num": 1, "den": 3}},
        ],
    }
    with pytest.raises(DocumentError):
        document_from_dict(data)


def test_weights_that_do_not_fit_the_ambient() -> None:
    document = document_from_dict(
        {"rank": 2, "ambient": 4, "arrows": [{"from": 1, "to": 2, "label": {"num": 1, "den": 5}}]}
    )
    with pytest.raises(DocumentError):
        document_to_quiver(document)
    negative = document_from_dict(
        {"rank": 2, "ambient": 5, "arrows": [{"from": 1, "to": 2, "coeffs": ["-1"]}]}
    )
    with pytest.raises(DocumentError):
        document_to_quiver(negative)


def test_malformed_json() -> None:
    with pytest.raises(DocumentError):
        parse_document("{ not json")


def test_files(tmp_path: Path) -> None:
    quiver = Quiver.triangle(PHI, 1, PHI)
    path = tmp_path / "q.json"
    save_quiver(quiver, path, name="triangle")
    assert load_quiver(path) == quiver
    assert parse_document(path.read_text()).name == "triangle"
    with pytest.raises(DocumentError):
        load_quiver(tmp_path / "missing.json")


def test_label_values() -> None:
    document = document_from_dict(
        {"rank": 2, "ambient": 10, "arrows": [{"from": 2, "to": 1, "label": {"num": 1, "den": 5}}]}
    )
    quiver = document_to_quiver(document)
    assert quiver.b[1][0] == PHI
    assert quiver.b[0][1] == -PHI
    assert document.arrows[0].label == AngleLabel(1, 5)
