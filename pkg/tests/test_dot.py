from qmut.dot import attribute_list, export_dot
from qmut.quiver import Quiver
from .tests import PHI


def test_h3() -> None:
    expected = """digraph "H3" {
  node [ shape = "circle" ];
  "1";
  "2";
  "3";
  "1" -> "2";
  "2" -> "3" [ label = "1/5" ];
}
"""
    assert export_dot(Quiver.path([1, PHI]), "H3") == expected


def test_double_arrows() -> None:
    dot = export_dot(Quiver.triangle(2, 2, 2), indentation=4)
    assert dot.startswith('digraph "Q" {\n')
    assert '    "1" -> "2" [ color = "black:black" ];\n' in dot
    assert '    "3" -> "1" [ color = "black:black" ];\n' in dot
    assert dot.count("->") == 3


def test_unlabeled_weight() -> None:
    dot = export_dot(Quiver.path([PHI + 1]))
    assert '"1" -> "2" [ label = "2.618034" ];' in dot


def test_isolated_vertices() -> None:
    dot = export_dot(Quiver.from_arrows(2, []))
    assert dot == 'digraph "Q" {\n  node [ shape = "circle" ];\n  "1";\n  "2";\n}\n'


def test_attribute_list() -> None:
    assert attribute_list({}) == ""
    assert attribute_list({"a": "x", "b": "y"}) == ' [ a = "x", b = "y" ]'
