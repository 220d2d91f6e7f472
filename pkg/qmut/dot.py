"""

GraphViz DOT export of quivers.

Arrows of weight 1 are left unlabeled, arrows of weight 2 are drawn as double
edges and every other arrow carries its label m/d.

"""
from contextlib import contextmanager
from typing import Dict, Generator, List

from .cyclo import CycloReal, to_label
from .quiver import Quiver


def attribute_list(attrs: Dict[str, str]) -> str:
    """Formats a dictionary as a DOT attribute list: [ foo = "x", bar = "y" ]."""
    if not attrs:
        return ""
    return " [ " + ", ".join(f'{key} = "{value}"' for key, value in attrs.items()) + " ]"


def export_dot(quiver: Quiver, name: str = "Q", indentation: int = 2) -> str:
    """Renders a quiver as a DOT digraph with vertices numbered from 1."""
    writer = DotWriter(indentation=indentation)
    return writer.run(quiver, name)


class DotWriter:
    def __init__(self, indentation: int) -> None:
        self.lines: List[str] = []
        self.current_line: List[str] = []
        self.current_indentation = 0
        self.indentation = indentation

    def run(self, quiver: Quiver, name: str) -> str:
        self.write_graph(quiver, name)
        if self.current_line:
            self.write_newline()
        return "".join(self.lines)

    def write(self, code: str) -> None:
        assert isinstance(code, str), f"invalid code {code!r}"
        self.current_line.append(code)

    def write_indentation(self) -> None:
        self.write(" " * self.current_indentation)

    def write_newline(self) -> None:
        line = "".join(self.current_line) + "\n"
        self.lines.append(line)
        self.current_line = []

    def write_statement(self, code: str) -> None:
        self.write_indentation()
        self.write(code)
        self.write(";")
        self.write_newline()

    @contextmanager
    def add_indentation(self) -> Generator[None, None, None]:
        self.current_indentation += self.indentation
        try:
            yield
        finally:
            self.current_indentation -= self.indentation

    def write_graph(self, quiver: Quiver, name: str) -> None:
        self.write(f'digraph "{name}" {{')
        self.write_newline()
        with self.add_indentation():
            self.write_statement('node [ shape = "circle" ]')
            for vertex in range(quiver.rank):
                self.write_statement(f'"{vertex + 1}"')
            for source, target, w in sorted(quiver.arrows(), key=lambda arrow: arrow[:2]):
                attrs = self.edge_attributes(w)
                self.write_statement(f'"{source + 1}" -> "{target + 1}"{attribute_list(attrs)}')
        self.write("}")
        self.write_newline()

    def edge_attributes(self, w: CycloReal) -> Dict[str, str]:
        label = to_label(w)
        if label is None:
            return {"label": f"{float(w):.6f}"}
        if label.num == 0:
            return {"color": "black:black"}
        if label.num == 1 and label.den == 3:
            return {}
        return {"label": str(label)}

