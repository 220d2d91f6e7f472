"""

JSON documents for quivers, Gram matrices and reports.

A quiver document looks like

    {
        "schema_version": 1,
        "rank": 3,
        "ambient": 5,
        "arrows": [
            {"from": 1, "to": 2, "label": {"num": 1, "den": 5}},
            {"from": 2, "to": 3, "label": {"num": 1, "den": 3}}
        ]
    }

with 1-based vertices. An arrow whose weight has no label carries its
coefficients in the power basis of 2cos(pi/ambient) instead, as
{"coeffs": ["1", "1/2"]}. Labels with a rational value (0/1, 1/3) are valid
in every ambient; all other label denominators must divide the ambient.

"""
from dataclasses import dataclass, field
from fractions import Fraction
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .config import SCHEMA_VERSION
from .cyclo import AngleLabel, Coeffs, CycloReal, from_label, lift, sign, to_label
from .errors import DocumentError, IncompatibleAmbientError
from .quiver import Quiver

PathLike = Union[str, Path]


@dataclass(frozen=True)
class ArrowEntry:
    """One arrow, 1-based; exactly one of label and coeffs is set."""

    source: int
    target: int
    label: Optional[AngleLabel] = None
    coeffs: Optional[Coeffs] = None


@dataclass
class QuiverDocument:
    rank: int
    ambient: int
    arrows: List[ArrowEntry] = field(default_factory=list)
    name: Optional[str] = None
    provenance: Optional[str] = None


def _int_field(data: Dict[str, Any], key: str, where: str) -> int:
    value = data.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"{where}: {key!r} must be an integer, not {value!r}")
    return value


def _parse_label(raw: Any, where: str) -> AngleLabel:
    if not isinstance(raw, dict):
        raise DocumentError(f"{where}: label must be an object with num and den")
    num, den = _int_field(raw, "num", where), _int_field(raw, "den", where)
    try:
        label = AngleLabel(num, den)
    except ValueError as e:
        raise DocumentError(f"{where}: {e}") from None
    if label.fraction >= Fraction(1, 2):
        raise DocumentError(f"{where}: label {label} is not the label of a positive weight")
    return label


def _parse_coeffs(raw: Any, where: str) -> Coeffs:
    if not isinstance(raw, list) or not raw:
        raise DocumentError(f"{where}: coeffs must be a non-empty list")
    try:
        return tuple(Fraction(str(c)) for c in raw)
    except (ValueError, ZeroDivisionError):
        raise DocumentError(f"{where}: coeffs {raw!r} are not rational numbers") from None


def document_from_dict(data: Any) -> QuiverDocument:
    """Validates a decoded JSON value and builds the document."""
    if not isinstance(data, dict):
        raise DocumentError("a quiver document must be a JSON object")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {version!r}")
    rank = _int_field(data, "rank", "document")
    ambient = _int_field(data, "ambient", "document")
    if rank < 1:
        raise DocumentError(f"rank must be positive, not {rank}")
    if ambient < 1:
        raise DocumentError(f"ambient must be positive, not {ambient}")
    raw_arrows = data.get("arrows", [])
    if not isinstance(raw_arrows, list):
        raise DocumentError("arrows must be a list")
    arrows = []
    pairs = set()
    for index, raw in enumerate(raw_arrows):
        where = f"arrow {index + 1}"
        if not isinstance(raw, dict):
            raise DocumentError(f"{where}: must be an object")
        source, target = _int_field(raw, "from", where), _int_field(raw, "to", where)
        for vertex in (source, target):
            if not 1 <= vertex <= rank:
                raise DocumentError(f"{where}: vertex {vertex} is not in 1..{rank}")
        if source == target:
            raise DocumentError(f"{where}: loop at vertex {source}")
        pair = frozenset((source, target))
        if pair in pairs:
            raise DocumentError(f"{where}: second arrow between {source} and {target}")
        pairs.add(pair)
        if ("label" in raw) == ("coeffs" in raw):
            raise DocumentError(f"{where}: give exactly one of label and coeffs")
        if "label" in raw:
            arrows.append(ArrowEntry(source, target, label=_parse_label(raw["label"], where)))
        else:
            arrows.append(ArrowEntry(source, target, coeffs=_parse_coeffs(raw["coeffs"], where)))
    for key in ("name", "provenance"):
        if key in data and not isinstance(data[key], str):
            raise DocumentError(f"{key} must be a string")
    return QuiverDocument(rank, ambient, arrows, data.get("name"), data.get("provenance"))


def parse_document(text: str) -> QuiverDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"malformed JSON: {e}") from None
    return document_from_dict(data)


def _weight_of(entry: ArrowEntry, ambient: int) -> CycloReal:
    where = f"arrow {entry.source}->{entry.target}"
    if entry.label is not None:
        try:
            return from_label(entry.label, ambient, promote=False)
        except IncompatibleAmbientError:
            raise DocumentError(
                f"{where}: label denominator {entry.label.den} does not divide ambient {ambient}"
            ) from None
    assert entry.coeffs is not None, f"{where} has neither label nor coeffs"
    try:
        value = CycloReal(ambient, entry.coeffs)
    except ValueError as e:
        raise DocumentError(f"{where}: {e}") from None
    if sign(value) <= 0:
        raise DocumentError(f"{where}: weight must be positive")
    return value


def document_to_quiver(document: QuiverDocument) -> Quiver:
    arrows = [
        (entry.source - 1, entry.target - 1, _weight_of(entry, document.ambient))
        for entry in document.arrows
    ]
    return Quiver.from_arrows(document.rank, arrows, ambient=document.ambient)


def quiver_to_document(
    quiver: Quiver, name: Optional[str] = None, provenance: Optional[str] = None
) -> QuiverDocument:
    """Labels are used wherever the weight has one; arrows are sorted by vertex."""
    entries = []
    for source, target, w in sorted(quiver.arrows(), key=lambda arrow: arrow[:2]):
        label = to_label(w)
        if label is not None:
            entries.append(ArrowEntry(source + 1, target + 1, label=label))
        else:
            entries.append(ArrowEntry(source + 1, target + 1, coeffs=w.coeffs))
    return QuiverDocument(quiver.rank, quiver.ambient, entries, name, provenance)


def _weight_to_dict(label: Optional[AngleLabel], coeffs: Optional[Coeffs]) -> Dict[str, Any]:
    if label is not None:
        return {"label": {"num": label.num, "den": label.den}}
    assert coeffs is not None
    return {"coeffs": [str(c) for c in coeffs]}


def document_to_dict(document: QuiverDocument) -> Dict[str, Any]:
    data: Dict[str, Any] = {"schema_version": SCHEMA_VERSION}
    if document.name is not None:
        data["name"] = document.name
    if document.provenance is not None:
        data["provenance"] = document.provenance
    data["rank"] = document.rank
    data["ambient"] = document.ambient
    data["arrows"] = [
        {"from": entry.source, "to": entry.target, **_weight_to_dict(entry.label, entry.coeffs)}
        for entry in document.arrows
    ]
    return data


def dump_document(document: QuiverDocument) -> str:
    return json.dumps(document_to_dict(document), indent=2) + "\n"


def load_quiver(path: PathLike) -> Quiver:
    """Reads a quiver document; unreadable files raise DocumentError."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e.strerror}") from None
    return document_to_quiver(parse_document(text))


def save_quiver(quiver: Quiver, path: PathLike, name: Optional[str] = None) -> None:
    Path(path).write_text(dump_document(quiver_to_document(quiver, name)), encoding="utf-8")


# Gram matrices


def value_to_dict(value: CycloReal) -> Dict[str, Any]:
    """A signed value as a label of its absolute value plus a sign, or raw coefficients."""
    label = to_label(abs(value))
    if label is not None and value:
        return {"label": {"num": label.num, "den": label.den}, "sign": sign(value)}
    return {"coeffs": [str(c) for c in value.coeffs]}


def value_from_dict(data: Any, ambient: int, where: str) -> CycloReal:
    if not isinstance(data, dict):
        raise DocumentError(f"{where}: entry must be an object")
    if "label" in data:
        raw = data["label"]
        if not isinstance(raw, dict):
            raise DocumentError(f"{where}: label must be an object with num and den")
        try:
            label = AngleLabel(_int_field(raw, "num", where), _int_field(raw, "den", where))
            value = from_label(label, ambient, promote=False)
        except (ValueError, IncompatibleAmbientError) as e:
            raise DocumentError(f"{where}: {e}") from None
        s = data.get("sign", 1)
        if s not in (1, -1):
            raise DocumentError(f"{where}: sign must be 1 or -1")
        return value if s > 0 else -value
    if "coeffs" in data:
        return CycloReal(ambient, _parse_coeffs(data["coeffs"], where))
    raise DocumentError(f"{where}: give a label or coeffs")


def gram_to_dict(gram: Tuple[Tuple[CycloReal, ...], ...], ambient: int) -> Dict[str, Any]:
    """The upper triangle of a Gram matrix; missing entries are zero."""
    n = len(gram)
    entries = []
    for i in range(n):
        for j in range(i + 1, n):
            value = lift(gram[i][j], ambient)
            if value:
                entries.append({"i": i + 1, "j": j + 1, **value_to_dict(value)})
    return {"schema_version": SCHEMA_VERSION, "rank": n, "ambient": ambient, "entries": entries}


def gram_from_dict(data: Any) -> Tuple[int, List[List[CycloReal]]]:
    """Returns the ambient and the full symmetric matrix with diagonal 2."""
    if not isinstance(data, dict):
        raise DocumentError("a Gram document must be a JSON object")
    rank = _int_field(data, "rank", "document")
    ambient = _int_field(data, "ambient", "document")
    if rank < 1 or ambient < 1:
        raise DocumentError("rank and ambient must be positive")
    zero = CycloReal.constant(0, ambient)
    rows = [[zero] * rank for _ in range(rank)]
    for i in range(rank):
        rows[i][i] = CycloReal.constant(2, ambient)
    raw_entries = data.get("entries", [])
    if not isinstance(raw_entries, list):
        raise DocumentError("entries must be a list")
    for index, raw in enumerate(raw_entries):
        where = f"entry {index + 1}"
        if not isinstance(raw, dict):
            raise DocumentError(f"{where}: must be an object")
        i, j = _int_field(raw, "i", where), _int_field(raw, "j", where)
        if not (1 <= i <= rank and 1 <= j <= rank and i != j):
            raise DocumentError(f"{where}: ({i}, {j}) is not an off-diagonal position")
        rows[i - 1][j - 1] = rows[j - 1][i - 1] = value_from_dict(raw, ambient, where)
    return ambient, rows
