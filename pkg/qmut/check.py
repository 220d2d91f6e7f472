from qmut.documents import (
    document_to_quiver,
    dump_document,
    parse_document,
    quiver_to_document,
)
import difflib


def check(text: str) -> None:
    """Checks that a quiver document is unchanged by loading and re-serializing it.

    The input is first brought into the form quiver_to_document produces, so
    the comparison ignores arrow order and label spelling.

    """
    quiver = document_to_quiver(parse_document(text))
    dumped = dump_document(quiver_to_document(quiver))
    new_quiver = document_to_quiver(parse_document(dumped))
    new_dumped = dump_document(quiver_to_document(new_quiver))

    if quiver != new_quiver or dumped != new_dumped:
        print(dumped)
        print(new_dumped)
        for line in difflib.unified_diff(dumped.splitlines(), new_dumped.splitlines()):
            print(line)
        assert False, f"{dumped} != {new_dumped}"
