"""Property-based tests for qmut on random label-valued quivers.

You can run this file with `python`, `pytest`, or under atheris for
coverage-guided fuzzing.
"""

import itertools

from hypothesis import HealthCheck, given, settings, strategies as st

try:
    import atheris
except ImportError:
    from qmut.check import check
    from qmut.cyclo import AngleLabel, CycloReal, from_label
    from qmut.documents import dump_document, quiver_to_document
    from qmut.quiver import Quiver, canonical_form, mutate, opposite, permute
else:
    with atheris.instrument_imports():
        from qmut.check import check
        from qmut.cyclo import AngleLabel, CycloReal, from_label
        from qmut.documents import dump_document, quiver_to_document
        from qmut.quiver import Quiver, canonical_form, mutate, opposite, permute

AMBIENT = 60
LABELS = [AngleLabel(0, 1), AngleLabel(1, 3), AngleLabel(1, 4), AngleLabel(1, 5), AngleLabel(2, 5)]
WEIGHTS = [CycloReal.constant(0, AMBIENT)] + [from_label(label, AMBIENT) for label in LABELS]


@st.composite
def quivers(draw: st.DrawFn) -> Quiver:
    rank = draw(st.integers(min_value=2, max_value=5))
    zero = WEIGHTS[0]
    rows = [[zero] * rank for _ in range(rank)]
    for i, j in itertools.combinations(range(rank), 2):
        x = draw(st.sampled_from(WEIGHTS))
        if draw(st.booleans()):
            x = -x
        rows[i][j], rows[j][i] = x, -x
    return Quiver(rows, ambient=AMBIENT)


@settings(
    max_examples=1000,  # rank 5 canonical forms are the slow part
    deadline=None,
    suppress_health_check=list(HealthCheck),
)
@given(quiver=quivers(), data=st.data())
def test_mutation_properties(quiver: Quiver, data: st.DataObject) -> None:
    k = data.draw(st.integers(min_value=0, max_value=quiver.rank - 1))
    mutated = mutate(quiver, k)
    assert mutate(mutated, k) == quiver
    assert opposite(mutated) == mutate(opposite(quiver), k)

    perm = data.draw(st.permutations(range(quiver.rank)))
    assert canonical_form(permute(mutated, perm)) == canonical_form(mutated)

    check(dump_document(quiver_to_document(mutated)))


if __name__ == "__main__":
    # Run tests, including shrinking and reporting any known failures.
    test_mutation_properties()

    # If Atheris is available, run coverage-guided fuzzing.
    # (if you want only bounded fuzzing, just use `pytest fuzz.py`)
    try:
        import sys
        import atheris
    except ImportError:
        pass
    else:
        test = test_mutation_properties
        atheris.Setup(sys.argv, test.hypothesis.fuzz_one_input)
        atheris.Fuzz()
