from fractions import Fraction

import hypothesis
import pytest
from hypothesis import strategies as st

from rhsing.laurent import LaurentPoly, QI, SymbolMatrix

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

small_fraction = st.fractions(min_value=-5, max_value=5, max_denominator=4)
gaussian = st.builds(QI, small_fraction, small_fraction)


@st.composite
def laurent_polys(draw, lo=-3, hi=3, max_terms=4):
    ks = draw(st.lists(st.integers(lo, hi), max_size=max_terms, unique=True))
    return LaurentPoly({k: draw(gaussian) for k in ks})


@st.composite
def symbol_matrices(draw, n=2, lo=-2, hi=2):
    return SymbolMatrix([[draw(laurent_polys(lo, hi, 3)) for _ in range(n)] for _ in range(n)])


# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE: dict[int, list[str]] = {}


@pytest.fixture
def criterion():
    def record(number: int, ok: bool | None, detail: str):
        status = "INFO" if ok is None else ("PASS" if ok else "FAIL")
        line = f"criterion {number}: {status}  {detail}"
        ACCEPTANCE.setdefault(number, []).append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        for line in ACCEPTANCE[n]:
            terminalreporter.write_line(line)


def frac(p, q=1):
    return Fraction(p, q)
