from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from planarprob.diagrams import TLElement, enumerate_tl
from planarprob.scalars import LaurentPoly

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def laurent(draw, lo: int = -2, hi: int = 3) -> LaurentPoly:
    exps = draw(st.lists(st.integers(lo, hi), max_size=4, unique=True))
    coeffs = {e: Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4))) for e in exps}
    return LaurentPoly(coeffs)


@st.composite
def tl_elements(draw, grade: int | None = None, max_grade: int = 3, min_grade: int = 0) -> TLElement:
    k = grade if grade is not None else draw(st.integers(min_grade, max_grade))
    basis = enumerate_tl(k)
    chosen = draw(st.lists(st.sampled_from(basis), min_size=1, max_size=3, unique=True))
    return TLElement({d: draw(st.integers(1, 3)) * draw(st.sampled_from([1, -1])) for d in chosen})


@pytest.fixture
def a3():
    from planarprob.graphs import load_graph

    return load_graph("a3")


# -- acceptance summary: one line per criterion ---------------------------------------

_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    number, title = mark.args
    ok = report.passed if report.when == "call" else False
    prev = _CRITERIA.get(number, (title, True))[1]
    _CRITERIA[number] = (title, prev and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}")
