from fractions import Fraction

from hypothesis import strategies as st

from majolat.core import FLOAT, RATIONAL, make_distribution


@st.composite
def float_dists(draw, min_dim=1, max_dim=7):
    d = draw(st.integers(min_dim, max_dim))
    raw = draw(st.lists(st.floats(0.0, 1.0), min_size=d, max_size=d).filter(lambda xs: sum(xs) > 1e-3))
    # entries are exact zeros or well above rounding level: below ~1e-16 of the
    # total an entry is not resolved by prefix sums, and the α < 1 corrections
    # have infinite slope at zero
    raw = [x if x >= 1e-6 else 0.0 for x in raw]
    if sum(raw) == 0:
        raw[0] = 1.0
    total = sum(raw)
    return make_distribution([x / total for x in raw], FLOAT)


@st.composite
def rational_dists(draw, min_dim=1, max_dim=6, max_weight=20):
    d = draw(st.integers(min_dim, max_dim))
    raw = draw(st.lists(st.integers(0, max_weight), min_size=d, max_size=d).filter(lambda xs: sum(xs) > 0))
    total = sum(raw)
    return make_distribution([Fraction(x, total) for x in raw], RATIONAL)


def same_dim_pairs(strategy_factory, **kw):
    """Pairs drawn independently; dimension mismatch is handled by padding in the library."""
    return st.tuples(strategy_factory(**kw), strategy_factory(**kw))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: (int(l.split()[1].rstrip(":abc")), l)):
            terminalreporter.write_line(line)
