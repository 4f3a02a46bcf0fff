import math

import pytest
from hypothesis import given, strategies as st

from qhegrover import circuit as C
from qhegrover.analyze import (
    adw_gate_estimate,
    closed_form_t,
    count_t_gates,
    estimate,
    format_table,
    log_star,
    resource_table,
)
from qhegrover.grover import GroverSpec, build_grover, fixture_circuit


def test_count_fixture():
    assert count_t_gates(fixture_circuit()) == 7
    with pytest.raises(ValueError):
        count_t_gates(build_grover(GroverSpec(3, ("011",))))


def test_closed_form_examples():
    assert closed_form_t(16) == 224
    assert closed_form_t(8) == pytest.approx(28 * math.sqrt(8))
    assert closed_form_t(64, 2) == pytest.approx(7 * 6 * 4 * math.sqrt(32))
    for bad in [(4, 1), (12, 1), (16, 0), (16, 16)]:
        with pytest.raises(ValueError):
            closed_form_t(*bad)


def test_log_star():
    assert [log_star(x) for x in (1, 2, 4, 16, 65536, 65537)] == [0, 1, 2, 3, 4, 5]
    with pytest.raises(ValueError):
        log_star(0.5)


def test_adw_estimate_positive():
    assert adw_gate_estimate(16) == pytest.approx(4 * math.log2(3))


@pytest.mark.parametrize("N", [8, 16, 32, 64, 128])
def test_exact_vs_closed_form(N):
    e = estimate(N)
    n = int(math.log2(N))
    assert e.t_per_iteration == 28 * (n - 2)
    assert e.total_t_exact == e.t_per_iteration * e.iterations
    assert e.total_t_closed_form / e.total_t_exact == pytest.approx(math.sqrt(N) / e.iterations)


def test_multi_marked_flagged():
    e = estimate(32, 3)
    assert e.extrapolated and e.toffolis_per_iteration == 2 * 3 * 3 + 2 * 3
    assert "*" in format_table([e])


@given(st.integers(3, 14))
def test_subpolynomial_growth(n):
    """Local log-log slope of the T count stays above 1/2 and decreases toward it."""
    N = 2 ** n

    def slope(M):
        return math.log2(closed_form_t(2 * M) / closed_form_t(M))

    assert 0.5 < slope(2 * N) < slope(N)
    assert closed_form_t(N) / math.sqrt(N) == pytest.approx(28 * (n - 2))


def test_table_format():
    rows = resource_table([8, 16], adw=True)
    text = format_table(rows)
    assert text.splitlines()[0].split()[0] == "N"
    assert len(text.splitlines()) == 3 and "ADW" in text
    assert rows[1].as_dict()["total_t_exact"] == 168
