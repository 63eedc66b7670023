import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import separated_points
from sendovlab.cpoly import ZeroConfig, roots_of_unity
from sendovlab.errors import ContractError, ParseError
from sendovlab.strata import (
    Structure,
    classify_stratum,
    divided_difference,
    lagrange_residual,
    leading_dd_identity,
    parse_stratum,
    partitions,
)


def test_classify_two_zeros():
    s = classify_stratum(ZeroConfig.simple([1, -1]))
    assert (s.mu, s.nu, s.m, s.k, s.s) == ((1, 1), (1,), 2, 1, 0)


def test_classify_fifth_roots():
    s = classify_stratum(roots_of_unity(5))
    assert (s.mu, s.nu, s.m, s.k, s.s) == ((1,) * 5, (4,), 5, 1, 3)


def test_classify_double_zero():
    s = classify_stratum(ZeroConfig((0, 1), (2, 1)))
    assert (s.mu, s.nu, s.m, s.k, s.s) == ((2, 1), (1,), 2, 1, 0)


def test_classify_closure_on_random_configs(rng):
    for _ in range(200):
        m = int(rng.integers(2, 8))
        mu = tuple(int(x) for x in rng.integers(1, 3, size=m))
        s = classify_stratum(ZeroConfig(tuple(separated_points(rng, m, 0.05)), mu))
        assert s.n == sum(mu) and sum(s.nu) == s.m - 1
        assert s.s == s.m - 1 - s.k >= 0
        # s = 0 exactly when every nu_j is 1
        assert (s.s == 0) == all(v == 1 for v in s.nu)


def test_structure_validation():
    with pytest.raises(ContractError):
        Structure((1, 1, 1), (1,))
    with pytest.raises(ContractError):
        Structure((0, 1), (1,))


def test_parse_stratum_round_trip():
    s = parse_stratum("5:1,1,1,1,1/4")
    assert s == Structure((1,) * 5, (4,))
    assert parse_stratum(s.notation) == s


@pytest.mark.parametrize("text", ["5:1,1,1,1/4", "x:1/1", "3:1,1,1", "3:1,1,1/1"])
def test_parse_stratum_errors(text):
    with pytest.raises(ParseError):
        parse_stratum(text)


def test_partitions_counts():
    # partition numbers p(1..7)
    assert [len(list(partitions(t))) for t in range(1, 8)] == [1, 2, 3, 5, 7, 11, 15]
    assert list(partitions(3)) == [(3,), (2, 1), (1, 1, 1)]


# --- divided differences -------------------------------------------------------


def test_dd_examples():
    q = [1, 0, 0]
    assert divided_difference(q, [0, 1, 2]) == pytest.approx(1)
    assert divided_difference(q, [0, 0, 1]) == pytest.approx(1)
    assert divided_difference(q, [0, 1]) == pytest.approx(1)


def _dd_oracle(q, nodes):
    """Divided difference from the explicit sum over distinct nodes."""
    total = 0j
    for i, x in enumerate(nodes):
        total += np.polyval(q, x) / np.prod([x - y for j, y in enumerate(nodes) if j != i])
    return total


def test_dd_matches_residue_formula(rng):
    for _ in range(100):
        deg = int(rng.integers(1, 7))
        q = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        nodes = list(separated_points(rng, int(rng.integers(1, deg + 2)), 0.1))
        assert abs(divided_difference(q, nodes) - _dd_oracle(q, nodes)) <= 1e-10 * (1 + abs(_dd_oracle(q, nodes)))


def test_dd_confluent_is_limit_of_distinct(rng):
    for _ in range(50):
        q = rng.normal(size=5) + 1j * rng.normal(size=5)
        nodes = list(separated_points(rng, 3, 0.2))
        exact = divided_difference(q, nodes[:2] + [nodes[1]] + nodes[2:])
        h = 1e-5
        approx = _dd_oracle(q, nodes[:2] + [nodes[1] + h] + nodes[2:])
        assert abs(exact - approx) <= 1e-3 * (1 + abs(exact))


def test_dd_top_order_is_leading_coefficient(rng):
    # for degree d the divided difference on d + 1 nodes (any repetitions) is the leading coefficient
    for _ in range(50):
        q = rng.normal(size=5) + 1j * rng.normal(size=5)
        x = separated_points(rng, 2, 0.2)
        nodes = [x[0], x[0], x[0], x[1], x[1]]
        assert abs(divided_difference(q, nodes) - q[0]) <= 1e-9 * (1 + abs(q[0]))


@given(st.permutations(range(5)))
def test_dd_symmetric(perm):
    rng = np.random.default_rng(3)
    q = rng.normal(size=6) + 1j * rng.normal(size=6)
    nodes = list(separated_points(rng, 4, 0.1))
    nodes = nodes + [nodes[1]]
    ref = divided_difference(q, nodes)
    got = divided_difference(q, [nodes[i] for i in perm])
    assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref))


def test_leading_dd_examples():
    nodes = [0.3, -0.2 + 0.5j, 0.7j]
    omega = np.poly(nodes)
    for i in range(3):
        assert leading_dd_identity(omega, nodes, i) <= 1e-12
    # q = z^3 + z on nodes (0, 1, -1) with node 1 doubled
    assert leading_dd_identity([1, 0, 1, 0], [0, 1, -1], 1) <= 1e-10


def test_leading_dd_random_cubic(rng):
    for _ in range(100):
        q = np.concatenate([[1], rng.normal(size=3) + 1j * rng.normal(size=3)])
        nodes = separated_points(rng, 3, 1e-2)
        assert leading_dd_identity(q, nodes, int(rng.integers(0, 3))) <= 1e-8


def test_leading_dd_contracts():
    with pytest.raises(ContractError):
        leading_dd_identity([2, 0, 0], [0, 1], 0)
    with pytest.raises(ContractError):
        leading_dd_identity([1, 0, 0], [0, 0], 0)
    with pytest.raises(ContractError):
        leading_dd_identity([1, 0, 0], [0, 1], 2)


def test_lagrange_examples():
    nodes = [0.1, 0.5j, -0.4]
    assert lagrange_residual(np.poly(nodes), nodes, 2 - 1j) <= 1e-13
    # q = z^2, nodes (0, 1), z = 5: 25 = 1 * (5 - 0) / (1 - 0) + 5 * 4
    assert lagrange_residual([1, 0, 0], [0, 1], 5) == 0.0


def test_lagrange_random_quartic(rng):
    for _ in range(100):
        q = np.concatenate([[1], rng.normal(size=4) + 1j * rng.normal(size=4)])
        nodes = separated_points(rng, 4, 1e-2)
        z = complex(rng.normal(scale=2) + 1j * rng.normal(scale=2))
        assert lagrange_residual(q, nodes, z) <= 1e-8 * (1 + abs(z)) ** 4


def test_lagrange_requires_monic():
    with pytest.raises(ContractError):
        lagrange_residual([2, 0, 0], [0, 1], 5)


def test_factorial_weights_in_confluent_runs():
    # q = z^4 at a triple node: q[x, x, x] = q''(x) / 2 = 6 x^2
    x = 0.7 - 0.2j
    assert divided_difference([1, 0, 0, 0, 0], [x, x, x]) == pytest.approx(6 * x * x, abs=1e-14)
    assert math.isclose(abs(divided_difference([1, 0, 0, 0, 0], [x] * 5)), 1.0)


def test_dd_single_node_is_value():
    for x in itertools.product([0.5, -1], [0, 0.3j]):
        z = sum(x)
        assert divided_difference([1, 2, 3], [z]) == pytest.approx(z * z + 2 * z + 3)
