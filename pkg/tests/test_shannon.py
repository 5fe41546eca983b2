import itertools
import math

import pytest

from hallustat.errors import BudgetExceeded, DomainError
from hallustat.shannon import (
    SourceModel,
    check_source_coding,
    entropy_bits,
    smallest_high_mass_set,
)


def test_source_validation():
    with pytest.raises(DomainError):
        SourceModel(())
    with pytest.raises(DomainError):
        SourceModel((0.5, 0.6))
    with pytest.raises(DomainError):
        SourceModel((-0.1, 1.1))
    SourceModel((0.25, 0.25, 0.25, 0.25))


def test_entropy_values():
    assert SourceModel((0.5, 0.5)).entropy_bits == 1.0
    assert SourceModel((1.0, 0.0)).entropy_bits == 0.0  # zero atoms contribute nothing
    b = SourceModel((0.9, 0.1))
    expected = -(0.9 * math.log2(0.9) + 0.1 * math.log2(0.1))
    assert b.entropy_bits == pytest.approx(expected, rel=1e-15)
    assert entropy_bits([0.25] * 4) == 2.0


def test_uniform_binary_small_block():
    # need mass > 0.8 out of 8 equal blocks: 7 of them
    r = smallest_high_mass_set(SourceModel((0.5, 0.5)), 3, 0.2)
    assert r.set_size == 7
    assert r.mass == 0.875
    assert r.rate == pytest.approx(math.log2(7) / 3)
    assert r.entropy_gap == pytest.approx(math.log2(7) / 3 - 1.0)


def test_biased_source_compresses():
    r = smallest_high_mass_set(SourceModel((0.9, 0.1)), 20, 0.1)
    assert r.set_size == 3130  # far below 2^20
    assert r.mass > 0.9
    assert r.entropy_gap == pytest.approx(0.11160175350171775, abs=1e-12)
    assert check_source_coding(r, 0.2)
    assert not check_source_coding(r, 0.1)


def test_greedy_set_is_optimal_brute():
    src = SourceModel((0.6, 0.3, 0.1))
    m = 2
    r = smallest_high_mass_set(src, m, 0.25)
    probs = [
        src.pmf[a] * src.pmf[b] for a, b in itertools.product(range(3), repeat=m)
    ]
    # no subset of fewer blocks reaches the mass target
    for size in range(r.set_size):
        best = sum(sorted(probs, reverse=True)[:size])
        assert best <= 1 - 0.25 + 1e-12
    assert r.mass > 1 - 0.25


def test_set_size_monotone_in_delta():
    src = SourceModel((0.7, 0.2, 0.1))
    sizes = [smallest_high_mass_set(src, 5, d).set_size
             for d in (0.05, 0.1, 0.2, 0.4, 0.6)]
    assert sizes == sorted(sizes, reverse=True)


def test_domain_errors():
    src = SourceModel((0.5, 0.5))
    with pytest.raises(DomainError):
        smallest_high_mass_set(src, 0, 0.1)
    with pytest.raises(DomainError):
        smallest_high_mass_set(src, 3, 0.0)
    with pytest.raises(DomainError):
        smallest_high_mass_set(src, 3, 1.0)


def test_budget_guard():
    src = SourceModel((0.9, 0.1))
    with pytest.raises(BudgetExceeded) as err:
        smallest_high_mass_set(src, 25, 0.1)  # 2^25 > 10^7
    assert err.value.required == 2**25


def test_single_symbol_source():
    r = smallest_high_mass_set(SourceModel((1.0,)), 4, 0.5)
    assert r.set_size == 1
    assert r.mass == 1.0
    assert r.rate == 0.0
