import math

import numpy as np
import pytest

from app.core.errors import ParamsError
from app.core.words import ERASED, as_received, index_range, parse_received
from app.coding.codebook import derive_params
from app.coding.decoder import (
    beats,
    build_list,
    compute_tau,
    decode,
    disambiguation_set,
    list_size_bound,
    prefix_suffix_bounds_hold,
    split_and_pick,
    suffix_unerased,
)
from app.coding.reference import reference_decode
from app.models.decode_models import DecodeResult

TINY = dict(p=0.625, epsilon=0.25, rate=0.125)  # tau target 1 at n=4


# ── stages ──


def test_compute_tau():
    y = parse_received("e1e0e11")
    assert compute_tau(y, 1) == 2
    assert compute_tau(y, 3) == 6
    assert compute_tau(y, 5) is None
    with pytest.raises(ParamsError):
        compute_tau(y, 0)


def test_build_list_counts_prefix_mismatches(make_code):
    cb = make_code(["0000", "0011", "1111"], **TINY)
    y = parse_received("0e11")
    assert build_list(cb, y, 2).tolist() == [1, 2]
    assert build_list(cb, y, 4).tolist() == [2]


def test_disambiguation_set_first_pair(five_level_code):
    y = as_received(five_level_code.word(1))
    dis = disambiguation_set(five_level_code, y, 0, 1, 2)
    assert (dis.k1, dis.k2) == (1, 2)
    assert dis.v.tolist() == [1, 20]


def test_disambiguation_set_skips_erased(five_level_code):
    symbols = five_level_code.word(1).copy()
    symbols[19] = ERASED
    dis = disambiguation_set(five_level_code, as_received(symbols), 0, 1, 2)
    assert (dis.k1, dis.k2) == (2, 3)
    assert dis.v.tolist() == [3, 23]


def test_disambiguation_needs_distinct_messages(five_level_code):
    with pytest.raises(ParamsError):
        disambiguation_set(five_level_code, as_received(five_level_code.word(1)), 0, 2, 2)


def test_split_ties_go_to_agreeing_half(five_level_code):
    v, agree = split_and_pick(five_level_code, 1, 2, np.array([1, 20]))
    assert agree
    assert v.tolist() == [1]
    v, agree = split_and_pick(five_level_code, 1, 2, np.array([1, 2, 4]))
    assert not agree
    assert v.tolist() == [2, 4]


def test_beats_prefers_lower_noise_level(make_code):
    cb = make_code(["00000000", "11110000"], noise_levels=(0.25, 0.5))
    y = parse_received("11000000")
    v = index_range(1, 8)
    assert beats(cb, y, 1, 2, 1, 2, v)
    assert not beats(cb, y, 2, 1, 2, 1, v)


def test_beats_exact_tie_goes_to_second(make_code):
    cb = make_code(["00", "11"], noise_levels=(0.25, 0.75))
    y = parse_received("10")
    v = index_range(1, 2)
    assert not beats(cb, y, 1, 2, 1, 2, v)
    assert not beats(cb, y, 2, 1, 2, 1, v)


def test_beats_zero_noise_level(make_code):
    cb = make_code(["00", "11"], noise_levels=(0.0, 0.25))
    v = index_range(1, 2)
    assert not beats(cb, parse_received("10"), 1, 2, 1, 2, v)
    assert beats(cb, parse_received("00"), 1, 2, 1, 2, v)


# ── full decoder ──


CYCLE_LEVELS = [[1, 1, 2, 2], [1, 2, 1, 2], [1, 1, 2, 1]]


def test_three_cycle_has_no_condorcet_winner(make_code):
    cb = make_code(["0000"] * 3, levels=CYCLE_LEVELS, **TINY)
    out = decode(cb, parse_received("0000"))
    assert out.result == DecodeResult.ERROR_NO_CONDORCET
    assert out.tau == 1
    assert out.list == [1, 2, 3]
    winners = {(r.m1, r.m2): r.winner for r in out.pairwise}
    assert winners == {(1, 2): 1, (1, 3): 3, (2, 3): 2}


def test_condorcet_winner(make_code):
    levels = CYCLE_LEVELS[:2] + [[1, 2, 2, 2]]
    cb = make_code(["0000"] * 3, levels=levels, **TINY)
    out = decode(cb, parse_received("0000"))
    assert out.result == DecodeResult.MESSAGE
    assert out.message == 1
    assert out.label == "1"
    assert len(out.pairwise) == 3


def test_no_tau(make_code):
    cb = make_code(["0000", "1111"], **TINY)
    out = decode(cb, parse_received("eeee"))
    assert out.result == DecodeResult.ERROR_NO_TAU
    assert out.tau is None
    assert out.label == "error_no_tau"


def test_empty_list(make_code):
    cb = make_code(["0000", "1111"], p=0.25, epsilon=0.5, rate=0.25)
    out = decode(cb, parse_received("01ee"))
    assert out.result == DecodeResult.ERROR_EMPTY_LIST
    assert out.tau == 2


def test_singleton_list_short_circuits(make_code):
    cb = make_code(["0000", "1111"], **TINY)
    out = decode(cb, parse_received("0000"))
    assert out.result == DecodeResult.MESSAGE
    assert out.message == 1
    assert out.list == [1]
    assert out.pairwise == []


def test_identical_partitions_leave_no_disambiguation(make_code):
    cb = make_code(["0000", "0000"], levels=[[1, 1, 2, 2], [1, 1, 2, 2]], **TINY)
    out = decode(cb, parse_received("0000"))
    assert out.result == DecodeResult.ERROR_NO_DISAMBIG_PAIR
    assert out.list == [1, 2]


def test_length_mismatch(make_code):
    cb = make_code(["0000", "1111"], **TINY)
    with pytest.raises(ParamsError):
        decode(cb, parse_received("000"))


def _random_instance(rng, make_code):
    n = int(rng.integers(4, 13))
    M = int(rng.integers(2, 5))
    K = int(rng.integers(2, 4))
    noise = tuple(sorted(rng.uniform(0.0, 0.45, K).round(3).tolist()))
    words = rng.integers(0, 2, (M, n))
    levels = rng.integers(1, K + 1, (M, n)).tolist()
    cb = make_code(
        ["".join(map(str, w)) for w in words],
        levels=levels,
        noise_levels=noise,
        list_threshold=int(rng.integers(1, n // 2 + 2)),
        disambig_threshold=int(rng.integers(1, 3)),
    )
    sent = words[int(rng.integers(M))].copy()
    flips = rng.random(n) < 0.1
    y = np.where(flips, 1 - sent, sent)
    y[rng.random(n) < rng.uniform(0.0, 0.6)] = ERASED
    return cb, as_received(y)


@pytest.mark.parametrize("seed", range(10))
def test_matches_reference_decoder(make_code, seed):
    rng = np.random.default_rng(seed)
    for _ in range(60):
        cb, y = _random_instance(rng, make_code)
        fast, slow = decode(cb, y), reference_decode(cb, y)
        assert fast.result == slow.result
        assert fast.message == slow.message
        assert fast.tau == slow.tau
        assert fast.list == slow.list


# ── analysis helpers ──


def test_prefix_suffix_bounds_at_full_budget():
    params = derive_params(64, 0.25, 0.25, 4)
    y = as_received([ERASED] * params.budget + [0] * (64 - params.budget))
    tau = compute_tau(y, params.tau_target)
    assert tau == 56
    assert suffix_unerased(y, tau) == 8
    assert prefix_suffix_bounds_hold(params, y, tau)

    over = as_received([ERASED] * (params.budget + 1) + [0] * (63 - params.budget))
    assert not prefix_suffix_bounds_hold(params, over, compute_tau(over, params.tau_target))


def test_list_size_bound():
    assert list_size_bound(1024, 0.15) == pytest.approx(math.log2(10) * 0.075)
