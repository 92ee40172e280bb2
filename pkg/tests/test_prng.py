import io
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aprng.errors import AlphabetError, ParameterError
from aprng.morphic import fibonacci_stream
from aprng.prng import (FOUND, NAMED_LCGS, UNDETERMINED, Lcg, ShuffledPrng,
                        lcg_next, lcg_state_period, named_lcg,
                        right_special_witness, shuffled_next, stream_export)

RANDU_FIRST = [65539, 393225, 1769499, 7077969]


def py_states(m, a, c, seed, n):
    x = seed
    out = []
    for _ in range(n):
        x = (a * x + c) % m
        out.append(x)
    return out


def py_outputs(m, a, c, seed, n):
    shift = max(0, (m - 1).bit_length() - 32)
    return [s >> shift for s in py_states(m, a, c, seed, n)]


def test_randu_known_outputs():
    g = Lcg(2 ** 31, 65539, 0, 1)
    assert [g.next() for _ in range(4)] == RANDU_FIRST
    assert list(named_lcg("randu").outputs(4)) == RANDU_FIRST
    assert lcg_next(named_lcg("randu")) == RANDU_FIRST[0]


@pytest.mark.parametrize("name", sorted(NAMED_LCGS))
def test_outputs_match_scalar_loop(name):
    m, a, c = NAMED_LCGS[name]
    got = named_lcg(name, seed=1).outputs(5000)
    assert got.dtype == np.uint32
    assert got.tolist() == py_outputs(m, a, c, 1, 5000)


@pytest.mark.parametrize("n", [1, 5, 4095, 4096, 4097, 10000])
def test_lane_chunk_splits(n):
    # power-of-two moduli take the lane-parallel path; every split of n
    # across the 4096 lanes must agree with the scalar recurrence
    for m, a, c, seed in [(2 ** 5, 21, 13, 7), (2 ** 31, 65539, 0, 1),
                          (2 ** 33, 1664525, 1013904223, 9), (2 ** 64, 3935559000370003845, 1, 1)]:
        g = Lcg(m, a, c, seed)
        assert g.outputs(n).tolist() == py_outputs(m, a, c, seed, n)
        assert g.state == py_states(m, a, c, seed, n)[-1]


def test_nonpow2_loop_and_next_consistency():
    m, a, c = NAMED_LCGS["l47-115"]
    g1 = Lcg(m, a, c, 1)
    g2 = Lcg(m, a, c, 1)
    assert [g1.next() for _ in range(50)] == g2.outputs(50).tolist()
    g3 = Lcg(1000, 333, 7, 1)
    assert g3.outputs(200).tolist() == py_outputs(1000, 333, 7, 1, 200)


def test_outputs_resume_mid_stream():
    g = named_lcg("l64_39")
    whole = named_lcg("l64_39").outputs(7000)
    parts = np.concatenate([g.outputs(k) for k in (1, 4095, 2000, 904)])
    assert np.array_equal(parts, whole)


@pytest.mark.parametrize("name", ["randu", "l47-115", "l64_39"])
@pytest.mark.parametrize("k", [0, 1, 2, 977, 4096, 10 ** 5])
def test_jump_equals_stepping(name, k):
    g1 = named_lcg(name)
    g1.jump(k)
    g2 = named_lcg(name)
    if k:
        g2.outputs(k)
    assert g1.state == g2.state


@given(st.integers(2, 1 << 16), st.data())
@settings(max_examples=60, deadline=None)
def test_jump_composes_and_matches_steps(m, data):
    a = data.draw(st.integers(0, m - 1))
    c = data.draw(st.integers(0, m - 1))
    seed = data.draw(st.integers(0, m - 1))
    k = data.draw(st.integers(0, 300))
    j = data.draw(st.integers(0, 5000))
    g1 = Lcg(m, a, c, seed)
    g1.jump(k)
    stepped = py_states(m, a, c, seed, k)
    assert g1.state == (stepped[-1] if k else seed)
    g1.jump(j)
    g2 = Lcg(m, a, c, seed)
    g2.jump(k + j)
    assert g1.state == g2.state


def test_warm_up_equals_brute_force():
    g1 = named_lcg("l64_39")
    g1.warm_up(10 ** 5)
    g2 = named_lcg("l64_39")
    g2.outputs(10 ** 5)
    assert g1.state == g2.state
    assert np.array_equal(g1.outputs(10), g2.outputs(10))


def test_fork_is_independent():
    g = named_lcg("l63")
    g.outputs(17)
    f = g.fork()
    assert f.state == g.state
    f.outputs(100)
    assert f.state != g.state
    clone = Lcg(g.m, g.a, g.c, g.state)
    assert g.next() == clone.next()


def test_validation_errors():
    with pytest.raises(ParameterError):
        Lcg(1, 0, 0)
    with pytest.raises(ParameterError):
        Lcg(10, 10, 0)
    with pytest.raises(ParameterError):
        Lcg(10, 3, -1)
    with pytest.raises(ParameterError):
        Lcg(10, 3, 0, seed=10)
    with pytest.raises(ParameterError):
        named_lcg("nope")
    g = named_lcg("randu")
    with pytest.raises(ParameterError):
        g.outputs(-1)
    with pytest.raises(ParameterError):
        g.jump(-1)


def test_out_range_values():
    assert named_lcg("randu").out_range == 2 ** 31
    assert named_lcg("l47-115").out_range == 2 ** 32
    assert named_lcg("l63-25").out_range == 2 ** 32
    assert named_lcg("l59").out_range == 2 ** 32
    assert named_lcg("l64_39").out_range == 2 ** 32
    assert Lcg(1000, 333, 7).out_range == 1024


def test_shuffle_matches_interleaving_oracle():
    n = 1000
    letters = bytes(fibonacci_stream().take(n))
    srcs = [Lcg(2 ** 31, 65539, 0, 1), Lcg(2 ** 31, 65539, 0, 7)]
    expected = [srcs[b].next() for b in letters]
    z = ShuffledPrng(fibonacci_stream(),
                     [Lcg(2 ** 31, 65539, 0, 1), Lcg(2 ** 31, 65539, 0, 7)])
    assert z.outputs(n).tolist() == expected
    assert shuffled_next(z) == srcs[letters and fibonacci_stream().letter_at(n)].next()


def test_shuffle_counters_track_steering_parikh():
    n = (1 << 20) + 12345          # crosses the internal chunk boundary
    z = ShuffledPrng(fibonacci_stream(),
                     [named_lcg("l64_39", 1), named_lcg("l64_39", 2)])
    z.outputs(300)
    z.outputs(n - 300)
    assert tuple(z.counters) == fibonacci_stream().prefix_parikh(n)
    assert sum(z.counters) == n


def test_shuffle_warm_up_equals_brute_force():
    def make():
        return ShuffledPrng(fibonacci_stream(),
                            [named_lcg("l64_39", 1), named_lcg("l64_39", 2)])
    z1, z2 = make(), make()
    z1.warm_up(10 ** 4)
    z2.outputs(10 ** 4)
    assert tuple(z1.counters) == tuple(z2.counters)
    assert np.array_equal(z1.outputs(200), z2.outputs(200))
    assert tuple(z1.counters) == fibonacci_stream().prefix_parikh(10 ** 4 + 200)


def test_shuffle_validation():
    with pytest.raises(AlphabetError):
        ShuffledPrng(fibonacci_stream(), [named_lcg("l64_39")])
    with pytest.raises(ParameterError):
        ShuffledPrng(fibonacci_stream(),
                     [named_lcg("randu"), named_lcg("l64_39")])
    z = ShuffledPrng(fibonacci_stream(),
                     [named_lcg("l64_28"), named_lcg("l64_32")])
    assert z.out_range == 2 ** 32
    with pytest.raises(ParameterError):
        z.outputs(-1)


def test_stream_export_le32_bytes():
    buf = io.BytesIO()
    written = stream_export(named_lcg("randu"), 4, buf)
    assert written == 16
    assert buf.getvalue() == struct.pack("<4I", *RANDU_FIRST)


def test_stream_export_to_path_and_determinism(tmp_path):
    p = tmp_path / "out.bin"
    stream_export(named_lcg("l64_39"), 1000, p)
    buf = io.BytesIO()
    stream_export(named_lcg("l64_39"), 1000, buf)
    assert p.read_bytes() == buf.getvalue()
    assert len(buf.getvalue()) == 4000


def test_stream_export_array_source():
    arr = np.arange(10, dtype=np.uint32)
    buf = io.BytesIO()
    assert stream_export(arr, 6, buf) == 24
    assert buf.getvalue() == arr[:6].tobytes()
    assert stream_export(arr, 0, io.BytesIO()) == 0
    with pytest.raises(ParameterError):
        stream_export(arr, 11, io.BytesIO())
    with pytest.raises(ParameterError):
        stream_export(arr, -1, io.BytesIO())


def test_right_special_witness_found():
    arr = np.array([1, 2, 1, 3, 1, 2], dtype=np.uint32)
    w = right_special_witness(arr, 1, 2, 3, budget=6)
    assert bool(w) and w.verdict == FOUND
    assert w.tuple_prefix == (1,)
    assert (w.position_a, w.position_b) == (0, 2)
    assert w.scanned == 6
    # longer shared prefix
    arr2 = np.array([7, 8, 9, 7, 8, 5], dtype=np.uint32)
    w2 = right_special_witness(arr2, 2, 9, 5, budget=6)
    assert w2.tuple_prefix == (7, 8) and (w2.position_a, w2.position_b) == (0, 3)


def test_right_special_witness_undetermined():
    arr = np.array([1, 2] * 100, dtype=np.uint32)
    w = right_special_witness(arr, 1, 2, 3, budget=200)
    assert not w and w.verdict == UNDETERMINED
    assert w.tuple_prefix is None and w.scanned == 200
    short = right_special_witness(np.array([5], dtype=np.uint32), 1, 0, 1, budget=1)
    assert short.verdict == UNDETERMINED


def test_right_special_witness_validation():
    arr = np.arange(10, dtype=np.uint32)
    with pytest.raises(ParameterError):
        right_special_witness(arr, 0, 1, 2, budget=10)
    with pytest.raises(ParameterError):
        right_special_witness(arr, 1, 2, 2, budget=10)
    with pytest.raises(ParameterError):
        right_special_witness(arr, 1, 1, 2, budget=11)


def brute_cycle(m, a, c, seed):
    seen = {}
    x = seed
    i = 0
    while x not in seen:
        seen[x] = i
        x = (a * x + c) % m
        i += 1
    return i - seen[x]


@pytest.mark.parametrize("m,a,c,seed", [
    (16, 5, 1, 0), (10, 2, 0, 2), (10, 2, 0, 5),
    (97, 13, 7, 3), (256, 9, 3, 17), (31, 3, 0, 1),
])
def test_state_period_matches_brute_force(m, a, c, seed):
    assert lcg_state_period(m, a, c, seed, limit=10 ** 4) == brute_cycle(m, a, c, seed)


def test_state_period_full_and_capped():
    # c odd and a = 1 mod 4 give the full period on a power-of-two modulus
    assert lcg_state_period(65536, 5, 1, 0) == 65536
    assert lcg_state_period(2 ** 31, 65539, 0, 1, limit=10 ** 4) is None


def smallest_window_period(arr):
    # KMP failure function: the window's smallest period is n - border(n)
    n = len(arr)
    fail = [0] * (n + 1)
    k = 0
    for i in range(1, n):
        while k and arr[i] != arr[k]:
            k = fail[k]
        if arr[i] == arr[k]:
            k += 1
        fail[i + 1] = k
    return n - fail[n]


def test_shuffled_toy_pair_has_no_short_period():
    # each 2^5-state toy on its own cycles through all 32 states ...
    assert lcg_state_period(32, 5, 1, 0) == 32
    assert lcg_state_period(32, 5, 7, 0) == 32
    # ... but the steered interleaving shows no period up to 1e5: a stream
    # period p would cap the window's smallest period at p
    z = ShuffledPrng(fibonacci_stream(), [Lcg(32, 5, 1), Lcg(32, 5, 7)])
    window = z.outputs(220_000).tolist()
    assert smallest_window_period(window) > 10 ** 5
