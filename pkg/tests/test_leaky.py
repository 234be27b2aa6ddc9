import itertools
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lkss.errors import InsufficientSharesError, ParameterError, RandomnessExhaustedError, ShareMismatchError
from lkss.field import PrimeField
from lkss.leaky import (
    SchemeParams,
    SeededSource,
    ShareBundle,
    StreamSource,
    SystemRandomSource,
    decode,
    encode,
    global_encoding_matrices,
    layout,
    parse_rational,
    superblock_encoder,
)
from lkss.oracle import rank_leakage


def P(T, tau, z, alpha, q=65537):
    return SchemeParams(T, tau, z, Fr(alpha), PrimeField(q))


def lay_tuple(params):
    lay = layout(params)
    return lay.n_prime, lay.n1, lay.n2, lay.share_symbols_per_server, lay.rand_per_superblock


def test_layout_examples():
    assert lay_tuple(P(4, 3, 2, Fr(1, 4))) == (8, 3, 5, 6, 10)
    assert lay_tuple(P(3, 2, 1, Fr(1, 2))) == (2, 2, 0, 1, 0)
    assert lay_tuple(P(12, 7, 6, 0)) == (1, 0, 1, 1, 6)


def test_layout_minimal_by_search():
    # brute force: smallest n' with integral, divisible n1 and n2
    for tau in range(2, 8):
        for z in range(1, tau):
            for alpha in {Fr(k, d) for d in range(1, 9) for k in range(d + 1)}:
                params = P(max(tau, 2), tau, z, alpha)
                if params.ramp_only:
                    continue
                n = next(
                    n for n in itertools.count(1)
                    if (n1 := alpha / z * tau * n).denominator == 1 and n1 % tau == 0 and (n - n1) % (tau - z) == 0
                )
                assert layout(params).n_prime == n


@settings(max_examples=200)
@given(st.integers(2, 12), st.data())
def test_layout_invariants(T, data):
    tau = data.draw(st.integers(2, T))
    z = data.draw(st.integers(1, tau - 1))
    alpha = data.draw(st.fractions(0, 1, max_denominator=30))
    params = P(T, tau, z, alpha)
    lay = layout(params)
    if not params.ramp_only:
        assert lay.n1 == alpha / z * tau * lay.n_prime
    assert lay.n1 + lay.n2 == lay.n_prime
    assert lay.n1 == lay.blocks1 * tau and lay.n2 == lay.blocks2 * (tau - z)
    assert Fr(lay.share_symbols_per_server, lay.n_prime) == max((1 - alpha) / (tau - z), Fr(1, tau))
    assert Fr(lay.rand_per_superblock, lay.n_prime) == max(Fr(0), z - tau * alpha) / (tau - z)


@pytest.mark.parametrize(
    "args",
    [(1, 1, 1, 0), (4, 5, 1, 0), (4, 3, 0, 0), (4, 3, 3, 0), (4, 3, 1, Fr(3, 2)), (4, 3, 1, -1)],
)
def test_params_validation(args):
    with pytest.raises(ParameterError):
        P(*args)


def test_field_must_hold_points():
    with pytest.raises(ParameterError):
        P(5, 3, 1, 0, q=5)


def test_parse_rational():
    assert parse_rational("1/4") == Fr(1, 4)
    assert parse_rational("0.25") == Fr(1, 4)
    assert parse_rational(0) == 0
    with pytest.raises(ParameterError):
        parse_rational(0.25)
    with pytest.raises(ParameterError):
        parse_rational("1/0")
    with pytest.raises(ParameterError):
        parse_rational("x")


def test_global_matrix_shapes():
    A, B, rows = global_encoding_matrices(P(3, 2, 1, Fr(1, 2), 5))
    assert A.shape == (3, 2) and B.shape == (3, 0)
    A, B, rows = global_encoding_matrices(P(4, 3, 2, Fr(1, 4), 11))
    assert A.shape == (24, 8) and B.shape == (24, 10)
    assert [list(r) for r in rows] == [list(range(6 * t, 6 * t + 6)) for t in range(4)]


GRID = [(4, 3, 2, Fr(1, 4), 11), (3, 2, 1, Fr(1, 2), 5), (6, 4, 2, Fr(1, 3), 7), (12, 7, 6, Fr(0), 13), (7, 5, 3, Fr(1, 7), 17)]


@pytest.mark.parametrize("T,tau,z,alpha,q", GRID)
def test_matrix_scalar_and_encode_agree(T, tau, z, alpha, q):
    params = P(T, tau, z, alpha, q)
    lay = layout(params)
    A, B, rows = global_encoding_matrices(params)
    scalar = superblock_encoder(params)
    rng = np.random.default_rng(T)
    for _ in range(20):
        F = rng.integers(0, q, lay.n_prime, dtype=np.uint64)
        R = rng.integers(0, q, lay.rand_per_superblock, dtype=np.uint64)
        flat = (A.astype(object) @ F.astype(object) + B.astype(object) @ R.astype(object)) % q
        per_server = scalar(F.tolist(), R.tolist())
        bundles = encode(F, params, R)
        for t in range(T):
            assert list(per_server[t]) == [flat[r] for r in rows[t]]
            assert bundles[t].payload.tolist() == list(per_server[t])


@pytest.mark.parametrize("T,tau,z,alpha,q", GRID)
def test_decode_every_tau_subset(T, tau, z, alpha, q):
    params = P(T, tau, z, alpha, q)
    n = 3 * layout(params).n_prime
    F = SeededSource(q, 1).take(n)
    bundles = encode(F, params, SeededSource(q, 2))
    for S in itertools.combinations(bundles, tau):
        assert decode(list(S)).tolist() == F.tolist()
    for S in itertools.combinations(bundles, tau - 1):
        with pytest.raises(InsufficientSharesError):
            decode(list(S))


def test_payload_order_is_superblock_major():
    params = P(4, 3, 2, Fr(1, 4), 11)
    F = SeededSource(11, 5).take(16)
    R = SeededSource(11, 6).take(20)
    two = encode(F, params, R, scheme_id=b"x" * 16)
    first = encode(F[:8], params, R[:10], scheme_id=b"x" * 16)
    second = encode(F[8:], params, R[10:], scheme_id=b"x" * 16)
    for t in range(4):
        assert two[t].payload.tolist() == first[t].payload.tolist() + second[t].payload.tolist()


def test_randomness_consumed_exactly():
    params = P(4, 3, 2, Fr(1, 4), 11)
    F = np.zeros(16, dtype=np.uint64)
    encode(F, params, StreamSource(list(range(20)), 11))
    with pytest.raises(RandomnessExhaustedError):
        encode(F, params, StreamSource(list(range(19)), 11))


def test_case1_uses_no_randomness():
    params = P(3, 2, 1, Fr(1, 2), 5)
    bundles = encode(np.array([1, 2, 3, 4], dtype=np.uint64), params, StreamSource([], 5))
    assert [len(b.payload) for b in bundles] == [2, 2, 2]


def test_encode_rejects_partial_superblock():
    with pytest.raises(ParameterError):
        encode(np.zeros(7, dtype=np.uint64), P(4, 3, 2, Fr(1, 4), 11), SeededSource(11, 0))


def test_encode_rejects_out_of_range_symbols():
    with pytest.raises(ParameterError):
        encode(np.array([11] * 8, dtype=np.uint64), P(4, 3, 2, Fr(1, 4), 11), SeededSource(11, 0))


def test_deterministic_replay():
    params = P(6, 4, 2, Fr(1, 3), 7)
    F = SeededSource(7, 3).take(12)
    a = encode(F, params, SeededSource(7, 9), scheme_id=b"a" * 16)
    b = encode(F, params, SeededSource(7, 9), scheme_id=b"a" * 16)
    assert all(x.payload.tolist() == y.payload.tolist() for x, y in zip(a, b))


def test_scheme_id_random_per_call():
    params = P(3, 2, 1, Fr(1, 2), 5)
    a = encode(np.zeros(2, dtype=np.uint64), params, [])
    b = encode(np.zeros(2, dtype=np.uint64), params, [])
    assert len(a[0].scheme_id) == 16 and a[0].scheme_id != b[0].scheme_id


def test_single_bundle_leaks_one_eighth():
    params = P(4, 3, 2, Fr(1, 4), 11)
    A, B, rows = global_encoding_matrices(params)
    bundles = encode(SeededSource(11, 0).take(8), params, SeededSource(11, 1))
    assert all(len(b.payload) == 6 for b in bundles)
    assert [rank_leakage(A, B, rows, [t], 11) for t in (1, 2, 3, 4)] == [Fr(1, 8)] * 4


def test_decode_mismatch_errors():
    params = P(4, 3, 2, Fr(1, 4), 11)
    F = SeededSource(11, 0).take(8)
    a = encode(F, params, SeededSource(11, 1))
    b = encode(F, params, SeededSource(11, 1))
    with pytest.raises(ShareMismatchError):
        decode([a[0], a[1], b[2]])
    with pytest.raises(ShareMismatchError):
        decode([a[0], a[0], a[1]])
    other = encode(np.zeros(8, dtype=np.uint64), P(4, 3, 2, Fr(1, 4), 13), SeededSource(13, 1), scheme_id=a[0].scheme_id)
    with pytest.raises(ShareMismatchError):
        decode([a[0], a[1], other[2]])
    bad = ShareBundle(a[0].scheme_id, 9, params, 0, a[0].payload)
    with pytest.raises(ShareMismatchError):
        decode([a[0], a[1], bad])
    short = ShareBundle(a[0].scheme_id, 3, params, 0, a[2].payload[:5])
    with pytest.raises(ShareMismatchError):
        decode([a[0], a[1], short])
    with pytest.raises(InsufficientSharesError):
        decode([])


def test_decode_uses_extra_shares_consistently():
    params = P(4, 3, 2, Fr(1, 4), 11)
    F = SeededSource(11, 0).take(8)
    bundles = encode(F, params, SeededSource(11, 1))
    assert decode(bundles[::-1]).tolist() == F.tolist()


def test_system_random_source_range():
    for q in (5, 65537, 4294967291):
        x = SystemRandomSource(q).take(1000)
        assert len(x) == 1000 and int(x.max()) < q
    big = SystemRandomSource(18446744073709551557).take(3)
    assert all(0 <= v < 18446744073709551557 for v in big)


def test_large_modulus_round_trip():
    q = 18446744073709551557
    params = P(4, 3, 2, Fr(1, 4), q)
    F = np.array([q - 1 - i for i in range(8)], dtype=object)
    bundles = encode(F, params, SeededSource(q, 4))
    assert decode(bundles[1:]).tolist() == F.tolist()
