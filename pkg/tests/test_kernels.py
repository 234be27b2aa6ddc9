import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lkss import _pykernels, kernels

try:
    from lkss import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    BACKENDS.append(pytest.param(_ckernels, id="cython"))


def naive_matmul(M, X, q):
    return [[sum(int(M[i][k]) * int(X[k][j]) for k in range(len(X))) % q for j in range(len(X[0]))] for i in range(len(M))]


def naive_rank(M, q):
    a = [[int(v) % q for v in row] for row in M]
    rank, cols = 0, len(a[0]) if a else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(a)) if a[r][c]), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        iv = pow(a[rank][c], q - 2, q)
        for r in range(len(a)):
            if r != rank and a[r][c]:
                f = a[r][c] * iv % q
                a[r] = [(x - f * y) % q for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def naive_bits(data, bits):
    stream = "".join(f"{b:08b}" for b in data)
    stream += "0" * (-len(stream) % bits)
    return [int(stream[i : i + bits], 2) for i in range(0, len(stream), bits)]


def u64(a):
    return np.asarray(a, dtype=np.uint64)


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("q", [2, 5, 13, 65537, 4294967291])
def test_matmul_matches_naive(impl, q):
    rng = np.random.default_rng(q)
    for r, k, n in [(1, 1, 1), (3, 7, 5), (24, 18, 9), (2, 300, 3)]:
        M = rng.integers(0, q, (r, k), dtype=np.uint64)
        X = rng.integers(0, q, (k, n), dtype=np.uint64)
        assert impl.matmul_mod(M, X, q).tolist() == naive_matmul(M.tolist(), X.tolist(), q)


@pytest.mark.parametrize("impl", [_pykernels, kernels], ids=["python", "dispatch"])
def test_matmul_strided_inputs(impl):
    rng = np.random.default_rng(0)
    M = rng.integers(0, 11, (6, 10), dtype=np.uint64)
    X = rng.integers(0, 11, (6, 8), dtype=np.uint64)
    got = impl.matmul_mod(M[:, ::2], X[:5], 11)
    assert got.tolist() == naive_matmul(M[:, ::2].tolist(), X[:5].tolist(), 11)


def test_matmul_big_modulus_uses_objects():
    q = 18446744073709551557
    M = np.array([[q - 1, 2], [3, q - 2]], dtype=object)
    X = np.array([[q - 1], [q - 3]], dtype=object)
    assert kernels.matmul_mod(M, X, q).tolist() == naive_matmul(M.tolist(), X.tolist(), q)


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("q", [2, 3, 7, 65537])
def test_rank_matches_naive(impl, q):
    rng = np.random.default_rng(q + 1)
    for shape in [(1, 1), (4, 4), (6, 3), (3, 8), (10, 10)]:
        M = rng.integers(0, q, shape, dtype=np.uint64)
        M[-1] = M[0]  # force some dependence
        assert impl.rank_mod(M, q) == naive_rank(M.tolist(), q)


def test_rank_edge_cases():
    assert kernels.rank_mod(np.zeros((0, 3), dtype=np.uint64), 5) == 0
    assert kernels.rank_mod(np.zeros((3, 3), dtype=np.uint64), 5) == 0
    assert kernels.rank_mod(np.eye(4, dtype=np.uint64) * 5, 5) == 0
    big = 18446744073709551557
    assert kernels.rank_mod(np.array([[1, 2], [2, 4]], dtype=object), big) == 1


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("bits", [1, 2, 3, 8, 13, 16])
def test_bit_packing_matches_naive(impl, bits):
    rng = np.random.default_rng(bits)
    for n in [0, 1, 2, 3, 7, 64]:
        data = rng.bytes(n)
        sym = impl.bytes_to_symbols(np.frombuffer(data, dtype=np.uint8), bits)
        assert sym.tolist() == naive_bits(data, bits)
        assert impl.symbols_to_bytes(u64(sym), bits, n) == data


@pytest.mark.parametrize("impl", BACKENDS)
def test_symbols_to_bytes_rejects_wide_symbols(impl):
    with pytest.raises(ValueError):
        impl.symbols_to_bytes(u64([8, 0, 0]), 3, 1)
    with pytest.raises(ValueError):
        impl.symbols_to_bytes(u64([1]), 3, 1)


def _sparse(D, s):
    rows, cols = np.nonzero(D)
    ptr = np.searchsorted(rows, np.arange(D.shape[0] + 1))
    return ptr.astype(np.intp), (cols // s).astype(np.intp), (cols % s).astype(np.intp), u64(D[rows, cols])


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("q", [5, 65537, 4294967291])
def test_combine_shares_matches_dense(impl, q):
    rng = np.random.default_rng(7)
    m, s, n_out, nsb = 3, 4, 5, 11
    D = rng.integers(0, q, (n_out, m * s), dtype=np.uint64)
    D[rng.random(D.shape) < 0.5] = 0
    payloads = [rng.integers(0, q, nsb * s, dtype=np.uint64) for _ in range(m)]
    stacked = np.concatenate([p.reshape(nsb, s) for p in payloads], axis=1)
    want = np.array(naive_matmul(stacked.tolist(), D.T.tolist(), q), dtype=np.uint64).ravel()
    got = impl.combine_shares(payloads, *_sparse(D, s), s, q)
    assert got.tolist() == want.tolist()


@pytest.mark.parametrize("impl", BACKENDS)
def test_combine_shares_empty_payload(impl):
    D = np.array([[1, 2]], dtype=np.uint64)
    out = impl.combine_shares([u64([]), u64([])], *_sparse(D, 1), 1, 5)
    assert out.size == 0


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_backends_agree(data):
    q = data.draw(st.sampled_from([3, 11, 257, 65537]))
    r = data.draw(st.integers(1, 6))
    k = data.draw(st.integers(1, 6))
    vals = st.integers(0, q - 1)
    M = u64([[data.draw(vals) for _ in range(k)] for _ in range(r)])
    assert _pykernels.rank_mod(M, q) == naive_rank(M.tolist(), q)
    if _ckernels is not None:
        assert _ckernels.rank_mod(M, q) == _pykernels.rank_mod(M, q)
        assert _ckernels.matmul_mod(M, M.T.copy(), q).tolist() == _pykernels.matmul_mod(M, M.T.copy(), q).tolist()


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_env_forces_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, LKSS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import lkss.kernels as k; print(k.BACKEND)"], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
