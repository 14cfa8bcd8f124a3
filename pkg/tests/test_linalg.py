import pytest
import sympy
from hypothesis import given, strategies as st

from polyjoints.algebra import Field
from polyjoints.linalg import nullspace, rank, rank_mod, rref

from helpers import FIELDS, rand_scalar, rng

Q = Field.rational()
F7 = Field.prime(7)


def _rand_matrix(F, r, rows, cols, rank_cap=None):
    M = [[rand_scalar(F, r) for _ in range(cols)] for _ in range(rows)]
    if rank_cap is not None and rows > rank_cap:
        # later rows are combinations of the first rank_cap rows
        for i in range(rank_cap, rows):
            c = [rand_scalar(F, r) for _ in range(rank_cap)]
            M[i] = [sum((F.mul(c[k], M[k][j]) for k in range(rank_cap)), F.zero) if F.p is None
                    else sum(F.mul(c[k], M[k][j]) for k in range(rank_cap)) % F.p for j in range(cols)]
    return M


def _apply(M, v, F):
    out = []
    for row in M:
        s = sum(F.mul(a, b) for a, b in zip(row, v))
        out.append(s % F.p if F.p is not None else s)
    return out


def test_nullspace_examples():
    assert nullspace([[1, 0], [0, 1]], Q) == []
    assert len(nullspace([[0, 0, 0], [0, 0, 0]], Q)) == 3
    assert len(nullspace([[1, 2, 3], [2, 4, 6]], F7)) == 2
    assert nullspace([], Q, ncols=2) == [(1, 0), (0, 1)] or len(nullspace([], Q, ncols=2)) == 2


@given(st.integers(0, 10**6))
def test_backends_agree(seed):
    r = rng(seed)
    F = FIELDS[["F2", "F3", "F101", "Q"][seed % 4]]
    rows, cols = int(r.integers(1, 25)), int(r.integers(1, 25))
    M = _rand_matrix(F, r, rows, cols, rank_cap=int(r.integers(1, max(2, min(rows, cols)))))
    a = nullspace(M, F, backend="python")
    b = nullspace(M, F, backend="flint")
    assert a == b  # reduced echelon form is unique, so the bases agree exactly
    assert rank(M, F, backend="python") == rank(M, F, backend="flint") == cols - len(a)
    for v in a:
        assert not any(_apply(M, v, F))


def test_rank_against_sympy():
    r = rng(2)
    for _ in range(30):
        M = _rand_matrix(Q, r, 6, 7, rank_cap=int(r.integers(1, 6)))
        assert rank(M, Q) == sympy.Matrix(M).rank()


def test_rank_mod():
    M = [[1, 2, 3], [2, 4, 6]]
    assert rank_mod([x for row in M for x in row], 2, 3, 7) == 1
    assert rank_mod([], 0, 3, 7) == 0


def test_rref_pivots_deterministic():
    rows, piv = rref([[0, 2, 4], [1, 1, 1]], Q)
    assert piv == [0, 1] and rows[0][0] == 1 and rows[1][1] == 1


def test_unknown_backend():
    with pytest.raises(ValueError):
        rank([[1, 2], [3, 4]], Q, backend="gpu")
