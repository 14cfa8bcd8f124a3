"""Sylvester resultants via fraction-free (Bareiss) elimination."""

from __future__ import annotations

from .poly import MultiPoly


def sylvester_matrix(f: MultiPoly, g: MultiPoly, var: int) -> list[list[MultiPoly]]:
    """(l+m) x (l+m) Sylvester matrix of f, g viewed as polynomials in ``var``.

    The first m rows carry shifted coefficients of f (leading first), the
    last l rows those of g, where l = deg_var f and m = deg_var g.
    """
    f._check(g)
    l, m = f.degree_in(var), g.degree_in(var)
    if l < 1 or m < 1:
        raise ValueError(f"both polynomials need positive degree in variable {var}")
    zero = MultiPoly.zero(f.field, f.n)
    fc, gc = f.coefficients_in(var), g.coefficients_in(var)
    size = l + m
    rows = []
    for shift in range(m):
        row = [zero] * size
        for k, c in fc.items():
            row[shift + l - k] = c
        rows.append(row)
    for shift in range(l):
        row = [zero] * size
        for k, c in gc.items():
            row[shift + m - k] = c
        rows.append(row)
    return rows


def det_bareiss(matrix: list[list[MultiPoly]]) -> MultiPoly:
    """Determinant over a polynomial ring by fraction-free elimination.

    Every division performed is exact (Sylvester's identity), so entries stay
    polynomial throughout.
    """
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    proto = matrix[0][0]
    M = [list(row) for row in matrix]
    sign = 1
    prev = MultiPoly.constant(proto.field, proto.n, 1)
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                return MultiPoly.zero(proto.field, proto.n)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * M[i][j] - M[i][k] * M[k][j]
                M[i][j] = num.divide_exact(prev)
            M[i][k] = MultiPoly.zero(proto.field, proto.n)
        prev = pivot
    det = M[n - 1][n - 1]
    return det if sign > 0 else -det


def det_cofactor(matrix: list[list[MultiPoly]]) -> MultiPoly:
    """Laplace expansion along the first row; exponential cost, small matrices only."""
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    proto = matrix[0][0]
    total = MultiPoly.zero(proto.field, proto.n)
    for j in range(n):
        if matrix[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * det_cofactor(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def resultant(f: MultiPoly, g: MultiPoly, var: int, method: str = "bareiss") -> MultiPoly:
    """Res(f, g; var) as a polynomial in the same ring, free of ``var``."""
    S = sylvester_matrix(f, g, var)
    if method == "bareiss":
        return det_bareiss(S)
    if method == "cofactor":
        return det_cofactor(S)
    raise ValueError(f"unknown determinant method {method!r}")
