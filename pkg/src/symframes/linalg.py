"""Small exact dense linear algebra over Fraction (and any exact field).

Matrices are sequences of row sequences; nothing here ever touches floats.
Sizes are tiny (d <= 4 for dilations, a few dozen rows for moment systems),
so plain Gaussian elimination with exact pivots is the right tool.
"""

from fractions import Fraction

__all__ = [
    "exact_solve",
    "fraction_matrix_inverse",
    "integer_det",
    "char_poly",
    "mat_mul",
    "mat_vec",
    "identity_matrix",
]


def identity_matrix(d):
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return tuple(
        tuple(sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def mat_vec(A, v):
    return tuple(sum(row[j] * v[j] for j in range(len(v))) for row in A)


def exact_solve(A, b):
    """Solve the square system A x = b by Gauss-Jordan elimination.

    Entries may be Fraction or any field type supporting +,-,*,/ and ==0
    comparison via `!= 0`. Raises ValueError on a singular matrix.
    """
    n = len(A)
    aug = [list(A[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col] if isinstance(aug[col][col], (int, Fraction)) \
            else aug[col][col] ** -1
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return tuple(aug[i][n] for i in range(n))


def fraction_matrix_inverse(A):
    """Exact inverse of a square matrix with integer/Fraction entries."""
    n = len(A)
    cols = []
    for j in range(n):
        e = [Fraction(1 if i == j else 0) for i in range(n)]
        cols.append(exact_solve([[Fraction(x) for x in row] for row in A], e))
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def integer_det(A):
    """Determinant of an integer matrix via fraction-free Bareiss elimination."""
    n = len(A)
    m = [list(map(int, row)) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def char_poly(A):
    """Characteristic polynomial det(xI - A) of an integer matrix.

    Returns ascending integer coefficients (monic, degree d), computed by the
    Faddeev-LeVerrier recursion in exact rational arithmetic.
    """
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    coeffs = [Fraction(1)]  # c_d = 1, filled descending then reversed
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        Mk[i][i] = Fraction(1)
    work = Mk
    cs = []
    for k in range(1, n + 1):
        work = [[sum(M[i][t] * work[t][j] for t in range(n)) for j in range(n)]
                for i in range(n)]
        tr = sum(work[i][i] for i in range(n))
        ck = -tr / k
        cs.append(ck)
        for i in range(n):
            work[i][i] += ck
    desc = [Fraction(1)] + cs  # x^d + c1 x^(d-1) + ... + cd
    asc = list(reversed(desc))
    out = []
    for c in asc:
        assert c.denominator == 1
        out.append(int(c))
    return tuple(out)
