"""Exact integer and rational linear algebra.

Everything in this module works on Python ints and :class:`fractions.Fraction`.
Nothing is ever converted to floating point: Smith normal form intermediate
entries grow quickly and silent overflow or rounding would corrupt homology.

Coefficient rings are described by :class:`CoeffRing`; the supported rings are
the integers, the rationals and the residue rings Z/m (Z/2 in particular).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple


@dataclass(frozen=True)
class CoeffRing:
    """A coefficient ring: ``Z``, ``Q`` or ``Z/m`` (``modulus`` = m)."""

    name: str
    modulus: int = 0

    @classmethod
    def parse(cls, text: "str | CoeffRing") -> "CoeffRing":
        if isinstance(text, CoeffRing):
            return text
        key = str(text).strip().upper().replace(" ", "")
        if key in ("Z", "ZZ"):
            return ZZ
        if key in ("Q", "QQ"):
            return QQ
        for prefix in ("Z/", "Z_", "GF", "Z"):
            if key.startswith(prefix) and key[len(prefix):].isdigit():
                m = int(key[len(prefix):])
                if m < 2:
                    raise ValueError(f"modulus must be >= 2, got {m}")
                return cls(f"Z/{m}", m)
        raise ValueError(f"unknown coefficient ring {text!r}")

    @property
    def is_field(self) -> bool:
        return self.name == "Q" or (self.modulus > 1 and _is_prime(self.modulus))

    def __str__(self) -> str:
        if self.modulus == 2:
            return "Z2"
        return self.name


ZZ = CoeffRing("Z")
QQ = CoeffRing("Q")
GF2 = CoeffRing("Z/2", 2)


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    f = 2
    while f * f <= m:
        if m % f == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major.

    ``ncols`` is stored explicitly so that matrices with zero rows keep their
    column count (boundary maps out of degree 0 are ``0 x n``).
    """

    rows: tuple
    ncols: int

    def __post_init__(self):
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged matrix rows")
            for x in r:
                if not isinstance(x, int):
                    raise TypeError(f"IntMatrix entries must be int, got {type(x).__name__}")

    @classmethod
    def of(cls, data, ncols: int | None = None) -> "IntMatrix":
        if isinstance(data, IntMatrix):
            return data
        rows = tuple(tuple(_as_int(x) for x in r) for r in data)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(rows, ncols)

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls(tuple((0,) * n for _ in range(m)), n)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(tuple(self.col(j) for j in range(self.ncols)), self.nrows)

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.col(j) for j in range(other.ncols)]
            return IntMatrix(
                tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows),
                other.ncols,
            )
        return self.apply(other)

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.ncols:
            raise ValueError(f"vector of length {len(v)} for matrix with {self.ncols} columns")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def tolist(self) -> list:
        return [list(r) for r in self.rows]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        return _bareiss_det([list(r) for r in self.rows])

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r})"


def _as_int(x) -> int:
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    raise TypeError(f"expected an integer entry, got {x!r}")


def _bareiss_det(a: list) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfResult:
    """``U @ M @ V == S`` with ``S`` diagonal, ``d1 | d2 | ...`` and ``U``, ``V`` unimodular."""

    S: IntMatrix
    U: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple:
        return tuple(self.S[i, i] for i in range(min(self.S.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def invariant_factors(self) -> tuple:
        return tuple(d for d in self.diagonal if d != 0)


def smith_normal_form(M) -> SnfResult:
    """Smith normal form with transforms.

    Pivoting always takes the smallest nonzero absolute value in the remaining
    block, scanning row-major, so results are reproducible.
    """
    M = IntMatrix.of(M)
    m, n = M.shape
    A = [list(r) for r in M.rows]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for r in A:
            r[j], r[k] = r[k], r[j]
        for r in V:
            r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):  # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]

    def move_min_pivot(t) -> bool:
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = A[i][j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            return False
        _, i, j = best
        if i != t:
            swap_rows(t, i)
        if j != t:
            swap_cols(t, j)
        return True

    for t in range(min(m, n)):
        if not move_min_pivot(t):
            break
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    add_row(i, t, -q)
                if A[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    add_col(j, t, -q)
                if A[t][j]:
                    dirty = True
            if dirty:
                move_min_pivot(t)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]

    return SnfResult(IntMatrix.of(A, n), IntMatrix.of(U, m), IntMatrix.of(V, n))


# ---------------------------------------------------------------------------
# Field elimination (Q or Z/p)


def _field_coerce(x, p: int | None):
    if p is None:
        return Fraction(x)
    if isinstance(x, Fraction):
        return (x.numerator * pow(x.denominator, -1, p)) % p
    return int(x) % p


def rref(rows: Sequence[Sequence], ncols: int | None = None, p: int | None = None):
    """Reduced row echelon form over Q (``p=None``) or GF(p).

    Returns ``(R, pivots)`` where ``R`` is a list of rows and ``pivots`` the
    pivot column of each nonzero row.
    """
    R = [[_field_coerce(x, p) for x in r] for r in rows]
    if ncols is None:
        ncols = len(R[0]) if R else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = (1 / R[r][c]) if p is None else pow(R[r][c], -1, p)
        R[r] = [_fmul(x, inv, p) for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [_fsub(a, _fmul(f, b, p), p) for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == len(R):
            break
    return R, pivots


def _fmul(a, b, p):
    return a * b if p is None else (a * b) % p


def _fsub(a, b, p):
    return a - b if p is None else (a - b) % p


def field_rank(rows: Sequence[Sequence], ncols: int | None = None, p: int | None = None) -> int:
    return len(rref(rows, ncols, p)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, p: int | None = None) -> list:
    """Basis of ``{x : A x = 0}`` over Q or GF(p), one vector per free column."""
    R, pivots = rref(rows, ncols, p)
    free = [c for c in range(ncols) if c not in pivots]
    zero = Fraction(0) if p is None else 0
    one = Fraction(1) if p is None else 1
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, c in enumerate(pivots):
            v[c] = -R[i][f] if p is None else (-R[i][f]) % p
        basis.append(tuple(v))
    return basis


def field_solve(rows: Sequence[Sequence], b: Sequence, ncols: int, p: int | None = None):
    """One solution of ``A x = b`` over Q or GF(p), or ``None``."""
    aug = [list(r) + [bi] for r, bi in zip(rows, b)]
    R, pivots = rref(aug, ncols + 1, p)
    if ncols in pivots:
        return None
    zero = Fraction(0) if p is None else 0
    x = [zero] * ncols
    for i, c in enumerate(pivots):
        x[c] = R[i][ncols]
    return tuple(x)


def primitive(v: Iterable) -> tuple:
    """Scale a rational vector to a primitive integer vector, first nonzero entry positive."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x != 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


# ---------------------------------------------------------------------------
# Public operations on IntMatrix


def rank(M, coeff="Z") -> int:
    M = IntMatrix.of(M)
    coeff = CoeffRing.parse(coeff)
    if coeff.name in ("Z", "Q"):
        return smith_normal_form(M).rank if coeff.name == "Z" else field_rank(M.rows, M.ncols)
    if coeff.is_field:
        return field_rank(M.rows, M.ncols, coeff.modulus)
    raise ValueError(f"rank over non-field {coeff} is not defined")


def kernel_basis(M, coeff="Z") -> list:
    """Kernel of ``M`` acting on column vectors.

    Over Q and Z/p this is a basis (Q-vectors are returned as primitive integer
    vectors). Over Z it is a basis of the saturated kernel lattice
    ``ker_Q(M) ∩ Z^n``. Over composite Z/m it is a generating set.
    """
    M = IntMatrix.of(M)
    coeff = CoeffRing.parse(coeff)
    m, n = M.shape
    if coeff.name == "Q":
        return [primitive(v) for v in nullspace(M.rows, n)]
    if coeff.name == "Z":
        snf = smith_normal_form(M)
        r = snf.rank
        return [snf.V.col(j) for j in range(r, n)]
    mod = coeff.modulus
    if coeff.is_field:
        return nullspace(M.rows, n, mod)
    # composite modulus: x with M x = mod * y for some integer y
    ext = IntMatrix.of([list(row) + [-mod * int(i == k) for k in range(m)] for i, row in enumerate(M.rows)], n + m)
    gens = []
    for v in kernel_basis(ext, ZZ):
        x = tuple(c % mod for c in v[:n])
        if any(x) and x not in gens:
            gens.append(x)
    return gens


def solve(M, b: Sequence, coeff="Z"):
    """Some ``x`` with ``M x == b`` over ``coeff``, or ``None`` if none exists."""
    M = IntMatrix.of(M)
    coeff = CoeffRing.parse(coeff)
    m, n = M.shape
    if len(b) != m:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m}")
    if coeff.name == "Q":
        return field_solve(M.rows, [Fraction(x) for x in b], n)
    if coeff.name == "Z":
        return _solve_z(M, [_as_int(x) for x in b])
    mod = coeff.modulus
    if coeff.is_field:
        return field_solve(M.rows, b, n, mod)
    ext = IntMatrix.of([list(row) + [mod * int(i == k) for k in range(m)] for i, row in enumerate(M.rows)], n + m)
    x = _solve_z(ext, [_as_int(v) for v in b])
    return None if x is None else tuple(c % mod for c in x[:n])


def _solve_z(M: IntMatrix, b: list):
    snf = smith_normal_form(M)
    c = snf.U.apply(b)
    m, n = M.shape
    y = [0] * n
    for i in range(m):
        d = snf.S[i, i] if i < n else 0
        if d == 0:
            if c[i] != 0:
                return None
        elif c[i] % d:
            return None
        else:
            y[i] = c[i] // d
    return snf.V.apply(y)


# ---------------------------------------------------------------------------
# Small rational helpers used by the multilinear and ring modules


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    cols = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in A]


def identity(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def det(A: Sequence[Sequence]):
    """Determinant of a square rational matrix; integral results come back as int."""
    n = len(A)
    if any(len(r) != n for r in A):
        raise ValueError("determinant of a non-square matrix")
    R = [[Fraction(x) for x in r] for r in A]
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if R[i][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            R[c], R[piv] = R[piv], R[c]
            result = -result
        result *= R[c][c]
        for i in range(c + 1, n):
            if R[i][c] != 0:
                f = R[i][c] / R[c][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[c])]
    return result.numerator if result.denominator == 1 else result


def inverse(A: Sequence[Sequence]) -> list:
    """Inverse of a square rational matrix (``ValueError`` if singular)."""
    n = len(A)
    aug = [list(r) + identity(n)[i] for i, r in enumerate(A)]
    R, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [[_simplify(x) for x in r[n:]] for r in R[:n]]


def _simplify(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def parse_rational(x) -> Fraction:
    """Exact rational from an int, Fraction or string like ``"-1/2"``; floats must be integral."""
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        if x.is_integer():
            return Fraction(int(x))
        raise ValueError(f"non-integral float {x!r}; give rationals as strings such as '1/3'")
    if isinstance(x, str):
        return Fraction(x.strip())
    raise ValueError(f"cannot read {x!r} as a rational number")


def rational_json(x):
    """An int when ``x`` is integral, otherwise the string ``"p/q"``."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
