"""Hypermatrices, the 2x2x2 hyperdeterminant and kernel points.

A hypermatrix of format ``(n_1, ..., n_r)`` stores exact rationals in
row-major order. Directions (slots) and indices are 0-based throughout.

``GL`` matrices act on one direction at a time by the left action

    (M *_j A)[..., i, ...] = sum_l M[i][l] * A[..., l, ...],

which satisfies ``M *_j (N *_j A) == (M N) *_j A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb, isqrt, prod

from .errors import InvariantError, ValidationError
from .linalg import det, nullspace, parse_rational, primitive, rational_json


@dataclass(frozen=True)
class Hypermatrix:
    format: tuple
    entries: tuple  # row-major, Fractions

    def __post_init__(self):
        fmt = tuple(int(n) for n in self.format)
        if any(n < 1 for n in fmt):
            raise ValidationError(f"format entries must be >= 1, got {fmt}")
        ent = tuple(Fraction(x) for x in self.entries)
        if len(ent) != prod(fmt):
            raise ValidationError(f"format {fmt} needs {prod(fmt)} entries, got {len(ent)}")
        object.__setattr__(self, "format", fmt)
        object.__setattr__(self, "entries", ent)

    @classmethod
    def zeros(cls, fmt) -> "Hypermatrix":
        return cls(tuple(fmt), (0,) * prod(fmt))

    @classmethod
    def from_function(cls, fmt, fn) -> "Hypermatrix":
        return cls(tuple(fmt), tuple(fn(idx) for idx in product(*(range(n) for n in fmt))))

    @classmethod
    def from_entries(cls, fmt, values: dict) -> "Hypermatrix":
        """Build from ``{multi-index: value}``; missing entries are 0."""
        fmt = tuple(fmt)
        ent = [Fraction(0)] * prod(fmt)
        probe = cls.zeros(fmt)
        for idx, v in values.items():
            ent[probe._flat(tuple(idx))] = parse_rational(v)
        return cls(fmt, tuple(ent))

    @property
    def order(self) -> int:
        return len(self.format)

    def _flat(self, idx: tuple) -> int:
        if len(idx) != len(self.format):
            raise ValidationError(f"index {idx} has wrong length for format {self.format}")
        k = 0
        for i, n in zip(idx, self.format):
            if not 0 <= i < n:
                raise ValidationError(f"index {idx} out of range for format {self.format}")
            k = k * n + i
        return k

    def __getitem__(self, idx) -> Fraction:
        if isinstance(idx, str):
            idx = tuple(int(c) for c in idx)
        return self.entries[self._flat(tuple(idx))]

    def indices(self):
        return product(*(range(n) for n in self.format))

    def items(self):
        return zip(self.indices(), self.entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def scale(self, c) -> "Hypermatrix":
        return Hypermatrix(self.format, tuple(c * x for x in self.entries))

    def to_dict(self) -> dict:
        sep = "" if max(self.format, default=1) <= 10 else ","
        return {
            "format": list(self.format),
            "entries": {sep.join(str(i) for i in idx): rational_json(v) for idx, v in self.items() if v},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Hypermatrix":
        try:
            fmt = tuple(int(n) for n in data["format"])
            raw = data.get("entries", {})
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"hypermatrix needs 'format' and 'entries': {exc}") from None
        values = {}
        try:
            if isinstance(raw, dict):
                for key, v in raw.items():
                    if "," in key:
                        idx = tuple(int(c) for c in key.split(","))
                    else:
                        idx = tuple(int(c) for c in key.strip())
                    values[idx] = v
                return cls.from_entries(fmt, values)
            return cls(fmt, tuple(parse_rational(v) for v in raw))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad hypermatrix entry: {exc}") from None


def _require_format(A: Hypermatrix, fmt: tuple) -> None:
    if A.format != fmt:
        raise ValidationError(f"expected format {'x'.join(map(str, fmt))}, got {'x'.join(map(str, A.format))}")


def _check_direction(A: Hypermatrix, j: int) -> None:
    if not 0 <= j < A.order:
        raise ValidationError(f"direction {j} out of range for order {A.order}")


def slice(A: Hypermatrix, j: int, l: int) -> Hypermatrix:  # noqa: A001 - mirrors the mathematical name
    """The sub-array with index ``i_j`` fixed to ``l``."""
    _check_direction(A, j)
    if not 0 <= l < A.format[j]:
        raise ValidationError(f"slice index {l} out of range 0..{A.format[j] - 1}")
    fmt = A.format[:j] + A.format[j + 1:]
    return Hypermatrix.from_function(fmt, lambda idx: A[idx[:j] + (l,) + idx[j:]])


def stack(slices: list, j: int) -> Hypermatrix:
    """Inverse of slicing: ``stack([slice(A, j, l) for l], j) == A``."""
    if not slices:
        raise ValidationError("cannot stack an empty list")
    base = slices[0].format
    if any(s.format != base for s in slices):
        raise ValidationError("slices have different formats")
    if not 0 <= j <= len(base):
        raise ValidationError(f"direction {j} out of range")
    fmt = base[:j] + (len(slices),) + base[j:]
    return Hypermatrix.from_function(fmt, lambda idx: slices[idx[j]][idx[:j] + idx[j + 1:]])


def group_act(A: Hypermatrix, M, j: int) -> Hypermatrix:
    """``M *_j A``: multiply direction ``j`` by the square matrix ``M`` from the left."""
    _check_direction(A, j)
    n = A.format[j]
    M = [[parse_rational(x) for x in row] for row in M]
    if len(M) != n or any(len(r) != n for r in M):
        raise ValidationError(f"direction {j} has size {n}; matrix must be {n}x{n}")

    def entry(idx):
        return sum(M[idx[j]][l] * A[idx[:j] + (l,) + idx[j + 1:]] for l in range(n) if M[idx[j]][l])

    return Hypermatrix.from_function(A.format, entry)


def act(A: Hypermatrix, mats) -> Hypermatrix:
    """Apply one matrix per direction; ``None`` leaves a direction untouched."""
    if len(mats) != A.order:
        raise ValidationError(f"need {A.order} matrices, got {len(mats)}")
    for j, M in enumerate(mats):
        if M is not None:
            A = group_act(A, M, j)
    return A


def contract(A: Hypermatrix, vectors: dict) -> Hypermatrix:
    """Contract the slots named in ``vectors`` (slot -> vector); the others remain."""
    for j, v in vectors.items():
        _check_direction(A, j)
        if len(v) != A.format[j]:
            raise ValidationError(f"slot {j} has size {A.format[j]}, vector has length {len(v)}")
    keep = [j for j in range(A.order) if j not in vectors]
    fmt = tuple(A.format[j] for j in keep)
    out = {}
    vecs = {j: [Fraction(x) for x in v] for j, v in vectors.items()}
    for idx, a in A.items():
        if not a:
            continue
        w = a
        for j, v in vecs.items():
            w *= v[idx[j]]
            if not w:
                break
        if w:
            key = tuple(idx[j] for j in keep)
            out[key] = out.get(key, 0) + w
    return Hypermatrix.from_function(fmt, lambda idx: out.get(idx, 0))


# ---------------------------------------------------------------------------
# The 2x2x2 hyperdeterminant


def _idx(s: str) -> tuple:
    return tuple(int(c) for c in s)


# (coefficient, monomial as a tuple of entry indices with repetition)
DET222_TERMS = tuple(
    (c, tuple(_idx(s) for s in mono.split()))
    for c, mono in [
        (1, "000 000 111 111"),
        (1, "001 001 110 110"),
        (1, "010 010 101 101"),
        (1, "011 011 100 100"),
        (-2, "000 001 110 111"),
        (-2, "000 010 101 111"),
        (-2, "000 011 100 111"),
        (-2, "001 010 101 110"),
        (-2, "001 011 110 100"),
        (-2, "010 011 101 100"),
        (4, "000 011 101 110"),
        (4, "001 010 100 111"),
    ]
)

F222 = (2, 2, 2)


def det222(A: Hypermatrix) -> Fraction:
    """Hyperdeterminant of a 2x2x2 hypermatrix as the explicit degree-4 polynomial."""
    _require_format(A, F222)
    total = Fraction(0)
    for c, mono in DET222_TERMS:
        term = Fraction(c)
        for idx in mono:
            term *= A[idx]
        total += term
    return total


def det222_gradient(A: Hypermatrix) -> Hypermatrix:
    """Partial derivatives of :func:`det222` with respect to every entry."""
    _require_format(A, F222)
    grad = {idx: Fraction(0) for idx in A.indices()}
    for c, mono in DET222_TERMS:
        for k, idx in enumerate(mono):
            # product rule: drop one factor at a time
            term = Fraction(c)
            for m, other in enumerate(mono):
                if m != k:
                    term *= A[other]
            grad[idx] += term
    return Hypermatrix.from_function(F222, grad.__getitem__)


@dataclass(frozen=True)
class BinaryForm:
    """``sum_j c_j x0^(d-j) x1^j``."""

    coeffs: tuple

    def __post_init__(self):
        c = tuple(Fraction(x) for x in self.coeffs)
        if not c:
            raise ValidationError("a binary form needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, x0, x1) -> Fraction:
        d = self.degree
        return sum(c * Fraction(x0) ** (d - j) * Fraction(x1) ** j for j, c in enumerate(self.coeffs))

    def substitute_shear(self, k) -> "BinaryForm":
        """``F(x0, x1 + k x0)``, a determinant-one change of variables."""
        d = self.degree
        out = [Fraction(0)] * (d + 1)
        for j, c in enumerate(self.coeffs):
            # c x0^(d-j) (x1 + k x0)^j = c sum_m C(j,m) k^(j-m) x0^(d-m) x1^m
            for m in range(j + 1):
                out[m] += c * comb(j, m) * Fraction(k) ** (j - m)
        return BinaryForm(tuple(out))

    def to_dict(self) -> dict:
        return {"degree": self.degree, "coeffs": [rational_json(c) for c in self.coeffs]}


def sylvester(f: list, g: list) -> list:
    """Sylvester matrix of two univariate polynomials given highest coefficient first."""
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + list(f) + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + list(g) + [Fraction(0)] * (size - n - 1 - i))
    return rows


def binary_discriminant(F: BinaryForm) -> Fraction:
    """Discriminant of a binary form, normalized so ``a x0^2 + b x0 x1 + c x1^2`` gives ``b^2 - 4ac``.

    With ``f(t) = F(t, 1)`` of exact degree ``d`` the value is
    ``(-1)^(d(d-1)/2) Res(f, f') / lc(f)``. When the ``x0^d`` coefficient
    vanishes the form is first sheared by ``x1 -> x1 + k x0``, which leaves the
    discriminant unchanged.
    """
    if F.is_zero():
        raise ValidationError("discriminant of the zero form is undefined")
    d = F.degree
    if d < 2:
        raise ValidationError(f"discriminant needs degree >= 2, got {d}")
    if F.coeffs[0] == 0:
        k = next(k for k in range(1, d + 2) if F(1, k) != 0)
        F = F.substitute_shear(k)
    f = list(F.coeffs)  # coefficients of t^d, ..., t^0
    fp = [c * (d - i) for i, c in enumerate(f[:-1])]
    res = Fraction(det(sylvester(f, fp)))
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * res / f[0]


def schlafli_pencil(A: Hypermatrix) -> BinaryForm:
    """``det(x0 A_0 + x1 A_1)`` for the two direction-0 slices of a 2x2x2 hypermatrix."""
    _require_format(A, F222)
    (a, b), (c, d) = [[A[0, i, j] for j in range(2)] for i in range(2)]
    (e, f), (g, h) = [[A[1, i, j] for j in range(2)] for i in range(2)]
    return BinaryForm((a * d - b * c, a * h + e * d - b * g - f * c, e * h - f * g))


def hyperdet_schlafli(A: Hypermatrix) -> Fraction:
    """The 2x2x2 hyperdeterminant as the discriminant of the slice pencil (0 when the pencil vanishes)."""
    pencil = schlafli_pencil(A)
    if pencil.is_zero():
        return Fraction(0)
    return binary_discriminant(pencil)


# ---------------------------------------------------------------------------
# Kernel points


@dataclass(frozen=True)
class KernelPoint:
    vectors: tuple

    def __post_init__(self):
        vs = tuple(tuple(Fraction(x) for x in v) for v in self.vectors)
        if any(not any(v) for v in vs):
            raise ValidationError("kernel point vectors must be nonzero")
        object.__setattr__(self, "vectors", vs)

    def normalized(self) -> "KernelPoint":
        return KernelPoint(tuple(primitive(v) for v in self.vectors))

    def as_ints(self) -> tuple:
        return tuple(primitive(v) for v in self.vectors)

    def to_list(self) -> list:
        return [[rational_json(x) for x in v] for v in self.vectors]


def kernel_certify(A: Hypermatrix, point) -> bool:
    """``True`` iff contracting ``A`` with every vector except the ``j``-th gives zero, for every ``j``."""
    vecs = point.vectors if isinstance(point, KernelPoint) else tuple(point)
    if len(vecs) != A.order:
        raise ValidationError(f"kernel point has {len(vecs)} vectors, hypermatrix has order {A.order}")
    for j, v in enumerate(vecs):
        if len(v) != A.format[j]:
            raise ValidationError(f"slot {j} has size {A.format[j]}, vector has length {len(v)}")
    for j in range(A.order):
        rest = {i: v for i, v in enumerate(vecs) if i != j}
        if not contract(A, rest).is_zero():
            return False
    return True


def kernel_residues(A: Hypermatrix, point) -> list:
    """Per slot ``j``, the contraction of ``A`` with every vector except the ``j``-th."""
    vecs = point.vectors if isinstance(point, KernelPoint) else tuple(point)
    kernel_certify(A, vecs)  # shape checks
    return [contract(A, {i: v for i, v in enumerate(vecs) if i != j}).entries for j in range(A.order)]


@dataclass(frozen=True)
class KernelSearch:
    """Outcome of :func:`kernel_search` on a degenerate 2x2x2 hypermatrix."""

    point: KernelPoint | None
    smooth: bool  # gradient of det222 nonzero at A
    method: str  # "gradient" or "pencil"
    note: str = ""
    certified: bool = field(default=False)

    def to_dict(self) -> dict:
        return {
            "point": self.point.to_list() if self.point else None,
            "smooth": self.smooth,
            "method": self.method,
            "certified": self.certified,
            "note": self.note,
        }


def factor_rank_one(T: Hypermatrix):
    """Factor a nonzero rank-one tensor into primitive integer vectors, or ``None``."""
    pivot = next((idx for idx, v in T.items() if v), None)
    if pivot is None:
        return None
    vecs = []
    for j in range(T.order):
        vecs.append(
            [T[pivot[:j] + (l,) + pivot[j + 1:]] for l in range(T.format[j])]
        )
    # x_i y_j z_k == T_ijk * T_pivot^(r-1) for a rank-one tensor
    scale = T[pivot] ** (T.order - 1)
    for idx, v in T.items():
        p = Fraction(1)
        for j, i in enumerate(idx):
            p *= vecs[j][i]
        if p != v * scale:
            return None
    return tuple(primitive(v) for v in vecs)


def kernel_search(A: Hypermatrix):
    """Find a kernel point of a 2x2x2 hypermatrix.

    Returns ``None`` when ``det222(A) != 0``. At a smooth point of the
    discriminant the gradient of ``det222`` is the rank-one tensor
    ``x ⊗ y ⊗ z`` of the unique kernel point, so it is factored directly.
    Otherwise the kernel is found from rational roots of the slice pencils.
    Every returned point is checked with :func:`kernel_certify`.
    """
    _require_format(A, F222)
    if det222(A) != 0:
        return None
    grad = det222_gradient(A)
    smooth = not grad.is_zero()
    if smooth:
        vecs = factor_rank_one(grad)
        if vecs is not None and kernel_certify(A, vecs):
            return KernelSearch(KernelPoint(vecs), True, "gradient", "", True)
    pt = _pencil_search(A)
    if pt is not None:
        note = "" if smooth else "non-smooth point of the discriminant: gradient vanishes"
        return KernelSearch(pt, smooth, "pencil", note, True)
    if smooth:
        raise InvariantError("det222 = 0 with nonzero gradient but no kernel point was found")
    return KernelSearch(None, False, "pencil", "degenerate, non-smooth point, kernel not rationally certified", False)


def _rational_sqrt(x: Fraction):
    if x < 0:
        return None
    n, d = isqrt(x.numerator), isqrt(x.denominator)
    if n * n == x.numerator and d * d == x.denominator:
        return Fraction(n, d)
    return None


_PROBES = ((1, 0), (0, 1), (1, 1), (1, -1))


def quadratic_roots(F: BinaryForm) -> list:
    """Rational projective roots of a binary quadratic; a few probes if it vanishes identically."""
    a, b, c = F.coeffs
    if a == b == c == 0:
        return [tuple(map(Fraction, p)) for p in _PROBES]
    roots = []
    if a == 0:
        roots.append((Fraction(1), Fraction(0)))
        if b != 0:
            roots.append((-c / b, Fraction(1)))
        return roots
    s = _rational_sqrt(b * b - 4 * a * c)
    if s is None:
        return []
    for t in {(-b + s) / (2 * a), (-b - s) / (2 * a)}:
        roots.append((t, Fraction(1)))
    return roots


def _left_right_kernels(B: list):
    """Nonzero ``y, z`` with ``y^T B = 0`` and ``B z = 0`` for a singular 2x2 matrix."""
    left = nullspace([[B[0][0], B[1][0]], [B[0][1], B[1][1]]], 2)
    right = nullspace(B, 2)
    if not left or not right:
        return None
    return left[0], right[0]


def _pencil_search(A: Hypermatrix):
    for d in range(3):
        others = [j for j in range(3) if j != d]
        S0, S1 = slice(A, d, 0), slice(A, d, 1)
        mat = lambda S: [[S[i, j] for j in range(2)] for i in range(2)]  # noqa: E731
        M0, M1 = mat(S0), mat(S1)
        pencil = BinaryForm((
            M0[0][0] * M0[1][1] - M0[0][1] * M0[1][0],
            M0[0][0] * M1[1][1] + M1[0][0] * M0[1][1] - M0[0][1] * M1[1][0] - M1[0][1] * M0[1][0],
            M1[0][0] * M1[1][1] - M1[0][1] * M1[1][0],
        ))
        for x in quadratic_roots(pencil):
            B = [[x[0] * M0[i][j] + x[1] * M1[i][j] for j in range(2)] for i in range(2)]
            if any(v for r in B for v in r):
                yz = _left_right_kernels(B)
                candidates = [yz] if yz else []
            else:
                candidates = _bilinear_pairs(M0, M1)
            for y, z in candidates:
                vecs = [None] * 3
                vecs[d], vecs[others[0]], vecs[others[1]] = x, y, z
                if kernel_certify(A, vecs):
                    return KernelPoint(tuple(primitive(v) for v in vecs))
    return None


def _bilinear_pairs(M0: list, M1: list) -> list:
    """Pairs ``(y, z)`` with ``y^T M0 z = y^T M1 z = 0``, both nonzero."""
    out = []
    # det of the rows y^T M0, y^T M1 is a quadratic form in y
    def rows(y):
        return [[y[0] * M[0][j] + y[1] * M[1][j] for j in range(2)] for M in (M0, M1)]

    q = BinaryForm((
        Fraction(det(rows((1, 0)))),
        Fraction(det(rows((1, 1)))) - det(rows((1, 0))) - det(rows((0, 1))),
        Fraction(det(rows((0, 1)))),
    ))
    for y in quadratic_roots(q):
        ker = nullspace(rows(y), 2)
        if ker:
            out.append((y, ker[0]))
    return out


# ---------------------------------------------------------------------------
# Degeneracy certificates for general formats


def _small_vectors(n: int, full: bool) -> list:
    """Nonzero vectors with entries in {-1, 0, 1}, first nonzero entry positive."""
    if full:
        out = []
        for v in product((-1, 0, 1), repeat=n):
            if any(v) and next(x for x in v if x) > 0:
                out.append(v)
        return out
    out = [tuple(int(i == k) for i in range(n)) for k in range(n)]
    for i, j in combinations(range(n), 2):
        for s in (1, -1):
            v = [0] * n
            v[i], v[j] = 1, s
            out.append(tuple(v))
    return out


def certify_degenerate(A: Hypermatrix, budget: int = 20000):
    """Search for a kernel point of any format with small entries in all but the last slot.

    A hit proves the hyperdeterminant vanishes; a miss proves nothing.
    Returns a :class:`KernelPoint` or ``None``.
    """
    r = A.order
    if r < 2:
        raise ValidationError("kernel points need order >= 2")
    pools = []
    for n in A.format[:-1]:
        pool = _small_vectors(n, full=True)
        if len(pool) > 40:
            pool = _small_vectors(n, full=False)
        pools.append(pool)
    if prod(len(p) for p in pools) > budget:
        pools = [_small_vectors(n, full=False) for n in A.format[:-1]]
    last = r - 1
    checked = 0
    for head in product(*pools):
        checked += 1
        if checked > budget:
            break
        vecs = dict(enumerate(head))
        if not contract(A, vecs).is_zero():
            continue
        # remaining slots: for each j < last, contracting all but j and last gives a matrix killing x_last
        rows = []
        for j in range(last):
            M = contract(A, {i: v for i, v in vecs.items() if i != j})
            n_last = A.format[last]
            for a in range(A.format[j]):
                rows.append([M[(a, b)] for b in range(n_last)])
        ker = nullspace(rows, A.format[last])
        if not ker:
            continue
        candidate = list(head) + [primitive(ker[0])]
        if kernel_certify(A, candidate):
            return KernelPoint(tuple(candidate))
    return None
