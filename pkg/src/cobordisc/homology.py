"""Chain complexes, homology, and equivariant homology over Z[Z/2].

A :class:`ChainComplex` stores ``boundaries[n] : C_n -> C_{n-1}`` with
``boundaries[0]`` the empty ``0 x dims[0]`` map. Integral homology is read off
the Smith normal form of each boundary restricted to the saturated kernel of
the previous one.

A :class:`GroupRingComplex` is a free complex over ``Z[G]``, ``G = {1, g}``,
whose boundary entries are pairs ``(a, b)`` meaning ``a + b*g``. Collapsing it
against a coefficient module ``Z^m`` on which ``g`` acts by an involution gives
the chain complex ``C ⊗_{Z[G]} M``; this is how homology with local
coefficients of a space is computed from an invariant cell structure on its
double cover.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import ValidationError
from .linalg import (
    ZZ,
    CoeffRing,
    IntMatrix,
    field_rank,
    inverse,
    kernel_basis,
    smith_normal_form,
)


@dataclass(frozen=True)
class HomologyGroup:
    """``Z^free_rank ⊕ Z/t1 ⊕ Z/t2 ⊕ ...`` with ``t1 | t2 | ...``."""

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        t = tuple(self.torsion)
        object.__setattr__(self, "torsion", t)
        if any(x < 2 for x in t):
            raise ValueError("torsion coefficients must be >= 2")
        if any(b % a for a, b in zip(t, t[1:])):
            raise ValueError(f"torsion {t} is not a divisibility chain")

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_dict(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}


Z = HomologyGroup(1)
ZERO = HomologyGroup(0)


def Zmod(*t: int) -> HomologyGroup:
    return HomologyGroup(0, t)


@dataclass(frozen=True)
class ChainComplex:
    dims: tuple
    boundaries: tuple
    coeff: CoeffRing = ZZ
    labels: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "coeff", CoeffRing.parse(self.coeff))
        object.__setattr__(self, "boundaries", tuple(self.boundaries))

    @classmethod
    def from_maps(cls, dims, maps, coeff="Z", labels=None) -> "ChainComplex":
        """Build from ``d_1, ..., d_top`` (or ``d_0, ..., d_top`` if one map per degree is given)."""
        dims = tuple(dims)
        maps = list(maps)
        if len(maps) == len(dims) - 1:
            maps = [None] + maps
        elif len(maps) != len(dims):
            raise ValidationError(
                f"{len(dims)} chain groups need {len(dims) - 1} or {len(dims)} boundary maps, got {len(maps)}"
            )
        bounds = [IntMatrix.zeros(0, dims[0]) if dims else None]
        for n in range(1, len(dims)):
            bounds.append(_as_matrix(maps[n], dims[n - 1], dims[n]))
        return cls(dims, tuple(bounds[: len(dims)]), coeff, labels)

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def d(self, n: int) -> IntMatrix:
        """Boundary ``C_n -> C_{n-1}``; zero outside the stored range."""
        if 0 < n < len(self.dims):
            return self.boundaries[n]
        if n == len(self.dims) and self.dims:
            return IntMatrix.zeros(self.dims[-1], 0)
        src = self.dims[n] if 0 <= n < len(self.dims) else 0
        return IntMatrix.zeros(0, src)

    def validate(self) -> None:
        """Raise :class:`ValidationError` at the first degree with a bad shape or ``d∘d ≠ 0``."""
        if len(self.boundaries) != len(self.dims):
            raise ValidationError("need one boundary entry per degree")
        for n in range(1, len(self.dims)):
            if self.boundaries[n].shape != (self.dims[n - 1], self.dims[n]):
                raise ValidationError(
                    f"degree {n}: boundary has shape {self.boundaries[n].shape}, "
                    f"expected {(self.dims[n - 1], self.dims[n])}"
                )
        mod = self.coeff.modulus
        for n in range(2, len(self.dims)):
            dd = self.boundaries[n - 1] @ self.boundaries[n]
            if any((x % mod if mod else x) for r in dd.rows for x in r):
                raise ValidationError(f"degree {n}: d∘d != 0")

    def to_dict(self) -> dict:
        out = {
            "coeff": str(self.coeff),
            "dims": list(self.dims),
            "boundaries": [self.boundaries[n].tolist() for n in range(1, len(self.dims))],
        }
        if self.labels is not None:
            out["labels"] = [list(x) for x in self.labels]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ChainComplex":
        try:
            dims = data["dims"]
            maps = data.get("boundaries", [])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"chain complex needs 'dims' and 'boundaries': {exc}") from None
        try:
            coeff = CoeffRing.parse(data.get("coeff", "Z"))
        except ValueError as exc:
            raise ValidationError(str(exc)) from None
        if coeff.name not in ("Z", "Q") and coeff.modulus != 2:
            raise ValidationError(f"chain complexes support Z, Q, Z2 coefficients, got {coeff}")
        labels = data.get("labels")
        cc = cls.from_maps(dims, maps, coeff, tuple(tuple(x) for x in labels) if labels else None)
        cc.validate()
        return cc


def _as_matrix(data, m: int, n: int) -> IntMatrix:
    if data is None or (isinstance(data, (list, tuple)) and len(data) == 0):
        return IntMatrix.zeros(m, n)
    try:
        mat = IntMatrix.of(data, n if m == 0 else None)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad boundary matrix: {exc}") from None
    return mat


def homology(C: ChainComplex) -> list:
    """Homology groups by degree.

    Over Z the result carries free rank and torsion; over a field only the
    dimension (as ``free_rank``).
    """
    C.validate()
    if C.coeff.name == "Z":
        return [_integral_homology(C, n) for n in range(len(C.dims))]
    p = C.coeff.modulus or None
    out = []
    for n in range(len(C.dims)):
        rk_out = field_rank(C.d(n).rows, C.dims[n], p)
        rk_in = field_rank(C.d(n + 1).rows, C.d(n + 1).ncols, p)
        out.append(HomologyGroup(C.dims[n] - rk_out - rk_in))
    return out


def _integral_homology(C: ChainComplex, n: int) -> HomologyGroup:
    d_out, d_in = C.d(n), C.d(n + 1)
    snf = smith_normal_form(d_out)
    r = snf.rank
    k = C.dims[n] - r
    if k == 0:
        return ZERO
    if d_in.ncols == 0:
        return HomologyGroup(k)
    # ker d_out is spanned by the last k columns of V; rewrite im d_in in that basis
    v_inv = IntMatrix.of(inverse(snf.V.tolist()))
    coords = v_inv @ d_in
    restricted = IntMatrix(coords.rows[r:], coords.ncols)
    inner = smith_normal_form(restricted)
    torsion = tuple(x for x in inner.diagonal if x > 1)
    return HomologyGroup(k - inner.rank, torsion)


# ---------------------------------------------------------------------------
# Complexes over Z[Z/2]


def _gr_mul(x: tuple, y: tuple) -> tuple:
    a, b = x
    c, d = y
    return (a * c + b * d, a * d + b * c)


@dataclass(frozen=True)
class GroupRingComplex:
    """Free chain complex over ``Z[G]``, ``G = Z/2``.

    ``boundaries[n]`` is a ``ranks[n-1] x ranks[n]`` table of ``(a, b)`` pairs;
    ``boundaries[0]`` is empty. ``action`` is the involution by which ``g``
    acts on the coefficient module used by :func:`equivariant_collapse`.
    """

    ranks: tuple
    boundaries: tuple
    action: IntMatrix = field(default_factory=lambda: IntMatrix.identity(1))

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        object.__setattr__(
            self,
            "boundaries",
            tuple(tuple(tuple((int(a), int(b)) for a, b in row) for row in m) for m in self.boundaries),
        )
        object.__setattr__(self, "action", IntMatrix.of(self.action))

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def entry(self, n: int, i: int, j: int) -> tuple:
        return self.boundaries[n][i][j]

    def validate(self) -> None:
        if len(self.boundaries) != len(self.ranks):
            raise ValidationError("need one boundary entry per degree")
        for n in range(1, len(self.ranks)):
            rows = self.boundaries[n]
            if len(rows) != self.ranks[n - 1] or any(len(r) != self.ranks[n] for r in rows):
                raise ValidationError(f"degree {n}: boundary shape does not match ranks")
        for n in range(2, len(self.ranks)):
            for i in range(self.ranks[n - 2]):
                for j in range(self.ranks[n]):
                    acc = (0, 0)
                    for k in range(self.ranks[n - 1]):
                        t = _gr_mul(self.entry(n - 1, i, k), self.entry(n, k, j))
                        acc = (acc[0] + t[0], acc[1] + t[1])
                    if acc != (0, 0):
                        raise ValidationError(f"degree {n}: d∘d != 0 in Z[G]")
        _check_involution(self.action)

    def underlying(self) -> ChainComplex:
        """The complex of free abelian groups with basis ``gen_i, g*gen_i`` (interleaved)."""
        dims = [2 * r for r in self.ranks]
        maps = []
        for n in range(1, len(self.ranks)):
            rows = [[0] * dims[n] for _ in range(dims[n - 1])]
            for i in range(self.ranks[n - 1]):
                for j in range(self.ranks[n]):
                    a, b = self.entry(n, i, j)
                    # d(g^h gen_j) = a g^h gen_i + b g^(h+1) gen_i
                    for h in (0, 1):
                        rows[2 * i + h][2 * j + h] += a
                        rows[2 * i + 1 - h][2 * j + h] += b
            maps.append(rows)
        return ChainComplex.from_maps(dims, maps)

    @classmethod
    def from_dict(cls, data: dict) -> "GroupRingComplex":
        try:
            ranks = data.get("ranks", data.get("dims"))
            maps = data.get("boundaries", [])
            action = data.get("action", [[1]])
            if ranks is None:
                raise KeyError("ranks")
            maps = list(maps)
            if len(maps) == len(ranks) - 1:
                maps = [[]] + maps
            grc = cls(tuple(ranks), tuple(maps), IntMatrix.of(action))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad group-ring complex: {exc}") from None
        grc.validate()
        return grc


def _check_involution(M: IntMatrix) -> None:
    if M.nrows != M.ncols:
        raise ValidationError("action matrix must be square")
    if M @ M != IntMatrix.identity(M.nrows):
        raise ValidationError("action matrix is not an involution")


def build_antipodal_sphere(i: int) -> GroupRingComplex:
    """Cellular complex of ``S^i`` with two cells ``E^k_±`` per dimension and the antipodal deck action.

    With ``g E^k_+ = E^k_-`` the boundary is ``(1+g)`` into odd degrees from even
    ones (``∂E^{2k} = E^{2k-1}_+ + E^{2k-1}_-``) and ``(1-g)`` from odd degrees.
    """
    if i < 0:
        raise ValidationError("sphere dimension must be >= 0")
    bounds = [()]
    for k in range(1, i + 1):
        bounds.append((((1, 1),),) if k % 2 == 0 else (((1, -1),),))
    return GroupRingComplex((1,) * (i + 1), tuple(bounds))


def tensor_diagonal(E1: GroupRingComplex, E2: GroupRingComplex) -> GroupRingComplex:
    """Tensor product over Z with the diagonal action ``g(x⊗y) = gx⊗gy``.

    Signs follow ``d(x⊗y) = dx⊗y + (-1)^|x| x⊗dy``. The free ``Z[G]``-basis in
    each total degree is ``gen_i ⊗ gen_j`` and ``gen_i ⊗ g*gen_j``, ordered by
    the degree of the first factor, then ``i``, ``j``, and the twist.
    """
    top = E1.top + E2.top
    basis = []  # per total degree: list of (p, i, j, h)
    for n in range(top + 1):
        cells = []
        for p in range(max(0, n - E2.top), min(n, E1.top) + 1):
            q = n - p
            for i, j, h in product(range(E1.ranks[p]), range(E2.ranks[q]), (0, 1)):
                cells.append((p, i, j, h))
        basis.append(cells)
    index = [{c: k for k, c in enumerate(cells)} for cells in basis]

    def boundary_entries(E, deg, j):
        # d(gen_j) as a list of (i, (a, b))
        if deg == 0:
            return []
        return [(i, E.entry(deg, i, j)) for i in range(E.ranks[deg - 1]) if E.entry(deg, i, j) != (0, 0)]

    bounds = [()]
    for n in range(1, top + 1):
        rows = [[[0, 0] for _ in basis[n]] for _ in basis[n - 1]]
        for col, (p, i, j, h) in enumerate(basis[n]):
            q = n - p
            # dx ⊗ y with x = gen_i, y = g^h gen_j: term (a + b g) gen_i' ⊗ g^h gen_j
            for i2, (a, b) in boundary_entries(E1, p, i):
                for coef, h1 in ((a, 0), (b, 1)):
                    if coef:
                        _accumulate(rows, index[n - 1], (p - 1, i2, j, h), h1, coef, col)
            # (-1)^p x ⊗ dy, dy = Σ (a + b g) g^h gen_j'
            sign = -1 if p % 2 else 1
            for j2, (a, b) in boundary_entries(E2, q, j):
                for coef, shift in ((a, 0), (b, 1)):
                    if coef:
                        _accumulate(rows, index[n - 1], (p, i, j2, (h + shift) % 2), 0, sign * coef, col)
        bounds.append(tuple(tuple(tuple(e) for e in r) for r in rows))
    return GroupRingComplex(tuple(len(c) for c in basis), tuple(bounds))


def _accumulate(rows, index, cell, h1, coef, col):
    """Add ``coef * (g^h1 x ⊗ g^h y)`` where ``cell = (p, i, j, h)`` names ``x ⊗ g^h y``."""
    p, i, j, h = cell
    if h1 == 0:
        rows[index[(p, i, j, h)]][col][0] += coef
    else:
        # g x ⊗ g^h y = g (x ⊗ g^(h+1) y)
        rows[index[(p, i, j, (h + 1) % 2)]][col][1] += coef


def equivariant_collapse(E: GroupRingComplex, action=None) -> ChainComplex:
    """``C ⊗_{Z[G]} M``: each entry ``a + b g`` becomes the block ``a*Id + b*action``."""
    M = IntMatrix.of(action) if action is not None else E.action
    _check_involution(M)
    E.validate()
    m = M.nrows
    dims = [r * m for r in E.ranks]
    maps = []
    for n in range(1, len(E.ranks)):
        rows = [[0] * dims[n] for _ in range(dims[n - 1])]
        for i in range(E.ranks[n - 1]):
            for j in range(E.ranks[n]):
                a, b = E.entry(n, i, j)
                for s in range(m):
                    for t in range(m):
                        rows[i * m + s][j * m + t] = a * int(s == t) + b * M[s, t]
        maps.append(rows)
    return ChainComplex.from_maps(dims, maps)


def homology_K(n: int, i: int) -> list:
    """Integral homology of ``K_i = (S^i × S^(n-i)) / (Z/2)`` with the diagonal antipodal action.

    Computed from the free ``Z[Z/2]`` product cell structure collapsed with
    trivial ``Z`` coefficients. Only even ``n`` is accepted.
    """
    if n % 2:
        raise ValidationError(f"n must be even, got {n}")
    if not 0 <= i <= n:
        raise ValidationError(f"index i must satisfy 0 <= i <= n, got i={i}, n={n}")
    i = min(i, n - i)
    E = tensor_diagonal(build_antipodal_sphere(i), build_antipodal_sphere(n - i))
    return homology(equivariant_collapse(E, IntMatrix.identity(1)))


def is_orientable(n: int, i: int) -> bool:
    """``True`` iff the top homology ``H_n(K_i; Z)`` is infinite cyclic."""
    return homology_K(n, i)[n] == Z


def rp_homology(m: int) -> list:
    """``H_*(RP^m; Z)`` from the standard formula."""
    out = []
    for k in range(m + 1):
        if k == 0:
            out.append(Z)
        elif k == m and m % 2:
            out.append(Z)
        elif k < m and k % 2:
            out.append(Zmod(2))
        else:
            out.append(ZERO)
    return out


def rp_local_system(i: int, fibre_dim: int) -> list:
    """``H_*(RP^i; H_m(S^m))`` where the deck involution acts by the antipodal degree ``(-1)^(m+1)``."""
    sign = -1 if fibre_dim % 2 == 0 else 1
    return homology(equivariant_collapse(build_antipodal_sphere(i), IntMatrix.of([[sign]])))


def homology_K_closed_form(n: int, i: int) -> list:
    """The closed form: ``RP^i`` plus a copy shifted by ``n - i``, twisted when ``i`` is even."""
    if n % 2:
        raise ValidationError(f"n must be even, got {n}")
    i = min(i, n - i)
    base = rp_homology(i)
    out = []
    for k in range(n + 1):
        a = base[k] if k <= i else ZERO
        s = k - (n - i)
        if i % 2:
            b = base[s] if 0 <= s <= i else ZERO
        elif k == n:
            b = Z
        elif n - i <= k < n and k % 2 == 0:
            b = Zmod(2)
        else:
            b = ZERO
        out.append(HomologyGroup(a.free_rank + b.free_rank, tuple(sorted(a.torsion + b.torsion))))
    return out
