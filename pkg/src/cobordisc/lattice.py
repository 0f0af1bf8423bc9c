"""Intersection lattices of Lagrangian spheres and three-point invariants.

The unknown three-point functional ``G`` is a symmetric trilinear form on the
lattice, parametrised by its values on sorted basis triples ``i <= j <= k``.
Every rule is linear and homogeneous in these values, so the set of
functionals compatible with a configuration of spheres is a rational
subspace. :func:`gw_solve` computes it exactly and reports which of the
standard identities hold on all of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product

from .errors import InvariantError, ValidationError
from .linalg import IntMatrix, nullspace, parse_rational, rational_json, rref


def epsilon(n: int) -> int:
    """Sign of the twist in the form ``a - eps (a.s) s``: ``(-1)^(n(n+1)/2)``."""
    return -1 if (n * (n + 1) // 2) % 2 else 1


def picard_lefschetz_sign(n: int) -> int:
    """Sign of the twist in the form ``a + sign (a.s) s``: ``(-1)^((n+1)(n+2)/2)``."""
    return -1 if ((n + 1) * (n + 2) // 2) % 2 else 1


def sphere_square(n: int) -> int:
    """Self-intersection of an ``n``-sphere class: ``(-1)^(n(n-1)/2) (1 + (-1)^n)``."""
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * (1 + (-1) ** n)


def _vec(v, r: int, what: str) -> tuple:
    try:
        out = tuple(int(x) for x in v)
    except (TypeError, ValueError):
        raise ValidationError(f"{what}: expected a list of integers") from None
    if len(out) != r:
        raise ValidationError(f"{what}: expected length {r}, got {len(out)}")
    if not any(out):
        raise ValidationError(f"{what}: zero vector")
    return out


@dataclass(frozen=True)
class Lattice:
    gram: IntMatrix
    n: int
    spheres: tuple
    surgery: tuple = ()

    def __post_init__(self):
        g = self.gram if isinstance(self.gram, IntMatrix) else IntMatrix.of(self.gram)
        object.__setattr__(self, "gram", g)
        r = g.nrows
        if g.ncols != r:
            raise ValidationError("gram matrix must be square")
        if any(g[i, j] != g[j, i] for i in range(r) for j in range(i)):
            raise ValidationError("gram matrix must be symmetric")
        if self.n <= 0 or self.n % 2:
            raise ValidationError(f"sphere dimension must be even and positive, got {self.n}")
        sq = sphere_square(self.n)
        for name, group in (("sphere", self.spheres), ("surgery class", self.surgery)):
            vecs = tuple(_vec(v, r, f"{name} {k}") for k, v in enumerate(group))
            object.__setattr__(self, "spheres" if name == "sphere" else "surgery", vecs)
            for k, v in enumerate(vecs):
                if self.dot(v, v) != sq:
                    raise ValidationError(
                        f"{name} {k} {list(v)} has self-intersection {self.dot(v, v)}, "
                        f"a sphere of dimension {self.n} needs {sq}"
                    )

    @property
    def rank(self) -> int:
        return self.gram.nrows

    @property
    def designated(self) -> tuple:
        return self.spheres + self.surgery

    def dot(self, a, b) -> int:
        g = self.gram
        return sum(a[i] * g[i, j] * b[j] for i in range(self.rank) for j in range(self.rank) if a[i] and b[j])

    def to_dict(self) -> dict:
        out = {"n": self.n, "gram": self.gram.tolist(), "spheres": [list(v) for v in self.spheres]}
        if self.surgery:
            out["surgery_classes"] = [list(v) for v in self.surgery]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Lattice":
        try:
            gram, n = d["gram"], d["n"]
        except (KeyError, TypeError):
            raise ValidationError("lattice needs 'n' and 'gram'") from None
        if not isinstance(n, int):
            raise ValidationError("'n' must be an integer")
        r = len(gram)
        spheres = d.get("spheres")
        if spheres is None:
            spheres = [[int(i == j) for j in range(r)] for i in range(r)]
        return cls(IntMatrix.of(gram), n, tuple(spheres), tuple(d.get("surgery_classes", ())))


def sphere_graph(n: int, count: int, edges, surgery=()) -> Lattice:
    """Lattice spanned by ``count`` spheres meeting once along each edge ``(i, j)``."""
    g = [[0] * count for _ in range(count)]
    for i in range(count):
        g[i][i] = sphere_square(n)
    for i, j in edges:
        if i == j:
            raise ValidationError("a sphere cannot be adjacent to itself")
        g[i][j] = g[j][i] = 1
    basis = tuple(tuple(int(i == j) for j in range(count)) for i in range(count))
    return Lattice(IntMatrix.of(g), n, basis, tuple(surgery))


def _designated(L: Lattice, s) -> tuple:
    if isinstance(s, int):
        if not 0 <= s < len(L.designated):
            raise ValidationError(f"no designated sphere with index {s}")
        return L.designated[s]
    v = _vec(s, L.rank, "sphere")
    if v not in L.designated:
        raise ValidationError(f"{list(v)} is not a designated sphere class")
    return v


def dehn_twist(L: Lattice, s) -> IntMatrix:
    """Matrix of ``a -> a - eps (a.s) s``; column ``c`` is the image of basis vector ``c``."""
    v = _designated(L, s)
    eps = epsilon(L.n)
    gs = L.gram.apply(v)
    r = L.rank
    return IntMatrix.of([[int(i == c) - eps * v[i] * gs[c] for c in range(r)] for i in range(r)])


def is_even_form(Q) -> bool:
    M = Q if isinstance(Q, IntMatrix) else IntMatrix.of(Q)
    r = M.nrows
    if M.ncols != r or any(M[i, j] != M[j, i] for i in range(r) for j in range(i)):
        raise ValidationError("form must be a symmetric square matrix")
    return all(M[i, i] % 2 == 0 for i in range(r))


# ---------------------------------------------------------------------------
# the unknown functional


def triples(r: int) -> list:
    return list(combinations_with_replacement(range(r), 3))


@dataclass(frozen=True)
class GWFunctional:
    rank: int
    coeffs: dict

    def __post_init__(self):
        clean = {}
        for key, v in self.coeffs.items():
            if len(key) != 3 or not all(0 <= i < self.rank for i in key):
                raise ValidationError(f"bad index triple {key}")
            v = parse_rational(v)
            k = tuple(sorted(key))
            if k in clean and clean[k] != v:
                raise ValidationError(f"conflicting values for the symmetric index {k}")
            if v:
                clean[k] = v
        object.__setattr__(self, "coeffs", clean)

    def __getitem__(self, key) -> Fraction:
        return self.coeffs.get(tuple(sorted(key)), Fraction(0))

    def __call__(self, a, b, c) -> Fraction:
        r = range(self.rank)
        return sum(
            (a[i] * b[j] * c[k] * self[i, j, k] for i, j, k in product(r, r, r) if a[i] and b[j] and c[k]),
            Fraction(0),
        )

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "values": {",".join(map(str, k)): rational_json(v) for k, v in sorted(self.coeffs.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GWFunctional":
        try:
            return cls(int(d["rank"]), {tuple(int(x) for x in k.split(",")): v for k, v in d["values"].items()})
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            raise ValidationError(f"bad functional: {exc}") from None


def _trilinear_row(r: int, index: dict, a, b, c) -> list:
    """Coefficients of ``G(a, b, c)`` in the unknowns."""
    row = [Fraction(0)] * len(index)
    for i, j, k in product(range(r), repeat=3):
        w = a[i] * b[j] * c[k]
        if w:
            row[index[tuple(sorted((i, j, k)))]] += w
    return row


@dataclass(frozen=True)
class Constraint:
    rule: str
    detail: str
    row: tuple


def gw_constraints(L: Lattice) -> tuple:
    """Unknown triples and the linear rules they satisfy.

    Twist invariance is imposed for every designated class and every sorted
    basis triple; vanishing of ``G(a, b, .)`` for every orthogonal pair of
    designated classes.
    """
    r = L.rank
    unknowns = triples(r)
    index = {t: k for k, t in enumerate(unknowns)}
    basis = [tuple(int(i == c) for i in range(r)) for c in range(r)]
    rows = []
    for si, s in enumerate(L.designated):
        phi = dehn_twist(L, s)
        cols = [phi.col(c) for c in range(r)]
        for i, j, k in unknowns:
            lhs = _trilinear_row(r, index, cols[i], cols[j], cols[k])
            lhs[index[(i, j, k)]] -= 1
            if any(lhs):
                rows.append(Constraint("twist", f"twist along {list(s)} on ({i}, {j}, {k})", tuple(lhs)))
    for (ai, a), (bi, b) in combinations(enumerate(L.designated), 2):
        if L.dot(a, b) == 0:
            for c in range(r):
                row = _trilinear_row(r, index, a, b, basis[c])
                if any(row):
                    rows.append(Constraint("orthogonal", f"G({list(a)}, {list(b)}, e{c}) = 0", tuple(row)))
    return unknowns, rows


@dataclass(frozen=True)
class Identity:
    id: str
    item: int
    statement: str
    holds: bool
    residual: str = ""

    def to_dict(self) -> dict:
        out = {"id": self.id, "item": self.item, "statement": self.statement, "holds": self.holds}
        if self.residual:
            out["residual"] = self.residual
        return out


@dataclass(frozen=True)
class PairDiscriminant:
    pair: tuple
    forced_zero: bool
    k: tuple  # G(s_i, s_i, s_j) on each solution basis vector

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "forced_zero": self.forced_zero,
            "k_on_basis": [rational_json(x) for x in self.k],
        }


@dataclass
class GWSolution:
    lattice: Lattice
    unknowns: list
    basis: list
    identities: list = field(default_factory=list)
    discriminants: list = field(default_factory=list)
    n_constraints: int = 0

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def functional(self, params) -> GWFunctional:
        if len(params) != self.dimension:
            raise ValidationError(f"need {self.dimension} parameters")
        vals = {}
        for k, t in enumerate(self.unknowns):
            vals[t] = sum((Fraction(p) * b[k] for p, b in zip(params, self.basis)), Fraction(0))
        return GWFunctional(self.lattice.rank, vals)

    def evaluate(self, a, b, c) -> tuple:
        """``G(a, b, c)`` on each basis vector of the solution space."""
        index = {t: k for k, t in enumerate(self.unknowns)}
        row = _trilinear_row(self.lattice.rank, index, a, b, c)
        return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for v in self.basis)

    def forced_zero(self, a, b, c) -> bool:
        return not any(self.evaluate(a, b, c))

    def to_dict(self) -> dict:
        return {
            "lattice": self.lattice.to_dict(),
            "dimension": self.dimension,
            "constraints": self.n_constraints,
            "basis": [GWFunctional(self.lattice.rank, dict(zip(self.unknowns, v))).to_dict()["values"] for v in self.basis],
            "identities": [i.to_dict() for i in self.identities],
            "discriminants": [d.to_dict() for d in self.discriminants],
        }


def _label(k: int) -> str:
    return f"L{k + 1}"


def _check(sol: GWSolution, id_: str, item: int, statement: str, terms) -> Identity:
    """``terms`` is a list of ``(coef, (a, b, c))``; the identity is ``sum coef G(a,b,c) = 0``."""
    total = [Fraction(0)] * sol.dimension
    for coef, args in terms:
        for k, v in enumerate(sol.evaluate(*args)):
            total[k] += coef * v
    holds = not any(total)
    residual = "" if holds else "nonzero on the basis: " + ", ".join(rational_json(x) for x in total)
    return Identity(id_, item, statement, holds, residual)


def _identities(sol: GWSolution) -> list:
    L = sol.lattice
    S = L.spheres
    eps = epsilon(L.n)
    r = L.rank
    out = []
    for i, s in enumerate(S):
        out.append(_check(sol, "gw.cube_vanishes", 1, f"G({_label(i)},{_label(i)},{_label(i)}) = 0", [(1, (s, s, s))]))
    for i, j in combinations(range(len(S)), 2):
        d = L.dot(S[i], S[j])
        if d in (1, -1):
            a, b = S[i], S[j]
            sign = eps * d
            out.append(
                _check(
                    sol, "gw.transverse_pair", 2,
                    f"G({_label(i)},{_label(i)},{_label(j)}) = {sign:+d} G({_label(i)},{_label(j)},{_label(j)})",
                    [(1, (a, a, b)), (-sign, (a, b, b))],
                )
            )
    for j, s in enumerate(S):
        for i, k in combinations(range(len(S)), 2):
            if j in (i, k):
                continue
            if L.dot(S[i], s) == 1 and L.dot(s, S[k]) == 1 and L.dot(S[i], S[k]) == 0:
                out.append(
                    _check(
                        sol, "gw.chain_middle", 3,
                        f"G({_label(i)},{_label(j)},{_label(j)}) = -G({_label(k)},{_label(j)},{_label(j)})",
                        [(1, (S[i], s, s)), (1, (S[k], s, s))],
                    )
                )
    for i, k in combinations(range(len(S)), 2):
        if L.dot(S[i], S[k]) == 0:
            pieces = []
            for c in range(r):
                e = tuple(int(x == c) for x in range(r))
                pieces.append(_check(sol, "", 4, "", [(1, (S[i], S[k], e))]))
            holds = all(p.holds for p in pieces)
            out.append(
                Identity(
                    "gw.disjoint_vanishes", 4, f"G({_label(i)},{_label(k)},.) = 0", holds,
                    "" if holds else "; ".join(f"e{c}: {p.residual}" for c, p in enumerate(pieces) if not p.holds),
                )
            )
    return out


def gw_solve(L: Lattice) -> GWSolution:
    unknowns, rows = gw_constraints(L)
    basis = nullspace([list(c.row) for c in rows], len(unknowns)) if rows else [
        tuple(Fraction(int(i == k)) for i in range(len(unknowns))) for k in range(len(unknowns))
    ]
    sol = GWSolution(L, unknowns, basis, n_constraints=len(rows))
    sol.identities = _identities(sol)
    S = L.spheres
    for i, j in combinations(range(len(S)), 2):
        if L.dot(S[i], S[j]) == 1:
            ki = sol.evaluate(S[i], S[i], S[j])
            kj = sol.evaluate(S[j], S[j], S[i])
            if any(ki) != any(kj):
                raise InvariantError(f"pair {(i, j)}: G(i,i,j) and G(j,j,i) vanish differently")
            sol.discriminants.append(PairDiscriminant((i, j), not any(ki), ki))
    return sol


def canonical_space(sol: GWSolution, perm=None) -> tuple:
    """RREF of the solution space; ``perm[k]`` is the new label of basis vector ``k``."""
    r = sol.lattice.rank
    perm = perm or list(range(r))
    index = {t: k for k, t in enumerate(triples(r))}
    rows = []
    for v in sol.basis:
        row = [Fraction(0)] * len(index)
        for t, x in zip(sol.unknowns, v):
            row[index[tuple(sorted(perm[i] for i in t))]] = x
        rows.append(row)
    R, _ = rref(rows, len(index)) if rows else ([], [])
    return tuple(tuple(row) for row in R if any(row))


def discriminant_from_gw(G: GWFunctional, L: Lattice, s1, s2) -> Fraction:
    """``G(s1, s1, s2)^2``, the common discriminant of two spheres meeting once."""
    a, b = _vec(s1, L.rank, "s1"), _vec(s2, L.rank, "s2")
    if L.dot(a, b) != 1:
        raise ValidationError(f"the two classes must meet once, got intersection {L.dot(a, b)}")
    k1, k2 = G(a, a, b), G(b, b, a)
    if k1 * k1 != k2 * k2:
        raise InvariantError(f"G(s1,s1,s2)^2 = {rational_json(k1 * k1)} but G(s2,s2,s1)^2 = {rational_json(k2 * k2)}")
    return k1 * k1
