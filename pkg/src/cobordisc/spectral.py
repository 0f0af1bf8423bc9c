"""Spectral sequences of bounded, increasing filtrations over a field.

Every page is computed directly from the filtered complex as

    E^r_p = Z^r_p / (Z^{r-1}_{p-1} + d Z^{r-1}_{p+r-1}),
    Z^r_p = {x in F_p : dx in F_{p-r}},

one chain degree at a time. A class is represented by a vector in a fixed
complement of the denominator inside the numerator, and ``d_r`` sends
``[x]`` to ``[dx]``. A generator of chain degree ``n`` at level ``p`` sits in
bidegree ``(p, q = n - p)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvariantError, ValidationError
from .homology import ChainComplex
from .linalg import field_rank, field_solve, nullspace, rref


@dataclass(frozen=True)
class FilteredComplex:
    base: ChainComplex
    levels: tuple  # levels[n][j]: filtration level of generator j in degree n

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(tuple(int(x) for x in lv) for lv in self.levels))
        if self.base.coeff.name == "Z" or (self.base.coeff.modulus and self.base.coeff.modulus != 2):
            raise ValidationError(f"filtered complexes need Q or Z2 coefficients, got {self.base.coeff}")
        if len(self.levels) != len(self.base.dims) or any(
            len(lv) != d for lv, d in zip(self.levels, self.base.dims)
        ):
            raise ValidationError("levels must list one integer per generator in every degree")

    @property
    def p(self):
        """Characteristic for the field routines (``None`` for Q)."""
        return self.base.coeff.modulus or None

    @property
    def level_set(self) -> list:
        return sorted({x for lv in self.levels for x in lv})

    @property
    def pmin(self) -> int:
        return self.level_set[0] if self.level_set else 0

    @property
    def pmax(self) -> int:
        return self.level_set[-1] if self.level_set else 0

    @property
    def width(self) -> int:
        return self.pmax - self.pmin

    def validate(self) -> None:
        self.base.validate()
        p = self.p
        for n in range(1, len(self.base.dims)):
            d = self.base.d(n)
            for j in range(self.base.dims[n]):
                lv = self.levels[n][j]
                for i in range(self.base.dims[n - 1]):
                    x = d[i, j] % p if p else d[i, j]
                    if x and self.levels[n - 1][i] > lv:
                        name = self._label(n, j)
                        raise ValidationError(
                            f"filtration violated by d: generator {name} at level {lv} "
                            f"hits degree-{n - 1} generator {i} at level {self.levels[n - 1][i]}"
                        )

    def _label(self, n: int, j: int) -> str:
        labels = self.base.labels
        if labels and n < len(labels) and j < len(labels[n]):
            return f"{labels[n][j]!s} (degree {n}, index {j})"
        return f"(degree {n}, index {j})"

    def to_dict(self) -> dict:
        out = self.base.to_dict()
        out["levels"] = [list(lv) for lv in self.levels]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "FilteredComplex":
        if "levels" not in data:
            raise ValidationError("filtered complex needs 'levels'")
        base = ChainComplex.from_dict({**data, "coeff": data.get("coeff", "Z2")})
        F = cls(base, tuple(tuple(lv) for lv in data["levels"]))
        F.validate()
        return F


@dataclass(frozen=True)
class Page:
    r: int
    groups: dict  # (p, q) -> dimension, nonzero entries only
    differentials: dict = field(default_factory=dict)  # source (p, q) -> matrix, rows index the target

    def dim(self, p: int, q: int) -> int:
        return self.groups.get((p, q), 0)

    def is_degenerate(self) -> bool:
        """``True`` when ``d_r`` vanishes identically."""
        return all(x == 0 for m in self.differentials.values() for row in m for x in row)

    def total_dims(self) -> dict:
        out: dict = {}
        for (p, q), d in self.groups.items():
            out[p + q] = out.get(p + q, 0) + d
        return out

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "groups": [[p, q, d] for (p, q), d in sorted(self.groups.items())],
            "differentials": [
                {"source": [p, q], "target": [p - self.r, q + self.r - 1], "matrix": [[_scalar(x) for x in row] for row in m]}
                for (p, q), m in sorted(self.differentials.items())
                if any(x for row in m for x in row)
            ],
        }


def _scalar(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return x


class _Quotient:
    """A subquotient ``N / D`` of ``C_n`` with a chosen complement basis."""

    def __init__(self, numer: list, denom: list, dim: int, p):
        self.dim_ambient = dim
        self.p = p
        dbasis, _ = rref(denom, dim, p) if denom else ([], [])
        self.denom = [r for r in dbasis if any(r)]
        comp = []
        current = list(self.denom)
        rk = len(current)
        for v in numer:
            trial = current + [list(v)]
            if field_rank(trial, dim, p) > rk:
                comp.append(tuple(v))
                current = trial
                rk += 1
        self.comp = comp
        if self.denom and (not numer or field_rank([list(v) for v in numer], dim, p) != rk):
            raise InvariantError("denominator is not contained in the numerator")

    @property
    def dim(self) -> int:
        return len(self.comp)

    def coords(self, v) -> tuple:
        k = len(self.comp)
        gens = self.comp + [tuple(r) for r in self.denom]
        if not gens:
            if any(v):
                raise InvariantError("vector outside the numerator subspace")
            return ()
        rows = [[g[i] for g in gens] for i in range(self.dim_ambient)]
        sol = field_solve(rows, list(v), len(gens), self.p)
        if sol is None:
            raise InvariantError("vector outside the numerator subspace")
        return tuple(sol[:k])


class _Engine:
    def __init__(self, F: FilteredComplex):
        F.validate()
        self.F = F
        self.p = F.p
        self.C = F.base

    def _apply(self, n: int, v) -> tuple:
        d = self.C.d(n)
        p = self.p
        out = tuple(sum(a * b for a, b in zip(row, v)) for row in d.rows)
        return tuple(x % p for x in out) if p else out

    def zr(self, n: int, p: int, bound) -> list:
        """Basis of ``{x in F_p C_n : dx in F_bound C_{n-1}}``; ``bound=None`` means ``dx = 0``."""
        if not 0 <= n < len(self.C.dims):
            return []
        lv = self.F.levels[n]
        cols = [j for j in range(self.C.dims[n]) if lv[j] <= p]
        if not cols:
            return []
        d = self.C.d(n)
        below = self.F.levels[n - 1] if n > 0 else ()
        rows = [
            [d[i, j] for j in cols]
            for i in range(d.nrows)
            if bound is None or below[i] > bound
        ]
        basis = nullspace(rows, len(cols), self.p)
        out = []
        for b in basis:
            v = [0] * self.C.dims[n]
            for j, x in zip(cols, b):
                v[j] = x
            out.append(tuple(v))
        return out

    def group(self, r: int, n: int, p: int) -> _Quotient:
        dim = self.C.dims[n] if 0 <= n < len(self.C.dims) else 0
        numer = self.zr(n, p, p - r)
        denom = list(self.zr(n, p - 1, p - r))
        denom += [self._apply(n + 1, v) for v in self.zr(n + 1, p + r - 1, p)]
        denom = [v for v in denom if any(v)]
        return _Quotient(numer, denom, dim, self.p)


def page(F: FilteredComplex, r: int) -> Page:
    """Page ``E^r`` with its differential ``d_r`` of bidegree ``(-r, r-1)``."""
    if r < 0:
        raise ValidationError("page index must be >= 0")
    eng = _Engine(F)
    return _page(eng, r)


def _page(eng: _Engine, r: int) -> Page:
    F = eng.F
    quots = {}
    for n in range(len(F.base.dims)):
        for p in range(F.pmin, F.pmax + 1):
            Q = eng.group(r, n, p)
            if Q.dim:
                quots[(n, p)] = Q
    diffs = {}
    for (n, p), Q in quots.items():
        T = quots.get((n - 1, p - r))
        if T is None:
            continue
        cols = [T.coords(eng._apply(n, v)) for v in Q.comp]
        diffs[(p, n - p)] = [list(row) for row in zip(*cols)]
    pg = Page(r, {(p, n - p): Q.dim for (n, p), Q in quots.items()}, diffs)
    _check_square_zero(pg, eng.p)
    return pg


def _check_square_zero(pg: Page, p) -> None:
    r = pg.r
    for (a, b), m in pg.differentials.items():
        nxt = pg.differentials.get((a - r, b + r - 1))
        if nxt is None:
            continue
        for i in range(len(nxt)):
            for j in range(len(m[0])):
                s = sum(nxt[i][k] * m[k][j] for k in range(len(m)))
                if (s % p if p else s) != 0:
                    raise InvariantError(f"d_{r}∘d_{r} != 0 at ({a}, {b})")


def stable_index(F: FilteredComplex) -> int:
    """A page index from which every page equals ``E^∞`` (filtration width + 1)."""
    return F.width + 1


def pages(F: FilteredComplex, upto: int | None = None) -> list:
    eng = _Engine(F)
    top = stable_index(F) if upto is None else upto
    return [_page(eng, r) for r in range(top + 1)]


def e_infinity(F: FilteredComplex) -> Page:
    return page(F, stable_index(F))


def collapse_page(F: FilteredComplex) -> int:
    """Smallest ``r`` with ``d_{r'} = 0`` for every ``r' >= r``."""
    ps = pages(F)
    r = len(ps)
    while r > 0 and ps[r - 1].is_degenerate():
        r -= 1
    return r


@dataclass(frozen=True)
class ConvergenceReport:
    homology: dict  # n -> dim H_n
    graded: dict  # (p, q) -> dim F_pH_n / F_{p-1}H_n (nonzero only)
    e_infinity: dict  # (p, q) -> dim E^∞
    collapse: int
    ok: bool = True

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "collapse_page": self.collapse,
            "homology": [[n, d] for n, d in sorted(self.homology.items())],
            "graded_homology": [[p, q, d] for (p, q), d in sorted(self.graded.items())],
            "e_infinity": [[p, q, d] for (p, q), d in sorted(self.e_infinity.items())],
        }


def verify_convergence(F: FilteredComplex) -> ConvergenceReport:
    """Check ``E^∞_{p,q} ≅ F_pH_{p+q} / F_{p-1}H_{p+q}`` dimension by dimension.

    ``F_pH_n`` is the image of ``H_n(F_pA)`` in ``H_n(A)``, of dimension
    ``dim(Z_n ∩ F_p + B_n) - dim B_n``. Any mismatch raises :class:`InvariantError`.
    """
    eng = _Engine(F)
    C = F.base
    pc = F.p
    hom, graded = {}, {}
    for n in range(len(C.dims)):
        bounds = [v for v in (eng._apply(n + 1, e) for e in _unit_vectors(C.d(n + 1).ncols)) if any(v)]
        rk_b = field_rank(bounds, C.dims[n], pc) if bounds else 0
        hom[n] = C.dims[n] - field_rank(C.d(n).rows, C.dims[n], pc) - rk_b
        prev = 0
        for p in range(F.pmin, F.pmax + 1):
            cyc = eng.zr(n, p, None)
            span = [list(v) for v in cyc] + bounds
            fp = (field_rank(span, C.dims[n], pc) if span else 0) - rk_b
            if fp - prev:
                graded[(p, n - p)] = fp - prev
            prev = fp
        if prev != hom[n]:
            raise InvariantError(f"degree {n}: top filtration step has dim {prev}, homology has {hom[n]}")
    ps = pages(F)
    einf = ps[-1].groups
    if dict(einf) != graded:
        raise InvariantError(f"E^∞ {sorted(einf.items())} != graded homology {sorted(graded.items())}")
    tot = ps[-1].total_dims()
    for n, h in hom.items():
        if tot.get(n, 0) != h:
            raise InvariantError(f"degree {n}: sum of E^∞ is {tot.get(n, 0)}, dim H is {h}")
    for a, b in zip(ps, ps[1:]):
        for key, d in b.groups.items():
            if d > a.groups.get(key, 0):
                raise InvariantError(f"page dimension grew at {key} from r={a.r} to r={b.r}")
    r = len(ps)
    while r > 0 and ps[r - 1].is_degenerate():
        r -= 1
    return ConvergenceReport(hom, graded, dict(einf), r)


def _unit_vectors(n: int):
    for j in range(n):
        yield tuple(int(i == j) for i in range(n))


def random_filtered_complex(
    rng: random.Random,
    field: str = "Z2",
    max_gens: int = 12,
    n_levels: int = 3,
    max_degree: int = 3,
    coeff_range: int = 2,
) -> FilteredComplex:
    """A random bounded filtered complex.

    Generators are added degree by degree; the boundary of a level-``p``
    generator is a random combination of a basis of ``ker d ∩ F_p`` one degree
    down, so ``d∘d = 0`` and the filtration condition hold by construction.
    """
    p = 2 if field.upper() in ("Z2", "Z/2", "GF2") else None
    top = rng.randint(1, max_degree)
    total = rng.randint(top + 1, max(top + 1, max_gens))
    dims = [1] * (top + 1)
    for _ in range(total - (top + 1)):
        dims[rng.randrange(top + 1)] += 1
    levels = [tuple(rng.randrange(n_levels) for _ in range(d)) for d in dims]
    maps = []
    prev_rows = None
    for n in range(1, top + 1):
        rows = [[0] * dims[n] for _ in range(dims[n - 1])]
        for j in range(dims[n]):
            lv = levels[n][j]
            cols = [i for i in range(dims[n - 1]) if levels[n - 1][i] <= lv]
            if not cols:
                continue
            if prev_rows is None:
                sub = []
            else:
                sub = [[prev_rows[k][i] for i in cols] for k in range(len(prev_rows))]
            basis = nullspace(sub, len(cols), p)
            if p is None:
                basis = [_integral(v) for v in basis]
            vec = [0] * dims[n - 1]
            for b in basis:
                c = rng.randint(-coeff_range, coeff_range) if p is None else rng.randrange(2)
                for i, x in zip(cols, b):
                    vec[i] += c * x
            for i in range(dims[n - 1]):
                rows[i][j] = vec[i] % p if p else vec[i]
        maps.append(rows)
        prev_rows = rows
    base = ChainComplex.from_maps(dims, maps, "Z2" if p else "Q")
    F = FilteredComplex(base, tuple(levels))
    F.validate()
    return F


def _integral(v) -> tuple:
    den = 1
    for x in v:
        den = den * Fraction(x).denominator
    return tuple(int(Fraction(x) * den) for x in v)
