"""Rings given by structure constants, quadratic algebras and cobordism ends.

A :class:`StructRing` of rank ``n`` stores ``mu`` with
``g_i * g_j = sum_k mu[i, j, k] g_k``; its structure tensor is an ``n x n x n``
hypermatrix and, for rank 2, its hyperdeterminant is the discriminant of the
quadratic algebra.

The cobordism pipeline takes a ring with basis ``{e, g_1, ..., g_r}`` and one
2-row map per end, the composite of the boundary map with the projection to
that end, in coordinates ``(e_L, p)``. Each map times its unit sign is assumed
to be a unital ring map onto the rank-2 end algebra ``p^2 = sigma p + tau e``;
the report extracts ``(sigma, tau)`` per end and checks every consequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from .errors import InvariantError, ValidationError
from .linalg import det, field_rank, field_solve, inverse, nullspace, parse_rational, rational_json
from .multilinear import (
    Hypermatrix,
    KernelPoint,
    certify_degenerate,
    det222,
    group_act,
    kernel_certify,
    kernel_residues,
)


@dataclass(frozen=True)
class QuadraticAlgebra:
    """``Z e ⊕ Z x`` with ``x^2 = sigma x + tau e``."""

    sigma: int
    tau: int

    @property
    def discriminant(self) -> int:
        return self.sigma * self.sigma + 4 * self.tau


def quadratic_algebra_discriminant(Q: QuadraticAlgebra) -> int:
    return Q.sigma * Q.sigma + 4 * Q.tau


def quadratic_change_of_lift(Q: QuadraticAlgebra, u: int, m: int) -> QuadraticAlgebra:
    """The same algebra in the basis ``{e, u x + m e}``."""
    if u not in (1, -1):
        raise ValidationError(f"u must be +1 or -1, got {u}")
    return QuadraticAlgebra(u * Q.sigma + 2 * m, Q.tau - u * m * Q.sigma - m * m)


@dataclass(frozen=True)
class StructRing:
    mu: Hypermatrix
    unit: int = 0
    labels: tuple | None = None

    def __post_init__(self):
        n = self.mu.format[0]
        if self.mu.format != (n, n, n):
            raise ValidationError(f"structure tensor must be n x n x n, got {self.mu.format}")
        if not 0 <= self.unit < n:
            raise ValidationError(f"unit index {self.unit} out of range")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
            if len(self.labels) != n:
                raise ValidationError("need one label per basis element")

    @property
    def rank(self) -> int:
        return self.mu.format[0]

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else f"g{i}"

    def basis(self, i: int) -> tuple:
        return tuple(Fraction(int(i == k)) for k in range(self.rank))

    def mul(self, u, v) -> tuple:
        n = self.rank
        out = [Fraction(0)] * n
        for i in range(n):
            if not u[i]:
                continue
            for j in range(n):
                if not v[j]:
                    continue
                c = u[i] * v[j]
                for k in range(n):
                    m = self.mu[i, j, k]
                    if m:
                        out[k] += c * m
        return tuple(out)

    def check_unit(self) -> None:
        e, n = self.unit, self.rank
        for i in range(n):
            for k in range(n):
                want = int(i == k)
                if self.mu[e, i, k] != want or self.mu[i, e, k] != want:
                    raise ValidationError(f"unit law fails: e*{self.label(i)} or {self.label(i)}*e is not {self.label(i)}")

    def is_associative(self) -> bool:
        n = self.rank
        for i in range(n):
            for j in range(n):
                ij = self.mul(self.basis(i), self.basis(j))
                for k in range(n):
                    if self.mul(ij, self.basis(k)) != self.mul(self.basis(i), self.mul(self.basis(j), self.basis(k))):
                        return False
        return True

    def is_commutative(self) -> bool:
        n = self.rank
        return all(self.mu[i, j, k] == self.mu[j, i, k] for i in range(n) for j in range(n) for k in range(n))

    @property
    def integral(self) -> bool:
        return all(x.denominator == 1 for x in self.mu.entries)

    def to_dict(self) -> dict:
        out = {"rank": self.rank, "unit": self.unit, "mu": self.mu.to_dict()}
        if self.labels:
            out["labels"] = list(self.labels)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "StructRing":
        try:
            mu = Hypermatrix.from_dict(data["mu"])
            unit = int(data.get("unit", 0))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"ring needs 'mu': {exc}") from None
        if "rank" in data and int(data["rank"]) != mu.format[0]:
            raise ValidationError(f"rank {data['rank']} does not match mu format {mu.format}")
        R = cls(mu, unit, tuple(data["labels"]) if data.get("labels") else None)
        R.check_unit()
        return R


def embed_rank2(Q: QuadraticAlgebra) -> StructRing:
    """Rank-2 ring ``{e, x}`` with ``x^2 = sigma x + tau e``."""
    mu = Hypermatrix.from_entries(
        (2, 2, 2), {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1, (1, 1, 0): Q.tau, (1, 1, 1): Q.sigma}
    )
    return StructRing(mu, 0, ("e", "x"))


def quadratic_of(R: StructRing) -> QuadraticAlgebra:
    """Read ``(sigma, tau)`` off a commutative rank-2 ring."""
    if R.rank != 2:
        raise ValidationError("only rank-2 rings are quadratic algebras")
    R.check_unit()
    x = 1 - R.unit
    s, t = R.mu[x, x, x], R.mu[x, x, R.unit]
    if s.denominator != 1 or t.denominator != 1:
        raise ValidationError("structure constants of a quadratic algebra must be integers")
    return QuadraticAlgebra(int(s), int(t))


@dataclass(frozen=True)
class RingDiscriminant:
    kind: str  # "value", "zero_certified" or "unknown"
    value: Fraction | None = None
    witness: KernelPoint | None = None
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": None if self.value is None else rational_json(self.value),
            "integral": None if self.value is None else Fraction(self.value).denominator == 1,
            "witness": self.witness.to_list() if self.witness else None,
            "notes": list(self.notes),
        }


def ring_discriminant(R: StructRing, witness=None, search: bool = True) -> RingDiscriminant:
    """Hyperdeterminant of the structure tensor.

    Rank 2 gives the exact value. Larger ranks can only be certified zero by a
    kernel point: the supplied ``witness`` is tried first, then a search over
    small vectors. Otherwise the result is ``unknown``.
    """
    R.check_unit()
    if R.rank == 2:
        return RingDiscriminant("value", det222(R.mu))
    notes = []
    if witness is not None:
        vecs = _as_vectors(R, witness)
        if kernel_certify(R.mu, vecs):
            return RingDiscriminant("zero_certified", Fraction(0), KernelPoint(vecs), ("supplied witness certified",))
        for slot, res in enumerate(kernel_residues(R.mu, vecs)):
            bad = [(k, r) for k, r in enumerate(res) if r]
            if bad:
                where = ", ".join(f"{R.label(k)}: {rational_json(r)}" for k, r in bad)
                notes.append(f"supplied witness fails in slot {slot}: residue {where}")
    if search:
        pt = certify_degenerate(R.mu)
        if pt is not None:
            notes.append("kernel point found by search")
            return RingDiscriminant("zero_certified", Fraction(0), pt, tuple(notes))
    notes.append("no kernel point certified; the discriminant is not determined")
    return RingDiscriminant("unknown", None, None, tuple(notes))


def _as_vectors(R: StructRing, witness) -> tuple:
    """Accept basis indices or explicit vectors for each slot."""
    out = []
    for w in witness:
        if isinstance(w, int):
            out.append(R.basis(w))
        else:
            out.append(tuple(parse_rational(x) for x in w))
    if len(out) != 3:
        raise ValidationError("a witness needs one vector per slot (3)")
    return tuple(out)


def base_change(R: StructRing, T) -> StructRing:
    """Rewrite ``R`` in the basis whose ``a``-th element is column ``a`` of ``T``.

    ``mu'[a, b, c] = sum T[i][a] T[j][b] mu[i, j, k] Tinv[c][k]``, i.e. the action
    of ``(T^t, T^t, T^-1)``. ``T`` must be unimodular and one of its columns
    must be the unit, which becomes the new unit index.
    """
    T = [[int(parse_rational(x)) for x in row] for row in T]
    n = R.rank
    if len(T) != n or any(len(r) != n for r in T):
        raise ValidationError(f"T must be {n}x{n}")
    if abs(det(T)) != 1:
        raise ValidationError(f"T is not unimodular (det = {det(T)})")
    unit_col = tuple(int(i == R.unit) for i in range(n))
    cols = [tuple(T[i][a] for i in range(n)) for a in range(n)]
    if unit_col not in cols:
        raise ValidationError("the new basis must contain the unit")
    Tt = [list(c) for c in cols]
    Tinv = inverse(T)
    mu = group_act(group_act(group_act(R.mu, Tt, 0), Tt, 1), Tinv, 2)
    return StructRing(mu, cols.index(unit_col), None)


def split_kernel_extend(R: StructRing, v_idx, w_idx, point, side: str = "V") -> KernelPoint:
    """Extend a kernel point of one block of a split ring to the whole ring.

    The basis is ``{e} ∪ V ∪ W``; the block of ``side`` uses the indices
    ``[e] + side_idx`` in that order. Requires that both blocks together with
    ``e`` are closed under the product and that ``V * W = W * V = 0``.
    """
    R.check_unit()
    v_idx, w_idx = [int(i) for i in v_idx], [int(i) for i in w_idx]
    e, n = R.unit, R.rank
    if sorted([e] + v_idx + w_idx) != list(range(n)):
        raise ValidationError("V, W and the unit must partition the basis")
    mu = R.mu
    for block, other in ((v_idx, w_idx), (w_idx, v_idx)):
        span = [e] + block
        for a in span:
            for b in span:
                for k in other:
                    if mu[a, b, k]:
                        raise ValidationError(
                            f"split condition fails: {R.label(a)}*{R.label(b)} has a component along {R.label(k)}"
                        )
    for v in v_idx:
        for w in w_idx:
            for k in range(n):
                if mu[v, w, k] or mu[w, v, k]:
                    raise ValidationError(f"split condition fails: {R.label(v)}*{R.label(w)} != 0")
    if side not in ("V", "W"):
        raise ValidationError("side must be 'V' or 'W'")
    idx = [e] + (v_idx if side == "V" else w_idx)
    m = len(idx)
    block = Hypermatrix.from_function((m, m, m), lambda t: mu[idx[t[0]], idx[t[1]], idx[t[2]]])
    vecs = point.vectors if isinstance(point, KernelPoint) else tuple(tuple(parse_rational(x) for x in v) for v in point)
    if len(vecs) != 3 or any(len(v) != m for v in vecs):
        raise ValidationError(f"kernel point must have three vectors of length {m}")
    if not kernel_certify(block, vecs):
        raise ValidationError(f"point does not certify the {side}-block: the block is not degenerate at it")
    full = []
    for v in vecs:
        w = [Fraction(0)] * n
        for pos, i in enumerate(idx):
            w[i] = Fraction(v[pos])
        full.append(tuple(w))
    if not kernel_certify(mu, full):
        raise InvariantError("padded kernel point fails on the full ring despite the split conditions")
    return KernelPoint(tuple(full))


# ---------------------------------------------------------------------------
# Cobordism ends


@dataclass(frozen=True)
class EndMap:
    """Projection of the boundary map onto one end, in coordinates ``(e_L, p)``."""

    name: str
    delta: tuple  # 2 x rank
    unit_sign: int = 1
    index: int | None = None  # 0 for the source end L_0, i for the end of g_i
    algebra: QuadraticAlgebra | None = None

    def __post_init__(self):
        rows = tuple(tuple(parse_rational(x) for x in r) for r in self.delta)
        object.__setattr__(self, "delta", rows)
        if len(rows) != 2:
            raise ValidationError(f"end {self.name}: delta must have 2 rows (e, p)")
        if self.unit_sign not in (1, -1):
            raise ValidationError(f"end {self.name}: unit_sign must be +1 or -1")

    def image(self, v) -> tuple:
        """Signed image ``s * pi(delta(v))`` as ``(e-coefficient, p-coefficient)``."""
        s = self.unit_sign
        return tuple(s * sum(a * b for a, b in zip(row, v)) for row in self.delta)


def _end_product(x: tuple, y: tuple, sigma, tau) -> tuple:
    """Product in ``e, p`` coordinates with ``p^2 = sigma p + tau e``."""
    (a, b), (c, d) = x, y
    return (a * c + b * d * tau, a * d + b * c + b * d * sigma)


@dataclass(frozen=True)
class CobordismData:
    ring: StructRing
    ends: tuple

    @property
    def r(self) -> int:
        return self.ring.rank - 1

    def gammas(self) -> list:
        """Indices of ``g_1, ..., g_r`` in ring order."""
        return [i for i in range(self.ring.rank) if i != self.ring.unit]

    def end_index(self) -> dict:
        """Map end position -> 0 (source) or i (end of the i-th gamma)."""
        r = self.r
        out = {}
        if all(E.index is not None for E in self.ends):
            out = {k: E.index for k, E in enumerate(self.ends)}
        elif len(self.ends) == r + 1:
            out = {k: k for k in range(r + 1)}
        elif len(self.ends) == r:
            out = {k: k + 1 for k in range(r)}
        else:
            raise ValidationError(f"rank {r + 1} ring needs {r} or {r + 1} ends, got {len(self.ends)}")
        if sorted(out.values()) not in (list(range(r + 1)), list(range(1, r + 1))):
            raise ValidationError("end indices must be 1..r, optionally with 0 for the source end")
        return out

    def validate(self) -> None:
        """Check the basis conditions on the point-class (``p``) coefficients and the unit images."""
        R = self.ring
        R.check_unit()
        n = R.rank
        gam = self.gammas()
        for E in self.ends:
            if any(len(row) != n for row in E.delta):
                raise ValidationError(f"end {E.name}: delta must be 2 x {n}")
            if E.image(R.basis(R.unit)) != (1, 0):
                raise ValidationError(
                    f"end {E.name}: the unit must map to unit_sign * e_L, got {[rational_json(x) for x in E.delta[0]]}"
                    f" / {[rational_json(x) for x in E.delta[1]]} in the unit column"
                )
        idx = self.end_index()
        for k, E in enumerate(self.ends):
            j = idx[k]
            for t, g in enumerate(gam, start=1):
                p_coef = E.image(R.basis(g))[1]
                if j == 0 and p_coef == 0:
                    raise ValidationError(f"pi_0(delta(g_{t})) has no point-class component (pair ({j}, {t}))")
                if j == t and p_coef == 0:
                    raise ValidationError(f"pi_{j}(delta(g_{t})) has no point-class component (pair ({j}, {t}))")
                if j not in (0, t) and p_coef != 0:
                    raise ValidationError(
                        f"pi_{j}(delta(g_{t})) must have zero point-class component, got {rational_json(p_coef)} (pair ({j}, {t}))"
                    )

    def to_dict(self) -> dict:
        ends = []
        for E in self.ends:
            d = {"name": E.name, "delta": [[rational_json(x) for x in row] for row in E.delta], "unit_sign": E.unit_sign}
            if E.index is not None:
                d["index"] = E.index
            if E.algebra is not None:
                d["algebra"] = [E.algebra.sigma, E.algebra.tau]
            ends.append(d)
        return {**self.ring.to_dict(), "ends": ends}

    @classmethod
    def from_dict(cls, data: dict) -> "CobordismData":
        R = StructRing.from_dict(data)
        raw = data.get("ends")
        if not isinstance(raw, list):
            raise ValidationError("cobordism data needs a list of 'ends'")
        ends = []
        try:
            for k, e in enumerate(raw):
                alg = e.get("algebra")
                ends.append(
                    EndMap(
                        str(e.get("name", f"L{k}")),
                        tuple(tuple(row) for row in e["delta"]),
                        int(e.get("unit_sign", 1)),
                        None if e.get("index") is None else int(e["index"]),
                        QuadraticAlgebra(int(alg[0]), int(alg[1])) if alg is not None else None,
                    )
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad end entry: {exc}") from None
        C = cls(R, tuple(ends))
        C.validate()
        return C


@dataclass(frozen=True)
class Check:
    id: str
    ok: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"id": self.id, "ok": self.ok, "detail": self.detail}


@dataclass(frozen=True)
class CobordismReport:
    r: int
    algebras: dict  # end name -> (sigma, tau)
    discriminants: dict  # end name -> Fraction
    common: Fraction | None
    square: bool | None  # None when r < 2 (no requirement)
    checks: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "r": self.r,
            "ends": [
                {
                    "name": name,
                    "sigma": rational_json(self.algebras[name][0]),
                    "tau": rational_json(self.algebras[name][1]),
                    "discriminant": rational_json(d),
                }
                for name, d in self.discriminants.items()
            ],
            "common_discriminant": None if self.common is None else rational_json(self.common),
            "square": self.square,
            "checks": [c.to_dict() for c in self.checks],
        }


def _is_rational_square(x: Fraction) -> bool:
    x = Fraction(x)
    if x < 0:
        return False
    return isqrt(x.numerator) ** 2 == x.numerator and isqrt(x.denominator) ** 2 == x.denominator


def _extract(image_g, image_g2) -> tuple:
    """``(sigma, tau)`` from ``phi(g) = b e + c p`` and ``phi(g^2) = v e + u p``."""
    b, c = image_g
    v, u = image_g2
    return ((u - 2 * b * c) / (c * c), (v - b * b) / (c * c))


def cobordism_report(C: CobordismData) -> CobordismReport:
    """Run the end-discriminant pipeline on validated cobordism data."""
    C.validate()
    R = C.ring
    gam = C.gammas()
    r = C.r
    idx = C.end_index()
    ends = list(C.ends)
    checks = []

    # per-end algebra from the gamma whose image carries the point class
    algebras = {}
    for k, E in enumerate(ends):
        j = idx[k]
        sources = gam if j == 0 else [gam[j - 1]]
        found = None
        for g in sources:
            st = _extract(E.image(R.basis(g)), E.image(R.mul(R.basis(g), R.basis(g))))
            if found is None:
                found = st
            elif st != found:
                checks.append(Check(
                    "cobordism.source_consistent", False,
                    f"end {E.name}: g_{gam.index(g) + 1} gives (sigma, tau) = "
                    f"({rational_json(st[0])}, {rational_json(st[1])}), expected ({rational_json(found[0])}, {rational_json(found[1])})",
                ))
        algebras[E.name] = found

    # structure constants forced by the vanishing projections
    bad = []
    for t, g in enumerate(gam, start=1):
        for s, h in enumerate(gam, start=1):
            if s != t and R.mu[g, g, h]:
                bad.append(f"mu_{t}{t}{s} = {rational_json(R.mu[g, g, h])}")
    checks.append(Check("cobordism.mu_iij_zero", not bad, "; ".join(bad)))
    if r >= 2:
        bad = [f"mu_{t}{t}e = {rational_json(R.mu[g, g, R.unit])}" for t, g in enumerate(gam, start=1) if R.mu[g, g, R.unit]]
        checks.append(Check("cobordism.mu_iie_zero", not bad, "; ".join(bad)))

    # multiplicativity of every end map on every product of basis elements
    bad = []
    for E in ends:
        sigma, tau = algebras[E.name]
        for a in range(R.rank):
            for b in range(R.rank):
                lhs = E.image(R.mul(R.basis(a), R.basis(b)))
                rhs = _end_product(E.image(R.basis(a)), E.image(R.basis(b)), sigma, tau)
                if lhs != rhs:
                    bad.append(
                        f"({R.label(a)}*{R.label(b)}, {E.name}): image of product "
                        f"{[rational_json(x) for x in lhs]} != product of images {[rational_json(x) for x in rhs]}"
                    )
    checks.append(Check("cobordism.multiplicative", not bad, "; ".join(bad)))

    for E in ends:
        if E.algebra is not None:
            got = algebras[E.name]
            ok = got == (E.algebra.sigma, E.algebra.tau)
            checks.append(Check(
                "cobordism.declared_algebra", ok,
                f"end {E.name}: extracted ({rational_json(got[0])}, {rational_json(got[1])}), "
                f"declared ({E.algebra.sigma}, {E.algebra.tau})",
            ))

    discs = {name: s * s + 4 * t for name, (s, t) in algebras.items()}
    values = set(discs.values())
    equal = len(values) == 1
    checks.append(Check(
        "cobordism.ends_equal", equal,
        ", ".join(f"{name}: {rational_json(d)}" for name, d in discs.items()),
    ))
    common = next(iter(values)) if equal else None
    square = None
    if r >= 2:
        square = equal and _is_rational_square(common)
        sig_ok = all(d == algebras[name][0] ** 2 for name, d in discs.items())
        checks.append(Check(
            "cobordism.square", bool(square) and sig_ok,
            f"common value {rational_json(common) if equal else 'undefined'} equals sigma^2 at every end"
            if sig_ok else "some end has tau != 0",
        ))
    if not R.integral:
        checks.append(Check("cobordism.integral", True, "structure constants are not all integers"))
    return CobordismReport(r, algebras, discs, common, square, tuple(checks))


def three_sphere_example(sigma: int, alpha: int) -> CobordismData:
    """Surgery of three spheres in a chain: basis ``x0 = e, x1, x2, x3``.

    ``x1^2 = 4 sigma x1``, ``x2^2 = -4 sigma x2``, ``x3^2 = 4 sigma x3``,
    ``x2 x3 = x3 x2 = 4 alpha x3`` and ``x1 x2 = x1 x3 = 0``. End ``i`` sends
    ``x_i`` to ``-4 p_i``; the end of ``x3`` also sends ``x2`` to ``4 alpha e``.
    """
    s, a = sigma, alpha
    entries = {(0, i, i): 1 for i in range(4)}
    entries.update({(i, 0, i): 1 for i in range(4)})
    entries[(1, 1, 1)] = 4 * s
    entries[(2, 2, 2)] = -4 * s
    entries[(3, 3, 3)] = 4 * s
    entries[(2, 3, 3)] = 4 * a
    entries[(3, 2, 3)] = 4 * a
    R = StructRing(Hypermatrix.from_entries((4, 4, 4), entries), 0, ("x0", "x1", "x2", "x3"))

    def end(i, extra=None):
        erow, prow = [1, 0, 0, 0], [0, 0, 0, 0]
        prow[i] = -4
        if extra:
            erow[extra[0]] = extra[1]
        return (tuple(erow), tuple(prow))

    ends = (
        EndMap("L1", end(1), 1, 1, QuadraticAlgebra(-s, 0)),
        EndMap("L2", end(2), 1, 2, QuadraticAlgebra(s, 0)),
        EndMap("L3", end(3, (2, 4 * a)), 1, 3, QuadraticAlgebra(-s, 0)),
    )
    return CobordismData(R, ends)


def two_end_example(Q: QuadraticAlgebra) -> CobordismData:
    """Elementary cobordism between two copies of the same end: ``g_1`` maps to the point class at both ends."""
    R = embed_rank2(Q)
    ident = ((1, 0), (0, 1))
    return CobordismData(R, (EndMap("L0", ident, 1, 0, Q), EndMap("L1", ident, 1, 1, Q)))


@dataclass(frozen=True)
class ElementaryReport:
    kernels_equal: bool
    surjective: tuple
    transport: tuple | None  # (b, c) with pi_2(a) = b e + c p where pi_1(a) = p
    algebras: tuple
    discriminants: tuple
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "kernels_equal": self.kernels_equal,
            "surjective": list(self.surjective),
            "transport": None if self.transport is None else [rational_json(x) for x in self.transport],
            "algebras": [[rational_json(x) for x in a] for a in self.algebras],
            "discriminants": [rational_json(d) for d in self.discriminants],
            "checks": [c.to_dict() for c in self.checks],
        }


def elementary_report(R: StructRing, end1: EndMap, end2: EndMap) -> ElementaryReport:
    """Compare the two ends of an elementary cobordism whose end maps have equal kernels.

    A lift ``a`` of the point class of the first end is found by solving
    ``pi_1(a) = p``; its image ``b e + c p`` at the second end gives the
    transported basis, and ``(sigma, tau)`` of both ends are extracted from
    ``a^2``. Equal discriminants need the transported basis to be a Z-basis
    (``c = ±1``).
    """
    R.check_unit()
    n = R.rank
    checks = []
    for E in (end1, end2):
        if any(len(row) != n for row in E.delta):
            raise ValidationError(f"end {E.name}: delta must be 2 x {n}")
        if E.image(R.basis(R.unit)) != (1, 0):
            raise ValidationError(f"end {E.name}: the unit must map to unit_sign * e_L")
    M1 = [list(row) for row in end1.delta]
    M2 = [list(row) for row in end2.delta]
    surj = (field_rank(M1, n) == 2, field_rank(M2, n) == 2)
    checks.append(Check("elementary.surjective", all(surj), f"ranks {field_rank(M1, n)}, {field_rank(M2, n)}"))
    k1, k2 = nullspace(M1, n), nullspace(M2, n)
    both = field_rank([list(v) for v in k1 + k2], n) if k1 + k2 else 0
    kernels_equal = len(k1) == len(k2) == both
    checks.append(Check("elementary.kernels_equal", kernels_equal, f"dims {len(k1)}, {len(k2)}, joint {both}"))
    if not (all(surj) and kernels_equal):
        return ElementaryReport(kernels_equal, surj, None, (), (), tuple(checks))
    s1 = end1.unit_sign
    sol = field_solve(M1, [Fraction(0), Fraction(s1)], n)  # signed image (e, p) = (0, 1)
    if sol is None:
        raise InvariantError("surjective map has no preimage of the point class")
    a = sol
    img1, img2 = end1.image(a), end2.image(a)
    if img1 != (0, 1):
        raise InvariantError("lift does not map to the point class")
    a2 = R.mul(a, a)
    alg1 = _extract(img1, end1.image(a2))
    if img2[1] == 0:
        checks.append(Check("elementary.transport", False, "the lift has no point-class component at the second end"))
        return ElementaryReport(kernels_equal, surj, img2, (alg1,), (), tuple(checks))
    alg2 = _extract(img2, end2.image(a2))
    d1 = alg1[0] ** 2 + 4 * alg1[1]
    d2 = alg2[0] ** 2 + 4 * alg2[1]
    checks.append(Check("elementary.transport", img2[1] in (1, -1), f"point class transports with factor {rational_json(img2[1])}"))
    checks.append(Check("elementary.ends_equal", d1 == d2, f"{rational_json(d1)} vs {rational_json(d2)}"))
    return ElementaryReport(kernels_equal, surj, img2, (alg1, alg2), (d1, d2), tuple(checks))

