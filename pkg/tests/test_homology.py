import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cobordisc.errors import ValidationError
from cobordisc.homology import (
    ZERO,
    ChainComplex,
    GroupRingComplex,
    HomologyGroup,
    Z,
    Zmod,
    build_antipodal_sphere,
    equivariant_collapse,
    homology,
    homology_K,
    is_orientable,
    tensor_diagonal,
)
from cobordisc.linalg import field_rank, smith_normal_form


def rp_homology(i):
    """H_*(RP^i; Z) in degrees 0..i."""
    out = [Z]
    for k in range(1, i + 1):
        if k == i:
            out.append(Z if i % 2 else ZERO)
        else:
            out.append(Zmod(2) if k % 2 else ZERO)
    return out


def twisted_rp_homology(i):
    """H_*(RP^i; Z twisted by the sign representation)."""
    out = []
    for k in range(i + 1):
        if k == i:
            out.append(Z if i % 2 == 0 else ZERO)
        else:
            out.append(Zmod(2) if k % 2 == 0 else ZERO)
    return out


def direct_sum(a, b):
    tors = tuple(sorted(a.torsion + b.torsion))
    return HomologyGroup(a.free_rank + b.free_rank, tors)


def closed_form_K(n, i):
    i = min(i, n - i)
    base = rp_homology(i)
    shifted = rp_homology(i) if i % 2 else twisted_rp_homology(i)
    out = []
    for k in range(n + 1):
        a = base[k] if k <= i else ZERO
        s = k - (n - i)
        b = shifted[s] if 0 <= s <= i else ZERO
        out.append(direct_sum(a, b))
    return out


def rank_torsion_oracle(C):
    """Free rank from ranks over Q, torsion from the SNF of the incoming boundary."""
    out = []
    for n in range(len(C.dims)):
        r_out = field_rank(C.d(n).rows, C.dims[n])
        r_in = field_rank(C.d(n + 1).rows, C.d(n + 1).ncols)
        tors = tuple(x for x in smith_normal_form(C.d(n + 1)).diagonal if x > 1)
        out.append(HomologyGroup(C.dims[n] - r_out - r_in, tors))
    return out


def quotient_by_deck(E):
    """Orbit complex C/(x ~ gx) built from the underlying Z-complex."""
    U = E.underlying()
    maps = []
    for n in range(1, len(E.ranks)):
        d = U.d(n)
        rows = [[d[2 * i, 2 * j] + d[2 * i + 1, 2 * j] for j in range(E.ranks[n])] for i in range(E.ranks[n - 1])]
        maps.append(rows)
    return ChainComplex.from_maps(E.ranks, maps)


@pytest.mark.parametrize("n,i", [(2, 1), (4, 1), (4, 2), (6, 1), (6, 2), (6, 3), (8, 4), (8, 3), (10, 4)])
def test_homology_K_closed_form(n, i):
    assert homology_K(n, i) == closed_form_K(n, i)


def test_homology_K_known_values():
    assert homology_K(2, 1) == [Z, HomologyGroup(2), Z]
    assert homology_K(4, 2) == [Z, Zmod(2), Zmod(2), ZERO, Z]
    assert homology_K(6, 3) == [Z, Zmod(2), ZERO, HomologyGroup(2), Zmod(2), ZERO, Z]


def test_homology_K_symmetric_and_orientable():
    for n in (2, 4, 6, 8):
        for i in range(n + 1):
            assert homology_K(n, i) == homology_K(n, n - i)
            assert is_orientable(n, i)


def test_homology_K_rejects_odd_n():
    with pytest.raises(ValidationError):
        homology_K(3, 1)
    with pytest.raises(ValidationError):
        homology_K(4, 5)


@pytest.mark.parametrize("i", range(0, 8))
def test_projective_space(i):
    E = build_antipodal_sphere(i)
    assert homology(equivariant_collapse(E)) == rp_homology(i)
    assert homology(equivariant_collapse(E, [[-1]])) == twisted_rp_homology(i)
    sphere = homology(E.underlying())
    expect = [Z] + [ZERO] * (i - 1) + [Z] if i else [HomologyGroup(2)]
    assert sphere == expect


@pytest.mark.parametrize("a,b", [(1, 1), (2, 2), (1, 3), (2, 4), (3, 3)])
def test_collapse_matches_orbit_quotient(a, b):
    E = tensor_diagonal(build_antipodal_sphere(a), build_antipodal_sphere(b))
    E.validate()
    C = equivariant_collapse(E)
    assert C == quotient_by_deck(E)
    assert homology(C) == rank_torsion_oracle(C)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 3), (3, 3)])
def test_tensor_underlying_is_product_of_spheres(a, b):
    E = tensor_diagonal(build_antipodal_sphere(a), build_antipodal_sphere(b))
    H = homology(E.underlying())
    # H(S^a x S^b) = Z in degrees 0, a, b, a+b
    expect = [0] * (a + b + 1)
    for d in (0, a, b, a + b):
        expect[d] += 1
    assert [h.free_rank for h in H] == expect
    assert all(not h.torsion for h in H)


def test_involution_check():
    E = build_antipodal_sphere(2)
    with pytest.raises(ValidationError):
        equivariant_collapse(E, [[2]])
    C = equivariant_collapse(E, [[0, 1], [1, 0]])
    # the regular representation gives back the sphere
    assert homology(C) == [Z, ZERO, Z]


def test_chain_complex_validation():
    with pytest.raises(ValidationError, match="degree 2"):
        ChainComplex.from_dict({"dims": [1, 1, 1], "boundaries": [[[1]], [[1]]]})
    with pytest.raises(ValidationError, match="degree 1"):
        ChainComplex.from_maps([1, 2], [[[1, 1, 1]]]).validate()
    GF = ChainComplex.from_dict({"coeff": "Z2", "dims": [1, 1, 1], "boundaries": [[[2]], [[1]]]})
    assert [h.free_rank for h in homology(GF)] == [1, 0, 0]


def test_field_coefficients():
    # RP^2 over Z2 and Q
    C = equivariant_collapse(build_antipodal_sphere(2))
    z2 = ChainComplex(C.dims, C.boundaries, "Z2")
    qq = ChainComplex(C.dims, C.boundaries, "Q")
    assert [h.free_rank for h in homology(z2)] == [1, 1, 1]
    assert [h.free_rank for h in homology(qq)] == [1, 0, 0]


def test_dict_round_trip():
    C = equivariant_collapse(build_antipodal_sphere(3))
    assert ChainComplex.from_dict(C.to_dict()) == C
    E = GroupRingComplex.from_dict({"ranks": [1, 1], "boundaries": [[[[1, -1]]]]})
    assert homology(equivariant_collapse(E)) == rp_homology(1)


def test_str():
    assert str(HomologyGroup(2, (2, 4))) == "Z^2 + Z/2 + Z/4"
    assert str(ZERO) == "0"


def random_complex(rng, dims, lo=-2, hi=2):
    """Random chain complex: each boundary lands in the kernel of the previous one."""
    from cobordisc.linalg import kernel_basis

    maps = []
    prev = None
    for n in range(1, len(dims)):
        if prev is None:
            basis = [tuple(int(i == j) for j in range(dims[0])) for i in range(dims[0])]
        else:
            basis = kernel_basis(prev, "Z")
        cols = []
        for _ in range(dims[n]):
            coeffs = [rng.randint(lo, hi) for _ in basis]
            cols.append([sum(c * v[k] for c, v in zip(coeffs, basis)) for k in range(dims[n - 1])])
        rows = [[cols[j][i] for j in range(dims[n])] for i in range(dims[n - 1])]
        maps.append(rows)
        prev = rows
    return ChainComplex.from_maps(dims, maps)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=2, max_size=5), st.integers(0, 10**6))
def test_homology_matches_rank_torsion_oracle(dims, seed):
    C = random_complex(random.Random(seed), dims)
    C.validate()
    assert homology(C) == rank_torsion_oracle(C)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=2, max_size=5), st.integers(0, 10**6))
def test_euler_characteristic(dims, seed):
    C = random_complex(random.Random(seed), dims)
    H = homology(C)
    assert sum((-1) ** n * h.free_rank for n, h in enumerate(H)) == sum((-1) ** n * d for n, d in enumerate(dims))
