import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsprg.errors import InvalidInputError, ResourceLimitError
from hsprg.kwise import (
    KWiseSpace,
    build_space,
    enumerate_support,
    is_irreducible,
    min_irreducible_poly,
    sample,
    support_array,
    verify_kwise,
)

PAIRWISE_4PT = {(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)}


def test_min_irreducible_polys():
    # x; x^2+x+1; x^3+x+1; x^4+x+1; x^5+x^2+1
    assert [min_irreducible_poly(m) for m in (1, 2, 3, 4, 5)] == [2, 7, 11, 19, 37]
    assert is_irreducible(7) and not is_irreducible(5)  # x^2+1 = (x+1)^2


def test_single_bit_space():
    sp = build_space(1, 1)
    assert sp.s == 1
    assert sorted(map(tuple, support_array(sp).tolist())) == [(-1,), (1,)]


def test_pairwise_space_is_the_4_point_space():
    sp = build_space(3, 2)
    assert sp.s == 2
    pts = support_array(sp)
    assert set(map(tuple, pts.tolist())) == PAIRWISE_4PT
    # seed enumeration reproduces exactly these four points
    assert {tuple(sample(sp, seed)) for seed in range(4)} == PAIRWISE_4PT
    assert verify_kwise(sp, 2).passed


def test_pairwise_space_fails_threewise_with_zero_cell():
    rep = verify_kwise(build_space(3, 2), 3)
    assert not rep.passed
    assert rep.first_zero_cell == ((1, 2, 3), (1, 1, -1), 0)
    assert rep.witness == rep.first_zero_cell


def test_bch_7_3():
    sp = build_space(7, 3)
    assert sp.s == 4
    rep = verify_kwise(sp, 3)
    assert rep.passed
    assert rep.cells_checked == math.comb(7, 3) * 8 == 280
    assert rep.expected_count == 2.0  # 16 seeds over 8 cells


def test_bch_7_3_frozen_matrix():
    # verified exhaustively once, then frozen: determinism across runs
    sp = build_space(7, 3)
    assert sp.modulus == 11
    assert sp.gen_matrix.tolist() == [
        [1, 1, 1, 1, 1, 1, 1],
        [1, 0, 1, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ]
    sp2 = build_space(7, 3)
    assert np.array_equal(sp.gen_matrix, sp2.gen_matrix)


def test_even_k_constructions():
    for n, k in [(5, 2), (9, 4), (6, 4)]:
        sp = build_space(n, k)
        assert sp.s == (k // 2) * n.bit_length()
        assert verify_kwise(sp, k).passed, (n, k)


def test_odd_k_constructions():
    for n, k in [(7, 5), (10, 3), (5, 5)]:
        sp = build_space(n, k)
        rep = verify_kwise(sp, k)
        assert rep.passed, (n, k)


def test_identity_fallback_full_cube():
    sp = build_space(4, 4)
    assert sp.construction_tag == "identity" and sp.s == 4
    pts = support_array(sp)
    assert len(set(map(tuple, pts.tolist()))) == 16
    for kk in range(1, 5):
        assert verify_kwise(sp, kk).passed
    # identity matrix: seed bits map bitwise, 0 -> +1, 1 -> -1
    assert tuple(sample(sp, 0b0101)) == (-1, 1, -1, 1)


def test_sample_contract():
    sp = build_space(3, 2)
    assert tuple(sample(sp, 0)) == (1, 1, 1)  # empty parity
    assert tuple(sample(sp, [1, 0])) == tuple(sample(sp, 1))
    with pytest.raises(InvalidInputError):
        sample(sp, 4)
    with pytest.raises(InvalidInputError):
        sample(sp, [1, 0, 1])
    with pytest.raises(InvalidInputError):
        build_space(3, 4)
    with pytest.raises(InvalidInputError):
        build_space(3, 0)


def test_enumeration_guard():
    sp = build_space(80, 11)  # s = 1 + 5*7 = 36 > 34
    assert sp.s > 34
    with pytest.raises(ResourceLimitError):
        next(enumerate_support(sp))


def test_verify_guard():
    sp = build_space(3, 2)
    with pytest.raises(ResourceLimitError):
        verify_kwise(build_space(80, 11), 2)
    assert sp is not None


def test_multiplicity_weighting():
    # k=1 on n=3: a 2-seed space whose two points repeat coordinate values;
    # projections onto any single coordinate are uniform by multiplicity
    sp = build_space(3, 1)
    assert sp.s == 1
    assert verify_kwise(sp, 1).passed
    pts = support_array(sp)
    assert len(pts) == 2


def test_conditional_independence_exhaustive():
    # direct Fact-5.2 style check: fixing any t <= k-1 coordinates leaves
    # every (k-t)-projection of the filtered support exactly uniform
    from itertools import combinations, product

    for n, k in [(6, 3), (7, 3), (8, 2)]:
        sp = build_space(n, k)
        pts = support_array(sp)
        for t in range(1, k):
            for fix in combinations(range(n), t):
                for pattern in product((-1, 1), repeat=t):
                    mask = np.all(pts[:, fix] == np.array(pattern), axis=1)
                    sub = pts[mask]
                    assert len(sub) == len(pts) // 2**t
                    kk = k - t
                    rest = [c for c in range(n) if c not in fix]
                    for proj in combinations(rest[: kk + 2], kk):
                        for pat2 in product((-1, 1), repeat=kk):
                            cnt = int(
                                np.count_nonzero(
                                    np.all(sub[:, proj] == np.array(pat2), axis=1)
                                )
                            )
                            assert cnt * 2**kk == len(sub)


def test_column_permutation_invariance():
    sp = build_space(7, 3)
    rng = np.random.default_rng(5)
    perm = rng.permutation(7)
    permuted = KWiseSpace(
        n=7, k=3, s=sp.s,
        gen_matrix=sp.gen_matrix[:, perm],
        construction_tag="bch-permuted",
        modulus=sp.modulus,
    )
    assert verify_kwise(permuted, 3).passed


def test_space_descriptor_roundtrip():
    sp = build_space(10, 3)
    desc = sp.to_json()
    assert desc == {"n": 10, "k": 3, "s": sp.s, "construction": "bch",
                    "modulus": sp.modulus}
    sp2 = KWiseSpace.from_json(desc)
    assert np.array_equal(sp.gen_matrix, sp2.gen_matrix)
    ident = build_space(5, 5)
    again = KWiseSpace.from_json(ident.to_json())
    assert np.array_equal(ident.gen_matrix, again.gen_matrix)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.data())
def test_projection_counts_are_exact_integers(n, data):
    k = data.draw(st.integers(1, min(n, 4)))
    sp = build_space(n, k)
    rep = verify_kwise(sp, k)
    assert rep.passed
    # exactness: expected count is the integer 2^(s-k), no tolerance
    assert rep.expected_count == 2 ** (sp.s - k)
