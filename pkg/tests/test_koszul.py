from __future__ import annotations

import itertools
from collections import Counter

import pytest

from vsl.bounds import VeroneseParams, h0
from vsl.harness import blockwise_rank, dense_differential
from vsl.koszul import (
    BlockKey,
    block_multidegrees,
    differential_block,
    orbit_reduce,
    orbit_rep,
    rep_orbit_size,
    space_blocks,
    space_dim,
    wedge_subsets,
)
from vsl.linalg import FieldSpec, dense_rank_mod, sparse_rank
from vsl.polyspace import monomial_basis

PRIME = 2147483647
FIELD = FieldSpec.prime(PRIME)


def brute_force_blocks(n: int, d: int, p: int, m: int) -> Counter:
    """Multidegree block sizes by direct enumeration of basis elements."""
    basis_d = monomial_basis(n, d)
    sizes: Counter = Counter()
    for sub in itertools.combinations(range(len(basis_d)), p):
        for mono in monomial_basis(n, m):
            w = list(mono)
            for i in sub:
                for c, e in enumerate(basis_d[i]):
                    w[c] += e
            sizes[tuple(w)] += 1
    return sizes


def test_space_blocks_line_quadric():
    blocks = space_blocks(1, 2, 1, 2)
    got = {mdeg: len(entry[0]) for mdeg, entry in blocks.items()}
    assert got == {(4, 0): 1, (3, 1): 2, (2, 2): 3, (1, 3): 2, (0, 4): 1}
    assert sum(got.values()) == 9 == space_dim(1, 2, 1, 2)


def test_space_blocks_degree_zero_coefficients():
    blocks = space_blocks(1, 2, 0, 0)
    assert {mdeg: len(e[0]) for mdeg, e in blocks.items()} == {(0, 0): 1}


def test_space_blocks_empty_for_negative_degree():
    assert space_blocks(1, 2, 1, -2) == {}
    assert block_multidegrees(VeroneseParams(1, 2, -5), 1, 1) == []


def test_space_blocks_match_enumeration():
    for n, d, p, m in ((1, 2, 1, 2), (1, 3, 2, 3), (2, 2, 2, 2), (2, 2, 3, 4)):
        blocks = space_blocks(n, d, p, m)
        got = {mdeg: len(entry[0]) for mdeg, entry in blocks.items()}
        assert got == dict(brute_force_blocks(n, d, p, m))


def test_block_elements_have_the_advertised_multidegree():
    n, d, p, m = 2, 2, 2, 2
    subs, _ = wedge_subsets(n, d, p)
    basis_d = monomial_basis(n, d)
    mons = monomial_basis(n, m)
    for mdeg, (sub_idx, mon_idx) in space_blocks(n, d, p, m).items():
        for si, ui in zip(sub_idx, mon_idx):
            w = list(mons[ui])
            for i in subs[si]:
                for c, e in enumerate(basis_d[i]):
                    w[c] += e
            assert tuple(w) == mdeg


def test_differential_block_line_quadric_hand_check():
    # at multidegree (2,2) the three source elements {x^2}(x)y^2,
    # {xy}(x)xy, {y^2}(x)x^2 all map to the single target x^2y^2 with +1
    block = differential_block(BlockKey(1, 2, 0, 1, 1, (2, 2)))
    assert (block.nrows, block.ncols) == (1, 3)
    assert sorted(block.entries) == [(0, 0, 1), (0, 1, 1), (0, 2, 1)]
    assert sparse_rank(block, FIELD) == 1


def test_differential_block_rejects_p_zero():
    # the p = 0 map is identically zero and is handled by callers, not here
    with pytest.raises(ValueError, match="need p >= 1"):
        differential_block(BlockKey(1, 2, 0, 0, 1, (2, 0)))


def test_columns_have_p_unit_entries():
    for mdeg, _ in block_multidegrees(VeroneseParams(2, 2), 2, 1):
        block = differential_block(BlockKey(2, 2, 0, 2, 1, mdeg))
        per_col = Counter(c for _, c, _ in block.entries)
        assert all(count == 2 for count in per_col.values())
        assert set(per_col) == set(range(block.ncols))
        assert all(v in (1, -1) for _, _, v in block.entries)


def _compose_is_zero(first, second, prime) -> bool:
    cols_first: dict[int, dict[int, int]] = {}
    for r, c, v in first.entries:
        cols_first.setdefault(c, {})[r] = cols_first.setdefault(c, {}).get(r, 0) + v
    cols_second: dict[int, dict[int, int]] = {}
    for r, c, v in second.entries:
        cols_second.setdefault(c, {})[r] = cols_second.setdefault(c, {}).get(r, 0) + v
    for col, mids in cols_first.items():
        acc: dict[int, int] = {}
        for mid, v1 in mids.items():
            for r, v2 in cols_second.get(mid, {}).items():
                acc[r] = (acc.get(r, 0) + v1 * v2) % prime
        if any(acc.values()):
            return False
    return True


@pytest.mark.parametrize("n,d", [(1, 3), (2, 2)])
def test_differential_squares_to_zero(n, d):
    params = VeroneseParams(n, d)
    for q in range(0, n + 2):
        for p in range(2, h0(n, d) + 1):
            for mdeg, _ in block_multidegrees(params, p, q):
                first = differential_block(BlockKey(n, d, 0, p, q, mdeg))
                second = differential_block(BlockKey(n, d, 0, p - 1, q + 1, mdeg))
                assert _compose_is_zero(first, second, PRIME)


def test_orbit_rep_and_size():
    assert orbit_rep((1, 3, 0)) == (3, 1, 0)
    assert rep_orbit_size((3, 1, 0)) == 6
    assert rep_orbit_size((2, 2, 0)) == 3
    assert rep_orbit_size((4, 0)) == 2
    assert rep_orbit_size((2, 2)) == 1


def test_orbit_reduce_examples():
    assert orbit_reduce([(4, 0), (0, 4)]) == [((4, 0), 2)]
    assert orbit_reduce([(2, 2)]) == [((2, 2), 1)]


def test_orbit_reduce_counts_match_partition_classes():
    mdegs = [mdeg for mdeg, _ in block_multidegrees(VeroneseParams(2, 2), 1, 1)]
    orbits = orbit_reduce(mdegs)
    assert sum(count for _, count in orbits) == len(mdegs)
    assert len(orbits) == len({tuple(sorted(m, reverse=True)) for m in mdegs})
    for rep, count in orbits:
        assert rep == tuple(sorted(rep, reverse=True))
        assert count == rep_orbit_size(rep)


def test_permuted_blocks_have_equal_rank_exhaustively():
    # coordinate permutations act on multidegrees without changing rank
    params = VeroneseParams(2, 2)
    for q in (1, 2):
        for p in range(1, 7):
            ranks: dict[tuple[int, ...], int] = {}
            for mdeg, _ in block_multidegrees(params, p, q):
                block = differential_block(BlockKey(2, 2, 0, p, q, mdeg))
                ranks[mdeg] = sparse_rank(block, FIELD)
            for mdeg, rank in ranks.items():
                assert rank == ranks[orbit_rep(mdeg)]


@pytest.mark.parametrize("n,d", [(1, 2), (1, 3)])
def test_blockwise_rank_totals_match_dense(n, d):
    params = VeroneseParams(n, d)
    for q in range(0, n + 2):
        for p in range(1, h0(n, d) + 1):
            dense = dense_rank_mod(dense_differential(params, p, q), PRIME)
            assert blockwise_rank(params, p, q, PRIME) == dense
