"""Alcove chains: canonical constructions, words, reversal moves."""

import pytest

from qalcove.chains import (
    ChainMove,
    apply_reversal,
    chain_word_roundtrip,
    concat_chains,
    connect_chains,
    decode_word,
    omega_chain,
    valid_moves,
    validate_chain,
)
from qalcove.errors import InvalidInput
from qalcove.roots import build_root_system
from qalcove.chains import LambdaChain


def _coords(chain):
    return [chain.rs.root_coords[a] for a in chain.roots]


def test_omega_chains_a2():
    rs = build_root_system("A2")
    assert _coords(omega_chain(rs, 1)) == [(1, 0), (1, 1)]
    assert _coords(omega_chain(rs, 2)) == [(0, 1), (1, 1)]


def test_omega_chains_a3_row_order():
    rs = build_root_system("A3")
    assert _coords(omega_chain(rs, 1)) == [(1, 0, 0), (1, 1, 0), (1, 1, 1)]
    assert _coords(omega_chain(rs, 2)) == [
        (0, 1, 0), (0, 1, 1), (1, 1, 0), (1, 1, 1)]
    assert _coords(omega_chain(rs, 3)) == [(0, 0, 1), (0, 1, 1), (1, 1, 1)]


def test_omega_chain_a4_row_order():
    rs = build_root_system("A4")
    assert _coords(omega_chain(rs, 2)) == [
        (0, 1, 0, 0), (0, 1, 1, 0), (0, 1, 1, 1),
        (1, 1, 0, 0), (1, 1, 1, 0), (1, 1, 1, 1)]


def test_omega_chain_c2():
    rs = build_root_system("C2")
    assert _coords(omega_chain(rs, 1)) == [(1, 0), (2, 1), (1, 1)]
    assert _coords(omega_chain(rs, 2)) == [(0, 1), (1, 1), (2, 1), (1, 1)]
    assert omega_chain(rs, 2).levels == (0, 0, 0, 1)


def test_omega_chain_lengths_g2():
    rs = build_root_system("G2")
    assert len(omega_chain(rs, 1)) == 6
    assert len(omega_chain(rs, 2)) == 10


def test_concat_blocks_and_colevels():
    rs = build_root_system("A2")
    chain = concat_chains([omega_chain(rs, k) for k in (1, 2, 2, 1)])
    assert _coords(chain) == [
        (1, 0), (1, 1), (0, 1), (1, 1), (0, 1), (1, 1), (1, 0), (1, 1)]
    assert chain.levels == (0, 0, 0, 1, 1, 2, 1, 3)
    assert [chain.colevel(i) for i in range(1, 9)] == [2, 4, 2, 3, 1, 2, 1, 1]
    assert chain.blocks == ((1, 0, 2), (2, 2, 2), (2, 4, 2), (1, 6, 2))


def test_validate_rejects_tampered_chain():
    rs = build_root_system("A2")
    good = omega_chain(rs, 1)
    bad = LambdaChain(rs, good.lam, tuple(reversed(good.roots)))
    with pytest.raises(InvalidInput):
        validate_chain(bad)
    with pytest.raises(InvalidInput):
        validate_chain(LambdaChain(rs, good.lam, good.roots[:1]))


def test_word_roundtrip_simple():
    rs = build_root_system("A2")
    assert chain_word_roundtrip(omega_chain(rs, 1)) == (1, 2)
    assert chain_word_roundtrip(omega_chain(rs, 2)) == (2, 1)
    chain = concat_chains([omega_chain(rs, 1), omega_chain(rs, 2)])
    word = chain_word_roundtrip(chain)
    assert decode_word(rs, chain.lam, word) == chain


@pytest.mark.parametrize("tag,ks", [("A3", (1, 2, 3)), ("C2", (2, 1)), ("G2", (1, 2))])
def test_word_roundtrip_other_types(tag, ks):
    rs = build_root_system(tag)
    chain = concat_chains([omega_chain(rs, k) for k in ks])
    word = chain_word_roundtrip(chain)
    assert decode_word(rs, chain.lam, word) == chain


def test_apply_reversal_window_checks():
    rs = build_root_system("A2")
    chain = concat_chains([omega_chain(rs, k) for k in (1, 2, 2, 1)])
    moves = valid_moves(chain)
    assert ChainMove(1, 3) in moves and ChainMove(5, 3) in moves
    flipped = apply_reversal(chain, ChainMove(5, 3))
    assert _coords(flipped)[4:7] == [(1, 0), (1, 1), (0, 1)]
    validate_chain(flipped)
    with pytest.raises(InvalidInput):
        apply_reversal(chain, ChainMove(2, 3))
    # adjacent non-orthogonal pair: not the positive system of a subsystem
    assert ChainMove(1, 2) not in moves
    with pytest.raises(InvalidInput):
        apply_reversal(chain, ChainMove(1, 2))
    for mv in moves:
        validate_chain(apply_reversal(chain, mv))


def test_connect_single_move_case():
    rs = build_root_system("A2")
    c1 = concat_chains([omega_chain(rs, k) for k in (1, 2, 2, 1)])
    c2 = concat_chains([omega_chain(rs, k) for k in (1, 2, 1, 2)])
    moves = connect_chains(c1, c2)
    assert moves == [ChainMove(5, 3)]
    assert apply_reversal(c1, moves[0]) == c2


def test_connect_equal_chains_is_empty():
    rs = build_root_system("A2")
    c = concat_chains([omega_chain(rs, 1), omega_chain(rs, 1)])
    assert connect_chains(c, c) == []


def test_connect_block_sort_a2():
    rs = build_root_system("A2")
    c1 = concat_chains([omega_chain(rs, 2), omega_chain(rs, 1)])
    c2 = concat_chains([omega_chain(rs, 1), omega_chain(rs, 2)])
    moves = connect_chains(c1, c2)
    cur = c1
    for mv in moves:
        cur = apply_reversal(cur, mv)
    assert cur == c2


@pytest.mark.parametrize("tag,p,q", [
    ("A3", (1, 2, 3), (3, 2, 1)),
    ("C2", (1, 2), (2, 1)),
    ("C2", (2, 2, 1), (1, 2, 2)),
])
def test_connect_block_permutations(tag, p, q):
    rs = build_root_system(tag)
    c1 = concat_chains([omega_chain(rs, k) for k in p])
    c2 = concat_chains([omega_chain(rs, k) for k in q])
    moves = connect_chains(c1, c2)
    cur = c1
    for mv in moves:
        cur = apply_reversal(cur, mv)
    assert cur == c2


def test_connect_rejects_weight_mismatch():
    rs = build_root_system("A2")
    with pytest.raises(InvalidInput):
        connect_chains(omega_chain(rs, 1), omega_chain(rs, 2))
