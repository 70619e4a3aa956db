"""Reduced alcove chains for dominant weights and moves between them.

A chain records the walls crossed by a reduced alcove path from the
fundamental alcove to its translate by -lambda: positive roots beta_i with
levels -l_i. Chains for the same weight are connected by reversal moves,
each reversing a window that lists a rank-2 positive system in a
reflection ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Q

from .errors import InvalidInput, ResourceLimit, TheoremViolation
from .roots import (
    RootSystem,
    Vector,
    reflection_closure,
    subsystem_ordering,
    vadd,
    vscale,
    vsub,
    vzero,
)
from .weyl import WeylElement, identity_element, root_reflection

__all__ = [
    "LambdaChain",
    "ChainMove",
    "omega_chain",
    "concat_chains",
    "validate_chain",
    "apply_reversal",
    "valid_moves",
    "connect_chains",
    "chain_word_roundtrip",
]

DEFAULT_MOVE_BUDGET = 10**6

Affine = tuple[WeylElement, Vector]


def aff_identity(rs: RootSystem) -> Affine:
    return (identity_element(rs), vzero(rs.dim))


def aff_compose(f: Affine, g: Affine) -> Affine:
    """(f o g)(v) = f(g(v))."""
    return (f[0] * g[0], vadd(f[0].apply_vector(g[1]), f[1]))


def aff_apply(f: Affine, v: Vector) -> Vector:
    return vadd(f[0].apply_vector(v), f[1])


def wall_reflection(rs: RootSystem, a: int, level: int) -> Affine:
    """Affine reflection in {<x, beta_a^vee> = level}."""
    return (root_reflection(rs, a), vscale(level, rs.positive_roots[a]))


def _count_levels(roots: tuple[int, ...]) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    out = []
    for a in roots:
        out.append(seen.get(a, 0))
        seen[a] = out[-1] + 1
    return tuple(out)


@dataclass(frozen=True)
class LambdaChain:
    """Wall-crossing data of one reduced alcove path."""

    rs: RootSystem
    lam: Vector
    roots: tuple[int, ...]
    blocks: tuple[tuple[int, int, int], ...] = field(default=(), compare=False)
    levels: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", _count_levels(self.roots))

    def __len__(self) -> int:
        return len(self.roots)

    def colevel(self, i: int) -> int:
        """Distance to the last wall in the beta_i direction (1-based i)."""
        a = self.roots[i - 1]
        total = self.rs.pair_vec(self.lam, self.rs.positive_roots[a])
        return int(total) - self.levels[i - 1]


@dataclass(frozen=True)
class ChainMove:
    """Reversal of the window of length q starting at 1-based position start."""

    start: int
    q: int

    def __post_init__(self) -> None:
        if self.start < 1:
            raise InvalidInput("move positions are 1-based")
        if self.q not in (2, 3, 4, 6):
            raise InvalidInput(f"window length {self.q} is not dihedral")


def _interior_point(rs: RootSystem) -> Vector:
    hmax = max(rs.coroot_height)
    return vscale(Q(1, hmax + 1), rs.rho)


def _type_a_basepoint(rs: RootSystem, k: int) -> Vector:
    """Interior point whose crossing order lists the roots row by row."""
    n = rs.dim
    delta = Q(1, n * k * (n - k))
    coords = []
    for i in range(1, n + 1):
        if i <= k:
            coords.append((n - k) * delta * (1 + k - i))
        else:
            coords.append((n - i) * delta)
    return tuple(coords)


_PROBE_SCALES = (2, 3, 5, 17, 257, 65537)


def _probe_vector(rs: RootSystem, scale: int) -> Vector:
    out = vzero(rs.dim)
    power = 1
    for w in rs.fundamental_weights:
        out = vadd(out, vscale(Q(power), w))
        power *= scale
    return out


def omega_chain(rs: RootSystem, k: int) -> LambdaChain:
    """Canonical chain for the k-th fundamental weight (1-based k)."""
    if not 1 <= k <= rs.rank:
        raise InvalidInput(f"fundamental weight index {k} out of range")
    lam = rs.fundamental_weights[k - 1]
    if rs.series == "A":
        base = _type_a_basepoint(rs, k)
        probe = None
    else:
        base = _interior_point(rs)
        probe = _probe_vector(rs, _PROBE_SCALES[0])
    for attempt, scale in enumerate(_PROBE_SCALES):
        if probe is not None:
            probe = _probe_vector(rs, scale)
        crossings = []
        for a in range(rs.num_positive):
            h = rs.pair_vec(lam, rs.positive_roots[a])
            if h <= 0:
                continue
            p0 = rs.pair_vec(base, rs.positive_roots[a])
            tie = rs.pair_vec(probe, rs.positive_roots[a]) / h if probe is not None else Q(0)
            for j in range(int(h)):
                crossings.append(((p0 + j) / h, tie, a, j))
        keys = [(t, tie) for t, tie, _, _ in crossings]
        if len(set(keys)) == len(keys):
            break
        if attempt == len(_PROBE_SCALES) - 1:
            raise TheoremViolation("crossing times could not be separated")
    crossings.sort()
    roots = tuple(a for _, _, a, _ in crossings)
    chain = LambdaChain(rs, lam, roots, blocks=((k, 0, len(roots)),))
    for i, (_, _, _, j) in enumerate(crossings):
        if chain.levels[i] != j:
            raise TheoremViolation("crossing levels disagree with multiplicity count")
    validate_chain(chain)
    return chain


def concat_chains(chains: list[LambdaChain]) -> LambdaChain:
    """Concatenate chains head to tail; the weights add."""
    if not chains:
        raise InvalidInput("need at least one chain")
    rs = chains[0].rs
    lam = vzero(rs.dim)
    roots: list[int] = []
    blocks: list[tuple[int, int, int]] = []
    for c in chains:
        if c.rs is not rs:
            raise InvalidInput("chains from different root systems")
        offset = len(roots)
        roots.extend(c.roots)
        blocks.extend((k, start + offset, length) for k, start, length in c.blocks)
        lam = vadd(lam, c.lam)
    out = LambdaChain(rs, lam, tuple(roots), blocks=tuple(blocks))
    validate_chain(out)
    return out


def _alcove_walls(rs: RootSystem) -> list[tuple[int, int]]:
    """Facet walls of the fundamental alcove as (root index, level)."""
    star = max(range(rs.num_positive), key=lambda a: rs.coroot_height[a])
    walls = [(star, 1)]
    walls.extend((rs.simple_index[i], 0) for i in range(rs.rank))
    return walls


def _image_wall(rs: RootSystem, cur: Affine, wa: int, wl: int) -> tuple[int, Q]:
    """Image of the base wall {<x, beta_wa^vee> = wl} under the affine map.

    Returned as (positive root index, level) after sign normalization.
    """
    signed = cur[0].apply_signed(wa + 1)
    root_idx = abs(signed) - 1
    sign = 1 if signed > 0 else -1
    level = wl + sign * rs.pair_vec(cur[1], rs.positive_roots[root_idx])
    return root_idx, sign * level


def encode_chain(chain: LambdaChain) -> tuple[int, ...]:
    """Affine generator word of the chain's wall sequence.

    Letter j >= 1 crosses the image of the j-th simple wall, letter 0 the
    image of the level-one wall. Raises if some crossing is not through a
    facet of the current alcove.
    """
    rs = chain.rs
    walls = _alcove_walls(rs)
    base_refl = [wall_reflection(rs, a, lv) for a, lv in walls]
    x0 = _interior_point(rs)
    cur = aff_identity(rs)
    word = []
    for i, (a, l) in enumerate(zip(chain.roots, chain.levels), start=1):
        p = rs.pair_vec(aff_apply(cur, x0), rs.positive_roots[a])
        if not (-l < p < -l + 1):
            raise InvalidInput(
                f"crossing {i} does not leave through the wall at level {-l}")
        letter = None
        for j in range(len(walls)):
            root_idx, level = _image_wall(rs, cur, *walls[j])
            if root_idx == a and level == -l:
                letter = j
                break
        if letter is None:
            raise InvalidInput(f"crossing {i} is not a facet of its alcove")
        word.append(letter)
        cur = aff_compose(cur, base_refl[letter])
    return tuple(word)


def decode_word(rs: RootSystem, lam: Vector, word: tuple[int, ...]) -> LambdaChain:
    """Rebuild the chain whose facet-crossing word is given."""
    walls = _alcove_walls(rs)
    base_refl = [wall_reflection(rs, a, lv) for a, lv in walls]
    cur = aff_identity(rs)
    roots = []
    levels = []
    for j in word:
        root_idx, level = _image_wall(rs, cur, *walls[j])
        if level > 0 or level.denominator != 1:
            raise InvalidInput("decoded crossing has an invalid level")
        roots.append(root_idx)
        levels.append(-int(level))
        cur = aff_compose(cur, base_refl[j])
    chain = LambdaChain(rs, lam, tuple(roots))
    if list(chain.levels) != levels:
        raise InvalidInput("decoded levels do not match multiplicity counts")
    return chain


def validate_chain(chain: LambdaChain) -> None:
    """Full check that the data describes a reduced alcove path."""
    rs = chain.rs
    for i in range(rs.rank):
        h = rs.pair_vec(chain.lam, rs.simple_roots[i])
        if h.denominator != 1 or h < 0:
            raise InvalidInput("weight is not dominant integral")
    total = sum(int(rs.pair_vec(chain.lam, rs.positive_roots[a]))
                for a in range(rs.num_positive))
    if len(chain.roots) != total:
        raise InvalidInput(
            f"chain length {len(chain.roots)} differs from the wall count {total}")
    word = encode_chain(chain)
    # endpoint must be the fundamental alcove translated by -lambda
    walls = _alcove_walls(rs)
    base_refl = [wall_reflection(rs, a, lv) for a, lv in walls]
    cur = aff_identity(rs)
    for j in word:
        cur = aff_compose(cur, base_refl[j])
    x_end = vadd(aff_apply(cur, _interior_point(rs)), chain.lam)
    for a in range(rs.num_positive):
        p = rs.pair_vec(x_end, rs.positive_roots[a])
        if not (0 < p < 1):
            raise InvalidInput("chain does not end at the translated alcove")


def window_subsystem(chain: LambdaChain, move: ChainMove) -> tuple[str, tuple[int, ...]]:
    """Validate a reversal window; returns its subsystem type and ordering."""
    lo = move.start - 1
    hi = lo + move.q
    if lo < 0 or hi > len(chain.roots):
        raise InvalidInput("move window exceeds the chain")
    window = chain.roots[lo:hi]
    members = frozenset(window)
    if len(members) != move.q:
        raise InvalidInput("move window repeats a root")
    if reflection_closure(chain.rs, set(members)) != members:
        raise InvalidInput("window roots are not the positive system of a subsystem")
    tag, order = subsystem_ordering(chain.rs, members)
    if window != order and window != tuple(reversed(order)):
        raise InvalidInput("window is not a reflection ordering")
    return tag, order


def apply_reversal(chain: LambdaChain, move: ChainMove) -> LambdaChain:
    """Reverse one admissible window; block metadata is dropped."""
    window_subsystem(chain, move)
    lo = move.start - 1
    hi = lo + move.q
    roots = chain.roots[:lo] + tuple(reversed(chain.roots[lo:hi])) + chain.roots[hi:]
    return LambdaChain(chain.rs, chain.lam, roots)


def valid_moves(chain: LambdaChain) -> list[ChainMove]:
    """All single reversal moves available on the chain."""
    out = []
    for q in (2, 3, 4, 6):
        for start in range(1, len(chain.roots) - q + 2):
            mv = ChainMove(start, q)
            try:
                window_subsystem(chain, mv)
            except InvalidInput:
                continue
            out.append(mv)
    return out


def _braid_order(rs: RootSystem, walls: list[tuple[int, int]], a: int, b: int) -> int | None:
    """Order of the product of two affine generator reflections; None if infinite."""
    ra, rb = walls[a][0], walls[b][0]
    va, vb = rs.positive_roots[ra], rs.positive_roots[rb]
    prod = rs.pair_vec(va, vb) * rs.pair_vec(vb, va)
    table = {0: 2, 1: 3, 2: 4, 3: 6}
    if prod in table:
        return table[int(prod)]
    return None  # parallel walls, infinite dihedral


def _word_neighbors(rs: RootSystem, walls, word: tuple[int, ...]):
    """Braid-move neighbors of a reduced affine word, with move windows."""
    n = len(word)
    for p in range(n - 1):
        a, b = word[p], word[p + 1]
        if a == b:
            raise TheoremViolation("reduced word with a repeated letter")
        m = _braid_order(rs, walls, a, b)
        if m is None or p + m > n:
            continue
        ok = all(word[p + t] == (a if t % 2 == 0 else b) for t in range(m))
        if not ok:
            continue
        swapped = tuple(b if t % 2 == 0 else a for t in range(m))
        yield word[:p] + swapped + word[p + m:], p, m


def _bfs_words(rs: RootSystem, start: tuple[int, ...], goal: tuple[int, ...],
               budget: int) -> list[tuple[int, int]]:
    """Braid moves (0-based position, width) turning start into goal."""
    if start == goal:
        return []
    walls = _alcove_walls(rs)
    parents: dict[tuple[int, ...], tuple[tuple[int, ...], int, int]] = {start: None}
    frontier = [start]
    visited = 1
    while frontier:
        nxt = []
        for word in frontier:
            for neighbor, p, m in _word_neighbors(rs, walls, word):
                if neighbor in parents:
                    continue
                parents[neighbor] = (word, p, m)
                visited += 1
                if neighbor == goal:
                    moves = []
                    cur = neighbor
                    while parents[cur] is not None:
                        prev, pp, mm = parents[cur]
                        moves.append((pp, mm))
                        cur = prev
                    moves.reverse()
                    return moves
                if visited > budget:
                    raise ResourceLimit(
                        f"braid search exceeded its budget of {budget} words")
                nxt.append(neighbor)
        frontier = nxt
    raise TheoremViolation("reduced words of one element must be braid-connected")


_SWAP_CACHE: dict[tuple[int, int, int], list[ChainMove]] = {}


def _block_swap_moves(rs: RootSystem, ka: int, kb: int, budget: int) -> list[ChainMove]:
    """Moves turning the two-block chain (omega_ka, omega_kb) into (kb, ka)."""
    key = (id(rs), ka, kb)
    if key not in _SWAP_CACHE:
        left = concat_chains([omega_chain(rs, ka), omega_chain(rs, kb)])
        right = concat_chains([omega_chain(rs, kb), omega_chain(rs, ka)])
        _SWAP_CACHE[key] = _connect_general(left, right, budget)
    return _SWAP_CACHE[key]


def _connect_general(c1: LambdaChain, c2: LambdaChain, budget: int) -> list[ChainMove]:
    """Connect two chains by braid search on their affine words."""
    w1, w2 = encode_chain(c1), encode_chain(c2)
    lo = 0
    while lo < len(w1) and w1[lo] == w2[lo]:
        lo += 1
    hi = 0
    while hi < len(w1) - lo and w1[-1 - hi] == w2[-1 - hi]:
        hi += 1
    mid1 = w1[lo:len(w1) - hi]
    mid2 = w2[lo:len(w2) - hi]
    raw = _bfs_words(c1.rs, mid1, mid2, budget)
    moves = [ChainMove(lo + p + 1, m) for p, m in raw]
    _assert_replay(c1, c2, moves)
    return moves


def _assert_replay(c1: LambdaChain, c2: LambdaChain, moves: list[ChainMove]) -> None:
    cur = c1
    for mv in moves:
        cur = apply_reversal(cur, mv)
    if cur != c2:
        raise TheoremViolation("move sequence does not replay to the target chain")


def connect_chains(c1: LambdaChain, c2: LambdaChain,
                   budget: int = DEFAULT_MOVE_BUDGET) -> list[ChainMove]:
    """A sequence of reversal moves turning c1 into c2.

    Both chains must describe the same weight. Block permutations are
    routed through adjacent block swaps; anything else falls back to a
    breadth-first braid search with the given node budget.
    """
    if c1.rs is not c2.rs:
        raise InvalidInput("chains from different root systems")
    if c1.lam != c2.lam:
        raise InvalidInput("chains for different weights cannot be connected")
    if c1.roots == c2.roots:
        return []
    single = _try_single_move(c1, c2)
    if single is not None:
        return [single]
    if _blocks_usable(c1) and _blocks_usable(c2):
        seq1 = [k for k, _, _ in c1.blocks]
        seq2 = [k for k, _, _ in c2.blocks]
        if seq1 != seq2 and sorted(seq1) == sorted(seq2):
            return _connect_by_block_sort(c1, c2, budget)
    return _connect_general(c1, c2, budget)


def _try_single_move(c1: LambdaChain, c2: LambdaChain) -> ChainMove | None:
    diffs = [i for i, (a, b) in enumerate(zip(c1.roots, c2.roots)) if a != b]
    if not diffs:
        return None
    lo, hi = diffs[0], diffs[-1]
    q = hi - lo + 1
    if q not in (2, 3, 4, 6):
        return None
    if c1.roots[lo:hi + 1] != tuple(reversed(c2.roots[lo:hi + 1])):
        return None
    mv = ChainMove(lo + 1, q)
    try:
        if apply_reversal(c1, mv) == c2:
            return mv
    except InvalidInput:
        return None
    return None


def _blocks_usable(chain: LambdaChain) -> bool:
    """Blocks cover the chain tightly and each one is a canonical omega chain."""
    if not chain.blocks:
        return False
    pos = 0
    for k, start, length in chain.blocks:
        if start != pos:
            return False
        if chain.roots[start:start + length] != omega_chain(chain.rs, k).roots:
            return False
        pos += length
    return pos == len(chain.roots)


def _connect_by_block_sort(c1: LambdaChain, c2: LambdaChain, budget: int) -> list[ChainMove]:
    seq = [k for k, _, _ in c1.blocks]
    target = [k for k, _, _ in c2.blocks]
    lengths = {k: len(omega_chain(c1.rs, k).roots) for k in set(seq)}
    moves: list[ChainMove] = []
    cur_seq = list(seq)
    cur_chain = c1
    for i in range(len(target)):
        if cur_seq[i] == target[i]:
            continue
        j = next(t for t in range(i + 1, len(cur_seq)) if cur_seq[t] == target[i])
        while j > i:
            # swap blocks j-1 and j
            offset = sum(lengths[k] for k in cur_seq[:j - 1])
            ka, kb = cur_seq[j - 1], cur_seq[j]
            for mv in _block_swap_moves(c1.rs, ka, kb, budget):
                moves.append(ChainMove(mv.start + offset, mv.q))
                cur_chain = apply_reversal(cur_chain, moves[-1])
            cur_seq[j - 1], cur_seq[j] = cur_seq[j], cur_seq[j - 1]
            j -= 1
    if cur_chain != c2:
        raise TheoremViolation("block sorting missed the target chain")
    return moves


def chain_word_roundtrip(chain: LambdaChain) -> tuple[int, ...]:
    """Encode to the affine word, decode back, and check exact equality."""
    word = encode_chain(chain)
    back = decode_word(chain.rs, chain.lam, word)
    if back != chain:
        raise TheoremViolation("affine word roundtrip changed the chain")
    return word
