"""Admissible subsets over a lambda-chain and the alcove crystal operators."""

from __future__ import annotations

from dataclasses import dataclass

from .chains import LambdaChain, aff_apply, aff_compose, aff_identity, wall_reflection
from .errors import InvalidInput, ResourceLimit, TheoremViolation
from .roots import RootRef, RootSystem, Vector, vscale
from .weyl import WeylElement, identity_element, qb_edge, root_reflection

__all__ = [
    "FoldData",
    "SignWord",
    "CrystalGraph",
    "fold_data",
    "admissible_kinds",
    "is_admissible",
    "height_of",
    "encode_letters",
    "sign_word",
    "crystal_step",
    "string_lengths",
    "enumerate_admissible",
    "build_crystal",
    "crystal_json",
    "crystal_dot",
]

ENUMERATION_LIMIT = 10**6

_LETTERS = {(1, 1): "+", (-1, 1): "-", (1, -1): "±", (-1, -1): "∓"}
_UP_FIRST = ("+", "±")
_UP_SECOND = ("+", "∓")


def _positions(chain: LambdaChain, subset) -> tuple[int, ...]:
    js = sorted(set(subset))
    for j in js:
        if not (isinstance(j, int) and 1 <= j <= len(chain)):
            raise InvalidInput(f"position {j!r} outside 1..{len(chain)}")
    return tuple(js)


@dataclass(frozen=True)
class FoldData:
    """Folded roots and levels of one subset, with the endpoint data."""

    positions: tuple[int, ...]
    gammas: tuple[RootRef, ...]
    levels: tuple[int, ...]
    gamma_inf: Vector
    mu: Vector
    final: WeylElement


def fold_data(chain: LambdaChain, subset) -> FoldData:
    """Fold the chain at the given 1-based positions."""
    js = _positions(chain, subset)
    rs = chain.rs
    fold_at = set(js)
    lin = identity_element(rs)
    aff = aff_identity(rs)
    gammas: list[RootRef] = []
    levels: list[int] = []
    for k, a in enumerate(chain.roots):
        gam = lin.apply_ref(RootRef(a, 1))
        # level of the reflected wall, normalized to the positive direction
        lev = gam.sign * chain.levels[k] - rs.pairing(aff[1], RootRef(gam.index, 1))
        if lev.denominator != 1:
            raise TheoremViolation("folded level is not integral")
        gammas.append(gam)
        levels.append(int(lev))
        if k + 1 in fold_at:
            lin = lin * root_reflection(rs, a)
            aff = aff_compose(aff, wall_reflection(rs, a, -chain.levels[k]))
    mu = vscale(-1, aff_apply(aff, vscale(-1, chain.lam)))
    return FoldData(js, tuple(gammas), tuple(levels), lin.apply_vector(rs.rho), mu, lin)


def admissible_kinds(chain: LambdaChain, subset) -> tuple[str, ...]:
    """Edge kinds along the folding path; fails on the first non-edge."""
    js = _positions(chain, subset)
    rs = chain.rs
    w = identity_element(rs)
    kinds = []
    for j in js:
        a = chain.roots[j - 1]
        kind = qb_edge(rs, w, a)
        if kind is None:
            raise InvalidInput(f"no quantum Bruhat edge at position {j}")
        kinds.append(kind)
        w = w * root_reflection(rs, a)
    return tuple(kinds)


def is_admissible(chain: LambdaChain, subset) -> bool:
    """Whether the folding path stays inside the quantum Bruhat graph."""
    js = _positions(chain, subset)
    rs = chain.rs
    w = identity_element(rs)
    for j in js:
        a = chain.roots[j - 1]
        if qb_edge(rs, w, a) is None:
            return False
        w = w * root_reflection(rs, a)
    return True


def height_of(chain: LambdaChain, subset) -> int:
    """Sum of colevels over the negative folding positions."""
    fold = fold_data(chain, subset)
    return sum(chain.colevel(j) for j in fold.positions if fold.gammas[j - 1].sign < 0)


@dataclass(frozen=True)
class SignWord:
    """Letter encoding of the crossings in one affine simple direction."""

    positions: tuple[int, ...]
    letters: tuple[str, ...]
    terminal: str
    halves: tuple[int, ...]
    end: int
    peak: int

    def word(self) -> str:
        return "".join(self.letters) + self.terminal


def _alpha_ref(rs: RootSystem, p: int) -> RootRef:
    """Signed root acted on by the operators of color p."""
    if not (isinstance(p, int) and 0 <= p <= rs.rank):
        raise InvalidInput(f"color {p!r} outside 0..{rs.rank}")
    if p == 0:
        return RootRef(rs.highest_root_index, -1)
    return RootRef(rs.simple_index[p - 1], 1)


def encode_letters(pairs, terminal_sign: int) -> str:
    """Word of (relative sign, fold sign) pairs plus the terminal sign."""
    tail = "+" if terminal_sign > 0 else "-"
    return "".join(_LETTERS[rel, eps] for rel, eps in pairs) + tail


def sign_word(chain: LambdaChain, subset, p: int, fold: FoldData | None = None) -> SignWord:
    """Sign word of color p, with the doubled walk values of its graph."""
    rs = chain.rs
    if fold is None:
        fold = fold_data(chain, subset)
    aref = _alpha_ref(rs, p)
    fold_at = set(fold.positions)
    positions: list[int] = []
    letters: list[str] = []
    for k, gam in enumerate(fold.gammas, start=1):
        if gam.index != aref.index:
            continue
        positions.append(k)
        letters.append(_LETTERS[gam.sign * aref.sign, -1 if k in fold_at else 1])
    tval = rs.pairing(fold.gamma_inf, aref)
    if tval == 0:
        raise TheoremViolation("terminal direction is orthogonal")
    terminal = "+" if tval > 0 else "-"
    val = -aref.sign
    peak = val
    halves: list[int] = []
    for letter in letters:
        val += 1 if letter in _UP_FIRST else -1
        halves.append(val)
        peak = max(peak, val)
        val += 1 if letter in _UP_SECOND else -1
        peak = max(peak, val)
    val += 1 if terminal == "+" else -1
    peak = max(peak, val)
    for pos, half in zip(positions, halves):
        if half != 2 * aref.sign * fold.levels[pos - 1]:
            raise TheoremViolation("walk value disagrees with the folded level")
    if val != 2 * rs.pairing(fold.mu, aref):
        raise TheoremViolation("walk endpoint disagrees with the weight")
    return SignWord(tuple(positions), tuple(letters), terminal, tuple(halves), val, peak)


def crystal_step(
    chain: LambdaChain,
    subset,
    p: int,
    direction: str = "f",
    fold: FoldData | None = None,
) -> frozenset[int] | None:
    """Apply f_p or e_p to an admissible subset; None at the string end."""
    if direction not in ("f", "e"):
        raise InvalidInput(f"direction {direction!r}")
    if fold is None:
        # callers passing fold vouch for admissibility
        if not is_admissible(chain, subset):
            raise InvalidInput("subset is not admissible")
        fold = fold_data(chain, subset)
    sw = sign_word(chain, subset, p, fold)
    delta2 = 2 if p == 0 else 0
    cur = set(fold.positions)
    if direction == "f":
        if sw.peak <= delta2:
            return None
        if sw.peak in sw.halves:
            i = sw.halves.index(sw.peak)
            drop = sw.positions[i]
            if drop not in cur:
                raise TheoremViolation("first peak position is not a fold")
            if i == 0:
                raise TheoremViolation("peak has no predecessor")
            add = sw.positions[i - 1]
            cur.remove(drop)
        elif sw.peak == sw.end:
            if not sw.positions:
                raise TheoremViolation("peak has no predecessor")
            add = sw.positions[-1]
        else:
            raise TheoremViolation("peak not attained on the crossing set")
        if add in cur:
            raise TheoremViolation("predecessor of the peak is a fold")
        cur.add(add)
        return frozenset(cur)
    if not (sw.peak > sw.end and sw.peak >= delta2):
        return None
    hits = [i for i, h in enumerate(sw.halves) if h == sw.peak]
    if not hits:
        raise TheoremViolation("peak not attained before the endpoint")
    i = hits[-1]
    drop = sw.positions[i]
    if drop not in cur:
        raise TheoremViolation("last peak position is not a fold")
    cur.remove(drop)
    if i + 1 < len(sw.positions):
        add = sw.positions[i + 1]
        if add in cur:
            raise TheoremViolation("successor of the peak is a fold")
        cur.add(add)
    return frozenset(cur)


def string_lengths(
    chain: LambdaChain, subset, p: int, fold: FoldData | None = None
) -> tuple[int, int]:
    """(phi_p, eps_p) of an admissible subset."""
    if fold is None:
        if not is_admissible(chain, subset):
            raise InvalidInput("subset is not admissible")
        fold = fold_data(chain, subset)
    sw = sign_word(chain, subset, p, fold)
    delta2 = 2 if p == 0 else 0
    if sw.peak < delta2:
        return (0, 0)
    phi2 = sw.peak - delta2
    eps2 = sw.peak - sw.end
    if phi2 % 2 or eps2 % 2 or phi2 < 0 or eps2 < 0:
        raise TheoremViolation("string lengths must be nonnegative integers")
    return (phi2 // 2, eps2 // 2)


def enumerate_admissible(chain: LambdaChain) -> list[frozenset[int]]:
    """All admissible subsets, in lexicographic order of sorted positions."""
    rs = chain.rs
    out: list[frozenset[int]] = []

    def extend(w: WeylElement, start: int, picked: tuple[int, ...]) -> None:
        out.append(frozenset(picked))
        if len(out) > ENUMERATION_LIMIT:
            raise ResourceLimit("admissible enumeration exceeded the budget")
        for j in range(start, len(chain) + 1):
            a = chain.roots[j - 1]
            if qb_edge(rs, w, a) is not None:
                extend(w * root_reflection(rs, a), j + 1, picked + (j,))

    extend(identity_element(rs), 1, ())
    return out


@dataclass
class CrystalGraph:
    """Crystal on admissible subsets with colored arrows."""

    chain: LambdaChain
    vertices: list[frozenset[int]]
    index: dict[frozenset[int], int]
    weights: list[Vector]
    heights: list[int]
    edges: list[tuple[int, int, int]]


def build_crystal(chain: LambdaChain) -> CrystalGraph:
    """Enumerate admissible subsets and connect them by the operators f_p."""
    verts = enumerate_admissible(chain)
    index = {subset: i for i, subset in enumerate(verts)}
    weights: list[Vector] = []
    heights: list[int] = []
    edges: list[tuple[int, int, int]] = []
    for i, subset in enumerate(verts):
        fold = fold_data(chain, subset)
        weights.append(fold.mu)
        heights.append(
            sum(chain.colevel(j) for j in fold.positions if fold.gammas[j - 1].sign < 0)
        )
        for p in range(chain.rs.rank + 1):
            out = crystal_step(chain, subset, p, "f", fold)
            if out is None:
                continue
            if out not in index:
                raise TheoremViolation("operator left the admissible family")
            edges.append((i, index[out], p))
    return CrystalGraph(chain, verts, index, weights, heights, edges)


def crystal_json(graph: CrystalGraph) -> dict:
    """Plain-dict form of the crystal with integer weight coordinates."""
    rs = graph.chain.rs
    verts = [
        {
            "id": i,
            "J": sorted(subset),
            "weight": rs.weight_json(graph.weights[i]),
            "height": graph.heights[i],
        }
        for i, subset in enumerate(graph.vertices)
    ]
    edges = [{"src": s, "dst": d, "color": c} for s, d, c in graph.edges]
    return {"type": rs.type_tag, "vertices": verts, "edges": edges}


def crystal_dot(graph: CrystalGraph) -> str:
    """DOT rendering of the crystal; 0-arrows dashed."""
    lines = ["digraph crystal {"]
    for i, subset in enumerate(graph.vertices):
        label = "{" + ",".join(str(j) for j in sorted(subset)) + "}"
        lines.append(f'  v{i} [label="{label}"];')
    for s, d, c in graph.edges:
        style = ", style=dashed" if c == 0 else ""
        lines.append(f'  v{s} -> v{d} [label="{c}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
