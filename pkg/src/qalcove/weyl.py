"""Weyl group elements, the quantum Bruhat graph, and dihedral cosets.

Elements are stored as signed permutations of the positive roots, so
length is the count of sign flips and composition is table lookup.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidInput, ResourceLimit, TheoremViolation
from .roots import RootRef, RootSystem, Vector, vadd, vscale, vsub, vzero

__all__ = [
    "WeylElement",
    "identity_element",
    "simple_reflection",
    "root_reflection",
    "enumerate_weyl",
    "QBGraph",
    "qb_edge",
    "build_qbg",
    "shellable_path",
    "reflection_ordering_from_word",
    "coset_floor",
    "dihedral_length",
    "dihedral_word",
]

ENUMERATION_LIMIT = 10**7


class WeylElement:
    """One Weyl group element as a signed permutation of positive roots."""

    __slots__ = ("rs", "perm", "_len")

    def __init__(self, rs: RootSystem, perm: tuple[int, ...]):
        self.rs = rs
        self.perm = perm
        self._len = sum(1 for v in perm if v < 0)

    @property
    def length(self) -> int:
        return self._len

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, WeylElement)
                and self.rs is other.rs and self.perm == other.perm)

    def __hash__(self) -> int:
        return hash((id(self.rs), self.perm))

    def __repr__(self) -> str:
        word = "".join(f"s{i + 1}" for i in self.reduced_word()) or "e"
        return f"<{word}>"

    def is_identity(self) -> bool:
        return self._len == 0

    def apply_signed(self, signed: int) -> int:
        """Image of a signed root index (1-based, sign encodes +-)."""
        out = self.perm[abs(signed) - 1]
        return out if signed > 0 else -out

    def apply_ref(self, ref: RootRef) -> RootRef:
        signed = self.apply_signed(ref.sign * (ref.index + 1))
        return RootRef(abs(signed) - 1, 1 if signed > 0 else -1)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        if self.rs is not other.rs:
            raise InvalidInput("elements from different root systems")
        perm = tuple(self.apply_signed(v) for v in other.perm)
        return WeylElement(self.rs, perm)

    def inverse(self) -> "WeylElement":
        out = [0] * len(self.perm)
        for a, v in enumerate(self.perm):
            if v > 0:
                out[v - 1] = a + 1
            else:
                out[-v - 1] = -(a + 1)
        return WeylElement(self.rs, tuple(out))

    def apply_vector(self, v: Vector) -> Vector:
        """Apply the linear action; the root-span complement is fixed."""
        rs = self.rs
        coeffs = rs.expand_in_simples(v)
        out = v
        for i, c in enumerate(coeffs):
            if c:
                out = vsub(out, vscale(c, rs.simple_roots[i]))
        for i, c in enumerate(coeffs):
            if c:
                signed = self.apply_signed(rs.simple_index[i] + 1)
                image = rs.positive_roots[abs(signed) - 1]
                out = vadd(out, vscale(c if signed > 0 else -c, image))
        return out

    def reduced_word(self) -> tuple[int, ...]:
        """Simple-reflection word (0-based indices), right-descent peeling."""
        rs = self.rs
        w = self
        rev: list[int] = []
        while True:
            desc = next((i for i in range(rs.rank)
                         if w.perm[rs.simple_index[i]] < 0), None)
            if desc is None:
                break
            rev.append(desc)
            w = w * simple_reflection(rs, desc)
        if not w.is_identity():
            raise TheoremViolation("descent peeling did not reach identity")
        return tuple(reversed(rev))


def identity_element(rs: RootSystem) -> WeylElement:
    return WeylElement(rs, tuple(range(1, rs.num_positive + 1)))


def simple_reflection(rs: RootSystem, i: int) -> WeylElement:
    return WeylElement(rs, tuple(rs.sperm[i]))


def root_reflection(rs: RootSystem, a: int) -> WeylElement:
    """Reflection in the positive root with index a."""
    return WeylElement(rs, rs.reflection_perm(a))


def enumerate_weyl(rs: RootSystem) -> list[WeylElement]:
    """All Weyl group elements, breadth-first by length, deterministic."""
    order = rs.weyl_order()
    if order > ENUMERATION_LIMIT:
        raise ResourceLimit(f"Weyl group of order {order} exceeds enumeration budget")
    gens = [simple_reflection(rs, i) for i in range(rs.rank)]
    seen = {identity_element(rs).perm}
    frontier = [identity_element(rs)]
    out = [identity_element(rs)]
    while frontier:
        next_perms = set()
        for w in frontier:
            for g in gens:
                v = w * g
                if v.perm not in seen:
                    next_perms.add(v.perm)
        frontier = [WeylElement(rs, p) for p in sorted(next_perms)]
        seen.update(next_perms)
        out.extend(frontier)
    if len(out) != order:
        raise TheoremViolation("Weyl enumeration produced the wrong count")
    return out


def qb_edge(rs: RootSystem, w: WeylElement, a: int) -> str | None:
    """Kind of the quantum Bruhat edge w -> w s_beta_a, if any.

    Up steps raise length by 1; down steps lower it by 2 ht(beta_a^vee) - 1,
    which forces beta_a to be a quantum root (checked).
    """
    v = w * root_reflection(rs, a)
    diff = v.length - w.length
    if diff == 1:
        return "up"
    if diff == 1 - 2 * rs.coroot_height[a]:
        if not rs.quantum[a]:
            raise TheoremViolation("down edge along a non-quantum root")
        return "down"
    return None


@dataclass
class QBGraph:
    """Quantum Bruhat graph: vertex list plus labeled edges."""

    rs: RootSystem
    vertices: list[WeylElement]
    index: dict[tuple[int, ...], int]
    edges: list[tuple[int, int, int, str]]  # (src, dst, root index, kind)

    def vertex_id(self, w: WeylElement) -> int:
        return self.index[w.perm]


def build_qbg(rs: RootSystem) -> QBGraph:
    vertices = enumerate_weyl(rs)
    index = {w.perm: i for i, w in enumerate(vertices)}
    edges = []
    for src, w in enumerate(vertices):
        for a in range(rs.num_positive):
            kind = qb_edge(rs, w, a)
            if kind is not None:
                dst = index[(w * root_reflection(rs, a)).perm]
                edges.append((src, dst, a, kind))
    return QBGraph(rs, vertices, index, edges)


def shellable_path(
    rs: RootSystem,
    start: WeylElement,
    goal: WeylElement,
    ordering: tuple[int, ...],
    direction: str = "increasing",
    label_filter: frozenset[int] | None = None,
) -> list[tuple[int, str]]:
    """The unique label-monotone quantum Bruhat path from start to goal.

    Labels are drawn from `ordering` (a reflection ordering given as root
    indices) intersected with label_filter, and must be strictly
    increasing or strictly decreasing along the path. Exactly one such
    path is guaranteed; finding zero or several raises.
    """
    if direction not in ("increasing", "decreasing"):
        raise InvalidInput(f"unknown direction {direction!r}")
    labels = list(ordering) if direction == "increasing" else list(reversed(ordering))
    if label_filter is not None:
        labels = [a for a in labels if a in label_filter]
    found: list[list[tuple[int, str]]] = []

    def dfs(u: WeylElement, pos: int, trail: list[tuple[int, str]]) -> None:
        if u == goal:
            found.append(list(trail))
            # keep searching: uniqueness is part of the contract
        for p in range(pos, len(labels)):
            a = labels[p]
            kind = qb_edge(rs, u, a)
            if kind is None:
                continue
            trail.append((a, kind))
            dfs(u * root_reflection(rs, a), p + 1, trail)
            trail.pop()

    dfs(start, 0, [])
    if len(found) != 1:
        raise TheoremViolation(
            f"expected a unique {direction} path, found {len(found)}")
    return found[0]


def reflection_ordering_from_word(rs: RootSystem, word: tuple[int, ...]) -> tuple[int, ...]:
    """Reflection ordering induced by a reduced word for the longest element:
    the k-th root is s_{i_1} ... s_{i_{k-1}} (alpha_{i_k})."""
    if len(word) != rs.num_positive:
        raise InvalidInput("word length must equal the number of positive roots")
    out = []
    prefix = identity_element(rs)
    for i in word:
        signed = prefix.apply_signed(rs.simple_index[i] + 1)
        if signed < 0:
            raise InvalidInput("word is not reduced")
        out.append(signed - 1)
        prefix = prefix * simple_reflection(rs, i)
    if len(set(out)) != rs.num_positive:
        raise TheoremViolation("ordering does not exhaust the positive roots")
    return tuple(out)


@lru_cache(maxsize=None)
def one_line(w: WeylElement) -> tuple[int, ...]:
    """Type A only: the permutation as (w(1), ..., w(n))."""
    rs = w.rs
    if rs.series != "A":
        raise InvalidInput("one-line notation is for type A")
    n = rs.dim
    from .roots import _unit

    out = []
    for i in range(n):
        img = w.apply_vector(_unit(n, i))
        hits = [j for j in range(n) if img == _unit(n, j)]
        if len(hits) != 1:
            raise TheoremViolation("basis vector image is not a basis vector")
        out.append(hits[0] + 1)
    return tuple(out)


def from_one_line(rs: RootSystem, line: tuple[int, ...]) -> WeylElement:
    """Type A only: build the element w with w(i) = line[i-1]."""
    if rs.series != "A" or len(line) != rs.dim or sorted(line) != list(range(1, rs.dim + 1)):
        raise InvalidInput("not a one-line permutation for this system")
    # positive roots are e_i - e_j with i < j; track images with signs
    perm = []
    for a in range(rs.num_positive):
        vec = rs.positive_roots[a]
        i = vec.index(1)
        j = vec.index(-1)
        wi, wj = line[i], line[j]
        if wi < wj:
            target = tuple(1 if k == wi - 1 else -1 if k == wj - 1 else 0 for k in range(rs.dim))
            sign = 1
        else:
            target = tuple(1 if k == wj - 1 else -1 if k == wi - 1 else 0 for k in range(rs.dim))
            sign = -1
        idx = next(b for b in range(rs.num_positive)
                   if all(rs.positive_roots[b][k] == target[k] for k in range(rs.dim)))
        perm.append(sign * (idx + 1))
    return WeylElement(rs, tuple(perm))


def dihedral_length(rs: RootSystem, subsystem: tuple[int, ...], w: WeylElement) -> int:
    """Length of w within the dihedral subgroup: inversions inside it."""
    return sum(1 for a in subsystem if w.perm[a] < 0)


def dihedral_word(rs: RootSystem, subsystem: tuple[int, ...], w: WeylElement) -> str:
    """Alternating word of a dihedral element, e.g. 's1s2s1'; 'e' if trivial.

    's1' is the reflection in the first root of the subsystem ordering,
    's2' the one in the last. The longest element is spelled starting
    from 's1'.
    """
    lbar = dihedral_length(rs, subsystem, w)
    if lbar == 0:
        if not all(w.perm[a] == a + 1 for a in subsystem):
            raise InvalidInput("element does not lie in the dihedral subgroup")
        return "e"
    winv = w.inverse()
    starts_s1 = winv.perm[subsystem[0]] < 0
    first = 1 if starts_s1 or lbar == len(subsystem) else 2
    letters = []
    for k in range(lbar):
        letters.append(f"s{first}" if k % 2 == 0 else f"s{3 - first}")
    return "".join(letters)


def coset_floor(
    rs: RootSystem, w: WeylElement, subsystem: tuple[int, ...]
) -> tuple[WeylElement, WeylElement]:
    """Factor w = floor * wbar over a rank-2 reflection subgroup.

    The floor is the unique coset representative sending every root of the
    subsystem to a positive root; wbar lies in the dihedral subgroup.
    """
    gen_roots = (subsystem[0], subsystem[-1])
    u = w
    while True:
        neg = next((a for a in gen_roots if u.perm[a] < 0), None)
        if neg is None:
            break
        u = u * root_reflection(rs, neg)
    for a in subsystem:
        if u.perm[a] < 0:
            raise TheoremViolation("floor fails positivity on the subsystem")
    wbar = u.inverse() * w
    for a in subsystem:
        if abs(wbar.perm[a]) - 1 not in subsystem:
            raise TheoremViolation("coset remainder leaves the subsystem")
    return u, wbar
