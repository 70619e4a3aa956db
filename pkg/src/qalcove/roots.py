"""Finite root systems with exact rational arithmetic.

Classical series are realized in the standard coordinate presentations;
exceptional types use simple-root coordinates with the symmetrized Cartan
form. All data is computed over Fraction, no floating point anywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction as Q
from functools import lru_cache
from itertools import combinations

from .errors import InvalidInput, TheoremViolation

Vector = tuple[Q, ...]

__all__ = [
    "Vector",
    "RootRef",
    "RootSystem",
    "build_root_system",
    "reflect_weight",
    "rank2_subsystem",
    "is_quantum_root",
    "subsystem_census",
]


def vadd(x: Vector, y: Vector) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Vector, y: Vector) -> Vector:
    return tuple(a - b for a, b in zip(x, y))


def vscale(c: Q | int, x: Vector) -> Vector:
    return tuple(c * a for a in x)


def vzero(dim: int) -> Vector:
    return (Q(0),) * dim


def solve_linear(rows: list[list[Q]], rhs: list[Q]) -> list[Q] | None:
    """Solve a square exact linear system by Gaussian elimination."""
    n = len(rows)
    aug = [[Q(v) for v in row] + [Q(rhs[i])] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * p for v, p in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def invert_matrix(rows: list[list[Q]]) -> list[list[Q]]:
    n = len(rows)
    cols = []
    for j in range(n):
        rhs = [Q(1) if i == j else Q(0) for i in range(n)]
        col = solve_linear(rows, rhs)
        if col is None:
            raise InvalidInput("singular matrix")
        cols.append(col)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class RootRef:
    """A signed reference into the positive roots: sign * positive_roots[index]."""

    index: int
    sign: int = 1

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise InvalidInput(f"sign must be +-1, got {self.sign}")


# Weyl group orders, used to guard enumeration budgets.
_WEYL_ORDER = {
    "A": lambda n: _factorial(n + 1),
    "B": lambda n: 2**n * _factorial(n),
    "C": lambda n: 2**n * _factorial(n),
    "D": lambda n: 2 ** (n - 1) * _factorial(n),
    "E": lambda n: {6: 51840, 7: 2903040, 8: 696729600}[n],
    "F": lambda n: 1152,
    "G": lambda n: 12,
}


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def _classical_simple_roots(series: str, n: int) -> tuple[list[Vector], int]:
    """Simple roots in coordinate presentation; returns (roots, ambient dim)."""
    if series == "A":
        dim = n + 1
        basis = [_unit(dim, i) for i in range(dim)]
        return [vsub(basis[i], basis[i + 1]) for i in range(n)], dim
    dim = n
    basis = [_unit(dim, i) for i in range(dim)]
    roots = [vsub(basis[i], basis[i + 1]) for i in range(n - 1)]
    if series == "B":
        roots.append(basis[n - 1])
    elif series == "C":
        roots.append(vscale(2, basis[n - 1]))
    elif series == "D":
        roots.append(vadd(basis[n - 2], basis[n - 1]))
    else:
        raise InvalidInput(f"unknown classical series {series}")
    return roots, dim


def _unit(dim: int, i: int) -> Vector:
    return tuple(Q(1) if j == i else Q(0) for j in range(dim))


def _classical_weights(series: str, n: int, dim: int) -> list[Vector]:
    basis = [_unit(dim, i) for i in range(dim)]

    def head(k: int) -> Vector:
        out = vzero(dim)
        for i in range(k):
            out = vadd(out, basis[i])
        return out

    if series == "A":
        return [head(k) for k in range(1, n + 1)]
    if series == "B":
        ws = [head(k) for k in range(1, n)]
        ws.append(vscale(Q(1, 2), head(n)))
        return ws
    if series == "C":
        return [head(k) for k in range(1, n + 1)]
    if series == "D":
        ws = [head(k) for k in range(1, n - 1)]
        ws.append(vscale(Q(1, 2), vsub(head(n - 1), basis[n - 1])))
        ws.append(vscale(Q(1, 2), head(n)))
        return ws
    raise InvalidInput(series)


# Cartan matrices (rows i: <alpha_j, alpha_i^vee>) and half square lengths d_i
# for the exceptional types, Bourbaki node order.
_EXCEPTIONAL = {
    ("G", 2): (
        [[2, -3], [-1, 2]],
        [1, 3],  # alpha_1 short
    ),
    ("F", 4): (
        [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -2, 2, -1], [0, 0, -1, 2]],
        [2, 2, 1, 1],  # alpha_1, alpha_2 long
    ),
    ("E", 6): (None, None),
    ("E", 7): (None, None),
    ("E", 8): (None, None),
}


def _e_cartan(n: int) -> list[list[int]]:
    # Bourbaki E-series diagram: chain 1-3-4-5-6(-7-8), node 2 attached to 4.
    adj = {(1, 3), (3, 4), (4, 5), (5, 6), (2, 4)}
    if n >= 7:
        adj.add((6, 7))
    if n == 8:
        adj.add((7, 8))
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in adj:
        a[i - 1][j - 1] = a[j - 1][i - 1] = -1
    return a


def parse_type_tag(tag: str) -> tuple[str, int]:
    """Normalize a series label like 'A2', 'a_2', or 'A1xA1'."""
    text = tag.strip().upper().replace("_", "")
    if text in ("A1XA1", "A1+A1", "A1A1"):
        return ("A1xA1", 2)
    m = re.fullmatch(r"([ABCDEFG])(\d+)", text)
    if not m:
        raise InvalidInput(f"unknown root system type {tag!r}")
    series, n = m.group(1), int(m.group(2))
    bounds = {"A": (1, 30), "B": (2, 30), "C": (2, 30), "D": (4, 30),
              "E": (6, 8), "F": (4, 4), "G": (2, 2)}
    lo, hi = bounds[series]
    if not lo <= n <= hi:
        raise InvalidInput(f"rank {n} out of range for series {series}")
    return series, n


class RootSystem:
    """Immutable container for one finite root system.

    positive_roots are sorted by (height, simple-root coordinates), so
    indices are stable across runs. gram is None for the coordinate
    presentations (Euclidean dot product) and the symmetrized Cartan matrix
    otherwise.
    """

    def __init__(self, series: str, rank: int):
        self.series = series
        self.rank = rank
        self.type_tag = f"{series}{rank}" if series != "A1xA1" else "A1xA1"

        if series == "A1xA1":
            simple = [(Q(1), Q(0)), (Q(0), Q(1))]
            dim = 2
            self.gram = None
            self.cartan = [[2, 0], [0, 2]]
            weights = [vscale(Q(1, 2), simple[0]), vscale(Q(1, 2), simple[1])]
        elif series in ("A", "B", "C", "D"):
            simple, dim = _classical_simple_roots(series, rank)
            self.gram = None
            weights = _classical_weights(series, rank, dim)
            self.cartan = None  # filled below from the geometry
        else:
            if series in ("G", "F"):
                cartan, d = _EXCEPTIONAL[(series, rank)]
            else:
                cartan, d = _e_cartan(rank), [1] * rank
            dim = rank
            simple = [_unit(dim, i) for i in range(dim)]
            self.gram = [[Q(d[i] * cartan[i][j]) for j in range(rank)]
                         for i in range(rank)]
            for i in range(rank):
                for j in range(rank):
                    if self.gram[i][j] != self.gram[j][i]:
                        raise TheoremViolation("Cartan symmetrization failed")
            self.cartan = cartan
            weights = None  # from inverse Cartan below

        self.dim = dim
        self.simple_roots: list[Vector] = simple
        if self.cartan is None:
            self.cartan = [
                [int(self.pair_vec(simple[j], simple[i])) for j in range(rank)]
                for i in range(rank)
            ]
        if weights is None:
            inv = invert_matrix([[Q(v) for v in row] for row in self.cartan])
            weights = []
            for i in range(rank):
                w = vzero(dim)
                for k in range(rank):
                    w = vadd(w, vscale(inv[k][i], simple[k]))
                weights.append(w)
        self.fundamental_weights: list[Vector] = weights

        self._close_roots()
        self._derive_tables()

    # -- construction ---------------------------------------------------

    def _close_roots(self) -> None:
        """Generate all roots as simple-root coordinate vectors."""
        start = [tuple(1 if j == i else 0 for j in range(self.rank))
                 for i in range(self.rank)]
        seen = set(start)
        queue = list(start)
        while queue:
            coords = queue.pop()
            for i in range(self.rank):
                pairing = sum(c * self.cartan[i][k] for k, c in enumerate(coords))
                new = list(coords)
                new[i] -= pairing
                new_t = tuple(new)
                if new_t not in seen:
                    seen.add(new_t)
                    queue.append(new_t)
        positives = [c for c in seen if all(v >= 0 for v in c)]
        negatives = [c for c in seen if all(v <= 0 for v in c)]
        if len(positives) + len(negatives) != len(seen):
            raise TheoremViolation("root with mixed-sign coordinates")
        positives.sort(key=lambda c: (sum(c), c))
        self.root_coords: list[tuple[int, ...]] = positives
        self.positive_roots: list[Vector] = [self._from_coords(c) for c in positives]
        self.index_of = {c: i for i, c in enumerate(positives)}
        self.num_positive = len(positives)

    def _from_coords(self, coords: tuple[int, ...]) -> Vector:
        out = vzero(self.dim)
        for c, alpha in zip(coords, self.simple_roots):
            if c:
                out = vadd(out, vscale(c, alpha))
        return out

    def _derive_tables(self) -> None:
        npos = self.num_positive
        self.simple_index = [
            self.index_of[tuple(1 if j == i else 0 for j in range(self.rank))]
            for i in range(self.rank)
        ]
        self.norms = [self.inner(b, b) for b in self.positive_roots]
        max_norm = max(self.norms)
        self.is_long = [nm == max_norm for nm in self.norms]
        self.coroots: list[Vector] = [
            vscale(2 / nm, b) for b, nm in zip(self.positive_roots, self.norms)
        ]
        # coroot coordinates over the simple coroots, always integers
        self.coroot_coords: list[tuple[int, ...]] = []
        for idx, coords in enumerate(self.root_coords):
            d_root = self.norms[idx] / 2
            cv = []
            for i, c in enumerate(coords):
                d_i = self.norms[self.simple_index[i]] / 2
                val = Q(c) * d_i / d_root
                if val.denominator != 1:
                    raise TheoremViolation("non-integral coroot coordinate")
                cv.append(int(val))
            self.coroot_coords.append(tuple(cv))
        self.coroot_height = [sum(cv) for cv in self.coroot_coords]
        heights = [sum(c) for c in self.root_coords]
        top = max(heights)
        tops = [i for i, h in enumerate(heights) if h == top]
        if self.series != "A1xA1" and len(tops) != 1:
            raise TheoremViolation("highest root is not unique")
        self.highest_root_index = tops[-1]
        self.rho = vscale(Q(1, 2), self._sum(self.positive_roots))
        # pairing table <beta_a, alpha_i^vee> for the simple reflections
        self._simple_pairings = [
            [self._coord_pairing(a, i) for i in range(self.rank)]
            for a in range(npos)
        ]
        self.sperm: list[list[int]] = [
            [self._reflect_index(a, i) for a in range(npos)]
            for i in range(self.rank)
        ]
        self.quantum = [self._quantum(a) for a in range(npos)]
        self._refl_cache: dict[int, tuple[int, ...]] = {}

    def _sum(self, vecs: list[Vector]) -> Vector:
        out = vzero(self.dim)
        for v in vecs:
            out = vadd(out, v)
        return out

    def _coord_pairing(self, a: int, i: int) -> int:
        return sum(c * self.cartan[i][k] for k, c in enumerate(self.root_coords[a]))

    def _reflect_index(self, a: int, i: int) -> int:
        """Signed index of s_i(beta_a) among the positive roots."""
        coords = list(self.root_coords[a])
        coords[i] -= self._coord_pairing(a, i)
        if all(v >= 0 for v in coords):
            return self.index_of[tuple(coords)] + 1
        return -(self.index_of[tuple(-v for v in coords)] + 1)

    def _quantum(self, a: int) -> bool:
        if self.is_long[a]:
            return True
        support = [i for i, c in enumerate(self.root_coords[a]) if c]
        return not any(self.is_long[self.simple_index[i]] for i in support)

    # -- exact geometry --------------------------------------------------

    def inner(self, x: Vector, y: Vector) -> Q:
        if self.gram is None:
            return sum((a * b for a, b in zip(x, y)), Q(0))
        total = Q(0)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        total += a * self.gram[i][j] * b
        return total

    def pair_vec(self, v: Vector, root: Vector) -> Q:
        """<v, root^vee> = 2 (v, root) / (root, root)."""
        return 2 * self.inner(v, root) / self.inner(root, root)

    def pairing(self, v: Vector, ref: RootRef) -> Q:
        """<v, ref^vee> for a signed root reference."""
        return ref.sign * self.pair_vec(v, self.positive_roots[ref.index])

    def root_vector(self, ref: RootRef) -> Vector:
        vec = self.positive_roots[ref.index]
        return vec if ref.sign == 1 else vscale(-1, vec)

    def reflection_perm(self, a: int) -> tuple[int, ...]:
        """Signed positive-root permutation of the reflection in beta_a."""
        if a not in self._refl_cache:
            beta = self.positive_roots[a]
            out = []
            for b in range(self.num_positive):
                img = vsub(self.positive_roots[b],
                           vscale(self.pair_vec(self.positive_roots[b], beta), beta))
                signed = self._lookup_signed(img)
                out.append(signed)
            self._refl_cache[a] = tuple(out)
        return self._refl_cache[a]

    def _lookup_signed(self, vec: Vector) -> int:
        coords = self.expand_in_simples(vec)
        key = tuple(int(c) for c in coords)
        if key in self.index_of:
            return self.index_of[key] + 1
        neg = tuple(-c for c in key)
        if neg in self.index_of:
            return -(self.index_of[neg] + 1)
        raise InvalidInput("vector is not a root")

    def expand_in_simples(self, vec: Vector) -> tuple[Q, ...]:
        """Coefficients of the projection of vec onto the root span."""
        rows = [[Q(self.cartan[i][k]) for k in range(self.rank)]
                for i in range(self.rank)]
        rhs = [self.pair_vec(vec, self.simple_roots[i]) for i in range(self.rank)]
        sol = solve_linear(rows, rhs)
        if sol is None:
            raise TheoremViolation("Cartan matrix is singular")
        return tuple(sol)

    def omega_coords(self, v: Vector) -> tuple[Q, ...]:
        """Coordinates <v, alpha_i^vee> in the fundamental-weight basis."""
        return tuple(self.pair_vec(v, self.simple_roots[i]) for i in range(self.rank))

    def weight_from_omega(self, coeffs: list[int]) -> Vector:
        out = vzero(self.dim)
        for c, w in zip(coeffs, self.fundamental_weights):
            if c:
                out = vadd(out, vscale(c, w))
        return out

    # -- serialization ---------------------------------------------------

    def root_json(self, ref: RootRef) -> list[int]:
        return [ref.sign * c for c in self.root_coords[ref.index]]

    def weight_json(self, v: Vector) -> list[int]:
        out = []
        for q in self.omega_coords(v):
            if q.denominator != 1:
                raise InvalidInput("weight is not integral")
            out.append(int(q))
        return out

    def weyl_order(self) -> int:
        if self.series == "A1xA1":
            return 4
        return _WEYL_ORDER[self.series](self.rank)

    def __repr__(self) -> str:
        return f"RootSystem({self.type_tag})"


@lru_cache(maxsize=None)
def _build_cached(series: str, rank: int) -> RootSystem:
    return RootSystem(series, rank)


def build_root_system(type_tag: str) -> RootSystem:
    """Construct (and cache) the root system for a series label like 'C2'."""
    series, rank = parse_type_tag(type_tag)
    return _build_cached(series, rank)


def reflect_weight(rs: RootSystem, ref: RootRef, v: Vector, level: int = 0) -> Vector:
    """Affine reflection of v in the hyperplane {<x, ref^vee> = level}."""
    root = rs.root_vector(ref)
    return vsub(v, vscale(rs.pair_vec(v, root) - level, root))


def is_quantum_root(rs: RootSystem, ref: RootRef) -> bool:
    """Positive roots whose reflection length equals 2 ht(alpha^vee) - 1."""
    if ref.sign != 1:
        raise InvalidInput("quantum roots are positive by definition")
    return rs.quantum[ref.index]


def _span_membership(rs: RootSystem, a: int, b: int) -> list[int]:
    """All positive-root indices lying in the plane spanned by roots a, b."""
    va, vb = rs.positive_roots[a], rs.positive_roots[b]
    gaa, gab, gbb = rs.inner(va, va), rs.inner(va, vb), rs.inner(vb, vb)
    out = []
    for c in range(rs.num_positive):
        vc = rs.positive_roots[c]
        sol = solve_linear([[gaa, gab], [gab, gbb]],
                           [rs.inner(vc, va), rs.inner(vc, vb)])
        if sol is None:
            raise InvalidInput("proportional roots span no plane")
        x, y = sol
        recon = vadd(vscale(x, va), vscale(y, vb))
        if recon == vc:
            out.append(c)
    return out


def reflection_closure(rs: RootSystem, seed: set[int]) -> frozenset[int]:
    """Close a set of positive-root indices under mutual reflection."""
    closed = set(seed)
    frontier = list(seed)
    while frontier:
        a = frontier.pop()
        perm = rs.reflection_perm(a)
        for b in list(closed):
            c = abs(perm[b]) - 1
            if c not in closed:
                closed.add(c)
                frontier.append(c)
    return frozenset(closed)


def _subsystem_simples(rs: RootSystem, members: frozenset[int]) -> list[int]:
    """The two roots of a rank-2 positive system not sums of two members."""
    vecs = {i: rs.positive_roots[i] for i in members}
    sums = set()
    for i, j in combinations(members, 2):
        sums.add(vadd(vecs[i], vecs[j]))
    for i in members:
        sums.add(vadd(vecs[i], vecs[i]))
    simples = [i for i in members if vecs[i] not in sums]
    if len(simples) != 2:
        raise InvalidInput("not a rank-2 positive system")
    return simples


_SUBSYSTEM_TAGS = {2: "A1xA1", 3: "A2", 4: "C2", 6: "G2"}


def subsystem_ordering(rs: RootSystem, members: frozenset[int]) -> tuple[str, tuple[int, ...]]:
    """Type tag and reflection ordering of a rank-2 positive system.

    The ordering runs from one simple root of the subsystem to the other;
    the designated first root is the short simple root when lengths differ,
    otherwise the one with the smaller canonical index.
    """
    q = len(members)
    if q not in _SUBSYSTEM_TAGS:
        raise InvalidInput(f"{q} roots do not form a rank-2 positive system")
    s1, s2 = _subsystem_simples(rs, members)
    if rs.norms[s1] > rs.norms[s2] or (rs.norms[s1] == rs.norms[s2] and s1 > s2):
        s1, s2 = s2, s1
    va, vb = rs.positive_roots[s1], rs.positive_roots[s2]
    gaa, gab, gbb = rs.inner(va, va), rs.inner(va, vb), rs.inner(vb, vb)
    keyed = []
    for c in members:
        sol = solve_linear([[gaa, gab], [gab, gbb]],
                           [rs.inner(rs.positive_roots[c], va),
                            rs.inner(rs.positive_roots[c], vb)])
        x, y = sol
        if x < 0 or y < 0 or (x == 0 and y == 0):
            raise InvalidInput("not a positive system for its simple roots")
        keyed.append(((1, Q(0)) if x == 0 else (0, y / x), c))
    keyed.sort()
    ordering = tuple(c for _, c in keyed)
    if len(set(k for k, _ in keyed)) != q:
        raise TheoremViolation("reflection ordering has tied slopes")
    return _SUBSYSTEM_TAGS[q], ordering


def rank2_subsystem(rs: RootSystem, a: RootRef, b: RootRef) -> tuple[str, tuple[int, ...]]:
    """Smallest rank-2 subsystem containing two non-proportional roots.

    Closure is under mutual reflection, which matches the dihedral
    reflection subgroup generated by the two root reflections. (The naive
    integer-span closure disagrees inside a type-G2 plane and is not used.)
    """
    if a.index == b.index:
        raise InvalidInput("proportional roots do not span a rank-2 subsystem")
    members = reflection_closure(rs, {a.index, b.index})
    return subsystem_ordering(rs, members)


def subsystem_census(rs: RootSystem) -> dict[str, int]:
    """Counts of rank-2 reflection subsystems by type.

    A1xA1 subsystems are the orthogonal pairs of positive roots. The
    irreducible kinds are classified plane by plane: a plane meeting the
    root system in 3/4/6 positive roots carries one A2/C2/G2 subsystem,
    and a G2 plane additionally contains its long and short A2 subsystems.
    """
    counts = {"A1xA1": 0, "A2": 0, "C2": 0, "G2": 0}
    seen_planes: set[frozenset[int]] = set()
    for a, b in combinations(range(rs.num_positive), 2):
        if rs.inner(rs.positive_roots[a], rs.positive_roots[b]) == 0:
            counts["A1xA1"] += 1
        plane = frozenset(_span_membership(rs, a, b))
        if plane in seen_planes:
            continue
        seen_planes.add(plane)
        q = len(plane)
        if q == 2:
            pass
        elif q == 3:
            counts["A2"] += 1
        elif q == 4:
            counts["C2"] += 1
        elif q == 6:
            counts["G2"] += 1
            counts["A2"] += 2
        else:
            raise TheoremViolation(f"plane with {q} positive roots")
    return counts
