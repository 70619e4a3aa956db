"""Type A column tableaux: tensor crystal, filling map, charge, jeu de taquin."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from math import comb

from .chains import LambdaChain
from .errors import InvalidInput, ResourceLimit, TheoremViolation
from .model import CrystalGraph
from .weyl import identity_element, one_line, root_reflection

RAISE_LIMIT = 10**6
CRYSTAL_LIMIT = 10**6


def _check_column(col, n: int) -> tuple[int, ...]:
    out = tuple(col)
    if not out:
        raise InvalidInput("columns must be nonempty")
    for x in out:
        if not isinstance(x, int) or isinstance(x, bool) or not 1 <= x <= n:
            raise InvalidInput(f"entry {x!r} outside 1..{n}")
    if any(a >= b for a, b in zip(out, out[1:])):
        raise InvalidInput("column entries must increase strictly")
    return out


@dataclass(frozen=True)
class TensorElement:
    """Tensor of strictly increasing columns over the alphabet 1..n."""

    n: int
    columns: tuple[tuple[int, ...], ...]


def tensor_element(n: int, columns) -> TensorElement:
    """Validated tensor of columns, leftmost factor first."""
    if n < 2:
        raise InvalidInput("alphabet needs n >= 2")
    cols = tuple(_check_column(c, n) for c in columns)
    if not cols:
        raise InvalidInput("need at least one factor")
    return TensorElement(n, cols)


def content(b: TensorElement) -> tuple[int, ...]:
    """Letter multiplicities of the tensor."""
    m = [0] * b.n
    for col in b.columns:
        for x in col:
            m[x - 1] += 1
    return tuple(m)


def _col_phi(col: tuple[int, ...], i: int) -> int:
    return int(i in col and i + 1 not in col)


def _col_eps(col: tuple[int, ...], i: int) -> int:
    return int(i + 1 in col and i not in col)


def _col_step(col: tuple[int, ...], i: int, direction: str):
    if direction == "f":
        if not _col_phi(col, i):
            return None
        return tuple(sorted(i + 1 if x == i else x for x in col))
    if not _col_eps(col, i):
        return None
    return tuple(sorted(i if x == i + 1 else x for x in col))


def _string_data(cols, i: int) -> tuple[int, int]:
    """(phi, eps) of a tensor of columns in the classical direction i."""
    phi, eps = _col_phi(cols[0], i), _col_eps(cols[0], i)
    for col in cols[1:]:
        p2, e2 = _col_phi(col, i), _col_eps(col, i)
        phi, eps = phi + max(0, p2 - eps), e2 + max(0, eps - p2)
    return phi, eps


def _step_cols(cols, i: int, direction: str):
    if len(cols) == 1:
        nc = _col_step(cols[0], i, direction)
        return None if nc is None else (nc,)
    head, rest = cols[0], cols[1:]
    ea = _col_eps(head, i)
    pr = _string_data(rest, i)[0]
    # the operator lands on the left factor when its eps wins the tie
    on_left = ea >= pr if direction == "f" else ea > pr
    if on_left:
        nc = _col_step(head, i, direction)
        return None if nc is None else (nc,) + rest
    out = _step_cols(rest, i, direction)
    return None if out is None else (head,) + out


def _promote_col(col, n: int) -> tuple[int, ...]:
    return tuple(sorted(x + 1 if x < n else 1 for x in col))


def _demote_col(col, n: int) -> tuple[int, ...]:
    return tuple(sorted(x - 1 if x > 1 else n for x in col))


def _check_color(b: TensorElement, i: int) -> None:
    if not isinstance(i, int) or not 0 <= i <= b.n - 1:
        raise InvalidInput(f"color {i!r} outside 0..{b.n - 1}")


def tableau_phi(b: TensorElement, i: int) -> int:
    """Number of times f_i applies; color 0 goes through promotion."""
    _check_color(b, i)
    if i == 0:
        return _string_data([_promote_col(c, b.n) for c in b.columns], 1)[0]
    return _string_data(b.columns, i)[0]


def tableau_eps(b: TensorElement, i: int) -> int:
    """Number of times e_i applies."""
    _check_color(b, i)
    if i == 0:
        return _string_data([_promote_col(c, b.n) for c in b.columns], 1)[1]
    return _string_data(b.columns, i)[1]


def tableau_crystal_step(b: TensorElement, i: int,
                         direction: str = "f") -> TensorElement | None:
    """Apply f_i or e_i to a tensor of columns; None when undefined."""
    _check_color(b, i)
    if direction not in ("f", "e"):
        raise InvalidInput(f"unknown direction {direction!r}")
    if i == 0:
        pr = tuple(_promote_col(c, b.n) for c in b.columns)
        out = _step_cols(pr, 1, direction)
        if out is None:
            return None
        return TensorElement(b.n, tuple(_demote_col(c, b.n) for c in out))
    out = _step_cols(b.columns, i, direction)
    return None if out is None else TensorElement(b.n, out)


def is_dual_demazure(b: TensorElement, i: int) -> bool:
    """Whether the arrow b -> f_i(b) survives the zero-arrow filter."""
    if tableau_crystal_step(b, i) is None:
        return False
    return i != 0 or tableau_phi(b, 0) >= 2


@dataclass
class TableauCrystal:
    """Affine tensor crystal on column tableaux."""

    n: int
    heights: tuple[int, ...]
    vertices: list[TensorElement]
    index: dict[TensorElement, int]
    edges: list[tuple[int, int, int]]  # (src, dst, color)


def build_tensor_crystal(n: int, heights) -> TableauCrystal:
    """All tensors of the given column heights with every affine arrow."""
    hs = tuple(heights)
    if not hs or any(not isinstance(k, int) or not 1 <= k <= n - 1 for k in hs):
        raise InvalidInput("column heights must lie in 1..n-1")
    total = 1
    for k in hs:
        total *= comb(n, k)
        if total > CRYSTAL_LIMIT:
            raise ResourceLimit("tensor crystal too large to enumerate")
    factors = [list(combinations(range(1, n + 1), k)) for k in hs]
    vertices = [TensorElement(n, cols) for cols in product(*factors)]
    index = {b: i for i, b in enumerate(vertices)}
    edges = []
    for src, b in enumerate(vertices):
        for i in range(n):
            out = tableau_crystal_step(b, i)
            if out is not None:
                edges.append((src, index[out], i))
    return TableauCrystal(n, hs, vertices, index, edges)


def dual_demazure_filter(crystal: TableauCrystal) -> TableauCrystal:
    """Drop the zero arrows that do not repeat; keep the vertex set."""
    kept = [(s, d, c) for s, d, c in crystal.edges
            if c != 0 or tableau_phi(crystal.vertices[s], 0) >= 2]
    return TableauCrystal(crystal.n, crystal.heights, crystal.vertices,
                          crystal.index, kept)


def _fold_positions(chain: LambdaChain, subset) -> list[int]:
    m = len(chain.roots)
    js = []
    for j in subset:
        if not isinstance(j, int) or isinstance(j, bool) or not 1 <= j <= m:
            raise InvalidInput(f"position {j!r} outside 1..{m}")
        js.append(j)
    if len(set(js)) != len(js):
        raise InvalidInput("subset repeats a position")
    return sorted(js)


def fill(chain: LambdaChain, subset) -> tuple[tuple[int, ...], ...]:
    """Raw filling of the column shape: one unsorted column per block."""
    rs = chain.rs
    if rs.series != "A":
        raise InvalidInput("the filling map needs a type A chain")
    if not chain.blocks:
        raise InvalidInput("chain carries no column blocks")
    js = _fold_positions(chain, subset)
    pi = identity_element(rs)
    cols = []
    for k, start, length in chain.blocks:
        for j in js:
            if start < j <= start + length:
                pi = pi * root_reflection(rs, chain.roots[j - 1])
        cols.append(tuple(one_line(pi)[:k]))
    return tuple(cols)


def sfill(chain: LambdaChain, subset) -> TensorElement:
    """Sorted filling: the tensor of ascending columns."""
    cols = tuple(tuple(sorted(c)) for c in fill(chain, subset))
    return tensor_element(chain.rs.rank + 1, cols)


def reading_word(b: TensorElement) -> tuple[int, ...]:
    """Rightmost factor first, each column bottom to top."""
    out = []
    for col in reversed(b.columns):
        out.extend(reversed(col))
    return tuple(out)


def raise_to_highest(b: TensorElement) -> TensorElement:
    """Apply classical raising operators until none applies."""
    cur, steps = b, 0
    while True:
        for i in range(1, cur.n):
            nxt = tableau_crystal_step(cur, i, "e")
            if nxt is not None:
                cur = nxt
                steps += 1
                if steps > RAISE_LIMIT:
                    raise ResourceLimit("raising run exceeded its budget")
                break
        else:
            return cur


def word_charge(word) -> int:
    """Charge of a word whose content is a partition."""
    letters = list(word)
    counts: dict[int, int] = {}
    for x in letters:
        if not isinstance(x, int) or x < 1:
            raise InvalidInput(f"letter {x!r} is not a positive integer")
        counts[x] = counts.get(x, 0) + 1
    if counts:
        top = max(counts)
        mults = [counts.get(v, 0) for v in range(1, top + 1)]
        if any(a < b for a, b in zip(mults, mults[1:])) or 0 in mults:
            raise InvalidInput("word content is not a partition")
    taken = [False] * len(letters)
    remaining = len(letters)
    total = 0
    while remaining:
        top = max(x for x, t in zip(letters, taken) if not t)
        cur = max(p for p, x in enumerate(letters) if x == 1 and not taken[p])
        taken[cur] = True
        idx = 0
        for v in range(2, top + 1):
            scan = [*range(cur - 1, -1, -1), *range(len(letters) - 1, cur, -1)]
            pos = next(p for p in scan if letters[p] == v and not taken[p])
            if pos > cur:
                idx += 1
            total += idx
            taken[pos] = True
            cur = pos
        remaining -= top
    return total


@lru_cache(maxsize=None)
def _rectified_pair(c1: tuple[int, ...], c2: tuple[int, ...]):
    """Rectify the skew pair with c2 on top right, c1 below left."""
    cells: dict[tuple[int, int], int] = {}
    for r, x in enumerate(c2, start=1):
        cells[(r, 2)] = x
    for r, x in enumerate(c1, start=len(c2) + 1):
        cells[(r, 1)] = x
    mu = {(r, 1) for r in range(1, len(c2) + 1)}
    while mu:
        corners = [p for p in mu
                   if (p[0] + 1, p[1]) not in mu and (p[0], p[1] + 1) not in mu]
        i, j = max(corners)
        mu.remove((i, j))
        while True:
            below, right = cells.get((i + 1, j)), cells.get((i, j + 1))
            if below is None and right is None:
                break
            if right is None or (below is not None and below <= right):
                cells[(i, j)] = below
                del cells[(i + 1, j)]
                i += 1
            else:
                cells[(i, j)] = right
                del cells[(i, j + 1)]
                j += 1
    out = []
    for c in (1, 2):
        rows = sorted(r for r, cc in cells if cc == c)
        out.append(tuple(cells[(r, c)] for r in rows))
    return tuple(out)


def jdt_two_columns(left, right) -> tuple[tuple[int, ...], ...]:
    """Exchange the heights of two adjacent columns by sliding."""
    return _exchange_columns(tuple(left), tuple(right))


@lru_cache(maxsize=None)
def _exchange_columns(c1: tuple[int, ...], c2: tuple[int, ...]):
    if len(c1) == len(c2):
        return c1, c2
    target = _rectified_pair(c1, c2)
    values = sorted(c1 + c2)
    seen = set()
    matches = []
    for picks in combinations(range(len(values)), len(c2)):
        chosen = set(picks)
        a = tuple(values[k] for k in picks)
        b = tuple(values[k] for k in range(len(values)) if k not in chosen)
        if (a, b) in seen:
            continue
        seen.add((a, b))
        if any(x >= y for x, y in zip(a, a[1:])):
            continue
        if any(x >= y for x, y in zip(b, b[1:])):
            continue
        if _rectified_pair(a, b) == target:
            matches.append((a, b))
    if len(matches) != 1:
        raise TheoremViolation("column exchange is not unique")
    return matches[0]


def jdt_swap(b: TensorElement, pos: int) -> TensorElement:
    """Exchange tensor factors pos and pos+1 (1-based) by jeu de taquin."""
    if not 1 <= pos < len(b.columns):
        raise InvalidInput(f"factor position {pos} out of range")
    a, c = jdt_two_columns(b.columns[pos - 1], b.columns[pos])
    cols = b.columns[:pos - 1] + (a, c) + b.columns[pos + 1:]
    return TensorElement(b.n, cols)


def _local_energy(c1: tuple[int, ...], c2: tuple[int, ...]) -> int:
    """Sliding defect of an adjacent pair: extra height gained on rectifying."""
    rect = _rectified_pair(c1, c2)
    h = len(rect[0]) - max(len(c1), len(c2))
    if h < 0:
        raise TheoremViolation("rectified pair lost column height")
    return h


def charge(b: TensorElement) -> int:
    """Total energy: pairwise sliding defects after moving factors adjacent."""
    cols = b.columns
    total = 0
    for i in range(len(cols)):
        for j in range(i + 1, len(cols)):
            t = list(cols)
            for k in range(j - 1, i, -1):
                t[k], t[k + 1] = jdt_two_columns(t[k], t[k + 1])
            total += _local_energy(t[i], t[i + 1])
    return total


def verify_isomorphism(chain: LambdaChain, graph: CrystalGraph) -> dict:
    """Compare the alcove crystal with the tableau crystal through sfill."""
    rs = chain.rs
    if rs.series != "A":
        raise InvalidInput("the oracle compares type A crystals only")
    n = rs.rank + 1
    heights = tuple(k for k, _, _ in chain.blocks)
    bad: list[str] = []
    images = [sfill(chain, J) for J in graph.vertices]
    if len(set(images)) != len(images):
        bad.append("sfill repeats a tableau")
    expected = 1
    for k in heights:
        expected *= comb(n, k)
    if len(images) != expected:
        bad.append(f"vertex count {len(images)} differs from {expected}")
    outgoing = {(s, c) for s, _, c in graph.edges}
    edge_map = {(s, c): d for s, d, c in graph.edges}
    for v, (J, b) in enumerate(zip(graph.vertices, images)):
        wt = rs.omega_coords(graph.weights[v])
        m = content(b)
        if tuple(wt) != tuple(m[i] - m[i + 1] for i in range(n - 1)):
            bad.append(f"weight mismatch at vertex {v}")
        if charge(b) != graph.heights[v]:
            bad.append(f"charge differs from height at vertex {v}")
        for p in range(n):
            fb = tableau_crystal_step(b, p)
            dual = fb is not None and (p != 0 or tableau_phi(b, 0) >= 2)
            has = (v, p) in outgoing
            if has != dual:
                bad.append(f"arrow {p} mismatch at vertex {v}")
                continue
            if has and images[edge_map[(v, p)]] != fb:
                bad.append(f"arrow {p} lands wrong at vertex {v}")
    return {"vertices": len(graph.vertices), "edges": len(graph.edges),
            "violations": bad}
