"""Acceptance suite: one pass or fail line per numbered criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the criterion lines.
Every comparison is exact; the runtime budgets are asserted where stated.
"""

from __future__ import annotations

import time
from itertools import product as cartesian

from qalcove.chains import concat_chains, omega_chain, valid_moves
from qalcove.cli import RunConfig, _SUITE_BUILDERS
from qalcove.model import (
    _alpha_ref,
    build_crystal,
    crystal_step,
    enumerate_admissible,
    fold_data,
    sign_word,
)
from qalcove.roots import (
    RootRef,
    build_root_system,
    is_quantum_root,
    solve_linear,
    subsystem_census,
)
from qalcove.typea import charge, jdt_swap, sfill, verify_isomorphism
from qalcove.weyl import identity_element, one_line, root_reflection
from qalcove.ybmoves import (
    apply_moves,
    connect_moves,
    probe_connection_conjecture,
    r_matrix,
    rank2_table_lookup,
    verify_tables,
    yb_context,
    yb_move,
)


def report(num: int, detail: str, started: float, budget: float | None = None):
    elapsed = time.monotonic() - started
    if budget is not None:
        assert elapsed < budget, f"criterion {num} took {elapsed:.1f}s, budget {budget}s"
    print(f"PASS criterion {num}: {detail} [{elapsed:.1f}s]")


def chain_for(tag: str, comp):
    rs = build_root_system(tag)
    return concat_chains([omega_chain(rs, k) for k in comp])


def compositions(rank: int, max_cols: int):
    out = []
    for length in range(1, max_cols + 1):
        out.extend(cartesian(range(1, rank + 1), repeat=length))
    return out


def move_family():
    """The chains of the exhaustive move suite: one list entry per case."""
    cases = [("A2", [(1, 2, 2, 1)]),
             ("C2", compositions(2, 3)),
             ("G2", compositions(2, 2)),
             ("A3", compositions(3, 3))]
    for tag, comps in cases:
        for comp in comps:
            yield tag, comp, chain_for(tag, comp)


def walk_elements(chain, js):
    """Partial products of the reflections at the listed positions."""
    w = identity_element(chain.rs)
    out = [w]
    for j in js:
        w = w * root_reflection(chain.rs, chain.roots[j - 1])
        out.append(w)
    return out


def fold_height(chain, fd):
    return sum(chain.colevel(j) for j in fd.positions if fd.gammas[j - 1].sign < 0)


def test_criterion_1_golden_example():
    t0 = time.monotonic()
    gam = chain_for("A2", (1, 2, 2, 1))
    gam_p = chain_for("A2", (1, 2, 1, 2))
    assert r_matrix(gam_p, gam, {1, 2, 3, 5, 7, 8}) == frozenset({1, 2, 3, 6, 7, 8})
    assert r_matrix(gam, gam_p, {1, 2, 3, 6, 7, 8}) == frozenset({1, 2, 3, 5, 7, 8})
    # the reversal window: end elements and the relabeled window subsets
    u = walk_elements(gam_p, (1, 2, 3))[-1]
    w = walk_elements(gam_p, (1, 2, 3, 5, 7))[-1]
    assert one_line(u) == (3, 2, 1)
    assert one_line(w) == (2, 1, 3)
    assert walk_elements(gam, (1, 2, 3, 6, 7))[-1] == w
    moved = rank2_table_lookup("A2", u, {(1, True), (3, True)})
    assert {pos for pos, _ in moved} == {2, 3}
    # fillings of the matched subsets
    assert sfill(gam, {1, 2, 3, 6, 7, 8}).columns == ((3,), (2, 3), (1, 2), (3,))
    assert sfill(gam_p, {1, 2, 3, 5, 7, 8}).columns == ((3,), (2, 3), (2,), (1, 3))
    report(1, "R-matrix golden pair; window move 321 to 213 sends {1,3} to {2,3}",
           t0, budget=1.0)


def test_criterion_2_move_tables():
    t0 = time.monotonic()
    assert verify_tables("A2") == (17, 19)
    assert verify_tables("C2") == (31, 33)
    assert verify_tables("G2") == (71, 73)
    report(2, "119 stored rows and 125 closed-form cases replayed", t0, budget=10.0)


def test_criterion_3_shellability():
    t0 = time.monotonic()
    ran = 0
    for tag in ("A2", "C2", "G2", "A3", "B3"):
        cfg = RunConfig(command="verify", type_tag=tag)
        for statement, run in _SUITE_BUILDERS["shell"](cfg):
            run()
            ran += 1
    report(3, f"{ran} shellability statements verified on A2 C2 G2 A3 B3",
           t0, budget=120.0)


def test_criterion_4_move_commutation():
    t0 = time.monotonic()
    transported = commuted = 0
    for tag, comp, chain in move_family():
        rank = chain.rs.rank
        subsets = enumerate_admissible(chain)
        stats = {}
        steps = {}
        for J in subsets:
            fd = fold_data(chain, J)
            stats[J] = (fd.mu, fold_height(chain, fd))
            for p in range(rank + 1):
                for op in ("f", "e"):
                    steps[J, p, op] = crystal_step(chain, J, p, op)
        for mv in valid_moves(chain):
            ctx = yb_context(chain, mv)
            target = ctx.target
            for J in subsets:
                img = yb_move(ctx, J)
                fd = fold_data(target, img)
                assert stats[J] == (fd.mu, fold_height(target, fd)), \
                    f"{tag} {comp} {mv}: weight or height changed"
                transported += 1
                for p in range(rank + 1):
                    for op in ("f", "e"):
                        a = steps[J, p, op]
                        b = crystal_step(target, img, p, op)
                        assert (a is None) == (b is None), \
                            f"{tag} {comp} {mv} p={p} {op}: definedness differs"
                        if a is not None:
                            assert yb_move(ctx, a) == b, \
                                f"{tag} {comp} {mv} p={p} {op}: operators do not commute"
                        commuted += 1
    report(4, f"{transported} transports preserve weight and height; "
              f"{commuted} operator commutations", t0, budget=600.0)


def test_criterion_5_type_a_oracle():
    t0 = time.monotonic()
    shapes = swaps = 0
    for n in (3, 4):
        for comp in compositions(n - 1, 4):
            chain = chain_for(f"A{n - 1}", comp)
            graph = build_crystal(chain)
            res = verify_isomorphism(chain, graph)
            assert res["violations"] == [], f"A{n - 1} {comp}: {res['violations'][:3]}"
            shapes += 1
            for pos in range(1, len(comp)):
                if comp[pos - 1] == comp[pos]:
                    continue
                swapped = comp[:pos - 1] + (comp[pos], comp[pos - 1]) + comp[pos + 1:]
                target = chain_for(f"A{n - 1}", swapped)
                moves = connect_moves(chain, target)
                for J in graph.vertices:
                    img = apply_moves(chain, moves, J)
                    assert sfill(target, img) == jdt_swap(sfill(chain, J), pos), \
                        f"A{n - 1} {comp} swap {pos}: transport differs from sliding"
                    swaps += 1
    report(5, f"{shapes} shapes isomorphic to the tableau crystal; "
              f"{swaps} transported vertices match column sliding", t0, budget=600.0)


def test_criterion_6_subsystem_counts():
    t0 = time.monotonic()
    f4 = subsystem_census(build_root_system("F4"))
    e6 = subsystem_census(build_root_system("E6"))
    assert (f4["A2"], f4["C2"]) == (32, 18)
    assert e6["A2"] == 120
    report(6, "F4 census gives A2=32 C2=18; E6 census gives A2=120", t0, budget=60.0)


def test_criterion_7_energy_grading():
    t0 = time.monotonic()
    zero = classical = 0
    shapes = ([(3, c) for c in compositions(2, 3)]
              + [(4, c) for c in compositions(3, 3)]
              + [(3, (1, 2, 2, 1))])
    for n, comp in shapes:
        chain = chain_for(f"A{n - 1}", comp)
        graph = build_crystal(chain)
        charges = [charge(sfill(chain, J)) for J in graph.vertices]
        for s, d, c in graph.edges:
            if c == 0:
                # energy drops by exactly 1 along a surviving 0-arrow
                assert charges[d] == charges[s] + 1, f"A{n - 1} {comp} edge {s}->{d}"
                zero += 1
            else:
                assert charges[d] == charges[s], f"A{n - 1} {comp} edge {s}->{d}"
                classical += 1
    report(7, f"charge constant on {classical} classical arrows and "
              f"graded on {zero} zero arrows", t0, budget=120.0)


def coroot_pair_coords(rs, member, first, last):
    """Coefficients of a window coroot over the end coroots."""
    cf, cl, cm = (rs.coroot_coords[a] for a in (member, first, last))
    cols = [i for i in range(len(cf)) if cl[i] or cm[i]]
    for i, j in cartesian(cols, cols):
        sol = solve_linear([[cl[i], cm[i]], [cl[j], cm[j]]], [cf[i], cf[j]])
        if sol is None:
            continue
        x, y = sol
        if all(cf[k] == x * cl[k] + y * cm[k] for k in range(len(cf))):
            return x, y
    raise AssertionError("window ends do not span the member coroot")


def fold_between_sign_changes(chain, js, fd, walk):
    """Sign changes of a simple direction force a fold at that root.

    The statement is specific to the simple roots: the affine direction
    works through doubled levels instead, and its raw sign version fails
    already on the smallest chains.
    """
    rs = chain.rs
    checked = 0
    for i in range(rs.rank):
        ref = RootRef(rs.simple_index[i], 1)
        marks = [i + 1 for i, j in enumerate(js) if fd.gammas[j - 1] == ref]
        signs = [w.inverse().apply_ref(ref).sign for w in walk]
        for b in range(1, len(signs)):
            if signs[b] > 0:
                continue
            a = max((i for i in range(1, b) if signs[i] > 0), default=0)
            assert any(a < m <= b for m in marks), \
                "no fold at the root between a sign change"
            checked += 1
    return checked


def letter_succession(chain, J, fd, p):
    """A non-terminal letter in {+, mp} must precede one in {+, pm}."""
    word = sign_word(chain, J, p, fd).word()
    for cur, nxt in zip(word, word[1:]):
        if cur in "+∓":
            assert nxt in "+±", f"letter {cur!r} followed by {nxt!r}"
    return max(0, len(word) - 1)


def stretch_match(walk, walk2, sp):
    """Whether walk2 is walk with one stretch multiplied by a reflection."""
    n1, n2 = len(walk), len(walk2)
    if n2 == n1:
        pairs = [(a, b) for a in range(n1) for b in range(a + 1, n1)]
    elif n2 == n1 + 1:
        pairs = [(a, n1) for a in range(n1)]
    else:
        return False
    for a, b in pairs:
        if walk2[:a + 1] != walk[:a + 1]:
            continue
        if any(walk2[i] != sp * walk[i - 1] for i in range(a + 1, b + 1)):
            continue
        if n2 == n1 + 1 or walk2[b:] == walk[b:]:
            return True
    return False


def test_criterion_8_structural_properties():
    t0 = time.monotonic()
    windows = folds = letters = paths = reduced = quantum = 0
    for tag, comp, chain in move_family():
        rs = chain.rs
        crossings = sum(rs.pairing(chain.lam, RootRef(i, 1))
                        for i in range(rs.num_positive))
        assert len(chain.roots) == crossings, f"{tag} {comp}: chain is not reduced"
        reduced += 1
        for mv in valid_moves(chain):
            lo, q = mv.start, mv.q
            first, last = chain.roots[lo - 1], chain.roots[lo + q - 2]
            for i in range(lo, lo + q):
                x, y = coroot_pair_coords(rs, chain.roots[i - 1], first, last)
                assert chain.levels[i - 1] == (x * chain.levels[lo - 1]
                                               + y * chain.levels[lo + q - 2]), \
                    f"{tag} {comp} {mv}: window levels are not collinear"
                windows += 1
        for J in enumerate_admissible(chain):
            js = sorted(J)
            fd = fold_data(chain, J)
            walk = walk_elements(chain, js)
            folds += fold_between_sign_changes(chain, js, fd, walk)
            for p in range(rs.rank + 1):
                letters += letter_succession(chain, J, fd, p)
                nxt = crystal_step(chain, J, p, "f")
                if nxt is None:
                    continue
                sp = root_reflection(rs, _alpha_ref(rs, p).index)
                walk2 = walk_elements(chain, sorted(nxt))
                assert stretch_match(walk, walk2, sp), \
                    f"{tag} {comp} p={p}: operator is not a reflected stretch"
                paths += 1
    for tag in ("A2", "C2", "G2", "A3", "B3", "F4", "E6"):
        rs = build_root_system(tag)
        for a in range(rs.num_positive):
            metric = root_reflection(rs, a).length == 2 * rs.coroot_height[a] - 1
            assert metric == is_quantum_root(rs, RootRef(a)), \
                f"{tag} root {a}: structural and metric quantum tests differ"
            quantum += 1
    report(8, f"{reduced} chains reduced; {windows} window levels collinear; "
              f"{folds} sign changes folded; {letters} letter successions; "
              f"{paths} operator path changes; {quantum} quantum-root checks", t0)


def test_criterion_9_connection_probe():
    t0 = time.monotonic()
    cases = [("A2", (1, 2, 2, 1)), ("C2", (1, 2)), ("C2", (2, 2, 1)),
             ("G2", (1, 1)), ("A3", (1, 2, 3))]
    disagreements = []
    pairs = 0
    for tag, comp in cases:
        done, reports = probe_connection_conjecture(chain_for(tag, comp),
                                                    trials=100, seed=7)
        assert done >= 100, f"{tag} {comp}: only {done} distinct sequence pairs"
        pairs += done
        disagreements.extend(f"{tag} {comp}: {line}" for line in reports)
    for line in disagreements:
        print(line)
    verdict = ("all composed isomorphisms agree vertex-wise" if not disagreements
               else f"{len(disagreements)} disagreements reported verbatim above")
    report(9, f"{pairs} move-sequence pairs compared; {verdict}", t0)
