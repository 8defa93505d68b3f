"""Acceptance suite: one pass/fail line per criterion.

Each test records its verdict in ``RESULTS``; the conftest hook prints the
lines in the terminal summary.  Running this file directly prints them too.
"""

import functools
import itertools
import random
import sys
import time

import pytest

from webhol.generation import (
    ReductiveDecomposition,
    TupleSubset,
    decompose,
    g_v_set,
    gv_power_closure,
    ordered_product,
    predict_closure,
    q_recursion,
    splitting_subgroup,
)
from webhol.groups import alternating, commutator_length_group, cyclic, symmetric
from webhol.lattice import ReductiveProfile, codimension, mod_m_image, rank_r
from webhol.typevec import (
    TypeSet,
    TypeVector,
    is_rich,
    kappa,
    refines,
    restrict_set,
    richness_deficit,
    splitting_for,
)
from webhol.web import achievable_set, baez_sawin_web, predict_web_transport, suffix_truncation_check

BAEZ_SAWIN = TypeSet.from_text("1100\n0011\n1010\n0101")
SIX = TypeSet.from_text("1100\n0011\n1010\n0101\n1001\n0110")
RICH3 = TypeSet.from_text("110\n011\n101")
RESULTS: dict[int, list[tuple[bool, str]]] = {}


def record(k: int, ok: bool, detail: str, started: float) -> None:
    """Add one tier's verdict for criterion ``k`` and fail the test if it failed."""
    RESULTS.setdefault(k, []).append((ok, f"{detail} [{time.perf_counter() - started:.1f}s]"))
    assert ok, detail


def summary_lines() -> list[str]:
    lines = []
    for k in sorted(RESULTS):
        parts = RESULTS[k]
        verdict = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        lines.append(f"criterion {k}: {verdict}  " + "; ".join(d for _, d in parts))
    return lines


@functools.lru_cache(maxsize=None)
def a5():
    return alternating(5)


@functools.lru_cache(maxsize=None)
def closure(group_key: str, rows: str):
    G = {"A5": a5(), "Z2": cyclic(2), "Z3": cyclic(3)}[group_key]
    return gv_power_closure(G, TypeSet.from_text(rows))


@functools.lru_cache(maxsize=None)
def pairing_web():
    # 2 * q(4) * 4 repetitions of the two pairing blocks
    return baez_sawin_web(2 * q_recursion(4, 1) * 4)


# ------------------------------------------------------------------ 1


def test_criterion_1_z2_z3_separation():
    t0 = time.perf_counter()
    m2, m3 = mod_m_image(SIX, 2), mod_m_image(SIX, 3)
    c2 = closure("Z2", SIX.to_text()).closure.count
    c3 = closure("Z3", SIX.to_text()).closure.count
    ok = (m2.order, m2.index, m3.order, m3.index, c2, c3) == (8, 2, 81, 1, 8, 81)
    record(1, ok, f"mod2 order {m2.order} index {m2.index}; mod3 order {m3.order}; closures {c2}, {c3}", t0)


# ------------------------------------------------------------------ 2


def test_criterion_2_baez_sawin_rank():
    t0 = time.perf_counter()
    r = rank_r(BAEZ_SAWIN)
    c = codimension(BAEZ_SAWIN, ReductiveProfile(0, 1))
    record(2, (r, c) == (3, 1), f"rank_r {r}, codimension(0,1) {c}", t0)


# ------------------------------------------------------------------ 3 and 4


def test_criterion_3_rich_full_n3():
    t0 = time.perf_counter()
    res = closure("A5", RICH3.to_text())
    ok = res.closure.count == 60**3 and res.closure.is_subgroup()
    record(3, ok, f"n=3 count {res.closure.count}, subgroup {ok}", t0)


@pytest.mark.slow
def test_criterion_3_rich_full_n4():
    t0 = time.perf_counter()
    res = closure("A5", BAEZ_SAWIN.to_text())
    ok = res.closure.count == 60**4 and res.closure.is_subgroup()
    record(3, ok, f"n=4 count {res.closure.count}, subgroup {ok}", t0)


@pytest.mark.slow
def test_criterion_4_q_bound():
    t0 = time.perf_counter()
    cl = commutator_length_group(a5())
    q3 = closure("A5", RICH3.to_text()).q_min
    q4 = closure("A5", BAEZ_SAWIN.to_text()).q_min
    ok = cl == 1 and q3 <= q_recursion(3, cl) == 5 and q4 <= q_recursion(4, cl) == 25
    record(4, ok, f"cl(A5)={cl}; q_min n=3 {q3} <= 5, n=4 {q4} <= 25", t0)


# ------------------------------------------------------------------ 5


def test_criterion_5_decomposition():
    t0 = time.perf_counter()
    G = a5()
    rng = random.Random(5)
    bound = q_recursion(3, 1) * len(RICH3)
    good, longest = 0, 0
    for _ in range(1000):
        target = tuple(rng.randrange(60) for _ in range(3))
        word = decompose(G, RICH3, target)
        longest = max(longest, len(word))
        good += word.evaluate_n(G, 3) == target and len(word) <= bound
    record(5, good == 1000, f"{good}/1000 exact, longest word {longest} <= {bound}", t0)


# ------------------------------------------------------------------ 6


def test_criterion_6_deficit_structure():
    t0 = time.perf_counter()
    V = TypeSet.from_text("110\n001")
    S = closure("A5", V.to_text()).closure
    constant = all(t[0] == t[1] for t in S.tuples())
    ok = richness_deficit(V) == 1 and S.count == 60**2 and constant
    record(6, ok, f"deficit {richness_deficit(V)}, order {S.count}, constant on {{0,1}}: {constant}", t0)


# ------------------------------------------------------------------ 7


def test_criterion_7_z3_tier():
    t0 = time.perf_counter()
    w = pairing_web()
    pred = predict_web_transport(w, cyclic(3))
    trunc = suffix_truncation_check(w, cyclic(3), tau=7)
    ok = pred.achievable.count == 27 and pred.equal and trunc["status"] == "ok"
    record(7, ok, f"Z3 order {pred.achievable.count}, prediction equal {pred.equal}, suffix {trunc['status']}", t0)


@pytest.mark.slow
def test_criterion_7_a5_tier():
    t0 = time.perf_counter()
    w = pairing_web()
    full = achievable_set(w, a5()).is_full
    trunc = suffix_truncation_check(w, a5(), tau=7)
    z3 = achievable_set(w, cyclic(3)).count
    ok = full and trunc["status"] == "ok" and z3 == 27
    record(7, ok, f"T={w.T}, A5 full {full}, suffix tau=7 t'={trunc['t_prime']} {trunc['status']}", t0)


# ------------------------------------------------------------------ 8


def test_criterion_8_denseness_shadow():
    t0 = time.perf_counter()
    w = pairing_web()
    z3 = achievable_set(w, cyclic(3))
    predicted = predict_closure(ReductiveDecomposition(abelian=(3,)), BAEZ_SAWIN)
    index = 3**4 // z3.count
    expected_index = mod_m_image(BAEZ_SAWIN, 3).index
    perfect_full = achievable_set(w, a5()).is_full
    ok = perfect_full and z3.count == predicted.order and index == expected_index == 3
    record(8, ok, f"A5 full {perfect_full}; Z3 order {z3.count}, index {index} (predicted {expected_index})", t0)


# ------------------------------------------------------------------ 9

SMALL = [cyclic(2), cyclic(3), symmetric(3)]


def _group_for(rng, n):
    fits = [G for G in SMALL if G.order**n <= 10**5]
    return rng.choice(fits)


def _random_set(rng, n):
    rows = {tuple(rng.randint(0, 1) for _ in range(n)) for _ in range(rng.randint(1, 6))}
    return TypeSet.unique(rows, arity=n)


def _partitions(n):
    seen = set()
    for labels in itertools.product(range(n), repeat=n):
        m: dict[int, int] = {}
        seen.add(tuple(m.setdefault(x, len(m)) for x in labels))
    return sorted(seen)


def prop_richness_restriction(rng):
    n = rng.randint(2, 8)
    V = _random_set(rng, n)
    while not is_rich(V):
        V = TypeSet.unique(list(V) + [tuple(rng.randint(0, 1) for _ in range(n))], arity=n)
    K = rng.sample(range(n), rng.randint(1, n - 1))
    return is_rich(restrict_set(V, K))


def prop_refinement_monotone(rng):
    n = rng.randint(1, 8)
    G = _group_for(rng, n)
    coarse = [rng.randrange(n) for _ in range(n)]
    fine = [(c, rng.randrange(3)) for c in coarse]
    Vp, V = splitting_for(fine), splitting_for(coarse)
    return refines(Vp, V) and splitting_subgroup(G, V) <= splitting_subgroup(G, Vp)


def prop_restriction_lift(rng):
    n = rng.randint(2, 6)
    G = _group_for(rng, n)
    V = _random_set(rng, n)
    K = set(rng.sample(range(n), rng.randint(1, n - 1)))
    keep = [i for i in range(n) if i not in K]
    big = gv_power_closure(G, V).closure
    small = gv_power_closure(G, restrict_set(V, K)).closure
    return {tuple(t[i] for i in keep) for t in big.tuples()} == set(small.tuples())


def prop_kappa_dominance(rng):
    n = rng.randint(1, 8)
    coarse = [rng.randrange(n) for _ in range(n)]
    fine = [(c, rng.randrange(3)) for c in coarse]
    Vp, V = splitting_for(fine), splitting_for(coarse)
    return all(tuple(map(sum, zip(*kappa(v, Vp)))) == tuple(v) for v in V) and len(Vp) >= len(V)


def prop_disjoint_commute(rng):
    n = rng.randint(2, 8)
    G = _group_for(rng, n)
    support = [rng.randrange(3) for _ in range(n)]
    v = [int(s == 1) for s in support]
    w = [int(s == 2) for s in support]
    A, B = g_v_set(G, v), g_v_set(G, w)
    return A * B == B * A


def prop_order_independence(rng):
    n = rng.randint(1, 8)
    G = _group_for(rng, n)
    V = splitting_for([rng.randrange(n) for _ in range(n)])
    members = list(V)
    rng.shuffle(members)
    one = TupleSubset.identity(G, n)
    return ordered_product(one, members) == ordered_product(one, V)


def exhaustive_checks():
    """Every partition pair and pattern pair for |G|^n <= 10^5, n <= 4."""
    failures = 0
    for n in range(1, 5):
        parts = [splitting_for(p) for p in _partitions(n)]
        for G in SMALL:
            if G.order**n > 10**5:
                continue
            subgroups = {V: splitting_subgroup(G, V) for V in parts}
            for V, Vp in itertools.product(parts, repeat=2):
                if refines(Vp, V) and not subgroups[V] <= subgroups[Vp]:
                    failures += 1
            vectors = [TypeVector(b) for b in itertools.product((0, 1), repeat=n)]
            for v, w in itertools.combinations(vectors, 2):
                if not any(a and b for a, b in zip(v, w)):
                    A, B = g_v_set(G, v), g_v_set(G, w)
                    failures += A * B != B * A
    return failures


PROPERTIES = [
    prop_richness_restriction,
    prop_refinement_monotone,
    prop_restriction_lift,
    prop_kappa_dominance,
    prop_disjoint_commute,
    prop_order_independence,
]


def test_criterion_9_property_suites():
    t0 = time.perf_counter()
    rng = random.Random(9)
    failures = {}
    for prop in PROPERTIES:
        failures[prop.__name__] = sum(not prop(rng) for _ in range(1000))
    exhaustive = exhaustive_checks()
    total = sum(failures.values()) + exhaustive
    record(9, total == 0, f"6 properties x 1000 instances, {total} failures (exhaustive: {exhaustive})", t0)


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:terminal"])
    print("\n".join(summary_lines()))
    sys.exit(code)
