"""Subgroups of G^n generated by diagonal-pattern subgroups.

A tuple ``(g_0, ..., g_{n-1})`` in ``G^n`` is stored as the integer
``sum(g_i * |G|**i)`` (little-endian mixed radix) and a subset of ``G^n``
as a boolean mask over all ``|G|**n`` such integers.

Products ``S * H`` with ``H`` a subgroup are computed as the closure of
``S`` under right multiplication by generators of ``H``; every multiplication
routine works on index arrays in chunks so that memory stays proportional
to the chunk, not to the frontier.
"""

from __future__ import annotations

import functools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import config
from .errors import ArityError, CapExceeded, NotPerfect, NotRich
from .groups import (
    FiniteGroup,
    commutator_decompose,
    commutator_length_group,
    cyclic,
    direct_product,
    central_quotient,
    is_perfect,
)
from .lattice import contains_mod, mod_m_image, span_z
from .typevec import (
    Splitting,
    TypeSet,
    TypeVector,
    deficit_witness,
    is_rich,
    restrict,
    restrict_set,
    richness_deficit,
)

CHUNK = 1 << 19


class TupleSpace:
    """Index arithmetic for ``G^n``."""

    def __init__(self, group: FiniteGroup, n: int, cap: int | None = None):
        if n < 1:
            raise ArityError("tuple arity must be positive")
        cap = config.cap_states() if cap is None else cap
        size = group.order**n
        if size > cap:
            raise CapExceeded(f"|{group.label}|^{n} = {size} states exceeds cap {cap}")
        self.group = group
        self.n = n
        self.size = size
        self.weights = group.order ** np.arange(n, dtype=np.int64)

    def encode(self, tuples) -> np.ndarray:
        arr = np.asarray(tuples, dtype=np.int64).reshape(-1, self.n)
        return arr @ self.weights

    def decode(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        return (idx[..., None] // self.weights) % self.group.order

    def right_mul(self, idx: np.ndarray, b: Sequence[int]) -> np.ndarray:
        """Indices of ``a * b`` for every index ``a`` in ``idx``."""
        G = self.group
        out = idx.copy()
        for i, bi in enumerate(b):
            if bi == 0:
                continue
            w = self.weights[i]
            c = (idx // w) % G.order
            out += (G.mul(c, int(bi)) - c) * w
        return out

    def left_mul(self, a: Sequence[int], idx: np.ndarray) -> np.ndarray:
        G = self.group
        out = idx.copy()
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            w = self.weights[i]
            c = (idx // w) % G.order
            out += (G.mul(int(ai), c) - c) * w
        return out

    def inverse(self, idx: np.ndarray) -> np.ndarray:
        return self.group.inv(self.decode(idx)) @ self.weights


def pattern_tuple(v: Sequence[int], g: int) -> tuple[int, ...]:
    """``(g^{v_0}, ..., g^{v_{n-1}})``."""
    return tuple(int(g) if b else 0 for b in v)


def _chunks(arr: np.ndarray):
    for start in range(0, arr.size, CHUNK):
        yield arr[start : start + CHUNK]


def _close(
    space: TupleSpace,
    mask: np.ndarray,
    frontier: np.ndarray,
    gens: Sequence[Sequence[int]],
    threads: int = 1,
) -> np.ndarray:
    """Extend ``mask`` in place to its closure under right multiplication by ``gens``.

    Each level reads ``mask`` only; new states are merged after the level,
    so the result does not depend on ``threads``.
    """
    gens = [tuple(g) for g in gens if any(g)]
    if not gens:
        return mask

    def expand(chunk: np.ndarray) -> np.ndarray:
        found = [nxt[~mask[nxt]] for nxt in (space.right_mul(chunk, g) for g in gens)]
        return np.concatenate(found)

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while frontier.size:
            parts = pool.map(expand, _chunks(frontier)) if pool else map(expand, _chunks(frontier))
            fresh = np.zeros(space.size, dtype=bool)
            for part in parts:
                fresh[part] = True
            frontier = np.flatnonzero(fresh)
            mask |= fresh
    finally:
        if pool:
            pool.shutdown()
    return mask


class TupleSubset:
    """An explicit subset of ``G^n``."""

    def __init__(self, space: TupleSpace, mask: np.ndarray):
        if mask.shape != (space.size,) or mask.dtype != bool:
            raise ValueError("mask must be a boolean vector over G^n")
        self.space = space
        self.mask = mask
        self.mask.setflags(write=False)
        self.count = int(mask.sum())

    @property
    def group(self) -> FiniteGroup:
        return self.space.group

    @property
    def arity(self) -> int:
        return self.space.n

    @classmethod
    def from_tuples(cls, group: FiniteGroup, n: int, tuples: Iterable[Sequence[int]], cap: int | None = None):
        space = TupleSpace(group, n, cap)
        mask = np.zeros(space.size, dtype=bool)
        tuples = list(tuples)
        if tuples:
            mask[space.encode(tuples)] = True
        return cls(space, mask)

    @classmethod
    def identity(cls, group: FiniteGroup, n: int, cap: int | None = None):
        return cls.from_tuples(group, n, [(0,) * n], cap)

    @classmethod
    def full(cls, group: FiniteGroup, n: int, cap: int | None = None):
        space = TupleSpace(group, n, cap)
        return cls(space, np.ones(space.size, dtype=bool))

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def tuples(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in row) for row in self.space.decode(self.indices())]

    def __contains__(self, t) -> bool:
        if len(t) != self.arity:
            return False
        return bool(self.mask[int(self.space.encode([t])[0])])

    def __len__(self) -> int:
        return self.count

    def _compatible(self, other: "TupleSubset") -> None:
        if other.group is not self.group or other.arity != self.arity:
            raise ArityError("tuple subsets over different groups or arities")

    def __eq__(self, other) -> bool:
        if not isinstance(other, TupleSubset):
            return NotImplemented
        self._compatible(other)
        return self.count == other.count and bool(np.array_equal(self.mask, other.mask))

    def __le__(self, other: "TupleSubset") -> bool:
        self._compatible(other)
        return not bool((self.mask & ~other.mask).any())

    def __mul__(self, other: "TupleSubset") -> "TupleSubset":
        return product_set(self, other)

    @property
    def is_full(self) -> bool:
        return self.count == self.space.size

    def is_subgroup(self) -> bool:
        """Exhaustive subgroup test.

        Greedily picks generators of the subgroup generated by the set and
        fails as soon as that subgroup leaves the set.
        """
        if not self.mask[0]:
            return False
        if self.is_full:
            return True
        reached = np.zeros(self.space.size, dtype=bool)
        reached[0] = True
        gens: list[tuple[int, ...]] = []
        for s in self.indices():
            if reached[s]:
                continue
            g = tuple(int(x) for x in self.space.decode(s))
            gens.append(g)
            start = np.flatnonzero(reached)
            frontier = np.concatenate([self.space.right_mul(c, g) for c in _chunks(start)])
            frontier = np.unique(frontier[~reached[frontier]])
            reached[frontier] = True
            _close(self.space, reached, frontier, gens)
            if (reached & ~self.mask).any():
                return False
        return True

    def conjugate(self, left: Sequence[int], right: Sequence[int]) -> "TupleSubset":
        """``left^-1 * S * right``."""
        G = self.group
        linv = [G.inv(int(a)) for a in left]
        idx = self.indices()
        out = np.zeros(self.space.size, dtype=bool)
        for c in _chunks(idx):
            out[self.space.right_mul(self.space.left_mul(linv, c), right)] = True
        return TupleSubset(self.space, out)

    def dump(self, threshold: int = config.DUMP_THRESHOLD) -> list[list[int]] | None:
        if self.count > threshold:
            return None
        return [list(t) for t in self.tuples()]


# ---------------------------------------------------------------- basic sets


def g_v_set(G: FiniteGroup, v: Sequence[int], cap: int | None = None) -> TupleSubset:
    """``{(g^{v_0}, ..., g^{v_{n-1}}) : g in G}``."""
    v = TypeVector(v)
    return TupleSubset.from_tuples(G, v.arity, (pattern_tuple(v, g) for g in range(G.order)), cap)


def product_set(A: TupleSubset, B: TupleSubset) -> TupleSubset:
    """Componentwise product set ``{a * b}``."""
    A._compatible(B)
    space = A.space
    out = np.zeros(space.size, dtype=bool)
    a_idx = A.indices()
    for b in space.decode(B.indices()):
        for c in _chunks(a_idx):
            out[space.right_mul(c, b)] = True
    return TupleSubset(space, out)


def pattern_generators(G: FiniteGroup, patterns: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Generating tuples of the subgroup generated by the patterns' ``G_v``."""
    return [pattern_tuple(v, s) for v in patterns for s in G.generators() if any(v)]


def right_multiply_pattern(S: TupleSubset, v: Sequence[int], threads: int = 1) -> TupleSubset:
    """``S * G_v``."""
    mask = S.mask.copy()
    _close(S.space, mask, S.indices(), pattern_generators(S.group, [v]), threads)
    return TupleSubset(S.space, mask)


def right_multiply_subgroup(S: TupleSubset, patterns: Iterable[Sequence[int]], threads: int = 1) -> TupleSubset:
    """``S * H`` for ``H`` the subgroup generated by ``G_v``, ``v`` in ``patterns``."""
    mask = S.mask.copy()
    _close(S.space, mask, S.indices(), pattern_generators(S.group, patterns), threads)
    return TupleSubset(S.space, mask)


def ordered_product(S: TupleSubset, V: Iterable[Sequence[int]], threads: int = 1) -> TupleSubset:
    """``S * G_{v^1} * ... * G_{v^k}``."""
    for v in V:
        S = right_multiply_pattern(S, v, threads)
    return S


def _check_arity(V: TypeSet) -> None:
    if len(V) == 0:
        raise ArityError("empty type set")


@dataclass
class ClosureResult:
    closure: TupleSubset
    q_min: int
    round_counts: list[int] = field(default_factory=list)

    def __iter__(self):
        # unpacks as (closure, q_min)
        return iter((self.closure, self.q_min))


def gv_power_closure(
    G: FiniteGroup, V: TypeSet, threads: int = 1, cap: int | None = None
) -> ClosureResult:
    """Subgroup generated by the ``G_v``, with the least stabilizing power.

    Round ``q`` right-multiplies ``G_V^{q-1}`` by ``G_{v^1} ... G_{v^k}``;
    ``q_min`` is the least ``q >= 1`` with ``G_V^q = G_V^{q+1}``.
    """
    _check_arity(V)
    S = TupleSubset.identity(G, V.arity, cap)
    counts: list[int] = []
    q = 0
    while True:
        nxt = ordered_product(S, V, threads)
        if q >= 1 and nxt.count == S.count:
            return ClosureResult(S, q, counts)
        S = nxt
        q += 1
        counts.append(S.count)


def q_recursion(n: int, cl: int) -> int:
    """Power bound from the inductive construction: q(0)=q(1)=q(2)=1, q(n+1)=(1+4cl)q(n)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return (1 + 4 * cl) ** max(n - 2, 0)


def splitting_subgroup(G: FiniteGroup, V: TypeSet, cap: int | None = None, threads: int = 1) -> TupleSubset:
    """``G_V`` for a splitting, checked to be an order-independent subgroup."""
    V = Splitting.of(V)
    one = TupleSubset.identity(G, V.arity, cap)
    forward = ordered_product(one, V, threads)
    backward = ordered_product(one, list(reversed(V.members)), threads)
    if forward != backward:
        raise AssertionError("splitting product depends on the order of its members")
    if right_multiply_subgroup(forward, V, threads).count != forward.count:
        raise AssertionError("splitting product is not closed under multiplication")
    return forward


def verify_q_bound(G: FiniteGroup, V: TypeSet, threads: int = 1, cap: int | None = None) -> dict:
    """Compare the observed stabilizing power with ``(1+4 cl)^(n-2)``."""
    if not is_perfect(G):
        raise NotPerfect(f"{G.label} is not perfect")
    if not is_rich(V):
        raise NotRich("q bound applies to rich type sets")
    cl = commutator_length_group(G)
    result = gv_power_closure(G, V, threads, cap)
    bound = q_recursion(V.arity, cl)
    return {
        "group": G.label,
        "n": V.arity,
        "V": [str(v) for v in V],
        "cl": cl,
        "q_min": result.q_min,
        "bound": bound,
        "ok": result.q_min <= bound,
        "count": result.closure.count,
        "full": result.closure.is_full,
    }


def closure_report(G: FiniteGroup, V: TypeSet, threads: int = 1, cap: int | None = None,
                   dump_threshold: int = config.DUMP_THRESHOLD) -> dict:
    result = gv_power_closure(G, V, threads, cap)
    closure = result.closure
    report = {
        "group": G.label,
        "V": [str(v) for v in V],
        "n": V.arity,
        "count": closure.count,
        "full": closure.is_full,
        "q_min": result.q_min,
        "round_counts": result.round_counts,
        "subgroup": closure.is_subgroup(),
        "elements": closure.dump(dump_threshold),
    }
    if is_perfect(G) and G.order > 1:
        report["bound"] = q_recursion(V.arity, commutator_length_group(G))
    return report


# ---------------------------------------------------------------- prediction


@dataclass(frozen=True)
class ReductiveDecomposition:
    """``(perfect x Z_{m_1} x ... x Z_{m_r}) / kernel``.

    ``kernel`` lists indices in the product group built by :meth:`product`;
    a perfect part of ``None`` means the trivial group.
    """

    perfect: FiniteGroup | None = None
    abelian: tuple[int, ...] = ()
    kernel: tuple[int, ...] = (0,)

    @functools.cached_property
    def abelian_group(self) -> FiniteGroup:
        factors = [cyclic(m) for m in self.abelian] or [cyclic(1)]
        return functools.reduce(direct_product, factors)

    @functools.cached_property
    def product(self) -> FiniteGroup:
        he = self.perfect if self.perfect is not None else cyclic(1)
        return direct_product(he, self.abelian_group)

    @functools.cached_property
    def group(self) -> FiniteGroup:
        if len(set(self.kernel)) <= 1:
            return self.product
        return central_quotient(self.product, self.kernel)

    def split(self, index: int) -> tuple[int, tuple[int, ...]]:
        """Perfect component and cyclic digits of a product-group index."""
        he, ab = divmod(int(index), self.abelian_group.order)
        digits = []
        for m in reversed(self.abelian or (1,)):
            ab, d = divmod(ab, m)
            digits.append(d)
        return he, tuple(reversed(digits))


@dataclass
class ClosurePrediction:
    order: int
    structure: str
    perfect_rank: int
    abelian_orders: list[int]
    kernel_intersection: int


def _class_structure(V: TypeSet) -> tuple[list[list[int]], list[int]]:
    """Index classes with identical columns, and the always-zero indices."""
    classes: dict[tuple[int, ...], list[int]] = {}
    zero: list[int] = []
    for i in range(V.arity):
        col = tuple(v[i] for v in V)
        if any(col):
            classes.setdefault(col, []).append(i)
        else:
            zero.append(i)
    return list(classes.values()), zero


def predict_closure(decomp: ReductiveDecomposition, V: TypeSet, cap: int | None = None) -> ClosurePrediction:
    """Order of the subgroup generated by ``G_V`` predicted from the structure of ``G``.

    The perfect factor contributes ``|G_he|^(n - deficit)``; each cyclic
    factor contributes the order of the mod-m image of ``span_Z(V)``; the
    kernel divides out its intersection with that product.
    """
    if not isinstance(decomp, ReductiveDecomposition):
        raise TypeError("predict_closure needs a ReductiveDecomposition")
    _check_arity(V)
    n = V.arity
    he = decomp.perfect
    if he is not None and not is_perfect(he):
        raise NotPerfect(f"{he.label} is not perfect")
    he_order = he.order if he is not None else 1
    n_eff = n - richness_deficit(V)
    abelian_orders = [mod_m_image(V, m).order if m > 1 else 1 for m in decomp.abelian]
    upstairs = he_order**n_eff * math.prod(abelian_orders)

    kernel = sorted(set(decomp.kernel))
    meet = 1
    if len(kernel) > 1:
        classes, zero = _class_structure(V)
        lattice = span_z(V)
        count = len(kernel) ** n
        if count > (config.cap_states() if cap is None else cap):
            raise CapExceeded(f"kernel power has {count} elements")
        parts = [decomp.split(k) for k in kernel]
        meet = 0
        for combo in np.ndindex(*([len(kernel)] * n)):
            he_parts = [parts[c][0] for c in combo]
            if any(he_parts[i] != 0 for i in zero):
                continue
            if any(len({he_parts[i] for i in cls}) > 1 for cls in classes):
                continue
            ok = True
            for j, m in enumerate(decomp.abelian):
                z = [parts[c][1][j] for c in combo]
                if m > 1 and not contains_mod(lattice, z, m):
                    ok = False
                    break
            meet += ok
    order = upstairs // meet
    pieces = [f"{he.label}^{n_eff}" if he is not None else "1"]
    pieces += [f"Z{m}-image({k})" for m, k in zip(decomp.abelian, abelian_orders)]
    structure = " x ".join(pieces)
    if meet > 1:
        structure = f"({structure}) / {meet}"
    return ClosurePrediction(order, structure, n_eff, abelian_orders, meet)


# ---------------------------------------------------------------- decomposition


@dataclass(frozen=True)
class FactorWord:
    """Ordered factors ``(v, g)`` standing for the tuples ``g^v``."""

    factors: tuple[tuple[TypeVector, int], ...]

    def __len__(self) -> int:
        return len(self.factors)

    def evaluate(self, G: FiniteGroup) -> tuple[int, ...]:
        if not self.factors:
            raise ValueError("arity of an empty word is undefined; use evaluate_n")
        return self.evaluate_n(G, self.factors[0][0].arity)

    def evaluate_n(self, G: FiniteGroup, n: int) -> tuple[int, ...]:
        acc = [0] * n
        for v, g in self.factors:
            acc = [G.mul(a, g) if b else a for a, b in zip(acc, v)]
        return tuple(acc)

    def inverse(self, G: FiniteGroup) -> "FactorWord":
        return FactorWord(tuple((v, G.inv(g)) for v, g in reversed(self.factors)))

    def to_json(self) -> list[dict]:
        return [{"pattern": str(v), "element_index": int(g)} for v, g in self.factors]

    @classmethod
    def from_json(cls, data) -> "FactorWord":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple((TypeVector.from_string(d["pattern"]), int(d["element_index"])) for d in data))


def _lift(word: list, V: TypeSet, k: int) -> list:
    """Lift a word over ``restrict_set(V, {k})`` to a word over ``V``."""
    choice: dict[TypeVector, TypeVector] = {}
    for v in V:
        choice.setdefault(restrict(v, {k}), v)
    return [(choice[w], g) for w, g in word]


def _inverse(G: FiniteGroup, word: list) -> list:
    return [(v, G.inv(g)) for v, g in reversed(word)]


def _solve(G: FiniteGroup, V: TypeSet, target: tuple[int, ...]) -> list:
    n = V.arity
    if not any(target):
        return []
    if n == 1:
        return [(TypeVector((1,)), target[0])]
    if n == 2:
        return _solve_pair(G, V, target)
    last = n - 1
    word = _lift(_solve(G, restrict_set(V, {last}), target[:last]), V, last)
    reached = G.prod(g for v, g in word if v[last])
    h = G.mul(G.inv(reached), target[last])
    one = (0,) * (n - 2)
    for p, q in commutator_decompose(G, h):
        x = _lift(_solve(G, restrict_set(V, {0}), one + (p,)), V, 0)
        y = _lift(_solve(G, restrict_set(V, {1}), one + (q,)), V, 1)
        word += x + y + _inverse(G, x) + _inverse(G, y)
    return word


def _solve_pair(G: FiniteGroup, V: TypeSet, target: tuple[int, ...]) -> list:
    g1, g2 = target
    e01, e10, e11 = TypeVector((0, 1)), TypeVector((1, 0)), TypeVector((1, 1))
    pos = {v: i for i, v in enumerate(V)}
    if e01 in pos and e10 in pos:
        word = sorted([(e10, g1), (e01, g2)], key=lambda f: pos[f[0]])
    elif e01 in pos:
        if pos[e01] < pos[e11]:
            # (1, x)(y, y) = (y, x y)
            word = [(e01, G.mul(g2, G.inv(g1))), (e11, g1)]
        else:
            # (y, y)(1, x) = (y, y x)
            word = [(e11, g1), (e01, G.mul(G.inv(g1), g2))]
    else:
        if pos[e10] < pos[e11]:
            # (x, 1)(y, y) = (x y, y)
            word = [(e10, G.mul(g1, G.inv(g2))), (e11, g2)]
        else:
            # (y, y)(x, 1) = (y x, y)
            word = [(e11, g2), (e10, G.mul(G.inv(g2), g1))]
    return [(v, g) for v, g in word if g != 0]


def decompose(G: FiniteGroup, V: TypeSet, target: Sequence[int]) -> FactorWord:
    """Explicit factorization of ``target`` over the patterns of a rich ``V``.

    Solves the problem on all but the last index, lifts the solution, and
    corrects the last component with commutators of two lifted solutions
    that are trivial away from the last index.
    """
    target = tuple(int(g) for g in target)
    if len(target) != V.arity:
        raise ArityError(f"target of length {len(target)} for arity {V.arity}")
    if not is_rich(V):
        raise NotRich(f"{V} is not rich")
    if not is_perfect(G):
        raise NotPerfect(f"{G.label} is not perfect")
    word = FactorWord(tuple(_solve(G, V, target)))
    if word.evaluate_n(G, V.arity) != target:
        raise AssertionError("decomposition does not evaluate to its target")
    return word
