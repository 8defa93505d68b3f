"""Finite groups on dense element indices, and commutator structure.

Elements of a group of order ``m`` are the integers ``0 .. m-1`` with
``0`` the identity.  ``FiniteGroup.mul`` and ``FiniteGroup.inv`` accept
ints or integer numpy arrays (broadcasting like numpy ufuncs), which is
what the closure code in :mod:`webhol.generation` relies on.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .config import BASE_GROUP_CAP, PRODUCT_GROUP_CAP, TABLE_BUDGET
from .errors import CapExceeded, NotASubgroup, NotInCommutatorSubgroup, NotNormal, NotPerfect


def _index_dtype(order: int):
    return np.int16 if order <= 2**15 else np.int32


class FiniteGroup:
    """A finite group given by its multiplication on element indices.

    The multiplication table is built eagerly when ``order**2`` fits in
    ``table_budget``; otherwise ``mul`` falls back to ``mul_fn``.
    """

    def __init__(
        self,
        order: int,
        mul_fn: Callable,
        inv: np.ndarray,
        label: str,
        descriptor: dict,
        table_budget: int = TABLE_BUDGET,
    ):
        if order < 1:
            raise ValueError("group order must be positive")
        self.order = int(order)
        self.label = label
        self.descriptor = descriptor
        self._mul_fn = mul_fn
        self._inv = np.asarray(inv, dtype=np.int64)
        self._inv.setflags(write=False)
        self.table: np.ndarray | None = None
        if self.order**2 <= table_budget:
            idx = np.arange(self.order, dtype=np.int64)
            table = np.asarray(mul_fn(idx[:, None], idx[None, :]), dtype=_index_dtype(self.order))
            table.setflags(write=False)
            self.table = table
        # filled in by the constructors that know them
        self.factors: tuple[FiniteGroup, ...] = ()
        self.parent: FiniteGroup | None = None
        self.projection: np.ndarray | None = None
        self.permutations: tuple[tuple[int, ...], ...] | None = None

    identity = 0

    def mul(self, a, b):
        if self.table is not None:
            out = self.table[a, b]
            return int(out) if np.ndim(out) == 0 else out.astype(np.int64)
        out = self._mul_fn(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return int(out) if np.ndim(out) == 0 else out

    def inv(self, a):
        out = self._inv[a]
        return int(out) if np.ndim(out) == 0 else out

    def prod(self, elements: Iterable[int]) -> int:
        acc = 0
        for x in elements:
            acc = self.mul(acc, x)
        return acc

    def commutator(self, p, q):
        """``p q p^-1 q^-1``."""
        return self.mul(self.mul(self.mul(p, q), self.inv(p)), self.inv(q))

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def element(self, index: int) -> "GroupElement":
        return GroupElement(self, int(index))

    def is_abelian(self) -> bool:
        return _is_abelian(self)

    def generators(self) -> tuple[int, ...]:
        return _generators(self)

    def element_label(self, index: int) -> str:
        if self.permutations is not None:
            return str(self.permutations[index])
        return str(index)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label}, order={self.order})"

    def to_json(self) -> str:
        return json.dumps(self.descriptor, sort_keys=True)


@dataclass(frozen=True)
class GroupElement:
    group: FiniteGroup
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.group.order:
            raise IndexError(f"element index {self.index} outside 0..{self.group.order - 1}")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if other.group is not self.group:
            raise ValueError("elements belong to different groups")
        return GroupElement(self.group, self.group.mul(self.index, other.index))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.group, self.group.inv(self.index))

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"{self.group.label}[{self.index}]"


def _as_index(g) -> int:
    return g.index if isinstance(g, GroupElement) else int(g)


# ---------------------------------------------------------------- constructors


def cyclic(m: int) -> FiniteGroup:
    """Integers mod ``m`` under addition."""
    if m < 1:
        raise ValueError("cyclic group order must be at least 1")
    g = FiniteGroup(
        m,
        lambda a, b: (a + b) % m,
        (-np.arange(m)) % m,
        label=f"Z{m}",
        descriptor={"kind": "cyclic", "m": m},
    )
    return g


def _permutation_group(perms: list[tuple[int, ...]], label: str, descriptor: dict) -> FiniteGroup:
    perms = sorted(perms)  # identity is lexicographically first
    index = {p: i for i, p in enumerate(perms)}
    k = len(perms[0])
    arr = np.array(perms, dtype=np.int64).reshape(len(perms), k)
    # (p*q)(x) = p(q(x))
    table = np.empty((len(perms), len(perms)), dtype=np.int64)
    for i, p in enumerate(perms):
        pa = arr[i]
        rows = pa[arr]  # rows[j] = p o perms[j]
        table[i] = [index[tuple(r)] for r in rows.tolist()]
    inv = np.empty(len(perms), dtype=np.int64)
    for i, p in enumerate(perms):
        q = [0] * k
        for x, y in enumerate(p):
            q[y] = x
        inv[i] = index[tuple(q)]
    g = FiniteGroup(len(perms), lambda a, b: table[a, b], inv, label=label, descriptor=descriptor)
    g.permutations = tuple(perms)
    return g


def _is_even(p: tuple[int, ...]) -> bool:
    inversions = sum(1 for i, j in itertools.combinations(range(len(p)), 2) if p[i] > p[j])
    return inversions % 2 == 0


def alternating(k: int) -> FiniteGroup:
    """Even permutations of ``k`` points, 3 <= k <= 6."""
    if not 3 <= k <= 6:
        raise ValueError(f"alternating group degree must be in 3..6, got {k}")
    perms = [p for p in itertools.permutations(range(k)) if _is_even(p)]
    return _permutation_group(perms, f"A{k}", {"kind": "alternating", "k": k})


def symmetric(k: int) -> FiniteGroup:
    """All permutations of ``k`` points; order stays within the base cap."""
    if k < 1 or _factorial(k) > BASE_GROUP_CAP:
        raise ValueError(f"symmetric group degree must be in 1..5, got {k}")
    perms = list(itertools.permutations(range(k)))
    return _permutation_group(perms, f"S{k}", {"kind": "symmetric", "k": k})


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def direct_product(G1: FiniteGroup, G2: FiniteGroup, cap: int = PRODUCT_GROUP_CAP) -> FiniteGroup:
    """Componentwise product; pair ``(a, b)`` has index ``a * |G2| + b``."""
    order = G1.order * G2.order
    if order > cap:
        raise CapExceeded(f"product order {order} exceeds cap {cap}")
    m2 = G2.order

    def mul(a, b):
        a1, a2 = np.divmod(a, m2)
        b1, b2 = np.divmod(b, m2)
        return G1.mul(a1, b1) * m2 + G2.mul(a2, b2)

    idx = np.arange(order)
    inv = G1.inv(idx // m2) * m2 + G2.inv(idx % m2)
    g = FiniteGroup(
        order,
        mul,
        inv,
        label=f"{G1.label}x{G2.label}",
        descriptor={"kind": "product", "factors": [G1.descriptor, G2.descriptor]},
    )
    g.factors = (G1, G2)
    return g


def split_index(G: FiniteGroup, index):
    """Inverse of the pairing used by :func:`direct_product`."""
    if len(G.factors) != 2:
        raise ValueError(f"{G.label} is not a direct product")
    return np.divmod(index, G.factors[1].order)


def pair_index(G: FiniteGroup, a, b):
    return a * G.factors[1].order + b


def is_subgroup(G: FiniteGroup, N: Iterable[int]) -> bool:
    members = np.unique(np.fromiter((_as_index(x) for x in N), dtype=np.int64))
    if members.size == 0 or members[0] != 0:
        return False
    if members.min() < 0 or members.max() >= G.order:
        return False
    prods = G.mul(members[:, None], members[None, :])
    return bool(np.isin(prods, members).all())


def is_normal(G: FiniteGroup, N: Iterable[int]) -> bool:
    members = np.unique(np.fromiter((_as_index(x) for x in N), dtype=np.int64))
    g = G.elements()[:, None]
    conj = G.mul(G.mul(g, members[None, :]), G.inv(g))
    return bool(np.isin(conj, members).all())


def central_quotient(G: FiniteGroup, N: Iterable[int]) -> FiniteGroup:
    """Quotient ``G/N`` on left cosets.

    Cosets are numbered in order of their smallest element, so the coset
    of the identity is 0.  Subgroup and normality are checked exhaustively.
    """
    N = sorted({_as_index(x) for x in N})
    if not is_subgroup(G, N):
        raise NotASubgroup(f"{N} is not a subgroup of {G.label}")
    if not is_normal(G, N):
        raise NotNormal(f"{N} is not normal in {G.label}")
    members = np.array(N, dtype=np.int64)
    projection = np.full(G.order, -1, dtype=np.int64)
    reps: list[int] = []
    for g in range(G.order):
        if projection[g] < 0:
            projection[G.mul(g, members)] = len(reps)
            reps.append(g)
    reps_arr = np.array(reps, dtype=np.int64)
    q = len(reps)

    def mul(a, b):
        return projection[G.mul(reps_arr[a], reps_arr[b])]

    inv = projection[G.inv(reps_arr)]
    quotient = FiniteGroup(
        q,
        mul,
        inv,
        label=f"{G.label}/N{len(N)}",
        descriptor={"kind": "quotient", "parent": G.descriptor, "subgroup": N},
    )
    quotient.parent = G
    quotient.projection = projection
    quotient.projection.setflags(write=False)
    return quotient


def group_from_descriptor(desc) -> FiniteGroup:
    """Build a group from its JSON descriptor (dict or JSON text)."""
    if isinstance(desc, str):
        desc = json.loads(desc)
    kind = desc.get("kind")
    if kind == "cyclic":
        return cyclic(int(desc["m"]))
    if kind == "alternating":
        return alternating(int(desc["k"]))
    if kind == "symmetric":
        return symmetric(int(desc["k"]))
    if kind == "product":
        factors = [group_from_descriptor(f) for f in desc["factors"]]
        if not factors:
            raise ValueError("product needs at least one factor")
        return functools.reduce(direct_product, factors)
    if kind == "quotient":
        return central_quotient(group_from_descriptor(desc["parent"]), desc["subgroup"])
    raise ValueError(f"unknown group kind {kind!r}")


def check_group_laws(G: FiniteGroup, samples: int = 10_000, seed: int = 0, exhaustive_below: int = 512) -> bool:
    """Identity, inverse and associativity laws.

    Associativity is checked on every triple when the order is below
    ``exhaustive_below`` and on ``samples`` random triples otherwise.
    """
    e = G.elements()
    if not (np.array_equal(G.mul(0, e), e) and np.array_equal(G.mul(e, 0), e)):
        return False
    if not ((G.mul(e, G.inv(e)) == 0).all() and (G.mul(G.inv(e), e) == 0).all()):
        return False
    if G.order < exhaustive_below:
        bc = G.mul(e[:, None], e[None, :])
        for a in range(G.order):
            if not np.array_equal(G.mul(G.mul(a, e)[:, None], e[None, :]), G.mul(a, bc)):
                return False
        return True
    rng = np.random.default_rng(seed)
    a, b, c = rng.integers(0, G.order, size=(3, samples))
    return bool(np.array_equal(G.mul(G.mul(a, b), c), G.mul(a, G.mul(b, c))))


# ---------------------------------------------------------------- structure


def generated_subgroup(G: FiniteGroup, gens: Iterable[int], start: Iterable[int] = (0,)) -> np.ndarray:
    """Boolean mask of the closure of ``start`` under right multiplication by ``gens``."""
    gens = np.array(sorted({_as_index(g) for g in gens}), dtype=np.int64)
    mask = np.zeros(G.order, dtype=bool)
    frontier = np.unique(np.array([_as_index(x) for x in start], dtype=np.int64))
    mask[frontier] = True
    while frontier.size and gens.size:
        cand = np.unique(G.mul(frontier[:, None], gens[None, :]).ravel())
        frontier = cand[~mask[cand]]
        mask[frontier] = True
    return mask


@functools.lru_cache(maxsize=64)
def _generators(G: FiniteGroup) -> tuple[int, ...]:
    # greedy: add the smallest element not yet generated
    gens: list[int] = []
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    while not mask.all():
        g = int(np.argmin(mask))
        gens.append(g)
        mask = generated_subgroup(G, gens, start=np.flatnonzero(mask))
    return tuple(gens)


@functools.lru_cache(maxsize=64)
def _is_abelian(G: FiniteGroup) -> bool:
    gens = np.array(G.generators(), dtype=np.int64)
    if gens.size == 0:
        return True
    return bool(np.array_equal(G.mul(gens[:, None], gens[None, :]), G.mul(gens[None, :], gens[:, None])))


@functools.lru_cache(maxsize=64)
def _commutator_pairs(G: FiniteGroup) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct commutator values with their lexicographically least (p, q)."""
    m = G.order
    best = np.full(m, -1, dtype=np.int64)
    q = G.elements()
    inv_q = G.inv(q)
    for p in range(m):
        row = G.mul(G.mul(G.mul(p, q), G.inv(p)), inv_q)
        fresh = best[row] < 0
        if fresh.any():
            vals, first = np.unique(row[fresh], return_index=True)
            best[vals] = p * m + q[fresh][first]
    values = np.flatnonzero(best >= 0)
    return values, best[values] // m, best[values] % m


def commutators(G: FiniteGroup) -> np.ndarray:
    """Sorted array of all elements that are single commutators."""
    return _commutator_pairs(G)[0]


def commutator_subgroup(G: FiniteGroup) -> frozenset[int]:
    mask = generated_subgroup(G, commutators(G))
    return frozenset(int(x) for x in np.flatnonzero(mask))


def is_perfect(G: FiniteGroup) -> bool:
    return len(commutator_subgroup(G)) == G.order


@functools.lru_cache(maxsize=64)
def _commutator_layers(G: FiniteGroup):
    """Breadth-first layering of the commutator subgroup by word length.

    Returns ``dist`` (-1 outside the commutator subgroup) and, for every
    reached element x != e, the predecessor y and commutator c with
    ``x = y * c`` and ``dist[y] = dist[x] - 1``.
    """
    comm = commutators(G)
    dist = np.full(G.order, -1, dtype=np.int64)
    prev = np.full(G.order, -1, dtype=np.int64)
    via = np.full(G.order, -1, dtype=np.int64)
    dist[0] = 0
    frontier = np.array([0], dtype=np.int64)
    depth = 0
    while frontier.size:
        depth += 1
        prods = G.mul(frontier[:, None], comm[None, :]).ravel()
        new = dist[prods] < 0
        if not new.any():
            break
        vals, first = np.unique(prods[new], return_index=True)
        flat = np.flatnonzero(new)[first]
        dist[vals] = depth
        prev[vals] = frontier[flat // comm.size]
        via[vals] = comm[flat % comm.size]
        frontier = vals
    for arr in (dist, prev, via):
        arr.setflags(write=False)
    return dist, prev, via


def commutator_length(G: FiniteGroup, g) -> int | None:
    """Least number of commutators with product ``g``; ``None`` if impossible."""
    d = int(_commutator_layers(G)[0][_as_index(g)])
    return None if d < 0 else d


def commutator_length_group(G: FiniteGroup) -> int:
    dist = _commutator_layers(G)[0]
    if (dist < 0).any():
        raise NotPerfect(f"{G.label} is not perfect; its commutator length is undefined")
    return int(dist.max())


def commutator_decompose(G: FiniteGroup, g) -> list[tuple[int, int]]:
    """Pairs ``(p, q)`` whose commutators multiply, in order, to ``g``.

    The list has minimal length.
    """
    g = _as_index(g)
    dist, prev, via = _commutator_layers(G)
    if dist[g] < 0:
        raise NotInCommutatorSubgroup(f"element {g} of {G.label} is not a product of commutators")
    values, ps, qs = _commutator_pairs(G)
    pair_of = {int(v): (int(p), int(q)) for v, p, q in zip(values, ps, qs)}
    chain: list[int] = []
    x = g
    while x != 0:
        chain.append(int(via[x]))
        x = int(prev[x])
    pairs = [pair_of[c] for c in reversed(chain)]
    check = G.prod(G.commutator(p, q) for p, q in pairs)
    if check != g:
        raise AssertionError("commutator decomposition does not evaluate to its input")
    return pairs
