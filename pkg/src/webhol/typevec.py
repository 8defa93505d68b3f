"""0/1 type vectors and the combinatorics built on them.

Indices are 0-based throughout: a type vector of arity ``n`` has
components ``0 .. n-1`` and restriction index sets are subsets of
``range(n)``.
"""

from __future__ import annotations

import itertools
import json
from typing import Hashable, Iterable, Sequence

from .config import MAX_ARITY
from .errors import ArityError


class TypeVector(tuple):
    """An n-tuple with entries 0 or 1."""

    def __new__(cls, bits: Iterable[int]):
        bits = tuple(int(b) for b in bits)
        if not bits:
            raise ArityError("type vector needs at least one component")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"type vector entries must be 0 or 1, got {bits}")
        return super().__new__(cls, bits)

    @classmethod
    def from_string(cls, text: str) -> "TypeVector":
        return cls(int(ch) for ch in text.strip())

    @classmethod
    def zero(cls, n: int) -> "TypeVector":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "TypeVector":
        return cls(1 if k == i else 0 for k in range(n))

    @property
    def arity(self) -> int:
        return len(self)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self) if b)

    def is_zero(self) -> bool:
        return not any(self)

    def __str__(self) -> str:
        return "".join(str(b) for b in self)

    def __repr__(self) -> str:
        return f"TypeVector('{self}')"


def _as_vector(v) -> TypeVector:
    if isinstance(v, TypeVector):
        return v
    if isinstance(v, str):
        return TypeVector.from_string(v)
    return TypeVector(v)


class TypeSet:
    """Ordered, duplicate-free collection of type vectors of equal arity.

    Order is kept (first insertion wins) but ignored by ``==`` and ``hash``.
    """

    __slots__ = ("members", "arity")

    def __init__(self, members: Iterable = (), arity: int | None = None):
        vecs = tuple(_as_vector(v) for v in members)
        if arity is None:
            if not vecs:
                raise ArityError("arity of an empty type set is undefined")
            arity = vecs[0].arity
        if arity < 1:
            raise ArityError("arity must be positive")
        for v in vecs:
            if v.arity != arity:
                raise ArityError(f"mixed arities: {v} in a set of arity {arity}")
        if len(set(vecs)) != len(vecs):
            raise ValueError("type set members must be pairwise distinct")
        self.members = vecs
        self.arity = arity

    @classmethod
    def unique(cls, members: Iterable, arity: int | None = None) -> "TypeSet":
        """Build a set from ``members``, dropping repeats after the first."""
        seen: dict[TypeVector, None] = {}
        for v in members:
            seen.setdefault(_as_vector(v), None)
        return cls(seen, arity=arity)

    @classmethod
    def from_text(cls, text: str) -> "TypeSet":
        rows = [line.strip() for line in text.splitlines()]
        return cls(TypeVector.from_string(r) for r in rows if r and not r.startswith("#"))

    @classmethod
    def from_json(cls, data) -> "TypeSet":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(TypeVector(row) for row in data)

    def to_text(self) -> str:
        return "".join(f"{v}\n" for v in self.members)

    def to_json(self) -> list[list[int]]:
        return [list(v) for v in self.members]

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def __contains__(self, v) -> bool:
        return _as_vector(v) in self.members

    def __eq__(self, other) -> bool:
        if not isinstance(other, TypeSet):
            return NotImplemented
        return self.arity == other.arity and set(self.members) == set(other.members)

    def __hash__(self) -> int:
        return hash((self.arity, frozenset(self.members)))

    def __repr__(self) -> str:
        inner = ", ".join(str(v) for v in self.members)
        return f"{type(self).__name__}({{{inner}}})"


class Splitting(TypeSet):
    """A type set whose members partition the index set."""

    __slots__ = ()

    def __init__(self, members: Iterable = (), arity: int | None = None):
        super().__init__(members, arity)
        if not is_splitting(self):
            raise ValueError(f"not a splitting: {TypeSet.__repr__(self)}")

    @classmethod
    def of(cls, V: TypeSet) -> "Splitting":
        if isinstance(V, Splitting):
            return V
        return cls(V.members, V.arity)


def _require_nonempty(V: TypeSet) -> None:
    if len(V) == 0:
        raise ArityError("operation undefined for an empty type set")


def _columns(V: TypeSet) -> list[tuple[int, ...]]:
    # column i records v_i for every v in V
    return [tuple(v[i] for v in V) for i in range(V.arity)]


def is_rich(V: TypeSet) -> bool:
    """True iff every index pair is separated and every index is covered."""
    _require_nonempty(V)
    n = V.arity
    for i in range(n):
        if not any(v[i] for v in V):
            return False
    for i, j in itertools.combinations(range(n), 2):
        if all(v[i] == v[j] for v in V):
            return False
    return True


def _check_index_set(K: Iterable[int], n: int) -> frozenset[int]:
    K = frozenset(K)
    for k in K:
        if not 0 <= k < n:
            raise IndexError(f"restriction index {k} outside 0..{n - 1}")
    if len(K) == n:
        raise ArityError("restricting away every component leaves nothing")
    return K


def restrict(v: TypeVector, K: Iterable[int]) -> TypeVector:
    """Drop the components of ``v`` listed in ``K``."""
    v = _as_vector(v)
    K = _check_index_set(K, v.arity)
    return TypeVector(b for i, b in enumerate(v) if i not in K)


def restrict_set(V: TypeSet, K: Iterable[int]) -> TypeSet:
    K = _check_index_set(K, V.arity)
    return TypeSet.unique((restrict(v, K) for v in V), arity=V.arity - len(K))


def deficit_witness(V: TypeSet, max_arity: int = MAX_ARITY) -> frozenset[int] | None:
    """Smallest index set whose removal leaves a rich restriction.

    Subsets are tried by increasing size, lexicographically within a size.
    Returns ``None`` when every member of ``V`` is the zero vector.
    """
    _require_nonempty(V)
    n = V.arity
    if n > max_arity:
        raise ArityError(f"arity {n} exceeds the deficit search cap {max_arity}")
    if all(v.is_zero() for v in V):
        return None
    for size in range(n):
        for K in itertools.combinations(range(n), size):
            if is_rich(restrict_set(V, K)):
                return frozenset(K)
    raise AssertionError("unreachable: a single covered index is always rich")


def richness_deficit(V: TypeSet, max_arity: int = MAX_ARITY) -> int:
    K = deficit_witness(V, max_arity)
    return V.arity if K is None else len(K)


def is_splitting(V: TypeSet) -> bool:
    _require_nonempty(V)
    if any(v.is_zero() for v in V):
        return False
    return all(sum(col) == 1 for col in _columns(V))


def kappa(v: TypeVector, Vp: TypeSet) -> TypeSet:
    """Members of ``Vp`` sharing at least one 1-position with ``v``."""
    v = _as_vector(v)
    if v.arity != Vp.arity:
        raise ArityError(f"arity mismatch: {v.arity} vs {Vp.arity}")
    hits = [w for w in Vp if any(a and b for a, b in zip(v, w))]
    return TypeSet(hits, arity=Vp.arity)


def refines(Vp: TypeSet, V: TypeSet) -> bool:
    """True iff every member of ``V`` is a sum of members of ``Vp``."""
    if Vp.arity != V.arity:
        raise ArityError(f"arity mismatch: {Vp.arity} vs {V.arity}")
    for v in V:
        total = [0] * V.arity
        for w in kappa(v, Vp):
            total = [a + b for a, b in zip(total, w)]
        if tuple(total) != tuple(v):
            return False
    return True


def splitting_for(labels: Sequence[Hashable]) -> Splitting:
    """Indicator vectors of the equality classes of ``labels``.

    Classes are ordered by their smallest index.
    """
    n = len(labels)
    if n == 0:
        raise ArityError("need at least one label")
    classes: dict[Hashable, list[int]] = {}
    for i, s in enumerate(labels):
        classes.setdefault(s, []).append(i)
    vecs = [TypeVector(1 if k in idx else 0 for k in range(n)) for idx in map(set, classes.values())]
    return Splitting(vecs, arity=n)


def unit_splitting(n: int) -> Splitting:
    return Splitting((TypeVector.unit(n, i) for i in range(n)), arity=n)
