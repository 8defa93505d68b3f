"""Integer spans of type sets and what they say about abelian targets.

All arithmetic here is exact integer arithmetic on Python ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .config import MOD_IMAGE_CAP
from .errors import ArityError, CapExceeded
from .typevec import TypeSet, richness_deficit


def hermite_normal_form(rows: Iterable[Sequence[int]], ncols: int) -> list[list[int]]:
    """Row Hermite normal form of the lattice spanned by ``rows``.

    Nonzero rows only; pivots strictly move right, are positive, and the
    entries above each pivot lie in ``[0, pivot)``.
    """
    A = [list(map(int, r)) for r in rows if any(r)]
    for r in A:
        if len(r) != ncols:
            raise ArityError(f"row of length {len(r)} in a lattice of arity {ncols}")
    out: list[list[int]] = []
    col = 0
    while A and col < ncols:
        live = [r for r in A if r[col] != 0]
        rest = [r for r in A if r[col] == 0]
        if not live:
            col += 1
            continue
        # Euclid on column `col` until a single row carries it
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            pivot = live[0]
            nxt = [pivot]
            for r in live[1:]:
                f = r[col] // pivot[col]
                r = [a - f * b for a, b in zip(r, pivot)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            live = nxt
        pivot = live[0]
        if pivot[col] < 0:
            pivot = [-a for a in pivot]
        out.append(pivot)
        A = rest
        col += 1
    # reduce entries above pivots
    for i in range(len(out)):
        c = next(k for k, a in enumerate(out[i]) if a)
        p = out[i][c]
        for j in range(i):
            f = out[j][c] // p
            if f:
                out[j] = [a - f * b for a, b in zip(out[j], out[i])]
    return out


def smith_diagonal(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Nonzero invariant factors d1 | d2 | ... of the integer matrix ``rows``."""
    M = [list(map(int, r)) for r in rows if any(r)]
    diag: list[int] = []
    t = 0
    nrows = len(M)
    while t < min(nrows, ncols):
        nonzero = [(abs(M[i][j]), i, j) for i in range(t, nrows) for j in range(t, ncols) if M[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        M[t], M[i] = M[i], M[t]
        for r in M:
            r[t], r[j] = r[j], r[t]
        while True:
            p = M[t][t]
            changed = False
            for i in range(t + 1, nrows):
                f = M[i][t] // p
                if f:
                    M[i] = [a - f * b for a, b in zip(M[i], M[t])]
                if M[i][t]:
                    M[t], M[i] = M[i], M[t]
                    changed = True
                    break
            if changed:
                continue
            for j in range(t + 1, ncols):
                f = M[t][j] // p
                if f:
                    for r in M:
                        r[j] -= f * r[t]
                if M[t][j]:
                    for r in M:
                        r[t], r[j] = r[j], r[t]
                    changed = True
                    break
            if changed:
                continue
            # pivot must divide the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, nrows) for j in range(t + 1, ncols) if M[i][j] % p),
                None,
            )
            if bad is None:
                break
            M[t] = [a + b for a, b in zip(M[t], M[bad[0]])]
        diag.append(abs(M[t][t]))
        t += 1
    return diag


@dataclass(frozen=True)
class IntegerLattice:
    arity: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def from_generators(cls, rows: Iterable[Sequence[int]], arity: int) -> "IntegerLattice":
        hnf = hermite_normal_form(rows, arity)
        return cls(arity, tuple(tuple(r) for r in hnf))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def invariant_factors(self) -> list[int]:
        return smith_diagonal(self.basis, self.arity)

    def __contains__(self, z) -> bool:
        return lattice_contains(self, z)

    def report(self) -> dict:
        return {
            "arity": self.arity,
            "rank": self.rank,
            "basis": [list(r) for r in self.basis],
            "invariant_factors": self.invariant_factors,
        }


@dataclass(frozen=True)
class ReductiveProfile:
    """Dimensions of the semisimple and abelian factors of a reductive group."""

    dim_ss: int
    dim_ab: int

    def __post_init__(self):
        if self.dim_ss < 0 or self.dim_ab < 0:
            raise ValueError("dimensions must be nonnegative")


def span_z(V: TypeSet) -> IntegerLattice:
    if len(V) == 0:
        raise ArityError("span of an empty type set")
    return IntegerLattice.from_generators(V, V.arity)


def rank_r(V: TypeSet) -> int:
    """Dimension of the real span of ``V``."""
    return span_z(V).rank


def lattice_contains(L: IntegerLattice, z: Sequence[int]) -> bool:
    z = [int(a) for a in z]
    if len(z) != L.arity:
        raise ArityError(f"vector of length {len(z)} vs lattice arity {L.arity}")
    for row in L.basis:
        c = next(k for k, a in enumerate(row) if a)
        if any(z[:c]):
            return False
        f, r = divmod(z[c], row[c])
        if r:
            return False
        z = [a - f * b for a, b in zip(z, row)]
    return not any(z)


def contains_mod(L: IntegerLattice, z: Sequence[int], m: int) -> bool:
    """True iff ``z`` lies in ``L + m Z^n``."""
    n = L.arity
    wider = IntegerLattice.from_generators(
        list(L.basis) + [[m if k == i else 0 for k in range(n)] for i in range(n)], n
    )
    return lattice_contains(wider, z)


def mod_image_order(L: IntegerLattice, m: int) -> int:
    """Order of the image of ``L`` in ``(Z_m)^n``, from the invariant factors."""
    out = 1
    for d in L.invariant_factors:
        out *= m // math.gcd(d, m)
    return out


@dataclass(frozen=True)
class ModImage:
    m: int
    arity: int
    order: int
    mask: np.ndarray  # over (Z_m)^n, little-endian mixed radix

    @property
    def index(self) -> int:
        return self.m**self.arity // self.order

    def __contains__(self, z) -> bool:
        idx = sum((int(a) % self.m) * self.m**i for i, a in enumerate(z))
        return bool(self.mask[idx])


def mod_m_image(V: TypeSet, m: int, cap: int = MOD_IMAGE_CAP) -> ModImage:
    """Subgroup of ``(Z_m)^n`` generated by ``V`` reduced mod ``m``.

    Computed by closure enumeration and checked against the order
    predicted by the invariant factors of ``span_z(V)``.
    """
    if m < 2:
        raise ValueError("modulus must be at least 2")
    n = V.arity
    size = m**n
    if size > cap:
        raise CapExceeded(f"(Z_{m})^{n} has {size} elements, cap is {cap}")
    weights = m ** np.arange(n, dtype=np.int64)
    mask = np.zeros(size, dtype=bool)
    mask[0] = True
    frontier = np.array([0], dtype=np.int64)
    steps = [np.array(v, dtype=np.int64) for v in V]
    while frontier.size:
        digits = (frontier[:, None] // weights) % m
        found = []
        for s in steps:
            nxt = ((digits + s) % m) @ weights
            found.append(nxt[~mask[nxt]])
        frontier = np.unique(np.concatenate(found)) if found else np.empty(0, dtype=np.int64)
        mask[frontier] = True
    order = int(mask.sum())
    predicted = mod_image_order(span_z(V), m)
    if order != predicted:
        raise AssertionError(f"mod-{m} image: enumeration {order} != lattice prediction {predicted}")
    mask.setflags(write=False)
    return ModImage(m, n, order, mask)


def codimension(V: TypeSet, profile: ReductiveProfile) -> int:
    """Codimension of the subgroup generated by the diagonal patterns of ``V``."""
    return richness_deficit(V) * profile.dim_ss + (V.arity - rank_r(V)) * profile.dim_ab
