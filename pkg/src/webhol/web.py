"""Discrete webs: paths as label sequences, and their achievable transports.

A web with ``n`` paths and ``T`` steps is an ``n x T`` array of segment
labels.  Path ``i`` runs through segment ``symbols[i][t]`` during step
``t`` (0-based); two paths share a segment exactly when they carry the
same label at that step.  A connection assigns a group element to every
label, independently, and the transport along a path is the ordered
product of its labels' elements.

Finite sequences cannot express "in every neighbourhood of the base
point" literally.  Here a property recurs near the base when it holds in
every prefix window ``[first, k]`` with ``k`` at least the *horizon step*,
a fixed fraction (default one half) of the way from the first regular
step to the end.  This is a modelling choice and is exposed as the
``horizon`` argument.
"""

from __future__ import annotations

import functools
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np

from . import config
from .errors import CapExceeded, WebError
from .generation import (
    TupleSpace,
    TupleSubset,
    gv_power_closure,
    pattern_generators,
    q_recursion,
    right_multiply_subgroup,
)
from .groups import FiniteGroup, commutator_length_group, is_perfect
from .typevec import Splitting, TypeSet, TypeVector, is_rich, splitting_for

DEFAULT_HORIZON = 0.5


@dataclass(frozen=True)
class DiscreteWeb:
    symbols: tuple[tuple[Hashable, ...], ...]
    tassels: tuple[tuple[int, ...], ...] = ()
    base: tuple[Hashable, ...] = ()

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.symbols)
        if not rows or not rows[0]:
            raise WebError("a web needs at least one path and one step")
        if len({len(r) for r in rows}) != 1:
            raise WebError("all paths need the same number of steps")
        object.__setattr__(self, "symbols", rows)
        tassels = tuple(tuple(int(i) for i in t) for t in self.tassels) or (tuple(range(len(rows))),)
        object.__setattr__(self, "tassels", tassels)
        flat = sorted(i for t in tassels for i in t)
        if flat != list(range(len(rows))):
            raise WebError("tassels must partition the path indices")
        base = tuple(self.base) or tuple(f"base{j}" for j in range(len(tassels)))
        if len(base) != len(tassels):
            raise WebError("need one base label per tassel")
        if len(set(base)) != len(base):
            raise WebError("tassel base labels must be distinct")
        object.__setattr__(self, "base", base)
        # consistent parametrization: a label lives at a single step
        step_of: dict[Hashable, int] = {b: -1 for b in base}
        for row in rows:
            for t, s in enumerate(row):
                if step_of.setdefault(s, t) != t:
                    raise WebError(f"label {s!r} occurs at two different steps")
        # tassels meet only at the final step
        owner = {i: j for j, t in enumerate(tassels) for i in t}
        for t in range(len(rows[0]) - 1):
            seen: dict[Hashable, int] = {}
            for i, row in enumerate(rows):
                if seen.setdefault(row[t], owner[i]) != owner[i]:
                    raise WebError(f"paths of different tassels share label {row[t]!r} before the last step")

    @classmethod
    def from_json(cls, data) -> "DiscreteWeb":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            tuple(tuple(r) for r in data["paths"]),
            tuple(tuple(t) for t in data.get("tassels", ())),
            tuple(data.get("base", ())),
        )

    def to_json(self) -> dict:
        return {"paths": [list(r) for r in self.symbols], "tassels": [list(t) for t in self.tassels], "base": list(self.base)}

    @property
    def n(self) -> int:
        return len(self.symbols)

    @property
    def T(self) -> int:
        return len(self.symbols[0])

    def column(self, t: int) -> tuple[Hashable, ...]:
        return tuple(row[t] for row in self.symbols)

    def labels(self) -> list[Hashable]:
        seen: dict[Hashable, None] = {}
        for t in range(self.T):
            for s in self.column(t):
                seen.setdefault(s, None)
        return list(seen)

    def sub_web(self, paths: Sequence[int]) -> "DiscreteWeb":
        """The paths ``paths`` on their own, as a single tassel."""
        j = next(j for j, t in enumerate(self.tassels) if paths[0] in t)
        return DiscreteWeb(tuple(self.symbols[i] for i in paths), (), (self.base[j],))

    def steps(self, start: int, stop: int) -> "DiscreteWeb":
        """Steps ``start .. stop`` inclusive."""
        if not 0 <= start <= stop < self.T:
            raise WebError(f"step range [{start}, {stop}] outside 0..{self.T - 1}")
        return DiscreteWeb(tuple(r[start : stop + 1] for r in self.symbols), self.tassels, self.base)


@dataclass(frozen=True)
class StepSplitting:
    step: int
    splitting: Splitting
    regular: bool


@dataclass
class DiscreteConnection:
    assignment: Mapping[Hashable, int]

    def __getitem__(self, label):
        try:
            return self.assignment[label]
        except KeyError:
            raise WebError(f"no group element assigned to label {label!r}") from None


def step_splittings(w: DiscreteWeb) -> list[StepSplitting]:
    """Per-step splittings; a step is regular when its neighbours share its splitting."""
    return list(_step_splittings(w))


@functools.lru_cache(maxsize=32)
def _step_splittings(w: DiscreteWeb) -> tuple[StepSplitting, ...]:
    splits = [splitting_for(w.column(t)) for t in range(w.T)]
    out = []
    for t, V in enumerate(splits):
        regular = 0 < t < w.T - 1 and splits[t - 1] == V == splits[t + 1]
        out.append(StepSplitting(t, V, regular))
    return tuple(out)


def regular_steps(w: DiscreteWeb) -> list[StepSplitting]:
    return [s for s in step_splittings(w) if s.regular]


def _require_regular(w: DiscreteWeb) -> list[StepSplitting]:
    reg = regular_steps(w)
    if not reg:
        raise WebError("web has no regular steps")
    return reg


def types_of(w: DiscreteWeb) -> TypeSet:
    """Union of the splittings at regular steps."""
    reg = _require_regular(w)
    return TypeSet.unique((v for s in reg for v in s.splitting), arity=w.n)


def horizon_step(w: DiscreteWeb, horizon: float = DEFAULT_HORIZON) -> int:
    """Smallest right end of a prefix window that counts as "near the base"."""
    first = _require_regular(w)[0].step
    return first + math.floor(horizon * (w.T - 1 - first))


def limit_splittings(w: DiscreteWeb, horizon: float = DEFAULT_HORIZON) -> list[Splitting]:
    """Regular splittings occurring in every prefix window reaching the horizon."""
    reg = _require_regular(w)
    k0 = horizon_step(w, horizon)
    # windows [first, k] for k >= k0 are nested, so the smallest one decides
    out: dict[Splitting, None] = {}
    for s in reg:
        if s.step <= k0:
            out.setdefault(s.splitting, None)
    return list(out)


@dataclass
class TasselReport:
    tassel: tuple[int, ...]
    conditions: dict[str, str]
    details: dict[str, list] = field(default_factory=dict)
    rich_types: bool | None = None

    @property
    def valid(self) -> bool:
        return "fail" not in self.conditions.values()

    @property
    def truncation_limited(self) -> bool:
        return "truncation-limited" in self.conditions.values()

    def to_json(self) -> dict:
        return {
            "tassel": list(self.tassel),
            "conditions": self.conditions,
            "valid": self.valid,
            "truncation_limited": self.truncation_limited,
            "rich_types": self.rich_types,
            "details": self.details,
        }


def check_tassel(w: DiscreteWeb, tassel: Sequence[int], horizon: float = DEFAULT_HORIZON) -> TasselReport:
    """Check the discrete tassel conditions for the paths in ``tassel``.

    Condition 1 (a contractible neighbourhood) has no discrete content and is
    reported as not modelled.  Condition 2 holds for every constructed web
    because construction enforces a common base and consistent labels.
    """
    tassel = tuple(tassel)
    if tassel not in w.tassels:
        raise WebError(f"{tassel} is not one of the web's tassels")
    sub = w.sub_web(tassel)
    conds = {"1": "not modeled", "2": "pass"}
    details: dict[str, list] = {}

    reg = regular_steps(sub)
    k0 = horizon_step(sub, horizon) if reg else sub.T - 1

    late_pairs = []
    for a, b in itertools.combinations(range(sub.n), 2):
        shared = [t for t in range(sub.T) if sub.symbols[a][t] == sub.symbols[b][t]]
        if shared and shared[0] > k0:
            late_pairs.append([tassel[a], tassel[b]])
    conds["3"] = "fail" if late_pairs else "pass"
    details["3"] = late_pairs

    if not reg:
        conds["4"] = "fail"
        details["4"] = ["no regular steps"]
    else:
        early = {v for s in reg if s.step <= k0 for v in s.splitting}
        missing = [str(v) for v in types_of(sub) if v not in early]
        conds["4"] = "truncation-limited" if missing else "pass"
        details["4"] = missing

    dupes = [
        [tassel[a], tassel[b]]
        for a, b in itertools.combinations(range(sub.n), 2)
        if sub.symbols[a] == sub.symbols[b]
    ]
    conds["5"] = "fail" if dupes else "pass"
    details["5"] = dupes

    rich = is_rich(types_of(sub)) if reg else None
    return TasselReport(tassel, conds, details, rich)


def transport(w: DiscreteWeb, A: DiscreteConnection | Mapping, G: FiniteGroup) -> tuple[int, ...]:
    """Ordered product of the assigned elements along every path."""
    if not isinstance(A, DiscreteConnection):
        A = DiscreteConnection(A)
    return tuple(G.prod(A[s] for s in row) for row in w.symbols)


def _blocks(w: DiscreteWeb) -> list[Splitting]:
    # consecutive equal splittings collapse: G_V G_V = G_V
    out: list[Splitting] = []
    for s in step_splittings(w):
        if not out or out[-1] != s.splitting:
            out.append(s.splitting)
    return out


def achievable_set(
    w: DiscreteWeb,
    G: FiniteGroup,
    threads: int = 1,
    cap: int | None = None,
    cross_check: bool = True,
) -> TupleSubset:
    """All transport tuples over all connections: the ordered product of the step subgroups.

    When ``|G|^(number of labels)`` is at most the enumeration cap, the
    result is also compared against brute-force enumeration of assignments.
    """
    S = TupleSubset.identity(G, w.n, cap)
    absorbed: set[Splitting] = set()
    blocks = _blocks(w)
    for i, V in enumerate(blocks):
        if S.is_full:
            break
        if set(blocks[i:]) <= absorbed:
            # every remaining factor maps S onto itself
            break
        nxt = right_multiply_subgroup(S, V, threads)
        if nxt.count == S.count:
            absorbed.add(V)
        else:
            absorbed = {V}
            S = nxt
    if cross_check and G.order ** len(w.labels()) <= config.ENUMERATION_CHECK_CAP:
        brute = enumerate_transports(w, G, cap)
        if brute != S:
            raise AssertionError("fold of step subgroups disagrees with assignment enumeration")
    return S


def enumerate_transports(w: DiscreteWeb, G: FiniteGroup, cap: int | None = None) -> TupleSubset:
    """Transport tuples of every assignment of elements to labels."""
    labels = w.labels()
    total = G.order ** len(labels)
    if total > config.ENUMERATION_CHECK_CAP:
        raise CapExceeded(f"{total} assignments exceed the enumeration cap")
    pos = {s: k for k, s in enumerate(labels)}
    space = TupleSpace(G, w.n, cap)
    mask = np.zeros(space.size, dtype=bool)
    digits_w = G.order ** np.arange(len(labels), dtype=np.int64)
    for start in range(0, total, 1 << 16):
        a = np.arange(start, min(total, start + (1 << 16)), dtype=np.int64)
        assign = (a[:, None] // digits_w) % G.order
        comps = []
        for row in w.symbols:
            acc = np.zeros(a.size, dtype=np.int64)
            for s in row:
                acc = G.mul(acc, assign[:, pos[s]])
            comps.append(acc)
        mask[np.stack(comps, axis=1) @ space.weights] = True
    return TupleSubset(space, mask)


def _q_for(G: FiniteGroup, n: int) -> int | None:
    if G.order == 1 or G.is_abelian():
        return 1
    if is_perfect(G):
        return q_recursion(n, commutator_length_group(G))
    return None


def _regular_runs(w: DiscreteWeb, start: int = 0, stop: int | None = None) -> list[Splitting]:
    """Splittings of maximal runs of regular steps inside ``[start, stop]``."""
    stop = w.T - 1 if stop is None else stop
    runs: list[Splitting] = []
    prev = None
    for s in step_splittings(w):
        if start <= s.step <= stop and s.regular:
            if prev is None or prev.step != s.step - 1 or prev.splitting != s.splitting:
                runs.append(s.splitting)
            prev = s
        else:
            prev = None
    return runs


def _embed(parts: list[tuple[tuple[int, ...], TupleSubset]], G: FiniteGroup, n: int, cap: int | None) -> TupleSubset:
    """Product of per-tassel subsets placed at their path indices."""
    space = TupleSpace(G, n, cap)
    total = np.zeros(1, dtype=np.int64)
    for idx, S in parts:
        offsets = S.space.decode(S.indices()) @ space.weights[list(idx)]
        total = (total[:, None] + offsets[None, :]).ravel()
    mask = np.zeros(space.size, dtype=bool)
    mask[total] = True
    return TupleSubset(space, mask)


@dataclass
class WebPrediction:
    predicted: TupleSubset
    achievable: TupleSubset
    equal: bool
    lower_bound_only: bool
    q: dict[tuple[int, ...], int | None]

    def to_json(self) -> dict:
        return {
            "predicted_count": self.predicted.count,
            "achievable_count": self.achievable.count,
            "equal": self.equal,
            "lower_bound_only": self.lower_bound_only,
            "q": {",".join(map(str, k)): v for k, v in self.q.items()},
        }


def tassel_closure(w: DiscreteWeb, tassel: Sequence[int], G: FiniteGroup, threads: int = 1, cap: int | None = None):
    sub = w.sub_web(tuple(tassel))
    return gv_power_closure(G, types_of(sub), threads, cap)


def recurrence_met(w: DiscreteWeb, q: int, start: int = 0, stop: int | None = None,
                   horizon: float = DEFAULT_HORIZON) -> bool:
    """Does every limit splitting occur in at least ``q * |limits|`` regular runs?"""
    limits = limit_splittings(w, horizon)
    runs = _regular_runs(w, start, stop)
    need = q * len(limits)
    return all(runs.count(V) >= need for V in limits)


def predict_web_transport(w: DiscreteWeb, G: FiniteGroup, threads: int = 1, cap: int | None = None,
                          horizon: float = DEFAULT_HORIZON) -> WebPrediction:
    """Tassel-wise prediction of the achievable set, compared with the exact one."""
    parts = []
    qs: dict[tuple[int, ...], int | None] = {}
    hypothesis = True
    for tassel in w.tassels:
        sub = w.sub_web(tassel)
        report = check_tassel(w, tassel, horizon)
        result = gv_power_closure(G, types_of(sub), threads, cap)
        q = _q_for(G, len(tassel))
        if q is None:
            q = result.q_min
        qs[tassel] = q
        parts.append((tassel, result.closure))
        hypothesis &= report.valid and bool(report.rich_types) and recurrence_met(sub, q, horizon=horizon)
    predicted = _embed(parts, G, w.n, cap)
    achieved = achievable_set(w, G, threads, cap)
    return WebPrediction(predicted, achieved, predicted == achieved, not hypothesis, qs)


def truncation_point(w: DiscreteWeb, q: int, t: int, horizon: float = DEFAULT_HORIZON) -> int | None:
    """Latest step ``s`` such that ``[s, t]`` still has ``q * |limits|`` runs of every limit splitting."""
    for s in range(t, -1, -1):
        if recurrence_met(w, q, s, t, horizon):
            return s
    return None


def suffix_truncation_check(w: DiscreteWeb, G: FiniteGroup, tau: int, t: int | None = None,
                            threads: int = 1, cap: int | None = None,
                            horizon: float = DEFAULT_HORIZON) -> dict:
    """Do the steps ``[tau, t]`` alone realize the full predicted set?"""
    t = w.T - 1 if t is None else t
    q = _q_for(G, w.n)
    V = types_of(w)
    full = None
    if q is None:
        full = gv_power_closure(G, V, threads, cap)
        q = full.q_min
    t_prime = truncation_point(w, q, t, horizon)
    report = {"group": G.label, "tau": tau, "t": t, "q": q, "t_prime": t_prime}
    if t_prime is None or t_prime == t:
        report.update(status="insufficient recurrence", equal=None)
        return report
    if not 0 <= tau <= t_prime:
        raise WebError(f"tau={tau} must lie in [0, t'={t_prime}]")
    if full is None:
        full = gv_power_closure(G, V, threads, cap)
    achieved = achievable_set(w.steps(tau, t), G, threads, cap)
    equal = achieved == full.closure
    report.update(
        status="ok" if equal else "mismatch",
        equal=equal,
        achievable_count=achieved.count,
        predicted_count=full.closure.count,
    )
    return report


def web_report(w: DiscreteWeb, G: FiniteGroup | None = None, threads: int = 1, cap: int | None = None,
               horizon: float = DEFAULT_HORIZON) -> dict:
    steps = step_splittings(w)
    report: dict = {
        "n": w.n,
        "T": w.T,
        "splittings": [[str(v) for v in s.splitting] for s in steps],
        "regular": [s.regular for s in steps],
    }
    try:
        report["V_w"] = [str(v) for v in types_of(w)]
        report["limit_splittings"] = [[str(v) for v in V] for V in limit_splittings(w, horizon)]
    except WebError as exc:
        report["V_w"] = None
        report["error"] = str(exc)
    tassels = [check_tassel(w, t, horizon) for t in w.tassels]
    report["tassels"] = [r.to_json() for r in tassels]
    report["valid"] = all(r.valid for r in tassels)
    if G is not None and report.get("V_w") is not None:
        pred = predict_web_transport(w, G, threads, cap, horizon)
        report["group"] = G.label
        report["achievable_order"] = pred.achievable.count
        report["prediction"] = pred.to_json()
    return report


# ---------------------------------------------------------------- example webs


def matching_web(matchings: Sequence[Sequence[Sequence[int]]], repeats: int, block: int = 3,
                 base: str = "p") -> DiscreteWeb:
    """Paths that cycle through the given set partitions, ``block`` steps each.

    ``matchings`` lists partitions of the path indices; the cycle is
    repeated ``repeats`` times.  Blocks of three or more steps give each
    block at least one regular step.
    """
    n = 1 + max(i for m in matchings for part in m for i in part)
    rows: list[list[str]] = [[] for _ in range(n)]
    t = 0
    for _ in range(repeats):
        for m in matchings:
            for _ in range(block):
                for k, part in enumerate(m):
                    for i in part:
                        rows[i].append(f"t{t}.{k}")
                t += 1
    return DiscreteWeb(tuple(tuple(r) for r in rows), ((tuple(range(n))),), (base,))


def baez_sawin_web(repeats: int, block: int = 3) -> DiscreteWeb:
    """Four paths alternating between the pairings {01|23} and {02|13}.

    The types at regular steps are exactly 1100, 0011, 1010, 0101.
    """
    return matching_web([[[0, 1], [2, 3]], [[0, 2], [1, 3]]], repeats, block)
