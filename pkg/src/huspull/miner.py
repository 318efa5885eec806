"""Depth-first HUSP search over the lexicographic sequence tree.

The search starts from every 1-sequence whose SWU reaches the threshold and
grows prefixes by I-concatenation (all items, ascending) and then by
S-concatenation (all items, ascending).  At each node irrelevant items are
pruned, candidates are filtered with their look-ahead sums, and children
whose bound falls below the threshold are not expanded.

``Bound.SWU`` and ``Bound.SEU`` replace the expansion test with the looser
bounds; they exist for ablation runs and produce identical pattern sets.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from decimal import Decimal
from fractions import Fraction

import numpy as np

from .model import HUSPResult, Pattern, QSeqDatabase, min_util_from_ratio, sort_results
from .projection import (
    ProjectedDB,
    ULDatabase,
    apply_ips,
    bounds_of,
    extend_i,
    extend_s,
    peu_of,
    project_item,
    scan_candidates,
    seu_of,
    swu_of,
    utility_of,
)


class Bound(str, enum.Enum):
    SWU = "swu"
    SEU = "seu"
    PEU = "peu"


class MiningTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class MinerConfig:
    min_util_ratio: Fraction | Decimal | str | float | None = None
    min_util: int | None = None
    bound: Bound = Bound.PEU
    las: bool = True
    ips: bool = True
    max_pattern_length: int | None = None
    check_bounds: bool = False
    time_budget: float | None = None  # seconds

    def __post_init__(self):
        if (self.min_util_ratio is None) == (self.min_util is None):
            raise ValueError("give exactly one of min_util_ratio and min_util")
        if self.min_util is not None and self.min_util < 0:
            raise ValueError("min_util must be non-negative")
        object.__setattr__(self, "bound", Bound(self.bound))
        if self.max_pattern_length is not None and self.max_pattern_length < 1:
            raise ValueError("max_pattern_length must be >= 1")

    def resolve(self, total_utility: int) -> int:
        if self.min_util is not None:
            return self.min_util
        return min_util_from_ratio(self.min_util_ratio, total_utility)


@dataclass
class MiningStats:
    nodes_visited: int = 0
    candidates_generated: int = 0
    las_pruned_items: int = 0
    ips_removed_items: int = 0
    husp_count: int = 0
    elapsed_millis: float = 0.0
    peak_projected_entries: int = 0
    min_util: int = 0
    bound_violations: list = field(default_factory=list)
    bound_checks: int = 0
    # debug mode only: the extensions LAS skipped
    las_skipped: list = field(default_factory=list)

    def merge(self, other: "MiningStats"):
        for f in fields(self):
            if f.name in ("elapsed_millis", "min_util"):
                continue
            if f.name == "peak_projected_entries":
                self.peak_projected_entries = max(self.peak_projected_entries, other.peak_projected_entries)
            else:
                setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def as_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["bound_violations"] = len(self.bound_violations)
        d["las_skipped"] = len(self.las_skipped)
        return d


class _Search:
    def __init__(self, uldb: ULDatabase, config: MinerConfig, min_util: int):
        self.uldb = uldb
        self.config = config
        self.min_util = min_util
        self.results: list[HUSPResult] = []
        self.stats = MiningStats(min_util=min_util)
        self.live_entries = 0
        self.deadline = None if config.time_budget is None else time.monotonic() + config.time_budget
        bound = config.bound
        if bound is Bound.PEU:
            self.bound = peu_of
        elif bound is Bound.SEU:
            self.bound = seu_of
        else:
            self.bound = swu_of

    # -- bookkeeping

    def _enter(self, pd: ProjectedDB) -> int:
        n = pd.entries
        self.live_entries += n
        if self.live_entries > self.stats.peak_projected_entries:
            self.stats.peak_projected_entries = self.live_entries
        return n

    def _check(self, pd: ProjectedDB, parent: dict | None) -> dict:
        """Record the u <= PEU <= SEU <= SWU chain and parent/child monotonicity."""
        b = bounds_of(pd, raw=True)
        st = self.stats
        st.bound_checks += 1
        if not b["utility"] <= b["peu"] <= b["seu"] <= b["swu"]:
            st.bound_violations.append(("chain", pd.prefix, b))
        if parent is not None:
            for key in ("swu", "seu", "peu"):
                if b[key] > parent[key]:
                    st.bound_violations.append(("monotone", pd.prefix, key, b[key], parent[key]))
        return b

    # -- the three procedures

    def run_item(self, item: int):
        pd = project_item(self.uldb, item)
        self.stats.candidates_generated += 1
        self.stats.nodes_visited += 1
        n = self._enter(pd)
        try:
            checked = self._check(pd, None) if self.config.check_bounds else None
            if swu_of(pd) >= self.min_util:
                u = utility_of(pd)
                if u >= self.min_util:
                    self.results.append(HUSPResult(pd.prefix, u))
                if self._may_grow(pd):
                    self.pgrowth(pd, checked)
        finally:
            self.live_entries -= n

    def _may_grow(self, pd: ProjectedDB) -> bool:
        cap = self.config.max_pattern_length
        return cap is None or pd.prefix.length < cap

    def pgrowth(self, pd: ProjectedDB, checked: dict | None):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise MiningTimeout()
        cfg = self.config
        min_util = self.min_util
        cands = scan_candidates(pd)
        if cfg.ips:
            pd, removed = apply_ips(pd, min_util, cands)
            if removed:
                self.stats.ips_removed_items += len(removed)
                cands = scan_candidates(pd)
        for kind, sums in (("I", cands.isum), ("S", cands.ssum)):
            for item in np.flatnonzero(sums):
                if cfg.las and sums[item] < min_util:
                    self.stats.las_pruned_items += 1
                    if cfg.check_bounds:
                        ext = pd.prefix.i_extend if kind == "I" else pd.prefix.s_extend
                        self.stats.las_skipped.append(ext(int(item)))
                    continue
                self.judge(pd, int(item), kind, checked)

    def judge(self, parent: ProjectedDB, item: int, kind: str, parent_checked: dict | None):
        self.stats.candidates_generated += 1
        child = extend_i(parent, item) if kind == "I" else extend_s(parent, item)
        if not child:
            return
        self.stats.nodes_visited += 1
        n = self._enter(child)
        try:
            checked = self._check(child, parent_checked) if self.config.check_bounds else None
            u = utility_of(child)
            if u >= self.min_util:
                self.results.append(HUSPResult(child.prefix, u))
            if self._may_grow(child) and self.bound(child) >= self.min_util:
                self.pgrowth(child, checked)
        finally:
            self.live_entries -= n


def _run(uldb: ULDatabase, config: MinerConfig, min_util: int, items) -> tuple[list[HUSPResult], MiningStats]:
    search = _Search(uldb, config, min_util)
    for item in items:
        search.run_item(item)
    search.stats.husp_count = len(search.results)
    return search.results, search.stats


_worker_state: dict = {}


def _init_worker(db: QSeqDatabase, config: MinerConfig, min_util: int):
    _worker_state["args"] = (ULDatabase(db), config, min_util)


def _run_one(item: int):
    uldb, config, min_util = _worker_state["args"]
    return _run(uldb, config, min_util, [item])


def mine(db: QSeqDatabase, config: MinerConfig, jobs: int = 1) -> tuple[list[HUSPResult], MiningStats]:
    """Mine every high-utility sequential pattern of ``db``.

    Results are sorted by itemset count, then item-ids.  With ``jobs > 1`` the
    per-item subtrees are distributed over worker processes; counters are
    summed and the peak entry count is the largest peak of any subtree.
    """
    t0 = time.perf_counter()
    min_util = config.resolve(db.total_utility)
    if jobs > 1:
        results: list[HUSPResult] = []
        stats = MiningStats(min_util=min_util)
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(db, config, min_util)) as pool:
            for res, st in pool.map(_run_one, db.items):
                results.extend(res)
                stats.merge(st)
        stats.husp_count = len(results)
    else:
        uldb = ULDatabase(db)
        results, stats = _run(uldb, config, min_util, uldb.items)
    stats.elapsed_millis = (time.perf_counter() - t0) * 1000.0
    return sort_results(results), stats
