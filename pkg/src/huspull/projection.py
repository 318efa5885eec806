"""Projected databases over UL-lists and the utility upper bounds.

A projected transaction keeps, for every position where a match of the
prefix can end, the best utility of any such match.  That per-position
maximum is all the extension step and every bound need, so the exponential
set of matches is never materialised.

Layout: a ``ProjectedDB`` holds transaction indices ``rows`` and, in CSR
form, the global offsets ``pos[ptr[j]:ptr[j + 1]]`` of row ``j``'s match
points with their best prefix utilities ``mpu``.  The hot loops are numba
kernels over these arrays and the ``ULStore``.

Items removed by irrelevant-item pruning are carried in ``ProjectedDB.removed``
and subtracted from remaining utilities whenever a bound is evaluated; the
UL-lists themselves are never modified.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

from .model import Pattern, QSeqDatabase
from .ullist import ULList, ULStore, build_ul_store

_EMPTY = np.empty(0, dtype=np.int64)


# --- kernels -----------------------------------------------------------------


@njit(cache=True)
def _k_extend_i(rows, ptr, pos, mpu, items, utils, iset_end, item):
    m = len(rows)
    o_rows = np.empty(m, np.int64)
    o_pidx = np.empty(m, np.int64)
    o_ptr = np.empty(m + 1, np.int64)
    o_pos = np.empty(len(pos), np.int64)
    o_mpu = np.empty(len(pos), np.int64)
    o_ptr[0] = 0
    r = 0
    n = 0
    for j in range(m):
        start = n
        for t in range(ptr[j], ptr[j + 1]):
            p = pos[t]
            # items are sorted inside an itemset, so at most one hit per point
            for q in range(p + 1, iset_end[p] + 1):
                it = items[q]
                if it == item:
                    o_pos[n] = q
                    o_mpu[n] = mpu[t] + utils[q]
                    n += 1
                    break
                if it > item:
                    break
        if n > start:
            o_rows[r] = rows[j]
            o_pidx[r] = j
            r += 1
            o_ptr[r] = n
    return o_rows[:r], o_ptr[: r + 1], o_pos[:n], o_mpu[:n], o_pidx[:r]


@njit(cache=True)
def _k_extend_s(rows, ptr, pos, mpu, utils, iset, iset_end, off, occ_i):
    m = len(rows)
    o_rows = np.empty(m, np.int64)
    o_pidx = np.empty(m, np.int64)
    o_ptr = np.empty(m + 1, np.int64)
    o_pos = np.empty(len(occ_i), np.int64)
    o_mpu = np.empty(len(occ_i), np.int64)
    o_ptr[0] = 0
    r = 0
    n = 0
    for j in range(m):
        lo = ptr[j]
        hi = ptr[j + 1]
        first_end = iset_end[pos[lo]]
        stop = off[rows[j] + 1]
        x = np.searchsorted(occ_i, first_end, side="right")
        if x >= len(occ_i) or occ_i[x] >= stop:
            continue
        t = lo
        best = 0
        while x < len(occ_i) and occ_i[x] < stop:
            q = occ_i[x]
            k = iset[q]
            while t < hi and iset[pos[t]] < k:
                if mpu[t] > best:
                    best = mpu[t]
                t += 1
            o_pos[n] = q
            o_mpu[n] = best + utils[q]
            n += 1
            x += 1
        o_rows[r] = rows[j]
        o_pidx[r] = j
        r += 1
        o_ptr[r] = n
    return o_rows[:r], o_ptr[: r + 1], o_pos[:n], o_mpu[:n], o_pidx[:r]


@njit(cache=True)
def _k_row_max(ptr, mpu):
    m = len(ptr) - 1
    out = np.empty(m, np.int64)
    for j in range(m):
        best = mpu[ptr[j]]
        for t in range(ptr[j] + 1, ptr[j + 1]):
            if mpu[t] > best:
                best = mpu[t]
        out[j] = best
    return out


@njit(cache=True)
def _k_peu(rows, ptr, pos, mpu, off, items, utils, rest, mask):
    """Per row: max over points of mpu + rest, rest excluding masked items."""
    m = len(rows)
    out = np.empty(m, np.int64)
    for j in range(m):
        g = off[rows[j] + 1] - 1
        drop = 0
        best = 0
        for t in range(ptr[j + 1] - 1, ptr[j] - 1, -1):
            p = pos[t]
            while g > p:
                if mask[items[g]]:
                    drop += utils[g]
                g -= 1
            v = mpu[t] + rest[p] - drop
            if v > best:
                best = v
        out[j] = best
    return out


@njit(cache=True)
def _k_seu_plain(rows, ptr, pos, mpu, off, items, utils, rest, mask):
    """Per row: best point utility plus the rest after the first point."""
    m = len(rows)
    out = np.empty(m, np.int64)
    for j in range(m):
        start = pos[ptr[j]]
        drop = 0
        for g in range(start + 1, off[rows[j] + 1]):
            if mask[items[g]]:
                drop += utils[g]
        best = mpu[ptr[j]]
        for t in range(ptr[j] + 1, ptr[j + 1]):
            if mpu[t] > best:
                best = mpu[t]
        out[j] = best + rest[start] - drop
    return out


@njit(cache=True)
def _k_scan(rows, ptr, pos, off, items, iset_end, mask, peu, n_items):
    """Look-ahead sums of I-, S- and combined candidates."""
    isum = np.zeros(n_items, np.int64)
    ssum = np.zeros(n_items, np.int64)
    comb = np.zeros(n_items, np.int64)
    seen_i = np.zeros(n_items, np.int64)
    seen_s = np.zeros(n_items, np.int64)
    seen_c = np.zeros(n_items, np.int64)
    for j in range(len(rows)):
        stamp = j + 1
        v = peu[j]
        for t in range(ptr[j], ptr[j + 1]):
            p = pos[t]
            for q in range(p + 1, iset_end[p] + 1):
                it = items[q]
                if mask[it] or seen_i[it] == stamp:
                    continue
                seen_i[it] = stamp
                isum[it] += v
                if seen_c[it] != stamp:
                    seen_c[it] = stamp
                    comb[it] += v
        for q in range(iset_end[pos[ptr[j]]] + 1, off[rows[j] + 1]):
            it = items[q]
            if mask[it] or seen_s[it] == stamp:
                continue
            seen_s[it] = stamp
            ssum[it] += v
            if seen_c[it] != stamp:
                seen_c[it] = stamp
                comb[it] += v
    return isum, ssum, comb


# --- containers --------------------------------------------------------------


class MatchPoint(NamedTuple):
    position: int
    max_prefix_utility: int


@dataclass
class ProjectedSeq:
    """One projected transaction; positions are 1-based within its UL-list."""

    ul: ULList
    positions: list[int]
    utilities: list[int]

    @property
    def sid(self) -> int:
        return self.ul.sid

    @property
    def start_point(self) -> int:
        return self.positions[0]

    @property
    def points(self) -> list[MatchPoint]:
        return [MatchPoint(p, u) for p, u in zip(self.positions, self.utilities)]


class ULDatabase:
    """The database together with its UL-list store."""

    def __init__(self, db: QSeqDatabase):
        self.db = db
        self.store: ULStore = build_ul_store(db)
        self.total_utility = db.total_utility
        self._row_of = {int(sid): k for k, sid in enumerate(self.store.sids)}

    @property
    def items(self) -> list[int]:
        return self.db.items

    @property
    def uls(self) -> list[ULList]:
        return [self.store.ul(k) for k in range(len(self.store))]

    def ul(self, sid: int) -> ULList:
        return self.store.ul(self._row_of[sid])


class ProjectedDB:
    """Projection of ``prefix``.

    ``parent`` and ``parent_index`` link each row back to its row in the
    projection this one was extended from; the SEU bound needs them.
    """

    def __init__(
        self,
        prefix: Pattern,
        store: ULStore,
        rows: np.ndarray,
        ptr: np.ndarray,
        pos: np.ndarray,
        mpu: np.ndarray,
        removed: frozenset = frozenset(),
        parent: "ProjectedDB | None" = None,
        parent_index: np.ndarray | None = None,
        mask: np.ndarray | None = None,
    ):
        self.prefix = prefix
        self.store = store
        self.rows = rows
        self.ptr = ptr
        self.pos = pos
        self.mpu = mpu
        self.removed = removed
        self.parent = parent
        self.parent_index = parent_index
        self._mask = mask
        self._utility: int | None = None
        self._peus: dict[bool, np.ndarray] = {}
        self._seus: dict[bool, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def __bool__(self) -> bool:
        return len(self.rows) > 0

    @property
    def entries(self) -> int:
        return len(self.pos)

    @property
    def sids(self) -> list[int]:
        return [int(s) for s in self.store.sids[self.rows]]

    def mask(self, raw: bool = False) -> np.ndarray:
        if raw or not self.removed:
            return _zero_mask(self.store)
        if self._mask is None:
            m = np.zeros(self.store.max_item + 1, dtype=np.bool_)
            m[[i for i in self.removed if i <= self.store.max_item]] = True
            self._mask = m
        return self._mask

    def views(self) -> list[ProjectedSeq]:
        out = []
        for j, k in enumerate(self.rows):
            ul = self.store.ul(int(k))
            lo, hi = self.ptr[j], self.ptr[j + 1]
            out.append(
                ProjectedSeq(ul, [int(g) - ul.base + 1 for g in self.pos[lo:hi]], [int(u) for u in self.mpu[lo:hi]])
            )
        return out

    def seq(self, sid: int) -> ProjectedSeq:
        for ps in self.views():
            if ps.sid == sid:
                return ps
        raise KeyError(sid)

    def utility_per_seq(self) -> np.ndarray:
        return _k_row_max(self.ptr, self.mpu)

    def peu_per_seq(self, raw: bool = False) -> np.ndarray:
        raw = raw or not self.removed
        cached = self._peus.get(raw)
        if cached is None:
            st = self.store
            cached = _k_peu(self.rows, self.ptr, self.pos, self.mpu, st.off, st.items, st.utils, st.rest, self.mask(raw))
            self._peus[raw] = cached
        return cached

    def seu_plain_per_seq(self, raw: bool = False) -> np.ndarray:
        st = self.store
        return _k_seu_plain(
            self.rows, self.ptr, self.pos, self.mpu, st.off, st.items, st.utils, st.rest, self.mask(raw)
        )

    def seu_per_seq(self, raw: bool = False) -> np.ndarray:
        """Per-transaction SEU, tightened to stay anti-monotone.

        The plain value (best match plus the rest after the first match) can
        count items of the best match twice, so it may exceed both u(s) and
        the value of the parent prefix.  Each entry is therefore the minimum
        of u(s) and the plain value over every prefix of the pattern.
        """
        cached = self._seus.get(raw)
        if cached is None:
            plain = self.seu_plain_per_seq(raw)
            if self.parent is None:
                caps = self.store.seq_total[self.rows]
            else:
                caps = self.parent.seu_per_seq(raw)[self.parent_index]
            cached = np.minimum(plain, caps)
            self._seus[raw] = cached
        return cached


_ZERO_MASKS: dict[int, np.ndarray] = {}


def _zero_mask(store: ULStore) -> np.ndarray:
    m = _ZERO_MASKS.get(id(store))
    if m is None or len(m) != store.max_item + 1:
        m = np.zeros(store.max_item + 1, dtype=np.bool_)
        _ZERO_MASKS[id(store)] = m
    return m


# --- projection -------------------------------------------------------------


def _occ(store: ULStore, item: int) -> np.ndarray:
    if item < 0 or item > store.max_item:
        return _EMPTY
    return store.occ[store.occ_ptr[item] : store.occ_ptr[item + 1]]


def project_item(uldb: ULDatabase | ULStore, item: int) -> ProjectedDB:
    """Projection of the 1-sequence ``<item>``: one point per occurrence."""
    store = uldb.store if isinstance(uldb, ULDatabase) else uldb
    pos = _occ(store, item)
    seq = store.seq_of[pos]
    rows, starts = np.unique(seq, return_index=True)
    ptr = np.append(starts, len(pos)).astype(np.int64)
    return ProjectedDB(Pattern(((item,),)), store, rows, ptr, pos, store.utils[pos])


def extend_i(pd: ProjectedDB, item: int) -> ProjectedDB:
    """Append ``item`` to the prefix's last itemset."""
    st = pd.store
    rows, ptr, pos, mpu, pidx = _k_extend_i(pd.rows, pd.ptr, pd.pos, pd.mpu, st.items, st.utils, st.iset_end, item)
    return ProjectedDB(pd.prefix.i_extend(item), st, rows, ptr, pos, mpu, pd.removed, pd, pidx, pd._mask)


def extend_s(pd: ProjectedDB, item: int) -> ProjectedDB:
    """Append ``item`` as a new trailing itemset of the prefix."""
    st = pd.store
    rows, ptr, pos, mpu, pidx = _k_extend_s(
        pd.rows, pd.ptr, pd.pos, pd.mpu, st.utils, st.iset, st.iset_end, st.off, _occ(st, item)
    )
    return ProjectedDB(pd.prefix.s_extend(item), st, rows, ptr, pos, mpu, pd.removed, pd, pidx, pd._mask)


def project_pattern(uldb: ULDatabase, pattern: Pattern) -> ProjectedDB:
    """Build PD(pattern) by the same chain of extensions the miner uses."""
    first, *rest_first = pattern.itemsets[0]
    pd = project_item(uldb, first)
    for item in rest_first:
        pd = extend_i(pd, item)
    for itemset in pattern.itemsets[1:]:
        pd = extend_s(pd, itemset[0])
        for item in itemset[1:]:
            pd = extend_i(pd, item)
    return pd


# --- utility and bounds ------------------------------------------------------


def utility_of(pd: ProjectedDB) -> int:
    if pd._utility is None:
        pd._utility = int(pd.utility_per_seq().sum())
    return pd._utility


def swu_of(pd: ProjectedDB) -> int:
    """Sum of whole-transaction utilities over transactions containing the prefix."""
    return int(pd.store.seq_total[pd.rows].sum())


def seu_plain(pd: ProjectedDB, raw: bool = False) -> int:
    """Best match utility plus the rest after the first match, summed, untightened."""
    return int(pd.seu_plain_per_seq(raw).sum())


def seu_of(pd: ProjectedDB, raw: bool = False) -> int:
    """Sequence extension utility (see ``ProjectedDB.seu_per_seq``).

    With ``raw`` the items removed by irrelevant-item pruning are counted.
    """
    return int(pd.seu_per_seq(raw).sum())


def peu_seq(pd: ProjectedDB, sid: int, raw: bool = False) -> int:
    j = pd.sids.index(sid)
    return int(pd.peu_per_seq(raw)[j])


def peu_of(pd: ProjectedDB, raw: bool = False) -> int:
    return int(pd.peu_per_seq(raw).sum())


def bounds_of(pd: ProjectedDB, raw: bool = False) -> dict[str, int]:
    return {
        "utility": utility_of(pd),
        "swu": swu_of(pd),
        "seu": seu_of(pd, raw),
        "peu": peu_of(pd, raw),
    }


# --- candidate scan and irrelevant item pruning -----------------------------


class CandidateSet:
    """Look-ahead sums per item, dense over item-ids; zero means not a candidate."""

    def __init__(self, isum: np.ndarray, ssum: np.ndarray, comb: np.ndarray):
        self.isum = isum
        self.ssum = ssum
        self.comb = comb

    @staticmethod
    def _as_dict(arr: np.ndarray) -> dict[int, int]:
        idx = np.flatnonzero(arr)
        return {int(i): int(arr[i]) for i in idx}

    @property
    def i_candidates(self) -> dict[int, int]:
        return self._as_dict(self.isum)

    @property
    def s_candidates(self) -> dict[int, int]:
        return self._as_dict(self.ssum)

    @property
    def combined(self) -> dict[int, int]:
        """Item -> summed PEU over transactions where it is an I- or S-candidate."""
        return self._as_dict(self.comb)

    @property
    def rest_items(self) -> set[int]:
        return set(int(i) for i in np.flatnonzero(self.comb))


def scan_candidates(pd: ProjectedDB) -> CandidateSet:
    """Candidate items for I- and S-concatenation with their look-ahead sums."""
    st = pd.store
    return CandidateSet(
        *_k_scan(pd.rows, pd.ptr, pd.pos, st.off, st.items, st.iset_end, pd.mask(), pd.peu_per_seq(), st.max_item + 1)
    )


def apply_ips(
    pd: ProjectedDB, min_util: int, candidates: CandidateSet | None = None
) -> tuple[ProjectedDB, frozenset]:
    """Drop rest items whose combined look-ahead sum is below ``min_util``.

    Returns the projected database to use for the subtree and the newly
    removed items.  One pass only; the caller rescans afterwards.
    """
    if candidates is None:
        candidates = scan_candidates(pd)
    comb = candidates.comb
    hit = np.flatnonzero((comb > 0) & (comb < min_util))
    if len(hit) == 0:
        return pd, frozenset()
    irrelevant = frozenset(int(i) for i in hit)
    mask = pd.mask().copy()
    mask[hit] = True
    pruned = ProjectedDB(
        pd.prefix, pd.store, pd.rows, pd.ptr, pd.pos, pd.mpu,
        pd.removed | irrelevant, pd.parent, pd.parent_index, mask,
    )
    pruned._utility = pd._utility
    return pruned, irrelevant
