"""Utility-linked lists.

All transactions of a database share one flat ``ULStore``: parallel numpy
arrays indexed by a global offset ``g``, where transaction ``k`` occupies
``off[k] <= g < off[k + 1]``.  A ``ULList`` is the view of one transaction
with 1-based local positions, as in the usual table layout.

Per element the store keeps the item, its utility, the remaining utility
(everything strictly after it), and the global offset of the next
occurrence of the same item in the same transaction (-1 if none).  The
item index ``occ[occ_ptr[i]:occ_ptr[i + 1]]`` lists the offsets of item ``i``
in increasing order, which also serves as every transaction's header table.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .model import QSeqDatabase, QSequence, _letter, format_fixed


class ULElement(NamedTuple):
    item: int
    utility: int
    remaining_utility: int
    next_pos: int | None


class ULStore:
    def __init__(self, sequences: list[QSequence]):
        n_seq = len(sequences)
        lengths = np.fromiter((s.flat_length for s in sequences), dtype=np.int64, count=n_seq)
        off = np.zeros(n_seq + 1, dtype=np.int64)
        np.cumsum(lengths, out=off[1:])
        total = int(off[-1])
        items = np.empty(total, dtype=np.int64)
        utils = np.empty(total, dtype=np.int64)
        iset_sizes = []
        g = 0
        for s in sequences:
            for itemset, row in zip(s.itemsets, s.utilities):
                n = len(itemset)
                items[g : g + n] = [qi.item for qi in itemset]
                utils[g : g + n] = row
                iset_sizes.append(n)
                g += n
        iset_sizes = np.asarray(iset_sizes, dtype=np.int64)
        iset_last = np.cumsum(iset_sizes) - 1
        iset = np.repeat(np.arange(len(iset_sizes), dtype=np.int64), iset_sizes)
        seq_of = np.repeat(np.arange(n_seq, dtype=np.int64), lengths)

        csum = np.cumsum(utils)
        seq_total = csum[off[1:] - 1] - np.concatenate(([0], csum[off[1:-1] - 1])) if n_seq else csum[:0]
        if total:
            seq_end_csum = csum[off[1:] - 1]
            rest = seq_end_csum[seq_of] - csum
        else:
            rest = csum.copy()

        max_item = int(items.max()) if total else 0
        order = np.lexsort((np.arange(total), items))  # by item, then offset
        nxt = np.full(total, -1, dtype=np.int64)
        if total > 1:
            a, b = order[:-1], order[1:]
            same = (items[a] == items[b]) & (seq_of[a] == seq_of[b])
            nxt[a[same]] = b[same]
        occ_ptr = np.zeros(max_item + 2, dtype=np.int64)
        np.cumsum(np.bincount(items, minlength=max_item + 1), out=occ_ptr[1:])

        self.sids = np.fromiter((s.sid for s in sequences), dtype=np.int64, count=n_seq)
        self.off = off
        self.items = items
        self.utils = utils
        self.rest = rest
        self.iset = iset
        self.iset_end = iset_last[iset] if total else iset
        self.nxt = nxt
        self.seq_of = seq_of
        self.seq_total = seq_total
        self.occ = order.astype(np.int64)
        self.occ_ptr = occ_ptr
        self.max_item = max_item

    def __len__(self) -> int:
        return len(self.sids)

    def ul(self, k: int) -> "ULList":
        """View of the ``k``-th transaction (0-based index, not sid)."""
        return ULList(self, k)

    def seqs_with(self, item: int) -> np.ndarray:
        """Indices of transactions containing ``item``, ascending."""
        if item > self.max_item or item < 0:
            return np.empty(0, dtype=np.int64)
        g = self.occ[self.occ_ptr[item] : self.occ_ptr[item + 1]]
        return np.unique(self.seq_of[g])


class ULList:
    """One transaction's UL-list; positions are 1-based."""

    def __init__(self, store: ULStore, k: int):
        self.store = store
        self.index = k
        self.sid = int(store.sids[k])
        self.base = int(store.off[k])
        self.length = int(store.off[k + 1]) - self.base
        self.total_utility = int(store.seq_total[k])

    def __len__(self) -> int:
        return self.length

    def _g(self, p: int) -> int:
        if not 1 <= p <= self.length:
            raise IndexError(f"position {p} outside 1..{self.length}")
        return self.base + p - 1

    def element(self, p: int) -> ULElement:
        g = self._g(p)
        st = self.store
        nxt = int(st.nxt[g])
        return ULElement(
            int(st.items[g]), int(st.utils[g]), int(st.rest[g]), None if nxt < 0 else nxt - self.base + 1
        )

    def elements(self) -> list[ULElement]:
        return [self.element(p) for p in range(1, self.length + 1)]

    def itemset_of(self, p: int) -> int:
        """0-based itemset index of position ``p`` within this transaction."""
        st = self.store
        return int(st.iset[self._g(p)] - st.iset[self.base])

    @property
    def header(self) -> dict[int, int]:
        """Item -> first position, in increasing item order."""
        first: dict[int, int] = {}
        for p, e in enumerate(self.elements(), 1):
            first.setdefault(e.item, p)
        return dict(sorted(first.items()))

    def positions_of(self, item: int) -> list[int]:
        out = []
        p = self.header.get(item)
        while p is not None:
            out.append(p)
            p = self.element(p).next_pos
        return out

    def render(self, letters: bool = False) -> str:
        """Two-line dump in the layout of a UL-list table."""
        name = _letter if letters else str
        groups: list[list[str]] = []
        last_set = None
        for p, e in enumerate(self.elements(), 1):
            k = self.itemset_of(p)
            if k != last_set:
                groups.append([])
                last_set = k
            groups[-1].append(
                f"({name(e.item)}, {format_fixed(e.utility)}, {format_fixed(e.remaining_utility)}, "
                f"{'-' if e.next_pos is None else e.next_pos})"
            )
        up = "<" + ", ".join("[" + " ".join(g) + "]" for g in groups) + ">"
        header = " ".join(f"({name(i)}, {p})" for i, p in self.header.items())
        return f"UP Information: {up}\nHeader Table: {header}\n"


def build_ul_store(db: QSeqDatabase) -> ULStore:
    return ULStore(list(db.sequences))


def build_ul_list(s: QSequence) -> ULList:
    return ULStore([s]).ul(0)


def rest_utility(ul: ULList, p: int) -> int:
    """Utility of everything strictly after position ``p``."""
    return int(ul.store.rest[ul._g(p)])
