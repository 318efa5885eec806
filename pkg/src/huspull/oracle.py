"""Brute-force reference miner.

Enumerates every pattern contained in at least one transaction (I- and
S-concatenation with no bound tests) and scores each one by explicit match
enumeration.  Nothing here touches UL-lists or projected databases.
"""

from __future__ import annotations

from .model import (
    HUSPResult,
    Pattern,
    QSeqDatabase,
    QSequence,
    min_util_from_ratio,
    naive_pattern_utility,
    sort_results,
)

DEFAULT_NODE_CAP = 10_000_000


class BudgetExceeded(RuntimeError):
    """The enumeration would visit more nodes than allowed."""


def contains(s: QSequence, t: Pattern) -> bool:
    """Greedy earliest-itemset embedding test."""
    k = 0
    n = len(s.itemsets)
    for w in t.itemsets:
        while k < n and not set(w) <= {qi.item for qi in s.itemsets[k]}:
            k += 1
        if k == n:
            return False
        k += 1
    return True


def enumerate_patterns(db: QSeqDatabase, max_len: int, node_cap: int = DEFAULT_NODE_CAP) -> set[Pattern]:
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    items = sorted({qi.item for s in db for itemset in s.itemsets for qi in itemset})
    found: set[Pattern] = set()
    visited = 0
    stack: list[tuple[Pattern, list[QSequence]]] = []
    for i in reversed(items):
        stack.append((Pattern(((i,),)), list(db)))
    while stack:
        t, pool = stack.pop()
        visited += 1
        if visited > node_cap:
            raise BudgetExceeded(f"more than {node_cap} enumeration nodes")
        support = [s for s in pool if contains(s, t)]
        if not support:
            continue
        found.add(t)
        if t.length >= max_len:
            continue
        children = [t.i_extend(i) for i in items if i > t.last_item]
        children += [t.s_extend(i) for i in items]
        for child in reversed(children):
            stack.append((child, support))
    return found


def oracle_mine(
    db: QSeqDatabase,
    delta=None,
    *,
    min_util: int | None = None,
    max_len: int | None = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> list[HUSPResult]:
    """Exact HUSP set by exhaustive enumeration, sorted like ``mine``."""
    if (delta is None) == (min_util is None):
        raise ValueError("give exactly one of delta and min_util")
    if min_util is None:
        min_util = min_util_from_ratio(delta, db.total_utility)
    if max_len is None:
        max_len = max((s.flat_length for s in db), default=0)
    if max_len < 1:
        return []
    out = []
    for t in enumerate_patterns(db, max_len, node_cap):
        u = naive_pattern_utility(t, db)
        if u >= min_util:
            out.append(HUSPResult(t, u))
    return sort_results(out)
