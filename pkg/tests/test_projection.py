import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import A, B, C, D, E, F, dollars, random_db
from huspull.model import Pattern, ProfitTable, QItem, QSeqDatabase, QSequence, SCALE, find_matches, flat_utilities, naive_pattern_utility
from huspull.oracle import contains
from huspull.projection import (
    ULDatabase,
    apply_ips,
    bounds_of,
    extend_i,
    extend_s,
    peu_of,
    peu_seq,
    project_item,
    project_pattern,
    scan_candidates,
    seu_of,
    seu_plain,
    swu_of,
    utility_of,
)


@pytest.fixture(scope="module")
def uldb(example_db):
    return ULDatabase(example_db)


def only(db, sid):
    return QSeqDatabase((db.by_sid(sid),), db.profits)


# --- brute-force references built on match enumeration --------------------


def brute_points(t, s):
    """End position -> best utility of a match ending there."""
    flat = flat_utilities(s)
    out = {}
    for m in find_matches(t, s):
        u = sum(flat[p - 1] for p in m)
        out[m[-1]] = max(out.get(m[-1], 0), u)
    return out


def brute_rest(s, p):
    return sum(flat_utilities(s)[p:])


def brute_peu(t, s):
    flat = flat_utilities(s)
    return max(
        (sum(flat[p - 1] for p in m) + brute_rest(s, m[-1]) for m in find_matches(t, s)), default=0
    )


def brute_seu_plain(t, s):
    pts = brute_points(t, s)
    return max(pts.values()) + brute_rest(s, min(pts)) if pts else 0


def ls_prefixes(t):
    """``t`` and every ancestor in the sequence tree, root first."""
    items = [(k, i) for k, w in enumerate(t.itemsets) for i in w]
    out = []
    for n in range(1, len(items) + 1):
        sets = []
        for k, i in items[:n]:
            if k == len(sets):
                sets.append([])
            sets[-1].append(i)
        out.append(Pattern.of(*sets))
    return out


def brute_seu(t, s):
    return min([s.total_utility] + [brute_seu_plain(p, s) for p in ls_prefixes(t)]) if find_matches(t, s) else 0


def random_pattern(rng, db, max_len=4):
    items = sorted(db.profits.entries)
    sets = []
    for _ in range(rng.randint(1, max_len)):
        if sets and rng.random() < 0.4 and sets[-1][-1] < items[-1]:
            sets[-1].append(rng.choice([i for i in items if i > sets[-1][-1]]))
        else:
            sets.append([rng.choice(items)])
    return Pattern.of(*sets)


# --- running example ------------------------------------------------------


class TestRunningExample:
    def test_project_a(self, uldb):
        pd = project_item(uldb, A)
        assert len(pd) == 6
        assert pd.seq(1).points == [(1, dollars(10)), (3, dollars(15)), (6, dollars(20))]
        assert utility_of(pd) == dollars(130)
        assert swu_of(pd) == dollars(441)

    def test_project_f(self, uldb):
        pd = project_item(uldb, F)
        assert pd.sids == [6]
        assert swu_of(pd) == dollars(81)

    def test_project_absent(self, uldb):
        pd = project_item(uldb, 42)
        assert not pd
        assert utility_of(pd) == swu_of(pd) == peu_of(pd) == seu_of(pd) == 0

    def test_swu_b(self, uldb):
        assert swu_of(project_item(uldb, B)) == dollars(441)

    def test_extend_i(self, uldb):
        pd = extend_i(project_item(uldb, A), C)
        assert pd.seq(1).points == [(2, dollars(22)), (5, dollars(23))]
        ab_d = extend_i(project_pattern(uldb, Pattern.of([A], [B])), D)
        assert ab_d.seq(1).points == [(8, dollars(38))]

    def test_extend_i_never_colocated(self, uldb):
        assert not extend_i(project_item(uldb, E), F)

    def test_extend_s(self, uldb):
        pd = extend_s(project_item(uldb, A), B)
        assert pd.seq(1).points == [(4, dollars(13)), (7, dollars(30))]
        assert utility_of(pd) == dollars(160)

    def test_extend_s_without_later_itemset(self):
        prof = ProfitTable({1: SCALE, 2: SCALE})
        db = QSeqDatabase((QSequence.build(1, [[QItem(1, 1), QItem(2, 1)]], prof),), prof)
        assert not extend_s(project_item(ULDatabase(db), 1), 2)

    def test_bounds_ab(self, uldb):
        pd = project_pattern(uldb, Pattern.of([A], [B]))
        assert bounds_of(pd) == {
            "utility": dollars(160),
            "swu": dollars(360),
            "seu": dollars(279),
            "peu": dollars(252),
        }
        assert peu_seq(pd, 2) == dollars(46)
        assert [int(v) for v in pd.peu_per_seq()] == [dollars(x) for x in (67, 46, 37, 48, 54)]
        assert int(pd.seu_per_seq()[0]) == dollars(30 + 54)

    def test_seu_equals_u_at_last_position(self, uldb):
        # <e> in S1 only matches the final element
        pd = project_pattern(ULDatabase(only(uldb.db, 1)), Pattern.of([E]))
        assert seu_of(pd) == peu_of(pd) == utility_of(pd) == dollars(3)

    def test_scan_candidates_s1(self, example_db):
        pd = project_pattern(ULDatabase(only(example_db, 1)), Pattern.of([A], [B]))
        cs = scan_candidates(pd)
        assert cs.i_candidates == {C: dollars(67), D: dollars(67)}
        assert cs.s_candidates == {i: dollars(67) for i in (A, B, D, E)}
        assert cs.rest_items == {A, B, C, D, E}

    def test_scan_candidates_full(self, uldb):
        cs = scan_candidates(project_pattern(uldb, Pattern.of([A], [B])))
        assert set(cs.i_candidates) <= {C, D, E}
        assert set(cs.s_candidates) <= {A, B, C, D, E}

    def test_scan_candidates_last_item(self, example_db):
        pd = project_pattern(ULDatabase(only(example_db, 1)), Pattern.of([E]))
        cs = scan_candidates(pd)
        assert not cs.i_candidates and not cs.s_candidates

    def test_ips_on_f(self, uldb):
        pd = project_item(uldb, F)
        assert peu_of(pd) == dollars(81)
        assert scan_candidates(pd).combined == {A: dollars(81), B: dollars(81), D: dollars(81)}
        same, removed = apply_ips(pd, dollars(60))
        assert removed == frozenset() and same is pd
        pruned, removed = apply_ips(pd, dollars(100))
        assert removed == {A, B, D}
        assert peu_of(pruned) == dollars(24)
        assert peu_of(pruned, raw=True) == dollars(81)
        assert utility_of(pruned) == dollars(24)

    def test_ips_zero_threshold(self, uldb):
        pd = project_item(uldb, A)
        same, removed = apply_ips(pd, 0)
        assert same is pd and not removed


def test_seu_tightening_counterexample():
    # untightened SEU grows from <a> to <[a],[a]> here
    prof = ProfitTable({1: 2 * SCALE})
    s = QSequence.build(1, [[QItem(1, 5)], [QItem(1, 3)], [QItem(1, 4)]], prof)
    uldb = ULDatabase(QSeqDatabase((s,), prof))
    a = project_item(uldb, 1)
    aa = extend_s(a, 1)
    assert seu_plain(a) == dollars(24)
    assert seu_plain(aa) == dollars(26) > s.total_utility
    assert seu_of(aa) == dollars(24) <= seu_of(a)
    assert utility_of(aa) <= peu_of(aa) <= seu_of(aa) <= swu_of(aa)


# --- randomized equivalence against the brute-force references -------------


@given(st.integers(0, 100_000))
@settings(max_examples=150, deadline=None)
def test_projection_matches_brute_force(seed):
    rng = random.Random(seed)
    db = random_db(seed, max_seqs=8)
    uldb = ULDatabase(db)
    t = random_pattern(rng, db)
    pd = project_pattern(uldb, t)
    assert utility_of(pd) == naive_pattern_utility(t, db)
    containing = [s for s in db if find_matches(t, s)]
    assert pd.sids == [s.sid for s in containing]
    for s in containing:
        ps = pd.seq(s.sid)
        assert dict(ps.points) == brute_points(t, s)
        assert peu_seq(pd, s.sid) == brute_peu(t, s)
    assert swu_of(pd) == sum(s.total_utility for s in containing)
    assert seu_plain(pd) == sum(brute_seu_plain(t, s) for s in containing)
    assert seu_of(pd) == sum(brute_seu(t, s) for s in containing)
    b = bounds_of(pd)
    assert b["utility"] <= b["peu"] <= b["seu"] <= b["swu"]


@given(st.integers(0, 100_000))
@settings(max_examples=100, deadline=None)
def test_candidates_match_brute_force(seed):
    rng = random.Random(seed)
    db = random_db(seed, max_seqs=8)
    t = random_pattern(rng, db, max_len=3)
    pd = project_pattern(ULDatabase(db), t)
    cs = scan_candidates(pd)
    items = sorted(db.profits.entries)
    isum, ssum, comb = {}, {}, {}
    for s in db:
        if not find_matches(t, s):
            continue
        v = brute_peu(t, s)
        ii = {i for i in items if i > t.last_item and contains(s, t.i_extend(i))}
        ss = {i for i in items if contains(s, t.s_extend(i))}
        for i in ii:
            isum[i] = isum.get(i, 0) + v
        for i in ss:
            ssum[i] = ssum.get(i, 0) + v
        for i in ii | ss:
            comb[i] = comb.get(i, 0) + v
    assert cs.i_candidates == isum
    assert cs.s_candidates == ssum
    assert cs.combined == comb


@given(st.integers(0, 100_000))
@settings(max_examples=100, deadline=None)
def test_ips_discounts_removed_items(seed):
    rng = random.Random(seed)
    db = random_db(seed, max_seqs=8)
    t = random_pattern(rng, db, max_len=2)
    pd = project_pattern(ULDatabase(db), t)
    if not pd:
        return
    threshold = rng.randint(0, peu_of(pd) + 1)
    pruned, removed = apply_ips(pd, threshold)
    prof = db.profits
    for ps in pruned.views():
        s = db.by_sid(ps.sid)
        flat = flat_utilities(s)
        flat_items = [qi.item for w in s.itemsets for qi in w]
        kept_rest = [
            sum(u for u, i in zip(flat[p:], flat_items[p:]) if i not in pruned.removed) for p in ps.positions
        ]
        expected = max(u + r for u, r in zip(ps.utilities, kept_rest))
        assert peu_seq(pruned, ps.sid) == expected
    assert peu_of(pruned) <= peu_of(pd)
    assert all(i in prof for i in removed)
    # a second pass on the pruned projection keeps removed items out of the candidates
    assert not (scan_candidates(pruned).rest_items & pruned.removed)
