import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import A, B, C, D, E, dollars, random_db
from huspull.ullist import ULElement, build_ul_list, build_ul_store, rest_utility

S1_DUMP = (
    "UP Information: <[(a, 10, 84, 3) (c, 12, 72, 5)], [(a, 15, 57, 6) (b, 3, 54, 7) (c, 8, 46, -)], "
    "[(a, 20, 26, -) (b, 15, 11, -) (d, 8, 3, -)], [(e, 3, 0, -)]>\n"
    "Header Table: (a, 1) (b, 4) (c, 2) (d, 8) (e, 9)\n"
)


@pytest.fixture(scope="module")
def ul1(example_db):
    return build_ul_list(example_db.by_sid(1))


@pytest.fixture(scope="module")
def ul2(example_db):
    return build_ul_list(example_db.by_sid(2))


def test_s1_elements(ul1):
    assert ul1.element(1) == ULElement(A, dollars(10), dollars(84), 3)
    assert ul1.element(4) == ULElement(B, dollars(3), dollars(54), 7)
    assert ul1.element(9) == ULElement(E, dollars(3), 0, None)
    assert ul1.header == {A: 1, B: 4, C: 2, D: 8, E: 9}
    assert [ul1.itemset_of(p) for p in range(1, 10)] == [0, 0, 1, 1, 1, 2, 2, 2, 3]


def test_s1_render(ul1):
    assert ul1.render(letters=True) == S1_DUMP


def test_s2_header(ul2):
    assert ul2.header == {A: 1, B: 4, C: 7, D: 5, E: 2}
    assert [e.item for e in ul2.elements()] == [A, E, A, B, D, B, C, D, E]


def test_rest_utility(ul1, ul2):
    assert rest_utility(ul1, 4) == dollars(54)
    assert rest_utility(ul1, 9) == 0
    assert rest_utility(ul2, 6) == dollars(15)
    with pytest.raises(IndexError):
        rest_utility(ul1, 10)
    with pytest.raises(IndexError):
        ul1.element(0)


def test_store_views_match_single_builds(example_db):
    store = build_ul_store(example_db)
    for k, s in enumerate(example_db):
        assert store.ul(k).elements() == build_ul_list(s).elements()
        assert store.ul(k).sid == s.sid


@given(st.integers(0, 10_000))
@settings(max_examples=80, deadline=None)
def test_invariants(seed):
    db = random_db(seed)
    store = build_ul_store(db)
    for k, s in enumerate(db):
        ul = store.ul(k)
        els = ul.elements()
        utils = [e.utility for e in els]
        assert sum(utils) == s.total_utility == ul.total_utility
        for p, e in enumerate(els, 1):
            assert e.remaining_utility == sum(utils[p:])
        flat = [qi.item for w in s.itemsets for qi in w]
        for item, first in ul.header.items():
            assert ul.positions_of(item) == [p for p, i in enumerate(flat, 1) if i == item]
            assert first == flat.index(item) + 1
        assert set(ul.header) == set(flat)
