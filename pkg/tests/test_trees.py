import random

import pytest
from hypothesis import given, strategies as st

from cloning_systems.trees import (
    Tree,
    agree_away_from,
    caret,
    collapse_at,
    common_expansion,
    dominates,
    expand_at,
    graft,
    leaf,
    leaf_index,
    leaf_word,
    leaf_words,
    parse_tree,
    random_tree,
    removable_carets,
    right_spine,
    tree_text,
    tree_union,
    trees_with_carets,
    vertices,
)


def test_leaf_and_caret_counts():
    assert leaf(2).leaf_count == 1
    assert caret(2).leaf_count == 2
    assert caret(3).leaf_count == 3
    assert expand_at(leaf(5), 1) == caret(5)


def test_expand_at_single_caret():
    assert expand_at(leaf(2), 1) == caret(2)
    assert expand_at(leaf(3), 1) == caret(3)


def test_expand_leaf_count_growth():
    t = expand_at(caret(3), 2)
    assert t.leaf_count == 5


def test_expansion_commutation_binary_caret():
    # (T_2)_1 == (T_1)_3 for the binary caret: l=2, k=1, shift l+d-1=3
    t = caret(2)
    assert expand_at(expand_at(t, 2), 1) == expand_at(expand_at(t, 1), 3)


@given(st.integers(2, 4), st.lists(st.integers(0, 10**6), min_size=0, max_size=6), st.data())
def test_expansion_commutation_random(d, seeds, data):
    t = leaf(d)
    for s in seeds:
        t = expand_at(t, s % t.leaf_count + 1)
    n = t.leaf_count
    if n < 2:
        return
    k = data.draw(st.integers(1, n - 1))
    l = data.draw(st.integers(k + 1, n))
    assert expand_at(expand_at(t, l), k) == expand_at(expand_at(t, k), l + d - 1)


def test_expand_out_of_range():
    with pytest.raises(IndexError):
        expand_at(caret(2), 3)
    with pytest.raises(IndexError):
        expand_at(caret(2), 0)


def test_removable_carets_examples():
    assert removable_carets(leaf(2)) == set()
    assert removable_carets(caret(2)) == {1}
    assert removable_carets(caret(4)) == {1}
    # 3-leaf left comb: only the node over leaves 1,2 is a caret
    left_comb = expand_at(caret(2), 1)
    assert removable_carets(left_comb) == {1}


def test_collapse_inverts_expand():
    rng = random.Random(0)
    for _ in range(200):
        d = rng.choice((2, 3))
        t = random_tree(d, rng.randint(0, 4), rng)
        k = rng.randint(1, t.leaf_count)
        assert collapse_at(expand_at(t, k), k) == t


def test_collapse_requires_caret():
    with pytest.raises(ValueError):
        collapse_at(expand_at(caret(2), 1), 2)


def test_leaf_word_index_bijection():
    rng = random.Random(1)
    for _ in range(100):
        d = rng.choice((2, 3, 4))
        t = random_tree(d, rng.randint(0, 5), rng)
        words = leaf_words(t)
        assert len(words) == t.leaf_count
        assert sorted(words) == list(words)  # leaf order is lexicographic
        for k in range(1, t.leaf_count + 1):
            w = leaf_word(t, k)
            assert w == words[k - 1]
            assert leaf_index(t, w) == k


def test_common_expansion_trivial_and_leaf():
    t = random_tree(2, 3, random.Random(2))
    w, pt, pu = common_expansion(t, t)
    assert w == t and pt == [] and pu == []
    w, pt, pu = common_expansion(leaf(2), t)
    assert w == t and pu == []
    cur = leaf(2)
    for k in pt:
        cur = expand_at(cur, k)
    assert cur == t


def test_common_expansion_one_caret_each_side():
    t1 = expand_at(caret(2), 1)
    t2 = expand_at(caret(2), 2)
    w, p1, p2 = common_expansion(t1, t2)
    balanced = expand_at(expand_at(caret(2), 1), 3)
    assert w == balanced
    assert p1 == [3] and p2 == [1]


def test_common_expansion_replay_and_minimality():
    rng = random.Random(3)
    for _ in range(100):
        d = rng.choice((2, 3))
        t = random_tree(d, rng.randint(0, 4), rng)
        u = random_tree(d, rng.randint(0, 4), rng)
        w, pt, pu = common_expansion(t, u)
        cur = t
        for k in pt:
            cur = expand_at(cur, k)
        assert cur == w
        cur = u
        for k in pu:
            cur = expand_at(cur, k)
        assert cur == w
        # minimality: removing any caret of w breaks domination of t or u
        for k in removable_carets(w):
            smaller = collapse_at(w, k)
            assert not (dominates(smaller, t) and dominates(smaller, u))


def test_agree_away_from_identical_trees_first_leaf():
    t = random_tree(2, 3, random.Random(4))
    found = agree_away_from(t, t)
    assert found is not None
    v, r = found
    assert v == leaf_words(t)[0]


def _brute_force_agree(t, u, max_carets=3):
    # independent search: every prefix tree R, proper leaf v, and graft pair
    d = t.d
    pool = [s for c in range(max_carets + 1) for s in trees_with_carets(d, c)]
    for c in range(max_carets + 1):
        for r in trees_with_carets(d, c):
            for v in leaf_words(r):
                if not v:
                    continue
                for a in pool:
                    if graft(r, v, a) != t:
                        continue
                    for b in pool:
                        if graft(r, v, b) == u:
                            return v
    return None


def test_agree_away_from_disjoint_grafts_has_no_witness():
    t1 = expand_at(caret(2), 1)
    t2 = expand_at(caret(2), 2)
    assert _brute_force_agree(t1, t2) is None
    assert agree_away_from(t1, t2) is None


def test_agree_away_from_matches_brute_force():
    rng = random.Random(5)
    for _ in range(40):
        t = random_tree(2, rng.randint(1, 3), rng)
        u = random_tree(2, rng.randint(1, 3), rng)
        if t.leaf_count != u.leaf_count:
            continue
        ours = agree_away_from(t, u)
        brute = _brute_force_agree(t, u)
        assert (ours is None) == (brute is None)
        if ours is not None:
            v, r = ours
            assert graft(r, v, subtree(t, v)) == t
            assert graft(r, v, subtree(u, v)) == u


def subtree(t, word):
    node = t
    for step in word:
        node = node.children[step - 1]
    return node


def test_grafted_pair_has_witness():
    r = random_tree(2, 2, random.Random(6))
    v = leaf_words(r)[-1]
    t = graft(r, v, expand_at(caret(2), 1))
    u = graft(r, v, expand_at(caret(2), 2))
    found = agree_away_from(t, u)
    assert found is not None


def test_union_is_commutative_and_dominates():
    rng = random.Random(7)
    for _ in range(50):
        t = random_tree(3, rng.randint(0, 3), rng)
        u = random_tree(3, rng.randint(0, 3), rng)
        w = tree_union(t, u)
        assert w == tree_union(u, t)
        assert dominates(w, t) and dominates(w, u)


def test_text_roundtrip():
    rng = random.Random(8)
    for _ in range(100):
        d = rng.choice((2, 3))
        t = random_tree(d, rng.randint(0, 5), rng)
        assert parse_tree(tree_text(t), d) == t
    assert tree_text(leaf(2)) == "."
    assert tree_text(caret(2)) == "(..)"
    assert tree_text(expand_at(caret(2), 1)) == "((..).)"


def test_parse_rejects_garbage():
    for bad in ["", "(", "(.)", "(...))", "(..)x"]:
        with pytest.raises(ValueError):
            parse_tree(bad, 2)


def test_arity_checks():
    with pytest.raises(ValueError):
        Tree(1)
    with pytest.raises(ValueError):
        Tree(2, (leaf(2), leaf(3)))
    with pytest.raises(ValueError):
        tree_union(caret(2), caret(3))


def test_right_spine_shape():
    s = right_spine(2, 3)
    assert s.leaf_count == 4
    assert tree_text(s) == "(.(.(..)))"
    assert right_spine(3, 2).leaf_count == 5


def test_trees_with_carets_counts():
    # Catalan for d=2, Fuss-Catalan for d=3
    assert [len(trees_with_carets(2, c)) for c in range(6)] == [1, 1, 2, 5, 14, 42]
    assert [len(trees_with_carets(3, c)) for c in range(4)] == [1, 1, 3, 12]


def test_vertices_contains_root_and_leaves():
    t = expand_at(caret(2), 2)
    vs = vertices(t)
    assert () in vs
    for w in leaf_words(t):
        assert w in vs
