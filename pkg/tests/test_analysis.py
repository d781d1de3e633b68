import json
import random

import pytest

from cloning_systems.analysis import (
    EVIDENCE_EXHAUSTIVE,
    ExperimentReport,
    conjugate_count,
    coset_orbit_count,
    enumerate_fd_ball,
    enumerate_system_ball,
    fpf_suite,
    mixing_witness,
    normalizes_up_to,
    sample_nontrivial_elements,
)
from cloning_systems.cloning import make_system
from cloning_systems.groups import base_group_by_name, cycle_perm, mono_for
from cloning_systems.thompson import Element, fd_generator, random_element
from cloning_systems.trees import caret, expand_at, leaf, parse_tree

V = make_system("V")
PROD = make_system("prod:Z3:id,id")
PSI = make_system("psi:Z3:id,id")


def test_ball_radius_one_is_identity_only():
    for system in (V, make_system("V:3")):
        ball = enumerate_fd_ball(system, 1)
        assert len(ball.elements) == 1
        assert ball.elements[0].is_identity()


def test_ball_radius_two_contains_first_generator():
    ball = enumerate_fd_ball(V, 2)
    x0 = fd_generator(V, 0)
    assert len(ball.elements) == 3
    assert x0 in ball.elements and x0.inv() in ball.elements


def test_ball_contains_identity_and_is_inverse_closed():
    for L in (2, 3):
        ball = enumerate_fd_ball(V, L)
        elems = set(ball.elements)
        assert Element.identity(V) in elems
        assert all(x.inv() in elems for x in elems)


def test_ball_elements_are_reduced_and_distinct():
    ball = enumerate_fd_ball(V, 3)
    assert len(set(ball.elements)) == len(ball.elements)
    rng = random.Random(0)
    from cloning_systems.thompson import reduce_triple

    for x in ball.elements:
        r = reduce_triple(x.triple(), rng=rng)
        assert (r.T, r.g, r.U) == (x.T, x.g, x.U)


def test_ball_sizes_before_reduction_follow_shape_counts():
    # pairs with equal caret counts, before dropping reducible ones
    from cloning_systems.trees import removable_carets, trees_with_carets

    for L in (2, 3):
        total = 0
        reduced = 0
        for c in range(L + 1):
            shapes = trees_with_carets(2, c)
            total += len(shapes) ** 2
            reduced += sum(
                1
                for T in shapes
                for U in shapes
                if not (removable_carets(T) & removable_carets(U))
            )
        assert total == sum(len(trees_with_carets(2, c)) ** 2 for c in range(L + 1))
        assert len(enumerate_fd_ball(V, L).elements) == reduced


def test_ball_truncation_guard():
    ball = enumerate_fd_ball(V, 4, max_elements=10)
    assert ball.truncated and len(ball.elements) == 10
    ball2 = enumerate_fd_ball(V, 6, max_leaves=4)
    assert ball2.truncated


def test_conjugate_count_identity():
    for L in (1, 2, 3):
        assert conjugate_count(Element.identity(V), enumerate_fd_ball(V, L)) == 1


def test_conjugate_count_fixed_element_in_identity_products():
    x = Element(PROD, leaf(2), (1,), leaf(2))
    for L in (1, 2, 3, 4):
        assert conjugate_count(x, enumerate_fd_ball(PROD, L)) == 1


def test_conjugate_count_grows_for_the_swap():
    x = Element(V, caret(2), cycle_perm(2, (1, 2)), caret(2))
    counts = [conjugate_count(x, enumerate_fd_ball(V, L)) for L in (1, 2, 3, 4)]
    assert counts == sorted(counts)
    assert all(a < b for a, b in zip(counts, counts[1:]))
    assert counts[0] == 1


def test_conjugate_count_monotone_in_radius():
    rng = random.Random(1)
    balls = [enumerate_fd_ball(V, L) for L in (1, 2, 3)]
    for _ in range(10):
        x = random_element(V, rng)
        counts = [conjugate_count(x, b) for b in balls]
        assert counts == sorted(counts)


def test_conjugate_count_one_iff_ball_centralizes():
    rng = random.Random(2)
    ball = enumerate_fd_ball(V, 3)
    for _ in range(15):
        x = random_element(V, rng)
        commutes_all = all(f * x == x * f for f in ball.elements)
        assert (conjugate_count(x, ball) == 1) == commutes_all


def test_normalizer_passes_on_fd_elements():
    rng = random.Random(3)
    for system in (V, PROD):
        ball = enumerate_fd_ball(system, 3)
        for i in range(3):
            x = fd_generator(system, i)
            ok, _ = normalizes_up_to(x, ball)
            assert ok


def test_normalizer_constant_tuples_pass():
    ball = enumerate_fd_ball(PROD, 3)
    for g in (1, 2):
        for tree in (caret(2), expand_at(caret(2), 2)):
            n = tree.leaf_count
            x = Element(PROD, tree, (g,) * n, tree)
            ok, _ = normalizes_up_to(x, ball)
            assert ok


def test_normalizer_nonconstant_tuple_fails_with_witness():
    ball = enumerate_fd_ball(PROD, 3)
    x = Element(PROD, caret(2), (1, 0), caret(2))
    ok, witness = normalizes_up_to(x, ball)
    assert not ok and witness is not None
    assert not (x.inv() * witness * x).in_fd() or not (x * witness * x.inv()).in_fd()


def test_normalizer_v_swap_fails():
    ball = enumerate_fd_ball(V, 3)
    x = Element(V, caret(2), cycle_perm(2, (1, 2)), caret(2))
    ok, witness = normalizes_up_to(x, ball)
    assert not ok and witness is not None
    ok1, _ = normalizes_up_to(x, ball, one_sided=True)
    assert not ok1


def test_coset_orbit_identity_class():
    for x in (fd_generator(V, 0), fd_generator(V, 1), Element.identity(V)):
        for L in (1, 2, 3):
            assert coset_orbit_count(x, enumerate_fd_ball(V, L)) == 1


def test_coset_orbit_fixed_element():
    x = Element(PROD, leaf(2), (2,), leaf(2))
    for L in (1, 2, 3):
        assert coset_orbit_count(x, enumerate_fd_ball(PROD, L)) == 1


def test_coset_orbit_grows_for_the_swap():
    x = Element(V, caret(2), cycle_perm(2, (1, 2)), caret(2))
    counts = [coset_orbit_count(x, enumerate_fd_ball(V, L)) for L in (1, 2, 3)]
    assert all(a < b for a, b in zip(counts, counts[1:]))
    assert counts[0] == 1


def test_coset_equality_is_equivalence_relation():
    rng = random.Random(5)
    x = Element(V, caret(2), cycle_perm(2, (1, 2)), caret(2))
    ball = enumerate_fd_ball(V, 2)
    translates = [f * x for f in ball.elements]

    def same_coset(a, b):
        return (a.inv() * b).in_fd()

    for a in translates:
        assert same_coset(a, a)
        for b in translates:
            assert same_coset(a, b) == same_coset(b, a)
            for c in translates[:3]:
                if same_coset(a, b) and same_coset(b, c):
                    assert same_coset(a, c)


def test_mixing_witness_commuting_pair():
    # caret base tree with the nontrivial entry in slot 2, grafts at leaf 1
    res = mixing_witness(
        PSI,
        caret(2),
        (1,),
        (0, 1),
        parse_tree("(.(..))", 2),
        parse_tree("((..).)", 2),
    )
    assert res["commutes"] and res["f_nontrivial"]
    assert not res["x"].in_fd()
    assert res["f"].in_fd()


def test_mixing_witness_in_identity_products():
    rng = random.Random(7)
    for _ in range(10):
        from cloning_systems.trees import leaf_words, random_tree

        R = random_tree(2, rng.randint(1, 3), rng)
        words = leaf_words(R)
        v = words[rng.randrange(len(words))]
        g = PROD.family.sample(R.leaf_count, rng)
        res = mixing_witness(
            PROD, R, v, g, parse_tree("(.(..))", 2), parse_tree("((..).)", 2)
        )
        assert res["commutes"]


def test_mixing_witness_trivial_middle():
    # with identity middle x lies in F_d and commutation is automatic
    res = mixing_witness(
        PSI, caret(2), (2,), (0, 0), parse_tree("(.(..))", 2), parse_tree("((..).)", 2)
    )
    assert res["x"].in_fd()
    assert res["commutes"]


def test_mixing_witness_permutation_middles():
    # commutation requires the middle to fix the grafted leaf's index
    from cloning_systems.groups import cycle_perm

    R = expand_at(caret(2), 2)
    grafts = (parse_tree("((..).)", 2), parse_tree("(.(..))", 2))
    good = mixing_witness(V, R, (1,), cycle_perm(3, (2, 3)), *grafts)
    assert good["commutes"] and good["middle_fixes_graft_leaf"]
    bad = mixing_witness(V, R, (1,), cycle_perm(3, (1, 2)), *grafts)
    assert not bad["commutes"] and not bad["middle_fixes_graft_leaf"]


def test_mixing_witness_nonuniform_system_with_quiet_slot():
    # a fresh-copy-twisting system still commutes when the grafted slot
    # holds the identity, so the expansions only ever clone trivial entries
    system = make_system("prod:F2:id,swap")
    res = mixing_witness(
        system,
        caret(2),
        (1,),
        ("", "ab"),
        parse_tree("(.(..))", 2),
        parse_tree("((..).)", 2),
    )
    assert res["commutes"] and res["f_nontrivial"]
    res2 = mixing_witness(
        system,
        caret(2),
        (1,),
        ("ab", ""),
        parse_tree("(.(..))", 2),
        parse_tree("((..).)", 2),
    )
    assert not res2["commutes"]  # the twisted clones hit the live entry


def test_mixing_witness_validates_grafts():
    with pytest.raises(ValueError):
        mixing_witness(PSI, caret(2), (1,), (0, 1), caret(2), caret(2))
    with pytest.raises(ValueError):
        mixing_witness(
            PSI, caret(2), (1,), (0, 1), caret(2), expand_at(caret(2), 1)
        )


def test_fpf_suite_cyclic():
    z3 = base_group_by_name("Z3")
    report = fpf_suite(z3, mono_for(z3, "inv"), n=3, m_max=5, seed=0)
    assert report.verdict == "pass"
    assert report.evidence == EVIDENCE_EXHAUSTIVE
    assert all(report.series["checks"].values())


def test_fpf_suite_free_group():
    f2 = base_group_by_name("F2")
    report = fpf_suite(f2, mono_for(f2, "swap"), n=3, m_max=5, seed=0)
    assert report.verdict == "pass"


def test_fpf_suite_two_torsion_premise_fails():
    z2 = base_group_by_name("Z2")
    report = fpf_suite(z2, mono_for(z2, "inv"), n=3, m_max=5, seed=0)
    assert report.verdict == "premise-failed"
    assert not report.series["checks"]["premise_fixed_point_free"]


def test_report_json_roundtrip():
    report = ExperimentReport(
        experiment="diversity",
        system="V",
        params={"n": 3},
        seed=7,
        series={"witness_found": False},
        witnesses=[],
        verdict="no-witness",
        evidence=EVIDENCE_EXHAUSTIVE,
        runtime_ms=12,
    )
    doc = json.loads(report.to_json())
    assert ExperimentReport.from_dict(doc).to_dict() == report.to_dict()
    stable = report.to_json(include_runtime=False)
    assert "runtime_ms" not in stable


def test_sampler_rejects_trivial_and_respects_filters():
    rng = random.Random(11)
    xs = sample_nontrivial_elements(V, 10, rng)
    assert len(set(xs)) == 10
    assert all(not x.is_identity() for x in xs)
    ys = sample_nontrivial_elements(V, 5, rng, require_non_fd=True)
    assert all(not y.in_fd() for y in ys)


def test_system_ball_enumerates_canonical_elements():
    ball = enumerate_system_ball(V, 1)
    assert len(ball) == len(set(ball))
    assert Element.identity(V) in ball
    swap = Element(V, caret(2), cycle_perm(2, (1, 2)), caret(2))
    assert swap in ball
