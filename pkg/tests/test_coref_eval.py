import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from legal_deid.coref_eval import (
    METRICS,
    MetricError,
    Partition,
    SimilarityKind,
    UndefinedMetricError,
    b_cubed,
    blanc,
    blanc_counts,
    ceaf,
    lea,
    muc,
    optimal_alignment,
    read_partition,
    score_all,
    similarity_matrix,
    write_partition,
)


def test_partition_rejects_shared_mentions():
    with pytest.raises(ValueError):
        Partition([["a", "b"], ["b"]])


def test_partition_rejects_empty_entity():
    with pytest.raises(ValueError):
        Partition([["a"], []])


def test_partition_file_round_trip(key_s):
    text = write_partition(key_s)
    assert read_partition(text) == key_s
    assert read_partition("# comment\na1 a2  # trailing\n\nb1\n") == Partition([["a1", "a2"], ["b1"]])


# MUC -----------------------------------------------------------------------


def test_muc_example(key_s, response_t):
    # recall: {a1 a2 a3} splits into 2 parts, {b1 b2 b3 b4} into 3 -> (1 + 1) / (2 + 3)
    # precision: (1 + 0 + 1) / (1 + 1 + 2)
    t = muc(key_s, response_t)
    assert (t.precision, t.recall) == pytest.approx((0.5, 0.4), abs=1e-12)
    assert t.f1 == pytest.approx(4 / 9, abs=1e-12)


def test_muc_identity(key_s):
    t = muc(key_s, key_s)
    assert (t.precision, t.recall, t.f1) == (1.0, 1.0, 1.0)


def test_muc_all_singleton_key_is_undefined():
    with pytest.raises(UndefinedMetricError):
        muc(Partition([["a"], ["b"]]), Partition([["a", "b"]]))


def test_muc_singleton_response_has_zero_precision():
    t = muc(Partition([["a", "b"]]), Partition([["a"], ["b"]]))
    assert (t.precision, t.recall) == (0.0, 0.0)


# B-cubed -----------------------------------------------------------------


def test_b_cubed_example(key_s, response_t):
    t = b_cubed(key_s, response_t)
    assert t.recall == pytest.approx((2 / 3 + 2 / 3 + 1 / 3 + 1 / 4 + 0 + 1 / 2 + 1 / 2) / 7, abs=1e-12)
    assert t.precision == pytest.approx((1 + 1 + 1 / 2 + 1 / 2 + 2 / 3 + 2 / 3 + 0) / 7, abs=1e-12)
    assert t.rounded() == (0.62, 0.42, 0.5)


def test_b_cubed_identity(key_s):
    assert b_cubed(key_s, key_s).rounded() == (1.0, 1.0, 1.0)


def test_b_cubed_empty_key():
    with pytest.raises(UndefinedMetricError):
        b_cubed(Partition(), Partition([["a"]]))


# CEAF ----------------------------------------------------------------------


def test_alignment_example(key_s, response_t):
    sim = similarity_matrix(key_s, response_t, SimilarityKind.PHI3)
    al = optimal_alignment(sim)
    s1, s2 = key_s.entities
    t1, t2, t3 = response_t.entities
    paired = {(key_s.entities[i], response_t.entities[j]) for i, j in al.pairs if sim[i, j] > 0}
    assert paired == {(s1, t1), (s2, t3)}
    assert al.total == 4
    assert al.total == oracles.best_alignment_total([set(e) for e in key_s], [set(e) for e in response_t], oracles.phi3)


def test_alignment_single_cell():
    assert optimal_alignment(np.array([[2.5]])).total == 2.5


def test_alignment_diagonal_dominant():
    sim = np.array([[5.0, 1, 0], [1, 4, 1], [0, 2, 3]])
    assert optimal_alignment(sim).pairs == ((0, 0), (1, 1), (2, 2))


def test_alignment_rejects_negative():
    with pytest.raises(ValueError):
        optimal_alignment(np.array([[-1.0]]))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_alignment_matches_exhaustive_search(n, m, data):
    values = data.draw(st.lists(st.integers(0, 9), min_size=n * m, max_size=n * m))
    sim = np.array(values, dtype=float).reshape(n, m)
    best = max(
        sum(sim[i, j] for i, j in zip(rows, cols))
        for rows in [range(min(n, m))]
        for cols in itertools.permutations(range(m), min(n, m))
    ) if n <= m else max(
        sum(sim[i, j] for i, j in zip(rows, range(m)))
        for rows in itertools.permutations(range(n), m)
    )
    assert optimal_alignment(sim).total == pytest.approx(best, abs=1e-12)


def test_ceaf_phi3_example(key_s, response_t):
    t = ceaf(key_s, response_t, SimilarityKind.PHI3)
    assert t.precision == t.recall == pytest.approx(4 / 7)


def test_ceaf_phi4_example(key_s, response_t):
    t = ceaf(key_s, response_t, SimilarityKind.PHI4)
    total = 2 * 2 / 5 + 2 * 2 / 7
    assert t.recall == pytest.approx(total / 2, abs=1e-12)
    assert t.precision == pytest.approx(total / 3, abs=1e-12)
    assert t.rounded() == (0.46, 0.69, 0.55)


@pytest.mark.parametrize("kind", list(SimilarityKind))
def test_ceaf_identity(key_s, kind):
    assert ceaf(key_s, key_s, kind).rounded() == (1.0, 1.0, 1.0)


def test_ceaf_empty():
    with pytest.raises(UndefinedMetricError):
        ceaf(Partition(), Partition([["a"]]))


# BLANC ---------------------------------------------------------------------


def test_blanc_counts_example(key_s, response_t):
    c = blanc_counts(key_s, response_t)
    assert (c.key_links, c.response_links, c.common_links) == (9, 5, 2)
    assert (c.key_nonlinks, c.response_nonlinks, c.common_nonlinks) == (12, 16, 8)


def test_blanc_example(key_s, response_t):
    t = blanc(key_s, response_t)
    f_links = 2 * (2 / 5) * (2 / 9) / (2 / 5 + 2 / 9)
    f_nonlinks = 2 * (8 / 16) * (8 / 12) / (8 / 16 + 8 / 12)
    assert f_links == pytest.approx(0.2857, abs=1e-4)
    assert f_nonlinks == pytest.approx(0.5714, abs=1e-4)
    assert t.f1 == pytest.approx((f_links + f_nonlinks) / 2, abs=1e-12)
    assert round(t.f1, 2) == 0.43


def test_blanc_identity(key_s):
    assert blanc(key_s, key_s).rounded() == (1.0, 1.0, 1.0)


def test_blanc_identical_singletons():
    p = Partition([["a"], ["b"], ["c"]])
    assert blanc(p, p).rounded() == (1.0, 1.0, 1.0)


def test_blanc_too_few_mentions():
    with pytest.raises(UndefinedMetricError):
        blanc(Partition([["a"]]), Partition([["a", "b"]]))


# LEA -----------------------------------------------------------------------


def test_lea_example(key_s, response_t):
    t = lea(key_s, response_t)
    assert t.recall == pytest.approx(5 / 21, abs=1e-12)
    assert t.precision == pytest.approx(3 / 7, abs=1e-12)
    assert round(t.f1, 2) == 0.31


def test_lea_identity(key_s):
    assert lea(key_s, key_s).rounded() == (1.0, 1.0, 1.0)


def test_lea_singletons_resolved_only_as_singletons():
    key = Partition([["a"], ["b", "c"]])
    assert lea(key, Partition([["a"], ["b", "c"]])).recall == 1.0
    assert lea(key, Partition([["a", "x"], ["b", "c"]])).recall == pytest.approx(2 / 3)


# all metrics ---------------------------------------------------------------


def test_score_all_example(key_s, response_t):
    report = score_all(key_s, response_t)
    f = [round(t.f1, 2) for _, t in report.items()]
    assert f == [0.44, 0.50, 0.57, 0.55, 0.43, 0.31]


def test_score_all_identity(key_s):
    for _, t in score_all(key_s, key_s).items():
        assert t.rounded() == (1.0, 1.0, 1.0)


def test_score_all_tags_failing_metric():
    with pytest.raises(MetricError) as info:
        score_all(Partition([["a"], ["b"]]), Partition([["a", "b"]]))
    assert info.value.metric == "muc"


def _compare_with_oracles(key_sets, resp_sets):
    key, resp = Partition(key_sets), Partition(resp_sets)
    for name, fn in METRICS.items():
        try:
            expected = oracles.ORACLES[name](key_sets, resp_sets)
        except ValueError:
            with pytest.raises(UndefinedMetricError):
                fn(key, resp)
            continue
        got = fn(key, resp)
        assert (got.precision, got.recall, got.f1) == pytest.approx(expected, abs=1e-12), name


def test_random_partitions_match_oracles():
    rng = random.Random(20190701)
    pool = [f"m{i}" for i in range(8)]
    for _ in range(300):
        _compare_with_oracles(oracles.random_partition(rng, pool), oracles.random_partition(rng, pool))


partitions = st.lists(st.integers(0, 3), min_size=1, max_size=8).map(
    lambda labels: [set(f"m{i}" for i, l in enumerate(labels) if l == k) for k in set(labels)]
)


@settings(max_examples=150, deadline=None)
@given(partitions, partitions)
def test_role_swap_symmetry(a, b):
    ka, kb = Partition(a), Partition(b)
    for name in ("muc", "b_cubed", "ceaf_m", "ceaf_e", "lea"):
        try:
            forward = METRICS[name](ka, kb)
            backward = METRICS[name](kb, ka)
        except UndefinedMetricError:
            continue
        assert forward.precision == pytest.approx(backward.recall, abs=1e-12), name


@settings(max_examples=150, deadline=None)
@given(partitions, partitions, st.permutations(range(8)))
def test_relabeling_mentions_changes_nothing(a, b, perm):
    rename = {f"m{i}": f"x{perm[i]}" for i in range(8)}
    ka, kb = Partition(a), Partition(b)
    ra = Partition([{rename[m] for m in e} for e in a])
    rb = Partition([{rename[m] for m in e} for e in b])
    for name, fn in METRICS.items():
        try:
            before = fn(ka, kb)
        except UndefinedMetricError:
            continue
        after = fn(ra, rb)
        assert (after.precision, after.recall, after.f1) == pytest.approx(
            (before.precision, before.recall, before.f1), abs=1e-12
        )


@settings(max_examples=150, deadline=None)
@given(partitions, st.data())
def test_splitting_off_a_mention_never_raises_b_cubed_recall(a, data):
    key = Partition(a)
    mentions = sorted(key.mentions)
    moved = data.draw(st.sampled_from(mentions))
    damaged = [e - {moved} for e in a if e - {moved}] + [{moved}]
    assert b_cubed(key, Partition(damaged)).recall <= b_cubed(key, key).recall + 1e-12


@settings(max_examples=100, deadline=None)
@given(partitions)
def test_identity_without_singletons_scores_one(a):
    if any(len(e) == 1 for e in a):
        return
    p = Partition(a)
    for _, t in score_all(p, p).items():
        assert t.f1 == pytest.approx(1.0)
