import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import FIG1_GROUPS, FIG1_POINTS, random_points
from nkclust import EvalContext, Thresholds, alpha, delta_evaluate, evaluate, subfunction, subfunction_values

T = Thresholds(c1=1.0, c2=2.0, c3=3.0, c_rho=0.5)


def test_alpha_in_below_c1():
    assert alpha(1, 1, 0.5, 1.0, 4.0, T) == 0.0


def test_alpha_out_below_c1():
    assert alpha(1, 2, 0.5, 1.0, 4.0, T) == 4.0


def test_alpha_in_midpoint():
    assert alpha(3, 3, 2.0, 1.0, 4.0, T) == pytest.approx(2.0)


def test_alpha_noise_far_and_sparse():
    assert alpha(0, 5, 2.5, 0.4, 4.0, T) == 0.0


@pytest.mark.parametrize("d, rho_i", [(1.5, 0.4), (2.5, 0.6)])
def test_alpha_noise_otherwise(d, rho_i):
    assert alpha(0, 5, d, rho_i, 4.0, T) == 4.0


def test_alpha_branches_at_edges():
    assert alpha(1, 1, 3.0, 1.0, 4.0, T) == pytest.approx(4.0)   # closed ramp at c3
    assert alpha(1, 1, 3.5, 1.0, 4.0, T) == 4.0
    assert alpha(1, 2, 3.0, 1.0, 4.0, T) == 0.0
    assert alpha(1, 2, 1.0, 1.0, 4.0, T) == pytest.approx(4.0)
    assert alpha(1, 0, 0.5, 1.0, 4.0, T) == 4.0  # x_j = 0 is just another label


def test_alpha_step_when_c1_equals_c3():
    t = Thresholds(2.0, 2.0, 2.0, 1.0)
    assert alpha(1, 1, 1.9, 1.0, 3.0, t) == 0.0
    assert alpha(1, 1, 2.0, 1.0, 3.0, t) == 3.0
    assert alpha(1, 2, 1.9, 1.0, 3.0, t) == 3.0
    assert alpha(1, 2, 2.0, 1.0, 3.0, t) == 0.0


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.floats(0, 5), st.floats(0.01, 9), st.floats(0.01, 9))
def test_alpha_agrees_with_oracle_and_is_nonnegative(xi, xj, d, ri, rj):
    got = alpha(xi, xj, d, ri, rj, T)
    assert got >= 0
    assert got == pytest.approx(oracles.alpha(xi, xj, d, ri, rj, 1.0, 2.0, 3.0, 0.5))


@pytest.fixture(scope="module")
def inst():
    pts = random_points(70, seed=21)
    return pts, EvalContext.from_dataset(pts, 3), oracles.Nkcv2(pts.tolist(), 3)


def test_context_matches_oracle(inst):
    _, ctx, ref = inst
    assert ctx.graph.groups.tolist() == ref.groups
    np.testing.assert_allclose(ctx.thr, ref.thr, rtol=1e-12)


def test_subfunction_and_evaluate_match_oracle(inst, rng):
    _, ctx, ref = inst
    for _ in range(20):
        x = rng.integers(0, 4, size=ctx.n)
        vals = subfunction_values(x, ctx)
        for i in range(0, ctx.n, 7):
            assert subfunction(i, x, ctx) == pytest.approx(ref.sub(i, x.tolist()), abs=1e-12)
            assert vals[i] == pytest.approx(ref.sub(i, x.tolist()), abs=1e-12)
        assert evaluate(x, ctx) == pytest.approx(ref.f(x.tolist()), abs=1e-9)
        assert evaluate(x, ctx) == pytest.approx(vals.sum(), abs=1e-9)


def test_uniform_tight_group_has_zero_subfunction():
    # 4 tight points plus far ones: the tight group's distances sit below c1
    pts = np.vstack([np.array([[0, 0], [0.1, 0], [0, 0.1], [0.1, 0.1]]), random_points(16, seed=3) + 50])
    ctx = EvalContext.from_dataset(pts, 3)
    x = np.ones(20, dtype=np.int64)
    for i in range(4):
        assert subfunction(i, x, ctx) == 0.0


def test_noise_object_near_its_group_pays_every_rho():
    pts = np.vstack([np.array([[0, 0], [0.1, 0], [0, 0.1], [0.1, 0.1]]), random_points(16, seed=3) + 50])
    ctx = EvalContext.from_dataset(pts, 3)
    x = np.ones(20, dtype=np.int64)
    x[0] = 0
    members = [j for j in ctx.graph.groups[0] if j != 0]
    assert subfunction(0, x, ctx) == pytest.approx(ctx.rho[members].sum())


def _two_tight_clusters():
    r = np.random.default_rng(4)
    pts = np.vstack([r.normal(0, 0.2, (20, 2)), r.normal(1000, 0.2, (20, 2))])
    return pts, np.repeat([1, 2], 20)


def test_correct_compact_clusters_score_zero():
    pts, truth = _two_tight_clusters()
    ctx = EvalContext.from_dataset(pts, 1)
    assert evaluate(truth, ctx) == 0.0
    assert evaluate(np.ones(40, dtype=np.int64), ctx) > 0.0


def test_fig1_dependencies():
    ctx = EvalContext.from_dataset(FIG1_POINTS, 2)
    assert ctx.graph.groups.tolist() == FIG1_GROUPS
    r = np.random.default_rng(0)
    for _ in range(30):
        x = r.integers(0, 3, size=7)
        base = subfunction_values(x, ctx)
        for j in range(7):
            y = x.copy()
            y[j] = (x[j] + 1) % 3
            changed = np.flatnonzero(np.abs(subfunction_values(y, ctx) - base) > 0)
            assert set(changed.tolist()) <= {i for i, g in enumerate(FIG1_GROUPS) if j in g}


def test_delta_matches_full_difference(inst, rng):
    _, ctx, _ = inst
    for _ in range(500):
        x = rng.integers(0, 5, size=ctx.n)
        i, v = int(rng.integers(ctx.n)), int(rng.integers(0, 6))
        y = x.copy()
        y[i] = v
        assert abs(delta_evaluate(x, i, v, ctx) - (evaluate(y, ctx) - evaluate(x, ctx))) <= 1e-9


def test_delta_identity_and_reversibility(inst, rng):
    _, ctx, _ = inst
    x = rng.integers(1, 4, size=ctx.n)
    assert delta_evaluate(x, 5, int(x[5]), ctx) == 0.0
    y = x.copy()
    y[5] = 0
    assert delta_evaluate(x, 5, 0, ctx) + delta_evaluate(y, 5, int(x[5]), ctx) == pytest.approx(0.0, abs=1e-12)


def test_delta_does_not_mutate_input(inst):
    _, ctx, _ = inst
    x = np.ones(ctx.n, dtype=np.int64)
    delta_evaluate(x, 0, 2, ctx)
    assert np.all(x == 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=70, max_size=70), st.permutations(range(1, 6)))
def test_label_permutation_invariance(inst, labels, perm):
    _, ctx, _ = inst
    x = np.array(labels)
    mapping = np.array([0, *perm])
    assert evaluate(mapping[x], ctx) == pytest.approx(evaluate(x, ctx), abs=1e-9)
    assert evaluate(x, ctx) >= 0.0


def test_rejects_wrong_length(inst):
    _, ctx, _ = inst
    with pytest.raises(ValueError):
        evaluate(np.ones(3), ctx)
