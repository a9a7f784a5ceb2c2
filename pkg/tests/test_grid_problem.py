import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sipsdp import grid as gridmod
from sipsdp.instances import (
    cylinder_program,
    parabolic_index_set,
    quadratic_family_set,
    rotated_octic_program,
    XY2,
)
from sipsdp.poly import Polynomial, Space, Y
from sipsdp.problem import PreconditionError, SipProblem, half_up

S11 = Space(("x1",), ("y1",))


def test_sample_interval():
    _, y = S11.gens()
    pts = gridmod.sample_set([(1 - y**2).block_terms(Y)], 1, density=11)
    assert len(pts) == 11
    assert pts.min() == -1 and pts.max() == 1


def test_sample_respects_generators():
    gens = [g.block_terms(Y) for g in parabolic_index_set()]
    pts = gridmod.sample_set(gens, 2, np.array([[0, 1], [-0.5, 0.5]]), density=40)
    assert len(pts) > 0
    for g in parabolic_index_set():
        vals = Polynomial.evaluate_many(g, np.hstack([np.zeros((len(pts), 2)), pts]))
        assert vals.min() >= -1e-9


def test_sample_projects_equality_pairs():
    sp = Space((), ("y1", "y2"))
    y1, y2 = sp.gens()
    sphere = 1 - y1**2 - y2**2
    pts = gridmod.sample_set([sphere.block_terms(Y), (-sphere).block_terms(Y)], 2, density=30)
    assert len(pts) > 20
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-9)


def test_sample_empty_raises():
    _, y = S11.gens()
    with pytest.raises(gridmod.EmptyGridError):
        gridmod.sample_set([(-1 - y**2).block_terms(Y)], 1, density=11)


def test_sample_caps_point_count():
    pts = gridmod.sample_set([], 3, density=100, max_points=5000)
    assert len(pts) <= 5000


def test_constraint_matrix_matches_evaluation(rng):
    p = rotated_octic_program().p
    xs = rng.uniform(-1, 1, (4, 2))
    ys = rng.uniform(0, 1, (5, 2))
    mat = gridmod.constraint_matrix(p, xs, ys)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            assert mat[i, j] == pytest.approx(p.evaluate(np.concatenate([x, y])), rel=1e-10, abs=1e-10)


@given(st.integers(0, 9))
def test_half_up(d):
    assert half_up(d) == -(-d // 2)


def test_derived_degrees():
    assert rotated_octic_program().degrees() == {"d_x": 8, "d_y": 8, "d_S": 1, "d_K": 4, "d_P": 8}
    assert quadratic_family_set().degrees() == {"d_x": 2, "d_y": 1, "d_S": 1, "d_K": 1, "d_P": 2}
    cyl = cylinder_program()
    assert (cyl.m, cyl.n, cyl.d_K) == (2, 3, 1)


def test_univariate_interval_mode_flag():
    x1, y = S11.gens()
    assert SipProblem(x1, x1 - y, (1 - y**2,), tau=1.0).univariate_interval_mode
    assert not SipProblem(x1, x1 - y, (1 - y,), tau=1.0).univariate_interval_mode


def test_problem_validation():
    x1, y = S11.gens()
    with pytest.raises(ValueError):
        SipProblem(x1 + y, x1, (), tau=1.0)
    with pytest.raises(ValueError):
        SipProblem(x1, x1, (x1,), tau=1.0)
    with pytest.raises(ValueError):
        SipProblem(x1, x1, (), tau=-1.0)
    with pytest.raises(ValueError):
        SipProblem(x1, x1, (), mode="fast")
    with pytest.raises(PreconditionError):
        SipProblem(x1, x1, ()).require_tau()
