import numpy as np
import pytest

from sipsdp import grid as gridmod
from sipsdp.instances import (
    cylinder_program,
    disk_lens,
    halfline,
    parabola_band,
    quadratic_family_program,
    quadratic_family_set,
    rotated_octic_program,
    vacuous,
    wedge,
)
from sipsdp.moments import localizing_matrix, moment_matrix
from sipsdp.poly import X, Y, Polynomial
from sipsdp.preprocess import discretization_oracle
from sipsdp.problem import PreconditionError, SipProblem
from sipsdp.relax import (
    build_dsdp,
    build_lambda,
    build_psdp,
    estimate_tau,
    extract_active_indices,
    extract_minimizer,
    lagrangian_values,
    membership_sdp,
    resolve_mode,
    run_hierarchy,
    scale_to_unit_ball,
    solve_relaxation,
    support_value,
)

DIRECTIONS = [np.array([np.cos(a), np.sin(a)]) for a in np.linspace(0, 2 * np.pi, 16, endpoint=False)]


def planar_sets():
    return [quadratic_family_set(), disk_lens(mode="general"), wedge(mode="general"),
            parabola_band(mode="general")]


# -- values ---------------------------------------------------------------------------

def test_general_path_on_sos_convex_example():
    res = solve_relaxation(quadratic_family_program("general"), "dsdp", 1, 1)
    assert res.ok
    assert res.value == pytest.approx(0.80942, abs=1e-3)


def test_halfline_value_matches_oracle():
    prob = halfline("linear")
    res = solve_relaxation(prob, "dsdp", 1, 1)
    assert res.value == pytest.approx(1.0, abs=1e-4)
    assert discretization_oracle(prob).value == pytest.approx(1.0, abs=1e-4)


def test_vacuous_constraint_multipliers_vanish():
    res = solve_relaxation(vacuous(), "psdp", 1, 1)
    assert res.report.scalar_values["rho"] == pytest.approx(0.0, abs=1e-6)
    assert res.report.scalar_values["eta"] == pytest.approx(0.0, abs=1e-6)
    act = extract_active_indices(vacuous(), res)
    assert np.abs(res.functional.values).max() < 1e-6
    assert act.atoms == []


def test_sosconvex_vacuous_exact_minimum():
    prob = vacuous().with_mode("sosconvex")
    dual = solve_relaxation(prob, "sosconvex-dsdp", None, 1)
    primal = solve_relaxation(prob, "sosconvex-psdp", None, 1)
    assert dual.value == pytest.approx(0.0, abs=1e-6)
    assert primal.value == pytest.approx(0.0, abs=1e-6)


def test_univariate_square_objective():
    prob = halfline("square", mode="sosconvex")
    res = solve_relaxation(prob, "sosconvex-dsdp", None, prob.d_K)
    assert res.value == pytest.approx(1.0, abs=1e-4)
    assert res.functional.first_moments()[0] == pytest.approx(1.0, abs=1e-4)


def _sosconvex_instances():
    return [quadratic_family_program("sosconvex"), cylinder_program("sosconvex"),
            disk_lens("sosconvex"), wedge("sosconvex"), parabola_band("sosconvex"),
            halfline("square", mode="sosconvex")]


@pytest.mark.parametrize("prob", _sosconvex_instances(), ids=lambda p: p.name)
def test_sosconvex_weak_duality_and_jensen(prob):
    dual = solve_relaxation(prob, "sosconvex-dsdp", None, prob.d_K)
    primal = solve_relaxation(prob, "sosconvex-psdp", None, prob.d_K)
    assert dual.ok and primal.ok
    assert primal.value <= dual.value + 1e-6 * (1 + abs(dual.value))
    info = extract_minimizer(prob, dual)
    assert info.jensen_gap >= -1e-6


@pytest.mark.parametrize("prob", [halfline("linear"), vacuous(), disk_lens("general"),
                                  wedge("general"), quadratic_family_program("general")],
                         ids=lambda p: p.name)
def test_general_weak_duality(prob):
    r = max(1, (prob.d_P + 1) // 2)
    dual = solve_relaxation(prob, "dsdp", r, max(r, prob.d_K))
    primal = solve_relaxation(prob, "psdp", r, max(r, prob.d_K))
    assert primal.value <= dual.value + 1e-6 * (1 + abs(dual.value))


@pytest.mark.parametrize("prob", [halfline("linear"), disk_lens("general"),
                                  quadratic_family_program("general")], ids=lambda p: p.name)
def test_returned_functionals_psd(prob):
    dual = solve_relaxation(prob, "dsdp", 1, 1)
    primal = solve_relaxation(prob, "psdp", 1, 1)
    assert np.linalg.eigvalsh(moment_matrix(dual.functional, 1))[0] >= -1e-7
    h = primal.functional
    assert np.linalg.eigvalsh(moment_matrix(h, 1))[0] >= -1e-7
    for g in prob.generator_terms():
        loc = localizing_matrix(h, g, 1)
        assert np.linalg.eigvalsh(loc)[0] >= -1e-7


# -- extraction -----------------------------------------------------------------------------

def test_halfline_active_index():
    prob = halfline("linear")
    primal = solve_relaxation(prob, "psdp", 1, 1)
    act = extract_active_indices(prob, primal)
    assert act.status == "certified"
    assert len(act.atoms) == 1
    assert act.atoms[0].point[0] == pytest.approx(1.0, abs=1e-4)
    assert act.atoms[0].weight == pytest.approx(1.0, abs=1e-4)


def test_lagrangian_reconstruction():
    rng = np.random.default_rng(7)
    for prob in [halfline("linear"), halfline("square", mode="sosconvex")]:
        kind = "psdp" if prob.mode == "general" else "sosconvex-psdp"
        r = 1 if prob.mode == "general" else None
        primal = solve_relaxation(prob, kind, r, 1)
        act = extract_active_indices(prob, primal)
        if act.status != "certified":
            continue
        pts = rng.uniform(-prob.tau, prob.tau, (200, prob.m))
        assert lagrangian_values(prob, primal.value, act.atoms, pts).min() >= -1e-5


def test_cylinder_atoms_on_solution_set():
    prob = cylinder_program("sosconvex")
    primal = solve_relaxation(prob, "sosconvex-psdp", None, 1)
    act = extract_active_indices(prob, primal)
    if act.status == "certified":
        for a in act.atoms:
            y1, y2, y3 = a.point
            assert abs(y1**2 + y2**2 - 1) <= 1e-4
            assert abs(y3**2 - 1) <= 1e-4
    else:
        assert act.flatness is not None


def test_minimizer_on_known_instance():
    prob = disk_lens("sosconvex")
    dual = solve_relaxation(prob, "sosconvex-dsdp", None, 1)
    info = extract_minimizer(prob, dual)
    np.testing.assert_allclose(info.point, [0.5, 0.0], atol=1e-4)
    assert info.margin >= -1e-5


# -- outer approximation ----------------------------------------------------------------

def test_membership_slater_point():
    assert membership_sdp(quadratic_family_set(), [-0.5, 0.0], 1, 1)


def test_membership_far_point():
    prob = quadratic_family_set().with_tau(1.0)
    assert not membership_sdp(prob, [10.0, 10.0], 1, 1)


def test_support_halfline():
    prob = halfline("linear")
    assert support_value(prob, [-1.0], 1, 1).value == pytest.approx(-1.0, abs=1e-5)
    assert support_value(prob, [0.0], 1, 1).value == pytest.approx(0.0, abs=1e-7)


def test_support_without_tau_precondition():
    prob = quadratic_family_set().with_tau(None)
    with pytest.raises(PreconditionError):
        support_value(prob, [1.0, 0.0], 1, 1)


@pytest.mark.parametrize("prob", planar_sets(), ids=lambda p: p.name)
def test_boundary_points_in_set(prob):
    ygrid = gridmod.sample_set(prob.generator_terms(), prob.n, prob.bounding_box(), 200)
    for a in DIRECTIONS:
        res = support_value(prob, a, 1, 1)
        assert gridmod.min_over_grid(prob.p, res.point, ygrid) >= -1e-4


@pytest.mark.parametrize("prob", planar_sets(), ids=lambda p: p.name)
def test_nesting_in_r(prob):
    for a in DIRECTIONS:
        low = support_value(prob, a, 1, 2, all_theta=True).value
        high = support_value(prob, a, 2, 2, all_theta=True).value
        assert high <= low + 1e-6


@pytest.mark.parametrize("prob", planar_sets(), ids=lambda p: p.name)
def test_nesting_in_t(prob):
    for a in DIRECTIONS:
        small = support_value(prob, a, 2, 1).value
        large = support_value(prob, a, 2, 2).value
        assert large >= small - 1e-6


@pytest.mark.parametrize("prob", [halfline("linear"), disk_lens("general"), wedge("general"),
                                  quadratic_family_program("general")], ids=lambda p: p.name)
def test_dual_monotone_in_t(prob):
    vals = [solve_relaxation(prob, "dsdp", 2, t).value for t in (1, 2, 3)]
    for hi, lo in zip(vals, vals[1:]):
        assert lo <= hi + 1e-6


# -- preconditions, scaling, tau ----------------------------------------------------------

def test_degree_preconditions():
    prob = rotated_octic_program()
    with pytest.raises(PreconditionError, match="t = 3 < d_K = 4"):
        build_dsdp(prob, 4, 3)
    with pytest.raises(PreconditionError, match="r = 3"):
        build_dsdp(prob, 3, 4)
    with pytest.raises(PreconditionError):
        build_psdp(halfline().with_tau(None), 1, 1)


def test_scaling_identity_and_substitution():
    prob = halfline("square", tau=1.0)
    same, back = scale_to_unit_ball(prob)
    assert same is prob
    scaled, back = scale_to_unit_ball(halfline("square", tau=2.0))
    x1 = scaled.f.space.gens()[0]
    assert scaled.f == 4 * x1**2
    assert scaled.tau == 1.0
    np.testing.assert_allclose(back(np.array([0.5])), [1.0])


def test_scaled_pipeline_same_minimizer():
    prob = quadratic_family_program("general")
    direct = extract_minimizer(prob, solve_relaxation(prob, "dsdp", 1, 1)).point
    scaled, back = scale_to_unit_ball(prob)
    res = solve_relaxation(scaled, "dsdp", 1, 1)
    np.testing.assert_allclose(back(res.functional.first_moments()), direct, atol=1e-4)


def test_estimate_tau_covers_set():
    prob = disk_lens("general")
    est = estimate_tau(prob, [(-2, 2), (-2, 2)], density=81)
    # the lens is the intersection of two disks of radius 1.5 centred at (+-1, 0)
    true_max = np.sqrt(1.5**2 - 1)
    assert est.tau >= true_max
    assert est.tau <= true_max + 0.2
    assert not est.touches_box


def test_resolve_mode():
    assert resolve_mode(quadratic_family_program()).mode == "sosconvex"
    assert resolve_mode(rotated_octic_program().with_mode("auto")).mode == "general"
    fixed = resolve_mode(halfline())
    assert fixed.mode == "general" and not fixed.detected


def test_hierarchy_report_fields():
    prob = halfline("linear")
    rep = run_hierarchy(prob, [(1, 1), (1, 2)])
    assert rep.all_ok
    doc = rep.to_dict(timing=False)
    assert doc["degrees"] == {"d_x": 1, "d_y": 1, "d_S": 1, "d_K": 1, "d_P": 1}
    assert doc["selected"] == {"r": 1, "t": 1}
    assert doc["value"] == pytest.approx(1.0, abs=1e-4)
    assert "seconds" not in doc
    assert all(d["nonincreasing"] for d in doc["diagnostics"]["dual_monotone_in_t"])


def test_hierarchy_parallel_matches_serial():
    prob = disk_lens("general")
    a = run_hierarchy(prob, [(1, 1), (2, 2)]).to_dict(timing=False)
    b = run_hierarchy(prob, [(1, 1), (2, 2)], n_jobs=2).to_dict(timing=False)
    assert a == b
