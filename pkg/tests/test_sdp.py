import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sipsdp.sdp import SdpBuilder, Settings, export_sdpa, import_sdpa, solve
from sipsdp.sdp.sdpa import SdpaParseError


def _min_x_lmi():
    b = SdpBuilder()
    b.add_block("B", 2)
    b.add_free("x")
    b.add_eq({("B", 0, 0): 1, "x": -1})
    b.add_eq({("B", 0, 1): 1}, 1)
    b.add_eq({("B", 1, 1): 1, "x": -1})
    b.set_objective({"x": 1})
    return b.build()


def _weak_duality_ok(rep, sense="min", tol=1e-8):
    slack = tol * (1 + abs(rep.primal_value))
    if sense == "min":
        return rep.dual_value <= rep.primal_value + slack
    return rep.dual_value >= rep.primal_value - slack


def test_min_x_eigenvalue_condition():
    rep = solve(_min_x_lmi())
    assert rep.status == "optimal"
    assert rep.primal_value == pytest.approx(1.0, abs=1e-7)
    assert _weak_duality_ok(rep)


def test_trace_one_feasibility():
    b = SdpBuilder()
    b.add_block("X", 2)
    b.add_eq({("X", 0, 0): 1, ("X", 1, 1): 1}, 1)
    rep = solve(b.build())
    assert rep.status == "optimal"
    assert np.trace(rep.block_values["X"]) == pytest.approx(1.0)
    assert np.linalg.eigvalsh(rep.block_values["X"])[0] >= -1e-9


def test_max_with_scalar_block():
    b = SdpBuilder()
    b.add_block("Z", 1)
    b.add_free("x")
    b.add_eq({("Z", 0, 0): 1, "x": 1}, -1)
    b.set_objective({"x": 1}, sense="max")
    rep = solve(b.build())
    assert rep.primal_value == pytest.approx(-1.0, abs=1e-7)
    assert _weak_duality_ok(rep, "max")


def test_infeasible_detected():
    b = SdpBuilder()
    b.add_block("X", 1)
    b.add_eq({("X", 0, 0): 1}, -1)
    assert solve(b.build()).status == "infeasible"


def test_unbounded_detected():
    b = SdpBuilder()
    b.add_block("X", 2)
    b.add_eq({("X", 0, 1): 1}, 0.5)
    b.set_objective({("X", 0, 0): -1})
    assert solve(b.build()).status == "unbounded"


def test_nonneg_and_inequalities():
    b = SdpBuilder()
    b.add_nonneg("u")
    b.add_free("v")
    b.add_ge({"u": 1, "v": 1}, 2)
    b.add_le({"v": 1}, 0.5)
    b.set_objective({"u": 3, "v": 1})
    rep = solve(b.build())
    assert rep.primal_value == pytest.approx(5.0, abs=1e-6)
    assert rep.scalar_values["u"] == pytest.approx(1.5, abs=1e-6)


def test_deterministic():
    a, b = solve(_min_x_lmi()), solve(_min_x_lmi())
    assert a.iterations == b.iterations
    assert a.primal_value == b.primal_value


def test_settings_from_mapping():
    s = Settings.from_mapping({"feas_tol": "1e-9", "max_iter": "50", "verbose": "yes"})
    assert (s.feas_tol, s.max_iter, s.verbose) == (1e-9, 50, True)
    with pytest.raises(KeyError):
        Settings.from_mapping({"nope": 1})


def test_sdpa_min_x_file(tmp_path):
    path = tmp_path / "minx.dat-s"
    export_sdpa(_min_x_lmi(), path)
    body = [l for l in path.read_text().splitlines() if not l.startswith("*")]
    assert body[0] == "1" and body[1] == "1" and body[2] == "2"
    rep = solve(import_sdpa(path))
    assert rep.primal_value == pytest.approx(1.0, abs=1e-7)


def test_sdpa_empty_objective(tmp_path):
    b = SdpBuilder()
    b.add_block("X", 2)
    b.add_eq({("X", 0, 0): 1, ("X", 1, 1): 1}, 1)
    path = tmp_path / "feas.dat-s"
    export_sdpa(b.build(), path)
    body = [l for l in path.read_text().splitlines() if not l.startswith("*")]
    assert all(float(v) == 0 for v in body[3].split())
    assert solve(import_sdpa(path)).status == "optimal"


def test_sdpa_diagonal_block_negative_size(tmp_path):
    b = SdpBuilder()
    b.add_nonneg("u")
    b.add_nonneg("w")
    b.add_ge({"u": 1, "w": 2}, 1)
    b.set_objective({"u": 1, "w": 1})
    path = tmp_path / "lp.dat-s"
    export_sdpa(b.build(), path)
    body = [l for l in path.read_text().splitlines() if not l.startswith("*")]
    assert any(int(s) < 0 for s in body[2].split())
    assert solve(import_sdpa(path)).primal_value == pytest.approx(0.5, abs=1e-6)


def test_sdpa_parse_error(tmp_path):
    path = tmp_path / "bad.dat-s"
    path.write_text("2\n1\n2\n1.0\n")
    with pytest.raises(SdpaParseError):
        import_sdpa(path)


# -- randomized problems: cvxpy cross-check and SDPA round trip ---------------------------

def _random_problem(seed, dim=3, ncons=3, nfree=1):
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal((dim, dim))
    x0 = x0 @ x0.T + np.eye(dim)
    z = rng.standard_normal((dim, dim))
    cost = z @ z.T + 0.5 * np.eye(dim)
    b = SdpBuilder()
    b.add_block("X", dim)
    free = [b.add_free(f"f{k}") for k in range(nfree)]
    b.add_nonneg("s")
    mats, rows = [], []
    for _ in range(ncons):
        a = rng.standard_normal((dim, dim))
        a = (a + a.T) / 2
        fc = rng.standard_normal(nfree)
        coeffs = {("X", i, j): (a[i, j] if i == j else 2 * a[i, j])
                  for i in range(dim) for j in range(i, dim)}
        coeffs.update({name: c for name, c in zip(free, fc)})
        rhs = float(np.sum(a * x0))
        b.add_eq(coeffs, rhs)
        mats.append(a)
        rows.append((fc, rhs))
    # keep the free scalars bounded
    for name in free:
        b.add_le({name: 1}, 1.0)
        b.add_ge({name: 1}, -1.0)
    b.add_le({"s": 1}, 2.0)
    obj = {("X", i, j): (cost[i, j] if i == j else 2 * cost[i, j])
           for i in range(dim) for j in range(i, dim)}
    obj["s"] = 1.0
    b.set_objective(obj)
    return b.build(), (cost, mats, rows, dim, nfree)


def _cvxpy_value(data):
    cp = pytest.importorskip("cvxpy")
    cost, mats, rows, dim, nfree = data
    X = cp.Variable((dim, dim), PSD=True)
    f = cp.Variable(nfree)
    s = cp.Variable(nonneg=True)
    cons = [cp.trace(a @ X) + fc @ f == rhs for a, (fc, rhs) in zip(mats, rows)]
    cons += [f <= 1, f >= -1, s <= 2]
    prob = cp.Problem(cp.Minimize(cp.trace(cost @ X) + s), cons)
    prob.solve(solver="CLARABEL")
    return prob.value


@pytest.mark.parametrize("seed", range(5))
def test_matches_cvxpy(seed):
    prob, data = _random_problem(seed)
    rep = solve(prob)
    assert rep.ok
    ref = _cvxpy_value(data)
    assert rep.primal_value == pytest.approx(ref, rel=1e-5, abs=1e-6)
    assert _weak_duality_ok(rep)


@given(st.integers(0, 10_000), st.integers(2, 4), st.integers(1, 4))
@settings(max_examples=3, deadline=None)
def test_sdpa_roundtrip(tmp_path_factory, seed, dim, ncons):
    prob, _ = _random_problem(seed, dim, ncons)
    direct = solve(prob)
    path = tmp_path_factory.mktemp("sdpa") / "p.dat-s"
    export_sdpa(prob, path)
    again = solve(import_sdpa(path))
    assert direct.ok and again.ok
    assert again.primal_value == pytest.approx(direct.primal_value, rel=1e-6, abs=1e-7)
