import numpy as np
import pytest

import rectport as rp
from rectport.objectives import area, area_gradient, gain, gradient_lipschitz_bound, risk

from oracles import custom_problem, diag_model, double_loop_risk, finite_difference_gradient


def _vertex(n, i):
    x = np.zeros(n)
    x[i] = 1.0
    return x


# ---------------------------------------------------------------- gain / risk

def test_gain_at_vertices():
    model = diag_model([1e-4, 4e-4], [0.001, 0.002])
    assert gain(model, _vertex(2, 0)) == pytest.approx(0.1, abs=1e-14)
    assert gain(model, _vertex(2, 1)) == pytest.approx(0.2, abs=1e-14)


def test_gain_uniform_two_assets():
    model = diag_model([1e-4, 1e-4], [0.001, 0.003])
    assert gain(model, [0.5, 0.5]) == pytest.approx(0.2, abs=1e-14)


def test_dimension_mismatch_raises():
    model = diag_model([1e-4, 4e-4], [0.001, 0.002])
    with pytest.raises(ValueError, match="dimension mismatch"):
        gain(model, [0.2, 0.3, 0.5])
    with pytest.raises(ValueError, match="dimension mismatch"):
        risk(model, [1.0])


def test_risk_at_vertices_and_zero_matrix():
    model = diag_model([1e-4, 4e-4], [0.001, 0.002])
    assert risk(model, _vertex(2, 0)) == pytest.approx(100 * 1e-4, abs=1e-16)
    zero = rp.MarketModel(mean=[0.001, 0.002], covariance=np.zeros((2, 2)))
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.dirichlet(np.ones(2))
        assert risk(zero, x) == 0.0


def test_risk_matches_double_loop_oracle():
    model = rp.random_model(4, seed=21)
    rng = np.random.default_rng(22)
    for _ in range(10):
        x = rng.dirichlet(np.ones(4))
        assert risk(model, x) == pytest.approx(double_loop_risk(model, x), abs=1e-12)


# ---------------------------------------------------------------- area

def test_area_zero_when_gain_at_reference():
    model = rp.random_model(3, seed=30)
    x = np.array([0.2, 0.3, 0.5])
    problem = custom_problem(model, rho_ref=1.0, gamma_ref=gain(model, x))
    assert area(problem, x) == 0.0


def test_area_zero_when_risk_at_reference():
    model = rp.random_model(3, seed=31)
    x = np.array([0.5, 0.25, 0.25])
    problem = custom_problem(model, rho_ref=risk(model, x), gamma_ref=0.0)
    assert area(problem, x) == 0.0


def test_area_sign_consistency_on_feasible_points():
    rng = np.random.default_rng(32)
    for seed in range(5):
        model = rp.random_model(4, seed=40 + seed)
        problem = rp.AreaProblem(model=model, ref=rp.reference_point(model, "nadir"))
        for _ in range(200):
            x = rng.dirichlet(np.ones(4))
            if not rp.is_feasible(problem, x, tol=0.0):
                continue
            strict = (gain(model, x) > problem.ref.gamma_ref
                      and risk(model, x) < problem.ref.rho_ref)
            assert (area(problem, x) > 0.0) == strict


# ---------------------------------------------------------------- gradient

def test_gradient_when_gain_term_vanishes():
    model = rp.random_model(3, seed=50)
    x = np.array([0.3, 0.3, 0.4])
    problem = custom_problem(model, rho_ref=2.0, gamma_ref=gain(model, x))
    expected = (2.0 - risk(model, x)) * 100.0 * model.mean
    assert np.allclose(area_gradient(problem, x), expected, atol=1e-14)


def test_gradient_constant_for_zero_covariance():
    model = rp.MarketModel(mean=[0.001, 0.004, 0.002], covariance=np.zeros((3, 3)))
    problem = custom_problem(model, rho_ref=1.5, gamma_ref=0.05)
    rng = np.random.default_rng(51)
    expected = 1.5 * 100.0 * model.mean
    for _ in range(5):
        x = rng.dirichlet(np.ones(3))
        assert np.allclose(area_gradient(problem, x), expected, atol=1e-14)


@pytest.mark.parametrize("n", [2, 5, 10])
def test_gradient_matches_central_differences(n):
    rng = np.random.default_rng(60 + n)
    model = rp.random_model(n, seed=60 + n)
    problem = rp.AreaProblem(model=model, ref=rp.reference_point(model, "nadir"))
    for _ in range(100):
        x = rng.dirichlet(np.ones(n))
        g = area_gradient(problem, x)
        fd = finite_difference_gradient(problem, x)
        scale = max(np.abs(g).max(), np.abs(fd).max(), 1e-12)
        assert np.abs(g - fd).max() <= 1e-6 * scale


# ---------------------------------------------------------------- Lipschitz bound

def test_lipschitz_zero_for_zero_covariance():
    model = rp.MarketModel(mean=[0.001, 0.002], covariance=np.zeros((2, 2)))
    problem = custom_problem(model, rho_ref=1.0, gamma_ref=0.05)
    assert gradient_lipschitz_bound(problem) == 0.0


def test_lipschitz_composition_for_isotropic_covariance():
    sigma2 = 3e-4
    model = rp.MarketModel(mean=[0.001, 0.002, 0.003],
                           covariance=sigma2 * np.eye(3))
    problem = custom_problem(model, rho_ref=0.5, gamma_ref=0.1)
    lam = rp.dominant_eigenvalue(model.covariance)
    assert lam == pytest.approx(sigma2, rel=1e-9)
    expected = 200.0 * sigma2 * (100.0 * 0.003 - 0.1) \
        + 2.0 * (200.0 * sigma2) * (100.0 * np.linalg.norm(model.mean))
    assert gradient_lipschitz_bound(problem) == pytest.approx(expected, rel=1e-9)


def _max_sampled_quotient(problem, rng, pairs=1000):
    n = problem.model.n
    qmax = 0.0
    taken = 0
    while taken < pairs:
        x, y = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        if not (rp.is_feasible(problem, x) and rp.is_feasible(problem, y)):
            continue
        den = np.linalg.norm(x - y)
        if den == 0.0:
            continue
        num = np.linalg.norm(area_gradient(problem, x) - area_gradient(problem, y))
        qmax = max(qmax, num / den)
        taken += 1
    return qmax


def test_sampled_quotients_never_exceed_bound_diag_example():
    model = diag_model([1e-4, 4e-4], [1e-3, 2e-3])
    problem = rp.AreaProblem(model=model, ref=rp.reference_point(model, "worst"))
    bound = gradient_lipschitz_bound(problem)
    assert _max_sampled_quotient(problem, np.random.default_rng(70)) <= bound


@pytest.mark.parametrize("seed,kind", [(71, "nadir"), (72, "worst")])
def test_sampled_quotients_never_exceed_bound_random(seed, kind):
    model = rp.random_model(5, seed=seed)
    problem = rp.AreaProblem(model=model, ref=rp.reference_point(model, kind))
    bound = gradient_lipschitz_bound(problem)
    assert _max_sampled_quotient(problem, np.random.default_rng(seed)) <= bound


def test_dominant_eigenvalue_matches_dense_solver():
    rng = np.random.default_rng(80)
    for n in (2, 5, 9):
        b = rng.normal(size=(n, n))
        mat = b @ b.T
        lam = rp.dominant_eigenvalue(mat)
        assert lam == pytest.approx(np.linalg.eigvalsh(mat)[-1], rel=1e-8)
    assert rp.dominant_eigenvalue(np.zeros((4, 4))) == 0.0


# ---------------------------------------------------------------- scaling

@pytest.mark.parametrize("eta", [0.5, 3.0])
@pytest.mark.parametrize("kind", ["nadir", "worst"])
def test_scaling_covariance_scales_risks_only(eta, kind):
    model = rp.random_model(4, seed=90)
    scaled = rp.MarketModel(mean=model.mean, covariance=eta * model.covariance)
    ref = rp.reference_point(model, kind)
    ref_scaled = rp.reference_point(scaled, kind)
    assert ref_scaled.rho_ref == pytest.approx(eta * ref.rho_ref, rel=1e-9)
    assert ref_scaled.gamma_ref == pytest.approx(ref.gamma_ref, rel=1e-9)
    rng = np.random.default_rng(91)
    for _ in range(20):
        x = rng.dirichlet(np.ones(4))
        assert risk(scaled, x) == pytest.approx(eta * risk(model, x), rel=1e-12)
        assert gain(scaled, x) == gain(model, x)
