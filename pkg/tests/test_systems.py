import numpy as np
import pytest

from infodyn.systems import (
    GOY_DEFAULTS,
    LinearPlant,
    NumericalBlowup,
    SystemSpec,
    _goy_nonlinear,
    goy_total_energy_drift,
    simulate,
    simulate_controlled,
    symbolic_map_suite,
)


def test_spec_validation():
    with pytest.raises(ValueError, match="unknown system kind"):
        SystemSpec("pendulum")
    with pytest.raises(ValueError, match="n_steps"):
        SystemSpec("lorenz96", n_steps=10, transient_steps=10)


def test_simulate_deterministic():
    spec = SystemSpec("coupled-logistic", n_steps=500, transient_steps=100, seed=11)
    a = simulate(spec)
    b = simulate(spec)
    assert np.array_equal(a.values, b.values)


def test_coupled_logistic_stays_in_unit_interval():
    sig = simulate(SystemSpec("coupled-logistic", n_steps=2000, transient_steps=100, seed=0))
    assert sig.values.min() >= 0.0 and sig.values.max() <= 1.0


def test_lorenz96_bounded_chaos():
    sig = simulate(SystemSpec("lorenz96", {"n_sites": 6}, n_steps=5000, transient_steps=1000, dt=0.01))
    assert np.all(np.isfinite(sig.values))
    assert sig.values.std() > 1.0  # not collapsed onto the fixed point


def test_goy_nonlinear_conserves_energy_instantaneously():
    # the nonlinear term alone must not change sum |u|^2: 2 Re <u, N(u)> = 0
    rng = np.random.default_rng(0)
    n = 19
    k = 0.0625 * 2.0 ** np.arange(1, n + 1)
    u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    nl = _goy_nonlinear(u, k, 0.5)
    assert abs(np.sum(2 * np.real(np.conj(u) * nl))) < 1e-10 * np.sum(np.abs(u) ** 2)


def test_goy_energy_drift_inviscid():
    spec = SystemSpec("goy-shell", n_steps=2000, transient_steps=0, seed=1, dt=2e-4)
    assert goy_total_energy_drift(spec) < 1e-10


def test_goy_signal_shape_and_names():
    sig = simulate(SystemSpec("goy-shell", n_steps=2000, transient_steps=1000, seed=2, dt=2e-4))
    assert sig.names == tuple(f"sigma{i + 1}" for i in range(len(GOY_DEFAULTS["cuts"])))
    assert sig.n_samples == 1000 // GOY_DEFAULTS["sample_every"]
    assert sig.dt == pytest.approx(2e-4 * GOY_DEFAULTS["sample_every"])


def test_linear_plant_stationary_variance():
    # uncontrolled AR(1): var = noise_std^2 / (1 - a^2)
    plant = LinearPlant(a=0.9, noise_std=0.5, sensor_noise_std=0.0)
    plant.reset(0)
    xs = [plant.step([0.0])[0] for _ in range(60000)]
    expected = 0.25 / (1 - 0.81)
    assert np.var(xs[2000:]) == pytest.approx(expected, rel=0.05)


def test_linear_plant_sense_delay_interpolation():
    plant = LinearPlant(sensor_noise_std=0.0, noise_std=0.0)
    plant.reset(0)
    plant.step([1.0])
    plant.step([2.0])  # history now [2.9, 1.0, 0, ...] with a=0.9
    s0 = plant.sense([0.0])[0]
    s1 = plant.sense([1.0])[0]
    s_half = plant.sense([0.5])[0]
    assert s_half == pytest.approx(0.5 * (s0 + s1))


def test_linear_plant_blowup():
    plant = LinearPlant(blowup=10.0, noise_std=0.0)
    plant.reset(0)
    with pytest.raises(NumericalBlowup):
        for _ in range(100):
            plant.step([5.0 + plant.x])


def test_simulate_controlled_zero_gain_matches_uncontrolled():
    spec = SystemSpec("linear-plant", n_steps=3000, transient_steps=500, seed=4)
    a = simulate(spec)
    b = simulate_controlled(spec, 0.0)
    assert np.array_equal(a.values, b.values)


def test_simulate_controlled_reduces_variance():
    spec = SystemSpec("linear-plant", n_steps=20000, transient_steps=1000, seed=5)
    free = simulate(spec).column("J").var()
    held = simulate_controlled(spec, 0.9).column("J").var()
    assert held < free


def test_controlled_variance_monotone_in_gain_below_a():
    # var(J) = (sigma_w^2 + beta^2 sigma_s^2) / (1 - (a - beta)^2) decreases
    # with beta only on [0, a]; past that the sensor noise term takes over
    spec = SystemSpec("linear-plant", n_steps=30000, transient_steps=2000, seed=6)
    variances = [simulate_controlled(spec, g).column("J").var() for g in (0.0, 0.3, 0.6, 0.9)]
    assert all(a > b for a, b in zip(variances, variances[1:]))


def test_symbolic_suite_exact_joints_normalized():
    for fx in symbolic_map_suite().values():
        assert fx.exact_joint.probs.sum() == pytest.approx(1.0, abs=1e-12)
        assert fx.exact_joint.ndim == fx.n_variables + 1


def test_symbolic_sample_matches_exact_joint():
    # empirical lagged joint of the markov fixture approaches the exact one
    from infodyn.discretization import estimate_joint_pmf
    fx = symbolic_map_suite()["markov_pair"]
    sym = fx.sample(200000, seed=7)
    emp = estimate_joint_pmf(sym, [(1, 1), (0, 0), (1, 0)])
    assert np.allclose(emp.to_dense(), fx.exact_joint.to_dense(), atol=5e-3)


def test_symbolic_map_simulate_needs_name():
    with pytest.raises(ValueError, match="name"):
        simulate(SystemSpec("symbolic-map", n_steps=100, transient_steps=0))
