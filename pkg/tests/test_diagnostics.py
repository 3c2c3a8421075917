import numpy as np
import pytest

from vqelab import circuit, diagnostics, geometry, optim, pauli, precond
from .test_pauli import random_hamiltonian


class TestHaarPrediction:
    def test_one_qubit_closed_form(self):
        # H = Z, generator X/2: G = i[X/2, Z] = Y, tr(G^2)/d = 1, d = 2
        H = pauli.QubitHamiltonian(1, (pauli.PauliTerm(1.0, {0: "Z"}),))
        gen = diagnostics.GeneratorSpec(0, "X", 0)
        assert diagnostics.haar_variance_prediction(H, gen, 2) == pytest.approx(1 / 3)

    def test_commuting_generator_zero_variance(self):
        H = pauli.QubitHamiltonian(1, (pauli.PauliTerm(1.0, {0: "Z"}),))
        gen = diagnostics.GeneratorSpec(0, "Z", 0)
        assert diagnostics.haar_variance_prediction(H, gen, 2) == pytest.approx(0.0)

    def test_matches_monte_carlo(self):
        # Haar sampling oracle via QR of a Ginibre matrix
        rng = np.random.default_rng(0)
        H = random_hamiltonian(rng, 2, n_terms=3)
        gen = diagnostics.GeneratorSpec(0, "Y", 1)
        pred = diagnostics.haar_variance_prediction(H, gen, 4)
        Hm = pauli.to_sparse(H).toarray()
        A = 0.5 * pauli.to_sparse(pauli.QubitHamiltonian(
            2, (pauli.PauliTerm(1.0, {1: "Y"}),))).toarray()
        G = 1j * (A @ Hm - Hm @ A)
        samples = []
        for _ in range(20000):
            z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            q, r = np.linalg.qr(z)
            q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
            psi = q[:, 0]
            samples.append(np.vdot(psi, G @ psi).real)
        samples = np.array(samples)
        mc = samples.var(ddof=1)
        se = mc * np.sqrt(2.0 / (len(samples) - 1))
        assert abs(pred - mc) < 4 * se

    def test_dim_mismatch_rejected(self):
        H = pauli.QubitHamiltonian(2, (pauli.PauliTerm(1.0, {0: "Z"}),))
        with pytest.raises(ValueError):
            diagnostics.haar_variance_prediction(
                H, diagnostics.GeneratorSpec(0, "X", 0), 2)

    def test_qubit_cap(self):
        H = pauli.QubitHamiltonian(7, (pauli.PauliTerm(1.0, {0: "Z"}),))
        with pytest.raises(ValueError, match="capped"):
            diagnostics.haar_variance_prediction(
                H, diagnostics.GeneratorSpec(0, "X", 0), 1 << 7)


class TestVarianceScan:
    def builder(self, N):
        return pauli.QubitHamiltonian(
            N, (pauli.PauliTerm(1.0, {N // 2: "Z"}),))

    def test_uniform_scan_shrinks_with_size(self):
        rows = diagnostics.gradient_variance_scan(
            [2, 4], 1, self.builder, {"uniform": "uniform"}, 200, seed=0)
        by_n = {r.n_qubits: r.variance for r in rows}
        assert by_n[4] < by_n[2]

    def test_seeded_reproducible(self):
        a = diagnostics.gradient_variance_scan(
            [3], 1, self.builder, {"uniform": "uniform"}, 50, seed=5)
        b = diagnostics.gradient_variance_scan(
            [3], 1, self.builder, {"uniform": "uniform"}, 50, seed=5)
        assert a[0].variance == b[0].variance

    def test_basin_ensemble_concentrates(self):
        # tight basin around a stationary point gives much smaller variance
        # than the uniform ensemble
        N = 3
        spec = circuit.AnsatzSpec(N, 1)
        center = np.zeros(spec.n_parameters)
        ens = {N: diagnostics.BasinEnsemble(center, 1e-4)}
        rows = diagnostics.gradient_variance_scan(
            [N], 1, self.builder, {"basin": ens, "uniform": "uniform"},
            150, seed=1)
        by_name = {r.ensemble: r.variance for r in rows}
        assert by_name["basin"] < by_name["uniform"] / 10

    def test_slope_fit_on_synthetic_rows(self):
        rows = [
            diagnostics.VarianceScanRow(4, "u", 2.0 ** (-4), 0.0, 16, 0, 10),
            diagnostics.VarianceScanRow(6, "u", 2.0 ** (-6), 0.0, 64, 0, 10),
            diagnostics.VarianceScanRow(8, "u", 2.0 ** (-8), 0.0, 256, 0, 10),
        ]
        assert diagnostics.fit_log2_slope(rows, "u") == pytest.approx(-1.0)

    def test_too_few_samples_rejected(self):
        with pytest.raises(ValueError):
            diagnostics.gradient_variance_scan(
                [2], 1, self.builder, {"uniform": "uniform"}, 1, seed=0)


class TestCurvatureBounds:
    def stationary_setup(self, seed=0):
        # converge a small instance to a strict local minimum
        rng = np.random.default_rng(seed)
        n = 3
        spec = circuit.AnsatzSpec(n, 1)
        H = random_hamiltonian(rng, n, n_terms=4)
        mat = pauli.to_sparse(H)
        obj = lambda t: circuit.energy(spec, t, H, _sparse=mat)
        grad = lambda t: circuit._gradient_adjoint(spec, t, H, _sparse=mat)
        rep = optim.minimize_lbfgs(obj, grad, rng.uniform(-1, 1, spec.n_parameters),
                                   tol=1e-12, max_evals=4000)
        return spec, rep.final_parameters, H

    def test_sandwich_holds_at_minimum(self):
        spec, theta, H = self.stationary_setup(3)
        rep = diagnostics.curvature_bounds_check(
            spec, theta, 1e-4, H, 300, seed=0)
        assert rep.passed
        assert rep.lower_bound <= rep.var_empirical <= rep.upper_bound

    def test_nonstationary_rejected(self):
        spec = circuit.AnsatzSpec(2, 1)
        H = pauli.QubitHamiltonian(2, (pauli.PauliTerm(1.0, {0: "Z"}),))
        theta = np.full(spec.n_parameters, 0.3)
        with pytest.raises(ValueError, match="stationary"):
            diagnostics.curvature_bounds_check(spec, theta, 1e-4, H, 10)

    def test_redundant_direction_flagged(self):
        spec, theta, H = self.stationary_setup(5)
        hess = circuit.hessian(spec, theta, H)
        evals, evecs = np.linalg.eigh(hess)
        idx = int(np.argmin(np.abs(evals)))
        if abs(evals[idx]) > 1e-6:
            pytest.skip("instance has no redundant direction")
        rep = diagnostics.curvature_bounds_check(
            spec, theta, 1e-4, H, 50, direction=evecs[:, idx], seed=1)
        assert rep.redundant_direction


class TestHessianSpectrum:
    def test_counts(self):
        rng = np.random.default_rng(0)
        spec = circuit.AnsatzSpec(3, 1)
        H = random_hamiltonian(rng, 3)
        theta = rng.uniform(-np.pi, np.pi, spec.n_parameters)
        sp = diagnostics.hessian_spectrum(spec, theta, H)
        assert len(sp.eigenvalues) == spec.n_parameters
        assert sp.n_negative == int(np.sum(sp.eigenvalues < -1e-6))
        assert np.all(np.diff(sp.eigenvalues) >= 0)

    def test_param_cap(self):
        spec = circuit.AnsatzSpec(14, 10)
        H = pauli.QubitHamiltonian(14, (pauli.PauliTerm(1.0, {0: "Z"}),))
        with pytest.raises(ValueError, match="cost guard"):
            diagnostics.hessian_spectrum(spec, np.zeros(spec.n_parameters), H)


class TestTails:
    def setup_chain(self):
        params = pauli.ChainModelParams(J0=0.05)
        base = geometry.linear_chain("H", 3, 1.0)
        build = lambda g: pauli.build_chain_model(g, params)
        return base, build, circuit.AnsatzSpec(3, 1)

    def test_replay_strategy_zero_error_at_zero_disorder(self):
        base, build, spec = self.setup_chain()
        H = build(base)
        mat = pauli.to_sparse(H)
        obj = lambda t: circuit.energy(spec, t, H, _sparse=mat)
        grad = lambda t: circuit._gradient_adjoint(spec, t, H, _sparse=mat)
        cfg = optim.BasinHoppingConfig(hop_steps=8, restarts=2, seed=0,
                                       local_max_evals=2000, local_tol=1e-12)
        rep = optim.basin_hopping(obj, grad, np.zeros(spec.n_parameters), cfg)
        stats = diagnostics.init_error_tail(
            diagnostics.strategy_replay(rep.final_parameters),
            base, build, spec, 100, 0.0, seed=0)
        assert stats.quantiles[99.0] < 1e-8

    def test_minimum_samples_enforced(self):
        base, build, spec = self.setup_chain()
        with pytest.raises(ValueError):
            diagnostics.init_error_tail(diagnostics.strategy_random(),
                                        base, build, spec, 50, 0.05, seed=0)

    def test_random_strategy_statistics_shape(self):
        base, build, spec = self.setup_chain()
        stats = diagnostics.init_error_tail(diagnostics.strategy_random(),
                                            base, build, spec, 100, 0.02, seed=1)
        assert stats.n == 100
        assert set(stats.quantiles) == {50.0, 90.0, 99.0, 99.9}
        assert stats.quantiles[50.0] <= stats.quantiles[99.9]
        assert stats.max >= stats.quantiles[99.9] - 1e-12
        assert np.all(stats.samples > -1e-9)   # never below the ground energy


class TestWilson:
    def test_known_value(self):
        lo, hi = diagnostics.wilson_interval(8, 10)
        assert 0.44 < lo < 0.50
        assert 0.94 < hi < 0.98

    def test_degenerate_cases(self):
        assert diagnostics.wilson_interval(0, 0) == (0.0, 1.0)
        lo, hi = diagnostics.wilson_interval(10, 10)
        assert hi == pytest.approx(1.0) and lo > 0.6

    def test_monotone_in_successes(self):
        los = [diagnostics.wilson_interval(k, 20)[0] for k in range(21)]
        assert los == sorted(los)


class TestDisorderScan:
    def test_threshold_infinity_all_succeed(self):
        base = geometry.linear_chain("H", 3, 1.0)
        spec = circuit.AnsatzSpec(3, 1)
        res = diagnostics.disorder_success_scan(
            [0.0, 0.05], ["random"], budget=8, threshold=np.inf,
            n_trials=3, seed=0, base_geometry=base,
            chain_params=pauli.ChainModelParams(J0=0.05), spec=spec)
        assert np.all(res.strategies["random"].probability == 1.0)
        assert res.grid_average("random") == 1.0

    def test_model_required_for_equivariant(self):
        base = geometry.linear_chain("H", 3, 1.0)
        spec = circuit.AnsatzSpec(3, 1)
        with pytest.raises(ValueError, match="model"):
            diagnostics.disorder_success_scan(
                [0.0], ["equivariant"], 10, 1e-3, 2, 0,
                base_geometry=base, chain_params=pauli.ChainModelParams(),
                spec=spec)

    def test_unknown_strategy_rejected(self):
        base = geometry.linear_chain("H", 3, 1.0)
        spec = circuit.AnsatzSpec(3, 1)
        with pytest.raises(ValueError, match="unknown strategy"):
            diagnostics.disorder_success_scan(
                [0.0], ["annealing"], 10, 1e-3, 2, 0,
                base_geometry=base, chain_params=pauli.ChainModelParams(),
                spec=spec)

    def test_seeded_reproducible(self):
        base = geometry.linear_chain("H", 3, 1.0)
        spec = circuit.AnsatzSpec(3, 1)
        kw = dict(base_geometry=base,
                  chain_params=pauli.ChainModelParams(J0=0.05), spec=spec)
        a = diagnostics.disorder_success_scan([0.03], ["random"], 20, 1e-3, 4, 9, **kw)
        b = diagnostics.disorder_success_scan([0.03], ["random"], 20, 1e-3, 4, 9, **kw)
        np.testing.assert_array_equal(a.strategies["random"].successes,
                                      b.strategies["random"].successes)


class TestLandscape:
    def test_grid_shape_and_center(self):
        rng = np.random.default_rng(0)
        spec = circuit.AnsatzSpec(2, 1)
        H = random_hamiltonian(rng, 2)
        center = rng.uniform(-1, 1, spec.n_parameters)
        d1 = np.zeros(spec.n_parameters); d1[0] = 1.0
        d2 = np.zeros(spec.n_parameters); d2[1] = 1.0
        rows = diagnostics.landscape_grid(spec, center, d1, d2, (0.5, 0.5), 5, H)
        assert len(rows) == 25
        mid = [r for r in rows if r[0] == 0.0 and r[1] == 0.0]
        assert abs(mid[0][2] - circuit.energy(spec, center, H)) < 1e-12

    def test_resolution_one_single_point(self):
        rng = np.random.default_rng(1)
        spec = circuit.AnsatzSpec(2, 0)
        H = random_hamiltonian(rng, 2)
        center = np.zeros(spec.n_parameters)
        d1 = np.zeros(4); d1[0] = 1.0
        d2 = np.zeros(4); d2[1] = 1.0
        rows = diagnostics.landscape_grid(spec, center, d1, d2, (1, 1), 1, H)
        assert len(rows) == 1 and rows[0][:2] == (0.0, 0.0)

    def test_non_orthonormal_rejected(self):
        spec = circuit.AnsatzSpec(2, 0)
        H = pauli.QubitHamiltonian(2, (pauli.PauliTerm(1.0, {0: "Z"}),))
        d = np.zeros(4); d[0] = 1.0
        with pytest.raises(ValueError):
            diagnostics.landscape_grid(spec, np.zeros(4), d, d, (1, 1), 3, H)
        with pytest.raises(ValueError):
            diagnostics.landscape_grid(spec, np.zeros(4), 2 * d, d, (1, 1), 3, H)


class TestShotCost:
    def test_formula(self):
        est = diagnostics.shot_cost(4.0, 2e-3, 10, 100)
        assert est.n_shots == int(np.ceil(4.0 / 4e-6))
        assert est.total_cost == est.n_shots * 110

    def test_band_for_chemical_accuracy(self):
        # the published band is order-of-magnitude (~10^6 - 10^7)
        for var in (2.5, 10.0, 25.0):
            est = diagnostics.shot_cost(var, 1.6e-3, 0, 1)
            assert 0.9e6 <= est.n_shots <= 1.1e7

    def test_bad_epsilon(self):
        with pytest.raises(ValueError):
            diagnostics.shot_cost(1.0, 0.0, 1, 1)


class TestAmortization:
    def test_training_cost_amortizes(self):
        # beyond enough geometries the preconditioned protocol wins when it
        # skips the discovery phase
        few = diagnostics.pes_amortization(1, 1.0, 1e9, 1000, 100, 100)
        many = diagnostics.pes_amortization(10**6, 1.0, 1e9, 1000, 100, 100)
        assert few.cost_equivariant > few.cost_standard
        assert many.cost_equivariant < many.cost_standard


class TestBenchmark:
    def test_rows_and_improvement(self):
        params = pauli.ChainModelParams(J0=0.05)
        g = geometry.linear_chain("H", 3, 1.0)
        H = pauli.build_chain_model(g, params)
        e_ref = pauli.exact_ground_state(H).ground_energy
        H = pauli.QubitHamiltonian(
            3, H.terms, source="chain-3", geometry=g,
            reference_energies={"fci": e_ref}, hf_bitstring=(1, 1, 1))
        spec = circuit.AnsatzSpec(3, 1)
        theta0 = precond.hf_theta(spec, (1, 1, 1))
        rows = diagnostics.benchmark_table([(H, theta0, spec)])
        assert rows[0].complete
        expected_hf = pauli.basis_state_energy(H, (1, 1, 1)) - e_ref
        assert rows[0].delta_e_hf == pytest.approx(expected_hf)
        assert rows[0].delta_e_precond == pytest.approx(expected_hf)

    def test_missing_metadata_incomplete_not_dropped(self):
        H = pauli.QubitHamiltonian(2, (pauli.PauliTerm(1.0, {0: "Z"}),),
                                   source="bare")
        rows = diagnostics.benchmark_table([(H, None, circuit.AnsatzSpec(2, 0))])
        assert len(rows) == 1
        assert not rows[0].complete
        assert rows[0].delta_e_hf is None

    def test_format_table_runs(self):
        H = pauli.QubitHamiltonian(2, (pauli.PauliTerm(1.0, {0: "Z"}),))
        rows = diagnostics.benchmark_table([(H, None, circuit.AnsatzSpec(2, 0))])
        text = diagnostics.format_benchmark_table(rows)
        assert "System" in text and "--" in text
