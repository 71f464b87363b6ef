import numpy as np
import pytest

from helpers import (
    STD_DT,
    STD_MASS,
    npfft_centroid,
    std_grid,
    std_packet,
    std_tidal,
)
from wavefall import (
    BoundaryContact,
    EvolveConfig,
    OutsideValidity,
    PacketShape,
    StepScheme,
    StepTooLarge,
    TidalMatrix,
    TimestampMismatch,
    TooFewRecords,
    WaveFunction,
    acceleration_series,
    evolve,
    kinetic_step,
    make_packet,
    mean_position,
    mean_velocity_spectral,
    norm,
    tidal_step,
)

TWO_PI = 2.0 * np.pi


class TestKineticStep:
    def test_single_mode_phase(self):
        grid = std_grid(n=64)
        k1 = grid.axis_wavenumbers[7]
        psi = np.exp(1j * k1 * grid.axis_positions)
        wf = WaveFunction(grid=grid, psi=psi, mass=STD_MASS)
        stepped = kinetic_step(wf, STD_DT)
        ratio = stepped.psi / psi
        expected = np.exp(-1j * k1 ** 2 * STD_DT / (4 * np.pi * STD_MASS))
        assert np.allclose(ratio, expected, atol=1e-12)
        assert stepped.t == wf.t + STD_DT

    def test_zero_mode_unchanged(self):
        grid = std_grid(n=16)
        psi = np.ones(16, dtype=complex)
        stepped = kinetic_step(WaveFunction(grid=grid, psi=psi, mass=STD_MASS), STD_DT)
        assert np.allclose(stepped.psi, psi, atol=1e-14)

    def test_conserves_norm_and_velocity(self):
        wf = std_packet(std_grid(), v0=0.01)
        stepped = kinetic_step(wf, STD_DT)
        assert abs(norm(stepped) - norm(wf)) < 1e-12
        dv = mean_velocity_spectral(stepped) - mean_velocity_spectral(wf)
        assert np.max(np.abs(dv)) < 1e-12

    def test_group_velocity_drift(self):
        # <x> advances by <v> dt; cross-checked against a raw-numpy centroid
        wf = std_packet(std_grid(), v0=0.01)
        stepped = kinetic_step(wf, STD_DT)
        shift = mean_position(stepped)[0] - mean_position(wf)[0]
        assert shift == pytest.approx(0.001, abs=1e-10)
        k_indep = npfft_centroid(wf.psi, wf.grid)[0]
        assert shift == pytest.approx(k_indep / (TWO_PI * STD_MASS) * STD_DT, abs=1e-10)

    def test_phase_budget_guard(self):
        wf = std_packet(std_grid(), mass=100.0)
        with pytest.raises(StepTooLarge):
            kinetic_step(wf, 10.0)


class TestTidalStep:
    def test_zero_curvature_is_identity(self):
        wf = std_packet(std_grid())
        stepped = tidal_step(wf, TidalMatrix.zero(1), STD_DT)
        assert np.array_equal(stepped.psi, wf.psi)
        assert stepped.t == wf.t

    def test_centered_packet_gets_no_kick(self):
        wf = std_packet(std_grid(), x0=0.0)
        stepped = tidal_step(wf, std_tidal(), STD_DT)
        dv = mean_velocity_spectral(stepped) - mean_velocity_spectral(wf)
        assert np.max(np.abs(dv)) < 1e-12

    def test_kick_matches_grid_sum_oracle(self):
        # <dv> = sum |psi|^2 (-R x dt) dV evaluated directly on the lattice
        grid = std_grid()
        wf = std_packet(grid, x0=2.0)
        tidal = std_tidal()
        stepped = tidal_step(wf, tidal, STD_DT)
        dv = (mean_velocity_spectral(stepped) - mean_velocity_spectral(wf))[0]
        rho = np.abs(wf.psi) ** 2 * grid.cell_volume
        oracle = float((rho * (-tidal.entries[0, 0] * grid.axis_positions * STD_DT)).sum())
        assert dv == pytest.approx(oracle, abs=1e-10)
        assert dv == pytest.approx(-2e-5, abs=1e-10)

    def test_position_norm_time_unchanged(self):
        wf = std_packet(std_grid(), x0=2.0)
        stepped = tidal_step(wf, std_tidal(), STD_DT)
        assert stepped.t == wf.t
        assert abs(norm(stepped) - norm(wf)) < 1e-12
        assert abs(mean_position(stepped)[0] - mean_position(wf)[0]) < 1e-12

    def test_kick_is_shape_blind(self):
        grid = std_grid()
        tidal = std_tidal()
        for shape in (PacketShape.gaussian(1.0),
                      PacketShape.skewed_gaussian(1.0, skew=1.0),
                      PacketShape.double_peak(0.7, half_separation=1.2)):
            wf = make_packet(grid, shape, [2.0], [0.0], STD_MASS)
            stepped = tidal_step(wf, tidal, STD_DT)
            dv = mean_velocity_spectral(stepped) - mean_velocity_spectral(wf)
            kick = tidal.apply(mean_position(wf)) * STD_DT
            assert np.max(np.abs(dv + kick)) < 1e-10

    def test_guards(self):
        wf = std_packet(std_grid())
        with pytest.raises(StepTooLarge):
            tidal_step(wf, TidalMatrix([[1.0]]), 1.0)
        with pytest.raises(OutsideValidity):
            tidal_step(wf, TidalMatrix([[5e-4]]), 0.01)

    def test_exact_rate_variant(self):
        # un-truncated clock-rate imprint differs by the bounded series tail
        # 2 pi mu dt |sqrt(1+q) - 1 - q/2| <= 2 pi mu dt q^2/8 at the edge
        grid = std_grid()
        wf = std_packet(grid, x0=2.0)
        tidal = std_tidal()
        first = tidal_step(wf, tidal, STD_DT)
        exact = tidal_step(wf, tidal, STD_DT, exact_rate=True)
        phase_gap = np.abs(np.angle(exact.psi * np.conj(first.psi)))
        q_edge = tidal.entries[0, 0] * (grid.extent / 2.0) ** 2
        bound = 2 * np.pi * STD_MASS * STD_DT * q_edge ** 2 / 8.0
        assert float(np.max(phase_gap)) <= bound * 1.01
        assert abs(norm(exact) - 1.0) < 1e-12
        # the kick changes only at the series-tail level
        dv_first = mean_velocity_spectral(first)[0] - mean_velocity_spectral(wf)[0]
        dv_exact = mean_velocity_spectral(exact)[0] - mean_velocity_spectral(wf)[0]
        assert dv_exact == pytest.approx(dv_first, rel=1e-3)


class TestEvolve:
    def test_free_packet_momentum_and_linearity(self):
        wf = std_packet(std_grid(), x0=0.0, v0=0.01)
        cfg = EvolveConfig(dt=STD_DT, n_steps=1000, record_every=50)
        series = evolve(wf, TidalMatrix.zero(1), StepScheme.STRANG, cfg)
        assert np.max(np.abs(series.mean_v - series.mean_v[0])) < 1e-12
        line = series.mean_x[0, 0] + series.mean_v[0, 0] * (series.t - series.t[0])
        assert np.max(np.abs(series.mean_x[:, 0] - line)) < 1e-10

    def test_norm_stays_unit(self):
        wf = std_packet(std_grid(), x0=2.0)
        cfg = EvolveConfig(dt=STD_DT, n_steps=200, record_every=10)
        series = evolve(wf, std_tidal(), StepScheme.STRANG, cfg)
        assert np.max(np.abs(series.norm - 1.0)) < 1e-12 * 200

    def test_strang_step_equals_composed_ops(self):
        wf = std_packet(std_grid(), x0=2.0)
        tidal = std_tidal()
        cfg = EvolveConfig(dt=STD_DT, n_steps=1)
        series = evolve(wf, tidal, StepScheme.STRANG, cfg)
        composed = tidal_step(kinetic_step(tidal_step(wf, tidal, STD_DT / 2), STD_DT),
                              tidal, STD_DT / 2)
        assert np.max(np.abs(series.final_state.psi - composed.psi)) < 1e-14
        assert series.final_state.t == composed.t

    def test_lie_step_equals_composed_ops(self):
        wf = std_packet(std_grid(), x0=2.0)
        tidal = std_tidal()
        series = evolve(wf, tidal, StepScheme.LIE, EvolveConfig(dt=STD_DT, n_steps=1))
        composed = tidal_step(kinetic_step(wf, STD_DT), tidal, STD_DT)
        assert np.max(np.abs(series.final_state.psi - composed.psi)) < 1e-14

    def test_exact_rate_run_stays_close_to_classical(self):
        from wavefall import ClassicalState, match_metric, rk4_integrate
        wf = std_packet(std_grid(n=512), x0=2.0)
        cfg = EvolveConfig(dt=STD_DT, n_steps=400, record_every=10)
        series = evolve(wf, std_tidal(), StepScheme.STRANG, cfg, exact_rate=True)
        ref = rk4_integrate(ClassicalState(x=[2.0], v=[0.0]), std_tidal(),
                            STD_DT, 400).every(10)
        # the series tail adds an O(eps^2) force correction on top of the
        # splitting error; stays well inside the weak-field budget
        assert match_metric(series, ref) < 1e-4

    def test_record_cadence_and_final_state(self):
        wf = std_packet(std_grid(), x0=2.0)
        cfg = EvolveConfig(dt=STD_DT, n_steps=20, record_every=7)
        series = evolve(wf, std_tidal(), StepScheme.STRANG, cfg)
        assert series.n_records == 3
        assert np.allclose(series.t, [0.0, 0.7, 1.4], atol=1e-12)
        assert series.final_state.t == pytest.approx(2.0, abs=1e-12)
        assert "epsilon" in series.diagnostics
        assert "dropped_cross_term_rel" in series.diagnostics

    def test_quarter_period_tracks_classical(self):
        # resolution chosen so the focused spectrum fits the lattice: the
        # packet reaches <k> ~ 2 pi mu w x0 with squeezed width 2 pi mu w s
        from wavefall import ClassicalState, match_metric, rk4_integrate
        grid = std_grid(n=512)
        wf = std_packet(grid, x0=2.0)
        cfg = EvolveConfig(dt=STD_DT, n_steps=1570, record_every=10)
        series = evolve(wf, std_tidal(), StepScheme.STRANG, cfg)
        ref = rk4_integrate(ClassicalState(x=[2.0], v=[0.0]), std_tidal(),
                            STD_DT, 1570).every(10)
        assert match_metric(series, ref) < 1e-6

    def test_mass_independence_short_run(self):
        # short arc on the coarse grid: spectra stay far from the lattice edge
        grid = std_grid()
        cfg = EvolveConfig(dt=STD_DT, n_steps=300, record_every=10)
        series = {}
        for mass in (100.0, 200.0):
            wf = std_packet(grid, x0=2.0, mass=mass)
            series[mass] = evolve(wf, std_tidal(), StepScheme.STRANG, cfg)
        dev = np.max(np.abs(series[100.0].mean_x - series[200.0].mean_x))
        assert dev < 1e-8

    def test_shape_independence_short_run(self):
        grid = std_grid()
        cfg = EvolveConfig(dt=STD_DT, n_steps=300, record_every=10)
        out = []
        for shape in (PacketShape.gaussian(1.0),
                      PacketShape.skewed_gaussian(1.0, skew=1.0),
                      PacketShape.double_peak(0.7, half_separation=1.2)):
            wf = make_packet(grid, shape, [2.0], [0.0], STD_MASS)
            out.append(evolve(wf, std_tidal(), StepScheme.STRANG, cfg).mean_x)
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                assert np.max(np.abs(out[i] - out[j])) < 1e-8

    def test_boundary_contact_initial(self):
        grid = std_grid()
        wf = std_packet(grid, x0=4.0)
        cfg = EvolveConfig(dt=STD_DT, n_steps=10, boundary_margin_fraction=0.3)
        with pytest.raises(BoundaryContact) as info:
            evolve(wf, std_tidal(), StepScheme.STRANG, cfg)
        assert info.value.step_index == 0
        assert info.value.partial is not None

    def test_boundary_contact_mid_run(self):
        # drifting packet walks into the margin band and aborts with partials
        grid = std_grid()
        wf = make_packet(grid, PacketShape.gaussian(1.0), [2.0], [0.05], 30.0)
        cfg = EvolveConfig(dt=STD_DT, n_steps=4000, record_every=10)
        with pytest.raises(BoundaryContact) as info:
            evolve(wf, TidalMatrix.zero(1), StepScheme.STRANG, cfg)
        exc = info.value
        assert 0 < exc.step_index < 4000
        assert exc.partial is not None and exc.partial.n_records > 1
        assert np.max(np.abs(exc.partial.norm - 1.0)) < 1e-10

    def test_step_budget_guards(self):
        wf = std_packet(std_grid())
        with pytest.raises(StepTooLarge):
            evolve(wf, std_tidal(), StepScheme.STRANG, EvolveConfig(dt=50.0, n_steps=1))
        with pytest.raises(OutsideValidity):
            evolve(wf, TidalMatrix([[5e-4]]), StepScheme.STRANG,
                   EvolveConfig(dt=0.01, n_steps=1))

    def test_config_validation(self):
        with pytest.raises(StepTooLarge):
            EvolveConfig(dt=-0.1, n_steps=10)
        with pytest.raises(ValueError):
            EvolveConfig(dt=0.1, n_steps=0)
        with pytest.raises(ValueError):
            EvolveConfig(dt=0.1, n_steps=1, boundary_margin_fraction=0.7)


class TestAccelerationSeries:
    def test_free_packet_zero_acceleration(self):
        wf = std_packet(std_grid(), x0=0.0, v0=0.01)
        cfg = EvolveConfig(dt=STD_DT, n_steps=100, record_every=10)
        series = evolve(wf, TidalMatrix.zero(1), StepScheme.STRANG, cfg)
        acc = acceleration_series(series)
        assert np.max(np.abs(acc)) < 1e-10

    def test_matches_tidal_force_pointwise(self):
        wf = std_packet(std_grid(), x0=2.0)
        tidal = std_tidal()
        cfg = EvolveConfig(dt=STD_DT, n_steps=400, record_every=1)
        series = evolve(wf, tidal, StepScheme.STRANG, cfg)
        acc = acceleration_series(series)
        expected = -series.mean_x @ tidal.entries.T
        assert np.max(np.abs(acc - expected)) < 1e-9

    def test_too_few_records(self):
        wf = std_packet(std_grid(), x0=2.0)
        series = evolve(wf, std_tidal(), StepScheme.STRANG,
                        EvolveConfig(dt=STD_DT, n_steps=10, record_every=10))
        assert series.n_records == 2
        with pytest.raises(TooFewRecords):
            acceleration_series(series)

    def test_nonuniform_spacing_rejected(self):
        wf = std_packet(std_grid(), x0=2.0)
        series = evolve(wf, std_tidal(), StepScheme.STRANG,
                        EvolveConfig(dt=STD_DT, n_steps=30, record_every=10))
        series.t = np.array([0.0, 1.0, 1.5, 3.0])
        with pytest.raises(TimestampMismatch):
            acceleration_series(series)
