"""Spatial discretization and the method-of-lines integrator."""

import math

import numpy as np
import pytest

from sisrd.incidence import CustomIncidence, LinearIncidence
from sisrd.model import BlowUpError, ModelParams
from sisrd.ode import integrate_ode
from sisrd.pde import (
    Field1D,
    apply_laplacian_neumann,
    boundary_flux,
    boundedness_check,
    integrate_pde,
    spatial_variance,
    stable_time_step,
)

EX1_SET1_PDE = (
    ModelParams(Lambda=8, mu=1, lam=1 / 3, sigma=2, d1=3.0, d2=1.25),
    LinearIncidence(alpha=3.0),
)


def cos_mode(L, n, amplitude=1.0):
    return Field1D.from_callable(L, n, lambda x: amplitude * np.cos(np.pi * x / L))


class TestField:
    def test_grid_properties(self):
        f = Field1D.constant(10.0, 201, 1.5)
        assert f.n == 201
        assert f.dx == pytest.approx(0.05)
        assert f.x[0] == 0.0
        assert f.x[-1] == 10.0

    def test_validation(self):
        with pytest.raises(ValueError):
            Field1D(10.0, np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            Field1D(-1.0, np.zeros(5))
        with pytest.raises(ValueError):
            Field1D(1.0, np.array([1.0, np.nan, 2.0]))


class TestLaplacian:
    def test_constant_field_maps_to_zero(self):
        f = Field1D.constant(10.0, 101, 3.7)
        assert np.max(np.abs(apply_laplacian_neumann(f).values)) == 0.0

    def test_neumann_eigenfunction(self):
        # cos(pi x / L) has Laplacian -(pi/L)^2 cos(pi x / L) and zero
        # flux at both walls, so the discrete operator should match it
        # to O(dx^2) everywhere including the boundary rows.
        L, n = 10.0, 401
        f = cos_mode(L, n)
        lap = apply_laplacian_neumann(f)
        exact = -((np.pi / L) ** 2) * f.values
        assert np.max(np.abs(lap.values - exact)) < 1e-4

    def test_quadratic_interior_exact(self):
        f = Field1D.from_callable(1.0, 101, lambda x: x**2)
        lap = apply_laplacian_neumann(f)
        np.testing.assert_allclose(lap.values[1:-1], 2.0, rtol=1e-9)
        # Ghost reflection imposes zero slope, so the walls deviate.
        assert abs(lap.values[-1] - 2.0) > 1.0

    def test_second_order_convergence(self):
        L = 10.0

        def sup_error(n):
            f = cos_mode(L, n)
            lap = apply_laplacian_neumann(f)
            return np.max(np.abs(lap.values - (-((np.pi / L) ** 2)) * f.values))

        assert sup_error(101) / sup_error(201) >= 3.8
        assert sup_error(201) / sup_error(401) >= 3.8


class TestTimeStep:
    def test_diffusive_step(self):
        p, _ = EX1_SET1_PDE
        dx = 0.05
        assert stable_time_step(p, dx) == pytest.approx(0.4 * dx**2 / (2 * 3.0))

    def test_reaction_cap_for_diffusion_free(self):
        p = ModelParams(Lambda=8, mu=1, lam=1 / 3, sigma=2)
        assert stable_time_step(p, 0.05) == 1e-3


class TestIntegration:
    def test_constant_data_stays_constant_and_matches_ode(self):
        p, spec = EX1_SET1_PDE
        u0 = Field1D.constant(10.0, 201, 4.0)
        v0 = Field1D.constant(10.0, 201, 5.0)
        dt = stable_time_step(p, u0.dx)
        snaps = integrate_pde(p, spec, u0, v0, t_end=5.0, snapshot_every=1.0)
        for snap in snaps:
            assert np.ptp(snap.u.values) < 1e-12
            assert np.ptp(snap.v.values) < 1e-12
        ode_p = ModelParams(Lambda=8, mu=1, lam=1 / 3, sigma=2)
        traj = integrate_ode(ode_p, spec, 4.0, 5.0, t_end=5.0, dt=dt, stride=10**9)
        assert snaps[-1].u.values[0] == pytest.approx(traj.final.u, abs=1e-8)
        assert snaps[-1].v.values[0] == pytest.approx(traj.final.v, abs=1e-8)

    def test_numba_and_numpy_paths_agree(self):
        p, spec = EX1_SET1_PDE
        u0 = Field1D.from_callable(10.0, 101, lambda x: 4 + np.cos(x) / 10)
        v0 = Field1D.from_callable(10.0, 101, lambda x: 5 + np.sin(x) / 10)
        fast = integrate_pde(p, spec, u0, v0, t_end=0.5, snapshot_every=0.5, accelerate=True)
        slow = integrate_pde(p, spec, u0, v0, t_end=0.5, snapshot_every=0.5, accelerate=False)
        assert np.max(np.abs(fast[-1].u.values - slow[-1].u.values)) < 1e-12
        assert np.max(np.abs(fast[-1].v.values - slow[-1].v.values)) < 1e-12

    def test_custom_incidence_uses_fallback(self):
        p, _ = EX1_SET1_PDE
        spec = CustomIncidence(phi_fn=lambda v: 3.0 * v, dphi_fn=lambda v: 3.0 + 0 * v, slope0=3.0)
        u0 = Field1D.constant(10.0, 51, 4.0)
        v0 = Field1D.constant(10.0, 51, 5.0)
        snaps = integrate_pde(p, spec, u0, v0, t_end=0.2, snapshot_every=0.1)
        reference = integrate_pde(p, LinearIncidence(alpha=3.0), u0, v0, t_end=0.2, snapshot_every=0.1)
        assert np.max(np.abs(snaps[-1].u.values - reference[-1].u.values)) < 1e-12

    def test_short_run_decays_toward_endemic_state(self):
        p, spec = EX1_SET1_PDE
        u0 = Field1D.from_callable(10.0, 201, lambda x: 4 + np.cos(x) / 10)
        v0 = Field1D.from_callable(10.0, 201, lambda x: 5 + np.sin(x) / 10)
        snaps = integrate_pde(p, spec, u0, v0, t_end=10.0)
        first = max(np.max(np.abs(snaps[0].u.values - 2)), np.max(np.abs(snaps[0].v.values - 3)))
        last = max(np.max(np.abs(snaps[-1].u.values - 2)), np.max(np.abs(snaps[-1].v.values - 3)))
        assert last < 0.05 * first

    def test_snapshot_schedule(self):
        p, spec = EX1_SET1_PDE
        u0 = Field1D.constant(10.0, 51, 4.0)
        v0 = Field1D.constant(10.0, 51, 5.0)
        snaps = integrate_pde(p, spec, u0, v0, t_end=3.0, snapshot_every=1.0)
        times = [snap.t for snap in snaps]
        assert times[0] == 0.0
        assert times[-1] == pytest.approx(3.0, abs=1e-9)
        assert len(times) == 4
        assert all(b > a for a, b in zip(times, times[1:]))

    def test_blow_up_detected_with_oversized_step(self):
        p, spec = EX1_SET1_PDE
        u0 = Field1D.from_callable(10.0, 51, lambda x: 4 + np.cos(x) / 10)
        v0 = Field1D.constant(10.0, 51, 5.0)
        with pytest.raises(BlowUpError):
            integrate_pde(p, spec, u0, v0, t_end=50.0, snapshot_every=10.0, dt=0.5)

    def test_input_validation(self):
        p, spec = EX1_SET1_PDE
        u0 = Field1D.constant(10.0, 51, 1.0)
        v_smaller = Field1D.constant(10.0, 41, 1.0)
        with pytest.raises(ValueError):
            integrate_pde(p, spec, u0, v_smaller, t_end=1.0)
        v_neg = Field1D.constant(10.0, 51, -1.0)
        with pytest.raises(ValueError):
            integrate_pde(p, spec, u0, v_neg, t_end=1.0)
        with pytest.raises(ValueError):
            integrate_pde(p, spec, u0, u0, t_end=1.0, dt=1e-15)


@pytest.fixture(scope="module")
def example_run():
    p, spec = EX1_SET1_PDE
    u0 = Field1D.from_callable(10.0, 201, lambda x: 4 + np.cos(x) / 10)
    v0 = Field1D.from_callable(10.0, 201, lambda x: 5 + np.sin(x) / 10)
    snaps = integrate_pde(p, spec, u0, v0, t_end=20.0, snapshot_every=0.5)
    return p, u0, v0, snaps


class TestMonitorsAndDiagnostics:

    def test_boundedness_passes(self, example_run):
        p, u0, v0, snaps = example_run
        report = boundedness_check(snaps, p, u0, v0)
        assert report.passed

    def test_boundedness_equality_at_disease_free_fields(self):
        p, spec = EX1_SET1_PDE
        u0 = Field1D.constant(10.0, 101, p.Lambda / p.mu)
        v0 = Field1D.constant(10.0, 101, 0.0)
        snaps = integrate_pde(p, spec, u0, v0, t_end=2.0)
        report = boundedness_check(snaps, p, u0, v0)
        assert report.passed
        assert snaps[-1].sup_u == pytest.approx(p.Lambda / p.mu, rel=1e-12)

    def test_sup_u_approaches_recruitment_bound(self, example_run):
        p, _, _, snaps = example_run
        assert snaps[-1].sup_u <= p.Lambda / p.mu + 1e-2

    def test_zero_flux_after_transient_on_every_reference_run(self, pde_runs):
        # The published initial profiles do not satisfy the zero-flux
        # condition (cos(x)/10 has slope 0.054 at x = 10), so early
        # snapshots are excluded; the solution enforces the boundary
        # condition within a short diffusive transient (observed flux
        # is below 3e-8 from t = 2 on in every reference run).
        for label, (result, _) in pde_runs.items():
            for snap in result.snapshots:
                if snap.t < 2.0:
                    continue
                for field in (snap.u, snap.v):
                    left, right = boundary_flux(field)
                    assert abs(left) < 1e-6, (label, snap.t)
                    assert abs(right) < 1e-6, (label, snap.t)

    def test_homogenization_on_every_reference_run(self, pde_runs):
        # Spatial variance decays to the constant steady state.  Deep in
        # the tail, coupling between almost-extinct u and v modes can
        # lift the variance by a few percent (observed only at levels
        # below 2e-12); the slack tolerates that while staying well
        # under the 1e-8 target.
        for label, (result, _) in pde_runs.items():
            for get in (lambda s: s.u, lambda s: s.v):
                var = [spatial_variance(get(s)) for s in result.snapshots]
                for a, b in zip(var, var[1:]):
                    assert b <= a * 1.10 + 1e-11, (label, a, b)
                assert var[-1] < 1e-8, label

    def test_discrete_mass_identity(self):
        # d/dt of the trapezoid mass equals L*Lambda - integral of
        # (mu*u + sigma*v); check with centered differences on a finely
        # sampled short run.
        p, spec = EX1_SET1_PDE
        u0 = Field1D.from_callable(10.0, 201, lambda x: 4 + np.cos(x) / 10)
        v0 = Field1D.from_callable(10.0, 201, lambda x: 5 + np.sin(x) / 10)
        snaps = integrate_pde(p, spec, u0, v0, t_end=0.5, snapshot_every=0.01)
        times = np.array([s.t for s in snaps])
        masses = np.array([s.mass for s in snaps])
        for i in range(1, len(snaps) - 1):
            fd = (masses[i + 1] - masses[i - 1]) / (times[i + 1] - times[i - 1])
            snap = snaps[i]
            sink = np.trapezoid(p.mu * snap.u.values + p.sigma * snap.v.values, dx=snap.u.dx)
            rhs_value = 10.0 * p.Lambda - sink
            assert fd == pytest.approx(rhs_value, abs=5e-3 * max(1.0, abs(rhs_value)))
