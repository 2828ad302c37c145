"""Exact-solver tests: propagation, shooting, mesh convergence, wavefunctions."""

import math

import numpy as np
import pytest
from scipy.special import j0, j1, jn_zeros

from qdot import (
    LogMesh,
    MeshConvergenceError,
    QuantumNumbers,
    RadialProblem,
    build_mesh,
    gamma_sq_w,
    numerov_propagate,
    solve_exact,
    solve_on_mesh,
    solve_wkb,
    wavefunction_exact,
)
from qdot.numerov import DEFAULT_INTERVALS, ORIGIN_MARGIN

import oracles

J01_SQ = 5.783185962946783   # jn_zeros(0, 1)[0]**2, free-disc ground state at r0 = 1
J11_SQ = 14.681970642123895  # jn_zeros(1, 1)[0]**2


class TestGammaSqW:
    def test_quoted_values(self):
        p = RadialProblem(r0=10.0, coulomb_strength=2.0, m=1)
        assert gamma_sq_w(0.0, 5.0, p) == pytest.approx(2.0)
        p = RadialProblem(r0=10.0, coulomb_strength=1.0, m=0)
        assert gamma_sq_w(math.log(2.0), 1.0, p) == pytest.approx(2.0)

    def test_deep_origin_limit(self):
        p = RadialProblem(r0=1.0, coulomb_strength=2.0, m=2)
        assert gamma_sq_w(-40.0, 123.0, p) == pytest.approx(-4.0, abs=1e-12)

    def test_vectorized(self):
        p = RadialProblem(r0=1.0, coulomb_strength=1.0, m=1)
        w = np.array([-1.0, 0.0])
        out = gamma_sq_w(w, 2.0, p)
        assert out.shape == (2,)


class TestLogMesh:
    def test_validation(self):
        with pytest.raises(ValueError):
            LogMesh(w_min=0.0, w_max=0.0, n_intervals=128)
        with pytest.raises(ValueError):
            LogMesh(w_min=-1.0, w_max=0.0, n_intervals=32)

    def test_build_mesh_reference_case(self):
        p = RadialProblem(r0=1.0, coulomb_strength=1.0, m=0)
        mesh = build_mesh(p, 9.6186, 16384)
        assert mesh.w_max == 0.0
        # turning point Z/E = 0.103965..., inner edge ORIGIN_MARGIN below it
        assert mesh.w_min == pytest.approx(math.log(1.0 / 9.6186) - ORIGIN_MARGIN, rel=1e-12)
        assert mesh.h == pytest.approx((mesh.w_max - mesh.w_min) / 16384)

    def test_wall_log(self):
        p = RadialProblem(r0=10.0, coulomb_strength=1.0, m=0)
        assert build_mesh(p, 1.0).w_max == pytest.approx(math.log(10.0), rel=1e-15)

    def test_doubling_halves_h(self):
        p = RadialProblem(r0=1.0, coulomb_strength=1.0, m=0)
        mesh = build_mesh(p, 9.6186, 1024)
        fine = build_mesh(p, 9.6186, 2048)
        assert fine.h == pytest.approx(0.5 * mesh.h, rel=1e-15)

    def test_free_case_anchors_on_wall(self):
        p = RadialProblem(r0=2.0, coulomb_strength=0.0, m=0)
        mesh = build_mesh(p, 3.0)
        assert mesh.w_min == pytest.approx(math.log(2.0) - ORIGIN_MARGIN)


class TestPropagate:
    def test_shape_matches_free_disc_solution(self):
        # for Z = 0, m = 0 the regular solution is chi(w) = J0(sqrt(E) e^w)
        p = RadialProblem(r0=1.0, coulomb_strength=0.0, m=0)
        E = 3.0  # deliberately off-eigenvalue
        errs = []
        for n in (256, 512, 1024):
            mesh = build_mesh(p, E, n)
            _, _, chi = numerov_propagate(E, mesh, p)
            exact = j0(math.sqrt(E) * np.exp(mesh.points()))
            exact = exact / np.max(np.abs(exact))
            errs.append(float(np.max(np.abs(chi - exact))))
        # fourth-order recurrence: error shrinks ~16x per mesh doubling
        assert 10.0 < errs[0] / errs[1] < 24.0
        assert 10.0 < errs[1] / errs[2] < 24.0

    def test_endpoint_vanishes_at_bessel_eigenvalue(self):
        p = RadialProblem(r0=1.0, coulomb_strength=0.0, m=0)
        mesh = build_mesh(p, J01_SQ)
        endpoint, nodes, chi = numerov_propagate(J01_SQ, mesh, p)
        assert abs(endpoint) <= 1e-6  # chi is scaled to max |chi| = 1
        assert nodes == 0
        assert np.max(np.abs(chi)) == pytest.approx(1.0)

    def test_node_count_at_reference_ground_state(self):
        p = RadialProblem(r0=1.0, coulomb_strength=1.0, m=0)
        E = solve_exact(QuantumNumbers(0, 0), p).E
        mesh = build_mesh(p, E)
        _, nodes, _ = numerov_propagate(E, mesh, p)
        assert nodes == 0

    def test_node_count_excited(self):
        p = RadialProblem(r0=1.0, coulomb_strength=2.0, m=1)
        E = solve_exact(QuantumNumbers(1, 1), p).E
        mesh = build_mesh(p, E)
        _, nodes, _ = numerov_propagate(E, mesh, p)
        assert nodes == 1


class TestSolveExact:
    def test_bessel_ground_state(self):
        p = RadialProblem(r0=1.0, coulomb_strength=0.0, m=0)
        res = solve_exact(QuantumNumbers(0, 0), p)
        assert abs(res.E - J01_SQ) / J01_SQ <= 1e-6
        assert res.node_count == 0
        assert res.bracket[0] <= res.E <= res.bracket[1]

    def test_bessel_m1(self):
        p = RadialProblem(r0=1.0, coulomb_strength=0.0, m=1)
        res = solve_exact(QuantumNumbers(0, 1), p)
        assert abs(res.E - J11_SQ) / J11_SQ <= 1e-6

    @pytest.mark.parametrize(
        "n_r, m, z, r0, reference",
        [
            (0, 0, 1.0, 1.0, 9.0240),
            (0, 1, 2.0, 10.0, 0.50621),
        ],
    )
    def test_reference_rows(self, n_r, m, z, r0, reference):
        p = RadialProblem(r0=r0, coulomb_strength=z, m=m)
        res = solve_exact(QuantumNumbers(n_r, m), p)
        assert abs(res.E - reference) / reference <= 5e-3
        assert res.node_count == n_r
        assert res.mesh_error_estimate <= 1e-7 * res.E

    @pytest.mark.parametrize("z", [1.0, 2.0])
    @pytest.mark.parametrize("m", [0, 1])
    @pytest.mark.parametrize("r0", [1.0, 5.0])
    def test_matches_finite_difference_oracle(self, z, m, r0):
        p = RadialProblem(r0=r0, coulomb_strength=z, m=m)
        res = solve_exact(QuantumNumbers(0, m), p)
        fd = oracles.fd_eigenvalue(0, m, z, r0)
        assert abs(res.E - fd) / fd <= 1e-5

    def test_eigenvalue_interlacing(self):
        p = RadialProblem(r0=2.0, coulomb_strength=2.0, m=1)
        e0 = solve_exact(QuantumNumbers(0, 1), p).E
        e1 = solve_exact(QuantumNumbers(1, 1), p).E
        assert e0 < e1

    def test_coulomb_shift_positive(self):
        free = RadialProblem(r0=1.0, coulomb_strength=0.0, m=0)
        repel = RadialProblem(r0=1.0, coulomb_strength=1.0, m=0)
        qn = QuantumNumbers(0, 0)
        assert solve_exact(qn, repel).E > solve_exact(qn, free).E

    def test_mesh_convergence_cap(self):
        p = RadialProblem(r0=1.0, coulomb_strength=1.0, m=0)
        with pytest.raises(MeshConvergenceError):
            solve_exact(QuantumNumbers(0, 0), p, max_doublings=0)

    def test_order_of_accuracy_against_bessel(self):
        # eigenvalue error vs the free-disc oracle shrinks ~16x per doubling
        p = RadialProblem(r0=1.0, coulomb_strength=0.0, m=0)
        qn = QuantumNumbers(0, 0)
        hint = solve_wkb(qn, p).E
        errs = []
        for n in (256, 512, 1024):
            mesh = build_mesh(p, hint, n)
            res = solve_on_mesh(qn, p, mesh, (0.5 * hint, 2.0 * hint))
            errs.append(abs(res.E - J01_SQ))
        assert 10.0 < errs[0] / errs[1] < 24.0
        assert 10.0 < errs[1] / errs[2] < 24.0

    def test_bracket_expansion(self):
        # deliberately hopeless initial bracket: expansion must recover
        p = RadialProblem(r0=1.0, coulomb_strength=1.0, m=0)
        qn = QuantumNumbers(0, 0)
        mesh = build_mesh(p, 9.0)
        res = solve_on_mesh(qn, p, mesh, (1e-3, 2e-3))
        assert res.E == pytest.approx(9.054, rel=1e-3)


class TestWavefunctionExact:
    def _solve(self, n_r, m, z, r0):
        p = RadialProblem(r0=r0, coulomb_strength=z, m=m)
        res = solve_exact(QuantumNumbers(n_r, m), p)
        mesh = build_mesh(p, res.E, res.n_intervals_used)
        return p, res, mesh, wavefunction_exact(res, mesh, p)

    def test_normalization(self):
        _, _, mesh, wf = self._solve(0, 0, 1.0, 1.0)
        w = mesh.points()
        norm = np.trapezoid(wf.psi**2 * np.exp(2.0 * w), w)
        assert norm == pytest.approx(1.0, abs=1e-8)
        # same statement in r: integral |psi|^2 r dr
        norm_r = np.trapezoid(wf.psi**2 * wf.r, wf.r)
        assert norm_r == pytest.approx(1.0, abs=1e-6)

    def test_node_counts(self):
        for n_r in (0, 1):
            _, _, _, wf = self._solve(n_r, 1, 2.0, 1.0)
            assert wf.node_count == n_r

    def test_wall_value(self):
        _, _, _, wf = self._solve(0, 0, 1.0, 1.0)
        assert abs(wf.u[-1]) <= 1e-6 * np.max(np.abs(wf.u))

    def test_u_and_psi_related_by_sqrt_r(self):
        _, _, _, wf = self._solve(0, 0, 2.0, 5.0)
        assert np.allclose(wf.u, np.sqrt(wf.r) * wf.psi, rtol=1e-12, atol=0.0)

    def test_free_disc_matches_bessel_j1(self):
        _, _, _, wf = self._solve(0, 1, 0.0, 1.0)
        reference = j1(jn_zeros(1, 1)[0] * wf.r)
        corr = np.corrcoef(wf.psi, reference)[0, 1]
        assert corr >= 1.0 - 1e-6
