import numpy as np
import pytest

from afacoustics import build_grid, get_problem, vortex_diagnostics
from afacoustics.grid import AfState
from afacoustics.problems import cross_section, gauss_cell_averages

SQ2 = 1.0 / np.sqrt(2.0)


def pde_residual(problem, x, y, t, h=1e-5):
    """Central-difference residual of the acoustic system at one point."""
    c = problem.c
    def f(xx, yy, tt):
        return np.array(problem.exact(xx, yy, tt))
    dt = (f(x, y, t + h) - f(x, y, t - h)) / (2 * h)
    dx = (f(x + h, y, t) - f(x - h, y, t)) / (2 * h)
    dy = (f(x, y + h, t) - f(x, y - h, t)) / (2 * h)
    return np.array([dt[0] + c * (dx[1] + dy[2]),
                     dt[1] + c * dx[0],
                     dt[2] + c * dy[0]])


class TestSmoothSolutions:
    def test_example1_initial_velocity_zero(self):
        p = get_problem("example1")
        _, u, v = p.exact(0.37, -0.61, 0.0)
        assert u == 0.0 and v == 0.0

    def test_example1_pointwise(self):
        p = get_problem("example1")
        val = p.exact(0.25, 0.0, 0.25)[0]
        assert val == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("name", ["example1", "example2"])
    def test_pde_residual(self, name, rng):
        problem = get_problem(name)
        for _ in range(50):
            x, y, t = rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, 1)
            assert np.abs(pde_residual(problem, x, y, t)).max() < 5e-5

    def test_example1_time_periodic(self, rng):
        problem = get_problem("example1")
        for _ in range(20):
            x, y = rng.uniform(-1, 1, size=2)
            a = np.array(problem.exact(x, y, 0.0))
            b = np.array(problem.exact(x, y, 1.0))
            np.testing.assert_allclose(a, b, atol=1e-13)

    @pytest.mark.parametrize("name", ["example1", "example2"])
    def test_closed_form_averages_match_quadrature(self, name):
        problem = get_problem(name)
        g = build_grid(6, 6, problem.extents, problem.bc)
        closed = problem.exact_cell_averages(g, 0.37)
        quad = gauss_cell_averages(lambda x, y: problem.exact(x, y, 0.37), g)
        np.testing.assert_allclose(closed, quad, atol=1e-10)

    def test_rejects_exact_for_vortex(self):
        with pytest.raises(ValueError):
            get_problem("example3").exact_cell_averages(
                build_grid(8, 8, (-1, 1, -1, 1), "periodic"), 0.0)


class TestVortex:
    def test_peak_speed(self):
        p = get_problem("example3")
        _, u, v = p.initial(0.2, 0.0)
        assert np.hypot(u, v) == pytest.approx(1.0)

    def test_outside_support(self):
        p = get_problem("example3")
        assert np.allclose(p.initial(0.5, 0.0), (0.0, 0.0, 0.0))

    def test_center_is_zero(self):
        p = get_problem("example3")
        assert np.allclose(p.initial(0.0, 0.0), (0.0, 0.0, 0.0))

    def test_divergence_free_off_kinks(self, rng):
        p = get_problem("example3")
        h = 1e-6
        for _ in range(40):
            x, y = rng.uniform(-0.6, 0.6, size=2)
            r = np.hypot(x, y)
            if min(abs(r - 0.2), abs(r - 0.4), r) < 0.02:
                continue
            du = (p.initial(x + h, y)[1] - p.initial(x - h, y)[1]) / (2 * h)
            dv = (p.initial(x, y + h)[2] - p.initial(x, y - h)[2]) / (2 * h)
            assert abs(du + dv) < 1e-7

    def test_initial_diagnostics(self):
        p = get_problem("example3")
        g = build_grid(64, 64, p.extents, p.bc)
        d = vortex_diagnostics(p.initial_state(g), g)
        assert 0.95 <= d["max_speed"] <= 1.0 + 1e-12
        assert d["profile"][0][0] < 0.05

    def test_zero_state_diagnostics(self):
        g = build_grid(16, 16, (-1, 1, -1, 1), "periodic")
        assert vortex_diagnostics(AfState.zeros(g), g)["max_speed"] == 0.0


class TestDiagonalRiemann:
    def test_pointwise(self):
        p = get_problem("example4")
        pv, u, v = p.initial(0.5, 0.1)
        assert pv == 1.0 and u == pytest.approx(SQ2) and v == pytest.approx(SQ2)

    def test_on_line_uses_upper_branch(self):
        p = get_problem("example4")
        assert p.initial(0.3, 0.3)[1] == pytest.approx(-SQ2)
        assert p.initial(-0.4, 0.4)[2] == pytest.approx(-SQ2)

    def test_exact_initial_averages(self):
        p = get_problem("example4")
        for n in (8, 10):
            g = build_grid(n, n, p.extents, p.bc)
            avg = p.initial_state(g).avg
            np.testing.assert_allclose(avg[0], 1.0)
            xc, yc = g.x_centers(), g.y_centers()
            xf, yf = g.x_faces(), g.y_faces()
            for i in range(n):
                for j in range(n):
                    corners = [abs(yf[jj]) - abs(xf[ii]) for ii in (i, i + 1)
                               for jj in (j, j + 1)]
                    tol = 1e-12
                    if min(corners) >= -tol:
                        expect = -SQ2         # weakly above a diagonal
                    elif max(corners) <= tol:
                        expect = SQ2
                    else:
                        # diagonal crosses the interior: on these grids it
                        # always cuts corner-to-corner, bisecting the cell
                        expect = 0.0
                    assert avg[1, i, j] == pytest.approx(expect, abs=1e-14), (i, j)

    def test_cross_sections(self):
        p = get_problem("example4")
        g = build_grid(16, 16, p.extents, p.bc)
        state = p.initial_state(g)
        s, vals = cross_section(state, g, "y0")
        assert len(s) == 16 and vals.shape == (3, 16)
        s, vals = cross_section(state, g, "diag")
        assert len(s) == 16
        with pytest.raises(ValueError):
            cross_section(state, g, "x0")
