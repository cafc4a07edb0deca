"""Tests for the crossbar network, DC solver and calibration."""

import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from src.circuit import (
    ActivationPattern,
    CellStateMatrix,
    CrossbarGeometry,
    ResistanceState,
    build_network,
    calibrate_spike_voltage,
    current_disparity,
    solve_dc,
)
from src.circuit.calibration import (
    clear_cache,
    read_path_network,
    read_voltage,
    resolve_segment_resistance,
)
from src.config.technology import ToolConfig
from src.errors import ConfigurationError, SolverError

R_SEG = 38.0


def dense_oracle(n, r_wl, r_bl, r_driver, branch_r, selected, source):
    """Nodal equations written out element by element and solved densely."""
    size = 2 * n * n
    g = np.zeros((size, size))
    b = np.zeros(size)

    def w(i, j):
        return i * n + j

    def bl(i, j):
        return n * n + i * n + j

    def connect(a, c, cond):
        g[a, a] += cond
        g[c, c] += cond
        g[a, c] -= cond
        g[c, a] -= cond

    for i in range(n):
        for j in range(n):
            if j + 1 < n:
                connect(w(i, j), w(i, j + 1), 1.0 / r_wl)
            if i + 1 < n:
                connect(bl(i, j), bl(i + 1, j), 1.0 / r_bl)
            if selected[i][j]:
                connect(w(i, j), bl(i, j), 1.0 / branch_r[i][j])
        g[w(i, 0), w(i, 0)] += 1.0 / r_driver
        b[w(i, 0)] += source[i] / r_driver
    for j in range(n):
        g[bl(n - 1, j), bl(n - 1, j)] += 1.0 / r_bl
    return np.linalg.solve(g, b)


def geometry(n, r_wl=R_SEG, r_bl=R_SEG, r_driver=100.0):
    return CrossbarGeometry(n=n, r_wordline_segment=r_wl, r_bitline_segment=r_bl, r_driver=r_driver)


class TestNetwork(unittest.TestCase):
    """Test case for network assembly."""

    def test_node_count(self):
        """Test that a crossbar has one wordline and one bitline node per crosspoint."""
        self.assertEqual(build_network(geometry(2), CellStateMatrix.uniform(2)).num_nodes, 8)
        self.assertEqual(build_network(geometry(128), CellStateMatrix.uniform(128)).num_nodes, 32768)

    def test_dimension_mismatch(self):
        """Test that geometry and cell matrices of different sizes are rejected."""
        with self.assertRaises(ConfigurationError):
            build_network(geometry(4), CellStateMatrix.uniform(3))

    def test_conductance_matrix_is_symmetric(self):
        """Test that the assembled matrix is symmetric with a positive diagonal."""
        network = build_network(geometry(5), CellStateMatrix.uniform(5, 'lrs2'))
        g = network.conductance.toarray()
        np.testing.assert_allclose(g, g.T)
        self.assertTrue(np.all(np.diag(g) > 0))

    def test_state_order_is_enforced(self):
        """Test that resistances must decrease from HRS to LRS3."""
        from src.circuit import StateResistances
        with self.assertRaises(ValueError):
            StateResistances(hrs=1e4, lrs1=2e4, lrs2=1e3, lrs3=1e2)

    def test_state_logic_levels(self):
        """Test the logic encoding of each resistance state."""
        self.assertEqual(ResistanceState.HRS.logic, '00')
        self.assertEqual(ResistanceState.LRS3.logic, '11')
        self.assertEqual(ResistanceState.parse('LRS1'), ResistanceState.LRS1)
        with self.assertRaises(ConfigurationError):
            ResistanceState.parse('lrs4')

    def test_activation_needs_a_driven_row(self):
        """Test that an activation pattern without driven wordlines is rejected."""
        with self.assertRaises(ConfigurationError):
            ActivationPattern(np.zeros(3, dtype=bool), 1.0)
        with self.assertRaises(ConfigurationError):
            ActivationPattern.all_rows(3, 0.0)


class TestSolver(unittest.TestCase):
    """Test case for the DC solver."""

    def test_single_active_cell_divider(self):
        """Test that a lone conducting cell sees the series voltage divider."""
        selected = np.zeros((2, 2), dtype=bool)
        selected[1, 1] = True
        cells = CellStateMatrix.uniform(2, 'lrs3', selected=selected)
        geom = geometry(2, r_wl=40.0, r_bl=60.0, r_driver=100.0)
        result = solve_dc(build_network(geom, cells), ActivationPattern.all_rows(2, 0.8))

        r_cell = 1e4 + 5e3
        expected = 0.8 * r_cell / (100.0 + 40.0 + r_cell + 60.0)
        self.assertAlmostEqual(result.cell_voltage[1, 1], expected, delta=1e-12)
        self.assertEqual(result.cell_current[0, 0], 0.0)

    def test_longest_path_carries_least_current(self):
        """Test that cell (0, 1) draws less than (0, 0) and (1, 1) in a uniform 2x2 crossbar."""
        result = solve_dc(build_network(geometry(2), CellStateMatrix.uniform(2, 'lrs3')),
                          ActivationPattern.all_rows(2, 1.0))
        current = result.cell_current
        self.assertLess(current[0, 1], current[0, 0])
        self.assertLess(current[0, 1], current[1, 1])

    def test_dense_oracle(self):
        """Test that node voltages match a dense first-principles solve for N = 2 and 3."""
        rng = np.random.default_rng(11)
        for n in (2, 3):
            codes = rng.integers(0, 4, size=(n, n))
            selected = rng.random((n, n)) > 0.2
            cells = CellStateMatrix(codes=codes, selected=selected)
            geom = geometry(n, r_wl=25.0, r_bl=55.0, r_driver=120.0)
            act = ActivationPattern(np.array([True] + [False] * (n - 2) + [True]), 0.7)
            result = solve_dc(build_network(geom, cells), act, tol=1e-12)

            expected = dense_oracle(n, 25.0, 55.0, 120.0, cells.branch_resistance(), selected,
                                    act.source_voltages())
            np.testing.assert_allclose(result.node_voltage, expected, rtol=1e-9, atol=1e-15)

    def test_current_conservation(self):
        """Test that the drivers supply exactly what the sense inputs collect."""
        for n in (2, 3, 16):
            result = solve_dc(build_network(geometry(n), CellStateMatrix.uniform(n, 'lrs1')),
                              ActivationPattern.all_rows(n, 0.5))
            total_in = result.driver_current.sum()
            total_out = result.bitline_current.sum()
            self.assertAlmostEqual(total_in / total_out, 1.0, delta=1e-8)
            np.testing.assert_allclose(
                result.cell_current,
                result.cell_voltage / CellStateMatrix.uniform(n, 'lrs1').branch_resistance(),
            )

    def test_monotone_in_position(self):
        """Test that current falls moving away from the driver and away from the sense node."""
        for state in ('hrs', 'lrs3'):
            result = solve_dc(build_network(geometry(8), CellStateMatrix.uniform(8, state)),
                              ActivationPattern.all_rows(8, 1.0))
            current = result.cell_current
            self.assertTrue(np.all(np.diff(current, axis=1) <= 1e-18))
            self.assertTrue(np.all(np.diff(current, axis=0) >= -1e-18))

    @settings(max_examples=25, deadline=None)
    @given(scale=st.floats(min_value=0.05, max_value=20.0), seed=st.integers(0, 2 ** 16))
    def test_linearity(self, scale, seed):
        """Test that scaling the spike voltage scales every cell voltage and current."""
        codes = np.random.default_rng(seed).integers(0, 4, size=(4, 4))
        network = build_network(geometry(4), CellStateMatrix(codes=codes))
        base = solve_dc(network, ActivationPattern.all_rows(4, 0.3))
        scaled = solve_dc(network, ActivationPattern.all_rows(4, 0.3 * scale))
        np.testing.assert_allclose(scaled.cell_current, scale * base.cell_current, rtol=1e-9)
        np.testing.assert_allclose(scaled.cell_voltage, scale * base.cell_voltage, rtol=1e-9)

    def test_iterative_matches_direct(self):
        """Test that the preconditioned conjugate gradient agrees with the direct solve."""
        network = build_network(geometry(70), CellStateMatrix.uniform(70, 'lrs2'))
        act = ActivationPattern.all_rows(70, 1.0)
        direct = solve_dc(network, act, method='direct')
        iterative = solve_dc(network, act, tol=1e-12)
        self.assertEqual(iterative.method, 'cg')
        self.assertGreater(iterative.iterations, 0)
        self.assertLess(iterative.residual, 1e-10)
        np.testing.assert_allclose(iterative.cell_current, direct.cell_current, rtol=1e-6)

    def test_iteration_budget_exhausted(self):
        """Test that non-convergence raises a solver error carrying the residual."""
        network = build_network(geometry(70), CellStateMatrix.uniform(70, 'lrs3'))
        with self.assertRaises(SolverError) as ctx:
            solve_dc(network, ActivationPattern.all_rows(70, 1.0), method='cg', max_iter=2)
        self.assertIsNotNone(ctx.exception.residual)
        self.assertGreater(ctx.exception.residual, 1e-9)


class TestCalibration(unittest.TestCase):
    """Test case for spike-voltage and parasitic calibration."""

    @classmethod
    def setUpClass(cls):
        clear_cache()
        cls.config = ToolConfig().with_overrides(crossbar={'solver': 'direct'})
        cls.r_segment = resolve_segment_resistance(cls.config, 65)

    def test_calibrated_disparity(self):
        """Test that the fitted 65 nm parasitics give 39.2% disparity on a 128x128 read path."""
        network = read_path_network(self.config, 128, self.r_segment)
        self.assertAlmostEqual(current_disparity(network, method='direct'), 39.2, delta=2.0)
        self.assertGreater(self.r_segment, 1.0)
        self.assertLess(self.r_segment, 1000.0)

    def test_disparity_trend(self):
        """Test the disparity over 32, 64, 128 and 256 against the published values."""
        published = {32: 13.3, 64: 25.1, 128: 39.2, 256: 55.8}
        values = []
        for n, expected in published.items():
            network = read_path_network(self.config, n, self.r_segment)
            value = current_disparity(network, method='direct')
            self.assertAlmostEqual(value, expected, delta=5.0, msg=f"{n}x{n}")
            values.append(value)
        self.assertTrue(all(a < b for a, b in zip(values, values[1:])))

    def test_single_row_activation_matches_on_read_path(self):
        """Test that the isolated read path gives the same disparity with one row driven at a time."""
        network = read_path_network(self.config, 32, self.r_segment)
        self.assertAlmostEqual(
            current_disparity(network, 'single', method='direct'),
            current_disparity(network, 'all', method='direct'),
            places=9,
        )

    def test_other_nodes_scale_with_feature_size(self):
        """Test that smaller nodes get proportionally larger segment resistance."""
        r45 = resolve_segment_resistance(self.config, 45)
        self.assertAlmostEqual(r45, self.r_segment * 65.0 / 45.0, places=9)

    def test_zero_parasitics(self):
        """Test that vanishing segment resistance removes the disparity."""
        network = read_path_network(self.config, 64, 1e-6)
        self.assertLess(abs(current_disparity(network, method='direct')), 1e-2)

    def test_read_voltage_reproduces_target_current(self):
        """Test that re-solving at the calibrated voltage draws 50 uA on the longest path."""
        v = read_voltage(self.config, 65, 128)
        network = read_path_network(self.config, 128, self.r_segment)
        result = solve_dc(network, ActivationPattern.all_rows(128, v), method='direct')
        self.assertAlmostEqual(result.cell_current[0, 127] / 50e-6, 1.0, delta=1e-3)

    def test_calibrate_spike_voltage_properties(self):
        """Test linearity in the target and the shorter path needing less voltage."""
        network = build_network(geometry(16), CellStateMatrix.uniform(16, 'lrs3'))
        v_long = calibrate_spike_voltage(network, 50e-6, (0, 15))
        v_long_double = calibrate_spike_voltage(network, 100e-6, (0, 15))
        v_short = calibrate_spike_voltage(network, 50e-6, (15, 0))
        self.assertAlmostEqual(v_long_double / v_long, 2.0, places=9)
        self.assertLess(v_short, v_long)

    def test_calibrate_on_open_cell(self):
        """Test that calibrating against a cell with its access device off is rejected."""
        network = read_path_network(self.config, 4, self.r_segment)
        with self.assertRaises(ConfigurationError):
            calibrate_spike_voltage(network, 50e-6, (1, 1))


if __name__ == '__main__':
    unittest.main()
