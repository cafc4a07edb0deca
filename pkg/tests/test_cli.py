"""Tests for the command-line front end and its output files."""

import io
import json
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pandas as pd

from main import EXIT_IO, EXIT_OK, EXIT_SOLVER, EXIT_USAGE, main
from src.circuit.calibration import clear_cache
from src.config.technology import load_config
from src.endurance import time_to_disturb_lrs
from src.errors import ConfigurationError, SolverError
from src.utils.helpers import atomic_write_text, to_json
from tests.test_circuit import dense_oracle

CONFIG_TEMPLATE = """
[technology]
reference_node = 65

[technology.nodes.65]
feature_size = 65.0
r_segment = {r_segment}

[technology.nodes.32]
feature_size = 32.0

[crossbar]
r_driver = {r_driver}
solver = "{solver}"
{extra}

[workload]
n_synapses = 64
max_spikes = 40
window_seconds = 0.2
"""


class CliTestCase(unittest.TestCase):
    """Shared temporary directory and configuration writer."""

    def setUp(self):
        clear_cache()
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write_config(self, r_segment=38.0, r_driver=100.0, solver='auto', extra='', name='tech.toml'):
        path = self.dir / name
        path.write_text(CONFIG_TEMPLATE.format(r_segment=r_segment, r_driver=r_driver, solver=solver, extra=extra))
        return str(path)

    def run_main(self, *argv):
        return main(list(argv))


class TestConfigLoading(CliTestCase):
    """Test case for configuration files."""

    def test_shipped_profile_loads(self):
        """Test that the default technology profile is valid."""
        from src.config import settings
        config = load_config(Path(settings.PROJECT_ROOT) / 'config' / 'technology.toml')
        self.assertEqual(sorted(config.technology.nodes, key=float), ['32', '45', '65', '90'])
        self.assertEqual(config.crossbar.size, 128)
        self.assertEqual(config.technology_params(45).feature_size, 45.0)

    def test_unknown_key_is_named(self):
        """Test that a misspelt key is reported by name."""
        path = self.write_config(extra='r_drivr = 3.0')
        with self.assertRaises(ConfigurationError) as ctx:
            load_config(path)
        self.assertIn('r_drivr', str(ctx.exception))

    def test_unknown_node(self):
        """Test that asking for an unconfigured node is a configuration error."""
        config = load_config(self.write_config())
        with self.assertRaises(ConfigurationError):
            config.node_profile(90)

    def test_parameter_hash_tracks_content(self):
        """Test that the parameter hash changes with any value."""
        first = load_config(self.write_config(r_segment=38.0, name='a.toml'))
        second = load_config(self.write_config(r_segment=39.0, name='b.toml'))
        self.assertEqual(first.parameter_hash(), load_config(self.dir / 'a.toml').parameter_hash())
        self.assertNotEqual(first.parameter_hash(), second.parameter_hash())


class TestExitCodes(CliTestCase):
    """Test case for error handling in main()."""

    def test_missing_config(self):
        """Test that a missing configuration prints usage and exits with 2."""
        with patch('sys.stderr', new_callable=io.StringIO) as stderr:
            code = self.run_main('current-map', '--config', str(self.dir / 'nope.toml'), '--out', str(self.dir))
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn('usage', stderr.getvalue())

    def test_invalid_config(self):
        """Test that validation failures exit with 2 and write nothing."""
        config = self.write_config(r_driver=-1.0)
        out = self.dir / 'out'
        self.assertEqual(self.run_main('current-map', '--config', config, '--out', str(out), '--size', '2'), EXIT_USAGE)
        self.assertFalse(out.exists())

    def test_solver_failure(self):
        """Test that iterative non-convergence exits with 3."""
        config = self.write_config(solver='cg', extra='max_iter = 1')
        code = self.run_main('current-map', '--config', config, '--out', str(self.dir / 'out'), '--size', '6')
        self.assertEqual(code, EXIT_SOLVER)

    def test_io_failure(self):
        """Test that an unwritable output directory exits with 4."""
        config = self.write_config()
        blocker = self.dir / 'file'
        blocker.write_text('x')
        code = self.run_main('cost-sweep', '--config', config, '--out', str(blocker / 'sub'))
        self.assertEqual(code, EXIT_IO)

    def test_bad_size_argument(self):
        """Test that argparse rejects a non-positive size."""
        with patch('sys.stderr', new_callable=io.StringIO):
            with self.assertRaises(SystemExit) as ctx:
                self.run_main('current-map', '--size', '0')
        self.assertEqual(ctx.exception.code, 2)


class TestCommands(CliTestCase):
    """Test case for the experiment commands."""

    def test_current_map_small(self):
        """Test a 2x2 current map against the nodal equations solved densely."""
        out = self.dir / 'cm'
        code = self.run_main('current-map', '--config', self.write_config(), '--out', str(out), '--size', '2',
                             '--state', 'lrs3', '--v-spike', '0.5')
        self.assertEqual(code, EXIT_OK)
        currents = pd.read_csv(out / 'current_map.csv', header=None).to_numpy()
        branch = [[1e4 + 5e3] * 2] * 2
        v = dense_oracle(2, 38.0, 38.0, 100.0, branch, [[True] * 2] * 2, [0.5, 0.5])
        expected = (v[:4] - v[4:]).reshape(2, 2) / 1.5e4
        np.testing.assert_allclose(currents, expected, rtol=1e-5)
        meta = json.loads((out / 'current_map.json').read_text())
        self.assertEqual(meta['n'], 2)
        self.assertEqual(meta['v_spike'], 0.5)
        self.assertEqual(meta['min_current_cell'], [0, 1])
        self.assertAlmostEqual(meta['total_current'], expected.sum(), delta=1e-5 * expected.sum())
        self.assertTrue((out / 'manifest.json').exists())

    def test_endurance_map_lrs(self):
        """Test that LRS endurance follows the lateral-growth law."""
        out = self.dir / 'em'
        code = self.run_main('endurance-map', '--config', self.write_config(), '--out', str(out), '--size', '4',
                             '--state', 'lrs2', '--pulse-width', '1e-3', '--v-spike', '0.4')
        self.assertEqual(code, EXIT_OK)
        cycles = pd.read_csv(out / 'endurance_map.csv', header=None).to_numpy()
        meta = json.loads((out / 'endurance_map.json').read_text())
        self.assertEqual(meta['pulse_width'], 1e-3)
        self.assertEqual(meta['max_cell'], [0, 3])
        # every cell sees a bit under 0.4 V
        upper = time_to_disturb_lrs(0.4 * 0.95) / 1e-3
        lower = time_to_disturb_lrs(0.4) / 1e-3
        self.assertTrue(np.all(cycles >= np.floor(lower)))
        self.assertTrue(np.all(cycles <= upper))

    def test_endurance_map_without_parasitics(self):
        """Test that a parasitic-free crossbar has a constant endurance map."""
        out = self.dir / 'flat'
        config = self.write_config(r_segment=1e-3, r_driver=1e-3)
        self.assertEqual(self.run_main('endurance-map', '--config', config, '--out', str(out), '--size', '6'), EXIT_OK)
        cycles = pd.read_csv(out / 'endurance_map.csv', header=None).to_numpy()
        self.assertEqual(len(np.unique(cycles)), 1)

    def test_disparity_sweep(self):
        """Test the sweep summary, per-point files and a 2x2 point."""
        out = self.dir / 'ds'
        code = self.run_main('disparity-sweep', '--config', self.write_config(), '--out', str(out),
                             '--sizes', '8,2,4')
        self.assertEqual(code, EXIT_OK)
        summary = pd.read_csv(out / 'disparity_sweep.csv')
        self.assertEqual(summary['n'].tolist(), [2, 4, 8])
        self.assertTrue((summary['disparity_percent'] > 0).all())
        self.assertTrue(summary['disparity_percent'].is_monotonic_increasing)
        self.assertTrue((out / 'disparity_65nm_n4.json').exists())
        self.assertEqual(len(list(out.glob('manifest.json'))), 1)

    def test_disparity_sweep_parallel_matches_serial(self):
        """Test that worker processes produce the same summary as a serial run."""
        config = self.write_config()
        serial, parallel = self.dir / 's', self.dir / 'p'
        self.assertEqual(self.run_main('disparity-sweep', '--config', config, '--out', str(serial),
                                       '--sizes', '4,8,16', '--nodes', '65,32'), EXIT_OK)
        self.assertEqual(self.run_main('disparity-sweep', '--config', config, '--out', str(parallel),
                                       '--sizes', '4,8,16', '--nodes', '65,32', '--jobs', '2'), EXIT_OK)
        self.assertEqual((serial / 'disparity_sweep.csv').read_bytes(), (parallel / 'disparity_sweep.csv').read_bytes())

    def test_cost_sweep(self):
        """Test the per-node tables and the single-size normalization."""
        out = self.dir / 'cost'
        self.assertEqual(self.run_main('cost-sweep', '--config', self.write_config(), '--out', str(out)), EXIT_OK)
        table = pd.read_csv(out / 'cost_sweep.csv')
        self.assertEqual(sorted(table['node'].unique()), [32.0, 65.0])
        for _, group in table.groupby('node'):
            self.assertTrue(group['normalized_cost'].is_monotonic_decreasing)

        single = self.dir / 'single'
        self.run_main('cost-sweep', '--config', self.write_config(), '--out', str(single), '--sizes', '64')
        self.assertEqual(pd.read_csv(single / 'cost_65nm.csv')['normalized_cost'].tolist(), [1.0])

    def test_tradeoff(self):
        """Test that cost falls and disparity grows with crossbar size."""
        out = self.dir / 'tradeoff'
        code = self.run_main('tradeoff', '--config', self.write_config(), '--out', str(out), '--sizes', '16,4,8')
        self.assertEqual(code, EXIT_OK)
        table = pd.read_csv(out / 'tradeoff.csv')
        self.assertEqual(table['n'].tolist(), [4, 8, 16])
        self.assertTrue(table['exact_cost'].is_monotonic_decreasing)
        self.assertTrue(table['disparity_percent'].is_monotonic_increasing)
        self.assertEqual(table['normalized_cost'].iloc[0], 1.0)
        self.assertTrue((table['endurance_spread'] >= 1.0).all())
        self.assertTrue((out / 'tradeoff_65nm_n8.json').exists())

    def test_generate_workload(self):
        """Test the workload, spike-count and ISI files."""
        out = self.dir / 'wl'
        code = self.run_main('generate-workload', '--config', self.write_config(), '--out', str(out),
                             '--distribution', 'uniform:2,6', '--seed', '4', '--trains')
        self.assertEqual(code, EXIT_OK)
        data = json.loads((out / 'workload.json').read_text())
        self.assertEqual(len(data['synapses']), 64)
        self.assertTrue((out / 'spike_counts.csv').exists())
        self.assertEqual(len(pd.read_csv(out / 'isi_summary.csv')), 64)
        self.assertEqual(json.loads((out / 'manifest.json').read_text())['seed'], 4)

    def test_optimize(self):
        """Test placement output and its improvement over the baseline."""
        out = self.dir / 'opt'
        code = self.run_main('optimize', '--config', self.write_config(), '--out', str(out), '--size', '16',
                             '--distribution', 'zipf:1.2', '--seed', '3', '--refine')
        self.assertEqual(code, EXIT_OK)
        placement = json.loads((out / 'placement.json').read_text())
        self.assertEqual(placement['strategy'], 'endurance-aware')
        self.assertEqual(len(placement['assignment']), 64)
        self.assertGreaterEqual(placement['improvement_vs_baseline'], 1.0)
        report = json.loads((out / 'lifetime_report.json').read_text())
        self.assertEqual(report['lifetime_images'], placement['lifetime_images'])

    def test_optimize_from_file(self):
        """Test that a small workload file reaches the exhaustive optimum."""
        workload = {'cluster_id': 'tiny', 'synapses': [
            {'id': 0, 'spikes_per_image': 9}, {'id': 1, 'spikes_per_image': 1}, {'id': 2, 'spikes_per_image': 4}]}
        path = self.dir / 'tiny.json'
        path.write_text(json.dumps(workload))
        out = self.dir / 'tiny'
        code = self.run_main('optimize', '--config', self.write_config(), '--out', str(out), '--size', '2',
                             '--workload', str(path))
        self.assertEqual(code, EXIT_OK)
        placement = json.loads((out / 'placement.json').read_text())
        baseline = json.loads((out / 'baseline_placement.json').read_text())
        self.assertGreaterEqual(placement['lifetime_images'], baseline['lifetime_images'])

    def test_optimize_failure_writes_nothing(self):
        """Test that a failing skew study leaves no placement files behind."""
        out = self.dir / 'failed'
        with patch('src.tasks.design_tasks.skew_study', side_effect=SolverError('no convergence')):
            code = self.run_main('optimize', '--config', self.write_config(), '--out', str(out), '--size', '4',
                                 '--skews', '1.0,1.5', '--replicates', '2')
        self.assertEqual(code, EXIT_SOLVER)
        self.assertFalse((out / 'placement.json').exists())
        self.assertFalse((out / 'lifetime_report.json').exists())
        self.assertFalse((out / 'manifest.json').exists())

    def test_reproducible_outputs(self):
        """Test that rerunning a command gives byte-identical files."""
        config = self.write_config()
        first, second = self.dir / 'r1', self.dir / 'r2'
        for out in (first, second):
            self.assertEqual(self.run_main('optimize', '--config', config, '--out', str(out), '--size', '8',
                                           '--seed', '11', '--skews', '1.0,1.5', '--replicates', '3'), EXIT_OK)
        names = sorted(p.name for p in first.iterdir())
        self.assertEqual(names, sorted(p.name for p in second.iterdir()))
        for name in names:
            if name != 'manifest.json':
                self.assertEqual((first / name).read_bytes(), (second / name).read_bytes(), msg=name)

        manifest = (first / 'manifest.json').read_bytes()
        self.run_main('optimize', '--config', config, '--out', str(first), '--size', '8',
                      '--seed', '11', '--skews', '1.0,1.5', '--replicates', '3')
        self.assertEqual((first / 'manifest.json').read_bytes(), manifest)


class TestHelpers(unittest.TestCase):
    """Test case for output helpers."""

    def test_infinite_values_become_null(self):
        """Test that unbounded lifetimes are written as null."""
        self.assertEqual(json.loads(to_json({'lifetime': float('inf'), 'n': np.int64(3)})),
                         {'lifetime': None, 'n': 3})

    @patch('src.utils.helpers.os.replace', side_effect=OSError('disk full'))
    def test_failed_write_leaves_nothing(self, mock_replace):
        """Test that an interrupted write leaves neither the file nor a temporary."""
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(OSError):
                atomic_write_text(Path(tmp) / 'out.csv', 'a,b\n')
            self.assertEqual(list(Path(tmp).iterdir()), [])


if __name__ == '__main__':
    unittest.main()
