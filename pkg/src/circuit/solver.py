"""DC operating point of a crossbar network."""

import logging
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import brentq
from scipy.sparse.linalg import cg, spsolve

from src.circuit.network import ActivationPattern, CrossbarNetwork
from src.errors import ConfigurationError, SolverError

logger = logging.getLogger(__name__)

SolverMethod = Literal['auto', 'direct', 'cg']

DEFAULT_TOL = 1e-9
DIRECT_MAX_N = 64


@dataclass(frozen=True)
class SolveResult:
    """Node voltages of one solve and the per-cell quantities derived from them."""

    node_voltage: np.ndarray
    wordline_voltage: np.ndarray
    bitline_voltage: np.ndarray
    cell_voltage: np.ndarray
    cell_current: np.ndarray
    bitline_current: np.ndarray
    driver_current: np.ndarray
    residual: float
    method: str
    iterations: int
    v_spike: float

    @property
    def n(self) -> int:
        return self.cell_voltage.shape[0]


def _pick_method(method: str, n: int, direct_max_n: int) -> str:
    if method == 'auto':
        return 'direct' if n <= direct_max_n else 'cg'
    if method not in ('direct', 'cg'):
        raise ConfigurationError(f"unknown solver method {method!r}")
    return method


def _relative_residual(g: sp.csr_matrix, x: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(b - g @ x) / np.linalg.norm(b))


def solve_dc(
    network: CrossbarNetwork,
    act: ActivationPattern,
    tol: float = DEFAULT_TOL,
    method: SolverMethod = 'auto',
    direct_max_n: int = DIRECT_MAX_N,
    max_iter: Optional[int] = None,
) -> SolveResult:
    """
    Solve the nodal equations G x = b of a driven crossbar.

    Args:
        network: Assembled crossbar
        act: Driven wordlines and spike amplitude
        tol: Relative residual target ||b - Gx|| / ||b||
        method: 'direct' sparse LU, 'cg' Jacobi-preconditioned conjugate
            gradient, or 'auto' (direct up to ``direct_max_n``)
        direct_max_n: Largest crossbar solved directly under 'auto'
        max_iter: Iteration budget of the iterative solver

    Returns:
        SolveResult: Node, cell and terminal quantities
    """
    if not tol > 0:
        raise ConfigurationError(f"solver tolerance must be positive, got {tol}")

    n = network.n
    g = network.conductance
    b = network.rhs(act)
    chosen = _pick_method(method, n, direct_max_n)
    iterations = 0

    if chosen == 'direct':
        x = spsolve(g.tocsc(), b)
    else:
        counter = []
        diag = g.diagonal()
        # all-positive resistances with grounded drivers and sense inputs keep G SPD
        assert np.all(diag > 0), "conductance matrix has an empty row"
        preconditioner = sp.diags(1.0 / diag)
        budget = max_iter if max_iter is not None else 10 * g.shape[0]
        x, info = cg(g, b, rtol=tol, atol=0.0, maxiter=budget, M=preconditioner,
                     callback=lambda xk: counter.append(1))
        iterations = len(counter)
        if info != 0:
            residual = _relative_residual(g, x, b)
            raise SolverError(
                f"conjugate gradient did not reach {tol:g} within {budget} iterations "
                f"(residual {residual:.3e})",
                residual=residual,
                iterations=iterations,
            )

    residual = _relative_residual(g, x, b)
    logger.debug(f"Solved {n}x{n} crossbar with {chosen}: residual {residual:.3e}, {iterations} iterations")

    nn = n * n
    wl = x[:nn].reshape(n, n)
    bl = x[nn:].reshape(n, n)
    cell_voltage = wl - bl
    cell_current = cell_voltage * network.cells.branch_conductance()
    driver_current = (act.source_voltages() - wl[:, 0]) / network.geometry.r_driver
    bitline_current = bl[n - 1, :] / network.geometry.r_bitline_segment

    arrays = [x, wl, bl, cell_voltage, cell_current, bitline_current, driver_current]
    for array in arrays:
        array.setflags(write=False)

    return SolveResult(
        node_voltage=x,
        wordline_voltage=wl,
        bitline_voltage=bl,
        cell_voltage=cell_voltage,
        cell_current=cell_current,
        bitline_current=bitline_current,
        driver_current=driver_current,
        residual=residual,
        method=chosen,
        iterations=iterations,
        v_spike=act.v_spike,
    )


def calibrate_spike_voltage(
    network: CrossbarNetwork,
    target_current: float,
    cell: Tuple[int, int],
    **solve_options,
) -> float:
    """
    Spike amplitude that draws ``target_current`` through ``cell`` with all rows driven.

    The network is linear, so one solve at 1 V is scaled.

    Args:
        network: Assembled crossbar
        target_current: Desired cell current in amperes
        cell: (row, col) of the reference cell
        **solve_options: Passed to ``solve_dc``

    Returns:
        float: Spike voltage in volts
    """
    if not target_current > 0:
        raise ConfigurationError(f"target current must be positive, got {target_current}")
    row, col = cell
    if not (0 <= row < network.n and 0 <= col < network.n):
        raise ConfigurationError(f"cell {cell} outside a {network.n}x{network.n} crossbar")

    unit = solve_dc(network, ActivationPattern.all_rows(network.n, 1.0), **solve_options)
    current = unit.cell_current[row, col]
    if not current > 0:
        raise ConfigurationError(f"cell {cell} does not conduct; cannot calibrate a spike voltage on it")
    return float(target_current / current)


def path_currents(network: CrossbarNetwork, activation: str = 'all', v_spike: float = 1.0,
                  **solve_options) -> Tuple[float, float]:
    """
    Currents through the shortest-path and longest-path cells.

    Args:
        network: Assembled crossbar
        activation: 'all' drives every wordline in one solve; 'single' drives
            row N-1 alone for the shortest path and row 0 alone for the longest
        v_spike: Spike amplitude
        **solve_options: Passed to ``solve_dc``

    Returns:
        Tuple[float, float]: (I_shortest, I_longest) in amperes
    """
    n = network.n
    if activation == 'all':
        result = solve_dc(network, ActivationPattern.all_rows(n, v_spike), **solve_options)
        return float(result.cell_current[n - 1, 0]), float(result.cell_current[0, n - 1])
    if activation == 'single':
        shortest = solve_dc(network, ActivationPattern.single_row(n, n - 1, v_spike), **solve_options)
        longest = solve_dc(network, ActivationPattern.single_row(n, 0, v_spike), **solve_options)
        return float(shortest.cell_current[n - 1, 0]), float(longest.cell_current[0, n - 1])
    raise ConfigurationError(f"unknown activation mode {activation!r}; expected 'all' or 'single'")


def current_disparity(network: CrossbarNetwork, activation: str = 'all', **solve_options) -> float:
    """Percentage by which the longest-path current falls short of the shortest-path current."""
    shortest, longest = path_currents(network, activation, **solve_options)
    if not shortest > 0:
        raise ConfigurationError("shortest-path cell does not conduct; disparity is undefined")
    return 100.0 * (shortest - longest) / shortest


def fit_segment_resistance(
    build: Callable[[float], CrossbarNetwork],
    target_percent: float,
    activation: str = 'all',
    log10_bounds: Tuple[float, float] = (-2.0, 4.0),
) -> float:
    """
    Per-segment resistance that gives a crossbar the target current disparity.

    Args:
        build: Maps a segment resistance in ohms to a network
        target_percent: Desired disparity in percent
        activation: Activation mode passed to ``current_disparity``
        log10_bounds: Search bracket on log10 of the resistance

    Returns:
        float: Segment resistance in ohms
    """
    if not 0 < target_percent < 100:
        raise ConfigurationError(f"target disparity must lie in (0, 100) %, got {target_percent}")

    def mismatch(log_r: float) -> float:
        # the direct solver stays accurate across the whole bracket
        network = build(10.0 ** log_r)
        return current_disparity(network, activation, method='direct') - target_percent

    lo, hi = log10_bounds
    f_lo, f_hi = mismatch(lo), mismatch(hi)
    if f_lo * f_hi > 0:
        raise ConfigurationError(
            f"target disparity {target_percent}% is not reachable with segment resistances "
            f"between {10 ** lo:g} and {10 ** hi:g} ohms"
        )
    log_r = brentq(mismatch, lo, hi, xtol=1e-10, rtol=1e-12)
    r_segment = 10.0 ** log_r
    logger.info(f"Fitted segment resistance {r_segment:.6g} ohm for {target_percent}% disparity")
    return r_segment
