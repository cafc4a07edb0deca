"""Read-disturb kinetics of OxRRAM cells.

HRS cells lose their state when the vertical filament gap closes under the
stress voltage; LRS cells when the filament grows laterally. Both are turned
into a time-to-disturb in seconds.
"""

import logging
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.integrate import quad_vec, solve_ivp

from src.errors import DomainError

logger = logging.getLogger(__name__)

# Fitted constants of the lateral-growth law, t = 10^(LRS_SLOPE * v + LRS_OFFSET)
LRS_SLOPE = -14.7
LRS_OFFSET = 6.7


class TechnologyParams(BaseModel):
    """Physical constants of the filament-gap model plus the process node.

    Energies are in eV and kT is formed as ``k_boltzmann * temperature`` so
    that ``q * v / kT`` takes volts directly with ``q_charge = 1``.
    """

    model_config = ConfigDict(frozen=True)

    v0: float = Field(10.0, gt=0, description="filament growth velocity prefactor, m/s")
    e_a: float = Field(0.6, gt=0, description="activation energy, eV")
    temperature: float = Field(300.0, gt=0, description="K")
    k_boltzmann: float = Field(8.617333262e-5, gt=0, description="eV/K")
    a0: float = Field(0.25e-9, gt=0, description="atomic hopping distance, m")
    oxide_thickness: float = Field(5e-9, gt=0, description="m")
    q_charge: float = Field(1.0, gt=0)
    gamma0: float = Field(16.5, gt=0)
    beta: float = Field(1.25, gt=0)
    g0: float = Field(2e-9, gt=0, description="initial filament gap, m")
    g_min: float = Field(0.1e-9, gt=0, description="gap at which HRS is disturbed, m")
    feature_size: float = Field(65.0, gt=0, description="nm")
    horizon: float = Field(1e12, gt=0, description="longest disturb time resolved, s")

    @model_validator(mode='after')
    def _check_gap(self):
        if self.g_min >= self.g0:
            raise ValueError(f"g_min ({self.g_min}) must be below g0 ({self.g0})")
        return self

    @property
    def kt(self) -> float:
        return self.k_boltzmann * self.temperature

    @property
    def thermal_velocity(self) -> float:
        """v0 * exp(-E_a / kT) in m/s."""
        return self.v0 * math.exp(-self.e_a / self.kt)

    def field_factor(self, g):
        """Coefficient c(g) such that the sinh argument is c(g) * v.

        gamma = gamma0 - beta * (g / g0)^3 is read with the cube on the
        normalised gap.
        """
        gamma = self.gamma0 - self.beta * (np.asarray(g) / self.g0) ** 3
        return gamma * self.a0 / self.oxide_thickness * self.q_charge / self.kt


def _gap_rate(g, v, p):
    return -p.thermal_velocity * np.sinh(p.field_factor(g) * v)


def gap_rate(g: float, v: float, p: TechnologyParams) -> float:
    """
    Rate of change of the filament gap, dg/dt in m/s.

    Args:
        g: Current filament gap in meters
        v: Stress voltage across the cell in volts
        p: Technology parameters

    Returns:
        float: dg/dt, non-positive for v >= 0
    """
    if g <= 0:
        raise DomainError(f"filament gap must be positive, got {g}")
    if v < 0:
        raise DomainError(f"stress voltage must be non-negative, got {v}")
    return float(_gap_rate(g, v, p))


def time_to_disturb_hrs(v: float, p: TechnologyParams, dt_max: float = None) -> float:
    """
    Time for an HRS cell held at ``v`` to close its gap from g0 to g_min.

    The gap equation is integrated with an adaptive explicit Runge-Kutta
    4(5) scheme; the crossing is located by a terminal event on the dense
    output.

    Args:
        v: Stress voltage in volts, > 0
        p: Technology parameters
        dt_max: Optional cap on the integrator step, seconds

    Returns:
        float: Crossing time in seconds, or ``math.inf`` past the horizon
    """
    if v <= 0:
        raise DomainError(f"HRS stress voltage must be positive, got {v}")

    u_min = p.g_min / p.g0

    # normalised gap u = g / g0 keeps the state O(1)
    def rhs(t, u):
        return _gap_rate(u * p.g0, v, p) / p.g0

    def crossing(t, u):
        return u[0] - u_min

    crossing.terminal = True
    crossing.direction = -1

    sol = solve_ivp(
        rhs,
        (0.0, p.horizon),
        [1.0],
        method='RK45',
        rtol=1e-6,
        atol=1e-10,
        events=crossing,
        max_step=dt_max if dt_max else np.inf,
    )
    if not sol.success:
        raise DomainError(f"gap integration failed at v={v}: {sol.message}")
    if sol.t_events[0].size == 0:
        logger.warning(f"HRS disturb time at v={v:.4g} V exceeds the {p.horizon:.3g} s horizon")
        return math.inf
    return float(sol.t_events[0][0])


def _log_sinh(x):
    x = np.asarray(x, dtype=float)
    return x - math.log(2.0) + np.log(-np.expm1(-2.0 * x))


def hrs_disturb_times(voltages, p: TechnologyParams) -> np.ndarray:
    """
    Vectorised HRS disturb times for an array of stress voltages.

    Same law as ``time_to_disturb_hrs`` but integrated with the gap as the
    independent variable, t = integral of dg / |dg/dt| from g_min to g0,
    which lets every cell share one adaptive quadrature.

    Args:
        voltages: Array of stress voltages, volts, >= 0
        p: Technology parameters

    Returns:
        np.ndarray: Disturb times in seconds, ``inf`` for zero voltage or
        beyond the horizon
    """
    v = np.asarray(voltages, dtype=float)
    if np.any(v < 0):
        raise DomainError("negative stress voltage in HRS disturb evaluation")

    times = np.full(v.shape, np.inf)
    active = v > 0
    if not np.any(active):
        return times

    uniq, inverse = np.unique(v[active], return_inverse=True)
    c0 = p.field_factor(p.g0)
    log_sinh_0 = _log_sinh(c0 * uniq)

    # integrand normalised by the rate at g0, bounded in (0, 1]
    def ratio(u):
        return np.exp(log_sinh_0 - _log_sinh(p.field_factor(u * p.g0) * uniq))

    integral, _ = quad_vec(ratio, p.g_min / p.g0, 1.0, epsrel=1e-10, norm='max')
    with np.errstate(over='ignore'):
        t = np.exp(np.log(integral * p.g0) - log_sinh_0 - math.log(p.thermal_velocity))
    t[t > p.horizon] = np.inf
    times[active] = t[inverse]
    return times


def time_to_disturb_lrs(v: float) -> float:
    """Lateral-growth disturb time of an LRS cell, 10^(-14.7 v + 6.7) s."""
    if v < 0:
        raise DomainError(f"LRS stress voltage must be non-negative, got {v}")
    return 10.0 ** (LRS_SLOPE * v + LRS_OFFSET)


def lrs_disturb_times(voltages) -> np.ndarray:
    v = np.asarray(voltages, dtype=float)
    if np.any(v < 0):
        raise DomainError("negative stress voltage in LRS disturb evaluation")
    return np.power(10.0, LRS_SLOPE * v + LRS_OFFSET)
