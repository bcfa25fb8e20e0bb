"""Circuit design values to rotating-frame Hamiltonian parameters.

Conventions used throughout the package:

* energies and frequencies are ordinary frequencies (E/h, omega/2pi) in GHz;
* capacitances are in fF;
* bias fluxes are in units of the flux quantum, ``flux = phi_bias / (2 pi)``,
  so the principal branch is ``|flux| < 1/2``;
* subsystems are addressed as ``"1"``, ``"2"`` and ``"c"`` (or 0, 1, 2).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
import math

import numpy as np

from .constants import CODATA, PhysicalConstants
from .errors import BranchError, DesignError, SingularMatrixError, UnreachableTargetError

SUBSYSTEMS = ("1", "2", "c")
MAX_PUMP_AMPLITUDE = 0.1


def subsystem_index(which) -> int:
    """Map ``"1" | "2" | "c"`` (or an int 0..2) to a matrix index."""
    if isinstance(which, (int, np.integer)) and 0 <= which < 3:
        return int(which)
    key = str(which).lower()
    if key in SUBSYSTEMS:
        return SUBSYSTEMS.index(key)
    raise KeyError(f"unknown subsystem {which!r}; expected one of {SUBSYSTEMS}")


@dataclass(frozen=True)
class SubsystemDesign:
    """Design values of one SQUID-array oscillator.

    Attributes
    ----------
    shunt_capacitance : float
        Capacitance of each of the two shunting capacitors, fF.
    junction_capacitance : float
        Capacitance of each Josephson junction, fF.
    squid_count : int
        Number of SQUIDs in the array.
    josephson_energy : float
        Josephson energy of each junction, GHz.
    bias_flux : float
        Static bias flux through each SQUID in flux quanta.
    pump_amplitude : float
        Relative amplitude of the parametric flux pump.
    """

    shunt_capacitance: float
    junction_capacitance: float
    squid_count: int
    josephson_energy: float
    bias_flux: float
    pump_amplitude: float = 0.0

    def __post_init__(self):
        if self.shunt_capacitance <= 0 or self.junction_capacitance <= 0:
            raise DesignError("capacitances must be positive")
        if self.josephson_energy <= 0:
            raise DesignError("josephson_energy must be positive")
        if int(self.squid_count) != self.squid_count or self.squid_count < 1:
            raise DesignError("squid_count must be a positive integer")
        if abs(self.pump_amplitude) >= MAX_PUMP_AMPLITUDE:
            raise DesignError(f"|pump_amplitude| must be < {MAX_PUMP_AMPLITUDE}")
        if not abs(self.bias_flux) < 0.5:
            raise DesignError("bias_flux must lie on the principal branch |flux| < 1/2")

    @property
    def capacitance(self) -> float:
        """Effective capacitance 2 C_S + 2 C_J / N of the symmetric array, fF."""
        return 2 * self.shunt_capacitance + 2 * self.junction_capacitance / self.squid_count


@dataclass(frozen=True)
class CircuitDesign:
    """Two KPOs (``qubit1``, ``qubit2``) capacitively coupled through a resonator."""

    qubit1: SubsystemDesign
    qubit2: SubsystemDesign
    coupler: SubsystemDesign
    c12: float
    c1c: float
    c2c: float
    pump_frequency: float

    def __post_init__(self):
        if min(self.c12, self.c1c, self.c2c) < 0:
            raise DesignError("coupling capacitances must be non-negative")
        if self.coupler.pump_amplitude != 0:
            raise DesignError("the coupler is not pumped; its pump_amplitude must be 0")
        if self.pump_frequency <= 0:
            raise DesignError("pump_frequency must be positive")

    @property
    def subsystems(self) -> tuple[SubsystemDesign, SubsystemDesign, SubsystemDesign]:
        return (self.qubit1, self.qubit2, self.coupler)

    def subsystem(self, which) -> SubsystemDesign:
        return self.subsystems[subsystem_index(which)]

    @property
    def bias_fluxes(self) -> tuple[float, float, float]:
        return tuple(s.bias_flux for s in self.subsystems)

    def with_bias(self, which, flux: float) -> "CircuitDesign":
        """Return a copy with the static bias flux of one subsystem replaced."""
        name = ("qubit1", "qubit2", "coupler")[subsystem_index(which)]
        return replace(self, **{name: replace(getattr(self, name), bias_flux=flux)})


def table1_design() -> CircuitDesign:
    """The bold design column of the reference parameter table."""
    kpo = SubsystemDesign(470.0, 30.0, 1, 130.0, 0.25, 0.019)
    return CircuitDesign(
        qubit1=kpo,
        qubit2=kpo,
        coupler=SubsystemDesign(400.0, 30.0, 3, 426.0, 2e-3, 0.0),
        c12=0.05,
        c1c=7.0,
        c2c=7.0,
        pump_frequency=10.598944,
    )


def capacitance_matrix(design: CircuitDesign) -> np.ndarray:
    """Maxwell capacitance matrix (fF) of the three nodes, ordered (1, 2, c)."""
    c1, c2, cc = (s.capacitance for s in design.subsystems)
    c12, c1c, c2c = design.c12, design.c1c, design.c2c
    return np.array(
        [
            [c1 + c12 + c1c, -c12, -c1c],
            [-c12, c2 + c12 + c2c, -c2c],
            [-c1c, -c2c, cc + c1c + c2c],
        ]
    )


def _inverse_3x3(m: np.ndarray, rcond: float = 1e-12) -> np.ndarray:
    (a, b, c), (d, e, f), (g, h, i) = m
    adj = np.array(
        [
            [e * i - f * h, c * h - b * i, b * f - c * e],
            [f * g - d * i, a * i - c * g, c * d - a * f],
            [d * h - e * g, b * g - a * h, a * e - b * d],
        ]
    )
    det = a * adj[0, 0] + b * adj[1, 0] + c * adj[2, 0]
    if abs(det) <= rcond * abs(a * e * i):
        raise SingularMatrixError(f"capacitance matrix is singular (det={det:g})")
    return adj / det


def charging_energies(cm: np.ndarray, constants: PhysicalConstants = CODATA) -> np.ndarray:
    """Charging-energy matrix ``e^2 M^-1 / 2`` in GHz.

    The diagonal holds E_1^C, E_2^C, E_c^C and the off-diagonal entries the
    cross terms E_12^C, E_1c^C, E_2c^C, so that ``2 e^2 M^-1 = 4 E^C``.
    """
    cm = np.asarray(cm, dtype=float)
    if not np.allclose(cm, cm.T, rtol=0, atol=1e-12 * np.abs(cm).max()):
        raise SingularMatrixError("capacitance matrix must be symmetric")
    inv = _inverse_3x3(cm) * 1e15  # fF^-1 -> F^-1
    ec = constants.electron_charge**2 / 2 * inv / constants.planck_h / 1e9
    ec = (ec + ec.T) / 2
    if np.any(np.diag(ec) <= 0):
        raise SingularMatrixError("capacitance matrix is not positive definite")
    return ec


@lru_cache(maxsize=256)
def _charging_cached(design: CircuitDesign) -> np.ndarray:
    ec = charging_energies(capacitance_matrix(design))
    ec.setflags(write=False)
    return ec


def design_charging(design: CircuitDesign) -> np.ndarray:
    """Charging-energy matrix of ``design`` (cached, read-only)."""
    return _charging_cached(design)


def bias_josephson_energy(design: CircuitDesign, which, flux: float) -> float:
    """Effective SQUID Josephson energy 2 E_J cos(pi * flux), GHz."""
    cos = math.cos(math.pi * flux)
    if not abs(flux) < 0.5 or cos <= 0:
        raise BranchError(f"flux {flux!r} is outside the principal branch")
    return 2 * design.subsystem(which).josephson_energy * cos


@dataclass(frozen=True)
class SubsystemParams:
    """Oscillator coefficients of one subsystem at a given bias flux (GHz)."""

    bare_frequency: float
    kerr: float
    pump_rate: float
    bias_energy: float
    bias_energy_0: float

    @property
    def frequency(self) -> float:
        """Dressed frequency ``bare_frequency - kerr``."""
        return self.bare_frequency - self.kerr


def _frequency_coefficients(design, charging, which, flux_0):
    """Coefficients (a, b) of ``omega(x) = a (x + 1) - b x`` with x = E(t) / E(0)."""
    k = subsystem_index(which)
    sub = design.subsystems[k]
    ec = charging[k, k]
    e0 = bias_josephson_energy(design, k, flux_0)
    return math.sqrt(2 * ec * e0 / sub.squid_count), ec / sub.squid_count**2, e0


def subsystem_params(design, charging, which, flux_at_t, flux_at_0=None) -> SubsystemParams:
    """Bare frequency, Kerr and pump rate of a subsystem at bias ``flux_at_t``.

    The mode operators are defined at ``flux_at_0`` (the design's static bias
    by default), which is why both fluxes enter.
    """
    k = subsystem_index(which)
    sub = design.subsystems[k]
    if flux_at_0 is None:
        flux_at_0 = sub.bias_flux
    ec = charging[k, k]
    n = sub.squid_count
    e0 = bias_josephson_energy(design, k, flux_at_0)
    et = bias_josephson_energy(design, k, flux_at_t)
    ratio = et / e0
    bare = math.sqrt(2 * ec * e0 / n) * (ratio + 1)
    kerr = ec * ratio / n**2
    pump = (
        math.pi * sub.pump_amplitude * sub.josephson_energy
        * math.sqrt(2 * ec / (n * e0)) * math.sin(math.pi * flux_at_t)
    )
    return SubsystemParams(bare, kerr, pump, et, e0)


def coupling_strengths(design: CircuitDesign, charging=None) -> tuple[float, float, float]:
    """Beam-splitter couplings ``(g_1c, g_2c, g_12)`` in GHz at the static bias."""
    if charging is None:
        charging = design_charging(design)
    ratio = [
        bias_josephson_energy(design, k, s.bias_flux) / (s.squid_count * charging[k, k])
        for k, s in enumerate(design.subsystems)
    ]

    def g(i, j):
        return math.sqrt(2) * charging[i, j] * (ratio[i] * ratio[j]) ** 0.25

    return g(0, 2), g(1, 2), g(0, 1)


@dataclass(frozen=True)
class RotatingFrameParams:
    """Coefficients of the rotating-frame Hamiltonian, all in GHz."""

    delta1: float
    delta2: float
    delta_c: float
    kerr1: float
    kerr2: float
    kerr_c: float
    pump1: float
    pump2: float
    g1c: float
    g2c: float
    g12: float
    omega1: float = field(default=math.nan, compare=False)
    omega2: float = field(default=math.nan, compare=False)
    omega_c: float = field(default=math.nan, compare=False)

    @property
    def detunings(self):
        return (self.delta1, self.delta2, self.delta_c)

    @property
    def kerrs(self):
        return (self.kerr1, self.kerr2, self.kerr_c)

    @property
    def effective_coupling(self) -> float:
        """Qubit-qubit exchange left after the coupler-mediated part, g_12 - g_1c g_2c / Delta_c."""
        return self.g12 - self.g1c * self.g2c / self.delta_c

    def residual_detuning(self, j) -> float:
        """Delta_j - g_jc^2 / Delta_c for KPO ``j`` (1 or 2)."""
        delta, g = {"1": (self.delta1, self.g1c), "2": (self.delta2, self.g2c)}[str(j)]
        return delta - g**2 / self.delta_c


def rotating_frame_params(design: CircuitDesign, fluxes=None) -> RotatingFrameParams:
    """Assemble the rotating-frame coefficients at bias ``fluxes`` (defaults to static).

    Couplings always use the static-bias energies; detunings, Kerrs and pump
    rates follow ``fluxes``.
    """
    charging = design_charging(design)
    if fluxes is None:
        fluxes = design.bias_fluxes
    subs = [subsystem_params(design, charging, k, fluxes[k]) for k in range(3)]
    half_pump = design.pump_frequency / 2
    g1c, g2c, g12 = coupling_strengths(design, charging)
    return RotatingFrameParams(
        *map(float, (
            subs[0].frequency - half_pump,
            subs[1].frequency - half_pump,
            subs[2].frequency - half_pump,
            subs[0].kerr, subs[1].kerr, subs[2].kerr,
            subs[0].pump_rate, subs[1].pump_rate,
            g1c, g2c, g12,
            subs[0].frequency, subs[1].frequency, subs[2].frequency,
        ))
    )


def invert_bias_for_detuning(design: CircuitDesign, which, target_delta: float, charging=None) -> float:
    """Principal-branch flux in [0, 1/2) at which subsystem ``which`` has detuning ``target_delta``.

    The dressed frequency is affine in the bias Josephson energy, so the
    inversion is closed form; the negative-flux solution is its mirror image.
    """
    if charging is None:
        charging = design_charging(design)
    k = subsystem_index(which)
    sub = design.subsystems[k]
    a, b, e0 = _frequency_coefficients(design, charging, k, sub.bias_flux)
    x = (target_delta + design.pump_frequency / 2 - a) / (a - b)
    e_t = x * e0
    e_max = 2 * sub.josephson_energy
    if not 0 < e_t <= e_max * (1 + 1e-15):
        raise UnreachableTargetError(
            f"detuning {target_delta!r} GHz needs a bias energy {e_t:g} GHz outside (0, {e_max:g}]"
        )
    return math.acos(min(e_t / e_max, 1.0)) / math.pi


def detuning_range(design: CircuitDesign, which) -> tuple[float, float]:
    """Open-closed interval of detunings reachable on the principal branch."""
    charging = design_charging(design)
    k = subsystem_index(which)
    sub = design.subsystems[k]
    a, b, e0 = _frequency_coefficients(design, charging, k, sub.bias_flux)
    half = design.pump_frequency / 2
    return a - half, a + (a - b) * 2 * sub.josephson_energy / e0 - half
