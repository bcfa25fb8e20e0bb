"""R_ZZ flux pulses, residual-coupling runs and average gate fidelity."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import quad

from ._csvio import open_text
from .errors import DetuningTooSmallError, UnreachableTargetError
from .evolve import PropagationSpec, logical_unitary_diagonal, overlap_series, propagate
from .fock import FockSpace
from .model import MIN_COUPLER_DETUNING, build_hamiltonian
from .params import CircuitDesign, RotatingFrameParams, invert_bias_for_detuning, rotating_frame_params
from .perturb import basis_truncation_deficit, cat_amplitudes, logical_basis, zeta_values

MODES = ("both-tuned", "coupler-only", "static")
MODE_ALIASES = {"both": "both-tuned", "coupler": "coupler-only"}
TARGET_THETA = -math.pi / 2


def _mode(mode: str) -> str:
    mode = MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _signed(flux: float, reference: float) -> float:
    return -flux if reference < 0 else flux


@dataclass(frozen=True)
class FluxSchedule:
    """Bias fluxes (flux quanta) of the three subsystems over ``[0, duration]``.

    The coupler follows a half-sine modulation of the effective qubit-qubit
    exchange, ``g_eff(t) = g_eff(0) - amplitude * sin(pi t / duration)``, by
    exact inversion of the detuning-flux relation.  In ``both-tuned`` mode the
    KPO fluxes track ``Delta_j(t) - g_jc^2 / Delta_c(t)`` at its off-point
    value; in ``coupler-only`` mode they stay fixed.
    """

    design: CircuitDesign
    duration: float
    mode: str
    amplitude: float = 0.0
    theta_target: float = 0.0
    off_point: RotatingFrameParams = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "mode", _mode(self.mode))
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if self.off_point is None:
            object.__setattr__(self, "off_point", rotating_frame_params(self.design))

    @property
    def off_fluxes(self) -> tuple[float, float, float]:
        return self.design.bias_fluxes

    def modulation(self, t: float) -> float:
        """Change of the effective exchange coupling below its off-point value, GHz."""
        if self.mode == "static" or t <= 0 or t >= self.duration:
            return 0.0
        return self.amplitude * math.sin(math.pi * t / self.duration)

    def coupler_detuning(self, t: float) -> float:
        p = self.off_point
        gg = p.g1c * p.g2c
        s = self.modulation(t)
        if s == 0:
            return p.delta_c
        denom = gg / p.delta_c + s
        if denom == 0 or abs(gg / denom) > 1e6:
            raise UnreachableTargetError("coupler detuning diverges")
        return gg / denom

    def kpo_detuning(self, j: int, t: float) -> float:
        """Target Delta_j(t) in both-tuned mode."""
        p = self.off_point
        g = (p.g1c, p.g2c)[j - 1]
        return g**2 / self.coupler_detuning(t) + p.residual_detuning(j)

    def fluxes(self, t: float) -> tuple[float, float, float]:
        if self.modulation(t) == 0:
            return self.off_fluxes
        f1, f2, fc = self.off_fluxes
        fc = _signed(invert_bias_for_detuning(self.design, "c", self.coupler_detuning(t)), fc)
        if self.mode == "both-tuned":
            f1 = _signed(invert_bias_for_detuning(self.design, "1", self.kpo_detuning(1, t)), f1)
            f2 = _signed(invert_bias_for_detuning(self.design, "2", self.kpo_detuning(2, t)), f2)
        return (f1, f2, fc)

    def params(self, t: float) -> RotatingFrameParams:
        return rotating_frame_params(self.design, self.fluxes(t))


def static_schedule(design: CircuitDesign, duration: float) -> FluxSchedule:
    return FluxSchedule(design, duration, "static")


def synthesize_pulse(design: CircuitDesign, t_g: float, mode: str = "both-tuned", theta: float = TARGET_THETA) -> FluxSchedule:
    """Half-sine flux pulse implementing R_ZZ(theta) in ``t_g`` ns.

    The exchange modulation amplitude is ``-theta / (16 alpha_1 alpha_2 t_g)``
    (GHz), with the cat amplitudes frozen at their off-point values.
    """
    mode = _mode(mode)
    if mode == "static":
        raise ValueError("use static_schedule for a pulse-free schedule")
    if t_g <= 0:
        raise ValueError("t_g must be positive")
    off = rotating_frame_params(design)
    if off.g1c * off.g2c == 0:
        raise UnreachableTargetError("the coupler cannot mediate an exchange when g_1c g_2c = 0")
    cat = cat_amplitudes(off)
    amplitude = -theta / (16 * cat.alpha1 * cat.alpha2 * t_g)
    schedule = FluxSchedule(design, t_g, mode, amplitude, theta, off)
    peak = schedule.coupler_detuning(t_g / 2)
    if abs(peak) < MIN_COUPLER_DETUNING or np.sign(peak) != np.sign(off.delta_c):
        raise DetuningTooSmallError(f"t_g = {t_g} ns pushes the coupler detuning below {MIN_COUPLER_DETUNING:g} GHz")
    schedule.fluxes(t_g / 2)  # raises if the peak is off the principal branch
    return schedule


def offset_drift_max(schedule: FluxSchedule, n_samples: int = 1000) -> float:
    """Largest drift (Hz) of Delta_j(t) - g_jc^2 / Delta_c(t) away from its off-point value."""
    off = schedule.off_point
    worst = 0.0
    for t in np.linspace(0, schedule.duration, n_samples):
        p = schedule.params(t)
        for j in (1, 2):
            worst = max(worst, abs(p.residual_detuning(j) - off.residual_detuning(j)))
    return worst * 1e9


def rzz_target(theta: float) -> np.ndarray:
    """diag(e^{-i theta/2}, e^{i theta/2}, e^{i theta/2}, e^{-i theta/2})."""
    return np.diag(rzz_diagonal(theta))


def rzz_diagonal(theta: float) -> np.ndarray:
    m, p = np.exp(-0.5j * theta), np.exp(0.5j * theta)
    return np.array([m, p, p, m])


def average_gate_fidelity(u_diag, theta_target: float = TARGET_THETA) -> float:
    """Average fidelity of a diagonal projected unitary against R_ZZ(theta_target).

    With ``M = R^dagger U``, ``F = (Tr M M^dagger + |Tr M|^2) / 20``.
    """
    m = np.conj(rzz_diagonal(theta_target)) * np.asarray(u_diag, dtype=complex)
    return float((np.sum(np.abs(m) ** 2) + abs(np.sum(m)) ** 2) / 20)


def extract_theta(u_diag) -> tuple[float, float]:
    """Rotation angle Theta and global phase theta of a diagonal ``u ~ e^{-i theta} R_ZZ(Theta)``."""
    u = np.asarray(u_diag, dtype=complex)
    if np.any(np.abs(u) == 0):
        raise ValueError("zero amplitude in projected unitary")
    u = u / np.abs(u)
    # u01/u00 and u10/u11 both equal e^{i Theta}; average them on the circle
    big_theta = float(np.angle(u[1] * np.conj(u[0]) + u[2] * np.conj(u[3])))
    ref = rzz_diagonal(big_theta)
    global_phase = -float(np.angle(np.sum(u * np.conj(ref))))
    return big_theta, global_phase


def perturbative_theta(design: CircuitDesign, schedule: FluxSchedule, terms: str = "full") -> float:
    """Theta = pi * integral of zeta_ZZ(t) dt (zeta in GHz, t in ns).

    ``terms="beam-splitter"`` keeps only the pulse-induced change of the
    effective exchange with the off-point cat amplitudes, which integrates to
    the target angle in closed form.
    """
    if schedule.duration == 0:
        return 0.0
    if terms == "full":
        def integrand(t):
            return zeta_values(schedule.params(t)).zeta_zz
    elif terms == "beam-splitter":
        off = schedule.off_point
        cat = cat_amplitudes(off)

        def integrand(t):
            p = schedule.params(t)
            return 8 * (p.effective_coupling - off.effective_coupling) * cat.alpha1 * cat.alpha2
    else:
        raise ValueError(f"unknown terms {terms!r}")
    value, _ = quad(integrand, 0, schedule.duration, epsabs=1e-10, epsrel=1e-12, limit=200)
    return math.pi * value


@dataclass
class ResidualResult:
    times: np.ndarray
    infidelity: np.ndarray
    norm_drift: float = 0.0

    @property
    def max_infidelity(self) -> float:
        return float(self.infidelity.max())

    def local_maxima(self) -> int:
        x = self.infidelity
        return int(np.sum((x[1:-1] > x[:-2]) & (x[1:-1] >= x[2:])))


def equal_superposition(basis) -> np.ndarray:
    return 0.5 * np.sum(basis, axis=0)


def residual_infidelity(
    design: CircuitDesign,
    space: FockSpace,
    duration: float = 100.0,
    n_samples: int = 200,
    basis_mode: str = "coherent",
    spec: PropagationSpec | None = None,
) -> ResidualResult:
    """Infidelity 1 - |<Psi(t)|Psi(0)>|^2 of the equal logical superposition under the static H."""
    params = rotating_frame_params(design)
    basis = logical_basis(params, space, basis_mode)
    psi0 = equal_superposition(basis)
    psi0 = psi0 / np.linalg.norm(psi0)
    times = np.linspace(0.0, duration, n_samples + 1)
    if spec is None:
        spec = PropagationSpec()
    run = PropagationSpec(
        t_start=0.0, t_end=duration, rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
        sample_times=tuple(times), method=spec.method, step=spec.step,
    )
    traj = propagate(build_hamiltonian(params, space), psi0, run)
    infid = 1.0 - np.abs(overlap_series(traj, psi0)) ** 2
    return ResidualResult(times, infid, traj.max_norm_drift)


@dataclass
class GateReport:
    t_g: float
    mode: str
    avg_fidelity: float
    theta_measured: float
    global_phase: float
    u_diag: np.ndarray
    fidelity_vs_measured: float = math.nan
    theta_perturbative: float = math.nan
    norm_drift: float = 0.0
    truncation_deficit: float = 0.0
    offset_drift_hz_max: float = 0.0

    @property
    def infidelity(self) -> float:
        return 1.0 - self.avg_fidelity


def run_gate(
    design: CircuitDesign,
    space: FockSpace,
    t_g: float,
    mode: str = "both-tuned",
    spec: PropagationSpec | None = None,
    basis_mode: str = "coherent",
) -> GateReport:
    """Simulate the R_ZZ(-pi/2) pulse and score it against the ideal gate."""
    schedule = synthesize_pulse(design, t_g, mode)
    off = schedule.off_point
    basis = logical_basis(off, space, basis_mode)
    u, traj = logical_unitary_diagonal(design, schedule, space, basis, spec, return_trajectory=True)
    theta, phase = extract_theta(u)
    return GateReport(
        t_g=t_g,
        mode=schedule.mode,
        avg_fidelity=average_gate_fidelity(u, TARGET_THETA),
        theta_measured=theta,
        global_phase=phase,
        u_diag=u,
        fidelity_vs_measured=average_gate_fidelity(u, theta),
        theta_perturbative=perturbative_theta(design, schedule),
        norm_drift=traj.max_norm_drift,
        truncation_deficit=basis_truncation_deficit(off, space),
        offset_drift_hz_max=offset_drift_max(schedule),
    )


def gate_sweep(design, space, t_gs, mode="both-tuned", spec=None, jobs: int = 1) -> list[GateReport]:
    def one(t_g):
        return run_gate(design, space, t_g, mode, spec)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(one, t_gs))
    return [one(t) for t in t_gs]


def write_gate_sweep_csv(path, reports) -> None:
    with open_text(path) as fh:
        w = csv.writer(fh)
        w.writerow(["t_g_ns", "mode", "infidelity", "theta_rad", "eq36_residual_hz_max", "norm_drift"])
        for r in reports:
            w.writerow([
                f"{r.t_g:.16e}", r.mode, f"{r.infidelity:.16e}", f"{r.theta_measured:.16e}",
                f"{r.offset_drift_hz_max:.16e}", f"{r.norm_drift:.16e}",
            ])


def write_residual_csv(path, result: ResidualResult) -> None:
    with open_text(path) as fh:
        w = csv.writer(fh)
        w.writerow(["t_ns", "infidelity"])
        for t, x in zip(result.times, result.infidelity):
            w.writerow([f"{t:.16e}", f"{x:.16e}"])
