"""Schrödinger propagation in the rotating frame.

The equation of motion is ``d psi / dt = -2 pi i H(t) psi`` with H in GHz and
t in ns.  States may be a single ``(D,)`` vector or a ``(D, k)`` block that is
propagated column by column in one integration.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg
from scipy.integrate import solve_ivp

from ._csvio import open_text
from .errors import HermiticityError, StepSizeError
from .model import TimeDependentHamiltonian, dense_eigh, hermiticity_defect

METHODS = ("adaptive", "rk4", "static")
TWO_PI = 2 * math.pi
DENSE_EIG_LIMIT = 4096


@dataclass(frozen=True)
class PropagationSpec:
    """Integration window and accuracy.

    ``method`` is ``"adaptive"`` (embedded 8(5,3) Runge-Kutta), ``"rk4"``
    (classical fixed step of length ``step``) or ``"static"`` (exact
    exponential of a time-independent H).
    """

    t_start: float = 0.0
    t_end: float = 0.0
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    sample_times: tuple | None = None
    method: str = "adaptive"
    step: float = 1e-3

    def __post_init__(self):
        if self.t_end < self.t_start:
            raise ValueError("t_end must be >= t_start")
        for tol in (self.rel_tol, self.abs_tol):
            if not 0 < tol <= 1e-3:
                raise ValueError("tolerances must lie in (0, 1e-3]")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.sample_times is not None:
            ts = tuple(float(t) for t in self.sample_times)
            if any(t < self.t_start - 1e-12 or t > self.t_end + 1e-12 for t in ts):
                raise ValueError("sample_times must lie inside [t_start, t_end]")
            if any(b < a for a, b in zip(ts, ts[1:])):
                raise ValueError("sample_times must be non-decreasing")
            object.__setattr__(self, "sample_times", ts)

    @property
    def times(self) -> np.ndarray:
        if self.sample_times is None:
            return np.array([self.t_start, self.t_end])
        return np.asarray(self.sample_times)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_times, D) or (n_times, D, k)
    norm_drift: np.ndarray = field(default_factory=lambda: np.zeros(0))
    n_steps: int = 0
    n_evaluations: int = 0

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(self.norm_drift, initial=0.0))


def _norm_drift(states: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(states, axis=1)
    return np.abs(norms - 1.0).reshape(len(states), -1).max(axis=1)


def _as_matvec(h):
    if hasattr(h, "matvec"):
        return h.matvec
    if sp.issparse(h) or isinstance(h, np.ndarray):
        return lambda t, psi: h @ psi
    if callable(h):
        return lambda t, psi: h(t) @ psi
    raise TypeError("Hamiltonian must be a matrix, an operator-valued callable or expose matvec(t, psi)")


def _spot_check_hermitian(h, spec: PropagationSpec):
    if sp.issparse(h) or isinstance(h, np.ndarray):
        ops = [h]
    elif hasattr(h, "operator"):
        ops = [h.operator(t) for t in (spec.t_start, 0.5 * (spec.t_start + spec.t_end), spec.t_end)]
    elif callable(h) and not hasattr(h, "matvec"):
        ops = [h(t) for t in (spec.t_start, 0.5 * (spec.t_start + spec.t_end), spec.t_end)]
    else:
        return
    for op in ops:
        op = sp.csr_matrix(op)
        scale = max(float(np.abs(op.data).max(initial=0.0)), 1e-300)
        if hermiticity_defect(op) > 1e-12 * scale:
            raise HermiticityError("Hamiltonian is not Hermitian")


def propagate(h, psi0: np.ndarray, spec: PropagationSpec) -> Trajectory:
    """Integrate the Schrödinger equation from ``spec.t_start`` to ``spec.t_end``.

    Parameters
    ----------
    h
        A sparse/dense matrix (time independent), a callable ``t -> operator``,
        or an object with ``matvec(t, psi)`` such as
        :class:`~kerrcat.model.TimeDependentHamiltonian`.
    psi0
        Initial state(s), ``(D,)`` or ``(D, k)``.
    spec
        Window, tolerances, sample times and method.

    Returns
    -------
    Trajectory
        States at ``spec.times`` (``t_start`` and ``t_end`` when no sample
        times are given).
    """
    psi0 = np.asarray(psi0, dtype=complex)
    times = spec.times
    _spot_check_hermitian(h, spec)

    if spec.method == "static":
        if not (sp.issparse(h) or isinstance(h, np.ndarray)):
            raise ValueError("the static method needs a time-independent matrix")
        return _propagate_static(h, psi0, times, spec)

    if spec.t_end == spec.t_start:
        states = np.repeat(psi0[None], len(times), axis=0)
        return Trajectory(times, states, _norm_drift(states))

    matvec = _as_matvec(h)
    if spec.method == "rk4":
        return _propagate_rk4(matvec, psi0, times, spec)

    shape = psi0.shape

    def rhs(t, y):
        return (-1j * TWO_PI) * matvec(t, y.reshape(shape)).reshape(-1)

    sol = solve_ivp(
        rhs,
        (spec.t_start, spec.t_end),
        psi0.reshape(-1),
        method="DOP853",
        t_eval=times,
        rtol=spec.rel_tol,
        atol=spec.abs_tol,
    )
    if sol.status != 0:
        raise StepSizeError(f"integration failed at t={sol.t[-1] if sol.t.size else spec.t_start}: {sol.message}")
    states = sol.y.T.reshape((len(times),) + shape)
    n_steps = int(round((sol.nfev - 2) / 12))  # DOP853 uses 12 evaluations per step
    return Trajectory(times, states, _norm_drift(states), n_steps, int(sol.nfev))


def _propagate_rk4(matvec, psi0, times, spec):
    def f(t, y):
        return (-1j * TWO_PI) * matvec(t, y)

    y = psi0.copy()
    t = spec.t_start
    out = []
    steps = 0
    for target in times:
        span = target - t
        if span > 0:
            n = max(1, math.ceil(span / spec.step - 1e-9))
            dt = span / n
            for _ in range(n):
                k1 = f(t, y)
                k2 = f(t + dt / 2, y + dt / 2 * k1)
                k3 = f(t + dt / 2, y + dt / 2 * k2)
                k4 = f(t + dt, y + dt * k3)
                y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                t += dt
            steps += n
            t = target
        out.append(y.copy())
    states = np.array(out)
    return Trajectory(times, states, _norm_drift(states), steps, 4 * steps)


def _propagate_static(h, psi0, times, spec):
    dt = times - spec.t_start
    if h.shape[0] <= DENSE_EIG_LIMIT:
        energies, vecs = dense_eigh(h)
        coeffs = vecs.conj().T @ psi0
        phases = np.exp(-1j * TWO_PI * np.outer(dt, energies))
        if psi0.ndim == 1:
            states = (phases * coeffs[None, :]) @ vecs.T
        else:
            states = np.einsum("ij,tj,jk->tik", vecs, phases, coeffs)
    else:
        gen = (-1j * TWO_PI) * sp.csr_matrix(h)
        states = []
        y, last = psi0, 0.0
        for d in dt:
            if d > last:
                y = scipy.sparse.linalg.expm_multiply(gen * (d - last), y)
                last = d
            states.append(y)
        states = np.array(states)
    return Trajectory(times, states, _norm_drift(states))


def overlap_series(trajectory: Trajectory, psi0: np.ndarray) -> np.ndarray:
    """<psi0 | psi(t)> at every sample."""
    return trajectory.states.reshape(len(trajectory.times), -1) @ np.asarray(psi0).reshape(-1).conj()


def logical_unitary_diagonal(design, schedule, space, basis, spec: PropagationSpec | None = None, return_trajectory=False):
    """Diagonal ``<lm| T exp(-i int H) |lm>`` of the evolution over ``schedule``.

    The four basis states are propagated together as one block.
    """
    block = np.column_stack(basis)
    if schedule.duration == 0:
        u = np.ones(block.shape[1], dtype=complex)
        return (u, None) if return_trajectory else u
    if spec is None:
        spec = PropagationSpec(t_end=schedule.duration)
    else:
        spec = PropagationSpec(
            t_start=0.0, t_end=schedule.duration, rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
            method=spec.method, step=spec.step,
        )
    h = TimeDependentHamiltonian(design, schedule, space)
    traj = propagate(h, block, spec)
    final = traj.final
    u = np.einsum("ik,ik->k", block.conj(), final)
    return (u, traj) if return_trajectory else u


def write_trajectory_csv(path, times, columns: dict) -> None:
    """Write ``t_ns,<name>...`` rows with 17 significant digits."""
    names = list(columns)
    with open_text(path) as fh:
        w = csv.writer(fh)
        w.writerow(["t_ns"] + names)
        for i, t in enumerate(times):
            w.writerow([f"{t:.16e}"] + [f"{float(np.real(columns[n][i])):.16e}" for n in names])
