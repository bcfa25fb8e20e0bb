"""Coherent-product logical basis, first-order energies and ZZ-null search."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass
import math
import warnings

import numpy as np
import scipy.optimize

from ._csvio import open_text
from .errors import ConvergenceError, DetuningTooSmallError, NoSignChangeError, TruncationWarning
from .fock import FockSpace, coherent, lowdin_orthonormalize, product_state, truncation_deficit
from .model import MIN_COUPLER_DETUNING, build_hamiltonian, dense_eigh
from .params import CircuitDesign, RotatingFrameParams, rotating_frame_params

LOGICAL_LABELS = ("00", "01", "10", "11")
DENSE_EIG_LIMIT = 4096


@dataclass(frozen=True)
class CatAmplitudes:
    alpha1: float
    alpha2: float
    alpha_c_plus: float
    alpha_c_minus: float

    def logical_amplitudes(self):
        """Coherent amplitudes (a1, a2, ac) of the four logical states 00, 01, 10, 11."""
        a1, a2 = self.alpha1, self.alpha2
        return (
            (a1, a2, -self.alpha_c_plus),
            (a1, -a2, -self.alpha_c_minus),
            (-a1, a2, self.alpha_c_minus),
            (-a1, -a2, self.alpha_c_plus),
        )


@dataclass(frozen=True)
class ZetaSet:
    """Pauli decomposition of four level energies, GHz (ordinary frequency)."""

    zeta_ii: float
    zeta_zz: float
    zeta_zi: float
    zeta_iz: float


@dataclass(frozen=True)
class PerturbedEnergies:
    e00: float
    e01: float
    e10: float
    e11: float
    e0: float

    def as_tuple(self):
        return (self.e00, self.e01, self.e10, self.e11)


def zeta_from_energies(e00: float, e01: float, e10: float, e11: float) -> ZetaSet:
    # pairing (00, 11) and (01, 10) keeps zeta_ZI and zeta_IZ exactly zero
    # whenever E00 = E11 and E01 = E10, as first-order energies always are
    even, odd = e00 + e11, e01 + e10
    d_even, d_odd = e00 - e11, e01 - e10
    return ZetaSet(
        zeta_ii=even + odd,
        zeta_zz=even - odd,
        zeta_zi=d_even + d_odd,
        zeta_iz=d_even - d_odd,
    )


def _check_coupler(params: RotatingFrameParams):
    if abs(params.delta_c) < MIN_COUPLER_DETUNING:
        raise DetuningTooSmallError(f"|delta_c| = {abs(params.delta_c):g} GHz is below threshold")


def cat_amplitudes(params: RotatingFrameParams) -> CatAmplitudes:
    """alpha_j = sqrt(p_j / K_j) and the coupler displacements alpha_c^+-."""
    _check_coupler(params)
    alphas = []
    for pump, kerr in ((params.pump1, params.kerr1), (params.pump2, params.kerr2)):
        if kerr <= 0 or pump / kerr < 0:
            raise ValueError("cat amplitudes need K_j > 0 and p_j / K_j >= 0")
        alphas.append(math.sqrt(pump / kerr))
    a1, a2 = alphas
    plus = (params.g1c * a1 + params.g2c * a2) / params.delta_c
    minus = (params.g1c * a1 - params.g2c * a2) / params.delta_c
    return CatAmplitudes(a1, a2, plus, minus)


def perturbed_energies(params: RotatingFrameParams, include_x: bool = False) -> PerturbedEnergies:
    """First-order energies of the four coherent-product states (GHz).

    By default only the ZZ part of the perturbation enters.  With
    ``include_x=True`` the diagonal of the X part,
    ``sum_j (Delta_j - g_jc^2 / Delta_c) alpha_j^2``, is added as well; it is
    the same for all four states, so the zeta coefficients are unaffected, but
    it is needed to compare against ``<psi_lm|H|psi_lm>`` directly.
    """
    cat = cat_amplitudes(params)
    e0 = 0.5 * (params.kerr1 * cat.alpha1**4 + params.kerr2 * cat.alpha2**4)
    hop = 2 * params.effective_coupling * cat.alpha1 * cat.alpha2
    shift = 0.0
    if include_x:
        shift = params.residual_detuning(1) * cat.alpha1**2 + params.residual_detuning(2) * cat.alpha2**2
    even = e0 + shift + hop - 0.5 * params.kerr_c * cat.alpha_c_plus**4
    odd = e0 + shift - hop - 0.5 * params.kerr_c * cat.alpha_c_minus**4
    return PerturbedEnergies(even, odd, odd, even, e0)


def zeta_values(params: RotatingFrameParams) -> ZetaSet:
    """Closed-form zeta coefficients; zeta_ZI = zeta_IZ = 0 identically."""
    cat = cat_amplitudes(params)
    e0 = 0.5 * (params.kerr1 * cat.alpha1**4 + params.kerr2 * cat.alpha2**4)
    p4, m4 = cat.alpha_c_plus**4, cat.alpha_c_minus**4
    return ZetaSet(
        zeta_ii=4 * e0 - params.kerr_c * (p4 + m4),
        zeta_zz=8 * params.effective_coupling * cat.alpha1 * cat.alpha2 - params.kerr_c * (p4 - m4),
        zeta_zi=0.0,
        zeta_iz=0.0,
    )


def coherent_products(params: RotatingFrameParams, space: FockSpace, method: str = "displace"):
    """The four (non-orthogonal) coherent products, ordered 00, 01, 10, 11."""
    cat = cat_amplitudes(params)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        return [
            product_state(space, [coherent(d, a, method) for d, a in zip(space.dims, amps)])
            for amps in cat.logical_amplitudes()
        ]


def basis_truncation_deficit(params: RotatingFrameParams, space: FockSpace) -> float:
    """Largest per-factor coherent-state weight lost to truncation."""
    cat = cat_amplitudes(params)
    return max(
        truncation_deficit(d, a)
        for amps in cat.logical_amplitudes()
        for d, a in zip(space.dims, amps)
    )


def logical_basis(
    params: RotatingFrameParams,
    space: FockSpace,
    mode: str = "coherent",
    coherent_method: str = "displace",
) -> list[np.ndarray]:
    """Orthonormal logical states |00>, |01>, |10>, |11>.

    ``mode="coherent"`` Lowdin-orthonormalises the coherent products.
    ``mode="numerical"`` finds the four-dimensional eigenspace of the static H
    that best contains the coherent products, projects the products onto it
    and orthonormalises; each state is phased to a positive real overlap with
    its coherent partner.
    """
    deficit = basis_truncation_deficit(params, space)
    if deficit > 1e-10:
        warnings.warn(
            f"logical basis loses up to {deficit:.2e} weight to truncation at dims {space.dims}",
            TruncationWarning,
            stacklevel=2,
        )
    products = coherent_products(params, space, coherent_method)
    if mode == "coherent":
        return lowdin_orthonormalize(products)
    if mode != "numerical":
        raise ValueError(f"unknown basis mode {mode!r}")

    h = build_hamiltonian(params, space)
    b = np.column_stack(lowdin_orthonormalize(products))
    if space.size <= DENSE_EIG_LIMIT:
        _, vecs = dense_eigh(h)
        weight = np.sum(np.abs(vecs.conj().T @ b) ** 2, axis=1)
        sub = vecs[:, np.sort(np.argsort(weight)[-4:])]
    else:
        sub = _ritz_subspace(h, b)
    proj = sub @ (sub.conj().T @ b)
    out = lowdin_orthonormalize([proj[:, i] for i in range(4)])
    fixed = []
    for psi, ref in zip(out, products):
        ov = np.vdot(ref, psi)
        fixed.append(psi * (abs(ov) / ov))
    return fixed


def _ritz_subspace(h, b, order: int = 6) -> np.ndarray:
    """Four Ritz vectors of ``h`` with the largest weight on span(b), from a block Krylov space."""
    blocks = [b]
    for _ in range(order):
        blocks.append(h @ blocks[-1])
    q, _ = np.linalg.qr(np.column_stack(blocks))
    hq = q.conj().T @ (h @ q)
    _, y = np.linalg.eigh((hq + hq.conj().T) / 2)
    ritz = q @ y
    weight = np.sum(np.abs(ritz.conj().T @ b) ** 2, axis=1)
    return ritz[:, np.sort(np.argsort(weight)[-4:])]


def zz_at_bias(design: CircuitDesign, coupler_flux: float) -> float:
    """zeta_ZZ (GHz) of the static circuit with the coupler biased at ``coupler_flux``."""
    return zeta_values(rotating_frame_params(design.with_bias("c", coupler_flux))).zeta_zz


def zz_sweep(design: CircuitDesign, flux_range, n_points: int, jobs: int = 1) -> np.ndarray:
    """Rows of (coupler flux in flux quanta, zeta_ZZ in Hz).

    Each point is an independent static circuit, so the couplings are
    re-derived at every bias.
    """
    fluxes = np.linspace(flux_range[0], flux_range[1], n_points)
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            zz = list(pool.map(lambda f: zz_at_bias(design, f), fluxes))
    else:
        zz = [zz_at_bias(design, f) for f in fluxes]
    return np.column_stack([fluxes, np.asarray(zz) * 1e9])


def write_sweep_csv(path, rows: np.ndarray) -> None:
    with open_text(path) as fh:
        w = csv.writer(fh)
        w.writerow(["phi_c_bias_over_2pi", "zeta_zz_hz"])
        for f, z in rows:
            w.writerow([f"{f:.16e}", f"{z:.16e}"])


def find_null_bias(design: CircuitDesign, bracket=(0.0, 0.01), xtol: float = 1e-15, maxiter: int = 200) -> float:
    """Coupler bias flux (flux quanta) inside ``bracket`` where zeta_ZZ vanishes."""
    lo, hi = bracket
    f_lo, f_hi = zz_at_bias(design, lo), zz_at_bias(design, hi)
    if f_lo == 0:
        return float(lo)
    if f_hi == 0:
        return float(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChangeError(
            f"zeta_ZZ has the same sign at both ends of {bracket} ({f_lo:.3g}, {f_hi:.3g} GHz)"
        )
    try:
        root = scipy.optimize.brentq(
            lambda f: zz_at_bias(design, f), lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=maxiter
        )
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    return float(root)
