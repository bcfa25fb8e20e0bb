"""Rotating-frame Hamiltonian of two KPOs and a tunable coupler.

All operators are in GHz (H/h).  The direct form is

    H = sum_j [-K_j/2 a_j+^2 a_j^2 + p_j/2 (a_j+^2 + a_j^2) + D_j a_j+ a_j]
        - K_c/2 a_c+^2 a_c^2 + D_c a_c+ a_c
        + sum_j g_jc (a_j+ a_c + h.c.) + g_12 (a_1+ a_2 + h.c.)

and :func:`build_decomposed` splits it into a degenerate part ``h0``, the
ZZ-generating part ``h_zz`` and the X-generating part ``h_x``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ._csvio import open_text
from .errors import DetuningTooSmallError
from .fock import FockSpace, ladder_operators
from .params import CircuitDesign, RotatingFrameParams, rotating_frame_params

MIN_COUPLER_DETUNING = 1e-6  # GHz


class _Pieces:
    """Constant building blocks of H on one Fock space."""

    def __init__(self, space: FockSpace):
        a1, a2, ac = ladder_operators(space)
        occ = space.occupations().astype(float)
        self.space = space
        self.n = [occ[:, k] for k in range(3)]
        self.kerr_diag = [n * (n - 1) for n in self.n]
        self.squeeze = [(a.T @ a.T + a @ a).tocsr() for a in (a1, a2)]
        self.hop_1c = (a1.T @ ac + a1 @ ac.T).tocsr()
        self.hop_2c = (a2.T @ ac + a2 @ ac.T).tocsr()
        self.hop_12 = (a1.T @ a2 + a1 @ a2.T).tocsr()
        self.ladders = (a1, a2, ac)

    def diagonal(self, p: RotatingFrameParams) -> np.ndarray:
        n1, n2, nc = self.n
        k1, k2, kc = self.kerr_diag
        return (
            p.delta1 * n1 + p.delta2 * n2 + p.delta_c * nc
            - 0.5 * (p.kerr1 * k1 + p.kerr2 * k2 + p.kerr_c * kc)
        )

    def coupling(self, p: RotatingFrameParams) -> sp.csr_matrix:
        return (p.g1c * self.hop_1c + p.g2c * self.hop_2c + p.g12 * self.hop_12).tocsr()

    def operator(self, p: RotatingFrameParams) -> sp.csr_matrix:
        h = (
            sp.diags(self.diagonal(p).astype(complex), 0, format="csr")
            + 0.5 * p.pump1 * self.squeeze[0]
            + 0.5 * p.pump2 * self.squeeze[1]
            + self.coupling(p)
        )
        return h.tocsr()


@lru_cache(maxsize=16)
def _pieces(space: FockSpace) -> _Pieces:
    return _Pieces(space)


@lru_cache(maxsize=32)
def build_hamiltonian(params: RotatingFrameParams, space: FockSpace) -> sp.csr_matrix:
    """Sparse rotating-frame Hamiltonian (GHz) for fixed coefficients."""
    return _pieces(space).operator(params)


@dataclass(frozen=True)
class HamiltonianTerms:
    h_total: sp.csr_matrix
    h0: sp.csr_matrix
    h_zz: sp.csr_matrix
    h_x: sp.csr_matrix
    scale: float

    def identity_residual(self) -> float:
        """max |h0 + h_zz + h_x - h_total| relative to ``scale``."""
        diff = (self.h0 + self.h_zz + self.h_x - self.h_total).tocoo()
        return float(np.abs(diff.data).max(initial=0.0)) / self.scale


def build_decomposed(params: RotatingFrameParams, space: FockSpace) -> HamiltonianTerms:
    """Split H into the degenerate, ZZ and X parts.

    ``h0`` keeps the constant offsets K_j alpha_j^4 / 2 so that the three parts
    add up to :func:`build_hamiltonian` exactly.
    """
    p = params
    if abs(p.delta_c) < MIN_COUPLER_DETUNING:
        raise DetuningTooSmallError(f"|delta_c| = {abs(p.delta_c):g} GHz is below threshold")
    pieces = _pieces(space)
    a1, a2, ac = pieces.ladders
    eye = sp.identity(space.size, dtype=complex, format="csr")

    h0 = sp.csr_matrix((space.size, space.size), dtype=complex)
    for a, kerr, pump in ((a1, p.kerr1, p.pump1), (a2, p.kerr2, p.pump2)):
        if kerr == 0:
            if pump != 0:
                raise ValueError("a pumped KPO needs a nonzero Kerr coefficient")
            continue
        alpha_sq = pump / kerr
        left = a.T @ a.T - alpha_sq * eye
        right = a @ a - alpha_sq * eye
        h0 = h0 - 0.5 * kerr * (left @ right) + 0.5 * kerr * alpha_sq**2 * eye
    shifted = ac + (p.g1c / p.delta_c) * a1 + (p.g2c / p.delta_c) * a2
    h0 = (h0 + p.delta_c * (shifted.T.conj() @ shifted)).tocsr()

    kc_diag = pieces.kerr_diag[2]
    h_zz = (
        p.effective_coupling * pieces.hop_12
        - sp.diags(0.5 * p.kerr_c * kc_diag.astype(complex), 0)
    ).tocsr()
    x_diag = p.residual_detuning(1) * pieces.n[0] + p.residual_detuning(2) * pieces.n[1]
    h_x = sp.diags(x_diag.astype(complex), 0, format="csr")

    h_total = build_hamiltonian(params, space)
    scale = max(float(np.abs(h_total.data).max(initial=0.0)), 1e-300)
    return HamiltonianTerms(h_total, h0, h_zz, h_x, scale)


class TimeDependentHamiltonian:
    """H(t) along a flux schedule, with the constant coupling block precomputed.

    Exposes ``operator(t)`` (sparse) and ``matvec(t, psi)`` (psi may be a
    ``(D,)`` vector or a ``(D, k)`` block).
    """

    def __init__(self, design: CircuitDesign, schedule, space: FockSpace):
        self.design = design
        self.schedule = schedule
        self.space = space
        self._pieces = _pieces(space)
        self._coupling = self._pieces.coupling(self.params(0.0))
        self._last = None

    def params(self, t: float) -> RotatingFrameParams:
        return rotating_frame_params(self.design, self.schedule.fluxes(t))

    def operator(self, t: float) -> sp.csr_matrix:
        return build_hamiltonian(self.params(t), self.space)

    def _coefficients(self, t: float):
        # integrators often evaluate the same stage time twice in a row
        if self._last is None or self._last[0] != t:
            p = self.params(t)
            self._last = (t, p, self._pieces.diagonal(p))
        return self._last[1], self._last[2]

    def matvec(self, t: float, psi: np.ndarray) -> np.ndarray:
        p, diag = self._coefficients(t)
        sq1, sq2 = self._pieces.squeeze
        if psi.ndim == 2:
            diag = diag[:, None]
        return diag * psi + (0.5 * p.pump1) * (sq1 @ psi) + (0.5 * p.pump2) * (sq2 @ psi) + self._coupling @ psi

    def __call__(self, t: float) -> sp.csr_matrix:
        return self.operator(t)


def hamiltonian_at(design: CircuitDesign, schedule, t: float, space: FockSpace) -> sp.csr_matrix:
    """Sparse H(t) for a flux schedule; couplings stay at their static-bias values."""
    if not -1e-12 <= t <= schedule.duration + 1e-12:
        raise ValueError(f"t = {t} outside [0, {schedule.duration}]")
    return build_hamiltonian(rotating_frame_params(design, schedule.fluxes(t)), space)


def dense_eigh(op) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian operator as a dense array.

    The rotating-frame Hamiltonian has real matrix elements; a real symmetric
    solver is then several times faster than the complex one.
    """
    dense = op.toarray() if sp.issparse(op) else np.asarray(op)
    if np.iscomplexobj(dense) and not np.any(dense.imag):
        dense = dense.real
    return np.linalg.eigh(dense)


def hermiticity_defect(op: sp.spmatrix) -> float:
    diff = (op - op.conj().T).tocoo()
    return float(np.abs(diff.data).max(initial=0.0))


def write_operator_coo(path, op: sp.spmatrix) -> None:
    """Dump a sparse operator as ``row,col,re,im`` lines."""
    coo = sp.coo_matrix(op)
    order = np.lexsort((coo.col, coo.row))
    with open_text(path) as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "re", "im"])
        for r, c, z in zip(coo.row[order], coo.col[order], coo.data[order]):
            w.writerow([r, c, f"{z.real:.16e}", f"{z.imag:.16e}"])
