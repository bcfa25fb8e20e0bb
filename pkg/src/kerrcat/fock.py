"""Truncated Fock space of the two KPOs and the coupler.

Basis states ``|n1, n2, nc>`` are stored with ``n1`` outermost and ``nc``
innermost, i.e. flat index ``(n1 * d2 + n2) * dc + nc``.  Operators are
``scipy.sparse`` CSR matrices; :func:`apply_local` is the matrix-free
counterpart for single-subsystem factors.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
import math
import warnings

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.special import gammainc, gammaln

from ._csvio import open_text
from .errors import DimensionMismatchError, SingularMatrixError, TruncationWarning
from .params import subsystem_index

DEFAULT_DIMS = (20, 20, 5)
DEFAULT_MAX_DIM = 100_000
DEFICIT_WARN = 1e-10


@dataclass(frozen=True)
class FockSpace:
    dims: tuple[int, int, int] = DEFAULT_DIMS
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 3 or min(dims) < 2:
            raise ValueError(f"dims must be three integers >= 2, got {self.dims!r}")
        object.__setattr__(self, "dims", dims)
        if self.size > self.max_dim:
            raise ValueError(f"total dimension {self.size} exceeds cap {self.max_dim}")

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    def index(self, n1: int, n2: int, nc: int) -> int:
        d1, d2, dc = self.dims
        if not (0 <= n1 < d1 and 0 <= n2 < d2 and 0 <= nc < dc):
            raise IndexError(f"occupation {(n1, n2, nc)} outside {self.dims}")
        return (n1 * d2 + n2) * dc + nc

    def basis_state(self, n1: int, n2: int, nc: int) -> np.ndarray:
        psi = np.zeros(self.size, dtype=complex)
        psi[self.index(n1, n2, nc)] = 1.0
        return psi

    def occupations(self) -> np.ndarray:
        """(size, 3) integer array of (n1, n2, nc) for every flat index."""
        grids = np.meshgrid(*(np.arange(d) for d in self.dims), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def enlarged(self, factor: float = 2.0) -> "FockSpace":
        return FockSpace(tuple(int(round(d * factor)) for d in self.dims), self.max_dim)


def annihilation(dim: int) -> sp.csr_matrix:
    """Truncated annihilation operator, a|n> = sqrt(n)|n-1>."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    return sp.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, format="csr").astype(complex)


def creation(dim: int) -> sp.csr_matrix:
    return annihilation(dim).T.tocsr()


def number(dim: int) -> sp.csr_matrix:
    return sp.diags(np.arange(dim, dtype=float), 0, format="csr").astype(complex)


def embed(op, which, space: FockSpace) -> sp.csr_matrix:
    """Lift a single-subsystem operator to the full space (identity elsewhere)."""
    k = subsystem_index(which)
    op = sp.csr_matrix(op)
    if op.shape != (space.dims[k], space.dims[k]):
        raise DimensionMismatchError(
            f"operator shape {op.shape} does not match subsystem dim {space.dims[k]}"
        )
    factors = [sp.identity(d, dtype=complex, format="csr") for d in space.dims]
    factors[k] = op
    return sp.kron(sp.kron(factors[0], factors[1], format="csr"), factors[2], format="csr")


def apply_local(op, which, psi: np.ndarray, space: FockSpace) -> np.ndarray:
    """Matrix-free application of a single-subsystem operator to a state."""
    k = subsystem_index(which)
    psi = np.asarray(psi)
    if psi.shape[0] != space.size:
        raise DimensionMismatchError("state does not live in this space")
    op = op.toarray() if sp.issparse(op) else np.asarray(op)
    tail = psi.shape[1:]
    t = psi.reshape(space.dims + tail)
    out = np.moveaxis(np.tensordot(op, t, axes=([1], [k])), 0, k)
    return out.reshape(psi.shape)


@lru_cache(maxsize=16)
def ladder_operators(space: FockSpace) -> tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
    """Embedded annihilation operators (a_1, a_2, a_c); cached per space."""
    return tuple(embed(annihilation(d), k, space) for k, d in enumerate(space.dims))


def truncation_deficit(dim: int, alpha: complex) -> float:
    """Poisson weight of a coherent state at occupations >= ``dim``."""
    n2 = abs(alpha) ** 2
    if n2 == 0:
        return 0.0
    # P(N >= dim) for N ~ Poisson(n2) is the regularised lower gamma P(dim, n2)
    return float(gammainc(dim, n2))


def coherent(dim: int, alpha: complex, method: str = "series") -> np.ndarray:
    """Coherent state |alpha> on a ``dim``-level truncated oscillator.

    ``method="series"`` truncates the number-state expansion and renormalises;
    ``method="displace"`` applies the truncated displacement operator to the
    vacuum, which is unitary on the truncated space.
    """
    deficit = truncation_deficit(dim, alpha)
    if deficit > DEFICIT_WARN:
        warnings.warn(
            f"coherent state alpha={alpha:.4g} loses {deficit:.2e} of its weight at dim={dim}",
            TruncationWarning,
            stacklevel=2,
        )
    if method == "series":
        n = np.arange(dim)
        if alpha == 0:
            psi = np.zeros(dim, dtype=complex)
            psi[0] = 1.0
            return psi
        log_mag = n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
        psi = np.exp(log_mag - log_mag.max() + 1j * n * np.angle(alpha))
        return psi / np.linalg.norm(psi)
    if method == "displace":
        a = annihilation(dim).toarray()
        gen = alpha * a.conj().T - np.conj(alpha) * a
        return scipy.linalg.expm(gen)[:, 0].astype(complex)
    raise ValueError(f"unknown coherent-state method {method!r}")


def product_state(space: FockSpace, factors) -> np.ndarray:
    """Tensor product of three single-subsystem states, ordered (1, 2, c)."""
    f1, f2, fc = (np.asarray(f, dtype=complex) for f in factors)
    if (f1.size, f2.size, fc.size) != space.dims:
        raise DimensionMismatchError("factor sizes do not match space dims")
    return np.kron(np.kron(f1, f2), fc)


def inner(x: np.ndarray, y: np.ndarray) -> complex:
    """<x|y>, conjugate-linear in ``x``."""
    if np.shape(x) != np.shape(y):
        raise DimensionMismatchError(f"shapes {np.shape(x)} and {np.shape(y)} differ")
    return complex(np.vdot(x, y))


def gram_matrix(states) -> np.ndarray:
    b = np.column_stack(states)
    return b.conj().T @ b


def lowdin_orthonormalize(states, rcond: float = 1e-10) -> list[np.ndarray]:
    """Symmetric orthonormalisation ``B S^{-1/2}``.

    Among all orthonormal sets spanning the same subspace, the output is the
    one closest (in summed squared distance) to the input.
    """
    b = np.column_stack(states)
    s = b.conj().T @ b
    w, v = np.linalg.eigh(s)
    if w.min() <= rcond * w.max():
        raise SingularMatrixError(f"Gram matrix is singular (eigenvalues {w})")
    out = b @ (v @ np.diag(w**-0.5) @ v.conj().T)
    return [out[:, i].copy() for i in range(out.shape[1])]


def write_state_csv(path, psi: np.ndarray, space: FockSpace) -> None:
    """Dump a state as rows of ``n1,n2,nc,re,im``."""
    with open_text(path) as fh:
        w = csv.writer(fh)
        w.writerow(["n1", "n2", "nc", "re", "im"])
        for (n1, n2, nc), z in zip(space.occupations(), psi):
            w.writerow([n1, n2, nc, f"{z.real:.16e}", f"{z.imag:.16e}"])


def read_state_csv(path, space: FockSpace) -> np.ndarray:
    psi = np.zeros(space.size, dtype=complex)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            idx = space.index(int(row["n1"]), int(row["n2"]), int(row["nc"]))
            psi[idx] = float(row["re"]) + 1j * float(row["im"])
    return psi
