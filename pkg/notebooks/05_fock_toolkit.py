r"""
Working in the truncated Fock space
-----------------------------------
The simulations live on |n1, n2, nc> with n1 outermost.  This script shows the
building blocks: ladder operators, embedding, coherent states and the
orthonormalised logical basis.
"""
import math
import warnings

import numpy as np

from kerrcat import FockSpace, coherent, lowdin_orthonormalize, rotating_frame_params, table1_design
from kerrcat.errors import TruncationWarning
from kerrcat.fock import annihilation, apply_local, creation, embed, gram_matrix, inner, truncation_deficit
from kerrcat.model import build_decomposed
from kerrcat.perturb import coherent_products, logical_basis

space = FockSpace((20, 20, 5))

#%%
# The truncated commutator [a, a+] is the identity except in the last level.
a = annihilation(4)
print(np.real((a @ creation(4) - creation(4) @ a).toarray()))

#%%
# Operators on one subsystem are lifted with Kronecker products, or applied
# matrix-free with a tensor contraction.
psi = space.basis_state(0, 3, 0)
n2 = embed(creation(20) @ annihilation(20), "2", space)
print(inner(psi, n2 @ psi))
print(np.allclose(apply_local(creation(20) @ annihilation(20), "2", psi, space), n2 @ psi))

#%%
# A cat amplitude of 2.03 leaves about 1.7e-8 of the Poisson weight above
# level 20.  The two lobes overlap by exp(-2 alpha^2).
alpha = 2.03
print(f"deficit {truncation_deficit(20, alpha):.2e}")
with warnings.catch_warnings():
    warnings.simplefilter("ignore", TruncationWarning)
    plus, minus = coherent(20, alpha), coherent(20, -alpha)
print(abs(inner(plus, minus)), math.exp(-2 * alpha**2))

#%%
# The four coherent products are almost orthogonal; symmetric (Lowdin)
# orthonormalisation fixes the small overlaps while moving each state as
# little as possible.
params = rotating_frame_params(table1_design())
products = coherent_products(params, space)
print(np.round(np.abs(gram_matrix(products)), 6))
with warnings.catch_warnings():
    warnings.simplefilter("ignore", TruncationWarning)
    basis = logical_basis(params, space)
print(np.abs(gram_matrix(basis) - np.eye(4)).max())
print([np.linalg.norm(b - p) for b, p in zip(basis, products)])

#%%
# The Hamiltonian splits into a degenerate part, a ZZ part and an X part whose
# sum reproduces the direct form.
terms = build_decomposed(params, space)
print(f"identity residual {terms.identity_residual():.1e}")
