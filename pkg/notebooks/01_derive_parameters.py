r"""
Deriving the Hamiltonian parameters
-----------------------------------
Every coefficient of the rotating-frame Hamiltonian follows from a handful of
circuit design values: capacitances, Josephson energies, SQUID counts, bias
fluxes and the pump frequency.  This script walks through that chain for the
reference design.
"""
import numpy as np

from kerrcat import table1_design
from kerrcat.params import (
    bias_josephson_energy,
    capacitance_matrix,
    charging_energies,
    coupling_strengths,
    invert_bias_for_detuning,
    rotating_frame_params,
)
from kerrcat.perturb import cat_amplitudes

design = table1_design()

#%%
# The Maxwell capacitance matrix of the three nodes (two KPOs and the coupler),
# in fF.  Diagonal entries collect every capacitance touching a node.
cm = capacitance_matrix(design)
print(cm)

#%%
# Inverting it gives the charging energies E^C = e^2 M^-1 / 2 (reported as E/h
# in GHz).  For a single-SQUID KPO the Kerr coefficient equals E^C.
ec = charging_energies(cm)
np.set_printoptions(precision=6, suppress=False)
print("E^C (MHz)\n", ec * 1e3)

#%%
# Each SQUID acts as a flux-tunable junction with energy 2 E_J cos(pi * flux).
for which in ("1", "c"):
    flux = design.subsystem(which).bias_flux
    print(which, flux, bias_josephson_energy(design, which, flux), "GHz")

#%%
# Frequencies, Kerr nonlinearities, pump rates, detunings and couplings at the
# static bias.
p = rotating_frame_params(design)
print(f"K_j   = {p.kerr1 * 1e3:.4f} MHz   K_c     = {p.kerr_c * 1e3:.4f} MHz")
print(f"w_j   = {p.omega1:.5f} GHz   w_c     = {p.omega_c:.5f} GHz")
print(f"p_j   = {p.pump1 * 1e3:.3f} MHz   g_jc    = {p.g1c * 1e3:.4f} MHz")
print(f"g_12  = {p.g12 * 1e6:.3f} kHz   Delta_c = {p.delta_c:.5f} GHz")
print(f"Delta_j = {p.delta1 * 1e6:.3f} kHz, Delta_j - g^2/Delta_c = {p.residual_detuning(1) * 1e6:.3f} kHz")

#%%
# The KPO detuning nearly cancels the coupler-induced shift g^2 / Delta_c, which
# keeps the cat states close to degenerate.  The cat amplitudes follow from
# p / K and from the coupler's linear response.
cat = cat_amplitudes(p)
print(f"alpha_j = {cat.alpha1:.4f}, alpha_c^+ = {cat.alpha_c_plus:.5f}, alpha_c^- = {cat.alpha_c_minus:.1e}")

#%%
# The couplings only depend on the static bias, so they can also be
# obtained on their own.
print(coupling_strengths(design))

#%%
# The detuning is affine in the bias Josephson energy, so the flux needed for
# any reachable detuning has a closed form.  Here the coupler is pulled down to
# 0.38 GHz, roughly where a 20 ns gate pulse takes it.
flux = invert_bias_for_detuning(design, "c", 0.380)
print(f"coupler flux for Delta_c = 0.380 GHz: {flux:.4f} flux quanta")
