import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kerrcat.errors import DetuningTooSmallError, NoSignChangeError
from kerrcat.fock import FockSpace, gram_matrix
from kerrcat.model import build_hamiltonian
from kerrcat.params import CircuitDesign, rotating_frame_params
from kerrcat.perturb import (
    cat_amplitudes,
    coherent_products,
    find_null_bias,
    logical_basis,
    perturbed_energies,
    write_sweep_csv,
    zeta_from_energies,
    zeta_values,
    zz_at_bias,
    zz_sweep,
)


class TestZeta:
    @pytest.mark.parametrize(
        "energies, expected",
        [
            ((1, 1, 1, 1), (4, 0, 0, 0)),
            ((1, -1, -1, 1), (0, 4, 0, 0)),
            ((1, 0, 0, 0), (1, 1, 1, 1)),
        ],
    )
    def test_from_energies(self, energies, expected):
        z = zeta_from_energies(*energies)
        assert (z.zeta_ii, z.zeta_zz, z.zeta_zi, z.zeta_iz) == expected

    def test_design_point(self, params):
        z = zeta_values(params)
        assert abs(z.zeta_zz) * 1e6 < 0.05  # below 0.05 kHz
        assert z.zeta_zi == 0.0 and z.zeta_iz == 0.0

    def test_closed_form_matches_energy_pattern(self, design):
        p = rotating_frame_params(design.with_bias("c", 0.05))
        e = perturbed_energies(p)
        assert zeta_values(p).zeta_zz == pytest.approx(zeta_from_energies(*e.as_tuple()).zeta_zz, rel=1e-12)

    @given(st.floats(-0.3, 0.3))
    @settings(max_examples=30, deadline=None)
    def test_single_qubit_terms_vanish(self, flux):
        from kerrcat.params import table1_design

        p = rotating_frame_params(table1_design().with_bias("c", flux))
        z = zeta_from_energies(*perturbed_energies(p).as_tuple())
        assert z.zeta_zi == 0.0 and z.zeta_iz == 0.0


class TestCatAmplitudes:
    def test_table1(self, params):
        cat = cat_amplitudes(params)
        assert float(f"{cat.alpha1:.3g}") == 2.03
        assert cat.alpha1 == cat.alpha2
        assert float(f"{cat.alpha_c_plus:.3g}") == 0.0491
        assert cat.alpha_c_minus == 0.0

    def test_one_sided_coupling(self, params):
        from dataclasses import replace

        p = replace(params, g2c=0.0)
        cat = cat_amplitudes(p)
        assert cat.alpha_c_plus == cat.alpha_c_minus == pytest.approx(p.g1c * cat.alpha1 / p.delta_c)

    def test_logical_sign_pattern(self, params):
        amps = cat_amplitudes(params).logical_amplitudes()
        assert [tuple(np.sign(a[:2])) for a in amps] == [(1, 1), (1, -1), (-1, 1), (-1, -1)]

    def test_small_coupler_detuning(self, params):
        from dataclasses import replace

        with pytest.raises(DetuningTooSmallError):
            cat_amplitudes(replace(params, delta_c=1e-9))


class TestEnergies:
    def test_degenerate_at_design_point(self, params):
        e = perturbed_energies(params)
        assert e.e00 == e.e11 and e.e01 == e.e10
        # E00 - E01 = zeta_ZZ / 2 and zeta_ZZ is tens of mHz here
        assert abs(e.e00 - e.e01) < 1e-10

    def test_collapse_to_e0(self, params):
        from dataclasses import replace

        p = replace(params, g12=params.g1c * params.g2c / params.delta_c, kerr_c=0.0)
        e = perturbed_energies(p)
        for value in e.as_tuple():
            assert value == pytest.approx(e.e0, rel=1e-15)

    @pytest.mark.filterwarnings("ignore::kerrcat.errors.TruncationWarning")
    @pytest.mark.parametrize("method", ["series", "displace"])
    def test_expectation_values(self, params, space, method):
        h = build_hamiltonian(params, space)
        e = perturbed_energies(params, include_x=True)
        for psi, expected in zip(coherent_products(params, space, method), e.as_tuple()):
            value = np.vdot(psi, h @ psi).real
            assert abs(value - expected) < 1e-6 * abs(expected)

    def test_x_shift_is_common(self, params):
        a, b = perturbed_energies(params), perturbed_energies(params, include_x=True)
        shifts = np.subtract(b.as_tuple(), a.as_tuple())
        cat = cat_amplitudes(params)
        assert shifts == pytest.approx([2 * params.residual_detuning(1) * cat.alpha1**2] * 4, rel=1e-12)


class TestBasis:
    @pytest.mark.filterwarnings("ignore::kerrcat.errors.TruncationWarning")
    def test_coherent_mode_orthonormal(self, params, space):
        basis = logical_basis(params, space)
        np.testing.assert_allclose(gram_matrix(basis), np.eye(4), atol=1e-12)

    def test_numerical_mode_small_space(self, params):
        small = FockSpace((14, 14, 3))
        with pytest.warns(Warning):
            num = logical_basis(params, small, "numerical")
            coh = logical_basis(params, small)
        np.testing.assert_allclose(gram_matrix(num), np.eye(4), atol=1e-12)
        for a, b in zip(num, coh):
            ov = np.vdot(b, a)
            assert abs(ov) > 1 - 1e-3
            assert ov.real > 0 and abs(ov.imag) < 1e-12

    @pytest.mark.filterwarnings("ignore::kerrcat.errors.TruncationWarning")
    def test_unknown_mode(self, params, space):
        with pytest.raises(ValueError):
            logical_basis(params, space, "other")


class TestNull:
    def test_positive_root(self, design):
        root = find_null_bias(design, (0.0, 0.01))
        assert root == pytest.approx(2e-3, rel=0.1)
        assert abs(zz_at_bias(design, root)) * 1e9 < 1.0

    def test_negative_root(self, design):
        root = find_null_bias(design, (-0.01, 0.0))
        assert root == pytest.approx(-2e-3, rel=0.1)
        assert root == pytest.approx(-find_null_bias(design, (0.0, 0.01)), abs=1e-12)

    def test_no_sign_change(self, design):
        with pytest.raises(NoSignChangeError):
            find_null_bias(design, (0.05, 0.1))

    def test_sweep(self, design):
        rows = zz_sweep(design, (-0.01, 0.01), 21, jobs=2)
        assert rows.shape == (21, 2)
        np.testing.assert_allclose(rows[:, 1], rows[::-1, 1], rtol=1e-9, atol=1e-9)
        assert abs(rows[10, 1]) > 1.0  # flux 0 is not a null
        assert zz_sweep(design, (-0.01, 0.01), 21).tolist() == rows.tolist()

    def test_sweep_points_at_null(self, design):
        rows = zz_sweep(design, (-2e-3, 2e-3), 2)
        assert np.all(np.abs(rows[:, 1]) < 1.0)

    def test_sweep_csv(self, design):
        buf = io.StringIO()
        write_sweep_csv(buf, zz_sweep(design, (0.0, 0.004), 3))
        lines = buf.getvalue().splitlines()
        assert lines[0] == "phi_c_bias_over_2pi,zeta_zz_hz"
        assert len(lines) == 4
        assert lines[2].split(",")[0] == f"{2e-3:.16e}"
