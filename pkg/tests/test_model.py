import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from kerrcat.errors import DetuningTooSmallError
from kerrcat.fock import FockSpace, annihilation, embed
from kerrcat.gate import synthesize_pulse
from kerrcat.model import (
    TimeDependentHamiltonian,
    build_decomposed,
    build_hamiltonian,
    hamiltonian_at,
    hermiticity_defect,
    write_operator_coo,
)
from kerrcat.params import RotatingFrameParams
from kerrcat.perturb import cat_amplitudes, coherent_products

SMALL = FockSpace((6, 6, 4))


def zero_params(**kw):
    base = dict(delta1=0.0, delta2=0.0, delta_c=0.0, kerr1=0.0, kerr2=0.0, kerr_c=0.0,
                pump1=0.0, pump2=0.0, g1c=0.0, g2c=0.0, g12=0.0)
    base.update(kw)
    return RotatingFrameParams(**base)


def dense_oracle(p, space):
    """H written term by term from dense single-mode matrices and Kronecker products."""
    ops = [embed(annihilation(d).toarray(), k, space).toarray() for k, d in enumerate(space.dims)]
    a1, a2, ac = ops
    dag = lambda m: m.conj().T
    h = np.zeros((space.size, space.size), dtype=complex)
    for a, k, pump, delta in ((a1, p.kerr1, p.pump1, p.delta1), (a2, p.kerr2, p.pump2, p.delta2)):
        h += -k / 2 * dag(a) @ dag(a) @ a @ a + pump / 2 * (dag(a) @ dag(a) + a @ a) + delta * dag(a) @ a
    h += -p.kerr_c / 2 * dag(ac) @ dag(ac) @ ac @ ac + p.delta_c * dag(ac) @ ac
    h += p.g1c * (dag(a1) @ ac + dag(ac) @ a1) + p.g2c * (dag(a2) @ ac + dag(ac) @ a2)
    h += p.g12 * (dag(a1) @ a2 + dag(a2) @ a1)
    return h


random_params = st.builds(
    RotatingFrameParams,
    delta1=st.floats(-0.05, 0.05),
    delta2=st.floats(-0.05, 0.05),
    delta_c=st.one_of(st.floats(0.01, 3.0), st.floats(-3.0, -0.01)),
    kerr1=st.floats(1e-3, 0.05),
    kerr2=st.floats(1e-3, 0.05),
    kerr_c=st.floats(0.0, 0.01),
    pump1=st.floats(0.0, 0.2),
    pump2=st.floats(0.0, 0.2),
    g1c=st.floats(-0.05, 0.05),
    g2c=st.floats(-0.05, 0.05),
    g12=st.floats(-1e-3, 1e-3),
)


class TestBuild:
    def test_zero(self):
        assert build_hamiltonian(zero_params(), SMALL).count_nonzero() == 0

    def test_against_dense_oracle(self, params):
        h = build_hamiltonian(params, SMALL).toarray()
        np.testing.assert_allclose(h, dense_oracle(params, SMALL), atol=1e-15)

    def test_pump_matrix_element(self):
        p = zero_params(pump1=0.08)
        h = build_hamiltonian(p, SMALL)
        assert h[SMALL.index(2, 0, 0), SMALL.index(0, 0, 0)] == pytest.approx(0.08 / math.sqrt(2))

    def test_coupling_matrix_element(self, params, space):
        h = build_hamiltonian(params, space)
        g = h[space.index(0, 0, 1), space.index(1, 0, 0)]
        assert g == pytest.approx(params.g1c)
        assert g.real * 1e3 == pytest.approx(23.7, abs=0.05)

    def test_hermitian(self, params, space):
        h = build_hamiltonian(params, space)
        assert hermiticity_defect(h) < 1e-12 * abs(h).max()

    def test_total_parity_conserved(self, params, space):
        # every term moves two quanta within a KPO or one quantum between modes
        h = build_hamiltonian(params, space).tocoo()
        occ = space.occupations().sum(axis=1)
        assert np.all((occ[h.row] - occ[h.col]) % 2 == 0)


class TestDecomposition:
    @given(random_params)
    @settings(max_examples=100, deadline=None)
    def test_identity_random(self, p):
        terms = build_decomposed(p, SMALL)
        assert terms.identity_residual() < 1e-10

    def test_identity_table1(self, params, space):
        assert build_decomposed(params, space).identity_residual() < 1e-10

    def test_parts_hermitian(self, params, space):
        terms = build_decomposed(params, space)
        for op in (terms.h0, terms.h_zz, terms.h_x):
            assert hermiticity_defect(op) < 1e-12 * terms.scale

    def test_zz_coefficient(self, params, space):
        terms = build_decomposed(params, space)
        coef = terms.h_zz[space.index(0, 1, 0), space.index(1, 0, 0)].real
        assert coef == pytest.approx(params.g12 - params.g1c * params.g2c / params.delta_c, abs=1e-18)
        # independent oracle: zeta_ZZ = 0 at the design point forces 8 g_eff a1 a2 = K_c (alpha_c^+)^4
        cat = cat_amplitudes(params)
        null = params.kerr_c * cat.alpha_c_plus**4 / (8 * cat.alpha1 * cat.alpha2)
        assert coef == pytest.approx(null, rel=1e-2)
        assert abs(coef) < 1e-6  # well below 1 kHz

    def test_h0_eigenstate(self, params):
        big = FockSpace((30, 30, 6))
        terms = build_decomposed(params, big)
        cat = cat_amplitudes(params)
        e0 = 0.5 * (params.kerr1 * cat.alpha1**4 + params.kerr2 * cat.alpha2**4)
        for psi in coherent_products(params, big, "series"):
            assert np.linalg.norm(terms.h0 @ psi - e0 * psi) < 1e-7 * e0

    def test_small_coupler_detuning(self):
        with pytest.raises(DetuningTooSmallError):
            build_decomposed(zero_params(delta_c=1e-9, kerr1=0.01, kerr2=0.01), SMALL)


class TestTimeDependent:
    def test_endpoints(self, design, params, space):
        sched = synthesize_pulse(design, 20.0)
        h0 = hamiltonian_at(design, sched, 0.0, space)
        assert abs(h0 - build_hamiltonian(params, space)).max() == 0
        ht = hamiltonian_at(design, sched, 20.0, space)
        assert abs(ht - h0).max() < 1e-12

    def test_peak_coupler_detuning(self, design, space):
        sched = synthesize_pulse(design, 20.0)
        h = hamiltonian_at(design, sched, 10.0, space)
        diag = h.diagonal()
        ref = sched.params(10.0)
        delta_c = (diag[space.index(0, 0, 1)] - diag[space.index(0, 0, 0)]).real
        assert delta_c == pytest.approx(ref.delta_c, rel=1e-12)
        assert delta_c == pytest.approx(0.380, rel=1e-2)

    def test_outside_window(self, design, space):
        with pytest.raises(ValueError):
            hamiltonian_at(design, synthesize_pulse(design, 20.0), 21.0, space)

    def test_matvec_matches_operator(self, design):
        sched = synthesize_pulse(design, 20.0)
        h = TimeDependentHamiltonian(design, sched, SMALL)
        rng = np.random.default_rng(2)
        psi = rng.normal(size=(SMALL.size, 2)) + 1j * rng.normal(size=(SMALL.size, 2))
        for t in (0.0, 3.3, 10.0):
            ref = h.operator(t) @ psi
            assert np.linalg.norm(h.matvec(t, psi) - ref) < 1e-13 * np.linalg.norm(ref)


def test_coo_dump(tmp_path):
    op = sp.csr_matrix(np.array([[1, 2j], [-2j, 0]]))
    path = tmp_path / "h.csv"
    write_operator_coo(path, op)
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,re,im"
    assert len(lines) == 4
    assert lines[2].startswith("0,1,0.0000000000000000e+00,2.0000000000000000e+00")
