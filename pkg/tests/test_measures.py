import math

import numpy as np
import pytest

from geomeasures import measures as M
from geomeasures.errors import BadParameter, DimensionMismatch
from geomeasures.linalg import DensityMatrix, PureState, partial_transpose
from geomeasures.states import (
    bell_phi_plus,
    make_isotropic,
    make_mcms,
    random_ginibre_density,
    random_pure,
)
from conftest import random_state

KET0 = np.diag([1.0, 0.0])
KET1 = np.diag([0.0, 1.0])


# -- fidelity -----------------------------------------------------------------


def test_fidelity_direct_examples():
    rho = random_state(3, 1)
    assert abs(M.fidelity_direct(rho, rho) - 1) <= 1e-12
    assert M.fidelity_direct(KET0, KET1) == 0.0
    assert abs(M.fidelity_direct(KET0, np.eye(2) / 2) - math.sqrt(0.5)) <= 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_fidelity_symmetry(seed):
    a, b = random_state(4, [seed, 0]), random_state(4, [seed, 1])
    assert abs(M.fidelity_direct(a, b) - M.fidelity_direct(b, a)) <= 1e-9


def test_fidelity_pure_examples():
    psi = random_pure(3, seed=4)
    assert abs(M.fidelity_pure(psi, psi.density_matrix()) - 1) <= 1e-12
    q = 0.3
    assert abs(M.fidelity_pure(PureState([1, 0]), np.diag([q, 1 - q])) - math.sqrt(q)) <= 1e-15


@pytest.mark.parametrize("seed", range(10))
def test_fidelity_pure_matches_direct(seed):
    psi, chi = random_pure(4, seed=seed), random_state(4, seed + 50)
    assert abs(M.fidelity_pure(psi, chi) - M.fidelity_direct(psi.density_matrix(), chi)) <= 1e-10


def test_fidelity_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        M.fidelity_direct(np.eye(2) / 2, np.eye(3) / 3)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_fidelity_sdp_matches_direct(d):
    for i in range(5):
        rho, chi = random_state(d, [d, i, 0]), random_state(d, [d, i, 1])
        f, stats = M.fidelity_sdp(rho, chi)
        assert stats["status"] == "Optimal"
        assert abs(f - M.fidelity_direct(rho, chi)) <= 1e-7


def test_fidelity_sdp_rank_deficient():
    rho = random_ginibre_density(4, 1, seed=3)
    chi = random_ginibre_density(4, 2, seed=4)
    f, _ = M.fidelity_sdp(rho, chi)
    assert abs(f - M.fidelity_direct(rho, chi)) <= 1e-7


# -- SDP construction -----------------------------------------------------------


@pytest.mark.parametrize("d", [2, 3])
def test_fixed_constraint_count(d):
    rho, chi = random_state(d, 1), random_state(d, 2)
    p = M.build_fidelity_sdp(rho, M.Fixed(chi))
    assert p.n_constraints == 2 * d * d
    assert p.blocks == [4 * d]


def test_diagonal_constraint_structure():
    p = M.build_fidelity_sdp(random_state(2, 1), M.DiagonalIncoherent())
    # 4 pinning constraints for R, one Re and one Im off-diagonal zero, one trace
    assert p.n_constraints == 4 + 2 + 1
    assert p.rhs[-1] == 2.0


def test_ppt_dims_mismatch():
    with pytest.raises(DimensionMismatch):
        M.build_fidelity_sdp(np.eye(6) / 6, M.PptBipartite(4, 2))


# -- coherence ------------------------------------------------------------------


def test_coherence_diagonal_is_zero():
    res = M.geometric_coherence(np.diag([0.2, 0.5, 0.3]))
    assert abs(res.value) <= 1e-8
    assert res.bounds == (pytest.approx(0, abs=1e-15), pytest.approx(0, abs=1e-15))


def test_coherence_plus_state():
    plus = np.full((2, 2), 0.5)
    assert abs(M.geometric_coherence(plus).value - 0.5) <= 1e-8
    assert M.coherence_qubit_analytic(plus) == 0.5


def test_coherence_qubit_analytic_examples():
    assert M.coherence_qubit_analytic(np.diag([0.3, 0.7])) == 0
    rho = np.array([[0.5, 0.3j], [-0.3j, 0.5]])
    assert abs(M.coherence_qubit_analytic(rho) - 0.1) <= 1e-15


def test_coherence_pure_analytic_examples():
    assert M.coherence_pure_analytic(PureState([0, 1, 0])) == 0
    d = 5
    assert abs(M.coherence_pure_analytic(PureState(np.full(d, 1 / math.sqrt(d)))) - (1 - 1 / d)) <= 1e-15
    assert abs(M.coherence_pure_analytic(PureState([0.8, 0.6])) - 0.36) <= 1e-15


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_mcms_upper_bound_equals_analytic(d):
    for p in np.linspace(0, 1, 11):
        assert abs(M.coherence_bounds(make_mcms(d, p))[1] - M.coherence_mcms_analytic(d, p)) <= 1e-10


def test_mcms_analytic_examples():
    assert M.coherence_mcms_analytic(4, 0) == 0
    assert abs(M.coherence_mcms_analytic(3, 1) - 2 / 3) <= 1e-15
    for p in np.arange(1, 10) / 10:
        assert abs(M.coherence_mcms_analytic(2, p) - M.coherence_qubit_analytic(make_mcms(2, p))) <= 1e-14
    with pytest.raises(BadParameter):
        M.coherence_mcms_analytic(3, 1.5)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_mcms_analytic_monotone(d):
    vals = [M.coherence_mcms_analytic(d, p) for p in np.linspace(0, 1, 100)]
    assert np.all(np.diff(vals) >= 0)


@pytest.mark.parametrize("d", [3, 6])
def test_mcms_closest_incoherent_is_uniform(d):
    res = M.geometric_coherence(make_mcms(d, 0.6))
    np.testing.assert_allclose(np.diag(res.closest_state.mat).real, 1 / d, atol=1e-6)


@pytest.mark.parametrize("seed", range(8))
def test_coherence_result_invariants(seed):
    d = 2 + seed % 3
    rho = random_state(d, [seed, 9])
    res = M.geometric_coherence(rho)
    assert abs(res.value - (1 - res.fidelity**2)) <= 1e-12
    lo, hi = res.bounds
    assert lo - 1e-6 <= res.value <= hi + 1e-6
    assert 0 <= res.value <= 1 - 1 / d + 1e-8
    delta = res.closest_state.mat
    assert np.max(np.abs(delta - np.diag(np.diag(delta)))) <= 1e-7
    assert abs(M.fidelity_direct(rho, res.closest_state) - res.fidelity) <= 1e-6


def test_bounds_degenerate_for_diagonal():
    lo, hi = M.coherence_bounds(np.diag([0.1, 0.2, 0.3, 0.4]))
    assert abs(lo) <= 1e-15 and abs(hi) <= 1e-15


# -- entanglement -----------------------------------------------------------------


def test_gme_product_state():
    a, b = random_pure(2, seed=1), random_pure(3, seed=2)
    psi = PureState(np.kron(a.amplitudes, b.amplitudes))
    assert abs(M.gme_ppt(psi.density_matrix(), (2, 3)).value) <= 1e-8
    assert M.gme_pure_product_oracle(psi, (2, 3)) <= 1e-10


def test_gme_bell():
    bell = make_isotropic(2, 1)
    assert abs(M.gme_ppt(bell, (2, 2)).value - 0.5) <= 1e-8
    assert abs(M.gme_pure_product_oracle(bell_phi_plus(2), (2, 2)) - 0.5) <= 1e-15


@pytest.mark.parametrize("d", [2, 3])
def test_gme_isotropic_separable(d):
    for F in (0.0, 0.5 / d, 1 / d):
        assert M.gme_ppt(make_isotropic(d, F), (d, d)).value <= 1e-7


def test_concurrence_examples():
    assert M.concurrence(np.kron(KET0, KET1)) <= 1e-10
    assert abs(M.concurrence(bell_phi_plus(2).density_matrix()) - 1) <= 1e-10
    with pytest.raises(DimensionMismatch):
        M.concurrence(np.eye(3) / 3)


def test_two_qubit_analytic_examples():
    assert M.gme_two_qubit_analytic(0) == 0
    assert M.gme_two_qubit_analytic(1) == 0.5
    assert abs(M.gme_two_qubit_analytic(0.6) - 0.1) <= 1e-15


def test_werner_analytic_examples():
    assert M.werner_gme_analytic(0.5) == 0
    assert M.werner_gme_analytic(-1) == 0.5
    assert abs(M.werner_gme_analytic(-0.6) - 0.1) <= 1e-15
    with pytest.raises(BadParameter):
        M.werner_gme_analytic(-1.1)


@pytest.mark.parametrize("seed", range(8))
def test_gme_two_qubit_matches_concurrence(seed):
    rho = random_state(4, [seed, 11])
    res = M.gme_ppt(rho, (2, 2))
    assert abs(res.value - M.gme_two_qubit_analytic(M.concurrence(rho))) <= 1e-6
    assert 0 <= res.value <= 1
    assert abs(res.value - (1 - res.fidelity**2)) <= 1e-12
    sigma = res.closest_state
    assert M.ppt_min_eigenvalue(sigma, (2, 2)) >= -1e-7
    assert abs(M.fidelity_direct(rho, sigma) - res.fidelity) <= 1e-6


@pytest.mark.parametrize("seed", range(4))
def test_gme_ppt_is_lower_bound_for_pure_3x3(seed):
    psi = random_pure(9, seed=seed)
    val = M.gme_ppt(psi.density_matrix(), (3, 3)).value
    # pure states: the PPT relaxation is still tight
    assert abs(val - M.gme_pure_product_oracle(psi, (3, 3))) <= 1e-6


def test_exact_dims():
    assert M.is_exact_gme_dims((2, 2)) and M.is_exact_gme_dims((3, 2))
    assert not M.is_exact_gme_dims((3, 3))


def test_closest_state_is_valid_density_matrix():
    res = M.gme_ppt(make_isotropic(3, 0.8), (3, 3))
    DensityMatrix(res.closest_state.mat, validation_tol=1e-9)
    pt = partial_transpose(res.closest_state, (3, 3))
    assert np.linalg.eigvalsh(pt)[0] >= -1e-7
