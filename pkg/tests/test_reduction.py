import numpy as np
import pytest

from commsim.bipartite import BipartiteOperator, OperatorDecomposition, ip_operator, operator_schmidt
from commsim.errors import InvalidParameter, NotIsometry, NotNormalized, ShapeMismatch
from commsim.matcore import SchmidtState
from commsim.norms import balance, diamond_upper_from
from commsim.oracle import Scenario, exact_probability
from commsim.reduction import (PsiPair, build_psi, build_psi_a, build_psi_product, embed_real)

from conftest import (random_isometry, random_matrix, random_measurement_element, random_state,
                      random_unit)


def random_scenario(rng, dims=(2, 2), ancilla=(1, 1)):
    q = random_measurement_element(rng, *dims)
    e = random_state(rng, *dims)
    u = random_isometry(rng, dims[0] * ancilla[0], e.dim_a)
    v = random_isometry(rng, dims[1] * ancilla[1], e.dim_b)
    return Scenario(q, e, u, v)


def psi_for(s, alpha=0.0):
    d = operator_schmidt(s.Q)
    fa, fb = s.ancilla_dims
    if fa > 1 or fb > 1:
        d = d.lifted(fa, fb)
    return build_psi(d, s.E, s.U, s.V, alpha)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_inner_product_matches_oracle(rng, alpha):
    for _ in range(100):
        s = random_scenario(rng)
        assert abs(psi_for(s, alpha).inner() - exact_probability(s)) < 1e-8


def test_inner_product_with_ancillas(rng):
    for _ in range(30):
        s = random_scenario(rng, dims=(2, 3), ancilla=(2, 1))
        assert abs(psi_for(s).inner() - exact_probability(s)) < 1e-8


def test_identity_product_state():
    d = OperatorDecomposition(((np.eye(2), np.eye(2)),))
    e = SchmidtState.product([1, 0], [0, 1])
    assert build_psi(d, e).inner() == pytest.approx(1.0)


def test_norm_bound_alpha_zero(rng):
    for _ in range(50):
        s = random_scenario(rng)
        d = balance(operator_schmidt(s.Q))
        pair = build_psi(d, s.E, s.U, s.V)
        bound = diamond_upper_from(d)
        assert max(pair.norm_a, pair.norm_b) ** 2 <= bound + 1e-8
        # |psi_A|^2 = tr(rho_A Q_A) with rho_A the (embedded) reduced state
        rho_a = s.U @ s.E.basis_a @ np.diag(s.E.coefficients) @ s.E.basis_a.conj().T @ s.U.conj().T
        assert pair.norm_a ** 2 == pytest.approx(np.trace(rho_a @ d.gram_a()).real, abs=1e-10)


def test_inner_product_real_for_psd(rng):
    for _ in range(20):
        assert abs(psi_for(random_scenario(rng)).inner().imag) < 1e-8


def test_alpha_symmetry(rng):
    s = random_scenario(rng)
    for alpha in (0.0, 0.3):
        assert psi_for(s, alpha).inner() == pytest.approx(psi_for(s, 1 - alpha).inner(), abs=1e-10)


def test_index_flattening(rng):
    s = random_scenario(rng)
    d = operator_schmidt(s.Q)
    psi = build_psi_a(d, s.E, s.U)
    r, t = s.E.rank, len(d)
    ia = s.U @ s.E.basis_a
    p = s.E.coefficients
    for i, j, k in [(0, 1, 0), (1, 0, len(d) - 1), (1, 1, 1)]:
        expected = np.sqrt(p[j]) * (ia[:, j].conj() @ d.terms[k][0].conj().T @ ia[:, i])
        assert psi[i * (r * t) + j * t + k] == pytest.approx(expected)


def test_errors(rng):
    s = random_scenario(rng)
    d = operator_schmidt(s.Q)
    with pytest.raises(InvalidParameter):
        build_psi(d, s.E, alpha=1.5)
    with pytest.raises(NotIsometry):
        build_psi(d, s.E, U=2 * np.eye(2))
    with pytest.raises(ShapeMismatch):
        build_psi(d, s.E, U=np.eye(3)[:, :2])
    with pytest.raises(ShapeMismatch):
        PsiPair(np.zeros(2), np.zeros(3))


def test_product_examples():
    eye = OperatorDecomposition(((np.eye(2), np.eye(2)),))
    pair = build_psi_product(eye, [1, 0], [0, 1])
    np.testing.assert_allclose(pair.psi_a, [1])
    np.testing.assert_allclose(pair.psi_b, [1])
    assert pair.inner() == pytest.approx(1.0)
    ip1 = operator_schmidt(ip_operator(1))
    assert build_psi_product(ip1, [0, 1], [0, 1]).inner() == pytest.approx(1.0)
    with pytest.raises(NotNormalized):
        build_psi_product(eye, [1, 1], [0, 1])


def test_product_matches_oracle(rng):
    for _ in range(100):
        q = random_measurement_element(rng, 2, 3)
        fa, fb = random_unit(rng, 2), random_unit(rng, 3)
        pair = build_psi_product(operator_schmidt(q), fa, fb)
        v = np.kron(fa, fb)
        assert abs(pair.inner() - np.vdot(v, q.matrix @ v)) < 1e-8
        assert pair.psi_a.size == len(operator_schmidt(q))


def test_embed_real(rng):
    np.testing.assert_array_equal(embed_real(np.array([1.0, 2.0])), [1, 2, 0, 0])
    assert embed_real([1j]) @ embed_real([1j]) == pytest.approx(1.0)
    for _ in range(100):
        x, y = random_matrix(rng, 5, 1).ravel(), random_matrix(rng, 5, 1).ravel()
        assert embed_real(x) @ embed_real(y) == pytest.approx(np.vdot(x, y).real, abs=1e-12)
        assert np.linalg.norm(embed_real(x)) == pytest.approx(np.linalg.norm(x))
