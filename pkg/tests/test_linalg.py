import numpy as np
import pytest

from bkevd.linalg import qr_cgs2, svd_small, sym_evd

from oracles import jacobi_evd, one_sided_jacobi_svd, random_spd


class TestSymEVD:
    def test_identity(self):
        res = sym_evd(np.eye(3))
        assert np.allclose(res.eigenvalues, [1, 1, 1])
        assert np.allclose(res.eigenvectors.T @ res.eigenvectors, np.eye(3), atol=1e-12)

    def test_diagonal_is_sorted_permutation(self):
        res = sym_evd(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(res.eigenvalues, [3, 2, 1])
        # eigenvectors are a signed column permutation of the identity
        assert np.allclose(np.abs(res.eigenvectors), np.eye(3)[:, [0, 2, 1]], atol=1e-12)

    def test_matches_jacobi_oracle(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((50, 50))
        a = 0.5 * (a + a.T)
        res = sym_evd(a)
        w_ref, _ = jacobi_evd(a)
        assert np.max(np.abs(res.eigenvalues - w_ref)) < 1e-10 * np.abs(w_ref).max()

    def test_reconstruction_and_orthogonality(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((40, 40))
        a = a + a.T
        v, w = sym_evd(a)
        n = a.shape[0]
        assert np.max(np.abs(v.T @ v - np.eye(n))) < 1e-10 * n
        assert np.linalg.norm(a @ v - v * w[None, :]) < 1e-8 * np.linalg.norm(a)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            sym_evd(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            sym_evd(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    @pytest.mark.parametrize("seed", range(5))
    def test_spd_input_gives_positive_eigenvalues(self, seed):
        a = random_spd(30, np.random.default_rng(seed))
        assert np.all(sym_evd(a).eigenvalues > 0)

    def test_descending_order(self):
        a = random_spd(25, np.random.default_rng(11))
        w = sym_evd(a).eigenvalues
        assert np.all(np.diff(w) <= 0)


class TestSVDSmall:
    def test_zero_matrix(self):
        res = svd_small(np.zeros((2, 2)))
        assert np.allclose(res.singular_values, [0, 0])

    def test_diagonal_with_sign(self):
        a = np.diag([-2.0, 1.0])
        res = svd_small(a)
        assert np.allclose(res.singular_values, [2, 1])
        rec = res.left @ np.diag(res.singular_values) @ res.right.T
        assert np.allclose(rec, a, atol=1e-12)

    def test_spectrum_matches_sym_evd_of_gram(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((30, 30))
        res = svd_small(a)
        gram = sym_evd(a.T @ a)
        s1 = res.singular_values[0] ** 2
        assert np.max(np.abs(res.singular_values**2 - gram.eigenvalues)) < 1e-9 * s1

    def test_matches_one_sided_jacobi_oracle(self):
        rng = np.random.default_rng(9)
        a = rng.standard_normal((20, 20))
        res = svd_small(a)
        _, s_ref, _ = one_sided_jacobi_svd(a)
        assert np.max(np.abs(res.singular_values - s_ref)) < 1e-10 * s_ref[0]

    def test_reconstruction(self):
        rng = np.random.default_rng(13)
        a = rng.standard_normal((15, 15))
        res = svd_small(a)
        rec = res.left @ np.diag(res.singular_values) @ res.right.T
        assert np.linalg.norm(rec - a) < 1e-8 * np.linalg.norm(a)
        assert np.all(np.diff(res.singular_values) <= 0)
        assert np.all(res.singular_values >= 0)


class TestQRCGS2:
    def test_orthonormal_input_passes_through(self):
        rng = np.random.default_rng(0)
        q0, _ = np.linalg.qr(rng.standard_normal((30, 6)))
        q, r, bad = qr_cgs2(q0)
        assert bad == ()
        assert np.allclose(np.abs(np.diag(r)), 1.0, atol=1e-12)
        assert np.allclose(np.abs(q), np.abs(q0), atol=1e-12)

    def test_duplicate_column_flags_deficiency(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((20, 4))
        a[:, 2] = a[:, 0]
        q, r, bad = qr_cgs2(a)
        assert bad == (2,)
        assert r[2, 2] == 0.0
        assert np.max(np.abs(q.T @ q - np.eye(4))) < 1e-12

    def test_random_tall(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((1000, 50))
        q, r, bad = qr_cgs2(a)
        assert bad == ()
        assert np.max(np.abs(q.T @ q - np.eye(50))) < 1e-13
        assert np.linalg.norm(q @ r - a) < 1e-10 * np.linalg.norm(a)
        assert np.allclose(r, np.triu(r))
        assert np.all(np.diag(r) >= 0)

    def test_condition_1e12(self):
        rng = np.random.default_rng(4)
        u, _ = np.linalg.qr(rng.standard_normal((1000, 50)))
        v, _ = np.linalg.qr(rng.standard_normal((50, 50)))
        a = (u * np.geomspace(1.0, 1e-12, 50)[None, :]) @ v.T
        q, _, _ = qr_cgs2(a)
        assert np.max(np.abs(q.T @ q - np.eye(50))) < 1e-12

    def test_rejects_wide(self):
        with pytest.raises(ValueError):
            qr_cgs2(np.ones((3, 5)))
