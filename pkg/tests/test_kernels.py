import numpy as np
import pytest

from pencilpow import kernels
from pencilpow.errors import (
    NumericallySingularError,
    PrecisionMismatchError,
    ShapeError,
)

from conftest import ginibre, rel_err, rng_for

U64 = 2.0 ** -53


# --- independent oracles -------------------------------------------------

def kahan_matmul(a, b):
    """Compensated (Kahan) dot-product matrix multiply, entry by entry."""
    m, k = a.shape
    k2, n = b.shape
    assert k == k2
    out = np.zeros((m, n), dtype=np.complex128)
    for i in range(m):
        for j in range(n):
            total = 0.0 + 0.0j
            comp = 0.0 + 0.0j
            for l in range(k):
                term = complex(a[i, l]) * complex(b[l, j]) - comp
                tmp = total + term
                comp = (tmp - total) - term
                total = tmp
            out[i, j] = total
    return out


def charpoly_eigenvalues(h):
    """Eigenvalues of a Hermitian matrix via the Faddeev-LeVerrier
    characteristic-polynomial recursion and polynomial root finding."""
    n = h.shape[0]
    coeffs = [1.0 + 0.0j]
    m = np.zeros_like(h)
    for k in range(1, n + 1):
        m = h @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(h @ m) / k)
    roots = np.roots(np.array(coeffs))
    return np.sort(roots.real)[::-1]


# --- matmul ---------------------------------------------------------------

def test_matmul_identity():
    x = ginibre(3, rng_for(1))
    assert np.array_equal(kernels.matmul(np.eye(3), x), x)


def test_matmul_row_swap():
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    x = np.array([[1 + 2j, 3], [4, 5 - 1j]])
    assert np.array_equal(kernels.matmul(swap, x), x[::-1])


def test_matmul_against_kahan_oracle():
    rng = rng_for(2)
    a = ginibre(5, rng)
    b = ginibre(5, rng)
    assert rel_err(kernels.matmul(a, b), kahan_matmul(a, b)) <= 1e-14


def test_matmul_shape_and_precision_errors():
    with pytest.raises(ShapeError):
        kernels.matmul(np.eye(3), np.eye(4))
    with pytest.raises(PrecisionMismatchError):
        kernels.matmul(np.eye(3, dtype=np.complex64), np.eye(3, dtype=np.complex128))


def test_matmul_preserves_binary32():
    a = ginibre(4, rng_for(3)).astype(np.complex64)
    assert kernels.matmul(a, a).dtype == np.complex64


# --- full_qr ---------------------------------------------------------------

def test_full_qr_stacked_identity():
    a = np.vstack([np.eye(4), np.zeros((4, 4))]).astype(complex)
    qr = kernels.full_qr(a)
    assert np.allclose(qr.Q, np.eye(8), atol=1e-15)
    assert np.allclose(qr.R, a, atol=1e-15)


def test_full_qr_single_column():
    rng = rng_for(4)
    q = ginibre(5, rng)[:, :1]
    q /= np.linalg.norm(q)
    alpha = 3.25
    qr = kernels.full_qr(alpha * q)
    assert qr.R[0, 0] == pytest.approx(alpha, rel=1e-14)


def test_full_qr_residual_and_orthogonality():
    rng = rng_for(5)
    a = ginibre(8, rng)[:, :4]
    qr = kernels.full_qr(a)
    assert kernels.spectral_norm(qr.Q @ qr.R - a) / kernels.spectral_norm(a) <= 1e-14
    assert kernels.spectral_norm(qr.Q.conj().T @ qr.Q - np.eye(8)) <= 1e-13


def test_full_qr_phase_normalization_exact():
    rng = rng_for(6)
    a = ginibre(10, rng)[:, :6]
    r = kernels.full_qr(a).R
    diag = np.diagonal(r)
    assert np.all(np.imag(diag) == 0.0)
    assert np.all(np.real(diag) >= 0.0)
    assert np.all(r[np.tril_indices(10, -1, 6)] == 0.0)


def test_full_qr_rejects_wide():
    with pytest.raises(ShapeError):
        kernels.full_qr(np.ones((2, 5), dtype=complex))


@pytest.mark.parametrize("m,n", [(4, 4), (9, 3), (16, 16), (12, 7)])
def test_full_qr_reconstruction_property(m, n):
    a = ginibre(m, rng_for(100 + m * n), m=n)
    qr = kernels.full_qr(a)
    bound = 50 * n * U64 * kernels.spectral_norm(a)
    assert kernels.spectral_norm(qr.Q @ qr.R - a) <= bound
    assert kernels.spectral_norm(qr.Q.conj().T @ qr.Q - np.eye(m)) <= 50 * n * U64


def test_full_qr_binary32():
    a = ginibre(6, rng_for(7)).astype(np.complex64)
    qr = kernels.full_qr(a)
    assert qr.Q.dtype == np.complex64
    u32 = 2.0 ** -24
    assert kernels.spectral_norm(qr.Q @ qr.R - a) <= 50 * 6 * u32 * kernels.spectral_norm(a)


# --- svd --------------------------------------------------------------------

def test_svd_diagonal():
    res = kernels.svd(np.diag([3.0, 2.0, 1.0]).astype(complex))
    assert np.allclose(res.singular_values, [3, 2, 1])


def test_svd_zero_matrix():
    res = kernels.svd(np.zeros((4, 4), dtype=complex))
    assert np.all(res.singular_values == 0)


def test_svd_reconstruction_and_charpoly_oracle():
    a = ginibre(6, rng_for(8))
    res = kernels.svd(a)
    rebuilt = res.U @ np.diag(res.singular_values) @ res.V.conj().T
    assert rel_err(rebuilt, a) <= 1e-14
    eigs = charpoly_eigenvalues(a.conj().T @ a)
    assert np.allclose(np.sqrt(np.maximum(eigs, 0)), res.singular_values, rtol=1e-12)


def test_svd_sorted_nonincreasing():
    res = kernels.svd(ginibre(7, rng_for(9)))
    assert np.all(np.diff(res.singular_values) <= 0)
    assert np.all(res.singular_values >= 0)


# --- norms -------------------------------------------------------------------

def test_spectral_norm_identity():
    assert kernels.spectral_norm(np.eye(5)) == pytest.approx(1.0, abs=1e-15)


def test_smallest_singular_diagonal():
    assert kernels.smallest_singular(np.diag([1.0, 1e-8]).astype(complex)) == pytest.approx(
        1e-8, rel=1e-12
    )


def test_stacked_identity_norm():
    n = 4
    stack = np.vstack([np.eye(n), np.eye(n)]).astype(complex)
    assert kernels.spectral_norm(stack) == pytest.approx(np.sqrt(2.0), rel=1e-14)
    assert kernels.smallest_singular(stack) == pytest.approx(np.sqrt(2.0), rel=1e-14)


# --- invert -------------------------------------------------------------------

def test_invert_identity():
    assert np.allclose(kernels.invert(np.eye(3)), np.eye(3), atol=1e-15)


def test_invert_diagonal():
    x = kernels.invert(np.diag([2.0, 4.0]).astype(complex))
    assert np.allclose(x, np.diag([0.5, 0.25]), atol=1e-15)


def test_invert_residual():
    a = ginibre(6, rng_for(10))
    a += 3 * np.eye(6)  # keep it comfortably nonsingular
    x = kernels.invert(a)
    assert kernels.spectral_norm(x @ a - np.eye(6)) <= 1e-13


def test_invert_singular_error_carries_sigma_min():
    a = np.diag([1.0, 0.0]).astype(complex)
    with pytest.raises(NumericallySingularError) as exc:
        kernels.invert(a)
    assert exc.value.sigma_min == 0.0


def test_invert_rejects_rectangular():
    with pytest.raises(ShapeError):
        kernels.invert(np.ones((2, 3), dtype=complex))


# --- singular value inequalities ---------------------------------------------

def test_weyl_stability_of_singular_values():
    rng = rng_for(11)
    for _ in range(20):
        m1 = ginibre(8, rng)
        m2 = ginibre(8, rng)
        s1 = np.linalg.svd(m1, compute_uv=False)
        s2 = np.linalg.svd(m2, compute_uv=False)
        slack = 10 * 8 * U64 * (s1[0] + s2[0])
        assert np.all(np.abs(s1 - s2) <= kernels.spectral_norm(m1 - m2) + slack)


def test_block_triangular_min_singular_bounds_square_blocks():
    # square A and square C: both corner bounds apply to the same M
    rng = rng_for(12)
    for _ in range(20):
        l, k = 3, 4
        a = ginibre(l, rng)
        b = ginibre(l, rng, m=k)
        c = ginibre(k, rng)
        m = np.block([[a, b], [np.zeros((k, l), dtype=complex), c]])
        sm = np.linalg.svd(m, compute_uv=False)[-1]
        tol = 10 * m.shape[0] * U64 * kernels.spectral_norm(m)
        assert sm <= np.linalg.svd(a, compute_uv=False)[l - 1] + tol
        assert sm <= np.linalg.svd(c, compute_uv=False)[k - 1] + tol


def test_block_triangular_min_singular_bound_tall_corner():
    # tall A (l <= n): only the top-left bound applies; C comes out wide
    rng = rng_for(15)
    for _ in range(20):
        n, l = 4, 3
        a = ginibre(n, rng, m=l)
        b = ginibre(n, rng, m=n)
        c = ginibre(n - l + 2, rng, m=n)[: n - 1, :]  # (m - n) x (m - l) wide
        m = np.block([[a, b], [np.zeros((n - 1, l), dtype=complex), c]])
        assert m.shape[0] == m.shape[1]
        sm = np.linalg.svd(m, compute_uv=False)[-1]
        tol = 10 * m.shape[0] * U64 * kernels.spectral_norm(m)
        assert sm <= np.linalg.svd(a, compute_uv=False)[l - 1] + tol


# --- counters -------------------------------------------------------------------

def test_kernel_counters_and_suspension():
    a = ginibre(4, rng_for(13)) + 2 * np.eye(4)
    with kernels.count_kernels() as counts:
        kernels.matmul(a, a)
        kernels.full_qr(a)
        kernels.invert(a)  # internal QR/solve must not be billed
    assert counts == kernels.KernelCounts(matmul=1, qr=1, inv=1)


def test_kernel_counters_nested_scopes():
    a = ginibre(3, rng_for(14))
    with kernels.count_kernels() as outer:
        kernels.matmul(a, a)
        with kernels.count_kernels() as inner:
            kernels.matmul(a, a)
    assert outer.matmul == 2
    assert inner.matmul == 1
