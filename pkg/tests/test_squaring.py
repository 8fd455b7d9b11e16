import numpy as np
import pytest

from pencilpow import kernels, squaring
from pencilpow.errors import (
    NumericallySingularError,
    RankDeficientStackWarning,
    ShapeError,
)
from pencilpow.harness.generators import build_test_pencil, gen_ginibre, gen_haar

from conftest import ginibre, rel_err, rng_for

U64 = 2.0 ** -53


def well_conditioned_pencil(n, seed, r_lo=0.5, r_hi=1.0, kappa_cap=100.0):
    """Construction-based pencil with kappa_2(A) under the cap."""
    rng = rng_for(seed)
    while True:
        a = gen_ginibre(n, rng)
        sv = np.linalg.svd(a, compute_uv=False)
        if sv[0] / sv[-1] <= kappa_cap:
            break
    v = gen_haar(n, rng)
    mod = r_lo + (r_hi - r_lo) * rng.random(n)
    d = mod * np.exp(2j * np.pi * rng.random(n))
    return build_test_pencil(a, v, d)


# --- irs_step ---------------------------------------------------------------

def test_irs_step_identity_pair():
    a1, b1, _ = squaring.irs_step(np.eye(2), np.eye(2))
    assert rel_err(np.linalg.solve(a1, b1), np.eye(2)) <= 1e-14


def test_irs_step_diagonal_squares():
    lam = np.array([0.7, 1.3])
    a1, b1, _ = squaring.irs_step(np.eye(2), np.diag(lam).astype(complex))
    assert rel_err(np.linalg.solve(a1, b1), np.diag(lam ** 2)) <= 1e-13


def test_irs_step_doubles_eigenpairs():
    # pencil built from a diagonalization, so (lam, v) eigenpairs are known:
    # A v = lam B v must become A_1 v = lam^2 B_1 v
    pencil, _ = well_conditioned_pencil(4, seed=21)
    eigvals, eigvecs = np.linalg.eig(np.linalg.solve(pencil.a, pencil.b))
    a1, b1, _ = squaring.irs_step(pencil.a, pencil.b)
    stack_norm = kernels.spectral_norm(np.vstack([a1, b1]))
    for i in range(4):
        v = eigvecs[:, i]
        mu2 = eigvals[i] ** 2
        assert np.linalg.norm(b1 @ v - mu2 * (a1 @ v)) <= 1e-10 * stack_norm


def test_irs_step_trace_fields():
    pencil, _ = well_conditioned_pencil(4, seed=22)
    _, _, tr = squaring.irs_step(pencil.a, pencil.b, step_index=3)
    assert tr.step_index == 3
    assert tr.sigma_n_stack <= tr.norm_stack
    assert tr.kappa_a >= 1.0 and tr.kappa_b >= 1.0
    assert not tr.rank_warning


def test_irs_step_fast_mode_skips_kappas():
    pencil, _ = well_conditioned_pencil(4, seed=23)
    _, _, tr = squaring.irs_step(pencil.a, pencil.b, fast=True)
    assert np.isnan(tr.kappa_a) and np.isnan(tr.kappa_b)
    assert tr.sigma_n_stack <= tr.norm_stack  # stack diagnostics still on


def test_irs_step_rank_deficient_stack_warns_and_continues():
    a = np.diag([1.0, 0.0]).astype(complex)
    b = np.diag([1.0, 0.0]).astype(complex)
    with pytest.warns(RankDeficientStackWarning):
        _, _, tr = squaring.irs_step(a, b)
    assert tr.rank_warning


# --- irs ----------------------------------------------------------------------

def test_irs_identity_five_steps():
    run = squaring.irs(np.eye(3), np.eye(3), 5)
    assert run.p == 5 and len(run.trace) == 5
    assert rel_err(squaring.implicit_to_explicit(run), np.eye(3)) <= 1e-13


def test_irs_diagonal_powers():
    run = squaring.irs(np.eye(2), np.diag([0.5, 2.0]).astype(complex), 3)
    expected = np.diag([0.5 ** 8, 2.0 ** 8])
    result = squaring.implicit_to_explicit(run)
    assert np.allclose(result, expected, rtol=1e-12, atol=0)


def test_irs_against_diagonalization_oracle():
    pencil, oracle = well_conditioned_pencil(8, seed=24, r_hi=1.0)
    run = squaring.irs(pencil.a, pencil.b, 4)
    assert rel_err(squaring.implicit_to_explicit(run), oracle(4)) <= 1e-10


def test_irs_rejects_p_zero():
    with pytest.raises(ShapeError):
        squaring.irs(np.eye(2), np.eye(2), 0)


def test_irs_incremental_prefix_is_exact():
    pencil, _ = well_conditioned_pencil(6, seed=25)
    run3 = squaring.irs(pencil.a, pencil.b, 3)
    run2 = squaring.irs(pencil.a, pencil.b, 2)
    a3, b3, _ = squaring.irs_step(run2.a_p, run2.b_p, step_index=2)
    assert np.array_equal(a3, run3.a_p)
    assert np.array_equal(b3, run3.b_p)
    assert run2.trace == run3.trace[:2]


# --- explicit squaring -----------------------------------------------------------

def test_explicit_squaring_p_zero_returns_product():
    x = ginibre(3, rng_for(26))
    result = squaring.explicit_squaring(np.eye(3), x, 0)
    assert rel_err(result, x) <= 1e-14


def test_explicit_squaring_scalar_diag():
    result = squaring.explicit_squaring(np.eye(1), np.array([[2.0 + 0j]]), 3)
    assert result[0, 0] == pytest.approx(256.0, rel=1e-13)


def test_explicit_squaring_against_oracle():
    pencil, oracle = well_conditioned_pencil(8, seed=24, r_hi=1.0)
    result = squaring.explicit_squaring(pencil.a, pencil.b, 4)
    assert rel_err(result, oracle(4)) <= 1e-9


def test_explicit_squaring_singular_a():
    with pytest.raises(NumericallySingularError):
        squaring.explicit_squaring(np.diag([1.0, 0.0]).astype(complex), np.eye(2), 1)


# --- implicit_to_explicit -----------------------------------------------------

def test_implicit_to_explicit_trivial():
    run = squaring.irs(np.eye(2), np.eye(2), 3)
    assert rel_err(squaring.implicit_to_explicit(run), np.eye(2)) <= 1e-13
    run = squaring.irs(np.eye(2), np.diag([0.5, 2.0]).astype(complex), 2)
    assert np.allclose(
        squaring.implicit_to_explicit(run), np.diag([0.5 ** 4, 2.0 ** 4]), rtol=1e-12
    )


def test_implicit_and_explicit_agree():
    pencil, _ = well_conditioned_pencil(8, seed=27)
    run = squaring.irs(pencil.a, pencil.b, 4)
    explicit = squaring.explicit_squaring(pencil.a, pencil.b, 4)
    assert rel_err(squaring.implicit_to_explicit(run), explicit) <= 1e-8


# --- spectral projector -----------------------------------------------------------

def projector_pencil(n, seed, moduli):
    """Pencil whose eigenvalues (A v = lam B v) have the given moduli.

    A = I and B = V diag(1/lam) V^H, so A^-1 B has eigenvalues 1/lam.
    """
    rng = rng_for(seed)
    v = gen_haar(n, rng)
    lam = np.asarray(moduli) * np.exp(2j * np.pi * rng.random(n))
    b = (v * (1.0 / lam)[None, :]) @ v.conj().T
    return np.eye(n, dtype=complex), b, lam, v


def test_projector_eigenvalues_outside_disk_to_identity():
    a, b, _, _ = projector_pencil(4, 28, [2.0] * 4)
    run = squaring.irs(a, b, 5)
    proj = squaring.spectral_projector(run)
    assert np.linalg.norm(proj - np.eye(4), 2) <= 1e-6


def test_projector_eigenvalues_inside_disk_to_zero():
    a, b, _, _ = projector_pencil(4, 29, [0.5] * 4)
    run = squaring.irs(a, b, 5)
    proj = squaring.spectral_projector(run)
    assert np.linalg.norm(proj, 2) <= 1e-6


def test_projector_mixed_spectrum_splits_eigenvectors():
    moduli = [0.5, 0.5, 2.0, 2.0]
    a, b, lam, v = projector_pencil(4, 30, moduli)
    run = squaring.irs(a, b, 6)
    proj = squaring.spectral_projector(run)
    for i in range(4):
        expected = 1.0 if abs(lam[i]) > 1 else 0.0
        assert np.linalg.norm(proj @ v[:, i] - expected * v[:, i]) <= 1e-6


# --- invariants ------------------------------------------------------------------

def test_squaring_identity_sweep():
    for seed, n, p in [(31, 4, 2), (32, 8, 3), (33, 12, 4), (34, 16, 4)]:
        pencil, oracle = well_conditioned_pencil(n, seed=seed)
        run = squaring.irs(pencil.a, pencil.b, p)
        assert rel_err(squaring.implicit_to_explicit(run), oracle(p)) <= 1e-9


def test_norm_growth_per_step():
    pencil, _ = well_conditioned_pencil(8, seed=35)
    run = squaring.irs(pencil.a, pencil.b, 5)
    factor = (1 + 10 * 8 * U64) ** 2
    norms = [t.norm_stack for t in run.trace]
    for j in range(len(norms) - 1):
        assert norms[j + 1] <= factor * norms[j]


def test_stack_sigma_bounded_below_by_mp():
    from pencilpow.conditioning import sigma_min_mp

    pencil, _ = well_conditioned_pencil(8, seed=36)
    p = 4
    run = squaring.irs(pencil.a, pencil.b, p)
    floor = sigma_min_mp(pencil.a, pencil.b, p)
    stack_norm = kernels.spectral_norm(np.vstack([pencil.a, pencil.b]))
    slack = p * 10 * 8 * U64 * stack_norm
    for t in run.trace:
        assert t.sigma_n_stack >= floor - slack


def test_explicit_error_within_propagation_ceiling():
    # sanity ceiling: measured error never lands above 10x the evaluated
    # explicit-recursion bound (the bound itself is far from tight)
    n, p = 8, 3
    pencil, oracle = well_conditioned_pencil(n, seed=37)
    result = squaring.explicit_squaring(pencil.a, pencil.b, p)
    target = oracle(p)
    measured = np.linalg.norm(result - target, 2)
    tau = n * n * U64
    sv = np.linalg.svd(pencil.a, compute_uv=False)
    base = kernels.spectral_norm(target) ** (1 / 2 ** p)  # ~ ||A^-1 B||_2
    prod = 1.0
    for j in range(1, p + 1):
        prod *= 2.0 * (1 + tau) * base ** (2 ** (j - 1))
    bound = prod * tau * (1 + (1 + tau) * (sv[0] / sv[-1]) ** np.log(n)) * (
        kernels.spectral_norm(pencil.b) / sv[-1]
    )
    assert measured <= 10.0 * bound


# --- validation -------------------------------------------------------------------

def test_pencil_validation():
    with pytest.raises(ShapeError):
        squaring.Pencil(np.eye(2), np.eye(3))
    with pytest.raises(ShapeError):
        squaring.Pencil(np.ones((2, 3)), np.ones((2, 3)))


def test_irs_run_trace_length_checked():
    with pytest.raises(ShapeError):
        squaring.IRSRun(a_p=np.eye(2), b_p=np.eye(2), trace=(), p=1)
