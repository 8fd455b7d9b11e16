"""Spectral-norm perturbation theory for QR factorizations.

Pieces assembled here:

* ``sun_alpha`` -- the scalar amplification factor
  alpha(eps) = (1/eps) ln(1/(1-eps)) appearing in Sun-style QR perturbation
  bounds.
* ``lebesgue_constant`` -- L_k = (1/2pi) integral |D_k|, the Lebesgue
  constant of the Dirichlet kernel, which controls the norm of the
  "keep the upper triangle" map and hence the log(n) factor below.
* ``triangular_norm_check`` -- for lower-triangular L with real diagonal,
  ||L||_2 <= (1/2 + L_{n+1}) ||L + L^H||_2, plus the looser explicit form
  (ln(n+1) + 3) ||L + L^H||_2.
* ``align_complement`` -- given two full unitaries with nearby leading
  column blocks, a unitary W aligning the trailing blocks with
  ||Q_2 - U_2 W||_2 <= 4 ||Q_1 - U_1||_2.
* ``qr_perturb_certificate`` -- an empirical certificate that the Q factor
  of A + E stays within (2 ln(n+1) + 7) alpha(.) kappa_2(A) ||E||_2/||A||_2
  of the Q factor of A, both factors pinned down by the real-positive
  diagonal normalization that makes reduced QR unique.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError, NonUnitaryError, NumericallySingularError, ShapeError
from .precision import as_matrix, same_precision, square_matrix, unit_roundoff

__all__ = [
    "PerturbCertificate",
    "sun_alpha",
    "lebesgue_constant",
    "triangular_norm_check",
    "align_complement",
    "qr_perturb_certificate",
]


def sun_alpha(eps):
    """alpha(eps) = (1/eps) ln(1/(1 - eps)) on (0, 1).

    Below 1e-8 the direct formula cancels, so the two-term series
    1 + eps/2 is returned (relative error < 1e-16 there).
    """
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"sun_alpha requires 0 < eps < 1, got {eps}")
    if eps < 1e-8:
        return 1.0 + eps / 2.0
    return math.log1p(eps / (1.0 - eps)) / eps


_PANEL_NODES, _PANEL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def _dirichlet(k, theta):
    theta = np.asarray(theta, dtype=np.float64)
    num = np.sin((k + 0.5) * theta)
    den = np.sin(theta / 2.0)
    out = np.full_like(theta, 2.0 * k + 1.0)
    nz = den != 0.0
    out[nz] = num[nz] / den[nz]
    return out


def lebesgue_constant(k):
    """L_k = (1/2 pi) integral_{-pi}^{pi} |D_k(theta)| d theta.

    D_k is even, so this integrates |D_k| over [0, pi] panel by panel
    between the known zeros 2 pi j / (2k + 1) with Gauss-Legendre nodes;
    D_k has constant sign inside each panel, so the integrand is smooth
    there. L_0 = 1 exactly.
    """
    if k < 0:
        raise DomainError(f"lebesgue_constant requires k >= 0, got {k}")
    if k == 0:
        return 1.0
    cuts = np.concatenate([[0.0], 2.0 * np.pi * np.arange(1, k + 1) / (2 * k + 1), [np.pi]])
    lo = cuts[:-1][:, None]
    hi = cuts[1:][:, None]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid + half * _PANEL_NODES[None, :]
    vals = np.abs(_dirichlet(k, nodes))
    total = float(np.sum(half * _PANEL_WEIGHTS[None, :] * vals))
    return total / np.pi


def triangular_norm_check(tri):
    """Evaluate both sides of the triangular-norm inequality.

    ``tri`` must be lower triangular with an exactly real diagonal.
    Returns ``(lhs, rhs_exact, rhs_loose)`` where
    lhs = ||L||_2, rhs_exact = (1/2 + L_{n+1}) ||L + L^H||_2 and
    rhs_loose = (ln(n+1) + 3) ||L + L^H||_2. lhs <= rhs_exact <= rhs_loose
    always holds mathematically; this function just measures.
    """
    tri = square_matrix(tri, "L")
    n = tri.shape[0]
    if np.any(np.triu(tri, 1) != 0):
        raise DomainError("triangular_norm_check: input is not lower triangular")
    if np.any(np.imag(np.diagonal(tri)) != 0):
        raise DomainError("triangular_norm_check: diagonal is not real")
    sym = tri + tri.conj().T
    lhs = kernels.spectral_norm(tri)
    sym_norm = kernels.spectral_norm(sym)
    rhs_exact = (0.5 + lebesgue_constant(n + 1)) * sym_norm
    rhs_loose = (math.log(n + 1) + 3.0) * sym_norm
    return lhs, rhs_exact, rhs_loose


def _check_unitary(q, name):
    q = square_matrix(q, name)
    n = q.shape[0]
    defect = kernels.spectral_norm(q.conj().T @ q - np.eye(n, dtype=q.dtype))
    if defect > 100.0 * n * unit_roundoff(q):
        raise NonUnitaryError(f"{name} is not unitary to tolerance", defect)
    return q


def align_complement(q, u):
    """Unitary gauge aligning the trailing blocks of two full unitaries.

    Splits the 2n-by-2n inputs as ``q = [q1 q2]``, ``u = [u1 u2]`` (leading
    and trailing n columns), takes the SVD of ``u2^H q2 = V1 S V2^H`` and
    returns ``(w, residual)`` with ``w = V1 V2^H`` and
    ``residual = ||q2 - u2 w||_2``. The residual satisfies
    ``residual <= 4 ||q1 - u1||_2`` up to roundoff.
    """
    q = _check_unitary(q, "Q")
    u = _check_unitary(u, "U")
    same_precision(q, u, "align_complement")
    if q.shape != u.shape:
        raise ShapeError(f"align_complement: sizes differ, {q.shape} vs {u.shape}")
    if q.shape[0] % 2 != 0:
        raise ShapeError(f"align_complement expects even size, got {q.shape[0]}")
    n = q.shape[0] // 2
    q2 = q[:, n:]
    u2 = u[:, n:]
    svd = kernels.svd(u2.conj().T @ q2)
    w = svd.U @ svd.V.conj().T
    residual = kernels.spectral_norm(q2 - u2 @ w)
    return w, residual


@dataclass(frozen=True)
class PerturbCertificate:
    """Empirical vs. theoretical Q-factor drift for a perturbed QR.

    ``valid`` is True when the hypothesis ||A^+||_2 ||E||_2 < 1 holds, in
    which case ``empirical_w_norm <= bound_value`` up to roundoff.
    """

    empirical_w_norm: float
    bound_value: float
    alpha_arg: float
    valid: bool


def _reduced_qr_positive(a):
    """Reduced QR with real positive diag(R): the unique factorization."""
    q, r = np.linalg.qr(a, mode="reduced")
    diag = np.diagonal(r).copy()
    mags = np.abs(diag)
    safe = np.where(mags == 0, 1.0, mags)
    phases = np.where(mags == 0, np.asarray(1.0, dtype=a.dtype), diag / safe)
    return q * phases[None, :]


def qr_perturb_certificate(a, e):
    """Certificate for the spectral-norm QR perturbation bound.

    Computes the unique reduced QR factors of ``a`` and ``a + e`` (real
    positive diagonal normalization) and compares the measured Q drift

        empirical = || Q(a + e) - Q(a) ||_2

    against ``(2 ln(n+1) + 7) alpha(x) kappa_2(a) ||e||_2 / ||a||_2`` with
    ``x = ||a^+||_2 ||e||_2``. When ``x >= 1`` the bound's hypothesis fails
    and the certificate is returned with ``valid=False`` and an infinite
    bound. ``e = 0`` is the limit case: the bound is exactly 0.
    """
    a = as_matrix(a, "a")
    e = as_matrix(e, "e")
    same_precision(a, e, "qr_perturb_certificate")
    if a.shape != e.shape:
        raise ShapeError(f"a and e differ in shape: {a.shape} vs {e.shape}")
    m, n = a.shape
    if m < n:
        raise ShapeError(f"qr_perturb_certificate requires m >= n, got {a.shape}")
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[-1] < n * unit_roundoff(a) * sv[0] or sv[-1] == 0.0:
        raise NumericallySingularError("qr_perturb_certificate: a is rank deficient", sv[-1])
    e_norm = kernels.spectral_norm(e)
    alpha_arg = e_norm / float(sv[-1])
    q_a = _reduced_qr_positive(a)
    q_ae = _reduced_qr_positive(a + e)
    empirical = kernels.spectral_norm(q_ae - q_a)
    if alpha_arg >= 1.0:
        return PerturbCertificate(empirical, float("inf"), alpha_arg, valid=False)
    if alpha_arg == 0.0:
        bound = 0.0
    else:
        kappa = float(sv[0] / sv[-1])
        bound = (2.0 * math.log(n + 1) + 7.0) * sun_alpha(alpha_arg) * kappa * e_norm / float(sv[0])
    return PerturbCertificate(empirical, bound, alpha_arg, valid=True)
