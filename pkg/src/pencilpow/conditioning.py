"""Condition numbers for repeated squaring of a matrix pencil.

The central quantity is the smallest singular value of the block matrix
M_p(A, B) (size m*n with m = 2^p): -A on the diagonal blocks, B on the
subdiagonal, -B in the top-right corner. M_p is unitarily equivalent to the
block diagonal of the shifted pencils -A + e^{i theta_j} B over the m-th
roots of -1, which gives an O(m) formula for sigma_min without forming the
big matrix. The scale-invariant condition number is

    kappa_irs(A, B, p) = ||(A; B)||_2 / sigma_min(M_p(A, B)).

Also here: the distance to the nearest pencil singular on the unit circle
(a grid + golden-section estimate of min_theta sigma_n(-A + e^{i theta} B))
and Malyshev's integral criterion omega for the absence of unit-circle
eigenvalues.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .errors import ConvergenceError, NearSingularNodeError, ShapeError
from .precision import unit_roundoff
from .squaring import Pencil

__all__ = [
    "ConditionReport",
    "build_mp_dense",
    "sigma_min_mp",
    "kappa_irs",
    "distance_ill_posed",
    "omega_malyshev",
    "condition_chain_check",
]

#: dense construction guard: refuse m * n above this.
MP_DENSE_MAX_SIZE = 4096

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _validated(a, b):
    pencil = Pencil(a, b)
    return pencil.a, pencil.b


def _roots_of_minus_one(p):
    m = 2 ** p
    j = np.arange(1, m + 1)
    return (2.0 * j - 1.0) * np.pi / m


def _shifted_sigma_n(a, b, thetas):
    """sigma_n(-A + e^{i theta} B) for each theta, batched."""
    shifts = np.exp(1j * np.asarray(thetas, dtype=np.float64))
    pencils = -a[None, :, :] + shifts[:, None, None].astype(a.dtype) * b[None, :, :]
    return np.linalg.svd(pencils, compute_uv=False)[:, -1]


def build_mp_dense(a, b, p):
    """Assemble M_p(A, B) explicitly (test-scale oracle for the root formula).

    Guarded to m * n <= 4096 since the matrix has (m n)^2 entries.
    """
    a, b = _validated(a, b)
    if p < 1:
        raise ShapeError(f"build_mp_dense requires p >= 1, got {p}")
    n = a.shape[0]
    m = 2 ** p
    if m * n > MP_DENSE_MAX_SIZE:
        raise ShapeError(
            f"dense M_p would be {m * n} x {m * n}; guard is {MP_DENSE_MAX_SIZE}"
        )
    out = np.zeros((m * n, m * n), dtype=a.dtype)
    for i in range(m):
        out[i * n:(i + 1) * n, i * n:(i + 1) * n] = -a
    for i in range(1, m):
        out[i * n:(i + 1) * n, (i - 1) * n:i * n] = b
    out[:n, (m - 1) * n:] = -b
    return out


def sigma_min_mp(a, b, p):
    """sigma_min(M_p(A, B)) via the m-th roots of -1; never forms M_p."""
    a, b = _validated(a, b)
    if p < 1:
        raise ShapeError(f"sigma_min_mp requires p >= 1, got {p}")
    return float(np.min(_shifted_sigma_n(a, b, _roots_of_minus_one(p))))


def kappa_irs(a, b, p):
    """Scale-invariant condition number for p steps of implicit squaring.

    Returns ``inf`` when sigma_min(M_p) is below the numerical floor
    ``n * u * ||(A; B)||_2`` (an eigenvalue of the pencil sits on an m-th
    root of -1 to working precision).
    """
    a, b = _validated(a, b)
    stack_norm = kernels.spectral_norm(np.vstack([a, b]))
    smin = sigma_min_mp(a, b, p)
    n = a.shape[0]
    if smin < n * unit_roundoff(a) * stack_norm:
        return float("inf")
    return stack_norm / smin


def _golden_section(f, lo, hi, iters):
    """Plain golden-section minimization of a scalar function on [lo, hi]."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    return min(f1, f2)


def distance_ill_posed(a, b, grid_points=256, refine_iters=40):
    """Distance to the nearest pencil singular somewhere on the unit circle.

    Estimates ``min_theta sigma_n(-A + e^{i theta} B)`` by a uniform grid
    over [0, 2 pi) followed by golden-section refinement around the grid
    minimizer. The returned value is an upper bound on the true distance;
    its resolution is limited by the grid (the objective is ||B||_2-Lipschitz
    in theta).
    """
    a, b = _validated(a, b)
    if grid_points < 8:
        raise ShapeError(f"distance_ill_posed requires grid_points >= 8, got {grid_points}")
    thetas = np.linspace(0.0, 2.0 * np.pi, grid_points, endpoint=False)
    vals = _shifted_sigma_n(a, b, thetas)
    k = int(np.argmin(vals))
    best = float(vals[k])
    h = 2.0 * np.pi / grid_points

    def objective(theta):
        return float(_shifted_sigma_n(a, b, [theta])[0])

    refined = _golden_section(objective, thetas[k] - h, thetas[k] + h, refine_iters)
    return min(best, refined)


def omega_malyshev(a, b, quad_points=512, rel_tol=1e-6, max_doublings=8):
    """Malyshev's criterion for absence of eigenvalues near the unit circle.

    Evaluates the spectral norm of

        (1/2) integral_0^{2 pi} (B - e^{i phi} A)^-1 (A A^H + B B^H)
                                 (B - e^{i phi} A)^-H  d phi

    by a trapezoidal rule on the periodic integrand, starting from
    ``quad_points`` nodes and doubling until two successive estimates agree
    to ``rel_tol``. A node where sigma_n(B - e^{i phi} A) falls below
    ``n * u * ||(A; B)||_2`` raises `NearSingularNodeError` naming phi: the
    pencil has an eigenvalue too close to the unit circle for the integral
    to be trusted.
    """
    a, b = _validated(a, b)
    if quad_points < 8:
        raise ShapeError(f"omega_malyshev requires quad_points >= 8, got {quad_points}")
    n = a.shape[0]
    h = a @ a.conj().T + b @ b.conj().T
    floor = n * unit_roundoff(a) * kernels.spectral_norm(np.vstack([a, b]))

    def estimate(num_nodes):
        phis = np.linspace(0.0, 2.0 * np.pi, num_nodes, endpoint=False)
        acc = np.zeros((n, n), dtype=np.complex128)
        for phi in phis:
            f = b - np.exp(1j * phi).astype(a.dtype) * a
            smallest = np.linalg.svd(f, compute_uv=False)[-1]
            if smallest <= floor:
                raise NearSingularNodeError(
                    "omega_malyshev: pencil is numerically singular on the unit circle",
                    smallest,
                    phi,
                )
            t = scipy.linalg.solve(f, h.astype(np.complex128))
            integrand = scipy.linalg.solve(f, t.conj().T).conj().T
            acc += integrand
        return kernels.spectral_norm((np.pi / num_nodes) * acc)

    nodes = quad_points
    prev = estimate(nodes)
    for _ in range(max_doublings):
        nodes *= 2
        cur = estimate(nodes)
        if abs(cur - prev) <= rel_tol * abs(cur):
            return cur
        prev = cur
    raise ConvergenceError(
        f"omega_malyshev: quadrature did not settle to rel {rel_tol} within "
        f"{nodes} nodes"
    )


@dataclass(frozen=True)
class ConditionReport:
    """All four conditioning quantities plus the inequality-chain verdicts.

    The chain (with declared slack ``tol``) is

        sigma_n(B; -A) >= sigma_min(M_p) >= d_(A,B)
                       >  sqrt(sigma_n(A A^H + B B^H)) / (14 omega).

    ``kappa_is_infinite`` marks the distinguished infinite state; serialized
    reports should render it as a flag, never as a raw float infinity.
    """

    sigma_min_mp: float
    kappa_irs: float
    d_ab: float
    omega_ab: float
    stack_sigma_n: float
    p: int
    tol: float
    stack_vs_mp_ok: bool
    mp_vs_d_ok: bool
    d_vs_omega_ok: bool
    kappa_is_infinite: bool

    @property
    def chain_ok(self):
        return self.stack_vs_mp_ok and self.mp_vs_d_ok and self.d_vs_omega_ok


def condition_chain_check(a, b, p, grid_points=256, refine_iters=40, quad_points=512):
    """Compute sigma_min(M_p), kappa_irs, d, omega and check the chain.

    Link failures are reported as data in the returned `ConditionReport`,
    not raised. The declared slack combines roundoff with the grid
    resolution of the distance estimate (d is only estimated from above, so
    the middle link uses the grid slack; see `distance_ill_posed`).
    """
    a, b = _validated(a, b)
    n = a.shape[0]
    stack_sigma_n = kernels.smallest_singular(np.vstack([b, -a]))
    smin = sigma_min_mp(a, b, p)
    kap = kappa_irs(a, b, p)
    d = distance_ill_posed(a, b, grid_points, refine_iters)
    try:
        omega = omega_malyshev(a, b, quad_points)
    except NearSingularNodeError:
        # an eigenvalue sits on the unit circle to working precision; the
        # integral diverges, matching the omega = inf convention
        omega = float("inf")
    stack_norm = kernels.spectral_norm(np.vstack([a, b]))
    roundoff = 10.0 * n * unit_roundoff(a) * stack_norm
    grid_slack = kernels.spectral_norm(b) * np.pi / grid_points
    tol = roundoff + grid_slack
    hermitian = a @ a.conj().T + b @ b.conj().T
    tail = math.sqrt(max(kernels.smallest_singular(hermitian), 0.0)) / (14.0 * omega)
    return ConditionReport(
        sigma_min_mp=smin,
        kappa_irs=kap,
        d_ab=d,
        omega_ab=omega,
        stack_sigma_n=stack_sigma_n,
        p=p,
        tol=tol,
        stack_vs_mp_ok=stack_sigma_n >= smin - roundoff,
        mp_vs_d_ok=smin >= d - tol,
        d_vs_omega_ok=d > tail - roundoff,
        kappa_is_infinite=math.isinf(kap),
    )
