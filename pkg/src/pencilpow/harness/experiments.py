"""Desk-scale experiment runners.

Each runner draws reproducible random problems (per-trial seed = root seed
XOR trial index), exercises implicit repeated squaring against the explicit
algorithm, and returns flat `TrialRecord` rows ready for CSV/SVG emission.
Relative errors are measured against the diagonalization oracle
V D^(2^p) V^-1 that the problems are constructed from.
"""

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..conditioning import kappa_irs
from ..errors import DomainError, NumericallySingularError
from ..expm import ExpmConfig, expm, pade_numerator_denominator, select_scaling
from ..precision import dtype_for, unit_roundoff
from ..squaring import IRSRun, explicit_squaring, implicit_to_explicit, irs_step
from .generators import (
    build_test_pencil,
    gen_ginibre,
    gen_haar,
    make_ill_conditioned,
    rng_from_seed,
    sample_spectrum,
)

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "TrialRecord",
    "BoundReportRow",
    "BoundReport",
    "run_square_experiment",
    "run_condition_evolution",
    "run_expm_experiment",
    "run_bound_report",
    "run_experiment",
]

EXPERIMENTS = (
    "toy_identity",
    "general_square",
    "condition_evolution",
    "expm_compare",
    "bound_report",
)

#: per-trial relative-error cutoff mirroring "stop squaring once error explodes".
EXPLOSION_CUTOFF = 1e3


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat description of one experiment run."""

    experiment: str = "general_square"
    n: int = 128
    trials: int = 20
    p_max: int = 15
    conditioning: str = "well"
    spectrum: str = "circle"
    annulus_r_lo: float = 0.95
    annulus_r_hi: float = 1.05
    delta: float = 1e-8
    precision: str = "binary64"
    seed: int = 0
    output_dir: str = "."

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise DomainError(f"unknown experiment {self.experiment!r}; expected {EXPERIMENTS}")
        if self.trials < 1 or self.n < 2 or self.p_max < 1:
            raise DomainError("config requires trials >= 1, n >= 2, p_max >= 1")
        if self.conditioning not in ("well", "ill"):
            raise DomainError(f"conditioning must be 'well' or 'ill', got {self.conditioning!r}")
        if not 0.0 < self.annulus_r_lo < self.annulus_r_hi:
            raise DomainError("annulus bounds must satisfy 0 < r_lo < r_hi")
        dtype_for(self.precision)  # validates the name


@dataclass(frozen=True)
class TrialRecord:
    """One (trial, step) row of an experiment.

    ``err_irs`` / ``err_es`` are relative spectral-norm errors against the
    construction oracle; NaN marks a sentinel (the algorithm failed at this
    step, e.g. numerically singular A_p). ``s_selected`` is only populated
    by the exponential experiment.
    """

    trial: int
    p: int
    err_irs: float = float("nan")
    err_es: float = float("nan")
    kappa_a_input: float = float("nan")
    kappa_ap: float = float("nan")
    sigma_n_ap: float = float("nan")
    s_selected: int | None = None


def _trial_seed(config, trial):
    return config.seed ^ trial


def _kappa_sigma(a):
    sv = np.linalg.svd(a, compute_uv=False)
    kappa = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    return kappa, float(sv[-1])


def _rel_err(x, oracle, oracle_norm):
    return float(np.linalg.norm(np.asarray(x, dtype=np.complex128) - oracle, 2) / oracle_norm)


def _draw_square_problem(config, trial):
    """A, V, d for one squaring trial (one stream per trial)."""
    rng = rng_from_seed(_trial_seed(config, trial))
    a = gen_ginibre(config.n, rng)
    if config.conditioning == "ill":
        a = make_ill_conditioned(a, config.delta)
    v = gen_haar(config.n, rng)
    if config.experiment == "toy_identity":
        d = np.ones(config.n, dtype=np.complex128)
    else:
        d = sample_spectrum(
            config.spectrum, config.n, rng, config.annulus_r_lo, config.annulus_r_hi
        )
    return a, v, d


def run_square_experiment(config):
    """Implicit vs. explicit squaring errors per step.

    Per trial: draw A (well or ill conditioned), Haar V, diagonal d per the
    configured spectrum, and set B = A V diag(d) V^H. The implicit recursion
    is advanced one step per p (never recomputed from scratch); the explicit
    product is squared alongside. Recording stops for a trial after either
    error exceeds `EXPLOSION_CUTOFF` (the exploding row itself is kept).
    """
    dtype = dtype_for(config.precision)
    records = []
    for trial in range(config.trials):
        a64, v, d = _draw_square_problem(config, trial)
        pencil, oracle = build_test_pencil(a64, v, d)
        a_j = pencil.a.astype(dtype)
        b_j = pencil.b.astype(dtype)
        kappa_in, _ = _kappa_sigma(a_j)
        try:
            d_es = kernels.matmul(kernels.invert(a_j), b_j)
        except NumericallySingularError:
            d_es = None
        entries = []
        for j in range(config.p_max):
            p = j + 1
            a_j, b_j, entry = irs_step(a_j, b_j, step_index=j, fast=True)
            entries.append(entry)
            if d_es is not None:
                d_es = kernels.matmul(d_es, d_es)
            target = oracle(p)
            target_norm = np.linalg.norm(target, 2)
            run = IRSRun(a_p=a_j, b_p=b_j, trace=tuple(entries), p=p)
            try:
                err_irs = _rel_err(implicit_to_explicit(run), target, target_norm)
            except NumericallySingularError:
                err_irs = float("nan")
            err_es = (
                _rel_err(d_es, target, target_norm) if d_es is not None else float("nan")
            )
            kappa_ap, sigma_n_ap = _kappa_sigma(a_j)
            records.append(
                TrialRecord(
                    trial=trial,
                    p=p,
                    err_irs=err_irs,
                    err_es=err_es,
                    kappa_a_input=kappa_in,
                    kappa_ap=kappa_ap,
                    sigma_n_ap=sigma_n_ap,
                )
            )
            exploded = (not math.isnan(err_irs) and err_irs > EXPLOSION_CUTOFF) or (
                not math.isnan(err_es) and err_es > EXPLOSION_CUTOFF
            )
            if exploded:
                break
    return records


def run_condition_evolution(config):
    """kappa_2(A_p) per implicit step; no error columns."""
    dtype = dtype_for(config.precision)
    records = []
    for trial in range(config.trials):
        a64, v, d = _draw_square_problem(config, trial)
        pencil, _ = build_test_pencil(a64, v, d)
        a_j = pencil.a.astype(dtype)
        b_j = pencil.b.astype(dtype)
        kappa_in, _ = _kappa_sigma(a_j)
        for j in range(config.p_max):
            a_j, b_j, _ = irs_step(a_j, b_j, step_index=j, fast=True)
            kappa_ap, sigma_n_ap = _kappa_sigma(a_j)
            records.append(
                TrialRecord(
                    trial=trial,
                    p=j + 1,
                    kappa_a_input=kappa_in,
                    kappa_ap=kappa_ap,
                    sigma_n_ap=sigma_n_ap,
                )
            )
    return records


def run_expm_experiment(config):
    """Exponential accuracy with explicit vs. implicit final squaring.

    Per trial: M = V diag(d) V^-1 with d from the unit disk and V a complex
    Gaussian whose smallest singular value is shrunk by ``config.delta``
    (delta = 1 leaves it Gaussian). Both backends run at the same s (the
    1-norm Pade selection); errors are measured against V e^D V^-1.
    ``kappa_a_input`` records kappa_2(V), ``kappa_ap``/``sigma_n_ap`` the
    final implicit A_s, and ``p`` = ``s_selected`` = s.
    """
    dtype = dtype_for(config.precision)
    records = []
    for trial in range(config.trials):
        rng = rng_from_seed(_trial_seed(config, trial))
        g = gen_ginibre(config.n, rng)
        v = make_ill_conditioned(g, config.delta)
        d = sample_spectrum("disk", config.n, rng)
        v_inv = np.linalg.inv(v)
        m = ((v * d[None, :]) @ v_inv).astype(dtype)
        reference = (v * np.exp(d)[None, :]) @ v_inv
        ref_norm = np.linalg.norm(reference, 2)
        kappa_v, _ = _kappa_sigma(v)
        s = select_scaling(m)
        cfg = ExpmConfig(squaring_backend="explicit", scaling_override=s)
        try:
            err_es = _rel_err(expm(m, cfg), reference, ref_norm)
        except NumericallySingularError:
            err_es = float("nan")
        # implicit path unrolled so the final A_s is available for diagnostics
        x = m * float(2.0 ** -s)
        p_mat, q_mat = pade_numerator_denominator(x)
        a_j, b_j = q_mat, p_mat
        entries = []
        for j in range(s):
            a_j, b_j, entry = irs_step(a_j, b_j, step_index=j, fast=True)
            entries.append(entry)
        run = IRSRun(a_p=a_j, b_p=b_j, trace=tuple(entries), p=s)
        try:
            result_irs = (
                implicit_to_explicit(run)
                if s > 0
                else kernels.matmul(kernels.invert(q_mat), p_mat)
            )
            err_irs = _rel_err(result_irs, reference, ref_norm)
        except NumericallySingularError:
            err_irs = float("nan")
        kappa_as, sigma_n_as = _kappa_sigma(a_j)
        records.append(
            TrialRecord(
                trial=trial,
                p=s,
                err_irs=err_irs,
                err_es=err_es,
                kappa_a_input=kappa_v,
                kappa_ap=kappa_as,
                sigma_n_ap=sigma_n_as,
                s_selected=s,
            )
        )
    return records


@dataclass(frozen=True)
class BoundReportRow:
    """Measured error vs. evaluated theoretical bound at one step count."""

    p: int
    err_irs: float
    bound_irs: float
    err_es: float
    bound_es: float

    @property
    def ratio_irs(self):
        return self.bound_irs / self.err_irs if self.err_irs > 0 else float("inf")

    @property
    def ratio_es(self):
        return self.bound_es / self.err_es if self.err_es > 0 else float("inf")


@dataclass(frozen=True)
class BoundReport:
    """Bound/measured table plus instrumented kernel call counts at p_max."""

    rows: tuple
    flops_irs: kernels.KernelCounts
    flops_es: kernels.KernelCounts
    expected_flops_irs: kernels.KernelCounts
    expected_flops_es: kernels.KernelCounts

    @property
    def flops_match(self):
        return (
            self.flops_irs == self.expected_flops_irs
            and self.flops_es == self.expected_flops_es
        )


def _power_product(base_norm, delta, p):
    """prod_{j=1..p} (r^(2^(j-1)) + (r + delta)^(2^(j-1)))."""
    out = 1.0
    for j in range(1, p + 1):
        k = 2 ** (j - 1)
        out *= base_norm ** k + (base_norm + delta) ** k
        if math.isinf(out):
            break
    return out


def run_bound_report(config):
    """Evaluate measured errors against the theoretical forward bounds.

    A single oracle-checkable pencil is built (Haar V, diagonal with moduli
    in [0.5, 1], well-conditioned Gaussian A) and both algorithms run for
    p = 1 .. p_max. For each p the implicit-path bound (three terms, using
    the measured sigma_n(A_p), ||B_p||_2 and kappa_2(A_p)) and the explicit
    recursion bound are evaluated with mu(n) = n^2 and a unit constant on
    the kappa^log(n) inversion factor. Instrumented kernel counters for the
    full p_max runs are included so the arithmetic-cost identities

        explicit: 1 INV + (p+1) MM      implicit: 1 INV + p QR + (2p+1) MM

    can be checked exactly.
    """
    n = config.n
    u = unit_roundoff(config.precision)
    rng = rng_from_seed(config.seed)
    a = gen_ginibre(n, rng)
    v = gen_haar(n, rng)
    # moduli straddling the unit circle keep the 2^j product terms of both
    # bounds growing, which is the regime the report is meant to exhibit
    d = sample_spectrum("annulus", n, rng, r_lo=0.9, r_hi=1.1)
    pencil, oracle = build_test_pencil(a, v, d)
    dtype = dtype_for(config.precision)
    a0 = pencil.a.astype(dtype)
    b0 = pencil.b.astype(dtype)

    stack_norm = kernels.spectral_norm(np.vstack([a0, b0]))
    sv_a = np.linalg.svd(a0, compute_uv=False)
    sigma_n_a = float(sv_a[-1])
    kappa_a = float(sv_a[0] / sv_a[-1])
    norm_b = kernels.spectral_norm(b0)
    product_base = kernels.spectral_norm((v * d[None, :]) @ v.conj().T)
    tau = n * n * u
    c_log = math.log(n)
    delta0 = tau * stack_norm * (sigma_n_a + norm_b) / (sigma_n_a - tau * stack_norm)

    rows = []
    a_j, b_j = a0, b0
    d_es = kernels.matmul(kernels.invert(a0), b0)
    entries = []
    for j in range(config.p_max):
        p = j + 1
        a_j, b_j, entry = irs_step(a_j, b_j, step_index=j, fast=True)
        entries.append(entry)
        d_es = kernels.matmul(d_es, d_es)
        target = oracle(p)
        run = IRSRun(a_p=a_j, b_p=b_j, trace=tuple(entries), p=p)
        err_irs = float(
            np.linalg.norm(np.asarray(implicit_to_explicit(run), dtype=np.complex128) - target, 2)
        )
        err_es = float(np.linalg.norm(np.asarray(d_es, dtype=np.complex128) - target, 2))

        kappa_ap, sigma_ap = _kappa_sigma(a_j)
        norm_bp = kernels.spectral_norm(b_j)
        kap_irs = kappa_irs(a0, b0, p)
        gamma = 1.0 + 4.0 * math.sqrt(2.0) * (8.0 * math.log(n + 1) + 28.0) * kap_irs
        eps = 14.0 * tau * gamma ** (p - 1)
        t1 = tau * (1.0 + (1.0 + tau) * kappa_ap ** c_log) * (norm_bp / sigma_ap)
        denom = sigma_ap - eps * stack_norm
        t2 = (
            eps * stack_norm * (sigma_ap + norm_bp) / (sigma_ap * denom)
            if denom > 0
            else float("inf")
        )
        t3 = delta0 * _power_product(product_base, delta0, p)
        bound_irs = t1 + t2 + t3
        bound_es = (
            _power_product_es(product_base, tau, p)
            * tau
            * (1.0 + (1.0 + tau) * kappa_a ** c_log)
            * (norm_b / sigma_n_a)
        )
        rows.append(
            BoundReportRow(p=p, err_irs=err_irs, bound_irs=bound_irs,
                           err_es=err_es, bound_es=bound_es)
        )

    with kernels.count_kernels() as flops_irs:
        aa, bb = a0, b0
        count_entries = []
        for j in range(config.p_max):
            aa, bb, entry = irs_step(aa, bb, step_index=j, fast=True)
            count_entries.append(entry)
        implicit_to_explicit(
            IRSRun(a_p=aa, b_p=bb, trace=tuple(count_entries), p=config.p_max)
        )
    with kernels.count_kernels() as flops_es:
        explicit_squaring(a0, b0, config.p_max)
    expected_irs = kernels.KernelCounts(
        matmul=2 * config.p_max + 1, qr=config.p_max, inv=1
    )
    expected_es = kernels.KernelCounts(matmul=config.p_max + 1, qr=0, inv=1)
    return BoundReport(
        rows=tuple(rows),
        flops_irs=flops_irs,
        flops_es=flops_es,
        expected_flops_irs=expected_irs,
        expected_flops_es=expected_es,
    )


def _power_product_es(base_norm, tau, p):
    """prod_{j=1..p} 2 (1 + tau) r^(2^(j-1)) from the explicit recursion."""
    out = 1.0
    for j in range(1, p + 1):
        out *= 2.0 * (1.0 + tau) * base_norm ** (2 ** (j - 1))
        if math.isinf(out):
            break
    return out


def run_experiment(config):
    """Dispatch a config to its runner; returns a list of `TrialRecord`.

    ``bound_report`` has its own tabular result type and is not dispatched
    here; use `run_bound_report`.
    """
    if config.experiment in ("toy_identity", "general_square"):
        return run_square_experiment(config)
    if config.experiment == "condition_evolution":
        return run_condition_evolution(config)
    if config.experiment == "expm_compare":
        return run_expm_experiment(config)
    raise DomainError(f"run_experiment cannot dispatch {config.experiment!r}")
