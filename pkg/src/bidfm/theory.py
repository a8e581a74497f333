"""Noise-scale constants, assumption checks, deviation bounds and error-rate
envelopes for the two generative models, plus population-level diagnostics.

The envelopes are order-of-magnitude expressions: the concentration constant
``C_alpha`` and the big-O constants are not pinned by the theory, so callers
supply them (default 1) and should read the outputs comparatively, e.g. for
monotonicity in the model parameters, never as guarantees.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .linalg import SvdFactors, as_matrix, row_normalize, truncated_svd
from .model import (
    BiDCDFMParams,
    BiDFMParams,
    expected_adjacency,
    require_valid,
)
from .sampling import DistributionSpec, check_omega_range

_RANK_TOL = 1e-9


@dataclass(frozen=True)
class GammaTau:
    """Noise-scale constant and almost-sure entry deviation bound for a law.

    ``gamma`` is the exact value ``max Var(A_ij) / scale`` (scale = rho, or
    the per-entry theta product for the degree-corrected model); ``gamma_bound``
    is the coarser law-level bound usually quoted (1 for Bernoulli, etc.).
    ``tau`` is ``inf`` for laws with unbounded support; assumption checks then
    need an empirical surrogate, see :func:`empirical_tau`.
    """

    gamma: float
    tau: float
    gamma_bound: float

    @property
    def tau_unbounded(self) -> bool:
        return math.isinf(self.tau)


def gamma_tau(spec: DistributionSpec, params) -> GammaTau:
    """Exact noise-scale constant and deviation bound for a model/law pair."""
    require_valid(params)
    omega = expected_adjacency(params)
    check_omega_range(omega, spec)
    if isinstance(params, BiDFMParams):
        scale = params.rho
        min_scale = params.rho
    else:
        scale = np.outer(params.theta_row, params.theta_col)
        min_scale = float(params.theta_row.min() * params.theta_col.min())

    if spec.kind == "bernoulli":
        variance = omega * (1.0 - omega)
        return GammaTau(
            gamma=float((variance / scale).max()), tau=1.0, gamma_bound=1.0
        )
    if spec.kind == "normal":
        g = spec.sigma2 / min_scale
        return GammaTau(gamma=float(g), tau=math.inf, gamma_bound=float(g))
    if spec.kind == "signed":
        variance = 1.0 - omega**2
        return GammaTau(
            gamma=float((variance / scale).max()),
            tau=1.0 + float(np.abs(omega).max()),
            gamma_bound=1.0 / min_scale,
        )
    # poisson: variance equals the mean, support is unbounded
    return GammaTau(
        gamma=float((omega / scale).max()),
        tau=math.inf,
        gamma_bound=float((omega / scale).max()),
    )


def empirical_tau(a, omega) -> float:
    """Largest observed entry deviation ``max|A - Omega|``.

    A heuristic stand-in for the almost-sure bound when the law's support is
    unbounded; results based on it should be labeled as such.
    """
    a = as_matrix(a, "a")
    omega = as_matrix(omega, "omega")
    if a.shape != omega.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {omega.shape}")
    return float(np.abs(a - omega).max())


@dataclass(frozen=True)
class TheoryInputs:
    """Scalar summary of a model instance, the raw material of every bound.

    Build one by hand or from parameters via :func:`theory_inputs`.  Fields
    that only apply to one model may stay ``None``.
    """

    n_r: int
    n_c: int
    k_r: int
    k_c: int
    sigma_min_mixing: float  # smallest nonzero singular value of P
    gamma: float
    tau: float  # inf when the law has unbounded support
    n_r_min: int
    n_r_max: int
    n_c_min: int
    n_c_max: int
    rho: float | None = None
    theta_r_min: float | None = None
    theta_r_max: float | None = None
    theta_c_min: float | None = None
    theta_c_max: float | None = None
    theta_r_l1: float | None = None
    theta_c_l1: float | None = None
    delta_c: float | None = None  # min gap between column centroids (plain)
    delta_c_star: float | None = None  # same, normalized embedding
    m_v_c: float | None = None  # min column-centroid norm, normalized
    tau_is_empirical: bool = False  # tau came from an observed sample

    def replace(self, **kwargs) -> "TheoryInputs":
        return dataclasses.replace(self, **kwargs)


def theory_inputs(params, spec: DistributionSpec, observed=None) -> TheoryInputs:
    """Assemble :class:`TheoryInputs` from model parameters.

    ``gamma``/``tau`` come from :func:`gamma_tau`; when the law's deviation
    bound is unbounded and ``observed`` is given, the empirical maximum
    deviation is substituted for ``tau``.  Column-centroid gaps are measured
    on the population SVD.
    """
    require_valid(params)
    gt = gamma_tau(spec, params)
    tau = gt.tau
    tau_is_empirical = False
    if gt.tau_unbounded and observed is not None:
        tau = empirical_tau(observed, expected_adjacency(params))
        tau_is_empirical = True

    rows = params.row_membership
    cols = params.col_membership
    row_sizes = rows.cluster_sizes()
    col_sizes = cols.cluster_sizes()
    sigma_min = float(
        np.linalg.svd(params.mixing, compute_uv=False)[
            min(rows.n_clusters, cols.n_clusters) - 1
        ]
    )

    factors = population_svd_oracle(params)
    x_c = _cluster_rows(factors.right, cols.labels)
    v_c = _cluster_rows(row_normalize(factors.right).matrix, cols.labels)

    common = dict(
        tau_is_empirical=tau_is_empirical,
        n_r=len(rows),
        n_c=len(cols),
        k_r=rows.n_clusters,
        k_c=cols.n_clusters,
        sigma_min_mixing=sigma_min,
        gamma=gt.gamma,
        tau=tau,
        n_r_min=int(row_sizes.min()),
        n_r_max=int(row_sizes.max()),
        n_c_min=int(col_sizes.min()),
        n_c_max=int(col_sizes.max()),
        delta_c=_min_pairwise_gap(x_c),
        delta_c_star=_min_pairwise_gap(v_c),
        m_v_c=float(np.linalg.norm(v_c, axis=1).min()),
    )
    if isinstance(params, BiDFMParams):
        return TheoryInputs(rho=params.rho, **common)
    return TheoryInputs(
        theta_r_min=float(params.theta_row.min()),
        theta_r_max=float(params.theta_row.max()),
        theta_c_min=float(params.theta_col.min()),
        theta_c_max=float(params.theta_col.max()),
        theta_r_l1=float(params.theta_row.sum()),
        theta_c_l1=float(params.theta_col.sum()),
        **common,
    )


@dataclass(frozen=True)
class AssumptionCheck:
    holds: bool | None  # None when indeterminate (unbounded tau)
    ratio: float | None  # lhs / rhs; >= 1 means the assumption holds
    lhs: float
    rhs: float | None
    note: str = ""


def _signal_requirement(inputs: TheoryInputs, lhs: float, rhs_scale: float):
    if math.isinf(inputs.tau):
        return AssumptionCheck(
            holds=None,
            ratio=None,
            lhs=lhs,
            rhs=None,
            note="tau is unbounded for this law; substitute an empirical "
            "max|A - Omega| (heuristic) to obtain a verdict",
        )
    rhs = inputs.tau**2 * math.log(inputs.n_r + inputs.n_c) / rhs_scale
    note = (
        "tau is an empirical max|A - Omega| surrogate; the verdict is heuristic"
        if inputs.tau_is_empirical
        else ""
    )
    return AssumptionCheck(holds=lhs >= rhs, ratio=lhs / rhs, lhs=lhs, rhs=rhs, note=note)


def check_assumption1(inputs: TheoryInputs) -> AssumptionCheck:
    """Signal-strength requirement of the plain model:
    ``gamma * rho >= tau^2 log(n_r + n_c) / max(n_r, n_c)``."""
    if inputs.rho is None:
        raise ValidationError("assumption check for the plain model needs rho")
    return _signal_requirement(
        inputs, inputs.gamma * inputs.rho, max(inputs.n_r, inputs.n_c)
    )


def _theta_balance(inputs: TheoryInputs) -> float:
    needed = (
        inputs.theta_r_max,
        inputs.theta_c_max,
        inputs.theta_r_l1,
        inputs.theta_c_l1,
    )
    if any(v is None for v in needed):
        raise ValidationError(
            "degree-corrected bound needs theta extrema and l1 norms"
        )
    return max(
        inputs.theta_r_max * inputs.theta_c_l1,
        inputs.theta_c_max * inputs.theta_r_l1,
    )


def check_assumption2(inputs: TheoryInputs) -> AssumptionCheck:
    """Degree-corrected signal requirement:
    ``gamma * max(theta_r_max * |theta_c|_1, theta_c_max * |theta_r|_1)
    >= tau^2 log(n_r + n_c)``."""
    return _signal_requirement(inputs, inputs.gamma * _theta_balance(inputs), 1.0)


def deviation_bound_bidfm(inputs: TheoryInputs, c_alpha: float = 1.0) -> float:
    """High-probability bound on the spectral norm of ``A - Omega``:
    ``C_alpha * sqrt(gamma * rho * max(n_r, n_c) * log(n_r + n_c))``."""
    if inputs.rho is None:
        raise ValidationError("plain-model deviation bound needs rho")
    return c_alpha * math.sqrt(
        inputs.gamma
        * inputs.rho
        * max(inputs.n_r, inputs.n_c)
        * math.log(inputs.n_r + inputs.n_c)
    )


def deviation_bound_bidcdfm(inputs: TheoryInputs, c_alpha: float = 1.0) -> float:
    """Degree-corrected spectral deviation bound; equals the plain bound when
    every theta is ``sqrt(rho)``."""
    return c_alpha * math.sqrt(
        inputs.gamma * _theta_balance(inputs) * math.log(inputs.n_r + inputs.n_c)
    )


@dataclass(frozen=True)
class ErrorEnvelope:
    f_r: float
    f_c: float


def error_envelope_bidfm(inputs: TheoryInputs, c: float = 1.0) -> ErrorEnvelope:
    """Order-of-magnitude misclustering envelopes for the plain model.

    The column envelope needs the centroid gap ``delta_c``; when it is absent
    and the cluster counts agree, the guaranteed lower bound
    ``sqrt(2 / n_c_max)`` is substituted.
    """
    if inputs.rho is None:
        raise ValidationError("plain-model envelope needs rho")
    tail = (
        max(inputs.n_r, inputs.n_c)
        * math.log(inputs.n_r + inputs.n_c)
        / (
            inputs.sigma_min_mixing**2
            * inputs.rho
            * inputs.n_r_min
            * inputs.n_c_min
        )
    )
    f_r = c * inputs.gamma * inputs.k_r**2 * inputs.n_r_max / inputs.n_r_min * tail
    delta_c = inputs.delta_c
    if delta_c is None:
        if inputs.k_r != inputs.k_c:
            raise ValidationError(
                "column envelope needs delta_c when cluster counts differ"
            )
        delta_c = math.sqrt(2.0 / inputs.n_c_max)
    f_c = (
        c
        * inputs.gamma
        * inputs.k_r
        * inputs.k_c
        / (delta_c**2 * inputs.n_c_min)
        * tail
    )
    return ErrorEnvelope(f_r=f_r, f_c=f_c)


def error_envelope_bidcdfm(inputs: TheoryInputs, c: float = 1.0) -> ErrorEnvelope:
    """Degree-corrected misclustering envelopes.

    When the cluster counts agree, the normalized-embedding geometry pins
    ``delta_c_star = sqrt(2)`` and ``m_v_c = 1``; otherwise both must be
    supplied in ``inputs``.
    """
    needed = (
        inputs.theta_r_min,
        inputs.theta_r_max,
        inputs.theta_c_min,
        inputs.theta_c_max,
    )
    if any(v is None for v in needed):
        raise ValidationError("degree-corrected envelope needs theta extrema")
    balance = _theta_balance(inputs)
    log_n = math.log(inputs.n_r + inputs.n_c)
    sigma2 = inputs.sigma_min_mixing**2
    f_r = (
        c
        * inputs.gamma
        * inputs.theta_r_max**2
        * inputs.k_r**2
        * inputs.n_r_max
        * balance
        * log_n
        / (
            inputs.theta_r_min**4
            * inputs.theta_c_min**2
            * sigma2
            * inputs.n_r_min**2
            * inputs.n_c_min
        )
    )
    delta_star = inputs.delta_c_star
    m_v_c = inputs.m_v_c
    if delta_star is None or m_v_c is None:
        if inputs.k_r != inputs.k_c:
            raise ValidationError(
                "column envelope needs delta_c_star and m_v_c when cluster "
                "counts differ"
            )
        delta_star = math.sqrt(2.0) if delta_star is None else delta_star
        m_v_c = 1.0 if m_v_c is None else m_v_c
    f_c = (
        c
        * inputs.gamma
        * inputs.theta_c_max**2
        * inputs.k_r
        * inputs.k_c
        * inputs.n_c_max
        * balance
        * log_n
        / (
            inputs.theta_r_min**2
            * inputs.theta_c_min**4
            * sigma2
            * delta_star**2
            * m_v_c**2
            * inputs.n_r_min
            * inputs.n_c_min**2
        )
    )
    return ErrorEnvelope(f_r=f_r, f_c=f_c)


def _cluster_rows(matrix, labels):
    """One representative row per cluster (the first occurrence)."""
    first = [int(np.nonzero(labels == k)[0][0]) for k in range(1, labels.max() + 1)]
    return matrix[first]


def _min_pairwise_gap(rows) -> float:
    gaps = [
        float(np.linalg.norm(rows[k] - rows[l]))
        for k in range(len(rows))
        for l in range(k + 1, len(rows))
    ]
    return min(gaps) if gaps else math.inf


@dataclass(frozen=True)
class GeometryReport:
    """Deviations of the population singular-vector geometry from theory.

    ``within_*`` measure how far same-cluster embedding rows are from
    coinciding; ``row_gap_dev``/``col_gap_dev`` compare between-centroid
    distances with their closed forms (``col_gap_dev`` is None when the
    cluster counts differ, where no closed form applies).
    """

    within_row: float
    within_col: float
    row_gap_dev: float
    col_gap_dev: float | None

    @property
    def max_deviation(self) -> float:
        vals = [self.within_row, self.within_col, self.row_gap_dev]
        if self.col_gap_dev is not None:
            vals.append(self.col_gap_dev)
        return max(vals)


def _within_cluster_spread(matrix, labels):
    worst = 0.0
    for k in range(1, labels.max() + 1):
        block = matrix[labels == k]
        worst = max(
            worst, float(np.abs(block - block.mean(axis=0)).max(initial=0.0))
        )
    return worst


def _gap_deviation(matrix, labels, expected):
    """Max |achieved - expected| over between-centroid distances; ``expected``
    maps a cluster pair (k, l) to the theoretical distance."""
    reps = _cluster_rows(matrix, labels)
    worst = 0.0
    for k in range(len(reps)):
        for l in range(k + 1, len(reps)):
            achieved = float(np.linalg.norm(reps[k] - reps[l]))
            worst = max(worst, abs(achieved - expected(k, l)))
    return worst


def population_geometry_check(params) -> GeometryReport:
    """Verify the exact-recovery geometry on the expected adjacency.

    Plain model: same-cluster rows of the singular-vector matrices coincide
    and row centroids sit ``sqrt(1/n_k + 1/n_l)`` apart (columns too when the
    cluster counts agree).  Degree-corrected model: the same statements for
    the row-normalized matrices with all gaps equal to ``sqrt(2)``.
    """
    require_valid(params)
    omega = expected_adjacency(params)
    rows = params.row_membership
    cols = params.col_membership
    k = min(rows.n_clusters, cols.n_clusters)
    factors = truncated_svd(omega, k)
    if factors.singular_values[-1] <= _RANK_TOL * factors.singular_values[0]:
        raise ValidationError(
            "expected adjacency is numerically rank deficient; geometry "
            "checks are meaningless"
        )

    degree_corrected = isinstance(params, BiDCDFMParams)
    if degree_corrected:
        u_r = row_normalize(factors.left).matrix
        u_c = row_normalize(factors.right).matrix
    else:
        u_r, u_c = factors.left, factors.right

    row_sizes = rows.cluster_sizes()
    col_sizes = cols.cluster_sizes()
    if degree_corrected:
        row_expected = lambda k_, l_: math.sqrt(2.0)
        col_expected = row_expected
    else:
        row_expected = lambda k_, l_: math.sqrt(
            1.0 / row_sizes[k_] + 1.0 / row_sizes[l_]
        )
        col_expected = lambda k_, l_: math.sqrt(
            1.0 / col_sizes[k_] + 1.0 / col_sizes[l_]
        )

    return GeometryReport(
        within_row=_within_cluster_spread(u_r, rows.labels),
        within_col=_within_cluster_spread(u_c, cols.labels),
        row_gap_dev=_gap_deviation(u_r, rows.labels, row_expected),
        col_gap_dev=(
            _gap_deviation(u_c, cols.labels, col_expected)
            if rows.n_clusters == cols.n_clusters
            else None
        ),
    )


def population_svd_oracle(params) -> SvdFactors:
    """Analytic compact SVD of the expected adjacency.

    Scaled one-hot columns give orthonormal bases on each side; the problem
    collapses to the SVD of a small weighted mixing matrix, whose factors are
    lifted back.  Agrees with the numerical SVD up to per-column signs, which
    are canonicalized identically.
    """
    if isinstance(params, BiDFMParams):
        params = BiDCDFMParams.from_bidfm(params)
    require_valid(params)
    z_r = params.row_membership.to_onehot()
    z_c = params.col_membership.to_onehot()
    scaled_r = params.theta_row[:, None] * z_r
    scaled_c = params.theta_col[:, None] * z_c
    norms_r = np.linalg.norm(scaled_r, axis=0)
    norms_c = np.linalg.norm(scaled_c, axis=0)
    basis_r = scaled_r / norms_r
    basis_c = scaled_c / norms_c
    total_r = np.linalg.norm(params.theta_row)
    total_c = np.linalg.norm(params.theta_col)
    core = (norms_r / total_r)[:, None] * params.mixing * (norms_c / total_c)[None, :]
    v_r, sigma, v_c_t = np.linalg.svd(core, full_matrices=False)
    k = min(core.shape)
    u_r = basis_r @ v_r[:, :k]
    u_c = basis_c @ v_c_t[:k, :].T
    # same sign convention as truncated_svd: peak entry of each left vector
    # positive
    peaks = np.abs(u_r).argmax(axis=0)
    signs = np.sign(u_r[peaks, np.arange(k)])
    signs[signs == 0] = 1.0
    return SvdFactors(
        left=u_r * signs,
        singular_values=total_r * total_c * sigma[:k],
        right=u_c * signs,
    )
