"""Reproducible simulation harness and network-exploration helpers.

A simulation sweeps exactly one parameter (sparsity, size, or normal
variance).  For each swept value the generative parameters are drawn once,
``replicates`` adjacency matrices are sampled with seeds ``base_seed + rep``,
every requested algorithm is scored against the truth, and the scores are
averaged.  Everything is a pure function of the configuration, so two runs
of the same configuration produce byte-identical reports.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace

import numpy as np

from . import detect
from .errors import BidfmError, DimensionError, ValidationError
from .linalg import as_matrix, truncated_svd
from .metrics import ari, combined_report, hamming_error, nmi
from .model import (
    P1,
    P2,
    BiDCDFMParams,
    BiDFMParams,
    Membership,
    expected_adjacency,
    sample_memberships,
    sample_theta,
)
from .sampling import DistributionSpec, sample_adjacency

ALGORITHMS = ("bisc", "nbisc", "disim", "dscore", "rdscore")

# Per-point parameter seeds stride by this prime so they never collide
# with the per-replicate draw seeds (base_seed + rep).
_POINT_SEED_STRIDE = 100003


@dataclass(frozen=True)
class SimulationConfig:
    """One simulation: a model, an edge law, and exactly one swept parameter.

    Fixed dimensions go in ``n_r``/``n_c``; a size sweep uses ``n_grid`` and
    square ``n x n`` networks.  ``population`` replaces every sampled matrix
    by the expected adjacency itself (a noiseless identifiability check).
    """

    model: str  # "bidfm" | "bidcdfm"
    kind: str  # distribution kind
    mixing: np.ndarray
    k_r: int = 2
    k_c: int = 3
    n_r: int | None = None
    n_c: int | None = None
    rho: float | None = None
    sigma2: float | None = None
    rho_grid: tuple = None
    n_grid: tuple = None
    sigma2_grid: tuple = None
    replicates: int = 50
    algorithms: tuple = ALGORITHMS
    base_seed: int = 0
    population: bool = False
    theta_floor: float = 0.05
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "mixing", as_matrix(self.mixing, "mixing"))
        if self.model not in ("bidfm", "bidcdfm"):
            raise ValidationError(f"unknown model {self.model!r}")
        grids = [
            g for g in (self.rho_grid, self.n_grid, self.sigma2_grid) if g is not None
        ]
        if len(grids) != 1 or len(grids[0]) == 0:
            raise ValidationError("exactly one non-empty swept grid is required")
        if self.replicates < 1:
            raise ValidationError("replicates must be >= 1")
        if self.n_grid is None and (self.n_r is None or self.n_c is None):
            raise ValidationError("fixed dimensions n_r, n_c are required")
        if self.rho_grid is None and self.rho is None:
            raise ValidationError("rho is required when not swept")
        if self.kind == "normal" and self.sigma2_grid is None and self.sigma2 is None:
            raise ValidationError("sigma2 is required for the normal law")
        if self.kind in ("bernoulli", "poisson") and self.mixing.min() < 0:
            raise ValidationError(
                f"{self.kind} law needs a non-negative mixing matrix"
            )
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValidationError(f"unknown algorithms: {sorted(unknown)}")

    @property
    def swept(self) -> tuple:
        """(parameter name, values) of the swept axis."""
        if self.rho_grid is not None:
            return "rho", tuple(self.rho_grid)
        if self.n_grid is not None:
            return "n", tuple(self.n_grid)
        return "sigma2", tuple(self.sigma2_grid)


@dataclass(frozen=True)
class PointSummary:
    """Averaged scores of one algorithm at one swept value."""

    algorithm: str
    value: float
    mean_error: float
    mean_nmi: float
    mean_ari: float
    se_error: float
    se_nmi: float
    se_ari: float
    replicates: int  # successful replicates averaged here
    failed: int
    seeds: tuple


@dataclass(frozen=True)
class ExperimentReport:
    model: str
    kind: str
    swept_name: str
    points: tuple

    CSV_HEADER = (
        "algorithm,swept,value,mean_error,se_error,mean_nmi,se_nmi,"
        "mean_ari,se_ari,replicates,failed"
    )

    def for_algorithm(self, algorithm: str) -> list:
        return [p for p in self.points if p.algorithm == algorithm]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"# bidfm experiment report v1: {self.model}/{self.kind}\n")
        out.write(self.CSV_HEADER + "\n")
        for p in self.points:
            fields = [
                p.algorithm,
                self.swept_name,
                format(p.value, ".10g"),
                format(p.mean_error, ".10g"),
                format(p.se_error, ".10g"),
                format(p.mean_nmi, ".10g"),
                format(p.se_nmi, ".10g"),
                format(p.mean_ari, ".10g"),
                format(p.se_ari, ".10g"),
                str(p.replicates),
                str(p.failed),
            ]
            out.write(",".join(fields) + "\n")
        return out.getvalue()


def _run_algorithm(name, a, k_r, k_c, seed):
    """Dispatch one detection; Laplacian methods get the non-negative shift
    when the matrix has negative entries."""
    if name in ("disim", "rdscore"):
        shifted, shift = detect.shift_nonnegative(a)
        fn = detect.disim if name == "disim" else detect.rdscore
        result = fn(shifted, k_r, k_c, seed=seed)
        if shift:
            result.diagnostics["shift"] = shift
        return result
    fn = getattr(detect, name)
    return fn(a, k_r, k_c, seed=seed)


def _point_params(config, index, n_r, n_c, rho):
    base = config.base_seed + _POINT_SEED_STRIDE * (index + 1)
    rows = sample_memberships(n_r, config.k_r, base)
    cols = sample_memberships(n_c, config.k_c, base + 1)
    if config.model == "bidfm":
        return BiDFMParams(rows, cols, config.mixing, rho)
    return BiDCDFMParams(
        rows,
        cols,
        config.mixing,
        theta_row=sample_theta(n_r, rho, base + 2, floor=config.theta_floor),
        theta_col=sample_theta(n_c, rho, base + 3, floor=config.theta_floor),
    )


def run_simulation(config: SimulationConfig) -> ExperimentReport:
    """Execute the sweep and average the scores per (algorithm, value).

    Individual algorithm failures (for instance the ratio method with a
    single cluster) count as missing replicates instead of aborting the run.
    """
    swept_name, values = config.swept
    points = []
    for index, value in enumerate(values):
        n_r = int(value) if swept_name == "n" else config.n_r
        n_c = int(value) if swept_name == "n" else config.n_c
        rho = value if swept_name == "rho" else config.rho
        sigma2 = value if swept_name == "sigma2" else config.sigma2
        spec = DistributionSpec(config.kind, sigma2=sigma2)
        params = _point_params(config, index, n_r, n_c, rho)
        omega = expected_adjacency(params)
        scores = {alg: [] for alg in config.algorithms}
        failures = {alg: 0 for alg in config.algorithms}
        seeds = []
        for rep in range(config.replicates):
            seed = config.base_seed + rep
            seeds.append(seed)
            a = omega if config.population else sample_adjacency(omega, spec, seed)
            for alg in config.algorithms:
                try:
                    result = _run_algorithm(alg, a, config.k_r, config.k_c, seed)
                except BidfmError:
                    failures[alg] += 1
                    continue
                scores[alg].append(
                    combined_report(
                        result.row_labels,
                        params.row_membership,
                        result.col_labels,
                        params.col_membership,
                    )
                )
        for alg in config.algorithms:
            points.append(
                _summarize(alg, float(value), scores[alg], failures[alg], seeds)
            )
    return ExperimentReport(
        model=config.model,
        kind=config.kind,
        swept_name=swept_name,
        points=tuple(points),
    )


def _summarize(algorithm, value, reports, failed, seeds):
    def stats(getter):
        xs = np.array([getter(r) for r in reports])
        if xs.size == 0:
            return math.nan, math.nan
        se = float(xs.std(ddof=1) / math.sqrt(xs.size)) if xs.size > 1 else 0.0
        return float(xs.mean()), se

    mean_error, se_error = stats(lambda r: r.error_rate)
    mean_nmi, se_nmi = stats(lambda r: r.nmi)
    mean_ari, se_ari = stats(lambda r: r.ari)
    return PointSummary(
        algorithm=algorithm,
        value=value,
        mean_error=mean_error,
        mean_nmi=mean_nmi,
        mean_ari=mean_ari,
        se_error=se_error,
        se_nmi=se_nmi,
        se_ari=se_ari,
        replicates=len(reports),
        failed=failed,
        seeds=tuple(seeds),
    )


def _grid(start, stop, step):
    return tuple(round(start + i * step, 10) for i in range(int(round((stop - start) / step)) + 1))


_PRESETS = {
    # Bernoulli-weighted networks, non-negative mixing
    "sim1a": dict(model="bidfm", kind="bernoulli", mixing=P1, n_r=200, n_c=300,
                  rho_grid=_grid(0.1, 1.0, 0.1)),
    "sim1b": dict(model="bidcdfm", kind="bernoulli", mixing=P1, n_r=600, n_c=900,
                  rho_grid=_grid(0.1, 1.0, 0.1)),
    "sim1c": dict(model="bidfm", kind="bernoulli", mixing=P1, rho=0.5,
                  n_grid=_grid(50, 500, 50)),
    "sim1d": dict(model="bidcdfm", kind="bernoulli", mixing=P1, rho=0.5,
                  n_grid=_grid(500, 3000, 500)),
    # Normal-weighted networks, signed mixing allowed
    "sim2a": dict(model="bidfm", kind="normal", mixing=P2, n_r=200, n_c=300,
                  sigma2=1.0, rho_grid=_grid(0.1, 2.0, 0.1)),
    "sim2b": dict(model="bidcdfm", kind="normal", mixing=P2, n_r=600, n_c=900,
                  sigma2=1.0, rho_grid=_grid(0.1, 2.0, 0.1)),
    "sim2c": dict(model="bidfm", kind="normal", mixing=P2, n_r=200, n_c=300,
                  rho=0.5, sigma2_grid=_grid(0.2, 2.0, 0.2)),
    "sim2d": dict(model="bidcdfm", kind="normal", mixing=P2, n_r=600, n_c=900,
                  rho=3.0, sigma2_grid=_grid(0.2, 2.0, 0.2)),
    "sim2e": dict(model="bidfm", kind="normal", mixing=P2, rho=0.5, sigma2=1.0,
                  n_grid=_grid(50, 500, 50)),
    "sim2f": dict(model="bidcdfm", kind="normal", mixing=P2, rho=1.0, sigma2=1.0,
                  n_grid=_grid(500, 3000, 500)),
    # Signed +/-1 networks
    "sim3a": dict(model="bidfm", kind="signed", mixing=P2, n_r=100, n_c=150,
                  rho_grid=_grid(0.1, 1.0, 0.1)),
    "sim3b": dict(model="bidcdfm", kind="signed", mixing=P2, n_r=1000, n_c=1500,
                  rho_grid=_grid(0.1, 1.0, 0.1)),
    "sim3c": dict(model="bidfm", kind="signed", mixing=P2, rho=0.5,
                  n_grid=_grid(50, 500, 50)),
    "sim3d": dict(model="bidcdfm", kind="signed", mixing=P2, rho=1.0,
                  n_grid=_grid(500, 3000, 250)),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset(name: str, **overrides) -> SimulationConfig:
    """Return a named simulation configuration (2 row / 3 column clusters,
    50 replicates, all five algorithms); keyword overrides are applied on
    top, e.g. ``preset('sim1a', replicates=5)`` for a quick look."""
    if name not in _PRESETS:
        raise ValidationError(
            f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}"
        )
    config = SimulationConfig(name=name, **_PRESETS[name])
    return replace(config, **overrides) if overrides else config


@dataclass(frozen=True)
class KEstimate:
    """Leading singular values and the spot where their ratio drops most."""

    k_suggestion: int
    singular_values: tuple


def estimate_k_eigengap(a, m: int = 8) -> KEstimate:
    """Suggest a cluster count from the largest ratio gap between consecutive
    singular values.

    The suggestion is argmax over k < m of ``sigma_k / sigma_{k+1}`` (a zero
    successor counts as an infinite gap).  The raw values always come back
    too: the numeric suggestion is advisory and an eyeball on the elbow is
    worth more.
    """
    a = as_matrix(a)
    if not 1 <= m <= min(a.shape):
        raise DimensionError(f"m={m} out of range [1, {min(a.shape)}]")
    sv = truncated_svd(a, m).singular_values
    if m == 1:
        return KEstimate(k_suggestion=1, singular_values=tuple(sv))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = sv[:-1] / sv[1:]
    ratios = np.where(np.isnan(ratios), 0.0, ratios)  # 0/0: no gap evidence
    return KEstimate(
        k_suggestion=int(ratios.argmax()) + 1, singular_values=tuple(sv)
    )


def degree_profiles(a) -> tuple:
    """Absolute-value row and column degree sequences."""
    a = as_matrix(a)
    return np.abs(a).sum(axis=1), np.abs(a).sum(axis=0)


FILTER_MODES = ("rows", "cols", "both-and", "both-or")


@dataclass(frozen=True)
class ZeroDegreeSets:
    """1-based node indices with zero absolute degree, per side; ``both`` and
    ``either`` are only defined for square matrices (shared node universe)."""

    rows: tuple
    cols: tuple
    both: tuple | None = None
    either: tuple | None = None


@dataclass(frozen=True)
class FilterResult:
    matrix: np.ndarray
    kept_rows: tuple  # 1-based original indices surviving the filter
    kept_cols: tuple
    removed: ZeroDegreeSets


def filter_zero_degree(a, mode: str) -> FilterResult:
    """Drop zero-degree nodes from a network.

    ``rows``/``cols`` drop one side's zero-degree nodes only.  ``both-and``
    drops nodes dead on both sides, ``both-or`` nodes dead on either side;
    these two need a square matrix since they remove the same node from both
    sides.  Retained entries are copied verbatim.
    """
    a = as_matrix(a)
    if mode not in FILTER_MODES:
        raise ValidationError(f"unknown mode {mode!r}; choose from {FILTER_MODES}")
    d_r, d_c = degree_profiles(a)
    zero_r = np.nonzero(d_r == 0)[0]
    zero_c = np.nonzero(d_c == 0)[0]
    sets = ZeroDegreeSets(
        rows=tuple(int(i) for i in zero_r + 1),
        cols=tuple(int(i) for i in zero_c + 1),
    )
    if mode in ("both-and", "both-or"):
        if a.shape[0] != a.shape[1]:
            raise DimensionError(
                f"mode {mode!r} removes the same node from both sides and "
                f"needs a square matrix, got {a.shape}"
            )
        both = np.intersect1d(zero_r, zero_c)
        either = np.union1d(zero_r, zero_c)
        sets = ZeroDegreeSets(
            rows=sets.rows,
            cols=sets.cols,
            both=tuple(int(i) for i in both + 1),
            either=tuple(int(i) for i in either + 1),
        )
        drop = both if mode == "both-and" else either
        keep = np.setdiff1d(np.arange(a.shape[0]), drop)
        keep_rows = keep_cols = keep
    elif mode == "rows":
        keep_rows = np.setdiff1d(np.arange(a.shape[0]), zero_r)
        keep_cols = np.arange(a.shape[1])
    else:
        keep_rows = np.arange(a.shape[0])
        keep_cols = np.setdiff1d(np.arange(a.shape[1]), zero_c)
    return FilterResult(
        matrix=a[np.ix_(keep_rows, keep_cols)],
        kept_rows=tuple(int(i) for i in keep_rows + 1),
        kept_cols=tuple(int(i) for i in keep_cols + 1),
        removed=sets,
    )


def row_column_similarity(row_labels, col_labels) -> tuple:
    """Compare the row and column partitions of a shared node universe.

    Returns ``(hamming, nmi, ari)`` between the two estimated partitions; no
    ground truth is involved.  A large Hamming value (or small NMI/ARI)
    indicates an asymmetric sending/receiving structure.
    """
    rows = Membership.coerce(row_labels)
    cols = Membership.coerce(col_labels)
    if len(rows) != len(cols):
        raise DimensionError(
            f"row and column partitions cover different node counts: "
            f"{len(rows)} vs {len(cols)}"
        )
    if rows.n_clusters != cols.n_clusters:
        raise DimensionError(
            f"row and column partitions use different cluster counts: "
            f"{rows.n_clusters} vs {cols.n_clusters}"
        )
    return (
        hamming_error(cols, rows),
        nmi(cols, rows),
        ari(cols, rows),
    )
