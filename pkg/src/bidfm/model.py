"""Generative model parameters and expected-adjacency builders.

Two models are covered: the distribution-free bipartite blockmodel, whose
expected adjacency is ``rho * Z_r @ P @ Z_c.T`` for one-hot membership
matrices ``Z`` and a full-rank mixing matrix ``P`` with ``max|P| = 1``, and
its degree-corrected extension ``diag(theta_r) @ Z_r @ P @ Z_c.T @
diag(theta_c)``.  Setting every theta to ``sqrt(rho)`` makes the second
reduce exactly to the first.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InfeasibleError, ValidationError
from .linalg import as_matrix

# Mixing matrices used throughout the simulation protocol: the first for
# laws that need non-negative block strengths, the second for signed ones.
P1 = np.array([[1.0, 0.2, 0.3], [0.3, 0.8, 0.2]])
P2 = np.array([[-1.0, 0.3, -0.5], [-0.4, 0.8, 0.2]])

_MAX_ABS_TOL = 1e-12
_RANK_TOL = 1e-10


class Membership:
    """Hard cluster assignment for one side of the network.

    ``labels`` holds one integer in ``1..n_clusters`` per node; every cluster
    must be nonempty.  Converts losslessly to and from a one-hot matrix.
    """

    __slots__ = ("labels", "n_clusters")

    def __init__(self, labels, n_clusters: int | None = None):
        labels = np.asarray(labels, dtype=int)
        if labels.ndim != 1 or labels.size == 0:
            raise DimensionError("labels must be a non-empty 1-D sequence")
        if n_clusters is None:
            n_clusters = int(labels.max())
        if labels.min() < 1 or labels.max() > n_clusters:
            raise ValidationError(
                f"labels must lie in 1..{n_clusters}, "
                f"got range [{labels.min()}, {labels.max()}]"
            )
        self.labels = labels
        self.n_clusters = int(n_clusters)

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        return (
            isinstance(other, Membership)
            and self.n_clusters == other.n_clusters
            and np.array_equal(self.labels, other.labels)
        )

    def __repr__(self):
        return f"Membership(n={len(self)}, n_clusters={self.n_clusters})"

    def cluster_sizes(self) -> np.ndarray:
        """Number of nodes per cluster, indexed 0..n_clusters-1."""
        return np.bincount(self.labels - 1, minlength=self.n_clusters)

    def is_complete(self) -> bool:
        """True when every cluster holds at least one node."""
        return bool(self.cluster_sizes().min() > 0)

    def to_onehot(self) -> np.ndarray:
        z = np.zeros((len(self), self.n_clusters))
        z[np.arange(len(self)), self.labels - 1] = 1.0
        return z

    @classmethod
    def from_onehot(cls, z) -> "Membership":
        z = as_matrix(z, "membership matrix")
        rows = z.sum(axis=1)
        if not np.all(rows == 1.0) or not np.all((z == 0.0) | (z == 1.0)):
            raise ValidationError("membership matrix must be one-hot")
        return cls(z.argmax(axis=1) + 1, n_clusters=z.shape[1])

    @classmethod
    def coerce(cls, value) -> "Membership":
        return value if isinstance(value, Membership) else cls(value)


@dataclass(frozen=True)
class BiDFMParams:
    """Parameters of the distribution-free bipartite blockmodel."""

    row_membership: Membership
    col_membership: Membership
    mixing: np.ndarray  # K_r x K_c, max|entry| = 1, full rank
    rho: float  # global sparsity scale, > 0

    def __post_init__(self):
        object.__setattr__(self, "mixing", as_matrix(self.mixing, "mixing"))

    @property
    def shape(self):
        return (len(self.row_membership), len(self.col_membership))


@dataclass(frozen=True)
class BiDCDFMParams:
    """Degree-corrected variant: per-node positive scale factors replace rho."""

    row_membership: Membership
    col_membership: Membership
    mixing: np.ndarray
    theta_row: np.ndarray = field(repr=False)  # n_r positive reals
    theta_col: np.ndarray = field(repr=False)  # n_c positive reals

    def __post_init__(self):
        object.__setattr__(self, "mixing", as_matrix(self.mixing, "mixing"))
        object.__setattr__(self, "theta_row", np.asarray(self.theta_row, dtype=float))
        object.__setattr__(self, "theta_col", np.asarray(self.theta_col, dtype=float))

    @property
    def shape(self):
        return (len(self.row_membership), len(self.col_membership))

    @classmethod
    def from_bidfm(cls, params: BiDFMParams) -> "BiDCDFMParams":
        """Constant-theta embedding: theta == sqrt(rho) on both sides."""
        s = np.sqrt(params.rho)
        return cls(
            row_membership=params.row_membership,
            col_membership=params.col_membership,
            mixing=params.mixing,
            theta_row=np.full(len(params.row_membership), s),
            theta_col=np.full(len(params.col_membership), s),
        )


def _mixing_violations(p, k_r, k_c):
    found = []
    if p.shape != (k_r, k_c):
        found.append(
            f"mixing matrix shape {p.shape} does not match cluster counts ({k_r}, {k_c})"
        )
        return found
    if abs(np.abs(p).max() - 1.0) > _MAX_ABS_TOL:
        found.append(f"max|P| must equal 1, got {np.abs(p).max():.12g}")
    smallest = np.linalg.svd(p, compute_uv=False)[min(k_r, k_c) - 1]
    if smallest <= _RANK_TOL:
        found.append(f"mixing matrix is rank deficient (sigma_min={smallest:.3g})")
    return found


def validate(params) -> list:
    """Collect every invariant violation; an empty list means the parameters
    are valid.  Raise nothing: callers decide whether violations are fatal."""
    found = []
    for side, mem in (("row", params.row_membership), ("col", params.col_membership)):
        if not mem.is_complete():
            found.append(f"{side} membership leaves at least one cluster empty")
    k_r = params.row_membership.n_clusters
    k_c = params.col_membership.n_clusters
    if k_r > k_c:
        found.append(
            f"K_r={k_r} exceeds K_c={k_c}; transpose the network so K_r <= K_c"
        )
    found.extend(_mixing_violations(params.mixing, k_r, k_c))
    if isinstance(params, BiDFMParams):
        if not params.rho > 0:
            found.append(f"rho must be positive, got {params.rho}")
    elif isinstance(params, BiDCDFMParams):
        for side, theta, n in (
            ("row", params.theta_row, len(params.row_membership)),
            ("col", params.theta_col, len(params.col_membership)),
        ):
            if theta.shape != (n,):
                found.append(f"theta_{side} must have length {n}, got {theta.shape}")
            elif not np.all(theta > 0):
                found.append(f"theta_{side} must be strictly positive")
    else:
        found.append(f"unknown parameter type {type(params).__name__}")
    return found


def require_valid(params):
    violations = validate(params)
    if violations:
        raise ValidationError(violations)


def expected_adjacency_bidfm(params: BiDFMParams) -> np.ndarray:
    """Expected adjacency ``rho * Z_r @ P @ Z_c.T``; entry (i, j) equals
    ``rho * P(g_i, g_j)`` and the matrix has rank ``min(K_r, K_c)``."""
    require_valid(params)
    block = params.rho * params.mixing
    return block[
        np.ix_(params.row_membership.labels - 1, params.col_membership.labels - 1)
    ]


def expected_adjacency_bidcdfm(params: BiDCDFMParams) -> np.ndarray:
    """Expected adjacency ``diag(theta_r) @ Z_r @ P @ Z_c.T @ diag(theta_c)``."""
    require_valid(params)
    block = params.mixing[
        np.ix_(params.row_membership.labels - 1, params.col_membership.labels - 1)
    ]
    return params.theta_row[:, None] * block * params.theta_col[None, :]


def expected_adjacency(params) -> np.ndarray:
    if isinstance(params, BiDFMParams):
        return expected_adjacency_bidfm(params)
    return expected_adjacency_bidcdfm(params)


def sample_memberships(n: int, k: int, seed: int) -> Membership:
    """Draw node labels i.i.d. uniform over ``1..k``, resampling the whole
    vector until every cluster is hit.  Deterministic given ``seed``."""
    if n < k:
        raise InfeasibleError(f"cannot place {n} nodes into {k} nonempty clusters")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    while True:
        labels = rng.integers(1, k + 1, size=n)
        if len(np.unique(labels)) == k:
            return Membership(labels, n_clusters=k)


def sample_theta(n: int, rho: float, seed: int, floor: float = 0.05) -> np.ndarray:
    """Heterogeneity factors ``sqrt(rho) * u`` with ``u ~ Uniform(floor, 1)``.

    The positive floor (default 0.05) keeps the smallest factors bounded away
    from zero so normalized embeddings and theta-dependent bounds stay
    non-degenerate at desk scale.
    """
    if not rho > 0:
        raise ValidationError(f"rho must be positive, got {rho}")
    if not 0 <= floor < 1:
        raise ValidationError(f"floor must lie in [0, 1), got {floor}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    return np.sqrt(rho) * rng.uniform(floor, 1.0, size=n)
