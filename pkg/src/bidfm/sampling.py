"""Distribution-free edge samplers.

Given an expected adjacency and a distribution choice, draw an observed
matrix whose entries are independent with the prescribed means.  The
Bernoulli and signed laws constrain the admissible range of the expected
entries; range violations are rejected outright, because clamping would
silently break unbiasedness.

Random numbers come from numpy's counter-based Philox generator keyed by the
caller's seed, so a fixed ``(omega, spec, seed)`` triple always reproduces
the same matrix regardless of platform or thread count; entry ``(i, j)``
is a pure function of the seed and its position in the stream.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .linalg import as_matrix

KINDS = ("bernoulli", "normal", "signed", "poisson")


@dataclass(frozen=True)
class DistributionSpec:
    """Edge-weight law plus its parameters.

    ``sigma2`` is the normal variance and must be present exactly for the
    normal law.
    """

    kind: str
    sigma2: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(
                f"unknown distribution {self.kind!r}; choose from {KINDS}"
            )
        if self.kind == "normal":
            if self.sigma2 is None or not self.sigma2 > 0:
                raise ValidationError("normal law requires sigma2 > 0")
        elif self.sigma2 is not None:
            raise ValidationError("sigma2 is only meaningful for the normal law")

    @classmethod
    def bernoulli(cls):
        return cls("bernoulli")

    @classmethod
    def normal(cls, sigma2: float):
        return cls("normal", sigma2=sigma2)

    @classmethod
    def signed(cls):
        return cls("signed")

    @classmethod
    def poisson(cls):
        return cls("poisson")


def _check_range(omega, lo, hi, kind):
    bad = (omega < lo) | (omega > hi)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise DomainError(
            f"{kind} law requires expected entries in [{lo}, {hi}]; "
            f"entry ({i + 1}, {j + 1}) = {omega[i, j]:.6g}"
        )


def check_omega_range(omega, spec: DistributionSpec):
    """Reject expected matrices outside the law's admissible interval."""
    if spec.kind == "bernoulli":
        _check_range(omega, 0.0, 1.0, "bernoulli")
    elif spec.kind == "signed":
        _check_range(omega, -1.0, 1.0, "signed")
    elif spec.kind == "poisson":
        _check_range(omega, 0.0, np.inf, "poisson")


def sample_adjacency(omega, spec: DistributionSpec, seed: int) -> np.ndarray:
    """Draw an adjacency matrix with independent entries and mean ``omega``.

    Laws: Bernoulli(omega); Normal(omega, sigma2); signed +/-1 with
    ``P(+1) = (1 + omega) / 2``; Poisson(omega).
    """
    omega = as_matrix(omega, "omega")
    check_omega_range(omega, spec)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    if spec.kind == "bernoulli":
        return (rng.random(omega.shape) < omega).astype(float)
    if spec.kind == "normal":
        return omega + np.sqrt(spec.sigma2) * rng.standard_normal(omega.shape)
    if spec.kind == "signed":
        return np.where(rng.random(omega.shape) < (1.0 + omega) / 2.0, 1.0, -1.0)
    return rng.poisson(omega).astype(float)


def distribution_moments(
    spec: DistributionSpec, omega_entry: float, scale: float
) -> tuple:
    """Exact entry variance and its contribution to the noise-scale constant.

    ``scale`` is ``rho`` for the plain model or ``theta_r(i) * theta_c(j)``
    for the degree-corrected one; the second return value is
    ``variance / scale``.
    """
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale}")
    w = float(omega_entry)
    if spec.kind == "bernoulli":
        if not 0.0 <= w <= 1.0:
            raise DomainError(f"bernoulli mean must lie in [0, 1], got {w}")
        variance = w * (1.0 - w)
    elif spec.kind == "normal":
        variance = float(spec.sigma2)
    elif spec.kind == "signed":
        if not -1.0 <= w <= 1.0:
            raise DomainError(f"signed mean must lie in [-1, 1], got {w}")
        variance = 1.0 - w * w
    else:
        if w < 0.0:
            raise DomainError(f"poisson mean must be non-negative, got {w}")
        variance = w
    return variance, variance / scale
