import numpy as np
import pytest

from bidfm.detect import (
    _ratio_matrix,
    bisc,
    disim,
    dscore,
    nbisc,
    rdscore,
    shift_nonnegative,
)
from bidfm.errors import DimensionError, DomainError, UnsupportedError
from bidfm.experiments import preset, run_simulation
from bidfm.metrics import hamming_error
from bidfm.model import (
    P1,
    P2,
    BiDCDFMParams,
    BiDFMParams,
    expected_adjacency,
    sample_memberships,
    sample_theta,
)


def plain_instance(seed=0, n_r=60, n_c=90, p=P1, rho=0.5):
    rows = sample_memberships(n_r, 2, seed)
    cols = sample_memberships(n_c, 3, seed + 1000)
    return BiDFMParams(rows, cols, p, rho)


def corrected_instance(seed=0, n_r=60, n_c=90, p=P1, rho=0.5):
    rows = sample_memberships(n_r, 2, seed)
    cols = sample_memberships(n_c, 3, seed + 1000)
    theta_r = sample_theta(n_r, rho, seed + 2000)
    theta_c = sample_theta(n_c, rho, seed + 3000)
    return BiDCDFMParams(rows, cols, p, theta_r, theta_c)


def both_errors(result, params):
    return (
        hamming_error(result.row_labels, params.row_membership),
        hamming_error(result.col_labels, params.col_membership),
    )


@pytest.fixture(scope="module")
def bernoulli_dense_run():
    """Simulation at full sparsity (rho = 1), 200x300, 50 replicates, all
    five algorithms; several comparisons below share it."""
    config = preset("sim1a", replicates=50, rho_grid=(1.0,))
    report = run_simulation(config)
    return {p.algorithm: p for p in report.points}


class TestBisc:
    @pytest.mark.parametrize("seed", range(3))
    def test_population_exact_recovery(self, seed):
        params = plain_instance(seed)
        result = bisc(expected_adjacency(params), 2, 3, seed=0)
        assert both_errors(result, params) == (0.0, 0.0)

    def test_single_cluster_each_side(self):
        a = np.random.default_rng(0).uniform(size=(10, 15))
        result = bisc(a, 1, 1, seed=0)
        assert set(result.row_labels.labels) == {1}
        assert set(result.col_labels.labels) == {1}

    def test_transpose_consistency(self):
        params = plain_instance(3)
        a = expected_adjacency(params) + 0.01 * np.random.default_rng(3).standard_normal(
            params.shape
        )
        forward = bisc(a, 2, 3, seed=5)
        swapped = bisc(a.T, 3, 2, seed=5)
        assert np.array_equal(forward.row_labels.labels, swapped.col_labels.labels)
        assert np.array_equal(forward.col_labels.labels, swapped.row_labels.labels)

    def test_permutation_equivariance(self):
        params = plain_instance(4)
        a = expected_adjacency(params)
        noisy = a + 0.05 * np.random.default_rng(4).standard_normal(a.shape)
        base = bisc(noisy, 2, 3, seed=1)
        err = hamming_error(base.row_labels, params.row_membership)
        # relabel the generating clusters; recovery error must not move
        relabeled = params.row_membership.labels.copy()
        relabeled = np.where(relabeled == 1, 3, relabeled) - 1
        from bidfm.model import Membership

        assert hamming_error(
            base.row_labels, Membership(relabeled, n_clusters=2)
        ) == pytest.approx(err)

    def test_dimension_guards(self):
        with pytest.raises(DimensionError):
            bisc(np.eye(4), 0, 2, seed=0)
        with pytest.raises(DimensionError):
            bisc(np.eye(4), 5, 2, seed=0)

    def test_dense_sample_accuracy(self, bernoulli_dense_run):
        assert bernoulli_dense_run["bisc"].mean_error <= 0.05


class TestNBisc:
    @pytest.mark.parametrize("seed", range(3))
    def test_population_exact_recovery_degree_corrected(self, seed):
        params = corrected_instance(seed)
        result = nbisc(expected_adjacency(params), 2, 3, seed=0)
        assert both_errors(result, params) == (0.0, 0.0)

    def test_agrees_with_bisc_on_plain_population(self):
        params = plain_instance(7)
        omega = expected_adjacency(params)
        a = bisc(omega, 2, 3, seed=0)
        b = nbisc(omega, 2, 3, seed=0)
        assert hamming_error(b.row_labels, a.row_labels) == 0.0
        assert hamming_error(b.col_labels, a.col_labels) == 0.0

    def test_scale_invariance_on_population(self):
        params = corrected_instance(8)
        omega = expected_adjacency(params)
        a = nbisc(omega, 2, 3, seed=2)
        b = nbisc(37.5 * omega, 2, 3, seed=2)
        assert np.array_equal(a.row_labels.labels, b.row_labels.labels)
        assert np.array_equal(a.col_labels.labels, b.col_labels.labels)

    def test_degenerate_rows_reported_and_labeled(self):
        params = plain_instance(9, n_r=30, n_c=40)
        omega = expected_adjacency(params)
        omega[5, :] = 0.0  # dead row node: zero embedding row
        result = nbisc(omega, 2, 3, seed=0)
        assert 6 in result.diagnostics["degenerate_rows"]
        assert len(result.row_labels) == 30  # still labeled

    def test_dominates_bisc_under_degree_correction(self):
        config = preset(
            "sim1b", replicates=50, rho_grid=(1.0,), algorithms=("bisc", "nbisc")
        )
        points = {p.algorithm: p for p in run_simulation(config).points}
        gap = points["bisc"].mean_error - points["nbisc"].mean_error
        assert gap > 0, (points["bisc"].mean_error, points["nbisc"].mean_error)


class TestDisim:
    def test_constant_matrix_single_cluster(self):
        result = disim(np.ones((4, 4)), 1, 1, regularizer="auto", seed=0)
        assert set(result.row_labels.labels) == {1}
        assert set(result.col_labels.labels) == {1}

    def test_negative_entries_rejected(self):
        with pytest.raises(DomainError):
            disim(np.array([[1.0, -0.5], [0.2, 0.3]]), 1, 2, seed=0)

    def test_records_regularizers(self):
        a = np.random.default_rng(1).uniform(size=(12, 15))
        result = disim(a, 2, 3, regularizer=0.5, seed=0)
        assert result.diagnostics["regularizers"] == (0.5, 0.5)

    def test_comparable_with_nbisc_on_dense_bernoulli(self, bernoulli_dense_run):
        gap = abs(
            bernoulli_dense_run["disim"].mean_error
            - bernoulli_dense_run["nbisc"].mean_error
        )
        assert gap <= 0.05


class TestDScore:
    def test_population_exact_recovery(self):
        params = corrected_instance(11, p=P2)
        result = dscore(expected_adjacency(params), 2, 3, seed=0)
        assert both_errors(result, params) == (0.0, 0.0)

    def test_requires_two_clusters(self):
        with pytest.raises(UnsupportedError):
            dscore(np.ones((5, 5)), 1, 3, seed=0)
        with pytest.raises(UnsupportedError):
            rdscore(np.ones((5, 5)), 1, 1, seed=0)

    def test_constant_leading_column_never_clips(self):
        u = np.column_stack([np.full(16, 0.25), np.linspace(-0.3, 0.3, 16)])
        ratios = _ratio_matrix(u, "auto")
        assert np.all(np.isfinite(ratios))
        assert np.abs(ratios).max() < np.log(16)

    def test_vanishing_leading_entry_saturates(self):
        u = np.array([[0.0, 0.5], [0.5, 0.25], [0.0, 0.0]])
        ratios = _ratio_matrix(u, "auto")
        t = np.log(3)
        assert ratios[0, 0] == pytest.approx(t)
        assert ratios[1, 0] == pytest.approx(0.5)
        assert ratios[2, 0] == 0.0

    def test_comparable_with_rdscore_on_dense_bernoulli(self, bernoulli_dense_run):
        gap = abs(
            bernoulli_dense_run["rdscore"].mean_error
            - bernoulli_dense_run["dscore"].mean_error
        )
        assert gap <= 0.05


class TestShiftNonnegative:
    def test_symmetric_range(self):
        a = np.array([[-1.0, 1.0]])
        shifted, shift = shift_nonnegative(a)
        assert shift == pytest.approx(1.02)
        assert shifted.min() == pytest.approx(0.02)

    def test_noop_when_nonnegative(self):
        a = np.array([[0.0, 2.0], [1.0, 3.0]])
        shifted, shift = shift_nonnegative(a)
        assert shift == 0.0
        assert np.array_equal(shifted, a)

    def test_constant_negative(self):
        shifted, shift = shift_nonnegative(np.full((2, 2), -3.0))
        assert shift == pytest.approx(3.01)
        assert np.all(shifted == pytest.approx(0.01))
