import numpy as np
import pytest

from helpers import prox_min_oracle
from proxtone.prox import RegularizerConfig, l1_norm, nnz, soft_threshold


def test_soft_threshold_branches():
    assert soft_threshold([1.2], 0.5) == pytest.approx([0.7])
    assert soft_threshold([-0.2], 0.3)[0] == 0.0
    assert soft_threshold([-3.0], 1.0) == pytest.approx([-2.0])


def test_soft_threshold_band_is_exact_zero():
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.5, 0.5, 1000)
    out = soft_threshold(x, 0.5)
    assert np.all(out == 0.0)


def test_soft_threshold_zero_eps_identity():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(1000) * 10
    assert np.array_equal(soft_threshold(x, 0.0), x)


def test_soft_threshold_contraction():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        a = rng.standard_normal(5) * 3
        b = rng.standard_normal(5) * 3
        eps = rng.uniform(0, 2)
        d = np.linalg.norm(soft_threshold(a, eps) - soft_threshold(b, eps))
        assert d <= np.linalg.norm(a - b) + 1e-12


def test_soft_threshold_matches_prox_oracle():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(1000) * 4
    eps = rng.uniform(0, 3)
    z_star = prox_min_oracle(x, eps)
    assert np.max(np.abs(soft_threshold(x, eps) - z_star)) <= 1e-10


def test_soft_threshold_shrinks_l1():
    rng = np.random.default_rng(4)
    for _ in range(200):
        x = rng.standard_normal(8) * 2
        eps = rng.uniform(0, 1)
        assert l1_norm(soft_threshold(x, eps)) <= l1_norm(x) + 1e-12


def test_soft_threshold_rejects_nonfinite():
    with pytest.raises(ValueError, match="index 1"):
        soft_threshold([1.0, np.nan, 2.0], 0.1)
    with pytest.raises(ValueError):
        soft_threshold([np.inf], 0.1)


def test_soft_threshold_rejects_negative_eps():
    with pytest.raises(ValueError):
        soft_threshold([1.0], -0.1)


def test_l1_norm():
    assert l1_norm([0, 0, 0]) == 0.0
    assert l1_norm([1, -2, 3]) == 6.0
    assert l1_norm([-0.5]) == 0.5
    with pytest.raises(ValueError):
        l1_norm([np.nan])


def test_nnz():
    assert nnz([0, 1e-12, 2], tau=0.0) == 2
    assert nnz([0, 1e-12, 2], tau=1e-8) == 1
    assert nnz(soft_threshold([0.1, 0.2, 5.0], 0.3), tau=0.0) == 1
    with pytest.raises(ValueError):
        nnz([1.0], tau=-1.0)


def test_regularizer_config_validation():
    RegularizerConfig(0.0, 0.0)
    with pytest.raises(ValueError):
        RegularizerConfig(-1e-4, 1e-4)
    with pytest.raises(ValueError):
        RegularizerConfig(1e-4, -1e-4)
