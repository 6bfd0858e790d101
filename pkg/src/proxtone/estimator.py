"""Scikit-learn style front end for the sparse logistic trainers."""

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .datasets import LabeledDataset, partition
from .harness import estimate_lipschitz, parse_hessian
from .objectives import LogisticComponent
from .optimizers import Proxtone, ProxSAG, ProxSGD, ProxtonePlus
from .prox import RegularizerConfig, nnz
from .subproblem import SubproblemConfig


class SparseLogisticClassifier(BaseEstimator, ClassifierMixin):
    """Binary L1+L2 regularized logistic regression trained by a PROXTONE-family
    optimizer. Produces exactly sparse coefficient vectors.

    Parameters mirror the benchmark CLI; see the module docstrings for the
    individual optimizers.
    """

    def __init__(self, optimizer="proxtone", lambda1=1e-4, lambda2=1e-4,
                 n_batches=10, epochs=50, seed=0, hessian="lbfgs",
                 max_history=20, sub_max_iter=100, sub_abstol=1e-5,
                 eta=0.1, lipschitz=None, switch_epoch=5, subspace_qmax=0):
        self.optimizer = optimizer
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.n_batches = n_batches
        self.epochs = epochs
        self.seed = seed
        self.hessian = hessian
        self.max_history = max_history
        self.sub_max_iter = sub_max_iter
        self.sub_abstol = sub_abstol
        self.eta = eta
        self.lipschitz = lipschitz
        self.switch_epoch = switch_epoch
        self.subspace_qmax = subspace_qmax

    def _build_optimizer(self, components, reg, x0, dataset):
        sub_config = SubproblemConfig(
            max_iter=self.sub_max_iter, abstol=self.sub_abstol,
            penalty_mask=components[0].penalty_mask,
        )
        if self.optimizer == "proxsgd":
            return ProxSGD(components, reg, x0, self.eta, seed=self.seed)
        L = self.lipschitz
        if L is None:
            L = estimate_lipschitz(dataset, self.lambda1)
        if self.optimizer == "proxsag":
            return ProxSAG(components, reg, x0, L, seed=self.seed)
        if self.optimizer == "proxtone":
            return Proxtone(
                components, reg, x0, hessian=parse_hessian(self.hessian),
                max_history=self.max_history, sub_config=sub_config,
                inexact=self.sub_max_iter == 1,
                subspace_qmax=self.subspace_qmax, seed=self.seed,
            )
        if self.optimizer == "proxtone-plus":
            return ProxtonePlus(
                components, reg, x0, self.switch_epoch, L, seed=self.seed,
                hessian=parse_hessian(self.hessian), max_history=self.max_history,
                sub_config=sub_config, subspace_qmax=self.subspace_qmax,
            )
        raise ValueError(f"unknown optimizer {self.optimizer!r}")

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_ = unique_labels(y)
        if len(self.classes_) != 2:
            raise ValueError("binary classification only")
        labels = np.where(y == self.classes_[1], 1.0, -1.0)
        dataset = LabeledDataset(X, labels)
        n = min(self.n_batches, dataset.sample_count)
        part = partition(dataset, n, self.seed)
        components = [
            LogisticComponent(dataset, b, self.lambda1) for b in part.batch_assignments
        ]
        reg = RegularizerConfig(self.lambda1, self.lambda2)
        x0 = np.zeros(dataset.p)
        opt = self._build_optimizer(components, reg, x0, dataset)
        for _ in range(self.epochs * n):
            opt.step()
        self.coef_ = opt.x
        self.n_features_in_ = dataset.p
        self.sparsity_ = nnz(self.coef_)
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ self.coef_

    def predict(self, X):
        scores = self.decision_function(X)
        return np.where(scores >= 0, self.classes_[1], self.classes_[0])

    def predict_proba(self, X):
        pos = expit(self.decision_function(X))
        return np.column_stack([1.0 - pos, pos])
