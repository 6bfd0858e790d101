"""Smooth mini-batch components of the composite objective.

Each component exposes value(x), grad(x), value_grad(x), a dimension p and a
penalty_mask marking the coordinates subject to the L1 term (weights yes,
biases no). The L2 coefficient lambda1 is folded into the smooth part; the L1
coefficient lambda2 stays in the prox.
"""

import numpy as np
from scipy.special import expit

from .prox import l1_norm


class LogisticComponent:
    """Mean logistic loss over one mini-batch plus lambda1 * ||x||_2^2."""

    def __init__(self, dataset, batch, lambda1):
        self.batch = np.asarray(batch, dtype=int)
        if len(self.batch) == 0:
            raise ValueError("empty batch")
        self.lambda1 = float(lambda1)
        self.p = dataset.p
        # rows pre-scaled by the label: b_i * a_i
        self._ba = dataset.features[self.batch] * dataset.labels[self.batch, None]
        self.penalty_mask = np.ones(self.p, dtype=bool)

    def value_grad(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.p,):
            raise ValueError(f"expected dimension {self.p}, got {x.shape}")
        z = self._ba @ x
        value = float(np.mean(np.logaddexp(0.0, -z))) + self.lambda1 * float(x @ x)
        # d/dx mean log(1+exp(-z)) = -(1/m) ba^T sigmoid(-z)
        grad = -(self._ba.T @ expit(-z)) / len(self.batch) + 2.0 * self.lambda1 * x
        return value, grad

    def value(self, x):
        return self.value_grad(x)[0]

    def grad(self, x):
        return self.value_grad(x)[1]


class MlpComponent:
    """Two-layer sigmoid MLP with softmax output over one mini-batch.

    Parameter layout: flattened [W1 | b1 | W2 | b2] with W1 (d,h), W2 (h,c).
    lambda1 penalizes squared weights only; biases carry no penalty and are
    excluded from the L1 mask as well.
    """

    def __init__(self, dataset, batch, lambda1, hidden):
        self.batch = np.asarray(batch, dtype=int)
        if len(self.batch) == 0:
            raise ValueError("empty batch")
        self.lambda1 = float(lambda1)
        self.d = dataset.p
        self.h = int(hidden)
        self.c = dataset.classes
        self.p = self.d * self.h + self.h + self.h * self.c + self.c
        self._X = dataset.features[self.batch]
        self._y = dataset.labels[self.batch]
        mask = np.zeros(self.p, dtype=bool)
        w1, b1, w2, _ = self._slices()
        mask[w1] = True
        mask[w2] = True
        self.penalty_mask = mask

    def _slices(self):
        d, h, c = self.d, self.h, self.c
        o1 = d * h
        o2 = o1 + h
        o3 = o2 + h * c
        return slice(0, o1), slice(o1, o2), slice(o2, o3), slice(o3, o3 + c)

    def _unpack(self, x):
        s1, s2, s3, s4 = self._slices()
        return (
            x[s1].reshape(self.d, self.h),
            x[s2],
            x[s3].reshape(self.h, self.c),
            x[s4],
        )

    def value_grad(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.p,):
            raise ValueError(f"expected dimension {self.p}, got {x.shape}")
        W1, b1, W2, b2 = self._unpack(x)
        m = len(self.batch)

        with np.errstate(over="ignore", invalid="ignore"):
            return self._value_grad_checked(W1, b1, W2, b2, m)

    def _value_grad_checked(self, W1, b1, W2, b2, m):
        A1 = expit(self._X @ W1 + b1)
        logits = A1 @ W2 + b2
        if not np.all(np.isfinite(logits)):
            raise FloatingPointError("non-finite activations: forward pass diverged")
        shifted = logits - logits.max(axis=1, keepdims=True)
        log_z = np.log(np.exp(shifted).sum(axis=1))
        loss = float(np.mean(log_z - shifted[np.arange(m), self._y]))
        value = loss + self.lambda1 * (float((W1 * W1).sum()) + float((W2 * W2).sum()))

        probs = np.exp(shifted - log_z[:, None])
        delta2 = probs
        delta2[np.arange(m), self._y] -= 1.0
        delta2 /= m
        gW2 = A1.T @ delta2 + 2.0 * self.lambda1 * W2
        gb2 = delta2.sum(axis=0)
        delta1 = (delta2 @ W2.T) * A1 * (1.0 - A1)
        gW1 = self._X.T @ delta1 + 2.0 * self.lambda1 * W1
        gb1 = delta1.sum(axis=0)

        grad = np.concatenate([gW1.ravel(), gb1, gW2.ravel(), gb2])
        if not (np.isfinite(value) and np.all(np.isfinite(grad))):
            raise FloatingPointError("non-finite value or gradient: network diverged")
        return value, grad

    def value(self, x):
        return self.value_grad(x)[0]

    def grad(self, x):
        return self.value_grad(x)[1]


def make_components(dataset, part, lambda1, hidden=None):
    """Build one smooth component per mini-batch of the partition."""
    if hidden is None:
        return [LogisticComponent(dataset, b, lambda1) for b in part.batch_assignments]
    return [MlpComponent(dataset, b, lambda1, hidden) for b in part.batch_assignments]


def full_objective(components, reg, x):
    """(1/n) sum_i g_i(x) + lambda2 * ||x_masked||_1."""
    if not components:
        raise ValueError("empty component list")
    x = np.asarray(x, dtype=float)
    smooth = sum(c.value(x) for c in components) / len(components)
    mask = components[0].penalty_mask
    return smooth + reg.lambda2 * l1_norm(x[mask])
