"""Independent oracles and small fixtures shared across the test suite."""

import numpy as np


class QuadComponent:
    """Smooth quadratic g(x) = 0.5 x^T A x + b^T x + c with exact Hessian A."""

    def __init__(self, A, b, c=0.0):
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.c = float(c)
        self.p = len(self.b)
        self.penalty_mask = np.ones(self.p, dtype=bool)

    def value_grad(self, x):
        Ax = self.A @ x
        return 0.5 * float(x @ Ax) + float(self.b @ x) + self.c, Ax + self.b

    def value(self, x):
        return self.value_grad(x)[0]

    def grad(self, x):
        return self.value_grad(x)[1]


def random_pd_quadratic(rng, p, cond=10.0):
    """Random symmetric PD matrix with eigenvalues in [1, cond], plus a linear term."""
    Q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    eigs = np.exp(rng.uniform(0.0, np.log(cond), p))
    A = (Q * eigs) @ Q.T
    b = rng.standard_normal(p)
    return 0.5 * (A + A.T), b


def fd_gradient(f, x, step_scale=1e-5):
    """Central finite differences with per-coordinate step step_scale*(1+|x_j|)."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for j in range(len(x)):
        h = step_scale * (1.0 + abs(x[j]))
        e = np.zeros_like(x)
        e[j] = h
        grad[j] = (f(x + e) - f(x - e)) / (2.0 * h)
    return grad


def grad_close(analytic, numeric, tol):
    return np.linalg.norm(analytic - numeric) <= tol * max(1.0, np.linalg.norm(numeric))


def cd_lasso(A, b, lam, tol=1e-10, max_sweeps=20000):
    """Cyclic coordinate descent for min 0.5 x^T A x + b^T x + lam * ||x||_1.

    Independent of the prox-gradient path; sweeps until the largest coordinate
    move is below tol.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    p = len(b)
    x = np.zeros(p)
    Ax = np.zeros(p)
    for _ in range(max_sweeps):
        biggest = 0.0
        for j in range(p):
            # partial derivative at x_j = 0 of the smooth part
            rj = Ax[j] - A[j, j] * x[j] + b[j]
            new = np.sign(-rj) * max(abs(rj) - lam, 0.0) / A[j, j]
            delta = new - x[j]
            if delta != 0.0:
                Ax += A[:, j] * delta
                x[j] = new
                biggest = max(biggest, abs(delta))
        if biggest < tol:
            break
    return x


def lasso_objective(A, b, lam, x):
    return 0.5 * float(x @ (A @ x)) + float(b @ x) + lam * float(np.abs(x).sum())


def fista_reference(components, lam2, L, iters=3000, x0=None):
    """Accelerated proximal-gradient reference minimizer for
    mean_i g_i(x) + lam2 * ||x_mask||_1, used as an independent f* oracle."""
    p = components[0].p
    mask = components[0].penalty_mask
    x = np.zeros(p) if x0 is None else np.array(x0, dtype=float)
    z = x.copy()
    t = 1.0

    def grad(v):
        return np.mean([c.grad(v) for c in components], axis=0)

    def shrink(v, eps):
        out = np.array(v, dtype=float)
        out[mask] = np.sign(v[mask]) * np.maximum(np.abs(v[mask]) - eps, 0.0)
        return out

    for _ in range(iters):
        x_new = shrink(z - grad(z) / L, lam2 / L)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, t = x_new, t_new
    return x


def prox_min_oracle(x, eps, iters=100):
    """Vectorized 1-D oracle for argmin_z 0.5 (z - x)^2 + eps |z|.

    Bisects the sign change of the (sub)gradient z - x + eps * sign(z), which
    is nondecreasing in z; independent of the closed-form shrink formula.
    (Pure value-comparison search bottoms out near sqrt(machine eps), too
    coarse for the 1e-10 agreement check.)
    """
    x = np.asarray(x, dtype=float)
    lo = -np.abs(x) - eps - 1.0
    hi = np.abs(x) + eps + 1.0

    def g(z):
        return z - x + eps * np.sign(z)

    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        neg = g(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)
