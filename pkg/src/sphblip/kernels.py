"""Cubic-spline SPH kernel with compact support 2h."""
import math

import numpy as np

SIGMA = {1: 2.0 / 3.0, 2: 10.0 / (7.0 * math.pi)}


def kernel(r, h, dim=1):
    q = np.asarray(r, dtype=float) / h
    a = np.maximum(2.0 - q, 0.0)
    b = np.maximum(1.0 - q, 0.0)
    # 0.25 (2-q)^3 - (1-q)^3 equals 1 - 1.5 q^2 + 0.75 q^3 on q < 1
    return SIGMA[dim] / h**dim * (0.25 * a * a * a - b * b * b)


def kernel_deriv(r, h, dim=1):
    """dW/dr; non-positive everywhere."""
    q = np.asarray(r, dtype=float) / h
    a = np.maximum(2.0 - q, 0.0)
    b = np.maximum(1.0 - q, 0.0)
    return SIGMA[dim] / h ** (dim + 1) * (3.0 * b * b - 0.75 * a * a)


def kernel_grad(dx, h, dim=1):
    """Gradient of W(|dx|, h) with respect to the first particle.

    ``dx`` has shape (..., dim) and is x_a - x_b, so the result is
    antisymmetric under a <-> b.
    """
    dx = np.asarray(dx, dtype=float)
    r = np.sqrt(np.sum(dx * dx, axis=-1))
    safe = np.where(r > 0.0, r, 1.0)
    return (kernel_deriv(r, h, dim) / safe)[..., None] * dx * (r > 0.0)[..., None]
