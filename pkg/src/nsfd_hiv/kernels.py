"""Inner loops of the NSFD scheme.

All kernels operate on a history buffer ``buf`` of shape ``(rows, 4)`` whose
columns are X, Y, V, Z. Row ``k`` holds time index ``n = k - m``, so rows
``0..m`` carry the initial history and row ``m`` is ``n = 0``.

``coef`` is the packed parameter vector produced by
:meth:`nsfd_hiv.model.Parameters.as_array`:
``(lambda, d, beta, a, p, mu, N, c, s, phi)``.
"""
import numpy as np

from ._accel import USE_NUMBA, maybe_njit

__all__ = ["USE_NUMBA", "step_into", "advance", "all_positive"]


@maybe_njit(cache=True, nogil=True)
def step_into(buf, k, m, coef):
    """Write row ``k + 1`` of ``buf`` from rows ``k - m .. k``."""
    lam = coef[0]
    d = coef[1]
    beta = coef[2]
    a = coef[3]
    p = coef[4]
    mu = coef[5]
    big_n = coef[6]
    c = coef[7]
    s = coef[8]
    phi = coef[9]

    x = buf[k, 0]
    y = buf[k, 1]
    v = buf[k, 2]
    z = buf[k, 3]

    x1 = (lam * phi + x) / (1.0 + d * phi + beta * phi * v)
    buf[k + 1, 0] = x1
    # for m == 0 this reads the X just written, as the sequential order requires
    x_lag = buf[k - m + 1, 0]
    v_lag = buf[k - m, 2]
    y1 = (y + beta * phi * x_lag * v_lag) / (1.0 + a * phi + p * phi * z)
    v1 = (v + a * big_n * phi * y1) / (1.0 + mu * phi)
    z1 = (z + c * phi * x * y1 * z) / (1.0 + s * phi)
    buf[k + 1, 1] = y1
    buf[k + 1, 2] = v1
    buf[k + 1, 3] = z1


@maybe_njit(cache=True, nogil=True)
def advance(buf, m, start, stop, coef):
    """Fill rows ``start + 1 .. stop`` of ``buf`` in place."""
    for k in range(start, stop):
        step_into(buf, k, m, coef)


@maybe_njit(cache=True)
def all_positive(buf):
    for k in range(buf.shape[0]):
        for j in range(4):
            if not buf[k, j] > 0.0:
                return False
    return True


def new_buffer(history, steps):
    buf = np.empty((history.shape[0] + steps, 4), dtype=np.float64)
    buf[: history.shape[0]] = history
    return buf
