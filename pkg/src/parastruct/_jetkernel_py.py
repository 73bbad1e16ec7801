"""Pure-Python (numpy) jet kernels; same contract as the compiled ``_jetkernel``.

Buffers are flat float64 arrays of shape ``(n+1,) * depth`` in C order, axis 0
being the outermost level.
"""

import numpy as np


def _bmul(a, b, d, n1):
    # Batched product of depth-d jets stored as rows; a and b broadcast on axis 0.
    if d == 0:
        return a * b
    s = n1 ** (d - 1)
    a3 = a.reshape(a.shape[0], n1, s)
    b3 = b.reshape(b.shape[0], n1, s)
    batch = max(a3.shape[0], b3.shape[0])
    a3 = np.broadcast_to(a3, (batch, n1, s))
    b3 = np.broadcast_to(b3, (batch, n1, s))
    a0 = a3[:, :1, :]
    b0 = b3[:, :1, :]
    # out_0 = a0 b0 ; out_i = a0 b_i + a_i b0, evaluated as one batch
    lhs = np.concatenate([np.broadcast_to(a0, (batch, n1, s)), a3[:, 1:, :]], axis=1)
    rhs = np.concatenate([b3, np.broadcast_to(b0, (batch, n1 - 1, s))], axis=1)
    prod = _bmul(lhs.reshape(-1, s), rhs.reshape(-1, s), d - 1, n1)
    prod = prod.reshape(batch, 2 * n1 - 1, s)
    out = prod[:, :n1, :].copy()
    out[:, 1:, :] += prod[:, n1:, :]
    return out.reshape(batch, n1 * s)


def mul(a, da, b, db, n):
    """Product of two jets; result has depth ``max(da, db)``."""
    n1 = n + 1
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if da < db:
        a, da, b, db = b, db, a, da
    # a is the deeper operand; every depth-db block of a multiplies b
    rows = a.reshape(-1, n1 ** db)
    out = _bmul(rows, b.reshape(1, -1), db, n1)
    return out.reshape(-1)


def compose(x, d, taylor, n):
    """Evaluate ``sum_m taylor[m] * (x - x0)**m`` on a depth-``d`` jet."""
    x = np.asarray(x, dtype=float)
    order = min(len(taylor) - 1, d)
    if d == 0 or order == 0:
        out = np.zeros(x.shape[0])
        out[0] = taylor[0]
        return out
    delta = x.copy()
    delta[0] = 0.0
    r = np.zeros_like(delta)
    r[0] = taylor[order]
    for m in range(order - 1, -1, -1):
        r = mul(r, d, delta, d, n)
        r[0] += taylor[m]
    return r
