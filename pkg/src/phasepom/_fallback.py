"""Pure-numpy displacement kernel, vectorised over the batch and all diagonals."""

import numpy as np


def displacement_batch(betas, dim, num_threads=1):
    """Return an array of shape (len(betas), dim, dim) of displacement matrices.

    Same recurrence as the compiled kernel: along diagonal k the normalised
    Laguerre values M_n = L_n^(k)(x) sqrt(n! k!/(n+k)!) obey

        M_{n+1} = ((2n+1+k-x) M_n - sqrt(n(n+k)) M_{n-1}) / sqrt((n+1)(n+1+k)).

    ``num_threads`` is accepted for signature parity and ignored.
    """
    betas = np.asarray(betas, dtype=np.complex128).reshape(-1)
    nb = betas.size
    out = np.zeros((nb, dim, dim), dtype=np.complex128)
    if nb == 0 or dim == 0:
        return out
    x = (betas.real**2 + betas.imag**2)[:, None]
    k = np.arange(dim, dtype=float)
    steps = np.empty((nb, dim), dtype=np.complex128)
    steps[:, 0] = np.exp(-0.5 * x[:, 0])
    steps[:, 1:] = betas[:, None] / np.sqrt(k[1:])
    lower = np.cumprod(steps, axis=1)
    upper = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0) * lower.conj()

    m_prev = np.zeros((nb, dim))
    m_cur = np.ones((nb, dim))
    for n in range(dim):
        width = dim - n
        rows = np.arange(n, dim)
        out[:, rows, n] = lower[:, :width] * m_cur[:, :width]
        out[:, n, rows[1:]] = upper[:, 1:width] * m_cur[:, 1:width]
        if n == 0:
            m_prev, m_cur = m_cur, (1.0 + k - x) / np.sqrt(k + 1.0)
        else:
            m_next = ((2 * n + 1 + k - x) * m_cur - np.sqrt(n * (n + k)) * m_prev) / np.sqrt(
                (n + 1) * (n + 1 + k)
            )
            m_prev, m_cur = m_cur, m_next
    return out
