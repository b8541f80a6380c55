"""First-principles dense oracles, independent of the package's
tridiagonal construction.

Everything here is built from the elementary ladder action
J+|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1> on the full (N+1)-dimensional
multiplet, then squared and projected.  Deliberately dense and slow.
"""

import numpy as np


def full_m_grid(n):
    j = n / 2.0
    return np.arange(-j, j + 0.5, 1.0)


def dense_ladder_plus(n):
    """Dense J+ on the full multiplet, basis ordered by ascending m."""
    j = n / 2.0
    m = full_m_grid(n)
    a = np.zeros((n + 1, n + 1))
    for i in range(n):
        a[i + 1, i] = np.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
    return a


def dense_hamiltonian(n, coupling):
    """J_z + coupling/(2N) (J+^2 + J-^2), dense on the full multiplet."""
    jp = dense_ladder_plus(n).astype(complex)
    jm = jp.T.copy()
    h = np.diag(full_m_grid(n)).astype(complex)
    h += coupling / (2.0 * n) * (jp @ jp + jm @ jm)
    if abs(np.asarray(coupling).imag) == 0:
        return h.real
    return h


def sector_indices(n, even):
    """Indices of one step-2 class in the ascending full m-grid."""
    j = n / 2.0
    m = full_m_grid(n)
    cls = np.mod(np.rint(m + j).astype(int), 2)
    return np.where(cls == (0 if even else 1))[0]


def dense_sector_block(n, coupling, even):
    h = dense_hamiltonian(n, coupling)
    idx = sector_indices(n, even)
    return h[np.ix_(idx, idx)]
