"""Eigenvalue machinery for the sector blocks.

Three routes, each matched to where it is used:

* real coupling: LAPACK's symmetric-tridiagonal solver (implicit-shift
  QL/QR family) through scipy, O(dim) storage, handles dim ~ 10^4;
* complex coupling: dense Hessenberg QR (LAPACK zgeev) on the block;
  branch-point searches never exceed dim ~ 100, so dense is fine;
* characteristic determinant: a three-term recurrence with power-of-two
  rescaling, differentiated simultaneously with respect to the energy
  and the coupling.  This is what the branch-point Newton solver runs
  on -- raw determinants overflow near dim ~ 10^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .core import (
    Parity,
    ParitySector,
    TridiagonalBlock,
    ladder_couplings,
    sector_basis,
)

def _lex_sort(w: np.ndarray) -> np.ndarray:
    """Sort complex values by (real, imag) -- the deterministic output order."""
    return w[np.lexsort((w.imag, w.real))]


class SolverError(RuntimeError):
    """An eigenvalue iteration failed to converge."""


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues (and optionally vectors) of one sector block."""

    values: np.ndarray = field(repr=False)
    vectors: np.ndarray | None = field(repr=False)
    sector: ParitySector
    coupling: complex

    @property
    def dimension(self) -> int:
        return len(self.values)


def eig_real_tridiag(block: TridiagonalBlock, want_vectors: bool = False) -> EigenResult:
    """All eigenvalues of a real-coupling block, ascending.

    Vectors, when requested, come back column-aligned with the values
    and orthonormal.
    """
    if not block.is_real:
        raise ValueError("block has complex coupling; use eig_complex_tridiag")
    d = block.diag
    e = np.asarray(block.offdiag, dtype=float)
    if block.dimension == 1:
        values = d.copy()
        vectors = np.ones((1, 1)) if want_vectors else None
    elif want_vectors:
        values, vectors = scipy.linalg.eigh_tridiagonal(d, e)
    else:
        values = scipy.linalg.eigh_tridiagonal(d, e, eigvals_only=True)
        vectors = None
    return EigenResult(values, vectors, block.sector, block.coupling)


def dense_from_block(block: TridiagonalBlock) -> np.ndarray:
    """Materialize the (small) dense matrix of a sector block."""
    a = np.diag(block.diag.astype(block.offdiag.dtype if block.dimension > 1
                                  else complex))
    if block.dimension > 1:
        a += np.diag(block.offdiag, 1) + np.diag(block.offdiag, -1)
    return a


def eig_complex_tridiag(block: TridiagonalBlock) -> EigenResult:
    """All eigenvalues of a complex-symmetric block.

    Sorted lexicographically (real part, then imaginary part) so output
    is deterministic; the order carries no physical meaning.
    """
    a = dense_from_block(block).astype(complex)
    try:
        values = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise SolverError(
            f"complex QR iteration did not converge (dim={block.dimension}, "
            f"coupling={block.coupling})"
        ) from exc
    return EigenResult(_lex_sort(values), None, block.sector, block.coupling)


@dataclass(frozen=True)
class DetValue:
    """det(H - E) in scaled form: value = mantissa * 2**exponent.

    The E-derivative shares the exponent.  |mantissa| is kept in
    [0.5, 2) unless the determinant is exactly zero.
    """

    mantissa: complex
    exponent: int
    derivative_mantissa: complex

    @property
    def log2_magnitude(self) -> float:
        if self.mantissa == 0:
            return -math.inf
        return math.log2(abs(self.mantissa)) + self.exponent

    @property
    def log2_derivative_magnitude(self) -> float:
        if self.derivative_mantissa == 0:
            return -math.inf
        return math.log2(abs(self.derivative_mantissa)) + self.exponent


class _DetState(NamedTuple):
    """Scaled determinant and its partials at one (E, g) point.

    All mantissas share `exponent`; d2e_dg is the mixed E,g partial.
    """

    det: complex
    d_e: complex
    d_ee: complex
    d_g: complex
    d_eg: complex
    exponent: int


def _det_derivatives(diag: np.ndarray, factors: np.ndarray, g: complex,
                     energy: complex) -> _DetState:
    """Run the differentiated three-term recurrence with shared rescaling.

    D_i = (d_i - E) D_{i-1} - o_{i-1}^2 D_{i-2}, with o = g * factors;
    the four partial-derivative sequences ride along.  Every step the
    whole state is renormalized by a power of two keyed to |D_i|.
    """
    n = len(diag)
    d0, d1 = 1.0 + 0.0j, complex(diag[0]) - energy
    e0, e1 = 0.0j, -1.0 + 0.0j
    f0, f1 = 0.0j, 0.0j
    g0, g1 = 0.0j, 0.0j
    m0, m1 = 0.0j, 0.0j
    ex = 0
    for i in range(1, n):
        a = complex(diag[i]) - energy
        o2 = (g * factors[i - 1]) ** 2
        do2 = 2.0 * g * factors[i - 1] ** 2
        d2 = a * d1 - o2 * d0
        e2 = -d1 + a * e1 - o2 * e0
        f2 = -2.0 * e1 + a * f1 - o2 * f0
        g2 = a * g1 - o2 * g0 - do2 * d0
        m2 = -g1 + a * m1 - o2 * m0 - do2 * e0
        d0, d1 = d1, d2
        e0, e1 = e1, e2
        f0, f1 = f1, f2
        g0, g1 = g1, g2
        m0, m1 = m1, m2
        mag = abs(d1)
        if mag != 0.0:
            k = math.frexp(mag)[1]
            if abs(k) > 16:
                s = math.ldexp(1.0, -k)
                d0 *= s; d1 *= s
                e0 *= s; e1 *= s
                f0 *= s; f1 *= s
                g0 *= s; g1 *= s
                m0 *= s; m1 *= s
                ex += k
    return _DetState(d1, e1, f1, g1, m1, ex)


def _block_det_inputs(block: TridiagonalBlock) -> tuple[np.ndarray, np.ndarray, complex]:
    factors = ladder_couplings(block.n_particles, block.sector.parity)
    return block.diag, factors, complex(block.coupling)


def charpoly_det(block: TridiagonalBlock, energy: complex) -> DetValue:
    """det(block - E I) and its E-derivative, overflow-safe.

    The final mantissa is renormalized into [0.5, 2); the derivative
    mantissa keeps the same exponent so ratios stay meaningful.
    """
    diag, factors, g = _block_det_inputs(block)
    st = _det_derivatives(diag, factors, g, complex(energy))
    det, d_e, ex = st.det, st.d_e, st.exponent
    if det != 0:
        k = math.frexp(abs(det))[1] - 1
        s = math.ldexp(1.0, -k)
        det *= s
        d_e *= s
        ex += k
    return DetValue(det, ex, d_e)


def det_state(block: TridiagonalBlock, energy: complex) -> _DetState:
    """Full derivative bundle at (E, coupling); used by the EP solver."""
    diag, factors, g = _block_det_inputs(block)
    return _det_derivatives(diag, factors, g, complex(energy))


def det_state_at(n_particles: int, parity: Parity, coupling: complex,
                 energy: complex) -> _DetState:
    """Same as det_state without materializing a block (solver hot path)."""
    diag = sector_basis(n_particles, parity)
    factors = ladder_couplings(n_particles, parity)
    return _det_derivatives(diag, factors, complex(coupling), complex(energy))
