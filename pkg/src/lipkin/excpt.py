"""Locating exceptional points (EPs) of the analytically continued
Hamiltonian in the complex coupling plane.

An EP is a square-root branch point where two eigenvalues of one sector
block coalesce with a defective eigenvector.  The solver condition is

    det(H(g) - E) = 0   and   d/dE det(H(g) - E) = 0,

attacked with a two-variable Newton iteration on the rescaled
determinant recurrence (O(dim) per evaluation, stable to dim ~ 10^3,
unlike the characteristic-polynomial discriminant).  Scanning seeds the
Newton solver wherever two eigenvalues of the complex block nearly
coalesce on a grid.

Spectral symmetries used here: eigenvalues come in conjugate pairs
under g -> conj(g), so every EP has a mirror in the lower half-plane
and the canonical representative carries Im g >= 0.  Within a sector
the spectrum is symmetric under E -> -E, so each g* hosts a pair of
EPs at +-E*; they count once per g*, matching how branch points are
plotted and counted per coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import Parity, build_block, sector_basis
from .eigen import SolverError, det_state_at, eig_complex_tridiag, eig_real_tridiag

_DEDUP_RADIUS = 1e-6
_RESIDUAL_LIMIT = 1e-8
_SPURIOUS_IM = 1e-9

#: near-real counting thresholds calibrated against scanned EP families;
#: finite-N EPs sit off the axis (minimum Im g* ~ 1.4 at N=8, ~0.29 at
#: N=32), so "near the real axis" is necessarily an N-dependent notion.
NEAR_REAL_IM_TOL = {8: 1.5, 16: 1.2, 32: 0.8}


def default_im_tol(n_particles: int) -> float:
    """Documented default for the near-real cutoff at a given N."""
    if n_particles in NEAR_REAL_IM_TOL:
        return NEAR_REAL_IM_TOL[n_particles]
    return min(1.5, 3.6 * n_particles ** -0.45)


class EpConvergenceError(RuntimeError):
    """Newton refinement diverged or landed on a spurious point."""


class EpTrackingError(RuntimeError):
    """Eigenvalue-pair tracking toward the real axis became ambiguous."""


@dataclass(frozen=True)
class ExceptionalPoint:
    """A refined branch point of one sector.

    residual is max(|det|, |d_E det|) at the solution, normalized by the
    same quantities a distance 0.01 away in the coupling; pair holds the
    1-based sector indices of the coalescing levels once identified.
    """

    lambda_star: complex
    energy_star: complex
    sector: Parity
    n_particles: int
    residual: float
    pair: tuple[int, int] | None = None

    @property
    def scaled_energy(self) -> complex:
        return 2.0 * self.energy_star / self.n_particles


def _residual_certificate(n: int, parity: Parity, g: complex,
                          energy: complex) -> float:
    """Drop of |det| and |d_E det| relative to a point 0.01 away in g."""
    here = det_state_at(n, parity, g, energy)
    there = det_state_at(n, parity, g + 0.01, energy)

    def log2mag(z: complex, ex: int) -> float:
        return math.log2(abs(z)) + ex if z != 0 else -math.inf

    def ratio(num: float, den: float) -> float:
        if num == -math.inf:
            return 0.0  # exactly zero at the solution
        if den == -math.inf:
            return math.inf  # reference degenerate but solution is not
        d = num - den
        return 2.0 ** d if d < 1000 else math.inf

    worst = max(
        ratio(log2mag(here.det, here.exponent),
              log2mag(there.det, there.exponent)),
        ratio(log2mag(here.d_e, here.exponent),
              log2mag(there.d_e, there.exponent)),
    )
    return worst


def ep_refine(n_particles: int, sector: Parity, lambda_seed: complex,
              energy_seed: complex, max_iter: int = 80) -> ExceptionalPoint:
    """Newton-refine a branch-point candidate.

    Solves (det, d_E det) = (0, 0) in the two complex unknowns (E, g)
    with the analytic Jacobian from the differentiated recurrence.  The
    shared power-of-two exponent cancels inside the 2x2 solve.  Output
    is canonicalized to Im g* >= 0.
    """
    g = complex(lambda_seed)
    energy = complex(energy_seed)
    if not (math.isfinite(g.real) and math.isfinite(g.imag)
            and math.isfinite(energy.real) and math.isfinite(energy.imag)):
        raise EpConvergenceError("seeds must be finite")
    converged = False
    for _ in range(max_iter):
        st = det_state_at(n_particles, sector, g, energy)
        jac = np.array([[st.d_e, st.d_g], [st.d_ee, st.d_eg]])
        rhs = np.array([st.det, st.d_e])
        try:
            step = np.linalg.solve(jac, -rhs)
        except np.linalg.LinAlgError as exc:
            raise EpConvergenceError(
                f"singular Newton system at g={g}, E={energy}"
            ) from exc
        # cap wild early steps so seeds on a shallow gap basin stay local
        cap = 0.5 * (1.0 + abs(g))
        size = max(abs(step[0]), abs(step[1]))
        if size > cap:
            step *= cap / size
        energy += step[0]
        g += step[1]
        if (abs(step[0]) <= 1e-13 * max(1.0, abs(energy))
                and abs(step[1]) <= 1e-13 * max(1.0, abs(g))):
            converged = True
            break
    if not converged:
        raise EpConvergenceError(
            f"no convergence in {max_iter} iterations from seed "
            f"g={lambda_seed}, E={energy_seed}"
        )
    if abs(g.imag) < _SPURIOUS_IM:
        raise EpConvergenceError(
            f"converged to real coupling g={g}: a real symmetric block has "
            "no defective eigenvalues, rejecting as spurious"
        )
    residual = _residual_certificate(n_particles, sector, g, energy)
    if not residual <= _RESIDUAL_LIMIT:
        raise EpConvergenceError(
            f"stationary point at g={g} fails the residual certificate "
            f"({residual:.3e} > {_RESIDUAL_LIMIT:.0e})"
        )
    if g.imag < 0:
        g = g.conjugate()
        energy = energy.conjugate()
    return ExceptionalPoint(g, energy, sector, n_particles, residual)


def _min_gap_pair(values: np.ndarray) -> tuple[float, complex]:
    """Smallest pairwise distance among complex eigenvalues and the
    midpoint of the closest pair."""
    d = np.abs(values[:, None] - values[None, :])
    d[np.diag_indices_from(d)] = np.inf
    i, j = np.unravel_index(np.argmin(d), d.shape)
    return float(d[i, j]), 0.5 * (values[i] + values[j])


def ep_scan(n_particles: int, sector: Parity,
            region: tuple[float, float, float, float],
            grid: tuple[int, int] | int = 60,
            identify_pairs: bool = False) -> list[ExceptionalPoint]:
    """Find the EPs of one sector inside a rectangle of the upper
    half coupling plane.

    region is (re_min, re_max, im_min, im_max) with im_min >= 0.  The
    rectangle is tiled into grid cells; at each cell center the complex
    spectrum is computed and cells where the two closest eigenvalues dip
    to a local minimum seed the Newton refinement.  Cell centers carry
    strictly positive imaginary part, which matters: a Newton iterate
    seeded exactly on the real axis could never leave it.  Results are
    deduplicated (1e-6 in g) and sorted by (Re g*, Im g*).
    """
    re0, re1, im0, im1 = map(float, region)
    if im0 < 0:
        raise ValueError("region must lie in the closed upper half-plane")
    if isinstance(grid, int):
        nx = ny = grid
    else:
        nx, ny = grid
    xs = re0 + (np.arange(nx) + 0.5) * (re1 - re0) / nx
    ys = im0 + (np.arange(ny) + 0.5) * (im1 - im0) / ny
    gap = np.full((ny, nx), np.inf)
    mid = np.zeros((ny, nx), dtype=complex)
    for iy, b in enumerate(ys):
        for ix, a in enumerate(xs):
            block = build_block(n_particles, a + 1j * b, sector)
            try:
                w = eig_complex_tridiag(block).values
            except SolverError:
                continue
            if len(w) < 2:
                continue
            gap[iy, ix], mid[iy, ix] = _min_gap_pair(w)

    found: list[ExceptionalPoint] = []
    pad = 0.02 * max(re1 - re0, im1 - im0)
    for iy in range(ny):
        for ix in range(nx):
            g = gap[iy, ix]
            if not np.isfinite(g):
                continue
            neighborhood = gap[max(0, iy - 1):iy + 2, max(0, ix - 1):ix + 2]
            if g > neighborhood.min():
                continue
            try:
                ep = ep_refine(n_particles, sector, xs[ix] + 1j * ys[iy],
                               mid[iy, ix])
            except EpConvergenceError:
                continue
            lam = ep.lambda_star
            if not (re0 - pad <= lam.real <= re1 + pad
                    and lam.imag <= im1 + pad):
                continue
            if any(abs(prev.lambda_star - lam) < _DEDUP_RADIUS
                   for prev in found):
                continue
            found.append(ep)
    found.sort(key=lambda e: (e.lambda_star.real, e.lambda_star.imag))
    if identify_pairs:
        labelled = []
        for ep in found:
            try:
                labelled.append(replace(ep, pair=ep_pair_id(ep)))
            except EpTrackingError:
                labelled.append(ep)
        found = labelled
    return found


def _track_pair(n: int, sector: Parity, lam: complex, energy: complex,
                steps: int, ratio: float) -> np.ndarray:
    """Follow the two coalescing eigenvalues while Im g shrinks
    geometrically, matching by distance to the previous pair."""
    current = None
    for t in range(1, steps + 1):
        g = lam.real + 1j * lam.imag * ratio ** t
        block = build_block(n, g, sector)
        w = eig_complex_tridiag(block).values
        if current is None:
            order = np.argsort(np.abs(w - energy))
            idx = [int(order[0]), int(order[1])]
        else:
            d0 = np.abs(w - current[0])
            d1 = np.abs(w - current[1])
            i0, i1 = int(np.argmin(d0)), int(np.argmin(d1))
            if i0 == i1:
                if d0[i0] <= d1[i1]:
                    d1[i0] = np.inf
                    i1 = int(np.argmin(d1))
                else:
                    d0[i1] = np.inf
                    i0 = int(np.argmin(d0))
            idx = [i0, i1]
        current = w[idx]
    return current


def ep_pair_id(ep: ExceptionalPoint, steps: int = 60,
               ratio: float = 0.5) -> tuple[int, int]:
    """Identify which two sector levels an EP connects.

    Walks the coupling from g* straight down to the real axis, halving
    Im g each step (at least 40 steps) and tracking the two
    nearly-degenerate eigenvalues by continuity; the endpoints are then
    matched against the real sector spectrum at Re g*.  EPs with
    Re E* > 0 are folded to their E -> -E mirror first so the reported
    pair always sits in the lower half of the spectrum.  If the tracked
    endpoints are not adjacent levels the walk is retried with a finer
    step before giving up.
    """
    steps = max(40, steps)
    energy = ep.energy_star
    if energy.real > 0:
        energy = -energy
    real_block = build_block(ep.n_particles, ep.lambda_star.real, ep.sector)
    real_levels = eig_real_tridiag(real_block).values
    for n_steps, r in [(steps, ratio), (3 * steps, math.sqrt(ratio))]:
        tracked = _track_pair(ep.n_particles, ep.sector, ep.lambda_star,
                              energy, n_steps, r)
        ks = sorted(int(np.argmin(np.abs(real_levels - t.real)))
                    for t in tracked)
        if ks[1] == ks[0] + 1:
            return ks[0] + 1, ks[1] + 1
    raise EpTrackingError(
        f"tracked endpoints map to non-adjacent levels {ks} for EP at "
        f"g*={ep.lambda_star}; another branch point probably sits on the path"
    )


def near_real_ep_count(n_particles: int, lambda_max: float,
                       im_tol: float | None = None,
                       grid_per_unit: int = 90) -> int:
    """Count EPs accumulating along the real axis in (1, lambda_max).

    Both sectors are scanned and combined; conjugate mirrors (and the
    +-E* partners at one g*) are implicit in the per-coupling dedup, so
    each branch coupling counts once.  im_tol defaults to the calibrated
    per-N value from NEAR_REAL_IM_TOL; there is no N-independent notion
    of "near" at finite N, so the cutoff is an explicit caller choice.
    """
    if lambda_max <= 1.0:
        raise ValueError("lambda_max must exceed 1")
    tol = default_im_tol(n_particles) if im_tol is None else float(im_tol)
    height = tol * 1.05
    nx = max(40, int(round(grid_per_unit * (lambda_max - 1.0))))
    ny = max(24, int(round(grid_per_unit * height)))
    lam_values: list[complex] = []
    for sector in (Parity.EVEN, Parity.ODD):
        if len(sector_basis(n_particles, sector)) < 2:
            continue
        eps = ep_scan(n_particles, sector, (1.0, lambda_max, 0.0, height),
                      (nx, ny))
        lam_values.extend(ep.lambda_star for ep in eps)
    count = 0
    seen: list[complex] = []
    for lam in sorted(lam_values, key=lambda z: (z.real, z.imag)):
        if not (1.0 < lam.real < lambda_max and abs(lam.imag) < tol):
            continue
        if any(abs(lam - s) < _DEDUP_RADIUS for s in seen):
            continue
        seen.append(lam)
        count += 1
    return count
