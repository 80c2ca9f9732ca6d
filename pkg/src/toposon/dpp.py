"""Repulsive point placement from a truncated determinantal kernel.

The kernel is built from the monomial-Gaussian ladder

    phi_k(z) = z^k e^(-|z|^2 / 2) / sqrt(pi k!),   k = 0 .. n_modes - 1,

evaluated after an affine map that centers the target square in the
unit-intensity frame and rescales it so the expected point density
matches ``scale`` points per unit area.  Joint configurations are scored
by the determinant of the kernel Gram matrix; determinants of point sets
with repeated positions vanish, which is what makes the process repel.

``sample_conditional`` runs a Metropolis chain over the free points with
the fixed points clamped, so freshly placed nodes avoid both each other
and the survivors they are conditioned on.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import Point, as_rng

__all__ = [
    "GinibreKernel",
    "Placement",
    "kernel_matrix",
    "sample_conditional",
]

#: log-determinants below this are treated as exactly zero probability.
LOGDET_FLOOR = -700.0


@dataclass(frozen=True)
class GinibreKernel:
    """Truncated determinantal kernel over a square of side ``side``.

    n_modes bounds the number of points the kernel can score; scale is
    the expected point density (points per unit area) used to map the
    square into the unit-intensity frame.
    """

    n_modes: int
    scale: float
    side: float

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be at least 1")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not self.side > 0:
            raise ValueError("side must be positive")


@dataclass(frozen=True)
class Placement:
    """Fixed (clamped) and freshly placed points of one sample."""

    fixed: tuple
    free: tuple


def _features(kernel, xs, ys):
    """Feature rows phi_0..phi_{n_modes-1} for points given in square
    coordinates; rows are bounded thanks to the shared Gaussian factor."""
    c = np.sqrt(np.pi * kernel.scale)
    z = c * ((np.asarray(xs, dtype=float) - kernel.side / 2.0)
             + 1j * (np.asarray(ys, dtype=float) - kernel.side / 2.0))
    n = z.shape[0]
    out = np.empty((n, kernel.n_modes), dtype=np.complex128)
    phi = np.exp(-0.5 * np.abs(z) ** 2) / np.sqrt(np.pi)
    out[:, 0] = phi
    if kernel.n_modes > 1:
        steps = z[:, None] / np.sqrt(np.arange(1.0, kernel.n_modes))
        out[:, 1:] = phi[:, None] * np.cumprod(steps, axis=1)
    return out


def kernel_matrix(kernel, pts):
    """Hermitian PSD matrix K(x_i, x_j) for the given points.

    Raises when more points than modes are requested (the truncated
    kernel cannot score such configurations).
    """
    pts = list(pts)
    if len(pts) > kernel.n_modes:
        raise ValueError(
            f"{len(pts)} points exceed the {kernel.n_modes}-mode kernel")
    if not pts:
        return np.zeros((0, 0), dtype=np.complex128)
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    f = _features(kernel, xs, ys)
    return f @ f.conj().T


def _logdet_gram(features):
    """log det of the Gram matrix, or -inf for degenerate/underflowed
    states (sign off the positive real axis, or below LOGDET_FLOOR)."""
    gram = features @ features.conj().T
    sign, logdet = np.linalg.slogdet(gram)
    if sign.real <= 0.5 or not np.isfinite(logdet) or logdet < LOGDET_FLOOR:
        return -np.inf
    return float(logdet)


def sample_conditional(kernel, fixed, n_new, square_side, mcmc_steps=None,
                       rng_seed=None):
    """Place ``n_new`` points in [0, square_side]^2, repelled from each
    other and from the clamped ``fixed`` points.

    Metropolis chain: proposals redraw one free point uniformly in the
    square (round-robin over the free points) and are accepted with the
    determinant ratio of the full kernel matrix.  Proposals that land
    exactly on an existing point are rejected outright.  Default chain
    length is 200 * n_new proposals.

    The fixed points never move, so the determinant of the full kernel
    matrix factors as det(fixed block) * det(projected free block); the
    constant fixed factor is computed once and each proposal only
    refreshes one row of the small projected Gram.  Ratios are identical
    to recomputing the full matrix every step.
    """
    fixed = tuple(fixed)
    if n_new < 0:
        raise ValueError("n_new must be nonnegative")
    if len(fixed) + n_new > kernel.n_modes:
        raise ValueError(
            f"{len(fixed)} fixed + {n_new} new points exceed the "
            f"{kernel.n_modes}-mode kernel")
    if not square_side > 0:
        raise ValueError("square_side must be positive")
    if n_new == 0:
        return Placement(fixed, ())
    rng = as_rng(rng_seed)
    if mcmc_steps is None:
        mcmc_steps = 200 * n_new

    n_fix = len(fixed)
    xs = np.empty(n_fix + n_new, dtype=float)
    ys = np.empty(n_fix + n_new, dtype=float)
    for i, p in enumerate(fixed):
        xs[i] = p.x
        ys[i] = p.y

    # Constant fixed-block factor and an orthonormal basis of the span
    # of the fixed feature rows (empty basis when nothing is clamped).
    if n_fix:
        basis, tri = np.linalg.qr(
            _features(kernel, xs[:n_fix], ys[:n_fix]).conj().T)
        with np.errstate(divide="ignore"):
            log_fixed = 2.0 * float(np.sum(np.log(np.abs(np.diag(tri)))))
    else:
        basis = np.zeros((kernel.n_modes, 0), dtype=np.complex128)
        log_fixed = 0.0

    def project(rows):
        return rows - (rows @ basis) @ basis.conj().T

    def state_logdet(gram):
        sign, logdet = np.linalg.slogdet(gram)
        total = log_fixed + logdet
        if sign.real <= 0.5 or not np.isfinite(total) or total < LOGDET_FLOOR:
            return -np.inf
        return float(total)

    cur = -np.inf
    for _ in range(1000):
        pos = rng.random((n_new, 2)) * square_side
        xs[n_fix:] = pos[:, 0]
        ys[n_fix:] = pos[:, 1]
        psi = project(_features(kernel, xs[n_fix:], ys[n_fix:]))
        small = psi @ psi.conj().T
        cur = state_logdet(small)
        if cur > -np.inf:
            break
    else:
        raise RuntimeError("could not find a nondegenerate starting state")

    for step in range(mcmc_steps):
        i = step % n_new
        slot = n_fix + i
        px = rng.random() * square_side
        py = rng.random() * square_side
        hits = (xs == px) & (ys == py)
        hits[slot] = False
        if hits.any():
            continue
        new_row = project(_features(kernel, [px], [py]))[0]
        old_row = psi[i].copy()
        old_gram_row = small[i].copy()
        old_gram_col = small[:, i].copy()
        psi[i] = new_row
        col = psi @ new_row.conj()
        small[:, i] = col
        small[i, :] = col.conj()
        small[i, i] = col[i].real
        new = state_logdet(small)
        if new == -np.inf:
            accept = False
        elif cur == -np.inf or new >= cur:
            accept = True
        else:
            accept = np.log(rng.random()) < new - cur
        if accept:
            xs[slot], ys[slot] = px, py
            cur = new
        else:
            psi[i] = old_row
            small[i, :] = old_gram_row
            small[:, i] = old_gram_col

    free = tuple(Point(float(xs[n_fix + i]), float(ys[n_fix + i]))
                 for i in range(n_new))
    return Placement(fixed, free)
