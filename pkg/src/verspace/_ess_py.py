"""Pure-python kernel for the cone-constrained elliptical slice chain.

This module and the compiled twin ``_ess_cy`` implement identical step
semantics. Neither draws random numbers itself: the chain driver hands each
block of steps its Gaussian directions and uniforms, so a chain produces the
same trajectory no matter which kernel executes it (up to floating-point
agreement of the underlying BLAS).
"""

from __future__ import annotations

import numpy as np

from .exceptions import ChainNumericalError

TWO_PI = 2.0 * np.pi
HALF_PI = 0.5 * np.pi

# hypot(a.w, a.nu) below this times ||a||: the constraint is identically ~0 on
# the whole ellipse and cannot define an arc.
DEGENERATE_RTOL = 1e-12

# Largest rounding violation (relative to ||a_i|| * ||w||) that may be repaired
# by projecting the angle into the arc interior; anything larger aborts.
GUARD_RTOL = 1e-10


def angle_window(pa: np.ndarray, pd: np.ndarray, row_norms: np.ndarray) -> tuple[float, float]:
    """Feasible angle interval (lo, hi) of the ellipse through state and direction.

    Each constraint a_i admits the half circle centred on
    phi_i = atan2(a_i.direction, a_i.state). For a feasible state all
    a_i.state >= 0, hence phi_i lies in [-pi/2, pi/2] and the intersection of
    the half circles is the single arc [max(phi) - pi/2, min(phi) + pi/2],
    which contains the current angle 0. With no active constraints the full
    circle [0, 2*pi) is returned.
    """
    r = np.hypot(pa, pd)
    active = r >= DEGENERATE_RTOL * row_norms
    if not active.any():
        return 0.0, TWO_PI
    phi = np.arctan2(pd[active], pa[active])
    return float(phi.max()) - HALF_PI, float(phi.min()) + HALF_PI


def ess_step(
    A: np.ndarray,
    row_norms: np.ndarray,
    w: np.ndarray,
    pa: np.ndarray,
    nu: np.ndarray,
    u: float,
) -> tuple[np.ndarray, np.ndarray, int]:
    """One rejection-free slice update of ``w`` along the ellipse spanned by ``nu``.

    ``pa`` must equal ``A @ w`` and be elementwise >= 0. Returns the new state,
    its freshly evaluated constraint products (all >= 0), and the number of
    angle projections that were needed to repair rounding.
    """
    pd = A @ nu
    lo, hi = angle_window(pa, pd, row_norms)
    width = hi - lo
    if width <= 0.0:
        raise ChainNumericalError("empty feasible arc: state left the constraint cone")
    theta = lo + u * width
    for attempt in range(3):
        w_new = np.cos(theta) * w + np.sin(theta) * nu
        pa_new = A @ w_new
        if pa_new.size == 0 or pa_new.min() >= 0.0:
            return w_new, pa_new, attempt
        i = int(pa_new.argmin())
        violation = -float(pa_new[i])
        tol = GUARD_RTOL * float(row_norms[i]) * float(np.linalg.norm(w_new))
        if violation >= tol:
            raise ChainNumericalError(
                f"constraint {i} violated by {violation:.3e} (tolerance {tol:.3e})"
            )
        # Rounding-scale violation: pull theta to the arc interior and retry,
        # falling back to the arc midpoint.
        if attempt == 0:
            margin = 1e-3 * width
            clamped = min(max(theta, lo + margin), hi - margin)
            theta = clamped if clamped != theta else lo + 0.5 * width
        else:
            theta = lo + 0.5 * width
    raise ChainNumericalError("constraint violation persisted after angle projection")


def process_block(
    A: np.ndarray,
    row_norms: np.ndarray,
    w: np.ndarray,
    pa: np.ndarray,
    dirs: np.ndarray,
    us: np.ndarray,
    step_offset: int,
    warmup: int,
    thinning: int,
    out: np.ndarray,
    krec: int,
) -> tuple[int, int]:
    """Advance one block of steps in place, recording thinned states into ``out``.

    Step ``s`` (1-based, global) is recorded when ``s > warmup`` and
    ``(s - warmup) % thinning == 0``. Returns the new record count and the
    number of angle projections in the block.
    """
    n_proj = 0
    for j in range(us.shape[0]):
        w_new, pa_new, proj = ess_step(A, row_norms, w, pa, dirs[j], float(us[j]))
        w[:] = w_new
        pa[:] = pa_new
        n_proj += proj
        s = step_offset + j + 1
        if s > warmup and (s - warmup) % thinning == 0:
            out[krec] = w
            krec += 1
    return krec, n_proj
