"""Integer-order Bessel functions by stable recurrences.

J and I come from Miller's downward recurrence normalized by their
Neumann-series identities; Y and K from upward recurrence out of two
seed orders. Everything is vectorized over the argument.
"""

import logging
import math
from typing import Tuple, Union

import numpy as np
from scipy import special

from src.models.bessel_batch import BesselBatch, BesselFamily
from src.models.errors import BesselOverflowError, DomainError

logger = logging.getLogger(__name__)

MILLER_TINY = 1e-30
RESCALE_THRESHOLD = 1e200
# identity sums losing more than three digits fall back to a seed anchor
IDENTITY_CONDITION_LIMIT = 1e3


def bessel_batch(
    family: BesselFamily,
    z: Union[complex, np.ndarray],
    n_max: int,
    scaled: bool = False,
) -> BesselBatch:
    """Evaluate one Bessel family for orders -n_max..n_max.

    Args:
        family: J, Y, I or K
        z: Complex argument, scalar or array
        n_max: Largest order requested
        scaled: Return exp(-|Re z|) I_n or exp(z) K_n (ignored for J and Y)

    Returns:
        BesselBatch with values and derivatives d/dz

    Raises:
        DomainError: If n_max < 0, or z = 0 for Y and K
        BesselOverflowError: If a value is not representable
    """
    if n_max < 0:
        raise DomainError(f"n_max must be non-negative, got {n_max}")
    z_arr = np.asarray(z, dtype=complex)
    flat = np.atleast_1d(z_arr).ravel()
    if family in (BesselFamily.Y, BesselFamily.K) and np.any(flat == 0):
        raise DomainError(f"{family.value}_n is singular at z = 0")
    scaled = scaled and family in (BesselFamily.I, BesselFamily.K)

    top = n_max + 1
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if family in (BesselFamily.J, BesselFamily.I):
            raw = _downward(family, flat, top, scaled)
        else:
            raw = _upward(family, flat, top, scaled)
        if not np.all(np.isfinite(raw)):
            raise BesselOverflowError(
                f"{family.value}_n overflow for orders 0..{top} at |z| up to {np.max(np.abs(flat)):.6g}"
            )
        derivs = _derivatives(family, raw)

    values = _with_negative_orders(family, raw[: n_max + 1])
    derivatives = _with_negative_orders(family, derivs)
    shape = (2 * n_max + 1,) + z_arr.shape
    argument = complex(z_arr) if z_arr.ndim == 0 else z_arr
    return BesselBatch(
        family=family,
        argument=argument,
        n_max=n_max,
        values=values.reshape(shape),
        derivatives=derivatives.reshape(shape),
        scaled=scaled,
    )


def miller_start_order(top: int, radius: float) -> int:
    """Start order for the downward recurrence.

    Past the turning point n ~ |z| the minimal solution decays on a scale
    of (|z|/2)^(1/3); twelve such widths are added on top of n_max + 15.
    """
    return top + 15 + math.ceil(radius) + math.ceil(12.0 * (radius / 2.0) ** (1.0 / 3.0))


def _downward(family: BesselFamily, z: np.ndarray, top: int, scaled: bool) -> np.ndarray:
    modified = family is BesselFamily.I
    flip = z.real < 0
    w = np.where(flip, -z, z)
    at_zero = w == 0
    w = np.where(at_zero, 1.0, w)
    real_axis = bool(np.all(w.imag == 0))
    work = w.real if real_axis else w
    dtype = float if real_axis else complex

    start = miller_start_order(top, float(np.max(np.abs(w))))
    f = np.zeros((start + 2, len(w)), dtype=dtype)
    f[start] = MILLER_TINY
    step = 1.0 if modified else -1.0
    for n in range(start, 0, -1):
        f[n - 1] = (2.0 * n / work) * f[n] + step * f[n + 1]
        big = np.abs(f[n - 1]) > RESCALE_THRESHOLD
        if np.any(big):
            f[n - 1 :, big] *= 1.0 / RESCALE_THRESHOLD

    scale = _miller_normalization(family, f, work, scaled)
    out = (f[: top + 1] * scale).astype(complex)
    if modified and not scaled:
        out = out * np.exp(w.real)
    orders = np.arange(top + 1)[:, None]
    out = np.where(flip[None, :] & (orders % 2 == 1), -out, out)
    impulse = np.zeros((top + 1, 1))
    impulse[0] = 1.0
    out = np.where(at_zero[None, :], impulse, out)
    return out


def _miller_normalization(
    family: BesselFamily, f: np.ndarray, w: np.ndarray, scaled: bool
) -> np.ndarray:
    """Divisor turning the unnormalized downward solution into J_n or scaled I_n.

    I is always normalized against exp(w - Re w); the caller restores the
    exp(Re w) factor for unscaled output.
    """
    if family is BesselFamily.J:
        terms = f[2::2]
        target = np.ones_like(w)
    else:
        terms = f[1:]
        target = np.exp(1j * np.imag(w)) if np.iscomplexobj(w) else np.ones_like(w)
    total = f[0] + 2.0 * terms.sum(axis=0)
    magnitude = np.abs(f[0]) + 2.0 * np.abs(terms).sum(axis=0)
    condition = magnitude / np.abs(total)
    scale = target / total

    poor = ~(condition <= IDENTITY_CONDITION_LIMIT)
    if np.any(poor):
        logger.debug(
            "%s identity ill-conditioned at %d arguments, anchoring on seeds",
            family.value,
            int(np.count_nonzero(poor)),
        )
        wp = w[poor]
        if family is BesselFamily.J:
            seed0, seed1 = special.jv(0, wp), special.jv(1, wp)
        else:
            seed0, seed1 = special.ive(0, wp), special.ive(1, wp)
        use_zero = np.abs(f[0, poor]) >= np.abs(f[1, poor])
        anchored = np.where(use_zero, seed0 / f[0, poor], seed1 / f[1, poor])
        scale = scale.astype(anchored.dtype) if np.iscomplexobj(anchored) else scale
        scale[poor] = anchored
    return scale


def _upward(family: BesselFamily, z: np.ndarray, top: int, scaled: bool) -> np.ndarray:
    real_axis = bool(np.all(z.imag == 0) and np.all(z.real > 0))
    work = z.real if real_axis else z
    if family is BesselFamily.Y:
        seeds: Tuple[np.ndarray, np.ndarray] = (special.yv(0, work), special.yv(1, work))
        step = -1.0
    elif scaled:
        seeds = (special.kve(0, work), special.kve(1, work))
        step = 1.0
    else:
        seeds = (special.kv(0, work), special.kv(1, work))
        step = 1.0

    out = np.empty((top + 1, len(z)), dtype=float if real_axis else complex)
    out[0] = seeds[0]
    if top >= 1:
        out[1] = seeds[1]
    for n in range(1, top):
        out[n + 1] = (2.0 * n / work) * out[n] + step * out[n - 1]
    return out.astype(complex)


def _derivatives(family: BesselFamily, f: np.ndarray) -> np.ndarray:
    """First derivatives for orders 0..len(f)-2 from neighbouring orders."""
    d = np.empty_like(f[:-1])
    if family is BesselFamily.I:
        d[0] = f[1]
        d[1:] = 0.5 * (f[:-2] + f[2:])
    elif family is BesselFamily.K:
        d[0] = -f[1]
        d[1:] = -0.5 * (f[:-2] + f[2:])
    else:
        d[0] = -f[1]
        d[1:] = 0.5 * (f[:-2] - f[2:])
    return d


def _with_negative_orders(family: BesselFamily, f: np.ndarray) -> np.ndarray:
    n = np.arange(1, f.shape[0])[::-1]
    signs = np.where(n % 2 == 1, family.reflection_sign, 1)[:, None]
    return np.concatenate([signs * f[:0:-1], f], axis=0)
