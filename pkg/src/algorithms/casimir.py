"""Casimir energy of a strip or elliptic cylinder above a plane from the log-det formula.

The scatterer is described by its elliptic T-matrix and the plane by the
reflection factor -1 (Dirichlet) or +1 (Neumann). At zero tilt the channels
split into a sector whose angular parity matches the parity of r and one
where it does not; each sector contributes its own determinant.

All kernels are written in terms of first-kind radial functions of the
positive parameter Q = (d p / 2)^2 so that every integrand is real for
physical inputs:

    X_c(pi/2 - iu) = eta_c j_c R_c(u),   R_c(-u) = pi_s R_c(u)

where R_c is Je_r(Q, u) in the matched sector (pi_s = +1) and Jo_r(Q, u)
in the mismatched one (pi_s = -1).
"""

import logging
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.algorithms.mathieu import joining_factor, radial_modified, radial_profiles
from src.algorithms.quadrature import log_panels, uniform_panels
from src.models.casimir_config import (
    PFA_COEFFICIENT,
    BoundaryCondition,
    CasimirConfig,
    EnergyCurve,
    EnergyRecord,
    ParitySector,
    QuadratureSettings,
)
from src.models.errors import BesselOverflowError, ConvergenceError, DeterminantError, DomainError
from src.models.function_id import Kind, Parity, validate_order

logger = logging.getLogger(__name__)

R_MAX_STEP = 4
# automatic growth stops here; an explicit r_max may exceed it
R_MAX_CAP = 16
R_MAX_TEST_S = 1.0
R_MAX_TOLERANCE = 1e-6
SIGN_TOLERANCE = 1e-8

# energies are also formed with the cutoffs r_max - 6, r_max - 4 and r_max - 2
TRUNCATION_LEVELS = 4
EXTRAPOLATION_MIN_R_MAX = 8
EXTRAPOLATION_MAX_RATIO = 0.8


@dataclass(frozen=True)
class Channel:
    """One row of a sector matrix.

    Attributes:
        sector: Sector the channel belongs to
        r: Mathieu order
        angular: Parity of the angular function carried (ce or se)
        radial: Parity of the radial profile R_c (Je or Jo)
        eta: Sign from the q -> -q reflection at theta = pi/2
    """

    sector: ParitySector
    r: int
    angular: Parity
    radial: Parity
    eta: float


def sector_channels(sector: ParitySector, r_max: int) -> List[Channel]:
    """Channels of one parity sector up to order r_max, with the parities each order carries."""
    radial = Parity.EVEN if sector is ParitySector.MATCHED else Parity.ODD
    channels = []
    for r in sector.orders(r_max):
        angular = sector.channel_parity(r)
        channels.append(Channel(sector, r, angular, radial, _eta(angular, r)))
    return channels


def _eta(angular: Parity, r: int) -> float:
    if r % 2 == 0:
        exponent = r // 2 if angular is Parity.EVEN else r // 2 - 1
    else:
        exponent = (r - 1) // 2
    return -1.0 if exponent % 2 else 1.0


def t_matrix(parity: Parity, r: int, q: complex, mu0: float, bc: BoundaryCondition) -> complex:
    """Scattering amplitude of channel (parity, r) off the cylinder mu = mu0.

    Args:
        parity: Even (ce channels) or odd (se channels)
        r: Mathieu order
        q: Parameter -(d p)^2 / 4 of the ordinary functions
        mu0: Elliptic radius of the surface; 0 for a strip
        bc: Dirichlet or Neumann

    Returns:
        -Ie/Ke (Dirichlet) or -Ie'/Ke' (Neumann), odd analogues with Io, Ko

    Raises:
        DomainError: For the electromagnetic label or a negative mu0
    """
    validate_order(parity, r)
    if bc is BoundaryCondition.ELECTROMAGNETIC:
        raise DomainError("t_matrix takes a scalar boundary condition")
    if mu0 < 0:
        raise DomainError("mu0 must be non-negative")
    if mu0 == 0:
        # Io vanishes at the strip, and so does the mu-derivative of Ie
        if bc is BoundaryCondition.DIRICHLET and parity is Parity.ODD:
            return 0j
        if bc is BoundaryCondition.NEUMANN and parity is Parity.EVEN:
            return 0j

    regular = radial_modified(parity, Kind.FIRST, r, q, mu0)
    outgoing = radial_modified(parity, Kind.THIRD, r, q, mu0)
    if bc is BoundaryCondition.DIRICHLET:
        numerator, denominator = regular.value, outgoing.value
    else:
        numerator, denominator = regular.derivative, outgoing.derivative
    if denominator == 0:
        raise BesselOverflowError(f"outgoing radial function of order {r} underflows at mu0={mu0}")
    return complex(-numerator / denominator)


def translation_kernel(r: int, r_prime: int, sector: ParitySector, p: float, cfg: CasimirConfig) -> complex:
    """Round-trip kernel between channels r and r' of one sector.

    Integral over the whole line of e^{-2pH cosh u} X_r(pi/2 + iu) X_r'(pi/2 - iu),
    folded onto u >= 0.

    Raises:
        DomainError: If p <= 0 or an order does not exist in the sector
        ConvergenceError: If the u-quadrature does not settle
    """
    if p <= 0:
        raise DomainError("p must be positive")
    channels = {channel.r: channel for channel in sector_channels(sector, max(r, r_prime))}
    if r not in channels or r_prime not in channels:
        raise DomainError(f"orders {r}, {r_prime} are not channels of the {sector.value} sector")
    pair = [channels[r], channels[r_prime]]
    Q = _positive_parameter(p, cfg)
    s = 2.0 * p * cfg.H
    gram = _profile_gram(pair, Q, s, cfg.quad, cfg.tol)
    joins = [joining_factor(channel.radial, channel.r, complex(Q, 0.0)) for channel in pair]
    return complex(
        pair[0].eta * pair[1].eta * joins[0] * joins[1] * sector.reflection_sign * gram[0, 1]
    )


def log_det_integrand(p: float, cfg: CasimirConfig) -> float:
    """Sum over scalar conditions and sectors of log det(1 - T^P T K) at wavenumber p."""
    if p <= 0:
        raise DomainError("p must be positive")
    r_max = cfg.r_max if cfg.r_max is not None else cfg.default_r_max
    sample = _integrand_sample(2.0 * p * cfg.H, cfg, r_max)
    return _total(sample)


def sector_log_det(
    p: float, cfg: CasimirConfig, sector: ParitySector, bc: BoundaryCondition, r_max: Optional[int] = None
) -> float:
    """log det(1 - T^P T K) of one sector and scalar condition at wavenumber p."""
    if bc is BoundaryCondition.ELECTROMAGNETIC:
        raise DomainError("sector_log_det takes a scalar boundary condition")
    r_max = r_max if r_max is not None else (cfg.r_max or cfg.default_r_max)
    matrix, _ = _sector_matrices(2.0 * p * cfg.H, cfg, sector, r_max)[bc]
    return _log_det(matrix, f"{sector.value}/{bc.value}")


def log_det_full(p: float, cfg: CasimirConfig, bc: BoundaryCondition, r_max: Optional[int] = None) -> float:
    """Log det of the unsplit matrix over both sectors.

    Every kernel, cross-sector blocks included, is integrated over the full
    u-line from the angular functions' reflection identities alone, so this
    checks the sector split rather than reusing it.
    """
    if bc is BoundaryCondition.ELECTROMAGNETIC:
        raise DomainError("log_det_full takes a scalar boundary condition")
    if p <= 0:
        raise DomainError("p must be positive")
    r_max = r_max if r_max is not None else (cfg.r_max or cfg.default_r_max)
    Q = _positive_parameter(p, cfg)
    q = complex(-Q, 0.0)
    s = 2.0 * p * cfg.H

    channels: List[Channel] = []
    amplitudes: List[complex] = []
    for sector in ParitySector:
        for channel in sector_channels(sector, r_max):
            amplitude = t_matrix(channel.angular, channel.r, q, cfg.mu0, bc)
            if amplitude != 0:
                channels.append(channel)
                amplitudes.append(amplitude)
    if not channels:
        return 0.0

    gram = _profile_gram(channels, Q, s, cfg.quad, cfg.tol, full_line=True)
    scale = np.array(
        [channel.eta * joining_factor(channel.radial, channel.r, complex(Q, 0.0)) for channel in channels]
    )
    kernel = scale[:, None] * gram * scale[None, :]
    matrix = np.eye(len(channels)) - bc.plane_reflection * np.array(amplitudes)[:, None] * kernel
    return _log_det(matrix, f"full/{bc.value}")


def pfa_energy(cfg: CasimirConfig) -> float:
    """Proximity-force energy per length; a single scalar condition carries half."""
    full = -PFA_COEFFICIENT * 2.0 * cfg.d / cfg.H**3
    return full if cfg.bc is BoundaryCondition.ELECTROMAGNETIC else 0.5 * full


def energy_per_length(cfg: CasimirConfig) -> float:
    """Energy per unit length E / L for one configuration."""
    return energy_record(cfg).energy_per_length


def pfa_ratio(cfg: CasimirConfig) -> float:
    return energy_record(cfg).ratio_pfa


def resolve_r_max(cfg: CasimirConfig) -> int:
    """Channel cutoff for cfg: the explicit value, or the default grown until stable.

    Growth compares the integrand at s = 2pH = 1 between r_max and r_max + 4
    and never goes past R_MAX_CAP; the remaining truncation error is left to
    the extrapolation in energy_record.
    """
    if cfg.r_max is not None:
        return cfg.r_max
    r_max = min(cfg.default_r_max, R_MAX_CAP)
    while r_max < R_MAX_CAP:
        wider_r_max = min(r_max + R_MAX_STEP, R_MAX_CAP)
        base = _total(_integrand_sample(R_MAX_TEST_S, cfg, r_max))
        wider = _total(_integrand_sample(R_MAX_TEST_S, cfg, wider_r_max))
        if abs(wider - base) <= R_MAX_TOLERANCE * abs(wider):
            return r_max
        r_max = wider_r_max
        logger.debug("growing r_max to %d for 2d/H=%.4g", r_max, cfg.aspect)
    return r_max


def energy_record(cfg: CasimirConfig, executor: Optional[Executor] = None) -> EnergyRecord:
    """Energy per length with its error estimate.

    Args:
        cfg: Geometry and numerical settings
        executor: Pool to evaluate p-nodes on; one is created when cfg.workers > 1

    Returns:
        EnergyRecord; est_error sums the p-refinement delta, the truncation
        uncertainty and the endpoint tails. With cfg.extrapolate and r_max >= 8
        each scalar part is the r_max -> infinity limit of the energies at
        cutoffs r_max - 6, ..., r_max, and the truncation uncertainty is that of
        the limit; otherwise it is the change from dropping the two highest orders

    Raises:
        DeterminantError: If any sector determinant is not positive
        ConvergenceError: If a kernel quadrature fails
    """
    if executor is None and cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return energy_record(cfg, executor=pool)

    r_max = resolve_r_max(cfg)
    settings = cfg.quad
    coarse_nodes, coarse_weights = log_panels(settings.s_min, settings.s_max, settings.p_panels, settings.p_nodes)
    nodes = [coarse_nodes]
    if settings.refine_p:
        fine = settings.doubled()
        fine_nodes, fine_weights = log_panels(fine.s_min, fine.s_max, fine.p_panels, fine.p_nodes)
        nodes.append(fine_nodes)
    endpoints = np.array([settings.s_min, settings.s_max])
    all_nodes = np.concatenate(nodes + [endpoints])

    tasks = [(float(s), cfg, r_max) for s in all_nodes]
    mapper = executor.map if executor is not None else map
    samples = list(mapper(_sample_task, tasks))
    logger.debug("evaluated %d p-nodes for H=%g (r_max=%d)", len(samples), cfg.H, r_max)

    prefactor = 1.0 / (4.0 * math.pi) / (4.0 * cfg.H**2)
    coarse_count = coarse_nodes.size
    coarse_samples = samples[:coarse_count]
    reported_nodes, reported_weights, reported_samples = coarse_nodes, coarse_weights, coarse_samples
    quadrature_delta = 0.0
    if settings.refine_p:
        fine_samples = samples[coarse_count : coarse_count + fine_nodes.size]
        coarse_energy = _integrate(coarse_nodes, coarse_weights, coarse_samples, prefactor)
        reported_nodes, reported_weights, reported_samples = fine_nodes, fine_weights, fine_samples
        quadrature_delta = abs(_integrate(fine_nodes, fine_weights, fine_samples, prefactor) - coarse_energy)

    extrapolate = cfg.extrapolate and r_max >= EXTRAPOLATION_MIN_R_MAX
    parts: Dict[str, float] = {}
    truncation_errors = []
    for bc in cfg.bc.scalar_conditions():
        levels = [
            _integrate(reported_nodes, reported_weights, reported_samples, prefactor, bc=bc, level=level)
            for level in range(len(truncation_cutoffs(r_max)))
        ]
        if extrapolate:
            parts[bc.value], error = extrapolate_truncation(levels)
        else:
            parts[bc.value], error = levels[-1], abs(levels[-1] - levels[-2])
        truncation_errors.append(error)
    energy = math.fsum(parts.values())
    truncation_delta = math.fsum(truncation_errors)

    low, high = samples[-2], samples[-1]
    # integrand s f(s) ds: f is roughly flat below s_min and decays like e^{-s} above s_max
    tails = prefactor * (
        0.5 * settings.s_min**2 * abs(_total(low)) + settings.s_max * abs(_total(high))
    )
    est_error = quadrature_delta + truncation_delta + tails

    reference = pfa_energy(cfg)
    if energy >= 0:
        logger.warning("non-negative energy %.6g at H=%g; the interaction should be attractive", energy, cfg.H)
    return EnergyRecord(
        H=cfg.H,
        energy_per_length=energy,
        ratio_pfa=energy / reference,
        est_error=est_error,
        r_max_used=r_max,
        parts=parts,
        extrapolated=extrapolate,
    )


def energy_curve(
    d: float,
    heights: Sequence[float],
    bc: BoundaryCondition = BoundaryCondition.ELECTROMAGNETIC,
    mu0: float = 0.0,
    r_max: Optional[int] = None,
    quad: Optional[QuadratureSettings] = None,
    tol: float = 1e-6,
    workers: int = 1,
    extrapolate: bool = True,
) -> EnergyCurve:
    """Energy records for each height, sorted by H, sharing one worker pool."""
    curve = EnergyCurve(d=d, bc=bc, mu0=mu0)
    configs = [
        CasimirConfig(
            d=d,
            H=float(H),
            mu0=mu0,
            bc=bc,
            r_max=r_max,
            quad=quad if quad is not None else QuadratureSettings(),
            tol=tol,
            workers=workers,
            extrapolate=extrapolate,
        )
        for H in sorted(heights)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for cfg in configs:
                curve.add(energy_record(cfg, executor=pool))
    else:
        for cfg in configs:
            curve.add(energy_record(cfg))
    return curve


def truncation_cutoffs(r_max: int) -> List[int]:
    """Channel cutoffs the energy is formed at, ascending and ending at r_max."""
    return [r_max - 2 * k for k in reversed(range(TRUNCATION_LEVELS)) if r_max - 2 * k >= 0]


def extrapolate_truncation(levels: Sequence[float]) -> Tuple[float, float]:
    """Limit of energies taken at equally spaced channel cutoffs.

    Each window of three successive levels whose differences shrink by a
    common ratio in (0, 0.8) gives an Aitken delta-squared limit. The last
    such limit is returned; its uncertainty is the change from the limit of
    the previous window, or the size of the correction when there is none.
    When no window qualifies, or the limit is less certain than the last raw
    step, the last level is returned with that step as its uncertainty.

    Args:
        levels: Energies at ascending cutoffs; at least two

    Returns:
        (limit, uncertainty)
    """
    values = [float(level) for level in levels]
    if len(values) < 2:
        raise DomainError("extrapolation needs at least two truncation levels")
    last_step = abs(values[-1] - values[-2])
    limits = [_aitken_limit(values[start : start + 3]) for start in range(len(values) - 2)]
    if not limits or limits[-1] is None:
        return values[-1], last_step
    limit = limits[-1]
    if len(limits) > 1 and limits[-2] is not None:
        uncertainty = abs(limit - limits[-2])
    else:
        uncertainty = abs(limit - values[-1])
    if uncertainty > last_step:
        logger.debug("truncation extrapolation rejected: uncertainty %.3g exceeds step %.3g", uncertainty, last_step)
        return values[-1], last_step
    return limit, uncertainty


def _aitken_limit(window: Sequence[float]) -> Optional[float]:
    first, second = window[1] - window[0], window[2] - window[1]
    if first == 0:
        return None
    ratio = second / first
    if not 0 < ratio < EXTRAPOLATION_MAX_RATIO:
        return None
    return window[2] + second * ratio / (1.0 - ratio)


# Sample = {bc value: log dets over both sectors at each of truncation_cutoffs(r_max)}
Sample = Dict[str, Tuple[float, ...]]


def _sample_task(task: Tuple[float, CasimirConfig, int]) -> Sample:
    s, cfg, r_max = task
    return _integrand_sample(s, cfg, r_max)


def _integrand_sample(s: float, cfg: CasimirConfig, r_max: int) -> Sample:
    cutoffs = truncation_cutoffs(r_max)
    sample: Sample = {bc.value: (0.0,) * len(cutoffs) for bc in cfg.bc.scalar_conditions()}
    for sector in ParitySector:
        for bc, (matrix, orders) in _sector_matrices(s, cfg, sector, r_max).items():
            label = f"{sector.value}/{bc.value}"
            levels = []
            for cutoff in cutoffs[:-1]:
                keep = np.flatnonzero(orders <= cutoff)
                levels.append(_log_det(matrix[np.ix_(keep, keep)], label))
            levels.append(_log_det(matrix, label))
            sample[bc.value] = tuple(total + value for total, value in zip(sample[bc.value], levels))
    return sample


def _sector_matrices(
    s: float, cfg: CasimirConfig, sector: ParitySector, r_max: int
) -> Dict[BoundaryCondition, Tuple[np.ndarray, np.ndarray]]:
    """Sector matrices per scalar condition, with the order r of each row.

    The kernel depends only on (Q, s), so Dirichlet and Neumann share it.
    """
    p = s / (2.0 * cfg.H)
    Q = _positive_parameter(p, cfg)
    q = complex(-Q, 0.0)
    channels = sector_channels(sector, r_max)
    conditions = cfg.bc.scalar_conditions()

    amplitudes: Dict[BoundaryCondition, np.ndarray] = {}
    joins = np.array([joining_factor(channel.radial, channel.r, complex(Q, 0.0)) for channel in channels])
    for bc in conditions:
        values = np.array([t_matrix(channel.angular, channel.r, q, cfg.mu0, bc) for channel in channels])
        # far below threshold T underflows while j^2 overflows; T j^2 is kept wherever it is finite
        with np.errstate(over="ignore", invalid="ignore"):
            weight = (values * joins) * joins
        unusable = ~np.isfinite(weight)
        if np.any(unusable):
            logger.debug("dropping %d negligible channels at s=%g", int(unusable.sum()), s)
            weight[unusable] = 0.0
        amplitudes[bc] = weight

    active = np.flatnonzero(np.any([amplitudes[bc] != 0 for bc in conditions], axis=0))
    matrices: Dict[BoundaryCondition, Tuple[np.ndarray, np.ndarray]] = {}
    if active.size == 0:
        empty = np.zeros((0, 0))
        return {bc: (empty, np.zeros(0, dtype=int)) for bc in conditions}

    gram = _profile_gram([channels[i] for i in active], Q, s, cfg.quad, cfg.tol)
    for bc in conditions:
        rows = np.flatnonzero(amplitudes[bc][active] != 0)
        block = gram[np.ix_(rows, rows)]
        weight = amplitudes[bc][active][rows]
        matrix = np.eye(rows.size) - bc.plane_reflection * sector.reflection_sign * weight[:, None] * block
        matrices[bc] = (matrix, np.array([channels[i].r for i in active[rows]], dtype=int))
    return matrices


def _profile_gram(
    channels: Sequence[Channel],
    Q: float,
    s: float,
    settings: QuadratureSettings,
    tol: float,
    full_line: bool = False,
) -> np.ndarray:
    """Weighted overlaps of the radial profiles R_c.

    Half line: 2 * int_0^umax e^{-s cosh u} R_c(u) R_c'(u) du.
    Full line: int_{-umax}^{umax} e^{-s cosh u} R_c(-u) R_c'(u) du.
    Panels double until every entry, relative to the Cauchy-Schwarz bound
    of its row and column, moves by less than tol / 10.
    """
    u_max = math.acosh(1.0 + settings.exponent_cutoff / s)
    profile_channels = [(channel.radial, channel.r) for channel in channels]
    parameter = complex(Q, 0.0)
    panels = settings.u_panels
    previous: Optional[np.ndarray] = None
    while True:
        lower = -u_max if full_line else 0.0
        nodes, weights = uniform_panels(lower, u_max, panels, settings.u_nodes)
        profiles = radial_profiles(profile_channels, parameter, nodes)
        damped = weights * np.exp(-s * np.cosh(nodes))
        if full_line:
            gram = (profiles[:, ::-1] * damped) @ profiles.T
        else:
            gram = 2.0 * (profiles * damped) @ profiles.T

        if previous is not None:
            diagonal = np.sqrt(np.abs(np.diag(gram)))
            bound = np.outer(diagonal, diagonal)
            change = np.divide(np.abs(gram - previous), bound, out=np.zeros(bound.shape), where=bound > 0)
            if change.max() <= 0.1 * tol:
                return gram
        if 2 * panels > settings.u_max_panels:
            raise ConvergenceError(
                f"u-quadrature did not converge with {panels} panels up to u_max={u_max:.4g}",
                attempted=u_max,
            )
        previous = gram
        panels *= 2


def _log_det(matrix: np.ndarray, label: str) -> float:
    if matrix.size == 0:
        return 0.0
    if np.iscomplexobj(matrix) and np.max(np.abs(matrix.imag)) <= 1e-12 * max(1.0, np.max(np.abs(matrix.real))):
        matrix = matrix.real
    sign, log_abs = np.linalg.slogdet(matrix)
    if abs(sign - 1.0) > SIGN_TOLERANCE:
        raise DeterminantError(f"{label} determinant has sign {sign}; truncation or geometry is invalid")
    return float(log_abs)


def _positive_parameter(p: float, cfg: CasimirConfig) -> float:
    return -cfg.q_at(p).real


def _total(sample: Sample) -> float:
    return math.fsum(levels[-1] for levels in sample.values())


def _integrate(
    nodes: np.ndarray,
    weights: np.ndarray,
    samples: Iterable[Sample],
    prefactor: float,
    bc: Optional[BoundaryCondition] = None,
    level: int = -1,
) -> float:
    """Weighted sum of s^2 f(s), f being one condition's log det (or all of them) at one cutoff level."""
    terms = []
    for s, weight, sample in zip(nodes, weights, samples):
        if bc is not None:
            value = sample[bc.value][level]
        else:
            value = math.fsum(levels[level] for levels in sample.values())
        terms.append(weight * s * s * value)
    return prefactor * math.fsum(terms)
