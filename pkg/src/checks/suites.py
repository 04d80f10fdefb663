"""Named suites of diagnostic checks."""

import logging
from typing import Iterable, List, Tuple

from src.checks.bessel_suite import BesselCrossProductCheck, BesselReferenceCheck
from src.checks.manager import CheckManager
from src.checks.normalization import NormalizationCheck
from src.checks.ode_residual import OdeResidualCheck
from src.checks.symmetry import SymmetryCheck
from src.checks.wronskian import WronskianCheck
from src.models.bessel_batch import BesselFamily
from src.models.errors import DomainError
from src.models.function_id import FunctionId, Parity

logger = logging.getLogger(__name__)

SUITE_NAMES = ("wronskian", "normalization", "ode", "bessel", "symmetry", "all")
WRONSKIAN_PAIRS = ("radial", "angular", "modified")
ODE_FAMILIES = ("ce", "se", "fe", "fo", "je", "jo", "ye", "yo", "he", "ho", "ie", "io", "ke", "ko")


def build_suite(name: str, orders: Iterable[int], q: complex) -> CheckManager:
    """Assemble the checks of one suite for the given orders and parameter.

    Args:
        name: One of wronskian, normalization, ode, bessel, symmetry or all
        orders: Mathieu orders to cover (odd checks skip r = 0)
        q: Parameter of the functions under test

    Returns:
        CheckManager holding the suite's checks in a fixed order

    Raises:
        DomainError: For an unknown suite name
    """
    if name not in SUITE_NAMES:
        raise DomainError(f"unknown suite '{name}'; choose from {', '.join(SUITE_NAMES)}")
    orders = sorted(set(orders))
    q = complex(q)
    manager = CheckManager()
    selected = SUITE_NAMES[:-1] if name == "all" else (name,)
    for suite in selected:
        for check in _SUITE_BUILDERS[suite](orders, q):
            manager.add_check(check)
    return manager


def _channels(orders: List[int]) -> List[Tuple[Parity, int]]:
    return [(parity, r) for r in orders for parity in Parity if not (parity is Parity.ODD and r == 0)]


def _wronskian(orders: List[int], q: complex) -> list:
    return [WronskianCheck(parity, r, q, pair) for pair in WRONSKIAN_PAIRS for parity, r in _channels(orders)]


def _normalization(orders: List[int], q: complex) -> list:
    return [NormalizationCheck(parity, r, q) for parity, r in _channels(orders)]


def _ode(orders: List[int], q: complex) -> list:
    checks = []
    for family in ODE_FAMILIES:
        for r in orders:
            if r == 0 and family in ("se", "fo", "jo", "yo", "ho", "io", "ko"):
                continue
            checks.append(OdeResidualCheck(FunctionId.from_name(family, r), q))
    return checks


def _bessel(orders: List[int], q: complex) -> list:
    n_max = max(20, max(orders, default=0) + 10)
    checks = [BesselReferenceCheck(family, n_max) for family in BesselFamily]
    checks.append(BesselCrossProductCheck(modified=False, n_max=n_max))
    checks.append(BesselCrossProductCheck(modified=True, n_max=n_max))
    return checks


def _symmetry(orders: List[int], q: complex) -> list:
    if q.real == 0:
        logger.warning("reflection identities are only sign-consistent for Re q != 0 (q=%s)", q)
    return [SymmetryCheck(parity, r, q) for parity, r in _channels(orders)]


_SUITE_BUILDERS = {
    "wronskian": _wronskian,
    "normalization": _normalization,
    "ode": _ode,
    "bessel": _bessel,
    "symmetry": _symmetry,
}
