"""Composite Gauss-Legendre rules."""

from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss


@lru_cache(maxsize=64)
def _reference_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_rule(edges: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of an n-point rule on every panel [edges[i], edges[i+1]]."""
    edges = np.asarray(edges, dtype=float)
    reference_nodes, reference_weights = _reference_rule(n)
    half = 0.5 * np.diff(edges)[:, None]
    middle = 0.5 * (edges[1:] + edges[:-1])[:, None]
    nodes = middle + half * reference_nodes[None, :]
    weights = half * reference_weights[None, :]
    return nodes.ravel(), weights.ravel()


def uniform_panels(a: float, b: float, panels: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on equal panels of [a, b]."""
    return panel_rule(np.linspace(a, b, panels + 1), n)


def log_panels(a: float, b: float, panels: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Rule in ln x on [a, b]: returns x nodes and weights for integrals d(ln x)."""
    log_nodes, weights = uniform_panels(np.log(a), np.log(b), panels, n)
    return np.exp(log_nodes), weights
