import logging
from dataclasses import dataclass
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from .auxiliary import BroadcastChannelSpec
from .channel_synthesis import CLASSICAL, QUANTUM
from .exceptions import ConfigError, UnknownChannelError
from .quantum_core import DensityMatrix

logger = logging.getLogger(__name__)

ERASURE = 2


def _probability(value: float, name: str) -> float:
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name} must lie in [0, 1], got {value}")
    return float(value)


def erasure_rows(epsilon: float) -> np.ndarray:
    """BEC(ε) with outputs (0, 1, e)."""
    e = _probability(epsilon, "erasure probability")
    return np.array([[1 - e, 0.0, e], [0.0, 1 - e, e]])


def flip_rows(p: float) -> np.ndarray:
    p = _probability(p, "flip probability")
    return np.array([[1 - p, p], [p, 1 - p]])


def _product_table(rows1: np.ndarray, rows2: np.ndarray) -> np.ndarray:
    return np.einsum("xa,xb->xab", rows1, rows2)


def erasure_broadcast(eps1: float, eps2: float) -> BroadcastChannelSpec:
    return BroadcastChannelSpec(
        CLASSICAL, table=_product_table(erasure_rows(eps1), erasure_rows(eps2)),
        name=f"erasure-broadcast({eps1},{eps2})",
    )


def symmetric_flip_broadcast(p1: float, p2: float) -> BroadcastChannelSpec:
    return BroadcastChannelSpec(
        CLASSICAL, table=_product_table(flip_rows(p1), flip_rows(p2)),
        name=f"symmetric-flip-broadcast({p1},{p2})",
    )


def pure_qubit_states(angle: float) -> Tuple[DensityMatrix, DensityMatrix]:
    """cos(a/2)|0> ± sin(a/2)|1>; the overlap is cos(a)."""
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return DensityMatrix.pure([c, s]), DensityMatrix.pure([c, -s])


def amplitude_damped_states(gamma: float) -> Tuple[DensityMatrix, DensityMatrix]:
    """|+>, |->  through amplitude damping with decay γ."""
    g = _probability(gamma, "damping")
    kraus = (np.array([[1.0, 0.0], [0.0, np.sqrt(1 - g)]]), np.array([[0.0, np.sqrt(g)], [0.0, 0.0]]))
    out = []
    for sign in (1.0, -1.0):
        psi = np.array([1.0, sign]) / np.sqrt(2.0)
        rho = np.outer(psi, psi)
        out.append(DensityMatrix(sum(K @ rho @ K.conj().T for K in kraus)))
    return tuple(out)


def _product_states(first, second) -> Tuple[Tuple[DensityMatrix, DensityMatrix], Tuple[int, int]]:
    joint = tuple(a.tensor(b) for a, b in zip(first, second))
    return joint, (first[0].dim, second[0].dim)


def pure_state_qubit_broadcast(angle1: float, angle2: float) -> BroadcastChannelSpec:
    states, dims = _product_states(pure_qubit_states(angle1), pure_qubit_states(angle2))
    return BroadcastChannelSpec(QUANTUM, states=states, dims=dims, name=f"pure-state-qubit-broadcast({angle1},{angle2})")


def amplitude_damping_qubit_broadcast(gamma1: float, gamma2: float) -> BroadcastChannelSpec:
    states, dims = _product_states(amplitude_damped_states(gamma1), amplitude_damped_states(gamma2))
    return BroadcastChannelSpec(
        QUANTUM, states=states, dims=dims, name=f"amplitude-damping-qubit-broadcast({gamma1},{gamma2})"
    )


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    parameters: Tuple[str, ...]
    factory: Callable[..., BroadcastChannelSpec]
    description: str


_CATALOG = (
    CatalogEntry("erasure-broadcast", ("eps1", "eps2"), erasure_broadcast,
                 "product of two binary erasure channels"),
    CatalogEntry("symmetric-flip-broadcast", ("p1", "p2"), symmetric_flip_broadcast,
                 "product of two binary symmetric channels"),
    CatalogEntry("pure-state-qubit-broadcast", ("angle1", "angle2"), pure_state_qubit_broadcast,
                 "qubit pure states with overlap cos(angle) per receiver"),
    CatalogEntry("amplitude-damping-qubit-broadcast", ("gamma1", "gamma2"), amplitude_damping_qubit_broadcast,
                 "|+>/|-> inputs through amplitude damping per receiver"),
)


def builtin_channels() -> Dict[str, CatalogEntry]:
    return {entry.name: entry for entry in _CATALOG}


def build_channel(name: str, params: Sequence[float]) -> BroadcastChannelSpec:
    catalog = builtin_channels()
    if name not in catalog:
        raise UnknownChannelError(name)
    entry = catalog[name]
    if len(params) != len(entry.parameters):
        raise ConfigError(f"{name} takes parameters {entry.parameters}, got {list(params)}")
    spec = entry.factory(*(float(p) for p in params))
    logger.debug(f"[Channel] built {spec.name}")
    return spec
