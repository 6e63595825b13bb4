"""
Broadcast channel descriptions, the binary auxiliary structure (V, V1, V2, φ) and the
single-letter models each polarized set is computed from.
"""
import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .channel_synthesis import CLASSICAL, QUANTUM, HybridBranch, HybridChannel, SynthesisBudget
from .exceptions import ConfigError, InvalidStateError
from .quantum_core import DensityMatrix, partial_trace

logger = logging.getLogger(__name__)

LAYERS = ("V", "V1", "V2")
RECEIVERS = (1, 2)


@dataclass(frozen=True, eq=False)
class BroadcastChannelSpec:
    """
    classical: table[x, y1, y2] = p(y1, y2 | x)
    quantum: states[x] = ρ_x^{B1B2} on C^{dims[0]} ⊗ C^{dims[1]}
    """

    kind: str
    table: Optional[np.ndarray] = None
    states: Optional[Tuple[DensityMatrix, DensityMatrix]] = None
    dims: Optional[Tuple[int, int]] = None
    name: str = "custom"

    def __post_init__(self):
        if self.kind == CLASSICAL:
            table = np.array(self.table, dtype=float)
            if table.ndim != 3 or table.shape[0] != 2:
                raise InvalidStateError(f"classical broadcast table must have shape (2, m1, m2), got {table.shape}")
            sums = table.reshape(2, -1).sum(axis=1)
            if table.min() < 0 or np.max(np.abs(sums - 1.0)) > 1e-12:
                raise InvalidStateError("broadcast table rows must sum to 1")
            table.setflags(write=False)
            object.__setattr__(self, "table", table)
        elif self.kind == QUANTUM:
            if self.states is None or len(self.states) != 2 or self.dims is None:
                raise InvalidStateError("quantum broadcast channel needs two joint states and dims")
            d1, d2 = self.dims
            for rho in self.states:
                if rho.dim != d1 * d2:
                    raise InvalidStateError(f"joint state of dim {rho.dim} does not match dims {self.dims}")
        else:
            raise InvalidStateError(f"unknown channel kind '{self.kind}'")

    @property
    def is_classical(self) -> bool:
        return self.kind == CLASSICAL

    def marginal_rows(self, receiver: int) -> np.ndarray:
        _check_receiver(receiver)
        if not self.is_classical:
            raise InvalidStateError("marginal rows exist only for classical channels")
        return self.table.sum(axis=2) if receiver == 1 else self.table.sum(axis=1)

    def marginal_states(self, receiver: int) -> Tuple[DensityMatrix, DensityMatrix]:
        _check_receiver(receiver)
        if self.is_classical:
            rows = self.marginal_rows(receiver)
            return DensityMatrix.diagonal(rows[0]), DensityMatrix.diagonal(rows[1])
        keep = receiver - 1
        return tuple(DensityMatrix(partial_trace(rho.entries, self.dims, keep)) for rho in self.states)

    def output_payload(self, receiver: Optional[int]) -> Sequence[np.ndarray]:
        """Per-input output objects: probability rows, density matrices, or a trivial symbol."""
        if receiver is None:
            return [np.ones(1), np.ones(1)]
        if self.is_classical:
            return list(self.marginal_rows(receiver))
        return [rho.entries for rho in self.marginal_states(receiver)]

    def swapped(self) -> "BroadcastChannelSpec":
        if self.is_classical:
            return BroadcastChannelSpec(CLASSICAL, table=self.table.transpose(0, 2, 1), name=f"{self.name}:swapped")
        d1, d2 = self.dims
        states = tuple(
            DensityMatrix(rho.entries.reshape(d1, d2, d1, d2).transpose(1, 0, 3, 2).reshape(d1 * d2, d1 * d2))
            for rho in self.states
        )
        return BroadcastChannelSpec(QUANTUM, states=states, dims=(d2, d1), name=f"{self.name}:swapped")

    def transmit(self, x: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """Sample (y1, y2) letter by letter."""
        if not self.is_classical:
            raise ConfigError("quantum channels have no operational transmission in this simulator")
        _, m1, m2 = self.table.shape
        cdf = np.cumsum(self.table.reshape(2, -1), axis=1)[np.asarray(x, dtype=np.int64)]
        draws = rng.random(len(x))
        cells = np.minimum((draws[:, None] >= cdf).sum(axis=1), m1 * m2 - 1)
        return cells // m2, cells % m2


def _check_receiver(receiver) -> None:
    if receiver not in RECEIVERS:
        raise ConfigError(f"receiver must be 1 or 2, got {receiver}")


def _probability(value: float, what: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise InvalidStateError(f"{what} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True, eq=False)
class AuxiliaryStructure:
    """(V, V1, V2) ~ p_V p_{V2|V} p_{V1|V,V2}, X = φ(V, V1, V2); φ indexed by 4v + 2v1 + v2."""

    p_v: float
    p_v2_given_v: Tuple[float, float]
    p_v1_given_v_v2: Tuple[Tuple[float, float], Tuple[float, float]]
    phi: Tuple[int, ...]

    def __post_init__(self):
        _probability(self.p_v, "P(V=1)")
        for v in (0, 1):
            _probability(self.p_v2_given_v[v], "P(V2=1|V)")
            for v2 in (0, 1):
                _probability(self.p_v1_given_v_v2[v][v2], "P(V1=1|V,V2)")
        phi = tuple(int(b) for b in self.phi)
        if len(phi) != 8 or any(b not in (0, 1) for b in phi):
            raise InvalidStateError("φ must be 8 binary entries")
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_joint(cls, joint: np.ndarray, phi: Sequence[int]) -> "AuxiliaryStructure":
        """Factor a joint p[v, v1, v2] into the scheme's conditionals."""
        joint = np.asarray(joint, dtype=float)
        p_v = joint.sum(axis=(1, 2))
        p_v_v2 = joint.sum(axis=1)

        def ratio(num, den):
            return float(num / den) if den > 0 else 0.0

        return cls(
            p_v=float(p_v[1]),
            p_v2_given_v=tuple(ratio(p_v_v2[v, 1], p_v[v]) for v in (0, 1)),
            p_v1_given_v_v2=tuple(
                tuple(ratio(joint[v, 1, v2], p_v_v2[v, v2]) for v2 in (0, 1)) for v in (0, 1)
            ),
            phi=tuple(phi),
        )

    def joint(self) -> np.ndarray:
        p = np.zeros((2, 2, 2))
        for v, v1, v2 in product((0, 1), repeat=3):
            pv = self.p_v if v else 1.0 - self.p_v
            q2 = self.p_v2_given_v[v]
            pv2 = q2 if v2 else 1.0 - q2
            q1 = self.p_v1_given_v_v2[v][v2]
            pv1 = q1 if v1 else 1.0 - q1
            p[v, v1, v2] = pv * pv2 * pv1
        return p

    def x_map(self) -> np.ndarray:
        return np.asarray(self.phi, dtype=np.uint8).reshape(2, 2, 2)

    def input_distribution(self) -> np.ndarray:
        joint, x = self.joint(), self.x_map()
        return np.array([joint[x == 0].sum(), joint[x == 1].sum()])

    def swapped(self) -> "AuxiliaryStructure":
        """Exchange the roles of V1 and V2 (for exchanged receivers)."""
        joint = self.joint().transpose(0, 2, 1)
        phi = self.x_map().transpose(0, 2, 1).ravel()
        return AuxiliaryStructure.from_joint(joint, phi)

    def to_dict(self) -> dict:
        return {
            "p_v": self.p_v,
            "p_v2_given_v": list(self.p_v2_given_v),
            "p_v1_given_v_v2": [list(row) for row in self.p_v1_given_v_v2],
            "phi": list(self.phi),
        }


def _validate_layers(target: str, conditioning: Tuple[str, ...]) -> None:
    if target not in LAYERS or any(c not in LAYERS for c in conditioning):
        raise ConfigError(f"unknown layer in target={target} conditioning={conditioning}")
    if target in conditioning or len(set(conditioning)) != len(conditioning):
        raise ConfigError(f"layer {target} cannot condition on itself")
    if target == "V" and conditioning:
        raise ConfigError("the superposition layer V is decoded first and has no layer side information")
    if target != "V" and "V" not in conditioning:
        raise ConfigError(f"layer {target} must be conditioned on V")
    if target == "V2" and "V1" in conditioning:
        raise ConfigError("V2 is encoded before V1 and cannot condition on it")


def letter_table(
    spec: BroadcastChannelSpec,
    aux: AuxiliaryStructure,
    target: str,
    conditioning: Tuple[str, ...],
    receiver: Optional[int],
) -> np.ndarray:
    """
    Joint letter masses a[t, s, y] = P(T=t, S=s, Y=y) for a classical (or output-free) model.
    s enumerates the conditioning layer values as a binary number in the given order.
    """
    _validate_layers(target, conditioning)
    if receiver is not None:
        _check_receiver(receiver)
        if not spec.is_classical:
            raise ConfigError("letter tables need a classical channel or no receiver")
    payload = spec.output_payload(receiver)
    joint, x_map = aux.joint(), aux.x_map()
    masses = np.zeros((2, 1 << len(conditioning), payload[0].size))
    position = {"V": 0, "V1": 1, "V2": 2}
    for values in product((0, 1), repeat=3):
        p = joint[values]
        if p == 0:
            continue
        t = values[position[target]]
        s = 0
        for layer in conditioning:
            s = (s << 1) | values[position[layer]]
        masses[t, s] += p * payload[x_map[values]]
    return masses


def induced_cq_channel(
    spec: BroadcastChannelSpec,
    aux: AuxiliaryStructure,
    layer: str,
    receiver: Optional[int],
    conditioning: Optional[Tuple[str, ...]] = None,
    budget: Optional[SynthesisBudget] = None,
) -> HybridChannel:
    """
    Effective binary-input channel of `layer` whose side information is the realized
    conditioning layers (classical branch labels) and, if given, the receiver output.
    """
    if conditioning is None:
        conditioning = () if layer == "V" else ("V",)
    conditioning = tuple(conditioning)
    budget = budget or SynthesisBudget()
    if receiver is None or spec.is_classical:
        masses = letter_table(spec, aux, layer, conditioning, receiver)
        branch = HybridBranch((), masses[0].ravel(), masses[1].ravel())
        return HybridChannel(CLASSICAL, (branch,), budget).merged()

    _validate_layers(layer, conditioning)
    _check_receiver(receiver)
    states = spec.output_payload(receiver)
    joint, x_map = aux.joint(), aux.x_map()
    position = {"V": 0, "V1": 1, "V2": 2}
    dim = states[0].shape[0]
    blocks: Dict[Tuple[int, ...], list] = {}
    for values in product((0, 1), repeat=3):
        p = joint[values]
        if p == 0:
            continue
        label = tuple(values[position[c]] for c in conditioning)
        entry = blocks.setdefault(label, [np.zeros((dim, dim), dtype=complex), np.zeros((dim, dim), dtype=complex)])
        entry[values[position[layer]]] += p * states[x_map[values]]
    branches = tuple(HybridBranch(label, m0, m1) for label, (m0, m1) in sorted(blocks.items()))
    return HybridChannel(QUANTUM, branches, budget).merged()
