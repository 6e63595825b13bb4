"""
Alignment of polarized sets across blocks and the three-step chaining schedule.

정렬은 CNOT 회로 대신 블록 간 반복(index pairing)으로 표현한다.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from .exceptions import ConfigError, InfeasibleScheduleError
from .polarized_sets import IndexSet, PolarizationProfile, Threshold, high_set, low_set

logger = logging.getLogger(__name__)

FORWARD = "forward"
BACKWARD = "backward"

BIN_SET_CONSISTENT = "consistent"
BIN_SET_PRINTED = "printed"


@dataclass(frozen=True, eq=False)
class SetBundle:
    i_sup2: IndexSet
    i_v1: IndexSet
    i_bin2: IndexSet
    i_1: IndexSet
    f_1: IndexSet
    bound_1: Optional[IndexSet] = None
    reliability_1: Optional[np.ndarray] = None

    def __post_init__(self):
        n = self.i_sup2.n
        for s in (self.i_v1, self.i_bin2, self.i_1, self.f_1):
            if s.n != n:
                raise ConfigError("set bundle mixes blocklengths")
        if self.bound_1 is None:
            object.__setattr__(self, "bound_1", IndexSet(n))
        if self.reliability_1 is None:
            object.__setattr__(self, "reliability_1", np.zeros(n))

    @property
    def n(self) -> int:
        return self.i_sup2.n

    @property
    def free_1(self) -> IndexSet:
        """Positions of I^(1) that can carry a message (not fixed by binning)."""
        return self.i_1 - self.bound_1

    def to_dict(self) -> dict:
        return {
            "I_sup2": self.i_sup2.one_based(),
            "I_v1": self.i_v1.one_based(),
            "I_bin2": self.i_bin2.one_based(),
            "I_1": self.i_1.one_based(),
            "F_1": self.f_1.one_based(),
            "bound_1": self.bound_1.one_based(),
        }


def derive_set_bundle(
    profiles: Mapping[str, PolarizationProfile],
    thresholds: Threshold,
    bin_set_variant: str = BIN_SET_CONSISTENT,
) -> SetBundle:
    sizes = {p.n for p in profiles.values()}
    if len(sizes) != 1:
        raise ConfigError(f"profiles disagree on blocklength: {sorted(sizes)}")

    def high(key):
        return high_set(profiles[key], thresholds)

    def low(key):
        return low_set(profiles[key], thresholds)

    h_v = high("V")
    i_sup2 = h_v & low("V|B2")
    i_v1 = h_v & low("V|B1")
    if bin_set_variant == BIN_SET_CONSISTENT:
        i_bin2 = high("V2|V") & low("V2|V,B2")
        i_1 = high("V1|V") & low("V1|V,B1")
    elif bin_set_variant == BIN_SET_PRINTED:
        i_bin2 = high("V2|V") & low("V|B2")
        i_1 = high("V1|V") & low("V|B1")
    else:
        raise ConfigError(f"unknown bin set variant '{bin_set_variant}'")
    f_1 = low("V1|V,V2") & high("V1|V") & high("V1|V,B1")
    bound_1 = i_1 - high("V1|V,V2")
    return SetBundle(i_sup2, i_v1, i_bin2, i_1, f_1, bound_1, np.asarray(profiles["V1|V,B1"].z))


@dataclass(frozen=True, eq=False)
class ChainingSchedule:
    k: int
    b2: IndexSet
    b1: IndexSet
    rbin: IndexSet
    f1: IndexSet
    encode_directions: Dict[str, str] = field(default_factory=lambda: {
        "U0": FORWARD, "U2": FORWARD, "U1": BACKWARD,
    })
    decode_directions: Dict[int, Dict[str, str]] = field(default_factory=lambda: {
        1: {"U0": FORWARD, "U1": FORWARD},
        2: {"U0": BACKWARD, "U2": BACKWARD},
    })

    def __post_init__(self):
        if len(self.b1) != len(self.b2) or len(self.rbin) != len(self.f1):
            raise ConfigError("chained sets must pair one to one")
        if len(self.b1 & self.rbin):
            raise ConfigError("B1 and Rbin must be disjoint")
        if self.k < 1 or (self.chained and self.k < 2):
            raise ConfigError(f"chaining needs at least two blocks, got k={self.k}")

    @property
    def chained(self) -> bool:
        return bool(len(self.b2) or len(self.f1))

    def b1_pairs(self) -> List[Tuple[int, int]]:
        """(B1 position, B2 position) in sorted order of each set."""
        return list(zip(self.b1.indices, self.b2.indices))

    def rbin_pairs(self) -> List[Tuple[int, int]]:
        return list(zip(self.rbin.indices, self.f1.indices))

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "B2": self.b2.one_based(),
            "B1": self.b1.one_based(),
            "Rbin": self.rbin.one_based(),
            "F1": self.f1.one_based(),
            "encode": dict(self.encode_directions),
            "decode": {f"receiver{r}": dict(d) for r, d in self.decode_directions.items()},
        }


def build_schedule(bundle: SetBundle, k: int) -> ChainingSchedule:
    n = bundle.n
    b2 = bundle.i_sup2 - bundle.i_v1
    candidates = bundle.free_1.ordered_by(bundle.reliability_1)
    need = len(b2) + len(bundle.f_1)
    if need > len(candidates):
        deficit = need - len(candidates)
        logger.warning(f"[Schedule] infeasible |B2|={len(b2)} |F1|={len(bundle.f_1)} free={len(candidates)}")
        raise InfeasibleScheduleError(deficit, f"|B2|={len(b2)}, |F1|={len(bundle.f_1)}, usable I1={len(candidates)}")
    b1 = IndexSet(n, candidates[:len(b2)])
    rbin = IndexSet(n, candidates[len(b2):need])
    schedule = ChainingSchedule(k, b2, b1, rbin, bundle.f_1)
    logger.info(f"[Schedule] k={k} |B2|={len(b2)} |F1|={len(bundle.f_1)} |I1|={len(bundle.i_1)}")
    return schedule


@dataclass(frozen=True)
class RateAccounting:
    r1: Fraction
    r2: Fraction
    r1_edge: Fraction
    r2_edge: Fraction
    edge_factor: Fraction

    def to_dict(self) -> dict:
        return {
            "R1": float(self.r1),
            "R2": float(self.r2),
            "R1_edge": float(self.r1_edge),
            "R2_edge": float(self.r2_edge),
            "edge_factor": float(self.edge_factor),
        }


def rate_accounting(bundle: SetBundle, schedule: ChainingSchedule, k: int, n: int) -> RateAccounting:
    """
    Set-count rates; the *_edge values apply (k−1)/k to content chained across blocks.
    With F1 non-empty the first U2 block carries no message either.
    """
    r1 = Fraction(len(bundle.i_1) - len(bundle.bound_1) - len(schedule.b1) - len(schedule.rbin), n)
    r2 = Fraction(len(bundle.i_sup2) + len(bundle.i_bin2), n)
    edge_factor = Fraction(k - 1, k)
    first_block = len(schedule.b2) + (len(bundle.i_bin2) if len(schedule.f1) else 0)
    r2_edge = r2 - Fraction(first_block, n) * (1 - edge_factor)
    return RateAccounting(r1, r2, r1, r2_edge, edge_factor)


@dataclass(frozen=True)
class PairwiseAlignment:
    pairs: Tuple[Tuple[int, int, int], ...]
    unpaired_a: Tuple[int, ...]
    unpaired_b: Tuple[int, ...]
    surplus_a: Tuple[int, ...]
    surplus_b: Tuple[int, ...]
    history: Tuple[int, ...]

    @property
    def unpaired(self) -> int:
        return len(self.unpaired_a)


def align_pairwise(good_a: IndexSet, good_b: IndexSet, rounds: int) -> PairwiseAlignment:
    """
    Pair positions good only for receiver a with positions good only for receiver b.
    Each round repeats half of the remaining pairs into the next block, so after j
    rounds at most ceil(initial / 2^j) pairs are left.
    """
    if rounds < 0:
        raise ConfigError("rounds must be non-negative")
    only_a = list((good_a - good_b).indices)
    only_b = list((good_b - good_a).indices)
    pairable = min(len(only_a), len(only_b))
    remaining_a, remaining_b = only_a[:pairable], only_b[:pairable]
    pairs: List[Tuple[int, int, int]] = []
    history = [pairable]
    for r in range(1, rounds + 1):
        take = len(remaining_a) // 2
        pairs.extend((r, a, b) for a, b in zip(remaining_a[:take], remaining_b[:take]))
        remaining_a, remaining_b = remaining_a[take:], remaining_b[take:]
        history.append(len(remaining_a))
    return PairwiseAlignment(
        tuple(pairs), tuple(remaining_a), tuple(remaining_b),
        tuple(only_a[pairable:]), tuple(only_b[pairable:]), tuple(history),
    )
