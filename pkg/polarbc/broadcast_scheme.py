"""
Two-user broadcast polar code: superposition layer U0 and binning layers U1, U2,
chained over k blocks.

내부 좌표계에서는 항상 수신기 1 이 binning 쪽(I(V;B1) <= I(V;B2))이다.
역할이 바뀐 경우 메시지/수신기 라벨은 API 경계에서만 교환한다.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.special import expit

from .alignment_chaining import (
    BIN_SET_CONSISTENT,
    ChainingSchedule,
    PairwiseAlignment,
    RateAccounting,
    SetBundle,
    align_pairwise,
    build_schedule,
    derive_set_bundle,
    rate_accounting,
)
from .auxiliary import AuxiliaryStructure, BroadcastChannelSpec, induced_cq_channel, letter_table
from .channel_synthesis import SynthesisBudget, channel_I
from .exceptions import CapacityExceededError, ConfigError
from .polar_transform import log2_length
from .polarized_sets import (
    METHOD_AUTO,
    METHOD_EXACT,
    IndexSet,
    PolarizationProfile,
    ProfileBundle,
    Threshold,
    low_set,
    scheme_profiles,
    unpolarized_set,
)
from .sc_decoder import letter_llr, successive_cancellation

logger = logging.getLogger(__name__)

INFO, CHAINED, RANDOM, DETERMINED, OVERHEAD = range(5)
ROLE_NAMES = ("info", "chained", "random", "determined", "overhead")
LAYER_NAMES = ("U0", "U1", "U2")

# (target, conditioning, receiver) of every letter model the encoder and decoders use
MODEL_SPECS = {
    "enc0": ("V", (), None),
    "enc2": ("V2", ("V",), None),
    "enc1": ("V1", ("V", "V2"), None),
    "rx1_0": ("V", (), 1),
    "rx1_1": ("V1", ("V",), 1),
    "rx2_0": ("V", (), 2),
    "rx2_2": ("V2", ("V",), 2),
}


@dataclass(frozen=True, eq=False)
class BroadcastPolarCode:
    spec: BroadcastChannelSpec
    aux: AuxiliaryStructure
    n: int
    k: int
    thresholds: Threshold
    seed: int
    swapped: bool
    bundle: SetBundle
    schedule: ChainingSchedule
    roles: np.ndarray
    profiles: ProfileBundle
    common: IndexSet
    alignment: PairwiseAlignment
    backoff: float = 1.0
    bin_set_variant: str = BIN_SET_CONSISTENT
    models: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def frame_spec(self) -> BroadcastChannelSpec:
        return self.spec.swapped() if self.swapped else self.spec

    @property
    def frame_aux(self) -> AuxiliaryStructure:
        return self.aux.swapped() if self.swapped else self.aux

    def positions(self, layer: int, role: int) -> IndexSet:
        return IndexSet.from_mask(self.roles[layer] == role)

    def physical_receiver(self, internal: int) -> int:
        return 3 - internal if self.swapped else internal

    @property
    def reserves_first_block(self) -> bool:
        """With F1 non-empty the first U2 block carries no message, so receiver 1 can rebuild V2 there."""
        return len(self.schedule.f1) > 0

    def message_layout(self) -> Dict[str, List[Tuple[int, int, int]]]:
        """Internal-frame (block, layer, position) slots of every message, in fill order."""
        info0 = set(self.positions(0, INFO))
        b2 = set(self.schedule.b2)
        common = set(self.common)
        slots: Dict[str, List[Tuple[int, int, int]]] = {"m0": [], "m1": [], "m2": []}
        for j in range(self.k):
            for pos in sorted(info0 | b2):
                if pos in b2 and j == 0:
                    continue
                slots["m0" if pos in common else "m2"].append((j, 0, pos))
        for j in range(self.k):
            if not (j == 0 and self.reserves_first_block):
                slots["m2"].extend((j, 2, pos) for pos in self.positions(2, INFO))
            slots["m1"].extend((j, 1, pos) for pos in self.positions(1, INFO))
        return slots

    def message_lengths(self) -> Dict[str, int]:
        """Physical-frame message lengths."""
        slots = self.message_layout()
        m1, m2 = len(slots["m1"]), len(slots["m2"])
        if self.swapped:
            m1, m2 = m2, m1
        return {"m0": len(slots["m0"]), "m1": m1, "m2": m2}

    def rates(self) -> Dict[str, Fraction]:
        lengths = self.message_lengths()
        total = self.k * self.n
        return {f"R{i}": Fraction(lengths[f"m{i}"], total) for i in (0, 1, 2)}

    def accounting(self) -> RateAccounting:
        return rate_accounting(self.bundle, self.schedule, self.k, self.n)

    def overhead(self) -> int:
        return int(np.sum(self.roles == OVERHEAD))

    def role_counts(self) -> Dict[str, Dict[str, int]]:
        return {
            LAYER_NAMES[layer]: {ROLE_NAMES[r]: int(np.sum(self.roles[layer] == r)) for r in range(5)}
            for layer in range(3)
        }

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "seed": self.seed,
            "swapped": self.swapped,
            "thresholds": {"low": self.thresholds.low, "high": self.thresholds.high},
            "bin_set_variant": self.bin_set_variant,
            "backoff": self.backoff,
            "aux": self.aux.to_dict(),
            "channel": self.spec.name,
            "sets": self.bundle.to_dict(),
            "schedule": self.schedule.to_dict(),
            "roles": {
                LAYER_NAMES[layer]: [ROLE_NAMES[r] for r in self.roles[layer]] for layer in range(3)
            },
            "common": self.common.one_based(),
            "profile_methods": self.profiles.methods(),
            "rates": {key: float(value) for key, value in self.rates().items()},
            "accounting": self.accounting().to_dict(),
            "overhead": self.overhead(),
            "superposition_alignment": {
                "pairs": len(self.alignment.pairs),
                "unpaired": self.alignment.unpaired,
                "surplus_receiver1": len(self.alignment.surplus_a),
                "surplus_receiver2": len(self.alignment.surplus_b),
                "history": list(self.alignment.history),
            },
        }


def _backed_off(positions: IndexSet, reliability: np.ndarray, backoff: float) -> IndexSet:
    keep = int(math.floor(backoff * len(positions) + 1e-9))
    return IndexSet(positions.n, positions.ordered_by(reliability)[:keep])


def _layer_roles(n: int, info: IndexSet, chained: IndexSet, determined: IndexSet, overhead: IndexSet) -> np.ndarray:
    roles = np.full(n, RANDOM, dtype=np.int8)
    roles[overhead.mask()] = OVERHEAD
    roles[determined.mask()] = DETERMINED
    roles[chained.mask()] = CHAINED
    roles[info.mask()] = INFO
    return roles


def _letter_models(spec: BroadcastChannelSpec, aux: AuxiliaryStructure) -> Dict[str, np.ndarray]:
    models = {}
    for key, (target, conditioning, receiver) in MODEL_SPECS.items():
        if receiver is not None and not spec.is_classical:
            continue
        masses = letter_table(spec, aux, target, conditioning, receiver)
        models[key] = letter_llr(masses[0], masses[1])
    return models


def base_information(spec: BroadcastChannelSpec, aux: AuxiliaryStructure) -> Tuple[float, float]:
    """(I(V;B1), I(V;B2))."""
    return tuple(channel_I(induced_cq_channel(spec, aux, "V", r)) for r in (1, 2))


def build_code(
    spec: BroadcastChannelSpec,
    aux: AuxiliaryStructure,
    n: int,
    k: int,
    thresholds: Optional[Threshold] = None,
    seed: int = 0,
    *,
    construction_seed: Optional[int] = None,
    swap_roles: Optional[bool] = None,
    bin_set_variant: str = BIN_SET_CONSISTENT,
    backoff: float = 1.0,
    method: str = METHOD_AUTO,
    samples: Optional[int] = None,
    budget: Optional[SynthesisBudget] = None,
    profiles: Optional[ProfileBundle] = None,
) -> BroadcastPolarCode:
    """
    `profiles`, when given, are internal-frame profiles reused instead of being
    recomputed (e.g. when sweeping thresholds or backoff over one construction).
    """
    log2_length(n)
    if not 0.0 < backoff <= 1.0:
        raise ConfigError(f"backoff must lie in (0, 1], got {backoff}")
    thresholds = thresholds or Threshold.from_settings()
    budget = budget or SynthesisBudget.from_settings()
    construction_seed = seed if construction_seed is None else construction_seed

    iv1, iv2 = base_information(spec, aux)
    swapped = (iv1 > iv2 + 1e-12) if swap_roles is None else bool(swap_roles)
    frame_spec = spec.swapped() if swapped else spec
    frame_aux = aux.swapped() if swapped else aux
    logger.info(f"[Code] I(V;B1)={iv1:.4f} I(V;B2)={iv2:.4f} swapped={swapped} n={n} k={k}")

    if profiles is None:
        profiles = scheme_profiles(frame_spec, frame_aux, n, construction_seed, method, samples, budget)
    elif profiles.n != n:
        raise ConfigError(f"profiles were computed for n={profiles.n}, code asks for n={n}")
    bundle = derive_set_bundle(profiles.profiles, thresholds, bin_set_variant)
    schedule = build_schedule(bundle, k)

    def low(key):
        return low_set(profiles[key], thresholds)

    reliability0 = np.maximum(profiles["V|B1"].z, profiles["V|B2"].z)
    info0 = _backed_off(bundle.i_sup2 & bundle.i_v1, reliability0, backoff)
    roles0 = _layer_roles(n, info0, schedule.b2, low("V"), unpolarized_set(profiles["V"], thresholds))

    info2 = _backed_off(bundle.i_bin2, profiles["V2|V,B2"].z, backoff)
    roles2 = _layer_roles(n, info2, IndexSet(n), low("V2|V"), unpolarized_set(profiles["V2|V"], thresholds))

    chained1 = schedule.b1 | schedule.rbin | schedule.f1
    info1 = _backed_off(bundle.free_1 - chained1, profiles["V1|V,B1"].z, backoff)
    # every low-entropy U1 position is rounded at the encoder; only unpolarized ones take shared bits
    determined1 = (low("V1|V,V2") | bundle.bound_1) - chained1 - info1
    assigned1 = info1 | chained1 | determined1
    overhead1 = unpolarized_set(profiles["V1|V,V2"], thresholds) - assigned1
    roles1 = _layer_roles(n, info1, chained1, determined1, overhead1)

    code = BroadcastPolarCode(
        spec=spec,
        aux=aux,
        n=n,
        k=k,
        thresholds=thresholds,
        seed=seed,
        swapped=swapped,
        bundle=bundle,
        schedule=schedule,
        roles=np.vstack([roles0, roles1, roles2]),
        profiles=profiles,
        common=IndexSet(n),
        alignment=align_pairwise(bundle.i_v1, bundle.i_sup2, max(k - 1, 0)),
        backoff=backoff,
        bin_set_variant=bin_set_variant,
        models=_letter_models(frame_spec, frame_aux),
    )
    logger.info(f"[Code] rates={ {key: float(v) for key, v in code.rates().items()} } overhead={code.overhead()}")
    return code


def allocate_common(code: BroadcastPolarCode, common_bits: int) -> BroadcastPolarCode:
    """Move `common_bits` superposition positions per block to the common message."""
    if common_bits < 0:
        raise ConfigError("common_bits must be non-negative")
    info0 = code.positions(0, INFO)
    reliability = np.maximum(code.profiles["V|B1"].z, code.profiles["V|B2"].z)
    candidates = info0.ordered_by(reliability) + code.schedule.b2.ordered_by(code.profiles["V|B2"].z)
    if common_bits > len(candidates):
        raise CapacityExceededError(common_bits, len(candidates))
    if common_bits == 0:
        return code
    logger.info(f"[Code] common message takes {common_bits} of {len(candidates)} superposition positions")
    return replace(code, common=IndexSet(code.n, candidates[:common_bits]))


def _shared(code: BroadcastPolarCode, block: int, layer: int) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng([code.seed, block, layer])
    return rng.integers(0, 2, code.n, dtype=np.uint8), rng.random(code.n)


def _shared_bits_mask(code: BroadcastPolarCode, block: int) -> np.ndarray:
    """U1 positions filled with shared uniform bits: receiver 1 cannot reproduce rounding there."""
    roles1 = code.roles[1]
    mask = (roles1 == RANDOM) | (roles1 == OVERHEAD)
    if block == code.k - 1:
        mask |= code.schedule.b1.mask() | code.schedule.rbin.mask()
    return mask


def _sc_layer(
    llr: np.ndarray,
    fixed: np.ndarray,
    rounding: np.ndarray,
    uniforms: np.ndarray,
    rounding_row: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    fixed[i] >= 0 pins position i; rounding[i] reproduces randomized rounding from the
    LLR row `rounding_row`; every other position takes the MAP decision of row 0.
    """
    rows = np.atleast_2d(llr)

    def decide(i: int, column: np.ndarray) -> np.ndarray:
        if fixed[i] >= 0:
            bit = fixed[i]
        elif rounding[i]:
            bit = int(uniforms[i] < expit(-column[rounding_row]))
        else:
            bit = int(column[0] < 0)
        return np.full(column.shape, bit, dtype=np.uint8)

    u, x = successive_cancellation(rows, decide)
    return u[0], x[0]


def _split_messages(code: BroadcastPolarCode, m1, m2, m0) -> Dict[str, np.ndarray]:
    """Physical messages to internal-frame messages, with length checks."""
    lengths = code.message_lengths()
    given = {"m0": m0, "m1": m1, "m2": m2}
    messages = {}
    for name, value in given.items():
        bits = np.zeros(0, dtype=np.uint8) if value is None else np.asarray(value, dtype=np.uint8).ravel()
        if bits.size != lengths[name]:
            raise ConfigError(f"{name} has {bits.size} bits, code expects {lengths[name]}")
        messages[name] = bits
    if code.swapped:
        messages["m1"], messages["m2"] = messages["m2"], messages["m1"]
    return messages


def _encode_layers(code: BroadcastPolarCode, messages: Dict[str, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    n, k = code.n, code.k
    fixed = np.full((3, k, n), -1, dtype=np.int16)
    for name, slots in code.message_layout().items():
        for (j, layer, pos), bit in zip(slots, messages[name]):
            fixed[layer, j, pos] = bit
    shared = {(j, layer): _shared(code, j, layer) for j in range(k) for layer in range(3)}
    u = np.zeros((3, k, n), dtype=np.uint8)
    letters = np.zeros((3, k, n), dtype=np.uint8)
    b1_pairs, rbin_pairs = code.schedule.b1_pairs(), code.schedule.rbin_pairs()

    # U0 and U2, forward; positions without a message are rounded from the shared uniforms
    for j in range(k):
        pins = fixed[0, j]
        llr = np.broadcast_to(code.models["enc0"][0, 0], (1, n))
        u[0, j], letters[0, j] = _sc_layer(llr, pins, pins < 0, shared[(j, 0)][1], 0)
    for j in range(k):
        pins = fixed[2, j]
        llr = code.models["enc2"][letters[0, j], 0][None, :]
        u[2, j], letters[2, j] = _sc_layer(llr, pins, pins < 0, shared[(j, 2)][1], 0)

    # U1, backward so chained content of block j+1 is known
    for j in range(k - 1, -1, -1):
        bits, _ = shared[(j, 1)]
        pins = fixed[1, j].copy()
        free = _shared_bits_mask(code, j)
        pins[free] = bits[free]
        if j < k - 1:
            for b1_pos, b2_pos in b1_pairs:
                pins[b1_pos] = u[0, j + 1, b2_pos]
            for r_pos, f_pos in rbin_pairs:
                pins[r_pos] = u[1, j + 1, f_pos]
        side = letters[0, j].astype(np.int64) * 2 + letters[2, j]
        llr = code.models["enc1"][side, 0][None, :]
        u[1, j], letters[1, j] = _sc_layer(llr, pins, pins < 0, shared[(j, 1)][1], 0)

    x_map = code.frame_aux.x_map()
    x = x_map[letters[0], letters[1], letters[2]]
    return u, x.reshape(-1)


def encode(code: BroadcastPolarCode, m1, m2, m0=None, randomness: Optional[int] = None) -> np.ndarray:
    """Channel inputs x^{kn}. `randomness` replaces the code's shared seed."""
    if randomness is not None and randomness != code.seed:
        code = replace(code, seed=int(randomness))
    _, x = _encode_layers(code, _split_messages(code, m1, m2, m0))
    return x


def _collect(code: BroadcastPolarCode, u: np.ndarray, name: str) -> np.ndarray:
    slots = code.message_layout()[name]
    return np.array([u[layer, j, pos] for j, layer, pos in slots], dtype=np.uint8)


def _decode_internal1(code: BroadcastPolarCode, y: np.ndarray) -> np.ndarray:
    """
    Binning receiver: U0 then U1, blocks forward. In block 0 with F1 non-empty the
    message-free U2 layer is rebuilt from V so U1 rounding can be reproduced.
    """
    if "rx1_0" not in code.models:
        raise ConfigError("operational decoding needs a classical channel")
    n, k = code.n, code.k
    y = np.asarray(y, dtype=np.int64).reshape(k, n)
    u = np.zeros((3, k, n), dtype=np.uint8)
    b1_pairs, rbin_pairs = code.schedule.b1_pairs(), code.schedule.rbin_pairs()
    unpinned = np.full(n, -1, dtype=np.int16)
    for j in range(k):
        _, uniforms0 = _shared(code, j, 0)
        pins = unpinned.copy()
        if j > 0:
            for b1_pos, b2_pos in b1_pairs:
                pins[b2_pos] = u[1, j - 1, b1_pos]
        llr = np.vstack([code.models["rx1_0"][0, y[j]], np.broadcast_to(code.models["enc0"][0, 0], (n,))])
        u[0, j], v_letters = _sc_layer(llr, pins, code.roles[0] != INFO, uniforms0, 1)

        rows = [code.models["rx1_1"][v_letters, y[j]]]
        rounding = np.zeros(n, dtype=bool)
        if j == 0 and code.reserves_first_block:
            _, uniforms2 = _shared(code, 0, 2)
            llr2 = code.models["enc2"][v_letters, 0][None, :]
            u[2, 0], v2_letters = _sc_layer(llr2, unpinned, np.ones(n, dtype=bool), uniforms2, 0)
            side = v_letters.astype(np.int64) * 2 + v2_letters
            rows.append(code.models["enc1"][side, 0])
            rounding = (code.roles[1] == DETERMINED) | code.schedule.f1.mask()

        bits1, uniforms1 = _shared(code, j, 1)
        pins = unpinned.copy()
        free = _shared_bits_mask(code, j)
        pins[free] = bits1[free]
        if j > 0:
            for r_pos, f_pos in rbin_pairs:
                pins[f_pos] = u[1, j - 1, r_pos]
        u[1, j], _ = _sc_layer(np.vstack(rows), pins, rounding, uniforms1, len(rows) - 1)
    return u


def _decode_internal2(code: BroadcastPolarCode, y: np.ndarray) -> np.ndarray:
    """Superposition receiver: U0 then U2, blocks backward; rounding is reproduced off the message slots."""
    if "rx2_0" not in code.models:
        raise ConfigError("operational decoding needs a classical channel")
    n, k = code.n, code.k
    y = np.asarray(y, dtype=np.int64).reshape(k, n)
    u = np.zeros((3, k, n), dtype=np.uint8)
    unpinned = np.full(n, -1, dtype=np.int16)
    b2 = code.schedule.b2.mask()
    for j in range(k - 1, -1, -1):
        _, uniforms0 = _shared(code, j, 0)
        decoded0 = (code.roles[0] == INFO) | (b2 if j > 0 else False)
        llr = np.vstack([code.models["rx2_0"][0, y[j]], np.broadcast_to(code.models["enc0"][0, 0], (n,))])
        u[0, j], v_letters = _sc_layer(llr, unpinned, ~decoded0, uniforms0, 1)

        _, uniforms2 = _shared(code, j, 2)
        decoded2 = code.roles[2] == INFO
        if j == 0 and code.reserves_first_block:
            decoded2 = np.zeros(n, dtype=bool)
        llr = np.vstack([code.models["rx2_2"][v_letters, y[j]], code.models["enc2"][v_letters, 0]])
        u[2, j], _ = _sc_layer(llr, unpinned, ~decoded2, uniforms2, 1)
    return u


def _decode(code: BroadcastPolarCode, y: np.ndarray, internal: int) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    if internal == 1:
        u = _decode_internal1(code, y)
        private = _collect(code, u, "m1")
    else:
        u = _decode_internal2(code, y)
        private = _collect(code, u, "m2")
    common = _collect(code, u, "m0") if len(code.common) else None
    return private, common


def decode_receiver1(code: BroadcastPolarCode, y1) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """(m1, m0) estimates from the first receiver's outputs."""
    return _decode(code, y1, 2 if code.swapped else 1)


def decode_receiver2(code: BroadcastPolarCode, y2) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """(m2, m0) estimates from the second receiver's outputs."""
    return _decode(code, y2, 1 if code.swapped else 2)


@dataclass(frozen=True, eq=False)
class TransmissionRecord:
    trial: int
    messages: Dict[str, np.ndarray]
    layers: np.ndarray
    x: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    decoded: Dict[str, np.ndarray]

    @property
    def m1_ok(self) -> bool:
        return bool(np.array_equal(self.messages["m1"], self.decoded["m1"]))

    @property
    def m2_ok(self) -> bool:
        return bool(np.array_equal(self.messages["m2"], self.decoded["m2"]))

    @property
    def m0_ok(self) -> Optional[bool]:
        if self.messages["m0"].size == 0:
            return None
        return bool(
            np.array_equal(self.messages["m0"], self.decoded["m0_receiver1"])
            and np.array_equal(self.messages["m0"], self.decoded["m0_receiver2"])
        )

    def row(self) -> Tuple[int, int, int, str]:
        m0 = "" if self.m0_ok is None else str(int(self.m0_ok))
        return self.trial, int(self.m1_ok), int(self.m2_ok), m0


def simulate_trial(code: BroadcastPolarCode, trial: int, noise_seed: int) -> TransmissionRecord:
    rng = np.random.default_rng([noise_seed, trial])
    lengths = code.message_lengths()
    messages = {name: rng.integers(0, 2, lengths[name], dtype=np.uint8) for name in ("m0", "m1", "m2")}
    internal = _split_messages(code, messages["m1"], messages["m2"], messages["m0"])
    layers, x = _encode_layers(code, internal)
    y1, y2 = code.spec.transmit(x, rng)
    m1_hat, m0_first = decode_receiver1(code, y1)
    m2_hat, m0_second = decode_receiver2(code, y2)
    empty = np.zeros(0, dtype=np.uint8)
    decoded = {
        "m1": m1_hat,
        "m2": m2_hat,
        "m0_receiver1": empty if m0_first is None else m0_first,
        "m0_receiver2": empty if m0_second is None else m0_second,
    }
    return TransmissionRecord(trial, messages, layers, x, y1, y2, decoded)


@dataclass(frozen=True)
class ErrorBound:
    per_layer: Dict[Tuple[int, str], float]
    determined: Dict[Tuple[int, str], float]
    blocks: int

    def receiver_total(self, receiver: int) -> float:
        return sum(v for (r, _), v in self.per_layer.items() if r == receiver)

    def rows(self) -> List[Tuple[int, str, float, float]]:
        return [
            (r, layer, value, self.determined.get((r, layer), 0.0))
            for (r, layer), value in sorted(self.per_layer.items())
        ]


def union_bound(profile: PolarizationProfile, positions: IndexSet) -> float:
    return float(sum(profile.z[i] for i in positions))


def analyze_error_bound(code: BroadcastPolarCode, spec: Optional[BroadcastChannelSpec] = None) -> ErrorBound:
    """
    Per-block SC union bound: Σ Z over every position each receiver decodes by MAP, per layer.
    The U1 total includes the DETERMINED positions; `determined` reports their share.
    """
    profiles = code.profiles
    if not profiles.exact:
        spec = spec or code.spec
        frame_spec = spec.swapped() if code.swapped else spec
        profiles = scheme_profiles(frame_spec, code.frame_aux, code.n, code.seed, METHOD_EXACT)
    info0 = code.positions(0, INFO)
    info1 = code.positions(1, INFO)
    info2 = code.positions(2, INFO)
    determined1 = code.positions(1, DETERMINED)
    decoded1 = info1 | code.schedule.b1 | code.schedule.rbin | determined1
    a, b = code.physical_receiver(1), code.physical_receiver(2)
    per_layer = {
        (a, "U0"): union_bound(profiles["V|B1"], info0),
        (a, "U1"): union_bound(profiles["V1|V,B1"], decoded1),
        (b, "U0"): union_bound(profiles["V|B2"], info0 | code.schedule.b2),
        (b, "U2"): union_bound(profiles["V2|V,B2"], info2),
    }
    determined = {(a, "U1"): union_bound(profiles["V1|V,B1"], determined1)}
    logger.info(f"[Bound] receiver{a}={sum(v for (r, _), v in per_layer.items() if r == a):.3e} "
                f"receiver{b}={sum(v for (r, _), v in per_layer.items() if r == b):.3e}")
    return ErrorBound(per_layer, determined, code.k)
