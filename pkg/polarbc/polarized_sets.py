"""
Per-index Bhattacharyya profiles and the high/low index sets derived from them.

정확 계산(channel_synthesis)을 우선 시도하고, 고전 채널이 예산을 넘으면
genie-aided SC 몬테카를로 추정으로 넘어간다. 양자 채널은 추정하지 않는다.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from django.conf import settings

from .auxiliary import AuxiliaryStructure, BroadcastChannelSpec, induced_cq_channel
from .channel_synthesis import CLASSICAL, HybridChannel, SynthesisBudget, exact_profile
from .exceptions import BudgetExceededError, ConfigError
from .polar_transform import log2_length, polar_encode
from .quantum_core import ClassicalChannelTable, CqEnsemble
from .sc_decoder import bhattacharyya_from_llr, letter_llr, successive_cancellation

logger = logging.getLogger(__name__)

METHOD_EXACT = "exact"
METHOD_MONTE_CARLO = "monte-carlo"
METHOD_AUTO = "auto"

MC_CHUNK = 512
Z_DRIFT = 1e-9

# key: (target, conditioning, receiver)
PROFILE_SPECS: Dict[str, Tuple[str, Tuple[str, ...], Optional[int]]] = {
    "V": ("V", (), None),
    "V|B1": ("V", (), 1),
    "V|B2": ("V", (), 2),
    "V1|V": ("V1", ("V",), None),
    "V2|V": ("V2", ("V",), None),
    "V1|V,B1": ("V1", ("V",), 1),
    "V2|V,B2": ("V2", ("V",), 2),
    "V1|V,V2": ("V1", ("V", "V2"), None),
}


@dataclass(frozen=True)
class Threshold:
    low: float = 0.01
    high: float = 0.99

    def __post_init__(self):
        if not (0.0 < self.low <= self.high < 1.0):
            raise ConfigError(f"thresholds must satisfy 0 < low <= high < 1, got ({self.low}, {self.high})")

    @classmethod
    def from_settings(cls) -> "Threshold":
        return cls(
            low=getattr(settings, "POLARBC_THRESHOLD_LOW", 0.01),
            high=getattr(settings, "POLARBC_THRESHOLD_HIGH", 0.99),
        )


@dataclass(frozen=True)
class IndexSet:
    """Sorted distinct zero-based positions of a length-n block."""

    n: int
    indices: Tuple[int, ...] = ()

    def __post_init__(self):
        values = tuple(sorted({int(i) for i in self.indices}))
        if values and (values[0] < 0 or values[-1] >= self.n):
            raise ValueError(f"indices out of range [0, {self.n})")
        object.__setattr__(self, "indices", values)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "IndexSet":
        mask = np.asarray(mask, dtype=bool)
        return cls(mask.size, tuple(np.flatnonzero(mask)))

    @classmethod
    def from_one_based(cls, n: int, indices: Iterable[int]) -> "IndexSet":
        return cls(n, tuple(int(i) - 1 for i in indices))

    @classmethod
    def full(cls, n: int) -> "IndexSet":
        return cls(n, tuple(range(n)))

    def _same_n(self, other: "IndexSet") -> None:
        if other.n != self.n:
            raise ConfigError(f"index sets of different blocklengths ({self.n} vs {other.n})")

    def __and__(self, other: "IndexSet") -> "IndexSet":
        self._same_n(other)
        return IndexSet(self.n, tuple(set(self.indices) & set(other.indices)))

    def __or__(self, other: "IndexSet") -> "IndexSet":
        self._same_n(other)
        return IndexSet(self.n, self.indices + other.indices)

    def __sub__(self, other: "IndexSet") -> "IndexSet":
        self._same_n(other)
        return IndexSet(self.n, tuple(set(self.indices) - set(other.indices)))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, i) -> bool:
        return int(i) in set(self.indices)

    def mask(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        out[list(self.indices)] = True
        return out

    def one_based(self) -> List[int]:
        return [i + 1 for i in self.indices]

    def ordered_by(self, values: np.ndarray) -> Tuple[int, ...]:
        """Positions sorted by ascending value, ties by position."""
        return tuple(sorted(self.indices, key=lambda i: (float(values[i]), i)))


@dataclass(frozen=True, eq=False)
class PolarizationProfile:
    z: np.ndarray
    method: str = METHOD_EXACT
    samples: int = 0
    half_width: Optional[np.ndarray] = None
    context: str = "none"

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        log2_length(z.size)
        if z.size and (z.min() < -Z_DRIFT or z.max() > 1.0 + Z_DRIFT):
            raise ValueError("profile values must lie in [0, 1]")
        z = np.clip(z, 0.0, 1.0)
        z.setflags(write=False)
        object.__setattr__(self, "z", z)
        if self.method == METHOD_MONTE_CARLO and self.samples <= 0:
            raise ValueError("monte-carlo profiles need a positive sample count")

    @property
    def n(self) -> int:
        return self.z.size


def high_set(p: PolarizationProfile, t: Threshold) -> IndexSet:
    return IndexSet.from_mask(p.z >= t.high)


def low_set(p: PolarizationProfile, t: Threshold) -> IndexSet:
    return IndexSet.from_mask(p.z <= t.low)


def unpolarized_set(p: PolarizationProfile, t: Threshold) -> IndexSet:
    return IndexSet.from_mask((p.z > t.low) & (p.z < t.high))


def polarization_statistic(p: Union[PolarizationProfile, np.ndarray]) -> float:
    """Mean of Z(1−Z); zero exactly when fully polarized."""
    z = p.z if isinstance(p, PolarizationProfile) else np.asarray(p, dtype=float)
    return float(np.mean(z * (1.0 - z)))


def monte_carlo_profile(
    joint: np.ndarray,
    n: int,
    samples: int,
    seed,
    context: str = "none",
) -> PolarizationProfile:
    """
    Empirical E[2√(P(0|·)P(1|·))] of every synthesized position, from genie-aided SC
    runs over letters (t, o) drawn from the joint table a[t, o].
    """
    log2_length(n)
    if samples <= 0:
        raise ConfigError("monte-carlo sample count must be positive")
    joint = np.asarray(joint, dtype=float)
    m = joint.shape[1]
    flat = joint.ravel() / joint.sum()
    llr_of_symbol = letter_llr(joint[0], joint[1])
    rng = np.random.default_rng(seed)
    total = np.zeros(n)
    total_sq = np.zeros(n)
    done = 0
    while done < samples:
        rows = min(MC_CHUNK, samples - done)
        cells = rng.choice(flat.size, size=(rows, n), p=flat)
        letters, symbols = cells // m, cells % m
        truth = polar_encode(letters.astype(np.uint8))
        z_rows = np.zeros((rows, n))

        def genie(i: int, column: np.ndarray) -> np.ndarray:
            z_rows[:, i] = bhattacharyya_from_llr(column)
            return truth[:, i]

        successive_cancellation(llr_of_symbol[symbols], genie)
        total += z_rows.sum(axis=0)
        total_sq += (z_rows ** 2).sum(axis=0)
        done += rows
    mean = total / samples
    variance = np.clip(total_sq / samples - mean ** 2, 0.0, None)
    half_width = np.maximum(1.96 * np.sqrt(variance / samples), 1.0 / samples)
    logger.info(f"[Profile] monte-carlo n={n} samples={samples} context={context}")
    return PolarizationProfile(mean, METHOD_MONTE_CARLO, samples, half_width, context)


def profile_of_channel(
    channel: HybridChannel,
    n: int,
    method: str = METHOD_AUTO,
    samples: Optional[int] = None,
    seed=0,
    context: str = "none",
) -> PolarizationProfile:
    if samples is None:
        samples = getattr(settings, "POLARBC_MC_SAMPLES", 2000)
    if method == METHOD_MONTE_CARLO:
        if channel.kind != CLASSICAL:
            raise ConfigError("monte-carlo profiles are only available for classical payloads")
        return monte_carlo_profile(channel.joint_table(), n, samples, seed, context)
    if method not in (METHOD_EXACT, METHOD_AUTO):
        raise ConfigError(f"unknown profile method '{method}'")
    try:
        return PolarizationProfile(exact_profile(channel, n), METHOD_EXACT, context=context)
    except BudgetExceededError as exc:
        if method == METHOD_EXACT or channel.kind != CLASSICAL:
            raise
        logger.warning(f"[Profile] exact synthesis over budget ({exc}); estimating context={context}")
        return monte_carlo_profile(channel.joint_table(), n, samples, seed, context)


def source_profile(
    p_one: float, n: int, budget: Optional[SynthesisBudget] = None, **kwargs
) -> PolarizationProfile:
    """Z(U_i | U^{i−1}) for U^n = V^n G_n with V ~ Bernoulli(p_one)."""
    budget = budget or SynthesisBudget.from_settings()
    channel = HybridChannel.from_table((1.0 - p_one, p_one), [[1.0], [1.0]], budget)
    kwargs.setdefault("context", "none")
    return profile_of_channel(channel, n, **kwargs)


def channel_profile(
    channel: Union[CqEnsemble, ClassicalChannelTable],
    n: int,
    prior: Tuple[float, float] = (0.5, 0.5),
    budget: Optional[SynthesisBudget] = None,
    **kwargs,
) -> PolarizationProfile:
    """Z(U_i | U^{i−1}, B^n) for a binary-input channel under the given prior."""
    budget = budget or SynthesisBudget.from_settings()
    if isinstance(channel, CqEnsemble):
        hybrid = HybridChannel.from_ensemble(channel, budget)
        kwargs.setdefault("context", "quantum output")
    else:
        hybrid = HybridChannel.from_table(prior, channel.rows, budget)
        kwargs.setdefault("context", "classical output")
    return profile_of_channel(hybrid, n, **kwargs)


def _context_label(conditioning: Sequence[str], receiver: Optional[int], spec: BroadcastChannelSpec) -> str:
    output = None
    if receiver is not None:
        output = "classical output" if spec.is_classical else "quantum output"
    if conditioning and output:
        return "both"
    if conditioning:
        return "classical side vars"
    return output or "none"


def conditional_profile(
    spec: BroadcastChannelSpec,
    aux: AuxiliaryStructure,
    target: str,
    conditioning: Sequence[str],
    receiver: Optional[int],
    n: int,
    budget: Optional[SynthesisBudget] = None,
    **kwargs,
) -> PolarizationProfile:
    budget = budget or SynthesisBudget.from_settings()
    channel = induced_cq_channel(spec, aux, target, receiver, tuple(conditioning), budget)
    kwargs.setdefault("context", _context_label(conditioning, receiver, spec))
    return profile_of_channel(channel, n, **kwargs)


@dataclass(frozen=True, eq=False)
class ProfileBundle:
    n: int
    profiles: Mapping[str, PolarizationProfile] = field(default_factory=dict)

    def __getitem__(self, key: str) -> PolarizationProfile:
        return self.profiles[key]

    def methods(self) -> Dict[str, str]:
        return {key: p.method for key, p in self.profiles.items()}

    @property
    def exact(self) -> bool:
        return all(p.method == METHOD_EXACT for p in self.profiles.values())


def scheme_profiles(
    spec: BroadcastChannelSpec,
    aux: AuxiliaryStructure,
    n: int,
    seed: int = 0,
    method: str = METHOD_AUTO,
    samples: Optional[int] = None,
    budget: Optional[SynthesisBudget] = None,
) -> ProfileBundle:
    """All profiles the construction needs, with one seeded MC stream per profile."""
    profiles = {}
    for position, (key, (target, conditioning, receiver)) in enumerate(PROFILE_SPECS.items()):
        profiles[key] = conditional_profile(
            spec, aux, target, conditioning, receiver, n,
            budget=budget, method=method, samples=samples, seed=[seed, position],
        )
        logger.debug(f"[Profile] {key} method={profiles[key].method}")
    return ProfileBundle(n, profiles)


def profile_rows(profile: PolarizationProfile) -> List[Tuple[int, float, str, float]]:
    half = profile.half_width if profile.half_width is not None else np.zeros(profile.n)
    return [(i + 1, float(z), profile.method, float(h)) for i, (z, h) in enumerate(zip(profile.z, half))]
