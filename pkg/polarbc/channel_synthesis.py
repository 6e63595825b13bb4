"""
Channel combining and splitting on hybrid (classical prefix + payload) channels.

Branches keep joint masses a_u = P(label, U=u) · out_u, so a synthesized channel
never needs a separate prior: minus/plus act directly on the masses.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from scipy.linalg import svdvals
from scipy.special import xlogy

from .exceptions import BudgetExceededError, InvalidStateError
from .polar_transform import log2_length, polar_encode
from .quantum_core import (
    CqEnsemble,
    binary_entropy,
    clamped_spectrum,
    matrix_sqrt,
    spectrum_entropy,
)

logger = logging.getLogger(__name__)

QUANTUM = "quantum"
CLASSICAL = "classical"

MASS_TOL = 1e-10
SUPPORT_TOL = 1e-13
RATIO_DIGITS = 12


@dataclass(frozen=True)
class SynthesisBudget:
    max_dimension: int = 4096
    max_branches: int = 4096

    def __post_init__(self):
        if self.max_dimension < 1 or self.max_branches < 1:
            raise ValueError("synthesis budget must be positive")

    @classmethod
    def from_settings(cls) -> "SynthesisBudget":
        return cls(
            max_dimension=getattr(settings, "POLARBC_SYNTHESIS_MAX_DIMENSION", 4096),
            max_branches=getattr(settings, "POLARBC_SYNTHESIS_MAX_BRANCHES", 4096),
        )

    @property
    def capacity(self) -> int:
        return self.max_dimension * self.max_branches

    def check(self, dimension: int, branches: int, depth: int) -> None:
        if dimension > self.max_dimension:
            raise BudgetExceededError(dimension, self.max_dimension, depth)
        if branches > self.max_branches:
            raise BudgetExceededError(branches, self.max_branches, depth)


@dataclass(frozen=True, eq=False)
class HybridBranch:
    label: Tuple[int, ...]
    mass0: np.ndarray
    mass1: np.ndarray

    @property
    def weight(self) -> float:
        return float(np.real(_total(self.mass0) + _total(self.mass1)))


def _total(mass: np.ndarray) -> float:
    return float(np.real(np.trace(mass))) if mass.ndim == 2 else float(mass.sum())


@dataclass(frozen=True, eq=False)
class HybridChannel:
    kind: str
    branches: Tuple[HybridBranch, ...]
    budget: SynthesisBudget = SynthesisBudget()
    depth: int = 0

    def __post_init__(self):
        if self.kind not in (QUANTUM, CLASSICAL):
            raise InvalidStateError(f"unknown payload kind '{self.kind}'")
        if not self.branches:
            raise InvalidStateError("hybrid channel needs at least one branch")
        shapes = {b.mass0.shape for b in self.branches} | {b.mass1.shape for b in self.branches}
        if len(shapes) != 1:
            raise InvalidStateError(f"branch payloads differ in shape: {sorted(shapes)}")
        total = sum(b.weight for b in self.branches)
        if abs(total - 1.0) > MASS_TOL:
            raise InvalidStateError(f"branch weights sum to {total:.12f}, expected 1")

    @classmethod
    def from_ensemble(cls, e: CqEnsemble, budget: Optional[SynthesisBudget] = None) -> "HybridChannel":
        branch = HybridBranch((), e.p0 * e.rho0.entries, e.p1 * e.rho1.entries)
        return cls(QUANTUM, (branch,), budget or SynthesisBudget())

    @classmethod
    def from_table(cls, prior: Tuple[float, float], rows, budget: Optional[SynthesisBudget] = None) -> "HybridChannel":
        rows = np.asarray(rows, dtype=float)
        branch = HybridBranch((), prior[0] * rows[0], prior[1] * rows[1])
        return cls(CLASSICAL, (branch,), budget or SynthesisBudget()).merged()

    @property
    def prior(self) -> Tuple[float, float]:
        p0 = sum(_total(b.mass0) for b in self.branches)
        p1 = sum(_total(b.mass1) for b in self.branches)
        return p0, p1

    @property
    def dimension(self) -> int:
        return self.branches[0].mass0.shape[0]

    def joint_table(self) -> np.ndarray:
        """(2, m) joint masses of (U, output) for a classical payload."""
        if self.kind != CLASSICAL:
            raise InvalidStateError("joint table only exists for classical payloads")
        return np.vstack([self.branches[0].mass0, self.branches[0].mass1])

    def is_pure_state(self, tol: float = 1e-10) -> bool:
        if self.kind != QUANTUM or len(self.branches) != 1:
            return False
        p0, p1 = self.prior
        if abs(p0 - 0.5) > 1e-12 or abs(p1 - 0.5) > 1e-12:
            return False
        branch = self.branches[0]
        return all(int(np.sum(clamped_spectrum(m) > tol)) == 1 for m in (branch.mass0, branch.mass1))

    def is_determined(self) -> bool:
        """Every branch fixes the input: all synthesized Z are 0."""
        return all(min(_total(b.mass0), _total(b.mass1)) <= MASS_TOL for b in self.branches)

    def classical_reduction(self) -> Optional["HybridChannel"]:
        """Drop a quantum payload that is the same state for both inputs in every branch."""
        if self.kind != QUANTUM:
            return None
        labels = []
        for b in self.branches:
            w0, w1 = _total(b.mass0), _total(b.mass1)
            if np.max(np.abs(w1 * b.mass0 - w0 * b.mass1)) > MASS_TOL:
                return None
            labels.append((w0, w1))
        masses = np.asarray(labels)
        return HybridChannel(CLASSICAL, (HybridBranch((), masses[:, 0], masses[:, 1]),), self.budget, self.depth).merged()

    def merged(self) -> "HybridChannel":
        """Exact compression: classical symbols by likelihood ratio, quantum blocks to their support."""
        if self.kind == CLASSICAL:
            a0, a1 = self.branches[0].mass0, self.branches[0].mass1
            total = a0 + a1
            keep = total > 0
            a0, a1, total = a0[keep], a1[keep], total[keep]
            ratio = np.round(a1 / total, RATIO_DIGITS)
            classes, inverse = np.unique(ratio, return_inverse=True)
            m0 = np.bincount(inverse, weights=a0, minlength=classes.size)
            m1 = np.bincount(inverse, weights=a1, minlength=classes.size)
            return HybridChannel(CLASSICAL, (HybridBranch((), m0, m1),), self.budget, self.depth)
        compressed = []
        for b in self.branches:
            support = b.mass0 + b.mass1
            eigenvalues, vectors = np.linalg.eigh((support + support.conj().T) / 2)
            cut = SUPPORT_TOL * max(float(eigenvalues.max()), SUPPORT_TOL)
            basis = vectors[:, eigenvalues > cut]
            if basis.shape[1] == 0:
                continue
            compressed.append(b if basis.shape[1] == b.mass0.shape[0] else HybridBranch(
                b.label, basis.conj().T @ b.mass0 @ basis, basis.conj().T @ b.mass1 @ basis))
        width = max(c.mass0.shape[0] for c in compressed)
        padded = tuple(_pad_branch(c, width) for c in compressed)
        return HybridChannel(QUANTUM, padded, self.budget, self.depth)


def _pad_branch(b: HybridBranch, width: int) -> HybridBranch:
    d = b.mass0.shape[0]
    if d == width:
        return b
    pad = ((0, width - d), (0, width - d))
    return HybridBranch(b.label, np.pad(b.mass0, pad), np.pad(b.mass1, pad))


def _combine(a: np.ndarray, b: np.ndarray, kind: str) -> np.ndarray:
    return np.kron(a, b) if kind == QUANTUM else np.outer(a, b).ravel()


def _check_growth(W: HybridChannel, branches: int) -> None:
    depth = W.depth + 1
    if W.kind == CLASSICAL:
        required = 2 * W.dimension ** 2
        if required > W.budget.capacity:
            raise BudgetExceededError(required, W.budget.capacity, depth)
        return
    W.budget.check(W.dimension ** 2, branches, depth)


def split_minus(W: HybridChannel) -> HybridChannel:
    """Synthesized channel seen by u1 when (u1⊕u2, u2) is sent over two copies of W."""
    _check_growth(W, len(W.branches) ** 2)
    branches: List[HybridBranch] = []
    for x in W.branches:
        for y in W.branches:
            a0 = _combine(x.mass0, y.mass0, W.kind) + _combine(x.mass1, y.mass1, W.kind)
            a1 = _combine(x.mass1, y.mass0, W.kind) + _combine(x.mass0, y.mass1, W.kind)
            branches.append(HybridBranch(x.label + y.label, a0, a1))
    return HybridChannel(W.kind, tuple(branches), W.budget, W.depth + 1).merged()


def split_plus(W: HybridChannel) -> HybridChannel:
    """Synthesized channel seen by u2 given u1 and both outputs."""
    _check_growth(W, 2 * len(W.branches) ** 2)
    if W.kind == CLASSICAL:
        x = W.branches[0]
        a0 = np.concatenate([_combine(x.mass0, x.mass0, W.kind), _combine(x.mass1, x.mass0, W.kind)])
        a1 = np.concatenate([_combine(x.mass1, x.mass1, W.kind), _combine(x.mass0, x.mass1, W.kind)])
        return HybridChannel(W.kind, (HybridBranch((), a0, a1),), W.budget, W.depth + 1).merged()
    branches: List[HybridBranch] = []
    for u1 in (0, 1):
        for x in W.branches:
            for y in W.branches:
                first = (x.mass0, x.mass1)
                a0 = _combine(first[u1], y.mass0, W.kind)
                a1 = _combine(first[u1 ^ 1], y.mass1, W.kind)
                branches.append(HybridBranch(x.label + y.label + (u1,), a0, a1))
    return HybridChannel(W.kind, tuple(branches), W.budget, W.depth + 1).merged()


def synthesize(W: HybridChannel, N: int, i: int) -> HybridChannel:
    """W_N^(i), one-based i, following the bits of i−1 from the most significant."""
    n = log2_length(N)
    if not 1 <= i <= N:
        raise ValueError(f"index {i} outside [1, {N}]")
    channel = W
    for bit in range(n - 1, -1, -1):
        channel = split_plus(channel) if ((i - 1) >> bit) & 1 else split_minus(channel)
    return channel


def channel_Z(W: HybridChannel) -> float:
    if W.kind == CLASSICAL:
        b = W.branches[0]
        value = 2.0 * np.sqrt(b.mass0 * b.mass1).sum()
    else:
        value = 2.0 * sum(
            svdvals(matrix_sqrt(b.mass0) @ matrix_sqrt(b.mass1)).sum() for b in W.branches
        )
    return float(np.clip(value, 0.0, 1.0))


def channel_conditional_entropy(W: HybridChannel) -> float:
    """H(U | label, output)."""
    if W.kind == CLASSICAL:
        b = W.branches[0]
        joint = -xlogy(b.mass0, b.mass0).sum() - xlogy(b.mass1, b.mass1).sum()
        marginal = -xlogy(b.mass0 + b.mass1, b.mass0 + b.mass1).sum()
        return float(max((joint - marginal) / np.log(2.0), 0.0))
    joint = sum(spectrum_entropy(clamped_spectrum(b.mass0)) + spectrum_entropy(clamped_spectrum(b.mass1))
                for b in W.branches)
    marginal = sum(spectrum_entropy(clamped_spectrum(b.mass0 + b.mass1)) for b in W.branches)
    return float(max(joint - marginal, 0.0))


def channel_I(W: HybridChannel) -> float:
    p0, _ = W.prior
    return float(max(binary_entropy(p0) - channel_conditional_entropy(W), 0.0))


def walsh_hadamard(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float, copy=True)
    n = out.shape[-1]
    half = 1
    while half < n:
        view = out.reshape(-1, 2, half)
        a = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = a - view[:, 1, :]
        half *= 2
    return out


def pure_state_statistics(overlap: float, N: int, index: int, budget: SynthesisBudget) -> Tuple[float, float]:
    """
    (Z, I) of W_N^(index) (zero-based) for a uniform-input pure-state channel with
    |<ψ0|ψ1>| = overlap. The Gram matrix of the future-bit codewords is a group
    convolution, so its spectrum is the Walsh–Hadamard transform of overlap^weight.
    """
    K = N - index
    size = 1 << K
    if size > budget.capacity:
        raise BudgetExceededError(size, budget.capacity, log2_length(N))
    r = np.arange(size, dtype=np.int64)
    u = np.zeros((size, N), dtype=np.uint8)
    for j in range(K):
        u[:, index + j] = (r >> (K - 1 - j)) & 1
    weights = polar_encode(u).sum(axis=1)
    spectrum = walsh_hadamard(np.power(float(overlap), weights)) / size
    spectrum = np.clip(spectrum, 0.0, None)
    half = size // 2
    z = float(np.abs(spectrum[:half] - spectrum[half:]).sum())
    mixed = spectrum_entropy(spectrum)
    conditional = spectrum_entropy(spectrum[:half] + spectrum[half:])
    return float(np.clip(z, 0.0, 1.0)), float(max(mixed - conditional, 0.0))


def pure_state_overlap(W: HybridChannel) -> float:
    b = W.branches[0]
    return float(np.clip(2.0 * svdvals(matrix_sqrt(b.mass0) @ matrix_sqrt(b.mass1)).sum(), 0.0, 1.0))


def synthesize_profile(
    W: HybridChannel,
    N: int,
    statistic: Callable[[HybridChannel], float] = channel_Z,
) -> np.ndarray:
    """statistic(W_N^(i)) for every i, by depth-first traversal of the splitting tree."""
    n = log2_length(N)
    values = np.zeros(N)

    def visit(channel: HybridChannel, level: int, prefix: int) -> None:
        if level == n:
            values[prefix] = statistic(channel)
            return
        visit(split_minus(channel), level + 1, prefix << 1)
        visit(split_plus(channel), level + 1, (prefix << 1) | 1)

    visit(W, 0, 0)
    logger.debug(f"[Synthesis] kind={W.kind} N={N} exact profile done")
    return values


def exact_profile(W: HybridChannel, N: int) -> np.ndarray:
    """Exact Z profile, with shortcuts for determined, payload-free and pure-state channels."""
    log2_length(N)
    if W.is_determined():
        return np.zeros(N)
    reduced = W.classical_reduction()
    if reduced is not None:
        W = reduced
    if W.is_pure_state():
        overlap = pure_state_overlap(W)
        return np.array([pure_state_statistics(overlap, N, i, W.budget)[0] for i in range(N)])
    return synthesize_profile(W, N)


def erasure_recursion(epsilon: float, N: int) -> np.ndarray:
    """Closed-form Z profile of BEC(ε) under uniform input."""
    n = log2_length(N)
    z = np.array([float(epsilon)])
    for _ in range(n):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2 * z - z ** 2
        nxt[1::2] = z ** 2
        z = nxt
    return z
