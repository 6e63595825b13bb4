"""
Exact finite-dimensional information quantities.

모든 로그는 밑이 2 (bits) 이며, 상태는 작은 차원이므로 반복법 없이
스펙트럼 분해로 계산한다.
"""
import logging
from dataclasses import dataclass
from typing import Mapping, Sequence, Tuple

import numpy as np
from scipy.linalg import svdvals
from scipy.special import entr
from scipy.stats import entropy as shannon_entropy

from .exceptions import InvalidStateError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
EIGENVALUE_TOL = 1e-10
TRACE_TOL = 1e-10
PROBABILITY_TOL = 1e-12
ENTROPY_CUTOFF = 1e-14

LN2 = np.log(2.0)


def clamped_spectrum(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian PSD matrix (not necessarily normalized), drift clamped to 0."""
    eigenvalues = np.linalg.eigvalsh(matrix)
    if eigenvalues.size and eigenvalues.min() < -EIGENVALUE_TOL:
        raise InvalidStateError(f"matrix is not positive semi-definite (min eigenvalue {eigenvalues.min():.3e})")
    return np.clip(eigenvalues, 0.0, None)


def spectrum_entropy(eigenvalues: np.ndarray) -> float:
    """-Σ λ log2 λ, ignoring λ ≤ 1e-14. Works for sub-normalized blocks."""
    lam = np.asarray(eigenvalues, dtype=float)
    lam = np.where(lam > ENTROPY_CUTOFF, lam, 0.0)
    return float(entr(lam).sum() / LN2)


def matrix_sqrt(matrix: np.ndarray) -> np.ndarray:
    eigenvalues, vectors = np.linalg.eigh(matrix)
    if eigenvalues.size and eigenvalues.min() < -EIGENVALUE_TOL:
        raise InvalidStateError("square root of a non-PSD matrix")
    roots = np.sqrt(np.clip(eigenvalues, 0.0, None))
    return (vectors * roots) @ vectors.conj().T


def binary_entropy(p: float) -> float:
    return float(shannon_entropy([p, 1.0 - p], base=2))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, PSD, unit-trace operator."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InvalidStateError(f"density matrix must be square, got shape {m.shape}")
        deviation = float(np.max(np.abs(m - m.conj().T)))
        if deviation > HERMITIAN_TOL:
            raise InvalidStateError(f"matrix is not Hermitian (deviation {deviation:.3e})")
        trace = np.trace(m)
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace must be 1, got {trace.real:.12f}")
        m = (m + m.conj().T) / 2
        clamped_spectrum(m)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def pure(cls, vector: Sequence[complex]) -> "DensityMatrix":
        psi = np.asarray(vector, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def diagonal(cls, probabilities: Sequence[float]) -> "DensityMatrix":
        return cls(np.diag(np.asarray(probabilities, dtype=float)))

    @classmethod
    def from_pairs(cls, rows: Sequence[Sequence[Sequence[float]]]) -> "DensityMatrix":
        """Build from nested [re, im] pairs as used in JSON configs."""
        data = np.asarray(rows, dtype=float)
        if data.ndim != 3 or data.shape[-1] != 2:
            raise InvalidStateError("state entries must be [re, im] pairs")
        return cls(data[..., 0] + 1j * data[..., 1])

    def eigenvalues(self) -> np.ndarray:
        return clamped_spectrum(self.entries)

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        off = self.entries - np.diag(np.diag(self.entries))
        return bool(np.max(np.abs(off)) <= tol)

    def rank(self, tol: float = 1e-10) -> int:
        return int(np.sum(self.eigenvalues() > tol))

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(np.kron(self.entries, other.entries))

    def to_pairs(self) -> list:
        return [[[float(z.real), float(z.imag)] for z in row] for row in self.entries]


def _as_state(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def partial_trace(matrix: np.ndarray, dims: Tuple[int, int], keep: int) -> np.ndarray:
    """Reduce a bipartite operator to subsystem `keep` (0 or 1)."""
    d0, d1 = dims
    m = np.asarray(matrix).reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.einsum("ijkj->ik", m)
    if keep == 1:
        return np.einsum("ijil->jl", m)
    raise ValueError(f"keep must be 0 or 1, got {keep}")


def von_neumann_entropy(rho) -> float:
    state = _as_state(rho)
    return spectrum_entropy(state.eigenvalues())


def holevo_quantity(weights: Sequence[float], states: Sequence[DensityMatrix]) -> float:
    """H(Σ w ρ) − Σ w H(ρ) for an ensemble with any number of inputs."""
    w = np.asarray(weights, dtype=float)
    if len(states) != w.size:
        raise InvalidStateError("weights and states differ in length")
    if w.size == 0:
        return 0.0
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise InvalidStateError(f"ensemble states have mismatched dimensions {sorted(dims)}")
    average = sum(wi * s.entries for wi, s in zip(w, states))
    mixed = spectrum_entropy(clamped_spectrum(average))
    conditional = sum(wi * von_neumann_entropy(s) for wi, s in zip(w, states) if wi > 0)
    return max(mixed - conditional, 0.0)


@dataclass(frozen=True, eq=False)
class CqEnsemble:
    p0: float
    p1: float
    rho0: DensityMatrix
    rho1: DensityMatrix

    def __post_init__(self):
        if self.p0 < 0 or self.p1 < 0 or abs(self.p0 + self.p1 - 1.0) > PROBABILITY_TOL:
            raise InvalidStateError(f"invalid prior ({self.p0}, {self.p1})")
        if self.rho0.dim != self.rho1.dim:
            raise InvalidStateError(f"dimension mismatch {self.rho0.dim} != {self.rho1.dim}")

    @classmethod
    def uniform(cls, rho0: DensityMatrix, rho1: DensityMatrix) -> "CqEnsemble":
        return cls(0.5, 0.5, rho0, rho1)

    @property
    def prior(self) -> Tuple[float, float]:
        return self.p0, self.p1

    @property
    def states(self) -> Tuple[DensityMatrix, DensityMatrix]:
        return self.rho0, self.rho1


def holevo_information(e: CqEnsemble) -> float:
    return min(holevo_quantity(e.prior, e.states), binary_entropy(e.p0))


def conditional_entropy_xb(e: CqEnsemble) -> float:
    return max(binary_entropy(e.p0) - holevo_information(e), 0.0)


def conditional_mutual_information(
    ensemble: Mapping[Tuple[int, int], Tuple[float, DensityMatrix]]
) -> float:
    """I(X;B|Y) of a labeled ensemble {(x, y): (p(x,y), ρ_xy)}."""
    if not ensemble:
        raise InvalidStateError("empty ensemble")
    xs = sorted({x for x, _ in ensemble})
    ys = sorted({y for _, y in ensemble})
    if len(ensemble) != len(xs) * len(ys):
        raise InvalidStateError("labels must cover the full (x, y) product")
    dims = {rho.dim for _, rho in ensemble.values()}
    if len(dims) != 1:
        raise InvalidStateError(f"ensemble states have mismatched dimensions {sorted(dims)}")
    probabilities = np.array([ensemble[(x, y)][0] for x in xs for y in ys], dtype=float)
    if probabilities.min() < 0 or abs(probabilities.sum() - 1.0) > 1e-10:
        raise InvalidStateError("labeled probabilities must form a distribution")

    h_xy = float(shannon_entropy(probabilities, base=2))
    h_xyb = h_xy + sum(p * von_neumann_entropy(rho) for p, rho in ensemble.values() if p > 0)
    p_y = np.array([sum(ensemble[(x, y)][0] for x in xs) for y in ys])
    h_y = float(shannon_entropy(p_y, base=2))
    h_yb = 0.0
    for y in ys:
        block = sum(ensemble[(x, y)][0] * ensemble[(x, y)][1].entries for x in xs)
        h_yb += spectrum_entropy(clamped_spectrum(block))
    value = h_xy + h_yb - h_y - h_xyb
    if value < -1e-9:
        logger.warning(f"[QuantumCore] negative conditional mutual information {value:.3e}")
    return max(value, 0.0)


def fidelity_sqrt(rho, sigma) -> float:
    """Root fidelity ‖√ρ √σ‖₁."""
    a, b = _as_state(rho), _as_state(sigma)
    if a.dim != b.dim:
        raise InvalidStateError(f"dimension mismatch {a.dim} != {b.dim}")
    value = svdvals(matrix_sqrt(a.entries) @ matrix_sqrt(b.entries)).sum()
    return float(np.clip(value, 0.0, 1.0))


def fidelity_squared(rho, sigma) -> float:
    return fidelity_sqrt(rho, sigma) ** 2


def bhattacharyya_Z(e: CqEnsemble) -> float:
    return float(np.clip(2.0 * np.sqrt(e.p0 * e.p1) * fidelity_sqrt(e.rho0, e.rho1), 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class ClassicalChannelTable:
    """Binary-input channel p(y|x), rows indexed by x."""

    rows: np.ndarray

    def __post_init__(self):
        table = np.array(self.rows, dtype=float)
        if table.ndim != 2 or table.shape[0] != 2 or table.shape[1] == 0:
            raise InvalidStateError(f"table must have shape (2, m), got {table.shape}")
        if table.min() < 0 or np.max(np.abs(table.sum(axis=1) - 1.0)) > PROBABILITY_TOL:
            raise InvalidStateError("table rows must be probability distributions")
        table.setflags(write=False)
        object.__setattr__(self, "rows", table)

    @property
    def outputs(self) -> int:
        return self.rows.shape[1]

    def as_ensemble(self, prior: Tuple[float, float] = (0.5, 0.5)) -> CqEnsemble:
        return CqEnsemble(prior[0], prior[1], DensityMatrix.diagonal(self.rows[0]), DensityMatrix.diagonal(self.rows[1]))


def classical_bhattacharyya(prior: Tuple[float, float], rows: np.ndarray) -> float:
    p0, p1 = prior
    return float(2.0 * np.sqrt(p0 * p1) * np.sqrt(rows[0] * rows[1]).sum())


def classical_mutual_information(prior: Tuple[float, float], rows: np.ndarray) -> float:
    joint = np.asarray(prior, dtype=float)[:, None] * np.asarray(rows, dtype=float)
    h_x = shannon_entropy(joint.sum(axis=1), base=2)
    h_y = shannon_entropy(joint.sum(axis=0), base=2)
    h_xy = shannon_entropy(joint.ravel(), base=2)
    return float(max(h_x + h_y - h_xy, 0.0))
