"""
Marton–Gelfand–Pinsker region with binary auxiliaries, its corner points and a grid
search over (p_V, p_{V2|V}, p_{V1|V,V2}, φ).
"""
import logging
from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from scipy.special import entr
from tqdm import tqdm

from .auxiliary import AuxiliaryStructure, BroadcastChannelSpec
from .quantum_core import DensityMatrix, holevo_quantity

logger = logging.getLogger(__name__)

LN2 = np.log(2.0)
CORNER_PRINTED = "printed"
CORNER_OFFSET = "offset"
PARAMETERS = 7
PHI_MAPS = 256
SEARCH_CHUNK = 1 << 15


@dataclass(frozen=True)
class RatePoint:
    r0: float = 0.0
    r1: float = 0.0
    r2: float = 0.0
    clamped: bool = False

    def __post_init__(self):
        for name in ("r0", "r1", "r2"):
            if getattr(self, name) < -1e-12:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class InformationQuantities:
    i_v_b: Tuple[float, float]
    i_vvl_b: Tuple[float, float]
    cmi: float

    @property
    def i_vl_b_given_v(self) -> Tuple[float, float]:
        return tuple(max(self.i_vvl_b[r] - self.i_v_b[r], 0.0) for r in (0, 1))


@dataclass(frozen=True)
class RegionBounds:
    kind: str
    values: Dict[str, float]

    def contains(self, point: RatePoint, tol: float = 1e-9) -> bool:
        r0, r1, r2 = point.r0, point.r1, point.r2
        usage = {
            "R0": r0, "R1": r1, "R2": r2,
            "R0+R1": r0 + r1, "R0+R2": r0 + r2,
            "R1+R2 (a)": r1 + r2, "R1+R2 (b)": r1 + r2,
            "R0+R1+R2 (a)": r0 + r1 + r2, "R0+R1+R2 (b)": r0 + r1 + r2,
        }
        return all(usage[name] <= bound + tol for name, bound in self.values.items())


def _mixtures(joint: np.ndarray, x_map: np.ndarray, states, keep: Tuple[int, ...]):
    """Weights and output states of the ensemble indexed by the kept variables."""
    weights, mixtures = [], []
    for values in product((0, 1), repeat=len(keep)):
        mask = np.ones((2, 2, 2), dtype=bool)
        for axis, value in zip(keep, values):
            index = [slice(None)] * 3
            index[axis] = 1 - value
            mask[tuple(index)] = False
        w = joint[mask].sum()
        if w <= 0:
            continue
        mass0 = joint[mask & (x_map == 0)].sum()
        rho = (mass0 * states[0].entries + (w - mass0) * states[1].entries) / w
        weights.append(w)
        mixtures.append(DensityMatrix((rho + rho.conj().T) / 2))
    return weights, mixtures


def _shannon(p: np.ndarray) -> float:
    return float(entr(np.asarray(p, dtype=float)).sum() / LN2)


def information_quantities(spec: BroadcastChannelSpec, aux: AuxiliaryStructure) -> InformationQuantities:
    joint, x_map = aux.joint(), aux.x_map()
    i_v_b, i_vvl_b = [], []
    for receiver in (1, 2):
        states = spec.marginal_states(receiver)
        i_v_b.append(holevo_quantity(*_mixtures(joint, x_map, states, (0,))))
        i_vvl_b.append(holevo_quantity(*_mixtures(joint, x_map, states, (0, receiver))))
    cmi = (_shannon(joint.sum(axis=2)) + _shannon(joint.sum(axis=1))
           - _shannon(joint.sum(axis=(1, 2))) - _shannon(joint))
    return InformationQuantities(tuple(i_v_b), tuple(i_vvl_b), max(cmi, 0.0))


def _sum_bounds(q: InformationQuantities) -> Tuple[float, float]:
    c1, c2 = q.i_vl_b_given_v
    return (q.i_vvl_b[0] + c2 - q.cmi, c1 + q.i_vvl_b[1] - q.cmi)


def evaluate_private_region(spec: BroadcastChannelSpec, aux: AuxiliaryStructure) -> RegionBounds:
    q = information_quantities(spec, aux)
    sum_a, sum_b = _sum_bounds(q)
    values = {"R1": q.i_vvl_b[0], "R2": q.i_vvl_b[1], "R1+R2 (a)": sum_a, "R1+R2 (b)": sum_b}
    return RegionBounds("private", {name: max(v, 0.0) for name, v in values.items()})


def evaluate_common_region(spec: BroadcastChannelSpec, aux: AuxiliaryStructure) -> RegionBounds:
    q = information_quantities(spec, aux)
    sum_a, sum_b = _sum_bounds(q)
    values = {
        "R0": min(q.i_v_b),
        "R0+R1": q.i_vvl_b[0],
        "R0+R2": q.i_vvl_b[1],
        "R0+R1+R2 (a)": sum_a,
        "R0+R1+R2 (b)": sum_b,
    }
    return RegionBounds("common", {name: max(v, 0.0) for name, v in values.items()})


def corner_arrays(
    i_v_b1, i_v_b2, i_vv1_b1, i_vv2_b2, cmi, variant: str = CORNER_PRINTED
) -> Dict[str, np.ndarray]:
    """
    Both corners for arrays of information quantities. The weak receiver w has the
    smaller I(V;B); corner A gives w the binning layer, corner B the superposition.
    Returns physical-frame R1, R2 per corner plus clamp flags. Coordinates are clamped to
    [0, I(V,V_l;B_l)] and to the sum bound; the flag marks a negative raw coordinate.
    """
    i_v_b1, i_v_b2 = np.asarray(i_v_b1, float), np.asarray(i_v_b2, float)
    i_vv1_b1, i_vv2_b2 = np.asarray(i_vv1_b1, float), np.asarray(i_vv2_b2, float)
    cmi = np.asarray(cmi, float)
    weak_first = i_v_b1 <= i_v_b2
    iw_v = np.where(weak_first, i_v_b1, i_v_b2)
    is_v = np.where(weak_first, i_v_b2, i_v_b1)
    iw_full = np.where(weak_first, i_vv1_b1, i_vv2_b2)
    is_full = np.where(weak_first, i_vv2_b2, i_vv1_b1)
    is_cond = np.maximum(is_full - is_v, 0.0)
    iw_cond = np.maximum(iw_full - iw_v, 0.0)
    sum_bound = np.maximum(np.minimum(iw_full + is_cond - cmi, iw_cond + is_full - cmi), 0.0)

    if variant == CORNER_PRINTED:
        penalty = is_v
    elif variant == CORNER_OFFSET:
        penalty = is_v - iw_v
    else:
        raise ValueError(f"unknown corner variant '{variant}'")
    corners = {"A": (iw_full - cmi - penalty, is_full), "B": (iw_full, is_cond - cmi)}

    out = {}
    for name, (rw, rs) in corners.items():
        clamped = (rw < 0) | (rs < 0)
        rw = np.minimum(np.maximum(rw, 0.0), np.maximum(iw_full, 0.0))
        rw = np.minimum(rw, sum_bound)
        rs = np.minimum(np.maximum(rs, 0.0), np.maximum(is_full, 0.0))
        if variant == CORNER_PRINTED:
            rs = np.minimum(rs, np.maximum(sum_bound - rw, 0.0))
        out[f"{name}_r1"] = np.where(weak_first, rw, rs)
        out[f"{name}_r2"] = np.where(weak_first, rs, rw)
        out[f"{name}_clamped"] = clamped
    return out


@dataclass(frozen=True)
class CornerPoints:
    a: RatePoint
    b: RatePoint
    swapped: bool


def corner_points(
    spec: BroadcastChannelSpec, aux: AuxiliaryStructure, variant: str = CORNER_PRINTED
) -> CornerPoints:
    q = information_quantities(spec, aux)
    c = corner_arrays(q.i_v_b[0], q.i_v_b[1], q.i_vvl_b[0], q.i_vvl_b[1], q.cmi, variant)
    points = {
        name: RatePoint(0.0, float(c[f"{name}_r1"]), float(c[f"{name}_r2"]), bool(c[f"{name}_clamped"]))
        for name in ("A", "B")
    }
    for name, point in points.items():
        if point.clamped:
            logger.warning(f"[Region] corner {name} clamped to ({point.r1:.4f}, {point.r2:.4f})")
    return CornerPoints(points["A"], points["B"], swapped=q.i_v_b[0] > q.i_v_b[1])


# ==========================================
# Grid search
# ==========================================

def resolution_cap() -> int:
    return int(getattr(settings, "POLARBC_SEARCH_RESOLUTION_CAP", 9))


def effective_resolution(resolution: Optional[int] = None) -> int:
    """Configured default when None, clamped to the cap."""
    if resolution is None:
        resolution = int(getattr(settings, "POLARBC_SEARCH_RESOLUTION", 9))
    if resolution < 2:
        raise ValueError("search resolution must be at least 2")
    cap = resolution_cap()
    if resolution > cap:
        logger.warning(f"[Region] resolution {resolution} clamped to {cap}")
        resolution = cap
    return resolution


def phi_from_code(code: int) -> Tuple[int, ...]:
    return tuple((code >> index) & 1 for index in range(8))


def aux_from_parameters(params: Sequence[float], phi_code: int) -> AuxiliaryStructure:
    a, b0, b1, c00, c01, c10, c11 = (float(p) for p in params)
    return AuxiliaryStructure(a, (b0, b1), ((c00, c01), (c10, c11)), phi_from_code(phi_code))


def _grid_parameters(resolution: int, start: int, stop: int) -> np.ndarray:
    grid = np.linspace(0.0, 1.0, resolution)
    digits = np.unravel_index(np.arange(start, stop), (resolution,) * PARAMETERS)
    return np.stack([grid[d] for d in digits], axis=1)


def _batched_joint(params: np.ndarray) -> np.ndarray:
    a = params[:, 0]
    p_v = np.stack([1 - a, a], axis=1)
    q2 = params[:, 1:3]
    p_v2 = np.stack([1 - q2, q2], axis=2)                       # [c, v, v2]
    q1 = params[:, 3:7].reshape(-1, 2, 2)                       # [c, v, v2]
    p_v1 = np.stack([1 - q1, q1], axis=3)                       # [c, v, v2, v1]
    joint = p_v[:, :, None, None] * p_v2[:, :, :, None] * p_v1
    return joint.transpose(0, 1, 3, 2)                          # [c, v, v1, v2]


class MixtureEntropy:
    """H(q ρ0 + (1−q) ρ1) for a receiver, evaluated on the distinct q values only."""

    def __init__(self, rho0: DensityMatrix, rho1: DensityMatrix):
        self.rho0, self.rho1 = rho0.entries, rho1.entries

    def __call__(self, q: np.ndarray) -> np.ndarray:
        q = np.clip(np.asarray(q, dtype=float), 0.0, 1.0)
        keys, inverse = np.unique(np.round(q, 12), return_inverse=True)
        states = keys[:, None, None] * self.rho0 + (1 - keys)[:, None, None] * self.rho1
        eigenvalues = np.clip(np.linalg.eigvalsh(states), 0.0, None)
        values = entr(np.where(eigenvalues > 1e-14, eigenvalues, 0.0)).sum(axis=1) / LN2
        return values[inverse].reshape(q.shape)


def _conditional_output_entropy(joint, mask0, entropy_fn, sum_axes) -> np.ndarray:
    weights = joint.sum(axis=sum_axes)
    zero = (joint * mask0).sum(axis=sum_axes)
    q = np.divide(zero, weights, out=np.zeros_like(zero), where=weights > 0)
    values = np.where(weights > 0, weights * entropy_fn(q), 0.0)
    return values.reshape(values.shape[0], -1).sum(axis=1)


def batched_quantities(joint: np.ndarray, x_map: np.ndarray, entropies: Sequence[MixtureEntropy]) -> Dict[str, np.ndarray]:
    """Information quantities for a batch of joints p[c, v, v1, v2] under one φ."""
    mask0 = (x_map == 0)[None]
    p0 = (joint * mask0).sum(axis=(1, 2, 3))
    out = {}
    for receiver, entropy_fn in zip((1, 2), entropies):
        h_b = entropy_fn(p0)
        h_b_v = _conditional_output_entropy(joint, mask0, entropy_fn, (2, 3))
        h_b_vvl = _conditional_output_entropy(joint, mask0, entropy_fn, 3 if receiver == 1 else 2)
        out[f"i_v_b{receiver}"] = np.maximum(h_b - h_b_v, 0.0)
        out[f"i_vvl_b{receiver}"] = np.maximum(h_b - h_b_vvl, 0.0)
    c = joint.shape[0]
    h_v = entr(joint.sum(axis=(2, 3))).sum(axis=1)
    h_vv1 = entr(joint.sum(axis=3)).reshape(c, -1).sum(axis=1)
    h_vv2 = entr(joint.sum(axis=2)).reshape(c, -1).sum(axis=1)
    h_all = entr(joint).reshape(c, -1).sum(axis=1)
    out["cmi"] = np.maximum((h_vv1 + h_vv2 - h_v - h_all) / LN2, 0.0)
    return out


@dataclass(frozen=True)
class CellResult:
    phi_code: int
    objective: float
    point_index: int
    r1: float
    r2: float
    corner: str

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def evaluate_search_cell(
    spec: BroadcastChannelSpec,
    phi_code: int,
    resolution: int,
    weights: Tuple[float, float] = (1.0, 1.0),
    variant: str = CORNER_PRINTED,
) -> CellResult:
    """Best corner objective over the parameter grid for one φ map."""
    x_map = np.asarray(phi_from_code(phi_code), dtype=np.uint8).reshape(2, 2, 2)
    entropies = [MixtureEntropy(*spec.marginal_states(r)) for r in (1, 2)]
    total = resolution ** PARAMETERS
    best = CellResult(phi_code, -np.inf, 0, 0.0, 0.0, "A")
    for start in range(0, total, SEARCH_CHUNK):
        stop = min(start + SEARCH_CHUNK, total)
        params = _grid_parameters(resolution, start, stop)
        q = batched_quantities(_batched_joint(params), x_map, entropies)
        c = corner_arrays(q["i_v_b1"], q["i_v_b2"], q["i_vvl_b1"], q["i_vvl_b2"], q["cmi"], variant)
        for corner in ("A", "B"):
            objective = weights[0] * c[f"{corner}_r1"] + weights[1] * c[f"{corner}_r2"]
            index = int(np.argmax(objective))
            if objective[index] > best.objective + 1e-12:
                best = CellResult(phi_code, float(objective[index]), start + index,
                                  float(c[f"{corner}_r1"][index]), float(c[f"{corner}_r2"][index]), corner)
    return best


@dataclass(frozen=True)
class SearchResult:
    aux: AuxiliaryStructure
    point: RatePoint
    corner: str
    objective: float
    evaluated: int
    resolution: int


CellRunner = Callable[[Iterable[int]], List[CellResult]]


def search_auxiliaries(
    spec: BroadcastChannelSpec,
    weights: Tuple[float, float] = (1.0, 1.0),
    resolution: Optional[int] = None,
    variant: str = CORNER_PRINTED,
    run_cells: Optional[CellRunner] = None,
) -> SearchResult:
    resolution = effective_resolution(resolution)
    codes = range(PHI_MAPS)
    if run_cells is None:
        cells = [evaluate_search_cell(spec, code, resolution, weights, variant)
                 for code in tqdm(codes, desc="phi maps", disable=None)]
    else:
        cells = run_cells(codes)
    best = None
    for cell in sorted(cells, key=lambda c: c.phi_code):
        if best is None or cell.objective > best.objective + 1e-12:
            best = cell
    params = _grid_parameters(resolution, best.point_index, best.point_index + 1)[0]
    aux = aux_from_parameters(params, best.phi_code)
    logger.info(f"[Region] best objective={best.objective:.6f} phi={best.phi_code} corner={best.corner}")
    return SearchResult(
        aux=aux,
        point=RatePoint(0.0, best.r1, best.r2),
        corner=best.corner,
        objective=best.objective,
        evaluated=PHI_MAPS * resolution ** PARAMETERS,
        resolution=resolution,
    )
