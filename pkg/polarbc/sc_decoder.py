"""
Batched successive cancellation in the LLR domain.

LLR 규약: L = ln P(0)/P(1). 각 위치의 결정은 콜백이 내리므로 같은 커널을
genie-aided 추정, 인코더의 randomized rounding, 수신기 MAP 복호에 공용한다.
"""
from typing import Callable, Tuple

import numpy as np

from .polar_transform import _reversal, log2_length

LLR_CLIP = 500.0

Decision = Callable[[int, np.ndarray], np.ndarray]


def clip_llr(llr: np.ndarray) -> np.ndarray:
    return np.clip(np.nan_to_num(llr, nan=0.0, posinf=LLR_CLIP, neginf=-LLR_CLIP), -LLR_CLIP, LLR_CLIP)


def letter_llr(mass0: np.ndarray, mass1: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return clip_llr(np.log(mass0) - np.log(mass1))


def check_node(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, a + b) - np.logaddexp(a, b)


def bhattacharyya_from_llr(llr: np.ndarray) -> np.ndarray:
    """2√(p0 p1) of the posterior described by each LLR."""
    return 1.0 / np.cosh(np.asarray(llr, dtype=float) / 2.0)


def _recurse(llr: np.ndarray, offset: int, decide: Decision) -> Tuple[np.ndarray, np.ndarray]:
    n = llr.shape[1]
    if n == 1:
        bit = np.asarray(decide(offset, llr[:, 0]), dtype=np.uint8).reshape(-1, 1)
        if bit.shape[0] != llr.shape[0]:
            bit = np.broadcast_to(bit, (llr.shape[0], 1)).copy()
        return bit, bit
    half = n // 2
    first, second = llr[:, :half], llr[:, half:]
    u_a, x_a = _recurse(clip_llr(check_node(first, second)), offset, decide)
    u_b, x_b = _recurse(clip_llr(second + (1.0 - 2.0 * x_a) * first), offset + half, decide)
    return np.concatenate([u_a, u_b], axis=1), np.concatenate([x_a ^ x_b, x_b], axis=1)


def successive_cancellation(llr: np.ndarray, decide: Decision) -> Tuple[np.ndarray, np.ndarray]:
    """
    llr: (rows, N) letter LLRs in transmission order.
    decide(i, column) gets the synthesized-channel LLRs of position i for every row and
    returns the bits to fix there. Returns (u, x) with x = u G_N row-wise.
    """
    llr = np.atleast_2d(np.asarray(llr, dtype=float))
    n = llr.shape[1]
    log2_length(n)
    rev = _reversal(n)
    u, x = _recurse(clip_llr(llr[:, rev]), 0, decide)
    return u, x[:, rev]
