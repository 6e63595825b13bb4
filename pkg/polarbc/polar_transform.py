"""Binary polar transform x = u G_N with G_N = B_N F^{⊗n}."""
from functools import lru_cache

import numpy as np


def log2_length(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"length must be a power of two, got {n}")
    return n.bit_length() - 1


@lru_cache(maxsize=32)
def _reversal(n: int) -> np.ndarray:
    m = log2_length(n)
    indices = np.arange(n)
    reversed_indices = np.zeros(n, dtype=np.int64)
    for bit in range(m):
        reversed_indices |= ((indices >> bit) & 1) << (m - 1 - bit)
    reversed_indices.setflags(write=False)
    return reversed_indices


def bit_reversal_permutation(n: int) -> np.ndarray:
    """Zero-based position i maps to the integer with reversed log2(n)-bit representation."""
    return _reversal(n).copy()


def butterfly(x: np.ndarray) -> np.ndarray:
    """x F^{⊗n} along the last axis (natural order), O(N log N)."""
    out = np.array(x, dtype=np.uint8, copy=True)
    n = out.shape[-1]
    log2_length(n)
    lead = out.shape[:-1]
    half = 1
    while half < n:
        view = out.reshape(*lead, -1, 2, half)
        view[..., 0, :] ^= view[..., 1, :]
        half *= 2
    return out


def polar_encode(u) -> np.ndarray:
    """u G_N over GF(2); accepts a vector or a batch of row vectors."""
    u = np.asarray(u, dtype=np.uint8)
    return butterfly(u[..., _reversal(u.shape[-1])])


def polar_decode_inverse(x) -> np.ndarray:
    """G_N is an involution over GF(2)."""
    return polar_encode(x)
