import numpy as np

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, TypeVar


T = TypeVar('T')


def chunk_slices(size: int, chunk_size: int) -> List[slice]:
    """Fixed chunks; the split depends only on the size and the chunk size."""
    if chunk_size < 1:
        raise ValueError('chunk_size must be positive')
    return [slice(start, min(start + chunk_size, size)) for start in range(0, size, chunk_size)]


def map_chunks(func: Callable[[slice], T], size: int, chunk_size: int, threads: int = 1) -> List[T]:
    """
    Evaluates func on every chunk of range(size) and returns the results in chunk order.

    The thread count only changes the scheduling, never the chunks.
    """
    slices = chunk_slices(size, chunk_size)
    if threads <= 1 or len(slices) <= 1:
        return [func(s) for s in slices]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, slices))


def map_chunks_concat(func: Callable[[slice], np.ndarray], size: int, chunk_size: int,
                      threads: int = 1) -> np.ndarray:
    return np.concatenate(map_chunks(func, size, chunk_size, threads), axis=0)
