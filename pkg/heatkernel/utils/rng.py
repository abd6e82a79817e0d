"""
Counter-based random streams and block-parallel execution
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")

# stream roles inside one block; component i draws from ROLE_COMPONENT + i
ROLE_TERMINAL = 0
ROLE_COMPONENT = 1


def stream(seed: int, block: int, role: int) -> np.random.Generator:
    """Philox generator keyed by (seed, block, role)"""
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    key = np.random.SeedSequence([int(seed), int(block), int(role)])
    return np.random.Generator(np.random.Philox(key))


def block_layout(n_paths: int, block_size: int) -> List[Tuple[int, int, int]]:
    """Split n_paths into (block index, start, stop) triples of fixed size"""
    if n_paths < 1:
        raise ValueError("n_paths must be at least 1")
    if block_size < 1:
        raise ValueError("block_size must be at least 1")
    blocks = []
    for index, start in enumerate(range(0, n_paths, block_size)):
        blocks.append((index, start, min(start + block_size, n_paths)))
    return blocks


def map_blocks(
    work: Callable[[int, int], T],
    n_paths: int,
    block_size: int,
    workers: Optional[int] = 1,
) -> List[T]:
    """Run work(block_index, n_in_block) for every block, results in block order.

    Each block owns its own streams, so the output does not depend on how many
    workers run the blocks.
    """
    blocks = block_layout(n_paths, block_size)
    workers = max(1, int(workers or 1))
    if workers == 1 or len(blocks) == 1:
        return [work(index, stop - start) for index, start, stop in blocks]

    logger.debug(f"Running {len(blocks)} blocks on {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(work, index, stop - start) for index, start, stop in blocks]
        return [future.result() for future in futures]
