"""Deterministic block mapping for replicate-parallel Monte Carlo."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

BLOCK = 256


def map_replicate_blocks(block_fn, reps: int, threads: int = 1, block: int = BLOCK):
    """Run block_fn(start, stop) over [0, reps) in fixed blocks, in order.

    Results are concatenated by block index, so the output is identical for
    any thread count; block_fn must derive all randomness from the replicate
    index alone.
    """
    spans = [(s, min(s + block, reps)) for s in range(0, reps, block)]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as ex:
            parts = list(ex.map(lambda sp: block_fn(*sp), spans))
    else:
        parts = [block_fn(s, e) for s, e in spans]
    return parts
