"""Order-preserving map with an optional thread pool.

The per-epoch stages release the GIL inside numpy/LAPACK calls, so
threads give real speedup without the pickling cost of processes.
"""

from concurrent.futures import ThreadPoolExecutor


def ordered_map(fn, items, jobs=1):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))
