"""Order-preserving parallel map used behind the deterministic contracts."""

from concurrent.futures import ThreadPoolExecutor


def ordered_map(fn, items, workers=1):
    """``[fn(x) for x in items]``, optionally spread over a thread pool.

    Results always come back in input order, so callers that reduce them in
    sequence get the same answer for any worker count.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
