from concurrent.futures import ThreadPoolExecutor


def ordered_map(func, items, threads=1):
    """``list(map(func, items))``, optionally fanned out over a thread pool.

    Output order always follows input order, so reductions over the result
    are identical for every thread count.
    """
    items = list(items)
    if threads is None or threads <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def chunks(n, size):
    """Half-open ``(start, stop)`` ranges covering ``range(n)``."""
    return [(i, min(i + size, n)) for i in range(0, n, size)]
