"""Thread-pool map capped by ``STABKIT_THREADS``."""
import os
from concurrent.futures import ThreadPoolExecutor


def max_workers():
    env = os.environ.get("STABKIT_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """``list(map(fn, items))`` on a thread pool; results keep input order."""
    items = list(items)
    n = min(max_workers(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
