"""Thread-pool helper honouring the POLYQUERY_THREADS environment variable."""
import os
from concurrent.futures import ThreadPoolExecutor


def max_workers():
    raw = os.environ.get("POLYQUERY_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def pmap(fn, items):
    """Ordered map; results never depend on the worker count."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
