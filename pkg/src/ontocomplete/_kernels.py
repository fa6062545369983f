"""Dense graph kernels on integer-indexed boolean matrices.

Each kernel has a numba implementation and a pure-numpy one. The numba path
is used when numba imports and ``ONTOCOMPLETE_PURE_NUMPY`` is unset (or
``0``); both paths return identical results and are cross-checked in tests.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

PURE_NUMPY_ENV = "ONTOCOMPLETE_PURE_NUMPY"


def _env_wants_numpy() -> bool:
    return os.environ.get(PURE_NUMPY_ENV, "").strip().lower() not in ("", "0", "false", "no")


HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _env_wants_numpy()
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# transitive closure


def closure_numpy(adj: np.ndarray) -> np.ndarray:
    """Warshall's algorithm, one vectorized rank-1 update per pivot."""
    reach = np.array(adj, dtype=bool, copy=True)
    for k in range(reach.shape[0]):
        reach |= np.outer(reach[:, k], reach[k])
    return reach


def _closure_py(adj):
    # DFS from every source over an adjacency list built from the matrix.
    n = adj.shape[0]
    reach = np.zeros((n, n), dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    for s in range(n):
        top = 0
        for j in range(n):
            if adj[s, j] and not reach[s, j]:
                reach[s, j] = True
                stack[top] = j
                top += 1
        while top > 0:
            top -= 1
            u = stack[top]
            for v in range(n):
                if adj[u, v] and not reach[s, v]:
                    reach[s, v] = True
                    stack[top] = v
                    top += 1
    return reach


# ---------------------------------------------------------------------------
# strongly connected components


def scc_numpy(adj: np.ndarray) -> np.ndarray:
    """Component label per node: the smallest index mutually reachable with it."""
    n = adj.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    reach = closure_numpy(adj)
    mutual = reach & reach.T
    np.fill_diagonal(mutual, True)
    return np.argmax(mutual, axis=1).astype(np.int64)


def _scc_py(adj):
    # Iterative Tarjan; labels are remapped to the smallest member index.
    n = adj.shape[0]
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    call_node = np.empty(n, dtype=np.int64)
    call_next = np.empty(n, dtype=np.int64)
    label = np.full(n, -1, dtype=np.int64)
    counter = 0
    sp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        depth = 0
        call_node[0] = root
        call_next[0] = 0
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = True
        while depth >= 0:
            u = call_node[depth]
            advanced = False
            j = call_next[depth]
            while j < n:
                if adj[u, j]:
                    if index[j] == -1:
                        call_next[depth] = j + 1
                        depth += 1
                        call_node[depth] = j
                        call_next[depth] = 0
                        index[j] = counter
                        low[j] = counter
                        counter += 1
                        stack[sp] = j
                        sp += 1
                        on_stack[j] = True
                        advanced = True
                        break
                    elif on_stack[j] and index[j] < low[u]:
                        low[u] = index[j]
                j += 1
            if advanced:
                continue
            if low[u] == index[u]:
                smallest = n
                k = sp
                while True:
                    k -= 1
                    if stack[k] < smallest:
                        smallest = stack[k]
                    if stack[k] == u:
                        break
                while True:
                    sp -= 1
                    w = stack[sp]
                    on_stack[w] = False
                    label[w] = smallest
                    if w == u:
                        break
            depth -= 1
            if depth >= 0:
                parent = call_node[depth]
                if low[u] < low[parent]:
                    low[parent] = low[u]
    return label


# ---------------------------------------------------------------------------
# intersection closure of bitset rows (biclique property sides)


def pack_rows(matrix: np.ndarray) -> np.ndarray:
    """Pack a boolean (rows x cols) matrix into uint64 words, little bit order."""
    rows, cols = matrix.shape
    words = max(1, (cols + 63) // 64)
    out = np.zeros((rows, words), dtype=np.uint64)
    for c in range(cols):
        w, b = divmod(c, 64)
        out[:, w] |= matrix[:, c].astype(np.uint64) << np.uint64(b)
    return out


def unpack_row(row: np.ndarray, cols: int) -> np.ndarray:
    bits = np.zeros(cols, dtype=bool)
    for c in range(cols):
        w, b = divmod(c, 64)
        bits[c] = bool((int(row[w]) >> b) & 1)
    return bits


def intersection_closure_numpy(rows: np.ndarray) -> np.ndarray:
    """All distinct non-empty intersections of non-empty subsets of ``rows``."""
    family = np.zeros((0, rows.shape[1]), dtype=np.uint64)
    for r in rows:
        if not r.any():
            continue
        candidates = np.vstack([family, family & r, r[None, :]])
        candidates = candidates[candidates.any(axis=1)]
        family = np.unique(candidates, axis=0)
    return family


def _intersection_closure_py(rows):
    n_words = rows.shape[1]
    cap = 16
    family = np.zeros((cap, n_words), dtype=np.uint64)
    size = 0
    scratch = np.zeros(n_words, dtype=np.uint64)
    for r in range(rows.shape[0]):
        nonzero = False
        for w in range(n_words):
            if rows[r, w] != 0:
                nonzero = True
        if not nonzero:
            continue
        current = size
        for f in range(current + 1):
            any_bit = False
            for w in range(n_words):
                if f < current:
                    scratch[w] = family[f, w] & rows[r, w]
                else:
                    scratch[w] = rows[r, w]
                if scratch[w] != 0:
                    any_bit = True
            if not any_bit:
                continue
            dup = False
            for g in range(size):
                same = True
                for w in range(n_words):
                    if family[g, w] != scratch[w]:
                        same = False
                        break
                if same:
                    dup = True
                    break
            if dup:
                continue
            if size == cap:
                grown = np.zeros((cap * 2, n_words), dtype=np.uint64)
                grown[:cap] = family
                family = grown
                cap *= 2
            family[size] = scratch
            size += 1
    return family[:size].copy()


def intersection_closure_numba_sorted(rows: np.ndarray) -> np.ndarray:
    out = intersection_closure_numba(rows)
    if out.shape[0] == 0:
        return out
    return np.unique(out, axis=0)


if HAVE_NUMBA:
    closure_numba = numba.njit(cache=True)(_closure_py)
    scc_numba = numba.njit(cache=True)(_scc_py)
    intersection_closure_numba = numba.njit(cache=True)(_intersection_closure_py)
else:  # pragma: no cover
    closure_numba = _closure_py
    scc_numba = _scc_py
    intersection_closure_numba = _intersection_closure_py


def transitive_closure(adj: np.ndarray) -> np.ndarray:
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    if adj.shape[0] == 0:
        return adj.copy()
    return closure_numba(adj) if USE_NUMBA else closure_numpy(adj)


def scc_labels(adj: np.ndarray) -> np.ndarray:
    adj = np.ascontiguousarray(adj, dtype=np.bool_)
    if adj.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return scc_numba(adj) if USE_NUMBA else scc_numpy(adj)


def intersection_closure(rows: np.ndarray) -> np.ndarray:
    """Sorted, de-duplicated family of non-empty intersections."""
    rows = np.ascontiguousarray(rows, dtype=np.uint64)
    if rows.shape[0] == 0:
        return np.zeros((0, rows.shape[1]), dtype=np.uint64)
    return intersection_closure_numba_sorted(rows) if USE_NUMBA else intersection_closure_numpy(rows)


def warmup() -> None:
    """Compile (or load from cache) every kernel for the active backend."""
    adj = np.zeros((2, 2), dtype=np.bool_)
    adj[0, 1] = True
    transitive_closure(adj)
    scc_labels(adj)
    intersection_closure(pack_rows(adj))
