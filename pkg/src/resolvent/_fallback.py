"""Pure numpy/Python versions of the compiled kernels, bit-for-bit compatible."""
from __future__ import annotations

import heapq

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_BATCH = 1 << 18


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def chunk_seed(master: int, chunk: int) -> int:
    with np.errstate(over="ignore"):
        m = _mix64(np.array([master], dtype=np.uint64))
        z = m + GOLDEN * np.uint64(chunk + 1)
        return int(_mix64(z)[0])


def echelon_mod_p(indptr, indices, data, ncols: int, p: int):
    """Same contract as the compiled version: positions of rows enlarging the span."""
    pivots: dict[int, dict[int, int]] = {}
    independent = []
    for r in range(len(indptr) - 1):
        w: dict[int, int] = {}
        for k in range(int(indptr[r]), int(indptr[r + 1])):
            c = int(indices[k])
            w[c] = (w.get(c, 0) + int(data[k])) % p
        heap = [-c for c, v in w.items() if v]
        heapq.heapify(heap)
        queued = {-c for c in heap}
        new_pivot = None
        while heap:
            top = -heapq.heappop(heap)
            queued.discard(top)
            f = w.get(top, 0)
            if f == 0:
                continue
            row = pivots.get(top)
            if row is None:
                new_pivot = top
                break
            for j, v in row.items():
                x = (w.get(j, 0) - f * v) % p
                w[j] = x
                if x and j not in queued:
                    queued.add(j)
                    heapq.heappush(heap, -j)
        if new_pivot is not None:
            inv = pow(w[new_pivot], p - 2, p)
            pivots[new_pivot] = {j: v * inv % p for j, v in w.items() if v and j <= new_pivot}
            independent.append(r)
    return np.asarray(independent, dtype=np.int64)


# ------------------------------------------------------------ batch evaluation

def _tmul(x, y, p):
    """Truncated product of batches of polynomials, shape (batch, n)."""
    n = x.shape[1]
    out = np.zeros_like(x)
    for k in range(n):
        s = np.zeros(x.shape[0], dtype=np.int64)
        for i in range(k + 1):
            s += x[:, i] * y[:, k - i]
        out[:, k] = s % p
    return out


def _disc3_batch(a, b, c, d, p):
    bb = _tmul(b, b, p)
    cc = _tmul(c, c, p)
    ad = _tmul(a, d, p)
    acc = _tmul(bb, cc, p)
    acc = acc - 4 * _tmul(_tmul(a, cc, p), c, p)
    acc = acc - 4 * _tmul(_tmul(bb, b, p), d, p)
    acc = acc - 27 * _tmul(ad, ad, p)
    acc = acc + 18 * _tmul(ad, _tmul(b, c, p), p)
    return acc % p


def _valuation(delta):
    n = delta.shape[1]
    nz = delta != 0
    return np.where(nz.any(axis=1), nz.argmax(axis=1), n)


def _resolvent_batch(v, n, p, term_table):
    """v has shape (batch, 12*n) with layout var*n + k."""
    coeffs = []
    for block in term_table:
        acc = np.zeros((v.shape[0], n), dtype=np.int64)
        for c, i, j, l in block:
            t = _tmul(_tmul(v[:, i * n:(i + 1) * n], v[:, j * n:(j + 1) * n], p),
                      v[:, l * n:(l + 1) * n], p)
            acc += c * t
        coeffs.append(acc % p)
    return coeffs


def _val_batch(d: int, v: np.ndarray, p: int, n: int, term_table) -> np.ndarray:
    if d == 3:
        a, b, c, dd = (v[:, k * n:(k + 1) * n] for k in range(4))
    else:
        a, b, c, dd = _resolvent_batch(v, n, p, term_table)
    return _valuation(_disc3_batch(a, b, c, dd, p))


def disc_val(d: int, v, p: int, n: int, term_table) -> int:
    arr = np.asarray(v, dtype=np.int64).reshape(1, -1) % p
    return int(_val_batch(d, arr, p, n, term_table)[0])


def _decode(codes: np.ndarray, p: int, m: int) -> np.ndarray:
    out = np.empty((codes.shape[0], m), dtype=np.int64)
    x = codes.copy()
    for j in range(m):
        out[:, j] = x % p
        x //= p
    return out


def hist_range(d: int, p: int, n: int, start: int, count: int, term_table) -> np.ndarray:
    m = (4 if d == 3 else 12) * n
    out = np.zeros(n + 1, dtype=np.int64)
    for lo in range(start, start + count, _BATCH):
        hi = min(lo + _BATCH, start + count)
        codes = np.arange(lo, hi, dtype=np.int64)
        vals = _val_batch(d, _decode(codes, p, m), p, n, term_table)
        out += np.bincount(vals, minlength=n + 1)
    return out


def hist_d3(p: int, n: int, threads: int = 1) -> np.ndarray:
    return hist_range(3, p, n, 0, p ** (4 * n), ())


def hist_d4_field(p: int, term_table, threads: int = 1) -> np.ndarray:
    return hist_range(4, p, 1, 0, p ** 12, term_table)


def _draws(seed: int, counters: np.ndarray, p: int) -> np.ndarray:
    limit = (1 << 64) - ((1 << 64) % p)
    with np.errstate(over="ignore"):
        x = _mix64(np.uint64(seed) + GOLDEN * (counters.astype(np.uint64) + np.uint64(1)))
        if limit < (1 << 64):
            bad = x >= np.uint64(limit)
            while bad.any():
                x[bad] = _mix64(x[bad] + GOLDEN)
                bad = x >= np.uint64(limit)
    return (x % np.uint64(p)).astype(np.int64)


def mc_hist(d: int, p: int, n: int, samples: int, seed: int, term_table,
            chunk: int = 65536, threads: int = 1) -> np.ndarray:
    dim = 4 if d == 3 else 12
    m = dim * n
    out = np.zeros(n + 1, dtype=np.int64)
    nchunks = (samples + chunk - 1) // chunk
    for c in range(nchunks):
        count = min(chunk, samples - c * chunk)
        s = chunk_seed(seed, c)
        counters = np.arange(count * m, dtype=np.int64)
        v = _draws(s, counters, p).reshape(count, m)
        vals = _val_batch(d, v, p, n, term_table)
        out += np.bincount(vals, minlength=n + 1)
    return out
