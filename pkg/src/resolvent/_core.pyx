# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: discriminant-valuation histograms, Monte-Carlo sampling
and sparse elimination modulo a prime below 2^62."""

import numpy as np
cimport numpy as cnp
from cython.parallel import prange
from libc.stdlib cimport malloc, free, realloc
from libc.string cimport memset

ctypedef cnp.uint64_t u64
ctypedef cnp.int64_t i64

cdef extern from *:
    """
    static inline unsigned long long rs_mulmod(unsigned long long a, unsigned long long b,
                                               unsigned long long p) {
        return (unsigned long long)(((unsigned __int128)a * b) % p);
    }
    static inline unsigned long long rs_mix64(unsigned long long z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    """
    u64 rs_mulmod(u64 a, u64 b, u64 p) nogil
    u64 rs_mix64(u64 z) nogil

cdef enum:
    MAXN = 8

cdef u64 GOLDEN = 0x9e3779b97f4a7c15

cdef u64 powmod(u64 a, u64 e, u64 p) noexcept nogil:
    cdef u64 r = 1
    a %= p
    while e:
        if e & 1:
            r = rs_mulmod(r, a, p)
        a = rs_mulmod(a, a, p)
        e >>= 1
    return r


# ---------------------------------------------------------------- elimination

cdef struct PivotRow:
    i64 length
    i64* idx
    u64* val


def echelon_mod_p(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                  cnp.int64_t[::1] data, i64 ncols, u64 p):
    """Greedy independent subset of CSR rows modulo p.

    Rows are processed in order; each is reduced against stored pivots keyed
    by their largest column index.  Returns the positions of the rows that
    enlarged the span, so the rank is the length of the result.
    """
    cdef i64 nrows = indptr.shape[0] - 1
    cdef PivotRow* piv = <PivotRow*> malloc(max(ncols, 1) * sizeof(PivotRow))
    cdef u64* w = <u64*> malloc(max(ncols, 1) * sizeof(u64))
    cdef char* inheap = <char*> malloc(max(ncols, 1))
    cdef i64 heap_cap = 1024
    cdef i64* heap = <i64*> malloc(heap_cap * sizeof(i64))
    cdef i64 hn, r, k, i, j, c, child, top, cnt
    cdef u64 f, x, inv
    cdef PivotRow* pr
    independent = []
    if piv == NULL or w == NULL or inheap == NULL or heap == NULL:
        raise MemoryError()
    memset(piv, 0, max(ncols, 1) * sizeof(PivotRow))
    memset(w, 0, max(ncols, 1) * sizeof(u64))
    memset(inheap, 0, max(ncols, 1))
    try:
        for r in range(nrows):
            with nogil:
                hn = 0
                for k in range(indptr[r], indptr[r + 1]):
                    c = indices[k]
                    x = <u64> (((data[k] % <i64> p) + <i64> p) % <i64> p)
                    w[c] = (w[c] + x) % p
                    if not inheap[c]:
                        inheap[c] = 1
                        if hn == heap_cap:
                            heap_cap *= 2
                            heap = <i64*> realloc(heap, heap_cap * sizeof(i64))
                        # sift up
                        i = hn
                        hn += 1
                        while i > 0 and heap[(i - 1) >> 1] < c:
                            heap[i] = heap[(i - 1) >> 1]
                            i = (i - 1) >> 1
                        heap[i] = c
                top = -1
                while hn > 0:
                    top = heap[0]
                    hn -= 1
                    c = heap[hn]
                    i = 0
                    while True:
                        child = 2 * i + 1
                        if child >= hn:
                            break
                        if child + 1 < hn and heap[child + 1] > heap[child]:
                            child += 1
                        if heap[child] <= c:
                            break
                        heap[i] = heap[child]
                        i = child
                    if hn > 0:
                        heap[i] = c
                    inheap[top] = 0
                    if w[top] == 0:
                        top = -1
                        continue
                    if piv[top].length == 0:
                        break
                    f = w[top]
                    pr = &piv[top]
                    for k in range(pr.length):
                        j = pr.idx[k]
                        x = rs_mulmod(f, pr.val[k], p)
                        w[j] = (w[j] + p - x) % p
                        if w[j] != 0 and not inheap[j]:
                            inheap[j] = 1
                            if hn == heap_cap:
                                heap_cap *= 2
                                heap = <i64*> realloc(heap, heap_cap * sizeof(i64))
                            i = hn
                            hn += 1
                            while i > 0 and heap[(i - 1) >> 1] < j:
                                heap[i] = heap[(i - 1) >> 1]
                                i = (i - 1) >> 1
                            heap[i] = j
                    top = -1
                if top >= 0:
                    # new pivot: collect the remaining support (all below top)
                    cnt = 1
                    for k in range(hn):
                        if w[heap[k]] != 0:
                            cnt += 1
                    pr = &piv[top]
                    pr.length = cnt
                    pr.idx = <i64*> malloc(cnt * sizeof(i64))
                    pr.val = <u64*> malloc(cnt * sizeof(u64))
                    inv = powmod(w[top], p - 2, p)
                    pr.idx[0] = top
                    pr.val[0] = 1
                    w[top] = 0
                    cnt = 1
                    for k in range(hn):
                        j = heap[k]
                        inheap[j] = 0
                        if w[j] != 0:
                            pr.idx[cnt] = j
                            pr.val[cnt] = rs_mulmod(w[j], inv, p)
                            cnt += 1
                            w[j] = 0
                    hn = 0
            if top >= 0:
                independent.append(r)
    finally:
        for c in range(ncols):
            if piv[c].length:
                free(piv[c].idx)
                free(piv[c].val)
        free(piv)
        free(w)
        free(inheap)
        free(heap)
    return np.asarray(independent, dtype=np.int64)


# ----------------------------------------------------- truncated ring helpers

cdef inline void tmul(const i64* x, const i64* y, i64* out, int n, i64 p) noexcept nogil:
    cdef int k, i
    cdef i64 s
    for k in range(n):
        s = 0
        for i in range(k + 1):
            s += x[i] * y[k - i]
        out[k] = s % p


cdef inline int disc3_val(const i64* a, const i64* b, const i64* c, const i64* d,
                          int n, i64 p) noexcept nogil:
    """Valuation (capped at n) of b^2c^2 - 4ac^3 - 4b^3d - 27a^2d^2 + 18abcd."""
    cdef i64 bb[MAXN]
    cdef i64 cc[MAXN]
    cdef i64 t1[MAXN]
    cdef i64 t2[MAXN]
    cdef i64 acc[MAXN]
    cdef int k
    tmul(b, b, bb, n, p)
    tmul(c, c, cc, n, p)
    tmul(bb, cc, acc, n, p)
    tmul(a, cc, t1, n, p)
    tmul(t1, c, t2, n, p)
    for k in range(n):
        acc[k] = (acc[k] - 4 * t2[k]) % p
    tmul(bb, b, t1, n, p)
    tmul(t1, d, t2, n, p)
    for k in range(n):
        acc[k] = (acc[k] - 4 * t2[k]) % p
    tmul(a, d, t1, n, p)
    tmul(t1, t1, t2, n, p)
    for k in range(n):
        acc[k] = (acc[k] - 27 * t2[k]) % p
    tmul(b, c, t2, n, p)
    tmul(t1, t2, bb, n, p)
    for k in range(n):
        acc[k] = (acc[k] + 18 * bb[k]) % p
        if acc[k] != 0:
            return k
    return n


cdef inline void tmul_raw(const i64* x, const i64* y, i64* out, int n) noexcept nogil:
    cdef int k, i
    cdef i64 s
    for k in range(n):
        s = 0
        for i in range(k + 1):
            s += x[i] * y[k - i]
        out[k] = s


cdef inline void resolvent(const i64* v, const i64* terms, int nterms_total,
                           const cnp.int32_t* offsets, i64* cubic, int n, i64 p) noexcept nogil:
    """cubic[m*n + k]: t^k coefficient of the m-th resolvent coefficient.

    For p < 2^12 the triple products are accumulated without intermediate
    reduction (|sum| stays below 2^63 for n <= MAXN).
    """
    cdef i64 t1[MAXN]
    cdef i64 t2[MAXN]
    cdef int m, q, k
    cdef const i64* term
    cdef bint small = p < 4096
    for m in range(4):
        for k in range(n):
            cubic[m * n + k] = 0
        for q in range(offsets[m], offsets[m + 1]):
            term = terms + 4 * q
            if small:
                tmul_raw(v + term[1] * n, v + term[2] * n, t1, n)
                tmul_raw(t1, v + term[3] * n, t2, n)
            else:
                tmul(v + term[1] * n, v + term[2] * n, t1, n, p)
                tmul(t1, v + term[3] * n, t2, n, p)
            for k in range(n):
                cubic[m * n + k] += term[0] * t2[k]
        for k in range(n):
            cubic[m * n + k] %= p


cdef inline int disc4_val(const i64* v, const i64* terms, const cnp.int32_t* offsets,
                          int n, i64 p) noexcept nogil:
    cdef i64 cubic[4 * MAXN]
    resolvent(v, terms, 0, offsets, cubic, n, p)
    return disc3_val(cubic, cubic + n, cubic + 2 * n, cubic + 3 * n, n, p)


# --------------------------------------------------------------- enumeration

def hist_d3(i64 p, int n, int threads=1):
    """Histogram of val(disc3) over all of V3(F_p[t]/t^n); last bin is >= n."""
    if n < 1 or n > MAXN:
        raise ValueError("truncation order out of range")
    cdef i64 P = p ** n
    cdef cnp.int64_t[:, ::1] digits = np.zeros((P, n), dtype=np.int64)
    cdef i64 i, k, x
    for i in range(P):
        x = i
        for k in range(n):
            digits[i, k] = x % p
            x //= p
    cdef cnp.int64_t[:, ::1] rows = np.zeros((P, n + 1), dtype=np.int64)
    cdef i64 ia
    with nogil:
        for ia in prange(P, num_threads=max(threads, 1), schedule="dynamic"):
            _d3_block(&digits[0, 0], ia, P, n, p, &rows[ia, 0])
    return np.asarray(rows).sum(axis=0)


cdef void _d3_block(const i64* digits, i64 ia, i64 P, int n, i64 p, i64* out) noexcept nogil:
    # disc3 = alpha d^2 + beta d + gamma with the a, b, c parts hoisted
    cdef i64 ib, ic, idd, s
    cdef int k, i
    cdef const i64* a = digits + ia * n
    cdef const i64* b
    cdef const i64* c
    cdef const i64* d
    cdef i64 bb[MAXN]
    cdef i64 t1[MAXN]
    cdef i64 t2[MAXN]
    cdef i64 al[MAXN]
    cdef i64 be[MAXN]
    cdef i64 ga[MAXN]
    cdef i64 sq[MAXN * 4096]
    cdef i64* dd
    cdef bint use_sq = P * n <= MAXN * 4096
    cdef i64 dsq[MAXN]
    if use_sq:
        for idd in range(P):
            tmul(digits + idd * n, digits + idd * n, sq + idd * n, n, p)
    tmul(a, a, t1, n, p)
    for k in range(n):
        al[k] = (-27 * t1[k]) % p
    for ib in range(P):
        b = digits + ib * n
        tmul(b, b, bb, n, p)
        for ic in range(P):
            c = digits + ic * n
            tmul(a, b, t1, n, p)
            tmul(t1, c, t2, n, p)
            tmul(bb, b, t1, n, p)
            for k in range(n):
                be[k] = (18 * t2[k] - 4 * t1[k]) % p
            tmul(bb, c, t1, n, p)
            tmul(t1, c, ga, n, p)
            tmul(a, c, t1, n, p)
            tmul(t1, c, t2, n, p)
            tmul(t2, c, t1, n, p)
            for k in range(n):
                ga[k] = (ga[k] - 4 * t1[k]) % p
            for idd in range(P):
                d = digits + idd * n
                if use_sq:
                    dd = sq + idd * n
                else:
                    tmul(d, d, dsq, n, p)
                    dd = dsq
                k = 0
                while k < n:
                    s = ga[k]
                    for i in range(k + 1):
                        s += al[i] * dd[k - i] + be[i] * d[k - i]
                    if s % p != 0:
                        break
                    k += 1
                out[k] += 1


def hist_d4_field(i64 p, object term_table, int threads=1):
    """Histogram of val(disc4) over V4(F_p) (two bins: 0 and >= 1).

    The outer loop runs over the first form; the resolvent coefficients are
    split into the parts depending on one form only and the bilinear parts,
    and disc3 is read from a table over F_p^4.
    """
    cdef i64 P6 = p ** 6
    cdef i64 P4 = p ** 4
    cdef cnp.int64_t[::1] terms
    cdef cnp.int32_t[::1] offsets
    terms, offsets = _flatten_terms(term_table)
    # disc3 table on F_p^4
    cdef cnp.uint8_t[::1] unit = np.zeros(P4, dtype=np.uint8)
    cdef i64 i, k, x
    cdef i64 c4[4]
    for i in range(P4):
        x = i
        for k in range(4):
            c4[k] = x % p
            x //= p
        unit[i] = disc3_val(&c4[0], &c4[1], &c4[2], &c4[3], 1, p) == 0
    # per-form data: the pure coefficients (x^3 from A, y^3 from B) and the
    # quadratic coefficient vectors multiplying the linear parts.
    cdef cnp.int64_t[:, ::1] forms = np.zeros((P6, 6), dtype=np.int64)
    for i in range(P6):
        x = i
        for k in range(6):
            forms[i, k] = x % p
            x //= p
    lin_a, lin_b = _bilinear_split(term_table)
    cdef cnp.int64_t[:, ::1] qa = np.zeros((P6, 7), dtype=np.int64)  # from A: pure + 6 coeffs of B-linear
    cdef cnp.int64_t[:, ::1] qb = np.zeros((P6, 7), dtype=np.int64)  # from B: pure + 6 coeffs of A-linear
    _fill_quadratic(forms, qa, term_table[0], lin_a, 0, p)
    _fill_quadratic(forms, qb, term_table[3], lin_b, 6, p)
    cdef cnp.int64_t[:, ::1] rows = np.zeros((P6, 2), dtype=np.int64)
    cdef i64 ia
    with nogil:
        for ia in prange(P6, num_threads=max(threads, 1), schedule="dynamic"):
            _d4_block(&qa[ia, 0], &forms[ia, 0], &qb[0, 0], &forms[0, 0], P6, p,
                      &unit[0], &rows[ia, 0])
    return np.asarray(rows).sum(axis=0)


cdef void _d4_block(const i64* qa, const i64* a, const i64* qb, const i64* forms,
                    i64 P6, i64 p, const cnp.uint8_t* unit, i64* out) noexcept nogil:
    cdef i64 ib, c1, c2, idx
    cdef int k
    cdef const i64* b
    cdef const i64* q
    cdef i64 c0 = qa[0]
    cdef i64 val0 = 0
    for ib in range(P6):
        b = forms + 6 * ib
        q = qb + 7 * ib
        c1 = 0
        c2 = 0
        for k in range(6):
            c1 += qa[1 + k] * b[k]
            c2 += q[1 + k] * a[k]
        c1 %= p
        c2 %= p
        if c1 < 0:
            c1 += p
        if c2 < 0:
            c2 += p
        idx = c0 + p * (c1 + p * (c2 + p * q[0]))
        if unit[idx]:
            val0 += 1
    out[0] += val0
    out[1] += P6 - val0


def _flatten_terms(term_table):
    flat = []
    offsets = [0]
    for block in term_table:
        for t in block:
            flat.extend(t)
        offsets.append(offsets[len(offsets) - 1] + len(block))
    return np.asarray(flat, dtype=np.int64), np.asarray(offsets, dtype=np.int32)


def _bilinear_split(term_table):
    """For the x^2y (resp. xy^2) coefficient, which is linear in B (resp. A),
    return the terms grouped by the linear variable."""
    lin_a = [[] for _ in range(6)]  # coefficient of b_k: quadratic in A
    for c, i, j, l in term_table[1]:
        vs = sorted((i, j, l))
        lin_a[vs[2] - 6].append((c, vs[0], vs[1]))
    lin_b = [[] for _ in range(6)]  # coefficient of a_k: quadratic in B
    for c, i, j, l in term_table[2]:
        vs = sorted((i, j, l))
        lin_b[vs[0]].append((c, vs[1] - 6, vs[2] - 6))
    return lin_a, lin_b


def _fill_quadratic(cnp.int64_t[:, ::1] forms, cnp.int64_t[:, ::1] out, pure, lin, int shift, i64 p):
    cdef i64 P6 = forms.shape[0]
    cdef i64 i, s
    cdef int k
    pure_t = [(c, i0 - shift, j0 - shift, l0 - shift) for c, i0, j0, l0 in pure]
    for i in range(P6):
        f = forms[i]
        s = 0
        for c, i0, j0, l0 in pure_t:
            s += c * f[i0] * f[j0] * f[l0]
        out[i, 0] = ((s % p) + p) % p
        for k in range(6):
            s = 0
            for c, i0, j0 in lin[k]:
                s += c * f[i0] * f[j0]
            out[i, 1 + k] = ((s % p) + p) % p


def hist_range(int d, i64 p, int n, i64 start, i64 count, object term_table):
    """Histogram over vector codes [start, start+count) using the generic evaluator.

    A code enumerates coordinates in odometer order: coordinate index
    var*n + k is the code's (var*n + k)-th base-p digit.
    """
    cdef int dim = 4 if d == 3 else 12
    cdef int m = dim * n
    cdef cnp.int64_t[::1] terms
    cdef cnp.int32_t[::1] offsets
    terms, offsets = _flatten_terms(term_table)
    cdef i64 v[12 * MAXN]
    cdef cnp.int64_t[::1] out = np.zeros(n + 1, dtype=np.int64)
    cdef i64 code, x, r
    cdef int j, val
    with nogil:
        for r in range(count):
            code = start + r
            x = code
            for j in range(m):
                v[j] = x % p
                x //= p
            if d == 3:
                val = disc3_val(v, v + n, v + 2 * n, v + 3 * n, n, p)
            else:
                val = disc4_val(v, &terms[0], &offsets[0], n, p)
            out[val] += 1
    return np.asarray(out)


def disc_val(int d, cnp.int64_t[::1] v, i64 p, int n, object term_table):
    """Valuation of the discriminant of a single vector (layout var*n + k)."""
    cdef cnp.int64_t[::1] terms
    cdef cnp.int32_t[::1] offsets
    terms, offsets = _flatten_terms(term_table)
    if d == 3:
        return disc3_val(&v[0], &v[n], &v[2 * n], &v[3 * n], n, p)
    return disc4_val(&v[0], &terms[0], &offsets[0], n, p)


# ---------------------------------------------------------------- Monte Carlo

cdef inline u64 draw(u64 chunk_seed, u64 counter, u64 p, u64 limit) noexcept nogil:
    """Uniform value mod p from the counter-th output of the chunk's splitmix64
    stream; values at or above `limit` (the largest multiple of p below 2^64)
    are re-mixed until accepted, so the result is exactly uniform."""
    cdef u64 x = rs_mix64(chunk_seed + <u64> GOLDEN * (counter + 1))
    while limit != 0 and x >= limit:
        x = rs_mix64(x + <u64> GOLDEN)
    return x % p


def chunk_seed(u64 master, u64 chunk):
    return rs_mix64(rs_mix64(master) + <u64> GOLDEN * (chunk + 1))


def mc_hist(int d, i64 p, int n, i64 samples, u64 seed, object term_table,
            i64 chunk=65536, int threads=1):
    """Valuation histogram of `samples` uniform vectors; see draw() for the stream."""
    cdef int dim = 4 if d == 3 else 12
    cdef int m = dim * n
    cdef i64 nchunks = (samples + chunk - 1) // chunk
    cdef cnp.int64_t[::1] terms
    cdef cnp.int32_t[::1] offsets
    terms, offsets = _flatten_terms(term_table)
    cdef cnp.uint64_t[::1] seeds = np.asarray([chunk_seed(seed, c) for c in range(nchunks)],
                                              dtype=np.uint64)
    cdef cnp.int64_t[:, ::1] rows = np.zeros((max(nchunks, 1), n + 1), dtype=np.int64)
    cdef i64 c
    with nogil:
        for c in prange(nchunks, num_threads=max(threads, 1), schedule="dynamic"):
            _mc_chunk(d, p, n, m, seeds[c], min(chunk, samples - c * chunk),
                      &terms[0], &offsets[0], &rows[c, 0])
    return np.asarray(rows).sum(axis=0)


cdef void _mc_chunk(int d, i64 p, int n, int m, u64 seed, i64 count, const i64* terms,
                    const cnp.int32_t* offsets, i64* out) noexcept nogil:
    # constant terms are drawn first; most samples stop at valuation 0
    cdef i64 v[12 * MAXN]
    cdef i64 v0[12]
    cdef i64 s
    cdef int j, var, k
    cdef int dim = m // n
    cdef int val
    cdef u64 limit = <u64> 0 - ((<u64> 0 - <u64> p) % <u64> p)
    for s in range(count):
        for var in range(dim):
            v0[var] = <i64> draw(seed, <u64> (s * m + var * n), <u64> p, limit)
        if d == 3:
            val = disc3_val(v0, v0 + 1, v0 + 2, v0 + 3, 1, p)
        else:
            val = disc4_val(v0, terms, offsets, 1, p)
        if val == 0 or n == 1:
            out[val] += 1
            continue
        for var in range(dim):
            v[var * n] = v0[var]
            for k in range(1, n):
                v[var * n + k] = <i64> draw(seed, <u64> (s * m + var * n + k), <u64> p, limit)
        if d == 3:
            out[disc3_val(v, v + n, v + 2 * n, v + 3 * n, n, p)] += 1
        else:
            out[disc4_val(v, terms, offsets, n, p)] += 1
