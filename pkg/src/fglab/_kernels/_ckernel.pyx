# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled truncated-product kernel.

Two paths:

* word path, modulus < 2**63: residues in uint64, products accumulated in a
  128-bit accumulator that is reduced lazily;
* multi-modular path, larger moduli: the exact integer convolution is computed
  modulo several 62-bit primes and rebuilt by CRT, then reduced.

Inputs must already be reduced into [0, modulus).
"""
from libc.stdlib cimport malloc, free, calloc

cdef extern from *:
    """
    typedef unsigned __int128 fg_u128;
    """
    ctypedef unsigned long long fg_u128

ctypedef unsigned long long u64

RNS_PRIMES = (
    4611686018427387847, 4611686018427387817, 4611686018427387787, 4611686018427387761,
    4611686018427387751, 4611686018427387737, 4611686018427387733, 4611686018427387709,
    4611686018427387701, 4611686018427387631, 4611686018427387617, 4611686018427387587,
    4611686018427387461, 4611686018427387421, 4611686018427387409, 4611686018427387329,
    4611686018427387323, 4611686018427387301, 4611686018427387271, 4611686018427387241,
    4611686018427387139, 4611686018427387131, 4611686018427387127, 4611686018427387113,
)

WORD_LIMIT = 1 << 63

_crt_cache = {}


cdef void _conv(const u64* ra, const u64* rb, u64* out, Py_ssize_t n,
                const long long[:] lim, const long long[:] off, const long long[:] kt,
                u64 m) nogil:
    cdef fg_u128* acc = <fg_u128*> calloc(n, sizeof(fg_u128))
    cdef Py_ssize_t i, j, o, L, k
    cdef u64 ai, bj
    for i in range(n):
        ai = ra[i]
        if ai == 0:
            continue
        o = off[i]
        L = lim[i]
        for j in range(L):
            bj = rb[j]
            if bj == 0:
                continue
            k = kt[o + j]
            acc[k] += (<fg_u128> ai) * bj
            if acc[k] >> 126:
                acc[k] %= m
    for k in range(n):
        out[k] = <u64> (acc[k] % m)
    free(acc)


def mul_word(list a, list b, Py_ssize_t n, const long long[:] lim, const long long[:] off,
             const long long[:] kt, modulus):
    cdef u64 m = modulus
    cdef u64* ra = <u64*> malloc(n * sizeof(u64))
    cdef u64* rb = <u64*> malloc(n * sizeof(u64))
    cdef u64* out = <u64*> malloc(n * sizeof(u64))
    cdef Py_ssize_t i
    try:
        for i in range(n):
            ra[i] = a[i]
            rb[i] = b[i]
        with nogil:
            _conv(ra, rb, out, n, lim, off, kt, m)
        return [out[i] for i in range(n)]
    finally:
        free(ra)
        free(rb)
        free(out)


def _crt_basis(int r):
    basis = _crt_cache.get(r)
    if basis is None:
        qs = RNS_PRIMES[:r]
        Q = 1
        for q in qs:
            Q *= q
        coeffs = []
        for q in qs:
            Qi = Q // q
            coeffs.append(Qi * pow(Qi, -1, q))
        basis = (Q, tuple(coeffs))
        _crt_cache[r] = basis
    return basis


def primes_needed(modulus, Py_ssize_t n):
    """Smallest r with prod(first r primes) > n * (modulus - 1)**2, or -1."""
    bound = n * (modulus - 1) ** 2
    Q = 1
    for r, q in enumerate(RNS_PRIMES, 1):
        Q *= q
        if Q > bound:
            return r
    return -1


def mul_rns(list a, list b, Py_ssize_t n, const long long[:] lim, const long long[:] off,
            const long long[:] kt, modulus, int r):
    cdef u64* ra = <u64*> malloc(n * sizeof(u64))
    cdef u64* rb = <u64*> malloc(n * sizeof(u64))
    cdef u64* res = <u64*> malloc(n * r * sizeof(u64))
    cdef Py_ssize_t i, j
    cdef u64 q
    Q, coeffs = _crt_basis(r)
    try:
        for j in range(r):
            pq = RNS_PRIMES[j]
            q = pq
            for i in range(n):
                ra[i] = a[i] % pq
                rb[i] = b[i] % pq
            with nogil:
                _conv(ra, rb, res + j * n, n, lim, off, kt, q)
        out = []
        for i in range(n):
            x = 0
            for j in range(r):
                x += res[j * n + i] * coeffs[j]
            out.append(x % Q % modulus)
        return out
    finally:
        free(ra)
        free(rb)
        free(res)
