# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term kernels; same contract as ``_pykernels``."""

from fractions import Fraction

from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM
from cpython.ref cimport Py_INCREF
from libc.stdlib cimport malloc, free


cdef inline object _norm(object c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _popcount(unsigned long long x) nogil:
    return __builtin_popcountll(x)


cdef list _encode(dict terms, tuple odd, Py_ssize_t n, long** exps,
                  unsigned long long** masks):
    cdef Py_ssize_t nt = len(terms), i = 0, j, bit
    cdef long* e = <long*>malloc(max(nt * n, 1) * sizeof(long))
    cdef unsigned long long* k = <unsigned long long*>malloc(
        max(nt, 1) * sizeof(unsigned long long))
    cdef unsigned long long mk
    cdef tuple mono
    cdef list coefs = []
    for mono, c in terms.items():
        for j in range(n):
            e[i * n + j] = mono[j]
        mk = 0
        for bit in range(len(odd)):
            if e[i * n + <Py_ssize_t>odd[bit]]:
                mk |= (<unsigned long long>1) << bit
        k[i] = mk
        coefs.append(c)
        i += 1
    exps[0] = e
    masks[0] = k
    return coefs


def mul_terms(dict a, dict b, tuple odd):
    if not a or not b:
        return {}
    if len(odd) > 64:
        from ._pykernels import mul_terms as slow
        return slow(a, b, odd)
    cdef Py_ssize_t n = len(next(iter(a)))
    cdef long* ea
    cdef long* eb
    cdef unsigned long long* ka
    cdef unsigned long long* kb
    cdef list ca, cb
    cdef Py_ssize_t i, j, v, na = len(a), nb = len(b)
    cdef unsigned long long m, low, hi
    cdef int swaps
    cdef tuple key
    cdef object item, c, s
    cdef dict out = {}
    ca = _encode(a, odd, n, &ea, &ka)
    cb = _encode(b, odd, n, &eb, &kb)
    try:
        for i in range(na):
            for j in range(nb):
                if ka[i] & kb[j]:
                    continue
                swaps = 0
                m = kb[j]
                while m:
                    low = m & (~m + 1)
                    hi = ka[i] & ~((low << 1) - 1)
                    swaps += _popcount(hi)
                    m ^= low
                c = ca[i] * cb[j]
                if swaps & 1:
                    c = -c
                key = PyTuple_New(n)
                for v in range(n):
                    item = ea[i * n + v] + eb[j * n + v]
                    Py_INCREF(item)
                    PyTuple_SET_ITEM(key, v, item)
                s = out.get(key, 0) + c
                if s:
                    out[key] = _norm(s)
                else:
                    out.pop(key, None)
    finally:
        free(ea); free(eb); free(ka); free(kb)
    return out


def partial_terms(dict a, Py_ssize_t pos, bint odd_var, tuple odd):
    cdef dict out = {}
    cdef tuple mono
    cdef list m
    cdef long e, par
    cdef object q
    for mono, coef in a.items():
        e = mono[pos]
        if e == 0:
            continue
        if odd_var:
            par = 0
            for q in odd:
                if <Py_ssize_t>q >= pos:
                    break
                par += mono[q]
            c = -coef if par & 1 else coef
        else:
            c = coef * e
        m = list(mono)
        m[pos] = e - 1
        key = tuple(m)
        s = out.get(key, 0) + c
        if s:
            out[key] = _norm(s)
        else:
            out.pop(key, None)
    return out


def add_terms(dict a, dict b, scale=1):
    cdef dict out = dict(a)
    for m, c in b.items():
        s = out.get(m, 0) + scale * c
        if s:
            out[m] = _norm(s)
        else:
            out.pop(m, None)
    return out
