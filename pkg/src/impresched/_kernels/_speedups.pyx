# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of pure.busy_period_response.  Keep in sync with pure.py."""

from libc.math cimport ceil, INFINITY
from libc.stdlib cimport free, malloc

cdef double _EPS = 1e-9

INF = INFINITY


cdef inline double _ceil_tol(double x) nogil:
    cdef double c = ceil(x - _EPS)
    return c if c > 0.0 else 0.0


def busy_period_response(double c, double period, double jitter,
                         hp_c, hp_p, hp_j, double bound, long max_iter):
    """See pure.busy_period_response."""
    if c <= _EPS:
        return 0.0
    cdef Py_ssize_t n = len(hp_c)
    cdef double* hc = NULL
    cdef double* hp = NULL
    cdef double* hj = NULL
    cdef Py_ssize_t i
    cdef double u_hp = 0.0, b_hp = 0.0, u_all, total_c, length, nxt, jump
    cdef double best, w, qc, start, resp
    cdef long iters = 0, instances, q

    if n > 0:
        hc = <double*> malloc(n * sizeof(double))
        hp = <double*> malloc(n * sizeof(double))
        hj = <double*> malloc(n * sizeof(double))
        if hc == NULL or hp == NULL or hj == NULL:
            if hc != NULL: free(hc)
            if hp != NULL: free(hp)
            if hj != NULL: free(hj)
            raise MemoryError()
        for i in range(n):
            hc[i] = hp_c[i]
            hp[i] = hp_p[i]
            hj[i] = hp_j[i]

    try:
        for i in range(n):
            u_hp += hc[i] / hp[i]
            b_hp += hc[i] * hj[i] / hp[i]
        u_all = u_hp + c / period
        if u_all > 1.0 + _EPS:
            return INFINITY

        total_c = c
        for i in range(n):
            total_c += hc[i]
        length = total_c
        if u_all < 1.0:
            jump = (b_hp + c * jitter / period) / (1.0 - u_all)
            if jump > length:
                length = jump
        while True:
            nxt = _ceil_tol((length + jitter) / period) * c
            for i in range(n):
                nxt += _ceil_tol((length + hj[i]) / hp[i]) * hc[i]
            if nxt == length:
                break
            length = nxt
            iters += 1
            if length > bound or iters > max_iter:
                return INFINITY

        instances = <long> _ceil_tol((length + jitter) / period)
        if instances < 1:
            instances = 1

        best = 0.0
        w = 0.0
        for q in range(instances):
            qc = (q + 1) * c
            start = qc
            if u_hp < 1.0:
                jump = (qc + b_hp) / (1.0 - u_hp)
                if jump > start:
                    start = jump
            if w + c > start:
                start = w + c
            w = start
            while True:
                nxt = qc
                for i in range(n):
                    nxt += _ceil_tol((w + hj[i]) / hp[i]) * hc[i]
                if nxt == w:
                    break
                w = nxt
                iters += 1
                if w > bound or iters > max_iter:
                    return INFINITY
            resp = w - q * period
            if resp > best:
                best = resp
        return best
    finally:
        if hc != NULL: free(hc)
        if hp != NULL: free(hp)
        if hj != NULL: free(hj)
