# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch kernels. Same contract as ``femtorelay._pure``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log2, expm1, fabs, fmin, fmax, INFINITY

cnp.import_array()

cdef double LN2 = 0.6931471805599453
cdef double SUM_TIE_RTOL = 1e-12

cdef enum:
    DF = 0
    QF_EQ = 1
    QF_WZQ = 2
    DFQSI = 3


cdef inline double _cap(double x) noexcept nogil:
    return log2(1.0 + x)


cdef inline int _sign(double a) noexcept nogil:
    return (a > 0) - (a < 0)


cdef inline void _corners(int scheme, double guf, double gvf, double gub,
                          double c_up, double d_up, double gqu,
                          double* out) noexcept nogil:
    cdef double beta
    if scheme == DF or scheme == DFQSI:
        if scheme == DF:
            out[0] = fmin(_cap(guf / (gvf + 1.0)), _cap(gub))
        else:
            out[0] = fmin(_cap(gqu + guf / (gvf + 1.0)), _cap(gub))
        out[1] = fmin(c_up, _cap(gvf))
        out[2] = _cap(gub)
        out[3] = fmin(c_up, _cap(gvf / (guf + 1.0)))
    else:
        if c_up <= 0:
            out[0] = _cap(gub)
            out[1] = 0.0
            out[2] = out[0]
            out[3] = 0.0
            return
        if scheme == QF_EQ:
            beta = (gvf + 1.0 + guf) / d_up
        else:
            beta = (gvf + 1.0 + guf / (gub + 1.0)) / d_up
        out[0] = _cap(gub + guf / (gvf + 1.0 + beta))
        out[1] = _cap(gvf / (1.0 + beta))
        out[2] = _cap(gub + guf / (1.0 + beta))
        out[3] = _cap(gvf / (guf / (gub + 1.0) + 1.0 + beta))


cdef inline int _max_min(double x1, double y1, double x2, double y2,
                         double* value, double* weight) noexcept nogil:
    cdef double m1, m2, den
    if _sign(x1 - x2) * _sign(y1 - y2) >= 0:
        value[0] = fmin(fmax(x1, x2), fmax(y1, y2))
        weight[0] = 1.0 if (x1 >= x2 and y1 >= y2) else 0.0
        return 1
    if _sign(x1 - y1) * _sign(x2 - y2) >= 0:
        m1 = fmin(x1, y1)
        m2 = fmin(x2, y2)
        value[0] = fmax(m1, m2)
        weight[0] = 1.0 if m1 >= m2 else 0.0
        return 2
    den = y2 - y1 + x1 - x2
    value[0] = (x1 * y2 - y1 * x2) / den
    weight[0] = fmin(1.0, fmax(0.0, (y2 - x2) / den))
    return 3


cdef inline double _mix(double w, double a, double b) noexcept nogil:
    if w == 1.0:
        return a
    if w == 0.0:
        return b
    return w * a + (1.0 - w) * b


def scheme_corners(guf, gvf, gub, double c_up, double c_down, int scheme):
    if scheme < 0 or scheme > 3:
        raise ValueError(f"unknown scheme code {scheme}")
    cdef const double[::1] a = np.ascontiguousarray(guf, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(gvf, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(gub, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], i
    res = np.empty((4, n))
    cdef double[:, ::1] r = res
    cdef double d_up = expm1(c_up * LN2)
    cdef double gqu = expm1(c_down * LN2)
    cdef double buf[4]
    with nogil:
        for i in range(n):
            _corners(scheme, a[i], b[i], c[i], c_up, d_up, gqu, buf)
            r[0, i] = buf[0]
            r[1, i] = buf[1]
            r[2, i] = buf[2]
            r[3, i] = buf[3]
    return res[0], res[1], res[2], res[3]


def max_min_pairs(x1, y1, x2, y2):
    cdef const double[::1] a1 = np.ascontiguousarray(x1, dtype=np.float64)
    cdef const double[::1] b1 = np.ascontiguousarray(y1, dtype=np.float64)
    cdef const double[::1] a2 = np.ascontiguousarray(x2, dtype=np.float64)
    cdef const double[::1] b2 = np.ascontiguousarray(y2, dtype=np.float64)
    cdef Py_ssize_t n = a1.shape[0], i
    value = np.empty(n)
    weight = np.empty(n)
    case = np.empty(n, dtype=np.int8)
    cdef double[::1] v = value
    cdef double[::1] w = weight
    cdef signed char[::1] k = case
    with nogil:
        for i in range(n):
            k[i] = <signed char>_max_min(a1[i], b1[i], a2[i], b2[i], &v[i], &w[i])
    return value, weight, case


def evaluate_batch(guf, gvf, gub, double c_up, double c_down, int scheme):
    if scheme < 0 or scheme > 3:
        raise ValueError(f"unknown scheme code {scheme}")
    cdef const double[::1] a = np.ascontiguousarray(guf, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(gvf, dtype=np.float64)
    cdef const double[::1] c = np.ascontiguousarray(gub, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], i
    res = np.empty((n, 10))
    cdef double[:, ::1] out = res
    cdef double d_up = expm1(c_up * LN2)
    cdef double gqu = expm1(c_down * LN2)
    cdef double p[4]
    cdef double s1, s2, best, value, weight
    cdef bint pick_uv
    with nogil:
        for i in range(n):
            _corners(scheme, a[i], b[i], c[i], c_up, d_up, gqu, p)
            out[i, 0] = p[0]
            out[i, 1] = p[1]
            out[i, 2] = p[2]
            out[i, 3] = p[3]
            s1 = p[0] + p[1]
            s2 = p[2] + p[3]
            best = fmax(s1, s2)
            if fabs(s1 - s2) <= SUM_TIE_RTOL * best:
                pick_uv = p[0] > p[2] or (p[0] == p[2] and p[1] >= p[3])
            else:
                pick_uv = s1 > s2
            out[i, 4] = best
            if pick_uv:
                out[i, 5] = p[0]
                out[i, 6] = p[1]
            else:
                out[i, 5] = p[2]
                out[i, 6] = p[3]
            _max_min(p[0], p[1], p[2], p[3], &value, &weight)
            out[i, 7] = value
            out[i, 8] = _mix(weight, p[0], p[2])
            out[i, 9] = _mix(weight, p[1], p[3])
    return res


def oracle_max_min(x1, y1, x2, y2, long n):
    if n < 1:
        raise ValueError("grid must have at least one interval")
    cdef const double[::1] a1 = np.ascontiguousarray(x1, dtype=np.float64)
    cdef const double[::1] b1 = np.ascontiguousarray(y1, dtype=np.float64)
    cdef const double[::1] a2 = np.ascontiguousarray(x2, dtype=np.float64)
    cdef const double[::1] b2 = np.ascontiguousarray(y2, dtype=np.float64)
    cdef Py_ssize_t m = a1.shape[0], i
    cdef long k
    cdef double best, cur, u, v, ax, dx, ay, dy
    result = np.empty(m)
    cdef double[::1] r = result
    grid = np.arange(n + 1, dtype=np.float64) / n
    cdef const double[::1] lams = grid
    with nogil:
        for i in range(m):
            ax = a2[i]
            dx = a1[i] - a2[i]
            ay = b2[i]
            dy = b1[i] - b2[i]
            best = -INFINITY
            # plain comparisons instead of fmin/fmax so the loop vectorizes
            for k in range(n + 1):
                u = ax + lams[k] * dx
                v = ay + lams[k] * dy
                cur = u if u < v else v
                best = cur if cur > best else best
            r[i] = best
    return result
