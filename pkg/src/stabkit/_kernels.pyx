# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Mirrors stabkit._kernels_py function for function."""
import numpy as np
cimport cython
from libc.math cimport cos, sin, exp, NAN


cdef inline double cabs2(double complex x) nogil:
    return x.real * x.real + x.imag * x.imag


def propagate(step, gram_step, metric, obs, z0, Py_ssize_t nsteps):
    cdef const double complex[:, ::1] P = np.ascontiguousarray(step, dtype=complex)
    cdef const double complex[:, ::1] Q = np.ascontiguousarray(gram_step, dtype=complex)
    cdef const double[::1] w = np.ascontiguousarray(metric, dtype=float)
    cdef const double complex[:, ::1] C = np.ascontiguousarray(obs, dtype=complex).reshape(-1, P.shape[0])
    cdef Py_ssize_t n = P.shape[0]
    cdef Py_ssize_t m = C.shape[0]
    states_arr = np.empty((nsteps + 1, n), dtype=complex)
    energies_arr = np.empty(nsteps + 1)
    observed_arr = np.empty(nsteps + 1)
    increments_arr = np.empty(nsteps)
    cdef double complex[:, ::1] S = states_arr
    cdef double[::1] E = energies_arr
    cdef double[::1] O = observed_arr
    cdef double[::1] D = increments_arr
    cdef const double complex[::1] zin = np.ascontiguousarray(z0, dtype=complex)
    cdef Py_ssize_t t, i, j, r
    cdef double complex acc, qz
    cdef double e, o, d

    with nogil:
        for i in range(n):
            S[0, i] = zin[i]
        for t in range(nsteps + 1):
            e = 0.0
            for i in range(n):
                e = e + w[i] * cabs2(S[t, i])
            E[t] = 0.5 * e
            o = 0.0
            for r in range(m):
                acc = 0.0
                for j in range(n):
                    acc = acc + C[r, j] * S[t, j]
                o = o + cabs2(acc)
            O[t] = o
            if t == nsteps:
                break
            d = 0.0
            for i in range(n):
                qz = 0.0
                acc = 0.0
                for j in range(n):
                    qz = qz + Q[i, j] * S[t, j]
                    acc = acc + P[i, j] * S[t, j]
                d = d + (S[t, i].real * qz.real + S[t, i].imag * qz.imag)
                S[t + 1, i] = acc
            D[t] = d
    return states_arr, energies_arr, observed_arr, increments_arr


def gramian_trapezoid(step, obs, Py_ssize_t nsteps, double dt):
    cdef const double complex[:, ::1] P = np.ascontiguousarray(step, dtype=complex)
    cdef Py_ssize_t n = P.shape[0]
    y_arr = np.array(obs, dtype=complex, order="C").reshape(-1, n)
    cdef Py_ssize_t m = y_arr.shape[0]
    cdef double complex[:, ::1] Y = y_arr
    cdef double complex[:, ::1] Ynew = np.empty((m, n), dtype=complex)
    gram_arr = np.zeros((n, n), dtype=complex)
    cdef double complex[:, ::1] G = gram_arr
    cdef Py_ssize_t t, i, j, r, q
    cdef double wt
    cdef double complex acc, yri

    with nogil:
        for t in range(nsteps + 1):
            wt = 0.5 * dt if (t == 0 or t == nsteps) else dt
            for r in range(m):
                for i in range(n):
                    yri = Y[r, i]
                    if yri.real == 0.0 and yri.imag == 0.0:
                        continue
                    yri = wt * (yri.real - 1j * yri.imag)
                    for j in range(n):
                        G[i, j] = G[i, j] + yri * Y[r, j]
            if t == nsteps:
                break
            for r in range(m):
                for j in range(n):
                    acc = 0.0
                    for q in range(n):
                        acc = acc + Y[r, q] * P[q, j]
                    Ynew[r, j] = acc
            for r in range(m):
                for j in range(n):
                    Y[r, j] = Ynew[r, j]
    return gram_arr


cdef inline double _ftilde(double z) nogil:
    cdef double c = cos(z)
    cdef double s = sin(z)
    cdef double e = exp(-z)
    cdef double z3 = z * z * z
    return c + (s - c) / z3 + 2.0 * e + e * e * (c + c / z3 + s / z3)


def ftilde(double z):
    return _ftilde(z)


def bisect_ftilde(double a, double b, int maxiter=200):
    cdef double fa = _ftilde(a)
    cdef double fb = _ftilde(b)
    cdef double mid, fm
    cdef int it
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        return NAN
    for it in range(maxiter):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm = _ftilde(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (fa > 0):
            a = mid
            fa = fm
        else:
            b = mid
    return 0.5 * (a + b)
