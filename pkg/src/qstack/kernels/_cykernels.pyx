# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Cython statevector update kernels (hot inner loops of the simulator).

Same contract as ``pykernels``: in-place updates of a 2^n complex128
array, ``k`` a storage bit, ``cmask`` a control bitmask.
"""

IMPLEMENTATION = "cython"


def apply_1q(double complex[::1] amps, Py_ssize_t k, unsigned long long cmask,
             double complex m00, double complex m01,
             double complex m10, double complex m11):
    cdef Py_ssize_t n = amps.shape[0]
    cdef unsigned long long bit = 1ull << k
    cdef unsigned long long full = bit | cmask
    cdef unsigned long long i
    cdef Py_ssize_t j
    cdef double complex a, b
    for i in range(<unsigned long long> n):
        if (i & full) == cmask:
            j = <Py_ssize_t> (i | bit)
            a = amps[<Py_ssize_t> i]
            b = amps[j]
            amps[<Py_ssize_t> i] = m00 * a + m01 * b
            amps[j] = m10 * a + m11 * b


def apply_diag(double complex[::1] amps, Py_ssize_t k, unsigned long long cmask,
               double complex d0, double complex d1):
    cdef Py_ssize_t n = amps.shape[0]
    cdef unsigned long long bit = 1ull << k
    cdef unsigned long long i
    for i in range(<unsigned long long> n):
        if (i & cmask) == cmask:
            if i & bit:
                amps[<Py_ssize_t> i] = amps[<Py_ssize_t> i] * d1
            else:
                amps[<Py_ssize_t> i] = amps[<Py_ssize_t> i] * d0


def apply_x(double complex[::1] amps, Py_ssize_t k, unsigned long long cmask):
    cdef Py_ssize_t n = amps.shape[0]
    cdef unsigned long long bit = 1ull << k
    cdef unsigned long long full = bit | cmask
    cdef unsigned long long i
    cdef Py_ssize_t j
    cdef double complex a
    for i in range(<unsigned long long> n):
        if (i & full) == cmask:
            j = <Py_ssize_t> (i | bit)
            a = amps[<Py_ssize_t> i]
            amps[<Py_ssize_t> i] = amps[j]
            amps[j] = a
