"""Numba gate kernels operating on batches of statevectors.

Every kernel takes a C-contiguous complex128 array of shape (batch, 2**n)
and a bit position m = n - 1 - qubit (qubit 0 owns the most significant
index bit).  Gate kernels mutate in place; reduction kernels accumulate
serially within each row so results are bit-for-bit reproducible
regardless of thread count.
"""
from __future__ import annotations

import numpy as np
from numba import njit, prange

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@njit(cache=True, parallel=True)
def x_kernel(a, m):
    half = a.shape[1] >> 1
    tk = 1 << m
    for w in prange(a.shape[0] * half):
        b = w // half
        g = w % half
        i0 = ((g >> m) << (m + 1)) + (g & (tk - 1))
        i1 = i0 + tk
        a[b, i0], a[b, i1] = a[b, i1], a[b, i0]


@njit(cache=True, parallel=True)
def y_kernel(a, m):
    half = a.shape[1] >> 1
    tk = 1 << m
    for w in prange(a.shape[0] * half):
        b = w // half
        g = w % half
        i0 = ((g >> m) << (m + 1)) + (g & (tk - 1))
        i1 = i0 + tk
        a0 = a[b, i0]
        a[b, i0] = -1j * a[b, i1]
        a[b, i1] = 1j * a0


@njit(cache=True, parallel=True)
def z_kernel(a, m):
    half = a.shape[1] >> 1
    tk = 1 << m
    for w in prange(a.shape[0] * half):
        b = w // half
        g = w % half
        i1 = ((g >> m) << (m + 1)) + (g & (tk - 1)) + tk
        a[b, i1] = -a[b, i1]


@njit(cache=True, parallel=True)
def h_kernel(a, m):
    half = a.shape[1] >> 1
    tk = 1 << m
    for w in prange(a.shape[0] * half):
        b = w // half
        g = w % half
        i0 = ((g >> m) << (m + 1)) + (g & (tk - 1))
        i1 = i0 + tk
        a0 = a[b, i0]
        a1 = a[b, i1]
        a[b, i0] = (a0 + a1) * _INV_SQRT2
        a[b, i1] = (a0 - a1) * _INV_SQRT2


@njit(cache=True, parallel=True)
def phase_kernel(a, m, ephi):
    half = a.shape[1] >> 1
    tk = 1 << m
    for w in prange(a.shape[0] * half):
        b = w // half
        g = w % half
        i1 = ((g >> m) << (m + 1)) + (g & (tk - 1)) + tk
        a[b, i1] = ephi * a[b, i1]


@njit(cache=True, parallel=True)
def exp_xx_kernel(a, mh, ml, c, s):
    quarter = a.shape[1] >> 2
    tkh = 1 << mh
    tkl = 1 << ml
    js = 1j * s
    for w in prange(a.shape[0] * quarter):
        b = w // quarter
        g = w % quarter
        t = ((g >> ml) << (ml + 1)) + (g & (tkl - 1))
        i00 = ((t >> mh) << (mh + 1)) + (t & (tkh - 1))
        i01 = i00 + tkl
        i10 = i00 + tkh
        i11 = i10 + tkl
        a00 = a[b, i00]
        a01 = a[b, i01]
        a10 = a[b, i10]
        a11 = a[b, i11]
        a[b, i00] = c * a00 + js * a11
        a[b, i01] = c * a01 + js * a10
        a[b, i10] = c * a10 + js * a01
        a[b, i11] = c * a11 + js * a00


@njit(cache=True, parallel=True)
def exp_yy_kernel(a, mh, ml, c, s):
    quarter = a.shape[1] >> 2
    tkh = 1 << mh
    tkl = 1 << ml
    js = 1j * s
    for w in prange(a.shape[0] * quarter):
        b = w // quarter
        g = w % quarter
        t = ((g >> ml) << (ml + 1)) + (g & (tkl - 1))
        i00 = ((t >> mh) << (mh + 1)) + (t & (tkh - 1))
        i01 = i00 + tkl
        i10 = i00 + tkh
        i11 = i10 + tkl
        a00 = a[b, i00]
        a01 = a[b, i01]
        a10 = a[b, i10]
        a11 = a[b, i11]
        a[b, i00] = c * a00 - js * a11
        a[b, i01] = c * a01 + js * a10
        a[b, i10] = c * a10 + js * a01
        a[b, i11] = c * a11 - js * a00


@njit(cache=True, parallel=True)
def exp_zz_kernel(a, mh, ml, c, s):
    quarter = a.shape[1] >> 2
    tkh = 1 << mh
    tkl = 1 << ml
    ep = complex(c, s)
    em = complex(c, -s)
    for w in prange(a.shape[0] * quarter):
        b = w // quarter
        g = w % quarter
        t = ((g >> ml) << (ml + 1)) + (g & (tkl - 1))
        i00 = ((t >> mh) << (mh + 1)) + (t & (tkh - 1))
        i01 = i00 + tkl
        i10 = i00 + tkh
        i11 = i10 + tkl
        a[b, i00] = ep * a[b, i00]
        a[b, i01] = em * a[b, i01]
        a[b, i10] = em * a[b, i10]
        a[b, i11] = ep * a[b, i11]


@njit(cache=True, parallel=True)
def pauli_xx_kernel(a, mh, ml):
    quarter = a.shape[1] >> 2
    tkh = 1 << mh
    tkl = 1 << ml
    for w in prange(a.shape[0] * quarter):
        b = w // quarter
        g = w % quarter
        t = ((g >> ml) << (ml + 1)) + (g & (tkl - 1))
        i00 = ((t >> mh) << (mh + 1)) + (t & (tkh - 1))
        i01 = i00 + tkl
        i10 = i00 + tkh
        i11 = i10 + tkl
        a[b, i00], a[b, i11] = a[b, i11], a[b, i00]
        a[b, i01], a[b, i10] = a[b, i10], a[b, i01]


@njit(cache=True, parallel=True)
def pauli_yy_kernel(a, mh, ml):
    quarter = a.shape[1] >> 2
    tkh = 1 << mh
    tkl = 1 << ml
    for w in prange(a.shape[0] * quarter):
        b = w // quarter
        g = w % quarter
        t = ((g >> ml) << (ml + 1)) + (g & (tkl - 1))
        i00 = ((t >> mh) << (mh + 1)) + (t & (tkh - 1))
        i01 = i00 + tkl
        i10 = i00 + tkh
        i11 = i10 + tkl
        a00 = a[b, i00]
        a01 = a[b, i01]
        a[b, i00] = -a[b, i11]
        a[b, i01] = a[b, i10]
        a[b, i10] = a01
        a[b, i11] = -a00


@njit(cache=True, parallel=True)
def pauli_zz_kernel(a, mh, ml):
    quarter = a.shape[1] >> 2
    tkh = 1 << mh
    tkl = 1 << ml
    for w in prange(a.shape[0] * quarter):
        b = w // quarter
        g = w % quarter
        t = ((g >> ml) << (ml + 1)) + (g & (tkl - 1))
        i00 = ((t >> mh) << (mh + 1)) + (t & (tkh - 1))
        a[b, i00 + tkl] = -a[b, i00 + tkl]
        a[b, i00 + tkh] = -a[b, i00 + tkh]


@njit(cache=True, parallel=True)
def expect_x_kernel(a, m, out):
    half = a.shape[1] >> 1
    tk = 1 << m
    for b in prange(a.shape[0]):
        acc = 0.0
        for g in range(half):
            i0 = ((g >> m) << (m + 1)) + (g & (tk - 1))
            acc += 2.0 * (np.conj(a[b, i0]) * a[b, i0 + tk]).real
        out[b] = acc


@njit(cache=True, parallel=True)
def expect_y_kernel(a, m, out):
    half = a.shape[1] >> 1
    tk = 1 << m
    for b in prange(a.shape[0]):
        acc = 0.0
        for g in range(half):
            i0 = ((g >> m) << (m + 1)) + (g & (tk - 1))
            acc += 2.0 * (np.conj(a[b, i0]) * a[b, i0 + tk]).imag
        out[b] = acc


@njit(cache=True, parallel=True)
def expect_z_kernel(a, m, out):
    half = a.shape[1] >> 1
    tk = 1 << m
    for b in prange(a.shape[0]):
        acc = 0.0
        for g in range(half):
            i0 = ((g >> m) << (m + 1)) + (g & (tk - 1))
            i1 = i0 + tk
            acc += (a[b, i0].real ** 2 + a[b, i0].imag ** 2) - (a[b, i1].real ** 2 + a[b, i1].imag ** 2)
        out[b] = acc


@njit(cache=True, parallel=True)
def corr_xx_kernel(lam, psi, mh, ml, out):
    quarter = lam.shape[1] >> 2
    tkh = 1 << mh
    tkl = 1 << ml
    for b in prange(lam.shape[0]):
        acc = 0j
        for g in range(quarter):
            t = ((g >> ml) << (ml + 1)) + (g & (tkl - 1))
            i00 = ((t >> mh) << (mh + 1)) + (t & (tkh - 1))
            i01 = i00 + tkl
            i10 = i00 + tkh
            i11 = i10 + tkl
            acc += (np.conj(lam[b, i00]) * psi[b, i11] + np.conj(lam[b, i11]) * psi[b, i00]
                    + np.conj(lam[b, i01]) * psi[b, i10] + np.conj(lam[b, i10]) * psi[b, i01])
        out[b] = acc


@njit(cache=True, parallel=True)
def corr_yy_kernel(lam, psi, mh, ml, out):
    quarter = lam.shape[1] >> 2
    tkh = 1 << mh
    tkl = 1 << ml
    for b in prange(lam.shape[0]):
        acc = 0j
        for g in range(quarter):
            t = ((g >> ml) << (ml + 1)) + (g & (tkl - 1))
            i00 = ((t >> mh) << (mh + 1)) + (t & (tkh - 1))
            i01 = i00 + tkl
            i10 = i00 + tkh
            i11 = i10 + tkl
            acc += (np.conj(lam[b, i01]) * psi[b, i10] + np.conj(lam[b, i10]) * psi[b, i01]
                    - np.conj(lam[b, i00]) * psi[b, i11] - np.conj(lam[b, i11]) * psi[b, i00])
        out[b] = acc


@njit(cache=True, parallel=True)
def corr_zz_kernel(lam, psi, mh, ml, out):
    quarter = lam.shape[1] >> 2
    tkh = 1 << mh
    tkl = 1 << ml
    for b in prange(lam.shape[0]):
        acc = 0j
        for g in range(quarter):
            t = ((g >> ml) << (ml + 1)) + (g & (tkl - 1))
            i00 = ((t >> mh) << (mh + 1)) + (t & (tkh - 1))
            i01 = i00 + tkl
            i10 = i00 + tkh
            i11 = i10 + tkl
            acc += (np.conj(lam[b, i00]) * psi[b, i00] + np.conj(lam[b, i11]) * psi[b, i11]
                    - np.conj(lam[b, i01]) * psi[b, i01] - np.conj(lam[b, i10]) * psi[b, i10])
        out[b] = acc
