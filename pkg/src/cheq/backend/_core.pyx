# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the training hot loop.

Same contract as ``cheq.backend.pure``; matrix products go through BLAS
dgemm, bias/activation/Adam loops are fused in C. All arrays are float64,
C-contiguous.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt, tanh
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

cdef int _RELU = 0

ACT_RELU = 0
ACT_TANH = 1

NAME = "compiled"

DEF MAX_LAYERS = 16


cdef inline void _gemm(char ta, char tb, int m, int n, int k,
                       double* a, int lda, double* b, int ldb,
                       double beta, double* c, int ldc) noexcept nogil:
    cdef double one = 1.0
    dgemm(&ta, &tb, &m, &n, &k, &one, a, &lda, b, &ldb, &beta, c, &ldc)


def param_count(sizes):
    return sum(sizes[k] * sizes[k - 1] + sizes[k] for k in range(1, len(sizes)))


def layer_views(params, sizes):
    ws, bs = [], []
    off = 0
    for k in range(1, len(sizes)):
        n, m = sizes[k], sizes[k - 1]
        ws.append(params[off:off + n * m].reshape(n, m))
        off += n * m
        bs.append(params[off:off + n])
        off += n
    return ws, bs


def forward_batch(double[::1] params, sizes, int act, double[:, ::1] x):
    """BLAS-backed forward pass; see ``pure.forward_batch``."""
    cdef int nlay = len(sizes) - 1
    if nlay > MAX_LAYERS:
        raise ValueError("too many layers")
    cdef int B = x.shape[0]
    cdef int[MAX_LAYERS + 1] dims
    cdef int k
    for k in range(nlay + 1):
        dims[k] = sizes[k]
    if x.shape[1] != dims[0]:
        raise ValueError("input width mismatch")

    cache = [np.asarray(x)]
    cdef double[:, ::1] a_prev = x
    cdef double[:, ::1] h
    cdef cnp.ndarray h_arr
    cdef long off = 0
    cdef int n, m, i, j
    cdef double* wp
    cdef double* bp
    cdef double val
    for k in range(nlay):
        n = dims[k + 1]
        m = dims[k]
        h_arr = np.empty((B, n), dtype=np.float64)
        h = h_arr
        wp = &params[off]
        bp = &params[off + <long>n * m]
        off += <long>n * m + n
        with nogil:
            # h (B x n, C-order) = a_prev (B x m) @ W.T; in Fortran terms
            # h^T = W @ a_prev^T with the C-order buffers reinterpreted.
            _gemm(b'T', b'N', n, B, m, wp, m, &a_prev[0, 0], m, 0.0, &h[0, 0], n)
            if k < nlay - 1 and act == _RELU:
                for i in range(B):
                    for j in range(n):
                        val = h[i, j] + bp[j]
                        h[i, j] = val if val > 0.0 else 0.0
            elif k < nlay - 1:
                for i in range(B):
                    for j in range(n):
                        h[i, j] = tanh(h[i, j] + bp[j])
            else:
                for i in range(B):
                    for j in range(n):
                        h[i, j] = h[i, j] + bp[j]
        if k < nlay - 1:
            cache.append(h_arr)
        a_prev = h
    return np.asarray(a_prev), cache


def backward_batch(double[::1] params, sizes, int act, list cache, double[:, ::1] dy):
    """BLAS-backed reverse pass; see ``pure.backward_batch``."""
    cdef int nlay = len(sizes) - 1
    cdef int B = dy.shape[0]
    cdef int[MAX_LAYERS + 1] dims
    cdef long[MAX_LAYERS] offs
    cdef int k
    cdef long off = 0
    for k in range(nlay + 1):
        dims[k] = sizes[k]
    for k in range(nlay):
        offs[k] = off
        off += <long>dims[k + 1] * dims[k] + dims[k + 1]

    dparams_arr = np.empty(off, dtype=np.float64)
    cdef double[::1] dparams = dparams_arr
    cdef double[:, ::1] dh = dy.copy()
    cdef double[:, ::1] a
    cdef double[:, ::1] da
    cdef cnp.ndarray da_arr
    cdef double* wp
    cdef double* dwp
    cdef double* dbp
    cdef int n, m, i, j
    cdef double s, av

    for k in range(nlay - 1, -1, -1):
        n = dims[k + 1]
        m = dims[k]
        wp = &params[offs[k]]
        dwp = &dparams[offs[k]]
        dbp = &dparams[offs[k] + <long>n * m]
        if k < nlay - 1:
            a = cache[k + 1]
            with nogil:
                if act == _RELU:
                    for i in range(B):
                        for j in range(n):
                            if a[i, j] <= 0.0:
                                dh[i, j] = 0.0
                else:
                    for i in range(B):
                        for j in range(n):
                            av = a[i, j]
                            dh[i, j] = dh[i, j] * (1.0 - av * av)
        a = cache[k]
        with nogil:
            # dW (n x m, C-order): dW^T = A_prev^T @ dh in Fortran terms.
            _gemm(b'N', b'T', m, n, B, &a[0, 0], m, &dh[0, 0], n, 0.0, dwp, m)
            for j in range(n):
                s = 0.0
                for i in range(B):
                    s += dh[i, j]
                dbp[j] = s
        da_arr = np.empty((B, m), dtype=np.float64)
        da = da_arr
        with nogil:
            # dA_prev (B x m): dA^T = W^T @ dh^T in Fortran terms.
            _gemm(b'N', b'N', m, B, n, wp, m, &dh[0, 0], n, 0.0, &da[0, 0], m)
        dh = da
    return dparams_arr, da_arr


def backward_input(double[::1] params, sizes, int act, list cache,
                   double[:, ::1] dy):
    """Reverse pass for the input gradient only (no parameter gradients)."""
    cdef int nlay = len(sizes) - 1
    cdef int B = dy.shape[0]
    cdef int[MAX_LAYERS + 1] dims
    cdef long[MAX_LAYERS] offs
    cdef int k
    cdef long off = 0
    for k in range(nlay + 1):
        dims[k] = sizes[k]
    for k in range(nlay):
        offs[k] = off
        off += <long>dims[k + 1] * dims[k] + dims[k + 1]

    cdef double[:, ::1] dh = dy.copy()
    cdef double[:, ::1] a
    cdef double[:, ::1] da
    cdef cnp.ndarray da_arr
    cdef double* wp
    cdef int n, m, i, j
    cdef double av

    for k in range(nlay - 1, -1, -1):
        n = dims[k + 1]
        m = dims[k]
        wp = &params[offs[k]]
        if k < nlay - 1:
            a = cache[k + 1]
            with nogil:
                if act == _RELU:
                    for i in range(B):
                        for j in range(n):
                            if a[i, j] <= 0.0:
                                dh[i, j] = 0.0
                else:
                    for i in range(B):
                        for j in range(n):
                            av = a[i, j]
                            dh[i, j] = dh[i, j] * (1.0 - av * av)
        da_arr = np.empty((B, m), dtype=np.float64)
        da = da_arr
        with nogil:
            _gemm(b'N', b'N', m, B, n, wp, m, &dh[0, 0], n, 0.0, &da[0, 0], m)
        dh = da
    return da_arr


def adam_update(double[::1] params, double[::1] grads, double[::1] m,
                double[::1] v, long t, double lr, double beta1, double beta2,
                double eps):
    cdef long n = params.shape[0]
    cdef long i
    cdef double c1 = 1.0 - beta1 ** t
    cdef double c2 = 1.0 - beta2 ** t
    cdef double g, mh, vh
    with nogil:
        for i in range(n):
            g = grads[i]
            m[i] = beta1 * m[i] + (1.0 - beta1) * g
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g
            mh = m[i] / c1
            vh = v[i] / c2
            params[i] -= lr * mh / (sqrt(vh) + eps)


def polyak_update(double[::1] target, double[::1] online, double tau):
    cdef long n = target.shape[0]
    cdef long i
    with nogil:
        for i in range(n):
            target[i] = (1.0 - tau) * target[i] + tau * online[i]
