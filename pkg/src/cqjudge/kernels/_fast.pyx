# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics documented in ``_ref.py``.

Every arithmetic statement mirrors the reference implementation
line-for-line and the extension is built with -ffp-contract=off, so
results are bit-identical with the pure path.
"""

import numpy as np


def scan_best_split(double[::1] values, long[::1] labels, int n_classes=3):
    cdef Py_ssize_t n = values.shape[0]
    cdef long[::1] left = np.zeros(n_classes, dtype=np.int64)
    cdef long[::1] right = np.zeros(n_classes, dtype=np.int64)
    cdef Py_ssize_t i, k
    cdef long c, n_left = 0, n_right
    cdef double thr, p, q, sum_left, sum_right, gini
    cdef double best_gini = 0.0, best_thr = 0.0
    cdef bint found = False

    for i in range(n):
        right[labels[i]] += 1
    for i in range(n - 1):
        c = labels[i]
        left[c] += 1
        right[c] -= 1
        n_left += 1
        if values[i + 1] > values[i]:
            thr = 0.5 * (values[i] + values[i + 1])
            if thr >= values[i + 1]:
                thr = values[i]
            n_right = n - n_left
            sum_left = 0.0
            sum_right = 0.0
            for k in range(n_classes):
                p = (<double> left[k]) / (<double> n_left)
                sum_left += p * p
                q = (<double> right[k]) / (<double> n_right)
                sum_right += q * q
            gini = ((<double> n_left) * (1.0 - sum_left)
                    + (<double> n_right) * (1.0 - sum_right)) / (<double> n)
            if (not found) or gini < best_gini:
                best_gini = gini
                best_thr = thr
                found = True
    return best_gini, best_thr, found


def svc_dual_cd(double[::1] data, int[::1] indices, long[::1] indptr,
                int n_cols, double[::1] ybin, double c_reg, double tol,
                int max_iter):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef double diag = 0.5 / c_reg
    cdef double[::1] qd = np.zeros(n, dtype=np.float64)
    cdef double[::1] w = np.zeros(n_cols, dtype=np.float64)
    cdef double[::1] alpha = np.zeros(n, dtype=np.float64)
    cdef Py_ssize_t i, j, start, end, epoch
    cdef double acc, dot, grad, pg, violation, max_violation, new_alpha, step
    cdef int n_iter = 0
    cdef bint converged = False

    for i in range(n):
        acc = 0.0
        for j in range(indptr[i], indptr[i + 1]):
            acc += data[j] * data[j]
        qd[i] = acc + diag

    for epoch in range(max_iter):
        n_iter = epoch + 1
        max_violation = 0.0
        for i in range(n):
            start = indptr[i]
            end = indptr[i + 1]
            dot = 0.0
            for j in range(start, end):
                dot += w[indices[j]] * data[j]
            grad = ybin[i] * dot - 1.0 + alpha[i] * diag
            if alpha[i] == 0.0:
                pg = grad if grad < 0.0 else 0.0
            else:
                pg = grad
            violation = -pg if pg < 0.0 else pg
            if violation > max_violation:
                max_violation = violation
            if pg != 0.0:
                new_alpha = alpha[i] - grad / qd[i]
                if new_alpha < 0.0:
                    new_alpha = 0.0
                step = (new_alpha - alpha[i]) * ybin[i]
                if step != 0.0:
                    alpha[i] = new_alpha
                    for j in range(start, end):
                        w[indices[j]] += step * data[j]
        if max_violation < tol:
            converged = True
            break
    return np.asarray(w), n_iter, converged
