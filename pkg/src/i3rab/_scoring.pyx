# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring/update kernel for the transition parser.

Semantics must stay bit-identical to i3rab._scoring_py: scores are
accumulated feature row by feature row in order, updates add or
subtract exactly 1.0, and averaging divides the lazily accumulated
totals by the step count.
"""

import numpy as np

BACKEND = "cython"


def score_rows(double[:, ::1] weights, long[::1] rows, double[::1] out):
    """Accumulate the weight rows of the active features into out."""
    cdef Py_ssize_t n_rows = rows.shape[0]
    cdef Py_ssize_t width = out.shape[0]
    cdef Py_ssize_t i, t, r
    for t in range(width):
        out[t] = 0.0
    for i in range(n_rows):
        r = rows[i]
        for t in range(width):
            out[t] += weights[r, t]


def best_legal(double[::1] scores, unsigned char[::1] legal):
    """Index of the highest-scoring legal transition; ties go to the
    lowest index.  Returns -1 when nothing is legal."""
    cdef Py_ssize_t width = scores.shape[0]
    cdef Py_ssize_t t
    cdef Py_ssize_t best = -1
    cdef double best_score = 0.0
    for t in range(width):
        if not legal[t]:
            continue
        if best < 0 or scores[t] > best_score:
            best = t
            best_score = scores[t]
    return best


def perceptron_update(
    double[:, ::1] weights,
    double[:, ::1] totals,
    long[:, ::1] stamps,
    long[::1] rows,
    Py_ssize_t gold,
    Py_ssize_t pred,
    long step,
):
    """Standard averaged-perceptron update with lazy accumulation."""
    cdef Py_ssize_t n_rows = rows.shape[0]
    cdef Py_ssize_t i, r
    for i in range(n_rows):
        r = rows[i]
        totals[r, gold] += (step - stamps[r, gold]) * weights[r, gold]
        stamps[r, gold] = step
        weights[r, gold] += 1.0
        totals[r, pred] += (step - stamps[r, pred]) * weights[r, pred]
        stamps[r, pred] = step
        weights[r, pred] -= 1.0


def finalize_average(
    double[:, ::1] weights,
    double[:, ::1] totals,
    long[:, ::1] stamps,
    long step,
):
    """Flush pending totals and return the averaged weight matrix."""
    cdef Py_ssize_t n_rows = weights.shape[0]
    cdef Py_ssize_t width = weights.shape[1]
    cdef Py_ssize_t r, t
    out = np.zeros((n_rows, width), dtype=np.float64)
    cdef double[:, ::1] view = out
    if step <= 0:
        return out
    for r in range(n_rows):
        for t in range(width):
            view[r, t] = (
                totals[r, t] + (step - stamps[r, t]) * weights[r, t]
            ) / step
    return out
