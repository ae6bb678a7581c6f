# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled cumulative acceptance pass over orders in allocation sequence.

Mirrors ``allocdss._kernels.pure.cumulative_pass`` exactly; float64 additions
happen in the same order, so results are bit-identical across backends.
"""

import numpy as np

BACKEND_NAME = "compiled"

cdef enum:
    _ACCEPTED = 1
    _REJ_STORE = 2
    _REJ_CATEGORY = 3

ACCEPTED = _ACCEPTED
REJ_STORE = _REJ_STORE
REJ_CATEGORY = _REJ_CATEGORY


def cumulative_pass(
    store_idx,
    slot_idx,
    volumes,
    store_budget,
    slot_budget,
    double eps,
):
    cdef long long[::1] s_idx = np.ascontiguousarray(store_idx, dtype=np.int64)
    cdef long long[::1] c_idx = np.ascontiguousarray(slot_idx, dtype=np.int64)
    cdef double[::1] vols = np.ascontiguousarray(volumes, dtype=np.float64)
    cdef double[::1] s_budget = np.ascontiguousarray(store_budget, dtype=np.float64)
    cdef double[::1] c_budget = np.ascontiguousarray(slot_budget, dtype=np.float64)

    cdef Py_ssize_t n = vols.shape[0]
    status_arr = np.zeros(n, dtype=np.uint8)
    store_load_arr = np.zeros(s_budget.shape[0], dtype=np.float64)
    slot_load_arr = np.zeros(c_budget.shape[0], dtype=np.float64)
    cdef unsigned char[::1] status = status_arr
    cdef double[::1] s_load = store_load_arr
    cdef double[::1] c_load = slot_load_arr

    cdef Py_ssize_t k
    cdef long long m, slot
    cdef double v

    with nogil:
        for k in range(n):
            m = s_idx[k]
            v = vols[k]
            if s_load[m] + v > s_budget[m] + eps:
                status[k] = _REJ_STORE
                continue
            slot = c_idx[k]
            if slot >= 0 and c_load[slot] + v > c_budget[slot] + eps:
                status[k] = _REJ_CATEGORY
                continue
            status[k] = _ACCEPTED
            s_load[m] = s_load[m] + v
            if slot >= 0:
                c_load[slot] = c_load[slot] + v

    return status_arr, store_load_arr, slot_load_arr
