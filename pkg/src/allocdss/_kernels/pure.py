"""Pure-Python cumulative acceptance pass (fallback kernel).

Semantics are identical to the compiled kernel bit for bit: the same float64
additions in the same order.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# Status codes shared by both kernels.
ACCEPTED = 1
REJ_STORE = 2
REJ_CATEGORY = 3


def cumulative_pass(
    store_idx: np.ndarray,
    slot_idx: np.ndarray,
    volumes: np.ndarray,
    store_budget: np.ndarray,
    slot_budget: np.ndarray,
    eps: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sequential accept/reject over orders already in allocation sequence.

    store_idx[k] is the store slot of the k-th order, slot_idx[k] the flattened
    (route, constrained-category) slot or -1 when unconstrained. An order is
    accepted iff its store load stays within store_budget and, when
    constrained, its slot load stays within slot_budget (both with ``eps``
    slack); trackers update immediately on acceptance.
    """
    n = len(volumes)
    status = np.zeros(n, dtype=np.uint8)
    store_load = np.zeros(len(store_budget), dtype=np.float64)
    slot_load = np.zeros(len(slot_budget), dtype=np.float64)

    s_idx = store_idx.tolist()
    c_idx = slot_idx.tolist()
    vols = volumes.tolist()
    s_budget = store_budget.tolist()
    c_budget = slot_budget.tolist()
    s_load = store_load.tolist()
    c_load = slot_load.tolist()

    for k in range(n):
        m = s_idx[k]
        v = vols[k]
        if s_load[m] + v > s_budget[m] + eps:
            status[k] = REJ_STORE
            continue
        slot = c_idx[k]
        if slot >= 0 and c_load[slot] + v > c_budget[slot] + eps:
            status[k] = REJ_CATEGORY
            continue
        status[k] = ACCEPTED
        s_load[m] += v
        if slot >= 0:
            c_load[slot] += v

    store_load[:] = s_load
    slot_load[:] = c_load
    return status, store_load, slot_load
