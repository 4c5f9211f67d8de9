"""Compiled inner loops: queue sweeps and Harris-construction jumps.

Everything here works on raw float64 arrays and reports failures through
integer status codes; the public modules translate those into exceptions.
"""
from __future__ import annotations

import numpy as np
from numba import njit

OK = 0
UNSTABLE = 1
COLLISION = 2
NO_LEFT = 3
INCONSISTENT = 4

MODE_COUPLED = 0
MODE_MULTILINE = 1
MODE_REVERSE = 2


@njit(cache=True)
def run_queue(arr_pos, arr_cls, n_cls, srv, cyclic):
    """Priority queue fed by classed arrivals and served at times `srv`.

    Returns merged event positions, a service flag per event, the class per
    event (arrival class, class served, or -1 for an unused service), the
    per-class queue length after each event, and a status code.  On a cycle
    the queue is the minimal periodic solution: it is started empty right
    after the earliest service at which the one-period walk is minimal.
    """
    na = arr_pos.size
    ns = srv.size
    m = na + ns
    ev_pos = np.empty(m, np.float64)
    ev_srv = np.zeros(m, np.bool_)
    ev_cls = np.full(m, -1, np.int64)
    q_after = np.zeros((m, n_cls), np.int64)
    i = 0
    j = 0
    k = 0
    while k < m:
        if j >= ns or (i < na and arr_pos[i] < srv[j]):
            ev_pos[k] = arr_pos[i]
            ev_cls[k] = arr_cls[i]
            i += 1
        else:
            if i < na and arr_pos[i] == srv[j]:
                return ev_pos, ev_srv, ev_cls, q_after, COLLISION
            ev_pos[k] = srv[j]
            ev_srv[k] = True
            j += 1
        k += 1

    start = 0
    if cyclic:
        if ns <= na:
            return ev_pos, ev_srv, ev_cls, q_after, UNSTABLE
        z = 0
        zmin = 1
        kmin = -1
        for k in range(m):
            z += -1 if ev_srv[k] else 1
            if z < zmin:
                zmin = z
                kmin = k
        start = kmin + 1

    q = np.zeros(n_cls, np.int64)
    for step in range(m):
        k = start + step
        if k >= m:
            k -= m
        if ev_srv[k]:
            served = -1
            for c in range(n_cls):
                if q[c] > 0:
                    q[c] -= 1
                    served = c
                    break
            ev_cls[k] = served
        else:
            q[ev_cls[k]] += 1
        for c in range(n_cls):
            q_after[k, c] = q[c]
    if cyclic:
        for c in range(n_cls):
            if q[c] != 0:
                return ev_pos, ev_srv, ev_cls, q_after, INCONSISTENT
    return ev_pos, ev_srv, ev_cls, q_after, OK


@njit(cache=True)
def departures_mask(arr, srv, cyclic):
    """Single-class shortcut: True where a service time is a departure."""
    cls = np.zeros(arr.size, np.int64)
    ev_pos, ev_srv, ev_cls, q_after, status = run_queue(arr, cls, 1, srv, cyclic)
    mask = np.zeros(srv.size, np.bool_)
    j = 0
    for k in range(ev_pos.size):
        if ev_srv[k]:
            mask[j] = ev_cls[k] >= 0
            j += 1
    return mask, status


@njit(cache=True)
def _jump_left(p, lo, n, x, cyclic):
    """Nearest-left particle of x in p[lo:lo+n] jumps to x, in place."""
    a = lo
    b = lo + n
    while a < b:
        mid = (a + b) >> 1
        if p[mid] < x:
            a = mid + 1
        else:
            b = mid
    if a < lo + n and p[a] == x:
        return np.nan, COLLISION
    i = a - 1
    if i < lo:
        if not cyclic:
            return np.nan, NO_LEFT
        last = lo + n - 1
        old = p[last]
        for r in range(last, lo, -1):
            p[r] = p[r - 1]
        p[lo] = x
        return old, OK
    old = p[i]
    p[i] = x
    return old, OK


@njit(cache=True)
def _jump_right(p, lo, n, y, cyclic):
    """Nearest-right particle of y in p[lo:lo+n] jumps to y, in place."""
    a = lo
    b = lo + n
    while a < b:
        mid = (a + b) >> 1
        if p[mid] <= y:
            a = mid + 1
        else:
            b = mid
    if a > lo and p[a - 1] == y:
        return np.nan, COLLISION
    if a >= lo + n:
        if not cyclic:
            return np.nan, NO_LEFT
        old = p[lo]
        for r in range(lo, lo + n - 1):
            p[r] = p[r + 1]
        p[lo + n - 1] = y
        return old, OK
    old = p[a]
    p[a] = y
    return old, OK


@njit(cache=True)
def apply_points(flat, offsets, xs, cyclic, mode, duals):
    """Apply the points xs (already in time order) to a stack of lines.

    mode 0: every line jumps independently toward x (coupled process).
    mode 1: multi-line cascade from the top line downward.
    mode 2: reverse multi-line cascade from the bottom line upward.
    duals[k, j] receives the pre-jump position on line k for point j, or NaN
    when nothing jumped on that line.
    """
    n_lines = offsets.size - 1
    for j in range(xs.size):
        x = xs[j]
        if mode == MODE_COUPLED:
            for k in range(n_lines):
                lo = offsets[k]
                n = offsets[k + 1] - lo
                if n == 0:
                    duals[k, j] = np.nan
                    continue
                old, st = _jump_left(flat, lo, n, x, cyclic)
                if st == COLLISION:
                    return j, COLLISION
                duals[k, j] = old
        elif mode == MODE_MULTILINE:
            target = x
            for kk in range(n_lines):
                k = n_lines - 1 - kk
                lo = offsets[k]
                n = offsets[k + 1] - lo
                if n == 0:
                    duals[k, j] = np.nan
                    target = np.nan
                    continue
                if np.isnan(target):
                    duals[k, j] = np.nan
                    continue
                old, st = _jump_left(flat, lo, n, target, cyclic)
                if st == COLLISION:
                    return j, COLLISION
                duals[k, j] = old
                target = old
        else:
            target = x
            for k in range(n_lines):
                lo = offsets[k]
                n = offsets[k + 1] - lo
                if n == 0 or np.isnan(target):
                    duals[k, j] = np.nan
                    target = np.nan
                    continue
                old, st = _jump_right(flat, lo, n, target, cyclic)
                if st == COLLISION:
                    return j, COLLISION
                duals[k, j] = old
                target = old
    return xs.size, OK


@njit(cache=True)
def apply_points_batch(states, offsets, xs_flat, xs_offsets, cyclic, mode):
    """apply_points for each row of `states`, without recording duals."""
    n_lines = offsets.size - 1
    for r in range(states.shape[0]):
        row = states[r]
        for j in range(xs_offsets[r], xs_offsets[r + 1]):
            target = xs_flat[j]
            for kk in range(n_lines):
                k = n_lines - 1 - kk
                lo = offsets[k]
                n = offsets[k + 1] - lo
                if n == 0 or np.isnan(target):
                    if mode == MODE_MULTILINE:
                        target = np.nan
                    continue
                old, st = _jump_left(row, lo, n, target, cyclic)
                if st == COLLISION:
                    return r, COLLISION
                if mode == MODE_MULTILINE:
                    target = old
    return states.shape[0], OK
