# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: event-driven simulation and the leaky power step.

The fallbacks in pure.py replicate the draw protocol and the accumulation
order of every loop here, so the two backends produce bit-identical event
sequences from the same underlying stream. Any change to an arithmetic
ordering below must be mirrored there.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport INFINITY, log1p
from numpy.random cimport bitgen_t

cnp.import_array()

ctypedef fused idx_t:
    cnp.int32_t
    cnp.int64_t


cdef bitgen_t* _get_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


def advance_staged(object bit_generator, double beta, double gamma, Py_ssize_t stages,
                   const double[::1] lam, const double[::1] mu,
                   const cnp.int64_t[::1] sizes,
                   double n_total, cnp.int64_t[:, ::1] state,
                   cnp.int64_t[::1] group_counts,
                   double t, double t_limit):
    """Advance the staged event chain in place until t_limit or extinction.

    state[j, v] counts infectives of group j in stage v. Two uniforms per
    executed event: waiting time, then channel. Channels scan infections by
    group, then stage moves by (group, stage). Returns (t, extinct).
    """
    cdef bitgen_t* bg = _get_bitgen(bit_generator)
    cdef Py_ssize_t k = lam.shape[0]
    cdef Py_ssize_t s = stages
    cdef Py_ssize_t j, v, pick_j, pick_v
    cdef cnp.int64_t total_inf, c
    cdef double w, rate_total, r, u1, u2, dt, target
    cdef double coef_inf = beta / n_total
    cdef double stage_rate = s * gamma
    cdef int extinct = 0
    cdef int done

    with nogil:
        total_inf = 0
        for j in range(k):
            c = 0
            for v in range(s):
                c += state[j, v]
            group_counts[j] = c
            total_inf += c
        if total_inf == 0:
            extinct = 1
        else:
            while True:
                w = 0.0
                for j in range(k):
                    w += lam[j] * group_counts[j]
                rate_total = 0.0
                for j in range(k):
                    rate_total += coef_inf * w * mu[j] * (sizes[j] - group_counts[j])
                for j in range(k):
                    for v in range(s):
                        rate_total += stage_rate * state[j, v]
                u1 = bg.next_double(bg.state)
                dt = (-log1p(-u1)) / rate_total
                if t + dt > t_limit:
                    t = t_limit
                    break
                t = t + dt
                u2 = bg.next_double(bg.state)
                target = u2 * rate_total
                done = 0
                for j in range(k):
                    r = coef_inf * w * mu[j] * (sizes[j] - group_counts[j])
                    if target < r:
                        state[j, 0] += 1
                        group_counts[j] += 1
                        total_inf += 1
                        done = 1
                        break
                    target = target - r
                if done == 0:
                    for j in range(k):
                        for v in range(s):
                            r = stage_rate * state[j, v]
                            if target < r:
                                state[j, v] -= 1
                                if v < s - 1:
                                    state[j, v + 1] += 1
                                else:
                                    group_counts[j] -= 1
                                    total_inf -= 1
                                done = 1
                                break
                            target = target - r
                        if done:
                            break
                if done == 0:
                    # float droop past the last channel: apply the final
                    # possible stage event deterministically
                    for j in range(k - 1, -1, -1):
                        for v in range(s - 1, -1, -1):
                            if state[j, v] > 0:
                                state[j, v] -= 1
                                if v < s - 1:
                                    state[j, v + 1] += 1
                                else:
                                    group_counts[j] -= 1
                                    total_inf -= 1
                                done = 1
                                break
                        if done:
                            break
                if total_inf == 0:
                    extinct = 1
                    break
    return t, extinct


def advance_constant(object bit_generator, double beta, double gamma,
                     const double[::1] lam, const double[::1] mu,
                     const cnp.int64_t[::1] sizes,
                     double n_total, cnp.int64_t[::1] infected,
                     double[::1] queue_times, cnp.int64_t[::1] queue_groups,
                     Py_ssize_t head, Py_ssize_t count,
                     double t, double t_limit):
    """Advance the fixed-period chain until t_limit or extinction.

    Recoveries sit in a FIFO ring buffer of scheduled times (constant period
    keeps them ordered). The next infection is drawn exponential at the
    current rate and discarded if a recovery preempts it, which is exact by
    memorylessness. Returns (t, extinct, head, count).
    """
    cdef bitgen_t* bg = _get_bitgen(bit_generator)
    cdef Py_ssize_t k = lam.shape[0]
    cdef Py_ssize_t capacity = queue_times.shape[0]
    cdef Py_ssize_t j, tail
    cdef double w, tsw, rate_inf, u1, u2, t_inf, next_rec, target, r
    cdef double period = 1.0 / gamma
    cdef double coef = beta / n_total
    cdef int extinct = 0
    cdef int is_inf, done

    with nogil:
        while True:
            if count == 0:
                extinct = 1
                break
            w = 0.0
            for j in range(k):
                w += lam[j] * infected[j]
            tsw = 0.0
            for j in range(k):
                tsw += mu[j] * (sizes[j] - infected[j])
            rate_inf = coef * w * tsw
            next_rec = queue_times[head]
            if rate_inf > 0.0:
                u1 = bg.next_double(bg.state)
                t_inf = t + (-log1p(-u1)) / rate_inf
            else:
                t_inf = INFINITY
            if t_inf <= next_rec:
                is_inf = 1
            else:
                is_inf = 0
            if is_inf:
                if t_inf > t_limit:
                    t = t_limit
                    break
                t = t_inf
                u2 = bg.next_double(bg.state)
                target = u2 * tsw
                done = 0
                for j in range(k):
                    r = mu[j] * (sizes[j] - infected[j])
                    if target < r:
                        done = 1
                        break
                    target = target - r
                if done == 0:
                    for j in range(k - 1, -1, -1):
                        if mu[j] * (sizes[j] - infected[j]) > 0.0:
                            done = 1
                            break
                infected[j] += 1
                tail = head + count
                if tail >= capacity:
                    tail -= capacity
                queue_times[tail] = t + period
                queue_groups[tail] = j
                count += 1
            else:
                if next_rec > t_limit:
                    t = t_limit
                    break
                t = next_rec
                infected[queue_groups[head]] -= 1
                head += 1
                if head >= capacity:
                    head = 0
                count -= 1
    return t, extinct, head, count


def power_step(idx_t[::1] indptr, idx_t[::1] indices, double[::1] data,
               double inv_big, double[::1] leak,
               double[::1] x, double[::1] out):
    """out = x + inv_big * (A @ x) for CSR A; returns (sum(out), leak @ out)."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, pos
    cdef double acc, v
    cdef double total = 0.0
    cdef double leak_dot = 0.0
    with nogil:
        for i in range(n):
            acc = 0.0
            for pos in range(indptr[i], indptr[i + 1]):
                acc += data[pos] * x[indices[pos]]
            v = x[i] + inv_big * acc
            out[i] = v
            total += v
            leak_dot += leak[i] * v
    return total, leak_dot
