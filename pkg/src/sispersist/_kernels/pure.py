"""Pure-python fallbacks for the compiled kernels.

The event loops copy the compiled implementations' draw protocol and
accumulation order statement for statement, so a given random stream yields
bit-identical trajectories on either backend. The power step delegates to
scipy's CSR product and matches the compiled one to float rounding only.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["advance_staged", "advance_constant", "power_step"]


def advance_staged(generator, beta, gamma, stages, lam, mu, sizes, n_total,
                   state, group_counts, t, t_limit):
    """Mirror of the compiled staged event loop; state updated in place."""
    rnd = generator.random
    k = len(lam)
    s = int(stages)
    lam_l = [float(v) for v in lam]
    mu_l = [float(v) for v in mu]
    sz = [int(v) for v in sizes]
    st = [[int(state[j, v]) for v in range(s)] for j in range(k)]
    coef_inf = beta / n_total
    stage_rate = s * gamma
    gc = [0] * k
    total_inf = 0
    for j in range(k):
        c = 0
        for v in range(s):
            c += st[j][v]
        gc[j] = c
        total_inf += c
    extinct = 0
    if total_inf == 0:
        extinct = 1
    else:
        while True:
            w = 0.0
            for j in range(k):
                w += lam_l[j] * gc[j]
            rate_total = 0.0
            for j in range(k):
                rate_total += coef_inf * w * mu_l[j] * (sz[j] - gc[j])
            for j in range(k):
                row = st[j]
                for v in range(s):
                    rate_total += stage_rate * row[v]
            u1 = rnd()
            dt = (-math.log1p(-u1)) / rate_total
            if t + dt > t_limit:
                t = t_limit
                break
            t = t + dt
            u2 = rnd()
            target = u2 * rate_total
            done = False
            for j in range(k):
                r = coef_inf * w * mu_l[j] * (sz[j] - gc[j])
                if target < r:
                    st[j][0] += 1
                    gc[j] += 1
                    total_inf += 1
                    done = True
                    break
                target = target - r
            if not done:
                for j in range(k):
                    row = st[j]
                    for v in range(s):
                        r = stage_rate * row[v]
                        if target < r:
                            row[v] -= 1
                            if v < s - 1:
                                row[v + 1] += 1
                            else:
                                gc[j] -= 1
                                total_inf -= 1
                            done = True
                            break
                        target = target - r
                    if done:
                        break
            if not done:
                for j in range(k - 1, -1, -1):
                    row = st[j]
                    for v in range(s - 1, -1, -1):
                        if row[v] > 0:
                            row[v] -= 1
                            if v < s - 1:
                                row[v + 1] += 1
                            else:
                                gc[j] -= 1
                                total_inf -= 1
                            done = True
                            break
                    if done:
                        break
            if total_inf == 0:
                extinct = 1
                break
    for j in range(k):
        for v in range(s):
            state[j, v] = st[j][v]
        group_counts[j] = gc[j]
    return t, extinct


def advance_constant(generator, beta, gamma, lam, mu, sizes, n_total, infected,
                     queue_times, queue_groups, head, count, t, t_limit):
    """Mirror of the compiled fixed-period event loop."""
    rnd = generator.random
    k = len(lam)
    capacity = len(queue_times)
    lam_l = [float(v) for v in lam]
    mu_l = [float(v) for v in mu]
    sz = [int(v) for v in sizes]
    inf_l = [int(v) for v in infected]
    qt = [float(v) for v in queue_times]
    qg = [int(v) for v in queue_groups]
    period = 1.0 / gamma
    coef = beta / n_total
    extinct = 0
    while True:
        if count == 0:
            extinct = 1
            break
        w = 0.0
        for j in range(k):
            w += lam_l[j] * inf_l[j]
        tsw = 0.0
        for j in range(k):
            tsw += mu_l[j] * (sz[j] - inf_l[j])
        rate_inf = coef * w * tsw
        next_rec = qt[head]
        if rate_inf > 0.0:
            u1 = rnd()
            t_inf = t + (-math.log1p(-u1)) / rate_inf
        else:
            t_inf = math.inf
        if t_inf <= next_rec:
            if t_inf > t_limit:
                t = t_limit
                break
            t = t_inf
            u2 = rnd()
            target = u2 * tsw
            done = False
            pick = k - 1
            for j in range(k):
                r = mu_l[j] * (sz[j] - inf_l[j])
                if target < r:
                    done = True
                    pick = j
                    break
                target = target - r
            if not done:
                for j in range(k - 1, -1, -1):
                    if mu_l[j] * (sz[j] - inf_l[j]) > 0.0:
                        pick = j
                        break
            inf_l[pick] += 1
            tail = head + count
            if tail >= capacity:
                tail -= capacity
            qt[tail] = t + period
            qg[tail] = pick
            count += 1
        else:
            if next_rec > t_limit:
                t = t_limit
                break
            t = next_rec
            inf_l[qg[head]] -= 1
            head += 1
            if head >= capacity:
                head = 0
            count -= 1
    for j in range(k):
        infected[j] = inf_l[j]
    for i in range(capacity):
        queue_times[i] = qt[i]
        queue_groups[i] = qg[i]
    return t, extinct, head, count


def power_step(mat, inv_big, leak, x, out):
    """out = x + inv_big * (mat @ x); returns (sum(out), leak @ out)."""
    tmp = mat.dot(x)
    np.multiply(tmp, inv_big, out=tmp)
    np.add(x, tmp, out=out)
    return float(out.sum()), float(np.dot(leak, out))
