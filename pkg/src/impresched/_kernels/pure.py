"""Pure-Python busy-period kernel.

Mirrors _speedups.pyx operation for operation so both backends return
identical doubles.  Keep the two files in sync.
"""

import math

_EPS = 1e-9
INF = math.inf


def _ceil_tol(x: float) -> float:
    c = math.ceil(x - _EPS)
    return float(c) if c > 0 else 0.0


def busy_period_response(c, period, jitter, hp_c, hp_p, hp_j, bound, max_iter):
    """Worst response of a subtask measured from its own release.

    c/period/jitter describe the subtask; hp_* are parallel sequences for the
    interfering higher-priority subtasks on the same processor.  The result
    excludes the subtask's own jitter.  Returns INF when the interference set
    over-utilizes the processor or the fixed point escapes ``bound`` /
    ``max_iter``.
    """
    if c <= _EPS:
        return 0.0
    n = len(hp_c)
    u_hp = 0.0
    b_hp = 0.0
    for i in range(n):
        u_hp += hp_c[i] / hp_p[i]
        b_hp += hp_c[i] * hp_j[i] / hp_p[i]
    u_all = u_hp + c / period
    if u_all > 1.0 + _EPS:
        return INF

    # level busy period: least fixed point of
    #   L = ceil((L + J)/P)*C + sum ceil((L + J_h)/P_h)*C_h
    total_c = c
    for i in range(n):
        total_c += hp_c[i]
    length = total_c
    if u_all < 1.0:
        jump = (b_hp + c * jitter / period) / (1.0 - u_all)
        if jump > length:
            length = jump
    iters = 0
    while True:
        nxt = _ceil_tol((length + jitter) / period) * c
        for i in range(n):
            nxt += _ceil_tol((length + hp_j[i]) / hp_p[i]) * hp_c[i]
        if nxt == length:
            break
        length = nxt
        iters += 1
        if length > bound or iters > max_iter:
            return INF

    instances = int(_ceil_tol((length + jitter) / period))
    if instances < 1:
        instances = 1

    best = 0.0
    w = 0.0
    for q in range(instances):
        qc = (q + 1) * c
        start = qc
        if u_hp < 1.0:
            jump = (qc + b_hp) / (1.0 - u_hp)
            if jump > start:
                start = jump
        if w + c > start:
            start = w + c
        w = start
        while True:
            nxt = qc
            for i in range(n):
                nxt += _ceil_tol((w + hp_j[i]) / hp_p[i]) * hp_c[i]
            if nxt == w:
                break
            w = nxt
            iters += 1
            if w > bound or iters > max_iter:
                return INF
        resp = w - q * period
        if resp > best:
            best = resp
    return best
