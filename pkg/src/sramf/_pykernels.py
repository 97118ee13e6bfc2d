"""Pure-Python versions of the hot loops in ``_kernels.pyx``.

Both backends must visit candidates in the same order and use the same
floating-point operations so that their results agree bit for bit.
"""

import math

BACKEND = "python"


def route_search(T, wait, ride, k):
    """Cheapest origins-first stop sequence for ``k`` requests.

    ``T`` is a (2k+1)-square travel-time table: node 0 is the vehicle start,
    nodes 1..k the origins and k+1..2k the destinations.  A pickup must happen
    strictly before ``wait[j]`` and the onboard time must stay strictly below
    ``ride[j]``.  Returns ``(duration, order)`` with ``order`` a list of request
    positions (pickups then drop-offs) or ``(inf, None)`` if nothing is feasible.
    """
    best = [math.inf, None]
    pick = [0.0] * k
    seq = []
    picked = [False] * k
    dropped = [False] * k

    def drops(cur, t, depth):
        if depth == k:
            if t < best[0]:
                best[0] = t
                best[1] = list(seq)
            return
        for j in range(k):
            if dropped[j]:
                continue
            t2 = t + T[cur][k + 1 + j]
            if t2 - pick[j] >= ride[j] or t2 >= best[0]:
                continue
            dropped[j] = True
            seq.append(j)
            drops(k + 1 + j, t2, depth + 1)
            seq.pop()
            dropped[j] = False

    def pickups(cur, t, depth):
        if depth == k:
            drops(cur, t, 0)
            return
        for j in range(k):
            if picked[j]:
                continue
            t2 = t + T[cur][1 + j]
            if t2 >= wait[j] or t2 >= best[0]:
                continue
            picked[j] = True
            pick[j] = t2
            seq.append(j)
            pickups(1 + j, t2, depth + 1)
            seq.pop()
            picked[j] = False

    pickups(0, 0.0, 0)
    return best[0], best[1]


def mmo_insert(u, ptr, nodes, rhs, edges, delta):
    """Raise dual variables until every listed covering row binds.

    Rows are ``sum(u[nodes[ptr[e]:ptr[e+1]]]) >= rhs[e]``; violated rows are
    updated with the closed-form multiplicative step.  Mutates ``u`` and
    returns the increase of ``sum(u)``.
    """
    inc = 0.0
    for e in edges:
        s = ptr[e]
        t = ptr[e + 1]
        size = t - s
        r = rhs[e]
        gamma = 0.0
        for q in range(s, t):
            gamma += u[nodes[q]]
        if gamma < r:
            factor = (1.0 + size * delta) / (gamma / r + size * delta)
            shift = r * delta
            for q in range(s, t):
                g = nodes[q]
                old = u[g]
                new = (old + shift) * factor - shift
                if new < old:
                    new = old
                u[g] = new
                inc += new - old
    return inc
