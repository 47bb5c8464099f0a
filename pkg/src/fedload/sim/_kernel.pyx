# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled event-loop kernel.

Mirror of ``_kernel_py.py``: same mechanism semantics, same SplitMix64
arithmetic, draws consumed in the same order.  Any change here must be made
there as well; the parity test asserts bit-identical output.
"""

from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline uint64_t _below(uint64_t* state, uint64_t n) noexcept nogil:
    # unbiased bounded draw; (0 - n) % n == 2**64 % n in uint64 arithmetic
    cdef uint64_t threshold = (0 - n) % n
    cdef uint64_t x
    while True:
        state[0] = state[0] + GAMMA
        x = _mix64(state[0])
        if x >= threshold:
            return x % n


def run_events(
    long long n_events,
    unsigned long long origin_counter,
    int32_t[::1] user_home,
    int64_t[::1] uroom_off,
    int32_t[::1] uroom_ids,
    int64_t[::1] rsrv_off,
    int32_t[::1] rsrv_ids,
    signed char[::1] rkind,
    int32_t[::1] rparam,
    int64_t[::1] rcap,
    int32_t[::1] rhub,
    int64_t[::1] tx,
    int64_t[::1] rx,
    int64_t[::1] room_events,
    int32_t[::1] peers,
    uint8_t[::1] informed,
):
    """Simulate ``n_events`` events, accumulating counts into tx/rx/room_events."""
    cdef uint64_t state = origin_counter
    cdef int64_t incomplete = 0
    cdef uint64_t n_users = <uint64_t>user_home.shape[0]
    cdef long long e
    cdef long u, deg, r, m, p, j, h, k, first, last, c, q, t
    cdef long origin, parent, child, hub_srv, sender, target
    cdef long fanout, n_informed, rounds_done, f_eff
    cdef int64_t lo, cap
    cdef signed char kind
    cdef int32_t tmp

    for e in range(n_events):
        u = <long>_below(&state, n_users)
        deg = <long>(uroom_off[u + 1] - uroom_off[u])
        r = uroom_ids[uroom_off[u] + <int64_t>_below(&state, <uint64_t>deg)]
        room_events[r] += 1
        lo = rsrv_off[r]
        m = <long>(rsrv_off[r + 1] - lo)
        if m < 2:
            continue
        origin = user_home[u]
        p = 0
        while rsrv_ids[lo + p] != origin:
            p += 1
        kind = rkind[r]
        if kind == 0:  # full mesh
            tx[origin] += m - 1
            for j in range(m):
                if j != p:
                    rx[rsrv_ids[lo + j]] += 1
        elif kind == 1:  # hub
            h = rhub[r]
            if h == p:
                tx[origin] += m - 1
                for j in range(m):
                    if j != p:
                        rx[rsrv_ids[lo + j]] += 1
            else:
                hub_srv = rsrv_ids[lo + h]
                tx[origin] += 1
                rx[hub_srv] += 1
                tx[hub_srv] += m - 2
                for j in range(m):
                    if j != p and j != h:
                        rx[rsrv_ids[lo + j]] += 1
        elif kind == 2:  # spanning tree over sorted servers, origin swapped to front
            k = rparam[r]
            for j in range(m):
                first = k * j + 1
                if first >= m:
                    break
                if j == 0:
                    parent = rsrv_ids[lo + p]
                elif j == p:
                    parent = rsrv_ids[lo]
                else:
                    parent = rsrv_ids[lo + j]
                last = first + k
                if last > m:
                    last = m
                for c in range(first, last):
                    if c == p:
                        child = rsrv_ids[lo]
                    else:
                        child = rsrv_ids[lo + c]
                    tx[parent] += 1
                    rx[child] += 1
        else:  # gossip: synchronous push rounds
            fanout = rparam[r]
            cap = rcap[r]
            for j in range(m):
                informed[j] = 0
            informed[p] = 1
            n_informed = 1
            rounds_done = 0
            f_eff = fanout if fanout < m - 1 else m - 1
            while n_informed < m and (cap < 0 or rounds_done < cap):
                for sender in range(m):
                    if informed[sender] != 1:
                        continue
                    c = 0
                    for q in range(m):
                        if q != sender:
                            peers[c] = <int32_t>q
                            c += 1
                    for j in range(f_eff):
                        t = j + <long>_below(&state, <uint64_t>(c - j))
                        tmp = peers[j]
                        peers[j] = peers[t]
                        peers[t] = tmp
                        target = peers[j]
                        tx[rsrv_ids[lo + sender]] += 1
                        rx[rsrv_ids[lo + target]] += 1
                        if informed[target] == 0:
                            informed[target] = 2
                            n_informed += 1
                for j in range(m):
                    if informed[j] == 2:
                        informed[j] = 1
                rounds_done += 1
            if n_informed < m:
                incomplete += 1

    return incomplete
