"""Pure-Python event-loop kernel.

Mirror of the compiled kernel in ``_kernel.pyx``: same mechanism semantics,
same SplitMix64 arithmetic, draws consumed in the same order.  Any change
here must be made there as well; the parity test asserts bit-identical
output.  Mechanism kind codes: 0 full mesh, 1 hub, 2 spanning tree,
3 gossip.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
FULL = (1 << 64)


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def run_events(
    n_events,
    origin_counter,
    user_home,
    uroom_off,
    uroom_ids,
    rsrv_off,
    rsrv_ids,
    rkind,
    rparam,
    rcap,
    rhub,
    tx,
    rx,
    room_events,
    peers,
    informed,
):
    """Simulate ``n_events`` events, accumulating counts into tx/rx/room_events."""
    home = user_home.tolist()
    u_off = uroom_off.tolist()
    u_ids = uroom_ids.tolist()
    r_off = rsrv_off.tolist()
    r_ids = rsrv_ids.tolist()
    kinds = rkind.tolist()
    params = rparam.tolist()
    caps = rcap.tolist()
    hubs = rhub.tolist()
    tx_acc = tx.tolist()
    rx_acc = rx.tolist()
    ev_acc = room_events.tolist()
    peer_buf = peers.tolist()
    info_buf = informed.tolist()

    n_users = len(home)
    state = origin_counter
    incomplete = 0

    def below(n):
        nonlocal state
        threshold = FULL % n
        while True:
            state = (state + GAMMA) & MASK64
            x = _mix64(state)
            if x >= threshold:
                return x % n

    for _ in range(n_events):
        u = below(n_users)
        deg = u_off[u + 1] - u_off[u]
        r = u_ids[u_off[u] + below(deg)]
        ev_acc[r] += 1
        lo = r_off[r]
        m = r_off[r + 1] - lo
        if m < 2:
            continue
        origin = home[u]
        p = 0
        while r_ids[lo + p] != origin:
            p += 1
        kind = kinds[r]
        if kind == 0:  # full mesh
            tx_acc[origin] += m - 1
            for j in range(m):
                if j != p:
                    rx_acc[r_ids[lo + j]] += 1
        elif kind == 1:  # hub
            h = hubs[r]
            if h == p:
                tx_acc[origin] += m - 1
                for j in range(m):
                    if j != p:
                        rx_acc[r_ids[lo + j]] += 1
            else:
                hub_srv = r_ids[lo + h]
                tx_acc[origin] += 1
                rx_acc[hub_srv] += 1
                tx_acc[hub_srv] += m - 2
                for j in range(m):
                    if j != p and j != h:
                        rx_acc[r_ids[lo + j]] += 1
        elif kind == 2:  # spanning tree over sorted servers, origin swapped to front
            k = params[r]
            for j in range(m):
                first = k * j + 1
                if first >= m:
                    break
                if j == 0:
                    parent = r_ids[lo + p]
                elif j == p:
                    parent = r_ids[lo]
                else:
                    parent = r_ids[lo + j]
                for c in range(first, min(first + k, m)):
                    if c == p:
                        child = r_ids[lo]
                    else:
                        child = r_ids[lo + c]
                    tx_acc[parent] += 1
                    rx_acc[child] += 1
        else:  # gossip: synchronous push rounds
            fanout = params[r]
            cap = caps[r]
            for j in range(m):
                info_buf[j] = 0
            info_buf[p] = 1
            n_informed = 1
            rounds_done = 0
            f_eff = fanout if fanout < m - 1 else m - 1
            while n_informed < m and (cap < 0 or rounds_done < cap):
                for sender in range(m):
                    if info_buf[sender] != 1:
                        continue
                    c = 0
                    for q in range(m):
                        if q != sender:
                            peer_buf[c] = q
                            c += 1
                    for j in range(f_eff):
                        t = j + below(c - j)
                        peer_buf[j], peer_buf[t] = peer_buf[t], peer_buf[j]
                        target = peer_buf[j]
                        tx_acc[r_ids[lo + sender]] += 1
                        rx_acc[r_ids[lo + target]] += 1
                        if info_buf[target] == 0:
                            info_buf[target] = 2
                            n_informed += 1
                for j in range(m):
                    if info_buf[j] == 2:
                        info_buf[j] = 1
                rounds_done += 1
            if n_informed < m:
                incomplete += 1

    tx[:] = tx_acc
    rx[:] = rx_acc
    room_events[:] = ev_acc
    return incomplete
