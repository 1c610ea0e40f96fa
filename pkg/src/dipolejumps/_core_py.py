"""Pure-Python trajectory stepping kernel (reference implementation).

Algorithmically identical to the compiled `dipolejumps._core`: exact no-jump
steps with a precomputed propagator, monotone norm decay against a uniform
threshold, binary-search jump-time localization with precomputed
fractional-step propagators, and channel choice by the weighted jump norms.
Both kernels consume the uniform stream in the same order, so a given seed
selects the same jump record up to floating-point roundoff.
"""
from __future__ import annotations

import numpy as np

BLOCK = 1 << 14


def evolve(u_full, u_frac, rplus, rminus, gamma_plus, gamma_minus,
           psi0, total_time, dt, draw):
    """Evolve one trajectory from t = 0 to total_time.

    u_full: one-step propagator expm(-i H_cond dt); u_frac[k]: propagator
    over dt / 2^(k+1); draw(n) yields n uniforms in [0, 1).  Returns
    (times, channels, psi_final) with channels 0 = plus, 1 = minus.
    """
    n_bis = u_frac.shape[0]
    buf = draw(BLOCK)
    ptr = 0

    def nxt():
        nonlocal buf, ptr
        if ptr >= buf.shape[0]:
            buf = draw(BLOCK)
            ptr = 0
        v = buf[ptr]
        ptr += 1
        return v

    psi = np.array(psi0, dtype=complex)
    t = 0.0
    u = 1.0 - nxt()
    norm_prev = np.vdot(psi, psi).real
    times = []
    channels = []
    while t < total_time:
        pn = u_full @ psi
        n2 = np.vdot(pn, pn).real
        if n2 > norm_prev * (1.0 + 1e-9):
            raise FloatingPointError(
                f"norm grew within a step ({norm_prev} -> {n2}); bad step size")
        if n2 > u:
            psi = pn
            norm_prev = n2
            t += dt
            continue
        # crossing inside (t, t+dt]: binary search, keeping the invariant
        # that the norm at `lo` is still above the threshold
        lo = psi
        tloc = t
        frac = dt
        for k in range(n_bis):
            frac *= 0.5
            mid = u_frac[k] @ lo
            if np.vdot(mid, mid).real > u:
                lo = mid
                tloc += frac
        pj = u_frac[n_bis - 1] @ lo
        tj = tloc + dt / 2.0**n_bis
        jp = rplus @ pj
        jm = rminus @ pj
        wp = gamma_plus * np.vdot(jp, jp).real
        wm = gamma_minus * np.vdot(jm, jm).real
        if nxt() * (wp + wm) < wp:
            post = jp
            ch = 0
        else:
            post = jm
            ch = 1
        psi = post / np.sqrt(np.vdot(post, post).real)
        norm_prev = 1.0
        if tj <= total_time:
            times.append(tj)
            channels.append(ch)
        t = tj
        u = 1.0 - nxt()
    return (np.array(times, dtype=float), np.array(channels, dtype=np.int8),
            psi)
