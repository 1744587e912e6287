"""Pure-Python event-driven propagator for the wall-bounded forced oscillator.

Fallback backend with the same algorithm as the compiled kernel. Between
impacts the motion follows the closed-form solution of the forced linear
oscillator, so the only numerical work is locating the first wall contact of
each segment: a chunked scan brackets it, bisection plus a guarded Newton
polish pins it down.
"""

import math

import numpy as np

GRAZE_TOL = 1e-6       # approach speed below this at a wall is a non-event:
                       # a tangential contact is a double root of q - w, so
                       # its time locates only to ~sqrt(eps_machine) and the
                       # residual speed there is ~1e-8 however tight the
                       # bisection; genuine impacts arrive far faster
_SKIP = 1e-9           # resume offset past a non-event contact
_MAX_IMPACTS = 10_000_000
_CHUNK = 256


class _Segment:
    """Closed-form motion started from the state (ts, qs, ps)."""

    __slots__ = ("F", "Omega", "resonant", "A", "ts", "a", "b")

    def __init__(self, F, Omega, resonant, A, ts, qs, ps):
        self.F = F
        self.Omega = Omega
        self.resonant = resonant
        self.A = A
        self.ts = ts
        if resonant:
            part = 0.5 * F * ts * math.sin(ts)
            dpart = 0.5 * F * (math.sin(ts) + ts * math.cos(ts))
        else:
            part = A * math.cos(Omega * ts)
            dpart = -A * Omega * math.sin(Omega * ts)
        self.a = qs - part
        self.b = ps - dpart

    def q(self, t):
        if self.resonant:
            part = 0.5 * self.F * t * math.sin(t)
        else:
            part = self.A * math.cos(self.Omega * t)
        return self.a * math.cos(t - self.ts) + self.b * math.sin(t - self.ts) + part

    def p(self, t):
        if self.resonant:
            dpart = 0.5 * self.F * (math.sin(t) + t * math.cos(t))
        else:
            dpart = -self.A * self.Omega * math.sin(self.Omega * t)
        return -self.a * math.sin(t - self.ts) + self.b * math.cos(t - self.ts) + dpart

    def q_arr(self, t):
        if self.resonant:
            part = 0.5 * self.F * t * np.sin(t)
        else:
            part = self.A * np.cos(self.Omega * t)
        return self.a * np.cos(t - self.ts) + self.b * np.sin(t - self.ts) + part

    def p_arr(self, t):
        if self.resonant:
            dpart = 0.5 * self.F * (np.sin(t) + t * np.cos(t))
        else:
            dpart = -self.A * self.Omega * np.sin(self.Omega * t)
        return -self.a * np.sin(t - self.ts) + self.b * np.cos(t - self.ts) + dpart


def _bisect_momentum(seg, ta, tb):
    """Zero of the momentum (a displacement extremum) inside [ta, tb]."""
    fa = seg.p(ta)
    for _ in range(80):
        tm = 0.5 * (ta + tb)
        if tb - ta < 1e-13:
            return tm
        fm = seg.p(tm)
        if fm == 0.0:
            return tm
        if (fm < 0.0) == (fa < 0.0):
            ta, fa = tm, fm
        else:
            tb = tm
    return 0.5 * (ta + tb)


def _refine(seg, ta, tb, w):
    """Contact time with wall w inside the bracket [ta, tb]."""
    lo, hi = ta, tb
    fa = seg.q(ta) - w
    while tb - ta > 1e-12:
        tm = 0.5 * (ta + tb)
        fm = seg.q(tm) - w
        if fm == 0.0:
            return tm
        if (fm < 0.0) == (fa < 0.0):
            ta, fa = tm, fm
        else:
            tb = tm
    tm = 0.5 * (ta + tb)
    if abs(seg.p(tm)) > 1e-8:
        for _ in range(2):
            d = seg.p(tm)
            if d == 0.0:
                break
            tm -= (seg.q(tm) - w) / d
        if not lo <= tm <= hi + 1e-12:
            tm = 0.5 * (ta + tb)
    else:
        while tb - ta > 1e-13:
            tm = 0.5 * (ta + tb)
            fm = seg.q(tm) - w
            if fm == 0.0:
                return tm
            if (fm < 0.0) == (fa < 0.0):
                ta, fa = tm, fm
            else:
                tb = tm
        tm = 0.5 * (ta + tb)
    return tm


def _resolve_interval(seg, ta, tb, qa, qb, pa, pb):
    """First wall contact inside one scan interval, or None."""
    best = None
    if qa < 1.0 <= qb:
        best = (_refine(seg, ta, tb, 1.0), 1.0)
    if qa > -1.0 >= qb:
        t = _refine(seg, ta, tb, -1.0)
        if best is None or t < best[0]:
            best = (t, -1.0)
    if best is None and pa * pb < 0.0:
        # an extremum may poke past a wall and return between nodes
        te = _bisect_momentum(seg, ta, tb)
        qe = seg.q(te)
        if qe >= 1.0 and qa < 1.0:
            best = (_refine(seg, ta, te, 1.0), 1.0)
        elif qe <= -1.0 and qa > -1.0:
            best = (_refine(seg, ta, te, -1.0), -1.0)
    return best


def _first_event(seg, t_start, t_end, h):
    """Earliest wall contact in (t_start, t_end], or None."""
    t0 = t_start
    q0 = seg.q(t0)
    p0 = seg.p(t0)
    while t0 < t_end:
        m = min(_CHUNK, max(1, int(math.ceil((t_end - t0) / h))))
        tt = t0 + h * np.arange(1, m + 1)
        if tt[-1] > t_end:
            tt[-1] = t_end
        qq = seg.q_arr(tt)
        pp = seg.p_arr(tt)
        prev_q = np.concatenate(([q0], qq[:-1]))
        prev_p = np.concatenate(([p0], pp[:-1]))
        flagged = np.nonzero(
            ((prev_q < 1.0) & (qq >= 1.0))
            | ((prev_q > -1.0) & (qq <= -1.0))
            | (prev_p * pp < 0.0)
        )[0]
        edges = np.concatenate(([t0], tt))
        for j in flagged:
            hit = _resolve_interval(
                seg, float(edges[j]), float(edges[j + 1]),
                float(prev_q[j]), float(qq[j]), float(prev_p[j]), float(pp[j]))
            if hit is not None:
                return hit
        t0 = float(tt[-1])
        q0 = float(qq[-1])
        p0 = float(pp[-1])
    return None


def run(F, Omega, q0, p0, horizon, dt_out):
    """Propagate from (q0, p0) at time zero and sample on a uniform grid.

    Returns (tau, q, p, impact_times, impact_speeds). Samples landing
    exactly on an impact instant carry the pre-impact momentum.
    """
    n_out = int(math.floor(horizon / dt_out + 1e-9)) + 1
    tau_out = np.arange(n_out) * dt_out
    q_out = np.empty(n_out)
    p_out = np.empty(n_out)
    impacts = []
    speeds = []
    resonant = abs(Omega - 1.0) < 1e-8
    A = 0.0 if resonant else F / (1.0 - Omega * Omega)
    h = min(0.01, (2.0 * math.pi / Omega) / 100.0)

    ts, qs, ps = 0.0, float(q0), float(p0)
    i_out = 0
    while True:
        seg = _Segment(F, Omega, resonant, A, ts, qs, ps)
        scan_from = ts + _SKIP
        event = None
        while True:
            hit = _first_event(seg, scan_from, horizon, h)
            if hit is None:
                break
            t_hit, w = hit
            p_hit = seg.p(t_hit)
            if p_hit * w >= GRAZE_TOL:
                event = (t_hit, w, p_hit)
                break
            # grazing or inward contact: not an impact, keep the segment
            scan_from = t_hit + _SKIP
        t_stop = horizon if event is None else event[0]
        j = int(np.searchsorted(tau_out, t_stop + 1e-12, side="right"))
        if j > i_out:
            block = tau_out[i_out:j]
            q_out[i_out:j] = seg.q_arr(block)
            p_out[i_out:j] = seg.p_arr(block)
            i_out = j
        if event is None:
            break
        t_hit, w, p_hit = event
        if len(impacts) >= _MAX_IMPACTS:
            raise RuntimeError("impact count guard tripped: chatter")
        impacts.append(t_hit)
        speeds.append(abs(p_hit))
        ts, qs, ps = t_hit, w, -p_hit
    return tau_out, q_out, p_out, np.asarray(impacts), np.asarray(speeds)
