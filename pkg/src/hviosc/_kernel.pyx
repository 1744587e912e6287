# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled event-driven propagator for the wall-bounded forced oscillator.

Mirror of ``_kernel_py``: between impacts the motion follows the closed-form
solution of the forced linear oscillator, so the only numerical work is
locating the first wall contact of each segment by a dense scan, bisection,
and a guarded Newton polish. Same constants, same algorithm, same outputs.
"""

import numpy as np

from libc.math cimport ceil, cos, fabs, floor, sin, M_PI

DEF GRAZE_TOL = 1e-6   # approach speed below this at a wall is a non-event
DEF SKIP = 1e-9        # resume offset past a non-event contact
DEF MAX_IMPACTS = 10_000_000
DEF CHUNK = 256


cdef struct Seg:
    double F
    double Omega
    bint resonant
    double A
    double ts
    double a
    double b


cdef inline Seg make_seg(double F, double Omega, bint resonant, double A,
                         double ts, double qs, double ps):
    cdef Seg s
    cdef double part, dpart
    s.F = F
    s.Omega = Omega
    s.resonant = resonant
    s.A = A
    s.ts = ts
    if resonant:
        part = 0.5 * F * ts * sin(ts)
        dpart = 0.5 * F * (sin(ts) + ts * cos(ts))
    else:
        part = A * cos(Omega * ts)
        dpart = -A * Omega * sin(Omega * ts)
    s.a = qs - part
    s.b = ps - dpart
    return s


cdef inline double seg_q(Seg* s, double t) noexcept:
    cdef double part
    if s.resonant:
        part = 0.5 * s.F * t * sin(t)
    else:
        part = s.A * cos(s.Omega * t)
    return s.a * cos(t - s.ts) + s.b * sin(t - s.ts) + part


cdef inline double seg_p(Seg* s, double t) noexcept:
    cdef double dpart
    if s.resonant:
        dpart = 0.5 * s.F * (sin(t) + t * cos(t))
    else:
        dpart = -s.A * s.Omega * sin(s.Omega * t)
    return -s.a * sin(t - s.ts) + s.b * cos(t - s.ts) + dpart


cdef double bisect_momentum(Seg* s, double ta, double tb) noexcept:
    """Zero of the momentum (a displacement extremum) inside [ta, tb]."""
    cdef double fa = seg_p(s, ta)
    cdef double tm, fm
    cdef int i
    for i in range(80):
        tm = 0.5 * (ta + tb)
        if tb - ta < 1e-13:
            return tm
        fm = seg_p(s, tm)
        if fm == 0.0:
            return tm
        if (fm < 0.0) == (fa < 0.0):
            ta = tm
            fa = fm
        else:
            tb = tm
    return 0.5 * (ta + tb)


cdef double refine(Seg* s, double ta, double tb, double w) noexcept:
    """Contact time with wall w inside the bracket [ta, tb]."""
    cdef double lo = ta, hi = tb
    cdef double fa = seg_q(s, ta) - w
    cdef double tm, fm, d
    cdef int i
    while tb - ta > 1e-12:
        tm = 0.5 * (ta + tb)
        fm = seg_q(s, tm) - w
        if fm == 0.0:
            return tm
        if (fm < 0.0) == (fa < 0.0):
            ta = tm
            fa = fm
        else:
            tb = tm
    tm = 0.5 * (ta + tb)
    if fabs(seg_p(s, tm)) > 1e-8:
        for i in range(2):
            d = seg_p(s, tm)
            if d == 0.0:
                break
            tm -= (seg_q(s, tm) - w) / d
        if not (lo <= tm <= hi + 1e-12):
            tm = 0.5 * (ta + tb)
    else:
        while tb - ta > 1e-13:
            tm = 0.5 * (ta + tb)
            fm = seg_q(s, tm) - w
            if fm == 0.0:
                return tm
            if (fm < 0.0) == (fa < 0.0):
                ta = tm
                fa = fm
            else:
                tb = tm
        tm = 0.5 * (ta + tb)
    return tm


cdef int resolve_interval(Seg* s, double ta, double tb, double qa, double qb,
                          double pa, double pb, double* t_hit,
                          double* wall) noexcept:
    """First wall contact inside one scan interval; 1 if found."""
    cdef int found = 0
    cdef double t, te, qe
    if qa < 1.0 <= qb:
        t_hit[0] = refine(s, ta, tb, 1.0)
        wall[0] = 1.0
        found = 1
    if qa > -1.0 >= qb:
        t = refine(s, ta, tb, -1.0)
        if not found or t < t_hit[0]:
            t_hit[0] = t
            wall[0] = -1.0
            found = 1
    if not found and pa * pb < 0.0:
        # an extremum may poke past a wall and return between nodes
        te = bisect_momentum(s, ta, tb)
        qe = seg_q(s, te)
        if qe >= 1.0 and qa < 1.0:
            t_hit[0] = refine(s, ta, te, 1.0)
            wall[0] = 1.0
            found = 1
        elif qe <= -1.0 and qa > -1.0:
            t_hit[0] = refine(s, ta, te, -1.0)
            wall[0] = -1.0
            found = 1
    return found


cdef int first_event(Seg* s, double t_start, double t_end, double h,
                     double* t_hit, double* wall) noexcept:
    """Earliest wall contact in (t_start, t_end]; 1 if found."""
    cdef double t0 = t_start
    cdef double q0 = seg_q(s, t0)
    cdef double p0 = seg_p(s, t0)
    cdef double ta, tb, qa, qb, pa, pb
    cdef long m, k
    while t0 < t_end:
        m = <long>ceil((t_end - t0) / h)
        if m < 1:
            m = 1
        if m > CHUNK:
            m = CHUNK
        ta = t0
        qa = q0
        pa = p0
        for k in range(1, m + 1):
            tb = t0 + h * k
            if k == m and tb > t_end:
                tb = t_end
            qb = seg_q(s, tb)
            pb = seg_p(s, tb)
            if ((qa < 1.0 and qb >= 1.0) or (qa > -1.0 and qb <= -1.0)
                    or pa * pb < 0.0):
                if resolve_interval(s, ta, tb, qa, qb, pa, pb, t_hit, wall):
                    return 1
            ta = tb
            qa = qb
            pa = pb
        t0 = ta
        q0 = qa
        p0 = pa
    return 0


def run(double F, double Omega, double q0, double p0, double horizon,
        double dt_out):
    """Propagate from (q0, p0) at time zero and sample on a uniform grid.

    Returns (tau, q, p, impact_times, impact_speeds). Samples landing
    exactly on an impact instant carry the pre-impact momentum.
    """
    cdef long n_out = <long>floor(horizon / dt_out + 1e-9) + 1
    tau_out = np.arange(n_out) * dt_out
    q_out = np.empty(n_out)
    p_out = np.empty(n_out)
    cdef double[::1] tau_v = tau_out
    cdef double[::1] q_v = q_out
    cdef double[::1] p_v = p_out
    impacts = []
    speeds = []
    cdef bint resonant = fabs(Omega - 1.0) < 1e-8
    cdef double A = 0.0 if resonant else F / (1.0 - Omega * Omega)
    cdef double h = (2.0 * M_PI / Omega) / 100.0
    if h > 0.01:
        h = 0.01

    cdef double ts = 0.0, qs = q0, ps = p0
    cdef double scan_from, t_stop, t_hit = 0.0, wall = 0.0, p_hit = 0.0
    cdef long i_out = 0
    cdef int have_event
    cdef long n_impacts = 0
    cdef Seg seg
    while True:
        seg = make_seg(F, Omega, resonant, A, ts, qs, ps)
        scan_from = ts + SKIP
        have_event = 0
        while True:
            if not first_event(&seg, scan_from, horizon, h, &t_hit, &wall):
                break
            p_hit = seg_p(&seg, t_hit)
            if p_hit * wall >= GRAZE_TOL:
                have_event = 1
                break
            # grazing or inward contact: not an impact, keep the segment
            scan_from = t_hit + SKIP
        t_stop = horizon if not have_event else t_hit
        while i_out < n_out and tau_v[i_out] <= t_stop + 1e-12:
            q_v[i_out] = seg_q(&seg, tau_v[i_out])
            p_v[i_out] = seg_p(&seg, tau_v[i_out])
            i_out += 1
        if not have_event:
            break
        if n_impacts >= MAX_IMPACTS:
            raise RuntimeError("impact count guard tripped: chatter")
        impacts.append(t_hit)
        speeds.append(fabs(p_hit))
        n_impacts += 1
        ts = t_hit
        qs = wall
        ps = -p_hit
    return tau_out, q_out, p_out, np.asarray(impacts), np.asarray(speeds)
