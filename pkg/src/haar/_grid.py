"""Fixed-point grid engine behind the SU(2) Haar quadrature.

The integral is written as nested probability averages over the spherical
parameters: eta has density sin^2(eta)*(2/pi) on [0, pi], theta has density
sin(theta)/2 on [0, pi], phi is uniform on [0, 2 pi); their product times the
map Psi is the Haar measure (this realizes the 1/(2 pi^2) normalization as the
three per-axis normalizers pi/2, 2, 2 pi).  Cell weights are differences of
the exact cumulative weights, so the Jacobian never enters the cell loop.

The cell loop runs in fixed point: interval endpoints are int64 multiples of
2^-SCALE, products round outward by integer shifts, and numpy carries the
vectorized loop.  Every int64 operation is exact (magnitudes are kept below
2^62 by construction), so the enclosures are certified despite the vector
path.

Discretization error is bounded per axis from the coordinate speeds of Psi,
which are 1, sin(eta), sin(eta)sin(theta): a Lipschitz-L integrand composed
with Psi moves at most L, L sin(eta), L sin(eta) sin(theta) along the three
axes.  The per-cell midpoint error then sums to

    L * h1/4  +  L * S1 * (h2^2/8) * sum_j sinmax_j  +  L * S1 * S2 * h3/4

with S1 = sum_i w1_i sin(m_i), S2 = sum_j w2_j sin(m_j); the engine evaluates
this bound exactly from its own tables before trusting a grid.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exactreal import (
    Dyadic, Interval, ZERO, ONE, NoConvergence,
    fraction_ceil_to, fraction_floor_to, pi_enclosure,
)

SCALE = 29                     # int64-safe: products stay below 2^62
_DEAD = (0, 0)


class InvalidBound(ValueError):
    """An integrand enclosure provably escaped the declared bound [-M, M]."""


def _scale_fraction(iv: Interval, q: Fraction, p: int) -> Interval:
    a = iv.lo.as_fraction() * q
    b = iv.hi.as_fraction() * q
    if a > b:
        a, b = b, a
    return Interval.from_fractions(a, b, p)


# ---------------------------------------------------------------------------
# fast certified sin/cos on dyadic points (integer fixed-point Taylor)
# ---------------------------------------------------------------------------

_PI_FIXED: dict[int, tuple[int, int]] = {}


def _pi_fixed(g: int) -> tuple[int, int]:
    if g not in _PI_FIXED:
        enc = pi_enclosure(g + 4)
        _PI_FIXED[g] = (enc.lo.scaled_floor(g), enc.hi.scaled_ceil(g))
    return _PI_FIXED[g]


def _taylor_sincos(y: int, g: int) -> tuple[int, int, int, int]:
    """Brackets of sin(y/2^g), cos(y/2^g) for |y| <= 0.9 * 2^g.

    Integer Taylor with floor divisions: every step perturbs a term by at
    most 2 ulps and the factor y^2/2^g < 0.81 damps propagation, so the
    accumulated error over the < 25 terms stays far below the blanket 64-ulp
    widening (which also covers the truncated tail, below 1 ulp at exit).
    """
    one = 1 << g
    yy = (y * y) >> g
    s = t = y
    k = 1
    while t:
        t = -((t * yy) // (one * (k + 1) * (k + 2)))
        s += t
        k += 2
        if k > 80:
            raise NoConvergence("fixed-point sin series did not settle")
    c = u = one
    k = 0
    while u:
        u = -((u * yy) // (one * (k + 1) * (k + 2)))
        c += u
        k += 2
        if k > 80:
            raise NoConvergence("fixed-point cos series did not settle")
    E = 64
    return s - E, s + E, c - E, c + E


def _sincos_fixed(xlo: int, xhi: int, g: int) -> tuple:
    """(sin_lo, sin_hi, cos_lo, cos_hi) at scale g over x in [xlo, xhi]/2^g."""
    plo, phi_ = _pi_fixed(g)
    k = round(2.0 * ((xlo + xhi) / 2.0) / float(plo))
    a, b = k * plo, k * phi_
    lo_term, hi_term = (a, b) if a <= b else (b, a)
    ylo = xlo - ((hi_term + 1) // 2)
    yhi = xhi - (lo_term // 2)
    ym = (ylo + yhi) // 2
    h = (yhi - ylo + 1) // 2 + 1
    cap = 1 << g
    if abs(ym) > cap * 9 // 10:
        raise NoConvergence("quadrant reduction failed")
    slo, shi, clo, chi = _taylor_sincos(ym, g)
    slo -= h
    shi += h
    clo -= h
    chi += h
    slo, shi = max(slo, -cap), min(shi, cap)
    clo, chi = max(clo, -cap), min(chi, cap)
    r = k % 4
    if r == 0:
        return slo, shi, clo, chi
    if r == 1:
        return clo, chi, -shi, -slo
    if r == 2:
        return -shi, -slo, -chi, -clo
    return -chi, -clo, slo, shi


def _sincos_of_pi_fraction(q: Fraction, g: int):
    """sin/cos Interval pair at pi * q, via the fixed-point path."""
    plo, phi_ = _pi_fixed(g)
    num, den = q.numerator, q.denominator
    if num >= 0:
        xlo = (num * plo) // den
        xhi = -((-num * phi_) // den)
    else:
        xlo = (num * phi_) // den
        xhi = -((-num * plo) // den)
    slo, shi, clo, chi = _sincos_fixed(xlo, xhi, g)
    return (Interval(Dyadic(slo, -g), Dyadic(shi, -g)),
            Interval(Dyadic(clo, -g), Dyadic(chi, -g)))


def _nonneg(iv: Interval) -> Interval:
    lo = iv.lo if iv.lo.sign() > 0 else ZERO
    hi = iv.hi if iv.hi >= lo else lo
    return Interval(lo, hi)


class _Axis:
    __slots__ = ("n", "sin_mid", "cos_mid", "weights", "spacing_hi")

    def __init__(self, n, sin_mid, cos_mid, weights, spacing_hi):
        self.n = n
        self.sin_mid = sin_mid       # list[Interval]
        self.cos_mid = cos_mid       # list[Interval]
        self.weights = weights       # list[Interval], None for phi (uniform)
        self.spacing_hi = spacing_hi  # Fraction upper bound of the cell width

    def fixed(self, scale):
        def pack(ivs):
            lo = np.array([v.lo.scaled_floor(scale) for v in ivs], dtype=np.int64)
            hi = np.array([v.hi.scaled_ceil(scale) for v in ivs], dtype=np.int64)
            return lo, hi
        out = [pack(self.sin_mid), pack(self.cos_mid)]
        out.append(pack(self.weights) if self.weights is not None else None)
        return out


def _build_axis(kind: str, n: int, guard: int) -> _Axis:
    """Midpoint sin/cos tables and exact cumulative weights for one axis."""
    g = guard + 10
    pi_enc = pi_enclosure(guard)
    sin_mid, cos_mid = [], []
    if kind == "phi":
        # midpoints 2 pi (2k+1)/(2n) = pi (2k+1)/n, uniform weights 1/n
        for k in range(n):
            s, c = _sincos_of_pi_fraction(Fraction(2 * k + 1, n), g)
            sin_mid.append(s)
            cos_mid.append(c)
        return _Axis(n, sin_mid, cos_mid, None, 2 * pi_enc.hi.as_fraction() / n)
    for i in range(n):
        s, c = _sincos_of_pi_fraction(Fraction(2 * i + 1, 2 * n), g)
        sin_mid.append(s)
        cos_mid.append(c)
    cum = []
    for i in range(n + 1):
        b = _scale_fraction(pi_enc, Fraction(i, n), g)
        s, c = _sincos_of_pi_fraction(Fraction(i, n), g)
        if kind == "eta":
            # W1(x) = (x - sin x cos x) / pi
            v = (b - s * c).divide(pi_enc, guard)
        else:
            # W2(x) = (1 - cos x) / 2
            v = (Interval.from_int(1) - c).scale(Dyadic(1, -1))
        cum.append(v)
    weights = [_nonneg(cum[i + 1] - cum[i]) for i in range(n)]
    return _Axis(n, sin_mid, cos_mid, weights, pi_enc.hi.as_fraction() / n)


# ---------------------------------------------------------------------------
# certified discretization bound from the tables
# ---------------------------------------------------------------------------

def _axis_sums(ax: _Axis):
    """(sum_i w_hi sin_hi, sum_i sinmax_i, sum_i sinmax_i^2) as Fractions."""
    half_h = ax.spacing_hi / 2
    s_weighted = Fraction(0)
    s_max = Fraction(0)
    s_max2 = Fraction(0)
    for i in range(ax.n):
        shi = ax.sin_mid[i].hi.as_fraction()
        if ax.weights is not None:
            s_weighted += ax.weights[i].hi.as_fraction() * shi
        smax = min(Fraction(1), shi + half_h)   # sin is 1-Lipschitz
        s_max += smax
        s_max2 += smax * smax
    return s_weighted, s_max, s_max2


def _disc_bound(L: Fraction, eta: _Axis, theta, phi) -> Fraction:
    if L == 0:
        return Fraction(0)
    pi_lo = pi_enclosure(40).lo.as_fraction()
    _, _, e_max2 = _axis_sums(eta)
    h1 = eta.spacing_hi
    total = L * (h1 * h1 / 4) * Fraction(2) / pi_lo * e_max2
    if theta is None:
        return total
    s1, _, _ = _axis_sums(eta)
    t_weighted, t_max, _ = _axis_sums(theta)
    h2 = theta.spacing_hi
    total += L * s1 * (h2 * h2 / 8) * t_max
    if phi is None:
        return total
    h3 = phi.spacing_hi
    total += L * s1 * t_weighted * (h3 / 4)
    return total


# ---------------------------------------------------------------------------
# fixed-point interval helpers (operate on numpy int64 arrays or python ints)
# ---------------------------------------------------------------------------

def _shr_floor(x, s):
    return x >> s


def _shr_ceil(x, s):
    return -((-x) >> s)


def fp_abs(lo, hi):
    alo = np.where(lo >= 0, lo, np.where(hi <= 0, -hi, 0))
    ahi = np.maximum(-lo, hi)
    return alo, ahi


def fp_add(a, b):
    return a[0] + b[0], a[1] + b[1]


def fp_neg(a):
    return -a[1], -a[0]


def fp_mul_nn(a, b, s=SCALE):
    """Product when a >= 0 and b >= 0."""
    return _shr_floor(a[0] * b[0], s), _shr_ceil(a[1] * b[1], s)


def fp_mul_na(a, b, s=SCALE):
    """Product when a >= 0, b of any sign."""
    lo = np.minimum(a[0] * b[0], a[1] * b[0])
    hi = np.maximum(a[0] * b[1], a[1] * b[1])
    return _shr_floor(lo, s), _shr_ceil(hi, s)


def fp_mul(a, b, s=SCALE):
    """General product, four candidates."""
    p1 = a[0] * b[0]
    p2 = a[0] * b[1]
    p3 = a[1] * b[0]
    p4 = a[1] * b[1]
    lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
    hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
    return _shr_floor(lo, s), _shr_ceil(hi, s)


def fp_square(a, s=SCALE):
    lo, hi = fp_abs(a[0], a[1])
    return _shr_floor(lo * lo, s), _shr_ceil(hi * hi, s)


def _isqrt_vec(x):
    """Vectorized floor-isqrt for nonnegative int64 (x < 2^62)."""
    r = np.sqrt(x.astype(np.float64)).astype(np.int64)
    # float rounding can be off by 1 either way
    r = np.where((r + 1) * (r + 1) <= x, r + 1, r)
    r = np.where(r * r > x, r - 1, r)
    return r


def fp_sqrt(a, s=SCALE):
    """sqrt of a nonnegative fixed-point interval (clamps lo noise at 0)."""
    lo = np.maximum(a[0], 0)
    rlo = _isqrt_vec(lo << s)
    xhi = np.maximum(a[1], 0) << s
    rhi = _isqrt_vec(xhi)
    rhi = np.where(rhi * rhi < xhi, rhi + 1, rhi)
    return rlo, rhi


def fp_div_pos(a, b, s=SCALE):
    """a / b when b > 0 (b_lo > 0)."""
    lo = np.minimum((a[0] << s) // b[0], (a[0] << s) // b[1])
    num = a[1] << s
    hi = np.maximum(-((-num) // b[0]), -((-num) // b[1]))
    return lo, hi


def fp_const(value: Fraction, s=SCALE):
    lo = (value.numerator << s) // value.denominator
    hi = -(((-value.numerator) << s) // value.denominator)
    return lo, hi


# ---------------------------------------------------------------------------
# the integration loop
# ---------------------------------------------------------------------------

def _choose_resolution(uses: str, L: float, budget: float) -> tuple[int, int, int]:
    if L <= 0.0:
        return 1, 1, 1
    pi_f = 3.14159265358979
    if uses == "a":
        return max(1, int(L * pi_f / (4 * budget)) + 1), 1, 1
    if uses == "ab":
        d = budget / 2
        n1 = max(1, int(L * pi_f / (4 * d)) + 1)
        n2 = max(1, int(0.85 * L * pi_f / (4 * d)) + 1)
        return n1, n2, 1
    d = budget / 3
    n1 = max(1, int(L * pi_f / (4 * d)) + 1)
    n2 = max(1, int(0.85 * L * pi_f / (4 * d)) + 1)
    n3 = max(1, int(0.67 * L * 2 * pi_f / (4 * d)) + 1)
    return n1, n2, n3


def su2_grid_integral(spec, n: int, *, max_cells: int = 10 ** 11,
                      max_scalar_cells: int = 2 * 10 ** 6) -> Interval:
    """Certified enclosure of the Haar integral of ``spec`` over SU(2).

    Resolution is chosen from spec.lipschitz, then the exact table-based
    discretization bound is verified (and the grid grown if short).  The
    returned interval has width <= 2^-(n-1), i.e. half-width <= 2^-n around
    the midpoint.
    """
    L = Fraction(spec.lipschitz.as_fraction())
    uses = getattr(spec, "uses", "abcd")
    fixed = getattr(spec, "fixed_eval", None)
    disc_budget = Fraction(7, 8) / (1 << n)
    n1, n2, n3 = _choose_resolution(uses, float(L), float(disc_budget))
    guard = SCALE + 6
    for _attempt in range(10):
        cells = n1 * n2 * n3
        if cells > max_cells or (fixed is None and cells > max_scalar_cells):
            raise NoConvergence(
                f"su2 grid needs {cells} cells for 2^-{n}; over the effort cap")
        eta = _build_axis("eta", n1, guard)
        theta = _build_axis("theta", n2, guard) if uses != "a" else None
        phi = _build_axis("phi", n3, guard) if uses == "abcd" else None
        disc = _disc_bound(L, eta, theta, phi)
        if disc <= disc_budget:
            break
        grow = 1.25
        n1 = int(n1 * grow) + 1
        if uses != "a":
            n2 = int(n2 * grow) + 1
        if uses == "abcd":
            n3 = int(n3 * grow) + 1
    else:
        raise NoConvergence("discretization bound failed to meet the budget")

    if fixed is not None:
        total = _fixed_sweep(spec, eta, theta, phi)
    else:
        total = _scalar_sweep(spec, eta, theta, phi)

    lo = total.lo.as_fraction() - disc
    hi = total.hi.as_fraction() + disc
    enc = Interval.from_fractions(lo, hi, n + 8)
    if enc.width() > Dyadic(1, -(n - 1)):
        raise NoConvergence(
            f"certified width {float(enc.width()):.3g} exceeds 2^-{n - 1}; "
            "interval noise dominates at this precision")
    return enc


def _bound_fixed(spec) -> int:
    return spec.bound.as_fraction().__ceil__() * (1 << SCALE) + (1 << SCALE)


def _fixed_sweep(spec, eta: _Axis, theta, phi) -> Interval:
    fixed = spec.fixed_eval
    uses = getattr(spec, "uses", "abcd")
    m_fx = _bound_fixed(spec)
    (es_lo, es_hi), (ec_lo, ec_hi), (ew_lo, ew_hi) = eta.fixed(SCALE)

    if uses == "a":
        flo, fhi = fixed((ec_lo, ec_hi), _DEAD, _DEAD, _DEAD, SCALE)
        flo = np.broadcast_to(np.asarray(flo, dtype=np.int64), (eta.n,))
        fhi = np.broadcast_to(np.asarray(fhi, dtype=np.int64), (eta.n,))
        _check_bound(flo, fhi, m_fx)
        acc_lo = int(np.minimum(ew_lo * flo, ew_hi * flo).sum())
        acc_hi = int(np.maximum(ew_lo * fhi, ew_hi * fhi).sum())
        return _acc_to_interval(acc_lo, acc_hi)

    (ts_lo, ts_hi), (tc_lo, tc_hi), (tw_lo, tw_hi) = theta.fixed(SCALE)

    if uses == "ab":
        acc_lo = acc_hi = 0
        for i in range(eta.n):
            se = (int(es_lo[i]), int(es_hi[i]))
            ce = (int(ec_lo[i]), int(ec_hi[i]))
            b = fp_mul_na(se, (tc_lo, tc_hi))
            flo, fhi = fixed(ce, b, _DEAD, _DEAD, SCALE)
            flo = np.broadcast_to(np.asarray(flo, dtype=np.int64), (theta.n,))
            fhi = np.broadcast_to(np.asarray(fhi, dtype=np.int64), (theta.n,))
            _check_bound(flo, fhi, m_fx)
            jlo = int(np.minimum(tw_lo * flo, tw_hi * flo).sum())
            jhi = int(np.maximum(tw_lo * fhi, tw_hi * fhi).sum())
            rl, rh = _shr_floor(jlo, SCALE), _shr_ceil(jhi, SCALE)
            acc_lo += min(ew_lo[i] * rl, ew_hi[i] * rl)
            acc_hi += max(ew_lo[i] * rh, ew_hi[i] * rh)
        return _acc_to_interval(int(acc_lo), int(acc_hi))

    (ps_lo, ps_hi), (pc_lo, pc_hi), _ = phi.fixed(SCALE)
    n3 = phi.n
    pc = (pc_lo[None, :], pc_hi[None, :])
    ps = (ps_lo[None, :], ps_hi[None, :])
    polar = getattr(spec, "fixed_eval_polar", None)
    chunk = max(1, (1 << 20) // max(n3, 1))
    acc_lo = acc_hi = 0
    for i in range(eta.n):
        se = (int(es_lo[i]), int(es_hi[i]))
        ce = (int(ec_lo[i]), int(ec_hi[i]))
        row_lo = 0
        row_hi = 0
        for j0 in range(0, theta.n, chunk):
            j1 = min(theta.n, j0 + chunk)
            ct = (tc_lo[j0:j1], tc_hi[j0:j1])
            st = (ts_lo[j0:j1], ts_hi[j0:j1])
            b = fp_mul_na(se, ct)                   # (jb,)
            sest = fp_mul_nn(se, st)                # (jb,)
            if polar is not None:
                flo, fhi = polar(ce, b, sest, (pc_lo, pc_hi), (ps_lo, ps_hi),
                                 SCALE)
            else:
                col = (sest[0][:, None], sest[1][:, None])
                c = fp_mul_na(col, pc)              # (jb, n3)
                d = fp_mul_na(col, ps)
                flo, fhi = fixed(ce, (b[0][:, None], b[1][:, None]), c, d,
                                 SCALE)
            flo = np.broadcast_to(np.asarray(flo, dtype=np.int64), (j1 - j0, n3))
            fhi = np.broadcast_to(np.asarray(fhi, dtype=np.int64), (j1 - j0, n3))
            _check_bound(flo, fhi, m_fx)
            ks_lo = flo.sum(axis=1)
            ks_hi = fhi.sum(axis=1)
            mean_lo = ks_lo // n3
            mean_hi = -((-ks_hi) // n3)
            wl, wh = tw_lo[j0:j1], tw_hi[j0:j1]
            row_lo += int(np.minimum(wl * mean_lo, wh * mean_lo).sum())
            row_hi += int(np.maximum(wl * mean_hi, wh * mean_hi).sum())
        rl, rh = _shr_floor(row_lo, SCALE), _shr_ceil(row_hi, SCALE)
        acc_lo += min(ew_lo[i] * rl, ew_hi[i] * rl)
        acc_hi += max(ew_lo[i] * rh, ew_hi[i] * rh)
    return _acc_to_interval(int(acc_lo), int(acc_hi))


def _check_bound(flo, fhi, m_fx):
    if int(flo.max(initial=-m_fx)) > m_fx or int(fhi.min(initial=m_fx)) < -m_fx:
        raise InvalidBound("integrand enclosure escaped the declared bound")


def _acc_to_interval(acc_lo: int, acc_hi: int) -> Interval:
    return Interval(Dyadic(acc_lo, -2 * SCALE), Dyadic(acc_hi, -2 * SCALE))


def _scalar_sweep(spec, eta: _Axis, theta, phi) -> Interval:
    """Pure-python sweep for integrands without a vectorized form."""
    from .groups import Versor
    wide = Interval(Dyadic(-1), Dyadic(1))
    pos = Interval(ZERO, ONE)
    wp = SCALE
    m_bound = spec.bound.as_fraction() + 1
    lo = Fraction(0)
    hi = Fraction(0)
    for i in range(eta.n):
        se, ce = eta.sin_mid[i], eta.cos_mid[i]
        w1 = eta.weights[i]
        if theta is None:
            q = Versor(ce, pos, wide, wide)
            fv = spec.eval(q, wp)
            _check_scalar_bound(fv, m_bound)
            lo += min(w1.lo.as_fraction() * fv.lo.as_fraction(),
                      w1.hi.as_fraction() * fv.lo.as_fraction())
            hi += max(w1.lo.as_fraction() * fv.hi.as_fraction(),
                      w1.hi.as_fraction() * fv.hi.as_fraction())
            continue
        row_lo = Fraction(0)
        row_hi = Fraction(0)
        for j in range(theta.n):
            st, ct = theta.sin_mid[j], theta.cos_mid[j]
            w2 = theta.weights[j]
            beta = se * ct
            sest = se * st
            if phi is None:
                q = Versor(ce, beta, wide, wide)
                fvals = [spec.eval(q, wp)]
            else:
                fvals = []
                for k in range(phi.n):
                    q = Versor(ce, beta, sest * phi.cos_mid[k],
                               sest * phi.sin_mid[k])
                    fvals.append(spec.eval(q, wp))
            for fv in fvals:
                _check_scalar_bound(fv, m_bound)
            nk = len(fvals)
            mlo = sum(f.lo.as_fraction() for f in fvals) / nk
            mhi = sum(f.hi.as_fraction() for f in fvals) / nk
            row_lo += min(w2.lo.as_fraction() * mlo, w2.hi.as_fraction() * mlo)
            row_hi += max(w2.lo.as_fraction() * mhi, w2.hi.as_fraction() * mhi)
        lo += min(w1.lo.as_fraction() * row_lo, w1.hi.as_fraction() * row_lo)
        hi += max(w1.lo.as_fraction() * row_hi, w1.hi.as_fraction() * row_hi)
    return Interval(fraction_floor_to(lo, 4 * SCALE), fraction_ceil_to(hi, 4 * SCALE))


def _check_scalar_bound(fv: Interval, m_bound: Fraction):
    if fv.lo.as_fraction() > m_bound or fv.hi.as_fraction() < -m_bound:
        raise InvalidBound("integrand enclosure escaped the declared bound")
