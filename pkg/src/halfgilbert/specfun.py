"""Real-argument special functions used by the closed-form layer.

Provides gamma (including negative non-integer arguments), the complementary
error function, the Kummer confluent hypergeometric function 1F1, and the
Hermite function H_v of non-integer order v.  H_v is evaluated along two
independent routes: a two-term 1F1 combination (`hermite_fn`) and direct
adaptive quadrature of its integral representation (`hermite_fn_integral`).
Agreement of the two routes is the correctness oracle for both.

Everything here is a pure function of its arguments and configuration and is
safe to call concurrently.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace

from .errors import (
    DomainError,
    PoleError,
    QuadratureConvergenceError,
    SeriesConvergenceError,
)

__all__ = [
    "QuadratureConfig",
    "SeriesConfig",
    "adaptive_quad",
    "erfc_fn",
    "gamma_fn",
    "hermite_fn",
    "hermite_fn_integral",
    "kummer_1f1",
]

_SQRT_PI = math.sqrt(math.pi)

# Proximity to a non-positive integer at which gamma_fn refuses to evaluate.
# Explicit failure beats silent catastrophic digit loss next to a pole.
_POLE_EPS = 1e-9

# |z| bound for hermite_fn_integral: the prefactor exp(z^2) overflows double
# precision once z^2 > 709, so 26^2 = 676 keeps a safety margin.
_HERMITE_Z_MAX = 26.0


@dataclass(frozen=True)
class SeriesConfig:
    """Termination control for ascending power series.

    term_rel_tol: stop once |term| < term_rel_tol * |partial sum| (twice in
    a row, guarding against accidental zero crossings of a term).
    max_terms: hard budget before SeriesConvergenceError.
    """

    term_rel_tol: float = 1e-16
    max_terms: int = 500

    def __post_init__(self) -> None:
        if not self.term_rel_tol > 0.0:
            raise ValueError("term_rel_tol must be positive")
        if self.max_terms < 10:
            raise ValueError("max_terms must be at least 10")


@dataclass(frozen=True)
class QuadratureConfig:
    """Targets and limits for adaptive Gauss-Kronrod integration.

    tail_cutoff is the finite upper limit substituted for infinity in
    semi-infinite integrals whose integrand decays like exp(-u^2); at the
    default 12 the discarded tail is below exp(-144) ~ 4e-63.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 400
    tail_cutoff: float = 12.0

    def __post_init__(self) -> None:
        if not self.abs_tol > 0.0:
            raise ValueError("abs_tol must be positive")
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")
        if not self.tail_cutoff > 0.0:
            raise ValueError("tail_cutoff must be positive")


DEFAULT_SERIES = SeriesConfig()
DEFAULT_QUADRATURE = QuadratureConfig()


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# gamma
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 7, n = 9 (Godfrey's published coefficients).
# Relative error is below 3e-13 on (-5, 5) away from pole neighborhoods.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _lanczos_gamma(x: float) -> float:
    # valid for x >= 0.5
    xm1 = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[i] / (xm1 + i)
    t = xm1 + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (xm1 + 0.5) * math.exp(-t) * acc


def gamma_fn(x: float) -> float:
    """Gamma function for real x away from its poles.

    Arguments below 1/2 are routed through the reflection identity
    Gamma(x) Gamma(1-x) = pi / sin(pi x), which covers negative non-integer
    x.  Raises PoleError when x is within 1e-9 of zero or a negative
    integer.
    """
    x = _require_finite("x", x)
    if x < 0.5:
        nearest = round(x)
        if nearest <= 0 and abs(x - nearest) < _POLE_EPS:
            raise PoleError(f"gamma pole: x={x!r} is within {_POLE_EPS} of {int(nearest)}")
        return math.pi / (math.sin(math.pi * x) * _lanczos_gamma(1.0 - x))
    return _lanczos_gamma(x)


def _reciprocal_gamma(x: float) -> float:
    """1/Gamma(x), returning exactly 0.0 at (near-)non-positive integers."""
    nearest = round(x)
    if nearest <= 0 and abs(x - nearest) < _POLE_EPS:
        return 0.0
    return 1.0 / gamma_fn(x)


# ---------------------------------------------------------------------------
# erfc
# ---------------------------------------------------------------------------


def erfc_fn(x: float) -> float:
    """Complementary error function erfc(x) = 1 - erf(x).

    Thin validated wrapper over the C library implementation; underflows
    to zero gracefully for large positive x.
    """
    x = _require_finite("x", x)
    return math.erfc(x)


# ---------------------------------------------------------------------------
# Kummer 1F1
# ---------------------------------------------------------------------------


def kummer_1f1(a: float, b: float, z: float, cfg: SeriesConfig | None = None) -> float:
    """Confluent hypergeometric function 1F1(a; b; z) for real arguments.

    Negative z is always rewritten through the Kummer transformation
    1F1(a;b;z) = exp(z) 1F1(b-a;b;-z) so the ascending series is summed
    with eventually same-signed terms (the direct series at z < 0
    alternates and cancels catastrophically).
    """
    if cfg is None:
        cfg = DEFAULT_SERIES
    a = _require_finite("a", a)
    b = _require_finite("b", b)
    z = _require_finite("z", z)
    nearest = round(b)
    if nearest <= 0 and abs(b - nearest) < _POLE_EPS:
        raise PoleError(f"1F1 parameter pole: b={b!r} is a non-positive integer")
    if z < 0.0:
        return math.exp(z) * _kummer_series(b - a, b, -z, cfg)
    return _kummer_series(a, b, z, cfg)


def _kummer_series(a: float, b: float, z: float, cfg: SeriesConfig) -> float:
    terms = [1.0]
    term = 1.0
    partial = 1.0
    small_streak = 0
    for k in range(cfg.max_terms):
        term *= (a + k) * z / ((b + k) * (k + 1.0))
        terms.append(term)
        partial += term
        if abs(term) <= cfg.term_rel_tol * abs(partial):
            small_streak += 1
            if small_streak >= 2:
                # fsum removes accumulation roundoff; matters when large
                # terms cancel (z sizable, a < 0).
                return math.fsum(terms)
        else:
            small_streak = 0
    raise SeriesConvergenceError(
        f"1F1({a}, {b}, {z}) did not converge within {cfg.max_terms} terms"
    )


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod quadrature
# ---------------------------------------------------------------------------

# 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15).
_XGK = (
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
)
_WGK = (
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715526,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
)
_WG = (
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
)

_EPS = 2.220446049250313e-16


def _gk15(f, a: float, b: float) -> tuple[float, float, float]:
    """One Kronrod panel. Returns (integral, error estimate, abs mass)."""
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = f(center)
    resk = _WGK[7] * fc
    resg = _WG[3] * fc
    resabs = _WGK[7] * abs(fc)
    fvals = [fc]
    for i in range(7):
        dx = half * _XGK[i]
        f1 = f(center - dx)
        f2 = f(center + dx)
        fvals.append(f1)
        fvals.append(f2)
        resk += _WGK[i] * (f1 + f2)
        resabs += _WGK[i] * (abs(f1) + abs(f2))
        if i % 2 == 1:
            resg += _WG[i // 2] * (f1 + f2)
    reskh = 0.5 * resk
    resasc = _WGK[7] * abs(fc - reskh)
    idx = 1
    for i in range(7):
        resasc += _WGK[i] * (abs(fvals[idx] - reskh) + abs(fvals[idx + 1] - reskh))
        idx += 2
    integral = resk * half
    resabs *= abs(half)
    resasc *= abs(half)
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > 0.0:
        err = max(_EPS * 50.0 * resabs, err)
    return integral, err, resabs


def adaptive_quad(f, a: float, b: float, cfg: QuadratureConfig | None = None) -> float:
    """Integrate f over [a, b] by adaptive bisection of Kronrod panels.

    Convergence is declared when the summed panel error estimates drop
    below max(abs_tol, rel_tol * |integral|, roundoff floor); the floor
    (50 eps times the accumulated absolute mass) keeps tolerance requests
    beyond double precision from spinning until the subdivision budget is
    exhausted.  Raises QuadratureConvergenceError if max_subdivisions
    panels are not enough.
    """
    if cfg is None:
        cfg = DEFAULT_QUADRATURE
    a = _require_finite("a", a)
    b = _require_finite("b", b)
    if a == b:
        return 0.0
    # Start from several panels: a single Kronrod panel can agree with its
    # embedded Gauss rule by accident and report a spuriously small error.
    initial = max(2, min(16, math.ceil(abs(b - a))))
    initial = min(initial, cfg.max_subdivisions)
    edges = [a + (b - a) * i / initial for i in range(initial + 1)]
    # heap entries: (-error, tie-break counter, a, b, integral, mass)
    counter = 0
    panels = []
    for lo, hi in zip(edges, edges[1:]):
        integral, err, mass = _gk15(f, lo, hi)
        heapq.heappush(panels, (-err, counter, lo, hi, integral, mass))
        counter += 1
    while True:
        total_err = -math.fsum(p[0] for p in panels)
        total = math.fsum(p[4] for p in panels)
        total_mass = math.fsum(p[5] for p in panels)
        # Each panel's estimate is already floored at 50 eps x its mass, so
        # the acceptance floor must sit above the sum of those panel floors.
        floor = 200.0 * _EPS * total_mass
        if total_err <= max(cfg.abs_tol, cfg.rel_tol * abs(total), floor):
            return total
        if len(panels) >= cfg.max_subdivisions:
            raise QuadratureConvergenceError(
                f"quadrature on [{a}, {b}] stalled at error {total_err:.3e} "
                f"after {len(panels)} panels"
            )
        neg_err, _, pa, pb, _, _ = heapq.heappop(panels)
        mid = 0.5 * (pa + pb)
        for lo, hi in ((pa, mid), (mid, pb)):
            integral, err, mass = _gk15(f, lo, hi)
            counter += 1
            heapq.heappush(panels, (-err, counter, lo, hi, integral, mass))


# ---------------------------------------------------------------------------
# Hermite function of non-integer order
# ---------------------------------------------------------------------------


def hermite_fn(v: float, z: float, cfg: SeriesConfig | None = None) -> float:
    """Hermite function H_v(z) for real order v > -1.

    Evaluated as the standard two-term Kummer combination

        H_v(z) = 2^v sqrt(pi) [ 1F1(-v/2; 1/2; z^2) / Gamma((1-v)/2)
                                - 2 z 1F1((1-v)/2; 3/2; z^2) / Gamma(-v/2) ]

    with 1/Gamma taken as zero at its poles, which reproduces the
    classical polynomials at integer v.  Cross-checked against
    `hermite_fn_integral` (the two routes share no evaluation machinery
    beyond 1F1 itself appearing only here).
    """
    v = _require_finite("v", v)
    z = _require_finite("z", z)
    if v <= -1.0:
        raise DomainError(f"Hermite order must exceed -1, got v={v!r}")
    z2 = z * z
    c1 = _reciprocal_gamma((1.0 - v) / 2.0)
    c2 = _reciprocal_gamma(-v / 2.0)
    t1 = c1 * kummer_1f1(-v / 2.0, 0.5, z2, cfg) if c1 != 0.0 else 0.0
    t2 = 2.0 * z * c2 * kummer_1f1((1.0 - v) / 2.0, 1.5, z2, cfg) if c2 != 0.0 else 0.0
    return 2.0**v * _SQRT_PI * (t1 - t2)


_LAPLACE_QUAD = QuadratureConfig(abs_tol=1e-14, rel_tol=5e-14, max_subdivisions=400)


def _hermite_laplace(v: float, z: float) -> float:
    """H_v(z) for -1 < v < 0 through the Laplace-type representation

        H_v(z) = (1/Gamma(-v)) integral_0^inf exp(-s^2 - 2 s z) s^(-v-1) ds.

    The integrand is positive, so unlike the two-term Kummer combination
    this route has no exp(z^2)-scale cancellation for z > 0 and keeps
    near-machine relative accuracy there.  Used internally by the MGF
    layer, whose residual probes difference H pointwise and would amplify
    that cancellation noise; not part of the public dual-path pair.
    """
    v = _require_finite("v", v)
    z = _require_finite("z", z)
    if not -1.0 < v < 0.0:
        raise DomainError(f"Laplace route requires -1 < v < 0, got v={v!r}")
    if z < -_HERMITE_Z_MAX:
        raise DomainError(
            f"z = {z!r} below -{_HERMITE_Z_MAX}; exp(z^2) would overflow"
        )
    alpha = -v

    def g(s: float) -> float:
        return math.exp(-s * (s + 2.0 * z))

    # Head [0, delta]: expand g(s) = sum_k c_k s^k with c_k = (-1)^k H_k(z)/k!
    # (classical Hermite polynomials, from the generating function of
    # exp(-2zs - s^2)) and integrate s^(alpha-1) s^k termwise.  This beats
    # any substitution: the s^(alpha-1) weight is handled exactly and no
    # fractional-power kink is left for the quadrature to chase.
    delta = 0.25
    c_prev = 0.0
    c_curr = 1.0
    terms = [delta**alpha / alpha]
    small_streak = 0
    for k in range(200):
        c_next = -(2.0 * z * c_curr + 2.0 * c_prev) / (k + 1.0)
        c_prev, c_curr = c_curr, c_next
        term = c_curr * delta ** (k + 1.0 + alpha) / (k + 1.0 + alpha)
        terms.append(term)
        if abs(term) < 1e-18 * abs(terms[0]):
            small_streak += 1
            if small_streak >= 2:
                break
        else:
            small_streak = 0
    head = math.fsum(terms)
    upper = max(-z, 0.0) + 8.0
    rest = adaptive_quad(
        lambda s: s ** (alpha - 1.0) * g(s), delta, upper, _LAPLACE_QUAD
    )
    return (head + rest) / gamma_fn(alpha)


def hermite_fn_integral(v: float, z: float, cfg: QuadratureConfig | None = None) -> float:
    """Hermite function H_v(z) by quadrature of its integral representation

        H_v(z) = 2^(v+1)/sqrt(pi) exp(z^2)
                 * integral_0^inf exp(-u^2) u^v cos(2 z u - pi v / 2) du,

    valid for v > -1.  The integral is truncated at cfg.tail_cutoff, where
    the remainder is bounded by exp(-U^2) (about 4e-63 at the default
    U = 12).  For v < 0 the u^v endpoint singularity on [0, 1] is removed
    exactly by the substitution u = w^(1/(v+1)), under which u^v du becomes
    dw/(v+1); [1, U] is integrated directly.  Requires |z| <= 26 so the
    exp(z^2) prefactor stays inside double range.
    """
    if cfg is None:
        cfg = DEFAULT_QUADRATURE
    v = _require_finite("v", v)
    z = _require_finite("z", z)
    if v <= -1.0:
        raise DomainError(f"Hermite order must exceed -1, got v={v!r}")
    if abs(z) > _HERMITE_Z_MAX:
        raise DomainError(
            f"|z| = {abs(z)!r} exceeds {_HERMITE_Z_MAX}; exp(z^2) would overflow"
        )
    phase = 0.5 * math.pi * v
    two_z = 2.0 * z

    def g(u: float) -> float:
        return math.exp(-u * u) * math.cos(two_z * u - phase)

    scale = 2.0 ** (v + 1.0) / _SQRT_PI * math.exp(z * z)
    # Tolerance applies to the returned value, so the inner integral is
    # integrated to abs_tol / scale (the roundoff floor in adaptive_quad
    # bounds what is achievable when scale is large).
    inner_cfg = replace(cfg, abs_tol=cfg.abs_tol / scale)
    upper = cfg.tail_cutoff
    if v < 0.0:
        power = 1.0 / (v + 1.0)
        split = min(1.0, upper)
        head = adaptive_quad(
            lambda w: g(w**power), 0.0, split ** (v + 1.0), inner_cfg
        ) / (v + 1.0)
        tail = 0.0
        if upper > 1.0:
            tail = adaptive_quad(lambda u: u**v * g(u), 1.0, upper, inner_cfg)
        return scale * (head + tail)
    return scale * adaptive_quad(lambda u: u**v * g(u), 0.0, upper, inner_cfg)
