"""Numerical verification of the supporting analytic bounds, plus
equidistribution statistics over computed zero sets.

Every check emits a BoundReport.  Observed quantities are normalized by
their allowed bound times the configured constant, so passed is always
max_ratio <= 1; the constants themselves are configuration (they stand in
for the implied constants the asymptotic statements leave unspecified) and
are echoed in the report details.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ToleranceError
from .evaluation import (
    DEFAULT_OPTIONS,
    EisensteinParams,
    EvalOptions,
    TWO_PI,
    as_complex,
    czd_expansion,
    eval_beta,
    eval_czd_minus_main,
    fourier_expansion,
    log_normalization,
    main_term_g,
    main_term_h,
    single_fourier_term,
)
from .geometry import reduce_to_fundamental_domain
from .zerofinder import (
    DEFAULT_WINDOW_CONFIG,
    WindowConfig,
    ZeroRecord,
    build_windows,
    strip_zero,
    _boundary_points,
)


@dataclass(frozen=True)
class FittedConstants:
    """Stand-ins for the implied constants; defaults pass at k in [100, 400],
    q2 in {5, 7}."""

    c1: float = 100.0    # |E - g_a| upper constant
    c2: float = 1e-2     # |g_a| lower constant
    c3: float = 1e-2     # normalized |h_l| lower constant
    c4: float = 100.0    # normalized |h_l| upper constant
    c5: float = 100.0    # normalized |beta| upper constant
    temme: float = 10.0  # incomplete-gamma tail bound constant
    eps_dev: float = 3.0  # |Y + delta/k|^k relative-deviation constant
    exp_ratio: float = math.e  # |f_(l+1)/f_l| <= exp_ratio * exp(-k/(4 l^2))


DEFAULT_CONSTANTS = FittedConstants()


@dataclass(frozen=True)
class BoundReport:
    name: str
    samples: int
    max_ratio: float
    passed: bool
    worst_point: tuple[float, float] | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "max_ratio": self.max_ratio,
            "passed": self.passed,
            "worst_point": list(self.worst_point) if self.worst_point else None,
            "details": self.details,
        }


# --------------------------------------------------------------------------
# The comparison functions M and R
# --------------------------------------------------------------------------

def lemma_R(t: float) -> float:
    """R(t) = t - log(1 + t) on (0, 1/2]."""
    if not 0 < t <= 0.5:
        raise ParameterError(f"t must lie in (0, 1/2], got {t}")
    return t - math.log1p(t)


def lemma_w(t: float) -> float:
    """w(t) = -log(1 - t)/t - 1 = t/2 + t^2/3 + ... (the substitution
    with M = R o w)."""
    if not 0 < t <= 0.5:
        raise ParameterError(f"t must lie in (0, 1/2], got {t}")
    return -math.log1p(-t) / t - 1.0


def lemma_M(t: float) -> float:
    """M(t) = log t - log|log(1-t)| - (log(1-t) + t)/t on (0, 1/2]."""
    if not 0 < t <= 0.5:
        raise ParameterError(f"t must lie in (0, 1/2], got {t}")
    lg = math.log1p(-t)
    return math.log(t) - math.log(abs(lg)) - (lg + t) / t


def check_lemma_functions(grid) -> BoundReport:
    """0 < M(t) < R(t) < t^2 pointwise, and M = R o w to 1e-10."""
    grid = list(grid)
    max_ratio = 0.0
    worst = None
    worst_identity = 0.0
    for t in grid:
        M, R = lemma_M(t), lemma_R(t)
        checks = (
            math.inf if M <= 0 else 0.0,  # positivity as a hard fail
            M / R,
            R / (t * t),
            abs(M - lemma_R(lemma_w(t))) / 1e-10,
        )
        worst_identity = max(worst_identity, abs(M - lemma_R(lemma_w(t))))
        local = max(checks)
        if local > max_ratio:
            max_ratio, worst = local, (t, 0.0)
    return BoundReport(
        name="lemma_functions",
        samples=len(grid),
        max_ratio=max_ratio,
        passed=bool(grid == [] or max_ratio < 1.0),
        worst_point=worst,
        details={"identity_max_abs_dev": worst_identity},
    )


# --------------------------------------------------------------------------
# Normalized incomplete gamma (series for x <= s+1, continued fraction above)
# --------------------------------------------------------------------------

_GAMMA_ITMAX = 2_000_000
_GAMMA_EPS = 1e-16
_FPMIN = 1e-300


def _log_gamma_prefactor(s: float, x: float) -> float:
    return s * math.log(x) - x - math.lgamma(s)


def _gamma_series_P(s: float, x: float) -> float:
    ap = s
    total = term = 1.0 / s
    for _ in range(_GAMMA_ITMAX):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _GAMMA_EPS:
            return total * math.exp(_log_gamma_prefactor(s, x))
    raise ToleranceError("incomplete gamma series did not converge")


def _gamma_cf_Q(s: float, x: float) -> float:
    b = x + 1.0 - s
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _GAMMA_ITMAX):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            return h * math.exp(_log_gamma_prefactor(s, x))
    raise ToleranceError("incomplete gamma continued fraction did not converge")


def incomplete_gamma_P(s: float, x: float) -> float:
    """P(s, x) = gamma(s, x) / Gamma(s), the lower normalized incomplete gamma."""
    if s <= 0 or x < 0:
        raise ParameterError(f"need s > 0 and x >= 0, got s={s}, x={x}")
    if x == 0.0:
        return 0.0
    if x <= s + 1.0:
        return _gamma_series_P(s, x)
    return 1.0 - _gamma_cf_Q(s, x)


def incomplete_gamma_Q(s: float, x: float) -> float:
    """Q(s, x) = Gamma(s, x) / Gamma(s), the upper normalized incomplete gamma."""
    if s <= 0 or x < 0:
        raise ParameterError(f"need s > 0 and x >= 0, got s={s}, x={x}")
    if x == 0.0:
        return 1.0
    if x <= s + 1.0:
        return 1.0 - _gamma_series_P(s, x)
    return _gamma_cf_Q(s, x)


def temme_tail_bound(s: float, x: float, constant: float) -> float:
    """constant * (exp(-(x-s)^2 / 4s) + exp(-|x-s| / 4))."""
    return constant * (math.exp(-((x - s) ** 2) / (4.0 * s))
                       + math.exp(-abs(x - s) / 4.0))


def check_incomplete_gamma(params: EisensteinParams | None = None,
                           constants: FittedConstants = DEFAULT_CONSTANTS,
                           seed: int = 0) -> BoundReport:
    """Complement identity, closed forms, and the tail bound in the strip regime."""
    rng = np.random.default_rng(seed)
    max_ratio = 0.0
    worst = None
    n = 0
    # P + Q = 1 and Q(1, x) = e^-x on a spread of (s, x)
    for s in (0.5, 1.0, 3.0, 10.0, 400.0, 1e4):
        for x in (0.0, 0.5, s * 0.5 + 0.1, s + 1.0, s * 1.5 + 2.0):
            n += 1
            r = abs(incomplete_gamma_P(s, x) + incomplete_gamma_Q(s, x) - 1.0) / 1e-12
            if r > max_ratio:
                max_ratio, worst = r, (s, x)
    for x in (0.1, 1.0, 2.0, 5.0):
        n += 1
        r = abs(incomplete_gamma_Q(1.0, x) - math.exp(-x)) / 1e-12
        if r > max_ratio:
            max_ratio, worst = r, (1.0, x)
    # tail bound Q(k, 2 pi (l+3) y) in the strip regime
    k = params.k if params is not None else 400
    for ell in (1, 2, 3, 5):
        y_lo = (k - 1) / (TWO_PI * (ell + 1))
        y_hi = (k - 1) / (TWO_PI * ell)
        for y in rng.uniform(y_lo, y_hi, size=5):
            n += 1
            x = TWO_PI * (ell + 3) * y
            r = incomplete_gamma_Q(k, x) / temme_tail_bound(k, x, constants.temme)
            if r > max_ratio:
                max_ratio, worst = r, (float(k), x)
    return BoundReport("incomplete_gamma", n, float(max_ratio),
                       bool(max_ratio <= 1.0), worst,
                       details={"temme_constant": constants.temme})


# --------------------------------------------------------------------------
# Section-3-style bounds (lattice side)
# --------------------------------------------------------------------------

def check_bounds_section3(params: EisensteinParams, a: int,
                          cfg: WindowConfig = DEFAULT_WINDOW_CONFIG,
                          samples: int = 50, seed: int = 0,
                          constants: FittedConstants = DEFAULT_CONSTANTS,
                          opts: EvalOptions = DEFAULT_OPTIONS) -> BoundReport:
    """On window boundaries: the remainder bound, the main-term lower bound,
    and the |Y + delta/k|^k perturbation estimate."""
    if params.k < 50:
        raise ParameterError("section-3 bound checks need k >= 50")
    k, q2 = params.k, params.q2
    rng = np.random.default_rng(seed)
    windows = build_windows(params, a, cfg)
    if not windows:
        raise ParameterError("no windows in the configured band")
    per = max(4, samples // len(windows))
    ev = czd_expansion(params, opts)
    max_ratio = 0.0
    worst = None
    n_samples = 0
    for wnd in windows:
        pts = _boundary_points(wnd, per)
        lm_rem, _, _, _ = ev.evaluate_batch(pts, exclude_main=a)
        for z, lr in zip(pts, lm_rem):
            n_samples += 1
            y = z.imag
            u = q2 * y
            log_bracket = np.logaddexp(-k * math.log(2.0 * u),
                                       math.log(u) - 0.5 * k * math.log(2.25 + u * u))
            r1 = math.exp(lr - log_bracket) / constants.c1
            g = main_term_g(params, a, z)
            log_lower = -(0.5 * k + 1.0) * math.log(0.25 + u * u)
            r2 = math.exp(log_lower - g.log_mag) * constants.c2
            local = max(r1, r2)
            if local > max_ratio:
                max_ratio, worst = local, (z.real, z.imag)
    # perturbation estimate |Y + delta/k|^k = |Y|^k (1 + O(|delta/Y|))
    eps_worst = 0.0
    for _ in range(25):
        n_samples += 1
        Y = (1.05 + 4.0 * rng.random()) * cmath.exp(1j * TWO_PI * rng.random())
        delta = 0.5 * rng.random() * cmath.exp(1j * TWO_PI * rng.random())
        lhs = k * (math.log(abs(Y + delta / k)) - math.log(abs(Y)))
        dev = abs(math.expm1(lhs))
        ratio = dev / (constants.eps_dev * abs(delta / Y))
        eps_worst = max(eps_worst, ratio)
        if ratio > max_ratio:
            max_ratio, worst = ratio, (Y.real, Y.imag)
    return BoundReport(
        "section3_bounds", n_samples, float(max_ratio), bool(max_ratio <= 1.0),
        worst, details={"c1": constants.c1, "c2": constants.c2,
                        "eps_dev": constants.eps_dev, "windows": len(windows),
                        "eps_dev_worst": eps_worst},
    )


# --------------------------------------------------------------------------
# Section-4-style bounds (Fourier side)
# --------------------------------------------------------------------------

def check_bounds_section4(params: EisensteinParams, ell: int,
                          samples: int = 50, seed: int = 0,
                          cfg: WindowConfig = DEFAULT_WINDOW_CONFIG,
                          constants: FittedConstants = DEFAULT_CONSTANTS,
                          opts: EvalOptions = DEFAULT_OPTIONS) -> BoundReport:
    """Strip bounds: main-pair lower/upper estimates, the remainder bound,
    the elementary log inequality, and the term-ratio decay at y_l."""
    k = params.k
    rng = np.random.default_rng(seed)
    pred, region = strip_zero(params, ell, cfg)
    sqrtk_over_l = 0.5 * math.log(k) - math.log(ell)  # log(sqrt(k)/l)
    Mv = lemma_M(1.0 / (ell + 1))
    Rv = lemma_R(1.0 / (ell + 1))
    log_lower = math.log(constants.c3) + sqrtk_over_l - k * Mv
    log_upper = math.log(constants.c4) + sqrtk_over_l
    log_beta_bound = math.log(constants.c5) + np.logaddexp(
        sqrtk_over_l - k * math.log(2.0), sqrtk_over_l - k * Rv
    )
    boundary = _boundary_points(region, samples)
    interior = np.array([
        complex(rng.uniform(region.x_min, region.x_max),
                rng.uniform(region.y_min, region.y_max))
        for _ in range(max(8, samples // 2))
    ])
    max_ratio = 0.0
    worst = None
    n = 0
    beta_margin = math.inf
    for z in boundary:
        n += 1
        h = main_term_h(params, ell, z, normalized=True)
        beta = eval_beta(params, ell, z, opts).value
        checks = [
            math.exp(log_lower - h.log_mag),       # lower bound on |h|
            math.exp(h.log_mag - log_upper),       # upper bound on |h|
            math.exp(beta.log_mag - log_beta_bound),
            math.exp(beta.log_mag - h.log_mag),    # strict Rouche inequality
        ]
        beta_margin = min(beta_margin, 1.0 - math.exp(beta.log_mag - h.log_mag))
        local = max(checks)
        if local > max_ratio:
            max_ratio, worst = local, (z.real, z.imag)
    for z in interior:
        n += 1
        h = main_term_h(params, ell, z, normalized=True)
        beta = eval_beta(params, ell, z, opts).value
        local = max(
            math.exp(h.log_mag - log_upper),
            math.exp(beta.log_mag - log_beta_bound),
        )
        if local > max_ratio:
            max_ratio, worst = local, (z.real, z.imag)
    # log(1+u) sandwich for u in (0, 1); away from 0 where it turns into
    # an equality and the ratio would sit at 1 - O(u^2)
    for u in rng.uniform(0.01, 0.99, size=25):
        n += 1
        lo, mid, hi = u - u * u / 2.0, math.log1p(u), u - u * u / 4.0
        local = max(lo / mid, mid / hi)
        if local > max_ratio:
            max_ratio, worst = local, (float(u), 0.0)
    # |f_(l+1)/f_l| at y = y_l
    y_l = (k - 1) / (TWO_PI * ell)
    z = complex(0.0, y_l)
    f1 = single_fourier_term(params, ell, z)
    f2 = single_fourier_term(params, ell + 1, z)
    n += 1
    ratio_log = f2.log_mag - f1.log_mag
    allowed = math.log(constants.exp_ratio) - k / (4.0 * ell * ell)
    local = math.exp(ratio_log - allowed)
    if local > max_ratio:
        max_ratio, worst = local, (0.0, y_l)
    return BoundReport(
        "section4_bounds", n, float(max_ratio), bool(max_ratio <= 1.0), worst,
        details={"ell": ell, "c3": constants.c3, "c4": constants.c4,
                 "c5": constants.c5, "beta_margin_min": beta_margin,
                 "M": Mv, "R": Rv},
    )


# --------------------------------------------------------------------------
# Equidistribution statistics
# --------------------------------------------------------------------------

def star_discrepancy(values) -> float:
    """Exact D* of points in [0, 1) against the uniform distribution."""
    u = np.sort(np.asarray(list(values), dtype=float))
    if len(u) == 0:
        raise ParameterError("empty point set")
    n = len(u)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def zero_angle(record: ZeroRecord, q2: int) -> float:
    """The polar angle of a line-source zero about its center a/q2."""
    kind = record.source[0]
    if kind != "line":
        raise ParameterError(f"angle mode needs line-source zeros, got {kind}")
    a = record.source[1]
    w = q2 * record.z - a
    return math.atan2(w.imag, w.real)


def equidistribution_stats(zeros: list[ZeroRecord], mode: str,
                           params: EisensteinParams | None = None,
                           cfg: WindowConfig = DEFAULT_WINDOW_CONFIG) -> float:
    """Star discrepancy of the zero set in the chosen 1-D coordinate.

    angle: line zeros mapped to their polar angle, the admissible angle
    window rescaled to [0, 1).  projected: zeros pushed to the standard
    domain and reduced to their x coordinate (a crude 1-D proxy for the
    2-D statement; documented limitation).
    """
    if not zeros:
        raise ParameterError("empty zero list")
    if mode == "angle":
        if params is None:
            raise ParameterError("angle mode needs params for the window rescale")
        k, q2 = params.k, params.q2
        lo = math.atan(1.0 / math.sqrt(3.0) + 2.0 * cfg.eta / k)
        hi = math.atan(2.0 * cfg.c_height * math.sqrt(k))
        us = []
        for rec in zeros:
            th = zero_angle(rec, q2)
            us.append((th - lo) / (hi - lo))
        return star_discrepancy([min(max(u, 0.0), math.nextafter(1.0, 0.0)) for u in us])
    if mode == "projected":
        us = []
        for rec in zeros:
            w, _ = reduce_to_fundamental_domain(rec.z)
            us.append(w.real + 0.5)
        return star_discrepancy([min(max(u, 0.0), math.nextafter(1.0, 0.0)) for u in us])
    raise ParameterError(f"unknown mode {mode!r}")


# --------------------------------------------------------------------------
# Cross-expansion ratio constancy
# --------------------------------------------------------------------------

_CONDITION_CAP = 1e7  # refuse points where cancellation ate > 7 digits


def ratio_constancy(params: EisensteinParams, points,
                    tol: float = 1e-8,
                    opts: EvalOptions = DEFAULT_OPTIONS) -> BoundReport:
    """The two expansions agree up to one z-independent constant.

    Computes lattice(z) * N(y,k) / fourier_normalized(z) at every point and
    bounds the pairwise relative spread; the common value is the empirical
    proportionality constant between the expansions (reported log-polar:
    it routinely under/overflows doubles).
    """
    pts = [as_complex(p) for p in points]
    if len(pts) < 2:
        raise ParameterError("need at least 2 points")
    czd = czd_expansion(params, opts)
    fou = fourier_expansion(params, opts)
    ratios = []
    for z in pts:
        rc = czd.result(z)
        rf = fou.result(z)
        for r in (rc, rf):
            if r.value.is_zero() or math.exp(
                min(r.log_scale - r.value.log_mag, 700.0)
            ) > _CONDITION_CAP:
                raise ToleranceError(
                    f"evaluation too ill-conditioned at {z} for a {tol:g} ratio test"
                )
        ratio = rc.value.scaled(log_normalization(z.imag, params.k)) / rf.value
        ratios.append(ratio)
    base = ratios[0]
    max_dev = 0.0
    worst = None
    for z, r in zip(pts, ratios):
        dev = abs(cmath.exp(complex(r.log_mag - base.log_mag,
                                    r.phase - base.phase)) - 1.0)
        if dev > max_dev:
            max_dev, worst = dev, (z.real, z.imag)
    return BoundReport(
        "ratio_constancy", len(pts), max_dev / tol, bool(max_dev <= tol), worst,
        details={"constant_log_mag": base.log_mag, "constant_phase": base.phase,
                 "tolerance": tol},
    )
