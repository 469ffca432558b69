"""Zero prediction, certification, and refinement.

The closed forms give predicted zero locations (line zeros from the
two-term lattice main term, strip zeros from the two-term Fourier main
term); rectangles around them are certified by the argument principle
(total boundary phase change / 2 pi, with adaptive edge sampling), and the
locations are polished by Newton iteration on the matching expansion.
scan_zeros is the theory-free engine: recursive subdivision by winding
count, used both as a brute-force survey and as the independent oracle for
the predicted locations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple

import numpy as np

from . import characters as chars
from .errors import (
    BoundaryZeroError,
    CertificationError,
    NewtonError,
    ParameterError,
    ScanError,
    WindingError,
)
from .evaluation import (
    DEFAULT_OPTIONS,
    EisensteinParams,
    EvalOptions,
    TWO_PI,
    as_complex,
    czd_expansion,
    fourier_expansion,
)

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class WindowConfig:
    """Free constants of the window construction.

    eta pads the bottom of the admissible band (the theory needs it "large
    enough"), eps_width is the half-width parameter of the thin vertical
    strip (full width 2*eps_width/k / q2), c_height caps the band at
    c_height*sqrt(k)/q2, and strip_ell_ratio bounds the Fourier strip index
    by l <= strip_ell_ratio*sqrt(k).  Defaults are engineering choices that
    make the k >= 100 certifications pass with margin.
    """

    eta: float = 20.0
    eps_width: float = 0.1
    c_height: float = 0.3
    strip_ell_ratio: float = 0.3

    def __post_init__(self):
        if min(self.eta, self.eps_width, self.c_height, self.strip_ell_ratio) < 0:
            raise ParameterError("window constants must be nonnegative")

    def y_band(self, q2: int, k: int) -> tuple[float, float]:
        """The theory-covered band of heights for line windows."""
        lo = 1.0 / (2.0 * SQRT3 * q2) + self.eta / (q2 * k)
        hi = self.c_height * math.sqrt(k) / q2
        return lo, hi


DEFAULT_WINDOW_CONFIG = WindowConfig()


@dataclass(frozen=True)
class RectRegion:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    label: tuple = ("custom",)

    def __post_init__(self):
        if not (self.x_min < self.x_max and 0 < self.y_min < self.y_max):
            raise ParameterError(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains(self, z, pad: float = 0.0) -> bool:
        z = complex(z)
        return (self.x_min - pad <= z.real <= self.x_max + pad
                and self.y_min - pad <= z.imag <= self.y_max + pad)

    def shifted(self, dx: float = 0.0, dy: float = 0.0) -> "RectRegion":
        return RectRegion(self.x_min + dx, self.x_max + dx,
                          self.y_min + dy, self.y_max + dy, self.label)

    def bounds(self) -> list[float]:
        return [self.x_min, self.x_max, self.y_min, self.y_max]


@dataclass(frozen=True)
class PredictedZero:
    x: float
    y: float
    theta: float | None
    source: tuple  # ("line", a, b, n) or ("strip", l)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class ZeroRecord:
    x: float
    y: float
    winding: int
    residual: float
    source: tuple
    region: RectRegion | None = None
    seed: PredictedZero | None = None
    iterations: int = 0

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "winding": self.winding,
            "residual": self.residual,
            "source": list(self.source),
            "region": self.region.bounds() if self.region else None,
        }


class NewtonRefinement(NamedTuple):
    location: complex
    residual: float
    iterations: int


# --------------------------------------------------------------------------
# Predicted zeros and windows (lattice side)
# --------------------------------------------------------------------------

def _gap_width_ok(a: int, b: int, q2: int) -> bool:
    if b < 1 or gcd(a, q2) != 1 or gcd(a + b, q2) != 1:
        return False
    return all(gcd(a + t, q2) > 1 for t in range(1, b))


def _target_phase_fraction(params: EisensteinParams, a: int, b: int) -> Fraction:
    """Phase fraction of w = -(-1)^k chi2(a) conj(chi2(a+b)): zero angles of
    the two-term main sum on the midline solve exp(2 i k theta) = w."""
    t_a = chars.value_phase(params.chi2, a)
    t_ab = chars.value_phase(params.chi2, a + b)
    return (Fraction(1, 2) + Fraction(params.k, 2) + t_a - t_ab) % 1


def gap_line_zeros(params: EisensteinParams, a: int, b: int,
                   cfg: WindowConfig = DEFAULT_WINDOW_CONFIG) -> list[PredictedZero]:
    """Predicted zeros on the midline x = (a + b/2)/q2 of a coprimality gap.

    b = 1 is the generic two-neighbor case; b > 1 covers runs of non-units
    between a and a+b (for example the imaginary axis via a = -1, b = 2).
    Angles measured from the ray out of a/q2 satisfy
    exp(2 i k theta) = -(-1)^k chi2(a) conj(chi2(a+b)), with q2 z - a =
    b/2 + i q2 y, and are kept when the height lands in the configured band.
    """
    q2, k = params.q2, params.k
    if not _gap_width_ok(a, b, q2):
        raise ParameterError(
            f"need gcd(a,q2)=gcd(a+b,q2)=1 and a+t non-unit for 0<t<b; "
            f"got a={a}, b={b}, q2={q2}"
        )
    w_frac = _target_phase_fraction(params, a, b)
    y_lo, y_hi = cfg.y_band(q2, k)
    out = []
    n = 0
    for j in range(0, k + 1):
        theta = math.pi * (float(w_frac) + j) / k
        if theta >= 0.5 * math.pi:
            break
        y = b * math.tan(theta) / (2.0 * q2)
        if y <= y_lo:
            continue
        if y >= y_hi:
            break
        n += 1
        out.append(PredictedZero(
            x=(a + b / 2.0) / q2, y=y, theta=theta, source=("line", a, b, n)
        ))
    return out


def predicted_line_zeros(params: EisensteinParams, a: int,
                         cfg: WindowConfig = DEFAULT_WINDOW_CONFIG) -> list[PredictedZero]:
    """Zero angles of the main term g_a on the line x = (a + 1/2)/q2."""
    return gap_line_zeros(params, a, 1, cfg)


def window_base_angle(params: EisensteinParams, a: int,
                      cfg: WindowConfig = DEFAULT_WINDOW_CONFIG) -> tuple[float, int]:
    """(theta_1, m): the lowest admissible window edge angle and the count
    of angle steps before the band cap.

    theta_1 is the smallest positive solution of
    exp(2 i k theta) = +(-1)^k chi2(a) conj(chi2(a+1)) (the antipode of the
    zero condition, where the two main terms reinforce) with
    tan(theta) > 1/sqrt(3) + 2 eta / k; m is the largest integer with
    tan(theta_1 + m pi / k) < 2 c sqrt(k).
    """
    q2, k = params.q2, params.k
    anti_frac = (_target_phase_fraction(params, a, 1) + Fraction(1, 2)) % 1
    tan_lo = 1.0 / SQRT3 + 2.0 * cfg.eta / k
    theta_lo = math.atan(tan_lo)
    theta_hi = math.atan(2.0 * cfg.c_height * math.sqrt(k))
    step = math.pi / k
    j = max(0, int(math.floor((theta_lo * k / math.pi) - float(anti_frac))))
    while math.pi * (float(anti_frac) + j) / k <= theta_lo:
        j += 1
    theta1 = math.pi * (float(anti_frac) + j) / k
    if theta1 >= theta_hi:
        return theta1, 0
    m = int(math.floor((theta_hi - theta1) / step))
    while m > 0 and math.tan(theta1 + m * step) >= 2.0 * cfg.c_height * math.sqrt(k):
        m -= 1
    return theta1, m


def build_windows(params: EisensteinParams, a: int,
                  cfg: WindowConfig = DEFAULT_WINDOW_CONFIG) -> list[RectRegion]:
    """The certification rectangles W_1 .. W_(m-1) around x = (a + 1/2)/q2.

    W_n spans heights [tan(theta_n), tan(theta_(n+1))]/(2 q2) between
    consecutive reinforcement angles, so it contains exactly one main-term
    zero, at the midpoint angle theta_n + pi/(2k).
    """
    q2, k = params.q2, params.k
    if gcd(a, q2) != 1 or gcd(a + 1, q2) != 1:
        raise ParameterError(f"need gcd(a,q2)=gcd(a+1,q2)=1, got a={a}, q2={q2}")
    theta1, m = window_base_angle(params, a, cfg)
    x_mid = (a + 0.5) / q2
    half_w = cfg.eps_width / (k * q2)
    step = math.pi / k
    out = []
    for n in range(1, m):
        y_lo = math.tan(theta1 + (n - 1) * step) / (2.0 * q2)
        y_hi = math.tan(theta1 + n * step) / (2.0 * q2)
        out.append(RectRegion(x_mid - half_w, x_mid + half_w, y_lo, y_hi,
                              label=("Wn", a, n)))
    return out


def window_seed(params: EisensteinParams, window: RectRegion) -> PredictedZero:
    """The predicted zero inside a W_n window (midpoint angle)."""
    kind, a, n = window.label
    if kind != "Wn":
        raise ParameterError("window_seed expects a Wn-labelled rectangle")
    q2, k = params.q2, params.k
    y_mid_angle = 0.5 * (math.atan(2 * q2 * window.y_min) + math.atan(2 * q2 * window.y_max))
    y = math.tan(y_mid_angle) / (2.0 * q2)
    return PredictedZero(x=(a + 0.5) / q2, y=y, theta=y_mid_angle, source=("line", a, 1, n))


# --------------------------------------------------------------------------
# Strip (Fourier side) prediction
# --------------------------------------------------------------------------

def strip_heights(params: EisensteinParams, ell: int) -> tuple[float, float]:
    """(y_(l+1), y_l) with y_l = (k - 1)/(2 pi l)."""
    k = params.k
    return (k - 1) / (TWO_PI * (ell + 1)), (k - 1) / (TWO_PI * ell)


def strip_zero(params: EisensteinParams, ell: int,
               cfg: WindowConfig = DEFAULT_WINDOW_CONFIG) -> tuple[PredictedZero, RectRegion]:
    """Unique零 zero of the Fourier main pair h_l and its strip V_l.

    x0 in (-1/2, 1/2] solves e(x0) = -conj(chi2)(l) chi2(l+1) (exactly, via
    rational phases); y0 = -((k-1)/2pi) log(1 - 1/(l+1)).
    """
    q2, k = params.q2, params.k
    if ell < 1 or gcd(ell, q2) != 1 or gcd(ell + 1, q2) != 1:
        raise ParameterError(f"l and l+1 must be units mod q2, got l={ell}")
    if ell > cfg.strip_ell_ratio * math.sqrt(k):
        raise ParameterError(
            f"l={ell} exceeds strip_ell_ratio*sqrt(k) = {cfg.strip_ell_ratio * math.sqrt(k):.2f}"
        )
    t_l = chars.value_phase(params.chi2, ell)
    t_l1 = chars.value_phase(params.chi2, ell + 1)
    s = (Fraction(1, 2) - t_l + t_l1) % 1
    if s > Fraction(1, 2):
        s -= 1
    x0 = float(s)
    y0 = -(k - 1) / TWO_PI * math.log(1.0 - 1.0 / (ell + 1))
    y_bot, y_top = strip_heights(params, ell)
    region = RectRegion(x0 - 0.5, x0 + 0.5, y_bot, y_top, label=("Vl", ell))
    return PredictedZero(x=x0, y=y0, theta=None, source=("strip", ell)), region


# --------------------------------------------------------------------------
# Winding numbers
# --------------------------------------------------------------------------

def _wrap(dphi: np.ndarray) -> np.ndarray:
    return (dphi + math.pi) % TWO_PI - math.pi


def log_evaluator(f):
    """Adapt a plain complex-valued function to the (log_mag, phase) protocol."""
    def wrapped(zs):
        vals = np.asarray([f(z) for z in np.asarray(zs)], dtype=complex)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(vals)), np.angle(vals)
    return wrapped


def winding_number(f, rect: RectRegion, max_refine: int = 24,
                   initial_per_edge: int = 8, phase_speed: float | None = None) -> int:
    """Total boundary phase change of f around rect, divided by 2 pi.

    f maps an array of complex points to (log_mag, phase) arrays.  Edges
    are subdivided until consecutive phase differences are below pi/2; a
    -inf log magnitude or exhausted refinement reports a (possible)
    boundary zero instead of a count.

    phase_speed, when given, is an a priori bound on |d arg f / dz| along
    the boundary away from zeros; the initial sampling is made dense enough
    (4 samples per phase half-turn) that whole turns cannot alias away
    between samples.
    """
    corners = [
        complex(rect.x_min, rect.y_min),
        complex(rect.x_max, rect.y_min),
        complex(rect.x_max, rect.y_max),
        complex(rect.x_min, rect.y_max),
    ]
    edges = []
    for i in range(4):
        z0, z1 = corners[i], corners[(i + 1) % 4]
        n0 = initial_per_edge
        if phase_speed is not None:
            need = int(math.ceil(abs(z1 - z0) * phase_speed / (0.25 * math.pi)))
            n0 = min(max(n0, need), 8192)
        ts = [j / n0 for j in range(n0)]
        edges.append({"z0": z0, "z1": z1, "ts": ts, "ph": None})

    def positions(edge, ts):
        return [edge["z0"] + t * (edge["z1"] - edge["z0"]) for t in ts]

    # initial evaluation
    all_pts = [p for e in edges for p in positions(e, e["ts"])]
    lm, ph = f(np.asarray(all_pts, dtype=complex))
    if np.any(np.isneginf(lm)):
        raise BoundaryZeroError("exact zero on the contour")
    idx = 0
    for e in edges:
        n = len(e["ts"])
        e["ph"] = list(ph[idx:idx + n])
        idx += n

    for _ in range(max_refine):
        # walk the closed loop, collect offending gaps as (edge, t_lo, t_hi)
        loop_ph = [p for e in edges for p in e["ph"]]
        loop_ref = []  # (edge index, position within edge) aligned with loop_ph
        for ei, e in enumerate(edges):
            loop_ref.extend((ei, j) for j in range(len(e["ts"])))
        bad = []
        n = len(loop_ph)
        for i in range(n):
            d = _wrap(np.asarray([loop_ph[(i + 1) % n] - loop_ph[i]]))[0]
            if abs(d) >= 0.5 * math.pi:
                ei, j = loop_ref[i]
                t_lo = edges[ei]["ts"][j]
                t_hi = edges[ei]["ts"][j + 1] if j + 1 < len(edges[ei]["ts"]) else 1.0
                bad.append((ei, j, 0.5 * (t_lo + t_hi)))
        if not bad:
            break
        new_pts = [positions(edges[ei], [tm])[0] for ei, _, tm in bad]
        lm, ph = f(np.asarray(new_pts, dtype=complex))
        if np.any(np.isneginf(lm)):
            raise BoundaryZeroError("exact zero on the contour")
        # insert right-to-left so stored indices stay valid
        for (ei, j, tm), p in sorted(zip(bad, ph), key=lambda t: (t[0][0], -t[0][1])):
            edges[ei]["ts"].insert(j + 1, tm)
            edges[ei]["ph"].insert(j + 1, p)
    else:
        raise WindingError(
            "edge refinement exhausted; possible zero on or very near the boundary"
        )

    loop_ph = np.asarray([p for e in edges for p in e["ph"]])
    d = _wrap(np.diff(np.concatenate([loop_ph, loop_ph[:1]])))
    total = float(np.sum(d)) / TWO_PI
    w = round(total)
    if abs(total - w) > 0.25:
        raise WindingError(f"phase sum {total:.3f} not close to an integer")
    return int(w)


# --------------------------------------------------------------------------
# Newton refinement
# --------------------------------------------------------------------------

def default_expansion_name(params: EisensteinParams, y: float,
                           cfg: WindowConfig = DEFAULT_WINDOW_CONFIG) -> str:
    """Fourier above the strip family, lattice below (each regime's own tool)."""
    crossover = (params.k - 1) / (TWO_PI * (cfg.strip_ell_ratio * math.sqrt(params.k) + 2))
    return "fourier" if y > crossover else "czd"


def phase_speed_bound(params: EisensteinParams, y_min: float) -> float:
    """Bound on the boundary phase speed of either expansion away from zeros.

    The dominant lattice term rotates at k q2 / |q2 z - a| <= k / y; the
    dominant Fourier term at 2 pi n with n near k / (2 pi y).  Both are k/y.
    """
    return params.k / y_min


def _expansion_object(params, expansion, opts, y=None, cfg=DEFAULT_WINDOW_CONFIG):
    if expansion == "auto":
        expansion = default_expansion_name(params, y, cfg)
    if expansion == "czd":
        return czd_expansion(params, opts)
    if expansion == "fourier":
        return fourier_expansion(params, opts)
    raise ParameterError(f"unknown expansion {expansion!r}")


def _phase_opts(opts: EvalOptions) -> EvalOptions:
    """Winding consumes phases only; a 1e-9 tail is plenty and much cheaper."""
    tol = max(opts.tolerance, 1e-9)
    if tol == opts.tolerance:
        return opts
    return EvalOptions(tolerance=tol, max_terms=opts.max_terms,
                       czd_radius=opts.czd_radius)


def refine_newton(params: EisensteinParams, seed, expansion: str = "auto",
                  tol: float = 1e-12, max_iter: int = 40,
                  guard_radius: float | None = None,
                  opts: EvalOptions = DEFAULT_OPTIONS,
                  cfg: WindowConfig = DEFAULT_WINDOW_CONFIG) -> NewtonRefinement:
    """Newton iteration z <- z - E/E' until the scale-normalized |E| < tol.

    Guards: iterates must stay in the upper half plane and within
    guard_radius of the seed (default: ten seed heights).
    """
    z = as_complex(seed)
    ev = _expansion_object(params, expansion, opts, y=z.imag, cfg=cfg)
    if guard_radius is None:
        guard_radius = 10.0 * z.imag
    seed_z = z
    for it in range(max_iter + 1):
        res = ev.result(z)
        resid = res.residual
        if resid < tol:
            return NewtonRefinement(z, resid, it)
        if it == max_iter:
            break
        der = ev.result(z, deriv=True)
        if der.value.is_zero():
            raise NewtonError("zero derivative during refinement")
        step = (res.value / der.value).to_complex()
        z_new = z - step
        if not z_new.imag > 0:
            raise NewtonError("iterate left the upper half plane")
        if abs(z_new - seed_z) > guard_radius:
            raise NewtonError(
                f"iterate moved {abs(z_new - seed_z):.3g} from the seed "
                f"(guard {guard_radius:.3g})"
            )
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            z = z_new
            res = ev.result(z)
            if res.residual < tol:
                return NewtonRefinement(z, res.residual, it + 1)
            raise NewtonError(
                f"stagnated at residual {res.residual:.3g} (target {tol:.3g})"
            )
        z = z_new
    raise NewtonError(f"no convergence after {max_iter} iterations "
                      f"(residual {resid:.3g})")


# --------------------------------------------------------------------------
# Scanning (the independent oracle)
# --------------------------------------------------------------------------

_JITTER = 1e-9  # deterministic +x shift on suspected boundary zeros
_MAX_SCAN_DEPTH = 80


def scan_zeros(params: EisensteinParams, rect: RectRegion, expansion: str = "czd",
               cell_target: float = 0.01, opts: EvalOptions = DEFAULT_OPTIONS,
               newton_tol: float = 1e-12,
               cfg: WindowConfig = DEFAULT_WINDOW_CONFIG) -> list[ZeroRecord]:
    """Locate every zero in rect by recursive winding-number subdivision.

    Cells with winding 0 are dropped; cells with winding 1 and diameter
    below cell_target are handed to Newton.  A suspected boundary zero
    jitters the cell once by +1e-9 in x before giving up.
    """
    ev = _expansion_object(params, expansion, _phase_opts(opts),
                           y=rect.center.imag, cfg=cfg)
    speed = phase_speed_bound(params, rect.y_min)
    records: list[ZeroRecord] = []

    def winding_with_jitter(r: RectRegion) -> tuple[int, RectRegion]:
        try:
            return winding_number(ev.log_values, r, phase_speed=speed), r
        except WindingError:
            pass
        r2 = r.shifted(dx=_JITTER)
        try:
            return winding_number(ev.log_values, r2, phase_speed=speed), r2
        except WindingError as exc:
            raise ScanError(
                f"persistent boundary zero near cell {r.bounds()}"
            ) from exc

    def visit(r: RectRegion, depth: int):
        if depth > _MAX_SCAN_DEPTH:
            raise ScanError(f"subdivision depth exhausted at {r.bounds()}")
        w, r_used = winding_with_jitter(r)
        if w == 0:
            return
        if w == 1 and r_used.diameter <= cell_target:
            try:
                nr = refine_newton(
                    params, r_used.center, expansion=expansion, tol=newton_tol,
                    guard_radius=3.0 * r_used.diameter, opts=opts, cfg=cfg,
                )
            except NewtonError:
                if depth >= _MAX_SCAN_DEPTH:
                    raise
                nr = None  # seed too coarse; isolate further below
            if nr is not None:
                records.append(ZeroRecord(
                    x=nr.location.real, y=nr.location.imag, winding=w,
                    residual=nr.residual, source=("scan",), region=r_used,
                    iterations=nr.iterations,
                ))
                return
        # split slightly off-center: predicted zeros often sit exactly on
        # the midline of a structured region, and a cut through a zero is
        # beyond what the 1e-9 jitter can rescue
        frac = 33.0 / 64.0
        if r_used.width >= r_used.height:
            xm = r_used.x_min + frac * r_used.width
            kids = [
                RectRegion(r_used.x_min, xm, r_used.y_min, r_used.y_max, r_used.label),
                RectRegion(xm, r_used.x_max, r_used.y_min, r_used.y_max, r_used.label),
            ]
        else:
            ym = r_used.y_min + frac * r_used.height
            kids = [
                RectRegion(r_used.x_min, r_used.x_max, r_used.y_min, ym, r_used.label),
                RectRegion(r_used.x_min, r_used.x_max, ym, r_used.y_max, r_used.label),
            ]
        for kid in kids:
            visit(kid, depth + 1)

    visit(rect, 0)
    records.sort(key=lambda rec: (rec.y, rec.x))
    return records


# --------------------------------------------------------------------------
# Rouche margins and certification pipelines
# --------------------------------------------------------------------------

def _boundary_points(rect: RectRegion, samples: int) -> np.ndarray:
    per_edge = max(2, samples // 4)
    t = np.arange(per_edge) / per_edge
    return np.concatenate([
        rect.x_min + rect.width * t + 1j * rect.y_min,
        rect.x_max + 1j * (rect.y_min + rect.height * t),
        rect.x_max - rect.width * t + 1j * rect.y_max,
        rect.x_min + 1j * (rect.y_max - rect.height * t),
    ])


def rouche_margin(params: EisensteinParams, a: int, rect: RectRegion,
                  samples: int = 64, opts: EvalOptions = DEFAULT_OPTIONS) -> float:
    """min over boundary samples of (|g_a| - |E - g_a|) / |g_a|.

    Positive means the two-term main sum dominates the remainder on the
    boundary, so the rectangle's zero count transfers between them.  The
    remainder is assembled directly from the non-main lattice terms.
    """
    pts = _boundary_points(rect, samples)
    ev = czd_expansion(params, opts)
    lm_rem, _, _, _ = ev.evaluate_batch(pts, exclude_main=a)
    from .evaluation import main_term_g  # local import to keep module load light
    margins = np.empty(len(pts))
    for i, z in enumerate(pts):
        g = main_term_g(params, a, z)
        margins[i] = 1.0 - math.exp(min(lm_rem[i] - g.log_mag, 60.0))
    return float(np.min(margins))


def certify_line_zeros(params: EisensteinParams, a: int,
                       cfg: WindowConfig = DEFAULT_WINDOW_CONFIG,
                       opts: EvalOptions = DEFAULT_OPTIONS,
                       newton_tol: float = 1e-12) -> list[ZeroRecord]:
    """Winding-certify each window W_n and Newton-refine its zero."""
    ev = czd_expansion(params, _phase_opts(opts))
    records = []
    for window in build_windows(params, a, cfg):
        w = winding_number(ev.log_values, window,
                           phase_speed=phase_speed_bound(params, window.y_min))
        if w != 1:
            raise CertificationError(
                f"window {window.label} has winding {w}, expected 1"
            )
        seed = window_seed(params, window)
        nr = refine_newton(params, seed.z, expansion="czd", tol=newton_tol,
                           guard_radius=max(window.height, window.width),
                           opts=opts, cfg=cfg)
        records.append(ZeroRecord(
            x=nr.location.real, y=nr.location.imag, winding=w,
            residual=nr.residual, source=seed.source, region=window,
            seed=seed, iterations=nr.iterations,
        ))
    return records


def certify_strip_zero(params: EisensteinParams, ell: int,
                       cfg: WindowConfig = DEFAULT_WINDOW_CONFIG,
                       opts: EvalOptions = DEFAULT_OPTIONS,
                       newton_tol: float = 1e-12) -> ZeroRecord:
    """Winding-certify V_l and refine the predicted strip zero."""
    pred, region = strip_zero(params, ell, cfg)
    ev = fourier_expansion(params, _phase_opts(opts))
    w = winding_number(ev.log_values, region,
                       phase_speed=phase_speed_bound(params, region.y_min))
    if w != 1:
        raise CertificationError(f"strip {region.label} has winding {w}, expected 1")
    nr = refine_newton(params, pred.z, expansion="fourier", tol=newton_tol,
                       guard_radius=region.height, opts=opts, cfg=cfg)
    return ZeroRecord(
        x=nr.location.real, y=nr.location.imag, winding=w, residual=nr.residual,
        source=pred.source, region=region, seed=pred, iterations=nr.iterations,
    )


def admissible_line_offsets(q2: int) -> list[int]:
    """Residues a mod q2 with gcd(a, q2) = gcd(a+1, q2) = 1."""
    return [a for a in range(q2) if gcd(a, q2) == 1 and gcd(a + 1, q2) == 1]


def admissible_strip_indices(params: EisensteinParams,
                             cfg: WindowConfig = DEFAULT_WINDOW_CONFIG) -> list[int]:
    """Strip indices l <= strip_ell_ratio*sqrt(k) with l, l+1 units mod q2."""
    q2 = params.q2
    top = int(cfg.strip_ell_ratio * math.sqrt(params.k))
    return [l for l in range(1, top + 1)
            if gcd(l, q2) == 1 and gcd(l + 1, q2) == 1]
