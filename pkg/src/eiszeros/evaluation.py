"""Overflow-safe evaluation of newform Eisenstein series by two expansions.

Everything is computed in log-polar form (LogComplex): at weight k the raw
ingredients n^(k-1), (2*pi*y)^k / Gamma(k) and (c*q2*z + d)^(-k) overflow
doubles long before the weights of interest (k up to several hundred), but
their logarithms stay small.

Two independent expansions are provided:

  * the lattice sum over coprime (c, d)  -- accurate (and well conditioned)
    for small Im z, where a couple of lattice terms dominate;
  * the normalized Fourier series  N(y,k) * sum_n a_n e(nz)  with
    N(y,k) = (2*pi*y)^k / Gamma(k) -- accurate for Im z large.

Both truncate against rigorous tail bounds measured relative to the sum of
term magnitudes (the natural scale of the result), and both report that
scale so callers can form cancellation-aware residuals.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from math import gcd
from typing import NamedTuple

import numpy as np
from scipy.special import zeta as _riemann_zeta

from . import characters as chars
from .characters import DirichletCharacter
from .errors import ParameterError, ToleranceError

TWO_PI = 2.0 * math.pi
NEG_INF = float("-inf")

# Lattice truncation: radii double until the tail bound passes.
CZD_RADIUS_CAP = 4096
# The lattice table covers |x| <= _X_SPAN directly; beyond that the exact
# period-1 translation E(z+1) = E(z) is applied first.
_X_SPAN = 1.05


def _norm_phase(p: float) -> float:
    """Normalize a phase to (-pi, pi]."""
    r = math.remainder(p, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


class LogComplex:
    """A complex number as (log magnitude, phase); log_mag = -inf encodes 0.

    Multiplication adds logs and phases.  Addition factors out the larger
    log magnitude and sums the residuals as ordinary complex numbers, so
    sums of astronomically scaled terms stay exact up to rounding.
    """

    __slots__ = ("log_mag", "phase")

    def __init__(self, log_mag: float, phase: float = 0.0):
        if log_mag == NEG_INF or math.isnan(log_mag):
            self.log_mag = NEG_INF
            self.phase = 0.0
        else:
            self.log_mag = float(log_mag)
            self.phase = _norm_phase(phase)

    @staticmethod
    def zero() -> "LogComplex":
        return LogComplex(NEG_INF)

    @staticmethod
    def one() -> "LogComplex":
        return LogComplex(0.0)

    @staticmethod
    def from_complex(w: complex) -> "LogComplex":
        w = complex(w)
        if w == 0:
            return LogComplex.zero()
        return LogComplex(math.log(abs(w)), cmath.phase(w))

    def is_zero(self) -> bool:
        return self.log_mag == NEG_INF

    def to_complex(self) -> complex:
        """Ordinary complex value; overflows to inf, underflows to 0."""
        if self.is_zero():
            return 0j
        try:
            m = math.exp(self.log_mag)
        except OverflowError:
            m = math.inf
        return complex(m * math.cos(self.phase), m * math.sin(self.phase))

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero() or other.is_zero():
            return LogComplex.zero()
        return LogComplex(self.log_mag + other.log_mag, self.phase + other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        if other.is_zero():
            raise ZeroDivisionError("division by LogComplex zero")
        if self.is_zero():
            return LogComplex.zero()
        return LogComplex(self.log_mag - other.log_mag, self.phase - other.phase)

    def __neg__(self) -> "LogComplex":
        if self.is_zero():
            return self
        return LogComplex(self.log_mag, self.phase + math.pi)

    def __add__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        big, small = (self, other) if self.log_mag >= other.log_mag else (other, self)
        r = cmath.exp(1j * big.phase) + math.exp(
            min(small.log_mag - big.log_mag, 0.0)
        ) * cmath.exp(1j * small.phase)
        if r == 0:
            return LogComplex.zero()
        return LogComplex(big.log_mag + math.log(abs(r)), cmath.phase(r))

    def __sub__(self, other: "LogComplex") -> "LogComplex":
        return self + (-other)

    def conjugate(self) -> "LogComplex":
        return LogComplex(self.log_mag, -self.phase)

    def pow(self, k: float) -> "LogComplex":
        """Integer power exact; non-integer uses the principal phase branch."""
        if self.is_zero():
            return self
        return LogComplex(k * self.log_mag, k * self.phase)

    def scaled(self, log_factor: float) -> "LogComplex":
        if self.is_zero():
            return self
        return LogComplex(self.log_mag + log_factor, self.phase)

    def abs_value(self) -> float:
        """|value| as a float (may under/overflow; use log_mag when in doubt)."""
        if self.is_zero():
            return 0.0
        try:
            return math.exp(self.log_mag)
        except OverflowError:
            return math.inf

    def __repr__(self):
        return f"LogComplex(log_mag={self.log_mag!r}, phase={self.phase!r})"


def log_sum(terms) -> LogComplex:
    """Sum an iterable of LogComplex by factoring out the max log magnitude."""
    terms = list(terms)
    if not terms:
        return LogComplex.zero()
    m = max(t.log_mag for t in terms)
    if m == NEG_INF:
        return LogComplex.zero()
    acc = 0j
    for t in terms:
        if not t.is_zero():
            acc += math.exp(t.log_mag - m) * cmath.exp(1j * t.phase)
    if acc == 0:
        return LogComplex.zero()
    return LogComplex(m + math.log(abs(acc)), cmath.phase(acc))


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ParameterError(f"point not in the upper half plane: y={self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def as_complex(z) -> complex:
    """Accept HalfPlanePoint, complex, or (x, y) and return complex with y > 0."""
    if isinstance(z, HalfPlanePoint):
        return z.z
    if isinstance(z, (tuple, list)) and len(z) == 2:
        z = complex(z[0], z[1])
    z = complex(z)
    if not z.imag > 0:
        raise ParameterError(f"point not in the upper half plane: {z}")
    return z


@dataclass(frozen=True)
class EisensteinParams:
    """(chi1, chi2, k) with the parity and primitivity constraints enforced."""

    chi1: DirichletCharacter
    chi2: DirichletCharacter
    k: int

    def __post_init__(self):
        if self.q1 <= 1 or self.q2 <= 1:
            raise ParameterError("q1 and q2 must both exceed 1")
        if self.k < 3:
            raise ParameterError(f"weight k must be >= 3, got {self.k}")
        if not chars.is_primitive(self.chi1):
            raise ParameterError(f"chi1 mod {self.q1} is not primitive")
        if not chars.is_primitive(self.chi2):
            raise ParameterError(f"chi2 mod {self.q2} is not primitive")
        if chars.parity(self.chi1) * chars.parity(self.chi2) != (-1) ** self.k:
            raise ParameterError(
                "parity violation: chi1(-1)*chi2(-1) must equal (-1)^k"
            )

    @property
    def q1(self) -> int:
        return self.chi1.modulus

    @property
    def q2(self) -> int:
        return self.chi2.modulus

    @property
    def level(self) -> int:
        return self.q1 * self.q2


def params_from_indices(q1: int, chi1_index: int, q2: int, chi2_index: int, k: int) -> EisensteinParams:
    return EisensteinParams(
        chars.character_by_index(q1, chi1_index),
        chars.character_by_index(q2, chi2_index),
        k,
    )


@dataclass(frozen=True)
class EvalOptions:
    """tolerance is the target absolute error after dividing by the sum of
    term magnitudes (the scale against which residuals are measured)."""

    tolerance: float = 1e-12
    max_terms: int = 200_000
    czd_radius: int = 32

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ParameterError("tolerance must be positive")


DEFAULT_OPTIONS = EvalOptions()


class EvalResult(NamedTuple):
    value: LogComplex
    log_scale: float       # log of the sum of term magnitudes
    log_tail: float        # log of the rigorous bound on the dropped tail
    terms: int

    @property
    def residual(self) -> float:
        """|value| / scale: the cancellation-aware closeness to zero."""
        if self.value.is_zero():
            return 0.0
        return math.exp(min(self.value.log_mag - self.log_scale, 50.0))


def log_normalization(y: float, k: int) -> float:
    """log N(y, k) with N(y, k) = (2*pi*y)^k / Gamma(k)."""
    return k * math.log(TWO_PI * y) - math.lgamma(k)


# --------------------------------------------------------------------------
# Lattice ((c, d)) expansion
# --------------------------------------------------------------------------

# (chi1, chi2, T, S) -> (c*q2, d, character phase) term arrays, shared by
# every evaluator over the same characters.
_CZD_TABLES: dict = {}


class CzdExpansion:
    """Vectorized evaluator for the coprime lattice sum.

    The symmetry (c, d) -> (-c, -d) pairs terms equal in value, and c = 0
    contributes nothing for q1 > 1, so the half-lattice c >= 1 is summed
    without the global 1/2.  Truncation uses two radii: rows 1 <= c <= T,
    and for each row a d-window of half-width S around -c*q2*x (covering
    every |x| <= _X_SPAN).  The dropped terms obey

        |c q2 z + d| >= max(c*q2*y, |d + c*q2*x|),

    so rows past T are bounded by 2 (c q2 y)^-k + B_k (c q2 y)^(1-k) with
    B_k = sqrt(pi) Gamma((k-1)/2) / Gamma(k/2) (sum <= integral + twice the
    peak), and window tails by 2 (S-1)^(1-k)/(k-1) per row.  Each radius
    doubles independently until the combined bound clears
    tolerance * (sum of kept magnitudes).
    """

    def __init__(self, params: EisensteinParams, opts: EvalOptions = DEFAULT_OPTIONS):
        self.params = params
        self.opts = opts
        # unit phase lookups: phase of chi(r) or NaN on non-units
        self._ph1 = self._phase_lookup(params.chi1)
        self._ph2 = self._phase_lookup(params.chi2)
        self._log_Bk = (
            0.5 * math.log(math.pi)
            + math.lgamma((params.k - 1) / 2.0)
            - math.lgamma(params.k / 2.0)
        )

    @staticmethod
    def _phase_lookup(chi) -> np.ndarray:
        q = chi.modulus
        out = np.full(q, np.nan)
        for r in range(q):
            t = chars.value_phase(chi, r)
            if t is not None:
                out[r] = TWO_PI * float(t)
        return out

    def _table(self, T: int, S: int):
        key = (self.params.chi1, self.params.chi2, T, S)
        tab = _CZD_TABLES.get(key)
        if tab is not None:
            return tab
        q2 = self.params.q2
        q1 = self.params.q1
        cs, ds, phases = [], [], []
        for c in range(1, T + 1):
            p1 = self._ph1[c % q1]
            if math.isnan(p1):
                continue
            dmax = int(math.ceil(c * q2 * _X_SPAN)) + S
            d = np.arange(-dmax, dmax + 1)
            p2 = self._ph2[d % q2]
            keep = ~np.isnan(p2) & (np.gcd(c, d) == 1)
            d = d[keep]
            cs.append(np.full(len(d), float(c * q2)))
            ds.append(d.astype(float))
            phases.append(p1 + p2[keep])
        tab = (np.concatenate(cs), np.concatenate(ds), np.concatenate(phases))
        _CZD_TABLES[key] = tab
        return tab

    def _log_tail_rows(self, T: int, y: np.ndarray) -> np.ndarray:
        """Rows c > T, all d."""
        k = self.params.k
        h = self.params.q2 * y
        lg_a1 = math.log(2.0) - k * np.log(h) + (1 - k) * math.log(T) - math.log(k - 1)
        lg_a2 = (
            self._log_Bk
            - (k - 1) * np.log(h)
            + (2 - k) * math.log(T)
            - math.log(max(k - 2, 1))
        )
        return np.logaddexp(lg_a1, lg_a2)

    def _log_tail_window(self, T: int, S: int) -> float:
        """Rows c <= T, |d + c q2 x| > S."""
        k = self.params.k
        return math.log(2.0 * T / (k - 1)) + (1 - k) * math.log(S - 1)

    def _reduce_x(self, x: np.ndarray) -> np.ndarray:
        # E(z + 1) = E(z): shift far-out real parts into the covered span
        shift = np.where(np.abs(x) > _X_SPAN, np.round(x), 0.0)
        return x - shift

    def _raw(self, zs: np.ndarray, T: int, S: int, deriv: bool, exclude_main=None):
        """Per point: (log_mag, phase, log_scale) at truncation radii (T, S)."""
        k = self.params.k
        cq2, d, chph = self._table(T, S)
        if exclude_main is not None:
            a = exclude_main
            keep = ~((cq2 == self.params.q2) & ((d == -a) | (d == -a - 1)))
            cq2, d, chph = cq2[keep], d[keep], chph[keep]
        x = self._reduce_x(np.real(zs))
        y = np.imag(zs)
        lm_out = np.empty(len(zs))
        ph_out = np.empty(len(zs))
        ls_out = np.empty(len(zs))
        chunk = max(1, int(4e6 // max(len(d), 1)))
        for i0 in range(0, len(zs), chunk):
            xs = x[i0:i0 + chunk, None]
            ys = y[i0:i0 + chunk, None]
            u = cq2 * xs + d
            v = cq2 * ys
            lw = 0.5 * np.log(u * u + v * v)
            aw = np.arctan2(v, u)
            lm = -k * lw
            ph = chph - k * aw
            if deriv:
                lm = lm + np.log(k * cq2) - lw
                ph = ph + math.pi - aw
            m = np.max(lm, axis=1, keepdims=True)
            r = np.exp(lm - m)
            acc = np.sum(r * np.exp(1j * ph), axis=1)
            s_abs = np.sum(r, axis=1)
            mag = np.abs(acc)
            sl = i0 + np.arange(len(acc))
            with np.errstate(divide="ignore"):
                lm_out[sl] = m[:, 0] + np.log(mag)
            ph_out[sl] = np.angle(acc)
            ls_out[sl] = m[:, 0] + np.log(s_abs)
        return lm_out, ph_out, ls_out

    def evaluate_batch(self, zs, deriv: bool = False, exclude_main=None):
        """(log_mag, phase, log_scale, log_tail) arrays for points zs.

        Radii are chosen per point: a cheap pass at the base radii yields
        each point's magnitude scale, from which the point's own (T, S) fall
        out in closed form; points are then regrouped by radii and summed.
        """
        zs = np.asarray(zs, dtype=complex)
        ys = np.imag(zs)
        if zs.ndim != 1:
            zs = zs.ravel()
            ys = ys.ravel()
        if np.any(ys <= 0):
            raise ParameterError("all points must lie in the upper half plane")
        k = self.params.k
        T0 = S0 = self.opts.czd_radius
        log_tol = math.log(self.opts.tolerance)
        half = math.log(2.0)
        lg_deriv = math.log(k * max(self.params.q2, 1.0 / float(np.min(ys)))) \
            if deriv else 0.0
        lm, ph, ls = self._raw(zs, T0, S0, deriv, exclude_main)
        need = log_tol + ls
        lt_rows = self._log_tail_rows(T0, ys) + lg_deriv
        lt_wind = self._log_tail_window(T0, S0) + lg_deriv
        lt = np.logaddexp(lt_rows, lt_wind)
        bad = lt > need
        if not np.any(bad):
            return lm, ph, ls, lt
        groups: dict[tuple[int, int], list[int]] = {}
        for i in np.nonzero(bad)[0]:
            T = T0
            while (self._log_tail_rows(T, ys[i:i + 1])[0] + lg_deriv
                   > need[i] - half):
                if 2 * T > CZD_RADIUS_CAP:
                    raise ToleranceError(
                        f"lattice row tail stuck above tolerance at T={T}",
                        requested=self.opts.tolerance,
                    )
                T *= 2
            S = S0
            while self._log_tail_window(T, S) + lg_deriv > need[i] - half:
                if 2 * S > CZD_RADIUS_CAP:
                    raise ToleranceError(
                        f"lattice window tail stuck above tolerance at S={S}",
                        requested=self.opts.tolerance,
                    )
                S *= 2
            groups.setdefault((T, S), []).append(int(i))
        for (T, S), idx in sorted(groups.items()):
            sub = np.asarray(idx)
            lm2, ph2, ls2 = self._raw(zs[sub], T, S, deriv, exclude_main)
            lm[sub], ph[sub], ls[sub] = lm2, ph2, ls2
            lt[sub] = np.logaddexp(self._log_tail_rows(T, ys[sub]) + lg_deriv,
                                   self._log_tail_window(T, S) + lg_deriv)
        return lm, ph, ls, lt

    def log_values(self, zs):
        lm, ph, _, _ = self.evaluate_batch(zs)
        return lm, ph

    def result(self, z, deriv: bool = False, exclude_main=None) -> EvalResult:
        zc = as_complex(z)
        lm, ph, ls, lt = self.evaluate_batch([zc], deriv=deriv, exclude_main=exclude_main)
        return EvalResult(LogComplex(lm[0], ph[0]), float(ls[0]), float(lt[0]), 0)

    def value(self, z) -> LogComplex:
        return self.result(z).value

    def derivative(self, z) -> LogComplex:
        return self.result(z, deriv=True).value


# --------------------------------------------------------------------------
# Fourier expansion
# --------------------------------------------------------------------------

class FourierExpansion:
    """Vectorized evaluator for N(y,k) * sum_n a_n e(nz).

    Coefficients a_n = sum_{ab=n} chi1(a) conj(chi2)(b) b^(k-1) are cached
    as (log|a_n|, arg a_n) arrays and extended on demand.  Truncation: past
    the term peak near n = k/(2*pi*y) the crude majorant n^k e^(-2*pi*n*y)
    (|a_n| <= d(n) n^(k-1) <= n^k) decays geometrically with ratio
    r = ((n+1)/n)^k e^(-2*pi*y) < 1, giving the tail bound t_(n+1)/(1-r).
    """

    def __init__(self, params: EisensteinParams, opts: EvalOptions = DEFAULT_OPTIONS):
        self.params = params
        self.opts = opts
        self._lm = np.zeros(0)      # log|a_n|, index n-1
        self._ph = np.zeros(0)
        self._lm_sub = np.zeros(0)  # same for a_n minus its leading b=n divisor term
        self._ph_sub = np.zeros(0)

    def _coeff_pair(self, n: int) -> tuple[LogComplex, LogComplex]:
        p = self.params
        full, sub = [], []
        for b in range(1, n + 1):
            if n % b:
                continue
            a = n // b
            t1 = chars.value_phase(p.chi1, a)
            t2 = chars.value_phase(p.chi2, b)
            if t1 is None or t2 is None:
                continue
            term = LogComplex(
                (p.k - 1) * math.log(b), TWO_PI * float((t1 - t2) % 1)
            )
            full.append(term)
            if b != n:
                sub.append(term)
        return log_sum(full), log_sum(sub)

    def _ensure_coeffs(self, n_max: int):
        n0 = len(self._lm)
        if n_max <= n0:
            return
        lm, ph, lms, phs = [], [], [], []
        for n in range(n0 + 1, n_max + 1):
            c, csub = self._coeff_pair(n)
            lm.append(c.log_mag)
            ph.append(c.phase)
            lms.append(csub.log_mag)
            phs.append(csub.phase)
        self._lm = np.concatenate([self._lm, lm])
        self._ph = np.concatenate([self._ph, ph])
        self._lm_sub = np.concatenate([self._lm_sub, lms])
        self._ph_sub = np.concatenate([self._ph_sub, phs])

    def coefficient(self, n: int) -> LogComplex:
        if n < 1:
            raise ParameterError(f"Fourier index must be >= 1, got {n}")
        self._ensure_coeffs(n)
        return LogComplex(self._lm[n - 1], self._ph[n - 1])

    def _log_tail(self, n0: int, y: np.ndarray, log_norm: np.ndarray, deriv: bool):
        """Tail bound past term n0 (per point), using |a_n| <= n^k."""
        k = self.params.k
        n1 = n0 + 1
        extra = math.log(TWO_PI * n1) if deriv else 0.0
        log_t = log_norm + k * math.log(n1) - TWO_PI * n1 * y + extra
        log_r = k * math.log((n1 + 1) / n1) - TWO_PI * y
        if deriv:
            log_r = log_r + math.log((n1 + 1) / n1)
        with np.errstate(divide="ignore"):
            log_geom = np.where(
                log_r < -1e-12, -np.log1p(-np.exp(np.minimum(log_r, -1e-300))), np.inf
            )
        return log_t + log_geom

    def _n_needed(self, y_min: float) -> int:
        k = self.params.k
        return int(math.ceil(k / (TWO_PI * y_min))) + 8

    def evaluate_batch(self, zs, deriv: bool = False, beta_ell=None):
        """(log_mag, phase, log_scale, log_tail) for N(y,k)*F or its z-derivative.

        With beta_ell = l, evaluates the complement of the two main Fourier
        terms instead: every a_n except the leading (b = n) parts of n = l
        and n = l + 1.  Assembling the complement directly term by term
        keeps it accurate when it sits far below the main-term scale.
        """
        zs = np.asarray(zs, dtype=complex)
        x = np.real(zs)
        y = np.imag(zs)
        if np.any(y <= 0):
            raise ParameterError("all points must lie in the upper half plane")
        k = self.params.k
        log_tol = math.log(self.opts.tolerance)
        log_norm = k * np.log(TWO_PI * y) - math.lgamma(k)
        n_stop = self._n_needed(float(np.min(y)))
        while True:
            if n_stop > self.opts.max_terms:
                raise ToleranceError(
                    f"Fourier tail bound not met within max_terms={self.opts.max_terms}",
                    requested=self.opts.tolerance,
                )
            self._ensure_coeffs(n_stop)
            ns = np.arange(1, n_stop + 1, dtype=float)
            clm, cph = self._lm[:n_stop].copy(), self._ph[:n_stop].copy()
            if beta_ell is not None:
                ell = beta_ell
                clm[ell - 1] = self._lm_sub[ell - 1]
                cph[ell - 1] = self._ph_sub[ell - 1]
                clm[ell] = self._lm_sub[ell]
                cph[ell] = self._ph_sub[ell]
            lm = log_norm[:, None] + clm - TWO_PI * np.outer(y, ns)
            ph = cph + TWO_PI * np.outer(x, ns)
            if deriv:
                lm = lm + np.log(TWO_PI * ns)
                ph = ph + 0.5 * math.pi
            m = np.max(lm, axis=1)
            m = np.where(np.isfinite(m), m, 0.0)
            r = np.exp(lm - m[:, None])
            acc = np.sum(r * np.exp(1j * ph), axis=1)
            s_abs = np.sum(r, axis=1)
            with np.errstate(divide="ignore"):
                lm_out = m + np.log(np.abs(acc))
                ls_out = m + np.log(s_abs)
            lt = self._log_tail(n_stop, y, log_norm, deriv)
            if np.all(lt <= log_tol + ls_out):
                return lm_out, np.angle(acc), ls_out, lt
            n_stop = int(n_stop * 1.5) + 8

    def log_values(self, zs):
        lm, ph, _, _ = self.evaluate_batch(zs)
        return lm, ph

    def result(self, z, deriv: bool = False) -> EvalResult:
        zc = complex(as_complex(z))
        lm, ph, ls, lt = self.evaluate_batch([zc], deriv=deriv)
        return EvalResult(LogComplex(lm[0], ph[0]), float(ls[0]), float(lt[0]), 0)

    def value(self, z) -> LogComplex:
        return self.result(z).value

    def derivative(self, z) -> LogComplex:
        return self.result(z, deriv=True).value

    def beta_result(self, ell: int, z) -> EvalResult:
        zc = complex(as_complex(z))
        lm, ph, ls, lt = self.evaluate_batch([zc], beta_ell=ell)
        return EvalResult(LogComplex(lm[0], ph[0]), float(ls[0]), float(lt[0]), 0)


# --------------------------------------------------------------------------
# Cached expansion objects and the functional API
# --------------------------------------------------------------------------

_CZD_CACHE: dict = {}
_FOURIER_CACHE: dict = {}


def czd_expansion(params: EisensteinParams, opts: EvalOptions = DEFAULT_OPTIONS) -> CzdExpansion:
    key = (params, opts)
    if key not in _CZD_CACHE:
        _CZD_CACHE[key] = CzdExpansion(params, opts)
    return _CZD_CACHE[key]


def fourier_expansion(params: EisensteinParams, opts: EvalOptions = DEFAULT_OPTIONS) -> FourierExpansion:
    key = (params, opts)
    if key not in _FOURIER_CACHE:
        _FOURIER_CACHE[key] = FourierExpansion(params, opts)
    return _FOURIER_CACHE[key]


def eval_czd(params: EisensteinParams, z, opts: EvalOptions = DEFAULT_OPTIONS) -> LogComplex:
    """The lattice sum (1/2) sum_{(c,d)=1} chi1(c) chi2(d) (c q2 z + d)^(-k)."""
    return czd_expansion(params, opts).value(z)


def fourier_coefficient(params: EisensteinParams, n: int) -> LogComplex:
    """a_n = sum_{ab=n} chi1(a) conj(chi2)(b) b^(k-1), accumulated log-polar."""
    return fourier_expansion(params).coefficient(n)


def eval_fourier_normalized(params: EisensteinParams, z, opts: EvalOptions = DEFAULT_OPTIONS) -> LogComplex:
    """N(y,k) * sum_n a_n e(nz); same zero set as the series itself."""
    return fourier_expansion(params, opts).value(z)


def eval_derivative(params: EisensteinParams, z, opts: EvalOptions = DEFAULT_OPTIONS,
                    expansion: str = "czd") -> LogComplex:
    """d/dz of the chosen expansion (N(y,k) held constant for fourier:
    the zero set is unaffected, which is all Newton refinement needs)."""
    if expansion == "czd":
        return czd_expansion(params, opts).derivative(z)
    if expansion == "fourier":
        return fourier_expansion(params, opts).derivative(z)
    raise ParameterError(f"unknown expansion {expansion!r}")


def main_term_g(params: EisensteinParams, a: int, z) -> LogComplex:
    """g_a(z): the two dominant lattice terms near the line x = (a + 1/2)/q2."""
    q2 = params.q2
    if gcd(a, q2) != 1 or gcd(a + 1, q2) != 1:
        raise ParameterError(f"need gcd(a, q2) = gcd(a+1, q2) = 1, got a={a}, q2={q2}")
    return gap_main_term(params, a, 1, z)


def gap_main_term(params: EisensteinParams, a: int, b: int, z) -> LogComplex:
    """Two-term main sum chi2(-a)/(q2 z - a)^k + chi2(-a-b)/(q2 z - a - b)^k."""
    zc = as_complex(z)
    k, q2 = params.k, params.q2
    terms = []
    for off in (0, b):
        t = chars.value_phase(params.chi2, -(a + off))
        if t is None:
            raise ParameterError(f"chi2({-(a + off)}) = 0; endpoints must be units")
        w = q2 * zc - a - off
        terms.append(LogComplex(-k * math.log(abs(w)) , TWO_PI * float(t) - k * cmath.phase(w)))
    return log_sum(terms)


def single_fourier_term(params: EisensteinParams, n: int, z, normalized: bool = False) -> LogComplex:
    """f_n(z) = conj(chi2)(n) n^(k-1) e(nz), optionally times N(y,k)."""
    zc = as_complex(z)
    t = chars.value_phase(params.chi2, n)
    if t is None:
        return LogComplex.zero()
    k = params.k
    lm = (k - 1) * math.log(n) - TWO_PI * n * zc.imag
    if normalized:
        lm += log_normalization(zc.imag, k)
    return LogComplex(lm, -TWO_PI * float(t) + TWO_PI * n * zc.real)


def main_term_h(params: EisensteinParams, ell: int, z, normalized: bool = False) -> LogComplex:
    """h_l(z) = f_l(z) + f_(l+1)(z), the dominant Fourier pair in its strip."""
    q2 = params.q2
    if ell < 1 or gcd(ell, q2) != 1 or gcd(ell + 1, q2) != 1:
        raise ParameterError(
            f"need l >= 1 with gcd(l, q2) = gcd(l+1, q2) = 1, got l={ell}, q2={q2}"
        )
    return log_sum([
        single_fourier_term(params, ell, z, normalized),
        single_fourier_term(params, ell + 1, z, normalized),
    ])


def eval_czd_minus_main(params: EisensteinParams, a: int, z,
                        opts: EvalOptions = DEFAULT_OPTIONS) -> EvalResult:
    """E(z) - g_a(z) assembled directly from the non-main lattice terms.

    Subtracting two evaluations would hit the double-precision cancellation
    floor long before the true difference (which decays like (2 q2 y)^(-k)
    relative to the main term); omitting the two main entries from the sum
    avoids that entirely.
    """
    if gcd(a, params.q2) != 1 or gcd(a + 1, params.q2) != 1:
        raise ParameterError("a and a+1 must be units mod q2")
    return czd_expansion(params, opts).result(z, exclude_main=a)


def eval_beta(params: EisensteinParams, ell: int, z,
              opts: EvalOptions = DEFAULT_OPTIONS) -> EvalResult:
    """N(y,k) * (F(z) - h_l(z)), assembled directly (normalized remainder)."""
    if ell < 1 or gcd(ell, params.q2) != 1 or gcd(ell + 1, params.q2) != 1:
        raise ParameterError("l and l+1 must be units mod q2")
    return fourier_expansion(params, opts).beta_result(ell, z)


def zeta_minus_one(k_minus_1: int) -> float:
    """zeta(k-1) - 1 for integer argument >= 3."""
    return float(_riemann_zeta(k_minus_1) - 1.0)


def delta_bound(params: EisensteinParams, z) -> float:
    """Upper bound for N(y,k) |delta(z)|, the non-leading divisor remainder.

    Bounds the nested divisor sum by zeta(k-1) - 1 and multiplies by the
    normalized full-magnitude series N(y,k) sum_n n^(k-1) e^(-2 pi n y).
    """
    zc = as_complex(z)
    k = params.k
    if k < 4:
        raise ParameterError("delta_bound needs k >= 4")
    y = zc.imag
    log_norm = log_normalization(y, k)
    n = 1
    acc = []
    while True:
        acc.append((k - 1) * math.log(n) - TWO_PI * n * y)
        # past the peak the ratio is below exp((k-1)/n - 2 pi y)
        if n > (k - 1) / (TWO_PI * y):
            log_r = (k - 1) * math.log((n + 1) / n) - TWO_PI * y
            if log_r < 0:
                log_tail = acc[-1] + log_r - math.log1p(-math.exp(log_r))
                if log_tail < max(acc) + math.log(1e-16):
                    break
        n += 1
        if n > 10_000_000:  # unreachable at desk scale
            raise ToleranceError("delta_bound series did not converge")
    m = max(acc)
    s = m + math.log(sum(math.exp(a - m) for a in acc))
    log_bound = math.log(zeta_minus_one(k - 1)) + log_norm + s
    try:
        return math.exp(log_bound)
    except OverflowError:
        return math.inf
