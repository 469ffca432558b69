"""Integer 2x2 matrix actions on the upper half plane.

Fundamental-domain reduction for SL2(Z), a complete-search equivalence
oracle for Gamma0(N), Hecke point sets, and Atkin-Lehner involutions with
their character bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd

from . import characters as chars
from .characters import DirichletCharacter
from .errors import EiszerosError, ParameterError
from .evaluation import as_complex

_REDUCE_CAP = 10_000
_SNAP = 1e-9


@dataclass(frozen=True)
class IntegerMatrix2x2:
    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "IntegerMatrix2x2") -> "IntegerMatrix2x2":
        return IntegerMatrix2x2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse_unimodular(self) -> "IntegerMatrix2x2":
        if self.det != 1:
            raise ParameterError("integer inverse needs det = 1")
        return IntegerMatrix2x2(self.d, -self.b, -self.c, self.a)

    def in_gamma0(self, N: int) -> bool:
        return self.det == 1 and self.c % N == 0

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


IDENTITY = IntegerMatrix2x2(1, 0, 0, 1)
T_SHIFT = IntegerMatrix2x2(1, 1, 0, 1)
S_INVERT = IntegerMatrix2x2(0, -1, 1, 0)


def mobius_apply(M: IntegerMatrix2x2, z) -> complex:
    """(az + b)/(cz + d); maps H to H for det > 0 (Im scales by det/|cz+d|^2)."""
    if M.det <= 0:
        raise ParameterError("Mobius action on H needs positive determinant")
    zc = as_complex(z)
    return (M.a * zc + M.b) / (M.c * zc + M.d)


@dataclass(frozen=True)
class CuspRegion:
    """The neighborhood K(q2) = { y > 1/q2, -1/2 < x <= 1/2 } of infinity."""

    q2: int

    def contains(self, z) -> bool:
        zc = complex(z)
        return zc.imag > 1.0 / self.q2 and -0.5 < zc.real <= 0.5


def reduce_to_fundamental_domain(z) -> tuple[complex, IntegerMatrix2x2]:
    """gamma z in the standard domain |Re| <= 1/2, |z| >= 1, with gamma in SL2(Z).

    Boundary convention: Re = +1/2 preferred over -1/2, and the right half
    of the unit arc preferred, so reduced points are unique representatives
    (after 1e-9 snapping).
    """
    zc = as_complex(z)
    gamma = IDENTITY
    for _ in range(_REDUCE_CAP):
        n = math.floor(zc.real + 0.5)
        if n != 0:
            zc -= n
            gamma = IntegerMatrix2x2(1, -n, 0, 1) @ gamma
        if abs(zc) < 1.0 - 1e-15:
            zc = -1.0 / zc
            gamma = S_INVERT @ gamma
            continue
        break
    else:
        raise EiszerosError("fundamental-domain reduction did not terminate")
    # boundary snaps
    if zc.real <= -0.5 + _SNAP:
        zc += 1.0
        gamma = T_SHIFT @ gamma
    if abs(abs(zc) - 1.0) <= _SNAP and zc.real < -_SNAP:
        zc = -1.0 / zc
        gamma = S_INVERT @ gamma
    return zc, gamma


def in_fundamental_domain(z, pad: float = _SNAP) -> bool:
    zc = complex(z)
    return abs(zc.real) <= 0.5 + pad and abs(zc) >= 1.0 - pad


def gamma0_equivalent(z, zp, N: int, max_c: int = 10_000) -> IntegerMatrix2x2 | None:
    """A gamma in Gamma0(N) with gamma z = z' (tolerance 1e-9), or None.

    The imaginary-part constraint |cz + d|^2 = y/y' caps |c| by
    1/sqrt(y y'), so the search over c = 0 mod N is complete and "None" is
    a certificate (up to the max_c cap).
    """
    zc, zpc = as_complex(z), as_complex(zp)
    y, yp = zc.imag, zpc.imag
    rho2 = y / yp
    c_cap = min(max_c, int(math.floor(math.sqrt(rho2) / y + 1e-9)))

    def try_cd(c: int, d: int) -> IntegerMatrix2x2 | None:
        w = c * zc + d
        if abs(w) < 1e-300:
            return None
        img = zpc * w  # = a z + b for a match
        a_f = img.imag / y
        a = round(a_f)
        if abs(a_f - a) > 1e-6:
            return None
        b_f = img.real - a * zc.real
        b = round(b_f)
        if abs(b_f - b) > 1e-6:
            return None
        M = IntegerMatrix2x2(a, b, c, d)
        if M.det != 1 or M.c % N != 0:
            return None
        if abs(mobius_apply(M, zc) - zpc) > _SNAP:
            return None
        return M

    for c_abs in range(0, c_cap + 1, 1):
        if c_abs % N != 0 and c_abs != 0:
            continue
        for c in ((0,) if c_abs == 0 else (c_abs, -c_abs)):
            # (cx + d)^2 = rho^2 - c^2 y^2 fixes d up to sign
            rem = rho2 - (c * y) ** 2
            if rem < -1e-9:
                continue
            root = math.sqrt(max(rem, 0.0))
            for s in ((root,) if root < 1e-9 else (root, -root)):
                d_f = s - c * zc.real
                for d in {math.floor(d_f), math.ceil(d_f), round(d_f)}:
                    M = try_cd(c, d)
                    if M is not None:
                        return M
    return None


def hecke_points(p: int, z) -> list[complex]:
    """The p + 1 Hecke points {(z + a)/p} and pz, reduced to the domain."""
    if p < 2 or any(p % q == 0 for q in range(2, int(math.isqrt(p)) + 1)):
        raise ParameterError(f"p must be prime, got {p}")
    zc = as_complex(z)
    raw = [(zc + a) / p for a in range(p)] + [p * zc]
    return [reduce_to_fundamental_domain(w)[0] for w in raw]


def atkin_lehner_matrix(N: int, Q: int) -> IntegerMatrix2x2:
    """The involution matrix (Qa, b; Nc, Qd) with det Q, a=1 mod R, b=1 mod Q.

    Normalized deterministically: a and b are the least positive residues
    (both 1), then |c| is minimized over solutions of Q d - R c = 1.
    """
    if Q == 1:
        raise ParameterError("Q = 1 is excluded (trivial involution)")
    if Q < 1 or N % Q != 0 or gcd(Q, N // Q) != 1:
        raise ParameterError(f"need Q | N with gcd(Q, N/Q) = 1, got N={N}, Q={Q}")
    R = N // Q
    # Q d - R c = 1 with c = c0 mod Q
    c0 = (-pow(R, -1, Q)) % Q
    c = c0 if abs(c0) <= abs(c0 - Q) else c0 - Q
    d = (1 + R * c) // Q
    M = IntegerMatrix2x2(Q, 1, N * c, Q * d)
    if M.det != Q:
        raise EiszerosError("involution construction failed")  # unreachable
    return M


def is_atkin_lehner(M: IntegerMatrix2x2, N: int, Q: int) -> bool:
    """Validator: entries (Qa', b', Nc', Qd'), det Q, a'=1 mod R, b'=1 mod Q."""
    R = N // Q
    if M.det != Q or M.a % Q or M.c % N or M.d % Q:
        return False
    return (M.a // Q) % R == 1 % R and M.b % Q == 1 % Q


def atkin_lehner_character_swap(chi1p: DirichletCharacter, chi2p: DirichletCharacter,
                                Q: int) -> tuple[DirichletCharacter, DirichletCharacter]:
    """Character data of the series seen at the W_Q cusp.

    Both characters split uniquely over the coprime factorization
    N = Q * R; the swap recombines the Q-parts and R-parts crosswise:
    chi1 = chi1'^(R) * chi2'^(Q) mod (q1',R)(q2',Q), and symmetrically.
    Primitivity of the inputs forces primitivity of the outputs (asserted).
    """
    q1p, q2p = chi1p.modulus, chi2p.modulus
    N = q1p * q2p
    if N % Q != 0 or gcd(Q, N // Q) != 1:
        raise ParameterError(f"need Q | q1'q2' with gcd(Q, rest) = 1, got Q={Q}")
    R = N // Q
    chi1_Q, chi1_R = chars.crt_factor(chi1p, gcd(q1p, Q), gcd(q1p, R))
    chi2_Q, chi2_R = chars.crt_factor(chi2p, gcd(q2p, Q), gcd(q2p, R))
    chi1 = chars.crt_compose(chi1_R, chi2_Q)
    chi2 = chars.crt_compose(chi1_Q, chi2_R)
    if not (chars.is_primitive(chi1) and chars.is_primitive(chi2)):
        raise EiszerosError("swap produced an imprimitive character")  # unreachable
    return chi1, chi2


@dataclass(frozen=True)
class CuspImageReport:
    N: int
    Q: int
    q2_source: int
    q2_target: int
    samples: int
    max_im: float
    bound_intermediate: float   # q2' / (R N)
    bound_target: float         # 1 / q2
    passed: bool
    worst_point: tuple[float, float]


def cusp_region_disjoint(N: int, Q: int, q2_source: int, q2_target: int,
                         grid: int = 20) -> CuspImageReport:
    """Check Im(W_Q z) <= q2'/(RN) <= 1/q2 on a grid over K(q2').

    The grid covers x in (-1/2, 1/2] and y from just above 1/q2' out to
    several units, plus a far-out row (images decay like 1/y there).
    """
    M = atkin_lehner_matrix(N, Q)
    R = N // Q
    inter = q2_source / (R * N)
    target = 1.0 / q2_target
    ys = [1.0 / q2_source * (1.0 + 0.25 * (j + 1)) for j in range(grid)]
    ys += [1.0 / q2_source + j + 1.0 for j in range(5)] + [1e6]
    max_im, worst = -math.inf, (0.0, 0.0)
    count = 0
    for iy in ys:
        for j in range(grid):
            x = -0.5 + (j + 1) / grid
            w = mobius_apply(M, complex(x, iy))
            count += 1
            if w.imag > max_im:
                max_im, worst = w.imag, (x, iy)
    passed = max_im <= inter + 1e-12 and inter <= target + 1e-12
    return CuspImageReport(N, Q, q2_source, q2_target, count, max_im,
                           inter, target, passed, worst)
