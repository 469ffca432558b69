"""Dirichlet characters mod q via exponents against canonical unit-group generators.

A character mod q is stored as the vector of exponents (e_1, ..., e_r)
against a fixed generator system of (Z/qZ)*:

    chi(g_i) = exp(2*pi*i * e_i / m_i),     0 <= e_i < m_i,

where (Z/qZ)* = prod <g_i>, |<g_i>| = m_i.  The generator system is
canonical (see build_group) so characters are comparable and enumerable by
their exponent vectors alone.  Values chi(n) are obtained from a memoized
discrete-log table; all phase arithmetic is exact (Fraction turns of the
circle), so e.g. chi(2) = i comes out exactly as 1j.

Moduli are desk scale (q <= ~10^4): brute-force discrete logs and
divisor/conductor searches are deliberate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
import cmath

from .errors import ParameterError


def factorize(q: int) -> list[tuple[int, int]]:
    """Prime-power factorization of q >= 1, primes ascending."""
    out = []
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(q: int) -> int:
    phi = 1
    for p, e in factorize(q):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def _multiplicative_order(g: int, q: int) -> int:
    t, x = 1, g % q
    while x != 1:
        x = x * g % q
        t += 1
    return t


def _smallest_primitive_root(pe: int, phi: int) -> int:
    for g in range(2, pe):
        if gcd(g, pe) == 1 and _multiplicative_order(g, pe) == phi:
            return g
    raise ParameterError(f"no primitive root mod {pe}")


def _crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """x with x = r1 mod m1, x = r2 mod m2 for coprime m1, m2."""
    m1_inv = pow(m1, -1, m2)
    return (r1 + m1 * ((r2 - r1) * m1_inv % m2)) % (m1 * m2)


@dataclass(frozen=True)
class ResidueGroupStructure:
    """Canonical generator system for (Z/qZ)*.

    generators is a tuple of (g_i, m_i) with prod m_i = phi(q).  Order:
    prime powers of q ascending; for 2^e with e >= 3 the pair
    (-1 mod 2^e, order 2) then (5, order 2^(e-2)).
    """

    modulus: int
    generators: tuple[tuple[int, int], ...]

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.generators)

    def num_characters(self) -> int:
        n = 1
        for m in self.orders:
            n *= m
        return n


@lru_cache(maxsize=None)
def build_group(q: int) -> ResidueGroupStructure:
    """Canonical generator system for (Z/qZ)*; deterministic across runs."""
    if q < 1:
        raise ParameterError(f"modulus must be >= 1, got {q}")
    gens: list[tuple[int, int]] = []
    for p, e in factorize(q):
        pe = p ** e
        rest = q // pe
        if p == 2:
            if e == 1:
                continue  # phi(2) = 1, trivial factor
            if e == 2:
                local = [(3, 2)]
            else:
                local = [(pe - 1, 2), (5, 2 ** (e - 2))]
        else:
            phi = (p - 1) * p ** (e - 1)
            local = [(_smallest_primitive_root(pe, phi), phi)]
        for g, m in local:
            lifted = g if rest == 1 else _crt_pair(g, pe, 1, rest)
            gens.append((lifted, m))
    return ResidueGroupStructure(q, tuple(gens))


@lru_cache(maxsize=None)
def _dlog_table(group: ResidueGroupStructure) -> dict[int, tuple[int, ...]]:
    """residue -> exponent vector, for every unit mod q.  Built once per group."""
    q = group.modulus
    table = {1 % q: tuple(0 for _ in group.generators)}
    if not group.generators:
        return table
    ranges = [range(m) for m in group.orders]
    for exps in itertools.product(*ranges):
        n = 1
        for (g, _), e in zip(group.generators, exps):
            n = n * pow(g, e, q) % q
        table[n] = exps
    if len(table) != euler_phi(q):
        raise ParameterError(f"generators do not span (Z/{q}Z)*")
    return table


@dataclass(frozen=True)
class DirichletCharacter:
    """chi(g_i) = e(e_i/m_i) on the canonical generators; chi(n)=0 off units."""

    group: ResidueGroupStructure
    exponents: tuple[int, ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.group.generators):
            raise ParameterError("exponent vector length mismatch")
        for e, m in zip(self.exponents, self.group.orders):
            if not 0 <= e < m:
                raise ParameterError(f"exponent {e} out of range for order {m}")

    @property
    def modulus(self) -> int:
        return self.group.modulus

    def __call__(self, n: int) -> complex:
        return evaluate(self, n)


def character(q: int, exponents) -> DirichletCharacter:
    return DirichletCharacter(build_group(q), tuple(exponents))


def principal_character(q: int) -> DirichletCharacter:
    g = build_group(q)
    return DirichletCharacter(g, tuple(0 for _ in g.generators))


def value_phase(chi: DirichletCharacter, n: int) -> Fraction | None:
    """Exact phase t in [0,1) with chi(n) = e(t), or None when chi(n) = 0."""
    q = chi.modulus
    if q == 1:
        return Fraction(0)
    n %= q
    if gcd(n, q) != 1:
        return None
    exps = _dlog_table(chi.group)[n]
    t = Fraction(0)
    for e, a, m in zip(chi.exponents, exps, chi.group.orders):
        t += Fraction(e * a, m)
    return t % 1


_EXACT_PHASES = {
    Fraction(0): 1 + 0j,
    Fraction(1, 4): 1j,
    Fraction(1, 2): -1 + 0j,
    Fraction(3, 4): -1j,
}


def phase_to_complex(t: Fraction) -> complex:
    exact = _EXACT_PHASES.get(t % 1)
    if exact is not None:
        return exact
    return cmath.exp(2j * cmath.pi * float(t % 1))


def evaluate(chi: DirichletCharacter, n: int) -> complex:
    """chi(n); exactly 0 on non-units, exact +-1, +-i where applicable."""
    t = value_phase(chi, n)
    if t is None:
        return 0j
    return phase_to_complex(t)


def parity(chi: DirichletCharacter) -> int:
    """chi(-1) as +-1."""
    t = value_phase(chi, chi.modulus - 1)
    if t == 0:
        return 1
    if t == Fraction(1, 2):
        return -1
    raise ParameterError("chi(-1) not +-1; corrupt character")  # unreachable


def conductor(chi: DirichletCharacter) -> int:
    """Smallest f | q such that chi is induced by a character mod f.

    Brute force over divisors: chi is induced mod f iff chi(n) = 1 for
    every unit n = 1 mod f.
    """
    q = chi.modulus
    for f in sorted(d for d in range(1, q + 1) if q % d == 0):
        if all(
            value_phase(chi, n) == 0
            for n in range(1, q + 1, f)
            if gcd(n, q) == 1
        ):
            return f
    return q


def is_primitive(chi: DirichletCharacter) -> bool:
    return conductor(chi) == chi.modulus


def conjugate(chi: DirichletCharacter) -> DirichletCharacter:
    exps = tuple((-e) % m for e, m in zip(chi.exponents, chi.group.orders))
    return DirichletCharacter(chi.group, exps)


def multiply(a: DirichletCharacter, b: DirichletCharacter) -> DirichletCharacter:
    """Pointwise product; both characters must share a modulus."""
    if a.modulus != b.modulus:
        raise ParameterError(
            f"modulus mismatch {a.modulus} != {b.modulus}; lifting is out of scope"
        )
    exps = tuple(
        (e1 + e2) % m for e1, e2, m in zip(a.exponents, b.exponents, a.group.orders)
    )
    return DirichletCharacter(a.group, exps)


def _exponent_from_phase(t: Fraction, order: int) -> int:
    e = t * order
    if e.denominator != 1:
        raise ParameterError("phase not compatible with generator order")
    return int(e) % order


def crt_factor(chi: DirichletCharacter, u: int, v: int):
    """Split chi mod q = u*v (coprime) into (chi_u, chi_v) with chi = chi_u * chi_v.

    chi_u(n) := chi(m) for m = n mod u, m = 1 mod v, and symmetrically.
    """
    q = chi.modulus
    if u * v != q or gcd(u, v) != 1 or u < 1 or v < 1:
        raise ParameterError(f"invalid coprime split {q} = {u} * {v}")

    def component(mod_keep: int, mod_kill: int) -> DirichletCharacter:
        g = build_group(mod_keep)
        exps = []
        for (gen, order) in g.generators:
            m = _crt_pair(gen, mod_keep, 1, mod_kill) if mod_kill > 1 else gen
            t = value_phase(chi, m)
            exps.append(_exponent_from_phase(t, order))
        return DirichletCharacter(g, tuple(exps))

    return component(u, v), component(v, u)


def crt_compose(chi_u: DirichletCharacter, chi_v: DirichletCharacter) -> DirichletCharacter:
    """Inverse of crt_factor: the character mod u*v with chi(n) = chi_u(n)*chi_v(n).

    Moduli must be coprime (this is not lcm-inducing, which stays out of scope).
    """
    u, v = chi_u.modulus, chi_v.modulus
    if gcd(u, v) != 1:
        raise ParameterError(f"moduli {u}, {v} not coprime")
    g = build_group(u * v)
    exps = []
    for (gen, order) in g.generators:
        tu = value_phase(chi_u, gen)
        tv = value_phase(chi_v, gen)
        if tu is None or tv is None:  # cannot happen: gen is a unit mod u*v
            raise ParameterError("generator not a unit in a factor")
        exps.append(_exponent_from_phase((tu + tv) % 1, order))
    return DirichletCharacter(g, tuple(exps))


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All characters mod q, lexicographic in the exponent vector.

    The list position is the canonical character index used by the CLI.
    """
    g = build_group(q)
    return [
        DirichletCharacter(g, exps)
        for exps in itertools.product(*(range(m) for m in g.orders))
    ]


def character_index(chi: DirichletCharacter) -> int:
    """Lexicographic rank of the exponent vector (mixed radix)."""
    idx = 0
    for e, m in zip(chi.exponents, chi.group.orders):
        idx = idx * m + e
    return idx


def character_by_index(q: int, index: int) -> DirichletCharacter:
    g = build_group(q)
    n = g.num_characters()
    if not 0 <= index < n:
        raise ParameterError(f"character index {index} out of range [0, {n}) for q={q}")
    exps = []
    for m in reversed(g.orders):
        exps.append(index % m)
        index //= m
    return DirichletCharacter(g, tuple(reversed(exps)))
