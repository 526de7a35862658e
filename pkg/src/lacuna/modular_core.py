"""Exact integer/rational/modular primitives shared by the whole library.

Rationals are plain ``fractions.Fraction`` values (always in lowest terms,
positive denominator), re-exported here as ``Rat``.  Everything in this
module is pure and safe for concurrent use.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DenominatorVanished, InconsistentResidues, NoReconstruction

Rat = Fraction


# ---------------- bit sizes and remainders ----------------

def size_of(q) -> int:
    """Number of bits to represent the rational q = a/b in lowest terms.

    size(q) = ceil(log2(|a|+1)) + ceil(log2(b+1)) + 1, so size(0) = 2.
    """
    q = Fraction(q)
    return abs(q.numerator).bit_length() + q.denominator.bit_length() + 1


def rem(a: int, m: int) -> int:
    """Remainder of a in {0, 1, ..., m-1}."""
    if m < 1:
        raise ValueError("modulus must be >= 1")
    return a % m


def remo(a: int, m: int) -> int:
    """Remainder of a in {1, 2, ..., m}; multiples of m map to m itself.

    This is the offset remainder that keeps reduced exponents nonzero.
    """
    if m < 1:
        raise ValueError("modulus must be >= 1")
    return (a - 1) % m + 1


# ---------------- gcd helpers ----------------

def xgcd(a: int, b: int):
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b), g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def inv_mod(a: int, m: int) -> int:
    """Inverse of a modulo m; raises ValueError when gcd(a, m) != 1."""
    if m == 1:
        return 0
    g, x, _ = xgcd(a % m, m)
    if g != 1:
        raise ValueError(f"{a} is not invertible modulo {m}")
    return x % m


def frac_mod(q, m: int) -> int:
    """Image of the rational q in Z_m; DenominatorVanished if gcd(den, m) > 1."""
    q = Fraction(q)
    den = q.denominator
    if math.gcd(den, m) != 1:
        raise DenominatorVanished(m, f"denominator {den}")
    return q.numerator * inv_mod(den, m) % m


# ---------------- primality ----------------

def _mr_witness(n: int, a: int) -> bool:
    """True if a proves n composite (strong test); False if n passes base a."""
    a %= n
    if a == 0:
        return False
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


# Deterministic witness tiers (strong-pseudoprime records).
_MR_TIERS = (
    (2047, (2,)),
    (1373653, (2, 3)),
    (25326001, (2, 3, 5)),
    (3215031751, (2, 3, 5, 7)),
    (3474749660383, (2, 3, 5, 7, 11, 13)),
    (341550071728321, (2, 3, 5, 7, 11, 13, 17)),
    (3825123056546413051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (318665857834031151167461, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
    (3317044064679887385961981, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)),
)
_MR_PROVEN_LIMIT = _MR_TIERS[-1][0]

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _rho_factor(n: int, seed: int = 1) -> int:
    """Pollard rho (Brent variant); returns a nontrivial factor of composite n."""
    if n % 2 == 0:
        return 2
    c = seed
    while True:
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1


def _factorize(n: int) -> dict:
    """Full prime factorization {prime: multiplicity} (Las Vegas for big n)."""
    fac = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            fac[p] = fac.get(p, 0) + 1
            n //= p
    d = 41
    while d * d <= n and d < 100000:
        while n % d == 0:
            fac[d] = fac.get(d, 0) + 1
            n //= d
        d += 2
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            fac[m] = fac.get(m, 0) + 1
            continue
        f = _rho_factor(m)
        stack.append(f)
        stack.append(m // f)
    return fac


def _lucas_certified_prime(n: int) -> bool:
    """Lucas N-1 primality proof for n past the deterministic witness range.

    Needs the full factorization of n-1; an answer, once returned, is
    unconditionally correct (the factoring step is Las Vegas, so only the
    running time is randomized).
    """
    for a in _SMALL_PRIMES:
        if _mr_witness(n, a):
            return False
    fac = _factorize(n - 1)
    for r in fac:
        for a in range(2, 100000):
            if pow(a, n - 1, n) != 1:
                return False
            if pow(a, (n - 1) // r, n) != 1:
                break  # r certified: an element of order divisible by r exists
        else:
            # For prime n at least half of all bases certify each r, so this
            # is unreachable for primes; refuse to guess rather than be wrong.
            raise RuntimeError(f"primality of {n} undecided after base search")
    return True


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Deterministic primality test, correct for every n.

    Uses fixed Miller-Rabin witness sets (proven below ~3.3e24) and a Lucas
    N-1 certificate beyond that range.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n <= _MR_PROVEN_LIMIT:
        for limit, bases in _MR_TIERS:
            if n < limit:
                return not any(_mr_witness(n, a) for a in bases)
        raise AssertionError("unreachable")
    return _lucas_certified_prime(n)


def next_prime_above(n: int) -> int:
    """Least prime strictly greater than n."""
    c = n + 1
    if c <= 2:
        return 2
    if c % 2 == 0:
        c += 1
    while not is_prime(c):
        c += 2
    return c


# ---------------- residues, CRT, rational reconstruction ----------------

@dataclass(frozen=True)
class Residue:
    """A value in Z_m with its modulus; 0 <= value < modulus, modulus >= 2."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)


def signed_lift(r: Residue) -> int:
    """Symmetric representative of r in [-floor(m/2), floor(m/2)]."""
    return r.value if r.value <= r.modulus // 2 else r.value - r.modulus


def crt_pair(a: Residue, b: Residue) -> Residue:
    """Combine two congruences with possibly non-coprime moduli.

    Returns the unique residue modulo lcm(m_a, m_b) congruent to both, or
    raises InconsistentResidues when gcd(m_a, m_b) does not divide the
    difference of the values.
    """
    ma, mb = a.modulus, b.modulus
    g = math.gcd(ma, mb)
    diff = b.value - a.value
    if diff % g:
        raise InconsistentResidues(
            f"{a.value} (mod {ma}) and {b.value} (mod {mb}) conflict modulo {g}"
        )
    l = ma // g * mb
    step = inv_mod(ma // g, mb // g)
    x = a.value + ma * (diff // g * step % (mb // g))
    return Residue(x % l, l)


def crt_list(residues) -> Residue:
    """Fold crt_pair over a non-empty sequence of residues."""
    residues = list(residues)
    if not residues:
        raise ValueError("need at least one residue")
    acc = residues[0]
    for r in residues[1:]:
        acc = crt_pair(acc, r)
    return acc


def rational_reconstruct(u: Residue, bound: int) -> Fraction:
    """Recover a/b from its image u with |a| <= bound and 1 <= b <= bound.

    Walks the half-extended Euclidean scheme; every bounded solution shows
    up among its rows, and the smallest row by bit size is returned.  The
    answer is unique when modulus >= 2*bound**2 + 1 (the caller's
    responsibility); with a smaller modulus the bit-size tie-break picks the
    most compact matching rational.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    m, r = u.modulus, u.value
    if r == 0:
        return Fraction(0)
    best = None
    r0, t0, r1, t1 = m, 0, r, 1
    while r1:
        a, b = (r1, t1) if t1 > 0 else (-r1, -t1)
        if (
            abs(a) <= bound
            and 0 < b <= bound
            and math.gcd(abs(a), b) == 1
            and math.gcd(b, m) == 1
        ):
            key = abs(a).bit_length() + b.bit_length()
            if best is None or key < best[0]:
                best = (key, Fraction(a, b))
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if best is None:
        raise NoReconstruction(f"no a/b with |a|,b <= {bound} matches {r} (mod {m})")
    return best[1]
