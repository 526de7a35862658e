"""Deterministic prime generation with a useful-prime guarantee.

The reservoir is built from an interval [n, 2n) chosen so that the density
function Upsilon certifies enough primes q whose least prime p = k*q + 1
stays below q^1.89.  Among any beta1 + beta2 + k delivered reservoir primes,
at least k satisfy p not dividing C1 and (p-1) not dividing C2 for every
pair (C1, C2) with log2 C1 <= beta1 and log2 C2 <= beta2, because each
failing prime consumes a distinct prime divisor of C1 or C2.

All logarithms here are natural.
"""

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np

from .modular_core import is_prime


@dataclass(frozen=True)
class OracleConfig:
    """Bounds feeding the reservoir: log2 C1 <= beta1, log2 C2 <= beta2,
    ell useful primes wanted, and the current density-constant estimate mu."""

    beta1: int
    beta2: int
    ell: int
    mu: float = 1.0

    def __post_init__(self):
        if self.beta1 < 0 or self.beta2 < 0:
            raise ValueError("beta bounds must be >= 0")
        if self.ell < 1:
            raise ValueError("ell must be >= 1")
        if self.mu < 1:
            raise ValueError("mu must be >= 1")


class PrimeRecord(NamedTuple):
    p: int
    q: int
    k: int


def upsilon(x: float, mu: float) -> float:
    """3x / (5 ln x) - mu x / ln^2 x, the certified count of usable q's below x."""
    if x <= 1:
        raise ValueError("upsilon needs x > 1")
    lg = math.log(x)
    coef = 3 / (5 * lg) - mu / (lg * lg)
    try:
        xf = float(x)
    except OverflowError:
        # sign is decided by the density coefficient once x is this large
        return math.copysign(math.inf, coef) if coef else 0.0
    return xf * coef


def choose_n(target: int, mu: float) -> int:
    """Smallest integer n with n > 21, n > mu and upsilon(n) > target."""
    if target < 1:
        raise ValueError("target must be >= 1")
    lo = max(22, math.floor(mu) + 1)
    window_end = lo + (1 << 23)
    # exact scan over a generous window; desk-scale configurations land here
    chunk = 1 << 15
    n = lo
    while n < window_end:
        xs = np.arange(n, min(n + chunk, window_end), dtype=np.float64)
        lg = np.log(xs)
        ys = xs * (3 / (5 * lg) - mu / (lg * lg))
        hits = np.nonzero(ys > target)[0]
        if hits.size:
            return n + int(hits[0])
        n += chunk

    # far regime (huge mu pushes n past the window, possibly past floats):
    # compare in log space and close in by squaring plus bisection
    log_target = math.log(target)

    def exceeds(x: int) -> bool:
        lg = math.log(x)
        coef = 3 / (5 * lg) - mu / (lg * lg)
        return coef > 0 and lg + math.log(coef) > log_target

    hi = window_end
    while not exceeds(hi):
        hi = hi * 2 if hi.bit_length() <= 1024 else hi * hi
    low = window_end
    for _ in range(4096):  # exact once the range fits; else a fine bracket
        if low + 1 >= hi:
            break
        mid = (low + hi) // 2
        if exceeds(mid):
            hi = mid
        else:
            low = mid
    return hi


def sieve_interval(lo: int, hi: int) -> List[int]:
    """Primes in [lo, hi) by a segmented sieve."""
    if hi <= lo:
        return []
    limit = math.isqrt(hi - 1)
    base = np.ones(limit + 1, dtype=bool)
    base[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if base[i]:
            base[i * i :: i] = False
    seg = np.ones(hi - lo, dtype=bool)
    for q in np.nonzero(base)[0]:
        q = int(q)
        start = max(q * q, (lo + q - 1) // q * q)
        if start < hi:
            seg[start - lo :: q] = False
    if lo <= 1:
        seg[: min(2 - lo, hi - lo)] = False
    return [int(i) + lo for i in np.nonzero(seg)[0]]


def s_of_q(q: int, cap: Optional[float] = None) -> Optional[int]:
    """Least prime p = k*q + 1 with p < cap (default cap q**1.89), else None."""
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if cap is None:
        cap = float(q) ** 1.89
    k = 1
    while k * q + 1 < cap:
        p = k * q + 1
        if is_prime(p):
            return p
        k += 1
    return None


def _build_reservoir(beta1: int, beta2: int, ell: int, mu: float):
    """Collect beta1+beta2+ell records, doubling mu on shortfall.

    Primality results are cached process-wide, so restarts with a larger mu
    re-test nothing.
    """
    need = beta1 + beta2 + ell
    while True:
        n = choose_n(need, mu)
        records = []
        for q in sieve_interval(n, 2 * n):
            p = s_of_q(q)
            if p is not None:
                records.append(PrimeRecord(p, q, (p - 1) // q))
                if len(records) == need:
                    break
        if len(records) == need:
            ps = [r.p for r in records]
            assert len(set(ps)) == need, "S(q) must be injective on the interval"
            records.sort()
            return records, mu, n
        mu *= 2


class PrimeStream:
    """Stateful producer over the reservoir with guarantee accounting.

    Primes are handed out in ascending order.  ``delivered`` counts handed
    minus discarded primes; discarded primes (black-box failures) never
    count toward the guarantee.  An exhausted reservoir regenerates itself
    with ell doubled, never re-delivering a prime.
    """

    def __init__(self, config: OracleConfig):
        self.config = config
        self.mu = config.mu
        self._ell = config.ell
        self.records, self.mu, self.n = _build_reservoir(
            config.beta1, config.beta2, self._ell, self.mu
        )
        self._cursor = 0
        self._handed = set()
        self._dead = set()
        self.delivered = 0
        self.regenerations = 0
        self._by_p = {r.p: r for r in self.records}

    @property
    def reservoir(self) -> tuple:
        return tuple(r.p for r in self.records)

    def next_prime(self) -> int:
        while True:
            if self._cursor >= len(self.records):
                self._regenerate()
                continue
            rec = self.records[self._cursor]
            self._cursor += 1
            if rec.p in self._handed:
                continue
            self._handed.add(rec.p)
            self.delivered += 1
            return rec.p

    def discard(self, p: int) -> None:
        if p in self._handed and p not in self._dead:
            self._dead.add(p)
            self.delivered -= 1

    def guarantee_reached(self, k: int) -> bool:
        return self.delivered >= self.config.beta1 + self.config.beta2 + k

    def record_for(self, p: int) -> Optional[PrimeRecord]:
        return self._by_p.get(p)

    def _regenerate(self) -> None:
        self.regenerations += 1
        self._ell *= 2
        self.records, self.mu, self.n = _build_reservoir(
            self.config.beta1, self.config.beta2, self._ell, self.mu
        )
        self._cursor = 0
        self._by_p.update({r.p: r for r in self.records})


# ---------------- spec operations ----------------

def generate(config: OracleConfig) -> PrimeStream:
    """Reservoir of beta1 + beta2 + ell primes p = S(q), q sieved from [n, 2n)."""
    return PrimeStream(config)


def next_prime(stream: PrimeStream) -> int:
    return stream.next_prime()


def guarantee_reached(stream: PrimeStream, k: int) -> bool:
    return stream.guarantee_reached(k)
