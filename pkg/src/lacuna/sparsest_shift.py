"""Recovery of the sparsest shift from modular reductions.

The main loop reduces the black box modulo oracle primes; every prime whose
reduction has degree >= 2*B_T + 1 pins the shift modulo p, and Chinese
remaindering plus rational reconstruction recovers it once the recorded
moduli multiply past 2^(2*B_A + 1).  Polynomials of degree <= 2*B_T never
pass the degree test and fall through to exact dense recovery plus a direct
candidate search.
"""

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .blackbox import ModularBlackBox, reduce_mod
from .densepoly import min_shift
from .errors import (
    BlackBoxFailure,
    DenominatorVanished,
    InconsistentResidues,
    NoReconstruction,
)
from .modular_core import (
    Residue,
    crt_list,
    inv_mod,
    next_prime_above,
    rational_reconstruct,
    size_of,
)
from .prime_oracle import OracleConfig, PrimeStream, generate


@dataclass(frozen=True)
class Bounds:
    """Input promises: size(shift) <= ba, t <= bt, size(c_i) <= bh, log2 deg <= bn.

    Zero entries are lifted to 1 so the derived thresholds stay meaningful.
    """

    ba: int
    bt: int
    bh: int
    bn: int

    def __post_init__(self):
        for name in ("ba", "bt", "bh", "bn"):
            v = getattr(self, name)
            if v < 0:
                raise ValueError(f"bound {name} must be >= 0")
            object.__setattr__(self, name, max(1, int(v)))


class ShiftPath(enum.Enum):
    MODULAR = "modular"
    DENSE = "dense"


@dataclass(frozen=True)
class ShiftResult:
    alpha: Fraction
    residues: Tuple[Tuple[int, int], ...]  # (alpha mod p, p)
    path: ShiftPath
    dense_coeffs: Optional[Tuple[Fraction, ...]] = None


def shift_oracle_config(bounds: Bounds, mu: float = 1.0) -> OracleConfig:
    """Oracle sizing for shift recovery: beta1 = 2*bh, beta2 = bn*(3*bt - 1)."""
    return OracleConfig(
        beta1=2 * bounds.bh,
        beta2=bounds.bn * (3 * bounds.bt - 1),
        ell=2 * bounds.ba + 1,
        mu=mu,
    )


def sparsest_shift(
    bb: ModularBlackBox,
    bounds: Bounds,
    *,
    mu: float = 1.0,
    stream: Optional[PrimeStream] = None,
    max_regenerations: int = 10,
    threshold: Optional[int] = None,
) -> ShiftResult:
    """A sparsest shift of the polynomial behind the black box.

    Unique whenever deg f >= 2*bounds.bt + 1.  Raises InconsistentResidues
    when reconstruction fails (the true polynomial violated the bounds) and
    BlackBoxFailure when evaluation failures outlast the regeneration limit.
    """
    if stream is None:
        stream = generate(shift_oracle_config(bounds, mu))
    ptarget = 1 << (2 * bounds.ba + 1)
    prod = 1
    recorded: List[Tuple[int, int]] = []
    while prod < ptarget:
        if stream.regenerations > max_regenerations:
            raise BlackBoxFailure(
                f"no usable primes after {stream.regenerations} reservoir regenerations"
            )
        p = stream.next_prime()
        try:
            fp = reduce_mod(bb, p, threshold=threshold)
        except DenominatorVanished:
            stream.discard(p)
            continue
        if fp.degree >= 2 * bounds.bt + 1:
            hit = min_shift(fp, tau_cap=bounds.bt, threshold=threshold)
            if hit is None or hit.tie:
                continue  # degree passed but no unique sparse shift: bad prime
            recorded.append((hit.gamma, p))
            prod *= p
        elif prod == 1 and stream.guarantee_reached(1):
            # Degree never reaches 2*bt + 1, so deg f <= 2*bt: dense regime.
            coeffs = dense_case_recover(bb, bounds)
            alpha = dense_sparsest_shift(coeffs, bounds.ba)
            return ShiftResult(alpha, (), ShiftPath.DENSE, tuple(coeffs))
    try:
        alpha = reconstruct_shift(recorded, bounds.ba)
    except (NoReconstruction, InconsistentResidues) as exc:
        raise InconsistentResidues(f"shift residues do not fit the bounds: {exc}") from exc
    return ShiftResult(alpha, tuple(recorded), ShiftPath.MODULAR)


def reconstruct_shift(residues: Sequence[Tuple[int, int]], ba: int) -> Fraction:
    """The unique alpha = a/b with |a|, b <= 2^ba matching every residue.

    residues holds (alpha mod p, p) pairs over pairwise distinct primes
    whose product must reach 2^(2*ba + 1).
    """
    if not residues:
        raise NoReconstruction("no residues recorded")
    primes = [p for _, p in residues]
    if len(set(primes)) != len(primes):
        raise ValueError("moduli must be pairwise distinct primes")
    combined = crt_list([Residue(a, p) for a, p in residues])
    return rational_reconstruct(combined, 1 << ba)


# ---------------- dense (low-degree) regime ----------------

def dense_case_recover(bb: ModularBlackBox, bounds: Bounds) -> List[Fraction]:
    """Exact dense f (degree <= 2*bt) from one big prime.

    Coefficient sizes over the power basis are at most 2*bt*ba + bh bits, so
    a single prime q with log2 q > 2*bt*ba + bh supports rational
    reconstruction of every coefficient from 2*bt + 1 evaluations.
    """
    sbits = 2 * bounds.bt * bounds.ba + bounds.bh
    npts = 2 * bounds.bt + 1
    q = next_prime_above(1 << sbits)
    while True:
        try:
            vals = [bb.eval(q, i) for i in range(npts)]
            break
        except DenominatorVanished:
            q = next_prime_above(q)  # finitely many primes divide denominators
    coeffs_mod = _interpolate_points(vals, q)
    bound = 1 << sbits
    coeffs = [rational_reconstruct(Residue(c, q), bound) for c in coeffs_mod]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _interpolate_points(vals: Sequence[int], m: int) -> List[int]:
    """Newton interpolation at the nodes 0..len(vals)-1 over Z_m."""
    k = len(vals)
    dd = [v % m for v in vals]  # divided-difference table, updated in place
    for level in range(1, k):
        inv = inv_mod(level, m)
        for i in range(k - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) * inv % m
    # fold the Newton form back into monomials, Horner-style from the top
    coeffs = [dd[k - 1] % m]
    for j in range(k - 2, -1, -1):
        # multiply by (x - j) and add dd[j]
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] = (nxt[i + 1] + c) % m
            nxt[i] = (nxt[i] - j * c) % m
        nxt[0] = (nxt[0] + dd[j]) % m
        coeffs = nxt
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def taylor_shift_exact(coeffs: Sequence[Fraction], alpha) -> List[Fraction]:
    """Coefficients of f(x + alpha) over the rationals (small degrees only)."""
    alpha = Fraction(alpha)
    out = [Fraction(c) for c in coeffs]
    n = len(out)
    # repeated synthetic division by (x - (-alpha))
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += alpha * out[j + 1]
    return out


def _tau_exact(coeffs: Sequence[Fraction], alpha: Fraction) -> int:
    shifted = taylor_shift_exact(coeffs, alpha)
    return sum(1 for c in shifted[1:] if c != 0)


def dense_sparsest_shift(coeffs: Sequence[Fraction], ba: int) -> Fraction:
    """Sparsest shift of an explicit rational f with |num|, den <= 2^ba.

    Candidates are 0 and every rational root of a coefficient of f(x + y)
    viewed as a polynomial in y: any shift that removes a term annihilates
    one of those coefficients.  Ties break toward smaller term count, then
    smaller bit size, then smaller value.
    """
    f = [Fraction(c) for c in coeffs]
    while f and f[-1] == 0:
        f.pop()
    d = len(f) - 1
    if d <= 0:
        return Fraction(0)
    box = 1 << ba
    candidates = {Fraction(0)}
    for k in range(1, d + 1):
        # coefficient of x^k in f(x+y) as a polynomial in y
        row = [f[j] * math.comb(j, k) for j in range(k, d + 1)]
        candidates.update(_bounded_rational_roots(row, box))
    best = None
    for alpha in candidates:
        key = (_tau_exact(f, alpha), size_of(alpha), alpha)
        if best is None or key < best[0]:
            best = (key, alpha)
    return best[1]


def _bounded_rational_roots(row: Sequence[Fraction], box: int) -> List[Fraction]:
    """Rational roots a/b of the polynomial with |a| <= box and b <= box."""
    coeffs = list(row)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) <= 1:
        return []
    den_lcm = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * den_lcm) for c in coeffs]
    roots = []
    while ints and ints[0] == 0:
        ints.pop(0)
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
    if len(ints) <= 1:
        return roots
    g = math.gcd(*(abs(v) for v in ints))
    ints = [v // g for v in ints]
    lead, const = abs(ints[-1]), abs(ints[0])
    nums = _divisors_up_to(const, box)
    dens = _divisors_up_to(lead, box)
    deg = len(ints) - 1
    for b in dens:
        for a in nums:
            if math.gcd(a, b) != 1:
                continue
            for num in (a, -a):
                # evaluate sum ints[j] * num^j * b^(deg-j) exactly
                acc = 0
                npow = 1
                for j in range(deg + 1):
                    acc += ints[j] * npow * b ** (deg - j)
                    npow *= num
                if acc == 0:
                    roots.append(Fraction(num, b))
    return roots


def _divisors_up_to(n: int, cap: int) -> List[int]:
    n = abs(n)
    return [d for d in range(1, min(n, cap) + 1) if n % d == 0]
