"""Dense polynomial arithmetic over Z_m and the per-prime sparsest-shift search.

The grid-backed operations (interpolation from the full evaluation grid
{0, ..., p-1}, Taylor shift by index rotation, shift search) require a prime
modulus and degree < p.  Small list-based helpers at the bottom work over any
modulus and are shared with the exponent-polynomial machinery.
"""

import math
from collections import Counter
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .modular_core import inv_mod, is_prime

# Full-grid interpolation switches from O(p^2) Newton to the Lagrange
# power-sum form above this point.
NEWTON_THRESHOLD = 512

# Below this modulus, p * (p-1)^2 < 2^53 keeps float64 dot products exact.
_EXACT_DOT_LIMIT = 1 << 17

# Lagrange power sums switch from one matrix product to a chirp FFT here.
_FFT_THRESHOLD = 4096


class DensePolyMod:
    """Dense polynomial over Z_m: coefficient tuple indexed by degree.

    Trailing zeros are trimmed; the zero polynomial has an empty tuple and
    degree -1.  Instances are immutable except for a lazily cached full
    evaluation grid.
    """

    __slots__ = ("modulus", "coeffs", "_grid")

    def __init__(self, modulus: int, coeffs, _grid=None):
        if modulus < 2:
            raise ValueError("modulus must be >= 2")
        if isinstance(coeffs, np.ndarray):
            arr = coeffs % modulus
            nz = np.nonzero(arr)[0]
            c = arr[: int(nz[-1]) + 1].tolist() if nz.size else []
        else:
            c = [int(x) % modulus for x in coeffs]
            while c and c[-1] == 0:
                c.pop()
        self.modulus = modulus
        self.coeffs = tuple(c)
        if _grid is None:
            self._grid = None
        elif isinstance(_grid, np.ndarray):
            self._grid = tuple(_grid.tolist())
        else:
            self._grid = tuple(int(v) for v in _grid)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __call__(self, x: int) -> int:
        y = 0
        for c in reversed(self.coeffs):
            y = (y * x + c) % self.modulus
        return y

    def __eq__(self, other):
        return (
            isinstance(other, DensePolyMod)
            and self.modulus == other.modulus
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.modulus, self.coeffs))

    def __repr__(self):
        return f"DensePolyMod({self.modulus}, {list(self.coeffs)})"


class MinShift(NamedTuple):
    gamma: int
    tau: int
    tie: bool


# ---------------- numpy modular kernels ----------------

def _vec_pow(base: np.ndarray, e: int, p: int) -> np.ndarray:
    """Elementwise base**e mod p by square-and-multiply (int64, p < 2^31)."""
    r = np.ones_like(base)
    b = base % p
    while e:
        if e & 1:
            r = r * b % p
        b = b * b % p
        e >>= 1
    return r


def _interp_newton(values: np.ndarray, p: int) -> np.ndarray:
    """Newton interpolation on the nodes 0..p-1 via forward differences."""
    d = values
    newt = np.empty(p, dtype=np.int64)
    for k in range(p):
        newt[k] = d[0]
        d = (d[1:] - d[:-1]) % p
    inv_fact = [1] * p
    f = 1
    for k in range(1, p):
        f = f * k % p
        inv_fact[k] = inv_mod(f, p)
    res = np.zeros(p, dtype=np.int64)
    basis = np.array([1], dtype=np.int64)
    for k in range(p):
        nk = int(newt[k]) * inv_fact[k] % p
        if nk:
            res[: k + 1] = (res[: k + 1] + nk * basis) % p
        if k + 1 < p:
            nb = np.zeros(k + 2, dtype=np.int64)
            nb[1:] = basis
            nb[: k + 1] = (nb[: k + 1] - k * basis) % p
            basis = nb
    return res


def _interp_lagrange(values: np.ndarray, p: int) -> np.ndarray:
    """Lagrange interpolation on the full grid of Z_p.

    The node polynomial x^p - x has derivative -1 at every node, so the
    coefficients collapse to power sums c_j = -sum_i v_i * inv(i)^j; these
    are an order-(p-1) discrete Fourier transform over Z_p, computed by one
    exact matrix product for moderate p and a chirp FFT beyond that.
    """
    s = _power_sums_matmul(values, p) if p <= _FFT_THRESHOLD else _power_sums_fft(values, p)
    c = np.empty(p, dtype=np.int64)
    c[1:] = (p - s) % p
    c[0] = values[0]
    c[p - 1] = (c[p - 1] - values[0]) % p
    return c


def _power_sums_matmul(v: np.ndarray, p: int) -> np.ndarray:
    """s_j = sum_i v_i inv(i)^j for j = 1..p-1 via baby-step/giant-step."""
    u = _vec_pow(np.arange(1, p, dtype=np.int64), p - 2, p)
    m = math.isqrt(p - 1) + 1
    blocks = -((p - 1) // -m)
    baby = np.empty((m, p - 1), dtype=np.float64)
    row = v[1:] * u % p
    baby[0] = row
    for b in range(1, m):
        row = row * u % p
        baby[b] = row
    um = _vec_pow(u, m, p)
    giant = np.empty((blocks, p - 1), dtype=np.float64)
    grow = np.ones(p - 1, dtype=np.int64)
    giant[0] = grow
    for a in range(1, blocks):
        grow = grow * um % p
        giant[a] = grow
    sums = baby @ giant.T  # exact: p * (p-1)^2 < 2^53
    return sums.T.reshape(-1)[: p - 1].astype(np.int64) % p


def _primitive_root(p: int) -> int:
    """A generator of the multiplicative group of Z_p."""
    n = p - 1
    factors = set()
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            factors.add(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        factors.add(m)
    for g in range(2, p):
        if all(pow(g, n // r, p) != 1 for r in factors):
            return g
    raise AssertionError("no primitive root found for a prime modulus")


def _power_sums_fft(v: np.ndarray, p: int) -> np.ndarray:
    """Power sums as a Bluestein chirp transform, O(p log p) and exact.

    With a generator g, s_j = sum_a W[a] g^(a*j) after permuting v by
    discrete logarithms; 2aj = a(a-1) + j(j+1) - (j-a)(j-a+1) turns that
    into one linear convolution, done in float FFTs over 9-bit limbs so
    every intermediate stays far below 2^53.
    """
    n = p - 1
    g = _primitive_root(p)
    # power and discrete-log tables via one baby-step/giant-step outer product
    m = math.isqrt(n) + 1
    small = np.empty(m, dtype=np.int64)
    small[0] = 1
    for i in range(1, m):
        small[i] = small[i - 1] * g % p
    big_step = int(small[m - 1]) * g % p
    blocks = -(n // -m)
    big = np.empty(blocks, dtype=np.int64)
    big[0] = 1
    for i in range(1, blocks):
        big[i] = big[i - 1] * big_step % p
    pw = (np.outer(big, small) % p).reshape(-1)[:n]  # pw[a] = g^a mod p
    # W[a] = v[g^(-a)]
    w = v[pw[(n - np.arange(n)) % n]]
    # chirp tables: 2aj = a(a-1) + j(j+1) - (j-a)(j-a+1)
    ar = np.arange(n, dtype=np.int64)
    t_a = (ar * (ar - 1) // 2) % n
    t_j = (ar * (ar + 1) // 2) % n
    k = np.arange(-(n - 1), n, dtype=np.int64)
    t_k = (k * (k + 1)) // 2 % n
    a_seq = w * pw[t_a] % p
    b_seq = pw[(n - t_k) % n]
    conv = _exact_convolve(a_seq, b_seq, p)
    # k runs from -(n-1), so the term for exponent j sits at conv[j + n - 1]
    s = conv[n - 1 : 2 * n - 1] * pw[t_j] % p
    # callers index sums from j = 1; exponent j = p-1 wraps to the j = 0 slot
    return np.roll(s, -1)


def _exact_convolve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Linear convolution of int64 sequences with entries < p < 2^17, exact."""
    size = len(a) + len(b) - 1
    nfft = 1 << (size - 1).bit_length()
    a_lo, a_hi = (a & 511).astype(np.float64), (a >> 9).astype(np.float64)
    b_lo, b_hi = (b & 511).astype(np.float64), (b >> 9).astype(np.float64)
    fa_lo = np.fft.rfft(a_lo, nfft)
    fa_hi = np.fft.rfft(a_hi, nfft)
    fb_lo = np.fft.rfft(b_lo, nfft)
    fb_hi = np.fft.rfft(b_hi, nfft)
    c00 = np.rint(np.fft.irfft(fa_lo * fb_lo, nfft)[:size]).astype(np.int64)
    c11 = np.rint(np.fft.irfft(fa_hi * fb_hi, nfft)[:size]).astype(np.int64)
    cx = np.rint(np.fft.irfft(fa_lo * fb_hi + fa_hi * fb_lo, nfft)[:size]).astype(np.int64)
    return (c00 % p + (cx % p << 9) + (c11 % p << 18)) % p


def _interp_schoolbook(values, p: int) -> list:
    """Arbitrary-precision fallback for moduli past the exact-float range."""
    coeffs = [0] * p
    inv = [0, 1] + [0] * (p - 2)
    for i in range(2, p):
        inv[i] = -(p // i) * inv[p % i] % p
    for i, vi in enumerate(values):
        if i == 0 or vi == 0:
            continue
        u = inv[i]
        w = vi * u % p
        for j in range(1, p):
            coeffs[j] = (coeffs[j] - w) % p
            w = w * u % p
    coeffs[0] = values[0] % p
    coeffs[p - 1] = (coeffs[p - 1] - values[0]) % p
    return coeffs


def _eval_grid(f: DensePolyMod) -> list:
    """Evaluate f on the whole grid 0..p-1 (p prime, deg f < p)."""
    p = f.modulus
    if not f.coeffs:
        return [0] * p
    if p <= NEWTON_THRESHOLD or p >= _EXACT_DOT_LIMIT or len(f.coeffs) < 16:
        xs = np.arange(p, dtype=object if p >= _EXACT_DOT_LIMIT else np.int64)
        acc = np.zeros_like(xs)
        for c in reversed(f.coeffs):
            acc = (acc * xs + int(c)) % p
        return acc.tolist()
    coeffs = np.zeros(len(f.coeffs), dtype=np.int64)
    coeffs[:] = f.coeffs
    m = math.isqrt(len(coeffs)) + 1
    blocks = -(len(coeffs) // -m)
    pad = np.zeros(m * blocks, dtype=np.int64)
    pad[: len(coeffs)] = coeffs
    cmat = pad.reshape(blocks, m)  # cmat[a, b] = coeff of x^(a*m+b)
    xs = np.arange(1, p, dtype=np.int64)
    xm = _vec_pow(xs, m, p)
    giant = np.empty((p - 1, blocks), dtype=np.int64)
    giant[:, 0] = 1
    for a in range(1, blocks):
        giant[:, a] = giant[:, a - 1] * xm % p
    inner = (giant.astype(np.float64) @ cmat.astype(np.float64)).astype(np.int64) % p
    baby = np.empty((p - 1, m), dtype=np.int64)
    baby[:, 0] = 1
    for b in range(1, m):
        baby[:, b] = baby[:, b - 1] * xs % p
    vals = (baby * inner).sum(axis=1) % p
    out = [int(f.coeffs[0])]
    out.extend(vals.tolist())
    return out


# ---------------- spec operations ----------------

def interpolate_range(values: Sequence[int], p: int, *, threshold: Optional[int] = None) -> DensePolyMod:
    """Unique polynomial of degree < p through (i, values[i]) for i in 0..p-1."""
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    if p < (1 << 31):
        vals = np.asarray(values, dtype=np.int64)
        if vals.ndim != 1 or vals.shape[0] != p:
            raise ValueError(f"need exactly {p} values, got {vals.shape[0] if vals.ndim == 1 else '?'}")
        if vals.size and (int(vals.min()) < 0 or int(vals.max()) >= p):
            raise ValueError("values must already be reduced modulo p")
        cut = NEWTON_THRESHOLD if threshold is None else threshold
        if p <= max(cut, 2):
            coeffs = _interp_newton(vals, p)
        elif p < _EXACT_DOT_LIMIT:
            coeffs = _interp_lagrange(vals, p)
        else:
            coeffs = np.asarray(_interp_schoolbook(vals.tolist(), p), dtype=np.int64)
        return DensePolyMod(p, coeffs, _grid=vals)
    # arbitrary-size modulus: exact but quadratic in pure Python
    values = [int(v) for v in values]
    if len(values) != p:
        raise ValueError(f"need exactly {p} values, got {len(values)}")
    if any(not 0 <= v < p for v in values):
        raise ValueError("values must already be reduced modulo p")
    return DensePolyMod(p, _interp_schoolbook(values, p), _grid=values)


def evaluate_range(f: DensePolyMod) -> tuple:
    """Full evaluation grid of f over Z_p, cached on the polynomial."""
    if f._grid is None:
        p = f.modulus
        if not is_prime(p):
            raise ValueError("grid evaluation requires a prime modulus")
        if f.degree >= p:
            raise ValueError("degree must be < modulus for grid semantics")
        f._grid = tuple(_eval_grid(f))
    return f._grid


def taylor_shift(f: DensePolyMod, gamma: int, *, threshold: Optional[int] = None) -> DensePolyMod:
    """Return g with g(x) = f(x + gamma) over Z_p.

    Works on the evaluation grid: shifting the argument only rotates the
    indices of the already-evaluated points, so the cost is one
    re-interpolation.
    """
    p = f.modulus
    gamma = gamma % p
    grid = evaluate_range(f)
    if gamma == 0:
        return f
    rolled = grid[gamma:] + grid[:gamma]
    return interpolate_range(rolled, p, threshold=threshold)


def tau(f: DensePolyMod) -> int:
    """Number of nonzero, non-constant terms of f."""
    return sum(1 for c in f.coeffs[1:] if c)


def min_shift(
    f: DensePolyMod,
    *,
    tau_cap: Optional[int] = None,
    threshold: Optional[int] = None,
) -> Optional[MinShift]:
    """Shift gamma minimizing tau(f(x + gamma)) over all of Z_p.

    Returns (gamma, tau, tie) equal to the exhaustive search over every
    gamma, with the smallest gamma on ties.  When deg f >= 2*tau + 1 the
    winner is provably the unique sparsest shift and tie is False.

    With ``tau_cap`` set, only shifts achieving tau <= tau_cap are of
    interest: the unique such shift is returned if it exists (requires
    deg f >= 2*tau_cap + 1 for uniqueness), else None.  This is the cheap
    path used by the shift-recovery loop.
    """
    p = f.modulus
    if not is_prime(p):
        raise ValueError("min_shift requires a prime modulus")
    if f.degree >= p:
        raise ValueError("degree must be < modulus")
    d = f.degree
    if d <= 0:
        res = MinShift(0, 0, p > 1)
        return res if tau_cap is None or res.tau <= tau_cap else res
    smax = (d - 1) // 2
    if tau_cap is not None:
        s = min(tau_cap, smax)
        if s < 1:
            res = _min_shift_exhaustive(f, threshold)
            return res if res.tau <= tau_cap else None
        hit = _min_shift_candidates(f, s, threshold)
        return hit  # None when no shift reaches tau <= s <= tau_cap
    cut = NEWTON_THRESHOLD if threshold is None else threshold
    if p <= max(cut, 2) or smax < 1:
        return _min_shift_exhaustive(f, threshold)
    s = 1
    while True:
        hit = _min_shift_candidates(f, s, threshold)
        if hit is not None:
            return hit
        if s >= smax:
            break
        s = min(2 * s, smax)
    return _min_shift_exhaustive(f, threshold)


# ---------------- shift search internals ----------------

def _hasse_rows(f: DensePolyMod, ks) -> dict:
    """Coefficient polynomials of f(x+y): row k maps y to the x^k coefficient.

    Row k is sum_j C(j, k) f_j y^(j-k); with deg f < p no binomial in range
    vanishes mod p, so row k has degree exactly deg f - k.
    """
    p, d = f.modulus, f.degree
    inv = [0, 1] + [0] * max(0, d - 1)
    for i in range(2, d + 1):
        inv[i] = -(p // i) * inv[p % i] % p
    rows = {}
    for k in ks:
        binom = 1
        row = []
        for j in range(k, d + 1):
            row.append(binom * f.coeffs[j] % p)
            if j < d:
                binom = binom * (j + 1) % p * inv[j + 1 - k] % p
        rows[k] = row
    return rows


def _grid_eval_small(row, p: int) -> np.ndarray:
    """Evaluate a short coefficient list on the whole grid of Z_p."""
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(row):
        acc = (acc * xs + int(c)) % p
    return acc


def _min_shift_candidates(f: DensePolyMod, s: int, threshold) -> Optional[MinShift]:
    """Find the unique shift with tau <= s, if any (requires deg f >= 2s+1).

    Any such shift zeroes at least s+1 of the 2s coefficient polynomials
    directly below the leading one, so scanning their root sets is a
    complete candidate filter; each surviving candidate is checked exactly.
    """
    p, d = f.modulus, f.degree
    if d < 2 * s + 1:
        raise ValueError("candidate filter needs deg f >= 2s+1")
    band = range(d - 2 * s, d)
    rows = _hasse_rows(f, band)
    votes = Counter()
    for k in band:
        vals = _grid_eval_small(rows[k], p)
        for g in np.nonzero(vals == 0)[0]:
            votes[int(g)] += 1
    cands = sorted((g for g, v in votes.items() if v >= s + 1), key=lambda g: (-votes[g], g))
    for g in cands:
        t = tau(taylor_shift(f, g, threshold=threshold))
        if t <= s:
            return MinShift(g, t, False)
    return None


def _min_shift_exhaustive(f: DensePolyMod, threshold) -> MinShift:
    """Exact tau for every shift; smallest winning gamma, tie flag precise."""
    p, d = f.modulus, f.degree
    if d <= 0:
        return MinShift(0, 0, p > 1)
    if d <= 128 or p > 2048:
        taus = np.zeros(p, dtype=np.int64)
        rows = _hasse_rows(f, range(1, d + 1))
        for k in range(1, d + 1):
            taus += _grid_eval_small(rows[k], p) != 0
    else:
        taus = _tau_table_matmul(f)
    best = int(taus.min())
    where = np.nonzero(taus == best)[0]
    return MinShift(int(where[0]), best, len(where) > 1)


def _tau_table_matmul(f: DensePolyMod) -> np.ndarray:
    """tau of every shift at once: one interpolation matrix times all rolls."""
    p = f.modulus
    v = np.asarray(evaluate_range(f), dtype=np.int64)
    u = _vec_pow(np.arange(1, p, dtype=np.int64), p - 2, p)
    U = np.empty((p, p), dtype=np.float64)
    U[0, :] = 0.0
    U[0, 0] = 1.0
    row = (p - u) % p  # -u mod p
    U[1, 0] = 0.0
    U[1, 1:] = row
    acc = u.copy()
    for j in range(2, p):
        acc = acc * u % p
        U[j, 0] = 0.0
        U[j, 1:] = (p - acc) % p
    U[p - 1, 0] = p - 1
    idx = (np.arange(p)[:, None] + np.arange(p)[None, :]) % p
    V = v[idx].astype(np.float64)
    C = (U @ V).astype(np.int64) % p
    return np.count_nonzero(C[1:, :], axis=0).astype(np.int64)


# ---------------- small list-based helpers over Z_m ----------------

def poly_trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul_mod(a: Sequence[int], b: Sequence[int], m: int) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % m
    return poly_trim(out)


def poly_sub_mod(a: Sequence[int], b: Sequence[int], m: int) -> list:
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        av = a[i] if i < len(a) else 0
        bv = b[i] if i < len(b) else 0
        out[i] = (av - bv) % m
    return poly_trim(out)


def poly_rem_mod(a: Sequence[int], b: Sequence[int], m: int) -> list:
    """Remainder of a modulo b over Z_m; the leading coeff of b must be invertible."""
    a = [x % m for x in a]
    poly_trim(a)
    db = len(b) - 1
    if db < 0:
        raise ZeroDivisionError("division by zero polynomial")
    inv_lead = inv_mod(b[-1], m)
    while len(a) - 1 >= db:
        k = len(a) - 1 - db
        factor = a[-1] * inv_lead % m
        for i in range(db + 1):
            a[k + i] = (a[k + i] - factor * b[i]) % m
        poly_trim(a)
    return a


def poly_gcd_mod(a: Sequence[int], b: Sequence[int], m: int) -> list:
    """Monic gcd over Z_m (m prime)."""
    a, b = list(a), list(b)
    poly_trim(a)
    poly_trim(b)
    while b:
        a, b = b, poly_rem_mod(a, b, m)
    if a:
        inv_lead = inv_mod(a[-1], m)
        a = [x * inv_lead % m for x in a]
    return a


def poly_powmod(base: Sequence[int], e: int, mod_poly: Sequence[int], m: int) -> list:
    """base**e modulo mod_poly over Z_m."""
    result = [1]
    b = poly_rem_mod(list(base), mod_poly, m)
    while e:
        if e & 1:
            result = poly_rem_mod(poly_mul_mod(result, b, m), mod_poly, m)
        b = poly_rem_mod(poly_mul_mod(b, b, m), mod_poly, m)
        e >>= 1
    return result
