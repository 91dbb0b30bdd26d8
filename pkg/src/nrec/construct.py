"""Coefficient families parameterized by (m, theta, d).

All builders return NeuronEquation objects in doubled scale:

  coef_1  -- memory 6m; excitatory pairs at lags (p_i, 2p_i) for every prime
             p_i in the open interval (2m, 3m), strongly inhibitory elsewhere.
  coef_2  -- s-fold interleaving of a base equation (lag j -> lag s*j).
  coef_3  -- memory (6m-1)*s with the parity-dependent band structure over
             the multiple-sets R1(alpha_i).
  z(n,d)  -- coef_1 with primes p_0..p_d suppressed, then interleaved s-fold;
             suppressing one more prime divides the reachable cycle lengths.
"""

from dataclasses import dataclass

from .core import NeuronEquation, StateWindow
from .errors import (
    IndexOutOfRange,
    NoPrimesInInterval,
    R1Collision,
    SOutOfRange,
    ThetaTooSmall,
)


def primes_in_open_interval(lo, hi):
    """All primes p with lo < p < hi, ascending (deterministic sieve)."""
    if hi <= lo + 1:
        return []
    n = hi - 1
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    p = 2
    while p * p <= n:
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
        p += 1
    return [q for q in range(lo + 1, hi) if flags[q]]


@dataclass(frozen=True)
class ConstructionParams:
    """Derived parameters: primes in (2m, 3m), their alphas, and k = 6m."""

    m: int
    theta: int
    primes: tuple
    alphas: tuple
    s: int
    k: int


def derive_params(m, theta=None):
    if m < 2:
        raise NoPrimesInInterval("no prime in (%d, %d)" % (2 * m, 3 * m))
    if theta is None:
        theta = 2 * m
    if theta < 2 * m:
        raise ThetaTooSmall("theta=%d < 2m=%d" % (theta, 2 * m))
    primes = tuple(primes_in_open_interval(2 * m, 3 * m))
    if not primes:
        raise NoPrimesInInterval("no prime in (%d, %d)" % (2 * m, 3 * m))
    alphas = tuple(3 * m - p for p in primes)
    return ConstructionParams(
        m=m, theta=theta, primes=primes, alphas=alphas, s=len(primes), k=6 * m
    )


def inhibitory2(params):
    """Doubled-scale value of the 'otherwise' coefficient -k(theta+m)."""
    return -2 * params.k * (params.theta + params.m)


def build_coef1(params):
    """The base family: theta/2 -+ alpha_i at lags p_i and 2p_i."""
    inh = inhibitory2(params)
    coeffs2 = [inh] * params.k
    for p, a in zip(params.primes, params.alphas):
        coeffs2[p - 1] = params.theta - 2 * a
        coeffs2[2 * p - 1] = params.theta + 2 * a
    return NeuronEquation(params.k, tuple(coeffs2), 2 * params.theta)


def canonical_initial(params, i):
    """The seed word 0^{2a} 1 0^{3m-a-1} 1 0^{3m-a-1} for prime index i, as a window.

    Ones sit at time indices 2*alpha_i and 3m+alpha_i, i.e. at lags 2p_i and p_i.
    """
    if not 0 <= i < params.s:
        raise IndexOutOfRange("prime index %d outside [0, %d]" % (i, params.s - 1))
    p = params.primes[i]
    return StateWindow.from_lags(params.k, [p, 2 * p])


def interleave(base, s):
    """Embed s independent copies of base: coefficient of lag s*j is base lag j."""
    if s < 1:
        raise ValueError("s must be >= 1")
    h = s * base.memory_k
    coeffs2 = [0] * h
    for j in range(1, base.memory_k + 1):
        coeffs2[s * j - 1] = base.coeffs2[j - 1]
    return NeuronEquation(h, tuple(coeffs2), base.threshold2)


def r1_sets(params):
    """R1(alpha_i) = {j*p_i : 1 <= j <= 2s}, checked pairwise disjoint."""
    sets = [frozenset(j * p for j in range(1, 2 * params.s + 1)) for p in params.primes]
    for a in range(len(sets)):
        for b in range(a + 1, len(sets)):
            common = sets[a] & sets[b]
            if common:
                raise R1Collision(
                    "R1(%d) and R1(%d) share %s"
                    % (params.primes[a], params.primes[b], sorted(common))
                )
    return sets


def build_coef3(params):
    """The parity-dependent family on memory k2 = (6m-1)s with threshold 2s.

    Cases are evaluated in listed order, first match wins (the odd-s bands can
    be empty or overlap for small s).
    """
    s = params.s
    if s < 2 or (s % 2 == 1 and s < 3):
        raise SOutOfRange("coef_3 needs s >= 2 (even) or s >= 3 (odd), got s=%d" % s)
    k2 = (6 * params.m - 1) * s
    theta_bar = 2 * s
    sets = r1_sets(params)
    coeffs = [-4 * k2] * k2  # half scale; doubled on return
    if s % 2 == 0:
        for p, r1 in zip(params.primes, sets):
            cutoff2 = 3 * s * p  # compare 2j <= 3sp to keep the /2 exact
            for j in sorted(r1):
                coeffs[j - 1] = 2 if 2 * j <= cutoff2 else -2
    else:
        for p, r1 in zip(params.primes, sets):
            lo2 = (3 * s + 1) * p
            hi = (2 * s - 2) * p
            minus_one = ((2 * s - 1) * p, 2 * s * p)
            for j in sorted(r1):
                if 2 * j <= (3 * s - 1) * p:
                    coeffs[j - 1] = 2
                elif lo2 <= 2 * j <= 2 * hi:
                    coeffs[j - 1] = -2
                elif j in minus_one:
                    coeffs[j - 1] = -1
    return NeuronEquation(k2, tuple(2 * c for c in coeffs), 2 * theta_bar)


def build_z(params, d):
    """Bifurcation family member: coef_1 with primes p_0..p_d suppressed, interleaved s-fold."""
    return interleave(suppressed_coef1(params, d), params.s)


def suppressed_coef1(params, d):
    """The base equation underlying build_z (primes up to index d inhibited)."""
    if not 0 <= d < params.s:
        raise IndexOutOfRange("d=%d outside [0, %d]" % (d, params.s - 1))
    inh = inhibitory2(params)
    base = build_coef1(params)
    coeffs2 = list(base.coeffs2)
    for p in params.primes[: d + 1]:
        coeffs2[p - 1] = inh
        coeffs2[2 * p - 1] = inh
    return NeuronEquation(params.k, tuple(coeffs2), base.threshold2)


def admissible_periods(params, prime_subset):
    """{1} union {s * product(Q) : nonempty Q subset of prime_subset}.

    The lcm of any size-<=s multiset over distinct primes is the product of
    its distinct members, so subsets suffice.
    """
    subset = sorted(set(prime_subset))
    for p in subset:
        if p not in params.primes:
            raise ValueError("%d is not one of the construction primes" % p)
    out = {1}
    n = len(subset)
    for mask in range(1, 1 << n):
        prod = 1
        for i in range(n):
            if mask >> i & 1:
                prod *= subset[i]
        out.add(params.s * prod)
    return out


def interleaved_initial(slot_words):
    """Initial window of the s-fold interleaved system from per-slot time words.

    slot_words[r] is the k-bit time-ordered word of residue class r; the
    interleaved sample at time r + s*t is slot r's sample at time t.
    """
    s = len(slot_words)
    k = len(slot_words[0])
    if any(len(w) != k for w in slot_words):
        raise ValueError("all slot words must share the same length")
    y = [0] * (s * k)
    for r, word in enumerate(slot_words):
        for t, bit in enumerate(word):
            y[r + s * t] = bit
    return StateWindow.from_time_word(y)
