"""Support sets, set periods, and ell-chains of periodic 0-1 sequences.

Two chain notions coexist: a finite chain is any arithmetic progression of
step ell inside the support; a COMPLETE chain is one whose whole +ell orbit
mod T lies in the support.  The common-spike machinery works with complete
chains.
"""

from dataclasses import dataclass
from math import gcd

from .errors import NotCoprime

COMPLETE = "COMPLETE"


@dataclass(frozen=True)
class PeriodicBinarySequence:
    """y(t) = 1 iff (t mod modulus_T) is in support."""

    modulus_T: int
    support: frozenset

    def __post_init__(self):
        if self.modulus_T < 1:
            raise ValueError("modulus_T must be >= 1")
        object.__setattr__(self, "support", frozenset(self.support))
        if any(not 0 <= t < self.modulus_T for t in self.support):
            raise ValueError("support residues must lie in [0, T)")

    @classmethod
    def from_word(cls, word):
        return cls(len(word), frozenset(t for t, b in enumerate(word) if b))

    def value(self, t):
        return 1 if t % self.modulus_T in self.support else 0

    def shifted(self, l):
        return frozenset((t + l) % self.modulus_T for t in self.support)


@dataclass(frozen=True)
class ChainWitness:
    offset_t: int
    step_ell: int
    length_s: object  # positive int, or COMPLETE


def set_period(seq):
    """Smallest gamma >= 1 with support + gamma == support; always divides T."""
    for gamma in range(1, seq.modulus_T + 1):
        if seq.modulus_T % gamma == 0 and seq.shifted(gamma) == seq.support:
            return gamma
    return seq.modulus_T


def divides_iff_shift(seq, k):
    """Whether support + k == support (equivalently, set_period(seq) divides k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return seq.shifted(k) == seq.support


def find_complete_chains(seq, ell):
    """All offsets whose entire +ell orbit mod T lies in the support.

    The orbit of a is the coset a + gZ_T with g = gcd(ell, T), so offsets
    range over [0, g).
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    T = seq.modulus_T
    g = gcd(ell, T)
    out = []
    for a in range(g):
        if all((a + i) % T in seq.support for i in range(0, T, g)):
            out.append(ChainWitness(a, ell, COMPLETE))
    return out


def egcd(a, b):
    """(g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return old_r, old_x, old_y


def common_spike(a, ell1, b, ell2):
    """Nonnegative witness (t, i0, j0) with t = a + i0*ell1 = b + j0*ell2.

    Uses the Bezout pair n1*ell1 + n2*ell2 = 1 and the shift
    M = 1 + |n1(b-a)| + |n2(b-a)| to push both multipliers nonnegative.
    Not the minimal CRT solution; see minimal_common_spike for that.
    """
    if gcd(ell1, ell2) != 1:
        raise NotCoprime("gcd(%d, %d) != 1" % (ell1, ell2))
    if a < 0 or b < 0:
        raise ValueError("offsets must be nonnegative")
    _, n1, n2 = egcd(ell1, ell2)
    diff = b - a
    m = 1 + abs(n1 * diff) + abs(n2 * diff)
    i0 = n1 * diff + m * ell2
    j0 = -n2 * diff + m * ell1
    t = a + i0 * ell1
    assert i0 >= 0 and j0 >= 0 and t == b + j0 * ell2
    return t, i0, j0


def minimal_common_spike(a, ell1, b, ell2):
    """Smallest t >= 0 with t = a (mod ell1) and t = b (mod ell2), by scan."""
    if gcd(ell1, ell2) != 1:
        raise NotCoprime("gcd(%d, %d) != 1" % (ell1, ell2))
    for t in range(ell1 * ell2):
        if t % ell1 == a % ell1 and t % ell2 == b % ell2:
            return t
    raise AssertionError("CRT guarantees a solution below ell1*ell2")


def verify_common_spike(seq, ell1, ell2):
    """A t with y(t) = y(t+ell1) = y(t+ell2) = 1, when complete chains exist.

    Returns None (absent) when the sequence lacks a complete ell1-chain or a
    complete ell2-chain.
    """
    if gcd(ell1, ell2) != 1:
        raise NotCoprime("gcd(%d, %d) != 1" % (ell1, ell2))
    c1 = find_complete_chains(seq, ell1)
    c2 = find_complete_chains(seq, ell2)
    if not c1 or not c2:
        return None
    a = c1[0].offset_t
    b = c2[0].offset_t
    t, _, _ = common_spike(a, ell1, b, ell2)
    assert seq.value(t) == 1 and seq.value(t + ell1) == 1 and seq.value(t + ell2) == 1
    return t


def common_spike_suite(trials, seed, max_step=100, max_offset=1000):
    """Randomized witness checks against the minimal CRT solution."""
    import random

    rng = random.Random("spike:%s:%s" % (seed, trials))
    failures = []
    for trial in range(trials):
        while True:
            ell1 = rng.randint(1, max_step)
            ell2 = rng.randint(1, max_step)
            if gcd(ell1, ell2) == 1:
                break
        a = rng.randint(0, max_offset)
        b = rng.randint(0, max_offset)
        t, i0, j0 = common_spike(a, ell1, b, ell2)
        t_min = minimal_common_spike(a, ell1, b, ell2)
        ok = (
            i0 >= 0
            and j0 >= 0
            and t == a + i0 * ell1 == b + j0 * ell2
            and t % ell1 == a % ell1
            and t % ell2 == b % ell2
            and t % (ell1 * ell2) == t_min
        )
        if not ok:
            failures.append({"trial": trial, "a": a, "ell1": ell1,
                             "b": b, "ell2": ell2, "t": t})
    return {"pass": not failures, "trials": trials, "failures": failures}


def attractor_chain_profile(word, params):
    """Complete-chain census of an attractor word against the prime structure.

    Lists complete ell-chains for every ell in [1, k] and flags a violation
    when a non-null attractor carries chains for two distinct primes, or any
    chain whose step is not a multiple of one of the construction primes.
    """
    seq = PeriodicBinarySequence.from_word(word)
    chains = {}
    for ell in range(1, params.k + 1):
        found = find_complete_chains(seq, ell)
        if found:
            chains[ell] = found
    null_word = not seq.support
    primes_with_chain = set()
    stray_steps = []
    for ell in chains:
        owners = [p for p in params.primes if ell % p == 0]
        if owners:
            primes_with_chain.update(owners)
        else:
            stray_steps.append(ell)
    violation = (not null_word) and (len(primes_with_chain) > 1 or bool(stray_steps))
    return {
        "null": null_word,
        "chains": chains,
        "primes_with_chain": sorted(primes_with_chain),
        "stray_steps": sorted(stray_steps),
        "violation": violation,
    }
