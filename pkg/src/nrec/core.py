"""Exact integer dynamics of a single threshold neuron with memory.

The recurrence is x(n) = 1(sum_j a_j * x(n-j) - theta) with the convention
1[u] = 1 iff u >= 0.  Coefficients and threshold are stored at twice their
nominal value so that families whose entries involve theta/2 stay exact
integers.  Any common positive scaling leaves the output bits unchanged.

A window holds the k most recent output bits packed into an integer:
bit (j-1) of the value is x(n-j), so bit 0 is the most recent sample and
the successor of a window is a shift-and-insert.
"""

from dataclasses import dataclass

from .errors import CoefficientOverflowError, CycleNotFound, WindowSizeError

INT64_MAX = 2**63 - 1

DEFAULT_MAX_STEPS = 10**7


@dataclass(frozen=True)
class NeuronEquation:
    """Immutable coefficient vector + threshold, in doubled scale.

    coeffs2[j-1] holds 2*a_j for lag j = 1..memory_k; threshold2 = 2*theta.
    """

    memory_k: int
    coeffs2: tuple
    threshold2: int

    def __post_init__(self):
        if self.memory_k < 1:
            raise ValueError("memory_k must be >= 1")
        object.__setattr__(self, "coeffs2", tuple(int(c) for c in self.coeffs2))
        if len(self.coeffs2) != self.memory_k:
            raise ValueError(
                "expected %d coefficients, got %d" % (self.memory_k, len(self.coeffs2))
            )
        # Worst-case |potential| + |threshold| must fit in int64 so the
        # census kernels can run on fixed-width integers.
        worst = self.memory_k * max(abs(c) for c in self.coeffs2) + abs(self.threshold2)
        if worst > INT64_MAX:
            raise CoefficientOverflowError(
                "worst-case potential %d exceeds int64 range" % worst
            )

    @property
    def mask(self):
        return (1 << self.memory_k) - 1


@dataclass(frozen=True)
class StateWindow:
    """The memory_k most recent bits, packed as described in the module docstring."""

    length: int
    value: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError("value out of range for %d-bit window" % self.length)

    @classmethod
    def from_lags(cls, length, lags):
        """Window with ones exactly at the given lags j (1-based, most recent j=1)."""
        value = 0
        for j in lags:
            if not 1 <= j <= length:
                raise ValueError("lag %d outside [1, %d]" % (j, length))
            value |= 1 << (j - 1)
        return cls(length, value)

    @classmethod
    def from_time_word(cls, word):
        """Window after ingesting the time-ordered bit word x(0)..x(k-1)."""
        k = len(word)
        value = 0
        for t, bit in enumerate(word):
            if bit:
                value |= 1 << (k - 1 - t)
        return cls(k, value)

    def to_time_word(self):
        """Inverse of from_time_word: the bits x(0)..x(k-1) in time order."""
        return [(self.value >> (self.length - 1 - t)) & 1 for t in range(self.length)]

    def bits(self):
        """Bit list indexed by (j-1): entry i is x(n-1-i)."""
        return [(self.value >> i) & 1 for i in range(self.length)]


@dataclass(frozen=True)
class CycleSummary:
    transient: int
    period: int
    attractor_key: int
    attractor_bits: tuple


def _check_window(eq, w):
    if w.length != eq.memory_k:
        raise WindowSizeError(
            "window length %d != memory %d" % (w.length, eq.memory_k)
        )


def evaluate_potential(eq, w):
    """Doubled-scale potential: sum of 2*a_j over lags j where the window is 1."""
    _check_window(eq, w)
    total = 0
    v = w.value
    coeffs2 = eq.coeffs2
    while v:
        lsb = v & -v
        total += coeffs2[lsb.bit_length() - 1]
        v ^= lsb
    return total


def _step_value(coeffs2, threshold2, mask, v):
    """Successor of a raw window value; hot path shared by simulate/detect."""
    total = 0
    u = v
    while u:
        lsb = u & -u
        total += coeffs2[lsb.bit_length() - 1]
        u ^= lsb
    bit = 1 if total - threshold2 >= 0 else 0
    return ((v << 1) & mask) | bit


def step(eq, w):
    """One update: returns (fired bit, successor window)."""
    _check_window(eq, w)
    nxt = _step_value(eq.coeffs2, eq.threshold2, eq.mask, w.value)
    return nxt & 1, StateWindow(eq.memory_k, nxt)


def simulate(eq, init, n_steps):
    """The output bits x(k), x(k+1), ... for n_steps updates from init."""
    _check_window(eq, init)
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    coeffs2, threshold2, mask = eq.coeffs2, eq.threshold2, eq.mask
    v = init.value
    out = []
    for _ in range(n_steps):
        v = _step_value(coeffs2, threshold2, mask, v)
        out.append(v & 1)
    return out


def detect_cycle(eq, init, max_steps=DEFAULT_MAX_STEPS):
    """Minimal transient T and period p of the window trajectory from init.

    Records every visited window; the first repeat of a deterministic map
    yields the componentwise-minimal (T, p).
    """
    _check_window(eq, init)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    coeffs2, threshold2, mask = eq.coeffs2, eq.threshold2, eq.mask
    seen = {init.value: 0}
    path = [init.value]
    v = init.value
    for t in range(1, max_steps + 1):
        v = _step_value(coeffs2, threshold2, mask, v)
        if v in seen:
            transient = seen[v]
            period = t - transient
            cycle = path[transient:transient + period]
            # Output bit emitted from a window is bit 0 of its successor;
            # the successor of the last cycle window wraps to the first.
            word = tuple(cycle[(i + 1) % period] & 1 for i in range(period))
            key = min(cycle)
            return CycleSummary(transient, period, key, word)
        seen[v] = t
        path.append(v)
    raise CycleNotFound("no repetition within %d steps" % max_steps)


def canonical_cycle_key(eq, w):
    """Minimum window encoding over the cycle through w (w must lie on a cycle)."""
    _check_window(eq, w)
    coeffs2, threshold2, mask = eq.coeffs2, eq.threshold2, eq.mask
    best = w.value
    v = _step_value(coeffs2, threshold2, mask, w.value)
    while v != w.value:
        if v < best:
            best = v
        v = _step_value(coeffs2, threshold2, mask, v)
    return best
