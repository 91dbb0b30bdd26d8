"""Basin-of-attraction censuses and the verification harnesses built on them.

The exact census runs in two passes over all 2^k windows:

  pass 1  computes the fired bit of every window (the successor is
          shift-and-insert, so one bit per state reconstructs the whole
          functional graph); bits are stored packed, 2^k bits total;
  pass 2  walks the functional graph once, finds each component's unique
          cycle, and credits every window of the component to that period.

Pass 1 is split into fixed chunks: the chunk grid never depends on the
partition count, so any partitioning produces byte-identical bits, and a
checkpoint file can record per-chunk completion for resumable runs.
"""

import hashlib
import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from . import _kernels
from .construct import (
    admissible_periods,
    build_coef1,
    build_z,
    canonical_initial,
    interleave,
    interleaved_initial,
)
from .core import NeuronEquation, StateWindow, detect_cycle
from .errors import (
    CheckpointMismatch,
    CycleNotFound,
    InvalidShapeParam,
    MemoryGuard,
    MTooSmall,
)
from .io import equation_digest

EXACT_K_LIMIT = 32

CHECKPOINT_MAGIC = b"NRE-CENSUS-1\n"
_HEADER_SIZE = 4096


@dataclass
class BasinCensus:
    """chi maps period -> number of initial windows converging to that period."""

    memory_k: int
    total: int
    chi: dict
    mode: str  # "exact" or "sampled"
    n_samples: int = None
    seed: int = None
    witnesses: dict = field(default_factory=dict)
    transients: dict = None
    # exact mode: one representative window per distinct cycle, as
    # (period, window_value) pairs; None when too many cycles to record
    attractors: list = None

    def periods(self):
        return {p for p, c in self.chi.items() if c > 0}


def potential_tables(eq):
    """Split the linear potential into two lookup tables (low/high window bits)."""
    klow = eq.memory_k // 2
    low = np.zeros(1, dtype=np.int64)
    for c in eq.coeffs2[:klow]:
        low = np.concatenate([low, low + c])
    high = np.zeros(1, dtype=np.int64)
    for c in eq.coeffs2[klow:]:
        high = np.concatenate([high, high + c])
    return low, high, klow


def _chunk_grid(eq):
    """Fixed pass-1 chunking: (klow, n_rows, rows_per_chunk, n_chunks)."""
    klow = eq.memory_k // 2
    n_rows = 1 << (eq.memory_k - klow)
    n_chunks = min(64, n_rows)
    return klow, n_rows, n_rows // n_chunks, n_chunks


def _compute_chunk(bits, eq, low, high, klow, row0, row1, block_rows=256):
    """Fired bits for high-table rows [row0, row1), written into the packed array."""
    row_states = 1 << klow
    for r in range(row0, row1, block_rows):
        rr = min(r + block_rows, row1)
        pot = high[r:rr, None] + low[None, :]
        fired = (pot >= eq.threshold2).reshape(-1)
        packed = np.packbits(fired, bitorder="little")
        start = r * row_states // 8
        bits[start:start + packed.size] = packed
    return bits


def pass1_fired_bits(eq, partitions=1, done=None, bits=None, on_chunk=None):
    """Packed fired bit per window.  The chunk grid is fixed, so the result is
    byte-identical for any partition count; `done` marks chunks to skip."""
    if eq.memory_k < 6:
        n = 1 << eq.memory_k
        fired = np.zeros(n, dtype=bool)
        low, high, klow = potential_tables(eq)
        lowmask = (1 << klow) - 1
        for v in range(n):
            fired[v] = low[v & lowmask] + high[v >> klow] >= eq.threshold2
        return np.packbits(fired, bitorder="little"), np.ones(1, dtype=bool)
    low, high, klow = potential_tables(eq)
    _, n_rows, rows_per_chunk, n_chunks = _chunk_grid(eq)
    if bits is None:
        bits = np.zeros((1 << eq.memory_k) // 8, dtype=np.uint8)
    if done is None:
        done = np.zeros(n_chunks, dtype=bool)
    if partitions < 1:
        raise ValueError("partitions must be >= 1")
    # contiguous partition ranges over the chunk grid
    bounds = [n_chunks * i // partitions for i in range(partitions + 1)]
    for pi in range(partitions):
        for c in range(bounds[pi], bounds[pi + 1]):
            if done[c]:
                continue
            _compute_chunk(bits, eq, low, high, klow,
                           c * rows_per_chunk, (c + 1) * rows_per_chunk)
            done[c] = True
            if on_chunk is not None:
                on_chunk(c, bits, done)
    return bits, done


class _Checkpoint:
    """Fixed-layout resumable state: header page, chunk bitmap page, bits payload."""

    def __init__(self, path, eq, n_chunks):
        self.path = path
        self.eq = eq
        self.n_chunks = n_chunks
        self.payload_bytes = (1 << eq.memory_k) // 8

    def _header(self, complete, chi, witnesses):
        doc = {
            "format": "NRE-CENSUS-1",
            "k": self.eq.memory_k,
            "digest": equation_digest(self.eq),
            "n_chunks": self.n_chunks,
            "complete": complete,
            "chi": {str(p): c for p, c in sorted(chi.items())} if chi is not None else None,
            "witnesses": {str(p): w for p, w in sorted(witnesses.items())}
            if witnesses is not None else None,
        }
        raw = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
        if len(CHECKPOINT_MAGIC) + len(raw) + 1 > _HEADER_SIZE:
            raise CheckpointMismatch("checkpoint header overflow")
        return (CHECKPOINT_MAGIC + raw + b"\n").ljust(_HEADER_SIZE, b"\x00")

    def create(self):
        with open(self.path, "wb") as f:
            f.write(self._header(False, None, None))
            f.write(b"\x00" * _HEADER_SIZE)
            f.truncate(2 * _HEADER_SIZE + self.payload_bytes)

    def load(self):
        """Returns (done, bits, finished_census_fields or None)."""
        with open(self.path, "rb") as f:
            head = f.read(_HEADER_SIZE)
            if not head.startswith(CHECKPOINT_MAGIC):
                raise CheckpointMismatch("bad magic")
            doc = json.loads(head[len(CHECKPOINT_MAGIC):].rstrip(b"\x00").decode())
            if doc["k"] != self.eq.memory_k or doc["digest"] != equation_digest(self.eq):
                raise CheckpointMismatch("checkpoint is for a different equation")
            if doc["n_chunks"] != self.n_chunks:
                raise CheckpointMismatch("chunk grid mismatch")
            bitmap = f.read(_HEADER_SIZE)
            done = np.frombuffer(bitmap[: self.n_chunks], dtype=np.uint8).astype(bool).copy()
            bits = np.fromfile(f, dtype=np.uint8, count=self.payload_bytes)
        finished = None
        if doc["complete"]:
            finished = (
                {int(p): c for p, c in doc["chi"].items()},
                {int(p): w for p, w in doc["witnesses"].items()},
            )
        return done, bits, finished

    def save_chunk(self, c, bits, done, f):
        chunk_bytes = self.payload_bytes // self.n_chunks
        f.seek(_HEADER_SIZE + c)
        f.write(b"\x01")
        f.seek(2 * _HEADER_SIZE + c * chunk_bytes)
        f.write(bits[c * chunk_bytes:(c + 1) * chunk_bytes].tobytes())
        f.flush()

    def finalize(self, chi, witnesses, f):
        f.seek(0)
        f.write(self._header(True, chi, witnesses))
        f.flush()


def full_census(eq, partitions=1, checkpoint_path=None, k_limit=EXACT_K_LIMIT):
    """Exact chi over all 2^k initial windows."""
    k = eq.memory_k
    if k > k_limit:
        raise MemoryGuard("memory_k=%d exceeds the exact-census limit %d" % (k, k_limit))

    ckpt = None
    done = bits = None
    if checkpoint_path is not None and k >= 6:
        _, _, _, n_chunks = _chunk_grid(eq)
        ckpt = _Checkpoint(checkpoint_path, eq, n_chunks)
        if os.path.exists(checkpoint_path):
            done, bits, finished = ckpt.load()
            if finished is not None:
                chi, witnesses = finished
                return BasinCensus(k, 1 << k, chi, "exact", witnesses=witnesses)
        else:
            ckpt.create()

    if ckpt is not None:
        with open(ckpt.path, "r+b") as f:
            bits, done = pass1_fired_bits(
                eq, partitions, done=done, bits=bits,
                on_chunk=lambda c, b, d: ckpt.save_chunk(c, b, d, f),
            )
            chi, witnesses, attractors = _pass2(bits, k)
            ckpt.finalize(chi, witnesses, f)
    else:
        bits, _ = pass1_fired_bits(eq, partitions)
        chi, witnesses, attractors = _pass2(bits, k)
    return BasinCensus(k, 1 << k, chi, "exact", witnesses=witnesses,
                       attractors=attractors)


def _pass2(bits, k):
    if k <= 24:
        dtype, white, gray = np.uint16, np.uint16(65535), np.uint16(65534)
        max_periods = 65000
    else:
        dtype, white, gray = np.uint8, np.uint8(255), np.uint8(254)
        max_periods = 250
    label = np.full(1 << k, white, dtype=dtype)
    periods, counts, reps, nper, cyc_periods, cyc_reps, ncyc = _kernels.pass2_census(
        bits, k, label, white, gray, max_periods, 65000
    )
    del label
    if nper < 0:
        raise MemoryGuard("more than %d distinct periods" % max_periods)
    chi = {int(periods[i]): int(counts[i]) for i in range(nper)}
    witnesses = {int(periods[i]): int(reps[i]) for i in range(nper)}
    attractors = None
    if ncyc >= 0:
        attractors = [(int(cyc_periods[i]), int(cyc_reps[i])) for i in range(ncyc)]
    return chi, witnesses, attractors


def perwindow_census(eq, k_limit=26):
    """Independent oracle census: per-window Brent detection, no graph sharing."""
    k = eq.memory_k
    if k > k_limit:
        raise MemoryGuard("memory_k=%d exceeds the oracle-census limit %d" % (k, k_limit))
    low, high, klow = potential_tables(eq)
    periods, counts, nper = _kernels.perwindow_census(
        low, high, klow, k, eq.threshold2, 65000
    )
    if nper < 0:
        raise MemoryGuard("more than 65000 distinct periods")
    chi = {int(periods[i]): int(counts[i]) for i in range(nper)}
    return BasinCensus(k, 1 << k, chi, "exact")


def seeded_window(k, seed, index):
    """Counter-based uniform window: platform-independent SHA-256 stream."""
    nbytes = (k + 7) // 8
    buf = b""
    block = 0
    while len(buf) < nbytes:
        buf += hashlib.sha256(("%s:%d:%d" % (seed, index, block)).encode()).digest()
        block += 1
    value = int.from_bytes(buf[:nbytes], "big") >> (8 * nbytes - k)
    return StateWindow(k, value)


def sampled_census(eq, n_samples, seed, max_steps=10**7):
    """chi over n_samples seeded random initial windows."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    chi = {}
    witnesses = {}
    transients = {}
    for i in range(n_samples):
        w = seeded_window(eq.memory_k, seed, i)
        try:
            cs = detect_cycle(eq, w, max_steps)
        except CycleNotFound as exc:
            raise CycleNotFound("sample index %d (seed %s): %s" % (i, seed, exc)) from exc
        chi[cs.period] = chi.get(cs.period, 0) + 1
        witnesses.setdefault(cs.period, w.value)
        transients[cs.transient] = transients.get(cs.transient, 0) + 1
    return BasinCensus(
        eq.memory_k, 1 << eq.memory_k, chi, "sampled",
        n_samples=n_samples, seed=seed, witnesses=witnesses, transients=transients,
    )


def verify_period_support(census, predicted):
    """PASS iff every period with nonzero count lies in the predicted set."""
    predicted = set(predicted)
    violators = [
        {"period": p, "count": c, "witness": census.witnesses.get(p)}
        for p, c in sorted(census.chi.items())
        if c > 0 and p not in predicted
    ]
    return {
        "pass": not violators,
        "predicted": sorted(predicted),
        "observed": sorted(census.periods()),
        "violators": violators,
    }


def _slot_words_for_primes(params, prime_multiset):
    """Per-slot time words: one canonical seed per listed prime, zeros elsewhere."""
    zero = [0] * params.k
    words = []
    for p in prime_multiset:
        words.append(canonical_initial(params, params.primes.index(p)).to_time_word())
    while len(words) < params.s:
        words.append(list(zero))
    return words


def verify_attainment(params, d=None, max_steps=10**7):
    """Constructively attain every admissible period by slot seeding."""
    surviving = params.primes[d + 1:] if d is not None else params.primes
    eq = build_z(params, d) if d is not None else interleave(build_coef1(params), params.s)
    rows = []
    # the all-zero configuration attains the fixed point
    zero = StateWindow(eq.memory_k, 0)
    cs = detect_cycle(eq, zero, max_steps)
    rows.append({"primes": [], "expected": 1, "observed": cs.period,
                 "ok": cs.period == 1})
    n = len(surviving)
    for mask in range(1, 1 << n):
        subset = [surviving[i] for i in range(n) if mask >> i & 1]
        expected = params.s
        for p in subset:
            expected *= p
        init = interleaved_initial(_slot_words_for_primes(params, subset))
        cs = detect_cycle(eq, init, max_steps)
        rows.append({"primes": subset, "expected": expected,
                     "observed": cs.period, "ok": cs.period == expected})
    return {"pass": all(r["ok"] for r in rows), "rows": rows,
            "attained": sorted({r["observed"] for r in rows})}


def verify_composition_law(base_eq, slot_windows, max_steps=10**7):
    """Measure the interleaved (T, p) against g*max(T_j) and g*lcm(p_j).

    Slots are ordered by increasing transient so that a maximal-transient
    sequence occupies the last residue class; the interleaved window then
    completes its transient exactly at g*max(T_j).
    """
    g = len(slot_windows)
    summaries = [detect_cycle(base_eq, w, max_steps) for w in slot_windows]
    order = sorted(range(g), key=lambda i: summaries[i].transient)
    words = [slot_windows[i].to_time_word() for i in order]
    eq = interleave(base_eq, g)
    measured = detect_cycle(eq, interleaved_initial(words), max_steps)
    pred_t = g * max(c.transient for c in summaries)
    slot_periods = [c.period for c in summaries]
    if max(slot_periods) >= 2:
        pred_p = g * lcm(*slot_periods)
        ok = measured.transient == pred_t and measured.period == pred_p
    else:
        pred_p = None  # only "divides g" is claimed
        ok = measured.transient == pred_t and g % measured.period == 0
    return {
        "pass": ok,
        "slot_summaries": [(c.transient, c.period) for c in summaries],
        "predicted": (pred_t, pred_p),
        "measured": (measured.transient, measured.period),
    }


def _detect_random(eq, rng, max_steps):
    init = StateWindow(eq.memory_k, rng.getrandbits(eq.memory_k))
    return init, detect_cycle(eq, init, max_steps)


def classic_check(kind, k, trials, seed, b=None, j=None):
    """Randomized checks of the classic coefficient-shape period bounds.

    kind is one of palindromic, j_palindromic, geometric_neg, geometric_pos.
    Geometric shapes use exact dyadic scaling: b = c/2^e in (0, 1/2] becomes
    integer coefficients c^i * 2^(e*(k-i)).
    """
    if trials < 1 or k < 1:
        raise InvalidShapeParam("trials and k must be positive")
    rng = random.Random("%s:%s:%s:%s:%s" % (kind, k, trials, seed, j))
    failures = []
    for trial in range(trials):
        if kind == "palindromic":
            half = [rng.randint(-9, 9) for _ in range((k + 1) // 2)]
            coeffs = [half[min(i, k - 1 - i)] for i in range(k)]
            bound = k + 1
        elif kind == "j_palindromic":
            if j is None or j < 1 or j + 1 > k:
                raise InvalidShapeParam("j_palindromic needs 1 <= j < k")
            coeffs = [0] * k
            for i in range(j + 1, k + 1):
                mirror = k + j + 1 - i
                if i <= mirror:
                    val = rng.randint(-9, 9)
                    coeffs[i - 1] = val
                    if mirror <= k:
                        coeffs[mirror - 1] = val
            bound = k + j + 1
        elif kind in ("geometric_neg", "geometric_pos"):
            frac = Fraction(b)
            e = frac.denominator.bit_length() - 1
            if (1 << e) != frac.denominator or not 0 < frac <= Fraction(1, 2):
                raise InvalidShapeParam("b must be a dyadic rational in (0, 1/2]")
            c = frac.numerator
            sign = -1 if kind == "geometric_neg" else 1
            coeffs = [sign * c**i * 2 ** (e * (k - i)) for i in range(1, k + 1)]
            bound = k + 1
        else:
            raise InvalidShapeParam("unknown kind %r" % kind)
        scale = sum(abs(c) for c in coeffs) or 1
        theta = rng.randint(-scale, scale)
        eq = NeuronEquation(k, tuple(2 * c for c in coeffs), 2 * theta)
        init, cs = _detect_random(eq, rng, (1 << k) + 2)
        if kind == "palindromic" or kind == "j_palindromic":
            ok = bound % cs.period == 0
        elif kind == "geometric_neg":
            ok = cs.period <= bound
        else:
            ok = cs.period == 1
        if not ok:
            failures.append({"trial": trial, "init": init.value,
                             "theta": theta, "period": cs.period})
    return {"pass": not failures, "kind": kind, "k": k, "trials": trials,
            "failures": failures}


def transient_witnesses(eq, cycle_window, max_depth, limit):
    """Windows converging to the cycle through cycle_window with transient >= 1.

    Breadth-first over shift-register predecessors: u is a predecessor of v
    when u's low k-1 bits equal v >> 1 and u fires bit v & 1.
    """
    from .core import _step_value, canonical_cycle_key

    k, mask = eq.memory_k, eq.mask
    key = canonical_cycle_key(eq, cycle_window)
    cycle = set()
    v = cycle_window.value
    while True:
        cycle.add(v)
        v = _step_value(eq.coeffs2, eq.threshold2, mask, v)
        if v == cycle_window.value:
            break
    out = []
    frontier = list(cycle)
    depth = 0
    seen = set(cycle)
    while frontier and depth < max_depth and len(out) < limit:
        depth += 1
        nxt = []
        for v in frontier:
            for top in (0, 1):
                u = (v >> 1) | (top << (k - 1))
                if u in seen:
                    continue
                if _step_value(eq.coeffs2, eq.threshold2, mask, u) == v:
                    seen.add(u)
                    nxt.append(u)
                    if v in cycle or depth > 1:
                        out.append((StateWindow(k, u), depth))
                        if len(out) >= limit:
                            break
            if len(out) >= limit:
                break
        frontier = nxt
    return [(w, d) for w, d in out]


def composition_suite(params, n_cases, seed, g=2, max_steps=10**7):
    """Seeded interleaving cases mixing on-cycle, fixed-point and transient slots.

    Two slots converging to the same attractor are forced to share one
    window: composing distinct-phase views of a single cycle can rotate the
    interleaved sequence onto itself and divide the period, which is outside
    the composition law's constructive claim.
    """
    from .core import canonical_cycle_key, _step_value

    rng = random.Random("composition:%s:%s" % (seed, n_cases))
    base = build_coef1(params)
    pool = [canonical_initial(params, i) for i in range(params.s)]
    pool.append(StateWindow(params.k, 0))
    # windows inside the spike-cycle basins, with nonzero transient
    for i in range(params.s):
        pool.extend(w for w, _ in transient_witnesses(base, canonical_initial(params, i), 4, 8))
    # generic windows: almost all decay to the fixed point with transient > 0
    for _ in range(8):
        pool.append(StateWindow(params.k, rng.getrandbits(params.k)))
    keys = {}
    for w in pool:
        cs = detect_cycle(base, w, max_steps)
        on_cycle = w.value
        for _ in range(cs.transient):
            on_cycle = _step_value(base.coeffs2, base.threshold2, base.mask, on_cycle)
        keys[w.value] = canonical_cycle_key(base, StateWindow(params.k, on_cycle))
    results = []
    for _ in range(n_cases):
        slots = [rng.choice(pool)]
        while len(slots) < g:
            w = rng.choice(pool)
            clash = next((v for v in slots if keys[v.value] == keys[w.value]
                          and keys[w.value] != 0), None)
            slots.append(clash if clash is not None else w)
        results.append(verify_composition_law(base, slots, max_steps))
    nonzero = sum(1 for r in results if max(t for t, _ in r["slot_summaries"]) > 0)
    return {"pass": all(r["pass"] for r in results), "cases": results,
            "n_cases": n_cases, "nonzero_transient_cases": nonzero}


@dataclass
class SweepReport:
    rows: list
    nested: bool
    final_fixed_point: bool

    @property
    def ok(self):
        return (
            self.nested
            and self.final_fixed_point
            and all(r["containment"] and r["attainment"] for r in self.rows)
        )


def bifurcation_sweep(params, samples_per_d, seed, max_steps=10**7):
    """Sampled census + constructive attainment for every suppression level d.

    Nesting is judged on observed-union-attained period sets; pure sampling
    can miss a tiny basin at one level that it hits at another.
    """
    if params.m < 8:
        raise MTooSmall("sweep requires m >= 8, got m=%d" % params.m)
    if samples_per_d < 1:
        raise ValueError("samples_per_d must be >= 1")
    rows = []
    for d in range(params.s):
        eq = build_z(params, d)
        census = sampled_census(eq, samples_per_d, "%s:d=%d" % (seed, d), max_steps)
        predicted = admissible_periods(params, params.primes[d + 1:])
        support = verify_period_support(census, predicted)
        attainment = verify_attainment(params, d, max_steps)
        rows.append({
            "d": d,
            "predicted": sorted(predicted),
            "observed": sorted(census.periods()),
            "observed_counts": dict(sorted(census.chi.items())),
            "containment": support["pass"],
            "attainment": attainment["pass"],
            "attained": attainment["attained"],
        })
    sets = [set(r["observed"]) | set(r["attained"]) for r in rows]
    nested = all(sets[i + 1] <= sets[i] for i in range(len(sets) - 1))
    final = sets[-1] == {1}
    return SweepReport(rows=rows, nested=nested, final_fixed_point=final)
