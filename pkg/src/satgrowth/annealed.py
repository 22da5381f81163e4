"""Dynamical-annealing Markov chain on clause-vector space (GUC).

Evolves the expected number of branches B(C1, C2, C3; T) of the parallel
search-tree growth process, with the instance redrawn each step conditioned
on the clause vector.  One assigned variable per step:

  unit step (C1 >= 1): each other unit clause holds the opposite literal with
    probability 1/(2(N-T)) and would kill the branch, giving the survival
    factor (1 - 1/(2(N-T)))^(C1-1); 2-clauses are hit w.p. 2/(N-T) (half
    satisfied, half becoming unit clauses); 3-clauses are hit w.p. 3/(N-T)
    (half satisfied, half becoming 2-clauses).

  split step (C1 = 0, C2 >= 1): GUC satisfies one 2-clause; the remaining
    C2-1 are thinned as above; two children are emitted, the false one
    carrying the split clause as a new unit clause.  Row weights are branch
    multiplicities, not probabilities: a split row sums to 2.

  split step (C1 = 0, C2 = 0, C3 >= 1): GUC splits a 3-clause; the other
    C3-1 are thinned; the false child carries the split clause as a 2-clause.
    (The displayed multinomial formula covers only the 2-clause split; this
    boundary case follows the same per-clause reasoning and is what lets the
    chain start from the pure 3-SAT vector.)

  (0,0,0): the branch found a solution; the row is empty and its weight
    leaves the count (only contradiction-free growth is tracked).

The vectorized engine factors each step into exact sequential binomial
passes (per-clause multinomial fates = satisfied-thinning followed by
conversion of the survivors), applied as banded matrix products along one
axis at a time; it matches guc_transition_row to rounding error.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from .cnf import ClauseVector

_LGF_CACHE = np.zeros(1)


def _lgf(n_max: int) -> np.ndarray:
    """log(k!) table, cached."""
    global _LGF_CACHE
    if len(_LGF_CACHE) < n_max + 1:
        _LGF_CACHE = np.cumsum(np.concatenate(
            ([0.0], np.log(np.arange(1, n_max + 1, dtype=float)))))
    return _LGF_CACHE


def _binom_pmf(n: int, p: float, k_lo: int, k_hi: int) -> np.ndarray:
    """Binomial pmf values for k in [k_lo, k_hi], computed in log space."""
    lgf = _lgf(n)
    ks = np.arange(k_lo, k_hi + 1, dtype=int)
    if p <= 0.0:
        out = np.zeros(len(ks))
        if k_lo == 0:
            out[0] = 1.0
        return out
    logs = (lgf[n] - lgf[ks] - lgf[n - ks]
            + ks * math.log(p) + (n - ks) * math.log1p(-p))
    return np.exp(logs)


def _binom_support(n: int, p: float, tail: float) -> int:
    """Small k_hi <= n whose upper tail mass is below `tail`."""
    if n <= 0 or p <= 0.0:
        return 0
    mean = n * p
    sig = math.sqrt(max(n * p * (1.0 - p), 1e-12))
    z = math.sqrt(max(2.0 * math.log(1.0 / tail), 1.0))
    return min(n, int(mean + z * sig + 6.0))


def guc_transition_row(c_from: Tuple[int, int, int], T: int, N: int,
                       tail: float = 1e-14) -> List[Tuple[ClauseVector, float]]:
    """Outgoing (destination clause vector, branch weight) terms of one step.

    Weights are branch multiplicities, not probabilities: a unit row sums to
    the survival probability (shortfall = contradiction death) and a split
    row sums to 2.  Binomial factors are truncated at relative tail `tail`.
    """
    c1, c2, c3 = c_from
    if not 0 <= T < N:
        raise ValueError("need 0 <= T < N")
    n = N - T
    if min(c1, c2, c3) < 0:
        raise ValueError("clause vector components must be non-negative")
    out: Dict[Tuple[int, int, int], float] = {}

    def add(dest, w):
        if w > 0.0:
            out[dest] = out.get(dest, 0.0) + w

    def three_pool(pool):
        """[(m, w2, weight)]: m touched 3-clauses, w2 of them became 2-clauses."""
        terms = []
        m_hi = _binom_support(pool, 3.0 / n, tail)
        pm = _binom_pmf(pool, 3.0 / n, 0, m_hi)
        for m in range(m_hi + 1):
            pw = _binom_pmf(m, 0.5, 0, m)
            for w2 in range(m + 1):
                terms.append((m, w2, pm[m] * pw[w2]))
        return terms

    def two_pool(pool):
        """[(z2, w1, weight)]: z2 touched 2-clauses, w1 of them became units."""
        terms = []
        z_hi = _binom_support(pool, 2.0 / n, tail)
        pz = _binom_pmf(pool, 2.0 / n, 0, z_hi)
        for z2 in range(z_hi + 1):
            pw = _binom_pmf(z2, 0.5, 0, z2)
            for w1 in range(z2 + 1):
                terms.append((z2, w1, pz[z2] * pw[w1]))
        return terms

    if c1 >= 1:
        surv = (1.0 - 1.0 / (2.0 * n)) ** (c1 - 1)
        for m, w2, wa in three_pool(c3):
            for z2, w1, wb in two_pool(c2):
                add((c1 - 1 + w1, c2 - z2 + w2, c3 - m), surv * wa * wb)
    elif c2 >= 1:
        for m, w2, wa in three_pool(c3):
            for z2, w1, wb in two_pool(c2 - 1):
                w = wa * wb
                add((w1, c2 - 1 - z2 + w2, c3 - m), w)
                add((w1 + 1, c2 - 1 - z2 + w2, c3 - m), w)
    elif c3 >= 1:
        for m, w2, wa in three_pool(c3 - 1):
            add((0, w2, c3 - 1 - m), wa)
            add((0, w2 + 1, c3 - 1 - m), wa)
    # else (0,0,0): satisfied branch, empty row
    return [(ClauseVector(*k), v) for k, v in sorted(out.items())]


class BranchCountField:
    """Map clause vector -> expected branch count at one depth T, stored as a
    dense window array indexed by (C1, C2 - c2_lo, C3 - c3_lo)."""

    def __init__(self, T: int, array: np.ndarray, c2_lo: int, c3_lo: int):
        self.T = T
        self.array = array
        self.c2_lo = c2_lo
        self.c3_lo = c3_lo

    def get(self, c_vec) -> float:
        c1, c2, c3 = c_vec
        i2 = c2 - self.c2_lo
        i3 = c3 - self.c3_lo
        sh = self.array.shape
        if 0 <= c1 < sh[0] and 0 <= i2 < sh[1] and 0 <= i3 < sh[2]:
            return float(self.array[c1, i2, i3])
        return 0.0

    def items(self) -> Iterator[Tuple[ClauseVector, float]]:
        for c1, i2, i3 in zip(*np.nonzero(self.array)):
            yield (ClauseVector(int(c1), int(i2) + self.c2_lo, int(i3) + self.c3_lo),
                   float(self.array[c1, i2, i3]))

    def total_mass(self) -> float:
        return float(self.array.sum())

    def mean_c2(self) -> float:
        tot = self.array.sum()
        if tot <= 0:
            return 0.0
        marg = self.array.sum(axis=(0, 2))
        return float(np.dot(marg, self.c2_lo + np.arange(len(marg))) / tot)

    def mean_c3(self) -> float:
        tot = self.array.sum()
        if tot <= 0:
            return 0.0
        marg = self.array.sum(axis=(0, 1))
        return float(np.dot(marg, self.c3_lo + np.arange(len(marg))) / tot)


def _thin_pass(arr: np.ndarray, values: np.ndarray, p: float,
               tail: float) -> np.ndarray:
    """Population thinning along the last axis: dst = src - j, j ~ Bin(src, p).

    `values` are the actual populations along that axis (ascending, unit
    step); destinations falling below the window are masked off, so callers
    must pad the low side by the binomial support first.
    """
    if p <= 0.0:
        return arr.copy()
    c = arr.shape[-1]
    lo = int(values[0])
    n_hi = int(values[-1])
    j_max = _binom_support(n_hi, p, tail)
    lgf = _lgf(max(n_hi, 1))
    out = np.zeros_like(arr)
    logp = math.log(p)
    log1p_ = math.log1p(-p)
    for j in range(j_max + 1):
        start = max(j - lo, 0, j)  # value >= j and in-window destination
        if start >= c:
            break
        s = np.arange(lo + start, lo + c)
        coef = np.exp(lgf[s] - lgf[j] - lgf[s - j] + j * logp + (s - j) * log1p_)
        out[..., start - j:c - j] += arr[..., start:] * coef
    return out


def _convert_pass(arr: np.ndarray, values_from: np.ndarray, q: float,
                  tail: float) -> np.ndarray:
    """Move k items from the last axis to the middle axis, k ~ Bin(pop, q).

    arr has shape (A, B, C): C donates (population values `values_from`),
    B receives; the output middle axis grows by the support of k.
    """
    a, b, c = arr.shape
    lo = int(values_from[0])
    n_hi = int(values_from[-1])
    k_max = _binom_support(n_hi, q, tail)
    lgf = _lgf(max(n_hi, 1))
    out = np.zeros((a, b + k_max, c))
    if q <= 0.0:
        out[:, :b, :] = arr
        return out
    logq = math.log(q)
    log1q = math.log1p(-q)
    for k in range(k_max + 1):
        start = max(k - lo, 0, k)  # value >= k and in-window destination
        if start >= c:
            break
        s = np.arange(lo + start, lo + c)
        coef = np.exp(lgf[s] - lgf[k] - lgf[s - k] + k * logq + (s - k) * log1q)
        out[:, k:k + b, start - k:c - k] += arr[:, :, start:] * coef
    return out


@dataclass
class AnnealedStep:
    T: int
    total_mass: float
    mean_c2: float
    mean_c3: float


def _engine_step(arr: np.ndarray, c2_lo: int, c3_lo: int, T: int, N: int,
                 tail: float) -> Tuple[np.ndarray, int, int]:
    """One full chain step on a window array; returns the unpruned result."""
    n = N - T
    # pad low sides so thinning and conversion moves stay in-window:
    # c2 down to 0 (extent is modest), c3 by its per-step support
    if c2_lo > 0:
        arr = np.pad(arr, ((0, 0), (c2_lo, 0), (0, 0)))
        c2_lo = 0
    c3_hi_val = c3_lo + arr.shape[2] - 1
    pad3 = min(c3_lo, _binom_support(c3_hi_val, 3.0 / n, tail) + 2)
    if pad3 > 0:
        arr = np.pad(arr, ((0, 0), (0, 0), (pad3, 0)))
        c3_lo -= pad3
    n1, n2, n3 = arr.shape
    c2_vals = np.arange(0, n2, dtype=float)
    c3_vals = np.arange(c3_lo, c3_lo + n3, dtype=float)

    q2 = (1.0 / n) / (1.0 - 1.0 / n)
    q3 = (3.0 / (2.0 * n)) / (1.0 - 3.0 / (2.0 * n))

    def two_then_one(field, vals2):
        f = np.transpose(field, (2, 0, 1))                # (c3, c1, c2)
        f = _thin_pass(f, vals2, 1.0 / n, tail)           # satisfied 2-clauses
        f = _convert_pass(f, vals2, q2, tail)             # 2 -> 1, c1 grows
        return np.transpose(f, (1, 2, 0))                 # (c1, c2, c3)

    def three_pool(field):
        f = _thin_pass(field, c3_vals, 3.0 / (2.0 * n), tail)  # satisfied
        f = _convert_pass(f, c3_vals, q3, tail)           # 3 -> 2, c2 grows
        return f

    out_parts = []
    # unit field: c1 >= 1, survival then consume one unit
    if n1 > 1:
        unit = arr[1:] * ((1.0 - 1.0 / (2.0 * n))
                          ** np.arange(0, n1 - 1))[:, None, None]
        unit = two_then_one(unit, c2_vals)
        out_parts.append(three_pool(unit))
    # split field, c2 >= 1: remove the split clause, thin the rest,
    # emit both children (false child gains a unit clause)
    if n2 > 1:
        split = arr[0:1, 1:, :]
        vals2s = c2_vals[:-1]  # populations after removing the split clause
        f = two_then_one(split, vals2s)
        f = three_pool(f)
        both = np.zeros((f.shape[0] + 1, f.shape[1], f.shape[2]))
        both[:-1] += f
        both[1:] += f
        out_parts.append(both)
    # split on a 3-clause: the (0, 0, c3) sliver, pointwise rows
    sliver_terms: Dict[Tuple[int, int, int], float] = {}
    for i3 in np.nonzero(arr[0, 0, :])[0]:
        c3v = int(c3_lo + i3)
        if c3v == 0:
            continue
        for dest, w in guc_transition_row((0, 0, c3v), T, N, tail):
            key = tuple(dest)
            sliver_terms[key] = sliver_terms.get(key, 0.0) + w * float(arr[0, 0, i3])

    o1 = max([p.shape[0] for p in out_parts], default=1)
    o2 = max([p.shape[1] for p in out_parts], default=1)
    o3 = max([p.shape[2] for p in out_parts], default=1)
    if sliver_terms:
        o1 = max(o1, 1 + max(k[0] for k in sliver_terms))
        o2 = max(o2, 1 + max(k[1] for k in sliver_terms))
        o3 = max(o3, 1 + max(k[2] for k in sliver_terms) - c3_lo)
    out = np.zeros((o1, o2, o3))
    for part in out_parts:
        s = part.shape
        out[:s[0], :s[1], :s[2]] += part
    for (k1, k2, k3), w in sliver_terms.items():
        i3 = k3 - c3_lo
        if i3 < 0:
            raise AssertionError("sliver destination fell below the c3 padding")
        out[k1, k2, i3] += w
    return out, c2_lo, c3_lo


def evolve_branch_counts(alpha0: float, N: int,
                         pruning_threshold: float = 1e-12,
                         t_max: Optional[int] = None,
                         stop_on_decline: bool = True,
                         tail: float = 1e-14
                         ) -> Iterator[BranchCountField]:
    """Iterate the annealed chain from mass 1 at (0, 0, round(alpha0 N)).

    Yields one BranchCountField per depth T (T = 0 included).  Stops at t_max
    (default N-5), or two declining steps after the total mass peaks when
    stop_on_decline is set (the halt regime).  Mass below
    pruning_threshold x total is dropped each step.
    """
    c3_init = int(round(alpha0 * N))
    if t_max is None:
        t_max = N - 5
    arr = np.zeros((1, 1, 1))
    arr[0, 0, 0] = 1.0
    c2_lo = 0
    c3_lo = c3_init
    yield BranchCountField(0, arr.copy(), c2_lo, c3_lo)
    prev_mass = 1.0
    declines = 0
    for T in range(0, t_max):
        if N - T < 5:
            break
        out, c2_lo, c3_lo = _engine_step(arr, c2_lo, c3_lo, T, N, tail)
        total = out.sum()
        if total <= 0.0:
            break
        out[out < pruning_threshold * total] = 0.0
        nzi = np.nonzero(out)
        if len(nzi[0]) == 0:
            break
        hi1 = int(nzi[0].max())
        lo2, hi2 = int(nzi[1].min()), int(nzi[1].max())
        lo3, hi3 = int(nzi[2].min()), int(nzi[2].max())
        arr = out[:hi1 + 1, lo2:hi2 + 1, lo3:hi3 + 1].copy()
        c2_lo = lo2
        c3_lo = c3_lo + lo3
        field = BranchCountField(T + 1, arr.copy(), c2_lo, c3_lo)
        yield field
        mass = field.total_mass()
        if stop_on_decline and mass < prev_mass:
            declines += 1
            if declines >= 2:
                break
        else:
            declines = 0
        prev_mass = mass


def mass_curve(alpha0: float, N: int, pruning_threshold: float = 1e-12,
               **kw) -> List[AnnealedStep]:
    """Aggregate (T, total mass, mean densities) along the evolution."""
    return [AnnealedStep(f.T, f.total_mass(), f.mean_c2(), f.mean_c3())
            for f in evolve_branch_counts(alpha0, N, pruning_threshold, **kw)]


def annealed_omega_estimate(alpha0: float, N: int,
                            pruning_threshold: float = 1e-12
                            ) -> Tuple[float, int, List[AnnealedStep]]:
    """Finite-size growth-rate estimate: log2 of the peak total mass over N.

    The chain runs until the mass plateaus and turns over (branches dying on
    the halt line); the peak mass is the annealed analogue of the tree size.
    """
    curve = mass_curve(alpha0, N, pruning_threshold)
    peak = max(curve, key=lambda st: st.total_mass)
    return math.log2(peak.total_mass) / N, peak.T, curve
