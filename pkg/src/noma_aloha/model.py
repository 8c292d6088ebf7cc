"""Closed-form performance model of two-power NOMA random access.

``m`` users contend in a slotted channel.  Each slot, every user independently
transmits so that its received SNR at the access point is ``v1`` (probability
``tau1``) or ``v2`` (probability ``tau2``), or stays idle.  The receiver runs
successive interference cancellation, strongest signals first; a signal is
decoded when its SINR reaches the threshold ``gamma``.  Noise power is
normalised to one, so ``v1`` and ``v2`` are received SNRs.  Rates are Shannon
spectral efficiencies, log2(1 + SINR) bits per slot per unit bandwidth.

Everything here is a pure function of its arguments.  Per-scenario summation
tables are cached, so repeated evaluation at many transmit probabilities (as
the optimizer does) stays cheap.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import xlogy

__all__ = [
    "Scenario",
    "PowerProfile",
    "CountPair",
    "DecodeFlags",
    "RegionBounds",
    "sinr_high",
    "sinr_low",
    "decode_feasibility",
    "region_bounds",
    "joint_pmf",
    "success_probability",
    "cond_sum_rate_high",
    "cond_sum_rate_low",
    "average_throughput",
    "baseline_success",
    "baseline_optimum",
]


@dataclass(frozen=True)
class Scenario:
    """Static network parameters.

    m: number of contending users.
    v1, v2: received SNR of the high / low power setting (v1 > v2 > 0).
    gamma: SINR decoding threshold, linear scale.
    """

    m: int
    v1: float
    v2: float
    gamma: float

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError("m must be a positive integer")
        if not self.v1 > self.v2 > 0.0:
            raise ValueError("power levels must satisfy v1 > v2 > 0")
        if not self.gamma > 0.0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class PowerProfile:
    """Per-slot transmit policy: high power w.p. tau1, low power w.p. tau2."""

    tau1: float
    tau2: float

    def __post_init__(self):
        if self.tau1 < 0.0 or self.tau2 < 0.0:
            raise ValueError("tau1 and tau2 must be nonnegative")
        if self.tau1 + self.tau2 > 1.0:
            raise ValueError("tau1 + tau2 must not exceed 1")

    @property
    def idle(self) -> float:
        # clamp: 1 - tau1 - tau2 can round one ulp below zero on the simplex edge
        return max(0.0, 1.0 - self.tau1 - self.tau2)


@dataclass(frozen=True)
class CountPair:
    """Concurrent transmitter counts: n1 at high power, n2 at low power."""

    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("transmitter counts must be nonnegative")


@dataclass(frozen=True)
class DecodeFlags:
    """Whether the full high-power / low-power layer decodes under SIC."""

    high_ok: bool
    low_ok: bool


@dataclass(frozen=True)
class RegionBounds:
    """Largest transmitter counts that keep each SIC layer decodable.

    ``high_max`` caps n1 when the high layer must decode, and
    ``low_max_given_high[n1 - 1]`` caps n2 for each n1 in 1..high_max.
    ``low_max`` caps n2 when the low layer must decode, and
    ``high_max_given_low[n2 - 1]`` caps n1 for each n2 in 1..low_max (the low
    layer needs the high layer cancelled first, so its n1 cap embeds the
    high-layer condition).
    """

    high_max: int
    low_max_given_high: tuple[int, ...]
    low_max: int
    high_max_given_low: tuple[int, ...]

    def in_high_region(self, n1: int, n2: int) -> bool:
        """True when all n1 >= 1 high-power signals decode at counts (n1, n2)."""
        return 1 <= n1 <= self.high_max and n2 <= self.low_max_given_high[n1 - 1]

    def in_low_region(self, n1: int, n2: int) -> bool:
        """True when all n2 >= 1 low-power signals decode at counts (n1, n2)."""
        return 1 <= n2 <= self.low_max and n1 <= self.high_max_given_low[n2 - 1]


def _check_pair(s: Scenario, pair: CountPair):
    if pair.n1 + pair.n2 > s.m:
        raise ValueError(
            f"counts ({pair.n1}, {pair.n2}) exceed the {s.m} users of the scenario"
        )


def sinr_high(s: Scenario, i: int, pair: CountPair) -> float:
    """SINR of the i-th decoded high-power signal, the previous i-1 cancelled."""
    if not 1 <= i <= pair.n1:
        raise ValueError(f"decode index i={i} outside 1..{pair.n1}")
    return s.v1 / (s.v1 * (pair.n1 - i) + s.v2 * pair.n2 + 1.0)


def sinr_low(s: Scenario, j: int, pair: CountPair) -> float:
    """SINR of the j-th decoded low-power signal, all high power cancelled."""
    if not 1 <= j <= pair.n2:
        raise ValueError(f"decode index j={j} outside 1..{pair.n2}")
    return s.v2 / (s.v2 * (pair.n2 - j) + 1.0)


def decode_feasibility(s: Scenario, pair: CountPair) -> DecodeFlags:
    """Layer decodability straight from the SINR threshold inequalities.

    The SINR of successive signals within a layer only grows as earlier ones
    are cancelled, so a layer decodes fully iff its first signal does.  The
    low layer additionally needs the high layer gone (n1 == 0 or decodable).
    """
    _check_pair(s, pair)
    high_ok = pair.n1 >= 1 and sinr_high(s, 1, pair) >= s.gamma
    low_ok = (
        pair.n2 >= 1
        and sinr_low(s, 1, pair) >= s.gamma
        and (pair.n1 == 0 or high_ok)
    )
    return DecodeFlags(high_ok=high_ok, low_ok=low_ok)


@lru_cache(maxsize=None)
def region_bounds(s: Scenario) -> RegionBounds:
    """Closed-form decodability bounds, used as summation limits.

    Rearranging the first-signal SINR inequalities gives integer caps via
    floors; each cap is clamped at zero and by the population size.
    """
    m, v1, v2, g = s.m, s.v1, s.v2, s.gamma
    high_max = min(m, max(0, math.floor((v1 - g) / (v1 * g)) + 1))
    low_given_high = tuple(
        min(m - n1, max(0, math.floor((v1 - g * (n1 - 1) * v1 - g) / (v2 * g))))
        for n1 in range(1, high_max + 1)
    )
    low_max = min(m, max(0, math.floor((v2 - g) / (v2 * g)) + 1))
    high_given_low = tuple(
        min(m - n2, max(0, math.floor((v1 - g * n2 * v2 - g) / (v1 * g)) + 1))
        for n2 in range(1, low_max + 1)
    )
    return RegionBounds(high_max, low_given_high, low_max, high_given_low)


def _log_trinomial_coef(m: int, n1: int, n2: int) -> float:
    # C(m, n1+n2) * C(n1+n2, n1) = m! / (n1! n2! (m-n1-n2)!)
    return (
        math.lgamma(m + 1)
        - math.lgamma(n1 + 1)
        - math.lgamma(n2 + 1)
        - math.lgamma(m - n1 - n2 + 1)
    )


def joint_pmf(s: Scenario, prof: PowerProfile, pair: CountPair) -> float:
    """Probability that exactly n1 users pick high power and n2 pick low.

    Trinomial mass, computed in log space (log-gamma factorials) and
    exponentiated once, so it stays stable for large populations.
    """
    _check_pair(s, pair)
    n1, n2 = pair.n1, pair.n2
    log_p = _log_trinomial_coef(s.m, n1, n2)
    for n, t in ((n1, prof.tau1), (n2, prof.tau2), (s.m - n1 - n2, prof.idle)):
        if n:
            if t == 0.0:
                return 0.0
            log_p += n * math.log(t)
    return math.exp(log_p)


def _pmf_vector(m: int, n1, n2, log_coef, prof: PowerProfile):
    """Trinomial masses for index arrays (n1, n2) over m users."""
    n0 = m - n1 - n2
    log_p = log_coef + xlogy(n1, prof.tau1) + xlogy(n2, prof.tau2) + xlogy(n0, prof.idle)
    return np.exp(log_p)


@lru_cache(maxsize=None)
def _decodable_pairs(s: Scenario):
    """Count pairs of each decodable region, in ascending scan order."""
    b = region_bounds(s)
    high = tuple(
        (n1, n2)
        for n1 in range(1, b.high_max + 1)
        for n2 in range(b.low_max_given_high[n1 - 1] + 1)
    )
    low = tuple(
        (n1, n2)
        for n2 in range(1, b.low_max + 1)
        for n1 in range(b.high_max_given_low[n2 - 1] + 1)
    )
    return high, low


@lru_cache(maxsize=None)
def _throughput_terms(s: Scenario):
    """Per-pair (n1, n2, log coefficient, conditional sum rate) arrays."""
    high, low = _decodable_pairs(s)
    rows = [(n1, n2, cond_sum_rate_high(s, CountPair(n1, n2))) for n1, n2 in high]
    rows += [(n1, n2, cond_sum_rate_low(s, CountPair(n1, n2))) for n1, n2 in low]
    n1 = np.array([r[0] for r in rows], dtype=np.int64)
    n2 = np.array([r[1] for r in rows], dtype=np.int64)
    rate = np.array([r[2] for r in rows])
    log_coef = np.array([_log_trinomial_coef(s.m, a, b) for a, b in zip(n1, n2)])
    return n1, n2, log_coef, rate


@lru_cache(maxsize=None)
def _success_terms(s: Scenario):
    """Index arrays over the m-1 other users for each decodable outcome.

    A user that transmitted high sees the remaining population contribute
    (n1 - 1, n2); one that transmitted low sees (n1, n2 - 1).
    """
    high, low = _decodable_pairs(s)
    hn1 = np.array([n1 - 1 for n1, _ in high], dtype=np.int64)
    hn2 = np.array([n2 for _, n2 in high], dtype=np.int64)
    hcoef = np.array([_log_trinomial_coef(s.m - 1, a, b) for a, b in zip(hn1, hn2)])
    ln1 = np.array([n1 for n1, _ in low], dtype=np.int64)
    ln2 = np.array([n2 - 1 for _, n2 in low], dtype=np.int64)
    lcoef = np.array([_log_trinomial_coef(s.m - 1, a, b) for a, b in zip(ln1, ln2)])
    return (hn1, hn2, hcoef), (ln1, ln2, lcoef)


def success_probability(s: Scenario, prof: PowerProfile) -> float:
    """Probability that a given user transmits and its signal is decoded.

    Total probability over the power choice of the user, with the other m-1
    users' counts summed over the region that keeps the chosen layer
    decodable.
    """
    (hn1, hn2, hcoef), (ln1, ln2, lcoef) = _success_terms(s)
    p_high = np.sum(_pmf_vector(s.m - 1, hn1, hn2, hcoef, prof))
    p_low = np.sum(_pmf_vector(s.m - 1, ln1, ln2, lcoef, prof))
    return float(prof.tau1 * p_high + prof.tau2 * p_low)


def cond_sum_rate_high(s: Scenario, pair: CountPair) -> float:
    """Sum rate of the high-power layer given it decodes at counts (n1, n2).

    The i-th decoded signal faces the n1-i not-yet-cancelled peers plus all
    low-power signals; summing over the decode order gives one log term per
    user with i-1 residual high interferers.
    """
    b = region_bounds(s)
    if not b.in_high_region(pair.n1, pair.n2):
        raise ValueError(
            f"counts ({pair.n1}, {pair.n2}) outside the high-layer decodable region"
        )
    n2v2 = pair.n2 * s.v2
    return sum(
        math.log2(1.0 + s.v1 / ((i - 1) * s.v1 + n2v2 + 1.0))
        for i in range(1, pair.n1 + 1)
    )


def cond_sum_rate_low(s: Scenario, pair: CountPair) -> float:
    """Sum rate of the low-power layer given it decodes at counts (n1, n2)."""
    b = region_bounds(s)
    if not b.in_low_region(pair.n1, pair.n2):
        raise ValueError(
            f"counts ({pair.n1}, {pair.n2}) outside the low-layer decodable region"
        )
    return sum(
        math.log2(1.0 + s.v2 / ((j - 1) * s.v2 + 1.0))
        for j in range(1, pair.n2 + 1)
    )


def average_throughput(s: Scenario, prof: PowerProfile) -> float:
    """Long-term average system throughput in bits per slot per unit bandwidth.

    Sums conditional layer rates weighted by the count pmf over the decodable
    regions.  The high layer earns its rate whenever it decodes, even if the
    low layer then fails; the low layer's region already requires the high
    layer decoded.
    """
    n1, n2, log_coef, rate = _throughput_terms(s)
    pmf = _pmf_vector(s.m, n1, n2, log_coef, prof)
    return float(np.sum(rate * pmf))


def baseline_success(s: Scenario, p: float) -> float:
    """Per-user success probability of single-power slotted ALOHA (no SIC)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return p * (1.0 - p) ** (s.m - 1)


def baseline_optimum(s: Scenario) -> tuple[float, float]:
    """Optimal transmit probability 1/m of the single-power baseline and the
    throughput it attains at rate log2(1 + v1)."""
    p_star = 1.0 / s.m
    th_star = math.log2(1.0 + s.v1) * baseline_success(s, p_star)
    return p_star, th_star
