"""Rejection sampler for balanced parameter draws.

Identity checks need parameter vectors with a prescribed product (the
balancing condition), per-slot modulus windows, and headroom for every base
shift the check will apply. One slot is solved from the balance; the rest are
drawn log-uniform in modulus with uniform phase, and the candidate is
rejected until all constraints hold.
"""

from __future__ import annotations

import zlib

import numpy as np

from .errors import SamplerInfeasible
from .specfun import BasePair

DEFAULT_BASE_WINDOW = (0.15, 0.4)
MAX_TRIES = 1000


def rng_for(seed: int, name: str, trial: int) -> np.random.Generator:
    """Deterministic per-check, per-trial generator."""
    return np.random.default_rng([seed & 0xFFFFFFFF, zlib.crc32(name.encode()), trial])


def draw_phase(rng: np.random.Generator) -> complex:
    return complex(np.exp(2j * np.pi * rng.random()))


def draw_modulus(rng: np.random.Generator, lo: float, hi: float) -> float:
    if not 0 < lo <= hi:
        raise ValueError("modulus window must satisfy 0 < lo <= hi")
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def draw_base_pair(rng: np.random.Generator, window=DEFAULT_BASE_WINDOW,
                   q_window=None) -> BasePair:
    p = draw_modulus(rng, *window) * draw_phase(rng)
    q = draw_modulus(rng, *(q_window or window)) * draw_phase(rng)
    return BasePair(p, q)


def draw_balanced(rng: np.random.Generator, windows, balance: complex,
                  dependent: int = -1, constraints=(),
                  max_tries: int = MAX_TRIES):
    """Draw moduli per window, solve the dependent slot, reject on constraints.

    windows: sequence of (lo, hi) per slot; the dependent slot's window is
    enforced on the solved value. constraints: callables t -> bool.
    """
    n = len(windows)
    dependent = dependent % n
    for _ in range(max_tries):
        t = [0j] * n
        for i in range(n):
            if i == dependent:
                continue
            t[i] = draw_modulus(rng, *windows[i]) * draw_phase(rng)
        free = 1.0 + 0.0j
        for i in range(n):
            if i != dependent:
                free *= t[i]
        t[dependent] = balance / free
        lo, hi = windows[dependent]
        if not lo <= abs(t[dependent]) <= hi:
            continue
        if all(c(t) for c in constraints):
            return tuple(t)
    raise SamplerInfeasible(
        f"no admissible draw within {max_tries} tries "
        f"(balance modulus {abs(balance):.3g}, windows {windows})"
    )


def cap_after_shifts(shifted_slots, cap: float = 0.95):
    """Constraint: |t_slot * multiplier| <= cap for each (slot, multiplier)."""
    shifted_slots = tuple(shifted_slots)

    def check(t) -> bool:
        return all(abs(t[s] * m) <= cap for s, m in shifted_slots)

    return check


def pairwise_separation(slots=None, delta: float = 1e-3):
    """Constraint: |t_i / t_j - 1| >= delta over the given slots (all pairs)."""

    def check(t) -> bool:
        idx = range(len(t)) if slots is None else slots
        idx = list(idx)
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                if abs(t[idx[a]] / t[idx[b]] - 1.0) < delta:
                    return False
        return True

    return check


def theta_margin(arg_builder, floor: float = 1e-4):
    """Constraint: every value produced by arg_builder(t) has |value| >= floor.

    Used to keep coefficient denominators (theta products) away from their
    zeros; arg_builder returns an iterable of already-evaluated numbers.
    """

    def check(t) -> bool:
        return all(abs(v) >= floor for v in arg_builder(t))

    return check
