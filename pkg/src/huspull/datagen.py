"""Synthetic quantitative sequence databases.

Random stream
-------------
All draws come from SplitMix64 (Steele, Lea & Flood 2014)::

    state = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    return z ^ (z >> 31)

seeded with ``rng_seed``.  Derived draws:

* ``uniform()``: ``(next() >> 11) * 2**-53``
* ``randint(lo, hi)``: rejection sampling on ``next()`` below the largest
  multiple of the span, then ``lo + x % span``
* ``poisson(lam)``: Knuth's product-of-uniforms method
* ``normal()``: one Box-Muller value per call,
  ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``

Draw order
----------
1. Profits for items ``1..num_items``: ``exp(mu + sigma * normal())``, clipped
   to ``[profit_low, profit_high]`` and rounded to 4 decimals.
2. Per sequence: itemset count ``1 + poisson(C - 1)``; per itemset the size
   ``1 + poisson(T - 1)`` (at most ``num_items``), truncated so the sequence
   never exceeds ``max_len`` items; distinct items by repeated ``randint``;
   then one quantity ``randint(quantity_low, quantity_high)`` per item in
   ascending item order.

The itemset-count and size distributions only approximate the IBM Quest
generator, and mu=0, sigma=1 are chosen defaults, not published values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import SCALE, format_fixed

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next() >> 11) * (1.0 / (1 << 53))

    def randint(self, lo: int, hi: int) -> int:
        span = hi - lo + 1
        if span <= 0:
            raise ValueError("empty range")
        limit = (1 << 64) - (1 << 64) % span
        while True:
            x = self.next()
            if x < limit:
                return lo + x % span

    def poisson(self, lam: float) -> int:
        if lam <= 0:
            return 0
        threshold = math.exp(-lam)
        k = 0
        p = 1.0
        while True:
            p *= self.uniform()
            if p <= threshold:
                return k
            k += 1

    def normal(self) -> float:
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@dataclass(frozen=True)
class GenParams:
    num_sequences: int = 1000
    num_items: int = 100
    avg_itemsets: float = 8.0
    avg_itemset_size: float = 4.0
    max_len: int = 40
    quantity_low: int = 1
    quantity_high: int = 5
    profit_low: float = 0.01
    profit_high: float = 10.00
    lognormal_mu: float = 0.0
    lognormal_sigma: float = 1.0
    rng_seed: int = 1

    def validate(self):
        if self.num_sequences < 0:
            raise ValueError("num_sequences must be >= 0")
        if self.num_items < 1:
            raise ValueError("num_items must be >= 1")
        if self.avg_itemsets < 1 or self.avg_itemset_size < 1:
            raise ValueError("average itemset count and size must be >= 1")
        if self.avg_itemset_size > self.num_items:
            raise ValueError("average itemset size cannot exceed the number of items")
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")
        if not 1 <= self.quantity_low <= self.quantity_high:
            raise ValueError("need 1 <= quantity_low <= quantity_high")
        if not 0 < self.profit_low <= self.profit_high:
            raise ValueError("need 0 < profit_low <= profit_high")
        if self.lognormal_sigma < 0:
            raise ValueError("lognormal_sigma must be >= 0")


def generate(params: GenParams) -> tuple[str, str]:
    """Return ``(database text, profit text)``."""
    params.validate()
    rng = SplitMix64(params.rng_seed)
    lo = round(params.profit_low * SCALE)
    hi = round(params.profit_high * SCALE)
    profit_lines = []
    for item in range(1, params.num_items + 1):
        x = math.exp(params.lognormal_mu + params.lognormal_sigma * rng.normal())
        fixed = min(max(round(x * SCALE), lo), hi)
        profit_lines.append(f"{item} {format_fixed(fixed)}\n")

    n_items = params.num_items
    lines = []
    for _ in range(params.num_sequences):
        n_sets = 1 + rng.poisson(params.avg_itemsets - 1)
        total = 0
        itemsets = []
        for _ in range(n_sets):
            size = min(1 + rng.poisson(params.avg_itemset_size - 1), n_items)
            size = min(size, params.max_len - total)
            if size <= 0:
                break
            chosen: set[int] = set()
            while len(chosen) < size:
                chosen.add(rng.randint(1, n_items))
            itemset = sorted(chosen)
            qtys = [rng.randint(params.quantity_low, params.quantity_high) for _ in itemset]
            itemsets.append(" ".join(f"{i}:{q}" for i, q in zip(itemset, qtys)))
            total += size
        lines.append(" -1 ".join(itemsets) + " -2\n")
    return "".join(lines), "".join(profit_lines)
