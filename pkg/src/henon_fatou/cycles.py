"""Combinatorics of the sector pairs ``Z_m x Z_m`` under ``gamma(a, b) = (b + 1, a)``.

Orbits of ``gamma`` are the discrete shadow of the dynamics: a point whose
coordinates sit in sectors ``(a, b)`` is mapped, far enough out, into
sectors ``gamma(a, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple


class SectorPair(NamedTuple):
    """Indices ``(a, b)`` of the sector product ``S_a x S_b``."""

    a: int
    b: int

    def label(self, m=10):
        """Two-digit label ``"ab"`` (comma separated once ``m > 10``)."""
        return f"{self.a}{self.b}" if m <= 10 else f"{self.a},{self.b}"


def gamma(pair, m):
    a, b = pair
    return SectorPair((b + 1) % m, a % m)


def gamma_power(pair, n, m):
    """``gamma**n`` in closed form (``n >= 0``)."""
    a, b = pair
    k, odd = divmod(n, 2)
    if odd:
        return SectorPair((b + k + 1) % m, (a + k) % m)
    return SectorPair((a + k) % m, (b + k) % m)


def ratio_slice(pair, m):
    """Index of the angular slice containing ``z/w`` for ``(z, w)`` in sectors ``pair``."""
    return (pair[0] - pair[1]) % m


def limit_slice_map(b, m):
    """Slices ``(j1, j2)`` holding ``h1`` and ``h2`` on the cycle of ``(0, b)``.

    ``j1 = m - b`` and ``j2 = b + 1`` (mod ``m``); on the short cycle of odd
    ``m`` both equal ``(m + 1)/2``, which the same formula already gives.
    """
    if not 0 <= b < m:
        raise ValueError(f"b must lie in [0, {m}), got {b}")
    return (m - b) % m, (b + 1) % m


@dataclass(frozen=True)
class Cycle:
    """One ``gamma``-cycle; ``slices`` are the ``(h1, h2)`` limit slices."""

    representative: SectorPair
    period: int
    members: tuple
    slices: tuple


@dataclass(frozen=True)
class CycleDecomposition:
    """All ``gamma``-cycles on ``Z_m x Z_m``, ordered by representative."""

    m: int
    cycles: tuple

    @property
    def periods(self):
        return [c.period for c in self.cycles]

    @property
    def short_cycle(self):
        """The unique period-``m`` cycle (odd ``m`` only), else ``None``."""
        for c in self.cycles:
            if c.period == self.m:
                return c
        return None

    def cycle_of(self, pair):
        pair = SectorPair(pair[0] % self.m, pair[1] % self.m)
        for c in self.cycles:
            if pair in c.members:
                return c
        raise KeyError(pair)

    def slice_map(self):
        """``{representative b: (j1, j2)}`` for every cycle."""
        return {c.representative.b: c.slices for c in self.cycles}


def cycle_decomposition(m):
    """Decompose ``Z_m x Z_m`` into ``gamma``-cycles by tracing every orbit.

    Each cycle starts at its representative, the member with ``a == 0`` and
    smallest ``b``; cycles are sorted by that ``b``.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    seen = set()
    cycles = []
    for a in range(m):
        for b in range(m):
            start = SectorPair(a, b)
            if start in seen:
                continue
            members = [start]
            nxt = gamma(start, m)
            while nxt != start:
                members.append(nxt)
                nxt = gamma(nxt, m)
            seen.update(members)
            rep = min((p for p in members if p.a == 0), key=lambda p: p.b)
            i = members.index(rep)
            members = members[i:] + members[:i]
            cycles.append(Cycle(rep, len(members), tuple(members), limit_slice_map(rep.b, m)))
    cycles.sort(key=lambda c: c.representative.b)
    return CycleDecomposition(m, tuple(cycles))


def format_cycle(cycle, m):
    """Member labels in visiting order, closed by the representative: ``"02 30 13 41 24 02"``."""
    labels = [p.label(m) for p in cycle.members] + [cycle.representative.label(m)]
    return " ".join(labels)


def format_slice_table(cycle, m):
    """One line per iteration: ``"<pair> U_<slice of z/w> <iteration>"``, closed by the representative."""
    pairs = list(cycle.members) + [cycle.representative]
    return "\n".join(f"{p.label(m)} U_{ratio_slice(p, m)} {i}" for i, p in enumerate(pairs))
