#-----------------------------------------------------------------------
# Purpose: Exact arithmetic on finite unions of circular arcs and the
#          disjoint refinement of a family of boundary sets
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-02-11
#-----------------------------------------------------------------------

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from MSL_Utils.Exceptions import DescriptorError, InputError, ZeroMeasureError


Arc = Tuple[Fraction, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    if isinstance(value, float):
        # Floats are only accepted when they are exact binary fractions
        return Fraction(value)
    return Fraction(value)


def _normalize(arcs: Iterable[Arc]) -> Tuple[Arc, ...]:
    """Sort, drop empty arcs, merge overlapping and touching arcs."""
    pieces = sorted((s, e) for s, e in arcs if e > s)
    merged: List[List[Fraction]] = []
    for s, e in pieces:
        if merged and s <= merged[-1][1]:
            if e > merged[-1][1]:
                merged[-1][1] = e
        else:
            merged.append([s, e])
    return tuple((s, e) for s, e in merged)


#-----------------------------------------------------------------------
@dataclass(frozen=True)
class ArcSet:
    """
    Finite union of half-open arcs [s, e) on the circle, angles measured in
    full turns. Arcs are kept sorted, disjoint and merged inside [0, 1);
    the point 0 = 1 is the only place where two stored arcs may touch.
    """

    arcs: Tuple[Arc, ...] = ()

    #-------------------------------------------------------------------
    @classmethod
    def from_arcs(cls, arcs: Iterable[Sequence]) -> "ArcSet":
        """
        Build from (start, end) pairs. A pair with start > end wraps
        through 0 and is cut in two. A pair spanning a full turn or more
        gives the whole circle.
        """
        cut: List[Arc] = []
        for pair in arcs:
            s, e = _as_fraction(pair[0]), _as_fraction(pair[1])
            if e - s >= ONE:
                return cls.full()
            s_mod, e_mod = s % 1, e % 1
            if s == e:
                continue
            if e_mod == ZERO and e > s:
                e_mod = ONE
            if s_mod < e_mod:
                cut.append((s_mod, e_mod))
            else:
                cut.append((s_mod, ONE))
                cut.append((ZERO, e_mod))
        return cls(_normalize(cut))

    @classmethod
    def full(cls) -> "ArcSet":
        return cls(((ZERO, ONE),))

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls(())

    #-------------------------------------------------------------------
    @classmethod
    def from_cells(cls, mask, grid_size: int) -> "ArcSet":
        """
        Cell j is the arc [j/G, (j+1)/G). Marked cells are merged into arcs,
        so every endpoint is a multiple of 1/G.
        """
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (grid_size,):
            raise InputError(f"Cell mask has shape {mask.shape}, expected ({grid_size},)")
        arcs: List[Arc] = []
        j = 0
        while j < grid_size:
            if mask[j]:
                start = j
                while j < grid_size and mask[j]:
                    j += 1
                arcs.append((Fraction(start, grid_size), Fraction(j, grid_size)))
            else:
                j += 1
        return cls(_normalize(arcs))

    def to_mask(self, grid_size: int) -> np.ndarray:
        """Grid points j/G that lie in the set."""
        mask = np.zeros(grid_size, dtype=bool)
        for s, e in self.arcs:
            lo = -((-s.numerator * grid_size) // s.denominator)   # ceil(s*G)
            hi = -((-e.numerator * grid_size) // e.denominator)   # ceil(e*G)
            mask[lo:hi] = True
        return mask

    #-------------------------------------------------------------------
    @cached_property
    def measure(self) -> Fraction:
        return sum((e - s for s, e in self.arcs), ZERO)

    def is_empty(self) -> bool:
        return not self.arcs

    def contains(self, angle) -> bool:
        x = _as_fraction(angle) % 1
        return any(s <= x < e for s, e in self.arcs)

    def __bool__(self):
        return bool(self.arcs)

    #-------------------------------------------------------------------
    def union(self, other: "ArcSet") -> "ArcSet":
        return ArcSet(_normalize(self.arcs + other.arcs))

    def intersection(self, other: "ArcSet") -> "ArcSet":
        out: List[Arc] = []
        i = j = 0
        a, b = self.arcs, other.arcs
        while i < len(a) and j < len(b):
            s = max(a[i][0], b[j][0])
            e = min(a[i][1], b[j][1])
            if s < e:
                out.append((s, e))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return ArcSet(_normalize(out))

    def complement(self) -> "ArcSet":
        out: List[Arc] = []
        cursor = ZERO
        for s, e in self.arcs:
            if s > cursor:
                out.append((cursor, s))
            cursor = e
        if cursor < ONE:
            out.append((cursor, ONE))
        return ArcSet(tuple(out))

    def difference(self, other: "ArcSet") -> "ArcSet":
        return self.intersection(other.complement())

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def issubset(self, other: "ArcSet") -> bool:
        return self.difference(other).is_empty()

    def isdisjoint(self, other: "ArcSet") -> bool:
        return self.intersection(other).is_empty()

    #-------------------------------------------------------------------
    def longest_arc(self) -> Arc:
        if not self.arcs:
            raise ZeroMeasureError("Empty arc set has no longest arc")
        best = self.arcs[0]
        for arc in self.arcs[1:]:
            if arc[1] - arc[0] > best[1] - best[0]:
                best = arc
        return best

    def split(self, pieces: int) -> List["ArcSet"]:
        """
        Cut into `pieces` disjoint sets of positive measure whose union is
        the set. Each step takes the first half of the current longest arc.
        """
        if pieces < 1:
            raise InputError("Number of pieces must be at least 1")
        if self.is_empty():
            raise ZeroMeasureError("Cannot split a set of measure zero")
        out: List[ArcSet] = []
        rest = self
        for _ in range(pieces - 1):
            s, e = rest.longest_arc()
            half = ArcSet(((s, (s + e) / 2),))
            out.append(half)
            rest = rest.difference(half)
        out.append(rest)
        return out

    #-------------------------------------------------------------------
    def to_descriptor(self):
        return [[[s.numerator, s.denominator], [e.numerator, e.denominator]] for s, e in self.arcs]

    @classmethod
    def from_descriptor(cls, data) -> "ArcSet":
        if not isinstance(data, list):
            raise DescriptorError(f"Arc set must be a list of [start, end] pairs, got {type(data).__name__}")
        try:
            return cls.from_arcs(data)
        except (TypeError, ValueError, ZeroDivisionError, IndexError) as e:
            raise DescriptorError(f"Bad arc entry in {data!r}: {e}") from e

    def __repr__(self):
        body = ", ".join(f"[{s}, {e})" for s, e in self.arcs)
        return f"ArcSet({body})"
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
def refine_disjoint(sets: Sequence[ArcSet]) -> List[ArcSet]:
    """
    Given sets of positive measure, return pairwise disjoint sets of
    positive measure with sigma_n inside tau_n and the same union.

    Two sets: keep the smaller one and take the other minus it; when that
    difference is empty the two sets coincide and the smaller one is cut
    in halves. More sets: remove the smallest set from all others, refine
    the remainders that keep positive measure, and share the smallest set
    among itself and the remainders that became empty.
    """
    sets = list(sets)
    if not sets:
        raise InputError("refine_disjoint needs at least one set")
    for n, tau in enumerate(sets):
        if tau.measure == 0:
            raise ZeroMeasureError(f"Set {n} has measure zero")

    count = len(sets)
    if count == 1:
        return [sets[0]]

    if count == 2:
        first, second = (0, 1) if sets[0].measure <= sets[1].measure else (1, 0)
        remainder = sets[second] - sets[first]
        result: List[ArcSet] = [ArcSet.empty(), ArcSet.empty()]
        if remainder.measure > 0:
            result[first] = sets[first]
            result[second] = remainder
        else:
            result[first], result[second] = sets[first].split(2)
        return result

    smallest = min(range(count), key=lambda n: (sets[n].measure, n))
    remainders = {n: sets[n] - sets[smallest] for n in range(count) if n != smallest}
    positive = [n for n in sorted(remainders) if remainders[n].measure > 0]
    absorbed = sorted([n for n in remainders if remainders[n].measure == 0] + [smallest])

    result = [ArcSet.empty()] * count
    if positive:
        refined = refine_disjoint([remainders[n] for n in positive])
        for n, sigma in zip(positive, refined):
            result[n] = sigma

    if len(absorbed) > 1:
        logging.info(f"refine_disjoint: sets {absorbed} coincide, splitting set {smallest} into {len(absorbed)} pieces")
    for n, sigma in zip(absorbed, sets[smallest].split(len(absorbed))):
        result[n] = sigma
    return result
#-----------------------------------------------------------------------
