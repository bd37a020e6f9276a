"""Permutation groups: deterministic stabilizer chains, orbits, fingerprints."""

from __future__ import annotations

import collections
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class Permutation:
    """A bijection of {0..degree-1}; (a * b) applies a first, then b."""

    __slots__ = ("images", "_key")

    def __init__(self, images: Sequence[int] | np.ndarray):
        arr = np.array(images, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("images must be a flat sequence")
        n = arr.shape[0]
        seen = np.zeros(n, dtype=bool)
        if n and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("images out of range")
        seen[arr] = True
        if not seen.all():
            raise ValueError("images is not a bijection")
        arr.setflags(write=False)
        self.images = arr
        self._key = arr.tobytes()

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(np.arange(degree, dtype=np.int64))

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """Build from disjoint cycles given as point sequences."""
        images = np.arange(degree, dtype=np.int64)
        for cycle in cycles:
            for a, b in zip(cycle, cycle[1:] + type(cycle)(cycle[:1])):
                images[a] = b
        return cls(images)

    @property
    def degree(self) -> int:
        return int(self.images.shape[0])

    @property
    def is_identity(self) -> bool:
        return bool((self.images == np.arange(self.degree)).all())

    def __call__(self, point: int) -> int:
        return int(self.images[point])

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return Permutation(other.images[self.images])

    def inverse(self) -> "Permutation":
        inv = np.empty(self.degree, dtype=np.int64)
        inv[self.images] = np.arange(self.degree)
        return Permutation(inv)

    def order(self) -> int:
        return math.lcm(*[len(c) for c in self.cycles()])

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its minimum, sorted by minimum."""
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cycle = [start]
            seen[start] = True
            p = self(start)
            while p != start:
                seen[p] = True
                cycle.append(p)
                p = self(p)
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    def restricted(self, points: Sequence[int]) -> "Permutation":
        """The induced permutation on an invariant point list, reindexed 0..len-1."""
        index = {p: i for i, p in enumerate(points)}
        try:
            return Permutation([index[self(p)] for p in points])
        except KeyError:
            raise ValueError("point list is not invariant") from None

    def to_list(self) -> list[int]:
        return [int(x) for x in self.images]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: "Permutation") -> bool:
        return self.to_list() < other.to_list()

    def __repr__(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycles)


class _Level:
    """One stabilizer-chain level: base point, strong generators, transversal."""

    __slots__ = ("point", "gens", "transversal")

    def __init__(self, point: int):
        self.point = point
        self.gens: list[Permutation] = []
        self.transversal: dict[int, Permutation] = {}


@dataclass(frozen=True)
class GroupFingerprint:
    """Order, element-order histogram, and center order of a small group."""

    order: int
    order_histogram: tuple[tuple[int, int], ...]
    center_order: int

    def to_json_dict(self) -> dict:
        return {
            "order": str(self.order),
            "order_histogram": {str(k): v for k, v in self.order_histogram},
            "center_order": str(self.center_order),
        }


@dataclass(frozen=True)
class BlockAction:
    """Induced action of a group on a block system: image group and kernel."""

    image: "PermGroup"
    kernel: "PermGroup"


class PermGroup:
    """Permutation group with an eagerly built deterministic stabilizer chain."""

    def __init__(self, degree: int, generators: Iterable[Permutation],
                 base_prefix: Sequence[int] = ()):
        self.degree = degree
        gens = []
        for g in generators:
            if g.degree != degree:
                raise ValueError("generator degree mismatch")
            if not g.is_identity and g not in gens:
                gens.append(g)
        self.generators = tuple(gens)
        self._identity = Permutation.identity(degree)
        self._levels = self._build_chain(tuple(base_prefix))
        self._base_prefix_len = len(base_prefix)

    # chain construction

    def _build_chain(self, base_prefix: tuple[int, ...]) -> list[_Level]:
        levels = [_Level(p) for p in base_prefix]

        def first_moved(g: Permutation) -> int:
            diff = np.nonzero(g.images != np.arange(self.degree))[0]
            return int(diff[0])

        def place(g: Permutation, start: int) -> int:
            """Add g as a strong generator at levels start..j; return j."""
            j = start
            while j < len(levels) and g(levels[j].point) == levels[j].point:
                j += 1
            if j == len(levels):
                levels.append(_Level(first_moved(g)))
            for l in range(start, j + 1):
                levels[l].gens.append(g)
            return j

        for g in self.generators:
            place(g, 0)

        def rebuild_transversal(level: _Level) -> None:
            trans = {level.point: self._identity}
            queue = collections.deque([level.point])
            while queue:
                p = queue.popleft()
                for g in level.gens:
                    q = g(p)
                    if q not in trans:
                        trans[q] = trans[p] * g
                        queue.append(q)
            level.transversal = trans

        def sift(g: Permutation, start: int) -> tuple[Permutation, int]:
            h = g
            for i in range(start, len(levels)):
                lv = levels[i]
                p = h(lv.point)
                if p == lv.point:
                    continue
                if p not in lv.transversal:
                    return h, i
                h = h * lv.transversal[p].inverse()
            return h, len(levels)

        i = len(levels) - 1
        while i >= 0:
            lv = levels[i]
            rebuild_transversal(lv)
            found = None
            for p in sorted(lv.transversal):
                up = lv.transversal[p]
                for g in lv.gens:
                    q = g(p)
                    schreier = up * g * lv.transversal[q].inverse()
                    if schreier.is_identity:
                        continue
                    h, j = sift(schreier, i + 1)
                    if not h.is_identity:
                        found = (h, i + 1)
                        break
                if found:
                    break
            if found:
                h, start = found
                j = place(h, start)
                for l in range(start, j + 1):
                    rebuild_transversal(levels[l])
                i = j
            else:
                i -= 1
        return levels

    # queries

    def order(self) -> int:
        n = 1
        for lv in self._levels:
            n *= len(lv.transversal)
        return n

    def _sift(self, g: Permutation) -> Permutation:
        h = g
        for lv in self._levels:
            p = h(lv.point)
            if p == lv.point:
                continue
            if p not in lv.transversal:
                return h
            h = h * lv.transversal[p].inverse()
        return h

    def contains(self, g: Permutation) -> bool:
        if g.degree != self.degree:
            raise ValueError("degree mismatch")
        return self._sift(g).is_identity

    def __contains__(self, g: Permutation) -> bool:
        return self.contains(g)

    def orbit(self, point: int) -> list[int]:
        seen = {point}
        queue = collections.deque([point])
        while queue:
            p = queue.popleft()
            for g in self.generators:
                q = g(p)
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
        return sorted(seen)

    def orbits(self) -> list[list[int]]:
        """Orbit partition of the domain, cells sorted by minimum element."""
        seen = set()
        out = []
        for p in range(self.degree):
            if p in seen:
                continue
            orb = self.orbit(p)
            seen.update(orb)
            out.append(orb)
        return out

    def enumerate_elements(self, bound: int = 10000) -> list[Permutation]:
        """All elements, sorted lexicographically by image arrays."""
        n = self.order()
        if n > bound:
            raise ValueError(f"group too large: order {n} exceeds bound {bound}")
        transversals = [
            [lv.transversal[p] for p in sorted(lv.transversal)] for lv in self._levels
        ]
        elements = []
        for pick in itertools.product(*transversals):
            g = self._identity
            for u in reversed(pick):
                g = g * u
            elements.append(g)
        elements.sort()
        return elements

    def fingerprint(self, bound: int = 10000) -> GroupFingerprint:
        """Order, element-order histogram, center order (≤ bound elements)."""
        elements = self.enumerate_elements(bound)
        histogram: dict[int, int] = {}
        center = 0
        for g in elements:
            histogram[g.order()] = histogram.get(g.order(), 0) + 1
            if all(g * s == s * g for s in self.generators):
                center += 1
        return GroupFingerprint(
            order=len(elements),
            order_histogram=tuple(sorted(histogram.items())),
            center_order=center,
        )

    def is_transitive_on(self, tuples: Sequence[tuple[int, ...]]) -> bool:
        """True iff the componentwise action has a single orbit on the tuple list."""
        if not tuples:
            raise ValueError("tuple list is empty")
        pool = set(tuples)
        for t in tuples:
            if any(p < 0 or p >= self.degree for p in t):
                raise ValueError(f"tuple {t} contains out-of-domain point")
        seen = {tuples[0]}
        queue = [tuples[0]]
        while queue:
            t = queue.pop(0)
            for g in self.generators:
                image = tuple(g(p) for p in t)
                if image not in pool:
                    raise ValueError(f"tuple list not invariant: {t} -> {image}")
                if image not in seen:
                    seen.add(image)
                    queue.append(image)
        return len(seen) == len(pool)

    def induced_action(self, blocks: Sequence[Sequence[int]]) -> BlockAction:
        """Action on disjoint blocks: image group on block indices plus kernel."""
        block_of: dict[int, int] = {}
        for bi, block in enumerate(blocks):
            for p in block:
                if p in block_of:
                    raise ValueError("blocks are not disjoint")
                block_of[p] = bi
        nb = len(blocks)
        block_perms = []
        extended = []
        for g in self.generators:
            images = []
            for bi, block in enumerate(blocks):
                targets = {block_of.get(g(p)) for p in block}
                if len(targets) != 1 or None in targets:
                    raise ValueError(
                        f"generator {g!r} splits block {bi}"
                    )
                images.append(targets.pop())
            bp = Permutation(images)
            block_perms.append(bp)
            ext = np.concatenate([g.images, np.array(images, dtype=np.int64) + self.degree])
            extended.append(Permutation(ext))
        image = PermGroup(nb, block_perms)
        prefix = tuple(range(self.degree, self.degree + nb))
        big = PermGroup(self.degree + nb, extended, base_prefix=prefix)
        kernel_gens = [
            g.restricted(range(self.degree)) for g in big.stabilizer_generators(nb)
        ]
        kernel = PermGroup(self.degree, kernel_gens)
        return BlockAction(image=image, kernel=kernel)

    def stabilizer_generators(self, prefix_len: int) -> list[Permutation]:
        """Strong generators fixing the first prefix_len base-prefix points."""
        if prefix_len > self._base_prefix_len:
            raise ValueError("chain was not built with that base prefix")
        if prefix_len >= len(self._levels):
            return []
        return list(self._levels[prefix_len].gens)

    def base_points(self) -> list[int]:
        return [lv.point for lv in self._levels]
