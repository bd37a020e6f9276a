"""Finite incidence systems: flags, chambers, residues, truncations."""

from __future__ import annotations

import collections
import dataclasses
import json
from typing import Iterable, Iterator

import networkx as nx
import numpy as np


@dataclasses.dataclass(frozen=True)
class ValidationReport:
    """Outcome of a validity check; ok iff violations is empty."""

    ok: bool
    violations: tuple[tuple[str, tuple[int, ...]], ...]

    @classmethod
    def from_violations(
        cls, violations: Iterable[tuple[str, tuple[int, ...]]]
    ) -> "ValidationReport":
        vs = tuple(sorted(violations))
        return cls(ok=not vs, violations=vs)


def validate_data(
    types: Iterable[str],
    element_types: Iterable[str],
    incidences: Iterable[Iterable[int]],
) -> ValidationReport:
    """Validate raw system data before construction; reports instead of raising."""
    types = tuple(types)
    labels = list(element_types)
    index = {t: i for i, t in enumerate(types)}
    n = len(labels)
    violations: list[tuple[str, tuple[int, ...]]] = []
    codes = []
    for i, lab in enumerate(labels):
        if lab not in index:
            violations.append(("unknown type", (i,)))
            codes.append(-1)
        else:
            codes.append(index[lab])
    used = set(codes)
    for t in range(len(types)):
        if t not in used:
            violations.append(("empty type fiber", (t,)))
    for pair in incidences:
        a, b = (int(x) for x in pair)
        if not (0 <= a < n and 0 <= b < n):
            violations.append(("dangling id", (min(a, b), max(a, b))))
        elif codes[a] == codes[b]:
            violations.append(("same-type incidence", (min(a, b), max(a, b))))
    return ValidationReport.from_violations(violations)


class IncidenceSystem:
    """Immutable multipartite incidence system over dense element ids 0..n-1."""

    __slots__ = ("types", "type_codes", "pairs", "source_ids", "_adj")

    def __init__(
        self,
        types: Iterable[str],
        type_codes: Iterable[int],
        pairs: Iterable[Iterable[int]],
        source_ids: Iterable[int] | None = None,
    ) -> None:
        tps = tuple(str(t) for t in types)
        if len(set(tps)) != len(tps):
            raise ValueError("duplicate type label")
        codes = np.asarray(list(type_codes), dtype=np.int32)
        n = codes.shape[0]
        if n and (codes.min() < 0 or codes.max() >= len(tps)):
            raise ValueError("type code out of range")
        arr = np.asarray([[int(a), int(b)] for a, b in pairs], dtype=np.int32)
        arr = arr.reshape(-1, 2)
        if arr.shape[0]:
            if arr.min() < 0 or arr.max() >= n:
                raise ValueError("incidence references unknown element id")
            if (arr[:, 0] == arr[:, 1]).any():
                raise ValueError("self-incidence")
            arr = np.unique(np.sort(arr, axis=1), axis=0)
        codes.flags.writeable = False
        arr.flags.writeable = False
        object.__setattr__(self, "types", tps)
        object.__setattr__(self, "type_codes", codes)
        object.__setattr__(self, "pairs", arr)
        object.__setattr__(
            self,
            "source_ids",
            None if source_ids is None else tuple(int(x) for x in source_ids),
        )
        object.__setattr__(self, "_adj", None)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("IncidenceSystem is immutable")

    # -- basic structure ---------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.types)

    @property
    def size(self) -> int:
        return int(self.type_codes.shape[0])

    def type_of(self, x: int) -> str:
        return self.types[int(self.type_codes[x])]

    def fibers(self) -> list[list[int]]:
        """Element ids grouped by type, in typeset order."""
        out: list[list[int]] = [[] for _ in self.types]
        for i, c in enumerate(self.type_codes.tolist()):
            out[c].append(i)
        return out

    def fiber(self, type_label: str) -> list[int]:
        return self.fibers()[self.types.index(type_label)]

    def _adjacency(self) -> list[frozenset[int]]:
        if self._adj is None:
            sets: list[set[int]] = [set() for _ in range(self.size)]
            for a, b in self.pairs.tolist():
                sets[a].add(b)
                sets[b].add(a)
            object.__setattr__(self, "_adj", [frozenset(s) for s in sets])
        return self._adj

    def neighbors(self, x: int) -> frozenset[int]:
        """Elements incident to x."""
        return self._adjacency()[x]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IncidenceSystem):
            return NotImplemented
        return (
            self.types == other.types
            and np.array_equal(self.type_codes, other.type_codes)
            and np.array_equal(self.pairs, other.pairs)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"IncidenceSystem(rank={self.rank}, elements={self.size}, "
            f"incidences={self.pairs.shape[0]})"
        )

    # -- validity ----------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Report same-type incidences and empty type fibers."""
        labels = [self.types[c] for c in self.type_codes.tolist()]
        return validate_data(self.types, labels, self.pairs.tolist())

    # -- flags -------------------------------------------------------------

    def is_flag(self, ids: Iterable[int]) -> bool:
        """True iff ids are elements of the system and pairwise incident."""
        xs = sorted({int(x) for x in ids})
        if xs and not (0 <= xs[0] and xs[-1] < self.size):
            return False
        adj = self._adjacency()
        return all(b in adj[a] for i, a in enumerate(xs) for b in xs[i + 1 :])

    def _flags_with_extensions(
        self,
    ) -> Iterator[tuple[tuple[int, ...], frozenset[int]]]:
        """Every flag together with its full set of common neighbors."""
        adj = self._adjacency()
        universe = frozenset(range(self.size))

        def extend(flag: list[int], ext: frozenset[int]):
            yield tuple(flag), ext
            last = flag[-1] if flag else -1
            for v in sorted(ext):
                if v > last:
                    flag.append(v)
                    yield from extend(flag, ext & adj[v])
                    flag.pop()

        yield from extend([], universe)

    def flags(self) -> Iterator[tuple[int, ...]]:
        """All flags (pairwise-incident element sets), including the empty flag."""
        for flag, _ in self._flags_with_extensions():
            yield flag

    def chambers(self) -> list[tuple[int, ...]]:
        """Flags whose typeset is the full typeset."""
        codes = self.type_codes
        full = frozenset(range(self.rank))
        return [
            f for f in self.flags() if frozenset(int(codes[x]) for x in f) == full
        ]

    def extend_flag_to_chamber(
        self, flag: Iterable[int]
    ) -> frozenset[int] | None:
        """Lowest-id greedy extension of a flag to a chamber, or None."""
        xs = sorted({int(x) for x in flag})
        if not self.is_flag(xs):
            raise ValueError("not a flag")
        adj = self._adjacency()
        codes = self.type_codes
        commons = frozenset(range(self.size))
        for x in xs:
            commons &= adj[x]
        missing = frozenset(range(self.rank)) - {int(codes[x]) for x in xs}

        def search(
            commons: frozenset[int], missing: frozenset[int]
        ) -> list[int] | None:
            if not missing:
                return []
            for v in sorted(commons):
                if int(codes[v]) in missing:
                    rest = search(commons & adj[v], missing - {int(codes[v])})
                    if rest is not None:
                        return [v, *rest]
            return None

        found = search(commons, missing)
        if found is None:
            return None
        return frozenset(xs) | frozenset(found)

    # -- geometry predicates -----------------------------------------------

    def is_geometry(self) -> bool:
        """True iff every flag extends to a chamber (every maximal flag has full type)."""
        codes = self.type_codes
        full = frozenset(range(self.rank))
        for flag, ext in self._flags_with_extensions():
            if not ext and frozenset(int(codes[x]) for x in flag) != full:
                return False
        return True

    def is_firm(self) -> bool:
        """True iff every non-maximal flag lies in at least two chambers."""
        chambers = [frozenset(c) for c in self.chambers()]
        for flag, ext in self._flags_with_extensions():
            if ext:
                fs = frozenset(flag)
                if sum(1 for c in chambers if fs <= c) < 2:
                    return False
        return True

    def residue(self, flag: Iterable[int]) -> "IncidenceSystem":
        """Subsystem of elements incident to every element of the flag."""
        xs = sorted({int(x) for x in flag})
        if not self.is_flag(xs):
            raise ValueError("not a flag")
        codes = self.type_codes
        ftypes = {int(codes[x]) for x in xs}
        commons = frozenset(range(self.size))
        adj = self._adjacency()
        for x in xs:
            commons &= adj[x]
        keep = [x for x in sorted(commons) if int(codes[x]) not in ftypes]
        keep_types = [t for t in range(self.rank) if t not in ftypes]
        tmap = {t: i for i, t in enumerate(keep_types)}
        emap = {x: i for i, x in enumerate(keep)}
        new_pairs = [
            [emap[a], emap[b]]
            for a, b in self.pairs.tolist()
            if a in emap and b in emap
        ]
        return IncidenceSystem(
            types=[self.types[t] for t in keep_types],
            type_codes=[tmap[int(codes[x])] for x in keep],
            pairs=new_pairs,
            source_ids=keep,
        )

    def truncation(self, typeset: Iterable[str]) -> "IncidenceSystem":
        """Subsystem of elements whose type lies in typeset; ids re-densified."""
        want = {str(t) for t in typeset}
        unknown = want - set(self.types)
        if unknown:
            raise ValueError(
                f"typeset is not a subset of the system typeset: {sorted(unknown)}"
            )
        if not want:
            raise ValueError("truncation typeset is empty")
        keep_types = [t for t in range(self.rank) if self.types[t] in want]
        tset = set(keep_types)
        codes = self.type_codes
        keep = [x for x in range(self.size) if int(codes[x]) in tset]
        tmap = {t: i for i, t in enumerate(keep_types)}
        emap = {x: i for i, x in enumerate(keep)}
        new_pairs = [
            [emap[a], emap[b]]
            for a, b in self.pairs.tolist()
            if a in emap and b in emap
        ]
        return IncidenceSystem(
            types=[self.types[t] for t in keep_types],
            type_codes=[tmap[int(codes[x])] for x in keep],
            pairs=new_pairs,
            source_ids=keep,
        )

    def _connected(self, nodes: list[int]) -> bool:
        """Connectivity of the incidence graph restricted to nodes (empty: True)."""
        if len(nodes) <= 1:
            return True
        nodeset = set(nodes)
        adj = self._adjacency()
        seen = {nodes[0]}
        queue = collections.deque([nodes[0]])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y in nodeset and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == len(nodeset)

    def is_residually_connected(self) -> bool:
        """True iff every residue of rank >= 2 has a connected incidence graph."""
        if self.rank < 2:
            return True
        codes = self.type_codes
        for flag, ext in self._flags_with_extensions():
            ftypes = {int(codes[x]) for x in flag}
            if self.rank - len(ftypes) < 2:
                continue
            nodes = [x for x in sorted(ext) if int(codes[x]) not in ftypes]
            if not self._connected(nodes):
                return False
        return True

    def incidence_graph(self) -> nx.Graph:
        """Multipartite graph: one node per element, one edge per incidence."""
        g = nx.Graph()
        for i, c in enumerate(self.type_codes.tolist()):
            g.add_node(i, type=self.types[c])
        g.add_edges_from((int(a), int(b)) for a, b in self.pairs)
        return g

    # -- interchange -------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "types": list(self.types),
            "elements": [
                {"id": i, "type": self.types[c]}
                for i, c in enumerate(self.type_codes.tolist())
            ],
            "incidences": self.pairs.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "IncidenceSystem":
        types = tuple(str(t) for t in data["types"])
        index = {t: i for i, t in enumerate(types)}
        elements = data["elements"]
        n = len(elements)
        if sorted(int(e["id"]) for e in elements) != list(range(n)):
            raise ValueError("element ids must be exactly 0..n-1")
        codes = [0] * n
        for e in elements:
            lab = str(e["type"])
            if lab not in index:
                raise ValueError(f"unknown type label: {lab!r}")
            codes[int(e["id"])] = index[lab]
        return cls(types=types, type_codes=codes, pairs=data["incidences"])

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "IncidenceSystem":
        return cls.from_json_dict(json.loads(text))

    def to_dot(self) -> str:
        lines = ["graph incidence {"]
        for i, c in enumerate(self.type_codes.tolist()):
            lines.append(f'  {i} [label="{i}:{self.types[c]}"];')
        for a, b in self.pairs.tolist():
            lines.append(f"  {a} -- {b};")
        lines.append("}")
        return "\n".join(lines) + "\n"
