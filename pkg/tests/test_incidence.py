"""Flag, residue, truncation, and serialization behavior of incidence systems."""

import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomrep import (
    IncidenceSystem,
    complete_graph_geometry,
    dihedral_geometry,
    gq22,
    validate_data,
)


@st.composite
def small_systems(draw):
    rank = draw(st.integers(1, 3))
    types = [f"t{i}" for i in range(rank)]
    n = draw(st.integers(rank, 7))
    codes = list(range(rank)) + draw(
        st.lists(st.integers(0, rank - 1), min_size=n - rank, max_size=n - rank)
    )
    cross = [
        (a, b) for a in range(n) for b in range(a + 1, n) if codes[a] != codes[b]
    ]
    if cross:
        pairs = draw(st.lists(st.sampled_from(cross), max_size=12))
    else:
        pairs = []
    return IncidenceSystem(types, codes, pairs)


def brute_flags(sys: IncidenceSystem) -> set[tuple[int, ...]]:
    out = set()
    for r in range(sys.size + 1):
        for combo in itertools.combinations(range(sys.size), r):
            if all(
                b in sys.neighbors(a)
                for i, a in enumerate(combo)
                for b in combo[i + 1 :]
            ):
                out.add(combo)
    return out


def brute_chambers(sys: IncidenceSystem) -> set[tuple[int, ...]]:
    full = frozenset(range(sys.rank))
    return {
        f
        for f in brute_flags(sys)
        if frozenset(int(sys.type_codes[x]) for x in f) == full
    }


class TestConstruction:
    def test_pairs_are_deduplicated_and_sorted(self):
        sys = IncidenceSystem(["a", "b"], [0, 1], [[1, 0], [0, 1], [0, 1]])
        assert sys.pairs.tolist() == [[0, 1]]

    def test_duplicate_type_label(self):
        with pytest.raises(ValueError, match="duplicate type label"):
            IncidenceSystem(["a", "a"], [0, 1], [])

    def test_type_code_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            IncidenceSystem(["a"], [0, 1], [])

    def test_unknown_element_id(self):
        with pytest.raises(ValueError, match="unknown element id"):
            IncidenceSystem(["a", "b"], [0, 1], [[0, 2]])

    def test_self_incidence(self):
        with pytest.raises(ValueError, match="self-incidence"):
            IncidenceSystem(["a", "b"], [0, 1], [[1, 1]])

    def test_immutable(self):
        sys = IncidenceSystem(["a"], [0], [])
        with pytest.raises(AttributeError, match="immutable"):
            sys.types = ("b",)

    def test_equality_ignores_source_ids(self):
        a = IncidenceSystem(["a", "b"], [0, 1], [[0, 1]])
        b = IncidenceSystem(["a", "b"], [0, 1], [[1, 0]], source_ids=[5, 7])
        assert a == b

    def test_empty_system(self):
        sys = IncidenceSystem([], [], [])
        assert sys.rank == 0
        assert sys.size == 0
        assert list(sys.flags()) == [()]
        assert sys.chambers() == [()]
        assert sys.is_geometry()
        assert sys.is_firm()
        assert sys.is_residually_connected()


class TestValidation:
    def test_clean_data(self):
        report = validate_data(["a", "b"], ["a", "b"], [[0, 1]])
        assert report.ok
        assert report.violations == ()

    def test_unknown_type(self):
        report = validate_data(["a"], ["a", "z"], [])
        assert not report.ok
        assert ("unknown type", (1,)) in report.violations

    def test_empty_type_fiber(self):
        report = validate_data(["a", "b"], ["a", "a"], [])
        assert ("empty type fiber", (1,)) in report.violations

    def test_dangling_id(self):
        report = validate_data(["a", "b"], ["a", "b"], [[0, 9]])
        assert ("dangling id", (0, 9)) in report.violations

    def test_same_type_incidence(self):
        report = validate_data(["a", "b"], ["a", "a", "b"], [[1, 0]])
        assert ("same-type incidence", (0, 1)) in report.violations

    def test_violations_sorted(self):
        report = validate_data(["a", "b"], ["a", "a"], [[1, 0], [0, 9]])
        assert report.violations == tuple(sorted(report.violations))

    def test_validate_method_on_built_system(self):
        assert dihedral_geometry(5).validate().ok


class TestFlags:
    def test_is_flag_basics(self):
        sys = IncidenceSystem(["a", "b"], [0, 0, 1], [[0, 2]])
        assert sys.is_flag([])
        assert sys.is_flag([1])
        assert sys.is_flag([0, 2])
        assert not sys.is_flag([1, 2])
        assert not sys.is_flag([0, 1])
        assert not sys.is_flag([5])

    @given(small_systems())
    @settings(max_examples=60, deadline=None)
    def test_flags_match_brute_force(self, sys):
        listed = list(sys.flags())
        assert len(listed) == len(set(listed))
        assert set(listed) == brute_flags(sys)

    @given(small_systems())
    @settings(max_examples=60, deadline=None)
    def test_chambers_match_brute_force(self, sys):
        assert set(sys.chambers()) == brute_chambers(sys)

    def test_pentagon_chamber_count(self):
        assert len(dihedral_geometry(5).chambers()) == 20

    def test_gq22_chamber_count(self):
        # 15 lines, 3 points each
        assert len(gq22().chambers()) == 45

    def test_extend_flag_to_chamber(self):
        sys = dihedral_geometry(3)
        for flag in sys.flags():
            chamber = sys.extend_flag_to_chamber(flag)
            assert chamber is not None
            assert set(flag) <= chamber
            assert sys.is_flag(chamber)
            assert len({int(sys.type_codes[x]) for x in chamber}) == sys.rank

    def test_extend_flag_dead_end(self):
        # the octagon system has no chambers at all
        sys = dihedral_geometry(8)
        assert sys.chambers() == []
        assert sys.extend_flag_to_chamber([]) is None

    def test_extend_flag_rejects_non_flag(self):
        sys = IncidenceSystem(["a", "b"], [0, 1], [])
        with pytest.raises(ValueError, match="not a flag"):
            sys.extend_flag_to_chamber([0, 1])


class TestPredicates:
    @pytest.mark.parametrize(
        "n,geometry,firm,rc,chambers",
        [
            (3, True, True, True, 6),
            (4, True, False, False, 4),
            (5, False, False, False, 20),
            (6, False, False, False, 6),
            (8, False, False, False, 0),
        ],
    )
    def test_polygon_predicate_table(self, n, geometry, firm, rc, chambers):
        sys = dihedral_geometry(n)
        assert sys.is_geometry() == geometry
        assert sys.is_firm() == firm
        assert sys.is_residually_connected() == rc
        assert len(sys.chambers()) == chambers

    def test_complete_graph_is_geometry(self):
        sys = complete_graph_geometry(4)
        assert sys.is_geometry()
        assert sys.is_firm()
        assert sys.is_residually_connected()
        assert len(sys.chambers()) == 12

    def test_gq22_predicates(self):
        sys = gq22()
        assert sys.is_geometry()
        assert sys.is_firm()
        assert sys.is_residually_connected()

    def test_disconnected_rank_two_system(self):
        sys = IncidenceSystem(["a", "b"], [0, 1, 0, 1], [[0, 1], [2, 3]])
        assert sys.is_geometry()
        assert not sys.is_firm()
        assert not sys.is_residually_connected()

    def test_rank_one_system_vacuously_connected(self):
        sys = IncidenceSystem(["a"], [0, 0], [])
        assert sys.is_residually_connected()

    @given(small_systems())
    @settings(max_examples=40, deadline=None)
    def test_firmness_matches_brute_force(self, sys):
        chambers = [frozenset(c) for c in brute_chambers(sys)]
        expected = True
        for flag in brute_flags(sys):
            fs = frozenset(flag)
            extendable = any(fs < frozenset(g) for g in brute_flags(sys))
            if extendable and sum(1 for c in chambers if fs <= c) < 2:
                expected = False
        assert sys.is_firm() == expected

    @given(small_systems())
    @settings(max_examples=40, deadline=None)
    def test_residual_connectivity_matches_brute_force(self, sys):
        expected = True
        for flag in brute_flags(sys):
            res = sys.residue(flag)
            if res.rank < 2:
                continue
            g = res.incidence_graph()
            if g.number_of_nodes() > 1 and not nx.is_connected(g):
                expected = False
        assert sys.is_residually_connected() == expected


class TestResidues:
    def test_residue_keeps_typeset_order(self):
        sys = IncidenceSystem(
            ["a", "b", "c"],
            [0, 1, 2, 2],
            [[0, 1], [1, 2], [1, 3], [0, 2]],
        )
        res = sys.residue([1])
        assert res.types == ("a", "c")

    def test_residue_rejects_non_flag(self):
        sys = IncidenceSystem(["a", "b"], [0, 1], [])
        with pytest.raises(ValueError, match="not a flag"):
            sys.residue([0, 1])

    @given(small_systems())
    @settings(max_examples=60, deadline=None)
    def test_residue_matches_definition(self, sys):
        for flag in brute_flags(sys):
            res = sys.residue(flag)
            ftypes = {int(sys.type_codes[x]) for x in flag}
            expected = [
                x
                for x in range(sys.size)
                if int(sys.type_codes[x]) not in ftypes
                and all(x in sys.neighbors(y) for y in flag)
            ]
            assert list(res.source_ids) == expected
            back = {i: x for i, x in enumerate(res.source_ids)}
            got = {(back[a], back[b]) for a, b in res.pairs.tolist()}
            want = {
                (a, b)
                for a, b in itertools.combinations(expected, 2)
                if b in sys.neighbors(a)
            }
            assert got == want

    def test_vertex_residue_of_pentagon(self):
        sys = dihedral_geometry(5)
        vertex = sys.fiber(sys.types[0])[0]
        res = sys.residue([vertex])
        assert res.rank == 2
        assert res.size == 4  # two edges of each class through a vertex


class TestTruncations:
    def test_truncation_redensifies_ids(self):
        sys = IncidenceSystem(["a", "b", "c"], [0, 1, 2], [[0, 1], [1, 2]])
        trunc = sys.truncation(["a", "c"])
        assert trunc.types == ("a", "c")
        assert trunc.size == 2
        assert trunc.source_ids == (0, 2)
        assert trunc.pairs.tolist() == []

    def test_truncation_source_ids_compose(self):
        sys = dihedral_geometry(5)
        first = sys.truncation([sys.types[0], sys.types[1]])
        second = first.truncation([sys.types[0]])
        direct = sys.truncation([sys.types[0]])
        assert second == direct
        composed = tuple(first.source_ids[i] for i in second.source_ids)
        assert composed == direct.source_ids

    def test_truncation_unknown_label(self):
        sys = IncidenceSystem(["a"], [0], [])
        with pytest.raises(ValueError, match="not a subset"):
            sys.truncation(["a", "z"])

    def test_truncation_empty_typeset(self):
        sys = IncidenceSystem(["a"], [0], [])
        with pytest.raises(ValueError, match="empty"):
            sys.truncation([])

    @given(small_systems())
    @settings(max_examples=60, deadline=None)
    def test_truncation_matches_definition(self, sys):
        keep = sys.types[: max(1, sys.rank - 1)]
        trunc = sys.truncation(keep)
        expected = [
            x for x in range(sys.size) if sys.type_of(x) in set(keep)
        ]
        assert list(trunc.source_ids) == expected
        for i, x in enumerate(trunc.source_ids):
            assert trunc.type_of(i) == sys.type_of(x)


class TestInterchange:
    @given(small_systems())
    @settings(max_examples=60, deadline=None)
    def test_json_round_trip(self, sys):
        text = sys.to_json()
        back = IncidenceSystem.from_json(text)
        assert back == sys
        assert back.to_json() == text

    def test_from_json_rejects_sparse_ids(self):
        data = {
            "types": ["a"],
            "elements": [{"id": 1, "type": "a"}],
            "incidences": [],
        }
        with pytest.raises(ValueError, match="exactly 0"):
            IncidenceSystem.from_json_dict(data)

    def test_from_json_rejects_unknown_label(self):
        data = {
            "types": ["a"],
            "elements": [{"id": 0, "type": "z"}],
            "incidences": [],
        }
        with pytest.raises(ValueError, match="unknown type label"):
            IncidenceSystem.from_json_dict(data)

    def test_to_dot(self):
        sys = IncidenceSystem(["a", "b"], [0, 1], [[0, 1]])
        dot = sys.to_dot()
        assert dot == (
            "graph incidence {\n"
            '  0 [label="0:a"];\n'
            '  1 [label="1:b"];\n'
            "  0 -- 1;\n"
            "}\n"
        )

    def test_incidence_graph(self):
        sys = dihedral_geometry(5)
        g = sys.incidence_graph()
        assert g.number_of_nodes() == sys.size
        assert g.number_of_edges() == sys.pairs.shape[0]
        assert g.nodes[0]["type"] == sys.types[0]
