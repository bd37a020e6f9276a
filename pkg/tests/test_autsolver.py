"""Correlation-group search, brute-force agreement, and verdict reporting."""

import pytest

from geomrep import (
    IncidenceSystem,
    PermGroup,
    Permutation,
    brute_force_automorphisms,
    complete_graph_geometry,
    correlation_group,
    correlation_type_action,
    cube_geometry,
    dihedral_geometry,
    find_isomorphism,
    gq22,
    type_preserving_group,
    verify_representation,
)


def relabel(sys: IncidenceSystem, perm: list[int]) -> IncidenceSystem:
    """Copy of sys with element x renamed perm[x]."""
    inverse = [0] * len(perm)
    for x, y in enumerate(perm):
        inverse[y] = x
    return IncidenceSystem(
        types=sys.types,
        type_codes=[int(sys.type_codes[inverse[y]]) for y in range(sys.size)],
        pairs=[[perm[a], perm[b]] for a, b in sys.pairs.tolist()],
    )


class TestSearchAgainstBruteForce:
    @pytest.mark.parametrize(
        "sys",
        [
            dihedral_geometry(3),
            dihedral_geometry(4),
            dihedral_geometry(6),
            dihedral_geometry(8),
            complete_graph_geometry(3),
            complete_graph_geometry(4),
            IncidenceSystem(["a", "b"], [0, 1, 0, 1], [[0, 1], [2, 3]]),
        ],
    )
    def test_orders_and_elements_match(self, sys):
        res = correlation_group(sys)
        brute = brute_force_automorphisms(sys)
        assert res.aut_order == len(brute)
        group = PermGroup(sys.size, list(res.correlation_gens))
        assert {tuple(g.to_list()) for g in group.enumerate_elements()} == {
            tuple(g.to_list()) for g in brute
        }
        type_preserving = sum(
            1
            for g in brute
            if correlation_type_action(sys, g) == list(range(sys.rank))
        )
        assert res.aut_i_order == type_preserving

    def test_direct_kernel_search_agrees(self):
        for sys in (dihedral_geometry(5), gq22(), complete_graph_geometry(4)):
            res = correlation_group(sys)
            assert type_preserving_group(sys).order() == res.aut_i_order


class TestKnownOrders:
    @pytest.mark.parametrize(
        "n,aut,aut_i",
        [(3, 12, 6), (4, 8, 4), (5, 20, 10), (6, 12, 6), (7, 42, 14), (8, 32, 8)],
    )
    def test_polygon_systems(self, n, aut, aut_i):
        res = correlation_group(dihedral_geometry(n))
        assert (res.aut_order, res.aut_i_order) == (aut, aut_i)
        assert res.out_order == aut // aut_i

    @pytest.mark.parametrize(
        "n,aut,aut_i", [(3, 12, 6), (4, 24, 24), (5, 120, 120)]
    )
    def test_complete_graph_systems(self, n, aut, aut_i):
        res = correlation_group(complete_graph_geometry(n))
        assert (res.aut_order, res.aut_i_order) == (aut, aut_i)

    def test_gq22_orders(self):
        res = correlation_group(gq22())
        assert (res.aut_order, res.aut_i_order, res.out_order) == (1440, 720, 2)

    @pytest.mark.parametrize("vertex_adjacency", [True, False])
    def test_cube_orders(self, vertex_adjacency):
        sys = cube_geometry(vertex_adjacency=vertex_adjacency)
        res = correlation_group(sys)
        assert (res.aut_order, res.aut_i_order, res.out_order) == (48, 24, 2)
        kernel = PermGroup(sys.size, list(res.type_preserving_gens))
        vertex_orbits = [
            orbit for orbit in kernel.orbits() if int(sys.type_codes[orbit[0]]) < 2
        ]
        assert sorted(len(o) for o in vertex_orbits) == [4, 4]

    def test_kernel_is_normal(self):
        sys = dihedral_geometry(5)
        res = correlation_group(sys)
        kernel = PermGroup(sys.size, list(res.type_preserving_gens))
        for g in res.correlation_gens:
            for h in res.type_preserving_gens:
                assert kernel.contains(g.inverse() * h * g)

    def test_json_dict(self):
        res = correlation_group(dihedral_geometry(5))
        data = res.to_json_dict()
        assert data["aut_order"] == "20"
        assert data["aut_i_order"] == "10"
        assert data["out_order"] == "2"
        labels = {tuple(g) for g in data["type_action_gens"]}
        swap = (res.types[0], res.types[2], res.types[1])
        assert swap in labels


class TestTypeAction:
    def test_identity_is_type_preserving(self):
        sys = dihedral_geometry(5)
        assert correlation_type_action(sys, Permutation.identity(sys.size)) == [
            0,
            1,
            2,
        ]

    def test_generators_are_correlations(self):
        sys = dihedral_geometry(5)
        res = correlation_group(sys)
        actions = set()
        for g in res.correlation_gens:
            tact = correlation_type_action(sys, g)
            assert tact is not None
            actions.add(tuple(tact))
        assert actions <= {(0, 1, 2), (0, 2, 1)}

    def test_pair_breaking_permutation_rejected(self):
        sys = dihedral_geometry(5)
        # swapping two non-equivalent vertices alone breaks incidences
        images = list(range(sys.size))
        images[0], images[2] = 2, 0
        assert correlation_type_action(sys, Permutation(images)) is None

    def test_wrong_degree_rejected(self):
        sys = dihedral_geometry(5)
        assert correlation_type_action(sys, Permutation.identity(3)) is None

    def test_type_mixing_rejected(self):
        sys = IncidenceSystem(["a", "b"], [0, 0, 1, 1], [])
        assert correlation_type_action(sys, Permutation([0, 2, 1, 3])) is None


class TestIsomorphism:
    def test_identity_isomorphism(self):
        sys = dihedral_geometry(5)
        mapping = find_isomorphism(sys, sys)
        assert mapping is not None
        assert correlation_type_action(sys, Permutation(mapping)) is not None

    def test_relabeled_copy(self):
        sys = gq22()
        perm = [(7 * x + 3) % sys.size for x in range(sys.size)]
        other = relabel(sys, perm)
        mapping = find_isomorphism(sys, other)
        assert mapping is not None
        neighbors = {
            (a, b) for a, b in sys.pairs.tolist()
        } | {(b, a) for a, b in sys.pairs.tolist()}
        for a, b in neighbors:
            assert (
                min(mapping[a], mapping[b]),
                max(mapping[a], mapping[b]),
            ) in {tuple(p) for p in other.pairs.tolist()}

    def test_size_mismatch(self):
        assert find_isomorphism(dihedral_geometry(3), dihedral_geometry(4)) is None

    def test_non_isomorphic_same_profile(self):
        # eight-cycle vs two four-cycles: same fibers, degrees, and pair count
        cycle8 = IncidenceSystem(
            ["a", "b"],
            [0, 1, 0, 1, 0, 1, 0, 1],
            [[i, (i + 1) % 8] for i in range(8)],
        )
        two_cycles = IncidenceSystem(
            ["a", "b"],
            [0, 1, 0, 1, 0, 1, 0, 1],
            [[0, 1], [1, 2], [2, 3], [3, 0], [4, 5], [5, 6], [6, 7], [7, 4]],
        )
        assert find_isomorphism(cycle8, two_cycles) is None
        assert find_isomorphism(cycle8, cycle8) is not None


class TestVerification:
    def test_exact_match(self):
        report = verify_representation(dihedral_geometry(8), 8, 32)
        assert report.verdict == "representation"
        assert report.result.aut_order == 32
        assert report.aut_fingerprint is not None

    def test_weak_containment(self):
        # triangle system over-represents: expected orders divide computed ones
        report = verify_representation(complete_graph_geometry(3), 6, 6)
        assert report.verdict == "weak-or-mismatch"

    def test_incompatible(self):
        report = verify_representation(complete_graph_geometry(3), 5, 7)
        assert report.verdict == "fail"

    def test_fingerprint_center(self):
        report = verify_representation(gq22(), 720, 1440)
        assert report.verdict == "representation"
        assert report.aut_fingerprint is not None
        assert report.aut_fingerprint.center_order == 1

    def test_json_shape(self):
        report = verify_representation(dihedral_geometry(3), 6, 12, "triangle")
        data = report.to_json_dict()
        assert data["verdict"] == "representation"
        assert data["description"] == "triangle"
        assert data["expected_inn"] == "6"
        assert data["expected_aut"] == "12"


class TestBruteForceGuard:
    def test_element_bound(self):
        with pytest.raises(ValueError, match="exceeds bound"):
            brute_force_automorphisms(gq22())

    def test_bound_override(self):
        with pytest.raises(ValueError, match="exceeds bound"):
            brute_force_automorphisms(dihedral_geometry(3), element_bound=5)
