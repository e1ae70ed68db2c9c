import numpy as np
import pytest

from matchamli import (BuildError, GridSpec, connected_components,
                       fichera_graph, grid_graph, lshape_graph,
                       unstructured_2d)
from matchamli.graphs import is_connected


class TestGridGraph:
    def test_path_of_three(self):
        g, coords = grid_graph(GridSpec((3,)))
        assert g.n == 3 and g.num_edges == 2
        assert coords.tolist() == [[0], [1], [2]]

    def test_two_by_two(self):
        g, _ = grid_graph(GridSpec((2, 2)))
        assert g.n == 4 and g.num_edges == 4

    def test_four_by_four(self):
        g, _ = grid_graph(GridSpec((4, 4)))
        assert g.n == 16 and g.num_edges == 24

    def test_degree_bound(self):
        for dims in [(5,), (4, 6), (3, 3, 3)]:
            g, _ = grid_graph(GridSpec(dims))
            assert g.max_degree <= 2 * len(dims)

    def test_edges_are_unit_steps(self):
        g, coords = grid_graph(GridSpec((3, 4)))
        for i, j in g.edges:
            diff = np.abs(coords[i] - coords[j])
            assert diff.sum() == 1

    def test_connected(self):
        for dims in [(7,), (3, 5), (2, 3, 4)]:
            g, _ = grid_graph(GridSpec(dims))
            assert connected_components(g).max() == 0

    def test_invalid_dims(self):
        with pytest.raises(ValueError):
            GridSpec((0, 4))

    def test_disconnected_mask_rejected(self):
        def mask(coords):
            return coords[:, 0] != 2

        with pytest.raises(BuildError, match="disconnected"):
            grid_graph(GridSpec((5,), mask=mask))


class TestMaskedFamilies:
    def test_lshape_small_count(self):
        g, _ = lshape_graph(4)
        assert g.n == 12

    def test_fichera_minimal(self):
        g, _ = fichera_graph(2)
        assert g.n == 7
        assert is_connected(g)

    def test_lshape_large_count_and_connectivity(self):
        g, _ = lshape_graph(128)
        assert g.n == 12288
        assert is_connected(g)

    def test_odd_n_rejected(self):
        with pytest.raises(ValueError):
            lshape_graph(5)
        with pytest.raises(ValueError):
            fichera_graph(3)

    def test_lshape_coords_exclude_quadrant(self):
        _, coords = lshape_graph(8)
        assert not np.any((coords[:, 0] >= 4) & (coords[:, 1] >= 4))


class TestUnstructured2d:
    def test_four_point_triangulation(self):
        # all these seeds leave the perturbed corners in convex position,
        # so any triangulation has 4 boundary edges plus one diagonal
        for seed in range(6):
            g = unstructured_2d(2, seed)
            assert g.n == 4
            assert g.num_edges == 5

    def test_size_and_planarity(self):
        g = unstructured_2d(16, 7)
        assert g.n == 256
        assert g.num_edges <= 3 * 256 - 6

    def test_deterministic_per_seed(self):
        g1 = unstructured_2d(16, 7)
        g2 = unstructured_2d(16, 7)
        assert np.array_equal(g1.edges, g2.edges)
        g3 = unstructured_2d(16, 8)
        assert not np.array_equal(g1.edges, g3.edges)

    def test_connected(self):
        for seed in (0, 3):
            g = unstructured_2d(10, seed)
            assert is_connected(g)

    def test_rejects_tiny(self):
        with pytest.raises(ValueError):
            unstructured_2d(1, 0)
