# test_scoring.py
# Contact: rlcommunity developers

import io
import numpy
import torch
import pytest

from rlcommunity.graph import Graph
from rlcommunity.graph import erdos_renyi
from rlcommunity.graph import ring_of_cliques
from rlcommunity.scoring import community_tally
from rlcommunity.scoring import modularity
from rlcommunity.scoring import modularity_density
from rlcommunity.scoring import score
from rlcommunity.scoring import exact_best_partition
from rlcommunity.scoring import write_partition
from rlcommunity.scoring import read_partition
from rlcommunity.scoring import _restricted_growth_strings

from rlcommunity._utils import ExactSearchRefused

from numpy.testing import assert_raises
from numpy.testing import assert_array_equal
from numpy.testing import assert_almost_equal


@pytest.fixture
def triangles():
	return Graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


@pytest.fixture
def cliques():
	return ring_of_cliques(4, 5)


@pytest.fixture
def clique_partition():
	return numpy.repeat(numpy.arange(4), 5)


###


def test_tally(triangles):
	tally = community_tally(triangles, [0, 0, 1, 1, 1, 1])

	assert tally.m == 6
	assert_array_equal(tally.internal, [1, 3])
	assert_array_equal(tally.external, [2, 2])
	assert_array_equal(tally.sizes, [2, 4])
	assert_array_equal(tally.cross_pairs, [[0, 1]])
	assert_array_equal(tally.cross_counts, [2])
	assert_array_equal(tally.cross_matrix().toarray(), [[0, 2], [2, 0]])


def test_tally_conservation():
	random_state = numpy.random.RandomState(0)

	for i in range(50):
		g = erdos_renyi(30, 0.15, random_state=i)
		part = random_state.randint(5, size=30)
		tally = community_tally(g, part)

		assert numpy.sum(2 * tally.internal + tally.external) == 2 * g.m
		assert tally.sizes.sum() == g.n
		assert tally.internal.sum() + tally.cross_counts.sum() == g.m


def test_partition_raises(triangles):
	assert_raises(ValueError, modularity, triangles, [0, 0, 1])
	assert_raises(ValueError, modularity, triangles, [0.5] * 6)
	assert_raises(ValueError, modularity, triangles, [[0] * 6])


###


def test_modularity_triangles(triangles):
	assert_almost_equal(modularity(triangles, [0, 0, 0, 1, 1, 1]), 0.5,
		decimal=12)
	assert_almost_equal(modularity(triangles, torch.tensor([7, 7, 7, 2, 2,
		2])), 0.5, decimal=12)


def test_modularity_single_community():
	for i in range(1000):
		g = erdos_renyi(5 + i % 30, 0.2, random_state=i)
		assert modularity(g, numpy.zeros(g.n, dtype=int)) == 0.0


def test_modularity_no_edges():
	g = Graph(4)
	assert modularity(g, [0, 1, 2, 3]) == 0.0
	assert modularity_density(g, [0, 0, 1, 1]) == 0.0


def test_modularity_empty_graph():
	g = Graph(0)
	assert modularity(g, []) == 0.0
	assert modularity_density(g, []) == 0.0


def test_modularity_triangle_split():
	g = Graph(3, [(0, 1), (1, 2), (0, 2)])
	assert_almost_equal(modularity(g, [0, 1, 1]), -2.0 / 9, decimal=12)


def test_modularity_relabel_invariant(cliques, clique_partition):
	permuted = numpy.array([3, 0, 2, 1])[clique_partition]
	assert_almost_equal(modularity(cliques, clique_partition),
		modularity(cliques, permuted), decimal=14)


###


def test_modularity_density_triangles(triangles):
	assert_almost_equal(modularity_density(triangles, [0, 0, 0, 1, 1, 1]),
		0.5, decimal=12)


def test_modularity_density_cliques(cliques, clique_partition):
	# per clique: 10/44 - (22/88)^2; between: 4 links of 1/88 * 1/25 each
	expected = 4 * (10.0 / 44 - (22.0 / 88) ** 2) - 2 * 4 * (1.0 / 88) / 25
	assert_almost_equal(modularity_density(cliques, clique_partition),
		expected, decimal=12)
	assert abs(expected - 0.6554) < 1e-3


def test_modularity_density_singletons():
	g = Graph(3, [(0, 1), (1, 2), (0, 2)])

	# one-node communities have no density and each link counts 1/(2m) * 1
	assert_almost_equal(modularity_density(g, [0, 1, 2]), -2 * 3 / 6.0,
		decimal=12)


def test_score_dispatch(triangles):
	part = [0, 0, 0, 1, 1, 1]

	assert score(triangles, part, "q") == modularity(triangles, part)
	assert score(triangles, part) == modularity_density(triangles, part)
	assert_raises(ValueError, score, triangles, part, "Q")


###


def test_restricted_growth_strings():
	strings = [list(a) for a in _restricted_growth_strings(3)]
	assert strings == [[0, 0, 0], [0, 0, 1], [0, 1, 0], [0, 1, 1],
		[0, 1, 2]]

	bell = [1, 2, 5, 15, 52, 203]
	for n, b in enumerate(bell, 1):
		assert sum(1 for _ in _restricted_growth_strings(n)) == b


def test_exact_best_partition_triangles(triangles):
	part, value = exact_best_partition(triangles)

	assert_array_equal(part, [0, 0, 0, 1, 1, 1])
	assert_almost_equal(value, 0.5, decimal=12)


def test_exact_best_partition_complete():
	g = Graph(5, [(i, j) for i in range(5) for j in range(i+1, 5)])
	part, value = exact_best_partition(g)

	assert_array_equal(part, [0, 0, 0, 0, 0])
	assert value == 0.0


def test_exact_best_partition_qds(triangles):
	part, value = exact_best_partition(triangles, metric="qds")

	assert_array_equal(part, [0, 0, 0, 1, 1, 1])
	assert_almost_equal(value, 0.5, decimal=12)


def test_exact_best_partition_upper_bound():
	random_state = numpy.random.RandomState(0)
	g = erdos_renyi(7, 0.5, random_state=1)
	_, value = exact_best_partition(g)

	for _ in range(50):
		part = random_state.randint(3, size=7)
		assert modularity(g, part) <= value + 1e-12


def test_exact_best_partition_edge_cases():
	part, value = exact_best_partition(Graph(0))
	assert part.shape == (0,)
	assert value == 0.0

	part, value = exact_best_partition(Graph(1))
	assert_array_equal(part, [0])
	assert value == 0.0


def test_exact_best_partition_raises():
	assert_raises(ExactSearchRefused, exact_best_partition, Graph(13))
	assert_raises(ValueError, exact_best_partition, Graph(3), "x")


###


def test_partition_file_round_trip(triangles):
	g = Graph(6, triangles.edges, original_ids=[10, 11, 12, 20, 21, 22])
	stream = io.StringIO()
	write_partition(g, [5, 5, 5, 9, 9, 9], stream)

	assert stream.getvalue().splitlines()[0] == "10\t0"
	assert stream.getvalue().splitlines()[3] == "20\t1"

	stream.seek(0)
	assert_array_equal(read_partition(g, stream), [0, 0, 0, 1, 1, 1])


def test_read_partition_raises(triangles):
	assert_raises(ValueError, read_partition, triangles, io.StringIO("0\t1\n"))
	assert_raises(ValueError, read_partition, triangles,
		io.StringIO("0\t1\t2\n"))
	assert_raises(ValueError, read_partition, triangles,
		io.StringIO("99\t1\n"))
