# multilevel.py
# Contact: rlcommunity developers

import time
import logging

import numpy
import torch

from .._utils import _check_parameter
from .._utils import _check_random_state
from .._utils import _compact_labels
from .._utils import eps

from ..scoring import modularity

from ._detector import Detector


logger = logging.getLogger(__name__)


class _Level(object):
	"""A weighted graph whose nodes are the communities of the level below.

	`adjacency[i]` maps each neighbor to the edge weight towards it, self
	excluded; `loops[i]` is the weight of edges inside node i and
	`degrees[i]` counts loops twice.
	"""

	def __init__(self, adjacency, loops):
		self.adjacency = adjacency
		self.loops = loops
		self.degrees = [sum(a.values()) + 2 * l for a, l in zip(adjacency,
			loops)]

	def __len__(self):
		return len(self.adjacency)

	@classmethod
	def from_graph(cls, g):
		adjacency = [{j: 1.0 for j in neighbors} for neighbors in
			g.adjacency_lists()]
		return cls(adjacency, [0.0] * g.n)

	def induced(self, node2com, n_communities):
		adjacency = [{} for _ in range(n_communities)]
		loops = [0.0] * n_communities

		for i, neighbors in enumerate(self.adjacency):
			ci = node2com[i]
			loops[ci] += self.loops[i]

			for j, w in neighbors.items():
				cj = node2com[j]
				if ci == cj:
					loops[ci] += w / 2.0
				else:
					adjacency[ci][cj] = adjacency[ci].get(cj, 0.0) + w

		return _Level(adjacency, loops)


class Multilevel(Detector):
	"""The multilevel (Louvain) modularity optimizer.

	Each level starts from singleton communities and repeatedly moves single
	nodes, visited in a random order, to the neighboring community with the
	largest modularity gain at the given resolution. A node only leaves its
	community for a strictly larger gain; among neighboring communities with
	equal gain the lowest community id wins. When a pass moves no node the
	communities are contracted into the nodes of a weighted graph and the
	process repeats. The detector stops at the first level where nothing
	moves.


	Parameters
	----------
	resolution: float, optional
		The weight of the null-model term in the gain. Values below 1 favor
		fewer, larger communities. Default is 1.0.

	random_state: int, numpy.random.RandomState or None, optional
		The seed for the node visiting order. Default is None.

	verbose: bool, optional
		Whether to log the modularity reached at each level.
	"""

	def __init__(self, resolution=1.0, random_state=None, verbose=False):
		super().__init__(verbose=verbose)
		self.name = "Multilevel"

		self.resolution = _check_parameter(resolution, "resolution",
			min_value=0.0, inclusive=False, ndim=0)
		self.random_state = random_state
		self.levels_ = []

	def _one_level(self, level, m, random_state):
		node2com = list(range(len(level)))
		totals = list(level.degrees)
		factor = self.resolution / (2.0 * m)
		moved_any = False

		while True:
			moved = False

			for node in random_state.permutation(len(level)).tolist():
				current = node2com[node]
				k = level.degrees[node]

				weights = {}
				for j, w in level.adjacency[node].items():
					c = node2com[j]
					weights[c] = weights.get(c, 0.0) + w

				totals[current] -= k
				best = current
				best_gain = weights.get(current, 0.0) - totals[current] * k * \
					factor

				for c in sorted(weights):
					if c == current:
						continue

					gain = weights[c] - totals[c] * k * factor
					if gain > best_gain + eps:
						best, best_gain = c, gain

				totals[best] += k
				node2com[node] = best
				if best != current:
					moved = True

			if not moved:
				break

			moved_any = True

		return node2com, moved_any

	def fit(self, g):
		g = self._check_graph(g)
		random_state = _check_random_state(self.random_state)

		self.levels_ = []
		flat = numpy.arange(g.n)

		if g.m == 0:
			self.labels_ = _compact_labels(flat)
			return self

		level = _Level.from_graph(g)
		while True:
			start_time = time.time()
			node2com, moved = self._one_level(level, g.m, random_state)
			if not moved:
				break

			compact = _compact_labels(node2com).numpy()
			flat = compact[flat]
			self.levels_.append(torch.from_numpy(flat.copy()))
			level = level.induced(compact, int(compact.max()) + 1)

			if self.verbose:
				logger.info("[{}] Modularity: {}, Time: {:4.4}s".format(
					len(self.levels_), modularity(g, flat),
					time.time() - start_time))

		self.labels_ = _compact_labels(flat)
		return self


def detect_multilevel(g, params):
	"""Run the multilevel optimizer with a parameter assignment dictionary."""

	return Multilevel(**params).fit_predict(g)
