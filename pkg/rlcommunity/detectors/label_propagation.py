# label_propagation.py
# Contact: rlcommunity developers

import numpy

from collections import Counter

from .._utils import _check_parameter
from .._utils import _check_random_state
from .._utils import _compact_labels

from ._detector import Detector


class LabelPropagation(Detector):
	"""Asynchronous label propagation.

	Every node starts with its own label. In each sweep the nodes are
	visited in a random order and each adopts the label held by most of its
	neighbors. A node whose current label is already among the most frequent
	keeps it; otherwise a uniformly random choice is made among the tied
	labels. Updates are applied immediately, which avoids the oscillations
	synchronous updating shows on bipartite structure.

	Sweeping stops once a sweep changes no label or after `max_sweeps`.


	Parameters
	----------
	max_sweeps: int, optional
		The maximum number of sweeps over all nodes. Default is 100.

	random_state: int, numpy.random.RandomState or None, optional
		The seed for visiting orders and tie-breaks. Default is None.

	verbose: bool, optional
		Unused; kept for a uniform detector signature.
	"""

	def __init__(self, max_sweeps=100, random_state=None, verbose=False):
		super().__init__(verbose=verbose)
		self.name = "LabelPropagation"

		self.max_sweeps = _check_parameter(max_sweeps, "max_sweeps",
			min_value=1, ndim=0, dtypes=(int, numpy.int64))
		self.random_state = random_state
		self.n_sweeps_ = 0

	def fit(self, g):
		g = self._check_graph(g)
		random_state = _check_random_state(self.random_state)

		adjacency = g.adjacency_lists()
		labels = list(range(g.n))

		self.n_sweeps_ = 0
		for sweep in range(self.max_sweeps):
			changed = False

			for node in random_state.permutation(g.n).tolist():
				neighbors = adjacency[node]
				if not neighbors:
					continue

				counts = Counter(labels[j] for j in neighbors)
				top = max(counts.values())
				if counts.get(labels[node], 0) == top:
					continue

				best = sorted(label for label, c in counts.items() if c == top)
				labels[node] = best[random_state.randint(len(best))]
				changed = True

			self.n_sweeps_ = sweep + 1
			if not changed:
				break

		self.labels_ = _compact_labels(labels)
		return self


def detect_label_propagation(g, params):
	"""Run label propagation with a parameter assignment dictionary."""

	return LabelPropagation(**params).fit_predict(g)
