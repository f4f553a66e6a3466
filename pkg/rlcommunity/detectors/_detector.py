# _detector.py
# Contact: rlcommunity developers

import torch

from ..graph import Graph


class Detector(torch.nn.Module):
	"""A base community detector.

	This detector is inherited by all the other detectors. A detector is
	configured entirely by its constructor arguments, so fitting the same
	detector to the same graph always yields the same partition.

	After `fit`, the partition is stored in `labels_` as an int64 tensor of
	dense community ids, one per node.
	"""

	def __init__(self, verbose=False):
		super(Detector, self).__init__()
		self.verbose = verbose
		self.labels_ = None

	def forward(self, g):
		return self.fit_predict(g)

	def _check_graph(self, g):
		if not isinstance(g, Graph):
			raise ValueError("{} expects a Graph, got {}".format(self.name,
				type(g).__name__))

		return g

	def fit(self, g):
		raise NotImplementedError

	def fit_predict(self, g):
		"""Fit the detector to a graph and return the partition.

		Parameters
		----------
		g: Graph
			The graph to partition.


		Returns
		-------
		labels: torch.Tensor, dtype=int64, shape=(g.n,)
			The community of each node.
		"""

		self.fit(g)
		return self.labels_
