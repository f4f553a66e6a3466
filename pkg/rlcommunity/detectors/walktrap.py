# walktrap.py
# Contact: rlcommunity developers

import heapq
import logging

import numpy
import scipy.sparse
import scipy.sparse.csgraph
import torch

from .._utils import _check_parameter
from .._utils import _compact_labels
from .._utils import eps

from ._detector import Detector


logger = logging.getLogger(__name__)


def _transition_profiles(A, walk_length, dtype=torch.float64):
	"""Return D^{-1/2}-scaled rows of P^t for a connected component.

	The walk moves along edges plus one self-loop per node, which keeps it
	aperiodic on bipartite components. Row i of the result is P^t_{i.} / sqrt(d),
	so squared Euclidean distances between rows are walk distances.
	"""

	n = A.shape[0]
	A = (A + scipy.sparse.identity(n, format="csr")).tocoo()
	d = numpy.asarray(A.sum(axis=1)).reshape(-1)

	indices = torch.from_numpy(numpy.stack([A.row, A.col]).astype(numpy.int64))
	values = torch.from_numpy(A.data / d[A.row]).type(dtype)
	P = torch.sparse_coo_tensor(indices, values, (n, n)).coalesce()

	X = torch.eye(n, dtype=dtype)
	for _ in range(walk_length):
		X = torch.sparse.mm(P, X)

	return X / torch.sqrt(torch.from_numpy(d).type(dtype)).unsqueeze(0)


def _squared_distances(Y, rows, cols, chunk_size=4096):
	out = torch.empty(len(rows), dtype=Y.dtype)
	for start in range(0, len(rows), chunk_size):
		r = rows[start:start+chunk_size]
		c = cols[start:start+chunk_size]
		out[start:start+chunk_size] = ((Y[r] - Y[c]) ** 2).sum(dim=1)

	return out


class Walktrap(Detector):
	"""Community detection by short random walks.

	Random walks of `walk_length` steps tend to stay inside densely connected
	parts of a graph. Each node is described by the distribution of where a
	walk started there ends, and communities by the size-weighted mean of
	their nodes' distributions. Starting from singletons, the two adjacent
	communities whose merge least increases the mean squared walk distance
	of nodes to their community,

		delta_sigma = (1/n) |C1| |C2| / (|C1| + |C2|) r(C1, C2)^2,

	are merged until each connected component is one community. The
	dendrogram of each component is then cut at the level with the highest
	modularity. Components never interact, so cutting them independently
	maximizes the modularity of the whole partition.

	After fitting, `merges_` holds (a, b, new, delta_sigma) tuples where
	leaves are node ids and merged communities are numbered from n upwards,
	and `modularities_` the modularity before the first and after every
	merge in that order.


	Parameters
	----------
	walk_length: int, optional
		The number of random walk steps t, between 2 and 8. Default is 4.

	verbose: bool, optional
		Whether to log the cut chosen for each component.
	"""

	def __init__(self, walk_length=4, verbose=False):
		super().__init__(verbose=verbose)
		self.name = "Walktrap"

		self.walk_length = _check_parameter(walk_length, "walk_length",
			min_value=2, max_value=8, ndim=0, dtypes=(int, numpy.int64))
		self.merges_ = []
		self.modularities_ = []

	def _component(self, g, nodes, next_id, q):
		"""Agglomerate one connected component and return its cut labels."""

		size = len(nodes)
		A = g.adjacency[nodes][:, nodes].tocsr()
		Y = _transition_profiles(A, self.walk_length)

		m2 = 2.0 * g.m
		vectors = {i: Y[i] for i in range(size)}
		sizes = {i: 1 for i in range(size)}
		degrees = {i: float(g.degrees[nodes[i]]) for i in range(size)}
		links = {i: {} for i in range(size)}

		coo = scipy.sparse.triu(A, k=1).tocoo()
		for i, j in zip(coo.row.tolist(), coo.col.tolist()):
			links[i][j] = 1
			links[j][i] = 1

		heap = []
		if coo.nnz > 0:
			distances = _squared_distances(Y, torch.from_numpy(coo.row.astype(
				numpy.int64)), torch.from_numpy(coo.col.astype(numpy.int64)))

			for i, j, r2 in zip(coo.row.tolist(), coo.col.tolist(),
				distances.tolist()):
				heap.append((0.5 * r2 / g.n, i, j))

			heapq.heapify(heap)

		merges = []
		best_q, best_step, current_q = q, 0, q
		new = size

		while heap:
			delta, a, b = heapq.heappop(heap)
			if a not in vectors or b not in vectors:
				continue

			sa, sb = sizes.pop(a), sizes.pop(b)
			va, vb = vectors.pop(a), vectors.pop(b)
			da, db = degrees.pop(a), degrees.pop(b)
			la, lb = links.pop(a), links.pop(b)

			e = la[b]
			current_q += e / g.m - 2.0 * da * db / (m2 * m2)

			vectors[new] = (sa * va + sb * vb) / (sa + sb)
			sizes[new] = sa + sb
			degrees[new] = da + db

			merged = {}
			for c, w in list(la.items()) + list(lb.items()):
				if c != a and c != b:
					merged[c] = merged.get(c, 0) + w

			links[new] = merged
			for c, w in merged.items():
				links[c].pop(a, None)
				links[c].pop(b, None)
				links[c][new] = w

				r2 = float(((vectors[new] - vectors[c]) ** 2).sum())
				s = sizes[new] * sizes[c] / (sizes[new] + sizes[c])
				heapq.heappush(heap, (s * r2 / g.n, min(new, c), max(new, c)))

			merges.append((a, b, new, delta))
			self.modularities_.append(current_q)

			if current_q > best_q + eps:
				best_q, best_step = current_q, len(merges)

			new += 1

		parent = numpy.arange(new)
		for a, b, c, _ in merges[:best_step]:
			parent[a] = c
			parent[b] = c

		roots = numpy.arange(size)
		for _ in range(best_step):
			nxt = parent[roots]
			if (nxt == roots).all():
				break
			roots = nxt

		def global_id(c):
			return nodes[c] if c < size else next_id + c - size

		for a, b, c, delta in merges:
			self.merges_.append((int(global_id(a)), int(global_id(b)),
				int(global_id(c)), float(delta)))

		if self.verbose:
			logger.info("Component of {} nodes cut after {} of {} merges, "
				"modularity contribution {}".format(size, best_step,
				len(merges), best_q - q))

		return roots, len(merges), best_q - q

	def fit(self, g):
		g = self._check_graph(g)

		self.merges_ = []
		self.modularities_ = []
		labels = numpy.arange(g.n)

		if g.m == 0:
			self.labels_ = _compact_labels(labels)
			return self

		degrees = g.degrees.astype(numpy.float64)
		q = float(-numpy.sum((degrees / (2.0 * g.m)) ** 2))
		self.modularities_.append(q)

		n_components, components = scipy.sparse.csgraph.connected_components(
			g.adjacency, directed=False)
		order = numpy.argsort(components, kind="stable")
		bounds = numpy.searchsorted(components[order], numpy.arange(
			n_components + 1))

		next_id, label_offset = g.n, 0
		for k in range(n_components):
			nodes = order[bounds[k]:bounds[k+1]]
			if len(nodes) < 2:
				continue

			offset = len(self.modularities_) - 1
			roots, n_merges, _ = self._component(g, nodes, next_id, q)
			labels[nodes] = g.n + label_offset + roots

			# the component's merges were recorded relative to q alone
			for i in range(offset + 1, len(self.modularities_)):
				self.modularities_[i] += self.modularities_[offset] - q

			next_id += n_merges
			label_offset += len(nodes) + n_merges

		self.labels_ = _compact_labels(labels)
		return self


def detect_walktrap(g, params):
	"""Run walktrap with a parameter assignment dictionary."""

	return Walktrap(**params).fit_predict(g)
