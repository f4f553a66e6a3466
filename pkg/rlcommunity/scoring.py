# scoring.py
# Contact: rlcommunity developers

"""Partition quality: modularity, modularity density and an exact oracle.

A partition is a vector assigning every node of a graph to one community.
Community ids may be arbitrary integers on input; they are compacted before
any counting, so every score is invariant under relabeling.
"""

import os
import logging

from dataclasses import dataclass

import numpy
import scipy.sparse
import torch

from ._utils import ExactSearchRefused
from ._utils import InvariantViolation
from ._utils import _cast_as_tensor
from ._utils import _check_parameter
from ._utils import _compact_labels
from ._utils import eps


logger = logging.getLogger(__name__)

METRICS = ("q", "qds")
MAX_EXACT_NODES = 12


def _check_partition(g, part):
	"""Return the partition of g as dense numpy labels, or raise."""

	part = _check_parameter(_cast_as_tensor(part), "part", ndim=1)
	if part is None or part.shape[0] != g.n:
		raise ValueError("Partition must assign exactly {} nodes, got {}"
			.format(g.n, None if part is None else part.shape[0]))

	if part.numel() == 0:
		return numpy.zeros(0, dtype=numpy.int64)

	if part.dtype.is_floating_point or part.dtype == torch.bool:
		raise ValueError("Partition community ids must be integers")

	return _compact_labels(part.numpy()).numpy()


@dataclass
class CommunityTally:
	"""Edge and node counts per community.

	`internal[c]` is m_c, `external[c]` is e_c and `sizes[c]` is n_c. The
	edges between two different communities are stored once per unordered
	pair in `cross_pairs` (a < b) with their count in `cross_counts`.
	"""

	m: int
	internal: numpy.ndarray
	external: numpy.ndarray
	sizes: numpy.ndarray
	cross_pairs: numpy.ndarray
	cross_counts: numpy.ndarray

	@property
	def n_communities(self):
		return len(self.sizes)

	def cross_matrix(self):
		"""Return the symmetric matrix of m_cc' as a csr_matrix."""

		c = self.n_communities
		a, b = self.cross_pairs[:, 0], self.cross_pairs[:, 1]
		M = scipy.sparse.coo_matrix((self.cross_counts, (a, b)), shape=(c, c))
		return (M + M.T).tocsr()


def _tally(u, v, m, labels):
	c = int(labels.max()) + 1 if labels.size > 0 else 0
	sizes = numpy.bincount(labels, minlength=c)

	cu, cv = labels[u], labels[v]
	same = cu == cv
	internal = numpy.bincount(cu[same], minlength=c)
	external = numpy.bincount(cu[~same], minlength=c) + numpy.bincount(
		cv[~same], minlength=c)

	a = numpy.minimum(cu[~same], cv[~same])
	b = numpy.maximum(cu[~same], cv[~same])
	keys, counts = numpy.unique(a * max(c, 1) + b, return_counts=True)
	pairs = numpy.stack([keys // max(c, 1), keys % max(c, 1)], axis=1)

	return CommunityTally(m, internal, external, sizes, pairs, counts)


def community_tally(g, part):
	"""Count m_c, e_c, n_c and m_cc' of a partition of g.

	Parameters
	----------
	g: Graph
		The graph.

	part: list, numpy.ndarray, torch.Tensor, shape=(g.n,)
		The community of each node.


	Returns
	-------
	tally: CommunityTally
	"""

	labels = _check_partition(g, part)
	tally = _tally(g.edges[:, 0], g.edges[:, 1], g.m, labels)

	if int(tally.internal.sum()) + int(tally.cross_counts.sum()) != g.m:
		raise InvariantViolation("Community tally does not account for all {} "
			"edges".format(g.m))

	return tally


def _modularity(tally):
	m = tally.m
	if m == 0:
		return 0.0

	expected = (2.0 * tally.internal + tally.external) / (2.0 * m)
	return float(numpy.sum(tally.internal / m - expected ** 2))


def _modularity_density(tally):
	m = tally.m
	if m == 0:
		return 0.0

	n_c = tally.sizes.astype(numpy.float64)
	pairs = n_c * (n_c - 1)
	p_c = numpy.zeros_like(n_c)
	mask = n_c > 1
	p_c[mask] = 2.0 * tally.internal[mask] / pairs[mask]

	inner = tally.internal / m * p_c
	spread = ((2.0 * tally.internal + tally.external) / (2.0 * m) * p_c) ** 2

	w = tally.cross_counts.astype(numpy.float64)
	a, b = tally.cross_pairs[:, 0], tally.cross_pairs[:, 1]
	p_cc = w / (n_c[a] * n_c[b]) if len(w) > 0 else w

	# each unordered pair appears in the sums of both of its communities
	between = 2.0 * numpy.sum(w / (2.0 * m) * p_cc)
	return float(numpy.sum(inner - spread) - between)


def modularity(g, part):
	"""The modularity Q of a partition.

	Q = sum_c [ m_c / m - ((2 m_c + e_c) / 2m)^2 ], and 0 when m = 0.


	Parameters
	----------
	g: Graph
		The graph.

	part: list, numpy.ndarray, torch.Tensor, shape=(g.n,)
		The community of each node.


	Returns
	-------
	q: float
	"""

	return _modularity(community_tally(g, part))


def modularity_density(g, part):
	"""The modularity density Q_ds of a partition.

	Q_ds = sum_c [ (m_c/m) p_c - ((2 m_c + e_c)/2m p_c)^2
		- sum_{c' != c} (m_cc'/2m) p_cc' ]

	with p_c = 2 m_c / (n_c (n_c - 1)), taken as 0 for communities of one
	node, and p_cc' = m_cc' / (n_c n_c'). Graphs without edges score 0.


	Parameters
	----------
	g: Graph
		The graph.

	part: list, numpy.ndarray, torch.Tensor, shape=(g.n,)
		The community of each node.


	Returns
	-------
	qds: float
	"""

	return _modularity_density(community_tally(g, part))


_SCORERS = {"q": _modularity, "qds": _modularity_density}


def score(g, part, metric="qds"):
	"""Score a partition with the metric named 'q' or 'qds'."""

	_check_parameter(metric, "metric", value_set=METRICS, dtypes=(str,))
	return _SCORERS[metric](community_tally(g, part))


def _restricted_growth_strings(n):
	"""Yield every set partition of n items as an assignment vector.

	Vectors come in lexicographic order; a[0] = 0 and each a[i] is at most
	one more than the largest value before it. The same list is reused.
	"""

	a = [0] * n
	while True:
		yield a

		i = n - 1
		while i > 0 and a[i] > max(a[:i]):
			i -= 1

		if i <= 0:
			return

		a[i] += 1
		for j in range(i+1, n):
			a[j] = 0


def exact_best_partition(g, metric="q"):
	"""Find a partition maximizing a metric by exhaustive enumeration.

	All Bell(n) set partitions are scored. Among partitions whose scores tie
	within 1e-12, the lexicographically smallest assignment vector wins.


	Parameters
	----------
	g: Graph
		A graph with at most 12 nodes.

	metric: str, optional
		'q' or 'qds'. Default is 'q'.


	Returns
	-------
	part: torch.Tensor, dtype=int64, shape=(g.n,)
		The best partition.

	value: float
		Its score.
	"""

	_check_parameter(metric, "metric", value_set=METRICS, dtypes=(str,))
	if g.n > MAX_EXACT_NODES:
		raise ExactSearchRefused("Exhaustive search is limited to {} nodes, "
			"got {}".format(MAX_EXACT_NODES, g.n))

	if g.n == 0:
		return torch.zeros(0, dtype=torch.int64), 0.0

	scorer = _SCORERS[metric]
	u, v = g.edges[:, 0], g.edges[:, 1]

	best, best_value = None, float("-inf")
	for a in _restricted_growth_strings(g.n):
		labels = numpy.array(a, dtype=numpy.int64)
		value = scorer(_tally(u, v, g.m, labels))

		if value > best_value + eps:
			best, best_value = labels, value

	return torch.from_numpy(best), best_value


def write_partition(g, part, target):
	"""Write one 'original_node_id<TAB>community_id' line per node."""

	labels = _check_partition(g, part)
	owned = isinstance(target, (str, os.PathLike))
	stream = open(target, "w", encoding="utf-8", newline="\n") if owned \
		else target

	try:
		for node, c in zip(g.original_ids.tolist(), labels.tolist()):
			stream.write("{}\t{}\n".format(node, c))
	finally:
		if owned:
			stream.close()


def read_partition(g, source):
	"""Read a partition file back into a tensor aligned with g's nodes."""

	owned = isinstance(source, (str, os.PathLike))
	stream = open(source, "r", encoding="utf-8") if owned else source

	index = {node: i for i, node in enumerate(g.original_ids.tolist())}
	labels = numpy.full(g.n, -1, dtype=numpy.int64)

	try:
		for lineno, line in enumerate(stream, 1):
			fields = line.split()
			if not fields:
				continue

			if len(fields) != 2:
				raise ValueError("line {}: expected 2 fields".format(lineno))

			node, c = int(fields[0]), int(fields[1])
			if node not in index:
				raise ValueError("line {}: unknown node {}".format(lineno,
					node))

			labels[index[node]] = c
	finally:
		if owned:
			stream.close()

	if (labels < 0).any():
		raise ValueError("Partition file does not cover every node")

	return torch.from_numpy(labels)
