# graph.py
# Contact: rlcommunity developers

"""Undirected simple graphs, edge-list ingestion and snapshot streams.

Nodes are dense integers 0..n-1. The ids found in an input file are kept in
`Graph.original_ids` so partitions and snapshots can be written back using
them.
"""

import io
import os
import logging

from dataclasses import dataclass
from typing import Optional

import numpy
import scipy.sparse
import scipy.sparse.csgraph

from ._utils import EdgeListParseError
from ._utils import _check_parameter
from ._utils import _check_random_state


logger = logging.getLogger(__name__)

_ISOLATED_PREFIX = "# Node:"


def _readonly(array):
	array.flags.writeable = False
	return array


class Graph(object):
	"""An immutable undirected simple graph.

	Self-loops are dropped and repeated edges, in either direction, are
	collapsed into one. The order in which edges were first seen is kept in
	`edges`, which is what the "as-read" snapshot policy sequences on.


	Parameters
	----------
	node_count: int
		The number of nodes, n. Node ids are 0..n-1.

	edges: list, tuple, numpy.ndarray, shape=(-1, 2), optional
		Pairs of node ids. Default is no edges.

	original_ids: list, numpy.ndarray, shape=(n,), optional
		The external id of each node. Default is the dense id itself.

	raw_arcs: int or None, optional
		The number of data lines this graph was read from, before any
		symmetrization. Default is the number of edges passed in.
	"""

	def __init__(self, node_count, edges=None, original_ids=None,
		raw_arcs=None):
		_check_parameter(node_count, "node_count", min_value=0, ndim=0,
			dtypes=(int, numpy.int32, numpy.int64))
		node_count = int(node_count)

		if edges is None or len(edges) == 0:
			edges = numpy.zeros((0, 2), dtype=numpy.int64)

		edges = numpy.asarray(edges, dtype=numpy.int64).reshape(-1, 2)
		_check_parameter(edges, "edges", min_value=0,
			max_value=max(node_count-1, 0), ndim=2)
		if node_count == 0 and len(edges) > 0:
			raise ValueError("Parameter edges must be empty for 0 nodes")

		n_input = len(edges)
		edges = edges[edges[:, 0] != edges[:, 1]]
		lo = numpy.minimum(edges[:, 0], edges[:, 1])
		hi = numpy.maximum(edges[:, 0], edges[:, 1])

		keys = lo * max(node_count, 1) + hi
		_, first = numpy.unique(keys, return_index=True)
		first.sort()

		self.node_count = node_count
		self.edges = _readonly(numpy.stack([lo[first], hi[first]], axis=1))
		self.raw_arcs = n_input if raw_arcs is None else int(raw_arcs)

		if original_ids is None:
			original_ids = numpy.arange(node_count, dtype=numpy.int64)

		original_ids = numpy.asarray(original_ids, dtype=numpy.int64)
		_check_parameter(original_ids, "original_ids", ndim=1,
			shape=(node_count,))
		self.original_ids = _readonly(original_ids.copy())

		u, v = self.edges[:, 0], self.edges[:, 1]
		data = numpy.ones(2 * len(u), dtype=numpy.float64)
		self.adjacency = scipy.sparse.csr_matrix((data, (numpy.concatenate(
			[u, v]), numpy.concatenate([v, u]))), shape=(node_count,
			node_count))
		self.adjacency.sort_indices()

		self.degrees = _readonly(numpy.diff(self.adjacency.indptr).astype(
			numpy.int64))

	@property
	def n(self):
		return self.node_count

	@property
	def m(self):
		return len(self.edges)

	def __repr__(self):
		return "Graph(nodes={}, edges={})".format(self.n, self.m)

	def __len__(self):
		return self.node_count

	def neighbors(self, node):
		"""Return the sorted neighbor ids of a node."""

		start, end = self.adjacency.indptr[node], self.adjacency.indptr[node+1]
		return self.adjacency.indices[start:end]

	def adjacency_lists(self):
		"""Return the neighbors of every node as Python lists."""

		indptr, indices = self.adjacency.indptr, self.adjacency.indices.tolist()
		return [indices[indptr[i]:indptr[i+1]] for i in range(self.n)]

	def edge_set(self, original=False):
		"""Return the edges as a set of sorted pairs.

		Parameters
		----------
		original: bool, optional
			Whether to express the pairs with the original node ids. Default
			is False.
		"""

		edges = self.original_ids[self.edges] if original else self.edges
		return {(min(u, v), max(u, v)) for u, v in edges.tolist()}

	def node_set(self, original=False):
		if original:
			return set(self.original_ids.tolist())
		return set(range(self.n))

	def subgraph(self, nodes):
		"""Return the subgraph induced by a set of nodes.

		Nodes are renumbered in the order given; original ids are carried.


		Parameters
		----------
		nodes: list, numpy.ndarray
			Dense ids of the nodes to keep.


		Returns
		-------
		g: Graph
			The induced subgraph.
		"""

		nodes = numpy.asarray(nodes, dtype=numpy.int64).reshape(-1)
		_check_parameter(nodes, "nodes", min_value=0,
			max_value=max(self.n-1, 0))

		mapping = numpy.full(self.n, -1, dtype=numpy.int64)
		mapping[nodes] = numpy.arange(len(nodes))
		edges = mapping[self.edges]
		edges = edges[(edges >= 0).all(axis=1)]
		return Graph(len(nodes), edges, original_ids=self.original_ids[nodes])


@dataclass
class GraphStats:
	"""Summary statistics of a graph, as reported for citation datasets."""

	nodes: int
	edges: int
	raw_arcs: int
	largest_cc_nodes: int
	largest_cc_edges: int
	triangles: int
	avg_clustering: float
	transitivity: float
	diameter: Optional[int] = None
	effective_diameter: Optional[float] = None


class SnapshotStream(object):
	"""An ordered, non-empty sequence of growing graphs.

	Every snapshot must contain the nodes and edges of the one before it.


	Parameters
	----------
	snapshots: list or tuple of Graph
		The graphs, oldest first.
	"""

	def __init__(self, snapshots):
		_check_parameter(snapshots, "snapshots", dtypes=(list, tuple))
		if len(snapshots) == 0:
			raise ValueError("Parameter snapshots must contain at least one "
				"graph")

		for i in range(len(snapshots) - 1):
			g0, g1 = snapshots[i], snapshots[i+1]
			if g0.n > g1.n or not _edges_contained(g0, g1):
				raise ValueError("Snapshot {} is not contained in snapshot {}"
					.format(i, i+1))

		self.snapshots = tuple(snapshots)

	def __len__(self):
		return len(self.snapshots)

	def __getitem__(self, i):
		return self.snapshots[i]

	def __iter__(self):
		return iter(self.snapshots)

	def __repr__(self):
		return "SnapshotStream({})".format(", ".join(str(g.m) for g in self))


def _edges_contained(g0, g1):
	if g0.m == 0:
		return True

	n = max(g1.n, 1)
	k0 = g0.edges[:, 0] * n + g0.edges[:, 1]
	k1 = g1.edges[:, 0] * n + g1.edges[:, 1]
	return bool(numpy.isin(k0, k1).all())


def _open_text(source):
	if isinstance(source, (str, os.PathLike)):
		return open(source, "r", encoding="utf-8"), True

	if isinstance(source, (io.RawIOBase, io.BufferedIOBase)):
		return io.TextIOWrapper(source, encoding="utf-8"), False

	return source, False


def load_edge_list(source):
	"""Read a SNAP-style edge list into an undirected Graph.

	Lines starting with '#' are comments, except `# Node: <id>` lines written
	by `write_edge_list` for isolated nodes. Data lines hold two integer ids
	separated by tabs or spaces. Node ids become dense in order of first
	appearance.


	Parameters
	----------
	source: str, os.PathLike or file-like
		A path, a text stream or a byte stream holding UTF-8 text.


	Returns
	-------
	g: Graph
		The symmetrized graph, with `raw_arcs` set to the number of data
		lines read.
	"""

	stream, owned = _open_text(source)
	ids, pairs = {}, []
	raw_arcs = 0

	try:
		for lineno, line in enumerate(stream, 1):
			text = line.strip()
			if not text:
				continue

			if text.startswith("#"):
				if text.startswith(_ISOLATED_PREFIX):
					token = text[len(_ISOLATED_PREFIX):].strip()
					try:
						ids.setdefault(int(token), len(ids))
					except ValueError:
						raise EdgeListParseError(lineno, line.rstrip("\n"),
							"non-integer node id")
				continue

			tokens = text.split()
			if len(tokens) != 2:
				raise EdgeListParseError(lineno, line.rstrip("\n"),
					"expected 2 fields, found {}".format(len(tokens)))

			try:
				u, v = int(tokens[0]), int(tokens[1])
			except ValueError:
				raise EdgeListParseError(lineno, line.rstrip("\n"),
					"non-integer node id")

			pairs.append((ids.setdefault(u, len(ids)), ids.setdefault(v,
				len(ids))))
			raw_arcs += 1
	finally:
		if owned:
			stream.close()

	original_ids = numpy.fromiter(ids.keys(), dtype=numpy.int64,
		count=len(ids))
	g = Graph(len(ids), pairs, original_ids=original_ids, raw_arcs=raw_arcs)
	logger.debug("Loaded %d nodes, %d arcs, %d undirected edges", g.n,
		g.raw_arcs, g.m)
	return g


def write_edge_list(g, target):
	"""Write a Graph as a SNAP-style edge list using original node ids.

	Parameters
	----------
	g: Graph
		The graph to write.

	target: str, os.PathLike or text stream
		Where to write.
	"""

	owned = isinstance(target, (str, os.PathLike))
	stream = open(target, "w", encoding="utf-8", newline="\n") if owned \
		else target

	try:
		stream.write("# Undirected graph\n")
		stream.write("# Nodes: {} Edges: {}\n".format(g.n, g.m))

		isolated = numpy.flatnonzero(g.degrees == 0)
		for node in g.original_ids[isolated].tolist():
			stream.write("{} {}\n".format(_ISOLATED_PREFIX, node))

		stream.write("# FromNodeId\tToNodeId\n")
		for u, v in g.original_ids[g.edges].tolist():
			stream.write("{}\t{}\n".format(u, v))
	finally:
		if owned:
			stream.close()


def erdos_renyi(n, p, random_state=None):
	"""Generate a G(n, p) random graph.

	Each of the n(n-1)/2 node pairs is included independently with
	probability p. Row i draws the number of its higher-numbered neighbors
	from a binomial and then which ones, so the cost is linear in n + m.


	Parameters
	----------
	n: int
		The number of nodes.

	p: float, [0, 1]
		The probability of each edge.

	random_state: int, numpy.random.RandomState or None, optional
		The seed making the graph reproducible. Default is None.


	Returns
	-------
	g: Graph
	"""

	_check_parameter(n, "n", min_value=0, ndim=0, dtypes=(int, numpy.int64))
	_check_parameter(p, "p", min_value=0.0, max_value=1.0, ndim=0)
	random_state = _check_random_state(random_state)

	rows, cols = [], []
	for i in range(n - 1):
		k = random_state.binomial(n - i - 1, p)
		if k == 0:
			continue

		js = numpy.sort(random_state.choice(n - i - 1, k, replace=False))
		rows.append(numpy.full(k, i, dtype=numpy.int64))
		cols.append(js + i + 1)

	if rows:
		edges = numpy.stack([numpy.concatenate(rows), numpy.concatenate(cols)],
			axis=1)
	else:
		edges = None

	return Graph(n, edges)


def ring_of_cliques(n_cliques, clique_size):
	"""Cliques joined in a cycle by single edges.

	Clique i holds nodes i*clique_size..(i+1)*clique_size-1; its last node is
	linked to the first node of clique i+1 (mod n_cliques).
	"""

	_check_parameter(n_cliques, "n_cliques", min_value=1, ndim=0,
		dtypes=(int,))
	_check_parameter(clique_size, "clique_size", min_value=1, ndim=0,
		dtypes=(int,))

	edges = []
	for c in range(n_cliques):
		base = c * clique_size
		for i in range(clique_size):
			for j in range(i+1, clique_size):
				edges.append((base + i, base + j))

	if n_cliques > 1:
		for c in range(n_cliques):
			nxt = (c + 1) % n_cliques
			edges.append((c * clique_size + clique_size - 1, nxt * clique_size))

	return Graph(n_cliques * clique_size, edges)


def first_nodes(g, k):
	"""The subgraph induced by the first k nodes in read order."""

	_check_parameter(k, "k", min_value=0, ndim=0, dtypes=(int,))
	return g.subgraph(numpy.arange(min(k, g.n)))


def build_snapshots(g, k, order="as-read", random_state=None):
	"""Split a graph into k cumulative edge prefixes.

	Every snapshot keeps all n nodes of g; snapshot i holds the first
	floor((i+1) m / k) edges of the sequence, so the last one equals g.


	Parameters
	----------
	g: Graph
		The final graph.

	k: int
		The number of snapshots, at least 1.

	order: str, optional
		'as-read' keeps the edge order of g; 'shuffled' permutes it with
		`random_state`. Default is 'as-read'.

	random_state: int, numpy.random.RandomState or None, optional
		The seed used by the 'shuffled' policy. Default is None.


	Returns
	-------
	stream: SnapshotStream
	"""

	_check_parameter(k, "k", min_value=1, ndim=0, dtypes=(int, numpy.int64))
	_check_parameter(order, "order", value_set=("as-read", "shuffled"),
		dtypes=(str,))

	if order == "shuffled":
		sequence = _check_random_state(random_state).permutation(g.m)
	else:
		sequence = numpy.arange(g.m)

	snapshots = []
	for i in range(k):
		end = (i + 1) * g.m // k
		snapshots.append(Graph(g.n, g.edges[sequence[:end]],
			original_ids=g.original_ids))

	return SnapshotStream(snapshots)


def write_snapshots(stream, directory):
	"""Write every snapshot to `snapshot_<index>.txt` in a directory.

	Returns
	-------
	paths: list of str
		The written files, in snapshot order.
	"""

	os.makedirs(directory, exist_ok=True)
	width = max(len(str(len(stream) - 1)), 3)

	paths = []
	for i, g in enumerate(stream):
		path = os.path.join(directory, "snapshot_{}.txt".format(
			str(i).zfill(width)))
		write_edge_list(g, path)
		paths.append(path)

	return paths


def _triangles_per_node(g, chunk_size=512):
	A = g.adjacency
	counts = numpy.zeros(g.n, dtype=numpy.int64)

	for start in range(0, g.n, chunk_size):
		rows = A[start:start+chunk_size]
		paths = (rows @ A).multiply(rows)
		counts[start:start+chunk_size] = numpy.asarray(paths.sum(axis=1)
			).reshape(-1).round().astype(numpy.int64)

	return counts // 2


def compute_stats(g, n_diameter_samples=0, random_state=None):
	"""Compute dataset statistics of the undirected graph.

	Parameters
	----------
	g: Graph
		The graph to describe.

	n_diameter_samples: int, optional
		The number of BFS sources used to estimate the diameter and the
		90-percentile effective diameter. 0 skips both. Default is 0.

	random_state: int, numpy.random.RandomState or None, optional
		The seed for picking BFS sources. Default is None.


	Returns
	-------
	stats: GraphStats
	"""

	_check_parameter(n_diameter_samples, "n_diameter_samples", min_value=0,
		ndim=0, dtypes=(int,))

	if g.n == 0:
		return GraphStats(0, 0, g.raw_arcs, 0, 0, 0, 0.0, 0.0)

	_, labels = scipy.sparse.csgraph.connected_components(g.adjacency,
		directed=False)
	sizes = numpy.bincount(labels)
	largest = int(numpy.argmax(sizes))
	largest_edges = int((labels[g.edges[:, 0]] == largest).sum())

	per_node = _triangles_per_node(g)
	triangles = int(per_node.sum() // 3)

	k = g.degrees.astype(numpy.float64)
	pairs = k * (k - 1) / 2.0
	local = numpy.zeros(g.n, dtype=numpy.float64)
	mask = k >= 2
	local[mask] = per_node[mask] / pairs[mask]

	total_pairs = pairs.sum()
	transitivity = 3.0 * triangles / total_pairs if total_pairs > 0 else 0.0

	stats = GraphStats(nodes=g.n, edges=g.m, raw_arcs=g.raw_arcs,
		largest_cc_nodes=int(sizes[largest]), largest_cc_edges=largest_edges,
		triangles=triangles, avg_clustering=float(local.mean()),
		transitivity=float(transitivity))

	if n_diameter_samples > 0:
		random_state = _check_random_state(random_state)
		sources = random_state.choice(g.n, min(n_diameter_samples, g.n),
			replace=False)
		dist = scipy.sparse.csgraph.shortest_path(g.adjacency, directed=False,
			unweighted=True, indices=sources)
		finite = dist[numpy.isfinite(dist) & (dist > 0)]

		if finite.size > 0:
			stats.diameter = int(finite.max())
			stats.effective_diameter = float(numpy.percentile(finite, 90))
		else:
			stats.diameter, stats.effective_diameter = 0, 0.0

	return stats
