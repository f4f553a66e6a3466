# environment.py
# Contact: rlcommunity developers

import logging

from .graph import SnapshotStream
from .scoring import METRICS
from .scoring import score
from .actions import SEEDED
from .actions import WALKTRAP_MAX_NODES
from .actions import action_mask
from .actions import detect

from ._utils import ConfigurationError
from ._utils import _check_parameter


logger = logging.getLogger(__name__)


class CommunityDetectionEnv(object):
	"""The environment an agent acts in: a cursor over a snapshot stream.

	`reset` points the environment at one snapshot and `step` runs an action
	on it, scoring the partition with the configured metric. Actions the
	mask forbids on the current snapshot are refused with a reward of 0
	instead of being run.

	Leading eigenvector and walktrap ignore the seed, so their partitions are
	cached per (snapshot, action) and repeated steps cost nothing.


	Parameters
	----------
	stream: SnapshotStream
		The snapshots.

	metric: str, optional
		'q' or 'qds'. Default is 'qds'.

	walktrap_max_nodes: int, optional
		The node count above which walktrap is refused. Default is 50000.

	cache: bool, optional
		Whether to reuse partitions of deterministic detectors. Default is
		True.
	"""

	def __init__(self, stream, metric="qds",
		walktrap_max_nodes=WALKTRAP_MAX_NODES, cache=True):
		if not isinstance(stream, SnapshotStream):
			raise ValueError("stream must be a SnapshotStream")

		self.stream = stream
		self.metric = _check_parameter(metric, "metric", value_set=METRICS,
			dtypes=(str,))
		self.walktrap_max_nodes = _check_parameter(walktrap_max_nodes,
			"walktrap_max_nodes", min_value=0, ndim=0)
		self.cache = cache

		self.snapshot_index = None
		self.graph = None
		self._cache = {}

	def reset(self, snapshot_index=0):
		"""Point the environment at a snapshot and return its graph."""

		_check_parameter(snapshot_index, "snapshot_index", min_value=0,
			max_value=len(self.stream) - 1, ndim=0)

		self.snapshot_index = int(snapshot_index)
		self.graph = self.stream[self.snapshot_index]
		return self.graph

	def allowed(self, actions):
		"""Return the actions permitted on the current snapshot, or raise."""

		if self.graph is None:
			raise ValueError("Call reset before querying actions")

		allowed = action_mask(actions, self.graph.n, self.walktrap_max_nodes)
		if len(allowed) == 0:
			raise ConfigurationError(["walktrap_max_nodes", "grids"],
				"No action is allowed on a snapshot of {} nodes".format(
				self.graph.n))

		return allowed

	def step(self, action, random_state=None):
		"""Run an action on the current snapshot.

		Parameters
		----------
		action: Action
			The detector and parameters to run.

		random_state: int or None, optional
			The seed for stochastic detectors. Default is None.


		Returns
		-------
		reward: float
			The metric of the partition, 0 when refused.

		partition: torch.Tensor or None
			The partition, None when refused.

		refused: bool
			Whether the action was masked on this snapshot.
		"""

		if self.graph is None:
			raise ValueError("Call reset before step")

		if not action_mask([action], self.graph.n, self.walktrap_max_nodes):
			logger.info("Refused {} on a snapshot of {} nodes".format(
				action.encode(), self.graph.n))
			return 0.0, None, True

		key = (self.snapshot_index, action.encode())
		cacheable = self.cache and action.detector not in SEEDED

		if cacheable and key in self._cache:
			return self._cache[key] + (False,)

		partition = detect(self.graph, action, random_state)
		reward = score(self.graph, partition, self.metric)

		if cacheable:
			self._cache[key] = (reward, partition)

		return reward, partition, False
