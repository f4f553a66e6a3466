# agent.py
# Contact: rlcommunity developers

"""A tabular SARSA agent choosing community detectors.

At every step the agent picks an action, a detector with one parameter
value, runs it on the current snapshot and is rewarded with the metric of
the resulting partition. The state it conditions on is the detector used
last together with the bucket the last reward falls in.
"""

import math
import time
import logging

from dataclasses import dataclass
from dataclasses import field
from typing import Optional

import numpy
import pandas
import torch

from .actions import DetectorId
from .actions import enumerate_actions
from .actions import neighbor_action
from .environment import CommunityDetectionEnv
from .scoring import METRICS

from ._utils import ConfigurationError
from ._utils import _check_parameter
from ._utils import _check_random_state
from ._utils import eps


logger = logging.getLogger(__name__)

LOG_COLUMNS = ["episode", "step", "state", "action", "reward",
	"accumulated_reward", "q_value"]

_LAST_DETECTORS = [None] + list(DetectorId)


@dataclass(frozen=True)
class State:
	"""The detector run last and the bucket of the reward it earned."""

	last_detector: Optional[DetectorId]
	bucket: int

	def encode(self):
		name = "none" if self.last_detector is None else \
			self.last_detector.value
		return "{}|{}".format(name, self.bucket)

	def __str__(self):
		return self.encode()


def state_of(value, last_detector, n_buckets=10):
	"""Bucket a metric value into one of `n_buckets` equal-width buckets.

	Values are clamped to [0, 1] first, so negative values land in bucket 0
	and a value of 1 in the last bucket.


	Parameters
	----------
	value: float
		The metric of the current partition.

	last_detector: DetectorId or None
		The detector that produced it.

	n_buckets: int, optional
		The number of buckets B. Default is 10.


	Returns
	-------
	state: State
	"""

	value = min(max(float(value), 0.0), 1.0)
	return State(last_detector, min(int(math.floor(value * n_buckets)),
		n_buckets - 1))


class QTable(torch.nn.Module):
	"""Learned values of every (state, action) pair.

	The table is dense over the 5 B states and the enumerated actions and
	starts at zero, so missing entries read as 0. `visits` counts the
	updates each entry received.


	Parameters
	----------
	actions: list of Action
		The action space, in enumeration order.

	n_buckets: int, optional
		The number of reward buckets B. Default is 10.
	"""

	def __init__(self, actions, n_buckets=10):
		super().__init__()
		self.actions = list(actions)
		self.n_buckets = _check_parameter(n_buckets, "n_buckets", min_value=1,
			ndim=0, dtypes=(int, numpy.int64))

		if len(self.actions) == 0:
			raise ValueError("QTable needs at least one action")

		self._action_index = {a: i for i, a in enumerate(self.actions)}
		n_states = len(_LAST_DETECTORS) * self.n_buckets

		self.register_buffer("values", torch.zeros(n_states,
			len(self.actions), dtype=torch.float64))
		self.register_buffer("visits", torch.zeros(n_states,
			len(self.actions), dtype=torch.int64))

	def state_index(self, state):
		return _LAST_DETECTORS.index(state.last_detector) * self.n_buckets + \
			state.bucket

	def action_index(self, action):
		return self._action_index[action]

	def states(self):
		return [State(d, b) for d in _LAST_DETECTORS
			for b in range(self.n_buckets)]

	def __getitem__(self, key):
		state, action = key
		return float(self.values[self.state_index(state),
			self.action_index(action)])

	def __setitem__(self, key, value):
		state, action = key
		self.values[self.state_index(state), self.action_index(action)] = value

	def row(self, state, actions=None):
		"""The values of a state over `actions`, all actions by default."""

		values = self.values[self.state_index(state)].numpy()
		if actions is None:
			return values

		return values[[self.action_index(a) for a in actions]]

	def dump(self, path):
		"""Write 'state<TAB>action<TAB>value<TAB>visits' for updated entries."""

		with open(path, "w", encoding="utf-8", newline="\n") as outfile:
			for state in self.states():
				i = self.state_index(state)
				for j, action in enumerate(self.actions):
					if self.visits[i, j] == 0:
						continue

					outfile.write("{}\t{}\t{!r}\t{}\n".format(state.encode(),
						action.encode(), float(self.values[i, j]),
						int(self.visits[i, j])))


def sarsa_update(q, s, a, r, s2, a2, alpha, gamma):
	"""Apply q[s,a] <- q[s,a] + alpha (r + gamma q[s2,a2] - q[s,a]).

	Returns the new value of q[s,a].
	"""

	_check_parameter(alpha, "alpha", min_value=0.0, inclusive=False, ndim=0)
	_check_parameter(alpha, "alpha", max_value=1.0, ndim=0)
	_check_parameter(gamma, "gamma", min_value=0.0, ndim=0)
	_check_parameter(gamma, "gamma", max_value=1.0, inclusive=False, ndim=0)

	i, j = q.state_index(s), q.action_index(a)
	predict = float(q.values[i, j])
	target = r + gamma * q[s2, a2]

	value = predict + alpha * (target - predict)
	q.values[i, j] = value
	q.visits[i, j] += 1
	return value


def improve_modularity_policy(state, reward, epsilon, q, random_state,
	allowed=None, grids=None):
	"""Choose the next action epsilon-greedily.

	With probability `epsilon` the action is drawn uniformly from `allowed`;
	otherwise it is the allowed action with the largest value in the
	state's row, the earliest in enumeration order among ties. When the
	last reward was positive the chosen action is then moved one step along
	its parameter grid, as long as the moved action is allowed and its value
	in the state's row is no lower than the chosen one's.


	Parameters
	----------
	state: State
		The current state.

	reward: float
		The last reward.

	epsilon: float
		The exploration probability, in [0, 1].

	q: QTable
		The learned values.

	random_state: numpy.random.RandomState
		The generator for exploration and perturbation draws.

	allowed: list of Action or None, optional
		The permitted actions, all of q's actions by default.

	grids: dict or None, optional
		The parameter grids the actions came from. Default is None.


	Returns
	-------
	action: Action
	"""

	_check_parameter(epsilon, "epsilon", min_value=0.0, max_value=1.0, ndim=0)
	random_state = _check_random_state(random_state)

	allowed = q.actions if allowed is None else list(allowed)
	if len(allowed) == 0:
		raise ConfigurationError(["walktrap_max_nodes", "grids"],
			"The action space is empty after masking")

	if random_state.random_sample() < epsilon:
		action = allowed[random_state.randint(len(allowed))]
	else:
		action = allowed[int(numpy.argmax(q.row(state, allowed)))]

	if reward > 0:
		moved = neighbor_action(action, random_state, grids)
		if moved in allowed and q[state, moved] >= q[state, action]:
			action = moved

	return action


@dataclass
class AgentConfig:
	"""Hyperparameters of an agent run."""

	episodes: int = 50
	alpha: float = 0.8
	gamma: float = 0.5
	epsilon: float = 0.2
	steps_per_episode: int = 20
	patience: int = 5
	metric: str = "qds"
	seed: int = 0
	buckets: int = 10

	def validate(self):
		"""Raise ConfigurationError naming every out-of-range field."""

		checks = {
			"episodes": dict(min_value=0, dtypes=(int,)),
			"alpha": dict(min_value=0.0, max_value=1.0),
			"gamma": dict(min_value=0.0, max_value=1.0),
			"epsilon": dict(min_value=0.0, max_value=1.0),
			"steps_per_episode": dict(min_value=1, dtypes=(int,)),
			"patience": dict(min_value=1, dtypes=(int,)),
			"metric": dict(value_set=METRICS, dtypes=(str,)),
			"seed": dict(min_value=0, dtypes=(int,)),
			"buckets": dict(min_value=1, dtypes=(int,)),
		}

		bad = []
		for name, kwargs in checks.items():
			try:
				_check_parameter(getattr(self, name), name, ndim=0, **kwargs)
			except ValueError:
				bad.append(name)

		if self.alpha == 0:
			bad.append("alpha")
		if self.gamma == 1:
			bad.append("gamma")

		if bad:
			raise ConfigurationError(sorted(set(bad)))

		return self


@dataclass
class StepRecord:
	episode: int
	step: int
	snapshot: int
	state: State
	action: object
	reward: float
	accumulated: float
	q_value: float
	refused: bool = False
	partition: object = None


@dataclass
class EpisodeSummary:
	episode: int
	snapshot: int
	steps: int
	accumulated: float
	best_reward: float
	best_action: object = None
	best_partition: object = None


@dataclass
class EpisodeLog:
	"""Every step and every episode of an agent run."""

	steps: list = field(default_factory=list)
	episodes: list = field(default_factory=list)

	def __len__(self):
		return len(self.episodes)

	def to_frame(self):
		"""Return the step log as a DataFrame with the log columns."""

		rows = [(r.episode, r.step, r.state.encode(), r.action.encode(),
			r.reward, r.accumulated, r.q_value) for r in self.steps]
		return pandas.DataFrame(rows, columns=LOG_COLUMNS)

	def to_csv(self, path):
		self.to_frame().to_csv(path, index=False, float_format="%.17g",
			lineterminator="\n")

	def accumulated_rewards(self):
		return numpy.array([e.accumulated for e in self.episodes])

	def mean_step_rewards(self):
		return numpy.array([e.accumulated / e.steps if e.steps else 0.0
			for e in self.episodes])

	def best_rewards(self):
		return numpy.array([e.best_reward for e in self.episodes])

	def best_episode(self):
		"""The summary of the first episode reaching the highest reward."""

		if not self.episodes:
			return None

		return self.episodes[int(numpy.argmax(self.best_rewards()))]


def run_agent(stream, config, actions=None, grids=None,
	walktrap_max_nodes=50000, verbose=False, q=None):
	"""Run SARSA episodes over a snapshot stream.

	Episode e works on snapshot e * K // episodes of the K snapshots. Each
	episode starts from the state (None, 0) with a freshly chosen action
	and carries the Q-table over from earlier episodes. It ends after
	`steps_per_episode` steps or once the best reward of the episode has
	not improved for `patience` consecutive steps.

	All draws come from one generator seeded with `config.seed`: the
	policy's exploration and perturbation, and a fresh seed for every
	detector run.


	Parameters
	----------
	stream: SnapshotStream
		The snapshots.

	config: AgentConfig
		The hyperparameters.

	actions: list of Action or None, optional
		The action space. Default is `enumerate_actions(grids)`.

	grids: dict or None, optional
		Parameter grids replacing the default ones. Default is None.

	walktrap_max_nodes: int, optional
		The node count above which walktrap is masked. Default is 50000.

	verbose: bool, optional
		Whether to log a line per episode.

	q: QTable or None, optional
		A table to continue learning in. Default is a new zero table.


	Returns
	-------
	log: EpisodeLog
		The run.

	q: QTable
		The learned values.
	"""

	config.validate()
	actions = enumerate_actions(grids) if actions is None else list(actions)

	random_state = _check_random_state(config.seed)
	env = CommunityDetectionEnv(stream, config.metric, walktrap_max_nodes)
	q = QTable(actions, config.buckets) if q is None else q
	log = EpisodeLog()

	best_overall = float("-inf")
	for episode in range(config.episodes):
		start_time = time.time()

		snapshot = episode * len(stream) // config.episodes
		env.reset(snapshot)
		allowed = env.allowed(actions)

		state, reward = State(None, 0), 0.0
		action = improve_modularity_policy(state, reward, config.epsilon, q,
			random_state, allowed, grids)

		accumulated, best, stale = 0.0, float("-inf"), 0
		summary = EpisodeSummary(episode, snapshot, 0, 0.0, best)

		for step in range(config.steps_per_episode):
			seed = int(random_state.randint(2**31 - 1))
			reward, partition, refused = env.step(action, seed)

			next_state = state_of(reward, action.detector, config.buckets)
			next_action = improve_modularity_policy(next_state, reward,
				config.epsilon, q, random_state, allowed, grids)

			value = sarsa_update(q, state, action, reward, next_state,
				next_action, config.alpha, config.gamma)
			accumulated += reward

			log.steps.append(StepRecord(episode, step, snapshot, state, action,
				reward, accumulated, value, refused, partition))

			if reward > best + eps:
				best, stale = reward, 0
				summary.best_action = action
				summary.best_partition = partition
			else:
				stale += 1

			state, action = next_state, next_action
			if stale >= config.patience:
				break

		summary.steps = step + 1 if config.steps_per_episode > 0 else 0
		summary.accumulated = accumulated
		summary.best_reward = best
		log.episodes.append(summary)

		if verbose:
			improvement = best - best_overall if episode > 0 else best
			logger.info("[{}] Improvement: {}, Time: {:4.4}s".format(episode,
				improvement, time.time() - start_time))

		best_overall = max(best_overall, best)

	return log, q
