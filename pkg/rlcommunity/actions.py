# actions.py
# Contact: rlcommunity developers

"""The action space of the agent: a detector paired with one parameter value.

Every detector varies a single parameter over a small finite grid. An action
fixes that value; the random seed of the stochastic detectors is not part of
the action and is supplied when the action is run.
"""

import re
import enum

from dataclasses import dataclass

import numpy

from ._utils import _check_random_state

from .detectors import detect_leading_eigenvector
from .detectors import detect_walktrap
from .detectors import detect_label_propagation
from .detectors import detect_multilevel


WALKTRAP_MAX_NODES = 50000


class DetectorId(enum.Enum):
	"""The four detectors, in action enumeration order."""

	LEADING_EIGENVECTOR = "leading_eigenvector"
	WALKTRAP = "walktrap"
	LABEL_PROPAGATION = "label_propagation"
	MULTILEVEL = "multilevel"


# detector -> (parameter name, grid values)
DEFAULT_GRIDS = {
	DetectorId.LEADING_EIGENVECTOR: ("max_splits", (4, 16, None)),
	DetectorId.WALKTRAP: ("walk_length", (2, 3, 4, 5, 6, 7, 8)),
	DetectorId.LABEL_PROPAGATION: ("max_sweeps", (10, 50, 100)),
	DetectorId.MULTILEVEL: ("resolution", (0.5, 0.8, 1.0, 1.2, 1.5)),
}

STATIC_DEFAULTS = {
	DetectorId.LEADING_EIGENVECTOR: None,
	DetectorId.WALKTRAP: 4,
	DetectorId.LABEL_PROPAGATION: 100,
	DetectorId.MULTILEVEL: 1.0,
}

SEEDED = (DetectorId.LABEL_PROPAGATION, DetectorId.MULTILEVEL)

_DETECT = {
	DetectorId.LEADING_EIGENVECTOR: detect_leading_eigenvector,
	DetectorId.WALKTRAP: detect_walktrap,
	DetectorId.LABEL_PROPAGATION: detect_label_propagation,
	DetectorId.MULTILEVEL: detect_multilevel,
}

_ENCODING = re.compile(r"^(\w+)\((.*)\)$")


def _format_value(value):
	if isinstance(value, numpy.generic):
		value = value.item()

	return "none" if value is None else repr(value)


def _parse_value(text):
	if text == "none":
		return None

	try:
		return int(text)
	except ValueError:
		return float(text)


@dataclass(frozen=True)
class Action:
	"""A detector with a fixed parameter assignment.

	`params` is a tuple of (name, value) pairs so that actions are hashable
	and compare by value.
	"""

	detector: DetectorId
	params: tuple = ()

	def encode(self):
		"""Return the text form 'detector_name(key=value,...)'."""

		return "{}({})".format(self.detector.value, ",".join("{}={}".format(
			key, _format_value(value)) for key, value in self.params))

	@classmethod
	def decode(cls, text):
		match = _ENCODING.match(text.strip())
		if match is None:
			raise ValueError("Malformed action encoding {!r}".format(text))

		try:
			detector = DetectorId(match.group(1))
		except ValueError:
			raise ValueError("Unknown detector in action {!r}".format(text))

		params = []
		if match.group(2):
			for item in match.group(2).split(","):
				key, sep, value = item.partition("=")
				if not sep:
					raise ValueError("Malformed parameter {!r} in action {!r}"
						.format(item, text))

				params.append((key.strip(), _parse_value(value.strip())))

		return cls(detector, tuple(params))

	def __str__(self):
		return self.encode()


def _check_grids(grids):
	if grids is None:
		return DEFAULT_GRIDS

	checked = dict(DEFAULT_GRIDS)
	for detector, grid in grids.items():
		detector = DetectorId(detector)
		if isinstance(grid, dict):
			(key, values), = grid.items()
		elif isinstance(grid, (list, tuple)) and len(grid) == 2 and \
			isinstance(grid[0], str):
			key, values = grid
		else:
			key, values = DEFAULT_GRIDS[detector][0], grid

		values = tuple(values)
		if len(values) == 0:
			raise ValueError("Parameter grid of {} is empty".format(
				detector.value))

		checked[detector] = (key, values)

	return checked


def enumerate_actions(grids=None):
	"""List every action: each detector crossed with its parameter grid.

	Actions come detector by detector in the order of `DetectorId`, each
	grid in its declared order. With the default grids there are
	3 + 7 + 3 + 5 = 18 actions.


	Parameters
	----------
	grids: dict or None, optional
		Replacement grids keyed by detector name or `DetectorId`, either as
		a list of values or as {parameter: values}. Default is None.


	Returns
	-------
	actions: list of Action
	"""

	grids = _check_grids(grids)
	return [Action(detector, ((grids[detector][0], value),))
		for detector in DetectorId for value in grids[detector][1]]


def static_actions():
	"""The default-parameter action of each detector."""

	return [Action(detector, ((DEFAULT_GRIDS[detector][0],
		STATIC_DEFAULTS[detector]),)) for detector in DetectorId]


def action_mask(actions, node_count, walktrap_max_nodes=WALKTRAP_MAX_NODES):
	"""Return the actions allowed on a graph with `node_count` nodes.

	Walktrap keeps a dense profile per node, so it is refused above
	`walktrap_max_nodes` nodes.
	"""

	if node_count <= walktrap_max_nodes:
		return list(actions)

	return [a for a in actions if a.detector != DetectorId.WALKTRAP]


def neighbor_action(action, random_state=None, grids=None):
	"""Move an action one step along its parameter grid.

	The direction is drawn from `random_state`. A step off the end of the
	grid is reflected back inwards, and an action whose grid has a single
	value is returned unchanged.


	Parameters
	----------
	action: Action
		The action to perturb.

	random_state: int, numpy.random.RandomState or None, optional
		The generator drawing the direction. Default is None.

	grids: dict or None, optional
		The grids the action was enumerated from. Default is None.


	Returns
	-------
	action: Action
	"""

	random_state = _check_random_state(random_state)
	key, values = _check_grids(grids)[action.detector]
	current = dict(action.params)[key]

	idx = values.index(current)
	if len(values) == 1:
		return action

	direction = 2 * random_state.randint(2) - 1
	new = idx + direction
	if new < 0 or new >= len(values):
		new = idx - direction

	return Action(action.detector, ((key, values[new]),))


def param_assignment(action, random_state=None):
	"""Return the keyword arguments running `action` takes."""

	params = dict(action.params)
	if action.detector in SEEDED:
		params["random_state"] = random_state

	return params


def detect(g, action, random_state=None):
	"""Run the detector of an action on a graph.

	Parameters
	----------
	g: Graph
		The graph to partition.

	action: Action
		The detector and its parameters.

	random_state: int, numpy.random.RandomState or None, optional
		The seed of label propagation and multilevel; ignored by the
		deterministic detectors. Default is None.


	Returns
	-------
	labels: torch.Tensor, dtype=int64, shape=(g.n,)
	"""

	return _DETECT[action.detector](g, param_assignment(action, random_state))
