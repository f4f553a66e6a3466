# _utils.py
# Contact: rlcommunity developers

import numpy
import torch


eps = 1e-12


class EdgeListParseError(ValueError):
	"""A malformed line in an edge-list file."""

	def __init__(self, lineno, line, reason):
		self.lineno = lineno
		self.line = line
		super().__init__("line {}: {} ({!r})".format(lineno, reason, line))


class ExactSearchRefused(ValueError):
	"""The exhaustive partition search was asked for too large a graph."""
	pass


class ConfigurationError(ValueError):
	"""An invalid experiment configuration.

	The `fields` attribute lists the names of every offending field so the
	command line can report all of them at once.
	"""

	def __init__(self, fields, message=None):
		self.fields = list(fields)
		if message is None:
			message = "invalid configuration fields: {}".format(
				", ".join(self.fields))

		super().__init__(message)


class InvariantViolation(RuntimeError):
	"""A post-run consistency check failed."""
	pass


def _cast_as_tensor(value, dtype=None):
	"""Cast a list, array or tensor into a torch tensor."""

	if value is None:
		return None

	if isinstance(value, torch.Tensor):
		if dtype is None or value.dtype == dtype:
			return value
		return value.type(dtype)

	if isinstance(value, (bool, int, float, list, tuple, numpy.ndarray,
		numpy.generic)):
		if dtype is None:
			return torch.tensor(numpy.asarray(value))
		return torch.tensor(numpy.asarray(value), dtype=dtype)

	raise ValueError("Cannot cast value of type {} as a tensor".format(
		type(value).__name__))


def _check_parameter(parameter, name, min_value=None, max_value=None,
	value_set=None, dtypes=None, ndim=None, shape=None, inclusive=True):
	"""Ensures that the parameter falls within a valid range.

	Each condition is skipped when it is `None`. A parameter can be a scalar
	or an array/tensor; range and set checks then apply to every element.


	Parameters
	----------
	parameter: anything
		The parameter meant to be checked. `None` is always accepted.

	name: str
		The name of the parameter for error messages.

	min_value: float or None, optional
		The minimum value any element can take. Default is None.

	max_value: float or None, optional
		The maximum value any element can take. Default is None.

	value_set: tuple or list or set or None, optional
		The values each element may take. Default is None.

	dtypes: tuple or list or set or None, optional
		The allowed Python types (scalars) or dtypes (arrays). Default is None.

	ndim: int or tuple or None, optional
		The allowed number of dimensions. Scalars have 0. Default is None.

	shape: tuple or None, optional
		The expected shape, -1 matching anything. Default is None.

	inclusive: bool, optional
		Whether `min_value` and `max_value` are themselves valid. Default is
		True.


	Returns
	-------
	parameter: anything
		The unchanged parameter, to allow chaining.
	"""

	vector = (numpy.ndarray, torch.Tensor)

	if parameter is None:
		return None

	is_vector = isinstance(parameter, vector)
	values = numpy.asarray(parameter.cpu() if isinstance(parameter,
		torch.Tensor) else parameter)

	if dtypes is not None:
		kind = parameter.dtype if is_vector else type(parameter)
		if kind not in dtypes:
			raise ValueError("Parameter {} dtype must be one of {}".format(
				name, dtypes))

	if min_value is not None:
		below = values < min_value if inclusive else values <= min_value
		if numpy.any(below):
			raise ValueError("Parameter {} must have a minimum value {} {}"
				.format(name, "of" if inclusive else "above", min_value))

	if max_value is not None:
		above = values > max_value if inclusive else values >= max_value
		if numpy.any(above):
			raise ValueError("Parameter {} must have a maximum value {} {}"
				.format(name, "of" if inclusive else "below", max_value))

	if value_set is not None:
		if is_vector:
			if not numpy.all(numpy.isin(values, list(value_set))):
				raise ValueError("Parameter {} must contain values in set"
					" {}".format(name, value_set))
		elif not any(parameter is v or (type(parameter) == type(v) and
			parameter == v) for v in value_set):
			raise ValueError("Parameter {} must be one of {}".format(name,
				value_set))

	if ndim is not None:
		ndims = (ndim,) if isinstance(ndim, int) else tuple(ndim)
		if values.ndim not in ndims:
			raise ValueError("Parameter {} must have {} dims".format(name,
				ndim))

	if shape is not None:
		if values.ndim != len(shape) or any(s != -1 and s != t
			for s, t in zip(shape, values.shape)):
			raise ValueError("Parameter {} must have shape {}".format(name,
				shape))

	return parameter


def _check_random_state(random_state):
	"""Turn a seed, None or a RandomState into a RandomState."""

	if isinstance(random_state, numpy.random.RandomState):
		return random_state

	if random_state is None or isinstance(random_state, (int, numpy.integer)):
		return numpy.random.RandomState(random_state)

	raise ValueError("random_state must be None, an int or a RandomState")


def _spawn_seeds(seed, n):
	"""Split one root seed into `n` independent 31-bit child seeds."""

	state = numpy.random.SeedSequence(seed).generate_state(n, dtype=numpy.uint32)
	return [int(s) & 0x7fffffff for s in state]


def _compact_labels(labels):
	"""Renumber labels to 0..c-1 in order of first appearance.

	Parameters
	----------
	labels: numpy.ndarray, shape=(n,)
		Arbitrary integer labels.


	Returns
	-------
	y: torch.Tensor, dtype=int64, shape=(n,)
		Dense community ids.
	"""

	labels = numpy.asarray(labels)
	if labels.size == 0:
		return torch.zeros(0, dtype=torch.int64)

	_, first, inverse = numpy.unique(labels, return_index=True,
		return_inverse=True)
	rank = numpy.empty(len(first), dtype=numpy.int64)
	rank[numpy.argsort(first, kind="stable")] = numpy.arange(len(first))
	return torch.from_numpy(rank[inverse.reshape(-1)])
