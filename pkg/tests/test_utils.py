# test_utils.py
# Contact: rlcommunity developers

import numpy
import torch
import pytest

from rlcommunity._utils import EdgeListParseError
from rlcommunity._utils import ConfigurationError
from rlcommunity._utils import _cast_as_tensor
from rlcommunity._utils import _check_parameter
from rlcommunity._utils import _check_random_state
from rlcommunity._utils import _compact_labels
from rlcommunity._utils import _spawn_seeds

from numpy.testing import assert_raises
from numpy.testing import assert_array_equal
from numpy.testing import assert_array_almost_equal


def _test_cast(y, dtype, ndim):
	x = _cast_as_tensor(y)
	assert isinstance(x, torch.Tensor)
	assert x.dtype == dtype
	assert x.ndim == ndim
	assert_array_almost_equal(x, y)


def test_cast_as_tensor_bool():
	_test_cast(False, torch.bool, 0)
	_test_cast([True, False], torch.bool, 1)


def test_cast_as_tensor_int():
	_test_cast(5, torch.int64, 0)
	_test_cast([0, 3, 1], torch.int64, 1)
	_test_cast(numpy.array([[1, 2], [3, 4]]), torch.int64, 2)


def test_cast_as_tensor_float():
	_test_cast(1.5, torch.float64, 0)
	_test_cast([0.5, 1.2], torch.float64, 1)


def test_cast_as_tensor_tensor():
	x = torch.tensor([1, 2, 3])
	assert _cast_as_tensor(x) is x
	assert _cast_as_tensor(x, dtype=torch.float64).dtype == torch.float64


def test_cast_as_tensor_none():
	assert _cast_as_tensor(None) is None


def test_cast_as_tensor_raises():
	assert_raises(ValueError, _cast_as_tensor, "abc")
	assert_raises(ValueError, _cast_as_tensor, {1: 2})


###


def test_check_parameter_none():
	assert _check_parameter(None, "x", min_value=0, dtypes=(int,)) is None


def test_check_parameter_min_max():
	assert _check_parameter(3, "x", min_value=0, max_value=5) == 3
	assert _check_parameter(0, "x", min_value=0) == 0

	assert_raises(ValueError, _check_parameter, -1, "x", min_value=0)
	assert_raises(ValueError, _check_parameter, 6, "x", max_value=5)
	assert_raises(ValueError, _check_parameter, 0, "x", min_value=0,
		inclusive=False)
	assert_raises(ValueError, _check_parameter, [1, -2], "x", min_value=0)


def test_check_parameter_value_set():
	assert _check_parameter("q", "x", value_set=("q", "qds")) == "q"

	assert_raises(ValueError, _check_parameter, "Q", "x",
		value_set=("q", "qds"))
	assert_raises(ValueError, _check_parameter, True, "x", value_set=(1, 2))
	assert_raises(ValueError, _check_parameter, numpy.array([1, 3]), "x",
		value_set=(1, 2))


def test_check_parameter_dtypes():
	assert _check_parameter(4, "x", dtypes=(int,)) == 4

	assert_raises(ValueError, _check_parameter, 4.0, "x", dtypes=(int,))
	assert_raises(ValueError, _check_parameter, True, "x", dtypes=(int,))
	assert_raises(ValueError, _check_parameter, torch.tensor([1.0]), "x",
		dtypes=(torch.int64,))


def test_check_parameter_ndim_shape():
	assert_raises(ValueError, _check_parameter, [1, 2], "x", ndim=0)
	assert_raises(ValueError, _check_parameter, 1, "x", ndim=1)
	assert_raises(ValueError, _check_parameter, numpy.zeros((3, 2)), "x",
		shape=(-1, 3))

	_check_parameter(numpy.zeros((3, 2)), "x", ndim=(1, 2), shape=(-1, 2))


###


def test_check_random_state():
	a = _check_random_state(5).randint(1000, size=10)
	b = _check_random_state(5).randint(1000, size=10)
	assert_array_equal(a, b)

	rng = numpy.random.RandomState(0)
	assert _check_random_state(rng) is rng
	assert isinstance(_check_random_state(None), numpy.random.RandomState)

	assert_raises(ValueError, _check_random_state, "seed")
	assert_raises(ValueError, _check_random_state, 1.5)


def test_spawn_seeds():
	seeds = _spawn_seeds(0, 4)
	assert len(seeds) == 4
	assert len(set(seeds)) == 4
	assert seeds == _spawn_seeds(0, 4)
	assert seeds != _spawn_seeds(1, 4)
	assert all(0 <= s < 2**31 for s in seeds)


def test_compact_labels():
	y = _compact_labels([7, 7, 3, 9, 3])
	assert y.dtype == torch.int64
	assert_array_equal(y, [0, 0, 1, 2, 1])

	assert_array_equal(_compact_labels(numpy.array([2, 1, 0])), [0, 1, 2])
	assert _compact_labels([]).shape == (0,)


###


def test_edge_list_parse_error():
	e = EdgeListParseError(3, "1 2 3", "expected 2 fields")
	assert isinstance(e, ValueError)
	assert e.lineno == 3
	assert e.line == "1 2 3"
	assert "line 3" in str(e)


def test_configuration_error():
	e = ConfigurationError(["alpha", "gamma"])
	assert isinstance(e, ValueError)
	assert e.fields == ["alpha", "gamma"]
	assert "alpha" in str(e) and "gamma" in str(e)

	e = ConfigurationError(["x"], "custom")
	assert str(e) == "custom"
