# leading_eigenvector.py
# Contact: rlcommunity developers

import time
import logging

from collections import deque

import numpy
import torch

from scipy.sparse.linalg import ArpackNoConvergence
from scipy.sparse.linalg import LinearOperator
from scipy.sparse.linalg import eigsh

from .._utils import _check_parameter
from .._utils import _compact_labels
from .._utils import eps

from ._detector import Detector


logger = logging.getLogger(__name__)


def leading_eigenpair(matvec, n, tol=1e-10, max_iter=None, scale=1.0,
	dense_max_nodes=128, seed=0):
	"""Find the algebraically largest eigenpair of a symmetric operator.

	Operators of at most `dense_max_nodes` rows are materialized by applying
	`matvec` to the unit vectors and solved with `torch.linalg.eigh`. Larger
	ones are handed to ARPACK's implicitly restarted Lanczos method through
	`scipy.sparse.linalg.eigsh`, which only ever applies `matvec`. In both
	cases the pair is accepted when the residual ||B x - lambda x|| of the
	unit vector x is at most `tol * max(1, scale)`.


	Parameters
	----------
	matvec: callable
		A function computing B x for a float64 numpy array x of shape (n,).

	n: int
		The dimension of the operator.

	tol: float, optional
		The relative residual at which a pair is accepted. Default is 1e-10.

	max_iter: int or None, optional
		The maximum number of Lanczos restarts. None means 10 n. Default is
		None.

	scale: float, optional
		A bound on the norm of B, used to scale the residual test. Default
		is 1.

	dense_max_nodes: int, optional
		The largest dimension solved densely. Default is 128.

	seed: int, optional
		The seed for the Lanczos starting vector. Default is 0.


	Returns
	-------
	value: float
		The largest eigenvalue, or nan when the solver did not converge.

	vector: numpy.ndarray, shape=(n,)
		The unit-norm eigenvector, or None when the solver did not converge.

	converged: bool
		Whether an eigenpair passing the residual test was found.
	"""

	if n <= dense_max_nodes:
		B = numpy.column_stack([matvec(e) for e in numpy.eye(n)])
		values, vectors = torch.linalg.eigh(torch.from_numpy((B + B.T) / 2))
		value, x = float(values[-1]), vectors[:, -1].numpy()
	else:
		operator = LinearOperator((n, n), matvec=matvec, dtype=numpy.float64)
		v0 = numpy.random.RandomState(seed).uniform(0.5, 1.5, size=n)

		try:
			values, vectors = eigsh(operator, k=1, which="LA", v0=v0, tol=tol,
				maxiter=max_iter or 10 * n)
		except ArpackNoConvergence:
			return float("nan"), None, False

		value, x = float(values[0]), vectors[:, 0]

	x = x / numpy.linalg.norm(x)
	residual = numpy.linalg.norm(matvec(x) - value * x)
	if residual > tol * max(1.0, scale):
		return float("nan"), None, False

	return value, x, True


class LeadingEigenvector(Detector):
	"""Recursive spectral bisection of the modularity matrix.

	The whole graph starts as one group. A group g is split by the sign
	pattern of the leading eigenvector of its generalized modularity matrix

		B^(g)_ij = A_ij - k_i k_j / 2m - delta_ij sum_{l in g} B_il,

	as long as the leading eigenvalue is positive and the split raises
	modularity. Groups are examined first in, first out, so `max_splits`
	bounds the number of accepted splits in breadth-first order. Small
	groups are solved densely, larger ones with a Lanczos solver that never
	forms B; a group whose solver does not converge is left whole.


	Parameters
	----------
	max_splits: int or None, optional
		The maximum number of accepted splits. None means unbounded.
		Default is None.

	power_tol: float, optional
		The relative residual tolerance of the eigen-solver, also the
		threshold below which a leading eigenvalue counts as non-positive.
		Default is 1e-10.

	power_max_iter: int or None, optional
		The restart cap of the Lanczos solver. None means 10 n. Default is
		None.

	verbose: bool, optional
		Whether to log each accepted split.
	"""

	def __init__(self, max_splits=None, power_tol=1e-10, power_max_iter=None,
		verbose=False):
		super().__init__(verbose=verbose)
		self.name = "LeadingEigenvector"

		self.max_splits = _check_parameter(max_splits, "max_splits",
			min_value=0, ndim=0, dtypes=(int, numpy.int64))
		self.power_tol = _check_parameter(power_tol, "power_tol",
			min_value=0.0, inclusive=False, ndim=0)
		self.power_max_iter = _check_parameter(power_max_iter,
			"power_max_iter", min_value=1, ndim=0, dtypes=(int, numpy.int64))

		self.n_splits_ = 0
		self.eigenvalues_ = []

	def _operator(self, g, members):
		"""Return matvec and a Gershgorin bound for the group's B^(g)."""

		A = g.adjacency[members][:, members].tocsr().astype(numpy.float64)
		m2 = 2.0 * g.m

		k = g.degrees[members].astype(numpy.float64)
		a = numpy.asarray(A.sum(axis=1)).reshape(-1)
		r = a - k * k.sum() / m2

		def matvec(x):
			x = numpy.asarray(x, dtype=numpy.float64).reshape(-1)
			return A @ x - k * k.dot(x) / m2 - r * x

		scale = float(numpy.max(a + k * k.sum() / m2 + numpy.abs(r)))
		return matvec, scale

	def fit(self, g):
		g = self._check_graph(g)

		self.n_splits_ = 0
		self.eigenvalues_ = []
		labels = numpy.zeros(g.n, dtype=numpy.int64)

		if g.m == 0 or g.n < 2:
			self.labels_ = _compact_labels(labels)
			return self

		queue = deque([numpy.arange(g.n)])
		next_label = 1
		max_iter = self.power_max_iter or 10 * g.n

		while queue:
			if self.max_splits is not None and self.n_splits_ >= self.max_splits:
				break

			members = queue.popleft()
			if len(members) < 2:
				continue

			start_time = time.time()
			matvec, scale = self._operator(g, members)

			value, x, converged = leading_eigenpair(matvec, len(members),
				tol=self.power_tol, max_iter=max_iter, scale=scale)

			if not converged:
				logger.debug("Eigen-solver did not converge on a group of "
					"{} nodes".format(len(members)))
				continue

			if value <= self.power_tol * max(1.0, scale):
				continue

			positive = x > 0
			n_positive = int(positive.sum())
			if n_positive == 0 or n_positive == len(members):
				continue

			s = positive.astype(numpy.float64) * 2 - 1
			delta = float(s.dot(matvec(s))) / (4.0 * g.m)
			if delta <= eps:
				continue

			labels[members[positive]] = next_label
			next_label += 1

			queue.append(members[~positive])
			queue.append(members[positive])

			self.n_splits_ += 1
			self.eigenvalues_.append(value)

			if self.verbose:
				logger.info("[{}] Improvement: {}, Time: {:4.4}s".format(
					self.n_splits_, delta, time.time() - start_time))

		self.labels_ = _compact_labels(labels)
		return self


def detect_leading_eigenvector(g, params):
	"""Run the leading eigenvector detector with a parameter dictionary."""

	return LeadingEigenvector(**params).fit_predict(g)
