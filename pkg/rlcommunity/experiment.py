# experiment.py
# Contact: rlcommunity developers

"""Experiment runs: configuration, the agent, its baselines and artifacts.

A run is fully determined by an `ExperimentConfig`. Its root seed is split
into child seeds for graph generation, snapshot ordering, the agent and the
static baselines, so re-running an echoed `config.yaml` reproduces every
artifact byte for byte.
"""

import os
import time
import hashlib
import logging
import dataclasses

from dataclasses import dataclass
from dataclasses import field
from multiprocessing import Pool
from typing import Optional

import numpy
import pandas
import yaml

from .graph import build_snapshots
from .graph import erdos_renyi
from .graph import first_nodes
from .graph import load_edge_list
from .scoring import score
from .scoring import write_partition
from .actions import DetectorId
from .actions import WALKTRAP_MAX_NODES
from .actions import action_mask
from .actions import detect
from .actions import enumerate_actions
from .actions import static_actions
from .agent import AgentConfig
from .agent import run_agent

from ._utils import ConfigurationError
from ._utils import InvariantViolation
from ._utils import _check_parameter
from ._utils import _spawn_seeds


logger = logging.getLogger(__name__)

BASELINES = ("none", "null", "static", "all")
ORDERS = ("as-read", "shuffled")
TOLERANCE = 1e-12


def _plain(value):
	if isinstance(value, dict):
		return {str(k if not isinstance(k, DetectorId) else k.value):
			_plain(v) for k, v in value.items()}

	if isinstance(value, (list, tuple)):
		return [_plain(v) for v in value]

	if isinstance(value, numpy.generic):
		return value.item()

	return value


@dataclass
class ExperimentConfig:
	"""Everything that determines an experiment run.

	Exactly one dataset source is set: either `dataset`, the path of an
	edge list, or both `er_n` and `er_p` for an Erdos-Renyi graph.
	`max_nodes` keeps only the subgraph induced by the first nodes read.
	"""

	dataset: Optional[str] = None
	er_n: Optional[int] = None
	er_p: Optional[float] = None
	max_nodes: Optional[int] = None
	snapshots: int = 5
	order: str = "as-read"
	episodes: int = 50
	alpha: float = 0.8
	gamma: float = 0.5
	epsilon: float = 0.2
	steps_per_episode: int = 20
	patience: int = 5
	metric: str = "qds"
	buckets: int = 10
	seed: int = 0
	baselines: str = "all"
	walktrap_max_nodes: int = WALKTRAP_MAX_NODES
	grids: Optional[dict] = None
	out: str = "out"

	def validate(self):
		"""Raise ConfigurationError listing every invalid field."""

		bad = []

		has_path = self.dataset is not None
		has_er = self.er_n is not None or self.er_p is not None
		if has_path == has_er:
			bad.extend(["dataset", "er_n", "er_p"])
		elif has_er:
			try:
				_check_parameter(self.er_n, "er_n", min_value=0, ndim=0,
					dtypes=(int,))
				_check_parameter(self.er_p, "er_p", min_value=0.0,
					max_value=1.0, ndim=0)
				if self.er_n is None or self.er_p is None:
					raise ValueError("er_n and er_p go together")
			except ValueError:
				bad.extend(["er_n", "er_p"])

		checks = {
			"max_nodes": dict(min_value=1, dtypes=(int,)),
			"snapshots": dict(min_value=1, dtypes=(int,)),
			"order": dict(value_set=ORDERS, dtypes=(str,)),
			"baselines": dict(value_set=BASELINES, dtypes=(str,)),
			"walktrap_max_nodes": dict(min_value=0, dtypes=(int,)),
			"out": dict(dtypes=(str,)),
		}

		for name, kwargs in checks.items():
			try:
				_check_parameter(getattr(self, name), name, ndim=0, **kwargs)
			except ValueError:
				bad.append(name)

		if self.out is None:
			bad.append("out")

		try:
			enumerate_actions(self.grids)
		except (ValueError, KeyError, TypeError):
			bad.append("grids")

		try:
			self.agent_config().validate()
		except ConfigurationError as e:
			bad.extend(e.fields)

		if bad:
			raise ConfigurationError(sorted(set(bad)))

		return self

	def agent_config(self, seed=None):
		return AgentConfig(episodes=self.episodes, alpha=self.alpha,
			gamma=self.gamma, epsilon=self.epsilon,
			steps_per_episode=self.steps_per_episode, patience=self.patience,
			metric=self.metric, seed=self.seed if seed is None else seed,
			buckets=self.buckets)

	def to_dict(self):
		return _plain(dataclasses.asdict(self))

	def to_yaml(self):
		return yaml.safe_dump(self.to_dict(), sort_keys=True,
			default_flow_style=False)

	def config_hash(self):
		return hashlib.sha256(self.to_yaml().encode("utf-8")).hexdigest()

	def save(self, path):
		with open(path, "w", encoding="utf-8", newline="\n") as outfile:
			outfile.write(self.to_yaml())

	@classmethod
	def from_dict(cls, values):
		names = {f.name for f in dataclasses.fields(cls)}
		unknown = sorted(set(values) - names)
		if unknown:
			raise ConfigurationError(unknown, "Unknown configuration fields: "
				"{}".format(", ".join(unknown)))

		return cls(**values)

	@classmethod
	def load(cls, path):
		with open(path, "r", encoding="utf-8") as infile:
			values = yaml.safe_load(infile) or {}

		if not isinstance(values, dict):
			raise ConfigurationError(["config"], "Configuration file {} does "
				"not hold a mapping".format(path))

		return cls.from_dict(values)


@dataclass
class RunReport:
	"""The outcome of a run and of the baselines run alongside it.

	`average` is the mean over episodes of the best reward reached in each
	episode and `best` the highest of them. Static baselines report the
	mean and maximum over snapshots instead.
	"""

	label: str
	average: float
	best: float
	seconds: float
	config_hash: str
	episodes: int = 0
	n_actions: int = 0
	baselines: list = field(default_factory=list)
	skipped: list = field(default_factory=list)
	artifacts: dict = field(default_factory=dict)

	@property
	def best_static(self):
		"""The highest average among the static detector baselines."""

		values = [b.average for b in self.baselines if b.label != "null"]
		return max(values) if values else None

	def to_dict(self):
		values = {
			"label": self.label,
			"average": self.average,
			"best": self.best,
			"seconds": self.seconds,
			"config_hash": self.config_hash,
			"episodes": self.episodes,
			"n_actions": self.n_actions,
			"best_static": self.best_static,
			"skipped": list(self.skipped),
			"baselines": [b.to_dict() for b in self.baselines],
			"artifacts": dict(self.artifacts),
		}

		return _plain(values)

	def save(self, path):
		with open(path, "w", encoding="utf-8", newline="\n") as outfile:
			yaml.safe_dump(self.to_dict(), outfile, sort_keys=False,
				default_flow_style=False)


def _sha256(path, chunk_size=1 << 20):
	digest = hashlib.sha256()
	with open(path, "rb") as infile:
		for chunk in iter(lambda: infile.read(chunk_size), b""):
			digest.update(chunk)

	return digest.hexdigest()


def load_graph(config, random_state=None):
	"""Read or generate the graph a configuration names."""

	if config.dataset is not None:
		g = load_edge_list(config.dataset)
		logger.info("Loaded {}: {} nodes, {} edges".format(config.dataset,
			g.n, g.m))
	else:
		g = erdos_renyi(config.er_n, config.er_p, random_state)

	if config.max_nodes is not None and g.n > config.max_nodes:
		g = first_nodes(g, config.max_nodes)

	return g


def build_stream(config):
	"""Build the snapshot stream of a configuration from its seeds."""

	graph_seed, order_seed, _, _ = _spawn_seeds(config.seed, 4)
	g = load_graph(config, graph_seed)
	return build_snapshots(g, config.snapshots, config.order, order_seed)


def emit_plot_data(log, directory):
	"""Write the per-episode reward series of a log as CSV files.

	Two files are written: `plot_accumulated.csv` with columns
	episode,accumulated_reward and `plot_mean_reward.csv` with columns
	episode,mean_step_reward.


	Parameters
	----------
	log: EpisodeLog
		A log with at least one episode.

	directory: str
		The directory to write to.


	Returns
	-------
	paths: list of str
	"""

	if len(log) == 0:
		raise ValueError("Cannot emit plot data from an empty episode log")

	os.makedirs(directory, exist_ok=True)
	episodes = [e.episode for e in log.episodes]

	series = [
		("plot_accumulated.csv", "accumulated_reward",
			log.accumulated_rewards()),
		("plot_mean_reward.csv", "mean_step_reward", log.mean_step_rewards()),
	]

	paths = []
	for name, column, values in series:
		path = os.path.join(directory, name)
		frame = pandas.DataFrame({"episode": episodes, column: values})
		frame.to_csv(path, index=False, float_format="%.17g",
			lineterminator="\n")
		paths.append(path)

	return paths


def _check_against_csv(report, path):
	"""Recompute the report averages from the episode CSV."""

	frame = pandas.read_csv(path, keep_default_na=False)
	if len(frame) == 0:
		rewards = numpy.zeros(0)
	else:
		rewards = frame.groupby("episode", sort=True)["reward"].max().values

	average = float(rewards.mean()) if len(rewards) else 0.0
	best = float(rewards.max()) if len(rewards) else 0.0

	if abs(average - report.average) > TOLERANCE or \
		abs(best - report.best) > TOLERANCE:
		raise InvariantViolation("Report of {} ({}, {}) disagrees with {} "
			"({}, {})".format(report.label, report.average, report.best, path,
			average, best))


def run_static_baselines(config, stream=None):
	"""Run each detector once per snapshot at its default parameters.

	Walktrap is skipped, with a warning, when any snapshot exceeds
	`walktrap_max_nodes` nodes.


	Parameters
	----------
	config: ExperimentConfig
		The configuration.

	stream: SnapshotStream or None, optional
		The snapshots; built from `config` when None.


	Returns
	-------
	report: RunReport
		Labelled 'static', with one baseline per detector run and the names
		of skipped detectors in `skipped`.
	"""

	config.validate()
	if stream is None:
		stream = build_stream(config)

	_, _, _, baseline_seed = _spawn_seeds(config.seed, 4)
	seeds = _spawn_seeds(baseline_seed, len(stream))
	n_max = max(g.n for g in stream)

	rows, skipped = [], []
	for action in static_actions():
		name = action.detector.value
		if not action_mask([action], n_max, config.walktrap_max_nodes):
			logger.warning("Skipping {} on snapshots of up to {} nodes".format(
				name, n_max))
			skipped.append(name)
			continue

		start_time = time.time()
		values = [score(g, detect(g, action, seed), config.metric)
			for g, seed in zip(stream, seeds)]

		rows.append(RunReport(name, float(numpy.mean(values)),
			float(numpy.max(values)), time.time() - start_time,
			config.config_hash(), n_actions=1))

	best = max(rows, key=lambda r: r.average) if rows else None
	return RunReport("static", best.average if best else 0.0,
		best.best if best else 0.0, sum(r.seconds for r in rows),
		config.config_hash(), baselines=rows, skipped=skipped)


def run_experiment(config, label="agent", verbose=False):
	"""Run the agent on a configuration and write every artifact.

	The run directory `config.out` receives `config.yaml`, `episodes.csv`,
	`qtable.tsv`, `partition_best.tsv`, the plot data, `baselines.csv` when
	baselines ran and finally `report.yaml`, which lists the SHA-256 of
	every other file. The null model, when requested, runs in the `null`
	subdirectory.


	Parameters
	----------
	config: ExperimentConfig
		The configuration.

	label: str, optional
		The name of the run in its report. Default is 'agent'.

	verbose: bool, optional
		Whether the agent logs a line per episode.


	Returns
	-------
	report: RunReport
	"""

	config.validate()
	os.makedirs(config.out, exist_ok=True)
	start_time = time.time()

	_, _, agent_seed, _ = _spawn_seeds(config.seed, 4)
	stream = build_stream(config)
	actions = enumerate_actions(config.grids)

	log, q = run_agent(stream, config.agent_config(agent_seed), actions,
		config.grids, config.walktrap_max_nodes, verbose)

	rewards = log.best_rewards()
	report = RunReport(label, float(rewards.mean()) if len(rewards) else 0.0,
		float(rewards.max()) if len(rewards) else 0.0, 0.0,
		config.config_hash(), episodes=len(log), n_actions=len(actions))

	paths = []

	path = os.path.join(config.out, "config.yaml")
	config.save(path)
	paths.append(path)

	path = os.path.join(config.out, "episodes.csv")
	log.to_csv(path)
	paths.append(path)
	_check_against_csv(report, path)

	path = os.path.join(config.out, "qtable.tsv")
	q.dump(path)
	paths.append(path)

	best = log.best_episode()
	if best is not None and best.best_partition is not None:
		path = os.path.join(config.out, "partition_best.tsv")
		write_partition(stream[best.snapshot], best.best_partition, path)
		paths.append(path)

	if len(log) > 0:
		paths.extend(emit_plot_data(log, config.out))

	report.seconds = time.time() - start_time

	if config.baselines in ("null", "all"):
		null = run_null_model(config)
		report.baselines.append(null)

	if config.baselines in ("static", "all"):
		static = run_static_baselines(config, stream)
		report.baselines.extend(static.baselines)
		report.skipped = static.skipped

	if report.baselines:
		path = os.path.join(config.out, "baselines.csv")
		# wall-clock times stay in report.yaml so the hash is reproducible
		frame = pandas.DataFrame([(b.label, b.average, b.best)
			for b in report.baselines], columns=["baseline", "average", "best"])
		frame.to_csv(path, index=False, float_format="%.17g",
			lineterminator="\n")
		paths.append(path)

	for path in paths:
		report.artifacts[os.path.basename(path)] = _sha256(path)
		logger.info("Wrote {}".format(path))

	report.save(os.path.join(config.out, "report.yaml"))
	return report


def run_null_model(config, verbose=False):
	"""Run the agent with epsilon = 1, choosing every action at random.

	The run uses the same seeds and snapshots as `config` and writes its
	artifacts to the `null` subdirectory of `config.out`.
	"""

	null = dataclasses.replace(config, epsilon=1.0, baselines="none",
		out=os.path.join(config.out, "null"))
	return run_experiment(null, label="null", verbose=verbose)


def run_batch(config, seeds, n_jobs=1):
	"""Run one experiment per seed, each in `out/seed_<seed>/`.

	Parameters
	----------
	config: ExperimentConfig
		The configuration shared by every run.

	seeds: list of int
		The root seeds.

	n_jobs: int, optional
		The number of worker processes. Default is 1.


	Returns
	-------
	reports: list of RunReport
		In the order of `seeds`.
	"""

	_check_parameter(n_jobs, "n_jobs", min_value=1, ndim=0, dtypes=(int,))
	configs = [dataclasses.replace(config, seed=int(seed),
		out=os.path.join(config.out, "seed_{}".format(seed))) for seed in seeds]

	for c in configs:
		c.validate()

	if n_jobs == 1 or len(configs) <= 1:
		return [run_experiment(c) for c in configs]

	with Pool(min(n_jobs, len(configs))) as pool:
		return pool.map(run_experiment, configs)
