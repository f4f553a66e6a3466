# __main__.py
# Contact: rlcommunity developers

"""Command line entry point.

	python -m rlcommunity --er 200 0.05 --out runs/er200
	python -m rlcommunity --dataset data/cit-HepTh.txt --max-nodes 5000
	python -m rlcommunity --config runs/er200/config.yaml

Exit codes: 0 on success, 1 for invalid arguments or configuration, 2 for
I/O errors and 3 when a post-run consistency check fails. No environment
variable affects a run.
"""

import sys
import argparse
import logging
import dataclasses

import yaml

from .graph import compute_stats
from .experiment import ExperimentConfig
from .experiment import load_graph
from .experiment import run_batch
from .experiment import run_experiment

from ._utils import ConfigurationError
from ._utils import InvariantViolation
from ._utils import _spawn_seeds


logger = logging.getLogger("rlcommunity")

# flag destination -> ExperimentConfig field
_OVERRIDES = {
	"dataset": "dataset",
	"max_nodes": "max_nodes",
	"snapshots": "snapshots",
	"order": "order",
	"episodes": "episodes",
	"alpha": "alpha",
	"gamma": "gamma",
	"epsilon": "epsilon",
	"steps": "steps_per_episode",
	"patience": "patience",
	"metric": "metric",
	"buckets": "buckets",
	"seed": "seed",
	"baselines": "baselines",
	"walktrap_max_nodes": "walktrap_max_nodes",
	"out": "out",
}


class _ArgumentParser(argparse.ArgumentParser):
	"""Reports usage errors as configuration errors instead of exiting 2."""

	def error(self, message):
		raise ConfigurationError(["arguments"], message)


def build_parser():
	parser = _ArgumentParser(prog="rlcommunity",
		description="Learn which community detector to run on a growing "
		"graph with a SARSA agent.")

	data = parser.add_argument_group("Dataset")
	source = data.add_mutually_exclusive_group()
	source.add_argument("--dataset", metavar="PATH",
		help="SNAP-style edge list, e.g. cit-HepTh.txt")
	source.add_argument("--er", nargs=2, metavar=("N", "P"),
		help="generate an Erdos-Renyi G(N, P) graph")
	data.add_argument("--max-nodes", type=int, dest="max_nodes",
		help="keep the subgraph of the first N nodes read")
	data.add_argument("--snapshots", type=int, help="number of snapshots")
	data.add_argument("--order", choices=["as-read", "shuffled"],
		help="edge order of the snapshot prefixes")
	data.add_argument("--stats", action="store_true",
		help="print dataset statistics and exit")

	agent = parser.add_argument_group("Agent")
	agent.add_argument("--episodes", type=int)
	agent.add_argument("--alpha", type=float, help="learning rate")
	agent.add_argument("--gamma", type=float, help="discount factor")
	agent.add_argument("--epsilon", type=float, help="exploration rate")
	agent.add_argument("--steps", type=int, help="step cap per episode")
	agent.add_argument("--patience", type=int,
		help="steps without improvement ending an episode")
	agent.add_argument("--metric", choices=["q", "qds"], help="reward metric")
	agent.add_argument("--buckets", type=int, help="reward buckets per state")
	agent.add_argument("--walktrap-max-nodes", type=int,
		dest="walktrap_max_nodes", help="node count above which walktrap "
		"is masked")

	run = parser.add_argument_group("Run")
	run.add_argument("--config", metavar="FILE",
		help="YAML configuration; flags override its values")
	run.add_argument("--seed", type=int, help="root seed")
	run.add_argument("--seeds", type=int, nargs="+",
		help="run one experiment per seed in OUT/seed_<seed>/")
	run.add_argument("--jobs", type=int, default=1,
		help="worker processes for --seeds")
	run.add_argument("--baselines", choices=["none", "null", "static", "all"])
	run.add_argument("--out", metavar="DIR", help="output directory")
	run.add_argument("--verbose", action="store_true",
		help="log debug messages and one line per episode")

	return parser


def build_config(args):
	"""Merge a configuration file, if any, with the given flags."""

	config = ExperimentConfig.load(args.config) if args.config else \
		ExperimentConfig()

	changes = {field: getattr(args, dest) for dest, field in
		_OVERRIDES.items() if getattr(args, dest) is not None}

	if args.er is not None:
		try:
			changes["er_n"], changes["er_p"] = int(args.er[0]), float(args.er[1])
		except ValueError:
			raise ConfigurationError(["er_n", "er_p"])

		changes["dataset"] = None

	if args.dataset is not None:
		changes["er_n"], changes["er_p"] = None, None

	return dataclasses.replace(config, **changes).validate()


def main(argv=None):
	"""Run the command line and return its exit code."""

	try:
		args = build_parser().parse_args(argv)

		logging.basicConfig(level=logging.DEBUG if args.verbose else
			logging.INFO, format="%(asctime)s %(name)s %(levelname)s "
			"%(message)s")

		config = build_config(args)

		if args.stats:
			graph_seed = _spawn_seeds(config.seed, 4)[0]
			stats = compute_stats(load_graph(config, graph_seed))
			sys.stdout.write(yaml.safe_dump(dataclasses.asdict(stats),
				sort_keys=False))
			return 0

		if args.seeds:
			reports = run_batch(config, args.seeds, args.jobs)
		else:
			reports = [run_experiment(config, verbose=args.verbose)]

		for report in reports:
			logger.info("{}: average {:.6f}, best {:.6f}, best static {}, "
				"{:.1f}s".format(report.label, report.average, report.best,
				report.best_static, report.seconds))

	except ConfigurationError as e:
		logger.error("Invalid configuration: {}".format(e))
		return 1
	except InvariantViolation as e:
		logger.error("Consistency check failed: {}".format(e))
		return 3
	except OSError as e:
		logger.error("I/O error: {}".format(e))
		return 2
	except ValueError as e:
		logger.error("Invalid input: {}".format(e))
		return 1

	return 0


if __name__ == "__main__":
	sys.exit(main())
