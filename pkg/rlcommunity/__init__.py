from .graph import Graph
from .graph import GraphStats
from .graph import SnapshotStream
from .graph import load_edge_list
from .graph import write_edge_list
from .graph import erdos_renyi
from .graph import ring_of_cliques
from .graph import first_nodes
from .graph import build_snapshots
from .graph import write_snapshots
from .graph import compute_stats

from .scoring import community_tally
from .scoring import modularity
from .scoring import modularity_density
from .scoring import score
from .scoring import exact_best_partition

from .detectors import *

from .actions import Action
from .actions import DetectorId
from .actions import enumerate_actions
from .actions import detect

from .environment import CommunityDetectionEnv
from .agent import AgentConfig
from .agent import QTable
from .agent import run_agent
from .experiment import ExperimentConfig
from .experiment import RunReport
from .experiment import run_experiment
from .experiment import run_null_model
from .experiment import run_static_baselines

__version__ = "0.1.0"
