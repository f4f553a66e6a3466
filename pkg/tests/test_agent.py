# test_agent.py
# Contact: rlcommunity developers

import numpy
import torch
import pytest
import scipy.stats

from multiprocessing import Pool

from rlcommunity.graph import Graph
from rlcommunity.graph import SnapshotStream
from rlcommunity.graph import build_snapshots
from rlcommunity.graph import erdos_renyi
from rlcommunity.graph import ring_of_cliques
from rlcommunity.scoring import score
from rlcommunity.actions import Action
from rlcommunity.actions import DetectorId
from rlcommunity.actions import enumerate_actions
from rlcommunity.actions import static_actions
from rlcommunity.actions import detect
from rlcommunity.environment import CommunityDetectionEnv
from rlcommunity.agent import State
from rlcommunity.agent import QTable
from rlcommunity.agent import AgentConfig
from rlcommunity.agent import EpisodeLog
from rlcommunity.agent import LOG_COLUMNS
from rlcommunity.agent import state_of
from rlcommunity.agent import sarsa_update
from rlcommunity.agent import improve_modularity_policy
from rlcommunity.agent import run_agent

from rlcommunity._utils import ConfigurationError

from numpy.testing import assert_raises
from numpy.testing import assert_array_equal
from numpy.testing import assert_almost_equal


@pytest.fixture
def actions():
	return enumerate_actions()


@pytest.fixture
def q(actions):
	return QTable(actions)


@pytest.fixture
def cliques():
	return SnapshotStream([ring_of_cliques(4, 5)])


@pytest.fixture
def config():
	return AgentConfig(episodes=6, steps_per_episode=8, patience=3, seed=2)


###


def test_state_of():
	assert state_of(0.0, None) == State(None, 0)
	assert state_of(0.95, DetectorId.MULTILEVEL) == State(
		DetectorId.MULTILEVEL, 9)
	assert state_of(-0.2, DetectorId.WALKTRAP) == State(DetectorId.WALKTRAP, 0)
	assert state_of(1.0, None).bucket == 9
	assert state_of(1.7, None).bucket == 9
	assert state_of(0.35, None, n_buckets=4).bucket == 1


def test_state_encode():
	assert State(None, 0).encode() == "none|0"
	assert State(DetectorId.WALKTRAP, 3).encode() == "walktrap|3"
	assert str(State(DetectorId.MULTILEVEL, 9)) == "multilevel|9"


###


def test_qtable_initialization(q, actions):
	assert q.values.shape == (5 * 10, len(actions))
	assert q.values.dtype == torch.float64
	assert q.visits.dtype == torch.int64
	assert q.values.sum() == 0
	assert len(q.states()) == 50

	s = State(DetectorId.LABEL_PROPAGATION, 4)
	assert q[s, actions[5]] == 0.0


def test_qtable_buffers(q):
	names = [name for name, _ in q.named_buffers()]
	assert names == ["values", "visits"]


def test_qtable_indices(q, actions):
	indices = {q.state_index(s) for s in q.states()}
	assert indices == set(range(50))
	assert q.action_index(actions[7]) == 7


def test_qtable_raises(actions):
	assert_raises(ValueError, QTable, [])
	assert_raises(ValueError, QTable, actions, 0)
	assert_raises(ValueError, QTable, actions, 2.5)


def test_qtable_dump(tmpdir, q, actions):
	s = State(None, 0)
	sarsa_update(q, s, actions[2], 0.5, s, actions[2], 1.0, 0.5)

	path = str(tmpdir.join("qtable.tsv"))
	q.dump(path)

	with open(path) as infile:
		lines = infile.read().splitlines()

	assert lines == ["none|0\tleading_eigenvector(max_splits=none)\t"
		"0.5\t1"]


###


def test_sarsa_update_fixed_point(q, actions):
	s, a = State(None, 0), actions[0]
	assert sarsa_update(q, s, a, 0.0, s, a, 0.8, 0.5) == 0.0


def test_sarsa_update_examples(q, actions):
	s, a = State(DetectorId.WALKTRAP, 3), actions[4]

	value = sarsa_update(q, s, a, 0.6, s, a, 0.8, 0.5)
	assert abs(value - 0.48) < 1e-12
	assert abs(q[s, a] - 0.48) < 1e-12

	value = sarsa_update(q, s, a, 0.6, s, a, 0.8, 0.5)
	assert abs(value - 0.768) < 1e-12
	assert int(q.visits[q.state_index(s), 4]) == 2


def test_sarsa_update_next_pair(q, actions):
	s, a = State(None, 0), actions[0]
	s2, a2 = State(DetectorId.MULTILEVEL, 6), actions[-1]
	q[s2, a2] = 0.4

	value = sarsa_update(q, s, a, 0.5, s2, a2, 0.8, 0.5)
	assert abs(value - 0.8 * (0.5 + 0.5 * 0.4)) < 1e-12
	assert q[s2, a2] == 0.4


def test_sarsa_update_no_discount(q, actions):
	s, a = State(None, 0), actions[0]
	assert sarsa_update(q, s, a, 0.37, s, actions[1], 1.0, 0.0) == 0.37


def test_sarsa_update_bound(q, actions):
	random_state = numpy.random.RandomState(0)
	states = q.states()

	for _ in range(10000):
		s = states[random_state.randint(len(states))]
		s2 = states[random_state.randint(len(states))]
		a = actions[random_state.randint(len(actions))]
		a2 = actions[random_state.randint(len(actions))]
		sarsa_update(q, s, a, random_state.uniform(), s2, a2, 0.8, 0.5)

	assert float(q.values.min()) >= 0.0
	assert float(q.values.max()) <= 1.0 / (1 - 0.5)


def test_sarsa_update_raises(q, actions):
	s, a = State(None, 0), actions[0]
	assert_raises(ValueError, sarsa_update, q, s, a, 0.5, s, a, 1.5, 0.5)
	assert_raises(ValueError, sarsa_update, q, s, a, 0.5, s, a, 0.8, -0.1)
	assert_raises(ValueError, sarsa_update, q, s, a, 0.5, s, a, 0.0, 0.5)
	assert_raises(ValueError, sarsa_update, q, s, a, 0.5, s, a, 0.8, 1.0)

	assert sarsa_update(q, s, a, 0.5, s, a, 1.0, 0.0) == 0.5


###


def test_policy_zero_table(q, actions):
	random_state = numpy.random.RandomState(0)
	s = State(None, 0)

	for _ in range(10):
		assert improve_modularity_policy(s, 0.0, 0.0, q, random_state) == \
			actions[0]


def test_policy_unique_max(q, actions):
	random_state = numpy.random.RandomState(0)
	s = State(DetectorId.WALKTRAP, 5)
	q[s, actions[9]] = 0.3
	q[State(None, 0), actions[2]] = 0.9

	for _ in range(10):
		assert improve_modularity_policy(s, 0.0, 0.0, q, random_state) == \
			actions[9]


def test_policy_shift_invariant(q, actions):
	s = State(DetectorId.MULTILEVEL, 2)
	q[s, actions[11]] = 0.25
	a = improve_modularity_policy(s, 0.0, 0.0, q, numpy.random.RandomState(0))

	q.values[q.state_index(s)] += 3.0
	b = improve_modularity_policy(s, 0.0, 0.0, q, numpy.random.RandomState(0))
	assert a == b == actions[11]


def test_policy_uniform(q, actions):
	random_state = numpy.random.RandomState(0)
	s = State(None, 0)

	counts = numpy.zeros(len(actions))
	for _ in range(10000):
		a = improve_modularity_policy(s, 0.0, 1.0, q, random_state)
		counts[q.action_index(a)] += 1

	_, p = scipy.stats.chisquare(counts)
	assert p > 0.01


def test_policy_perturbs_on_reward(q, actions):
	random_state = numpy.random.RandomState(0)
	s = State(None, 0)

	a = improve_modularity_policy(s, 0.5, 0.0, q, random_state)
	assert a == Action(DetectorId.LEADING_EIGENVECTOR, (("max_splits", 16),))


def test_policy_keeps_learned_action(q, actions):
	random_state = numpy.random.RandomState(0)
	s = State(DetectorId.MULTILEVEL, 3)
	q[s, actions[0]] = 0.3

	for _ in range(20):
		assert improve_modularity_policy(s, 0.5, 0.0, q, random_state) == \
			actions[0]


def test_policy_moves_to_better_neighbor(q):
	random_state = numpy.random.RandomState(0)
	s = State(None, 0)
	four = Action(DetectorId.LEADING_EIGENVECTOR, (("max_splits", 4),))
	sixteen = Action(DetectorId.LEADING_EIGENVECTOR, (("max_splits", 16),))
	q[s, sixteen] = 0.2

	for _ in range(20):
		a = improve_modularity_policy(s, 0.5, 1.0, q, random_state,
			[four, sixteen])
		assert a == sixteen

	draws = [improve_modularity_policy(s, 0.0, 1.0, q, random_state,
		[four, sixteen]) for _ in range(20)]
	assert four in draws


def test_policy_masked(q, actions):
	random_state = numpy.random.RandomState(0)
	s = State(None, 0)
	allowed = [a for a in actions if a.detector == DetectorId.MULTILEVEL]

	for _ in range(20):
		a = improve_modularity_policy(s, 0.7, 0.5, q, random_state, allowed)
		assert a in allowed


def test_policy_raises(q):
	random_state = numpy.random.RandomState(0)
	s = State(None, 0)

	assert_raises(ConfigurationError, improve_modularity_policy, s, 0.0, 0.2,
		q, random_state, [])
	assert_raises(ValueError, improve_modularity_policy, s, 0.0, 1.2, q,
		random_state)


###


def test_agent_config_defaults():
	config = AgentConfig()
	assert (config.episodes, config.alpha, config.gamma, config.epsilon) == \
		(50, 0.8, 0.5, 0.2)
	assert config.metric == "qds"
	assert config.validate() is config


def test_agent_config_raises():
	with pytest.raises(ConfigurationError) as e:
		AgentConfig(alpha=0.0, gamma=1.0, epsilon=2.0, metric="x").validate()

	assert e.value.fields == ["alpha", "epsilon", "gamma", "metric"]
	assert_raises(ConfigurationError, AgentConfig(episodes=-1).validate)
	assert_raises(ConfigurationError, AgentConfig(patience=0).validate)


###


def test_environment_step(cliques, actions):
	env = CommunityDetectionEnv(cliques)
	g = env.reset(0)

	reward, partition, refused = env.step(actions[-3], random_state=0)
	assert not refused
	assert abs(reward - score(g, partition, "qds")) < 1e-15


def test_environment_cache(cliques):
	env = CommunityDetectionEnv(cliques)
	env.reset(0)

	action = Action(DetectorId.WALKTRAP, (("walk_length", 4),))
	r1, p1, _ = env.step(action)
	r2, p2, _ = env.step(action)

	assert r1 == r2
	assert p1 is p2


def test_environment_refuses(cliques):
	env = CommunityDetectionEnv(cliques, walktrap_max_nodes=10)
	env.reset(0)

	action = Action(DetectorId.WALKTRAP, (("walk_length", 4),))
	assert env.step(action) == (0.0, None, True)

	only_walktrap = [action]
	assert_raises(ConfigurationError, env.allowed, only_walktrap)


def test_environment_raises(cliques):
	env = CommunityDetectionEnv(cliques)

	assert_raises(ValueError, env.step, enumerate_actions()[0])
	assert_raises(ValueError, env.reset, 1)
	assert_raises(ValueError, CommunityDetectionEnv, [ring_of_cliques(2, 3)])
	assert_raises(ValueError, CommunityDetectionEnv, cliques, "modularity")


###


def test_run_agent_empty(cliques):
	log, q = run_agent(cliques, AgentConfig(episodes=0))

	assert len(log) == 0
	assert log.steps == []
	assert list(log.to_frame().columns) == LOG_COLUMNS
	assert q.values.sum() == 0


def test_run_agent_log(cliques, config):
	log, q = run_agent(cliques, config)

	assert len(log) == config.episodes
	for summary in log.episodes:
		steps = [r for r in log.steps if r.episode == summary.episode]

		assert 1 <= len(steps) <= config.steps_per_episode
		assert len(steps) == summary.steps
		assert_almost_equal(summary.accumulated, sum(r.reward for r in steps))
		assert_almost_equal(summary.best_reward, max(r.reward for r in steps))
		assert [r.step for r in steps] == list(range(len(steps)))


def test_run_agent_rewards(cliques, config):
	log, _ = run_agent(cliques, config)

	for record in log.steps:
		assert not record.refused
		expected = score(cliques[record.snapshot], record.partition, "qds")
		assert record.reward == expected


def test_run_agent_patience(cliques):
	config = AgentConfig(episodes=3, steps_per_episode=50, patience=2,
		seed=0)
	log, _ = run_agent(cliques, config)

	for summary in log.episodes:
		assert summary.steps < 50


def test_run_agent_deterministic(cliques, config):
	log1, q1 = run_agent(cliques, config)
	log2, q2 = run_agent(cliques, config)

	assert log1.to_frame().equals(log2.to_frame())
	assert torch.equal(q1.values, q2.values)


def test_run_agent_snapshot_schedule(config):
	g = erdos_renyi(40, 0.15, random_state=0)
	stream = build_snapshots(g, 3)
	log, _ = run_agent(stream, config)

	assert [e.snapshot for e in log.episodes] == [e * 3 // 6 for e in
		range(6)]


def test_run_agent_q_bound(cliques):
	config = AgentConfig(episodes=10, seed=4)
	log, q = run_agent(cliques, config)

	assert all(0 <= r.reward <= 1 for r in log.steps)
	assert float(q.values.min()) >= 0.0
	assert float(q.values.max()) <= 1.0 / (1 - config.gamma)


def test_run_agent_masked():
	g = ring_of_cliques(3, 4)
	config = AgentConfig(episodes=4, seed=1, epsilon=1.0)
	log, _ = run_agent(SnapshotStream([g]), config, walktrap_max_nodes=5)

	assert all(r.action.detector != DetectorId.WALKTRAP for r in log.steps)


def test_episode_log_csv(tmpdir, cliques, config):
	log, _ = run_agent(cliques, config)
	path = str(tmpdir.join("episodes.csv"))
	log.to_csv(path)

	with open(path) as infile:
		lines = infile.read().splitlines()

	assert lines[0] == "episode,step,state,action,reward,accumulated_reward," \
		"q_value"
	assert len(lines) == len(log.steps) + 1
	assert lines[1].startswith("0,0,none|0,")


def test_episode_log_series(cliques, config):
	log, _ = run_agent(cliques, config)

	assert_almost_equal(log.accumulated_rewards(), [e.accumulated for e in
		log.episodes])
	assert_almost_equal(log.mean_step_rewards(), [e.accumulated / e.steps
		for e in log.episodes])
	assert log.best_episode().best_reward == log.best_rewards().max()
	assert EpisodeLog().best_episode() is None


###


@pytest.mark.slow
def test_planted_cliques():
	g = ring_of_cliques(4, 5)
	stream = SnapshotStream([g])
	truth = numpy.repeat(numpy.arange(4), 5)

	static = max(score(g, detect(g, a, 0), "qds") for a in static_actions())

	hits = 0
	for seed in range(20):
		log, _ = run_agent(stream, AgentConfig(seed=seed))
		best = log.best_episode()

		partition = best.best_partition.numpy()
		if numpy.array_equal(partition, truth) and \
			abs(best.best_reward - static) <= 1e-9:
			hits += 1

	assert hits >= 18


def _last_accumulated(seed):
	g = erdos_renyi(500, 0.02, random_state=0)
	stream = build_snapshots(g, 5)

	means = []
	for epsilon in 0.2, 1.0:
		log, _ = run_agent(stream, AgentConfig(seed=seed, epsilon=epsilon))
		means.append(log.accumulated_rewards()[-10:].mean())

	return means


@pytest.mark.slow
def test_null_model_separation():
	with Pool(4) as pool:
		means = numpy.array(pool.map(_last_accumulated, range(20)))

	_, p = scipy.stats.ttest_rel(means[:, 0], means[:, 1],
		alternative="greater")
	assert p < 0.05
