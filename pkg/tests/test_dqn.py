"""From-scratch DQN: forward pass, exact gradients, training mechanics, I/O."""

import numpy as np
import pytest

from magrid.agents import Transition
from magrid.errors import ContractError, ModelIOError
from magrid.models import DqnLearner, EpsilonSchedule, Mlp, mlp_forward
from magrid.models.io import read_layers, write_layers, write_records, read_records
from magrid.observations import Observation
from magrid.rng import make_rng


def obs_vec(vec) -> Observation:
    return Observation(grid=np.asarray(vec, dtype=np.float32).reshape(1, 1, -1))


class TestMlpForward:
    def test_all_zero_weights_give_zero_output(self):
        net = Mlp([3, 4, 2], make_rng(0))
        for w in net.weights:
            w[:] = 0.0
        assert (net.forward(np.array([1.0, -2.0, 3.0])) == 0.0).all()

    def test_identity_single_layer(self):
        net = Mlp([3, 3], make_rng(0))
        net.weights[0][:] = np.eye(3)
        net.biases[0][:] = 0.0
        x = np.array([0.3, -1.5, 2.0])
        assert np.allclose(net.forward(x), x, atol=0)

    def test_fixed_seed_fixed_input_frozen_values(self):
        # Oracle: plain-Python loop evaluation of the same seeded net
        # (see scripts/notes in tests); values frozen to 1e-12.
        net = Mlp([3, 4, 2], make_rng(123))
        out = net.forward(np.array([0.5, -1.0, 2.0]))
        expected = np.array([1.3044550976591085, -0.5619333404526916])
        assert np.abs(out - expected).max() <= 1e-12

    def test_reconstruction_is_deterministic(self):
        a = Mlp([5, 8, 3], make_rng(7)).forward(np.linspace(-1, 1, 5))
        b = Mlp([5, 8, 3], make_rng(7)).forward(np.linspace(-1, 1, 5))
        assert np.abs(a - b).max() <= 1e-12

    def test_shape_mismatch_is_contract_error(self):
        net = Mlp([3, 2], make_rng(0))
        with pytest.raises(ContractError):
            net.forward(np.zeros(4))

    def test_mlp_forward_wrapper(self):
        net = Mlp([2, 2], make_rng(1))
        x = np.array([1.0, 2.0])
        assert np.array_equal(mlp_forward(net, x), net.forward(x))


def _batch_loss(net: Mlp, states, actions, targets) -> float:
    q = net.forward(states)
    picked = q[np.arange(len(actions)), actions]
    return float(np.mean((picked - targets) ** 2))


class TestGradientCheck:
    def test_analytic_matches_central_differences(self):
        # Fixed 8-sample batch, h = 1e-5, max relative error <= 1e-4.
        rng = make_rng(2024)
        net = Mlp([6, 8, 3], rng)
        states = rng.normal(size=(8, 6))
        actions = rng.integers(0, 3, size=8)
        targets = rng.normal(size=8)

        q, acts = net.forward_cached(states)
        err = q[np.arange(8), actions] - targets
        d_out = np.zeros_like(q)
        d_out[np.arange(8), actions] = 2.0 * err / 8
        analytic = net.gradients(acts, d_out)

        h = 1e-5
        max_rel = 0.0
        for layer in range(net.n_layers):
            for arr, grad in ((net.weights[layer], analytic[layer][0]),
                              (net.biases[layer], analytic[layer][1])):
                flat = arr.reshape(-1)
                gflat = np.asarray(grad).reshape(-1)
                for i in range(flat.size):
                    keep = flat[i]
                    flat[i] = keep + h
                    up = _batch_loss(net, states, actions, targets)
                    flat[i] = keep - h
                    down = _batch_loss(net, states, actions, targets)
                    flat[i] = keep
                    fd = (up - down) / (2 * h)
                    rel = abs(fd - gflat[i]) / max(abs(fd), abs(gflat[i]), 1e-8)
                    max_rel = max(max_rel, rel)
        assert max_rel <= 1e-4


def transition(s, a, r, ns, done):
    return Transition(obs_vec(s), a, r, obs_vec(ns), done)


class TestTrainStep:
    def make_learner(self, **kw):
        defaults = dict(
            obs_dim=4, action_count=2, hidden=(8,), lr=1e-3, gamma=0.9,
            batch_size=4, buffer_capacity=100, sync_interval=3, seed=5,
            epsilon=EpsilonSchedule(0.0, 0.0, 1.0),
        )
        defaults.update(kw)
        return DqnLearner(**defaults)

    def test_short_buffer_skips(self):
        learner = self.make_learner()
        learner.observe_transition(transition([1, 0, 0, 0], 0, 1.0, [0, 1, 0, 0], True))
        assert learner.train_step() is None
        assert learner.train_counter == 0

    def test_terminal_mse_loss_equals_one(self):
        # Single transition, done, r=1, Q(s)[a]=0: loss is 1.0 pre-update.
        learner = self.make_learner(batch_size=1, lr=1e-9)
        for w in learner.online.weights:
            w[:] = 0.0
        learner.target.copy_from(learner.online)
        learner.observe_transition(transition([1, 0, 0, 0], 0, 1.0, [0, 1, 0, 0], True))
        assert learner.train_step() == pytest.approx(1.0)

    def test_terminal_target_ignores_next_state_values(self):
        learner = self.make_learner(batch_size=1, lr=0.5, gamma=0.9)
        for w in learner.online.weights:
            w[:] = 0.0
        learner.target.copy_from(learner.online)
        learner.target.biases[-1][:] = 100.0  # would dominate if bootstrapped
        learner.observe_transition(transition([1, 0, 0, 0], 0, 1.0, [0, 1, 0, 0], True))
        assert learner.train_step() == pytest.approx(1.0)

    def test_target_lags_online_between_syncs(self):
        learner = self.make_learner(sync_interval=3, batch_size=2, lr=0.1)
        for i in range(4):
            learner.observe_transition(
                transition([1, 0, 0, 0], i % 2, 1.0, [0, 1, 0, 0], False)
            )
        x = np.ones(4)
        before = learner.target.forward(x).copy()
        learner.train_step()  # counter 1
        learner.train_step()  # counter 2
        assert np.array_equal(learner.target.forward(x), before)
        online_now = learner.online.forward(x)
        assert not np.array_equal(online_now, before)
        learner.train_step()  # counter 3 -> sync
        assert np.array_equal(
            learner.target.forward(x), learner.online.forward(x)
        )

    def test_training_reduces_loss_on_fixed_fact(self):
        learner = self.make_learner(batch_size=4, lr=0.05, sync_interval=1000)
        for _ in range(8):
            learner.observe_transition(transition([1, 0, 0, 0], 0, 1.0, [0, 1, 0, 0], True))
        first = learner.train_step()
        for _ in range(200):
            last = learner.train_step()
        assert last < first


class TestPersistence:
    def test_mlp_save_load_round_trip(self, tmp_path):
        path = tmp_path / "net.gwml"
        learner = DqnLearner(4, 2, hidden=(6,), seed=9)
        learner.save(path)
        other = DqnLearner(4, 2, hidden=(6,), seed=1)
        other.load(path)
        x = np.linspace(0, 1, 4)
        assert np.array_equal(other.online.forward(x), learner.online.forward(x))
        assert np.array_equal(other.target.forward(x), learner.online.forward(x))

    def test_layer_container_round_trip(self, tmp_path):
        path = tmp_path / "layers.gwml"
        rng = make_rng(3)
        layers = [(rng.normal(size=(3, 4)), rng.normal(size=4)),
                  (rng.normal(size=(4, 2)), rng.normal(size=2))]
        write_layers(path, layers)
        loaded = read_layers(path)
        for (w, b), (w2, b2) in zip(layers, loaded):
            assert np.array_equal(w, w2)
            assert np.array_equal(b, b2)

    def test_record_container_round_trip_is_sorted(self, tmp_path):
        path = tmp_path / "table.gwml"
        records = {b"zz": np.array([1.0, 2.0]), b"aa": np.array([3.0, 4.0])}
        write_records(path, records)
        loaded = read_records(path)
        assert set(loaded) == {b"aa", b"zz"}
        assert np.array_equal(loaded[b"zz"], [1.0, 2.0])
        raw = path.read_bytes()
        assert raw[:4] == b"GWML"
        assert raw.index(b"aa") < raw.index(b"zz")

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.gwml"
        path.write_bytes(b"NOPE" + bytes(8))
        with pytest.raises(ModelIOError, match="magic"):
            read_layers(path)

    def test_truncation_rejected(self, tmp_path):
        path = tmp_path / "short.gwml"
        write_layers(path, [(np.zeros((2, 2)), np.zeros(2))])
        data = path.read_bytes()
        path.write_bytes(data[:-4])
        with pytest.raises(ModelIOError, match="truncated"):
            read_layers(path)

    def test_qtable_save_load(self, tmp_path):
        from magrid.models import QTableLearner

        path = tmp_path / "q.gwml"
        learner = QTableLearner(3)
        learner.q_values(b"k1")[:] = [1.0, 2.0, 3.0]
        learner.q_values(b"k0")[:] = [-1.0, 0.0, 1.0]
        learner.save(path)
        fresh = QTableLearner(3)
        fresh.load(path)
        assert np.array_equal(fresh.q_values(b"k1"), [1.0, 2.0, 3.0])
        assert np.array_equal(fresh.q_values(b"k0"), [-1.0, 0.0, 1.0])
