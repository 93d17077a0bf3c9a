"""Agent transition loop: action semantics, facing, rewards, model delivery."""

import pytest

from magrid.agents import ActionSpec, Agent, agent_turn, apply_action
from magrid.errors import ConfigError, ContractError
from magrid.models import ScriptedPolicy
from magrid.observations import EGOCENTRIC, MULTI_HOT, ObservationSpec
from magrid.world import Coord, EntityInstance, Facing, Layer

from conftest import VOCAB, make_world

ACTIONS = ("up", "down", "left", "right", "noop")
NOOP = ACTIONS.index("noop")


def make_agent(world, at=Coord(2, 2), agent_id=0, bump=-0.1, radius=1):
    spec = ObservationSpec(VOCAB, EGOCENTRIC, radius, MULTI_HOT)
    aspec = ActionSpec(ACTIONS, bump_penalty=bump)
    world.add(at, Layer.ACTOR, EntityInstance(VOCAB.code_of("agent"), agent_id))
    return Agent(agent_id, at, Facing.N, spec, aspec)


class TestApplyAction:
    def test_move_onto_gem_consumes_and_rewards(self):
        w = make_world()
        a = make_agent(w)
        w.add(Coord(2, 3), Layer.GROUND, EntityInstance(VOCAB.code_of("gem")))
        reward = apply_action(w, a, ACTIONS.index("right"))
        assert reward == 10.0
        assert a.pos == Coord(2, 3)
        assert a.facing == Facing.E
        assert w.observe(Coord(2, 3), Layer.GROUND).code == VOCAB.ground_empty
        assert a.score == 10.0

    def test_bump_into_wall(self):
        w = make_world()
        a = make_agent(w)
        w.add(Coord(1, 2), Layer.GROUND, EntityInstance(VOCAB.code_of("wall")))
        reward = apply_action(w, a, ACTIONS.index("up"))
        assert reward == pytest.approx(-0.1)
        assert a.pos == Coord(2, 2)
        assert a.facing == Facing.N  # facing updates even when blocked

    def test_noop_changes_nothing(self):
        w = make_world()
        a = make_agent(w)
        before = w.content_hash()
        reward = apply_action(w, a, NOOP)
        assert reward == 0.0
        assert w.content_hash() == before

    def test_out_of_range_action_is_contract_error(self):
        w = make_world()
        a = make_agent(w)
        with pytest.raises(ContractError, match="agent 0"):
            apply_action(w, a, len(ACTIONS))

    def test_bump_on_world_edge(self):
        w = make_world()
        a = make_agent(w, at=Coord(0, 2))
        reward = apply_action(w, a, ACTIONS.index("up"))
        assert reward == pytest.approx(-0.1)
        assert a.pos == Coord(0, 2)

    def test_blocked_by_other_agent(self):
        w = make_world()
        a = make_agent(w, at=Coord(2, 2), agent_id=0)
        make_agent(w, at=Coord(2, 3), agent_id=1)
        reward = apply_action(w, a, ACTIONS.index("right"))
        assert reward == pytest.approx(-0.1)
        assert a.pos == Coord(2, 2)

    def test_clean_without_handler_is_contract_error(self):
        w = make_world()
        spec = ObservationSpec(VOCAB, EGOCENTRIC, 1, MULTI_HOT)
        aspec = ActionSpec(("up", "clean", "noop"))
        w.add(Coord(2, 2), Layer.ACTOR, EntityInstance(VOCAB.code_of("agent"), 0))
        a = Agent(0, Coord(2, 2), Facing.N, spec, aspec)
        with pytest.raises(ContractError, match="clean"):
            apply_action(w, a, 1)

    def test_leaves_behind_restores_named_kind(self):
        # A consumable that restores a wall behind it (exercises the
        # leaves_behind path the cleanup apples use).
        from magrid.world import EntityKind, Vocabulary

        vocab = Vocabulary([
            EntityKind(0, "empty", ".", Layer.GROUND),
            EntityKind(1, "wall", "#", Layer.GROUND, passable=False),
            EntityKind(2, "fruit", "o", Layer.GROUND, contact_reward=1.0,
                       consumed_on_contact=True, leaves_behind=0),
            EntityKind(3, "vacant", "_", Layer.ACTOR),
            EntityKind(4, "agent", "A", Layer.ACTOR),
            EntityKind(5, "agent_other", "B", Layer.ACTOR),
        ])
        w = make_world(vocab=vocab)
        w.add(Coord(2, 3), Layer.GROUND, EntityInstance(2))
        w.add(Coord(2, 2), Layer.ACTOR, EntityInstance(4, 0))
        a = Agent(0, Coord(2, 2), Facing.N,
                  ObservationSpec(vocab, EGOCENTRIC, 1, MULTI_HOT),
                  ActionSpec(ACTIONS))
        reward = apply_action(w, a, ACTIONS.index("right"))
        assert reward == 1.0
        assert w.observe(Coord(2, 3), Layer.GROUND).code == 0


class TestAgentTurn:
    def test_noop_turn_in_static_world(self):
        w = make_world()
        a = make_agent(w)
        a.model = ScriptedPolicy((), fallback=NOOP)
        t = agent_turn(w, a, is_last_turn=False)
        assert t.action == NOOP
        assert t.reward == 0.0
        assert t.state == t.next_state
        assert t.done is False

    def test_last_turn_sets_done(self):
        w = make_world()
        a = make_agent(w)
        a.model = ScriptedPolicy((), fallback=NOOP)
        t = agent_turn(w, a, is_last_turn=True)
        assert t.done is True
        assert a.done is True

    def test_bad_model_index_names_agent(self):
        w = make_world()
        a = make_agent(w, agent_id=7)

        class Bad:
            def take_action(self, obs):
                return len(ACTIONS)

        a.model = Bad()
        with pytest.raises(ContractError, match="agent 7"):
            agent_turn(w, a, is_last_turn=False)

    def test_transition_delivered_to_model(self):
        w = make_world()
        a = make_agent(w)
        seen = []

        class Probe(ScriptedPolicy):
            def observe_transition(self, transition):
                seen.append(transition)

        a.model = Probe((), fallback=NOOP)
        t = agent_turn(w, a, is_last_turn=False)
        assert seen == [t]

    def test_next_state_is_pre_dynamics_post_action(self):
        w = make_world()
        a = make_agent(w)
        w.add(Coord(2, 3), Layer.GROUND, EntityInstance(VOCAB.code_of("gem")))
        a.model = ScriptedPolicy((ACTIONS.index("right"),), fallback=NOOP)
        t = agent_turn(w, a, is_last_turn=False)
        # the gem is gone in next_state and the agent sees itself centered
        gem = VOCAB.code_of("gem")
        assert t.state.grid[1, 2, gem] == 1.0
        assert t.next_state.grid[1, 1, gem] == 0.0

    def test_score_accumulates_transition_rewards(self):
        w = make_world(7, 7)
        a = make_agent(w, at=Coord(3, 3), bump=-0.1)
        script = [ACTIONS.index(n) for n in ("up", "up", "up", "left", "noop")]
        a.model = ScriptedPolicy(script, fallback=NOOP)
        rewards = [agent_turn(w, a, False).reward for _ in range(5)]
        assert a.score == pytest.approx(sum(rewards))


class TestActionSpec:
    def test_duplicate_names_rejected(self):
        with pytest.raises(ConfigError):
            ActionSpec(("up", "up"))

    def test_unknown_name_rejected(self):
        with pytest.raises(ConfigError):
            ActionSpec(("up", "fly"))

    def test_index_of(self):
        spec = ActionSpec(ACTIONS)
        assert spec.index_of("noop") == NOOP
        with pytest.raises(ConfigError):
            spec.index_of("clean")
