import pytest

from magrid.world import EntityKind, GridWorld, Layer, Vocabulary

# A minimal vocabulary shared by engine-level tests: ground empty/wall/gem,
# actor empty/agent/other.
VOCAB = Vocabulary([
    EntityKind(0, "empty", ".", Layer.GROUND),
    EntityKind(1, "wall", "#", Layer.GROUND, passable=False),
    EntityKind(2, "gem", "*", Layer.GROUND, contact_reward=10.0, consumed_on_contact=True),
    EntityKind(3, "vacant", "_", Layer.ACTOR),
    EntityKind(4, "agent", "A", Layer.ACTOR),
    EntityKind(5, "agent_other", "B", Layer.ACTOR),
])


@pytest.fixture
def vocab() -> Vocabulary:
    return VOCAB


def make_world(height=5, width=5, seed=0, vocab=VOCAB) -> GridWorld:
    return GridWorld(height, width, vocab, seed=seed)


@pytest.fixture
def world() -> GridWorld:
    return make_world()
