# Shared fixtures and configuration for pytest
import pathlib

import pytest

from kg_transfer.env.room_env import RoomEnv
from kg_transfer.model.vocab import Vocabulary
from kg_transfer.parser.loader import parse_config
from kg_transfer.schema.config_schema import WorldConfig

CONFIGS = pathlib.Path(__file__).parent.parent / "configs"


@pytest.fixture
def small_world() -> WorldConfig:
    """3x3 grid, a few objects and walls, short episodes."""
    return WorldConfig(
        grid_length=3,
        num_static_objects=2,
        num_moving_objects=2,
        num_inner_walls=3,
        horizon=12,
        world_seed=7,
    )


@pytest.fixture
def small_env(small_world) -> RoomEnv:
    return RoomEnv(small_world)


@pytest.fixture
def toy_vocab() -> Vocabulary:
    return Vocabulary.for_world(["playroom", "kitchen", "office"], ["table", "john"])


@pytest.fixture
def tiny_experiment():
    """Learned-transfer experiment small enough to train in seconds."""
    def make(**trainer_overrides):
        trainer = {
            "mode": "local_stm",
            "total_iterations": 40,
            "warm_start": 8,
            "replay_capacity": 64,
            "batch_size": 4,
            "epsilon_decay_iters": 20,
            "target_update_interval": 5,
            "lr": 1e-2,
            "seeds": [0],
        }
        trainer.update(trainer_overrides)
        return parse_config({
            "name": "tiny",
            "world": {
                "grid_length": 3,
                "num_static_objects": 2,
                "num_moving_objects": 2,
                "num_inner_walls": 3,
                "horizon": 10,
                "world_seed": 3,
            },
            "trainer": trainer,
            "encoder": {"kind": "gcn", "dim": 4, "layers": 1, "num_bases": 2, "hidden": 4},
            "policies": {"capacity": 8},
            "evaluation": {"episodes": 2, "splits": ["test"]},
        })
    return make


@pytest.fixture
def configs_dir() -> pathlib.Path:
    return CONFIGS
