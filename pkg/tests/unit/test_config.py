import json
import pathlib

import pytest
from pydantic import ValidationError

from kg_transfer.errors import ConfigError
from kg_transfer.parser.loader import load_config, parse_config
from kg_transfer.schema import TrainerConfig, WorldConfig

CONFIGS = pathlib.Path(__file__).parent.parent.parent / "configs"


class TestWorldConfig:
    def test_defaults_match_full_scale(self):
        cfg = WorldConfig()
        assert cfg.num_rooms == 49
        assert cfg.num_objects == 36
        assert cfg.num_inner_walls == 36
        assert cfg.horizon == 100

    def test_too_many_walls(self):
        with pytest.raises(ValidationError, match="num_inner_walls"):
            WorldConfig(grid_length=2, num_static_objects=0, num_moving_objects=0, num_inner_walls=5)

    def test_too_many_objects(self):
        with pytest.raises(ValidationError, match="do not fit"):
            WorldConfig(grid_length=2, num_static_objects=10, num_moving_objects=10,
                        num_inner_walls=0, room_slots=4)

    def test_layout_key_ignores_split(self):
        assert WorldConfig(query_split="train").layout_key() == WorldConfig(query_split="test").layout_key()


class TestTrainerConfig:
    def test_mode_fixes_head_and_graph(self):
        assert (TrainerConfig(mode="global_full").head, TrainerConfig(mode="global_full").graph_mode) == ("global", "full")
        assert (TrainerConfig(mode="local_stm").head, TrainerConfig(mode="local_stm").graph_mode) == ("local", "stm_only")

    def test_warm_start_above_capacity(self):
        with pytest.raises(ValidationError, match="warm_start"):
            TrainerConfig(warm_start=500, replay_capacity=100, batch_size=32)

    def test_epsilon_bounds(self):
        with pytest.raises(ValidationError, match="epsilon_min"):
            TrainerConfig(epsilon_max=0.1, epsilon_min=0.5)


class TestExperimentFile:
    def test_missing_grid_length_names_the_key(self):
        with pytest.raises(ConfigError, match=r"world\.grid_length"):
            parse_config({"world": {"horizon": 10}, "policies": {"transfer": "always"}})

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match=r"trainer\.learning_rate"):
            parse_config({
                "world": {"grid_length": 3, "num_static_objects": 1, "num_moving_objects": 1, "num_inner_walls": 0},
                "trainer": {"learning_rate": 0.1},
                "encoder": {},
            })

    def test_learned_transfer_needs_sections(self):
        with pytest.raises(ConfigError, match="trainer, encoder"):
            parse_config({
                "world": {"grid_length": 3, "num_static_objects": 1, "num_moving_objects": 1, "num_inner_walls": 0},
            })

    def test_json_and_yaml_agree(self, tmp_path):
        raw = {
            "name": "same",
            "world": {"grid_length": 3, "num_static_objects": 1, "num_moving_objects": 1, "num_inner_walls": 2},
            "policies": {"transfer": "novel"},
        }
        (tmp_path / "a.json").write_text(json.dumps(raw))
        (tmp_path / "a.yaml").write_text(
            "name: same\n"
            "world: {grid_length: 3, num_static_objects: 1, num_moving_objects: 1, num_inner_walls: 2}\n"
            "policies: {transfer: novel}\n"
        )
        assert load_config(tmp_path / "a.json") == load_config(tmp_path / "a.yaml")

    def test_unsupported_extension(self, tmp_path):
        path = tmp_path / "config.toml"
        path.write_text("x = 1")
        with pytest.raises(ConfigError, match="Unsupported file extension"):
            load_config(path)

    @pytest.mark.parametrize("name", [
        "full_gcn_local_stm.yaml", "reduced_gcn_local_stm.yaml",
        "reduced_always.yaml", "reduced_novel.yaml", "reduced_random.yaml",
    ])
    def test_shipped_configs_load(self, name):
        config = load_config(CONFIGS / name)
        assert config.world.grid_length in (5, 7)

    def test_variant_labels(self):
        assert load_config(CONFIGS / "reduced_random.yaml").variant == "random(p=0.5)"
        assert load_config(CONFIGS / "reduced_gcn_local_stm.yaml").variant == "gcn+local_stm"
