from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Split = Literal["train", "test"]
TransferMode = Literal["local_full", "local_stm", "global_full", "global_stm"]


class WorldConfig(BaseModel):
    """Room world layout and episode length. Layout is a pure function of world_seed."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    grid_length:        int = Field(7, ge=2)
    num_static_objects: int = Field(18, ge=0)
    num_moving_objects: int = Field(18, ge=0)
    num_inner_walls:    int = Field(36, ge=0)
    horizon:            int = Field(100, ge=1)
    world_seed:         int = Field(0, ge=0)
    query_split:        Split = "train"
    room_slots:         int = Field(4, ge=1)

    @property
    def num_rooms(self) -> int:
        return self.grid_length * self.grid_length

    @property
    def num_objects(self) -> int:
        return self.num_static_objects + self.num_moving_objects

    @property
    def interior_edges(self) -> int:
        return 2 * self.grid_length * (self.grid_length - 1)

    @model_validator(mode="after")
    def _check_feasible(self) -> "WorldConfig":
        if self.num_objects > self.num_rooms * self.room_slots:
            raise ValueError(
                f"{self.num_objects} objects do not fit in {self.num_rooms} rooms "
                f"with room_slots={self.room_slots}"
            )
        if self.num_inner_walls > self.interior_edges:
            raise ValueError(
                f"num_inner_walls={self.num_inner_walls} exceeds the "
                f"{self.interior_edges} interior edges of a {self.grid_length}x{self.grid_length} grid"
            )
        return self

    def layout_key(self) -> dict:
        """Everything except the query split: two configs with equal keys share a layout."""
        return self.model_dump(exclude={"query_split"})


class WorldSection(WorldConfig):
    """WorldConfig as written in an experiment file: grid_length must be stated."""

    grid_length: int = Field(ge=2)


class TrainerConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode:                   TransferMode = "local_stm"
    gamma:                  float = Field(0.95, gt=0.0, le=1.0)
    lr:                     float = Field(1e-4, gt=0.0)
    optimizer:              Literal["sgd", "adam"] = "sgd"
    target_update_interval: int = Field(50, ge=1)
    total_iterations:       int = Field(20_000, ge=1)
    epsilon_max:            float = Field(1.0, ge=0.0, le=1.0)
    epsilon_min:            float = Field(0.01, ge=0.0, le=1.0)
    epsilon_decay_iters:    int = Field(10_000, ge=1)
    double_dqn:             bool = True
    grad_clip_value:        float = Field(10.0, gt=0.0)
    replay_capacity:        int = Field(20_000, ge=1)
    warm_start:             int = Field(2_000, ge=1)
    batch_size:             int = Field(32, ge=1)
    reshuffle_matching:     bool = False
    dtype:                  Literal["float32", "float64"] = "float32"
    seeds:                  list[int] = Field(default_factory=lambda: [0, 5, 10, 15, 20], min_length=1)

    @model_validator(mode="after")
    def _check_schedule(self) -> "TrainerConfig":
        if self.epsilon_min > self.epsilon_max:
            raise ValueError(
                f"epsilon_min ({self.epsilon_min}) is larger than epsilon_max ({self.epsilon_max})"
            )
        if self.batch_size > self.warm_start:
            raise ValueError(
                f"batch_size ({self.batch_size}) must not exceed warm_start ({self.warm_start})"
            )
        if self.warm_start > self.replay_capacity:
            raise ValueError(
                f"warm_start ({self.warm_start}) must not exceed replay_capacity ({self.replay_capacity})"
            )
        return self

    @property
    def head(self) -> Literal["local", "global"]:
        return "local" if self.mode.startswith("local") else "global"

    @property
    def graph_mode(self) -> Literal["stm_only", "full"]:
        return "stm_only" if self.mode.endswith("stm") else "full"


class EncoderConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind:      Literal["gcn", "rgcn", "stare_lite"] = "gcn"
    dim:       int = Field(16, ge=1)
    layers:    int = Field(2, ge=0)
    num_bases: int = Field(20, ge=1)
    hidden:    int = Field(16, ge=1)


class PoliciesConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    qa:       Literal["mra", "mru", "mfu"] = "mru"
    eviction: Literal["fifo", "lru", "lfu"] = "lru"
    transfer: Literal["always", "novel", "random", "learned"] = "learned"
    random_p: float = Field(0.5, ge=0.0, le=1.0)
    capacity: int = Field(128, ge=1)


class EvaluationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    episodes:    int = Field(10, ge=1)
    splits:      list[Split] = Field(default_factory=lambda: ["train", "test"], min_length=1)
    write_trace: bool = False


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory:          str = "runs/default"
    decision_log:       bool = True
    moving_avg_window:  int = Field(10, ge=1)


class ExperimentConfig(BaseModel):
    """One experiment file: sections world / trainer / encoder / policies / evaluation / output."""

    model_config = ConfigDict(extra="forbid")

    name:       str = "experiment"
    world:      WorldSection
    trainer:    TrainerConfig    = Field(default_factory=TrainerConfig)
    encoder:    EncoderConfig    = Field(default_factory=EncoderConfig)
    policies:   PoliciesConfig   = Field(default_factory=PoliciesConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    output:     OutputConfig     = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def _check_learned_sections(self) -> "ExperimentConfig":
        if self.policies.transfer == "learned":
            missing = [k for k in ("trainer", "encoder") if k not in self.model_fields_set]
            if missing:
                raise ValueError(
                    f"policies.transfer='learned' requires the section(s): {', '.join(missing)}"
                )
        return self

    @property
    def seeds(self) -> list[int]:
        return list(self.trainer.seeds)

    @property
    def variant(self) -> str:
        """Row label used in comparison tables."""
        p = self.policies
        if p.transfer == "learned":
            return f"{self.encoder.kind}+{self.trainer.mode}"
        if p.transfer == "random":
            return f"random(p={p.random_p:g})"
        return p.transfer
