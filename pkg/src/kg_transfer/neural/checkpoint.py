from __future__ import annotations

import logging
import pathlib
from typing import Any

import torch

from ..errors import CheckpointError
from ..model.vocab import Vocabulary
from .qnet import TransferQNetwork

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def save_checkpoint(
    path: str | pathlib.Path,
    network: TransferQNetwork,
    vocab: Vocabulary,
    meta: dict[str, Any] | None = None,
) -> None:
    payload = {
        "format_version": FORMAT_VERSION,
        "hparams": dict(network.hparams),
        "dtype": str(network.dtype).removeprefix("torch."),
        "vocab": vocab.to_dict(),
        "shapes": {k: list(v.shape) for k, v in network.state_dict().items()},
        "state_dict": network.state_dict(),
        "meta": meta or {},
    }
    torch.save(payload, pathlib.Path(path))
    logger.info("checkpoint written to %s", path)


def load_checkpoint(
    path: str | pathlib.Path,
    vocab: Vocabulary | None = None,
) -> tuple[TransferQNetwork, dict[str, Any]]:
    """
    Rebuild the network stored at path.

    With vocab given, the stored vocabulary must match it label for label.
    Any parameter whose shape disagrees with the rebuilt network is rejected.
    """
    path = pathlib.Path(path)
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as exc:
        raise CheckpointError(f"Cannot read checkpoint '{path}': {exc}") from exc

    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"Checkpoint '{path}' has format version {version}; expected {FORMAT_VERSION}"
        )
    stored_vocab = Vocabulary.from_dict(payload["vocab"])
    if vocab is not None and stored_vocab.to_dict() != vocab.to_dict():
        raise CheckpointError(
            f"Checkpoint '{path}' was trained on a different vocabulary "
            f"({len(stored_vocab.entities)} entities / {len(stored_vocab.relations)} relations vs "
            f"{len(vocab.entities)} / {len(vocab.relations)})"
        )

    hp = payload["hparams"]
    network = TransferQNetwork(
        num_entities=len(stored_vocab.entities),
        num_relations=len(stored_vocab.relations),
        kind=hp["kind"], dim=hp["dim"], layers=hp["layers"], num_bases=hp["num_bases"],
        hidden=hp["hidden"], seed=hp["seed"], dtype=payload["dtype"],
    )
    expected = {k: list(v.shape) for k, v in network.state_dict().items()}
    state = payload["state_dict"]
    if set(state) != set(expected):
        raise CheckpointError(
            f"Checkpoint '{path}' parameters do not match a {hp['kind']} network: "
            f"missing {sorted(set(expected) - set(state))}, unexpected {sorted(set(state) - set(expected))}"
        )
    for name, shape in expected.items():
        if list(state[name].shape) != shape:
            raise CheckpointError(
                f"Checkpoint '{path}': parameter '{name}' has shape {list(state[name].shape)}, expected {shape}"
            )
    network.load_state_dict(state)
    return network, payload.get("meta", {})
