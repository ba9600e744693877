from __future__ import annotations

from typing import Callable

import torch
from torch.func import functional_call

from .qnet import TransferQNetwork
from .tensorize import GraphBatch


def check_gradients(
    network: TransferQNetwork,
    batch: GraphBatch,
    head: str = "local",
    output: Callable[[torch.Tensor], torch.Tensor] | None = None,
    eps: float = 1e-5,
    rtol: float = 1e-4,
    atol: float = 1e-7,
) -> bool:
    """
    Compare autograd against central finite differences for every parameter.

    The network must be float64. output maps the per-item Q matrix to the
    checked quantity (default: the matrix itself). Raises on disagreement.
    """
    if network.dtype != torch.float64:
        raise ValueError("Finite-difference checks need a float64 network")
    names = [n for n, _ in network.named_parameters()]
    params = tuple(p.detach().clone().requires_grad_(True) for _, p in network.named_parameters())

    def fn(*flat: torch.Tensor) -> torch.Tensor:
        q = functional_call(network, dict(zip(names, flat)), (batch,), {"head": head})
        return output(q) if output is not None else q

    return torch.autograd.gradcheck(fn, params, eps=eps, rtol=rtol, atol=atol)
