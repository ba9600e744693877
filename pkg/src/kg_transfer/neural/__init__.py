from .tensorize import GraphBatch, batch_graphs, tensorize
from .encoders import (
    ENCODER_REGISTRY, GCNEncoder, GraphEncoder, RGCNEncoder, StarELiteEncoder,
    get_encoder, scatter_mean,
)
from .qnet import DTYPES, TransferQNetwork, compute_gradients, parameter_count
from .checkpoint import FORMAT_VERSION, load_checkpoint, save_checkpoint
from .gradcheck import check_gradients

__all__ = [
    "GraphBatch",
    "batch_graphs",
    "tensorize",
    "ENCODER_REGISTRY",
    "GCNEncoder",
    "GraphEncoder",
    "RGCNEncoder",
    "StarELiteEncoder",
    "get_encoder",
    "scatter_mean",
    "DTYPES",
    "TransferQNetwork",
    "compute_gradients",
    "parameter_count",
    "FORMAT_VERSION",
    "load_checkpoint",
    "save_checkpoint",
    "check_gradients",
]
