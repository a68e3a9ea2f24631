from .checkpoint import load_container, save_container
from .network import BatchNorm, Dense, LeakyReLU, MlpNetwork
from .optim import Adam, CosineDecay

__all__ = [
    "Adam", "BatchNorm", "CosineDecay", "Dense", "LeakyReLU", "MlpNetwork",
    "load_container", "save_container",
]
