from .adapter import Adapter, DEFAULT_BATCH_SIZE, DEFAULT_LEARNING_RATE, DEFAULT_WEIGHT_DECAY

__all__ = [
    "Adapter",
    "DEFAULT_BATCH_SIZE",
    "DEFAULT_LEARNING_RATE",
    "DEFAULT_WEIGHT_DECAY",
]

__version__ = "0.1.0"
