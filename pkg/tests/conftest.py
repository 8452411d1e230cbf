import numpy as np
import pytest
from hypothesis import settings

from hyperlat import StreamKey

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture
def key():
    return StreamKey(master_seed=20260809)


def zscore(estimate: float, truth: float, stderr: float) -> float:
    return abs(estimate - truth) / stderr


def mc_mean(values: np.ndarray) -> tuple[float, float]:
    """Sample mean and its standard error."""
    v = np.asarray(values, dtype=np.float64)
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(len(v)))
