import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from switchcount.models import ModelSpec, ParamSet
from switchcount.panel import PanelData, simulate_panel


@pytest.fixture
def tiny_panel():
    """2 segments x 2 periods, one covariate beyond the intercept."""
    counts = np.array([[0, 1], [2, 0]])
    cov = np.ones((2, 2, 2))
    cov[:, :, 1] = [[0.5, -1.0], [1.5, 0.0]]
    return PanelData(counts=counts, covariates=cov,
                     variable_names=["intercept", "x1"],
                     segment_ids=[0, 1], period_ids=[0, 1])


@pytest.fixture
def msnb_small():
    """N=3, T=5 switching panel with known truth, small enough to enumerate."""
    spec = ModelSpec.from_name("msnb")
    rng = np.random.default_rng(10)
    truth = ParamSet(
        beta=np.array([0.8, 0.4]),
        log_alpha=np.log(0.3),
        transitions=rng.uniform(0.2, 0.8, size=(3, 2)),
    )
    panel, states = simulate_panel(spec, truth, 3, 5, seed=11)
    return spec, truth, panel, states
