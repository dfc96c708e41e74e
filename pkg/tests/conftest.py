import numpy as np
import pytest

from conegeom import load_fixture
from conegeom.metric import is_positive_definite, metric_at
from conegeom.tensors import volume

ALL_FIXTURES = [
    "one_param_n1",
    "one_param_n2",
    "quintic_like",
    "one_param_n4",
    "blowup_p2",
    "surface_rank3",
    "torus_det",
    "synthetic_n3_a",
    "synthetic_n3_b",
]

SURFACE_FIXTURES = ["one_param_n2", "blowup_p2", "surface_rank3", "torus_det"]


@pytest.fixture(scope="session")
def fixture_files():
    return {name: load_fixture(name) for name in ALL_FIXTURES}


def anchor_of(tensor_file):
    return np.asarray(tensor_file.metadata["kahler_points"][0], dtype=float)


def random_interior_point(tensor, anchor, rng, spread=0.2, require_pd=True, tries=200):
    """Rejection-sample one point near the anchor with Vol > 0 (and g > 0)."""
    scale = spread * np.linalg.norm(anchor) / np.sqrt(tensor.N)
    for _ in range(tries):
        candidate = anchor + scale * rng.normal(size=tensor.N)
        if volume(tensor, candidate) <= 0:
            continue
        if require_pd and not is_positive_definite(metric_at(tensor, candidate).g):
            continue
        return candidate
    raise AssertionError("sampler failed to find an interior point")
