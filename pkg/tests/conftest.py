import numpy as np
import pytest

from radonlab.models import get_model


MODEL_IDS = ["maximal_r5", "maximal_c5", "harmonic_r8", "asymmetric:2"]


@pytest.fixture(scope="session")
def models():
    return {mid: get_model(mid) for mid in MODEL_IDS}


def random_triple(model, rng, scale=1.0):
    """Random incidence triple with the model-appropriate coordinate layout."""
    if model.family == "convolution":
        return model.incidence(
            rng.normal(scale=scale, size=model.k),
            rng.normal(scale=scale, size=model.k),
            rng.normal(scale=scale, size=model.k),
            rng.normal(scale=scale, size=model.n_l),
        )
    if model.family == "asymmetric":
        return model.incidence(
            rng.normal(scale=scale, size=1),
            rng.normal(scale=scale, size=1),
            rng.normal(scale=scale, size=model.d_r),
            rng.normal(scale=scale, size=2 * model.d_r),
        )
    q = model.q
    return model.incidence(
        rng.normal(scale=scale, size=q.d_l),
        rng.normal(scale=scale, size=q.d_l + q.d_r),
        rng.normal(scale=scale, size=q.d_r),
        rng.normal(scale=scale, size=q.ell),
    )
