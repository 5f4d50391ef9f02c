import numpy as np
import pytest

from fedids import ClassSpec, ConvSpec, Dataset, ModelArch, SyntheticSpec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy_dataset(rng):
    """100 records, 4 features: 80 benign + 20 of attack 1, interleaved."""
    features = rng.normal(size=(100, 4))
    labels = np.zeros(100, dtype=np.int64)
    labels[rng.choice(100, size=20, replace=False)] = 1
    return Dataset(features, labels)


@pytest.fixture
def small_arch():
    """Reduced-width version of the default architecture (4 conv + dropout
    + 2 fully connected) sized for fast tests."""
    return ModelArch(
        input_length=16,
        conv_layers=(ConvSpec(4), ConvSpec(4), ConvSpec(4), ConvSpec(8)),
        dropout_rate=0.5,
        hidden_units=16,
    )


def cluster_mean(feature_count, dims, value):
    mean = [0.0] * feature_count
    for d in dims:
        mean[d] = value
    return tuple(mean)


@pytest.fixture
def overlap_spec():
    """Synthetic plan with a designed-transferable pair: attacks 1 and 2
    share one distribution, attack 3 sits elsewhere."""
    F = 12
    return SyntheticSpec(
        feature_count=F,
        classes=(
            ClassSpec(0, 600, (0.0,) * F, 1.0),
            ClassSpec(1, 80, cluster_mean(F, [0, 1], 3.0), 1.0),
            ClassSpec(2, 80, cluster_mean(F, [0, 1], 3.0), 1.0),
            ClassSpec(3, 80, cluster_mean(F, [4, 5], 3.0), 1.0),
        ),
        overlap=((1, 2),),
    )
