import numpy as np
import pytest

from focusextend import cell_texture


@pytest.fixture
def blob_texture():
    """Deterministic 64x64 cell-wall style texture."""
    return cell_texture((64, 64), seed=5, scale=2.5)


@pytest.fixture
def blob_texture_256():
    return cell_texture((256, 256), seed=1, scale=2.5)


@pytest.fixture
def white_noise():
    return np.random.default_rng(42).random((64, 64))


@pytest.fixture
def smooth_texture():
    """Low-pass 64x64 texture with negligible energy near Nyquist."""
    from scipy.ndimage import gaussian_filter
    raw = gaussian_filter(np.random.default_rng(5).random((64, 64)), 1.5,
                          mode="wrap")
    return (raw - raw.min()) / (raw.max() - raw.min())
