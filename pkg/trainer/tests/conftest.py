import numpy as np
import pytest
from PIL import Image


def _toy_image(rng, base_rgb, size=100):
    arr = rng.integers(0, 40, (size, size, 3)).astype(np.int16)
    arr += np.asarray(base_rgb, dtype=np.int16)
    return np.clip(arr, 0, 255).astype(np.uint8)


@pytest.fixture(scope="session")
def toy_dataset(tmp_path_factory):
    """10 easily separable images: 4 street, 3 pedestrian, 3 biker."""
    root = tmp_path_factory.mktemp("toy_dataset")
    rng = np.random.default_rng(0)
    plan = [
        ("street", (110, 110, 110), 4),
        ("pedestrian", (200, 60, 60), 3),
        ("biker", (60, 60, 200), 3),
    ]
    for name, base, count in plan:
        folder = root / name
        folder.mkdir()
        for i in range(count):
            Image.fromarray(_toy_image(rng, base)).save(folder / f"{name}_{i}.png")
    return root
