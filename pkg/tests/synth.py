"""Synthetic labeled-cluster generators for classifier tests."""

import numpy as np

from relprobe.classifiers import LabeledItem, LabeledVectors


def make_separable(n_per_class=10, n_classes=3, dim=4, margin_sigmas=5.0, sigma=1.0,
                   seed=0, clip=1.25):
    """Gaussian clusters with pairwise center distance margin_sigmas * sigma.

    Centers sit on scaled coordinate axes so the margin is exact. Noise
    coordinates are truncated at clip * sigma (rejection sampling), which
    keeps the classes strictly separable: the worst-case projection onto any
    center-difference direction is sqrt(2) * clip * sigma, below the
    midplane at margin_sigmas / 2 for the defaults.
    """
    assert dim >= n_classes
    rng = np.random.default_rng(seed)
    scale = margin_sigmas * sigma / np.sqrt(2.0)

    def truncated_noise():
        while True:
            n = rng.normal(scale=sigma, size=dim)
            if np.all(np.abs(n) <= clip * sigma):
                return n

    items = []
    for c in range(n_classes):
        center = np.zeros(dim)
        center[c] = scale
        for i in range(n_per_class):
            items.append(LabeledItem(f"w{c}_{i}", center + truncated_noise(), c))
    return LabeledVectors(items=items, targets=[f"T{c}" for c in range(n_classes)])
