"""Synthetic Gaussian-cluster data for smoke tests and the dynamic-label ablation."""
import numpy as np

from .io import build_prior


def gaussian_clusters(n_classes=4, dim=20, per_class=50, labeled_per_class=5,
                      separation=4.0, std=1.0, seed=0):
    """Isotropic clusters whose centres are pairwise ``separation * std`` apart.

    Returns ``(x, truth, prior)`` with ``x`` of shape dim x N, samples grouped
    by class, and ``labeled_per_class`` random labeled samples per class.
    """
    if dim < n_classes:
        raise ValueError("need dim >= n_classes to place equidistant centres")
    rng = np.random.default_rng(seed)
    centres = np.zeros((n_classes, dim))
    # scaled basis vectors are pairwise sqrt(2) * scale apart
    centres[np.arange(n_classes), np.arange(n_classes)] = separation * std / np.sqrt(2.0)
    x = np.concatenate(
        [centres[c] + std * rng.standard_normal((per_class, dim)) for c in range(n_classes)]
    ).T
    truth = np.repeat(np.arange(n_classes), per_class)
    labels = np.full(truth.size, -1, dtype=np.int64)
    for c in range(n_classes):
        chosen = rng.choice(np.flatnonzero(truth == c), size=labeled_per_class, replace=False)
        labels[chosen] = c
    return x, truth, build_prior(labels, n_classes)
