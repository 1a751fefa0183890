"""Shared construction helpers for the test suite."""

import numpy as np

from biasaudit.data import Dataset, FeatureSchema


def make_dataset(num, cat, labels, groups, levels=None, num_names=None, cat_names=None):
    num = np.asarray(num, dtype=float)
    if num.ndim == 1:
        num = num.reshape(-1, 1)
    cat = np.asarray(cat, dtype=int)
    if cat.ndim == 1 and cat.size:
        cat = cat.reshape(-1, 1)
    if cat.size == 0:
        cat = cat.reshape(len(labels), 0)
    schema = FeatureSchema(
        numerical_names=num_names or tuple(f"x{i}" for i in range(num.shape[1])),
        categorical_names=cat_names or tuple(f"c{i}" for i in range(cat.shape[1])),
        label_name="y",
        group_name="s",
    )
    return Dataset(schema, num, cat, labels, groups, levels)


def random_dataset(rng, n, n_num=2, n_cat=1, n_levels=3):
    num = rng.random((n, n_num))
    cat = rng.integers(0, n_levels, size=(n, n_cat)) if n_cat else np.zeros((n, 0), dtype=int)
    labels = rng.integers(0, 2, size=n)
    groups = rng.integers(0, 2, size=n)
    return make_dataset(num, cat, labels, groups)
