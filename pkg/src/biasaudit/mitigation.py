"""Bias-informed data editing: removal of high-bias samples and fair-sample mixup.

Removal deletes the top-budget samples by bias score from the
adaptively chosen (majority label, group) cell. Augmentation appends
synthetic samples built by neighborhood mixup between low-bias seeds of
the (minority label, group) cell and their most similar same-group
same-label neighbors. Both directions counter class imbalance at the
same time as unfairness.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .attribution import BiasVector
from .data import Dataset
from .similarity import SimilarityMatrix


class ClassBalanceTieError(ValueError):
    """Label counts are exactly tied; choose the target class explicitly."""


@dataclass(frozen=True)
class SubgroupSelector:
    target_label: int
    target_group: int
    strategy: str  # "removal" | "augmentation"


@dataclass(frozen=True)
class RemovalPlan:
    indices: tuple
    budget: int

    def __post_init__(self):
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("removal indices must be unique")


@dataclass(frozen=True)
class SyntheticSample:
    numericals: tuple
    categoricals: tuple
    label: int
    group: int
    seed_index: int
    target_index: int
    lam: float


@dataclass(frozen=True)
class AugmentationPlan:
    samples: tuple
    budget: int
    n_neighbors: int


def select_edit_subgroup(d: Dataset, strategy: str, tie_label: int | None = None) -> SubgroupSelector:
    """Pick the (label, group) cell to edit from the class distribution.

    Removal targets the majority label; if that is the positive class
    the privileged group is edited, otherwise the protected group.
    Augmentation targets the minority label with the group choice
    reversed. An exact label tie raises unless `tie_label` names the
    class to treat as the target.
    """
    if strategy not in ("removal", "augmentation"):
        raise ValueError(f"unknown strategy {strategy!r}")
    n_pos = int((d.labels == 1).sum())
    n_neg = d.n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both labels must be present")
    if n_pos == n_neg:
        if tie_label is None:
            raise ClassBalanceTieError(
                "label counts are tied; pass an explicit tie_label override"
            )
        target_label = int(tie_label)
    elif strategy == "removal":
        target_label = 1 if n_pos > n_neg else 0
    else:
        target_label = 1 if n_pos < n_neg else 0
    if strategy == "removal":
        target_group = 1 if target_label == 1 else 0
    else:
        target_group = 0 if target_label == 1 else 1
    return SubgroupSelector(target_label=target_label, target_group=target_group, strategy=strategy)


def plan_removal(d: Dataset, b: BiasVector, k: int, tie_label: int | None = None) -> RemovalPlan:
    """Select the top-k candidates by bias score from the removal cell.

    Undefined bias ranks as zero; ties break by ascending index. A
    budget beyond the candidate count truncates with a warning.
    """
    if k < 0:
        raise ValueError("budget must be non-negative")
    selector = select_edit_subgroup(d, "removal", tie_label)
    candidates = np.nonzero(
        (d.labels == selector.target_label) & (d.groups == selector.target_group)
    )[0]
    scores = np.where(b.defined, b.values, 0.0)[candidates]
    order = np.lexsort((candidates, -scores))
    if k > len(candidates):
        warnings.warn(
            f"budget {k} exceeds candidate count {len(candidates)}; plan truncated",
            stacklevel=2,
        )
    chosen = candidates[order][: min(k, len(candidates))]
    return RemovalPlan(indices=tuple(int(i) for i in chosen), budget=k)


def mix_rows(d: Dataset, seed_idx: int, target_idx: int, lam: float, rng):
    """Blend one seed/target row pair: linear on numericals, Bernoulli on categoricals.

    Each categorical feature takes the seed's value with probability
    `lam`, so lam=1 reproduces the seed exactly and lam=0 the target.
    """
    numericals = lam * d.numericals[seed_idx] + (1.0 - lam) * d.numericals[target_idx]
    take_seed = rng.random(d.n_categorical) < lam
    categoricals = np.where(take_seed, d.categoricals[seed_idx], d.categoricals[target_idx])
    return numericals, categoricals


def synthesize_fair_samples(
    d: Dataset,
    b: BiasVector,
    q: SimilarityMatrix,
    m: int,
    n_nb: int = 5,
    rng_seed: int = 0,
    tie_label: int | None = None,
) -> AugmentationPlan:
    """Draw m synthetic samples by neighborhood mixup, seeded for reproducibility.

    Seeds come from the augmentation cell with probability proportional
    to 1 - bias (undefined bias counts as zero bias, weight one). The
    mixup target is drawn uniformly from the seed's n_nb most similar
    same-group, same-label samples; numericals interpolate linearly with
    weight lam ~ U(0, 1), each categorical takes the seed's value with
    probability lam and the target's otherwise. Synthetics inherit the
    seed's label and group.
    """
    if n_nb < 1:
        raise ValueError("neighborhood size must be at least 1")
    selector = select_edit_subgroup(d, "augmentation", tie_label)
    pool = np.nonzero(
        (d.labels == selector.target_label) & (d.groups == selector.target_group)
    )[0]
    if len(pool) == 0:
        raise ValueError("augmentation candidate pool is empty")
    weights = 1.0 - np.where(b.defined, b.values, 0.0)[pool]
    if weights.sum() <= 0.0:
        raise ValueError("all candidate weights are zero")

    qm = q.matrix
    same_cell = (d.labels == selector.target_label) & (d.groups == selector.target_group)

    def neighbor_pool(seed_idx):
        sims = qm[seed_idx]
        mask = same_cell & (sims > 0.0)
        mask[seed_idx] = False
        nbrs = np.nonzero(mask)[0]
        if len(nbrs) == 0:
            return nbrs
        order = np.lexsort((nbrs, -sims[nbrs]))
        return nbrs[order][:n_nb]

    if not any(len(neighbor_pool(s)) and w > 0 for s, w in zip(pool, weights)):
        raise ValueError("no candidate has a comparable same-group neighbor")

    rng = np.random.default_rng(rng_seed)
    prob = weights / weights.sum()
    samples = []
    attempts = 0
    while len(samples) < m:
        attempts += 1
        if attempts > max(1000, 100 * m):
            raise RuntimeError("seed resampling did not terminate")
        seed_idx = int(rng.choice(pool, p=prob))
        nbrs = neighbor_pool(seed_idx)
        if len(nbrs) == 0:
            warnings.warn(
                f"seed {seed_idx} has no comparable same-group neighbor; resampling",
                stacklevel=2,
            )
            continue
        target_idx = int(nbrs[rng.integers(len(nbrs))])
        lam = float(rng.uniform())
        mixed_num, mixed_cat = mix_rows(d, seed_idx, target_idx, lam, rng)
        samples.append(
            SyntheticSample(
                numericals=tuple(float(v) for v in mixed_num),
                categoricals=tuple(int(v) for v in mixed_cat),
                label=int(d.labels[seed_idx]),
                group=int(d.groups[seed_idx]),
                seed_index=seed_idx,
                target_index=target_idx,
                lam=lam,
            )
        )
    return AugmentationPlan(samples=tuple(samples), budget=m, n_neighbors=n_nb)


def apply_plan(d: Dataset, plan) -> Dataset:
    """Apply a removal (delete rows, keep order) or augmentation (append rows)."""
    if isinstance(plan, RemovalPlan):
        idx = np.asarray(plan.indices, dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= d.n):
            raise IndexError("removal index out of range")
        keep = np.ones(d.n, dtype=bool)
        keep[idx] = False
        return d.subset(np.nonzero(keep)[0])
    if isinstance(plan, AugmentationPlan):
        for s in plan.samples:
            if not (0 <= s.seed_index < d.n and 0 <= s.target_index < d.n):
                raise IndexError("synthetic sample provenance index out of range")
        if not plan.samples:
            return d.subset(np.arange(d.n))
        new_num = np.vstack([d.numericals] + [np.array(s.numericals).reshape(1, -1) for s in plan.samples])
        new_cat = np.vstack([d.categoricals] + [np.array(s.categoricals, dtype=int).reshape(1, -1) for s in plan.samples]) if d.n_categorical else np.zeros((d.n + len(plan.samples), 0), dtype=int)
        new_lab = np.concatenate([d.labels, [s.label for s in plan.samples]])
        new_grp = np.concatenate([d.groups, [s.group for s in plan.samples]])
        return Dataset(d.schema, new_num, new_cat, new_lab, new_grp, d.category_levels)
    raise TypeError(f"unknown plan type {type(plan).__name__}")


def write_plan(plan, d: Dataset, path) -> None:
    """Serialize a plan: index list for removal, full rows plus provenance for augmentation."""
    with open(path, "w", encoding="utf-8") as fh:
        if isinstance(plan, RemovalPlan):
            fh.write(f"# removal plan\tbudget={plan.budget}\n")
            for i in plan.indices:
                fh.write(f"{i}\n")
            return
        if not isinstance(plan, AugmentationPlan):
            raise TypeError(f"unknown plan type {type(plan).__name__}")
        cols = (
            list(d.schema.numerical_names)
            + list(d.schema.categorical_names)
            + [d.schema.group_name, d.schema.label_name, "seed", "target", "lambda"]
        )
        fh.write(f"# augmentation plan\tbudget={plan.budget}\tneighbors={plan.n_neighbors}\n")
        fh.write("# " + ",".join(cols) + "\n")
        for s in plan.samples:
            row = [f"{v:.6f}" for v in s.numericals]
            row += [d.category_levels[j][c] for j, c in enumerate(s.categoricals)]
            row += [str(s.group), str(s.label), str(s.seed_index), str(s.target_index), f"{s.lam:.6f}"]
            fh.write(",".join(row) + "\n")
