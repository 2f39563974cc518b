"""From-scratch classifiers: CART decision tree, random forest, linear SVC.

All three train deterministically: identical data and config (seed
included) give identical serialized models on every run. Tie-breaking is
fixed everywhere — split candidates by (Gini, feature index, threshold),
predictions by lower label ordinal — so golden tests are possible.

The hot loops (split scan, SVC coordinate descent) live in
:mod:`cqjudge.kernels`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .corpus import UsefulnessLabel
from .errors import DimMismatchError, EmptyTrainingSetError, SingleClassError
from .tfidf import SparseVector

N_CLASSES = 3


def _as_matrix(X: Sequence[SparseVector]) -> np.ndarray:
    if len(X) == 0:
        raise EmptyTrainingSetError("no training vectors")
    dim = X[0].dim
    mat = np.zeros((len(X), dim), dtype=np.float64)
    for row, vec in enumerate(X):
        if vec.dim != dim:
            raise DimMismatchError(f"vector {row} has dim {vec.dim}, expected {dim}")
        for index, value in vec.entries:
            mat[row, index] = value
    return mat


def _as_ordinals(y: Sequence[UsefulnessLabel], n_rows: int) -> np.ndarray:
    if len(y) != n_rows:
        raise DimMismatchError(f"{n_rows} vectors vs {len(y)} labels")
    return np.array([int(label) for label in y], dtype=np.int64)


def _argmax_lowest(scores: Sequence[float]) -> UsefulnessLabel:
    best = 0
    for k in range(1, len(scores)):
        if scores[k] > scores[best]:
            best = k
    return UsefulnessLabel(best)


# --- decision tree ----------------------------------------------------------


@dataclass(frozen=True)
class DtcConfig:
    max_depth: Optional[int] = None
    min_samples_split: int = 2

    def __post_init__(self) -> None:
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")

    def to_dict(self) -> dict:
        return {
            "criterion": "gini",
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DtcConfig":
        return cls(
            max_depth=data["max_depth"],
            min_samples_split=int(data["min_samples_split"]),
        )


@dataclass(frozen=True)
class DecisionTreeModel:
    """CART tree as a flat preorder node array.

    Internal nodes: ``{feature, threshold, left, right}`` with child node
    indices; leaves: ``{counts}`` holding per-class training counts.
    Routing is ``x[feature] <= threshold`` to the left child.
    """

    dim: int
    nodes: tuple[dict, ...]
    config: DtcConfig = field(default_factory=DtcConfig)

    def predict_dense(self, dense: Sequence[float]) -> tuple[UsefulnessLabel, list[float]]:
        node = self.nodes[0]
        while "feature" in node:
            node = self.nodes[node["left"] if dense[node["feature"]] <= node["threshold"] else node["right"]]
        scores = [float(c) for c in node["counts"]]
        return _argmax_lowest(scores), scores

    def to_dict(self) -> dict:
        return {
            "kind": "dtc",
            "dim": self.dim,
            "nodes": list(self.nodes),
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionTreeModel":
        return cls(
            dim=int(data["dim"]),
            nodes=tuple(data["nodes"]),
            config=DtcConfig.from_dict(data["config"]),
        )


class _TreeBuilder:
    """Grows one tree; shared by DTC (all features) and RFC (sampled)."""

    def __init__(
        self,
        mat: np.ndarray,
        ords: np.ndarray,
        config: DtcConfig,
        rng: Optional[np.random.Generator] = None,
        features_per_split: Optional[int] = None,
    ):
        self.mat = mat
        self.ords = ords
        self.config = config
        self.rng = rng
        self.k = features_per_split

    def _best_split(self, rows: np.ndarray) -> Optional[tuple[int, float, float]]:
        dim = self.mat.shape[1]
        if self.k is not None and self.k < dim:
            feats = np.sort(self.rng.choice(dim, size=self.k, replace=False))
        else:
            feats = np.arange(dim)
        labs = self.ords[rows]
        best: Optional[tuple[int, float, float]] = None
        for f in feats:
            col = self.mat[rows, f]
            order = np.argsort(col, kind="stable")
            gini, thr, found = kernels.scan_best_split(
                np.ascontiguousarray(col[order]),
                np.ascontiguousarray(labs[order]),
                N_CLASSES,
            )
            # strict < keeps the lowest feature index on Gini ties; the
            # kernel already keeps the lowest threshold within a feature
            if found and (best is None or gini < best[2]):
                best = (int(f), float(thr), float(gini))
        return best

    def build(self, rows: np.ndarray) -> tuple[dict, ...]:
        nodes: list[dict] = []
        # stack entries: (row indices, depth, parent node id, is right child);
        # right pushed first so traversal is preorder (node, left, right),
        # which fixes the RNG consumption order for feature sampling
        stack: list[tuple[np.ndarray, int, int, bool]] = [(rows, 0, -1, False)]
        max_depth = self.config.max_depth
        while stack:
            node_rows, depth, parent, is_right = stack.pop()
            node_id = len(nodes)
            if parent >= 0:
                nodes[parent]["right" if is_right else "left"] = node_id
            counts = np.bincount(self.ords[node_rows], minlength=N_CLASSES)
            impure = int(counts.max()) != node_rows.size
            can_split = (
                impure
                and node_rows.size >= self.config.min_samples_split
                and (max_depth is None or depth < max_depth)
            )
            best = self._best_split(node_rows) if can_split else None
            if best is None:
                nodes.append({"counts": [int(c) for c in counts]})
                continue
            f, thr, _ = best
            nodes.append({"feature": f, "threshold": thr, "left": -1, "right": -1})
            left_mask = self.mat[node_rows, f] <= thr
            stack.append((node_rows[~left_mask], depth + 1, node_id, True))
            stack.append((node_rows[left_mask], depth + 1, node_id, False))
        return tuple(nodes)


def train_dtc(
    X: Sequence[SparseVector], y: Sequence[UsefulnessLabel], config: DtcConfig | None = None
) -> DecisionTreeModel:
    """Greedy Gini CART. Splits whenever any candidate threshold exists,
    even at zero Gini gain, so consistent data always reaches purity."""
    if config is None:
        config = DtcConfig()
    mat = _as_matrix(X)
    ords = _as_ordinals(y, mat.shape[0])
    builder = _TreeBuilder(mat, ords, config)
    nodes = builder.build(np.arange(mat.shape[0]))
    return DecisionTreeModel(dim=mat.shape[1], nodes=nodes, config=config)


# --- random forest ----------------------------------------------------------


@dataclass(frozen=True)
class RfcConfig:
    n_trees: int = 100
    bootstrap: bool = True
    features_per_split: Optional[int] = None  # None -> ceil(sqrt(dim))
    max_depth: Optional[int] = None
    min_samples_split: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "bootstrap": self.bootstrap,
            "features_per_split": self.features_per_split,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RfcConfig":
        return cls(
            n_trees=int(data["n_trees"]),
            bootstrap=bool(data["bootstrap"]),
            features_per_split=data["features_per_split"],
            max_depth=data["max_depth"],
            min_samples_split=int(data["min_samples_split"]),
            seed=int(data["seed"]),
        )


@dataclass(frozen=True)
class RandomForestModel:
    dim: int
    trees: tuple[DecisionTreeModel, ...]
    config: RfcConfig = field(default_factory=RfcConfig)

    def predict_dense(self, dense: Sequence[float]) -> tuple[UsefulnessLabel, list[float]]:
        votes = [0.0] * N_CLASSES
        for tree in self.trees:
            label, _ = tree.predict_dense(dense)
            votes[label] += 1.0
        return _argmax_lowest(votes), votes

    def to_dict(self) -> dict:
        return {
            "kind": "rfc",
            "dim": self.dim,
            "trees": [t.to_dict() for t in self.trees],
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RandomForestModel":
        return cls(
            dim=int(data["dim"]),
            trees=tuple(DecisionTreeModel.from_dict(t) for t in data["trees"]),
            config=RfcConfig.from_dict(data["config"]),
        )


def train_rfc(
    X: Sequence[SparseVector], y: Sequence[UsefulnessLabel], config: RfcConfig | None = None
) -> RandomForestModel:
    """Bootstrap forest with per-node feature sampling.

    Tree i draws its RNG from ``SeedSequence(seed).spawn(n_trees)[i]``,
    consuming it in a fixed order (bootstrap indices first, then feature
    subsets in preorder), so trees could be grown in parallel and still
    match sequential training bit for bit.
    """
    if config is None:
        config = RfcConfig()
    mat = _as_matrix(X)
    ords = _as_ordinals(y, mat.shape[0])
    n, dim = mat.shape
    k = config.features_per_split
    if k is None:
        k = math.ceil(math.sqrt(dim))
    k = max(1, min(k, dim))
    tree_config = DtcConfig(max_depth=config.max_depth, min_samples_split=config.min_samples_split)
    streams = np.random.SeedSequence(config.seed).spawn(config.n_trees)
    trees = []
    for stream in streams:
        rng = np.random.default_rng(stream)
        rows = rng.integers(0, n, size=n) if config.bootstrap else np.arange(n)
        builder = _TreeBuilder(mat, ords, tree_config, rng=rng, features_per_split=k)
        trees.append(DecisionTreeModel(dim=dim, nodes=builder.build(rows), config=tree_config))
    return RandomForestModel(dim=dim, trees=tuple(trees), config=config)


# --- linear SVC -------------------------------------------------------------


@dataclass(frozen=True)
class SvcConfig:
    C: float = 1.0
    tol: float = 1e-4
    max_iter: int = 1000
    fit_bias: bool = True  # bias learned as an augmented constant-1 feature

    def __post_init__(self) -> None:
        if self.C <= 0:
            raise ValueError("C must be > 0")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def to_dict(self) -> dict:
        return {
            "loss": "squared-hinge",
            "C": self.C,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "fit_bias": self.fit_bias,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SvcConfig":
        return cls(
            C=float(data["C"]),
            tol=float(data["tol"]),
            max_iter=int(data["max_iter"]),
            fit_bias=bool(data["fit_bias"]),
        )


@dataclass(frozen=True)
class LinearSvcModel:
    """One-vs-rest linear SVC: one weight vector and bias per class."""

    dim: int
    weights: tuple[tuple[float, ...], ...]
    biases: tuple[float, ...]
    converged: tuple[bool, ...]
    n_iter: tuple[int, ...]
    config: SvcConfig = field(default_factory=SvcConfig)

    def decision_scores(self, x: SparseVector) -> list[float]:
        scores = []
        for c in range(N_CLASSES):
            w = self.weights[c]
            acc = self.biases[c]
            for index, value in x.entries:
                acc += w[index] * value
            scores.append(acc)
        return scores

    def to_dict(self) -> dict:
        return {
            "kind": "svc",
            "dim": self.dim,
            "weights": [list(w) for w in self.weights],
            "biases": list(self.biases),
            "converged": list(self.converged),
            "n_iter": list(self.n_iter),
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinearSvcModel":
        return cls(
            dim=int(data["dim"]),
            weights=tuple(tuple(float(v) for v in w) for w in data["weights"]),
            biases=tuple(float(b) for b in data["biases"]),
            converged=tuple(bool(c) for c in data["converged"]),
            n_iter=tuple(int(i) for i in data["n_iter"]),
            config=SvcConfig.from_dict(data["config"]),
        )


def _as_csr(
    X: Sequence[SparseVector], add_bias: bool
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    if len(X) == 0:
        raise EmptyTrainingSetError("no training vectors")
    dim = X[0].dim
    data: list[float] = []
    indices: list[int] = []
    indptr = [0]
    for row, vec in enumerate(X):
        if vec.dim != dim:
            raise DimMismatchError(f"vector {row} has dim {vec.dim}, expected {dim}")
        for index, value in vec.entries:
            data.append(value)
            indices.append(index)
        if add_bias:
            data.append(1.0)
            indices.append(dim)
        indptr.append(len(data))
    return (
        np.array(data, dtype=np.float64),
        np.array(indices, dtype=np.int32),
        np.array(indptr, dtype=np.int64),
        dim + (1 if add_bias else 0),
    )


def train_svc(
    X: Sequence[SparseVector], y: Sequence[UsefulnessLabel], config: SvcConfig | None = None
) -> LinearSvcModel:
    """One-vs-rest L2-regularized squared-hinge SVMs via dual coordinate
    descent over the examples in fixed order. Non-convergence within
    max_iter is flagged per class, not fatal."""
    if config is None:
        config = SvcConfig()
    ords = _as_ordinals(y, len(X))
    if len(set(int(v) for v in ords)) < 2:
        raise SingleClassError("training data contains a single class")
    data, indices, indptr, n_cols = _as_csr(X, config.fit_bias)
    dim = X[0].dim
    weights = []
    biases = []
    converged = []
    n_iter = []
    for c in range(N_CLASSES):
        ybin = np.where(ords == c, 1.0, -1.0).astype(np.float64)
        w, iters, ok = kernels.svc_dual_cd(
            data, indices, indptr, n_cols, ybin, config.C, config.tol, config.max_iter
        )
        if config.fit_bias:
            weights.append(tuple(float(v) for v in w[:dim]))
            biases.append(float(w[dim]))
        else:
            weights.append(tuple(float(v) for v in w))
            biases.append(0.0)
        converged.append(bool(ok))
        n_iter.append(int(iters))
    return LinearSvcModel(
        dim=dim,
        weights=tuple(weights),
        biases=tuple(biases),
        converged=tuple(converged),
        n_iter=tuple(n_iter),
        config=config,
    )


# --- shared prediction API ---------------------------------------------------

AnyModel = Union[DecisionTreeModel, RandomForestModel, LinearSvcModel]

MODEL_KINDS = {"dtc": DecisionTreeModel, "rfc": RandomForestModel, "svc": LinearSvcModel}


def model_kind(model: AnyModel) -> str:
    for kind, cls in MODEL_KINDS.items():
        if isinstance(model, cls):
            return kind
    raise TypeError(f"not a known model type: {type(model)!r}")


def model_from_dict(data: dict) -> AnyModel:
    try:
        cls = MODEL_KINDS[data["kind"]]
    except KeyError:
        raise ValueError(f"unknown model kind {data.get('kind')!r}") from None
    return cls.from_dict(data)


def predict(model: AnyModel, x: SparseVector) -> tuple[UsefulnessLabel, list[float]]:
    """Label plus per-class scores; score ties go to the lower ordinal."""
    if x.dim != model.dim:
        raise DimMismatchError(f"input dim {x.dim} != model dim {model.dim}")
    if isinstance(model, LinearSvcModel):
        scores = model.decision_scores(x)
        return _argmax_lowest(scores), scores
    return model.predict_dense(x.to_dense())


def predict_batch(model: AnyModel, X: Sequence[SparseVector]) -> list[UsefulnessLabel]:
    return [predict(model, x)[0] for x in X]
