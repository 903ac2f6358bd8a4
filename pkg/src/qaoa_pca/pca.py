"""Principal-component model over trained parameter vectors.

The training matrix holds one row of 2p angles per graph (gamma block then
beta block). Fitting mean-centers the rows, eigendecomposes the covariance
with the n-1 divisor, and fixes each component's sign so its largest-magnitude
entry is positive. Reduced optimization then searches coefficient space:
theta = mean + sum_i c_i v_i.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .engine import ParameterVector

MODEL_FORMAT = "pca-model/1"


class ModelFormatError(ValueError):
    """Raised when a model file is missing fields or structurally invalid."""


@dataclass(frozen=True)
class ParameterMatrix:
    """Stack of trained length-2p parameter rows, one per training graph."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError(f"rows must be 2-d, got shape {rows.shape}")
        if rows.shape[0] < 2:
            raise ValueError(f"need at least 2 rows to fit, got {rows.shape[0]}")
        if rows.shape[1] < 2 or rows.shape[1] % 2 != 0:
            raise ValueError(f"row length must be even 2p >= 2, got {rows.shape[1]}")
        if not np.all(np.isfinite(rows)):
            raise ValueError("rows contain non-finite entries")
        object.__setattr__(self, "rows", rows)

    @property
    def row_count(self) -> int:
        return self.rows.shape[0]

    @property
    def p(self) -> int:
        return self.rows.shape[1] // 2


@dataclass(frozen=True)
class CoefficientVector:
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ValueError("need at least one coefficient")
        if not all(math.isfinite(c) for c in self.coeffs):
            raise ValueError(f"coefficients must be finite, got {self.coeffs}")

    @property
    def k(self) -> int:
        return len(self.coeffs)


@dataclass(frozen=True)
class PCAModel:
    """Mean vector plus orthonormal components sorted by decreasing variance.

    degenerate is set when the training rows were all identical, i.e. every
    eigenvalue is zero; such a model still expands (to its mean).
    """

    p: int
    mean: np.ndarray
    components: np.ndarray  # shape (m, 2p), rows are the components
    eigenvalues: np.ndarray  # shape (m,), nonincreasing, >= 0
    degenerate: bool = field(default=False)

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64)
        comps = np.asarray(self.components, dtype=np.float64)
        eig = np.asarray(self.eigenvalues, dtype=np.float64)
        if mean.shape != (2 * self.p,):
            raise ValueError(f"mean must have length 2p={2 * self.p}, got {mean.shape}")
        if comps.ndim != 2 or comps.shape[1] != 2 * self.p or comps.shape[0] > 2 * self.p:
            raise ValueError(f"components shape {comps.shape} invalid for p={self.p}")
        if eig.shape != (comps.shape[0],):
            raise ValueError("one eigenvalue per component required")
        if np.any(eig < 0) or np.any(np.diff(eig) > 0):
            raise ValueError("eigenvalues must be nonnegative and nonincreasing")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "eigenvalues", eig)

    @property
    def n_components(self) -> int:
        return self.components.shape[0]


def fit(X: ParameterMatrix) -> PCAModel:
    """Eigendecomposition of the row covariance (n-1 divisor) of X."""
    rows = X.rows
    mean = rows.mean(axis=0)
    centered = rows - mean
    cov = centered.T @ centered / (X.row_count - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)  # ascending; columns are eigenvectors
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    comps = eigvecs[:, order].T.copy()
    for i in range(comps.shape[0]):
        j = int(np.argmax(np.abs(comps[i])))  # first index wins magnitude ties
        if comps[i, j] < 0:
            comps[i] = -comps[i]
    return PCAModel(
        p=X.p,
        mean=mean,
        components=comps,
        eigenvalues=eigvals,
        degenerate=not bool(np.any(eigvals > 0.0)),
    )


def expand(model: PCAModel, c: CoefficientVector) -> ParameterVector:
    """theta = mean + sum_i c_i * component_i, split back into gamma/beta halves."""
    if c.k > model.n_components:
        raise ValueError(f"{c.k} coefficients but model holds {model.n_components} components")
    theta = model.mean + np.asarray(c.coeffs) @ model.components[: c.k]
    return ParameterVector.from_array(theta)


def project(model: PCAModel, theta: ParameterVector, k: int) -> CoefficientVector:
    """Coefficients of theta - mean along the first k components."""
    if not (1 <= k <= model.n_components):
        raise ValueError(f"k must be in 1..{model.n_components}, got {k}")
    flat = theta.as_array()
    if flat.shape != model.mean.shape:
        raise ValueError(f"parameter vector has 2p={flat.size}, model expects {model.mean.size}")
    coeffs = model.components[:k] @ (flat - model.mean)
    return CoefficientVector(tuple(float(v) for v in coeffs))


def projection_ranges(model: PCAModel, k: int, training_X: ParameterMatrix) -> np.ndarray:
    """Per-component [lo, hi] bounds of training-row projections, shape (k, 2)."""
    if not (1 <= k <= model.n_components):
        raise ValueError(f"k must be in 1..{model.n_components}, got {k}")
    if training_X.rows.shape[1] != model.mean.size:
        raise ValueError("training matrix row length does not match the model")
    proj = (training_X.rows - model.mean) @ model.components[:k].T  # (rows, k)
    return np.stack([proj.min(axis=0), proj.max(axis=0)], axis=1)


def sample_coefficients(
    model: PCAModel, k: int, training_X: ParameterMatrix, seed: int
) -> CoefficientVector:
    """Uniform draw inside the empirical projection range of each component."""
    if not (1 <= k <= model.n_components):
        raise ValueError(f"k must be in 1..{model.n_components}, got {k}")
    if model.degenerate:
        return CoefficientVector((0.0,) * k)
    ranges = projection_ranges(model, k, training_X)
    rng = np.random.default_rng(seed)
    draw = rng.uniform(ranges[:, 0], ranges[:, 1])
    return CoefficientVector(tuple(float(v) for v in draw))


def save_model(path, model: PCAModel) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "p": model.p,
        "degenerate": model.degenerate,
        "mean": model.mean.tolist(),
        "eigenvalues": model.eigenvalues.tolist(),
        "components": model.components.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_model(path) -> PCAModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not valid model JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ModelFormatError(f"{path}: expected a JSON object")
    tag = payload.get("format")
    if tag != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: format tag {tag!r}, expected {MODEL_FORMAT!r}")
    for name in ("p", "degenerate", "mean", "eigenvalues", "components"):
        if name not in payload:
            raise ModelFormatError(f"{path}: missing field {name!r}")
    try:
        return PCAModel(
            p=int(payload["p"]),
            mean=np.array(payload["mean"], dtype=np.float64),
            components=np.array(payload["components"], dtype=np.float64).reshape(
                len(payload["components"]), -1
            ),
            eigenvalues=np.array(payload["eigenvalues"], dtype=np.float64),
            degenerate=bool(payload["degenerate"]),
        )
    except ValueError as exc:
        raise ModelFormatError(f"{path}: {exc}") from exc
