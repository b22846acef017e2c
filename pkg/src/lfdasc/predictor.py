"""Sigmoid mapping from DASC score to a preferred blur radius.

``r(f) = kappa / (1 + exp(beta * (f - gamma)))``
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import expit

__all__ = [
    "SigmoidModel",
    "REFERENCE_MODEL",
    "FitError",
    "sigmoid_eval",
    "sigmoid_jacobian",
    "fit_sigmoid",
    "snap_radius",
    "predict_radius",
    "load_model",
    "save_model",
]


@dataclass(frozen=True)
class SigmoidModel:
    kappa: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


REFERENCE_MODEL = SigmoidModel(kappa=21.9, beta=4.5, gamma=9.0)


class FitError(RuntimeError):
    """Fit failed. ``model`` and ``residual`` hold the best iterate, if any."""

    def __init__(self, message: str, model: SigmoidModel | None = None, residual: float | None = None):
        super().__init__(message)
        self.model = model
        self.residual = residual


def sigmoid_eval(model: SigmoidModel, f):
    """Evaluate the sigmoid; large ``|beta * (f - gamma)|`` saturates to 0 or kappa."""
    x = model.beta * (np.asarray(f, dtype=np.float64) - model.gamma)
    out = model.kappa * expit(-x)
    return float(out) if np.ndim(out) == 0 else out


def sigmoid_jacobian(params: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Partial derivatives of r(f) w.r.t. (kappa, beta, gamma), one row per sample."""
    kappa, beta, gamma = params
    s = expit(-beta * (f - gamma))  # 1 / (1 + e^x)
    ds = -s * (1.0 - s)  # d s / d x
    return np.column_stack([s, kappa * ds * (f - gamma), -kappa * ds * beta])


def _residuals(params: np.ndarray, f: np.ndarray, r: np.ndarray) -> np.ndarray:
    kappa, beta, gamma = params
    return kappa * expit(-beta * (f - gamma)) - r


def fit_sigmoid(samples: Iterable[tuple[float, float]], max_iter: int = 500,
                tol: float = 1e-10, max_halvings: int = 30) -> SigmoidModel:
    """Least-squares fit by damped Gauss-Newton.

    Starts from kappa = max radius, gamma = median f, beta = 1. Each step is
    halved until the sum of squared residuals decreases (at most
    ``max_halvings`` times); iteration stops once the decrease falls below
    ``tol``.
    """
    data = np.asarray(list(samples), dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 3 or data.shape[1] != 2:
        raise FitError("need at least 3 (f, radius) samples")
    f, r = data[:, 0], data[:, 1]
    if np.all(r == r[0]):
        raise FitError("all radii are equal; the slope is not identifiable")
    if np.unique(f).size < 3:
        raise FitError("need at least 3 distinct f values")

    params = np.array([r.max(), 1.0, float(np.median(f))])
    res = _residuals(params, f, r)
    sse = float(res @ res)
    for _ in range(max_iter):
        J = sigmoid_jacobian(params, f)
        step, *_ = np.linalg.lstsq(J, -res, rcond=None)
        t = 1.0
        for _ in range(max_halvings + 1):
            trial = params + t * step
            trial_res = _residuals(trial, f, r)
            trial_sse = float(trial_res @ trial_res)
            if trial_sse < sse:
                break
            t *= 0.5
        else:
            # no decrease along the Gauss-Newton direction: at a minimum
            break
        improvement = sse - trial_sse
        params, res, sse = trial, trial_res, trial_sse
        if improvement < tol or sse == 0.0:
            break
    else:
        raise FitError(f"no convergence after {max_iter} iterations", _as_model(params), sse)
    model = _as_model(params)
    if model is None:
        raise FitError("fit produced a non-positive kappa", None, sse)
    return model


def _as_model(params: np.ndarray) -> SigmoidModel | None:
    kappa, beta, gamma = (float(v) for v in params)
    if not (kappa > 0 and math.isfinite(beta) and math.isfinite(gamma)):
        return None
    return SigmoidModel(kappa, beta, gamma)


def snap_radius(raw: float, available: Sequence[int]) -> int:
    """Nearest available radius; exact ties go to the larger one."""
    if not available:
        raise ValueError("no available radii")
    return min(sorted(set(available)), key=lambda a: (abs(a - raw), -a))


def predict_radius(model: SigmoidModel, f: float, available: Sequence[int]) -> int:
    return snap_radius(sigmoid_eval(model, f), available)


def load_model(path: str | Path) -> SigmoidModel:
    """Load ``{"kappa", "beta", "gamma"}`` JSON. The name ``reference`` returns the preset."""
    if str(path) == "reference":
        return REFERENCE_MODEL
    doc = json.loads(Path(path).read_text())
    missing = [k for k in ("kappa", "beta", "gamma") if k not in doc]
    if missing:
        raise ValueError(f"{path}: model is missing field(s) {missing}")
    return SigmoidModel(float(doc["kappa"]), float(doc["beta"]), float(doc["gamma"]))


def save_model(model: SigmoidModel, path: str | Path) -> None:
    Path(path).write_text(model.to_json() + "\n")
