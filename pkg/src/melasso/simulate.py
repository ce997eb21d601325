"""Synthetic data for the measurement-error experiments.

Randomness: every entry point takes ``seed``, which may be an int, a
``numpy.random.SeedSequence`` or a ready ``Generator``. Integers and seed
sequences are turned into ``Generator(Philox(SeedSequence(seed)))``;
Philox is a counter-based generator, so a stream is fully defined by its
seed sequence. Monte Carlo replicate ``r`` of root seed ``s`` uses
``SeedSequence(s, spawn_key=(r,))`` (see `replicate_seed`), which makes
replicates independent of execution order and worker count.

Draw order inside `simulate_linear`: X, then eps, then U. Inside
`simulate_glm`: X, then U, then y.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .covariance import CovarianceSpec, cholesky_factor, realize
from .errors import ConfigError, SimulationError

POISSON_ETA_MAX = 30.0


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def replicate_seed(root: int, replicate: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(root), spawn_key=(int(replicate),))


@dataclass
class TrueModel:
    beta0: np.ndarray
    sigma_eps: float = 0.1
    sigma_xx: CovarianceSpec | None = None
    sigma_uu: CovarianceSpec | None = None
    coef_sd: float = 2.0
    intercept: float = 0.0

    def __post_init__(self):
        self.beta0 = np.asarray(self.beta0, dtype=float)
        p = self.beta0.size
        if self.sigma_xx is None:
            self.sigma_xx = CovarianceSpec.identity(p)
        if self.sigma_uu is None:
            self.sigma_uu = CovarianceSpec.zeros(p)

    @property
    def p(self) -> int:
        return self.beta0.size

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.beta0)

    @property
    def s0(self) -> int:
        return int(np.count_nonzero(self.beta0))

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "beta0": [float(b) for b in self.beta0],
            "support": [int(j) for j in self.support],
            "sigma_eps": float(self.sigma_eps),
            "coef_sd": float(self.coef_sd),
            "intercept": float(self.intercept),
            "sigma_xx": self.sigma_xx.to_dict(),
            "sigma_uu": self.sigma_uu.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrueModel":
        return cls(
            beta0=np.asarray(d["beta0"], dtype=float),
            sigma_eps=float(d.get("sigma_eps", 0.1)),
            sigma_xx=CovarianceSpec.from_dict(d["sigma_xx"]),
            sigma_uu=CovarianceSpec.from_dict(d["sigma_uu"]),
            coef_sd=float(d.get("coef_sd", 2.0)),
            intercept=float(d.get("intercept", 0.0)),
        )


@dataclass
class SimulatedDataset:
    y: np.ndarray
    W: np.ndarray
    X: np.ndarray
    U: np.ndarray
    truth: TrueModel
    centered: bool = False
    family: str = "linear"
    extra: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def p(self) -> int:
        return self.W.shape[1]


def draw_model(p: int, s0: int, coef_sd: float = 2.0, randomize_support: bool = True, seed=None,
               sigma_eps: float = 0.1, sigma_xx: CovarianceSpec | None = None,
               sigma_uu: CovarianceSpec | None = None, intercept: float = 0.0) -> TrueModel:
    """Sparse coefficient vector with s0 i.i.d. N(0, coef_sd^2) nonzeros.

    With `randomize_support` the support is a uniform random s0-subset,
    otherwise the first s0 coordinates.
    """
    if p < 1:
        raise ConfigError(f"p must be >= 1, got {p}")
    if not 0 <= s0 <= p:
        raise ConfigError(f"s0 must lie in [0, p={p}], got {s0}")
    if not coef_sd > 0:
        raise ConfigError(f"coef_sd must be > 0, got {coef_sd}")
    rng = as_generator(seed)
    if randomize_support:
        support = np.sort(rng.choice(p, size=s0, replace=False))
    else:
        support = np.arange(s0)
    values = rng.normal(0.0, coef_sd, size=s0)
    while np.any(values == 0.0):
        values[values == 0.0] = rng.normal(0.0, coef_sd, size=int(np.sum(values == 0.0)))
    beta0 = np.zeros(p)
    beta0[support] = values
    return TrueModel(beta0=beta0, sigma_eps=sigma_eps, sigma_xx=sigma_xx, sigma_uu=sigma_uu,
                     coef_sd=coef_sd, intercept=intercept)


def _gaussian_rows(rng, n: int, spec: CovarianceSpec) -> np.ndarray:
    m = realize(spec)
    if not np.any(m):
        return np.zeros((n, spec.p))
    L = cholesky_factor(m)
    return rng.standard_normal((n, spec.p)) @ L.T


def simulate_linear(model: TrueModel, n: int, center: bool = True, seed=None) -> SimulatedDataset:
    """y = X beta0 + eps, W = X + U.

    With `center`, y and the columns of X and U are mean-subtracted and
    W is formed from the centered X and U, so W == X + U holds exactly and
    W has zero column means.
    """
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    rng = as_generator(seed)
    X = _gaussian_rows(rng, n, model.sigma_xx)
    eps = rng.normal(0.0, model.sigma_eps, size=n) if model.sigma_eps > 0 else np.zeros(n)
    U = _gaussian_rows(rng, n, model.sigma_uu)
    y = X @ model.beta0 + eps
    if center:
        y = y - y.mean()
        X = X - X.mean(axis=0)
        U = U - U.mean(axis=0)
    return SimulatedDataset(y=y, W=X + U, X=X, U=U, truth=model, centered=center, family="linear")


def simulate_glm(model: TrueModel, n: int, family: str = "logistic", seed=None) -> SimulatedDataset:
    """Logistic: y ~ Bernoulli(H(mu + x'beta0)); Poisson: y ~ Pois(exp(mu + x'beta0)).

    y is not centered; the intercept is `model.intercept`.
    """
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    if family not in ("logistic", "poisson"):
        raise ConfigError(f"family must be 'logistic' or 'poisson', got {family!r}")
    rng = as_generator(seed)
    X = _gaussian_rows(rng, n, model.sigma_xx)
    U = _gaussian_rows(rng, n, model.sigma_uu)
    eta = model.intercept + X @ model.beta0
    if family == "logistic":
        y = (rng.uniform(size=n) < expit(eta)).astype(float)
    else:
        bad = np.flatnonzero(np.abs(eta) > POISSON_ETA_MAX)
        if bad.size:
            i = int(bad[0])
            raise SimulationError(
                f"Poisson linear predictor {eta[i]:.4g} at observation {i} exceeds |eta| <= {POISSON_ETA_MAX}"
            )
        y = rng.poisson(np.exp(eta)).astype(float)
    return SimulatedDataset(y=y, W=X + U, X=X, U=U, truth=model, centered=False, family=family)


# ---------------------------------------------------------------------------
# CSV export


def _write_matrix(path: Path, M: np.ndarray, header: list[str]) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] == 1 and len(header) != M.shape[1]:
        M = M.T
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in M:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    os.replace(tmp, path)


def covariate_names(p: int) -> list[str]:
    return [f"x{j + 1}" for j in range(p)]


def export_dataset(ds: SimulatedDataset, directory, include_truth: bool = True) -> dict[str, Path]:
    """Write y.csv, W.csv (and X.csv, U.csv, beta0.csv, truth.json).

    Values are written with 17 significant digits so they read back bit-exact.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    names = covariate_names(ds.p)
    out = {"y": d / "y.csv", "W": d / "W.csv"}
    _write_matrix(out["y"], ds.y.reshape(-1, 1), ["y"])
    _write_matrix(out["W"], ds.W, names)
    if include_truth:
        out.update(X=d / "X.csv", U=d / "U.csv", beta0=d / "beta0.csv", truth=d / "truth.json")
        _write_matrix(out["X"], ds.X, names)
        _write_matrix(out["U"], ds.U, names)
        _write_matrix(out["beta0"], ds.truth.beta0.reshape(-1, 1), ["beta0"])
        meta = {"n": ds.n, "family": ds.family, "centered": ds.centered, "model": ds.truth.to_dict()}
        with open(out["truth"], "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
    return out
