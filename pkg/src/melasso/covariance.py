"""Population covariance matrices for the simulation designs.

Five kinds are supported:

- ``identity-scaled``: ``scale * I_p``
- ``block-toeplitz``: block diagonal, each block ``scale * rho**|j-k|``
- ``toeplitz-decay``: ``rho**(1 + |j-k|)`` over the whole matrix
- ``diagonal-vector``: ``diag(values)``; zero entries are allowed
- ``dense``: a user supplied symmetric PSD matrix

Matrices are always built from symmetric expressions so that the result
equals its transpose bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ConfigError, NumericError, ValidationError

KINDS = ("identity-scaled", "block-toeplitz", "toeplitz-decay", "diagonal-vector", "dense")

PSD_RTOL = 1e-10


@dataclass
class CovarianceSpec:
    kind: str
    p: int
    scale: float = 1.0
    rho: float | None = None
    block_size: int | None = None
    diag: np.ndarray | None = None
    dense: np.ndarray | None = None

    @classmethod
    def identity(cls, p: int, scale: float = 1.0) -> "CovarianceSpec":
        return cls("identity-scaled", p, scale=scale)

    @classmethod
    def block_toeplitz(cls, p: int, block_size: int, rho: float, scale: float = 1.0) -> "CovarianceSpec":
        return cls("block-toeplitz", p, scale=scale, rho=rho, block_size=block_size)

    @classmethod
    def toeplitz_decay(cls, p: int, rho: float) -> "CovarianceSpec":
        return cls("toeplitz-decay", p, rho=rho)

    @classmethod
    def diagonal(cls, values) -> "CovarianceSpec":
        values = np.asarray(values, dtype=float)
        return cls("diagonal-vector", values.size, diag=values)

    @classmethod
    def zeros(cls, p: int) -> "CovarianceSpec":
        return cls.diagonal(np.zeros(p))

    @classmethod
    def from_matrix(cls, m) -> "CovarianceSpec":
        m = np.asarray(m, dtype=float)
        return cls("dense", m.shape[0], dense=m)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind, "p": int(self.p)}
        if self.kind in ("identity-scaled", "block-toeplitz"):
            d["scale"] = float(self.scale)
        if self.rho is not None:
            d["rho"] = float(self.rho)
        if self.block_size is not None:
            d["block_size"] = int(self.block_size)
        if self.diag is not None:
            d["diag"] = [float(v) for v in np.asarray(self.diag)]
        if self.dense is not None:
            d["dense"] = np.asarray(self.dense).tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CovarianceSpec":
        kind = d.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"unknown covariance kind {kind!r}; expected one of {KINDS}")
        diag = d.get("diag")
        dense = d.get("dense")
        p = d.get("p")
        if p is None:
            if diag is not None:
                p = len(diag)
            elif dense is not None:
                p = len(dense)
            else:
                raise ConfigError("covariance spec needs 'p'")
        return cls(
            kind=kind,
            p=int(p),
            scale=float(d.get("scale", 1.0)),
            rho=None if d.get("rho") is None else float(d["rho"]),
            block_size=None if d.get("block_size") is None else int(d["block_size"]),
            diag=None if diag is None else np.asarray(diag, dtype=float),
            dense=None if dense is None else np.asarray(dense, dtype=float),
        )

    def realize(self) -> np.ndarray:
        return realize(self)


def _check_rho(rho):
    if rho is None or not (0.0 < rho < 1.0):
        raise ConfigError(f"rho must lie in (0, 1), got {rho}")


def _lag_matrix(p: int) -> np.ndarray:
    idx = np.arange(p)
    return np.abs(np.subtract.outer(idx, idx))


def check_psd(m: np.ndarray, what: str = "matrix") -> None:
    """Raise ValidationError unless `m` is exactly symmetric and PSD."""
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{what} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{what} has non-finite entries")
    if not np.array_equal(m, m.T):
        raise ValidationError(f"{what} is not symmetric")
    if m.shape[0] == 0:
        return
    eig = np.linalg.eigvalsh(m)
    top = max(abs(eig[-1]), abs(eig[0]))
    if eig[0] < -PSD_RTOL * top:
        raise ValidationError(
            f"{what} is not positive semidefinite: smallest eigenvalue {eig[0]:.6g} "
            f"(largest {eig[-1]:.6g})"
        )


def realize(spec: CovarianceSpec) -> np.ndarray:
    """Build the p x p matrix described by `spec`."""
    p = int(spec.p)
    if p < 1:
        raise ConfigError(f"p must be >= 1, got {p}")
    kind = spec.kind
    if kind == "identity-scaled":
        if not spec.scale > 0:
            raise ConfigError(f"scale must be > 0, got {spec.scale}")
        return np.eye(p) * float(spec.scale)
    if kind == "block-toeplitz":
        _check_rho(spec.rho)
        b = spec.block_size
        if b is None or b < 1 or p % b != 0:
            raise ConfigError(f"block_size {b} does not divide p={p}")
        if not spec.scale > 0:
            raise ConfigError(f"scale must be > 0, got {spec.scale}")
        block = float(spec.scale) * float(spec.rho) ** _lag_matrix(b)
        m = np.zeros((p, p))
        for start in range(0, p, b):
            m[start:start + b, start:start + b] = block
        return m
    if kind == "toeplitz-decay":
        _check_rho(spec.rho)
        return float(spec.rho) ** (1.0 + _lag_matrix(p))
    if kind == "diagonal-vector":
        d = np.asarray(spec.diag, dtype=float)
        if d.shape != (p,):
            raise ConfigError(f"diag must have length p={p}, got shape {d.shape}")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise ValidationError("diagonal variances must be finite and >= 0")
        return np.diag(d)
    if kind == "dense":
        m = np.array(spec.dense, dtype=float)
        if m.shape != (p, p):
            raise ConfigError(f"dense matrix must be {p}x{p}, got {m.shape}")
        check_psd(m, "dense covariance")
        return m
    raise ConfigError(f"unknown covariance kind {kind!r}")


def cholesky_factor(m) -> np.ndarray:
    """Lower-triangular L with L @ L.T == m, also for singular PSD input.

    LAPACK is tried first. When it rejects the matrix (zero or tiny pivots),
    an outer-product Cholesky is run that zeros columns whose pivot is
    numerically zero. A clearly negative pivot raises NumericError with its
    index.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        pass

    p = m.shape[0]
    a = m.copy()
    L = np.zeros_like(a)
    scale = max(np.max(np.abs(np.diag(m))), np.finfo(float).tiny)
    tol = PSD_RTOL * scale
    for k in range(p):
        d = a[k, k]
        if d < -tol:
            raise NumericError(f"matrix is indefinite: pivot {k} equals {d:.6g}")
        if d <= tol:
            if np.max(np.abs(a[k + 1:, k]), initial=0.0) > np.sqrt(tol) * np.sqrt(scale):
                raise NumericError(f"matrix is indefinite: zero pivot {k} with nonzero column")
            continue
        root = np.sqrt(d)
        L[k, k] = root
        col = a[k + 1:, k] / root
        L[k + 1:, k] = col
        a[k + 1:, k + 1:] -= np.outer(col, col)
    return L
