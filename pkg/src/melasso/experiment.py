"""Monte Carlo experiment pipelines and fitting of user-supplied files.

Every replicate owns an independent random stream derived from the root
seed, and results are reduced in replicate order, so output does not depend
on the number of worker processes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .corrected import CorrectedConfig, CorrectedProblem, corrected_lasso_constrained, kkt_residual_corrected
from .covariance import CovarianceSpec
from .diagnostics import DiagnosticsReport, diagnose, selection_metrics
from .errors import ConfigError, ContractError, ValidationError
from .glm import GlmConfig, conditional_score_lasso, naive_glm_lasso
from .lasso import LassoConfig, kkt_residual_naive, lambda_grid, naive_lasso
from .report import ReplicateRecord, aggregate, write_csv, write_json
from .results import FitResult
from .simulate import draw_model, replicate_seed, simulate_glm, simulate_linear
from .tuning import LOSSES, CvPlan, cv_select, elbow_grid, elbow_select, fold_assignment, kappa_grid

SCENARIOS = ("table1", "table2", "table3", "roc-logistic", "custom")

TABLE_COLUMNS = [
    "scenario", "s0", "sigma_u_sq", "method", "replicates", "nonconverged",
    "tp_mean", "tp_se", "fp_mean", "fp_se", "l2_err_mean", "l2_err_se", "l1_err_mean", "l1_err_se",
    "config_hash", "seed",
]
REPLICATE_COLUMNS = [
    "replicate", "method", "tuning", "tp", "fp", "sign_correct", "l1_err", "l2_err", "converged",
    "config_hash", "seed",
]
ROC_COLUMNS = [
    "kappa", "method", "replicates", "nonconverged", "tpr_mean", "fpr_mean", "tp_mean", "fp_mean",
    "l1_err_mean", "l1_err_se", "config_hash", "seed",
]


@dataclass
class ExperimentConfig:
    """One simulation setting.

    sigma_xx / sigma_uu are only read for the "custom" scenario; the named
    scenarios build them from p, sigma_u_sq, block_size and rho_xx.
    kappa_values is the constraint grid for the ROC sweep (None: default grid).
    cv_loss is the held-out loss used to tune the corrected lasso.
    """

    scenario: str = "table1"
    n: int = 100
    p: int = 500
    s0: int = 5
    sigma_u_sq: float = 0.2
    replicates: int = 50
    seed: int = 0
    folds: int = 10
    n_lambda: int = 100
    n_kappa: int = 100
    cv_loss: str = "corrected"
    coef_sd: float | None = None
    sigma_eps: float = 0.1
    randomize_support: bool | None = None
    redraw_model: bool = True
    block_size: int = 50
    rho_xx: float = 0.8
    sigma_xx: dict | None = None
    sigma_uu: dict | None = None
    kappa_values: list | None = None
    lasso: LassoConfig = field(default_factory=LassoConfig)
    corrected: CorrectedConfig = field(default_factory=CorrectedConfig)
    glm: GlmConfig = field(default_factory=GlmConfig)
    output_dir: str = "results"
    threads: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")
        if not 0 <= self.s0 <= self.p:
            raise ConfigError(f"s0 must lie in [0, p={self.p}], got {self.s0}")
        if self.n < self.folds:
            raise ConfigError(f"n={self.n} is smaller than the number of folds {self.folds}")
        if self.sigma_u_sq < 0:
            raise ConfigError(f"sigma_u_sq must be >= 0, got {self.sigma_u_sq}")
        if self.scenario == "custom" and self.sigma_uu is None:
            raise ConfigError("custom scenario needs a sigma_uu covariance spec")
        if self.cv_loss not in LOSSES:
            raise ConfigError(f"cv_loss must be one of {LOSSES}, got {self.cv_loss!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        for name, cls in (("lasso", LassoConfig), ("corrected", CorrectedConfig), ("glm", GlmConfig)):
            v = getattr(self, name)
            if isinstance(v, dict):
                setattr(self, name, _sub_config(cls, v, name))

    @property
    def is_roc(self) -> bool:
        return self.scenario == "roc-logistic"

    def resolved_coef_sd(self) -> float:
        if self.coef_sd is not None:
            return float(self.coef_sd)
        return 5.0 if self.is_roc else 2.0

    def resolved_randomize_support(self) -> bool:
        if self.randomize_support is not None:
            return bool(self.randomize_support)
        return not self.is_roc

    def covariances(self) -> tuple[CovarianceSpec, CovarianceSpec]:
        p, s2 = self.p, float(self.sigma_u_sq)
        if self.scenario == "custom":
            sxx = CovarianceSpec.from_dict(self.sigma_xx) if self.sigma_xx else CovarianceSpec.identity(p)
            return sxx, CovarianceSpec.from_dict(self.sigma_uu)
        if self.scenario == "table2":
            sxx = CovarianceSpec.block_toeplitz(p, self.block_size, self.rho_xx)
        else:
            sxx = CovarianceSpec.identity(p)
        if s2 == 0.0:
            suu = CovarianceSpec.zeros(p)
        elif self.scenario == "table3":
            suu = CovarianceSpec.toeplitz_decay(p, s2)
        else:
            suu = CovarianceSpec.identity(p, s2)
        return sxx, suu

    def roc_kappas(self) -> np.ndarray:
        if self.kappa_values is not None:
            k = np.asarray(self.kappa_values, dtype=float)
        else:
            k = np.linspace(0.0, 4.0 * self.resolved_coef_sd(), 21)
        if k.size == 0 or np.any(k < 0) or np.any(np.diff(k) <= 0):
            raise ConfigError("ROC kappa grid must be non-empty, non-negative and strictly increasing")
        return k

    def to_dict(self) -> dict:
        d = asdict(self)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def config_hash(self) -> str:
        """Digest of everything that affects results (not output_dir or threads)."""
        d = self.to_dict()
        d.pop("output_dir")
        d.pop("threads")
        blob = json.dumps(d, sort_keys=True, default=_plain)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _sub_config(cls, d, name):
    known = {f.name for f in fields(cls)}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown {name} options: {sorted(unknown)}")
    return cls(**d)


def _plain(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o))


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.from_dict(d)


# ---------------------------------------------------------------------------
# linear tables


def _model_for(config: ExperimentConfig, r: int, seeds):
    sxx, suu = config.covariances()
    model_seed = seeds[0] if config.redraw_model else np.random.SeedSequence(config.seed, spawn_key=(2**32 - 1,))
    return draw_model(config.p, config.s0, config.resolved_coef_sd(), config.resolved_randomize_support(),
                      seed=model_seed, sigma_eps=config.sigma_eps, sigma_xx=sxx, sigma_uu=suu)


def _record(r, method, tuning, beta, beta0, converged, t0):
    m = selection_metrics(beta, beta0)
    return ReplicateRecord(r, method, float(tuning), m.tp, m.fp, m.sign_correct, m.l1_err, m.l2_err,
                           bool(converged), time.perf_counter() - t0)


def linear_replicate(config: ExperimentConfig, r: int) -> list[ReplicateRecord]:
    """Draw, simulate, fit both estimators by 10-fold CV, and score them."""
    seeds = replicate_seed(config.seed, r).spawn(3)
    model = _model_for(config, r, seeds)
    ds = simulate_linear(model, config.n, center=True, seed=seeds[1])
    W, y = ds.W, ds.y
    Suu = model.sigma_uu.realize()
    assignment = fold_assignment(config.n, config.folds, seeds[2])

    t0 = time.perf_counter()
    lam_plan = CvPlan(lambda_grid(W, y, config.n_lambda), config.folds, assignment=assignment)
    lam_cv = cv_select("naive-lasso", W, y, lam_plan, lasso_config=config.lasso)
    naive = naive_lasso(W, y, lam_cv.best, config.lasso)
    out = [_record(r, "naive", lam_cv.best, naive.beta, model.beta0, naive.converged, t0)]

    t0 = time.perf_counter()
    R = 2.0 * float(np.abs(naive.beta).sum())
    if R == 0.0:
        # nothing selected by the naive lasso: the corrected grid collapses to zero
        out.append(_record(r, "corrected", 0.0, np.zeros(config.p), model.beta0, True, t0))
        return out
    k_plan = CvPlan(kappa_grid(R, config.n_kappa), config.folds, loss=config.cv_loss, assignment=assignment)
    k_cv = cv_select("corrected-ccl", W, y, k_plan, sigma_uu=Suu, corrected_config=config.corrected)
    beta, _, conv, *_ = CorrectedProblem(W, y, Suu).solve(k_cv.best, 0.0, config.corrected)
    out.append(_record(r, "corrected", k_cv.best, beta, model.beta0, conv, t0))
    return out


def _map_replicates(fn, config: ExperimentConfig) -> list:
    reps = range(config.replicates)
    if config.threads > 1 and config.replicates > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            return list(pool.map(fn, [config] * config.replicates, reps))
    return [fn(config, r) for r in reps]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[ReplicateRecord]
    table: list[dict]
    paths: dict = field(default_factory=dict)


def summary_rows(config: ExperimentConfig, records) -> list[dict]:
    h, rows = config.config_hash(), []
    summ = aggregate(records)
    for method in ("naive", "corrected"):
        if method not in summ:
            continue
        s = summ[method]
        row = {"scenario": config.scenario, "s0": config.s0, "sigma_u_sq": float(config.sigma_u_sq),
               "method": method, "replicates": s.n, "nonconverged": s.n_nonconverged,
               "config_hash": h, "seed": config.seed}
        for k in ("tp", "fp", "l2_err", "l1_err"):
            row[f"{k}_mean"] = s.mean[k]
            row[f"{k}_se"] = s.se[k]
        rows.append(row)
    return rows


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Run a linear table scenario and write `table.csv`, `replicates.csv` and `table.json`."""
    if config.is_roc:
        raise ConfigError("use run_roc for the roc-logistic scenario")
    records = [rec for reps in _map_replicates(linear_replicate, config) for rec in reps]
    table = summary_rows(config, records)
    res = ExperimentResult(config, records, table)
    if write:
        res.paths = _write_outputs(config, table, TABLE_COLUMNS, records, "table")
    return res


def _write_outputs(config, table, columns, records, stem):
    out = Path(config.output_dir)
    h = config.config_hash()
    paths = {stem: write_csv(out / f"{stem}.csv", table, columns)}
    if records:
        rows = [dict(rec.as_row(), config_hash=h, seed=config.seed) for rec in records]
        paths["replicates"] = write_csv(out / f"{stem}_replicates.csv", rows, REPLICATE_COLUMNS)
    cfg = config.to_dict()
    cfg.pop("threads")
    paths["json"] = write_json(out / f"{stem}.json", {"config": cfg, "config_hash": h, "rows": table})
    return paths


# ---------------------------------------------------------------------------
# logistic ROC sweep


def roc_replicate(config: ExperimentConfig, r: int) -> list[ReplicateRecord]:
    """Naive and conditional-score fits over the whole kappa grid for one replicate.

    Fits run from the smallest kappa upward, each warm-started at the
    previous solution.
    """
    seeds = replicate_seed(config.seed, r).spawn(3)
    model = _model_for(config, r, seeds)
    ds = simulate_glm(model, config.n, "logistic", seed=seeds[1])
    Suu = model.sigma_uu.realize()
    out = []
    for method in ("naive", "corrected"):
        beta, mu = np.zeros(config.p), 0.0
        for kappa in config.roc_kappas():
            t0 = time.perf_counter()
            if method == "naive":
                fit = naive_glm_lasso(ds.W, ds.y, kappa, config.glm, "logistic", beta, mu)
            else:
                fit = conditional_score_lasso("logistic", ds.W, ds.y, Suu, kappa, config.glm, beta, mu)
            beta, mu = fit.beta, fit.intercept
            out.append(_record(r, method, kappa, beta, model.beta0, fit.converged, t0))
    return out


def roc_rows(config: ExperimentConfig, records) -> list[dict]:
    s0, p = config.s0, config.p
    h, rows = config.config_hash(), []
    for method in ("naive", "corrected"):
        for kappa in config.roc_kappas():
            recs = [x for x in records if x.method == method and x.tuning == float(kappa)]
            s = aggregate(recs)[method]
            rows.append({
                "kappa": float(kappa), "method": method, "replicates": s.n, "nonconverged": s.n_nonconverged,
                "tpr_mean": s.mean["tp"] / s0 if s0 else 0.0,
                "fpr_mean": s.mean["fp"] / (p - s0) if p > s0 else 0.0,
                "tp_mean": s.mean["tp"], "fp_mean": s.mean["fp"],
                "l1_err_mean": s.mean["l1_err"], "l1_err_se": s.se["l1_err"],
                "config_hash": h, "seed": config.seed,
            })
    return rows


def run_roc(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Logistic ROC / l1-error sweep; writes `roc.csv`, `roc_replicates.csv` and `roc.json`."""
    if not config.is_roc:
        raise ConfigError(f"run_roc needs scenario 'roc-logistic', got {config.scenario!r}")
    records = [rec for reps in _map_replicates(roc_replicate, config) for rec in reps]
    table = roc_rows(config, records)
    res = ExperimentResult(config, records, table)
    if write:
        res.paths = _write_outputs(config, table, ROC_COLUMNS, records, "roc")
    return res


# ---------------------------------------------------------------------------
# user data

METHODS = ("naive", "corrected", "cs-glm")
FAMILIES = ("linear", "logistic", "poisson")
NOISE_FILTER_RATIO = 0.5


@dataclass
class FitRequest:
    """method: naive | corrected | cs-glm; family: linear | logistic | poisson.

    Exactly one of lam, kappa, cv, elbow selects the tuning value. With the
    elbow rule the grid is elbow_grid(scale) where scale defaults to the l1
    norm of a cross-validated naive linear lasso fit. cv_loss is the held-out
    loss for the corrected lasso; the naive lasso always uses squared error.
    """

    method: str = "naive"
    family: str = "linear"
    lam: float | None = None
    kappa: float | None = None
    cv: bool = False
    elbow: bool = False
    filter_noise: bool = False
    folds: int = 10
    seed: int = 0
    elbow_scale: float | None = None
    cv_loss: str = "corrected"
    lasso: LassoConfig = field(default_factory=LassoConfig)
    corrected: CorrectedConfig = field(default_factory=CorrectedConfig)
    glm: GlmConfig = field(default_factory=GlmConfig)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        chosen = [k for k, v in (("lambda", self.lam), ("kappa", self.kappa)) if v is not None]
        chosen += [k for k, v in (("cv", self.cv), ("elbow", self.elbow)) if v]
        if len(chosen) != 1:
            raise ConfigError(f"choose exactly one of --lambda, --kappa, --cv, --elbow (got {chosen or 'none'})")
        if self.cv_loss not in LOSSES:
            raise ConfigError(f"cv_loss must be one of {LOSSES}, got {self.cv_loss!r}")
        if self.method == "cs-glm":
            if self.family == "linear":
                raise ConfigError("cs-glm needs --family logistic or poisson")
            if self.lam is not None or self.cv:
                raise ConfigError("cs-glm is tuned by --kappa or --elbow")
        else:
            if self.family != "linear":
                raise ConfigError(f"method {self.method} fits linear models only")
            if self.elbow:
                raise ConfigError("the elbow rule applies to cs-glm")
            if self.method == "naive" and self.kappa is not None:
                raise ConfigError("the naive lasso is tuned by --lambda or --cv")
            if self.method == "corrected" and self.lam is not None:
                raise ConfigError("the corrected lasso is tuned by --kappa or --cv")


@dataclass
class FileFit:
    fit: FitResult
    diagnostics: DiagnosticsReport
    names: list[str]
    kept: np.ndarray
    center: np.ndarray
    scale: np.ndarray
    trace: list[dict] = field(default_factory=list)
    low_confidence: bool = False

    def to_dict(self) -> dict:
        return {
            "fit": self.fit.to_dict(),
            "diagnostics": self.diagnostics.to_dict(),
            "covariates": self.names,
            "kept": [int(j) for j in self.kept],
            "selected": [self.names[j] for j in np.flatnonzero(self.fit.beta)],
            "column_mean": [float(v) for v in self.center],
            "column_sd": [float(v) for v in self.scale],
            "elbow_low_confidence": self.low_confidence,
        }


def _sigma_matrix(source, p: int) -> np.ndarray:
    S = np.asarray(source, dtype=float)
    if S.ndim == 0:
        if S < 0:
            raise ValidationError(f"measurement error variance must be >= 0, got {float(S)}")
        return float(S) * np.eye(p)
    if S.ndim == 1:
        if S.size != p:
            raise ValidationError(f"sigma_uu diagonal has {S.size} entries, W has {p} columns")
        bad = np.flatnonzero(S < 0)
        if bad.size:
            raise ValidationError(f"negative measurement error variance {S[bad[0]]} at position {bad[0] + 1}")
        return np.diag(S)
    if S.shape != (p, p):
        raise ValidationError(f"sigma_uu is {S.shape[0]}x{S.shape[1]}, W has {p} columns")
    bad = np.flatnonzero(np.diag(S) < 0)
    if bad.size:
        raise ValidationError(f"negative measurement error variance at diagonal entry {bad[0] + 1}")
    return S


def _naive_cv_fit(W, y, req: FitRequest, assignment):
    plan = CvPlan(lambda_grid(W, y), req.folds, assignment=assignment)
    best = cv_select("naive-lasso", W, y, plan, lasso_config=req.lasso).best
    return naive_lasso(W, y, best, req.lasso)


def fit_arrays(W, y, sigma_uu, request: FitRequest, names: list[str] | None = None) -> FileFit:
    """Standardize, optionally filter, fit and diagnose in-memory data.

    W columns are scaled to mean 0 and sd 1 (1/n convention) and Sigma_uu is
    rescaled to match, Sigma_jk / (sd_j sd_k). For linear fits y is centered.
    The coefficient vector is on the standardized scale and has one entry per
    original column; filtered columns are exactly zero.
    """
    W = np.asarray(W, dtype=float)
    y = np.asarray(y, dtype=float)
    if W.ndim != 2:
        raise ValidationError("W must be a 2-d array")
    n, p = W.shape
    if y.shape != (n,):
        raise ValidationError(f"y has {y.size} entries, W has {n} rows")
    names = list(names) if names is not None else [f"x{j + 1}" for j in range(p)]
    S = _sigma_matrix(sigma_uu, p)
    center = W.mean(axis=0)
    scale = W.std(axis=0)
    flat = np.flatnonzero(scale == 0)
    if flat.size:
        raise ValidationError(f"column {flat[0] + 1} ({names[flat[0]]}) is constant")
    Z = (W - center) / scale
    S_std = S / np.outer(scale, scale)
    kept = np.arange(p)
    if request.filter_noise:
        kept = np.flatnonzero(np.diag(S_std) < NOISE_FILTER_RATIO)
        if kept.size == 0:
            raise ValidationError(
                "every covariate has measurement error variance >= half its total variance; empty model"
            )
    Zk = np.ascontiguousarray(Z[:, kept])
    Sk = S_std[np.ix_(kept, kept)]
    yk = y - y.mean() if request.family == "linear" else y

    trace: list[dict] = []
    low_conf = False
    assignment = fold_assignment(n, request.folds, request.seed) if (request.cv or request.elbow) else None
    m = request.method
    if m == "naive":
        if request.cv:
            fit = _naive_cv_fit(Zk, yk, request, assignment)
        else:
            fit = naive_lasso(Zk, yk, request.lam, request.lasso)
    elif m == "corrected":
        prob = CorrectedProblem(Zk, yk, Sk)
        if request.cv:
            R = 2.0 * float(np.abs(_naive_cv_fit(Zk, yk, request, assignment).beta).sum())
            if R == 0.0:
                raise ValidationError("the naive lasso selects nothing; no constraint grid to search")
            plan = CvPlan(kappa_grid(R), request.folds, loss=request.cv_loss, assignment=assignment)
            res = cv_select("corrected-ccl", Zk, yk, plan, sigma_uu=Sk, corrected_config=request.corrected)
            trace = [{"kappa": float(k), "cv_loss": float(c)} for k, c in zip(res.grid, res.curve)]
            kappa = res.best
        else:
            kappa = request.kappa
        fit = corrected_lasso_constrained(prob, None, None, kappa, request.corrected)
    else:
        fam = request.family
        if request.elbow:
            scale_l1 = request.elbow_scale
            if scale_l1 is None:
                scale_l1 = float(np.abs(_naive_cv_fit(Zk, y - y.mean(), request, assignment).beta).sum())
            if not scale_l1 > 0:
                raise ValidationError("elbow grid scale is zero; pass an explicit scale")
            grid = elbow_grid(scale_l1)
            nnz, fits = [], []
            beta, mu = None, 0.0
            for k in grid:
                f = conditional_score_lasso(fam, Zk, yk, Sk, float(k), request.glm, beta, mu)
                beta, mu = f.beta, f.intercept
                fits.append(f)
                nnz.append(f.nnz)
            choice = elbow_select(grid, np.array(nnz))
            trace = [{"kappa": float(k), "nnz": int(c)} for k, c in zip(grid, nnz)]
            fit, low_conf = fits[choice.index], choice.low_confidence
        else:
            fit = conditional_score_lasso(fam, Zk, yk, Sk, request.kappa, request.glm)

    kkt = None
    try:
        if m == "naive":
            kkt = kkt_residual_naive(Zk, yk, fit)
        elif m == "corrected":
            kkt = kkt_residual_corrected(Zk, yk, Sk, fit)
    except ContractError:
        kkt = None
    active = fit.active_set
    diag = diagnose(Zk, Sk, active, np.sign(fit.beta[active]), kkt_residual=kkt)
    diag.support = [int(kept[j]) for j in active]

    full = np.zeros(p)
    full[kept] = fit.beta
    fit = replace(fit, beta=full)
    return FileFit(fit, diag, names, kept, center, scale, trace, low_conf)


def read_matrix_csv(path, what: str = "W") -> tuple[list[str], np.ndarray]:
    """Numeric CSV with a mandatory header row. Errors name 1-based data row and column."""
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise ValidationError(f"cannot open {what} file {path}: {exc}") from exc
    with fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{what} file {path} is empty")
    header, body = [h.strip() for h in rows[0]], rows[1:]
    if not body:
        raise ValidationError(f"{what} file {path} has a header but no data")
    out = np.empty((len(body), len(header)))
    for i, row in enumerate(body, start=1):
        if len(row) != len(header):
            raise ValidationError(f"{what}: row {i} has {len(row)} fields, header has {len(header)}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise ValidationError(f"{what}: non-numeric value {cell!r} at row {i}, column {j + 1}") from None
            if not np.isfinite(v):
                raise ValidationError(f"{what}: non-finite value at row {i}, column {j + 1}")
            out[i - 1, j] = v
    return header, out


def read_vector_csv(path, what: str) -> np.ndarray:
    _, m = read_matrix_csv(path, what)
    if m.shape[1] == 1:
        return m[:, 0]
    if m.shape[0] == 1:
        return m[0]
    raise ValidationError(f"{what} must be a single column, got {m.shape[1]} columns")


def fit_file(W_csv, y_csv, sigma_uu_source, request: FitRequest) -> FileFit:
    """Fit data stored as CSV.

    sigma_uu_source: a float (same variance for every covariate, raw scale),
    or a path to a CSV holding either one column of p variances or a dense
    p x p matrix, each with a header row.
    """
    names, W = read_matrix_csv(W_csv, "W")
    y = read_vector_csv(y_csv, "y")
    if y.size != W.shape[0]:
        raise ValidationError(f"y has {y.size} rows, W has {W.shape[0]}")
    if isinstance(sigma_uu_source, (int, float)):
        S = float(sigma_uu_source)
    else:
        _, m = read_matrix_csv(sigma_uu_source, "sigma_uu")
        if m.shape == (W.shape[1], W.shape[1]) and W.shape[1] > 1:
            S = m
        else:
            S = read_vector_csv(sigma_uu_source, "sigma_uu")
    return fit_arrays(W, y, S, request, names)
