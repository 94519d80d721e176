"""Monte Carlo experiments: configuration, replication, aggregation and CSV I/O."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .asymptotics import K_and_V2, lambda_cov, limit_values, sigma_adot_sq, V0_matrix
from .errors import DomainError, EstimationError, GainLearnError
from .estimators import alpha_hat, joint_kappa, ols_lambda, two_step, nls_theta
from .lemmas import LemmaCheckResult
from .model import ModelParams, NoiseSource, SimPath, filter_candidate, simulate_path
from .parallel import map_ordered

__all__ = [
    "ESTIMATORS",
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "McCell",
    "McReport",
    "RawCell",
    "collect_estimates",
    "aggregate",
    "run_experiment",
    "emit_csv",
    "read_csv",
    "emit_path_csv",
    "read_path_csv",
    "emit_lemma_csv",
    "print_limits",
]

ESTIMATORS = ("nls_theta", "two_step", "infeasible_ols", "joint_kappa")
COORDS = {
    "nls_theta": ("theta",),
    "two_step": ("delta", "beta"),
    "infeasible_ols": ("delta", "beta"),
    "joint_kappa": ("beta", "theta", "delta"),
}
CSV_COLUMNS = ("n", "estimator", "coordinate", "mean", "bias", "sd", "scaled_sd", "theory_sd",
               "ratio", "coverage_95", "reps_used", "failures")
_Z95 = 1.959963984540054


class ConfigError(DomainError):
    """Malformed experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Monte Carlo experiment description.

    ``n_values`` is stored sorted, so the order given does not matter.
    ``a_start_policy`` is ``"z1"``, ``"zero"`` or a number; ``alpha_policy`` is
    ``"sample_mean"`` or ``"true_alpha"``; ``ci_variance`` is ``"oracle"``
    (true-parameter variances) or ``"plugin"`` (variances at the estimates).
    """

    params: ModelParams
    n_values: tuple[int, ...]
    reps: int
    master_seed: int = 0
    estimators: tuple[str, ...] = ESTIMATORS
    theta_grid_size: int = 64
    tol_theta: float = 1e-7
    a_start_policy: str | float = "z1"
    alpha_policy: str = "sample_mean"
    output_path: str | None = None
    threads: int = 1
    include_boundary: bool = False
    beta_bounds: tuple[float, float] = (-0.95, 0.95)
    ci_variance: str = "oracle"

    def __post_init__(self) -> None:
        ns = tuple(sorted(int(n) for n in self.n_values))
        if not ns or ns[0] < 3 or len(set(ns)) != len(ns):
            raise ConfigError("n_values must be distinct integers >= 3")
        object.__setattr__(self, "n_values", ns)
        if int(self.reps) < 1:
            raise ConfigError("reps must be >= 1")
        ests = tuple(self.estimators)
        if not ests or any(e not in ESTIMATORS for e in ests) or len(set(ests)) != len(ests):
            raise ConfigError(f"estimators must be a nonempty subset of {ESTIMATORS}")
        object.__setattr__(self, "estimators", tuple(e for e in ESTIMATORS if e in ests))
        if isinstance(self.a_start_policy, str) and self.a_start_policy not in ("z1", "zero"):
            raise ConfigError("a_start_policy must be 'z1', 'zero' or a number")
        if self.alpha_policy not in ("sample_mean", "true_alpha"):
            raise ConfigError("alpha_policy must be 'sample_mean' or 'true_alpha'")
        if self.ci_variance not in ("oracle", "plugin"):
            raise ConfigError("ci_variance must be 'oracle' or 'plugin'")
        if self.theta_grid_size < 3 or not self.tol_theta > 0 or self.threads < 1:
            raise ConfigError("theta_grid_size >= 3, tol_theta > 0 and threads >= 1 required")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")


_PARAM_KEYS = {f.name for f in fields(ModelParams)}


def _parse_bool(v: str) -> bool:
    low = v.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def _int_list(v: str) -> tuple[int, ...]:
    return tuple(int(float(x)) for x in v.replace(",", " ").split())


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment.

    Model parameters use dotted keys (``params.theta0 = 2.0``); lists are comma
    or space separated.
    """
    pkw: dict = {}
    kw: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        try:
            if key.startswith("params."):
                name = key[len("params."):]
                if name not in _PARAM_KEYS:
                    raise ConfigError(f"line {lineno}: unknown parameter {name!r}")
                pkw[name] = float(val)
            elif key == "n_values":
                kw[key] = _int_list(val)
            elif key in ("reps", "master_seed", "theta_grid_size", "threads"):
                kw[key] = int(float(val)) if key != "master_seed" else int(val)
            elif key == "tol_theta":
                kw[key] = float(val)
            elif key == "estimators":
                kw[key] = tuple(val.replace(",", " ").split())
            elif key == "a_start_policy":
                kw[key] = val if val in ("z1", "zero") else float(val)
            elif key in ("alpha_policy", "output_path", "ci_variance"):
                kw[key] = val
            elif key == "include_boundary":
                kw[key] = _parse_bool(val)
            elif key == "beta_bounds":
                lo, hi = (float(x) for x in val.replace(",", " ").split())
                kw[key] = (lo, hi)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {val!r}") from exc
    for req in ("theta0", "beta0", "delta0"):
        if req not in pkw:
            raise ConfigError(f"missing params.{req}")
    for req in ("n_values", "reps"):
        if req not in kw:
            raise ConfigError(f"missing {req}")
    return ExperimentConfig(params=ModelParams(**pkw), **kw)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return parse_config(text)


# ---------------------------------------------------------------------------
# Replication
# ---------------------------------------------------------------------------


@dataclass
class RawCell:
    """Per-replication estimates for one ``(n, estimator)``; NaN rows are failures.

    ``ci_sd`` holds the per-replication asymptotic sd used for coverage (equal
    to the oracle sd unless plug-in variances are requested).
    """

    n: int
    estimator: str
    coords: tuple[str, ...]
    truth: np.ndarray
    theory_sd: np.ndarray
    estimates: np.ndarray
    ci_sd: np.ndarray
    failed: np.ndarray
    boundary: np.ndarray


def _theory_sd(est: str, theta0: float, beta0: float, alpha0: float, su: float, se: float) -> np.ndarray:
    nan = math.nan
    if est == "nls_theta":
        return np.array([su / math.sqrt(sigma_adot_sq(theta0, beta0, se))])
    if est == "two_step":
        return np.sqrt(np.diag(lambda_cov(theta0, beta0, alpha0, su, se)))
    if est == "infeasible_ols":
        return np.sqrt(np.diag(V0_matrix(theta0, beta0, alpha0)))
    if beta0 == 0.0:
        return np.array([nan, nan, nan])
    V2 = K_and_V2(theta0, beta0, se)[1]
    return np.array([math.sqrt(V2[0, 0]), math.sqrt(V2[1, 1]), abs(alpha0) * math.sqrt(V2[0, 0])])


def _plugin_sd(est: str, theta: float, beta: float, alpha: float, su: float, se: float) -> np.ndarray:
    # estimates outside the valid region give negative variances; report NaN
    try:
        with np.errstate(invalid="ignore"):
            return _theory_sd(est, theta, beta, alpha, su, se)
    except (GainLearnError, ZeroDivisionError, ValueError):
        return np.full(len(COORDS[est]), math.nan)


def _a_start(policy, z: np.ndarray) -> float:
    if policy == "z1":
        return float(z[0])
    if policy == "zero":
        return 0.0
    return float(policy)


def _replicate(cfg: ExperimentConfig, path: SimPath) -> dict[tuple[int, str], tuple]:
    p = cfg.params
    out: dict[tuple[int, str], tuple] = {}
    for n in cfg.n_values:
        sp = path.prefix(n)
        y, z = sp.y, sp.z
        a0 = _a_start(cfg.a_start_policy, z)
        step = None
        try:
            fit, lam = two_step(z, y, p.bounds, a0, cfg.theta_grid_size, cfg.tol_theta)
            path_hat = filter_candidate(fit.theta_hat, a0, y)
            resid = y - lam.delta_hat - lam.beta_hat * path_hat[:-1]
            step = (fit, lam, math.sqrt(fit.q_min / n), math.sqrt(float(resid @ resid) / n))
        except EstimationError:
            try:
                fit = nls_theta(z, y, p.bounds, a0, cfg.theta_grid_size, cfg.tol_theta)
            except EstimationError:
                fit = None
        for est in cfg.estimators:
            k = len(COORDS[est])
            res = (np.full(k, math.nan), np.full(k, math.nan), True, False)
            try:
                if est == "nls_theta" and fit is not None:
                    ci = np.full(1, math.nan)
                    if step is not None:
                        _, lam_, su_h, se_h = step
                        ci = _plugin_sd(est, fit.theta_hat, lam_.beta_hat, 0.0, su_h, se_h)
                    res = (np.array([fit.theta_hat]), ci, False, fit.at_boundary)
                elif est == "two_step" and step is not None:
                    fit_, lam_, su_h, se_h = step
                    al = lam_.delta_hat / (1.0 - lam_.beta_hat) if lam_.beta_hat < 1 else math.nan
                    ci = _plugin_sd(est, fit_.theta_hat, lam_.beta_hat, al, su_h, se_h)
                    res = (np.array([lam_.delta_hat, lam_.beta_hat]), ci, False, fit_.at_boundary)
                elif est == "infeasible_ols":
                    lam_ = ols_lambda(y, sp.a)
                    al = lam_.delta_hat / (1.0 - lam_.beta_hat) if lam_.beta_hat < 1 else math.nan
                    ci = _plugin_sd(est, p.theta0, lam_.beta_hat, al, p.sigma_u, p.sigma_eps)
                    res = (np.array([lam_.delta_hat, lam_.beta_hat]), ci, False, False)
                elif est == "joint_kappa":
                    alpha = p.alpha0 if cfg.alpha_policy == "true_alpha" else alpha_hat(y)
                    kf = joint_kappa(y, alpha, p.bounds, cfg.beta_bounds, cfg.theta_grid_size,
                                     cfg.tol_theta)
                    ci = _plugin_sd(est, kf.theta_hat, kf.beta_hat, alpha, p.sigma_u, p.sigma_eps)
                    res = (np.array([kf.beta_hat, kf.theta_hat, kf.delta_hat_implied]), ci, False,
                           kf.at_boundary)
            except EstimationError:
                pass
            out[(n, est)] = res
    return out


def collect_estimates(cfg: ExperimentConfig) -> dict[tuple[int, str], RawCell]:
    """Run all replications and return per-cell raw estimates.

    Replication ``r`` simulates one path of length ``max(n_values)`` from
    ``NoiseSource(master_seed, r)``; smaller sample sizes use its prefixes.
    """
    p = cfg.params
    n_max = cfg.n_values[-1]

    def one(r: int):
        return _replicate(cfg, simulate_path(p, n_max, NoiseSource(cfg.master_seed, r)))

    results = map_ordered(one, range(cfg.reps), cfg.threads)
    truths = {
        "nls_theta": np.array([p.theta0]),
        "two_step": np.array([p.delta0, p.beta0]),
        "infeasible_ols": np.array([p.delta0, p.beta0]),
        "joint_kappa": np.array([p.beta0, p.theta0, p.delta0]),
    }
    cells = {}
    for n in cfg.n_values:
        for est in cfg.estimators:
            rows = [res[(n, est)] for res in results]
            theory = _theory_sd(est, p.theta0, p.beta0, p.alpha0, p.sigma_u, p.sigma_eps)
            est_arr = np.array([r[0] for r in rows])
            ci = np.array([r[1] for r in rows]) if cfg.ci_variance == "plugin" else np.tile(theory, (cfg.reps, 1))
            failed = np.array([r[2] for r in rows])
            boundary = np.array([r[3] for r in rows])
            cells[(n, est)] = RawCell(n, est, COORDS[est], truths[est], theory, est_arr, ci, failed, boundary)
    return cells


@dataclass(frozen=True)
class McCell:
    n: int
    estimator: str
    coordinate: str
    mean: float
    bias: float
    sd: float
    scaled_sd: float
    theory_sd: float
    ratio: float
    coverage_95: float
    reps_used: int
    failures: int


@dataclass
class McReport:
    cells: list[McCell] = field(default_factory=list)

    def cell(self, n: int, estimator: str, coordinate: str) -> McCell:
        for c in self.cells:
            if c.n == n and c.estimator == estimator and c.coordinate == coordinate:
                return c
        raise KeyError((n, estimator, coordinate))

    def to_text(self) -> str:
        buf = io.StringIO()
        _write_report(report=self, fh=buf)
        return buf.getvalue()


def aggregate(raw: dict[tuple[int, str], RawCell], include_boundary: bool = False) -> McReport:
    """Summarize raw estimates. Boundary hits count as failures unless ``include_boundary``."""
    out = []
    for (n, est), rc in sorted(raw.items(), key=lambda kv: (kv[0][0], ESTIMATORS.index(kv[0][1]))):
        bad = rc.failed if include_boundary else rc.failed | rc.boundary
        good = ~bad
        used = int(good.sum())
        scale = math.sqrt(math.log(n))
        for k, coord in enumerate(rc.coords):
            x = rc.estimates[good, k]
            mean = float(x.mean()) if used else math.nan
            sd = float(x.std(ddof=1)) if used > 1 else math.nan
            th = float(rc.theory_sd[k])
            ci = rc.ci_sd[good, k]
            if used and np.isfinite(th):
                cover = float(np.mean(np.abs(x - rc.truth[k]) * scale <= _Z95 * ci))
            else:
                cover = math.nan
            out.append(McCell(
                n=n, estimator=est, coordinate=coord, mean=mean, bias=mean - float(rc.truth[k]),
                sd=sd, scaled_sd=sd * scale, theory_sd=th,
                ratio=sd * scale / th if th > 0 else math.nan,
                coverage_95=cover, reps_used=used, failures=int(bad.sum()),
            ))
    return McReport(out)


def run_experiment(cfg: ExperimentConfig) -> McReport:
    """Run the experiment and write the report to ``cfg.output_path`` if set."""
    if cfg.output_path:
        # Fail before the expensive part when the destination is unusable.
        parent = Path(cfg.output_path).resolve().parent
        if not parent.is_dir():
            raise OSError(f"cannot write {cfg.output_path}: directory does not exist")
    report = aggregate(collect_estimates(cfg), cfg.include_boundary)
    if report.cells and all(c.reps_used == 0 for c in report.cells):
        raise EstimationError("all replications failed")
    if cfg.output_path:
        emit_csv(report, cfg.output_path)
    return report


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _write_report(report: McReport, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in report.cells:
        w.writerow([_fmt(getattr(c, k)) if k not in ("estimator", "coordinate") else getattr(c, k)
                    for k in CSV_COLUMNS])


def emit_csv(report: McReport, path: str | Path) -> None:
    """Write the report with a header row and 17 significant digits per float."""
    try:
        with open(path, "w", newline="") as fh:
            _write_report(report, fh)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def read_csv(path: str | Path) -> McReport:
    """Inverse of :func:`emit_csv`."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"{path}: unexpected header")
    cells = []
    for r in rows[1:]:
        d = dict(zip(CSV_COLUMNS, r))
        cells.append(McCell(
            n=int(d["n"]), estimator=d["estimator"], coordinate=d["coordinate"],
            **{k: float(d[k]) for k in CSV_COLUMNS[3:10]},
            reps_used=int(d["reps_used"]), failures=int(d["failures"]),
        ))
    return McReport(cells)


def emit_path_csv(path: SimPath, fh) -> None:
    """Write ``t, eps, u, a, y, z``; row ``t = 0`` carries only the initial state."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("t", "eps", "u", "a", "y", "z"))
    w.writerow(("0", "", "", _fmt(path.a[0]), "", ""))
    for t in range(1, path.n + 1):
        w.writerow((str(t), _fmt(path.eps[t - 1]), _fmt(path.u[t - 1]), _fmt(path.a[t]),
                    _fmt(path.y[t - 1]), _fmt(path.z[t - 1])))


def read_path_csv(fh) -> tuple[np.ndarray, np.ndarray]:
    """Read the ``y`` and ``z`` columns of a path CSV, skipping rows where they are blank."""
    reader = csv.DictReader(fh)
    if reader.fieldnames is None or not {"y", "z"} <= set(reader.fieldnames):
        raise ValueError("CSV must have y and z columns")
    y, z = [], []
    for row in reader:
        if row["y"] == "" or row["z"] == "":
            continue
        y.append(float(row["y"]))
        z.append(float(row["z"]))
    return np.array(y), np.array(z)


def emit_lemma_csv(results: list[LemmaCheckResult], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("lemma_id", "n", "finite_n_value", "limit_value", "abs_error", "passed"))
    for res in results:
        for lid, n, v, lim, err, ok in res.rows():
            w.writerow((lid, n, _fmt(v), _fmt(lim), _fmt(err), "true" if ok else "false"))


def print_limits(params: ModelParams) -> str:
    """Aligned two-column table of every closed-form limit at ``params``."""
    rows = limit_values(params).rows()
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v: .10g}" for k, v in rows)


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    """Copy of ``cfg`` with the non-None keyword values replaced."""
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
