"""ANCOVA group comparisons of spatio-semantic features.

Each feature is the response of its own linear model::

    feature ~ 1 + group + age + education + gender + unique_nodes

(``unique_nodes`` is dropped when it is itself the response).  The group
effect is tested with a one-degree-of-freedom partial F test and summarised
by estimated marginal means with covariates held at their grand means.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg

from .errors import InsufficientData, RankDeficient, SchemaError, TooFewRows
from .features import FEATURE_NAMES, FeatureVector
from .special import f_sf, t_ppf

log = logging.getLogger(__name__)

RANK_TOL = 1e-10
COVARIATES = ("age", "education", "gender")


class Group(IntEnum):
    UNIMPAIRED = 0
    IMPAIRED = 1

    @classmethod
    def parse(cls, text) -> "Group":
        key = str(text).strip().lower()
        aliases = {
            "unimpaired": cls.UNIMPAIRED, "0": cls.UNIMPAIRED, "control": cls.UNIMPAIRED,
            "impaired": cls.IMPAIRED, "1": cls.IMPAIRED,
        }
        if key not in aliases:
            raise ValueError(f"unknown group {text!r}")
        return aliases[key]


@dataclass(frozen=True)
class CohortRecord:
    transcript_id: str
    group: Group | None
    age: float | None
    education: float | None
    gender: int | None
    features: FeatureVector


@dataclass
class LinearModelFit:
    coefficients: np.ndarray
    residual_sum_squares: float
    coefficient_covariance: np.ndarray
    design_column_names: list[str]
    df_residual: int
    residuals: np.ndarray


def _column_names(p: int, names: Sequence[str] | None) -> list[str]:
    return list(names) if names is not None else [f"x{i}" for i in range(p)]


def ols_fit(design, response, column_names: Sequence[str] | None = None) -> LinearModelFit:
    """Least squares via column-pivoted QR.

    Raises ``RankDeficient`` naming the first column that lies in the span of
    the columns before it.  With ``n == p`` the fit interpolates; the
    coefficient covariance is then undefined and filled with NaN.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(response, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"design {X.shape} and response {y.shape} do not conform")
    n, p = X.shape
    names = _column_names(p, column_names)
    if n < p:
        raise TooFewRows(f"{n} rows cannot identify {p} coefficients")

    Q, R, piv = linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > RANK_TOL * diag[0])) if diag.size and diag[0] > 0 else 0
    if rank < p:
        raise RankDeficient(names[_first_dependent(X)])

    coef_p = linalg.solve_triangular(R, Q.T @ y)
    coef = np.empty(p)
    coef[piv] = coef_p
    resid = y - X @ coef
    rss = float(resid @ resid)
    df = n - p
    r_inv = linalg.solve_triangular(R, np.eye(p))
    unscaled_p = r_inv @ r_inv.T
    unscaled = np.empty((p, p))
    unscaled[np.ix_(piv, piv)] = unscaled_p
    sigma2 = rss / df if df > 0 else math.nan
    return LinearModelFit(coef, rss, unscaled * sigma2, names, df, resid)


def _first_dependent(X: np.ndarray) -> int:
    norms = np.linalg.norm(X, axis=0)
    R = linalg.qr(X, mode="r")[0]
    for k in range(X.shape[1]):
        if norms[k] == 0 or abs(R[k, k]) <= RANK_TOL * norms[k]:
            return k
    return X.shape[1] - 1


@dataclass
class AncovaResult:
    feature_name: str
    f_value: float = math.nan
    p_value: float = math.nan
    df_numerator: int = 1
    df_denominator: int = 0
    emm: dict[Group, float] = field(default_factory=dict)
    ci95: dict[Group, tuple[float, float]] = field(default_factory=dict)
    n_used: int = 0
    covariates_used: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def stars(self) -> str:
        return significance_stars(self.p_value)


def significance_stars(p: float) -> str:
    if p is None or math.isnan(p):
        return ""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def _covariate_value(rec: CohortRecord, name: str):
    if name == "unique_nodes":
        return rec.features.unique_nodes
    return getattr(rec, name)


def ancova_feature(
    records: Iterable[CohortRecord],
    feature_name: str,
    covariates: Sequence[str] = COVARIATES,
) -> AncovaResult:
    covariates = list(covariates)
    if feature_name != "unique_nodes":
        covariates.append("unique_nodes")
    result = AncovaResult(feature_name)

    used = []
    for rec in sorted(records, key=lambda r: r.transcript_id):
        value = rec.features.get(feature_name)
        if rec.group is None or value is None or (isinstance(value, float) and not math.isfinite(value)):
            continue
        if any(_covariate_value(rec, c) is None for c in covariates):
            continue
        used.append(rec)
    result.n_used = len(used)
    counts = {g: sum(1 for r in used if r.group == g) for g in Group}
    if min(counts.values()) < 2:
        raise InsufficientData(
            f"{feature_name}: need >= 2 records per group, have "
            f"{counts[Group.UNIMPAIRED]} unimpaired / {counts[Group.IMPAIRED]} impaired"
        )

    y = np.array([float(r.features.get(feature_name)) for r in used])
    group = np.array([float(r.group) for r in used])
    cov_cols = {c: np.array([float(_covariate_value(r, c)) for r in used]) for c in covariates}
    for name in list(cov_cols):
        if np.ptp(cov_cols[name]) == 0:
            del cov_cols[name]
            result.notes.append(f"{name} is constant and was dropped")

    while True:
        names = ["intercept", "group", *cov_cols]
        X = np.column_stack([np.ones_like(y), group, *cov_cols.values()])
        if X.shape[0] <= X.shape[1]:
            raise InsufficientData(f"{feature_name}: {X.shape[0]} records for {X.shape[1]} parameters")
        try:
            full = ols_fit(X, y, names)
            break
        except RankDeficient as exc:
            if exc.column in ("intercept", "group"):
                raise
            del cov_cols[exc.column]
            result.notes.append(f"{exc.column} is collinear with other columns and was dropped")
            log.warning("%s: dropped collinear covariate %s", feature_name, exc.column)

    reduced = ols_fit(np.delete(X, 1, axis=1), y, [n for n in names if n != "group"])
    df = full.df_residual
    result.df_denominator = df
    result.covariates_used = list(cov_cols)

    tss = float(np.sum((y - y.mean()) ** 2))
    diff = max(reduced.residual_sum_squares - full.residual_sum_squares, 0.0)
    if tss == 0 or diff <= 1e-12 * tss:
        f_value = 0.0
    elif full.residual_sum_squares <= 1e-14 * tss:
        f_value = math.inf
    else:
        f_value = diff / (full.residual_sum_squares / df)
    result.f_value = f_value
    result.p_value = f_sf(f_value, 1, df)

    t_crit = t_ppf(0.975, df)
    means = [float(col.mean()) for col in cov_cols.values()]
    for g in Group:
        x0 = np.array([1.0, float(g), *means])
        emm = float(x0 @ full.coefficients)
        se = math.sqrt(max(float(x0 @ full.coefficient_covariance @ x0), 0.0))
        result.emm[g] = emm
        result.ci95[g] = (emm - t_crit * se, emm + t_crit * se)
    return result


def ancova_table(
    records: Sequence[CohortRecord],
    feature_names: Sequence[str] = FEATURE_NAMES,
    covariates: Sequence[str] = COVARIATES,
) -> list[AncovaResult]:
    """One result per feature, in table order; failures are recorded in-row."""
    records = list(records)
    rows = []
    for name in feature_names:
        try:
            rows.append(ancova_feature(records, name, covariates))
        except (InsufficientData, RankDeficient, TooFewRows) as exc:
            rows.append(AncovaResult(name, error=f"{type(exc).__name__}: {exc}"))
    return rows


ANCOVA_COLUMNS = (
    "feature", "f_value", "stars", "p_value", "df2", "n_used",
    "emm_unimpaired", "ci_lo_u", "ci_hi_u", "emm_impaired", "ci_lo_i", "ci_hi_i", "error",
)


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def ancova_csv(rows: Sequence[AncovaResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ANCOVA_COLUMNS)
    for r in rows:
        u = r.ci95.get(Group.UNIMPAIRED, (None, None))
        i = r.ci95.get(Group.IMPAIRED, (None, None))
        w.writerow(
            [
                r.feature_name, _fmt(r.f_value), r.stars, _fmt(r.p_value),
                _fmt(r.df_denominator) if r.error is None else "", _fmt(r.n_used),
                _fmt(r.emm.get(Group.UNIMPAIRED)), _fmt(u[0]), _fmt(u[1]),
                _fmt(r.emm.get(Group.IMPAIRED)), _fmt(i[0]), _fmt(i[1]),
                r.error or "; ".join(r.notes),
            ]
        )
    return buf.getvalue()


META_COLUMNS = ("id", "group", "age", "education_years", "gender")


def _opt_float(raw: str | None) -> float | None:
    if raw is None or raw.strip() == "":
        return None
    value = float(raw)
    return value if math.isfinite(value) else None


def _gender(raw: str | None) -> int | None:
    if raw is None or raw.strip() == "":
        return None
    key = raw.strip().lower()
    mapping = {"0": 0, "1": 1, "m": 0, "male": 0, "f": 1, "female": 1}
    if key not in mapping:
        raise ValueError(f"gender must be binary, got {raw!r}")
    return mapping[key]


def read_metadata(text: str) -> dict[str, dict]:
    """Parse ``id,group,age,education_years,gender`` (extra columns ignored).

    Rows with unusable values keep ``None`` in that field and are excluded
    later with a logged reason.
    """
    reader = csv.DictReader(io.StringIO(text))
    missing = [c for c in META_COLUMNS if c not in (reader.fieldnames or ())]
    if missing:
        raise SchemaError(f"metadata is missing columns {missing}")
    meta: dict[str, dict] = {}
    for line, row in enumerate(reader, start=2):
        rid = row["id"].strip()
        entry: dict = {}
        for key, parse, raw in (
            ("group", Group.parse, row["group"]),
            ("age", _opt_float, row["age"]),
            ("education", _opt_float, row["education_years"]),
            ("gender", _gender, row["gender"]),
        ):
            try:
                entry[key] = parse(raw) if raw not in (None, "") else None
            except ValueError as exc:
                log.warning("metadata line %d (%s): %s", line, rid, exc)
                entry[key] = None
        if rid in meta:
            raise SchemaError(f"metadata id {rid!r} appears twice")
        meta[rid] = entry
    return meta


def join_records(features: Sequence[FeatureVector], meta: dict[str, dict]) -> tuple[list[CohortRecord], list[str]]:
    records, warnings = [], []
    feature_ids = set()
    for fv in features:
        feature_ids.add(fv.transcript_id)
        m = meta.get(fv.transcript_id)
        if m is None:
            warnings.append(f"{fv.transcript_id}: no metadata row; skipped")
            continue
        absent = [k for k in ("group", "age", "education", "gender") if m.get(k) is None]
        if absent:
            warnings.append(f"{fv.transcript_id}: missing {', '.join(absent)}; excluded")
        if fv.is_empty:
            warnings.append(f"{fv.transcript_id}: empty CIU sequence; excluded from statistics")
        records.append(CohortRecord(fv.transcript_id, m["group"], m["age"], m["education"], m["gender"], fv))
    for rid in sorted(set(meta) - feature_ids):
        warnings.append(f"{rid}: metadata row has no features; skipped")
    return records, warnings
