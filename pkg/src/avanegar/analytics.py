"""Item statistics, weighted error-rate regression and CSV export.

Each scored item contributes an error rate weighted by how many answers
it received. The regression predicts that error rate from three
predictors: the weighted phonological distance between the displayed form
and the truth, the character length of the displayed word, and whether
the correct answer was among the offered options (coded 1) or not
(coded 2). Weighting is by answer frequency, so fitting the weighted
items is equivalent to fitting one row per recorded answer.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .distance import CostConfig
from .tasks import ScoredResponse, Task, score_response, task_complexity

PREDICTOR_NAMES = ("intercept", "pwld", "word_length", "existence_code")

CSV_HEADER = (
    "task_id",
    "pwld",
    "word_length",
    "existence_code",
    "n_responses",
    "n_incorrect",
    "error_rate",
    "weight",
)


class CollinearityError(ValueError):
    """The regression design matrix is rank deficient."""

    def __init__(self, columns: Sequence[str]):
        self.columns = tuple(columns)
        super().__init__(
            "design matrix is rank deficient; collinear columns: " + ", ".join(columns)
        )


@dataclass(frozen=True)
class ItemStats:
    task_id: str
    n_responses: int
    n_incorrect: int
    error_rate: float
    weight: int
    pwld: float
    word_length: int
    existence_code: int

    def __post_init__(self):
        if self.existence_code not in (1, 2):
            raise ValueError(f"existence_code must be 1 or 2, got {self.existence_code}")


@dataclass(frozen=True)
class RegressionModel:
    intercept: float
    coef_pwld: float
    coef_length: float
    coef_existence: float
    r_squared: float
    f_statistic: float
    df: tuple[int, float]


#: Coefficients reported for the original pilot deployment of this task
#: design (16 valid participants, 22 items). The raw pilot responses are
#: not distributed with this package, so the fit itself is not
#: reproducible here; the model is kept for evaluating new items on the
#: same scale. Existence coding: 1 = correct answer offered, 2 = not.
PILOT_ERROR_MODEL = RegressionModel(
    intercept=-0.425,
    coef_pwld=3.918,
    coef_length=-0.142,
    coef_existence=2.545,
    r_squared=0.653,
    f_statistic=135.238,
    df=(3, 216),
)


def existence_code(task: Task) -> int:
    """1 when the truth is among the task's options, else 2."""
    return 1 if task.truth is not None and task.truth in task.options else 2


def item_error_rate(
    task: Task,
    responses: Sequence[ScoredResponse],
    inventory,
    cfg: CostConfig = CostConfig(),
) -> ItemStats:
    """Aggregate one task's scored responses into weighted item statistics."""
    if not responses:
        raise ValueError(f"task {task.id}: cannot compute an error rate from no responses")
    stray = [r.task_id for r in responses if r.task_id != task.id]
    if stray:
        raise ValueError(f"task {task.id}: responses for other tasks present: {stray}")
    if any(r.distance_to_truth is None for r in responses):
        raise ValueError(f"task {task.id}: unscored responses cannot enter the error rate")
    n = len(responses)
    n_incorrect = sum(1 for r in responses if not r.is_exact)
    return ItemStats(
        task_id=task.id,
        n_responses=n,
        n_incorrect=n_incorrect,
        error_rate=n_incorrect / n,
        weight=n,
        pwld=task_complexity(task, inventory, cfg),
        word_length=len(task.displayed.source_text),
        existence_code=existence_code(task),
    )


def _design(items: Sequence[ItemStats]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    X = np.array(
        [[1.0, it.pwld, float(it.word_length), float(it.existence_code)] for it in items]
    )
    y = np.array([it.error_rate for it in items])
    w = np.array([float(it.weight) for it in items])
    return X, y, w


def _collinear_columns(Xw: np.ndarray) -> list[str]:
    cols = []
    for j in range(1, Xw.shape[1]):
        others = np.delete(Xw, j, axis=1)
        coef, *_ = np.linalg.lstsq(others, Xw[:, j], rcond=None)
        if np.allclose(others @ coef, Xw[:, j], atol=1e-10):
            cols.append(PREDICTOR_NAMES[j])
    return cols or list(PREDICTOR_NAMES[1:])


def fit_ols(items: Sequence[ItemStats]) -> RegressionModel:
    """Weighted least squares of error rate on pwld, length and existence.

    Weights are answer frequencies: the fit equals an ordinary fit over
    each item repeated ``weight`` times, hence the error degrees of
    freedom are (total answers) - 4.
    """
    if len(items) < 5:
        raise ValueError(f"need at least 5 items to fit, got {len(items)}")
    X, y, w = _design(items)
    sw = np.sqrt(w)
    Xw = X * sw[:, None]
    yw = y * sw
    if np.linalg.matrix_rank(Xw) < X.shape[1]:
        raise CollinearityError(_collinear_columns(Xw))

    beta, *_ = np.linalg.lstsq(Xw, yw, rcond=None)
    fitted = X @ beta
    n_effective = float(w.sum())
    ybar = float(w @ y) / n_effective
    ss_total = float(w @ (y - ybar) ** 2)
    ss_resid = float(w @ (y - fitted) ** 2)
    ss_model = ss_total - ss_resid

    p = X.shape[1] - 1
    df_resid = n_effective - (p + 1)
    if ss_total <= 1e-15:
        r_squared, f_stat = 0.0, 0.0
    elif ss_resid <= 1e-15 * ss_total:
        r_squared, f_stat = 1.0, float("inf")
    else:
        r_squared = 1.0 - ss_resid / ss_total
        f_stat = (ss_model / p) / (ss_resid / df_resid)

    return RegressionModel(
        intercept=float(beta[0]),
        coef_pwld=float(beta[1]),
        coef_length=float(beta[2]),
        coef_existence=float(beta[3]),
        r_squared=r_squared,
        f_statistic=f_stat,
        df=(p, df_resid),
    )


def predict_error_rate(
    model: RegressionModel, pwld: float, word_length: int, existence_code: int
) -> float:
    """Evaluate the predictor. Unclamped: the weighted scale exceeds [0, 1]."""
    if existence_code not in (1, 2):
        raise ValueError(f"existence_code must be 1 or 2, got {existence_code}")
    return (
        model.intercept
        + model.coef_pwld * pwld
        + model.coef_length * word_length
        + model.coef_existence * existence_code
    )


def export_csv(items: Iterable[ItemStats]) -> str:
    """Items as RFC 4180 CSV, sorted by task id, floats at 6 decimals."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    for it in sorted(items, key=lambda i: i.task_id):
        writer.writerow(
            [
                it.task_id,
                f"{it.pwld:.6f}",
                it.word_length,
                it.existence_code,
                it.n_responses,
                it.n_incorrect,
                f"{it.error_rate:.6f}",
                it.weight,
            ]
        )
    return out.getvalue()


def parse_items_csv(text: str) -> list[ItemStats]:
    """Read back an export_csv document (the `fit` command's input)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise ValueError("empty CSV document") from None
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    items = []
    for row in reader:
        if not row:
            continue
        items.append(
            ItemStats(
                task_id=row[0],
                pwld=float(row[1]),
                word_length=int(row[2]),
                existence_code=int(row[3]),
                n_responses=int(row[4]),
                n_incorrect=int(row[5]),
                error_rate=float(row[6]),
                weight=int(row[7]),
            )
        )
    return items


def collect_item_stats(
    store,
    cfg: CostConfig = CostConfig(),
    *,
    first_attempt_only: bool = True,
    completed_sessions_only: bool = True,
    eligible_profiles_only: bool = True,
) -> list[ItemStats]:
    """Aggregate a store's response log into per-item statistics.

    Default filters mirror the study rules: only finished sessions count,
    only a participant's first answer to an item counts, and profiles
    claiming Persian as a first language are excluded. Tasks without a
    ground truth are skipped; they cannot be scored.
    """
    inventory = store.inventory
    responses = list(store.responses)
    if completed_sessions_only:
        complete = {
            s.session_id
            for s in store.sessions.values()
            if store.session_cursor(s.session_id) >= len(s.task_queue)
        }
        responses = [r for r in responses if r.session_id in complete]
    if eligible_profiles_only:
        eligible = {p.profile_id for p in store.profiles.values() if p.eligible}
        responses = [r for r in responses if r.profile_id in eligible]
    if first_attempt_only:
        seen: set[tuple[str, str]] = set()
        firsts = []
        for r in responses:  # responses come back in seq_no order
            key = (r.profile_id, r.task_id)
            if key in seen:
                continue
            seen.add(key)
            firsts.append(r)
        responses = firsts

    by_task: dict[str, list[ScoredResponse]] = {}
    for r in responses:
        task = store.tasks.get(r.task_id)
        if task is None or task.truth is None:
            continue
        given = store.resolve_payload(task, r.payload)
        scored = score_response(
            task,
            given,
            inventory,
            cfg,
            selected_option_index=r.payload.get("option_index"),
        )
        by_task.setdefault(task.id, []).append(scored)

    return [
        item_error_rate(store.tasks[task_id], scored, inventory, cfg)
        for task_id, scored in sorted(by_task.items())
    ]
