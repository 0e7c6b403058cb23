"""Binary classification metrics and the decision-threshold sweep.

The positive class is "adversarial". Rates whose defining class is empty are
None rather than a silent zero, and that propagates into balanced accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LabelMismatch

POSITIVE = "adversarial"


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    tn: int
    fn: int
    tpr: float | None
    tnr: float | None
    fpr: float | None
    fnr: float | None
    bac: float | None

    def to_json(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "tpr": self.tpr,
            "tnr": self.tnr,
            "fpr": self.fpr,
            "fnr": self.fnr,
            "bac": self.bac,
        }


def balanced_accuracy(tpr: float | None, tnr: float | None) -> float | None:
    if tpr is None or tnr is None:
        return None
    return (tpr + tnr) / 2.0


def metrics_from_counts(tp: int, fp: int, tn: int, fn: int) -> Metrics:
    tpr = tp / (tp + fn) if (tp + fn) else None
    tnr = tn / (tn + fp) if (tn + fp) else None
    return Metrics(
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
        tpr=tpr,
        tnr=tnr,
        fpr=None if tnr is None else 1.0 - tnr,
        fnr=None if tpr is None else 1.0 - tpr,
        bac=balanced_accuracy(tpr, tnr),
    )


def compute_metrics(
    predictions: list[tuple[str, str]], truth: list[tuple[str, str]]
) -> Metrics:
    """Confusion counts and rates over two (id, label) lists."""
    pred_map = dict(predictions)
    truth_map = dict(truth)
    if len(pred_map) != len(predictions) or len(truth_map) != len(truth):
        raise LabelMismatch("duplicate ids in predictions or truth")
    if set(pred_map) != set(truth_map):
        missing = set(truth_map) ^ set(pred_map)
        raise LabelMismatch(f"id sets differ on {sorted(missing)[:5]}")

    tp = fp = tn = fn = 0
    for cid, actual in truth_map.items():
        predicted = pred_map[cid]
        if actual == POSITIVE:
            if predicted == POSITIVE:
                tp += 1
            else:
                fn += 1
        else:
            if predicted == POSITIVE:
                fp += 1
            else:
                tn += 1
    return metrics_from_counts(tp=tp, fp=fp, tn=tn, fn=fn)


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    fpr: float | None
    fnr: float | None
    tpr: float | None
    tnr: float | None
    bac: float | None


def threshold_sweep(
    scores: list[tuple[str, float, str]], grid: list[float]
) -> list[SweepRow]:
    """One row per threshold; a sample is adversarial iff its score > t."""
    rows: list[SweepRow] = []
    for t in grid:
        tp = fp = tn = fn = 0
        for _, score, actual in scores:
            predicted_positive = score > t
            if actual == POSITIVE:
                if predicted_positive:
                    tp += 1
                else:
                    fn += 1
            else:
                if predicted_positive:
                    fp += 1
                else:
                    tn += 1
        m = metrics_from_counts(tp=tp, fp=fp, tn=tn, fn=fn)
        rows.append(
            SweepRow(
                threshold=t, fpr=m.fpr, fnr=m.fnr, tpr=m.tpr, tnr=m.tnr, bac=m.bac
            )
        )
    return rows


def _cell(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def sweep_to_csv(rows: list[SweepRow]) -> str:
    lines = ["threshold,fpr,fnr,tpr,tnr,bac"]
    for r in rows:
        lines.append(
            f"{r.threshold:.6f},{_cell(r.fpr)},{_cell(r.fnr)},"
            f"{_cell(r.tpr)},{_cell(r.tnr)},{_cell(r.bac)}"
        )
    return "\n".join(lines) + "\n"
