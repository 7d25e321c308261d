"""Versioned text serialization for fitted models.

Format (UTF-8, line oriented, no binary):

    solarcast-model 1
    kind=<model kind>
    <key>=<value>            scalar metadata, floats written as repr
    @block <name> <rows> <cols>
    <comma-separated repr floats, one row per line>
    @end

Floats round-trip exactly (repr -> float is the identity), so a loaded
model predicts bit-for-bit like the saved one.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import baselines, mlp as mlp_mod
from .errors import DataError

FORMAT_LINE = "solarcast-model 1"


@dataclass
class ModelFile:
    kind: str
    meta: dict
    blocks: dict


def _format_scalar(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def save_model_file(path, kind: str, meta: dict, blocks: dict) -> None:
    lines = [FORMAT_LINE, f"kind={kind}"]
    for key, value in meta.items():
        lines.append(f"{key}={_format_scalar(value)}")
    for name, array in blocks.items():
        arr = np.atleast_2d(np.asarray(array, dtype=np.float64))
        lines.append(f"@block {name} {arr.shape[0]} {arr.shape[1]}")
        for row in arr:
            lines.append(",".join(repr(float(v)) for v in row))
        lines.append("@end")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model_file(path) -> ModelFile:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e
    if not lines or lines[0].strip() != FORMAT_LINE:
        raise DataError(f"{path}: not a solarcast model file")
    meta: dict[str, str] = {}
    blocks: dict[str, np.ndarray] = {}
    i = 1
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if line.startswith("@block"):
            parts = line.split()
            if len(parts) != 4:
                raise DataError(f"{path}: malformed block header {line!r}")
            name, rows, cols = parts[1], int(parts[2]), int(parts[3])
            data = np.empty((rows, cols))
            for r in range(rows):
                data[r] = [float(v) for v in lines[i].split(",")]
                i += 1
            if lines[i].strip() != "@end":
                raise DataError(f"{path}: missing @end for block {name}")
            i += 1
            blocks[name] = data
        elif "=" in line:
            key, value = line.split("=", 1)
            meta[key.strip()] = value.strip()
        else:
            raise DataError(f"{path}: unparseable line {line!r}")
    if "kind" not in meta:
        raise DataError(f"{path}: missing kind")
    return ModelFile(kind=meta.pop("kind"), meta=meta, blocks=blocks)


# ---------------------------------------------------------------------------
# per-model adapters
# ---------------------------------------------------------------------------


def save_forecaster(path, model) -> None:
    """Serialize any fitted OneStepModel or trained MLP bundle."""
    if isinstance(model, baselines.NaiveModel):
        save_model_file(path, "naive", {}, {"day_means": model.day_means})
    elif isinstance(model, baselines.ArModel):
        lm = model.model
        save_model_file(
            path, "ar", {"p": lm.p},
            {"ar": lm.ar, "intercept": np.array([lm.intercept])},
        )
    elif isinstance(model, baselines.ArmaModel):
        lm = model.model
        save_model_file(
            path, "arma", {"p": lm.p, "q": lm.q},
            {"ar": lm.ar, "ma": lm.ma, "intercept": np.array([lm.intercept])},
        )
    elif isinstance(model, baselines.MarkovChainModel):
        m = model.model
        blocks = {
            "edges": m.discretizer.edges,
            "marginal": m.marginal,
        }
        for k in range(1, m.order + 1):
            rows = []
            for ctx in sorted(m.counts[k]):
                table = m.counts[k][ctx]
                for nxt in np.flatnonzero(table):
                    rows.append(list(ctx) + [nxt, table[nxt]])
            blocks[f"transitions_{k}"] = (
                np.asarray(rows, dtype=np.float64) if rows else np.empty((0, k + 2))
            )
        save_model_file(
            path, "markov",
            {"order": m.order, "n_classes": m.discretizer.n_classes, "smoothing": m.smoothing},
            blocks,
        )
    elif isinstance(model, baselines.BayesClassifierModel):
        m = model.model
        blocks = {"edges": m.discretizer.edges, "priors": m.prior_counts}
        for j in range(m.cond_counts.shape[0]):
            blocks[f"cond_lag_{j + 1}"] = m.cond_counts[j]
        save_model_file(
            path, "bayes",
            {"order": m.order, "n_classes": m.discretizer.n_classes, "smoothing": m.smoothing},
            blocks,
        )
    elif isinstance(model, baselines.KnnModel):
        save_model_file(
            path, "knn", {"k": model.cfg.k, "window": model.cfg.window}, {}
        )
    elif isinstance(model, MlpBundle):
        save_model_file(
            path, "mlp",
            {
                "n_inputs": model.mlp.layout.n_inputs,
                "n_hidden": model.mlp.layout.n_hidden,
                "seed": model.mlp.seed,
            },
            {
                "w1": model.mlp.w1,
                "b1": model.mlp.b1,
                "w2": model.mlp.w2,
                "b2": np.array([model.mlp.b2]),
                "scaler_mins": model.scaler.mins,
                "scaler_maxs": model.scaler.maxs,
            },
        )
    else:
        raise DataError(f"cannot serialize model of type {type(model).__name__}")


def load_forecaster(path):
    """Reconstruct the model saved by :func:`save_forecaster`."""
    mf = load_model_file(path)
    if mf.kind == "naive":
        model = baselines.NaiveModel()
        model.day_means = mf.blocks["day_means"].ravel()
        return model
    if mf.kind == "ar":
        model = baselines.ArModel(p=int(mf.meta["p"]))
        model.model = baselines.LinearModel(
            ar=mf.blocks["ar"].ravel(), ma=np.empty(0),
            intercept=float(mf.blocks["intercept"].ravel()[0]),
        )
        return model
    if mf.kind == "arma":
        model = baselines.ArmaModel(p=int(mf.meta["p"]), q=int(mf.meta["q"]))
        model.model = baselines.LinearModel(
            ar=mf.blocks["ar"].ravel(), ma=mf.blocks["ma"].ravel(),
            intercept=float(mf.blocks["intercept"].ravel()[0]),
        )
        return model
    if mf.kind == "markov":
        order = int(mf.meta["order"])
        edges = mf.blocks["edges"].ravel()
        centers = (edges[:-1] + edges[1:]) / 2.0
        disc = baselines.Discretizer(edges=edges, centers=centers)
        n = disc.n_classes
        counts: dict[int, dict] = {k: {} for k in range(1, order + 1)}
        for k in range(1, order + 1):
            for row in mf.blocks[f"transitions_{k}"]:
                ctx = tuple(int(v) for v in row[:k])
                table = counts[k].setdefault(ctx, np.zeros(n))
                table[int(row[k])] = row[k + 1]
        inner = baselines.MarkovModel(
            order=order, discretizer=disc, counts=counts,
            marginal=mf.blocks["marginal"].ravel(),
            smoothing=float(mf.meta["smoothing"]),
        )
        model = baselines.MarkovChainModel(order=order, n_classes=n)
        model.model = inner
        return model
    if mf.kind == "bayes":
        order = int(mf.meta["order"])
        edges = mf.blocks["edges"].ravel()
        centers = (edges[:-1] + edges[1:]) / 2.0
        disc = baselines.Discretizer(edges=edges, centers=centers)
        n = disc.n_classes
        cond = np.stack(
            [mf.blocks[f"cond_lag_{j + 1}"] for j in range(max(order, 1))]
        )
        inner = baselines.BayesModel(
            order=order, discretizer=disc,
            prior_counts=mf.blocks["priors"].ravel(),
            cond_counts=cond, smoothing=float(mf.meta["smoothing"]),
        )
        model = baselines.BayesClassifierModel(order=order, n_classes=n)
        model.model = inner
        return model
    if mf.kind == "knn":
        return baselines.KnnModel(k=int(mf.meta["k"]), window=int(mf.meta["window"]))
    if mf.kind == "mlp":
        layout = mlp_mod.MlpLayout(
            n_inputs=int(mf.meta["n_inputs"]), n_hidden=int(mf.meta["n_hidden"])
        )
        net = mlp_mod.Mlp(
            layout=layout,
            w1=mf.blocks["w1"],
            b1=mf.blocks["b1"].ravel(),
            w2=mf.blocks["w2"].ravel(),
            b2=float(mf.blocks["b2"].ravel()[0]),
            seed=int(mf.meta["seed"]),
        )
        scaler = mlp_mod.Scaler(
            mins=mf.blocks["scaler_mins"].ravel(), maxs=mf.blocks["scaler_maxs"].ravel()
        )
        return MlpBundle(mlp=net, scaler=scaler)
    raise DataError(f"unknown model kind {mf.kind!r}")


@dataclass
class MlpBundle:
    """Trained network plus the scaler fitted alongside it."""

    mlp: mlp_mod.Mlp
    scaler: mlp_mod.Scaler

    name = "mlp"

    def fit(self, train):  # pragma: no cover - bundles are created by training
        raise DataError("MlpBundle is constructed by training, not fit()")

    def predict_next(self, history: np.ndarray, target: dt.date) -> float:
        p = self.mlp.layout.n_inputs
        if history.size < p:
            raise DataError(f"not enough history before {target.isoformat()} for {p} lags")
        lags = history[-p:]
        if not np.all(np.isfinite(lags)):
            raise DataError(f"missing value inside the lag window before {target.isoformat()}")
        yhat = mlp_mod.forward(self.mlp, self.scaler.scale_inputs(lags))
        return float(self.scaler.unscale_target(yhat))
