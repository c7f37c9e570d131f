"""Per-layer, per-candidate accuracy tables and the accuracy-loss transform.

An accuracy table holds one validation-accuracy fraction per (searchable
layer, candidate block). The loss transform rebases each row to its best
entry, making block choices comparable across layers: a row's best block has
loss 0 and every other entry is the accuracy it gives up.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import TableFormatError, ValidationError

TABLE_FORMAT = "ponas-acc-table-v1"


def quantize6(x: float) -> float:
    """Round to 6 significant decimal digits (the on-disk precision)."""
    return float(f"{float(x):.6g}")


def _frozen_matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class AccuracyTable:
    """L x I matrix of validation accuracies, as fractions in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_matrix(self.values, "accuracy table")
        if arr.min() < 0.0 or arr.max() > 1.0:
            bad = np.unravel_index(int(np.argmax((arr < 0) | (arr > 1))), arr.shape)
            raise ValidationError(
                f"accuracy entry at {tuple(int(i) for i in bad)} outside [0, 1]: "
                f"{arr[bad]}"
            )
        object.__setattr__(self, "values", arr)

    @property
    def layers(self) -> int:
        return self.values.shape[0]

    @property
    def candidates(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class AccuracyLossTable:
    """L x I matrix of non-negative accuracy losses; each row's best entry is 0."""

    deltas: np.ndarray

    def __post_init__(self):
        arr = _frozen_matrix(self.deltas, "accuracy-loss table")
        if arr.min() < 0.0:
            raise ValidationError("accuracy-loss entries must be non-negative")
        if not np.all(arr.min(axis=1) == 0.0):
            raise ValidationError("every accuracy-loss row must contain an exact zero")
        object.__setattr__(self, "deltas", arr)

    @property
    def layers(self) -> int:
        return self.deltas.shape[0]

    @property
    def candidates(self) -> int:
        return self.deltas.shape[1]


def to_loss_domain(table: AccuracyTable) -> AccuracyLossTable:
    """Rebase each row to its maximum: delta[l, i] = max_i(row l) - value[l, i]."""
    row_max = table.values.max(axis=1, keepdims=True)
    return AccuracyLossTable(deltas=row_max - table.values)


def row_best(table: AccuracyTable, layer: int) -> int:
    """Index of the most accurate block in a layer; ties take the lowest index."""
    if not 0 <= layer < table.layers:
        raise ValidationError(f"layer {layer} out of range [0, {table.layers})")
    return int(np.argmax(table.values[layer]))


def best_genes(table: AccuracyTable) -> tuple[int, ...]:
    """Per-layer row-best indices: the zero-loss startpoint chromosome."""
    return tuple(int(i) for i in np.argmax(table.values, axis=1))


def layer_importance(loss: AccuracyLossTable) -> np.ndarray:
    """Maximum loss per layer; large values mark layers where choice matters."""
    return loss.deltas.max(axis=1)


def save(path, table: AccuracyTable | AccuracyLossTable) -> None:
    """Write a table as JSON; entries are stored at 6 significant digits."""
    if isinstance(table, AccuracyLossTable):
        matrix, domain = table.deltas, "loss"
    else:
        matrix, domain = table.values, None
    doc = table_document(matrix, domain)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def table_document(matrix: np.ndarray, domain: str | None = None) -> dict:
    doc = {
        "format": TABLE_FORMAT,
        "layers": int(matrix.shape[0]),
        "candidates": int(matrix.shape[1]),
        "values": [[quantize6(v) for v in row] for row in matrix],
    }
    if domain is not None:
        doc["domain"] = domain
    return doc


def load(path) -> AccuracyTable | AccuracyLossTable:
    """Read a table written by :func:`save`.

    Returns an :class:`AccuracyLossTable` when the file declares
    ``"domain": "loss"``, otherwise an :class:`AccuracyTable`. Malformed JSON,
    wrong format tags, dimension mismatches, and out-of-range entries each get
    their own diagnostic.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TableFormatError(f"{path}: not valid JSON ({exc})") from exc
    return table_from_document(doc, source=str(path))


def table_from_document(doc, source: str = "<document>") -> AccuracyTable | AccuracyLossTable:
    if not isinstance(doc, dict) or doc.get("format") != TABLE_FORMAT:
        raise TableFormatError(
            f"{source}: expected a {TABLE_FORMAT!r} document, got format "
            f"{doc.get('format')!r}" if isinstance(doc, dict)
            else f"{source}: expected a JSON object"
        )
    for key in ("layers", "candidates", "values"):
        if key not in doc:
            raise TableFormatError(f"{source}: missing field {key!r}")
    values = doc["values"]
    if (
        not isinstance(values, list)
        or len(values) != doc["layers"]
        or any(not isinstance(row, list) or len(row) != doc["candidates"] for row in values)
    ):
        raise TableFormatError(
            f"{source}: values shape does not match layers={doc['layers']} "
            f"candidates={doc['candidates']}"
        )
    try:
        if doc.get("domain") == "loss":
            return AccuracyLossTable(deltas=np.array(values, dtype=float))
        return AccuracyTable(values=np.array(values, dtype=float))
    except ValidationError as exc:
        raise TableFormatError(f"{source}: {exc}") from exc


def synth_table(seed: int, layers: int = 19, candidates: int = 12,
                profile: str = "peaked") -> AccuracyTable:
    """Deterministic synthetic accuracy table.

    The "peaked" profile gives each layer a preferred block with accuracy
    decaying smoothly away from it. Base accuracy per layer is drawn from
    [0.60, 0.75], the peak-to-trough drop from [0.01, 0.05], and per-entry
    noise stays within +/-0.005. Entries are quantized to the on-disk
    precision so save -> load round-trips bit-exactly.
    """
    if layers < 1 or candidates < 1:
        raise ValidationError(
            f"need layers >= 1 and candidates >= 1, got {layers}x{candidates}"
        )
    if profile != "peaked":
        raise ValidationError(f"unknown synth profile {profile!r}")
    rng = np.random.default_rng(seed)
    rows = []
    span = max(1, candidates - 1)
    for _ in range(layers):
        base = rng.uniform(0.60, 0.75)
        preferred = int(rng.integers(0, candidates))
        drop = rng.uniform(0.01, 0.05)
        noise = rng.uniform(-0.005, 0.005, size=candidates)
        dist = np.abs(np.arange(candidates) - preferred) / span
        row = np.clip(base - drop * dist + noise, 0.0, 1.0)
        rows.append([quantize6(v) for v in row])
    return AccuracyTable(values=np.array(rows))
