"""JSON and CSV interchange formats.

Complex matrices: ``{"rows": n, "cols": m, "entries": [[re, im], ...]}`` row-major.
Real vectors and square matrices: ``{"dim": n, "entries": [x, ...]}``.
Floats are written with Python's shortest round-trip ``repr``.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .bayesnet import BayesNetwork, ConditionalTable
from .bell import BellScenario, DeterministicLHV, LocalCausalModel
from .dynamics import HamiltonianSchedule
from .errors import ValidationError


class FormatError(ValueError):
    """Input document is malformed (bad JSON, missing keys, wrong shapes)."""


def complex_to_json(m) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def complex_from_json(doc: dict) -> np.ndarray:
    try:
        rows, cols = int(doc["rows"]), int(doc["cols"])
        entries = np.asarray(doc["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad complex matrix document: {exc}") from None
    if entries.shape != (rows * cols, 2):
        raise FormatError(f"expected {rows * cols} [re, im] pairs, got array of shape {entries.shape}")
    return (entries[:, 0] + 1j * entries[:, 1]).reshape(rows, cols)


def real_to_json(x) -> dict:
    x = np.asarray(x, dtype=float)
    return {"dim": int(x.shape[0]), "entries": [float(v) for v in x.reshape(-1)]}


def real_from_json(doc) -> np.ndarray:
    """Vector or square matrix; a bare list is accepted as a vector."""
    if isinstance(doc, list):
        return np.asarray(doc, dtype=float)
    try:
        dim = int(doc["dim"])
        entries = np.asarray(doc["entries"], dtype=float).reshape(-1)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad real array document: {exc}") from None
    if entries.size == dim:
        return entries
    if entries.size == dim * dim:
        return entries.reshape(dim, dim)
    raise FormatError(f"{entries.size} entries fit neither a vector nor a square matrix of dim {dim}")


def schedule_to_json(s: HamiltonianSchedule) -> dict:
    return {
        "dim": s.dim,
        "segments": [{"duration": d, "h": complex_to_json(h)} for d, h in s.segments],
    }


def schedule_from_json(doc: dict) -> HamiltonianSchedule:
    try:
        segs = tuple((float(seg["duration"]), complex_from_json(seg["h"])) for seg in doc["segments"])
        dim = int(doc.get("dim", segs[0][1].shape[0] if segs else 0))
    except (KeyError, TypeError, IndexError) as exc:
        raise FormatError(f"bad schedule document: {exc}") from None
    schedule = HamiltonianSchedule(segs)
    if schedule.dim != dim:
        raise ValidationError(f"schedule declares dim {dim} but segments have dim {schedule.dim}")
    return schedule


def _angles(values: Iterable, degrees: bool) -> tuple[float, ...]:
    vals = tuple(float(v) for v in values)
    return tuple(np.deg2rad(vals).tolist()) if degrees else vals


def scenario_to_json(sc: BellScenario) -> dict:
    return {
        "settings_a": list(sc.settings_a),
        "settings_b": list(sc.settings_b),
        "interaction_time": sc.interaction_time,
        "readout_time": sc.readout_time,
        "state_prep": schedule_to_json(sc.state_prep),
        "initial_config": list(sc.initial_config),
        "dims": list(sc.dims),
        "coupling": sc.coupling,
        "degrees": False,
    }


def scenario_from_json(doc: dict, base: Path | None = None, degrees: bool = False) -> BellScenario:
    """``state_prep`` may be an inline schedule, a path to one, or ``"singlet"``."""
    try:
        deg = bool(doc.get("degrees", degrees))
        tp = float(doc["interaction_time"])
        prep = doc.get("state_prep", "singlet")
        if prep == "singlet":
            from .bell import singlet_prep_hamiltonian

            schedule = HamiltonianSchedule.constant(singlet_prep_hamiltonian(tp), tp)
        elif isinstance(prep, str):
            path = Path(prep) if base is None else base / prep
            schedule = schedule_from_json(load_json(path))
        else:
            schedule = schedule_from_json(prep)
        kw = {}
        if "initial_config" in doc:
            kw["initial_config"] = tuple(doc["initial_config"])
        if "dims" in doc:
            dims = doc["dims"]
            kw["dims"] = tuple(dims[k] for k in ("Q", "R", "A", "B")) if isinstance(dims, dict) else tuple(dims)
        if "coupling" in doc:
            kw["coupling"] = doc["coupling"]
        return BellScenario(
            _angles(doc["settings_a"], deg),
            _angles(doc["settings_b"], deg),
            tp,
            float(doc["readout_time"]),
            schedule,
            **kw,
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad scenario document: {exc}") from None


def lhv_model_from_json(doc: dict, degrees: bool = False):
    try:
        deg = bool(doc.get("degrees", degrees))
        kind = doc.get("kind", "deterministic")
        sa = _angles(doc["settings_a"], deg)
        sb = _angles(doc["settings_b"], deg)
        if kind == "deterministic":
            return DeterministicLHV(doc.get("sampler", "circle")), sa, sb
        if kind == "finite":
            model = LocalCausalModel(
                tuple(doc["lambda_support"]), np.asarray(doc["rho_lambda"], dtype=float), sa, sb,
                np.asarray(doc["response_a"], dtype=float), np.asarray(doc["response_b"], dtype=float),
            )
            return model, sa, sb
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise FormatError(f"bad LHV model document: {exc}") from None
    raise FormatError(f"unknown LHV model kind {kind!r}")


def network_from_json(doc: dict) -> BayesNetwork:
    try:
        cards = {v["name"]: int(v["cardinality"]) for v in doc["variables"]}
        tables = tuple(
            ConditionalTable(t["child"], tuple(t.get("parents", ())), np.asarray(t["rows"], dtype=float))
            for t in doc["tables"]
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad network document: {exc}") from None
    return BayesNetwork(cards, tables)


def network_to_json(net: BayesNetwork) -> dict:
    return {
        "variables": [{"name": k, "cardinality": v} for k, v in net.cardinalities.items()],
        "tables": [t.to_dict() for t in net.tables],
    }


def load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None


def to_plain(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays and tuples into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_plain(obj), indent=2, allow_nan=False) + "\n"


def format_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)
