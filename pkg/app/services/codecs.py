"""
File formats: JSON documents for sequences, weight grids, certificates and coefficient
prefixes, CSV tables for reports, and the generic report() writer.

Reals are written with 17 significant digits; -inf is written as the string "-inf" in
JSON and as -inf in CSV. Field order is fixed and nothing time-dependent is emitted.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Union

import numpy as np
from pydantic import ValidationError

from app.exceptions import MalformedInputError, ParameterError
from app.http.requests.schemas import CertificateFile, CoefficientFile, SequenceFile, WeightGridFile
from app.models import (
    BlockReport,
    CoefficientPrefix,
    DiskMaxRow,
    FailureTrace,
    LuskyCertificate,
    NormKind,
    PropertyReport,
    WeightFunctionGrid,
    WeightSequence,
)
from app.services.assoc_weight import make_grid
from app.services.sequences import from_log_quotients

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


# Scalars

def format_real(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return "%.17g" % x


def _json_scalar(x: Any) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, enum.Enum):
        return json.dumps(x.value)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return format_real(x) if math.isfinite(x) else json.dumps(format_real(x))
    return json.dumps(str(x))


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with %.17g reals and "-inf"/"inf"/"nan" strings for non-finite values."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = to_payload(obj)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(x, (Mapping, list, tuple, np.ndarray)) for x in obj):
            return "[" + ", ".join(_json_scalar(x) for x in obj) + "]"
        items = [pad + dumps(x, indent, _level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return _json_scalar(obj)


def to_payload(obj: Any) -> Any:
    """Dataclasses, enums and arrays to plain dict/list/scalars, preserving field order."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if isinstance(obj, WeightSequence):
            return sequence_payload(obj)
        if isinstance(obj, LuskyCertificate):
            return certificate_payload(obj)
        if isinstance(obj, CoefficientPrefix):
            return coefficients_payload(obj)
        return {f.name: to_payload(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Mapping):
        return {k: to_payload(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_payload(x) for x in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# JSON documents

def _load(path: PathLike, schema):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise MalformedInputError(f"cannot read {path}: {e}")
    try:
        return schema.model_validate_json(text)
    except ValidationError as e:
        raise MalformedInputError(f"{path} is not a valid {schema.__name__}: {e}")


def sequence_payload(ws: WeightSequence) -> Dict[str, Any]:
    return {"name": ws.name, "horizon": ws.horizon, "lambda": ws.lam.tolist()}


def sequence_from_file(doc: SequenceFile) -> WeightSequence:
    return from_log_quotients(doc.lam, name=doc.name)


def read_sequence(path: PathLike) -> WeightSequence:
    return sequence_from_file(_load(path, SequenceFile))


def read_grid(path: PathLike) -> WeightFunctionGrid:
    doc = _load(path, WeightGridFile)
    grid = make_grid(doc.logt, doc.logv)
    if doc.normalized is not None and doc.normalized != grid.normalized:
        logger.warning("%s: stated normalized=%s but the grid gives %s", path, doc.normalized, grid.normalized)
    return grid


def grid_payload(w: WeightFunctionGrid) -> Dict[str, Any]:
    return {"logt": w.logt.tolist(), "logv": w.logv.tolist(), "normalized": w.normalized}


def certificate_payload(cert: LuskyCertificate) -> Dict[str, Any]:
    return {
        "sequence": cert.sequence,
        "horizon": cert.horizon,
        "a": list(cert.a),
        "logb": cert.logb,
        "logK": cert.logK,
        "rows": [list(r) for r in cert.rows],
    }


def certificate_from_file(doc: CertificateFile) -> LuskyCertificate:
    return LuskyCertificate(
        sequence=doc.sequence,
        horizon=doc.horizon if doc.horizon is not None else doc.a[-1] + 1,
        a=tuple(doc.a),
        logb=doc.logb,
        logK=doc.logK,
        rows=tuple((float(x), float(y)) for x, y in doc.rows),
    )


def read_certificate(path: PathLike) -> LuskyCertificate:
    return certificate_from_file(_load(path, CertificateFile))


def coefficients_from_file(doc: CoefficientFile) -> CoefficientPrefix:
    return CoefficientPrefix(logabs=np.asarray(doc.logabs, dtype=float))


def read_coefficients(path: PathLike) -> CoefficientPrefix:
    return coefficients_from_file(_load(path, CoefficientFile))


def coefficients_payload(coeffs: CoefficientPrefix) -> Dict[str, Any]:
    return {"logabs": coeffs.logabs.tolist()}


# CSV tables

def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(x) for x in row])
    return buf.getvalue()


def _csv_cell(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, enum.Enum):
        return x.value
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format_real(x)
    return str(x)


def block_report_csv(report: BlockReport, norm: NormKind = NormKind.BOTH) -> str:
    """The column not selected by norm is left empty."""
    norm = NormKind(norm)
    hull = norm in (NormKind.HULL, NormKind.BOTH)
    core = norm in (NormKind.CORE, NormKind.BOTH)
    return _csv(
        ("j", "a_j", "a_j1", "log_hull", "log_core"),
        (
            (r.j, r.a_j, r.a_j1, r.log_hull if hull else None, r.log_core if core else None)
            for r in report.rows
        ),
    )


def failure_trace_csv(trace: FailureTrace) -> str:
    return _csv(
        ("j", "a_j", "gap", "logA", "logB", "violation"),
        ((trace.stuck_j, trace.stuck_a, c.gap, c.logA, c.logB, c.violation) for c in trace.candidates),
    )


def property_reports_csv(reports: Iterable[PropertyReport]) -> str:
    rows = []
    for r in sorted(reports, key=lambda r: r.property):
        idx, value = r.witness if r.witness is not None else (None, None)
        rows.append((r.property, r.statistic, r.verdict, idx, value))
    return _csv(("property", "statistic", "verdict", "witness_index", "witness_value"), rows)


def omega_trace_csv(rows: Iterable[Sequence[float]]) -> str:
    """rows of (ln t, omega, logh, sigma)."""
    return _csv(("logt", "omega", "logh", "sigma"), rows)


def disk_geometry_csv(rows: Iterable[DiskMaxRow]) -> str:
    return _csv(("p", "k_p", "r", "logv"), ((r.p, r.k_p, math.exp(r.logr), r.logv) for r in rows))


def certificate_rows_csv(cert: LuskyCertificate) -> str:
    return _csv(
        ("j", "a_j", "a_j1", "logA", "logB"),
        ((j, x, y, ra, rb) for j, (x, y, (ra, rb)) in enumerate(zip(cert.a, cert.a[1:], cert.rows), start=1)),
    )


# report()

def report(fmt: str, payload: Any, norm: NormKind = NormKind.BOTH) -> bytes:
    """
    Serialize any module result. JSON works for every payload; CSV for block reports,
    failure traces, property report sets, disk geometry rows and certificates.
    """
    if fmt == "json":
        return (dumps(payload) + "\n").encode()
    if fmt != "csv":
        raise ParameterError(f"format must be 'json' or 'csv', got {fmt!r}")
    if isinstance(payload, BlockReport):
        text = block_report_csv(payload, norm)
    elif isinstance(payload, FailureTrace):
        text = failure_trace_csv(payload)
    elif isinstance(payload, LuskyCertificate):
        text = certificate_rows_csv(payload)
    elif isinstance(payload, PropertyReport):
        text = property_reports_csv([payload])
    elif isinstance(payload, Mapping) and all(isinstance(v, PropertyReport) for v in payload.values()):
        text = property_reports_csv(payload.values())
    elif isinstance(payload, (list, tuple)) and payload and all(isinstance(r, PropertyReport) for r in payload):
        text = property_reports_csv(payload)
    elif isinstance(payload, (list, tuple)) and payload and all(isinstance(r, DiskMaxRow) for r in payload):
        text = disk_geometry_csv(payload)
    else:
        raise ParameterError(f"no CSV layout for {type(payload).__name__}; use --format json")
    return text.encode()


def write_output(data: bytes, out: PathLike = None) -> None:
    """Write to the path, or to stdout when no path is given."""
    if out is None or str(out) == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    Path(out).write_bytes(data)
    logger.info("Wrote %d bytes to %s", len(data), out)
