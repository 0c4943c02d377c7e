"""JSON document schemas for every on-disk artifact.

All documents are self-describing: a top-level ``kind`` selects the payload
(plant / realization / parameter_bundle / coprime_factors / fir_bundle /
weights / gains / disturbance / sim_trace / report) and ``schema_version``
pins the layout.  Exact rationals travel as "p/q" strings (plain integers
and decimal strings are also accepted on input); simulation data travels as
JSON numbers.  Rational functions are two ascending coefficient arrays
named ``num`` and ``den``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .errors import SchemaError, ToolkitError
from .parameterizations import (
    IOPParam,
    MixedParam1,
    MixedParam2,
    PlantSS,
    SLPOutputFeedback,
    SLPStateFeedback,
    CoprimeFactors,
    YoulaParam,
)
from .ratfun import DEFAULT_TOL, RatFun
from .realization import Realization, StabilityMatrix
from .sls import FIRPhi, SimTrace
from .tfmatrix import SignalSpace, TFMatrix

SCHEMA_VERSION = 1

BUNDLE_FIELDS: dict[str, tuple[str, ...]] = {
    "youla": ("Q",),
    "iop": ("Y", "U", "W", "Z"),
    "slp_sf": ("phi_x", "phi_u"),
    "slp_of": ("phi_xx", "phi_ux", "phi_xy", "phi_uy"),
    "mixed1": ("phi_yx", "phi_ux", "phi_yy", "phi_uy"),
    "mixed2": ("phi_xy", "phi_uy", "phi_xu", "phi_uu"),
}

COPRIME_FIELDS = ("Ml", "Nl", "Vl", "Ul", "Ur", "Nr", "Vr", "Mr")


def parse_scalar(value: Any) -> Fraction:
    """Accept "p/q", decimal strings, ints, and floats; return an exact Fraction."""
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise SchemaError(f"cannot parse scalar {value!r}") from exc


def scalar_str(value: Fraction) -> str:
    return str(Fraction(value))


def real_matrix_to_doc(m) -> list[list[str]]:
    arr = np.atleast_2d(np.asarray(m, dtype=object))
    return [[scalar_str(Fraction(v)) for v in row] for row in arr]


def real_matrix_from_doc(doc) -> list[list[Fraction]]:
    if not isinstance(doc, list) or not doc or not all(isinstance(r, list) for r in doc):
        raise SchemaError("expected a nested list for a real matrix")
    return [[parse_scalar(v) for v in row] for row in doc]


def ratfun_to_doc(r: RatFun) -> dict:
    return {
        "num": [scalar_str(c) for c in r.num.coeffs],
        "den": [scalar_str(c) for c in r.den.coeffs],
    }


def ratfun_from_doc(doc) -> RatFun:
    try:
        return RatFun([parse_scalar(c) for c in doc["num"]], [parse_scalar(c) for c in doc["den"]])
    except SchemaError:
        raise
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        raise SchemaError(f"malformed rational function document: {exc}") from exc


def space_to_doc(s: SignalSpace) -> list[list]:
    return [[n, d] for n, d in s.blocks]


def space_from_doc(doc) -> SignalSpace:
    try:
        return SignalSpace(tuple((str(n), int(d)) for n, d in doc))
    except (TypeError, ValueError, ToolkitError) as exc:
        raise SchemaError(f"malformed signal space document: {exc}") from exc


def tfmatrix_to_doc(m: TFMatrix) -> dict:
    return {
        "rows": space_to_doc(m.rows),
        "cols": space_to_doc(m.cols),
        "entries": [[ratfun_to_doc(e) for e in row] for row in m.entries],
    }


def tfmatrix_from_doc(doc) -> TFMatrix:
    try:
        rows = space_from_doc(doc["rows"])
        cols = space_from_doc(doc["cols"])
        entries = [[ratfun_from_doc(e) for e in row] for row in doc["entries"]]
        return TFMatrix(rows, cols, entries)
    except SchemaError:
        raise
    except (KeyError, TypeError, ToolkitError) as exc:
        raise SchemaError(f"malformed transfer matrix document: {exc}") from exc


def _with_header(kind: str, payload: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": kind, **payload}


def _check_header(doc, kind: str) -> dict:
    if not isinstance(doc, dict):
        raise SchemaError("document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc.get('schema_version')!r}")
    if doc.get("kind") != kind:
        raise SchemaError(f"expected kind {kind!r}, found {doc.get('kind')!r}")
    return doc


def plant_to_doc(plant: PlantSS) -> dict:
    return _with_header(
        "plant",
        {
            "A": real_matrix_to_doc(plant.A),
            "B": real_matrix_to_doc(plant.B),
            "C": real_matrix_to_doc(plant.C),
            "D": real_matrix_to_doc(plant.D),
        },
    )


def plant_from_doc(doc) -> PlantSS:
    _check_header(doc, "plant")
    try:
        return PlantSS(
            real_matrix_from_doc(doc["A"]),
            real_matrix_from_doc(doc["B"]),
            real_matrix_from_doc(doc["C"]),
            real_matrix_from_doc(doc["D"]),
        )
    except SchemaError:
        raise
    except (KeyError, ToolkitError) as exc:
        raise SchemaError(f"malformed plant document: {exc}") from exc


def realization_to_doc(r: Realization, s: StabilityMatrix | None = None) -> dict:
    payload = {
        "space": space_to_doc(r.space),
        "entries": [[ratfun_to_doc(e) for e in row] for row in r.R.entries],
        "structural_zeros": sorted([a, b] for a, b in r.structural_zeros),
    }
    if s is not None:
        payload["stability"] = [[ratfun_to_doc(e) for e in row] for row in s.S.entries]
    return _with_header("realization", payload)


def realization_from_doc(doc) -> tuple[Realization, StabilityMatrix | None]:
    _check_header(doc, "realization")
    try:
        space = space_from_doc(doc["space"])
        entries = [[ratfun_from_doc(e) for e in row] for row in doc["entries"]]
        zeros = frozenset((str(a), str(b)) for a, b in doc.get("structural_zeros", []))
        r = Realization(space, TFMatrix(space, space, entries), zeros)
        s = None
        if "stability" in doc:
            sm = [[ratfun_from_doc(e) for e in row] for row in doc["stability"]]
            s = StabilityMatrix(space, TFMatrix(space, space, sm))
        return r, s
    except SchemaError:
        raise
    except (KeyError, TypeError, ToolkitError) as exc:
        raise SchemaError(f"malformed realization document: {exc}") from exc


def bundle_to_doc(parameterization: str, bundle) -> dict:
    fields = BUNDLE_FIELDS[parameterization]
    return _with_header(
        "parameter_bundle",
        {
            "parameterization": parameterization,
            "blocks": {f: tfmatrix_to_doc(getattr(bundle, f)) for f in fields},
        },
    )


def bundle_from_doc(doc, plant: PlantSS | None = None, tol: float = DEFAULT_TOL):
    """Load and validate a parameter bundle.

    Returns (parameterization, bundle).  Bundles whose invariants involve
    the plant require one; the Youla bundle validates on its own.  IOP
    bundles name their output blocks, so a bundle produced in the
    state-feedback setting (blocks over "x") is validated against
    (zI - A)^{-1} B rather than the full plant map.
    """
    _check_header(doc, "parameter_bundle")
    kind = doc.get("parameterization")
    if kind not in BUNDLE_FIELDS:
        raise SchemaError(f"unknown parameterization {kind!r}")
    try:
        blocks = {f: tfmatrix_from_doc(doc["blocks"][f]) for f in BUNDLE_FIELDS[kind]}
    except KeyError as exc:
        raise SchemaError(f"parameter bundle is missing block {exc}") from exc
    if kind == "youla":
        return kind, YoulaParam.checked(blocks["Q"], tol)
    if plant is None:
        raise SchemaError(f"validating a {kind} bundle requires the plant")
    if kind == "iop":
        out_name = blocks["Y"].rows.names[0]
        g = plant.state_transfer() if out_name == "x" else plant.transfer()
        return kind, IOPParam.checked(
            blocks["Y"], blocks["U"], blocks["W"], blocks["Z"], g=g, tol=tol
        )
    if kind == "slp_sf":
        return kind, SLPStateFeedback.checked(blocks["phi_x"], blocks["phi_u"], plant, tol)
    if kind == "slp_of":
        return kind, SLPOutputFeedback.checked(
            blocks["phi_xx"], blocks["phi_ux"], blocks["phi_xy"], blocks["phi_uy"], plant, tol
        )
    if kind == "mixed1":
        return kind, MixedParam1.checked(
            blocks["phi_yx"], blocks["phi_ux"], blocks["phi_yy"], blocks["phi_uy"], plant, tol
        )
    return kind, MixedParam2.checked(
        blocks["phi_xy"], blocks["phi_uy"], blocks["phi_xu"], blocks["phi_uu"], plant, tol
    )


def coprime_to_doc(f: CoprimeFactors) -> dict:
    return _with_header(
        "coprime_factors",
        {"blocks": {name: tfmatrix_to_doc(getattr(f, name)) for name in COPRIME_FIELDS}},
    )


def coprime_from_doc(doc, tol: float = DEFAULT_TOL) -> CoprimeFactors:
    _check_header(doc, "coprime_factors")
    try:
        blocks = {name: tfmatrix_from_doc(doc["blocks"][name]) for name in COPRIME_FIELDS}
    except KeyError as exc:
        raise SchemaError(f"coprime factor document is missing {exc}") from exc
    f = CoprimeFactors(**blocks)
    f.validate(tol)
    return f


def exact_taps(m: TFMatrix, horizon: int) -> list[list[list[str]]]:
    """Taps of a strictly proper FIR transfer matrix as exact strings."""
    out = []
    for k in range(1, horizon + 1):
        mat = []
        for row in m.entries:
            mat_row = []
            for e in row:
                q = e.den.degree
                if any(c != 0 for c in e.den.coeffs[:-1]):
                    raise ToolkitError("entry is not FIR (denominator is not z^k)")
                mat_row.append(scalar_str(e.num[q - k]))
            mat.append(mat_row)
        out.append(mat)
    return out


def fir_bundle_to_doc(horizon: int, parts: dict[str, TFMatrix]) -> dict:
    payload: dict[str, Any] = {"horizon": horizon}
    for name, m in parts.items():
        payload[name] = exact_taps(m, horizon)
    return _with_header("fir_bundle", payload)


def fir_bundle_from_doc(doc) -> dict[str, Any]:
    """Load FIR taps as float FIRPhi payloads keyed by part name."""
    _check_header(doc, "fir_bundle")
    try:
        horizon = int(doc["horizon"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError("fir_bundle needs an integer horizon") from exc
    out: dict[str, Any] = {"horizon": horizon}
    for name in ("phi_x", "phi_u", "p_c", "m_c"):
        if name not in doc:
            continue
        taps_doc = doc[name]
        if not isinstance(taps_doc, list) or len(taps_doc) != horizon:
            raise SchemaError(f"{name} must list exactly {horizon} tap matrices")
        taps = []
        for mat in taps_doc:
            taps.append(
                np.array([[float(parse_scalar(v)) for v in row] for row in mat], dtype=float)
            )
        out[name] = FIRPhi(tuple(taps))
    if "phi_x" not in out or "phi_u" not in out:
        raise SchemaError("fir_bundle needs phi_x and phi_u")
    return out


def disturbance_from_doc(doc) -> dict[str, np.ndarray]:
    _check_header(doc, "disturbance")
    signals = doc.get("signals")
    if not isinstance(signals, dict):
        raise SchemaError("disturbance document needs a signals object")
    out = {}
    for name, rows in signals.items():
        try:
            out[name] = np.array([[float(v) for v in row] for row in rows], dtype=float)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"malformed disturbance for {name!r}") from exc
    return out


def trace_to_doc(trace: SimTrace) -> dict:
    return _with_header(
        "sim_trace",
        {
            "horizon": trace.horizon,
            "signals": {k: v.tolist() for k, v in trace.signals.items()},
            "disturbance": {k: v.tolist() for k, v in trace.disturbance.items()},
        },
    )


def weights_from_doc(doc) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    _check_header(doc, "weights")
    try:
        return real_matrix_from_doc(doc["qw"]), real_matrix_from_doc(doc["rw"])
    except KeyError as exc:
        raise SchemaError(f"weights document is missing {exc}") from exc


def gains_from_doc(doc) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    _check_header(doc, "gains")
    try:
        return real_matrix_from_doc(doc["F"]), real_matrix_from_doc(doc["L"])
    except KeyError as exc:
        raise SchemaError(f"gains document is missing {exc}") from exc


def load_document(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{path} must hold a JSON object")
    return doc


def dump_document(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n", encoding="utf-8")
