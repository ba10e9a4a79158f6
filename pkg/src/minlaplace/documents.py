"""Connection documents (JSON) and run reports.

A document looks like::

    {
      "name": "rank1",
      "rank": 1,
      "regular_singularities": [
        {"point": ["1/3", "0"],
         "residue_matrix": [["1/2"]],
         "eigen": [{"value": "1/2", "weight": "1/4", "vector": ["1"]}]}
      ],
      "irregular": {"A_diagonal": ["2"], "blocks": [0, 1],
                    "C_diagonal": ["-1/2"], "weights": ["1/3"]}
    }

Scalars are exact strings (``"a/b"`` or ``"a/b+c/d*i"``); decimals are
rejected.  ``blocks`` lists the block boundaries ``0 = a_1 < ... = r``.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from .connection import (
    EigenDatum,
    InvalidConnectionError,
    IrregularData,
    ParabolicConnection,
    RegularSingularity,
    ValidationReport,
    dmodule_degrees,
    parabolic_degree,
    validate_admissible,
    validate_resonance_free,
)
from .exact import GaussianRational, Poly, format_fraction, parse_fraction, parse_gaussian
from .laplace import build_model, formal_data_at_infinity, residue_data_at, transform_connection
from .linalg import Matrix
from .stationary import ComparisonReport, PredictedData, predict, verify_involution, verify_stationary_phase

__all__ = [
    "DocumentError",
    "load_connection",
    "parse_connection",
    "connection_to_document",
    "dump_connection",
    "build_report",
    "render_report",
]


class DocumentError(ValueError):
    """Malformed connection document; ``location`` names the offending field."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def _field(obj: Any, key: str, where: str):
    if not isinstance(obj, dict):
        raise DocumentError(where, "expected an object")
    if key not in obj:
        raise DocumentError(f"{where}.{key}" if where else key, "missing field")
    return obj[key]


def _list(x: Any, where: str) -> list:
    if not isinstance(x, list):
        raise DocumentError(where, "expected a list")
    return x


def _gauss(x: Any, where: str) -> GaussianRational:
    try:
        if isinstance(x, list):
            if len(x) != 2:
                raise ValueError("expected [re, im]")
            return GaussianRational(_frac(x[0], where), _frac(x[1], where))
        if isinstance(x, bool) or not isinstance(x, (str, int)):
            raise ValueError(f"expected an exact string, got {type(x).__name__}")
        return parse_gaussian(str(x))
    except DocumentError:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(where, str(exc)) from None


def _frac(x: Any, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise DocumentError(where, f"expected an exact fraction string, got {type(x).__name__}")
    try:
        return parse_fraction(str(x))
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(where, str(exc)) from None


def parse_connection(doc: Any) -> ParabolicConnection:
    rank = _field(doc, "rank", "")
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 0:
        raise DocumentError("rank", "expected a non-negative integer")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise DocumentError("name", "expected a string")
    sings = []
    for j, entry in enumerate(_list(_field(doc, "regular_singularities", ""), "regular_singularities")):
        where = f"regular_singularities[{j}]"
        point = _gauss(_field(entry, "point", where), f"{where}.point")
        rows = _list(_field(entry, "residue_matrix", where), f"{where}.residue_matrix")
        matrix = []
        for a, row in enumerate(rows):
            row = _list(row, f"{where}.residue_matrix[{a}]")
            if len(row) != rank:
                raise DocumentError(f"{where}.residue_matrix[{a}]", f"expected {rank} entries")
            matrix.append([_gauss(x, f"{where}.residue_matrix[{a}][{b}]") for b, x in enumerate(row)])
        if len(matrix) != rank:
            raise DocumentError(f"{where}.residue_matrix", f"expected {rank} rows")
        eigen = []
        for k, e in enumerate(_list(_field(entry, "eigen", where), f"{where}.eigen")):
            ew = f"{where}.eigen[{k}]"
            vec = [_gauss(x, f"{ew}.vector[{c}]") for c, x in enumerate(_list(_field(e, "vector", ew), f"{ew}.vector"))]
            eigen.append(
                (_gauss(_field(e, "value", ew), f"{ew}.value"), _frac(_field(e, "weight", ew), f"{ew}.weight"), vec)
            )
        try:
            sings.append(
                RegularSingularity(point, Matrix(matrix, rank), [EigenDatum(v, w, vec) for v, w, vec in eigen])
            )
        except InvalidConnectionError as exc:
            raise DocumentError(where, str(exc)) from None
    irr = _field(doc, "irregular", "")
    where = "irregular"
    lead = [_gauss(x, f"{where}.A_diagonal[{k}]") for k, x in enumerate(_list(_field(irr, "A_diagonal", where), f"{where}.A_diagonal"))]
    blocks = _list(_field(irr, "blocks", where), f"{where}.blocks")
    if any(isinstance(b, bool) or not isinstance(b, int) for b in blocks):
        raise DocumentError(f"{where}.blocks", "expected integer block boundaries")
    residue = [_gauss(x, f"{where}.C_diagonal[{k}]") for k, x in enumerate(_list(_field(irr, "C_diagonal", where), f"{where}.C_diagonal"))]
    weights = [_frac(x, f"{where}.weights[{k}]") for k, x in enumerate(_list(_field(irr, "weights", where), f"{where}.weights"))]
    try:
        return ParabolicConnection(rank, sings, IrregularData(lead, blocks, residue, weights), name=name)
    except InvalidConnectionError as exc:
        raise DocumentError(where if "infinity" in str(exc) or "block" in str(exc) else "connection", str(exc)) from None


def load_connection(path) -> ParabolicConnection:
    """Read and parse a document; JSON syntax errors carry line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(str(path), exc.strerror or str(exc)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return parse_connection(doc)


def connection_to_document(conn: ParabolicConnection) -> dict:
    irr = conn.irregular
    return {
        "name": conn.name,
        "rank": conn.rank,
        "regular_singularities": [
            {
                "point": [format_fraction(s.point.re), format_fraction(s.point.im)],
                "residue_matrix": [[str(x) for x in row] for row in s.residue.rows],
                "eigen": [
                    {"value": str(e.value), "weight": format_fraction(e.weight), "vector": [str(x) for x in e.vector]}
                    for e in s.eigen
                ],
            }
            for s in conn.regular_singularities
        ],
        "irregular": {
            "A_diagonal": [str(x) for x in irr.leading],
            "blocks": list(irr.boundaries) if conn.rank else [0],
            "C_diagonal": [str(x) for x in irr.residue],
            "weights": [format_fraction(w) for w in irr.weights],
        },
    }


def dump_connection(conn: ParabolicConnection) -> str:
    return json.dumps(connection_to_document(conn), indent=2) + "\n"


# ---------------------------------------------------------------------------
# reports


def _validation(report: ValidationReport) -> dict:
    return {"passed": report.passed, "lines": report.lines()}


def _comparison(report: ComparisonReport) -> dict:
    return {"passed": report.passed, "lines": report.lines()}


def _spectrum(spec) -> list:
    return [[str(mu), format_fraction(beta)] for mu, beta in spec]


def _prediction(pred: PredictedData) -> dict:
    return {
        "rank": pred.rank,
        "regular": [{"point": str(xi), "spectrum": _spectrum(spec)} for xi, spec in pred.regular],
        "infinity": [{"leading": str(p), "spectrum": _spectrum(spec)} for p, spec in pred.infinity_blocks],
        "deg": str(pred.deg),
        "pdeg": str(pred.pdeg),
        "lambda": [[f"({j + 1},{k + 1})", str(lam)] for (j, k), lam in pred.lambdas],
    }


def _matrix_str(m: Matrix) -> str:
    if m.shape == (1, 1):
        return str(m[0, 0])
    return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in m.rows) + "]"


def _linear_factor(xl: GaussianRational) -> str:
    return Poly((-xl, 1)).to_str("xi")


def closed_form(t) -> str:
    """``X = P + R_1/(xi-xi_1) + ...`` in exact syntax."""
    const, terms = t.partial_fractions()
    parts = [_matrix_str(const)]
    for xl, res in terms:
        r = _matrix_str(res)
        compound = res.shape == (1, 1) and any(c in r[1:] for c in "+-")
        parts.append(f"({r})/({_linear_factor(xl)})" if compound else f"{r}/({_linear_factor(xl)})")
    return "X = " + " + ".join(parts)


def build_report(
    conn: ParabolicConnection,
    *,
    mode: str = "full",
    involution: bool = False,
    source_digest: str = "",
) -> tuple[dict, bool]:
    """Assemble the report and an overall verdict.

    ``mode`` is ``"predict-only"`` (no cokernel computation), ``"summary"``
    or ``"full"`` (adds the entries of ``X(xi)``).
    """
    canonical = json.dumps(connection_to_document(conn), sort_keys=True, separators=(",", ":"))
    report: dict = {
        "name": conn.name,
        "input_digest": source_digest or hashlib.sha256(canonical.encode()).hexdigest(),
        "rank": conn.rank,
    }
    rf, adm = validate_resonance_free(conn), validate_admissible(conn)
    report["validation"] = {"resonance_free": _validation(rf), "admissible": _validation(adm)}
    deg, pdeg, slope = dmodule_degrees(conn)
    report["degrees"] = {
        "deg": str(deg),
        "pdeg": str(pdeg),
        "slope": "undefined" if slope is None else str(slope),
        "parabolic_degree": format_fraction(parabolic_degree(conn)),
    }
    # the transform only needs the finite points; infinity clauses gate
    # the resonance-preservation check
    if not (rf.at_finite_points().passed and adm.passed):
        report["verdict"] = "invalid input"
        return report, False
    ok = rf.passed
    pred = predict(conn)
    report["prediction"] = _prediction(pred)
    pred_rf = pred.resonance_report()
    if not rf.passed:
        preservation = "not applicable (input is not resonance-free at infinity)"
    elif pred_rf:
        preservation = "FAIL " + "; ".join(map(str, pred_rf))
    else:
        preservation = "pass"
    checks = [
        f"rank formula: predicted {pred.rank} = sum_j (r - r_j) = {conn.transformed_rank()}",
        f"pdeg preservation: predicted {pred.pdeg}, input {pdeg}: {'pass' if pred.pdeg == pdeg else 'FAIL'}",
        f"resonance preservation: {preservation}",
    ]
    ok &= pred.pdeg == pdeg and not (rf.passed and pred_rf)
    if mode != "predict-only":
        t = transform_connection(build_model(conn))
        ok &= t.rank == conn.transformed_rank()
        transform: dict = {
            "rank": t.rank,
            "basis": [f"e({j + 1},{k + 1})/(x-p{j + 1}) dx" for j, k in t.labels],
        }
        if t.rank:
            a_hat, c_hat = formal_data_at_infinity(t)
            transform["Ahat"] = [str(x) for x in a_hat.diagonal_entries()]
            transform["Chat"] = [[str(x) for x in row] for row in c_hat.rows]
            transform["residues"] = []
            for xl in pred.regular_points:
                data = residue_data_at(t, xl)
                transform["residues"].append(
                    {
                        "point": str(xl),
                        "charpoly": data.charpoly.to_str("lam"),
                        "eigenvalues": [str(z) for z in data.eigenvalues] if data.eigenvalues is not None else None,
                    }
                )
        if mode == "full":
            transform["X"] = [[str(x) for x in row] for row in t.x_action.rows]
            if t.rank:
                try:
                    transform["closed_form"] = closed_form(t)
                except Exception as exc:  # reported, not raised
                    transform["closed_form"] = f"unavailable: {exc}"
        report["transform"] = transform
        sp = verify_stationary_phase(pred, t)
        report["stationary_phase"] = _comparison(sp)
        ok &= sp.passed
    if involution:
        inv = verify_involution(conn)
        report["involution"] = _comparison(inv)
        ok &= inv.passed
    report["checks"] = checks
    report["verdict"] = "pass" if ok else "fail"
    return report, ok


def render_report(report: Any) -> str:
    """Deterministic serialisation: fixed key order, two-space indent."""
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
