"""Command-line front end.

Subcommands: verify, convert, synthesize, certify, simulate, factorize.
Inputs and outputs are the self-describing JSON documents of
:mod:`rstab.serialize`; every invocation prints a human-readable summary
and can additionally write a machine-readable report with ``--report``.

Exit codes partition the outcomes: 0 all checks passed, 1 a validity or
stability check failed, 2 an input could not be parsed, 3 a required
matrix inverse does not exist.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import serialize
from .errors import (
    ConvergenceError,
    InfeasibleError,
    InvariantViolation,
    SchemaError,
    SingularMatrixError,
    SpaceMismatchError,
    ToolkitError,
)
from .parameterizations import (
    PlantSS,
    controller_to_youla,
    coprime_factorize,
    iop_from_controller,
    iop_to_controller,
    mixed1_from_controller,
    mixed1_to_controller,
    mixed2_from_controller,
    mixed2_to_controller,
    slp_of_from_controller,
    slp_of_to_controller,
    slp_of_to_iop,
    slp_sf_from_controller,
    slp_sf_to_controller,
    slp_sf_to_iop,
    youla_to_controller,
    youla_to_iop,
)
from .ratfun import DEFAULT_TOL
from .realization import check_conditions, stability_from_realization, verify_lemma
from .sls import (
    DESIGN_SEPARATION,
    RealizationVariant,
    VARIANT_KINDS,
    certify_realization,
    dare_lqr,
    simulate,
    synthesize_sf_h2,
)
from .tfmatrix import SignalSpace, TFMatrix

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_SINGULAR = 3

PARAMETERIZATIONS = tuple(serialize.BUNDLE_FIELDS)


@dataclass
class JobSpec:
    """One CLI invocation: a command, its input files, and its options."""

    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    options: dict[str, Any] = field(default_factory=dict)


def _report(command: str, passed: bool, findings=(), **details) -> dict:
    return {
        "schema_version": serialize.SCHEMA_VERSION,
        "kind": "report",
        "command": command,
        "passed": passed,
        "findings": [
            {"matrix": f.matrix, "row": f.row, "col": f.col, "kind": f.kind} for f in findings
        ],
        "details": details,
    }


def _finish(report: dict, passed: bool) -> tuple[int, dict]:
    code = EXIT_PASS if passed else EXIT_CHECK_FAILED
    report["exit_code"] = code
    return code, report


def _cmd_verify(job: JobSpec) -> tuple[int, dict]:
    doc = serialize.load_document(job.inputs["realization"])
    r, s = serialize.realization_from_doc(doc)
    tol = job.options.get("tol", DEFAULT_TOL)
    if s is None:
        s = stability_from_realization(r)
    lemma_ok = verify_lemma(r, s)
    report = check_conditions(r, s, tol)
    passed = lemma_ok and report.passed
    return _finish(
        _report("verify", passed, report.findings, lemma_holds=lemma_ok, tol=tol),
        passed,
    )


def _state_equals_output(plant: PlantSS) -> bool:
    if plant.p != plant.n or not plant.is_strictly_proper:
        return False
    return all(
        plant.C[i, j] == (1 if i == j else 0) for i in range(plant.n) for j in range(plant.n)
    )


def _controller_with_output(k: TFMatrix, plant: PlantSS, name: str) -> TFMatrix:
    """Relabel a controller between x- and y-measured loops.

    Legitimate only when the state is taken as the measurement
    (C = I, D = 0), which is also the premise under which state- and
    output-feedback parameterizations can be compared at all.
    """
    have = k.cols.names[0]
    if have == name:
        return k
    if not _state_equals_output(plant):
        raise InvariantViolation(
            "conversion between state- and output-measured parameterizations "
            "requires C = I and D = 0"
        )
    return k.relabel(SignalSpace.single("u", plant.m), SignalSpace.single(name, plant.p))


def _cmd_convert(job: JobSpec) -> tuple[int, dict]:
    tol = job.options.get("tol", DEFAULT_TOL)
    plant = serialize.plant_from_doc(serialize.load_document(job.inputs["plant"]))
    factors = None
    if "factors" in job.inputs:
        factors = serialize.coprime_from_doc(serialize.load_document(job.inputs["factors"]), tol)
    source, bundle = serialize.bundle_from_doc(
        serialize.load_document(job.inputs["bundle"]), plant, tol
    )
    target = job.options["target"]
    if target not in PARAMETERIZATIONS:
        raise SchemaError(f"unknown target parameterization {target!r}")

    def need_factors():
        if factors is None:
            raise SchemaError("this conversion needs --factors (a coprime_factors file)")
        return factors

    # direct translation maps, where one exists
    if source == "youla" and target == "iop":
        out = youla_to_iop(need_factors(), bundle, tol)
    elif source == "slp_sf" and target == "iop":
        out = slp_sf_to_iop(bundle, plant, tol)
    elif source == "slp_of" and target == "iop":
        out = slp_of_to_iop(bundle, plant, tol)
    elif source == target:
        out = bundle
    else:
        # through the controller
        if source == "youla":
            k = youla_to_controller(need_factors(), bundle)
        elif source == "iop":
            k = iop_to_controller(bundle)
        elif source == "slp_sf":
            k = slp_sf_to_controller(bundle)
        elif source == "slp_of":
            k = slp_of_to_controller(bundle, plant.D)
        elif source == "mixed1":
            k = mixed1_to_controller(bundle)
        else:
            k = mixed2_to_controller(bundle)
        if target == "slp_sf":
            k = _controller_with_output(k, plant, "x")
            out = slp_sf_from_controller(plant, k, tol)
        else:
            k = _controller_with_output(k, plant, "y")
            if target == "youla":
                out = controller_to_youla(need_factors(), k, tol)
            elif target == "iop":
                out = iop_from_controller(plant.transfer(), k, tol)
            elif target == "slp_of":
                out = slp_of_from_controller(plant, k, tol)
            elif target == "mixed1":
                out = mixed1_from_controller(plant, k, tol)
            else:
                out = mixed2_from_controller(plant, k, tol)
    doc = serialize.bundle_to_doc(target, out)
    serialize.dump_document(doc, job.options["out"])
    return _finish(
        _report("convert", True, source=source, target=target, out=str(job.options["out"])),
        True,
    )


def _cmd_synthesize(job: JobSpec) -> tuple[int, dict]:
    plant = serialize.plant_from_doc(serialize.load_document(job.inputs["plant"]))
    horizon = job.options["horizon"]
    if "weights" in job.inputs:
        qw, rw = serialize.weights_from_doc(serialize.load_document(job.inputs["weights"]))
    else:
        qw = np.eye(plant.n, dtype=int).tolist()
        rw = np.eye(plant.m, dtype=int).tolist()
    bundle = synthesize_sf_h2(plant, qw, rw, horizon)
    doc = serialize.fir_bundle_to_doc(
        horizon, {"phi_x": bundle.phi_x, "phi_u": bundle.phi_u}
    )
    serialize.dump_document(doc, job.options["out"])
    return _finish(
        _report(
            "synthesize", True, horizon=horizon, constraint_residual="0",
            out=str(job.options["out"]),
        ),
        True,
    )


def _variant_from_inputs(job: JobSpec) -> tuple[RealizationVariant, PlantSS]:
    plant = serialize.plant_from_doc(serialize.load_document(job.inputs["plant"]))
    parts = serialize.fir_bundle_from_doc(serialize.load_document(job.inputs["fir"]))
    kind = job.options["variant"]
    if kind == DESIGN_SEPARATION:
        if "p_c" not in parts or "m_c" not in parts:
            raise SchemaError("design separation needs p_c and m_c taps in the fir_bundle")
        v = RealizationVariant.design_separation(
            parts["p_c"], parts["m_c"], parts["phi_x"], parts["phi_u"]
        )
    else:
        v = RealizationVariant(kind, parts["phi_x"], parts["phi_u"])
    return v, plant


def _cmd_certify(job: JobSpec) -> tuple[int, dict]:
    v, plant = _variant_from_inputs(job)
    tol = job.options.get("tol", DEFAULT_TOL)
    rep = certify_realization(v, plant, tol)
    details: dict[str, Any] = {"variant": rep.variant, "tol": tol}
    if rep.schur_stable is not None:
        details["schur_stable"] = rep.schur_stable
    if rep.delta_column_strictly_proper is not None:
        details["delta_column_strictly_proper"] = rep.delta_column_strictly_proper
    return _finish(_report("certify", rep.passed, rep.findings, **details), rep.passed)


def _cmd_simulate(job: JobSpec) -> tuple[int, dict]:
    v, plant = _variant_from_inputs(job)
    horizon = job.options["horizon"]
    if "disturbance" in job.inputs:
        d = serialize.disturbance_from_doc(serialize.load_document(job.inputs["disturbance"]))
    else:
        impulse = np.zeros((1, plant.n))
        impulse[0, 0] = 1.0
        d = {"x": impulse}
    trace = simulate(v, plant, d, horizon)
    serialize.dump_document(serialize.trace_to_doc(trace), job.options["out"])
    return _finish(
        _report(
            "simulate", True, variant=v.kind, horizon=horizon, out=str(job.options["out"]),
        ),
        True,
    )


def _cmd_factorize(job: JobSpec) -> tuple[int, dict]:
    plant = serialize.plant_from_doc(serialize.load_document(job.inputs["plant"]))
    tol = job.options.get("tol", DEFAULT_TOL)
    if "gains" in job.inputs:
        f_gain, l_gain = serialize.gains_from_doc(serialize.load_document(job.inputs["gains"]))
    else:
        f_gain = dare_lqr(plant, np.eye(plant.n), np.eye(plant.m))
        dual = PlantSS.state_feedback(plant.A.T, plant.C.T)
        l_gain = dare_lqr(dual, np.eye(plant.n), np.eye(plant.p)).T
    factors = coprime_factorize(plant, f_gain, l_gain, tol)
    serialize.dump_document(serialize.coprime_to_doc(factors), job.options["out"])
    return _finish(
        _report("factorize", True, tol=tol, out=str(job.options["out"])),
        True,
    )


_HANDLERS = {
    "verify": _cmd_verify,
    "convert": _cmd_convert,
    "synthesize": _cmd_synthesize,
    "certify": _cmd_certify,
    "simulate": _cmd_simulate,
    "factorize": _cmd_factorize,
}


def run(job: JobSpec) -> tuple[int, dict]:
    """Execute one job and return (exit_code, report document)."""
    try:
        return _HANDLERS[job.command](job)
    except KeyError as exc:
        report = _report(job.command, False, error=f"unknown command or missing input: {exc}")
        report["exit_code"] = EXIT_PARSE
        return EXIT_PARSE, report
    except SchemaError as exc:
        report = _report(job.command, False, error=str(exc))
        report["exit_code"] = EXIT_PARSE
        return EXIT_PARSE, report
    except SingularMatrixError as exc:
        report = _report(job.command, False, error=str(exc))
        report["exit_code"] = EXIT_SINGULAR
        return EXIT_SINGULAR, report
    except (InvariantViolation, InfeasibleError, ConvergenceError, SpaceMismatchError) as exc:
        findings = getattr(exc, "report", None)
        report = _report(
            job.command, False, findings.findings if findings else (), error=str(exc)
        )
        report["exit_code"] = EXIT_CHECK_FAILED
        return EXIT_CHECK_FAILED, report
    except ToolkitError as exc:
        report = _report(job.command, False, error=str(exc))
        report["exit_code"] = EXIT_CHECK_FAILED
        return EXIT_CHECK_FAILED, report


def _print_report(report: dict) -> None:
    status = "PASS" if report.get("passed") else "FAIL"
    print(f"{report.get('command')}: {status}")
    for f in report.get("findings", []):
        print(f"  {f['matrix']}[{f['row']},{f['col']}]: {f['kind']}")
    details = report.get("details", {})
    for key, value in details.items():
        print(f"  {key}: {value}")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rstab",
        description="Verify, convert, synthesize, certify, and simulate "
        "discrete-time closed-loop realizations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=False):
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="pole/stability tolerance (default 1e-8)")
        p.add_argument("--report", help="write a machine-readable report here")
        if out:
            p.add_argument("--out", required=True, help="output document path")

    p = sub.add_parser("verify", help="check the defining identity and stability conditions")
    p.add_argument("realization", help="realization document (optionally with stability)")
    common(p)

    p = sub.add_parser("convert", help="convert a parameter bundle to another parameterization")
    p.add_argument("bundle", help="parameter bundle document")
    p.add_argument("--plant", required=True, help="plant document")
    p.add_argument("--to", required=True, choices=PARAMETERIZATIONS, dest="target")
    p.add_argument("--factors", help="coprime factors document (for Youla conversions)")
    common(p, out=True)

    p = sub.add_parser("synthesize", help="FIR H2 state-feedback synthesis")
    p.add_argument("--plant", required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--weights", help="weights document (default: identity)")
    common(p, out=True)

    p = sub.add_parser("certify", help="certify a closed-loop realization variant")
    p.add_argument("fir", help="fir_bundle document")
    p.add_argument("--plant", required=True)
    p.add_argument("--variant", required=True, choices=VARIANT_KINDS)
    common(p)

    p = sub.add_parser("simulate", help="simulate a realization variant in the time domain")
    p.add_argument("fir", help="fir_bundle document")
    p.add_argument("--plant", required=True)
    p.add_argument("--variant", required=True, choices=VARIANT_KINDS)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--disturbance", help="disturbance document (default: impulse on x[0])")
    common(p, out=True)

    p = sub.add_parser("factorize", help="doubly coprime factorization of a plant")
    p.add_argument("--plant", required=True)
    p.add_argument("--gains", help="gains document with F and L (default: LQR gains)")
    common(p, out=True)

    return parser


def main(argv=None) -> None:
    args = _parser().parse_args(argv)
    inputs = {}
    options: dict[str, Any] = {"tol": args.tol}
    for name in ("realization", "bundle", "fir", "plant", "factors", "weights",
                 "gains", "disturbance"):
        value = getattr(args, name, None)
        if value is not None:
            inputs[name] = value
    for name in ("target", "horizon", "variant", "out"):
        value = getattr(args, name, None)
        if value is not None:
            options[name] = value
    job = JobSpec(command=args.command, inputs=inputs, options=options)
    code, report = run(job)
    _print_report(report)
    if args.report:
        serialize.dump_document(report, args.report)
    sys.exit(code)


if __name__ == "__main__":
    main()
