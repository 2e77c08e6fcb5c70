"""Command-line front end.

    microtherm convert {rare,noisy,unital} RHO.json SIGMA.json [--witness PATH]
    microtherm counterexamples {dqt,square-bit,half-disk,all}
    microtherm duality PHI.json PSI.json
    microtherm microcanonical MODEL        (quantum:3, classical:4, square_bit, ... or a JSON file)
    microtherm audit

Common options: --seed N --tol X --format json|text.

Exit codes: 0 success / Yes, 1 No or a counterexample not reproduced,
2 Unknown, 3 no unique microcanonical state, 64 unreadable or inconsistent
input, 65 unsupported model, 70 internal disagreement between decision paths.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import audit
from . import convertibility as cv
from . import duality as du
from . import microcanonical as mc
from . import serialize as io
from .errors import (
    DimensionMismatch,
    MicrothermError,
    ModelMismatch,
    NonUniqueSpectrum,
    NotMicrocanonical,
    ParseError,
    PathDisagreement,
    UnsupportedModel,
)
from .numerics import Tolerance

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_NOT_UNIQUE = 0, 1, 2, 3
EXIT_INPUT, EXIT_UNSUPPORTED, EXIT_INTERNAL = 64, 65, 70

_RELATIONS = {"rare": cv.Relation.RARE, "noisy": cv.Relation.NOISY, "unital": cv.Relation.UNITAL}
_ANSWER_EXIT = {cv.Answer.YES: EXIT_OK, cv.Answer.NO: EXIT_NO, cv.Answer.UNKNOWN: EXIT_UNKNOWN}


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _text(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key in sorted(obj):
        val = obj[key]
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines += _text(val, indent + 1)
        else:
            lines.append(f"{pad}{key}: {val}")
    return lines


def _emit(report: dict, fmt: str):
    out = io.dumps(report) if fmt == "json" else "\n".join(_text(report))
    sys.stdout.write(out + "\n")


def _sidecar(rho_path: str, relation: str) -> str:
    stem = rho_path[:-5] if rho_path.endswith(".json") else rho_path
    return f"{stem}.{relation}.witness.json"


def cmd_convert(args, tol) -> tuple[int, dict]:
    rho = io.state_from_json(io.load_json(args.rho), tol)
    sigma = io.state_from_json(io.load_json(args.sigma), tol)
    try:
        verdict = cv.decide(_RELATIONS[args.relation], rho, sigma, tol)
    except ModelMismatch as e:
        raise _Fail(EXIT_INPUT, str(e)) from None
    except NonUniqueSpectrum as e:
        raise _Fail(EXIT_UNSUPPORTED, str(e)) from None
    report = {"command": "convert", "model": str(rho.model), **verdict.to_dict()}
    if verdict.witness is not None:
        path = args.witness or _sidecar(args.rho, args.relation)
        io.write_json(path, io.channel_to_json(verdict.witness))
        report["witness_file"] = path
    if verdict.relation is cv.Relation.RARE and rho.model.kind.value == "doubled_quantum":
        report["sector_mass"] = [list(cv.dqt_sector_mass(rho)), list(cv.dqt_sector_mass(sigma))]
    return _ANSWER_EXIT[verdict.answer], report


def _dqt_section(seed):
    rep = cv.counterexample_report()
    failed = [f"dqt.{k}" for k, ok in rep["checks"].items() if not ok]
    return rep, failed


def _audit_section(checks):
    entries = {c.name: {"status": c.status, "expected": audit.expected_status(c.name),
                        "details": c.details, "data": c.data} for c in checks}
    failed = [name for name, e in entries.items() if e["status"] != e["expected"]]
    return entries, failed


def cmd_counterexamples(args, tol) -> tuple[int, dict]:
    which = ["dqt", "square-bit", "half-disk"] if args.which == "all" else [args.which]
    report = {"command": "counterexamples"}
    failures = []
    for w in which:
        if w == "dqt":
            section, failed = _dqt_section(args.seed)
        elif w == "square-bit":
            section, failed = _audit_section([audit.check_permutability_square_bit(),
                                              audit.check_strong_symmetry_square_bit()])
        else:
            section, failed = _audit_section([audit.check_transitivity(mc.m.HalfDisk(), seed=args.seed),
                                              audit.check_half_disk_nonuniqueness()])
        report[w] = section
        failures += failed
    report["all_reproduced"] = not failures
    report["first_failure"] = failures[0] if failures else None
    if failures:
        sys.stderr.write(f"not reproduced: {failures[0]}\n")
    return (EXIT_OK if not failures else EXIT_NO), report


def cmd_duality(args, tol) -> tuple[int, dict]:
    phi = io.bipartite_from_json(io.load_json(args.phi), tol)
    psi = io.bipartite_from_json(io.load_json(args.psi), tol)
    try:
        clauses = du.duality_clauses(phi, psi, tol)
    except DimensionMismatch as e:
        raise _Fail(EXIT_INPUT, str(e)) from None
    report = {
        "command": "duality",
        "dims": list(phi.dims),
        "schmidt": {"phi": du.schmidt(phi, tol).tolist(), "psi": du.schmidt(psi, tol).tolist()},
        "entropy": {"phi": du.entanglement_entropy(phi), "psi": du.entanglement_entropy(psi)},
        "clauses": {"schmidt_majorisation": clauses.schmidt_majorisation,
                    "marginal_a_rare": clauses.marginal_a_rare,
                    "marginal_b_rare": clauses.marginal_b_rare},
        "agree": clauses.agree,
        "locc_convertible": clauses.schmidt_majorisation if clauses.agree else None,
    }
    if not clauses.agree:
        sys.stderr.write(f"duality clauses disagree: {clauses.as_tuple()}\n")
        return EXIT_INTERNAL, report
    return EXIT_OK, report


def cmd_microcanonical(args, tol) -> tuple[int, dict]:
    if os.path.exists(args.model):
        obj = io.load_json(args.model)
        model = io.model_from_json(obj.get("model", obj) if isinstance(obj, dict) else obj)
    else:
        try:
            model = io.parse_model_spec(args.model)
        except ParseError as e:
            raise _Fail(EXIT_UNSUPPORTED, str(e)) from None
    try:
        chi = mc.microcanonical_state(model, tol)
    except NotMicrocanonical:
        inv = mc.invariant_distribution_report(model)
        return EXIT_NOT_UNIQUE, {"command": "microcanonical", "model": str(model),
                                 "unique": False, "report": inv.to_dict()}
    except UnsupportedModel as e:
        raise _Fail(EXIT_UNSUPPORTED, str(e)) from None
    return EXIT_OK, {"command": "microcanonical", "model": str(model), "unique": True,
                     "state": io.state_to_json(chi)}


def cmd_audit(args, tol) -> tuple[int, dict]:
    entries, failed = _audit_section(audit.run_all(args.seed).checks)
    return (EXIT_OK if not failed else EXIT_NO), {"command": "audit", "checks": entries,
                                                  "all_as_expected": not failed}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed (default 0)")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="equality tolerance (default 1e-9)")
    common.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="microtherm", parents=[common],
                                description="Microcanonical thermodynamics toolkit for finite theory models.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("convert", parents=[common], help="decide state convertibility")
    c.add_argument("relation", choices=sorted(_RELATIONS))
    c.add_argument("rho")
    c.add_argument("sigma")
    c.add_argument("--witness", help="where to write the witness channel")
    c.set_defaults(func=cmd_convert)

    c = sub.add_parser("counterexamples", parents=[common], help="reproduce the worked counterexamples")
    c.add_argument("which", choices=["dqt", "square-bit", "half-disk", "all"])
    c.set_defaults(func=cmd_counterexamples)

    c = sub.add_parser("duality", parents=[common], help="entanglement/thermodynamics duality clauses")
    c.add_argument("phi")
    c.add_argument("psi")
    c.set_defaults(func=cmd_duality)

    c = sub.add_parser("microcanonical", parents=[common], help="print the microcanonical state")
    c.add_argument("model")
    c.set_defaults(func=cmd_microcanonical)

    c = sub.add_parser("audit", parents=[common], help="run every model property check")
    c.set_defaults(func=cmd_audit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.seed = getattr(args, "seed", 0)
    args.format = getattr(args, "format", "json")
    tol = Tolerance(eq_tol=args.tol) if hasattr(args, "tol") else Tolerance()
    try:
        code, report = args.func(args, tol)
    except _Fail as e:
        sys.stderr.write(f"error: {e}\n")
        return e.code
    except ParseError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except PathDisagreement as e:
        sys.stderr.write(f"internal disagreement: {e}\n")
        return EXIT_INTERNAL
    except MicrothermError as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_INPUT
    _emit(report, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
