"""Command-line interface: ``lorentzkit <command> --model ...``.

Exit codes: 0 computed, 1 verdict-level failure, 2 input error.  Index sets
are printed 1-based; basis vectors are written ``e1, e2, ...``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Sequence

from . import bodies, deficits, lorentz, numdim
from .errors import DomainError, InvariantError, LorentzkitError, PreconditionError
from .intervals import DEFAULT_BITS
from .models import CompiledModel, ModelError, load_model, shipped_corpus
from .polycore import Vector, add, as_fraction, basis_vector, evaluate, sequence_sk
from .report import dumps, render_text

EXIT_OK, EXIT_VERDICT, EXIT_INPUT = 0, 1, 2

BATTERY_FAMILIES = (
    "rKT", "BonnesenFenchel", "Bonnesen", "RefinedKT", "AFdeficitInduction", "RadiusBound", "CompareRadii",
    "KTdominatesBM", "LogConcave", "LogConcaveTriple", "EndpointChain", "KhovanskiiTeissier", "BrunnMinkowski",
    "Schneider", "AFdominatesBM", "AFdominatesKT", "MonotoneLower", "MonotoneUpper",
)


class UsageError(LorentzkitError, ValueError):
    pass


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_vector(text: str, s: int) -> Vector:
    """``e2`` (1-based basis vector) or comma separated rationals, optionally bracketed."""
    t = text.strip().strip("()[]").strip()
    if t.lower().startswith("e") and t[1:].isdigit():
        i = int(t[1:])
        if not 1 <= i <= s:
            raise UsageError(f"basis vector {t} out of range 1..{s}")
        return basis_vector(s, i - 1)
    try:
        v = tuple(as_fraction(x) for x in t.replace(" ", "").split(","))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot read vector {text!r}: {exc}") from None
    if len(v) != s:
        raise UsageError(f"vector {text!r} has {len(v)} coordinates, the model has {s} variables")
    return v


def parse_collection(text: str, s: int) -> list[Vector]:
    """``e2,e3`` or ``1,0,0;0,1,1`` (vectors separated by ``;``)."""
    if ";" in text:
        parts = [p for p in text.split(";") if p.strip()]
    else:
        parts = [p for p in text.split(",") if p.strip()]
        if not all(p.strip().lower().startswith("e") for p in parts):
            parts = [text]
    return [parse_vector(p, s) for p in parts]


def _one_based(idx):
    return None if idx is None else [i + 1 for i in idx]


def _pick_pair(model: CompiledModel, args) -> tuple[Vector, Vector]:
    s = model.f.nvars
    pair = model.pairs[0]
    alpha = parse_vector(args.alpha, s) if args.alpha else pair.alpha
    beta = parse_vector(args.beta, s) if args.beta else pair.beta
    return alpha, beta


def _omega(model: CompiledModel, args) -> Vector:
    return parse_vector(args.omega, model.f.nvars) if args.omega else model.omega


def _verdict_payload(v: deficits.Verdict) -> dict:
    return {
        "item": v.item,
        "holds": v.holds,
        "lhs": v.lhs,
        "rhs": "inf" if v.rhs is None else v.rhs,
        "slack": v.slack,
        "exact": v.exact,
        "note": v.note,
    }


def _radii_payload(r: deficits.RadiiReport) -> dict:
    return {
        "r_in": r.r_in,
        "R_out": "inf" if r.R_out is None else r.R_out,
        "argmin_tuple": _one_based(r.argmin_tuple),
        "argmax_tuple": _one_based(r.argmax_tuple),
        "exhaustive": r.exhaustive,
        "tuples_tested": r.tuples_tested,
    }


def _certificate_payload(cert: lorentz.LorentzCertificate) -> dict:
    return {
        "verdict": cert.verdict,
        "support_m_convex": cert.support_m_convex,
        "notes": list(cert.notes),
        "witnesses": [
            {"dirs": list(w.dirs), "inertia": None if w.inertia is None else list(w.inertia.as_tuple()), "note": w.note}
            for w in cert.witnesses
        ],
    }


def _panel_payload(p: deficits.ProportionalityPanel) -> dict:
    return {
        "conditions": None if p.conditions is None else list(p.conditions),
        "agree": p.agree,
        "strict_class": p.strict,
        "flagged_non_strict": p.flagged_non_strict,
        "both_big": p.both_big,
        "strict_bm": p.strict_bm,
        "note": p.note,
    }


def certify_model(model: CompiledModel, samples: int):
    sampler = model.sampler(samples)
    cert = lorentz.check_cone_lorentzian(model.f, model.nef, sampler)
    strict = None
    if cert.verdict in (lorentz.LORENTZIAN, lorentz.STRICT):
        strict = lorentz.check_strict(model.f, model.nef, sampler, cert)
    return cert, strict


def _is_strict(strict) -> bool:
    return strict is not None and strict.verdict == lorentz.STRICT


def deficit_payload(rep: deficits.DeficitReport) -> dict:
    out = {
        "d": rep.d,
        "s_sequence": list(rep.s_sequence),
        "volume_sum": rep.volume_sum,
        "A_squared": rep.A_squared,
        "A": rep.A,
        "B": rep.B,
        "K": rep.K,
        "K_reverse": rep.K_reverse,
        "K_l": {str(l): K for l, K in enumerate(rep.K_l, 1)},
        "sigma": rep.sigma,
        "radii": _radii_payload(rep.radii),
        "delta_alpha_omega": "inf" if rep.delta_alpha_omega is None else rep.delta_alpha_omega,
        "delta_beta_omega": "inf" if rep.delta_beta_omega is None else rep.delta_beta_omega,
        "proportionality": _panel_payload(rep.panel),
        "battery": [_verdict_payload(v) for v in rep.battery],
        "battery_failures": len(rep.failures()),
        "battery_indeterminate": len(rep.indeterminate()),
    }
    if rep.fmp is not None:
        out["fmp_chain"] = _fmp_chain_payload(rep.fmp)
    return out


def _fmp_chain_payload(chain: deficits.FmpChain) -> dict:
    return {
        "F": chain.F.F,
        "F_witness": chain.F.gamma,
        "F_note": chain.F.note,
        "optimality_gap": chain.F.gap,
        "radii": _radii_payload(chain.radii),
        "bound_one_minus_r_squared": chain.bound_square,
        "bound_two_one_minus_r": chain.bound_linear,
        "verdicts": [_verdict_payload(v) for v in chain.verdicts],
        "kt_radii_ratio": chain.kt_radii_ratio,
    }


# ---------------------------------------------------------------------------
# commands


def cmd_certify(model: CompiledModel, args) -> tuple[dict, int]:
    cert, strict = certify_model(model, args.samples)
    payload = {
        "certificate": _certificate_payload(cert),
        "strictness": None if strict is None else _certificate_payload(strict),
    }
    verdict = strict.verdict if _is_strict(strict) else cert.verdict
    payload["verdict"] = verdict
    code = EXIT_OK
    expect = args.expect or None
    if expect == "lorentzian" and cert.verdict not in (lorentz.LORENTZIAN, lorentz.STRICT):
        code = EXIT_VERDICT
    if expect == "strict" and not _is_strict(strict):
        code = EXIT_VERDICT
    return payload, code


def _collection(model: CompiledModel, args) -> list[Vector]:
    if args.collection:
        return parse_collection(args.collection, model.f.nvars)
    if model.collections:
        return list(model.collections[0])
    raise UsageError("this command needs --collection (or a model with collections)")


def cmd_nd(model: CompiledModel, args) -> tuple[dict, int]:
    omega = _omega(model, args)
    classes = _collection(model, args) if (args.collection or model.collections) else [_pick_pair(model, args)[0]]
    coll = numdim.make_collection(classes, omega, model.nef)
    nd_c = numdim.nd_collection(model.f, coll)
    payload = {
        "omega": omega,
        "classes": [{"class": c, "nd": numdim.nd_omega(model.f, c, omega)} for c in classes],
        "nd_collection": nd_c,
        "m": coll.m,
        "tight_sets": [_one_based(I) for I in numdim.tight_sets(model.f, coll)],
    }
    return payload, EXIT_OK


def cmd_hall_rado(model: CompiledModel, args) -> tuple[dict, int]:
    omega = _omega(model, args)
    coll = numdim.make_collection(_collection(model, args), omega, model.nef)
    res = numdim.hall_rado(model.f, coll, model.sampler(args.samples), model.nef)
    payload = {
        "product_value": res.product_value,
        "product_nonzero": res.product_nonzero,
        "nd_criterion": res.nd_criterion,
        "violating_I": _one_based(res.violating_I),
        "agree": res.product_nonzero == res.nd_criterion,
    }
    return payload, EXIT_OK if payload["agree"] else EXIT_VERDICT


def cmd_kernel_face(model: CompiledModel, args) -> tuple[dict, int]:
    omega = _omega(model, args)
    coll = numdim.make_collection(_collection(model, args), omega, model.nef)
    cone = model.psef or model.nef
    rep = numdim.kernel_face(model.f, coll, cone)
    payload = {
        "cone": cone.name,
        "nd_collection": rep.nd_collection,
        "classification": rep.classification,
        "functional_on_generators": list(rep.functional),
        "zero_generators": _one_based(rep.zero_generators),
        "face_generators": rep.face_generators(cone),
        "maximal_index_set": _one_based(rep.maximal_index_set),
        "stable_under_maximal_set": None if rep.stable_under_I0 is None else list(rep.stable_under_I0),
        "tagged": {k: _one_based(v) for k, v in rep.tagged.items()},
    }
    return payload, EXIT_OK


def cmd_sequence(model: CompiledModel, args) -> tuple[dict, int]:
    alpha, beta = _pick_pair(model, args)
    s = sequence_sk(model.f, alpha, beta)
    d = model.f.degree
    payload: dict[str, Any] = {"s_sequence": list(s), "log_concave": all(s[k] ** 2 >= s[k - 1] * s[k + 1] for k in range(1, d))}
    if s[0] > 0 and s[d] > 0:
        flags = deficits.logconc_equalities(s, evaluate(model.f, add(alpha, beta)))
        payload["equality_conditions"] = list(flags)
        payload["equality_conditions_agree"] = len(set(flags)) == 1
    return payload, EXIT_OK


def cmd_deficits(model: CompiledModel, args) -> tuple[dict, int]:
    alpha, beta = _pick_pair(model, args)
    _, strict = certify_model(model, args.samples)
    rep = deficits.deficit_report(model.f, alpha, beta, _omega(model, args), model.nef, args.precision_bits,
                                  strict=_is_strict(strict))
    payload = deficit_payload(rep)
    return payload, EXIT_VERDICT if rep.failures() else EXIT_OK


def cmd_radii(model: CompiledModel, args) -> tuple[dict, int]:
    alpha, beta = _pick_pair(model, args)
    return {
        "alpha_beta": _radii_payload(deficits.radii(model.f, alpha, beta, model.nef)),
        "beta_alpha": _radii_payload(deficits.radii(model.f, beta, alpha, model.nef)),
    }, EXIT_OK


def cmd_stability(model: CompiledModel, args) -> tuple[dict, int]:
    alpha, beta = _pick_pair(model, args)
    omega = _omega(model, args)
    chain = deficits.fmp_radii_chain(model.f, alpha, beta, omega, model.nef, args.precision_bits)
    payload = _fmp_chain_payload(chain)
    code = EXIT_VERDICT if any(v.holds is False for v in chain.verdicts) else EXIT_OK
    return payload, code


def _planar_bodies(model: CompiledModel, alpha: Vector, beta: Vector):
    if model.kind != "polytopes" or model.bodies[0].dim != 2:
        raise UsageError("fmp needs a planar polytopes model")
    if any(x < 0 for x in alpha + beta):
        raise UsageError("Minkowski combinations need nonnegative coefficients")
    return bodies.combination(model.bodies, alpha), bodies.combination(model.bodies, beta)


def cmd_fmp(model: CompiledModel, args) -> tuple[dict, int]:
    alpha, beta = _pick_pair(model, args)
    A, B = _planar_bodies(model, alpha, beta)
    rec = bodies.fmp_bodies_check(A, B, args.precision_bits)
    return {
        "F_bodies": rec.F,
        "sigma": rec.sigma,
        "B": rec.B,
        "B_is_zero": rec.B_is_zero,
        "F_over_sqrt_sigma_B": rec.ratio,
        "areas": {"A": rec.areas[0], "B": rec.areas[1], "A+B": rec.areas[2]},
    }, EXIT_OK


# ---------------------------------------------------------------------------
# corpus


def run_model_file(path: str, bits: int = DEFAULT_BITS, samples: int = 16):
    """Full pipeline for every pair of one model; returns (summaries, records)."""
    model = load_model(path)
    cert, strict = certify_model(model, samples)
    summaries, records = [], []
    lorentzian = cert.verdict in (lorentz.LORENTZIAN, lorentz.STRICT)
    for pair in model.pairs:
        instance = f"{model.name}:{pair.name}"
        entry: dict[str, Any] = {
            "instance": instance,
            "model": model.name,
            "kind": model.kind,
            "d": model.f.degree,
            "s": model.f.nvars,
            "alpha": pair.alpha,
            "beta": pair.beta,
            "certificate": cert.verdict,
            "strict": _is_strict(strict),
        }
        if not lorentzian:
            entry["skipped"] = "not certified Lorentzian"
            summaries.append(entry)
            continue
        try:
            rep = deficits.deficit_report(model.f, pair.alpha, pair.beta, model.omega, model.nef, bits,
                                          strict=_is_strict(strict))
        except (DomainError, PreconditionError) as exc:
            entry["skipped"] = f"{type(exc).__name__}: {exc}"
            summaries.append(entry)
            continue
        entry["deficits"] = deficit_payload(rep)
        if model.kind == "polytopes" and model.bodies[0].dim == 2 and all(x >= 0 for x in pair.alpha + pair.beta):
            A, B = _planar_bodies(model, pair.alpha, pair.beta)
            entry["F_bodies"] = bodies.asymmetry_F_bodies(A, B, bits).F
        summaries.append(entry)
        records.append((instance, rep))
    return summaries, records


def _slack_lo(v: deficits.Verdict):
    if v.rhs is None:
        return float("inf")
    sl = v.slack
    return float(sl.lo)


def corpus_csv(summaries: list[dict], records: dict[str, deficits.DeficitReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["instance", "d", "s", "A2", "B_lo", "B_hi", "K", "sigma", "r", "R"]
                    + [f"slack_{fam}" for fam in BATTERY_FAMILIES])
    for entry in summaries:
        rep = records.get(entry["instance"])
        if rep is None:
            continue
        fams: dict[str, float] = {}
        for v in rep.battery:
            fam = v.item.split("[")[0]
            value = _slack_lo(v)
            fams[fam] = min(fams.get(fam, value), value)
        R = "inf" if rep.radii.R_out is None else f"{float(rep.radii.R_out):.12g}"
        writer.writerow([entry["instance"], rep.d, entry["s"], f"{float(rep.A_squared):.12g}",
                         f"{float(rep.B.lo):.12g}", f"{float(rep.B.hi):.12g}", f"{float(rep.K.midpoint()):.12g}",
                         f"{float(rep.sigma.midpoint()):.12g}", f"{float(rep.radii.r_in):.12g}", R]
                        + [("" if fam not in fams else f"{fams[fam]:.12g}") for fam in BATTERY_FAMILIES])
    return buf.getvalue()


def _constants_payload(ec: deficits.EmpiricalConstants) -> dict:
    def row(r: deficits.ConstantRow):
        return {"theorem": r.theorem, "exponent": r.exponent, "min_ratio_lower_bound": r.min_ratio,
                "instance": r.instance, "samples": r.samples}

    return {"rows": [row(r) for r in ec.rows], "diskant_sweep": [row(r) for r in ec.diskant_sweep],
            "all_positive": ec.all_positive()}


def run_corpus(directory: Path, bits: int = DEFAULT_BITS, samples: int = 16, workers: int = 1):
    files = sorted(str(p) for p in Path(directory).glob("*.json"))
    if not files:
        raise UsageError(f"no model files in {directory}")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_model_file, files, [bits] * len(files), [samples] * len(files)))
    else:
        results = [run_model_file(p, bits, samples) for p in files]
    summaries = sorted((e for s, _ in results for e in s), key=lambda e: e["instance"])
    records = dict(sorted((r for _, rs in results for r in rs), key=lambda r: r[0]))
    constants = deficits.empirical_constants(list(records.items()), bits)
    failures = sum(e.get("deficits", {}).get("battery_failures", 0) for e in summaries)
    indeterminate = sum(e.get("deficits", {}).get("battery_indeterminate", 0) for e in summaries)
    report = {
        "instances": summaries,
        "instance_count": len(summaries),
        "battery_failures": failures,
        "battery_indeterminate": indeterminate,
        "empirical_constants": _constants_payload(constants),
    }
    return report, corpus_csv(summaries, records)


def cmd_corpus(args) -> tuple[dict, int]:
    directory = Path(args.dir) if args.dir else shipped_corpus()
    start = time.perf_counter()
    report, table = run_corpus(directory, args.precision_bits, args.samples, args.workers)
    print(f"corpus: {report['instance_count']} instances in {time.perf_counter() - start:.1f}s", file=sys.stderr)
    if args.csv:
        Path(args.csv).write_text(table)
    code = EXIT_VERDICT if report["battery_failures"] or not report["empirical_constants"]["all_positive"] else EXIT_OK
    return report, code


COMMANDS = {
    "certify": cmd_certify,
    "nd": cmd_nd,
    "hall-rado": cmd_hall_rado,
    "kernel-face": cmd_kernel_face,
    "sequence": cmd_sequence,
    "deficits": cmd_deficits,
    "radii": cmd_radii,
    "stability": cmd_stability,
    "fmp": cmd_fmp,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=DEFAULT_BITS)
    common.add_argument("--samples", type=int, default=16, help="interior sample points per cone")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--out", help="write the report to this file instead of stdout")

    model_args = argparse.ArgumentParser(add_help=False)
    model_args.add_argument("--model", required=True, help="model file or shipped model name")
    model_args.add_argument("--alpha", help="vector such as e1 or 1,1/2")
    model_args.add_argument("--beta")
    model_args.add_argument("--omega", help="interior reference class (default from the model)")
    model_args.add_argument("--collection", help="classes such as e2,e3 or 1,0,0;0,1,1")
    model_args.add_argument("--expect", choices=("lorentzian", "strict"))

    parser = argparse.ArgumentParser(prog="lorentzkit", description="Exact Lorentzian certification and deficit inequalities.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common, model_args])
    corpus = sub.add_parser("corpus", parents=[common])
    corpus.add_argument("dir", nargs="?", help="directory of model files (default: shipped corpus)")
    corpus.add_argument("--workers", type=int, default=1)
    corpus.add_argument("--csv", help="write the per-instance CSV here")
    return parser


def _emit(payload: Any, args) -> None:
    text = dumps(payload) if args.format == "structured" else render_text(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, message: str, where: str | None = None) -> None:
    record = {"error": kind, "message": message}
    if where:
        record["where"] = where
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.precision_bits < 16:
        _error("UsageError", "--precision-bits must be at least 16")
        return EXIT_INPUT
    try:
        if args.command == "corpus":
            payload, code = cmd_corpus(args)
        else:
            model = load_model(args.model)
            payload, code = COMMANDS[args.command](model, args)
            payload = {"command": args.command, "model": model.name, **payload}
    except ModelError as exc:
        _error("ModelError", exc.detail, exc.where)
        return EXIT_INPUT
    except InvariantError as exc:
        _error("InvariantError", str(exc))
        return EXIT_VERDICT
    except (LorentzkitError, ValueError, ZeroDivisionError) as exc:
        _error(type(exc).__name__, str(exc))
        return EXIT_INPUT
    _emit(payload, args)
    return code


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
