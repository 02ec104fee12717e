"""Command-line front end: ``qorth <command> [flags]``.

Results go to stdout as line-delimited JSON, a short human summary goes to
stderr. Exit status: 0 on success, 1 when a checked property fails, 2 on
usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import acceptance
from .canonical import CLASS_N_TOL, block_gram, cos2_values, in_class_N, is_useful, parse_angle
from .core import DEFAULT_EPS, DecompositionError, matrix_from_json, matrix_to_json
from .kak import kak_decompose
from .pauli import pauli_matrix
from .search import (
    SearchConfig, continuous_search, leftover_strings, max_disjoint_family, triple_text,
)
from .subalgebra import (
    A0, B, from_json, from_pauli_triple, from_unitary, is_complementary,
    masa_from_pauli_triple, min_projection_check, overlap, parse_triple_text,
)
from .theorems import (
    cond_exp_N_direct, cond_exp_N_formula, direction_report, family_audit, overlap_formula,
    pauli_four_family, subalgebra_from_angles,
)

CHAMBER = "pi/4 >= alpha >= beta >= |gamma|, gamma >= 0 when alpha = pi/4"
CRITERIA = ("1", "2", "3", "4", "5", "6a", "6b", "7", "8")


class UsageError(ValueError):
    pass


def sig12(x: float) -> float:
    return float(f"{x:.12g}")


def _clean(obj):
    """JSON-ready copy: numpy scalars unwrapped, non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def emit(obj, out) -> None:
    out.write(json.dumps(_clean(obj), sort_keys=True, allow_nan=False) + "\n")


def say(msg: str) -> None:
    print(msg, file=sys.stderr)


def default_seed() -> int:
    raw = os.environ.get("QORTH_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"QORTH_SEED must be an integer, got {raw!r}") from None


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None


def load_matrix(path: str) -> np.ndarray:
    obj = _load_json(path)
    if isinstance(obj, dict) and "unitary" in obj and "data" not in obj:
        obj = obj["unitary"]
    return matrix_from_json(obj)


def load_subalgebra(spec: str):
    """``A0``, ``B``, ``triple:...``, ``masa:...`` or a path to subalgebra JSON."""
    if spec == "A0":
        return A0()
    if spec == "B":
        return B()
    if spec.startswith("triple:"):
        return from_pauli_triple(*parse_triple_text(spec))
    if spec.startswith("masa:"):
        return masa_from_pauli_triple(*parse_triple_text(spec[len("masa:"):]))
    return from_json(_load_json(spec))


def load_family(path: str) -> list:
    obj = _load_json(path)
    if isinstance(obj, dict):
        if "family" not in obj:
            raise UsageError("family JSON missing field 'family'")
        obj = obj["family"]
    if not isinstance(obj, list) or not obj:
        raise UsageError("family JSON must be a non-empty list of subalgebras")
    return [from_json(item) for item in obj]


def parse_angles(text: str) -> tuple[float, float, float]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise UsageError(f"--angles needs three comma-separated values, got {text!r}")
    return tuple(parse_angle(p) for p in parts)


# ---------------------------------------------------------------- commands

def cmd_check_useful(args, out) -> int:
    W = load_matrix(args.input)
    G = block_gram(W, 2)
    err = float(np.max(np.abs(G - np.eye(4))))
    useful = is_useful(W, args.tol)
    comp = is_complementary(A0(), from_unitary(W), args.tol)
    emit({"useful": useful, "block_gram_error": err, "complementary_to_A0": comp,
          "tol": args.tol}, out)
    say(f"useful: {useful} (block Gram error {err:.3g})")
    return 0


def cmd_complementary(args, out) -> int:
    S, T = load_subalgebra(args.a), load_subalgebra(args.b)
    ov = overlap(S, T)
    comp = is_complementary(S, T, args.tol)
    emit({"overlap": ov, "complementary": comp,
          "min_projection_rule": min_projection_check(S, T, args.tol), "tol": args.tol}, out)
    say(f"overlap {ov:.6g}: {'complementary' if comp else 'not complementary'}")
    return 0


def cmd_kak(args, out) -> int:
    W = load_matrix(args.input)
    K = kak_decompose(W, seed=args.seed)
    a = K.angles
    emit({"L1": matrix_to_json(K.L1), "L2": matrix_to_json(K.L2),
          "L3": matrix_to_json(K.L3), "L4": matrix_to_json(K.L4),
          "alpha": sig12(a.alpha), "beta": sig12(a.beta), "gamma": sig12(a.gamma),
          "phase": [float(np.real(K.global_phase)), float(np.imag(K.global_phase))],
          "reconstruction_error": K.reconstruction_error,
          "class_N": in_class_N(a), "chamber": CHAMBER}, out)
    say(f"angles ({a.alpha:.6f}, {a.beta:.6f}, {a.gamma:.6f}), "
        f"reconstruction error {K.reconstruction_error:.3g}")
    return 0


def cmd_overlap(args, out) -> int:
    a = parse_angles(args.angles)
    formula = overlap_formula(a)
    direct = overlap(subalgebra_from_angles(a), B())
    cls = in_class_N(a, CLASS_N_TOL)
    bound = formula >= 1 - args.tol if cls else None
    emit({"alpha": sig12(a[0]), "beta": sig12(a[1]), "gamma": sig12(a[2]),
          "overlap_formula": formula, "overlap_direct": direct,
          "formula_error": abs(formula - direct), "cos2": list(cos2_values(a)),
          "class_N": cls, "bound_holds": bound, "tol": args.tol}, out)
    say(f"Tr PQ = {formula:.12g} (direct {direct:.12g}); class N: {cls}")
    if abs(formula - direct) > 1e-9 or bound is False:
        say("verification failed")
        return 1
    return 0


def cmd_cond_exp(args, out) -> int:
    a = parse_angles(args.angles)
    gens = [args.generator] if args.generator else [1, 2, 3]
    worst = 0.0
    report = direction_report()
    for i in gens:
        coeff, p = cond_exp_N_formula(i, a)
        err = float(np.max(np.abs(coeff * pauli_matrix(p) - cond_exp_N_direct(i, a))))
        worst = max(worst, err)
        emit({"generator": i, "coefficient": coeff, "direction": p.letters,
              "reference_direction": report[i]["reference"], "error": err,
              "alpha": sig12(a[0]), "beta": sig12(a[1]), "gamma": sig12(a[2]),
              "tol": args.tol}, out)
        say(f"E_B(N (I s{i}) N*) = {coeff:+.6f} {p.letters} (error {err:.2g})")
    return 0 if worst <= args.tol else 1


def cmd_audit(args, out) -> int:
    if args.pauli_four:
        family = pauli_four_family()
    elif args.input:
        family = load_family(args.input)
    else:
        raise UsageError("audit needs --in FILE or --pauli-four")
    rep = family_audit(family, args.tol, gauge=not args.no_gauge)
    body = rep.to_json()
    if args.latex:
        body["latex"] = rep.to_latex()
    emit(body, out)
    say(f"{rep.size} members: {rep.verdict}, budget against B {rep.budget_vs_B:.12g}")
    for v in rep.violations:
        say(f"  {v}")
    return 0 if rep.budget_holds else 1


def cmd_search_discrete(args, out) -> int:
    anchor = ("+IX", "+IY", "+IZ") if args.include_a0 else None
    size, witnesses = max_disjoint_family(must_include=anchor)
    fams = [[triple_text(t) for t in w] for w in witnesses]
    leftovers = [[str(p) for p in leftover_strings(w)] for w in witnesses]
    verdicts = [family_audit([from_pauli_triple(*t) for t in w]).verdict for w in witnesses]
    emit({"max_size": size, "witness_count": len(witnesses), "witnesses": fams,
          "leftovers": leftovers, "verdicts": verdicts, "include_a0": args.include_a0}, out)
    say(f"maximum family size {size}, {len(witnesses)} witnesses")
    return 0


def cmd_search_continuous(args, out) -> int:
    cfg = SearchConfig(k=args.k, restarts=args.restarts, max_iters=args.max_iters,
                       seed=args.seed, penalty_tol=args.penalty_tol, target=args.target)
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    def progress(entry):
        say(f"restart {entry['restart']}: penalty {entry['penalty']:.3e} "
            f"({entry['evaluations']} evaluations)")

    res = continuous_search(cfg, progress if args.verbose else None)
    body = res.to_json()
    body["feasible"] = res.best_penalty <= cfg.penalty_tol
    emit(body, out)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["restart", "penalty", "evaluations", "iterations"])
            for e in res.per_restart_log:
                w.writerow([e["restart"], repr(float(e["penalty"])), e["evaluations"],
                            e["iterations"]])
    say(f"k={cfg.k}: best penalty {res.best_penalty:.6e} over {cfg.restarts} restarts "
        f"({'feasible' if body['feasible'] else 'infeasible'} at {cfg.penalty_tol:g})")
    return 0


def cmd_selftest(args, out) -> int:
    only = set(args.only.split(",")) if args.only else set(CRITERIA)
    unknown = only - set(CRITERIA)
    if unknown:
        raise UsageError(f"unknown criteria: {', '.join(sorted(unknown))}")
    seed = args.seed
    runners = {
        "1": lambda: acceptance.criterion_1(seed),
        "2": lambda: acceptance.criterion_2(seed),
        "3": lambda: acceptance.criterion_3(seed),
        "4": lambda: acceptance.criterion_4(seed),
        "5": acceptance.criterion_5,
        "6a": acceptance.criterion_6a,
        "8": lambda: acceptance.criterion_8(seed),
    }
    ok = True
    k4 = None
    for name in CRITERIA:
        if name not in only:
            continue
        if name == "6b":
            r = acceptance.criterion_6b(seed)
            k4 = r.details.pop("_k4_result", None)
        elif name == "7":
            r = acceptance.criterion_7(k4, seed)
        else:
            r = runners[name]()
        ok &= r.passed
        body = r.to_json()
        body.pop("seconds")
        emit(body, out)
        say(r.line())
    return 0 if ok else 1


# ------------------------------------------------------------------ parser

def _seed_arg(p):
    p.add_argument("--seed", type=int, default=None,
                   help="random seed (default: $QORTH_SEED or 0)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qorth",
                                 description="Complementary M2 subalgebras of M4.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-useful", help="block test for a 4x4 unitary")
    p.add_argument("--in", dest="input", required=True, help="matrix JSON file")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_check_useful)

    p = sub.add_parser("complementary", help="overlap of two subalgebras")
    p.add_argument("--a", required=True, help="A0, B, triple:..., masa:... or JSON file")
    p.add_argument("--b", required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_EPS)
    p.set_defaults(func=cmd_complementary)

    p = sub.add_parser("kak", help="Cartan decomposition of a 4x4 unitary")
    p.add_argument("--in", dest="input", required=True, help="matrix JSON file")
    _seed_arg(p)
    p.set_defaults(func=cmd_kak)

    p = sub.add_parser("overlap", help="Tr PQ against B for canonical angles")
    p.add_argument("--angles", required=True, help="alpha,beta,gamma (e.g. 0.25pi,0.1,0)")
    p.add_argument("--tol", type=float, default=DEFAULT_EPS)
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("cond-exp", help="conditional expectations onto B")
    p.add_argument("--angles", required=True)
    p.add_argument("--generator", type=int, choices=(1, 2, 3))
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_cond_exp)

    p = sub.add_parser("audit", help="pairwise overlaps and budget of a family")
    p.add_argument("--in", dest="input", help="family JSON file")
    p.add_argument("--pauli-four", action="store_true", help="audit the built-in Pauli family")
    p.add_argument("--latex", action="store_true", help="include the overlap grid as LaTeX")
    p.add_argument("--no-gauge", action="store_true", help="skip conjugating member 0 to A0")
    p.add_argument("--tol", type=float, default=DEFAULT_EPS)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("search", help="maximal complementary families")
    ssub = p.add_subparsers(dest="mode", required=True)
    d = ssub.add_parser("discrete", help="exhaustive search over Pauli triples")
    d.add_argument("--include-a0", action="store_true")
    d.set_defaults(func=cmd_search_discrete)
    c = ssub.add_parser("continuous", help="multi-start simplex search")
    c.add_argument("--k", type=int, default=4, help="family size including A0")
    c.add_argument("--restarts", type=int, default=50)
    _seed_arg(c)
    c.add_argument("--max-iters", type=int, default=20_000,
                   help="objective evaluations per restart")
    c.add_argument("--penalty-tol", type=float, default=1e-3)
    c.add_argument("--target", type=float, default=1e-12,
                   help="stop a restart once the penalty is this small")
    c.add_argument("--csv", help="write the per-restart log to this CSV file")
    c.add_argument("--verbose", action="store_true", help="log each restart to stderr")
    c.set_defaults(func=cmd_search_continuous)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    _seed_arg(p)
    p.add_argument("--only", help="comma-separated subset of " + ",".join(CRITERIA))
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = default_seed()
        return args.func(args, out)
    except (UsageError, ValueError, json.JSONDecodeError) as exc:
        emit({"error": str(exc)}, out)
        say(f"error: {exc}")
        return 2
    except DecompositionError as exc:
        emit({"error": str(exc)}, out)
        say(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
