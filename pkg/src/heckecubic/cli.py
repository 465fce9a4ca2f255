"""Command-line interface: ``heckecubic <subcommand>``.

Subcommands
    field       class group, Hecke report, Selmer basis and audit for one cubic
    survey      a family survey, written as CSV rows plus a JSON aggregate
    primes      P(h/h3 = 1) and P(h/h3 = 2) for pure cubics of prime radicand
    model       Monte Carlo run of the random alternating-matrix model
    predict     closed-form prediction tables
    invariants  binary cubic pair toolbox
    selftest    fast built-in consistency checks

A configuration file (``--config``) holds ``key = value`` lines under the
sections [classgroup], [survey] and [model]; command-line flags win.  The row
cache directory comes from the HECKECUBIC_CACHE environment variable.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from collections.abc import Sequence
from fractions import Fraction

from . import __version__
from .binary_cubic import (
    BinaryCubicPair,
    act,
    covariant_quartic,
    distinguished_vector,
    enumerate_quadric,
    invariants,
    write_buckets_csv,
)
from .classgroup import ClassGroupError, class_group
from .heuristics import (
    ModelConfig,
    classical_moment,
    corank_distribution,
    empirical_surjection_moment,
    euler_product_constants,
    malle_probability,
    mean_two_power,
    prediction_table,
    sample_cokernel,
)
from .local_kummer import PREDICTION_BASES, predicted_average
from .orders import maximal_order
from .selmer import (
    dim_formula_check,
    hecke_functional,
    reciprocity_audit,
    sel2_unramified,
)
from .survey import (
    CACHE_ENV,
    FILTERS,
    SURVEY_CONFIG,
    FamilySpec,
    appendix_table,
    class_group_config,
    classify_family_membership,
    format_appendix_table,
    load_config,
    run_prime_probability_survey,
    run_survey,
)

FAMILY_ALIASES = {
    "pure": "pure_cubic", "pure_cubic": "pure_cubic",
    "gaussian": "resolvent_gaussian", "resolvent_gaussian": "resolvent_gaussian",
    "sqrt3": "resolvent_sqrt3", "resolvent_sqrt3": "resolvent_sqrt3",
    "dihedral": "dihedral", "primes": "primes_mod9", "primes_mod9": "primes_mod9",
}
FILTER_ALIASES = {"all": "all", "wild": "type_I", "tame": "type_II", "type_I": "type_I", "type_II": "type_II"}

_TERM = re.compile(r"([+-]?)(\d*)\*?(x(?:\^(\d+))?)?")


def parse_polynomial(text: str) -> tuple[int, int, int, int]:
    """Monic cubic from "x^3-2", "x^3+5*x^2+9*x+5", "c2,c1,c0" or a bare radicand n (x^3 - n).

    Returns (c0, c1, c2, 1).
    """
    s = text.replace(" ", "")
    if re.fullmatch(r"[+-]?\d+", s):
        return (-int(s), 0, 0, 1)
    if re.fullmatch(r"[+-]?\d+,[+-]?\d+,[+-]?\d+", s):
        c2, c1, c0 = (int(x) for x in s.split(","))
        return (c0, c1, c2, 1)
    coeffs = [0, 0, 0, 0]
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial {text!r}")
        sign, digits, mono, power = m.groups()
        if not digits and not mono:
            raise ValueError(f"cannot parse polynomial {text!r}")
        c = int(digits) if digits else 1
        deg = 0 if not mono else int(power) if power else 1
        if deg > 3:
            raise ValueError("degree above 3")
        coeffs[deg] += -c if sign == "-" else c
        pos = m.end()
    if coeffs[3] != 1:
        raise ValueError("polynomial must be monic of degree 3")
    return tuple(coeffs)


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=str))


def _config_sections(args) -> dict:
    return load_config(args.config) if getattr(args, "config", None) else {}


def _cg_config(args):
    overrides = dict(_config_sections(args).get("classgroup", {}))
    if getattr(args, "max_disc", None):
        overrides["max_disc"] = args.max_disc
    if not overrides:
        return SURVEY_CONFIG
    overrides.setdefault("max_disc", SURVEY_CONFIG.max_disc)
    return class_group_config(overrides)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_field(args) -> int:
    f = parse_polynomial(args.poly)
    O = maximal_order(f)
    cg = class_group(O, _cg_config(args))
    sd = sel2_unramified(O, cg)
    audit = reciprocity_audit(O, sd)
    report = O.hecke_report()
    out = {
        "polynomial": list(f),
        "order": O.to_json(),
        "membership": classify_family_membership(O),
        "hecke": report.to_json(),
        "class_group": cg.to_json(),
        "selmer": sd.to_json(),
        "audit": [{"t": r.t, "inert": r.inert, "split": r.split, "parity_ok": r.parity_ok} for r in audit],
        "hecke_functional": [hecke_functional(O, t) for t in sd.basis],
        "hecke_ideal_in_2cl": cg.is_in_2cl(cg.ideal_class_dlog(O.hecke_ideal)),
        "different_in_2cl": cg.is_in_2cl(cg.ideal_class_dlog(O.different)),
    }
    if args.dims:
        rep = dim_formula_check(O, cg, [2])
        out["dimension_check_S_2"] = rep.__dict__ | {"ok": rep.ok}
    _print_json(out)
    return 0


def cmd_survey(args) -> int:
    conf = _config_sections(args).get("survey", {})
    kind = FAMILY_ALIASES[args.family]
    spec = FamilySpec(
        kind,
        min_n=args.min if args.min is not None else conf.get("min", 2),
        max_n=args.max if args.max is not None else conf.get("max", 100),
        subfamily=FILTER_ALIASES[args.filter or conf.get("filter", "all")],
        ordering=args.order or conf.get("order", "n"),
        p=args.p,
    )
    jobs = args.jobs if args.jobs is not None else conf.get("jobs", 1)
    seed = args.seed if args.seed is not None else conf.get("seed", 0)
    start = time.time()
    result = run_survey(spec, out=args.out, cfg=_cg_config(args), jobs=jobs,
                        refinement_checks=not args.no_refinement, seed=seed)
    agg = result.aggregate
    print(f"family {kind}: {agg['fields']} fields, {agg['quarantined']} quarantined, "
          f"{agg['violations']} violations, {agg['skipped_reducible']} reducible skipped "
          f"({time.time() - start:.1f} s)")
    for typ, entry in agg["types"].items():
        print(f"  {typ}: {entry['fields']} fields, avg |Cl[2]| = {entry['avg_cl2']:.4f}")
    if "z2_moment_ratio" in agg:
        print(f"  Z/2 moment ratio (type I / type II) = {agg['z2_moment_ratio']:.4f}")
    print(format_appendix_table(appendix_table(agg)))
    for n, reason in result.violations:
        print(f"VIOLATION n={n}: {reason}", file=sys.stderr)
    return 1 if result.violations else 0


def cmd_primes(args) -> int:
    classes = [int(c) for c in args.classes.split(",")]
    table = run_prime_probability_survey(classes, args.bound, min_p=args.min, cfg=_cg_config(args))
    print("class | fields | P(h/h3=1) | predicted | P(h/h3=2) | predicted")
    for c, e in table.items():
        print(f"{c} | {e['fields']} | {e['observed_h1']:.4f} | {e['predicted_h1']:.4f} | "
              f"{e['observed_h2']:.4f} | {e['predicted_h2']:.4f}")
    return 0


def cmd_model(args) -> int:
    conf = _config_sections(args).get("model", {})
    n = args.n if args.n is not None else conf.get("n", 40)
    u = args.u if args.u is not None else conf.get("u", 0)
    samples = args.samples if args.samples is not None else conf.get("samples", 100_000)
    seed = args.seed if args.seed is not None else conf.get("seed", 0)
    # u relations beyond the alternating part: u_plus = u + 1 extra rows
    cfg = ModelConfig(n=n, u_plus=u + 1, samples=samples, seed=seed)
    coranks = sample_cokernel(cfg)
    mean, se = mean_two_power(coranks)
    print(f"n={n} u={u} samples={samples} seed={seed}")
    print(f"E[2^corank] = {mean:.4f} +- {se:.4f} (predicted {float(classical_moment(1, u)):.4f})")
    for d in range(1, 4):
        rep = empirical_surjection_moment(cfg, d, coranks)
        print(f"E[#Surj(., F_2^{d})] = {rep.empirical_mean:.4f} +- {rep.standard_error:.4f} "
              f"(predicted {rep.predicted})")
    dist = corank_distribution(coranks)
    for d in sorted(dist)[:6]:
        print(f"P(corank = {d}) = {dist[d]:.4f} (closed form {malle_probability(d, u).value.value:.4f})")
    return 0


def cmd_predict(args) -> int:
    print("Averages of |Cl[2]| (1 + 2 prod nu_v):")
    for base in PREDICTION_BASES:
        for fam in ("wild", "tame"):
            print(f"  {base:20s} {fam}: {predicted_average(base, fam)}")
    print("\nClassical moments E(|Cl[2]|^k):")
    for u in (0, 1, 2):
        print(f"  u={u}: " + ", ".join(f"k={k}: {classical_moment(k, u)}" for k in (1, 2, 3)))
    print("\nMalle probabilities P(Cl[2] = F_2^d):")
    for u in (1, 2):
        print(f"  u={u}: " + ", ".join(f"d={d}: {malle_probability(d, u).value.value:.4f}" for d in range(4)))
    print("\nEuler-product constants:")
    for key, val in euler_product_constants().items():
        print(f"  {key}: {val.value:.6f} (error <= {val.error:.1e})")
    for u in (1, 2):
        print(f"\nH-moments, unit rank {u}:")
        print("Moment | Predicted I | Predicted II | Malle")
        for r in prediction_table(u):
            print(f"{r['moment']} | {r['predicted_I']} | {r['predicted_II']} | {r['malle']}")
    return 0


def _parse_matrix(text: str) -> tuple[tuple[int, int], tuple[int, int]]:
    a, b, c, d = (int(x) for x in text.split(","))
    return ((a, b), (c, d))


def cmd_invariants(args) -> int:
    if args.enumerate is not None:
        buckets = enumerate_quadric(args.enumerate, box=args.box)
        if args.out:
            write_buckets_csv(args.out, buckets)
        print("A3 | vectors | orbits (in-box heuristic)")
        for b in buckets:
            print(f"{b.a3} | {b.vectors} | {b.orbits}")
        return 0
    if args.pair:
        r = [Fraction(x) for x in args.pair.split(",")]
        v = BinaryCubicPair(tuple(r))
    else:
        v = distinguished_vector(Fraction(args.n))
    if args.g1 or args.g2:
        ident = ((1, 0), (0, 1))
        v = act(_parse_matrix(args.g1) if args.g1 else ident, _parse_matrix(args.g2) if args.g2 else ident, v)
    a1, a3 = invariants(v)
    g = covariant_quartic(v)
    _print_json({"pair": str(v), "r": [str(x) for x in v.r], "A1": str(a1), "A3": str(a3),
                 "covariant_quartic": [str(x) for x in g.coeffs()]})
    return 0


def selftest_checks() -> list[tuple[str, bool]]:
    """Small fixed checks across all layers; each returns (name, passed)."""
    checks = []

    def check(name, fn):
        try:
            checks.append((name, bool(fn())))
        except Exception as exc:  # a crash is a failure, reported by name
            checks.append((f"{name} [{type(exc).__name__}: {exc}]", False))

    check("disc(x^3-2) = -108", lambda: maximal_order((-2, 0, 0, 1)).disc == -108)
    check("disc(x^3-10) = -300", lambda: maximal_order((-10, 0, 0, 1)).disc == -300)
    check("x^3-2 is F1, x^3-10 is F2", lambda: (
        classify_family_membership(maximal_order((-2, 0, 0, 1)))["member"] == "F1"
        and classify_family_membership(maximal_order((-10, 0, 0, 1)))["member"] == "F2"))

    def sel_identity():
        for n in (2, 3, 10, 11, 15, 26, 28, 35):
            O = maximal_order((-n, 0, 0, 1))
            cg = class_group(O)
            sd = sel2_unramified(O, cg)
            reciprocity_audit(O, sd)
            if 2 ** sd.dimension != cg.cl2_order:
                return False
        return True

    check("|Sel2un| = |Cl[2]| and audit parity on small pure cubics", sel_identity)
    check("A1(v_n) = 0, A3(v_n) = n for |n| <= 20",
          lambda: all(invariants(distinguished_vector(n)) == (0, n) for n in range(-20, 21) if n))
    check("invariants fixed by (S, T)", lambda: invariants(act(((0, -1), (1, 0)), ((1, 1), (0, 1)),
                                                              distinguished_vector(7))) == (0, 7))
    check("predicted averages 2 and 3/2",
          lambda: predicted_average("Q", "wild") == 2 and predicted_average("Q", "tame") == Fraction(3, 2))
    check("Euler constants to 4 places", lambda: all(
        euler_product_constants(200_000)[k].rounds_to(t, 4)
        for k, t in (("tame_h1", 0.5662), ("wild_h1", 0.3775), ("tame_h2", 0.2123), ("wild_h2", 0.2831))))
    check("model E[2^corank] near 2 (u = 0)", lambda: abs(mean_two_power(
        sample_cokernel(ModelConfig(30, 1, 20_000, seed=1)))[0] - 2) < 0.1)
    return checks


def cmd_selftest(args) -> int:
    results = selftest_checks()
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    failed = sum(1 for _, ok in results if not ok)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heckecubic", description=__doc__.split("\n")[0],
                                epilog=f"Row cache directory: ${CACHE_ENV}.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", help="configuration file with [classgroup], [survey], [model] sections")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("field", help="full report for one cubic field")
    s.add_argument("poly", help='"x^3-2", "c2,c1,c0" or an integer n for x^3 - n')
    s.add_argument("--max-disc", type=int)
    s.add_argument("--dims", action="store_true", help="also check the dimension formulas with S = {2}")
    s.set_defaults(func=cmd_field)

    s = sub.add_parser("survey", help="survey a family of cubic fields")
    s.add_argument("family", choices=sorted(FAMILY_ALIASES))
    s.add_argument("--min", type=int)
    s.add_argument("--max", type=int)
    s.add_argument("--filter", choices=sorted(FILTER_ALIASES), help=f"subfamily ({', '.join(FILTERS)})")
    s.add_argument("--order", choices=("n", "disc"))
    s.add_argument("--p", type=int, default=3, help="parameter of the dihedral family")
    s.add_argument("--out", help="output path stem; writes .csv and .json")
    s.add_argument("--jobs", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--max-disc", type=int)
    s.add_argument("--no-refinement", action="store_true", help="skip the refinement kernel checks")
    s.set_defaults(func=cmd_survey)

    s = sub.add_parser("primes", help="h/h3 statistics for prime radicands")
    s.add_argument("--classes", default="1,2,4,5,7,8", help="residues mod 9, comma separated")
    s.add_argument("--bound", type=int, default=500)
    s.add_argument("--min", type=int, default=2)
    s.add_argument("--max-disc", type=int)
    s.set_defaults(func=cmd_primes)

    s = sub.add_parser("model", help="Monte Carlo run of the matrix model")
    s.add_argument("--n", type=int)
    s.add_argument("--u", type=int, help="unit rank u of the relations model")
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_model)

    s = sub.add_parser("predict", help="closed-form prediction tables")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("invariants", help="binary cubic pair toolbox")
    s.add_argument("--n", default="1", help="distinguished vector v_n (default)")
    s.add_argument("--pair", help="r1,...,r8 in the binomial normalization")
    s.add_argument("--g1", help="a,b,c,d for the substitution factor")
    s.add_argument("--g2", help="a,b,c,d for the form-mixing factor")
    s.add_argument("--enumerate", type=int, metavar="X", help="bucket integral pairs with 0 < |A3| <= X")
    s.add_argument("--box", type=int, default=1)
    s.add_argument("--out", help="CSV path for --enumerate")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("selftest", help="fast built-in checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ClassGroupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
