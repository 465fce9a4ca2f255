"""Family surveys: per-field rows, hard consistency gates and moment tables.

A row is computed by :func:`survey_field`: maximal order, Hecke primes,
class group, unramified Selmer group, the reciprocity audit, and the
Hecke-square checks.  Rows are cached on disk (directory taken from the
``HECKECUBIC_CACHE`` environment variable) because the class group is by far
the most expensive step and the same fields recur across surveys.
"""

from __future__ import annotations

import ast
import configparser
import csv
import dataclasses
import hashlib
import json
import os
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .arith import is_cubefree, is_prime, primes_up_to, valuation
from .classgroup import (
    ClassGroupConfig,
    ClassGroupError,
    UnfactorableSupportError,
    class_group,
)
from .heuristics import (
    MOMENT_GROUPS,
    count_surjections,
    euler_product_constants,
    malle_moment,
    spin_moment,
)
from .orders import ReducibleError, hecke_primes, maximal_order, resolvent_field
from .selmer import (
    DimensionFormulaError,
    ReciprocityViolation,
    SelmerCardinalityError,
    global_refinement_q,
    random_nonselmer_classes,
    reciprocity_audit,
    sel2_unramified,
)

CSV_SCHEMA_VERSION = 1
CACHE_VERSION = 3
CACHE_ENV = "HECKECUBIC_CACHE"

FAMILY_KINDS = ("pure_cubic", "resolvent_gaussian", "resolvent_sqrt3", "dihedral", "primes_mod9")
FILTERS = ("all", "type_I", "type_II")

ROW_COLUMNS = [
    "field_id", "kind", "n", "polynomial", "disc", "signature", "tame_wild", "family_member",
    "resolvent", "hecke_primes", "cl2_order", "two_part", "class_group", "class_number",
    "sel_dim", "audit", "hecke_square", "different_square", "refinement", "tag",
]


class TheoremViolation(AssertionError):
    """A proven identity failed on a field; never quarantined silently."""


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    kind: str
    min_n: int = 2
    max_n: int = 100
    subfamily: str = "all"
    ordering: str = "n"  # or "disc"
    p: int = 3  # dihedral example parameter
    classes: tuple[int, ...] = (1, 2, 4, 5, 7, 8)  # residues mod 9 for primes_mod9

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family {self.kind!r}")
        if self.subfamily not in FILTERS:
            raise ValueError(f"unknown subfamily filter {self.subfamily!r}")
        if self.ordering not in ("n", "disc"):
            raise ValueError("ordering must be 'n' or 'disc'")

    def polynomial(self, n: int) -> tuple[int, int, int, int]:
        """(c0, c1, c2, 1) for x^3 + c2 x^2 + c1 x + c0."""
        if self.kind in ("pure_cubic", "primes_mod9"):
            return (-n, 0, 0, 1)
        if self.kind == "resolvent_gaussian":
            return (n, 9, n, 1)
        if self.kind == "resolvent_sqrt3":
            return (n, -3, -3 * n, 1)
        return (-n * self.p, -9 * self.p, n, 1)

    def parameters(self) -> Iterator[int]:
        lo = max(self.min_n, 1)
        for n in range(lo, self.max_n + 1):
            if self.kind == "pure_cubic":
                if n < 2 or not is_cubefree(n):
                    continue
                if self.subfamily != "all" and pure_cubic_type(n) != self.subfamily:
                    continue
            elif self.kind == "primes_mod9":
                if not is_prime(n) or n % 9 not in self.classes:
                    continue
            yield n


def pure_cubic_type(n: int) -> str:
    """'type_II' (tame at 3) iff n = +-1 mod 9, else 'type_I' (wild)."""
    return "type_II" if n % 9 in (1, 8) else "type_I"


def tame_wild_from_disc(disc: int) -> str:
    """For a pure cubic: disc = -3 a^2 b^2 (tame) or -27 a^2 b^2 (wild)."""
    return "type_I" if valuation(disc, 3) >= 3 else "type_II"


def classify_family_membership(O) -> dict:
    """F1 (Hecke unramified) or F2 (Hecke ramified), with the resolvent."""
    report = hecke_primes(O)
    return {
        "member": "F2" if report.is_hecke_ramified else "F1",
        "hecke_primes": [P.label for P in report.hecke_primes],
        "resolvent": resolvent_field(O),
    }


# ---------------------------------------------------------------------------
# rows
# ---------------------------------------------------------------------------

@dataclass
class SurveyRow:
    field_id: str
    kind: str
    n: int
    polynomial: tuple[int, ...]
    disc: int
    signature: str
    tame_wild: str
    family_member: str
    resolvent: int
    hecke_primes: int
    cl2_order: int
    two_part: tuple[int, ...]
    class_group: tuple[int, ...]
    class_number: int
    sel_dim: int
    audit: str
    hecke_square: bool
    different_square: bool
    refinement: str
    tag: str

    @property
    def unit_rank(self) -> int:
        return 2 if self.signature == "3,0" else 1

    def as_csv(self) -> list[str]:
        out = []
        for col in ROW_COLUMNS:
            v = getattr(self, col)
            if isinstance(v, (tuple, list)):
                v = " ".join(str(x) for x in v)
            out.append(str(v))
        return out

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["polynomial"] = list(self.polynomial)
        d["two_part"] = list(self.two_part)
        d["class_group"] = list(self.class_group)
        return d

    @staticmethod
    def from_dict(d: dict) -> SurveyRow:
        d = dict(d)
        for k in ("polynomial", "two_part", "class_group"):
            d[k] = tuple(d[k])
        return SurveyRow(**d)


def _field_id(f: Sequence[int]) -> str:
    c0, c1, c2, _ = f
    parts = ["x^3"]
    for c, m in ((c2, "x^2"), (c1, "x"), (c0, "")):
        if c:
            sign = "+" if c > 0 else "-"
            mag = abs(c)
            parts.append(f"{sign}{mag}{'*' + m if m else ''}" if mag != 1 or not m else f"{sign}{m}")
    return "".join(parts)


def survey_field(kind: str, n: int, f: Sequence[int], cfg: ClassGroupConfig,
                 refinement_checks: bool = True, seed: int = 0) -> SurveyRow:
    """All per-field data with the hard gates: audit parity, |Sel| = |Cl[2]|, Hecke squares."""
    f = tuple(f)
    O = maximal_order(f)
    membership = classify_family_membership(O)
    cg = class_group(O, cfg)
    sd = sel2_unramified(O, cg)  # raises SelmerCardinalityError on |Sel| != |Cl[2]|
    reciprocity_audit(O, sd)  # raises ReciprocityViolation on odd parity
    h_sq = cg.is_in_2cl(cg.ideal_class_dlog(O.hecke_ideal))
    d_sq = cg.is_in_2cl(cg.ideal_class_dlog(O.different))
    if not (h_sq and d_sq):
        raise TheoremViolation(f"Hecke ideal or different not a square class for {f}")
    if kind in ("pure_cubic", "primes_mod9"):
        tw = pure_cubic_type(n)
        if tame_wild_from_disc(O.disc) != tw:
            raise TheoremViolation(f"congruence and discriminant disagree on tame/wild for n = {n}")
        if (tw == "type_I") != (membership["member"] == "F1"):
            raise TheoremViolation(f"wild/tame does not match Hecke membership for n = {n}")
    else:
        tw = "type_I" if membership["member"] == "F1" else "type_II"
    if kind == "resolvent_gaussian":
        if membership["member"] != "F1" or membership["resolvent"] != -1:
            raise TheoremViolation(f"Gaussian-resolvent field {f} has Hecke primes or wrong resolvent")
    refinement = "skipped"
    if refinement_checks and kind in ("pure_cubic", "primes_mod9"):
        for t in sd.elements():
            bad = global_refinement_q(O, None, t)
            if bad:
                raise TheoremViolation(f"Selmer class {t.label} of {f} not in the kernel of q: {sorted(map(str, bad))}")
        for t in random_nonselmer_classes(O, 10, seed=seed + n):
            bad = global_refinement_q(O, None, t)
            if len(bad) % 2:
                raise TheoremViolation(f"odd obstruction set {sorted(map(str, bad))} for {f}")
        refinement = "pass"
    r1, r2 = O.signature
    return SurveyRow(
        field_id=_field_id(f), kind=kind, n=n, polynomial=f, disc=O.disc, signature=f"{r1},{r2}",
        tame_wild=tw, family_member=membership["member"], resolvent=membership["resolvent"],
        hecke_primes=len(membership["hecke_primes"]), cl2_order=cg.cl2_order, two_part=tuple(cg.two_part),
        class_group=tuple(cg.elementary_divisors), class_number=cg.class_number, sel_dim=sd.dimension,
        audit="pass", hecke_square=h_sq, different_square=d_sq, refinement=refinement, tag=cg.tag)


# ---------------------------------------------------------------------------
# caching
# ---------------------------------------------------------------------------

def cache_dir() -> Path | None:
    d = os.environ.get(CACHE_ENV)
    if not d:
        return None
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _cache_key(kind, n, f, cfg: ClassGroupConfig, refinement_checks: bool, seed: int) -> str:
    payload = json.dumps([CACHE_VERSION, kind, n, list(f), dataclasses.asdict(cfg), refinement_checks, seed],
                         sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:32]


def cached_survey_field(kind, n, f, cfg, refinement_checks=True, seed=0) -> SurveyRow:
    d = cache_dir()
    if d is None:
        return survey_field(kind, n, f, cfg, refinement_checks, seed)
    path = d / f"row-{_cache_key(kind, n, f, cfg, refinement_checks, seed)}.json"
    if path.exists():
        return SurveyRow.from_dict(json.loads(path.read_text()))
    row = survey_field(kind, n, f, cfg, refinement_checks, seed)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(row.to_dict()))
    tmp.replace(path)
    return row


# ---------------------------------------------------------------------------
# survey driver
# ---------------------------------------------------------------------------

QUARANTINE_ERRORS = (ClassGroupError, UnfactorableSupportError, ArithmeticError, RecursionError)
VIOLATION_ERRORS = (ReciprocityViolation, SelmerCardinalityError, TheoremViolation, DimensionFormulaError)


@dataclass
class SurveyResult:
    spec: FamilySpec
    rows: list[SurveyRow]
    quarantined: list[tuple[int, str]]
    violations: list[tuple[int, str]]
    skipped_reducible: int
    aggregate: dict = field(default_factory=dict)


def _work(args):
    kind, n, f, cfg, refinement_checks, seed = args
    try:
        return ("ok", cached_survey_field(kind, n, f, cfg, refinement_checks, seed))
    except ReducibleError:
        return ("reducible", None)
    except VIOLATION_ERRORS as exc:
        return ("violation", f"{type(exc).__name__}: {exc}")
    except QUARANTINE_ERRORS as exc:
        return ("quarantine", f"{type(exc).__name__}: {exc}")


def iter_survey(spec: FamilySpec, cfg: ClassGroupConfig | None = None, jobs: int = 1,
                refinement_checks: bool = True, seed: int = 0, limit: int | None = None) -> Iterator[tuple[int, str, object]]:
    """Yields (n, status, row-or-reason) in parameter order."""
    cfg = cfg or ClassGroupConfig()
    tasks = []
    for n in spec.parameters():
        tasks.append((spec.kind, n, spec.polynomial(n), cfg, refinement_checks, seed))
    if jobs > 1:
        import multiprocessing
        with multiprocessing.Pool(jobs) as pool:
            for task, (status, payload) in zip(tasks, pool.imap(_work, tasks, chunksize=4)):
                yield task[1], status, payload
    else:
        for task in tasks:
            status, payload = _work(task)
            yield task[1], status, payload


def run_survey(spec: FamilySpec, out: str | Path | None = None, cfg: ClassGroupConfig | None = None,
               jobs: int = 1, refinement_checks: bool = True, seed: int = 0,
               max_fields: int | None = None) -> SurveyResult:
    """Survey a family; writes rows CSV and aggregate JSON when ``out`` is given (a path stem)."""
    rows, quarantined, violations = [], [], []
    reducible = 0
    for n, status, payload in iter_survey(spec, cfg, jobs, refinement_checks, seed):
        if status == "ok":
            row = payload
            if spec.subfamily != "all" and row.tame_wild != spec.subfamily:
                continue
            rows.append(row)
        elif status == "reducible":
            reducible += 1
        elif status == "violation":
            violations.append((n, payload))
        else:
            quarantined.append((n, payload))
        if max_fields is not None and len(rows) >= max_fields:
            break
    if spec.ordering == "disc":
        rows.sort(key=lambda r: (abs(r.disc), r.n))
    result = SurveyResult(spec, rows, quarantined, violations, reducible)
    result.aggregate = aggregate(rows)
    result.aggregate["quarantined"] = len(quarantined)
    result.aggregate["violations"] = len(violations)
    result.aggregate["skipped_reducible"] = reducible
    if out is not None:
        write_survey(result, out)
    return result


def _moments(rows: Sequence[SurveyRow]) -> dict[str, float]:
    out = {}
    for name, h in MOMENT_GROUPS.items():
        total = sum(count_surjections(tuple(r.two_part), h) for r in rows)
        out[name] = total / len(rows) if rows else float("nan")
    return out


def aggregate(rows: Sequence[SurveyRow]) -> dict:
    """Averages of |Cl[2]| and H-moments per type, with predictions."""
    agg: dict = {"fields": len(rows), "types": {}}
    for typ in ("type_I", "type_II"):
        sub = [r for r in rows if r.tame_wild == typ]
        if not sub:
            continue
        us = {r.unit_rank for r in sub}
        u = us.pop() if len(us) == 1 else None
        entry = {
            "fields": len(sub),
            "avg_cl2": sum(r.cl2_order for r in sub) / len(sub),
            "moments": _moments(sub),
            "u": u,
            "grh_or_heuristic": sum(1 for r in sub if r.tag != "certified"),
        }
        agg["types"][typ] = entry
    if "type_I" in agg["types"] and "type_II" in agg["types"]:
        a, b = agg["types"]["type_I"]["moments"]["Z/2"], agg["types"]["type_II"]["moments"]["Z/2"]
        agg["z2_moment_ratio"] = a / b if b else float("inf")
    return agg


def appendix_table(agg: dict, u: int | None = None) -> list[dict]:
    """Rows in the layout Moment | Observed I | Observed II | Predicted I | Predicted II | Malle."""
    types = agg.get("types", {})
    if u is None:
        us = {t.get("u") for t in types.values()} - {None}
        u = us.pop() if len(us) == 1 else 1
    table = []
    for name, h in MOMENT_GROUPS.items():
        table.append({
            "moment": name,
            "observed_I": types.get("type_I", {}).get("moments", {}).get(name),
            "observed_II": types.get("type_II", {}).get("moments", {}).get(name),
            "predicted_I": spin_moment(h, u),
            "predicted_II": malle_moment(h, u),
            "malle": malle_moment(h, u),
        })
    return table


def format_appendix_table(table: Sequence[dict]) -> str:
    def fmt(x):
        if x is None:
            return "-"
        if isinstance(x, Fraction):
            return str(x)
        return f"{x:.4f}"
    lines = ["Moment | Observed I | Observed II | Predicted I | Predicted II | Malle"]
    for r in table:
        lines.append(" | ".join([r["moment"], fmt(r["observed_I"]), fmt(r["observed_II"]),
                                 fmt(r["predicted_I"]), fmt(r["predicted_II"]), fmt(r["malle"])]))
    return "\n".join(lines)


def write_survey(result: SurveyResult, out: str | Path) -> None:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out.with_suffix(".csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ROW_COLUMNS)
        for r in result.rows:
            w.writerow(r.as_csv())
    summary = {
        "csv_schema_version": CSV_SCHEMA_VERSION,
        "columns": ROW_COLUMNS,
        "spec": dataclasses.asdict(result.spec),
        "aggregate": result.aggregate,
        "appendix_table": [{k: (str(v) if isinstance(v, Fraction) else v) for k, v in r.items()}
                           for r in appendix_table(result.aggregate)],
        "quarantined": result.quarantined,
        "violations": result.violations,
    }
    out.with_suffix(".json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# h / h_3 for prime radicands
# ---------------------------------------------------------------------------

def prime_to_three_part(h: int) -> int:
    while h % 3 == 0:
        h //= 3
    return h


def predicted_prime_probabilities(residue: int) -> dict[str, float]:
    """P(h/h3 = 1) and P(h/h3 = 2) for prime radicands in a class mod 9."""
    c = euler_product_constants()
    if residue % 9 in (1, 8):
        return {"h1": c["tame_h1"].value, "h2": c["tame_h2"].value}
    return {"h1": c["wild_h1"].value, "h2": c["wild_h2"].value}


def run_prime_probability_survey(classes: Sequence[int], bound: int, min_p: int = 2,
                                 cfg: ClassGroupConfig | None = None) -> dict[int, dict]:
    """Empirical P(h/h3 = 1), P(h/h3 = 2) for Q(p^(1/3)), p prime, per class of p mod 9."""
    cfg = cfg or ClassGroupConfig()
    table = {c: {"fields": 0, "h1": 0, "h2": 0, "quarantined": 0} for c in classes}
    for p in primes_up_to(bound):
        if p < min_p or p % 9 not in table:
            continue
        entry = table[p % 9]
        try:
            cg = class_group(maximal_order((-p, 0, 0, 1)), cfg)
        except QUARANTINE_ERRORS:
            entry["quarantined"] += 1
            continue
        k = prime_to_three_part(cg.class_number)
        entry["fields"] += 1
        entry["h1"] += k == 1
        entry["h2"] += k == 2
    out = {}
    for c, e in table.items():
        pred = predicted_prime_probabilities(c)
        m = e["fields"]
        out[c] = {
            "fields": m,
            "quarantined": e["quarantined"],
            "observed_h1": e["h1"] / m if m else float("nan"),
            "observed_h2": e["h2"] / m if m else float("nan"),
            "predicted_h1": pred["h1"],
            "predicted_h2": pred["h2"],
        }
    return out


# ---------------------------------------------------------------------------
# configuration files
# ---------------------------------------------------------------------------

def load_config(path: str | Path) -> dict[str, dict]:
    """Read a TOML-style file of ``key = value`` lines under [sections]."""
    parser = configparser.ConfigParser()
    parser.read(path)
    out: dict[str, dict] = {}
    for section in parser.sections():
        out[section] = {}
        for k, v in parser.items(section):
            try:
                out[section][k] = ast.literal_eval(v)
            except (ValueError, SyntaxError):
                out[section][k] = v.strip('"')
    return out


def class_group_config(overrides: dict | None = None) -> ClassGroupConfig:
    fields = {f.name for f in dataclasses.fields(ClassGroupConfig)}
    kw = {k: v for k, v in (overrides or {}).items() if k in fields}
    unknown = set(overrides or {}) - fields
    if unknown:
        raise ValueError(f"unknown class group config keys: {sorted(unknown)}")
    return ClassGroupConfig(**kw)


SURVEY_CONFIG = ClassGroupConfig(max_disc=10**11)
