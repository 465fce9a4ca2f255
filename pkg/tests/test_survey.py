import csv
import json

import pytest

from heckecubic.arith import is_cubefree, primes_up_to
from heckecubic.classgroup import ClassGroupConfig
from heckecubic.heuristics import malle_moment, spin_moment
from heckecubic.orders import maximal_order
from heckecubic.survey import (
    CSV_SCHEMA_VERSION,
    ROW_COLUMNS,
    SURVEY_CONFIG,
    FamilySpec,
    SurveyRow,
    aggregate,
    appendix_table,
    cached_survey_field,
    class_group_config,
    classify_family_membership,
    format_appendix_table,
    load_config,
    predicted_prime_probabilities,
    prime_to_three_part,
    pure_cubic_type,
    run_prime_probability_survey,
    run_survey,
    tame_wild_from_disc,
)

# class groups of Q(n^(1/3)) frozen from PARI bnfinit
FROZEN_CLASS_GROUPS = {2: (), 3: (), 10: (), 11: (2,), 15: (2,), 26: (3,), 28: (3,), 30: (3,), 39: (6,), 65: (3, 6)}


def test_family_polynomials():
    assert FamilySpec("pure_cubic").polynomial(5) == (-5, 0, 0, 1)
    assert FamilySpec("resolvent_gaussian").polynomial(2) == (2, 9, 2, 1)
    assert FamilySpec("resolvent_sqrt3").polynomial(2) == (2, -3, -6, 1)
    assert FamilySpec("dihedral", p=5).polynomial(2) == (-10, -45, 2, 1)
    with pytest.raises(ValueError):
        FamilySpec("quartic")
    with pytest.raises(ValueError):
        FamilySpec("pure_cubic", subfamily="odd")


def test_family_parameters():
    pure = list(FamilySpec("pure_cubic", 1, 30).parameters())
    assert pure == [n for n in range(2, 31) if is_cubefree(n)]
    tame = list(FamilySpec("pure_cubic", 1, 60, subfamily="type_II").parameters())
    assert tame == [n for n in range(2, 61) if is_cubefree(n) and n % 9 in (1, 8)]
    primes = list(FamilySpec("primes_mod9", 1, 100, classes=(2, 7)).parameters())
    assert primes == [p for p in primes_up_to(100) if p % 9 in (2, 7)]


def test_pure_cubic_type_matches_discriminant():
    for n in range(2, 300):
        if is_cubefree(n):
            assert pure_cubic_type(n) == tame_wild_from_disc(maximal_order((-n, 0, 0, 1)).disc), n


def test_family_membership():
    assert classify_family_membership(maximal_order((-2, 0, 0, 1)))["member"] == "F1"
    m = classify_family_membership(maximal_order((-10, 0, 0, 1)))
    assert m["member"] == "F2" and m["hecke_primes"]
    m = classify_family_membership(maximal_order((7, 9, 7, 1)))
    assert m["member"] == "F1" and m["resolvent"] == -1


def test_rows_against_frozen_class_groups(tmp_path):
    res = run_survey(FamilySpec("pure_cubic", 2, 65), out=tmp_path / "pure", cfg=SURVEY_CONFIG)
    assert not res.violations and not res.quarantined
    rows = {r.n: r for r in res.rows}
    for n, cl in FROZEN_CLASS_GROUPS.items():
        r = rows[n]
        assert r.class_group == cl
        assert r.cl2_order == 2 ** sum(1 for x in cl if x % 2 == 0)
        assert 2 ** r.sel_dim == r.cl2_order
        assert r.audit == "pass" and r.refinement == "pass" and r.hecke_square and r.different_square
    # CSV and JSON layout
    with open(tmp_path / "pure.csv") as fh:
        table = list(csv.reader(fh))
    assert table[0] == ROW_COLUMNS and len(table) == len(res.rows) + 1
    summary = json.loads((tmp_path / "pure.json").read_text())
    assert summary["csv_schema_version"] == CSV_SCHEMA_VERSION
    assert summary["aggregate"]["fields"] == len(res.rows)
    assert [r["moment"] for r in summary["appendix_table"]][0] == "Z/2"


def test_disc_ordering_and_filter():
    res = run_survey(FamilySpec("pure_cubic", 2, 40, subfamily="type_I", ordering="disc"), cfg=SURVEY_CONFIG)
    discs = [abs(r.disc) for r in res.rows]
    assert discs == sorted(discs)
    assert all(r.tame_wild == "type_I" for r in res.rows)


def test_aggregate_by_hand():
    def row(n, typ, two_part):
        cl2 = 2 ** sum(1 for x in two_part if x % 2 == 0)
        return SurveyRow(f"x^3-{n}", "pure_cubic", n, (-n, 0, 0, 1), -27 * n * n, "1,1", typ, "F1", -3, 0,
                         cl2, two_part, two_part, max(1, cl2), 0, "pass", True, True, "pass", "heuristic")
    rows = [row(1, "type_I", ()), row(2, "type_I", (2,)), row(3, "type_II", (4,)), row(4, "type_II", ())]
    agg = aggregate(rows)
    assert agg["types"]["type_I"]["avg_cl2"] == 1.5
    assert agg["types"]["type_I"]["moments"]["Z/2"] == 0.5
    assert agg["types"]["type_II"]["moments"]["Z/4"] == 1.0
    assert agg["z2_moment_ratio"] == 1.0
    table = appendix_table(agg)
    assert table[0]["predicted_I"] == spin_moment((2,), 1) and table[0]["malle"] == malle_moment((2,), 1)
    text = format_appendix_table(table)
    assert text.splitlines()[0] == "Moment | Observed I | Observed II | Predicted I | Predicted II | Malle"


def test_row_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("HECKECUBIC_CACHE", str(tmp_path / "cache"))
    cfg = ClassGroupConfig()
    first = cached_survey_field("pure_cubic", 11, (-11, 0, 0, 1), cfg)
    files = list((tmp_path / "cache").glob("row-*.json"))
    assert len(files) == 1
    again = cached_survey_field("pure_cubic", 11, (-11, 0, 0, 1), cfg)
    assert again == first
    assert SurveyRow.from_dict(json.loads(files[0].read_text())) == first


def test_load_config(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('[classgroup]\nmax_disc = 1000000\nshuffle_seed = 3\n\n[survey]\nfilter = "wild"\nmax = 50\n')
    conf = load_config(p)
    assert conf["classgroup"] == {"max_disc": 1000000, "shuffle_seed": 3}
    assert conf["survey"] == {"filter": "wild", "max": 50}
    assert class_group_config(conf["classgroup"]).max_disc == 1000000
    with pytest.raises(ValueError):
        class_group_config({"bogus": 1})


def test_prime_survey_against_pari(pari):
    classes = (1, 2, 4, 5, 7, 8)
    out = run_prime_probability_survey(classes, 200, cfg=SURVEY_CONFIG)
    x = pari("x")
    expected = {c: [0, 0, 0] for c in classes}
    for p in primes_up_to(200):
        if p % 9 in expected:
            h = int(pari.bnfinit(x**3 - p, 1).bnf_get_no())
            k = prime_to_three_part(h)
            e = expected[p % 9]
            e[0] += 1
            e[1] += k == 1
            e[2] += k == 2
    for c, (m, h1, h2) in expected.items():
        assert out[c]["fields"] == m
        assert out[c]["observed_h1"] == pytest.approx(h1 / m)
        assert out[c]["observed_h2"] == pytest.approx(h2 / m)
        assert out[c]["predicted_h1"] == predicted_prime_probabilities(c)["h1"]


def test_prime_predictions():
    assert round(predicted_prime_probabilities(1)["h1"], 4) == 0.5662
    assert round(predicted_prime_probabilities(8)["h2"], 4) == 0.2123
    assert round(predicted_prime_probabilities(2)["h1"], 4) == 0.3775
    assert round(predicted_prime_probabilities(4)["h2"], 4) == 0.2831
    assert prime_to_three_part(54) == 2


def test_rerun_is_byte_identical(tmp_path):
    spec = FamilySpec("resolvent_sqrt3", 1, 12)
    run_survey(spec, out=tmp_path / "a", cfg=SURVEY_CONFIG, seed=5)
    run_survey(spec, out=tmp_path / "b", cfg=SURVEY_CONFIG, seed=5)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
