import itertools
import json
import random
from fractions import Fraction

import pytest

from starklab.ball import Ball, Undecided
from starklab.verify import (ConfigError, Scenario, certificate_summary,
                             check_congruence_biquadratic,
                             check_norm_identity, check_sign_criterion,
                             run_scenario, sign_criterion_matrix,
                             RubinStarkData)
from starklab.numfld import DatumError


def test_congruence_examples_and_exhaustive():
    assert check_congruence_biquadratic([1, 1, 1, 1]) is True
    assert check_congruence_biquadratic([1, 1, 1, -1]) is False
    # all 16 sign patterns mod 4 and all 256 patterns mod 8: the
    # equivalence with the product condition is asserted inside
    for a in itertools.product((1, -1), repeat=4):
        check_congruence_biquadratic(list(a))
    for a in itertools.product((1, 3, 5, 7), repeat=4):
        check_congruence_biquadratic(list(a))
    with pytest.raises(Exception):
        check_congruence_biquadratic([2, 1, 1, 1])


def test_sign_criterion_matrix_level():
    s, _ = check_sign_criterion([[Ball(2), Ball(0)], [Ball(0), Ball(3)]])
    assert s == 1
    s, _ = check_sign_criterion([[Ball(0), Ball(2)], [Ball(3), Ball(0)]])
    assert s == -1
    with pytest.raises(Undecided):
        check_sign_criterion([[Ball(0, 1)]])
    # invariance under even permutations and sign flips of a row pair
    rng = random.Random(3)
    base = [[Ball(rng.randint(1, 5)) for _ in range(3)] for _ in range(3)]
    s0, _ = check_sign_criterion(base)
    even = [base[1], base[2], base[0]]
    assert check_sign_criterion(even)[0] == s0
    odd = [base[1], base[0], base[2]]
    assert check_sign_criterion(odd)[0] == -s0
    flipped = [[-c for c in base[0]], base[1], base[2]]
    assert check_sign_criterion(flipped)[0] == -s0


def test_sign_criterion_pipeline():
    scn = Scenario({"field": {"type": "quad", "disc": 5},
                    "S": ["inf", 5], "V": ["inf"], "T": [3],
                    "checks": ["sign_criterion"], "bits": 128})
    cert = run_scenario(scn)
    entry = cert["results"][0]
    assert entry["verdict"] == "pass"
    assert entry["witness"]["sign"] in (-1, 1)


def test_scenarios_exit_codes():
    ok = run_scenario(Scenario({
        "field": {"type": "quad", "disc": 5}, "S": ["inf", 5], "V": ["inf"],
        "T": [3], "checks": ["rs_integrality"], "bits": 128}))
    assert ok["exit_code"] == 0
    bad_datum = run_scenario(Scenario({
        "field": {"type": "quad", "disc": 5}, "S": ["inf", 5], "V": ["inf"],
        "T": [5], "checks": ["rs_integrality"]}))
    assert bad_datum["exit_code"] == 2
    h3 = run_scenario(Scenario({
        "field": {"type": "quad", "disc": 5}, "S": ["inf", 5], "V": ["inf"],
        "T": [2], "checks": ["rs_integrality"]}))
    assert h3["exit_code"] == 2 and "(H3)" in h3["datum_error"]
    with pytest.raises(ConfigError):
        Scenario({"checks": ["no_such_check"]})
    with pytest.raises(ConfigError):
        Scenario([1, 2, 3])


def test_check_aliases():
    scn = Scenario({"field": {"type": "Q"}, "S": [], "V": [], "T": [],
                    "checks": ["lemma41", "prop42"],
                    "params": {"p": 2, "m": 2}})
    assert scn.checks == ["norm_identity", "norm_decomposition"]


def test_undecided_is_distinct_and_monotone():
    # at 13 bits the integrality certification cannot resolve; at 128 it
    # passes -- raising precision only resolves undecided, never flips
    low = run_scenario(Scenario({
        "field": {"type": "quad", "disc": 12}, "S": ["inf", 2, 3],
        "V": ["inf"], "T": [5], "checks": ["rs_integrality"], "bits": 13}))
    high = run_scenario(Scenario({
        "field": {"type": "quad", "disc": 12}, "S": ["inf", 2, 3],
        "V": ["inf"], "T": [5], "checks": ["rs_integrality"], "bits": 128}))
    assert high["results"][0]["verdict"] == "pass"
    assert low["results"][0]["verdict"] in ("pass", "undecided")
    if low["results"][0]["verdict"] == "undecided":
        assert low["exit_code"] == 3
        assert low["results"][0].get("limit_radius") is not None


def test_witnesses_reverify():
    from starklab.grpring import AbelianGroup, GroupRingElement
    from starklab.zideal import FiniteGModule
    cert = run_scenario(Scenario({
        "field": {"type": "quad", "disc": -23}, "S": ["inf", 23], "V": [],
        "T": [3], "checks": ["annihilation", "fitting_equality"],
        "bits": 128}))
    ann = next(e for e in cert["results"] if e["check"] == "annihilation")
    assert ann["verdict"] == "pass"
    # recheck from the witness alone: rebuild the module and re-multiply
    g = AbelianGroup((2,))
    module = FiniteGModule(g, ann["witness"]["class_group_orders"],
                           ann["witness"]["action"])
    for row in ann["witness"]["image_hnf"]:
        x = GroupRingElement(g, "int", row)
        for j in range(len(module.orders)):
            e_j = tuple(1 if l == j else 0 for l in range(len(module.orders)))
            assert not any(module.act_group_ring(x, e_j))
    fit = next(e for e in cert["results"] if e["check"] == "fitting_equality")
    assert fit["verdict"] == "pass"
    assert fit["witness"]["image_hnf"] == fit["witness"]["fitting_hnf"]


def test_theorem_gating_recorded():
    cert = run_scenario(Scenario({
        "field": {"type": "quad", "disc": 5}, "S": ["inf", 5], "V": ["inf"],
        "T": [3], "checks": ["fitting_equality"], "bits": 128}))
    assert cert["hypotheses"]["thm1_bound"] is False  # |S| = |V| + 1
    assert cert["results"][0]["verdict"] == "pass"   # check still runs
    cert2 = run_scenario(Scenario({
        "field": {"type": "quad", "disc": 12}, "S": ["inf", 2, 3],
        "V": ["inf"], "T": [5], "checks": ["fitting_equality"],
        "bits": 128}))
    assert cert2["hypotheses"]["thm1_bound"] is True


def test_igc_exponent_two():
    # S large enough for the augmentation-power exponent c = 2
    cert = run_scenario(Scenario({
        "field": {"type": "quad", "disc": 5}, "S": ["inf", 5, 7, 13, 17],
        "V": ["inf"], "T": [3], "checks": ["igc_membership"], "bits": 160}))
    entry = cert["results"][0]
    assert entry["verdict"] == "pass"
    assert entry["exponent"] == 2
    assert cert["exit_code"] == 0


def test_nonintegral_scalar_detected():
    # a synthetic non-integral theta must surface as blocked/fail, not pass:
    # T = [] is rejected earlier by (H3), so check the integrality machinery
    # directly on a scalar with denominator
    from starklab.grpring import AbelianGroup, GroupRingElement
    from starklab.multilin import WedgeElement, image_lattice
    from starklab.multilin import NonIntegralError
    from starklab.zideal import ideal_from_generators
    g = AbelianGroup((2,))
    theta = GroupRingElement(g, "rat", [Fraction(1, 2), Fraction(1, 2)])
    with pytest.raises(Exception):
        ideal_from_generators([theta])


def test_cli_flows(tmp_path):
    from starklab.cli import main
    scn = tmp_path / "scn.json"
    scn.write_text(json.dumps({
        "field": {"type": "quad", "disc": 12}, "S": ["inf", 2, 3],
        "V": ["inf"], "T": [5], "checks": ["rs_integrality"],
        "bits": 128}))
    assert main(["verify", str(scn)]) == 0
    out = tmp_path / "report.json"
    assert main(["verify", str(scn), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["exit_code"] == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "field": {"type": "quad", "disc": 5}, "S": ["inf", 5], "V": ["inf"],
        "T": [5], "checks": ["rs_integrality"]}))
    assert main(["verify", str(bad)]) == 2
    assert main(["identity", "--p", "3", "--m", "2"]) == 0
    assert main(["field", "--disc", "-23", "classgroup"]) == 0
    assert main(["sweep", str(tmp_path)]) == 2  # bad.json dominates
    malformed = tmp_path / "broken.json"
    malformed.write_text("{not json")
    assert main(["verify", str(malformed)]) == 2


def test_scenario_parallel_sweep(tmp_path):
    from starklab.cli import main
    for i, D in enumerate([5, 13]):
        (tmp_path / f"s{i}.json").write_text(json.dumps({
            "field": {"type": "quad", "disc": D}, "S": ["inf", D],
            "V": ["inf"], "T": [3], "checks": ["rs_integrality"],
            "bits": 96}))
    assert main(["sweep", str(tmp_path), "--jobs", "2"]) == 0
