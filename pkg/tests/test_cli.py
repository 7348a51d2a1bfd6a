import json
from pathlib import Path

import pytest

from medburn.cli import main
from medburn.rational import rat

GAMES = Path(__file__).resolve().parent.parent / "games"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_values_salesman(capsys):
    code, out, _ = run(capsys, "values", GAMES / "salesman.json", "--budget", "2", "--budget", "1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("CT 0")
    assert lines[1].startswith("MD 0")
    assert lines[2].startswith("MDMB[C=1] 0")
    assert lines[3].startswith("MDMB[C=2] 1/5")
    assert lines[4].startswith("MDMB 1/3")
    assert lines[5].startswith("BP 1/2")


def test_values_abstract_pieces(capsys):
    code, out, _ = run(capsys, "values", GAMES / "abstract_pieces.json")
    assert code == 0
    assert "MD 7/3" in out
    assert "MDMB 7/3" in out
    assert "CT 2" in out
    assert "BP 5/2" in out


def test_values_fraction_flag_round_trip(capsys):
    code, out, _ = run(capsys, "values", GAMES / "three_actions.json", "--fractions")
    assert code == 0
    for line in out.strip().splitlines():
        label, frac = line.split()
        assert rat(frac) is not None


def test_values_malformed_prior(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {
                "types": ["a", "b"],
                "actions": ["x"],
                "u": [[1, 1]],
                "v": [0],
                "prior": ["1/2", "1/3"],
            }
        )
    )
    code, _, err = run(capsys, "values", bad)
    assert code == 3
    assert "validation" in err


def test_values_parse_error(tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "values", bad)
    assert code == 2
    assert "parse error" in err

    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"types": ["a"], "prior": [1]}))
    code, _, err = run(capsys, "values", missing)
    assert code == 2


def test_mechanism_salesman(capsys):
    code, out, _ = run(capsys, "mechanism", GAMES / "salesman.json", "--delta", "1/10")
    assert code == 0
    assert "sender payoff 3/10" in out
    assert "ic residuals all zero" in out
    assert "burn 7" in out  # revealing-high message burn at delta 1/10


def test_mechanism_influencer(capsys):
    code, out, _ = run(capsys, "mechanism", GAMES / "influencer.json", "--delta", "1/100")
    assert code == 0
    payoff = rat(next(l for l in out.splitlines() if l.startswith("sender payoff")).split()[2])
    assert rat(5, 2) - rat(1, 50) <= payoff <= rat(5, 2)
    assert "ic residuals all zero" in out


def test_mechanism_rejects_delta_one(capsys):
    code, _, err = run(capsys, "mechanism", GAMES / "salesman.json", "--delta", "1")
    assert code == 3
    assert "delta" in err


def test_sweep_matches_closed_forms(capsys):
    code, out, _ = run(
        capsys, "sweep", GAMES / "salesman.json", "--steps", "20", "--budget", "1",
        "--budget", "2", "--fractions",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "prior,ct,md,mdmb_C1,mdmb_C2,mdmb,bp"
    assert len(lines) == 22
    for line in lines[1:]:
        prior, ct, md, c1, c2, mdmb, bp = (rat(x) for x in line.split(","))
        if prior < rat(1, 2):
            assert mdmb == prior / (1 - prior)
            assert c1 == 0
            assert c2 == (prior / (2 - 3 * prior) if prior > 0 else 0)
        else:
            assert mdmb == 1
            assert c2 == 1


def test_sweep_single_step_endpoints(capsys):
    code, out, _ = run(capsys, "sweep", GAMES / "salesman.json", "--steps", "1", "--fractions")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert lines[1].startswith("0,")
    assert lines[2].startswith("1,")


def test_sweep_deterministic_and_to_file(tmp_path, capsys):
    out_file = tmp_path / "sweep.csv"
    code, _, _ = run(
        capsys, "sweep", GAMES / "salesman.json", "--steps", "6", "--out", out_file
    )
    assert code == 0
    first = out_file.read_bytes()
    run(capsys, "sweep", GAMES / "salesman.json", "--steps", "6", "--out", out_file)
    assert out_file.read_bytes() == first


def test_sweep_requires_priors_beyond_binary(capsys):
    code, _, err = run(capsys, "sweep", GAMES / "influencer.json")
    assert code == 4
    assert "prior" in err


def test_sweep_explicit_priors(capsys):
    code, out, _ = run(
        capsys, "sweep", GAMES / "influencer.json", "--prior", "1/3,1/3,1/3", "--fractions"
    )
    assert code == 0
    assert out.strip().splitlines()[1] == "1/3;1/3;1/3,2,11/5,5/2,8/3"


def test_verify_fixtures(capsys):
    for name in ("salesman.json", "influencer.json", "three_actions.json"):
        code, out, _ = run(capsys, "verify", GAMES / name)
        assert code == 0, out
        assert "saddle: verified" in out
        assert "genericity: true" in out


def test_verify_reports_relation_three_actions(capsys):
    code, out, _ = run(capsys, "verify", GAMES / "three_actions.json")
    assert code == 0
    assert "expected: ct = 1/4 ok" in out
    assert "expected: bp = 3/10 ok" in out


def test_verify_abstract_pieces(capsys):
    code, out, _ = run(capsys, "verify", GAMES / "abstract_pieces.json", "--grid", "60")
    assert code == 0
    assert "genericity: n/a" in out
    assert "expected: md = 7/3 ok" in out


def test_verify_corrupted_fixture(tmp_path, capsys):
    data = json.loads((GAMES / "salesman.json").read_text())
    data["expected"]["mdmb"] = "2/3"
    bad = tmp_path / "corrupt.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", bad)
    assert code == 5
    assert "but computed" in out


def test_sweep_direct_pieces_needs_interior_priors(capsys):
    code, _, err = run(
        capsys, "sweep", GAMES / "abstract_pieces.json", "--prior", "1,0,0"
    )
    assert code == 4
    assert "full-support" in err


def test_values_single_type_game(tmp_path, capsys):
    f = tmp_path / "solo.json"
    f.write_text(
        json.dumps(
            {
                "types": ["only"],
                "actions": ["a", "b"],
                "u": [[2], [1]],
                "v": [5, 9],
                "prior": [1],
            }
        )
    )
    code, out, _ = run(capsys, "values", f, "--fractions")
    assert code == 0
    assert all(line.endswith(" 5") for line in out.strip().splitlines())


def test_printed_fractions_reparse(capsys):
    code, out, _ = run(capsys, "values", GAMES / "salesman.json", "--fractions")
    assert code == 0
    for line in out.strip().splitlines():
        token = line.split()[-1]
        assert str(rat(token)) == token
