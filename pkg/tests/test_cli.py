import math

import numpy as np
import pytest
from click.testing import CliRunner

from unit_helpers import env, make_path, random_dictionary

from dictcode.binary_channel import NoiseProfile, decoding_error_bound
from dictcode.cli import (ExperimentConfig, cli, emit_figure1, run_pipeline,
                          simulate, wilson_interval)
from dictcode.core import Code, DomainError, InfeasibleError, Word
from dictcode.entropy import figure1_grid
from dictcode.gv_code import theorem1_pipeline
from dictcode.validators import read_code, read_profile


def invoke(*args):
    return CliRunner().invoke(cli, [str(a) for a in args])


def report(path):
    pairs = (line.split(": ", 1) for line in path.read_text().splitlines())
    return dict(pairs)


def test_construct_gv(tmp_path):
    out = tmp_path / "code.txt"
    result = invoke("construct-gv", "--dict", make_path("dict.small.txt"),
                    "--d", 2, "--out", out)
    assert result.exit_code == 0
    assert out.read_text() == "n=4 N=2\nd=2\n0000\n0110\n1011\n1100\n"
    assert "admitted 4 of 5 words" in result.output
    assert read_code(out).claimed_distance == 2


def test_construct_gv_to_stdout():
    result = invoke("construct-gv", "--dict", make_path("dict.small.txt"),
                    "--d", 4)
    assert result.exit_code == 0
    assert "n=4 N=2\nd=4\n0000\n" in result.output


def test_construct_gv_bad_distance():
    result = invoke("construct-gv", "--dict", make_path("dict.small.txt"),
                    "--d", 9)
    assert result.exit_code == 2
    assert "ERROR" in result.output


def test_missing_input_file():
    result = invoke("construct-gv", "--dict", make_path("no_such.txt"),
                    "--d", 2)
    assert result.exit_code == 1


def test_malformed_input_file():
    result = invoke("construct-gv", "--dict",
                    make_path("dict.duplicate.txt"), "--d", 2)
    assert result.exit_code == 1
    assert "duplicate of line 2" in result.output


def test_decode(tmp_path):
    out = tmp_path / "decoded.txt"
    result = invoke("decode", "--code", make_path("code.hamming7.txt"),
                    "--received", make_path("received.hamming7.txt"),
                    "--out", out)
    assert result.exit_code == 0
    assert out.read_text().splitlines() == ["0000000", "1101000", "0000000",
                                            "ERROR distance_tie"]


def test_decode_repetition():
    result = invoke("decode", "--code", make_path("code.repetition3.txt"),
                    "--received", make_path("received.repetition3.txt"))
    assert result.exit_code == 0
    assert result.output.splitlines() == ["ERROR distance_tie", "111"]


def test_decode_wrong_length():
    result = invoke("decode", "--code", make_path("code.hamming7.txt"),
                    "--received", make_path("received.wrong_length.txt"))
    assert result.exit_code == 1


def test_decode_claimed_distance_mismatch():
    result = invoke("decode", "--code", make_path("code.wrong_distance.txt"),
                    "--received", make_path("received.repetition3.txt"))
    assert result.exit_code == 2
    assert "minimum distance is 2" in result.output


def test_simulate_noiseless(tmp_path):
    out = tmp_path / "sim.txt"
    result = invoke("simulate", "--code", make_path("code.hamming7.txt"),
                    "--profile", make_path("profile.noiseless7.txt"),
                    "--trials", 100, "--out", out)
    assert result.exit_code == 0
    values = report(out)
    assert values["max_estimate"] == "0"
    assert values["budget_exceedance"] == "0"
    assert values["word 0000000"].startswith("0/100 [0.000000, 0.0369")
    assert "simulated 100 trials in" in result.output


def test_simulate_needs_100_trials():
    result = invoke("simulate", "--code", make_path("code.hamming7.txt"),
                    "--profile", make_path("profile.noiseless7.txt"),
                    "--trials", 50)
    assert result.exit_code == 2
    assert "at least 100 trials" in result.output


def test_simulate_profile_length_mismatch():
    result = invoke("simulate", "--code", make_path("code.hamming7.txt"),
                    "--profile", make_path("profile.uniform.txt"),
                    "--trials", 100)
    assert result.exit_code == 2


@pytest.mark.slow
def test_simulate_repetition_code():
    code = read_code(make_path("code.repetition15.txt"))
    profile = read_profile(make_path("profile.bsc15.txt"))
    result = simulate(code, 15, profile, 10000, 0)
    assert result.max_estimate <= 0.05
    assert result.budget_exceedance < 1e-9
    for estimate in result.estimates:
        assert estimate.low <= estimate.estimate <= estimate.high


@pytest.mark.slow
def test_simulate_stays_within_error_budget():
    profile = NoiseProfile.uniform(12, 0.02, 0.02)
    t1 = theorem1_pipeline(random_dictionary(12, 48, 4), profile, 0.2)
    assert t1.d == 2
    trials = 1000
    result = simulate(t1.construction.code, t1.d, profile, trials, 3)
    budget = result.budget_exceedance
    assert budget <= decoding_error_bound(t1.stats)
    sigma = math.sqrt(budget * (1 - budget) / trials)
    assert result.max_estimate <= budget + 3 * sigma


def test_simulate_is_reproducible():
    code = read_code(make_path("code.repetition3.txt"))
    profile = NoiseProfile.uniform(3, 0.1, 0.1)
    a = simulate(code, 3, profile, 200, 11)
    b = simulate(code, 3, profile, 200, 11)
    assert a == b
    assert a.max_estimate == max(e.estimate for e in a.estimates)
    assert a.max_estimate > 0


def test_simulate_rejects_few_trials():
    code = Code((Word.parse("000"), Word.parse("111")))
    with pytest.raises(DomainError):
        simulate(code, 3, NoiseProfile.uniform(3), 99, 0)


def test_wilson_interval():
    low, high = wilson_interval(0, 100)
    assert low == 0.0
    assert high == pytest.approx(0.036993, abs=1e-5)
    low, high = wilson_interval(50, 100)
    assert low == pytest.approx(0.4038, abs=1e-4)
    assert high == pytest.approx(0.5962, abs=1e-4)


@pytest.mark.slow
def test_wilson_interval_coverage():
    rng = np.random.default_rng(8)
    truth = 0.03
    covered = 0
    for _ in range(100):
        failures = int(rng.binomial(1000, truth))
        low, high = wilson_interval(failures, 1000)
        covered += low <= truth <= high
    assert covered >= 90


def test_theorem1_noiseless(tmp_path):
    out = tmp_path / "t1.txt"
    result = invoke("theorem1", "--dict", make_path("dict.small.txt"),
                    "--profile", make_path("profile.noiseless4.txt"),
                    "--out", out)
    assert result.exit_code == 0
    values = report(out)
    assert values["d"] == "1"
    assert values["achieved_rate"] == values["alpha"]
    assert values["feasible"] == "yes"


def test_theorem1_infeasible(tmp_path):
    out = tmp_path / "t1.txt"
    result = invoke("theorem1", "--full-space",
                    "--profile", make_path("profile.heavy3.txt"),
                    "--out", out)
    assert result.exit_code == 2
    assert "d = 4 > n = 3" in result.output
    assert report(out)["feasible"] == "no"


def test_theorem1_half_noise_warns(tmp_path):
    out = tmp_path / "t1.txt"
    result = invoke("theorem1", "--full-space",
                    "--profile", make_path("profile.erasure10.txt"),
                    "--out", out)
    assert result.exit_code == 0
    assert "WARNING: p_eff = 0.500000 >= 1/2" in result.output
    values = report(out)
    assert values["feasible"] == "yes"
    assert values["d"] == "7"
    assert values["warning"] == "p_eff = 0.500000 >= 1/2"
    assert "infeasible" not in values


def test_theorem1_needs_one_dictionary():
    result = invoke("theorem1", "--profile",
                    make_path("profile.noiseless4.txt"))
    assert result.exit_code == 2
    result = invoke("theorem1", "--full-space", "--dict",
                    make_path("dict.small.txt"), "--profile",
                    make_path("profile.noiseless4.txt"))
    assert result.exit_code == 2


def test_theorem1_missing_profile():
    result = invoke("theorem1", "--full-space", "--profile",
                    make_path("no_such.txt"))
    assert result.exit_code == 1


def test_theorem3_bsc(tmp_path):
    out = tmp_path / "t3.txt"
    result = invoke("theorem3", "--channel", make_path("channel.bsc.txt"),
                    "--n", 10, "--eps", 0.3, "--out", out)
    assert result.exit_code == 2
    assert "M < N0 / (d_L*d_R)" in result.output
    values = report(out)
    assert values["#B"] == "0"
    assert values["M"] == "0"
    assert values["max_error"] == "none"
    assert values["infeasible"].startswith("no M >= 1")
    assert float(values["typical_d_L"]) <= float(values["d_L_bound"])
    assert float(values["typical_d_R"]) <= float(values["d_R_bound"])


def test_theorem3_bsc_dictionary_too_small(tmp_path):
    out = tmp_path / "t3.txt"
    result = invoke("theorem3", "--channel", make_path("channel.bsc.txt"),
                    "--n", 10, "--eps", 0.4, "--out", out)
    assert result.exit_code == 2
    assert "= 4 / 224" in result.output
    values = report(out)
    assert values["#B"] == "1024"
    assert "shortfall" not in values
    assert (values["d_L"], values["d_R"]) == ("56", "4")


def test_theorem3_low_noise(tmp_path):
    out = tmp_path / "t3.txt"
    result = invoke("theorem3", "--channel", make_path("channel.bsc002.txt"),
                    "--n", 10, "--eps", 0.3, "--out", out)
    assert result.exit_code == 0
    values = report(out)
    assert values["M"] == "15"
    assert values["N0"] == "16"
    assert float(values["max_error"]) == pytest.approx(1 - 0.98 ** 10)
    assert "infeasible" not in values
    assert "WARNING" not in result.output


def test_theorem3_malformed_channel():
    result = invoke("theorem3", "--channel",
                    make_path("channel.malformed.txt"), "--n", 4,
                    "--eps", 0.3)
    assert result.exit_code == 2
    assert "row 1 sums to 1.1" in result.output


def test_run_pipeline_directly(tmp_path):
    out = tmp_path / "t3.txt"
    config = ExperimentConfig(
        "theorem3", {"channel": str(make_path("channel.bsc002.txt"))},
        n=10, eps=0.3, out=str(out))
    result = run_pipeline(config)
    assert result.size == 15
    assert report(out)["n"] == "10"
    with pytest.raises(DomainError):
        ExperimentConfig("theorem2")
    with pytest.raises(DomainError):
        ExperimentConfig("theorem1", trials=0)


def test_run_pipeline_reports_before_failing(tmp_path):
    out = tmp_path / "t3.txt"
    config = ExperimentConfig(
        "theorem3", {"channel": str(make_path("channel.bsc.txt"))},
        n=6, eps=0.3, out=str(out))
    with pytest.raises(InfeasibleError) as e:
        run_pipeline(config)
    assert "M < N0 / (d_L*d_R)" in str(e.value)
    assert report(out)["max_error"] == "none"

    out = tmp_path / "t1.txt"
    config = ExperimentConfig(
        "theorem1", {"profile": str(make_path("profile.heavy3.txt"))},
        eps=0.1, out=str(out), full_space=True)
    with pytest.raises(InfeasibleError) as e:
        run_pipeline(config)
    assert str(e.value) == "d = 4 > n = 3"
    assert report(out)["feasible"] == "no"


def test_figure1(tmp_path):
    out = tmp_path / "figure1.csv"
    result = invoke("figure1", "--delta", 0.05, "--out", out)
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "p,delta,rate"
    assert len(lines) == 1 + 251
    rates = [(float(p), float(r))
             for p, _, r in (line.split(",") for line in lines[1:])]
    crossings = [p for (p, r), (_, s) in zip(rates, rates[1:]) if r > 0 >= s]
    assert len(crossings) == 1
    assert 0.07 <= crossings[0] <= 0.09


def test_emit_figure1_rows(tmp_path):
    out = tmp_path / "figure1.csv"
    grid = figure1_grid(0.01, 0.2)
    rows = emit_figure1((0.0, 0.025, 0.05, 0.1), grid, str(out))
    assert rows == 4 * len(grid)
    assert out.read_text().splitlines()[1] == "0.000000,0.000000,1.000000"


def test_figure1_unwritable_output(tmp_path):
    result = invoke("figure1", "--out", tmp_path / "missing" / "f.csv")
    assert result.exit_code == 1


def test_conflict_build(tmp_path):
    out = tmp_path / "conflict.txt"
    result = invoke("conflict-build", "--channel",
                    make_path("channel.cycle4.txt"), "--eps", 0.15,
                    "--out", out)
    assert result.exit_code == 0
    values = report(out)
    assert values["M"] == "3"
    assert (values["d_L"], values["d_R"]) == ("1", "1")
    assert float(values["max_error"]) == pytest.approx(0.1)


def test_conflict_build_no_admissible_size():
    result = invoke("conflict-build", "--channel",
                    make_path("channel.cycle4.txt"), "--eps", 0.05)
    assert result.exit_code == 2
    assert "no admissible code size" in result.output


def test_conflict_build_capacity():
    result = invoke("conflict-build", "--channel",
                    make_path("channel.cycle4.txt"), "--eps", 0.15,
                    "--size", 4)
    assert result.exit_code == 2
    assert "M = 4" in result.output


def test_invalid_eps_option():
    result = invoke("conflict-build", "--channel",
                    make_path("channel.cycle4.txt"), "--eps", 1.5)
    assert result.exit_code == 2


def test_config_file(tmp_path):
    out = tmp_path / "sim.txt"
    result = invoke("--config", make_path("experiment.cfg"), "simulate",
                    "--code", make_path("code.repetition3.txt"),
                    "--profile", make_path("profile.heavy3.txt"),
                    "--out", out)
    assert result.exit_code == 0
    values = report(out)
    assert values["seed"] == "7"
    assert values["trials"] == "200"


def test_config_from_environment(tmp_path):
    out = tmp_path / "sim.txt"
    with env(DICTCODE_CONFIG=make_path("experiment.cfg")):
        result = invoke("simulate", "--code",
                        make_path("code.repetition3.txt"), "--profile",
                        make_path("profile.heavy3.txt"), "--seed", 3,
                        "--out", out)
    assert result.exit_code == 0
    assert report(out)["seed"] == "3"
    assert report(out)["trials"] == "200"


def test_invalid_config_file():
    result = invoke("--config", make_path("experiment.unknown_key.cfg"),
                    "figure1")
    assert result.exit_code == 1
    assert "unknown key" in result.output


@pytest.mark.parametrize("args", (
    ("simulate", "--code", make_path("code.repetition3.txt"), "--profile",
     make_path("profile.heavy3.txt"), "--trials", 300, "--seed", 9),
    ("figure1", "--delta", 0.1, "--step", 0.01),
    ("theorem3", "--channel", make_path("channel.bsc002.txt"), "--n", 10,
     "--eps", 0.3, "--selector", "random", "--seed", 4),
    ("construct-gv", "--dict", make_path("dict.small.txt"), "--d", 2),
    ("decode", "--code", make_path("code.hamming7.txt"), "--received",
     make_path("received.hamming7.txt")),
    ("theorem1", "--dict", make_path("dict.small.txt"), "--profile",
     make_path("profile.noiseless4.txt")),
    ("conflict-build", "--channel", make_path("channel.cycle4.txt"),
     "--eps", 0.15),
))
def test_outputs_are_reproducible(tmp_path, args):
    outputs = []
    for run in range(2):
        out = tmp_path / f"run{run}.txt"
        result = invoke(*args, "--out", out)
        assert result.exit_code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
