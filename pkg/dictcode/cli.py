"""
.. module:: cli

Module cli defines the command-line driver of the dictcode package. It reads
the input files, runs constructions, decoders and the two rate pipelines,
estimates decoding error rates by seeded Monte Carlo simulation and writes
plain-text reports and CSV data.

Every output written to ``--out`` is fully determined by the inputs and the
seed; timing information only goes to stderr.
"""

import logging
import math
import sys
import time
from dataclasses import dataclass, field
from io import StringIO

import click
import numpy as np
from scipy.stats import norm

from .binary_channel import (budget_exceedance, decoding_error_bound,
                             sample_noise, trial_generator, transmit)
from .conflict import (Strategy, build_probable_sets, exact_error_probability,
                       greedy_disjoint_code, max_admissible_size,
                       theorem3_pipeline)
from .core import (DictcodeError, DomainError, FormatError, FullSpace,
                   InfeasibleError, min_distance)
from .entropy import (Distribution, FIGURE1_DELTAS, figure1_grid,
                      write_rate_curves)
from .gv_code import (TwoStageDecoder, greedy_gv_construct,
                      stirling_size_bound, theorem1_pipeline)
from .validators import (read_channel, read_dictionary, read_profile,
                         read_received, validate_channel, validate_code,
                         validate_config, validate_dictionary,
                         validate_distribution, validate_eps,
                         validate_profile)


logger = logging.getLogger(__name__)

#: Exit code for unreadable or malformed input and failed writes.
EXIT_IO = 1
#: Exit code for parameters outside a command's domain.
EXIT_INFEASIBLE = 2


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one pipeline run.

    Attributes:
        command (str): ``theorem1`` or ``theorem3``
        paths (dict): input role -> file name (``dict``, ``profile``,
                      ``channel``)
        n (int): block length (theorem3)
        eps (float): slack
        alpha (float): dictionary exponent (theorem3), None for H(X)
        trials (int): Monte Carlo trials
        seed (int): 64-bit seed
        out (str): output path, ``-`` for stdout
        input_distribution (Distribution): per-symbol input law (theorem3)
        selector (str): dictionary selector (theorem3)
        full_space (bool): use the virtual full word space (theorem1)
    """

    command: str
    paths: dict = field(default_factory=dict)
    n: int = None
    eps: float = 0.1
    alpha: float = None
    trials: int = 10000
    seed: int = 0
    out: str = "-"
    input_distribution: Distribution = None
    selector: str = "canonical"
    full_space: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be positive, got {self.trials}")
        if self.command not in ("theorem1", "theorem3"):
            raise DomainError(f"unknown pipeline {self.command!r}")


@dataclass(frozen=True)
class WordEstimate:
    """Empirical decoding error of one code word."""

    word: object
    failures: int
    trials: int
    low: float
    high: float

    @property
    def estimate(self):
        return self.failures / self.trials


@dataclass(frozen=True)
class SimulationReport:
    """Monte Carlo estimate of q(C, g) for a code and a noise profile.

    Attributes:
        estimates (tuple): :py:class:`WordEstimate` per code word
        max_estimate (float): empirical q(C, g)
        trials (int): trials per code word
        seed (int): experiment seed
        budget_exceedance (float): exact P(2 T_f + T_e > d - 1)
        wall_time (float): seconds spent, not part of written reports
    """

    estimates: tuple
    max_estimate: float
    trials: int
    seed: int
    budget_exceedance: float
    wall_time: float = field(compare=False)


def wilson_interval(failures, trials, confidence=0.95):
    """Wilson score interval for a binomial proportion.

    Returns:
        tuple: (low, high) bounds, both within [0, 1]
    """

    z = norm.ppf(0.5 + confidence / 2)
    phat = failures / trials
    denominator = 1 + z ** 2 / trials
    center = (phat + z ** 2 / (2 * trials)) / denominator
    half = z * math.sqrt(phat * (1 - phat) / trials
                         + z ** 2 / (4 * trials ** 2)) / denominator
    return max(0.0, min(phat, center - half)), min(1.0, max(phat,
                                                            center + half))


def simulate(code, d, profile, trials, seed):
    """Estimate the decoding error of every code word by simulation.

    Trial number t draws its noise from stream ``(seed, t)``; within a trial
    every code word is sent once through
    :py:func:`~dictcode.binary_channel.transmit` and decoded with the
    two-stage decoder.

    Args:
        code (Code): binary code
        d (int): minimum distance used by the decoder
        profile (NoiseProfile): channel profile of the code length
        trials (int): trials per code word, at least 100
        seed (int): experiment seed

    Raises:
        DomainError: if trials < 100 or lengths disagree

    Returns:
        SimulationReport: per-word estimates with Wilson intervals
    """

    if trials < 100:
        raise DomainError(f"simulation needs at least 100 trials, "
                          f"got {trials}")
    if profile.n != code.n:
        raise DomainError(f"profile length {profile.n} differs from code "
                          f"length {code.n}")
    start = time.perf_counter()
    decoder = TwoStageDecoder(code, d)
    failures = np.zeros(code.size, dtype=np.int64)
    for t in range(trials):
        rng = trial_generator(seed, t)
        for j, word in enumerate(code):
            outcome = decoder.decode(transmit(word, sample_noise(profile, rng)))
            if not outcome.ok or outcome.word != word:
                failures[j] += 1

    estimates = tuple(WordEstimate(word, int(k), trials,
                                   *wilson_interval(int(k), trials))
                      for word, k in zip(code, failures))
    report = SimulationReport(estimates, max(e.estimate for e in estimates),
                              trials, seed, budget_exceedance(profile, d - 1),
                              time.perf_counter() - start)
    logger.info("simulated %d trials for %d words, max estimate %.6f",
                trials, code.size, report.max_estimate)
    return report


def _value(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def format_report(pairs):
    """Render ``(key, value)`` pairs as ``key: value`` lines."""
    return "".join(f"{key}: {_value(value)}\n" for key, value in pairs)


def format_code(code, d):
    """Render a code in the code file format."""
    alphabet = code[0].alphabet
    lines = [f"n={code.n} N={alphabet.size}", f"d={d}"]
    lines.extend(str(w) for w in code)
    return "\n".join(lines) + "\n"


def write_output(path, text):
    """Write *text* to *path*, ``-`` meaning stdout.

    Raises:
        DictcodeError: if the file cannot be written
    """

    try:
        with click.open_file(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as e:
        raise FormatError(f"cannot write output ({e.strerror})", path)


def simulation_report(report):
    pairs = [("trials", report.trials), ("seed", report.seed),
             ("max_estimate", report.max_estimate),
             ("budget_exceedance", report.budget_exceedance)]
    for e in report.estimates:
        pairs.append((f"word {e.word}",
                      f"{e.failures}/{e.trials} "
                      f"[{e.low:.6f}, {e.high:.6f}]"))
    return format_report(pairs)


def theorem1_report(report):
    stats = report.stats
    pairs = [("n", stats.n), ("epsilon", stats.epsilon),
             ("mu_f", stats.mu_f), ("mu_e", stats.mu_e),
             ("p_eff", stats.p_eff), ("t", stats.t), ("d", report.d),
             ("alpha", report.alpha), ("target_rate", report.target_rate),
             ("decoding_error_bound", decoding_error_bound(stats))]
    construction = report.construction
    if construction is not None:
        pairs += [("dictionary_size", construction.dictionary_size),
                  ("guarantee", construction.guarantee),
                  ("achieved_size", construction.achieved_size),
                  ("achieved_rate", report.achieved_rate)]
        if 1 <= report.d - 1 < stats.n / 2:
            pairs.append(("relaxed_size_bound",
                          stirling_size_bound(stats.n, report.d,
                                              report.alpha)))
    pairs.append(("feasible", report.feasible))
    pairs += [("infeasible", reason) for reason in report.infeasible]
    pairs += [("warning", reason) for reason in report.warnings]
    return format_report(pairs)


def theorem3_report(report):
    typical = report.typical
    h = typical.entropies
    full = typical.family()
    pairs = [("n", typical.n), ("epsilon", typical.epsilon),
             ("base", typical.base),
             ("H(X)", h.h_x), ("H(Y)", h.h_y),
             ("H(Y|X)", h.h_y_given_x), ("H(X|Y)", h.h_x_given_y),
             ("#A1", len(typical.a1)), ("#A2", int(typical.a2.sum())),
             ("#B", len(typical.b)),
             ("P(A1)", typical.probabilities["A1"]),
             ("P(A2)", typical.probabilities["A2"]),
             ("P(A)", typical.probabilities["A"]),
             ("chebyshev_bound", typical.chebyshev.total),
             ("typical_d_L", full.d_left), ("typical_d_R", full.d_right),
             ("alpha", report.alpha),
             ("dictionary_target", report.dictionary_target),
             ("N0", report.family.size),
             ("d_L", report.family.d_left),
             ("d_L_bound", report.d_left_bound),
             ("d_R", report.family.d_right),
             ("d_R_bound", report.d_right_bound),
             ("M", report.size),
             ("achieved_rate", report.achieved_rate),
             ("target_rate", report.target_rate),
             ("max_error", report.errors.max if report.feasible else None)]
    pairs += [("shortfall", s) for s in report.shortfalls]
    if not report.feasible:
        pairs.append(("infeasible", report.infeasible))
    return format_report(pairs)


def run_pipeline(config):
    """Run the Theorem-1 or Theorem-3 pipeline and write its report.

    The report is written even when the parameters admit no code, so the
    violated condition can be read next to the quantities behind it.

    Args:
        config (ExperimentConfig): the run parameters

    Raises:
        InfeasibleError: if the parameters admit no code (d > n for
                         theorem1, no M >= 1 for theorem3)
        DictcodeError: on unreadable input or failed writes

    Returns:
        Theorem1Report or Theorem3Report: the pipeline report
    """

    if config.command == "theorem1":
        profile = read_profile(config.paths["profile"])
        if config.full_space:
            dictionary = FullSpace(profile.n)
        else:
            dictionary = read_dictionary(config.paths["dict"])
        report = theorem1_pipeline(dictionary, profile, config.eps)
        write_output(config.out, theorem1_report(report))
        for reason in report.warnings:
            warning(reason)
        if not report.feasible:
            raise InfeasibleError("; ".join(report.infeasible))
        return report

    channel = read_channel(config.paths["channel"])
    p_x = config.input_distribution
    if p_x is None:
        p_x = Distribution.uniform(channel.input_size)
    report = theorem3_pipeline(p_x, channel, config.n, config.eps,
                               config.alpha, config.selector, config.seed)
    write_output(config.out, theorem3_report(report))
    for shortfall in report.shortfalls:
        warning(shortfall)
    if not report.feasible:
        raise InfeasibleError(report.infeasible)
    return report


def emit_figure1(deltas, p_grid, out):
    """Write the rate curves 1 - alpha_0(p, delta) as CSV.

    Returns:
        int: number of data rows
    """

    buffer = StringIO()
    rows = write_rate_curves(deltas, p_grid, buffer)
    write_output(out, buffer.getvalue())
    return rows


def error(message):
    label = click.style("ERROR", fg="red", bold=True)
    click.echo(f"{label}: {message}", err=True)


def warning(message):
    label = click.style("WARNING", fg="yellow", bold=True)
    click.echo(f"{label}: {message}", err=True)


def fail(e):
    """Report a package error and exit with its exit code."""
    error(e)
    sys.exit(EXIT_IO if isinstance(e, (FormatError, OSError))
             else EXIT_INFEASIBLE)


def _distance(code, d):
    if d is not None:
        return d
    if code.claimed_distance is not None:
        return code.claimed_distance
    return min_distance(code) if code.size >= 2 else 1


out_option = click.option("-o", "--out", default="-", show_default=True,
                          metavar="PATH", help="Output file, - for stdout.")
seed_option = click.option("--seed", type=int, default=0, show_default=True,
                           help="64-bit experiment seed.")
trials_option = click.option("--trials", type=click.IntRange(min=1),
                             default=10000, show_default=True,
                             help="Monte Carlo trials.")
eps_option = click.option("--eps", type=float, default=0.1,
                          show_default=True, callback=validate_eps,
                          help="Slack parameter epsilon.")


@click.group()
@click.option("-c", "--config", metavar="FILENAME", envvar="DICTCODE_CONFIG",
              type=click.Path(dir_okay=False), is_eager=True,
              expose_value=False, callback=validate_config,
              help="Experiment file with default option values.")
@click.option("-v", "--verbose", count=True,
              help="Log progress to stderr (repeat for debug).")
def cli(verbose):
    """Workbench for codes constrained to predetermined dictionaries"""

    if verbose:
        logging.basicConfig(level=logging.DEBUG if verbose > 1
                            else logging.INFO, stream=sys.stderr,
                            format="%(name)s: %(message)s")


@cli.command("construct-gv")
@click.option("--dict", "dictionary", metavar="FILENAME", required=True,
              type=click.Path(dir_okay=False),
              callback=validate_dictionary, help="Dictionary file.")
@click.option("--d", "d", type=int, required=True,
              help="Target minimum distance.")
@out_option
def construct_gv(dictionary, d, out):
    """Greedy Gilbert-Varshamov code inside a dictionary."""

    try:
        report = greedy_gv_construct(dictionary, d)
        write_output(out, format_code(report.code, d))
    except DictcodeError as e:
        fail(e)
    click.echo(f"admitted {report.achieved_size} of "
               f"{report.dictionary_size} words "
               f"(guarantee {report.guarantee})", err=True)


@cli.command()
@click.option("--code", metavar="FILENAME", required=True,
              type=click.Path(dir_okay=False),
              callback=validate_code, help="Code file.")
@click.option("--received", metavar="FILENAME", required=True,
              type=click.Path(dir_okay=False),
              help="Received words, one per line, 'e' for erasures.")
@click.option("--d", "d", type=int, default=None,
              help="Minimum distance (default: the code file's).")
@out_option
def decode(code, received, d, out):
    """Two-stage decoding of received words."""

    try:
        words = read_received(received, code.n, code[0].alphabet)
        decoder = TwoStageDecoder(code, _distance(code, d))
        lines = list()
        for y in words:
            outcome = decoder.decode(y)
            lines.append(str(outcome.word) if outcome.ok
                         else f"ERROR {outcome.reason.value}")
        write_output(out, "".join(f"{line}\n" for line in lines))
    except (DictcodeError, OSError) as e:
        fail(e)


@cli.command("simulate")
@click.option("--code", metavar="FILENAME", required=True,
              type=click.Path(dir_okay=False),
              callback=validate_code, help="Code file.")
@click.option("--profile", metavar="FILENAME", required=True,
              type=click.Path(dir_okay=False),
              callback=validate_profile, help="Noise profile file.")
@click.option("--d", "d", type=int, default=None,
              help="Minimum distance (default: the code file's).")
@trials_option
@seed_option
@out_option
def simulate_command(code, profile, d, trials, seed, out):
    """Monte Carlo estimate of the decoding error q(C,g)."""

    try:
        report = simulate(code, _distance(code, d), profile, trials, seed)
        write_output(out, simulation_report(report))
    except DictcodeError as e:
        fail(e)
    click.echo(f"simulated {report.trials} trials in "
               f"{report.wall_time:.3f} s", err=True)


@cli.command()
@click.option("--dict", "dictionary", metavar="FILENAME",
              type=click.Path(dir_okay=False),
              help="Dictionary file.")
@click.option("--full-space", is_flag=True,
              help="Use the whole word space as a virtual dictionary.")
@click.option("--profile", metavar="FILENAME", required=True,
              type=click.Path(dir_okay=False),
              help="Noise profile file.")
@eps_option
@out_option
def theorem1(dictionary, full_space, profile, eps, out):
    """Theorem-1 pipeline: GV code for a dictionary and a noise profile."""

    if (dictionary is None) == (not full_space):
        raise click.UsageError("give exactly one of --dict and --full-space")
    paths = {"profile": profile}
    if dictionary is not None:
        paths["dict"] = dictionary
    _run(ExperimentConfig("theorem1", paths, eps=eps, out=out,
                          full_space=full_space))


@cli.command()
@click.option("--channel", metavar="FILENAME", required=True,
              type=click.Path(dir_okay=False),
              help="Per-symbol channel file.")
@click.option("--n", "n", type=click.IntRange(min=1), required=True,
              help="Block length.")
@click.option("--alpha", type=float, default=None,
              help="Dictionary exponent (default: H(X)).")
@click.option("--input-dist", callback=validate_distribution, default=None,
              metavar="P0,P1,...", help="Input law (default: uniform).")
@click.option("--selector", type=click.Choice(["canonical", "random"]),
              default="canonical", show_default=True,
              help="Which words of B_n form the dictionary.")
@eps_option
@seed_option
@out_option
def theorem3(channel, n, alpha, input_dist, selector, eps, seed, out):
    """Theorem-3 pipeline: typical sets and conflict-set code."""

    _run(ExperimentConfig("theorem3", {"channel": channel}, n=n, eps=eps,
                          alpha=alpha, seed=seed, out=out,
                          input_distribution=input_dist, selector=selector))


def _run(config):
    try:
        run_pipeline(config)
    except (DictcodeError, OSError) as e:
        fail(e)


@cli.command()
@click.option("--delta", "deltas", type=float, multiple=True,
              default=FIGURE1_DELTAS, show_default=True,
              help="Asymmetry values (repeatable).")
@click.option("--step", type=float, default=0.001, show_default=True,
              help="Grid step in p.")
@click.option("--p-max", type=float, default=0.25, show_default=True,
              help="Largest p on the grid.")
@out_option
def figure1(deltas, step, p_max, out):
    """CSV of the rate 1 - alpha_0 against p for several asymmetries."""

    try:
        rows = emit_figure1(deltas, figure1_grid(step, p_max), out)
    except DictcodeError as e:
        fail(e)
    logger.info("wrote %d rows", rows)


@cli.command("conflict-build")
@click.option("--channel", metavar="FILENAME", required=True,
              type=click.Path(dir_okay=False),
              callback=validate_channel, help="Channel file.")
@click.option("--strategy", type=click.Choice([s.value for s in Strategy]),
              default=Strategy.GREEDY_MASS.value, show_default=True,
              help="Probable-set selection rule.")
@click.option("--size", "size", type=click.IntRange(min=1), default=None,
              help="Code size M (default: largest admissible).")
@eps_option
@out_option
def conflict_build(channel, strategy, size, eps, out):
    """Probable sets, disjoint packing and exact conflict-set errors."""

    try:
        family = build_probable_sets(channel, eps, strategy)
        if size is None:
            size = max_admissible_size(family)
            if size < 1:
                raise InfeasibleError(
                    f"no admissible code size: #X0 = {family.size} <= "
                    f"d_L*d_R = {family.d_left * family.d_right}")
        code = greedy_disjoint_code(family, size)
        errors = exact_error_probability(channel, family, code)
        pairs = [("epsilon", eps), ("strategy", strategy),
                 ("X0", family.size), ("d_L", family.d_left),
                 ("d_R", family.d_right), ("M", code.size),
                 ("max_error", errors.max)]
        pairs += [(f"word {w}", e) for w, e in zip(code, errors.per_word)]
        write_output(out, format_report(pairs))
    except DictcodeError as e:
        fail(e)
