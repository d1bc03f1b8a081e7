"""
Command-line interface for contextBell.

Subcommands:
- kcbs       KCBS value of a symmetric state against the bounds
- chsh       concurrence, maximal CHSH value and regime of a state
- scan       closed-form and oracle values over a concurrence grid
- classify   regime of a CHSH value
- reproduce  recompute the headline numbers with pass/fail marks
- sample     finite-shot estimate of the KCBS or CHSH value

Exit codes are 0 on success, 1 when a check or computation fails and 2
for invalid input.
"""

import functools

import click
import numpy as np

from contextBell import __version__
from contextBell.modules.bridge import (
    THRESHOLDS,
    Regime,
    c_from_smin,
    classify,
    points_to_frame,
    regime_distances,
    scan,
)
from contextBell.modules.chsh import (
    beta_closed_form,
    canonical_settings,
    chsh_max_correlation,
    chsh_max_direct,
    chsh_value,
    random_pure_state,
)
from contextBell.modules.entanglement import (
    concurrence_pure,
    concurrence_symmetric,
)
from contextBell.modules.kcbs import (
    KCBS_CLASSICAL_BOUND,
    KCBS_QUANTUM_MINIMUM,
    SQRT5,
    is_contextual,
    kcbs_min_for_concurrence,
    kcbs_observables,
    kcbs_value,
    s_min_closed_form,
    standard_pentagram,
)
from contextBell.modules.sampler import estimate_chsh, estimate_kcbs
from contextBell.modules.symmetric_map import (
    QutritPure,
    embed,
    random_symmetric,
)
from contextBell.utils.config import (
    OUTPUT_FORMATS,
    load_config,
    use_tolerances,
    with_overrides,
)
from contextBell.utils.errors import AppError
from contextBell.utils.io_helpers import (
    format_number,
    parse_state,
    write_table,
)
from contextBell.utils.logger_config import logger
from contextBell.utils.optimize_helpers import make_rng

# Agreement required between an optimizer oracle and a closed form
ORACLE_TOLERANCE = 1e-6
DIRECT_TOLERANCE = 1e-4
CLOSED_FORM_TOLERANCE = 1e-9

# (beta, expected regime); the last point is 2 sqrt2 itself, printed as
# 2.82843
REGIME_POINTS = (
    (1.9, Regime.LOCAL_NONCONTEXTUAL),
    (2.0, Regime.LOCAL_NONCONTEXTUAL),
    (2.1, Regime.NONLOCAL_NONCONTEXTUAL),
    (2.19089, Regime.NONLOCAL_NONCONTEXTUAL),
    (2.2, Regime.NONLOCAL_CONTEXTUAL),
    (THRESHOLDS.beta_tsirelson, Regime.NONLOCAL_CONTEXTUAL),
)


def _reporting_errors(func):
    """Run a command under the configured tolerances and turn AppErrors
    into a message on stderr and the error's exit code."""

    @functools.wraps(func)
    @click.pass_context
    def wrapper(ctx, *args, **kwargs):
        try:
            with use_tolerances(ctx.obj.tolerances):
                return func(ctx.obj, *args, **kwargs)
        except AppError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(e.exit_code)

    return wrapper


def _line(label, value, precision):
    if not isinstance(value, str):
        value = format_number(value, precision)
    click.echo(f"{label:<24}{value}")


state_option = click.option(
    "--state",
    "state_text",
    required=True,
    help="JSON file, inline JSON document or real triple 'a,b,c'.",
)


@click.group()
@click.version_option(__version__)
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False),
    default=None,
    help="JSON config file (default: $CONTEXTBELL_CONFIG).",
)
@click.option(
    "--precision",
    type=int,
    default=None,
    help="Significant digits of numeric output (6-17).",
)
@click.pass_context
def cli(ctx, config_path, precision):
    """KCBS contextuality and CHSH non-locality of symmetric two-qubit
    states."""
    try:
        config = load_config(config_path)
        ctx.obj = with_overrides(config, "output", precision=precision)
    except AppError as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(e.exit_code)


@cli.command()
@state_option
@_reporting_errors
def kcbs(config, state_text):
    """KCBS value of a symmetric state with the standard pentagram."""
    precision = config.output.precision
    parsed = parse_state(state_text)
    symmetric = parsed.symmetric()
    obs = kcbs_observables(standard_pentagram())
    value = kcbs_value(parsed.qutrit(), obs)
    concurrence = concurrence_symmetric(
        symmetric.a, symmetric.b, symmetric.c
    )
    logger.info(f"kcbs command: value {value:.9f}")

    _line("KCBS value:", value, precision)
    _line("Classical bound:", KCBS_CLASSICAL_BOUND, precision)
    _line("Quantum minimum:", KCBS_QUANTUM_MINIMUM, precision)
    _line("Concurrence:", concurrence.value, precision)
    _line(
        "Minimum at concurrence:",
        s_min_closed_form(concurrence.value),
        precision,
    )
    _line(
        "Verdict:",
        "CONTEXTUAL" if is_contextual(value) else "NON-CONTEXTUAL",
        precision,
    )


@cli.command()
@state_option
@click.option(
    "--settings",
    type=click.Choice(["optimal", "canonical"]),
    default="optimal",
    show_default=True,
    help="Optimise the settings or use the canonical Bell settings.",
)
@_reporting_errors
def chsh(config, state_text, settings):
    """Concurrence, maximal CHSH value and regime of a state."""
    precision = config.output.precision
    state = parse_state(state_text).two_qubit()
    concurrence = concurrence_pure(state)
    beta = chsh_max_correlation(state)
    logger.info(f"chsh command: beta {beta:.9f}")

    _line("Concurrence:", concurrence.value, precision)
    _line("beta (correlation):", beta, precision)
    if settings == "optimal":
        _line(
            "beta (direct):",
            chsh_max_direct(state, config.optimizer).beta,
            precision,
        )
    else:
        _line(
            "beta (canonical):",
            chsh_value(state, canonical_settings()),
            precision,
        )
    _line("Regime:", classify(beta).value, precision)
    _line("Threshold local:", THRESHOLDS.beta_local, precision)
    _line("Threshold contextual:", THRESHOLDS.beta_noncontextual, precision)
    _line("Threshold Tsirelson:", THRESHOLDS.beta_tsirelson, precision)


@cli.command("scan")
@click.option("--c-min", type=float, default=0.0, show_default=True)
@click.option("--c-max", type=float, default=1.0, show_default=True)
@click.option("--steps", type=int, default=11, show_default=True)
@click.option(
    "--out",
    type=click.Path(dir_okay=False),
    default=None,
    help="Output file (default: config output.path, else stdout).",
)
@click.option(
    "--format", "fmt", type=click.Choice(OUTPUT_FORMATS), default=None
)
@click.option(
    "--include-threshold",
    is_flag=True,
    help="Add the row at C = 1/sqrt5.",
)
@click.option("--workers", type=int, default=None)
@_reporting_errors
def scan_command(
    config, c_min, c_max, steps, out, fmt, include_threshold, workers
):
    """Closed-form and oracle values over a concurrence grid."""
    config = with_overrides(config, "output", format=fmt, path=out)
    config = with_overrides(config, "optimizer", workers=workers)
    points = scan(
        c_min,
        c_max,
        steps,
        config.optimizer,
        include_threshold=include_threshold,
    )
    write_table(
        points_to_frame(points),
        config.output.format,
        config.output.path,
        config.output.precision,
    )


@cli.command("classify")
@click.option("--beta", type=float, required=True)
@_reporting_errors
def classify_command(config, beta):
    """Regime of a CHSH value and its distance to each threshold."""
    precision = config.output.precision
    regime = classify(beta)
    _line("Regime:", regime.value, precision)
    for name, distance in regime_distances(beta).items():
        _line(f"beta - {name}:", distance, precision)


@cli.command("sample")
@state_option
@click.option(
    "--scenario", type=click.Choice(["kcbs", "chsh"]), required=True
)
@click.option("--shots", type=int, default=None, help="Shots per term.")
@click.option("--seed", type=int, default=None)
@click.option(
    "--settings",
    type=click.Choice(["optimal", "canonical"]),
    default="canonical",
    show_default=True,
    help="CHSH settings (optimal runs the direct optimizer first).",
)
@_reporting_errors
def sample_command(config, state_text, scenario, shots, seed, settings):
    """Finite-shot estimate of the KCBS or CHSH value."""
    config = with_overrides(config, "sampler", shots=shots, seed=seed)
    precision = config.output.precision
    params = config.sampler
    parsed = parse_state(state_text)

    if scenario == "kcbs":
        state = parsed.qutrit()
        obs = kcbs_observables(standard_pentagram())
        estimate = estimate_kcbs(state, obs, params.shots, params.seed)
        exact = kcbs_value(state, obs)
    else:
        state = parsed.two_qubit()
        if settings == "optimal":
            chosen = chsh_max_direct(state, config.optimizer).settings
        else:
            chosen = canonical_settings()
        estimate = estimate_chsh(state, chosen, params.shots, params.seed)
        exact = chsh_value(state, chosen)

    difference = estimate.mean - exact
    if estimate.stderr > 0:
        z_score = difference / estimate.stderr
    else:
        z_score = 0.0 if difference == 0 else float("inf")

    _line("Estimate:", estimate.mean, precision)
    _line("Standard error:", estimate.stderr, precision)
    _line("Exact value:", exact, precision)
    _line("z-score:", z_score, precision)
    _line("Shots per term:", str(estimate.shots), precision)
    _line("Seed:", str(estimate.seed), precision)


########################################################################
# Reproduction report
########################################################################


class _Report:
    """Collects pass/fail lines of the reproduce command."""

    def __init__(self, precision):
        self.precision = precision
        self.failures = 0

    def check(self, label, passed, detail):
        mark = "PASS" if passed else "FAIL"
        if not passed:
            self.failures += 1
        click.echo(f"[{mark}] {label}: {detail}")

    def close(self, label, value, expected, tolerance):
        diff = abs(value - expected)
        p = self.precision
        self.check(
            label,
            diff <= tolerance,
            f"{format_number(value, p)} (expected "
            f"{format_number(expected, p)}, |diff| {diff:.1e} <= "
            f"{tolerance:.0e})",
        )


def _check_grid(report, config):
    params = config.reproduce
    try:
        points = scan(0.0, 1.0, params.grid_steps, config.optimizer)
    except AppError as e:
        report.check("KCBS law on grid", False, str(e))
        return

    failed = [p for p in points if p.s_min_oracle is None]
    deviations = [
        abs(p.s_min_deviation) for p in points if p.s_min_oracle is not None
    ]
    worst = max(deviations) if deviations else float("inf")
    report.check(
        "KCBS law (5 - 3 sqrt5) C - sqrt5 on grid",
        not failed and worst <= ORACLE_TOLERANCE,
        f"{len(points)} points, {len(failed)} failed, max |oracle - "
        f"closed| {worst:.1e} <= {ORACLE_TOLERANCE:.0e}",
    )


def _check_random_states(report, config):
    params = config.reproduce
    rng = make_rng(params.seed)

    worst = 0.0
    for _ in range(params.random_states):
        s = random_symmetric(rng)
        c = concurrence_symmetric(s.a, s.b, s.c).value
        worst = max(
            worst, abs(chsh_max_correlation(embed(s)) - beta_closed_form(c))
        )
    report.check(
        "CHSH law 2 sqrt(1 + C^2), correlation matrix",
        worst <= CLOSED_FORM_TOLERANCE,
        f"{params.random_states} random symmetric states, max |diff| "
        f"{worst:.1e} <= {CLOSED_FORM_TOLERANCE:.0e}",
    )

    worst = 0.0
    try:
        for _ in range(params.direct_states):
            state = random_pure_state(rng)
            beta = chsh_max_direct(state, config.optimizer).beta
            expected = beta_closed_form(concurrence_pure(state).value)
            worst = max(worst, abs(beta - expected))
    except AppError as e:
        report.check("CHSH law, direct optimizer", False, str(e))
        return
    report.check(
        "CHSH law 2 sqrt(1 + C^2), direct optimizer",
        worst <= DIRECT_TOLERANCE,
        f"{params.direct_states} random pure states, max |diff| "
        f"{worst:.1e} <= {DIRECT_TOLERANCE:.0e}",
    )


def _check_regimes(report):
    wrong = []
    for beta, expected in REGIME_POINTS:
        regime = classify(beta)
        click.echo(f"       beta = {beta:.6g}: {regime.value}")
        if regime is not expected:
            wrong.append(f"{beta:.6g}")
    report.check(
        "Regime partition at reference points",
        not wrong,
        "all as expected" if not wrong else f"wrong at {', '.join(wrong)}",
    )


def _check_sampler(report, config):
    params = config.reproduce
    obs = kcbs_observables(standard_pentagram())
    state = QutritPure.basis(0)
    estimate = estimate_kcbs(state, obs, params.sampler_shots, params.seed)
    exact = kcbs_value(state, obs)
    p = report.precision
    report.check(
        "Sampled KCBS value of |0>",
        abs(estimate.mean - exact) <= 5 * estimate.stderr,
        f"{format_number(estimate.mean, p)} +/- "
        f"{format_number(estimate.stderr, p)} "
        f"(exact {format_number(exact, p)}, within 5 stderr)",
    )


@cli.command("reproduce")
@_reporting_errors
def reproduce_command(config):
    """Recompute the headline numbers and mark each check."""
    report = _Report(config.output.precision)
    obs = kcbs_observables(standard_pentagram())

    report.close(
        "KCBS quantum minimum 5 - 4 sqrt5 at |0>",
        kcbs_value(QutritPure.basis(0), obs),
        KCBS_QUANTUM_MINIMUM,
        CLOSED_FORM_TOLERANCE,
    )
    try:
        s_zero = kcbs_min_for_concurrence(0.0, config.optimizer).value
    except AppError:
        s_zero = np.inf
    report.close(
        "KCBS minimum at C = 0 (-sqrt5)", s_zero, -SQRT5, ORACLE_TOLERANCE
    )

    c_star = c_from_smin(KCBS_CLASSICAL_BOUND)
    report.close(
        "Threshold concurrence C* = 1/sqrt5",
        c_star,
        1.0 / SQRT5,
        CLOSED_FORM_TOLERANCE,
    )
    report.close(
        "Threshold beta* = sqrt(24/5)",
        beta_closed_form(c_star),
        np.sqrt(24.0 / 5.0),
        CLOSED_FORM_TOLERANCE,
    )

    _check_grid(report, config)
    _check_random_states(report, config)
    _check_regimes(report)
    _check_sampler(report, config)

    if report.failures:
        click.echo(f"{report.failures} check(s) failed")
        logger.warning(f"reproduce: {report.failures} check(s) failed")
        raise click.exceptions.Exit(1)
    click.echo("All checks passed")
