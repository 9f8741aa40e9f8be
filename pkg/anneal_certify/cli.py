"""
CLI commands for anneal-certify.
Spectrum, single anneals, certification, sweeps and the brute-force check
of the variance bound. Every table goes to stdout (or --output) as CSV.
"""

import sys

import click
import pandas as pd

from anneal_certify import __version__, create_app
from anneal_certify.models.anneal import MIN_STEPS, AnnealConfig, AnnealRun
from anneal_certify.models.pauli import VALID_AXES, AXIS_Z
from anneal_certify.models.schemas import (
    AnnealRunSchema,
    CertificationReportSchema,
    ErrorBarRowSchema,
    SweepCellSchema,
    Theorem1ReportSchema,
    ThresholdPointSchema,
)
from anneal_certify.models.spectrum import PreEstimate
from anneal_certify.models.sweep import SweepGrid
from anneal_certify.services.certify_service import certify, verify_theorem1
from anneal_certify.services.dynamics_service import default_driver, default_steps
from anneal_certify.services.experiment_service import (
    PREDICATE_APPLICABILITY,
    PREDICATE_IMPROVEMENT,
    ExperimentRunner,
    run_anneal,
)
from anneal_certify.services.measure_service import energy_moments, sample_moments
from anneal_certify.services.pauli_service import check_dimension, to_matrix
from anneal_certify.services.spectrum_service import (
    OFFSET_CENTERED,
    OFFSET_MODES,
    diagonalize,
    first_gap,
    synthesize_preestimate,
)
from anneal_certify.utils.decorators import reports_errors
from anneal_certify.utils.error_handlers import (
    EXIT_NOT_CERTIFIED,
    EXIT_OK,
    EXIT_USAGE,
    UsageError,
    format_error_line,
)
from anneal_certify.utils.file_io import (
    check_writable,
    load_config_file,
    normalize_key,
    read_hamiltonian,
    write_output,
)
from anneal_certify.utils.tables import emit_frame, emit_table

PROG_NAME = 'anneal-certify'


class FloatList(click.ParamType):
    """Comma-separated list of numbers, e.g. ``0,1e-3,1e-2``."""

    name = 'floats'

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return tuple(float(item) for item in value)
        try:
            return tuple(float(item) for item in str(value).split(',') if item.strip())
        except ValueError:
            self.fail(f'{value!r} is not a comma-separated list of numbers', param, ctx)


FLOATS = FloatList()


def ham_option(fn):
    return click.option(
        '--ham', 'ham_path', required=True, type=click.Path(dir_okay=False),
        help='Problem Hamiltonian file: "<coefficient> [<axis><index>]..." per line, optional "qubits <n>".',
    )(fn)


def output_option(fn):
    return click.option(
        '--output', 'output_path', type=click.Path(dir_okay=False), default=None,
        help='Write the CSV table to this file instead of stdout.',
    )(fn)


def steps_option(fn):
    return click.option(
        '--steps', type=click.IntRange(min=MIN_STEPS), default=None,
        help=(
            'RK4 steps per anneal. Default: smallest count with max ||H(t)|| dt <= '
            'MAX_PHASE_PER_STEP (closed) or OPEN_MAX_PHASE_PER_STEP (gamma > 0).'
        ),
    )(fn)


def axis_option(fn):
    return click.option(
        '--axis', 'lindblad_axis', type=click.Choice(VALID_AXES, case_sensitive=False), default=AXIS_Z,
        show_default=True, help='Pauli axis of the single-qubit Lindblad operators.',
    )(fn)


def offset_option(fn):
    return click.option(
        '--offset-mode', 'offset_mode', type=click.Choice(OFFSET_MODES), default=OFFSET_CENTERED,
        show_default=True,
        help='Synthetic pre-estimate placement: on the exact energies, or shifted to E0+m0 and E1-m1.',
    )(fn)


def grid_options(fn):
    fn = click.option(
        '--times', 'annealing_times', type=FLOATS, default=None,
        help='Annealing times in ns, ascending, comma-separated. Default: SWEEP_T_* config grid.',
    )(fn)
    return click.option(
        '--gammas', type=FLOATS, default=None,
        help='Dephasing rates in GHz, ascending, comma-separated (0 allowed). Default: SWEEP_GAMMA_* config grid.',
    )(fn)


def preestimate_options(fn):
    for name, text in (
        ('--e1', 'Pre-estimated E1 in GHz. Default: exact E1 placed by --offset-mode.'),
        ('--e0', 'Pre-estimated E0 in GHz. Default: exact E0 placed by --offset-mode.'),
    ):
        fn = click.option(name, type=float, default=None, help=text)(fn)
    fn = click.option('--m1', type=click.FloatRange(min=0), required=True,
                      help='Error bound dM1 of the E1 pre-estimate, GHz.')(fn)
    return click.option('--m0', type=click.FloatRange(min=0), required=True,
                        help='Error bound dM0 of the E0 pre-estimate, GHz.')(fn)


def _default_map(group, values):
    """Spread run-config file values over every subcommand that has the flag."""
    known = {'threads', 'config'}
    default_map = {}
    for name, command in group.commands.items():
        defaults = {}
        for param in command.params:
            for opt in getattr(param, 'opts', ()):
                key = normalize_key(opt)
                if key in values:
                    defaults[param.name] = values[key]
                    known.add(key)
        default_map[name] = defaults
    unknown = sorted(set(values) - known)
    if unknown:
        raise UsageError(f'Unknown config keys: {", ".join(unknown)}')
    return default_map


def _default_app():
    from config import get_config
    return create_app(get_config())


def _load(app, ham_path):
    hamiltonian = read_hamiltonian(ham_path)
    check_dimension(hamiltonian.num_qubits, app.config['MAX_QUBITS'])
    return hamiltonian


def _spectrum(app, hp):
    return diagonalize(to_matrix(hp, app.config['MAX_QUBITS']), app.config['DEGENERACY_TOL'])


def _anneal_config(app, hp, hd, annealing_time, gamma, steps, lindblad_axis):
    if steps is None:
        key = 'MAX_PHASE_PER_STEP' if gamma == 0 else 'OPEN_MAX_PHASE_PER_STEP'
        steps = default_steps(hp, hd, annealing_time, app.config[key], app.config['MIN_STEPS'])
    return AnnealConfig(annealing_time, gamma, steps, lindblad_axis)


def _preestimate(app, spectrum, m0, m1, e0, e1, offset_mode):
    if (e0 is None) != (e1 is None):
        raise UsageError('--e0 and --e1 must be given together')
    if e0 is None:
        return synthesize_preestimate(spectrum, m0, m1, offset_mode, app.config['DEGENERACY_TOL'])
    return PreEstimate(e0, e1, m0, m1)


def _runner(ctx, hp, spectrum, annealing_times, gammas, steps, lindblad_axis):
    """Experiment runner on the requested grid, filling gaps from the config defaults."""
    app = ctx.obj
    e0, e1 = first_gap(spectrum, app.config['DEGENERACY_TOL'])
    defaults = SweepGrid.default(e1 - e0, app.config)
    runner = ExperimentRunner(
        hp,
        default_driver(hp.num_qubits),
        annealing_times or defaults.annealing_times,
        steps=steps,
        threads=ctx.meta['threads'],
        max_phase=app.config['OPEN_MAX_PHASE_PER_STEP'],
        lindblad_axis=lindblad_axis,
        degeneracy_tol=app.config['DEGENERACY_TOL'],
        bisection_rtol=app.config['BISECTION_RTOL'],
    )
    return runner, gammas or defaults.gammas, defaults


@click.group(context_settings={'help_option_names': ['-h', '--help']})
@click.version_option(__version__, prog_name=PROG_NAME)
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='Run-config file of "key = value" lines (keys are flag names); flags on the command line win.')
@click.option('--threads', type=click.IntRange(min=1), default=None, envvar='ANNEAL_CERTIFY_THREADS',
              help='Cap on parallel sweep workers. Default: THREADS config (CPU count). Results do not depend on it.')
@click.pass_context
@reports_errors
def cli(ctx, config_path, threads):
    """Quantum-annealing ground-state energy simulator with variance-based error-bar certification."""
    if ctx.obj is None:
        ctx.obj = _default_app()
    app = ctx.obj

    if config_path:
        values = load_config_file(config_path)
        ctx.default_map = _default_map(ctx.command, values)
        if threads is None and 'threads' in values:
            threads = int(values['threads'])
    ctx.meta['threads'] = threads or app.config['THREADS']


@cli.command('spectrum')
@ham_option
@output_option
@click.pass_context
@reports_errors
def spectrum_command(ctx, ham_path, output_path):
    """
    Eigenvalues of the problem Hamiltonian, ascending.

    \b
    CSV columns: index,energy_ghz
    """
    app = ctx.obj
    check_writable(output_path)
    spectrum = _spectrum(app, _load(app, ham_path))
    frame = pd.DataFrame({'index': range(spectrum.dimension), 'energy_ghz': spectrum.eigenvalues})
    write_output(emit_frame(frame), output_path)


@cli.command('anneal')
@ham_option
@click.option('--T', 'annealing_time', type=click.FloatRange(min=0, min_open=True), required=True,
              help='Annealing time in ns.')
@click.option('--gamma', type=click.FloatRange(min=0), default=0.0, show_default=True,
              help='Dephasing rate in GHz; 0 runs the Schroedinger equation.')
@steps_option
@axis_option
@click.option('--shots', type=click.IntRange(min=1), default=None,
              help='Sample the moments with this many single shots per Pauli term instead of exact values.')
@click.option('--seed', type=int, default=0, show_default=True, help='Seed for --shots sampling.')
@output_option
@click.pass_context
@reports_errors
def anneal_command(ctx, ham_path, annealing_time, gamma, steps, lindblad_axis, shots, seed, output_path):
    """
    One anneal from |+...+> along H(t) = (t/T) H_P + (1 - t/T) H_D.

    \b
    CSV columns: T_ns,gamma_ghz,steps,mean_ghz,variance_ghz2,epsilon_squared,ground_population
    """
    app = ctx.obj
    check_writable(output_path)
    hp = _load(app, ham_path)
    hd = default_driver(hp.num_qubits)
    cfg = _anneal_config(app, hp, hd, annealing_time, gamma, steps, lindblad_axis)

    state, run = run_anneal(hp, hd, cfg, app.config['DEGENERACY_TOL'])
    if shots is not None:
        moments = sample_moments(state, hp, shots, seed)
        run = AnnealRun(cfg, moments.mean, moments.variance, run.epsilon_squared, run.populations)
    write_output(emit_table([run], AnnealRunSchema), output_path)


@cli.command('certify')
@ham_option
@click.option('--T', 'annealing_time', type=click.FloatRange(min=0, min_open=True), required=True,
              help='Annealing time in ns.')
@click.option('--gamma', type=click.FloatRange(min=0), default=0.0, show_default=True,
              help='Dephasing rate in GHz.')
@preestimate_options
@offset_option
@click.option('--shots', type=click.IntRange(min=1), default=None,
              help='Certify sampled moments (shots per Pauli term) instead of exact ones.')
@click.option('--seed', type=int, default=0, show_default=True, help='Seed for --shots sampling.')
@steps_option
@axis_option
@output_option
@click.pass_context
@reports_errors
def certify_command(ctx, ham_path, annealing_time, gamma, m0, m1, e0, e1, offset_mode, shots, seed,
                    steps, lindblad_axis, output_path):
    """
    Anneal, measure, and decide whether sqrt(variance) is a certified error bar.

    Exit 0 when certified, 3 when the energy is not below the threshold.
    A verdict line goes to stderr.

    \b
    CSV columns: measured_energy_ghz,measured_variance_ghz2,threshold_ghz,
                 variance_is_bound,error_bar_ghz,improves_preestimate,
                 preestimate_error_ghz,shots
    """
    app = ctx.obj
    check_writable(output_path)
    hp = _load(app, ham_path)
    hd = default_driver(hp.num_qubits)
    pre = _preestimate(app, _spectrum(app, hp), m0, m1, e0, e1, offset_mode)
    cfg = _anneal_config(app, hp, hd, annealing_time, gamma, steps, lindblad_axis)

    state, _ = run_anneal(hp, hd, cfg, app.config['DEGENERACY_TOL'])
    moments = sample_moments(state, hp, shots, seed) if shots is not None else energy_moments(state, hp)
    report = certify(moments, pre)

    write_output(emit_table([report], CertificationReportSchema), output_path)
    click.echo(report.verdict, err=True)
    if not report.variance_is_bound:
        ctx.exit(EXIT_NOT_CERTIFIED)


@cli.command('sweep-time')
@ham_option
@grid_options
@steps_option
@axis_option
@output_option
@click.pass_context
@reports_errors
def sweep_time_command(ctx, ham_path, gammas, annealing_times, steps, lindblad_axis, output_path):
    """
    Open-system anneal on every (gamma, T) cell; marks the energy-minimizing T per gamma.

    \b
    CSV columns: gamma_ghz,T_ns,mean_ghz,variance_ghz2,epsilon_squared,optimal
    """
    app = ctx.obj
    check_writable(output_path)
    hp = _load(app, ham_path)
    runner, gammas, _ = _runner(ctx, hp, _spectrum(app, hp), annealing_times, gammas, steps, lindblad_axis)
    write_output(emit_table(runner.time_sweep(gammas), SweepCellSchema), output_path)


@cli.command('threshold-map')
@ham_option
@click.option('--kind', type=click.Choice((PREDICATE_APPLICABILITY, PREDICATE_IMPROVEMENT)),
              default=PREDICATE_APPLICABILITY, show_default=True,
              help='applicability: variance is a certified error bar; improvement: and it beats dM0.')
@grid_options
@click.option('--halfwidths', type=FLOATS, default=None,
              help='Pre-estimate halfwidths (dM0 + dM1)/2 in GHz, ascending. Default: HALFWIDTH_* config grid.')
@offset_option
@steps_option
@axis_option
@output_option
@click.pass_context
@reports_errors
def threshold_map_command(ctx, ham_path, kind, gammas, annealing_times, halfwidths, offset_mode, steps,
                          lindblad_axis, output_path):
    """
    Largest dephasing rate that still passes the chosen predicate, per halfwidth.

    \b
    CSV columns: halfwidth_ghz,gamma_threshold_ghz,status
    status: ok | always_fails | not_bracketed
    not_bracketed rows leave the threshold empty when no grid rate passes,
    and report the largest grid gamma when every grid rate passes.
    """
    app = ctx.obj
    check_writable(output_path)
    hp = _load(app, ham_path)
    runner, gammas, defaults = _runner(ctx, hp, _spectrum(app, hp), annealing_times, gammas, steps, lindblad_axis)
    points = runner.threshold_map(kind, gammas, halfwidths or defaults.preestimate_halfwidths, offset_mode)
    write_output(emit_table(points, ThresholdPointSchema), output_path)


@cli.command('errorbar-table')
@ham_option
@grid_options
@preestimate_options
@offset_option
@steps_option
@axis_option
@output_option
@click.pass_context
@reports_errors
def errorbar_table_command(ctx, ham_path, gammas, annealing_times, m0, m1, e0, e1, offset_mode, steps,
                           lindblad_axis, output_path):
    """
    Optimal-T energy, sqrt(variance) and certification verdict per gamma, with exact E0.

    \b
    CSV columns: gamma_ghz,T_ns_opt,mean_ghz,error_bar_ghz,certified,e0_exact_ghz
    """
    app = ctx.obj
    check_writable(output_path)
    hp = _load(app, ham_path)
    spectrum = _spectrum(app, hp)
    pre = _preestimate(app, spectrum, m0, m1, e0, e1, offset_mode)
    runner, gammas, _ = _runner(ctx, hp, spectrum, annealing_times, gammas, steps, lindblad_axis)
    write_output(emit_table(runner.errorbar_table(gammas, pre), ErrorBarRowSchema), output_path)


@cli.command('verify-theorem1')
@click.option('--trials', type=click.IntRange(min=1), default=100000, show_default=True,
              help='Random (spectrum, population) instances with eps^2 <= 1/2.')
@click.option('--seed', type=int, default=42, show_default=True, help='Seed of the PCG64 generator.')
@output_option
@click.pass_context
@reports_errors
def verify_theorem1_command(ctx, trials, seed, output_path):
    """
    Brute-force check that Var(H) >= (<H> - E0)^2 whenever eps^2 <= 1/2.

    Also reports the two-level equality case and the eps^2 = 0.9 counterexample.
    Exit 2 if any margin falls below -1e-12.

    \b
    CSV columns: trials,seed,min_margin,worst_dimension,worst_epsilon_squared,
                 equality_margin,counterexample_variance,counterexample_error_squared
    """
    check_writable(output_path)
    write_output(emit_table([verify_theorem1(trials, seed)], Theorem1ReportSchema), output_path)


def run(argv=None, app=None) -> int:
    """
    Run one CLI invocation and return its exit code.

    Args:
        argv (list): Arguments without the program name (default: sys.argv[1:])
        app (AnnealApp): Runtime context; built from ``config.get_config()`` when omitted

    Returns:
        int: 0 ok, 1 usage error, 2 computation error, 3 not certified
    """
    if app is None:
        app = _default_app()
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = cli.main(args=args, prog_name=PROG_NAME, standalone_mode=False, obj=app)
    except click.UsageError as e:
        click.echo(format_error_line(UsageError(e.format_message())), err=True)
        if e.ctx is not None:
            click.echo(e.ctx.get_usage(), err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        click.echo(format_error_line(UsageError(e.format_message())), err=True)
        return EXIT_USAGE
    except click.Abort:
        click.echo(format_error_line(UsageError('aborted')), err=True)
        return EXIT_USAGE
    return result if isinstance(result, int) else EXIT_OK
