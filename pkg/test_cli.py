"""
Tests for the anneal-certify command line: exit codes, the error line
format, CSV output and run-config files.
"""

import pytest

from anneal_certify.cli import cli, run
from anneal_certify.models.schemas import Theorem1ReportSchema
from anneal_certify.utils.tables import parse_table

SUBCOMMANDS = ('spectrum', 'anneal', 'certify', 'sweep-time', 'threshold-map', 'errorbar-table', 'verify-theorem1')


def invoke(app, capsys, *argv):
    code = run(list(argv), app)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_spectrum_lists_all_energies(app, capsys, h2_path, golden):
    """Test 1: spectrum prints 16 rows in ascending order"""
    code, out, err = invoke(app, capsys, 'spectrum', '--ham', h2_path)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == 'index,energy_ghz'
    assert len(lines) == 17
    energies = [float(line.split(',')[1]) for line in lines[1:]]
    assert energies == sorted(energies)
    assert energies[0] == pytest.approx(golden['e0'], abs=1e-12)


def test_missing_ham_is_usage_error(app, capsys):
    """Test 2: a missing required flag prints the error line and usage"""
    code, out, err = invoke(app, capsys, 'spectrum')
    assert code == 1
    assert err.startswith('error: 1: ')
    assert '--ham' in err
    assert 'Usage:' in err
    assert out == ''


def test_unknown_subcommand(app, capsys):
    code, _, err = invoke(app, capsys, 'plot')
    assert code == 1
    assert 'error: 1: ' in err


def test_unreadable_ham_file(app, capsys, tmp_path):
    code, _, err = invoke(app, capsys, 'spectrum', '--ham', str(tmp_path / 'missing.ham'))
    assert code == 1
    assert err.startswith('error: 1: Cannot read')


def test_malformed_ham_reports_line(app, capsys, tmp_path):
    path = tmp_path / 'bad.ham'
    path.write_text('qubits 1\n-1.0 Q0\n', encoding='utf-8')
    code, _, err = invoke(app, capsys, 'spectrum', '--ham', str(path))
    assert code == 1
    assert 'line 2' in err


def test_verify_theorem1(app, capsys):
    code, out, _ = invoke(app, capsys, 'verify-theorem1', '--trials', '100000', '--seed', '42')
    assert code == 0
    report = parse_table(out, Theorem1ReportSchema)[0]
    assert report.trials == 100000
    assert report.min_margin >= -1e-12
    assert report.counterexample_violates


def test_certify_passes_on_toy(app, capsys, toy_path):
    code, out, err = invoke(app, capsys, 'certify', '--ham', toy_path, '--T', '40', '--m0', '0.01', '--m1', '0.01')
    assert code == 0
    header, row = out.splitlines()
    assert header.startswith('measured_energy_ghz,measured_variance_ghz2,threshold_ghz,variance_is_bound')
    assert row.split(',')[3] == 'true'
    assert err.startswith('certified')


def test_certify_field_pair_quickstart(app, capsys, field_pair_path):
    code, out, err = invoke(app, capsys, 'certify', '--ham', field_pair_path, '--T', '100',
                            '--m0', '1e-3', '--m1', '1e-3')
    assert code == 0
    assert out.splitlines()[1].split(',')[3] == 'true'
    assert err.startswith('certified')


def test_certify_failure_exit_code(app, capsys, h2_path):
    """Test: a pre-estimate wider than half the gap can never certify"""
    code, out, err = invoke(app, capsys, 'certify', '--ham', h2_path, '--T', '1', '--m0', '0.1', '--m1', '0.1')
    assert code == 3
    assert out.splitlines()[1].split(',')[3] == 'false'
    assert err.startswith('not certified')


def test_certify_needs_both_estimates(app, capsys, toy_path):
    code, _, err = invoke(app, capsys, 'certify', '--ham', toy_path, '--T', '5', '--m0', '0.1', '--m1', '0.1',
                          '--e0', '-1.0')
    assert code == 1
    assert '--e0 and --e1' in err


def test_certify_with_explicit_estimates(app, capsys, toy_path):
    code, out, _ = invoke(app, capsys, 'certify', '--ham', toy_path, '--T', '40', '--m0', '0.05', '--m1', '0.05',
                          '--e0', '-0.98', '--e1', '1.02')
    assert code == 0
    assert float(out.splitlines()[1].split(',')[2]) == pytest.approx(-0.03)


def test_anneal_shots_are_reproducible(app, capsys, toy_path):
    args = ('anneal', '--ham', toy_path, '--T', '10', '--gamma', '0.01', '--shots', '200', '--seed', '5')
    first = invoke(app, capsys, *args)
    second = invoke(app, capsys, *args)
    assert first[0] == 0
    assert first[1] == second[1]
    assert first[1].splitlines()[0] == 'T_ns,gamma_ghz,steps,mean_ghz,variance_ghz2,epsilon_squared,ground_population'


def test_output_file(app, capsys, toy_path, tmp_path):
    target = tmp_path / 'spectrum.csv'
    code, out, _ = invoke(app, capsys, 'spectrum', '--ham', toy_path, '--output', str(target))
    assert code == 0
    assert out == ''
    assert target.read_text(encoding='utf-8') == 'index,energy_ghz\n0,-1\n1,1\n'


def test_output_directory_checked_before_compute(app, capsys, toy_path, tmp_path):
    code, _, err = invoke(app, capsys, 'spectrum', '--ham', toy_path, '--output', str(tmp_path / 'no' / 'x.csv'))
    assert code == 1
    assert 'Cannot write' in err


def test_config_file_supplies_flags(app, capsys, toy_path, tmp_path):
    config = tmp_path / 'run.cfg'
    config.write_text('# certify run\nT = 40\nm0 = 0.01\nm1 = 0.01\noffset-mode = centered\n', encoding='utf-8')
    code, out, _ = invoke(app, capsys, '--config', str(config), 'certify', '--ham', toy_path)
    assert code == 0
    assert out.splitlines()[1].split(',')[3] == 'true'


def test_command_line_overrides_config(app, capsys, toy_path, tmp_path):
    config = tmp_path / 'run.cfg'
    config.write_text('T = 40\nm0 = 0.01\nm1 = 0.01\n', encoding='utf-8')
    code, _, _ = invoke(app, capsys, '--config', str(config), 'certify', '--ham', toy_path, '--m0', '2', '--m1', '2')
    assert code == 3


def test_config_file_unknown_key(app, capsys, toy_path, tmp_path):
    config = tmp_path / 'run.cfg'
    config.write_text('bogus = 1\n', encoding='utf-8')
    code, _, err = invoke(app, capsys, '--config', str(config), 'spectrum', '--ham', toy_path)
    assert code == 1
    assert 'Unknown config keys: bogus' in err


def test_sweep_time_table(app, capsys, toy_path):
    code, out, _ = invoke(app, capsys, 'sweep-time', '--ham', toy_path, '--times', '2,10', '--gammas', '0,0.1')
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == 'gamma_ghz,T_ns,mean_ghz,variance_ghz2,epsilon_squared,optimal'
    assert len(lines) == 5
    assert sum(line.endswith(',true') for line in lines[1:]) == 2


def test_sweep_time_independent_of_threads(app, capsys, toy_path, monkeypatch):
    args = ('sweep-time', '--ham', toy_path, '--times', '2,10', '--gammas', '0,0.1')
    serial = invoke(app, capsys, '--threads', '1', *args)[1]
    monkeypatch.setenv('ANNEAL_CERTIFY_THREADS', '2')
    parallel = invoke(app, capsys, *args)[1]
    assert serial == parallel


def test_unsorted_grid_is_usage_error(app, capsys, toy_path):
    code, _, err = invoke(app, capsys, 'sweep-time', '--ham', toy_path, '--times', '10,2', '--gammas', '0')
    assert code == 1
    assert 'ascending' in err


def test_threshold_map_table(app, capsys, toy_path):
    code, out, _ = invoke(app, capsys, 'threshold-map', '--ham', toy_path, '--times', '2,10,40',
                          '--gammas', '0,10', '--halfwidths', '0.25,1.5')
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == 'halfwidth_ghz,gamma_threshold_ghz,status'
    assert lines[2] == '1.5,,always_fails'


def test_threshold_map_all_pass_reports_largest_gamma(app, capsys, toy_path):
    code, out, _ = invoke(app, capsys, 'threshold-map', '--ham', toy_path, '--times', '2,10,40',
                          '--gammas', '0,0.01', '--halfwidths', '0.25')
    assert code == 0
    halfwidth, gamma_threshold, status = out.splitlines()[1].split(',')
    assert status == 'not_bracketed'
    assert float(gamma_threshold) == pytest.approx(0.01)


def test_threshold_map_help_documents_not_bracketed_forms(app, capsys):
    code, out, _ = invoke(app, capsys, 'threshold-map', '--help')
    assert code == 0
    assert 'empty when no grid rate passes' in out
    assert 'largest grid gamma when every grid rate passes' in out


def test_errorbar_table(app, capsys, toy_path):
    code, out, _ = invoke(app, capsys, 'errorbar-table', '--ham', toy_path, '--times', '2,10,40',
                          '--gammas', '0,1', '--m0', '0.1', '--m1', '0.1')
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == 'gamma_ghz,T_ns_opt,mean_ghz,error_bar_ghz,certified,e0_exact_ghz'
    assert lines[1].startswith('0,40,')
    assert lines[1].split(',')[4] == 'true'


@pytest.mark.parametrize('subcommand', SUBCOMMANDS)
def test_help_documents_flags_and_columns(app, capsys, subcommand):
    code, out, _ = invoke(app, capsys, subcommand, '--help')
    assert code == 0
    assert 'CSV columns:' in out
    command = cli.commands[subcommand]
    for param in command.params:
        for opt in param.opts:
            if opt.startswith('--'):
                assert opt in out


def test_version(app, capsys):
    code, out, _ = invoke(app, capsys, '--version')
    assert code == 0
    assert 'anneal-certify' in out
