"""
Marshmallow schemas for the CSV result tables.
Each schema names the columns of one table, in order, and rebuilds the
matching model on load.
"""

from marshmallow import EXCLUDE, Schema, fields, post_load, validate

from anneal_certify.models.anneal import AnnealConfig, AnnealRun
from anneal_certify.models.certification import CertificationReport, Theorem1Report
from anneal_certify.models.sweep import (
    VALID_STATUSES,
    ErrorBarRow,
    SweepCell,
    ThresholdPoint,
)


class TableSchema(Schema):
    """Base for row schemas; ``COLUMNS`` fixes the CSV header order."""

    COLUMNS = ()

    class Meta:
        unknown = EXCLUDE
        ordered = True


class SweepCellSchema(TableSchema):
    COLUMNS = ('gamma_ghz', 'T_ns', 'mean_ghz', 'variance_ghz2', 'epsilon_squared', 'optimal')

    gamma_ghz = fields.Float(required=True, attribute='gamma')
    T_ns = fields.Float(required=True, attribute='T')
    mean_ghz = fields.Float(required=True, attribute='mean')
    variance_ghz2 = fields.Float(required=True, attribute='variance')
    epsilon_squared = fields.Float(required=True)
    optimal = fields.Boolean(required=True)

    @post_load
    def make_cell(self, data, **kwargs):
        return SweepCell(**data)


class ThresholdPointSchema(TableSchema):
    COLUMNS = ('halfwidth_ghz', 'gamma_threshold_ghz', 'status')

    halfwidth_ghz = fields.Float(required=True, attribute='halfwidth')
    gamma_threshold_ghz = fields.Float(required=True, allow_none=True, attribute='gamma_threshold')
    status = fields.String(required=True, validate=validate.OneOf(VALID_STATUSES))

    @post_load
    def make_point(self, data, **kwargs):
        return ThresholdPoint(**data)


class ErrorBarRowSchema(TableSchema):
    COLUMNS = ('gamma_ghz', 'T_ns_opt', 'mean_ghz', 'error_bar_ghz', 'certified', 'e0_exact_ghz')

    gamma_ghz = fields.Float(required=True, attribute='gamma')
    T_ns_opt = fields.Float(required=True, attribute='T_opt')
    mean_ghz = fields.Float(required=True, attribute='mean')
    error_bar_ghz = fields.Float(required=True, attribute='error_bar')
    certified = fields.Boolean(required=True)
    e0_exact_ghz = fields.Float(required=True, attribute='e0_exact')

    @post_load
    def make_row(self, data, **kwargs):
        return ErrorBarRow(**data)


class CertificationReportSchema(TableSchema):
    COLUMNS = (
        'measured_energy_ghz', 'measured_variance_ghz2', 'threshold_ghz', 'variance_is_bound',
        'error_bar_ghz', 'improves_preestimate', 'preestimate_error_ghz', 'shots',
    )

    measured_energy_ghz = fields.Float(required=True, attribute='measured_energy')
    measured_variance_ghz2 = fields.Float(required=True, attribute='measured_variance')
    threshold_ghz = fields.Float(required=True, attribute='threshold')
    variance_is_bound = fields.Boolean(required=True)
    error_bar_ghz = fields.Float(required=True, attribute='error_bar')
    improves_preestimate = fields.Boolean(required=True)
    preestimate_error_ghz = fields.Float(required=True, attribute='preestimate_error')
    shots = fields.Integer(allow_none=True, load_default=None)

    @post_load
    def make_report(self, data, **kwargs):
        return CertificationReport(**data)


class AnnealRunSchema(TableSchema):
    """One anneal; the Lindblad axis is not part of the row and loads as Z."""

    COLUMNS = (
        'T_ns', 'gamma_ghz', 'steps', 'mean_ghz', 'variance_ghz2', 'epsilon_squared', 'ground_population',
    )

    T_ns = fields.Float(required=True, attribute='config.annealing_time')
    gamma_ghz = fields.Float(required=True, attribute='config.gamma')
    steps = fields.Integer(required=True, attribute='config.steps')
    mean_ghz = fields.Float(required=True, attribute='mean')
    variance_ghz2 = fields.Float(required=True, attribute='variance')
    epsilon_squared = fields.Float(allow_none=True, load_default=None)
    ground_population = fields.Float(dump_only=True, allow_none=True)

    @post_load
    def make_run(self, data, **kwargs):
        config = AnnealConfig(**data.pop('config'))
        return AnnealRun(config=config, **data)


class Theorem1ReportSchema(TableSchema):
    COLUMNS = (
        'trials', 'seed', 'min_margin', 'worst_dimension', 'worst_epsilon_squared',
        'equality_margin', 'counterexample_variance', 'counterexample_error_squared',
    )

    trials = fields.Integer(required=True)
    seed = fields.Integer(required=True)
    min_margin = fields.Float(required=True)
    worst_dimension = fields.Integer(required=True)
    worst_epsilon_squared = fields.Float(required=True)
    equality_margin = fields.Float(required=True)
    counterexample_variance = fields.Float(required=True)
    counterexample_error_squared = fields.Float(required=True)

    @post_load
    def make_report(self, data, **kwargs):
        return Theorem1Report(**data)
