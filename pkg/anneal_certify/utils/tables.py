"""
CSV tables for anneal-certify.
Rows go through a marshmallow schema on the way out and on the way back in;
pandas does the CSV text.
"""

import io
from typing import Iterable, List, Type

import pandas as pd
from marshmallow import ValidationError, fields

from anneal_certify.models.schemas import TableSchema
from anneal_certify.utils.error_handlers import UsageError

FLOAT_FORMAT = '%.17g'
TRUE_TEXT = 'true'
FALSE_TEXT = 'false'


def _boolean_columns(schema: TableSchema) -> List[str]:
    return [name for name, field in schema.fields.items() if isinstance(field, fields.Boolean)]


def emit_frame(frame: pd.DataFrame) -> str:
    """Header row, no index, 17 significant digits, empty field for missing values."""
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n', na_rep='')


def emit_table(rows: Iterable, schema_class: Type[TableSchema]) -> str:
    """
    Render model rows as CSV text in the column order of ``schema_class``.

    Args:
        rows (Iterable): Model instances (SweepCell, ThresholdPoint, ...)
        schema_class (type): TableSchema subclass naming the columns

    Returns:
        str: CSV text ending with a newline
    """
    schema = schema_class(many=True)
    records = schema.dump(list(rows))
    frame = pd.DataFrame.from_records(records, columns=list(schema_class.COLUMNS))
    for column in _boolean_columns(schema):
        frame[column] = frame[column].map({True: TRUE_TEXT, False: FALSE_TEXT})
    return emit_frame(frame)


def parse_table(text: str, schema_class: Type[TableSchema]) -> list:
    """
    Parse CSV text written by ``emit_table`` back into model rows.

    Raises:
        UsageError: Header does not match the schema, or a row fails validation
    """
    frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    columns = tuple(frame.columns)
    if columns != tuple(schema_class.COLUMNS):
        raise UsageError(f'Unexpected CSV header {",".join(columns)}; expected {",".join(schema_class.COLUMNS)}')

    records = [
        {key: (value if value != '' else None) for key, value in record.items()}
        for record in frame.to_dict(orient='records')
    ]
    try:
        return schema_class(many=True).load(records)
    except ValidationError as e:
        raise UsageError(f'Invalid CSV rows: {e.messages}')
