import csv
import json
import math

from .. import CSV_DIGITS, IncresException


def format_float(value, digits=CSV_DIGITS):
    '''Shortest-stable text for a float: always `digits` significant digits.'''
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        raise IncresException('refusing to serialize non-finite value {}'.format(value))
    if value == 0.0:
        # keeps -0.0 and 0.0 byte-identical
        value = 0.0
    return '{:.{}g}'.format(value, digits)


def format_cell(value):
    if isinstance(value, str):
        return value
    return format_float(value)


def write_csv(stream, columns, rows):
    '''Writes a header and one line per row; rows are sequences ordered as columns.'''
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise IncresException('row has {} cells for {} columns'.format(len(row), len(columns)))
        writer.writerow([format_cell(cell) for cell in row])


def columns_to_json(columns, rows):
    '''The JSON mirror of a CSV table: each column becomes an array.'''
    table = {name: [] for name in columns}
    for row in rows:
        for name, cell in zip(columns, row):
            if isinstance(cell, str):
                table[name].append(cell)
            elif isinstance(cell, int) and not isinstance(cell, bool):
                table[name].append(cell)
            else:
                # round-trips through the same 17 digits as the csv output
                table[name].append(float(format_float(cell)))
    return table


def write_json(stream, columns, rows):
    json.dump(columns_to_json(columns, rows), stream, indent=1)
    stream.write('\n')


def write_table(stream, columns, rows, format='csv'):
    if format == 'csv':
        write_csv(stream, columns, rows)
    elif format == 'json':
        write_json(stream, columns, rows)
    else:
        raise IncresException('unknown output format {!r}'.format(format))
