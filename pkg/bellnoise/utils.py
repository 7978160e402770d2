import io
import sys

import numpy as np
import pandas as pd
import xarray as xr

from .errors import ParseError, DomainError
from .processes import ProcessSpec, ProcessKind
from .states import BellMixture, BlochDiagonal, NAMED_STATES, a_to_c
from .typing import Dict, Optional, Sequence, Union

CSV_FLOAT_FORMAT = '%.15g'

_PROCESS_KEYS = {
    ProcessKind.OU: ('gamma',),
    ProcessKind.FGN: ('h',),
    ProcessKind.WIENER: (),
    ProcessKind.WHITE: ()
}


def _parse_float(token: str, context: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f'Cannot parse {token!r} as a number in {context!r}') from None


def parse_process(literal: str) -> ProcessSpec:
    """Parse the :code:`name[:key=value,...]` grammar, e.g. :code:`ou:gamma=1`, :code:`fgn:h=0.9`, :code:`wiener`,
    :code:`white`

    Args:
        literal: The process literal

    Returns:
        The process

    """
    name, _, rest = literal.strip().partition(':')
    try:
        kind = ProcessKind(name.lower())
    except ValueError:
        raise ParseError(f'Unknown process {name!r} in {literal!r}, expected one of '
                         f'{[k.value for k in ProcessKind]}') from None
    params: Dict[str, float] = {}
    for item in filter(None, rest.split(',')):
        key, sep, value = item.partition('=')
        key = key.strip().lower()
        if not sep or key not in _PROCESS_KEYS[kind]:
            raise ParseError(f'Unexpected parameter {item!r} for process {kind.value!r} in {literal!r}')
        params[key] = _parse_float(value, literal)
    missing = [key for key in _PROCESS_KEYS[kind] if key not in params]
    if missing:
        raise ParseError(f'Missing parameter {missing[0]!r} for process {kind.value!r} in {literal!r}')
    try:
        if kind == ProcessKind.OU:
            return ProcessSpec.ou(params['gamma'])
        if kind == ProcessKind.FGN:
            return ProcessSpec.fgn(params['h'])
        return ProcessSpec(kind)
    except DomainError as e:
        raise ParseError(f'{e} in {literal!r}') from None


def parse_state(literal: str) -> BellMixture:
    """Parse a named state (:code:`phi+`, :code:`phi-`, :code:`psi+`, :code:`psi-`, :code:`mixed`), Bell weights
    :code:`c=c1,c2,c3,c4` or Bloch coefficients :code:`a=a1,a2,a3`

    Args:
        literal: The state literal

    Returns:
        The Bell mixture

    """
    literal = literal.strip()
    if literal.lower() in NAMED_STATES:
        return NAMED_STATES[literal.lower()]
    key, sep, values = literal.partition('=')
    key = key.strip().lower()
    if not sep or key not in ('c', 'a'):
        raise ParseError(f'Unknown state {literal!r}, expected one of {list(NAMED_STATES)}, c=... or a=...')
    numbers = [_parse_float(v, literal) for v in values.split(',')]
    expected = 4 if key == 'c' else 3
    if not len(numbers) == expected:
        raise ParseError(f'Expected {expected} values in {literal!r} but got {len(numbers)}')
    try:
        return BellMixture(*numbers) if key == 'c' else a_to_c(BlochDiagonal(*numbers))
    except DomainError as e:
        raise ParseError(f'{e} in {literal!r}') from None


def parse_floats(literal: str) -> np.ndarray:
    return np.array([_parse_float(v, literal) for v in literal.split(',') if v.strip()])


def to_frame(table: Union[xr.Dataset, pd.DataFrame], columns: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Flatten a result dataset into a frame whose columns are the coordinate followed by the variables"""
    frame = table.to_dataframe() if isinstance(table, xr.Dataset) else table
    frame = frame.reset_index() if isinstance(table, xr.Dataset) else frame
    return frame if columns is None else frame[list(columns)]


def format_csv(table: Union[xr.Dataset, pd.DataFrame], columns: Optional[Sequence[str]] = None) -> str:
    """CSV text with a header row, 15 significant digits and LF line endings"""
    buffer = io.StringIO()
    to_frame(table, columns).to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    return buffer.getvalue()


def write_csv(table: Union[xr.Dataset, pd.DataFrame], path: Optional[str] = None,
              columns: Optional[Sequence[str]] = None) -> str:
    """Write CSV to :code:`path` (stdout if :code:`None`) and return the text"""
    text = format_csv(table, columns)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, 'w', newline='') as f:
            f.write(text)
    return text


def format_process(spec: ProcessSpec) -> str:
    """Inverse of :code:`parse_process`"""
    return spec.label
