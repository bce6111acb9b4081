"""
Reader for MATPOWER case files (version 2), the format PGLib distributes its cases in.

Only the subset of MATLAB syntax used by case files is understood: scalar and matrix
assignments to mpc.* fields, cell arrays (skipped), % comments and a function header.
"""
import re
from dataclasses import dataclass
from logging import getLogger
from typing import Dict, List, Tuple

import numpy as np

from vvo_manager.caseio import idx
from vvo_manager.exceptions import CaseFormatError, CaseSyntaxError, MissingTableError, UnsupportedCostModelError
from vvo_manager.utils.files import read_file_content

logger = getLogger(__name__)

TABLES = {"bus": idx.BUS_COLUMNS, "gen": idx.GEN_COLUMNS, "branch": idx.BRANCH_COLUMNS, "gencost": idx.COST}
MANDATORY = ("baseMVA",) + tuple(TABLES)

_ASSIGNMENT = re.compile(r"^mpc\.(?P<name>\w+)\s*=\s*(?P<value>.*)$")
_FUNCTION = re.compile(r"^function\b")
_CELL_SPLIT = re.compile(r"[\s,]+")


@dataclass(frozen=True, eq=False)
class RawCase:
    """Numeric tables of a case as they appear in the file, MATPOWER column layout (see idx)"""

    base_mva: float
    bus: np.ndarray
    gen: np.ndarray
    branch: np.ndarray
    gencost: np.ndarray
    warnings: Tuple[str, ...] = ()


def _strip_comment(line: str) -> str:
    """Drop everything after a % that is not inside a quoted string"""
    quoted = False
    for position, char in enumerate(line):
        if char == "'":
            quoted = not quoted
        elif char == "%" and not quoted:
            return line[:position]
    return line


def _collect_block(lines: List[str], start: int, first: str, closing: str, name: str) -> Tuple[List[Tuple[int, str]], int]:
    """
    Gather the body of a bracketed block
    :param lines: all lines of the file
    :param start: 0-based index of the line holding the opening bracket
    :param first: text after the opening bracket on that line
    :param closing: the closing bracket
    :param name: field name, for error messages
    :return: tuple: ([(lineno, text)], index of the line after the block)
    """
    body = []
    text, index = first, start
    while True:
        lineno = index + 1
        if closing in text:
            inner, rest = text.split(closing, 1)
            body.append((lineno, inner))
            if rest.strip() not in ("", ";"):
                raise CaseSyntaxError("unexpected '{}' after mpc.{}".format(rest.strip(), name), lineno)
            return body, index + 1
        body.append((lineno, text))
        index += 1
        if index >= len(lines):
            raise CaseSyntaxError("unterminated matrix mpc.{}".format(name), start + 1)
        text = _strip_comment(lines[index])


def _parse_matrix(body: List[Tuple[int, str]], name: str) -> np.ndarray:
    rows: List[List[float]] = []
    row_lines: List[int] = []
    for lineno, text in body:
        for segment in text.split(";"):
            segment = segment.strip().rstrip(",")
            if not segment:
                continue
            row = []
            for cell in _CELL_SPLIT.split(segment):
                try:
                    row.append(float(cell))
                except ValueError as e:
                    raise CaseSyntaxError("non-numeric cell '{}' in mpc.{}".format(cell, name), lineno) from e
            rows.append(row)
            row_lines.append(lineno)
    if not rows:
        return np.zeros((0, TABLES.get(name, 0)))
    width = len(rows[0])
    for row, lineno in zip(rows, row_lines):
        if len(row) != width:
            raise CaseSyntaxError("row of mpc.{} has {} columns, expected {}".format(name, len(row), width), lineno)
    return np.array(rows, dtype=float)


def _parse_scalar(text: str, name: str, lineno: int) -> str:
    value = text.strip().rstrip(";").strip()
    if not value:
        raise CaseSyntaxError("missing value for mpc.{}".format(name), lineno)
    return value


def _check_cost_models(gencost: np.ndarray):
    for row_index, row in enumerate(gencost):
        if row[idx.MODEL] == idx.PW_LINEAR:
            raise UnsupportedCostModelError("gencost row {} uses the piecewise linear cost model".format(row_index + 1))
        if row[idx.MODEL] != idx.POLYNOMIAL:
            raise UnsupportedCostModelError("gencost row {} has unknown cost model {}".format(row_index + 1, row[idx.MODEL]))
        n_coefficients = int(row[idx.NCOST])
        if idx.COST + n_coefficients > len(row):
            raise CaseFormatError("gencost row {} declares {} coefficients but has fewer".format(row_index + 1, n_coefficients))


def _check_references(base_mva: float, bus: np.ndarray, gen: np.ndarray, branch: np.ndarray, gencost: np.ndarray) -> List[str]:
    warnings = []
    if base_mva <= 0:
        raise CaseFormatError("baseMVA must be positive")
    for name, table in (("bus", bus), ("gen", gen), ("branch", branch)):
        if table.shape[1] < TABLES[name]:
            raise CaseFormatError("mpc.{} needs at least {} columns, found {}".format(name, TABLES[name], table.shape[1]))
    numbers = set(bus[:, idx.BUS_I].astype(int).tolist())
    if len(numbers) != len(bus):
        raise CaseFormatError("bus numbers in mpc.bus are not unique")
    for row_index, number in enumerate(gen[:, idx.GEN_BUS].astype(int)):
        if number not in numbers:
            raise CaseFormatError("generator {} refers to unknown bus {}".format(row_index + 1, number))
    for row_index, (f, t) in enumerate(branch[:, [idx.F_BUS, idx.T_BUS]].astype(int)):
        if f not in numbers or t not in numbers:
            raise CaseFormatError("branch {} refers to unknown bus {} or {}".format(row_index + 1, f, t))
    if len(gencost) == 2 * len(gen) and len(gen) > 0:
        warnings.append("mpc.gencost holds reactive power costs, only the active power costs are used")
    elif len(gencost) != len(gen):
        raise CaseFormatError("mpc.gencost has {} rows but mpc.gen has {}".format(len(gencost), len(gen)))
    return warnings


def parse_matpower(text: str) -> RawCase:
    """
    Parse the text of a MATPOWER case
    :param str text: Contents of a .m case file
    :return: RawCase: the numeric tables, read exactly
    :raises CaseParseError: on syntax errors, missing tables or unsupported cost models
    """
    lines = text.splitlines()
    tables: Dict[str, np.ndarray] = {}
    scalars: Dict[str, str] = {}
    warnings: List[str] = []

    index = 0
    while index < len(lines):
        lineno = index + 1
        line = _strip_comment(lines[index]).strip()
        if not line or _FUNCTION.match(line):
            index += 1
            continue
        match = _ASSIGNMENT.match(line)
        if not match:
            raise CaseSyntaxError("unexpected statement '{}'".format(line), lineno)
        name, value = match.group("name"), match.group("value").strip()
        if value.startswith("["):
            body, index = _collect_block(lines, index, value[1:], "]", name)
            if name in TABLES:
                tables[name] = _parse_matrix(body, name)
            else:
                warnings.append("ignored field mpc.{} (line {})".format(name, lineno))
        elif value.startswith("{"):
            _, index = _collect_block(lines, index, value[1:], "}", name)
            warnings.append("ignored field mpc.{} (line {})".format(name, lineno))
        else:
            scalars[name] = _parse_scalar(value, name, lineno)
            index += 1
            if name not in ("baseMVA", "version"):
                warnings.append("ignored field mpc.{} (line {})".format(name, lineno))

    for name in MANDATORY:
        if name not in tables and name not in scalars:
            raise MissingTableError("missing mandatory field mpc.{}".format(name))
    version = scalars.get("version", "'2'").strip("'\"")
    if version != "2":
        warnings.append("case format version {} is not 2, reading it as version 2".format(version))
    try:
        base_mva = float(scalars["baseMVA"])
    except ValueError as e:
        raise CaseSyntaxError("mpc.baseMVA is not a number") from e

    _check_cost_models(tables["gencost"])
    warnings.extend(_check_references(base_mva, tables["bus"], tables["gen"], tables["branch"], tables["gencost"]))
    for warning in warnings:
        logger.warning(warning)
    return RawCase(
        base_mva=base_mva,
        bus=tables["bus"],
        gen=tables["gen"],
        branch=tables["branch"],
        gencost=tables["gencost"][: len(tables["gen"])],
        warnings=tuple(warnings),
    )


def load_case(path: str) -> RawCase:
    """
    :param str path: Path to a MATPOWER .m file
    :return: RawCase
    """
    logger.info("Loading case {}".format(path))
    return parse_matpower(read_file_content(path))
