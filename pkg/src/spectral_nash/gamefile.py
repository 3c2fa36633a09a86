"""Plain-text game files.

::

    bimatrix <l1> <l2>      then l1 rows of R, then l1 rows of C
    symmetric <n>           then n rows of A

Entries are whitespace separated decimals.  Blank lines and lines starting
with ``#`` are ignored.  Values are written with 17 significant digits, which
round-trips every double exactly.
"""

from __future__ import annotations

import io
from typing import TextIO, Union

import numpy as np

from .errors import ParseError
from .games import BimatrixGame, SymmetricGame

Game = Union[BimatrixGame, SymmetricGame]


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def format_game(game: Game) -> str:
    out = io.StringIO()
    if isinstance(game, BimatrixGame):
        l1, l2 = game.shape
        out.write(f"bimatrix {l1} {l2}\n")
        blocks = (game.R, game.C)
    else:
        out.write(f"symmetric {game.n}\n")
        blocks = (game.A,)
    for M in blocks:
        for row in M:
            out.write(" ".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()


def write_game(game: Game, fh: TextIO) -> None:
    fh.write(format_game(game))


def _parse_count(tok, lineno, what):
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", lineno) from None
    if v < 1:
        raise ParseError(f"{what} must be positive, got {v}", lineno)
    return v


def parse_game(text: str) -> Game:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty game file", 1)
    lineno, header = lines[0]
    parts = header.split()
    if parts[0] == "bimatrix" and len(parts) == 3:
        l1 = _parse_count(parts[1], lineno, "row count")
        l2 = _parse_count(parts[2], lineno, "column count")
        rows, width = 2 * l1, l2
    elif parts[0] == "symmetric" and len(parts) == 2:
        n = _parse_count(parts[1], lineno, "dimension")
        rows, width = n, n
    else:
        raise ParseError(f"bad header {header!r}; expected 'bimatrix <l1> <l2>' "
                         "or 'symmetric <n>'", lineno)
    body = lines[1:]
    if len(body) < rows:
        last = body[-1][0] + 1 if body else lineno + 1
        raise ParseError(f"expected {rows} matrix rows, found {len(body)}", last)
    if len(body) > rows:
        raise ParseError("unexpected extra rows after the matrix data", body[rows][0])
    data = np.empty((rows, width))
    for r, (i, ln) in enumerate(body):
        toks = ln.split()
        if len(toks) != width:
            raise ParseError(f"expected {width} entries, found {len(toks)}", i)
        try:
            data[r] = [float(t) for t in toks]
        except ValueError:
            raise ParseError(f"non-numeric entry in {ln!r}", i) from None
        if not np.all(np.isfinite(data[r])):
            raise ParseError("entries must be finite", i)
    if parts[0] == "bimatrix":
        return BimatrixGame(data[:l1], data[l1:])
    return SymmetricGame.from_matrix(data, check_dominance=False)


def read_game(path) -> Game:
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())
