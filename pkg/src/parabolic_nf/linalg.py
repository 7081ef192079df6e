"""Fraction-free row reduction over the Gaussian integers.

Rows with Gaussian-rational entries are first scaled to Z[i] by the lcm of
their denominators.  Elimination then follows Bareiss: every update is
divided exactly by the previous pivot, so intermediate entries stay minors
of the input and never leave Z[i].  Any inexact division is a bug and
raises ``ConsistencyError``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Sequence

from .errors import ConsistencyError
from .exactnum import GaussRational, ZERO

GaussInt = tuple  # (re, im) of Python ints


def _to_gauss_int_row(row: Sequence[GaussRational]) -> list:
    den = 1
    for v in row:
        den = lcm(den, int(v.re.denominator), int(v.im.denominator))
    out = []
    for v in row:
        out.append((int(v.re * den), int(v.im * den)))
    return out


def _gmul(a: GaussInt, b: GaussInt) -> GaussInt:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gsub(a: GaussInt, b: GaussInt) -> GaussInt:
    return (a[0] - b[0], a[1] - b[1])


def _gdiv_exact(a: GaussInt, b: GaussInt) -> GaussInt:
    if b == (1, 0):
        return a
    norm = b[0] * b[0] + b[1] * b[1]
    re = a[0] * b[0] + a[1] * b[1]
    im = a[1] * b[0] - a[0] * b[1]
    qr, rr = divmod(re, norm)
    qi, ri = divmod(im, norm)
    if rr or ri:
        raise ConsistencyError("inexact division in fraction-free elimination")
    return (qr, qi)


@dataclass
class Echelon:
    rows: list          # reduced rows over Z[i] (augmented column last if present)
    pivots: list        # pivot column per nonzero row
    ncols: int          # number of unknown columns (excludes augmented column)

    @property
    def rank(self) -> int:
        return sum(1 for c in self.pivots if c < self.ncols)

    @property
    def consistent(self) -> bool:
        return all(c < self.ncols for c in self.pivots)


def row_echelon(matrix: Sequence[Sequence[GaussRational]],
                rhs: Sequence[GaussRational] | None = None) -> Echelon:
    """Fraction-free (Bareiss) row echelon form of [matrix | rhs]."""
    ncols = len(matrix[0]) if matrix else 0
    rows = []
    for k, row in enumerate(matrix):
        full = list(row) + ([rhs[k]] if rhs is not None else [])
        rows.append(_to_gauss_int_row([GaussRational.coerce(v) for v in full]))
    width = ncols + (1 if rhs is not None else 0)
    prev = (1, 0)
    r = 0
    pivots = []
    for c in range(width):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != (0, 0)), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        prow = rows[r]
        for i in range(r + 1, len(rows)):
            row = rows[i]
            lead = row[c]
            for j in range(c + 1, width):
                row[j] = _gdiv_exact(_gsub(_gmul(piv, row[j]), _gmul(lead, prow[j])), prev)
            row[c] = (0, 0)
        prev = piv
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return Echelon(rows[:r], pivots, ncols)


def rank(matrix: Sequence[Sequence[GaussRational]]) -> int:
    if not matrix:
        return 0
    return row_echelon(matrix).rank


def _back_substitute(ech: Echelon, free_values: dict) -> list:
    n = ech.ncols
    sol = [None] * n
    for c, v in free_values.items():
        sol[c] = v
    for k in range(len(ech.pivots) - 1, -1, -1):
        c = ech.pivots[k]
        row = ech.rows[k]
        acc = GaussRational(row[n][0], row[n][1]) if len(row) > n else ZERO
        for j in range(c + 1, n):
            if row[j] != (0, 0):
                acc = acc - GaussRational(row[j][0], row[j][1]) * sol[j]
        sol[c] = acc / GaussRational(row[c][0], row[c][1])
    return sol


class SolveError(ConsistencyError):
    pass


def solve_unique(matrix: Sequence[Sequence[GaussRational]], rhs: Sequence[GaussRational],
                 degree: int | None = None) -> list:
    """The unique solution of ``matrix @ x = rhs``.

    Raises ``SolveError`` naming ``degree`` when the system is inconsistent
    or its solution is not unique.
    """
    ech = row_echelon(matrix, rhs)
    if not ech.consistent:
        raise SolveError("inconsistent linear system", degree)
    if ech.rank != ech.ncols:
        raise SolveError(f"rank defect: rank {ech.rank} < {ech.ncols} unknowns", degree)
    return _back_substitute(ech, {})


def nullspace(matrix: Sequence[Sequence[GaussRational]]) -> list:
    """A basis of the right kernel, one vector per free column."""
    ech = row_echelon(matrix)
    n = ech.ncols
    free = [c for c in range(n) if c not in ech.pivots]
    basis = []
    for f in free:
        values = {c: (GaussRational(1) if c == f else ZERO) for c in free}
        basis.append(_back_substitute(ech, values))
    return basis


def solve_upper_triangular(diag_first: Sequence[Sequence[GaussRational]],
                           rhs: Sequence[GaussRational]) -> list:
    """Back-substitution for a square upper-triangular system with nonzero
    diagonal (used where the structure is known, e.g. difference equations)."""
    n = len(rhs)
    sol = [ZERO] * n
    for k in range(n - 1, -1, -1):
        row = diag_first[k]
        acc = GaussRational.coerce(rhs[k])
        for j in range(k + 1, n):
            if row[j]:
                acc = acc - row[j] * sol[j]
        if not row[k]:
            raise SolveError("zero pivot in triangular solve", k)
        sol[k] = acc / row[k]
    return sol
