"""Exact linear algebra over any :class:`~frobsplit.fields.Field` (raw values)."""

from __future__ import annotations

from typing import Hashable


def rref(field, rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of a dense matrix; returns (rows, pivot columns)."""
    a = [list(r) for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots = []
    r = 0
    is_zero, mul, sub, inv = field.is_zero, field.mul, field.sub, field.inv
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if not is_zero(a[i][c])), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        s = inv(a[r][c])
        a[r] = [mul(s, x) for x in a[r]]
        for i in range(len(a)):
            if i != r and not is_zero(a[i][c]):
                f = a[i][c]
                a[i] = [sub(x, mul(f, y)) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(field, rows: list[list]) -> int:
    return len(rref(field, rows)[1])


def nullspace(field, rows: list[list], ncols: int | None = None) -> list[list]:
    """Basis of ``{v : A v = 0}`` for the dense matrix ``A`` given by ``rows``."""
    if not rows:
        return [[field.one if i == j else field.zero for i in range(ncols)] for j in range(ncols)]
    ncols = len(rows[0])
    red, pivots = rref(field, rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for row, pc in zip(red, pivots):
            v[pc] = field.neg(row[f])
        basis.append(v)
    return basis


def matmul(field, a: list[list], b: list[list]) -> list[list]:
    add, mul, zero = field.add, field.mul, field.zero
    bt = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = zero
            for x, y in zip(row, col):
                if x != zero and y != zero:
                    acc = add(acc, mul(x, y))
            out_row.append(acc)
        out.append(out_row)
    return out


def identity(field, n: int) -> list[list]:
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def determinant(field, rows: list[list]):
    a = [list(r) for r in rows]
    n = len(a)
    det = field.one
    for c in range(n):
        piv = next((i for i in range(c, n) if not field.is_zero(a[i][c])), None)
        if piv is None:
            return field.zero
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = field.neg(det)
        det = field.mul(det, a[c][c])
        s = field.inv(a[c][c])
        for i in range(c + 1, n):
            if not field.is_zero(a[i][c]):
                f = field.mul(a[i][c], s)
                a[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(a[i], a[c])]
    return det


class SparseEchelon:
    """Incremental echelon basis for sparse vectors ``{coordinate: raw}``.

    Each stored vector remembers which input vectors it combines, so a
    reduced target can be written back in terms of the inputs.
    """

    def __init__(self, field):
        self.field = field
        self.pivots: dict[Hashable, tuple[dict, dict]] = {}
        self.dependencies: list[dict] = []

    def _reduce(self, vec: dict, combo: dict) -> tuple[dict, dict]:
        f = self.field
        vec = dict(vec)
        combo = dict(combo)
        changed = True
        while changed:
            changed = False
            for coord in [c for c in vec if c in self.pivots]:
                if coord not in vec:
                    continue
                c = vec[coord]
                pvec, pcombo = self.pivots[coord]
                for k, v in pvec.items():
                    nv = f.sub(vec.get(k, f.zero), f.mul(c, v))
                    if f.is_zero(nv):
                        vec.pop(k, None)
                    else:
                        vec[k] = nv
                for k, v in pcombo.items():
                    nv = f.sub(combo.get(k, f.zero), f.mul(c, v))
                    if f.is_zero(nv):
                        combo.pop(k, None)
                    else:
                        combo[k] = nv
                changed = True
        return vec, combo

    def add(self, vec: dict, tag: Hashable) -> bool:
        """Insert ``vec`` labelled ``tag``; returns False if it was dependent.

        A dependent vector records the kernel relation it produced in
        :attr:`dependencies` (as ``{tag: coeff}`` summing to zero).
        """
        f = self.field
        vec = {k: v for k, v in vec.items() if not f.is_zero(v)}
        red, combo = self._reduce(vec, {tag: f.one})
        if not red:
            self.dependencies.append(combo)
            return False
        coord = min(red, key=_coord_key)
        s = f.inv(red[coord])
        red = {k: f.mul(s, v) for k, v in red.items()}
        combo = {k: f.mul(s, v) for k, v in combo.items()}
        # keep earlier pivots reduced against the new one
        for pc, (pvec, pcombo) in list(self.pivots.items()):
            if coord in pvec:
                c = pvec[coord]
                nvec = dict(pvec)
                ncombo = dict(pcombo)
                for k, v in red.items():
                    nv = f.sub(nvec.get(k, f.zero), f.mul(c, v))
                    if f.is_zero(nv):
                        nvec.pop(k, None)
                    else:
                        nvec[k] = nv
                for k, v in combo.items():
                    nv = f.sub(ncombo.get(k, f.zero), f.mul(c, v))
                    if f.is_zero(nv):
                        ncombo.pop(k, None)
                    else:
                        ncombo[k] = nv
                self.pivots[pc] = (nvec, ncombo)
        self.pivots[coord] = (red, combo)
        return True

    def express(self, vec: dict) -> dict | None:
        """Coefficients ``{tag: c}`` with ``sum c * input[tag] = vec``, or None."""
        f = self.field
        red, combo = self._reduce({k: v for k, v in vec.items() if not f.is_zero(v)}, {})
        if red:
            return None
        return {k: f.neg(v) for k, v in combo.items()}

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _coord_key(c):
    return repr(c)


def kernel_of_columns(field, columns: list[dict]) -> list[dict]:
    """Kernel of the linear map whose i-th column is the sparse vector ``columns[i]``.

    Returns sparse kernel vectors ``{i: coeff}``.
    """
    ech = SparseEchelon(field)
    for i, col in enumerate(columns):
        ech.add(col, i)
    return ech.dependencies
