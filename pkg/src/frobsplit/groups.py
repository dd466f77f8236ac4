"""Finite matrix groups given by generators.

Matrices are tuples of row tuples of raw field values.  A group element acts
on variables by the column convention ``g.x_j = sum_i g[i][j] x_i``.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field as dc_field

from . import linalg
from .fields import Field

DEFAULT_CAP = 10 ** 6


class GroupError(ValueError):
    pass


class CapExceeded(GroupError):
    """The closure grew past the configured element cap."""


def default_cap() -> int:
    env = os.environ.get("FROBSPLIT_CAP")
    return int(env) if env else DEFAULT_CAP


def as_matrix(field: Field, rows) -> tuple:
    out = []
    for row in rows:
        out.append(tuple(field(c).raw if not _is_raw(field, c) else c for c in row))
    return tuple(out)


def _is_raw(field, c) -> bool:
    from .fields import FieldElement
    if isinstance(c, FieldElement):
        return False
    if isinstance(c, int):
        return field.is_prime_field and 0 <= c < field.p
    return not isinstance(c, str)


def mat_mul(field: Field, a: tuple, b: tuple) -> tuple:
    n = len(a)
    add, mul, zero = field.add, field.mul, field.zero
    cols = list(zip(*b))
    out = []
    for i in range(n):
        row = a[i]
        r = []
        for col in cols:
            acc = zero
            for x, y in zip(row, col):
                if x != zero and y != zero:
                    acc = add(acc, mul(x, y))
            r.append(acc)
        out.append(tuple(r))
    return tuple(out)


def mat_identity(field: Field, n: int) -> tuple:
    return tuple(tuple(field.one if i == j else field.zero for j in range(n)) for i in range(n))


def mat_inverse(field: Field, a: tuple) -> tuple:
    n = len(a)
    aug = [list(row) + list(irow) for row, irow in zip(a, mat_identity(field, n))]
    red, pivots = linalg.rref(field, aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise GroupError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


def mat_root(field: Field, a: tuple, e: int) -> tuple:
    """Entry-wise ``p^e``-th roots."""
    return tuple(tuple(field.root(x, e) for x in row) for row in a)


def mat_power(field: Field, a: tuple, k: int) -> tuple:
    if k < 0:
        a, k = mat_inverse(field, a), -k
    result = mat_identity(field, len(a))
    while k:
        if k & 1:
            result = mat_mul(field, result, a)
        k >>= 1
        if k:
            a = mat_mul(field, a, a)
    return result


def format_matrix(field: Field, a: tuple) -> str:
    return "[" + ", ".join("[" + ", ".join(field.fmt(x) for x in row) + "]" for row in a) + "]"


class MatrixGroup:
    """A finite subgroup of ``GL_n(k)`` with its full element table.

    Elements are discovered breadth-first from the sorted generators and
    kept in that order; ``elements[0]`` is the identity.
    """

    def __init__(self, field: Field, generators, names=None, relators=None,
                 abstract_order: int | None = None, cap: int | None = None):
        self.field = field
        gens = [as_matrix(field, g) for g in generators]
        if not gens:
            raise GroupError("at least one generator is required")
        self.n = len(gens[0])
        for g in gens:
            if len(g) != self.n or any(len(r) != self.n for r in g):
                raise GroupError("generators must be square matrices of one size")
            if linalg.rank(field, [list(r) for r in g]) < self.n:
                raise GroupError("generator is not invertible: " + format_matrix(field, g))
        names = list(names) if names else [f"g{i + 1}" for i in range(len(gens))]
        order = sorted(range(len(gens)), key=lambda i: _mat_key(field, gens[i]))
        self.generators = [gens[i] for i in order]
        self.generator_names = [names[i] for i in order]
        self.relators = list(relators or [])
        self.abstract_order = abstract_order
        self.cap = default_cap() if cap is None else cap
        self.elements: list[tuple] = []
        self.words: list[tuple] = []
        self.index: dict[tuple, int] = {}
        self._enumerate()

    @classmethod
    def _from_table(cls, field, generators, names, elements, words, relators, abstract_order, cap):
        g = cls.__new__(cls)
        g.field = field
        g.n = len(generators[0])
        g.generators = list(generators)
        g.generator_names = list(names)
        g.relators = list(relators)
        g.abstract_order = abstract_order
        g.cap = cap
        g.elements = list(elements)
        g.words = list(words)
        g.index = {m: i for i, m in enumerate(g.elements)}
        return g

    def _enumerate(self):
        field = self.field
        ident = mat_identity(field, self.n)
        self.elements = [ident]
        self.words = [()]
        self.index = {ident: 0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            x = self.elements[i]
            for gi, g in enumerate(self.generators):
                y = mat_mul(field, x, g)
                if y not in self.index:
                    if len(self.elements) >= self.cap:
                        raise CapExceeded(f"group order exceeds cap {self.cap}")
                    self.index[y] = len(self.elements)
                    self.elements.append(y)
                    self.words.append(self.words[i] + (gi,))
                    queue.append(len(self.elements) - 1)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def mul(self, i: int, j: int) -> int:
        return self.index[mat_mul(self.field, self.elements[i], self.elements[j])]

    def inverse(self, i: int) -> int:
        return self.index[mat_inverse(self.field, self.elements[i])]

    def multiplication_table(self) -> list[list[int]]:
        return [[self.mul(i, j) for j in range(self.order)] for i in range(self.order)]

    def word_name(self, i: int) -> str:
        w = self.words[i]
        return "*".join(self.generator_names[k] for k in w) if w else "id"

    def subgroup_generated(self, indices) -> list[int]:
        """Sorted element indices of the subgroup generated by ``indices``."""
        seen = {0}
        frontier = [0]
        gens = list(indices)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def evaluate_word(self, node) -> tuple:
        """Evaluate a relator AST (products/powers of generator names)."""
        field = self.field
        kind = node[0]
        if kind == "sym":
            if node[1] not in self.generator_names:
                raise GroupError(f"unknown generator {node[1]!r} in relator")
            return self.generators[self.generator_names.index(node[1])]
        if kind == "num" and node[1] == 1:
            return mat_identity(field, self.n)
        if kind == "mul":
            return mat_mul(field, self.evaluate_word(node[1]), self.evaluate_word(node[2]))
        if kind == "div":
            return mat_mul(field, self.evaluate_word(node[1]),
                           mat_inverse(field, self.evaluate_word(node[2])))
        if kind == "pow":
            if node[2].denominator != 1:
                raise GroupError("fractional powers are not group words")
            return mat_power(field, self.evaluate_word(node[1]), int(node[2]))
        raise GroupError("relators must be products of generator powers")


def _mat_key(field, m):
    return tuple(tuple(field.key(x) for x in row) for row in m)


def generate_group(gens, field: Field | None = None, cap: int | None = None, **kwargs) -> MatrixGroup:
    if field is None:
        raise GroupError("a field is required")
    return MatrixGroup(field, gens, cap=cap, **kwargs)


# ---------------------------------------------------------------------------
# monomial structure

@dataclass(frozen=True)
class MonomialStructure:
    """For each element: ``g.x_j = scalars[g][j] * x_{perms[g][j]}``."""

    group: MatrixGroup
    perms: tuple
    scalars: tuple

    @property
    def is_permutation(self) -> bool:
        one = self.group.field.one
        return all(c == one for row in self.scalars for c in row)

    def reconstruct(self, g: int) -> tuple:
        field = self.group.field
        n = self.group.n
        m = [[field.zero] * n for _ in range(n)]
        for j, (i, c) in enumerate(zip(self.perms[g], self.scalars[g])):
            m[i][j] = c
        return tuple(tuple(r) for r in m)

    def act(self, g: int, exps: tuple, level: int = 0) -> tuple:
        """Image of ``x^(exps/p^level)`` under element ``g``: (raw scalar, exps)."""
        field = self.group.field
        perm = self.perms[g]
        new = [0] * len(exps)
        for j, k in enumerate(exps):
            new[perm[j]] = k
        scalars = self.scalars[g]
        c = field.one
        for cj, k in zip(scalars, exps):
            if k and cj != field.one:
                c = field.mul(c, field.power(cj, k))
        if level and c != field.one:
            c = field.root(c, level)
        return c, tuple(new)

    def permute(self, g: int, exps: tuple) -> tuple:
        perm = self.perms[g]
        new = [0] * len(exps)
        for j, k in enumerate(exps):
            new[perm[j]] = k
        return tuple(new)


@dataclass(frozen=True)
class Refusal:
    """Why a group has no monomial structure in the standard basis."""

    element: int
    word: str
    column: int
    matrix: str

    def __bool__(self):
        return False

    def __str__(self):
        return (f"element {self.word} = {self.matrix} sends x{self.column + 1} "
                f"to a combination of several variables")


def detect_monomial(G: MatrixGroup) -> MonomialStructure | Refusal:
    field = G.field
    perms, scalars = [], []
    for gi, m in enumerate(G.elements):
        perm, sc = [], []
        for j in range(G.n):
            nz = [i for i in range(G.n) if not field.is_zero(m[i][j])]
            if len(nz) != 1:
                return Refusal(gi, G.word_name(gi), j, format_matrix(field, m))
            perm.append(nz[0])
            sc.append(m[nz[0]][j])
        perms.append(tuple(perm))
        scalars.append(tuple(sc))
    return MonomialStructure(G, tuple(perms), tuple(scalars))


# ---------------------------------------------------------------------------
# pseudoreflections, smallness, twists

@dataclass
class SmallnessReport:
    order: int
    pseudoreflections: list = dc_field(default_factory=list)
    relators_hold: bool | None = None
    abstract_order: int | None = None
    faithful: bool = True
    small: bool = True
    basis: str = "subgroup of GL(V)"

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "pseudoreflections": self.pseudoreflections,
            "relators_hold": self.relators_hold,
            "abstract_order": self.abstract_order,
            "faithful": self.faithful,
            "small": self.small,
            "faithfulness_basis": self.basis,
        }


def fixed_rank(G: MatrixGroup, i: int) -> int:
    """``rank(g - 1)`` for element ``i``."""
    field = G.field
    m = G.elements[i]
    rows = [[field.sub(m[r][c], field.one if r == c else field.zero) for c in range(G.n)]
            for r in range(G.n)]
    return linalg.rank(field, rows)


def pseudoreflection_and_smallness(G: MatrixGroup) -> SmallnessReport:
    """Pseudoreflections of ``G`` and whether the action is small.

    Without a presentation ``G`` is its own matrix image, hence faithful.
    With relators and an abstract order, faithful means the relators hold
    and the image has the abstract order.
    """
    pseudo = [G.word_name(i) for i in range(1, G.order) if fixed_rank(G, i) == 1]
    report = SmallnessReport(order=G.order, pseudoreflections=pseudo)
    if G.relators or G.abstract_order is not None:
        ident = mat_identity(G.field, G.n)
        holds = all(G.evaluate_word(node) == ident for node, _ in G.relators)
        report.relators_hold = holds
        report.abstract_order = G.abstract_order
        report.basis = "presentation"
        report.faithful = holds and (G.abstract_order is None or G.abstract_order == G.order)
    report.small = report.faithful and not pseudo
    return report


def twist_representation(G: MatrixGroup, e: int) -> MatrixGroup:
    """The Frobenius twist: every matrix entry replaced by its ``p^e``-th root.

    Element ``i`` of the result is the twist of element ``i`` of ``G``.
    """
    if e == 0:
        return G
    field = G.field
    return MatrixGroup._from_table(
        field,
        [mat_root(field, g, e) for g in G.generators],
        G.generator_names,
        [mat_root(field, m, e) for m in G.elements],
        G.words,
        G.relators,
        G.abstract_order,
        G.cap,
    )
