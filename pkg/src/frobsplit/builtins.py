"""Named example groups and hypersurfaces, usable without input files."""

from __future__ import annotations

import re

from .fields import GF, FieldError, is_prime
from .groups import GroupError, MatrixGroup
from .modrep import counterexample_group
from .fsing import HypersurfacePresentation, hypersurface_presentation, unipotent_group


class UnknownBuiltin(KeyError):
    def __str__(self):
        return f"unknown builtin {self.args[0]!r}; known: {', '.join(BUILTIN_NAMES)}"


BUILTIN_NAMES = ("a3", "z4-f2", "cyclic-<n>", "veronese-<n>", "trivial-<n>",
                 "counterexample", "unipotent-<p>", "hypersurface-<p>")


def _smallest_prime_factor(n: int) -> int:
    return next(d for d in range(2, n + 1) if n % d == 0)


def cyclic_permutation_group(n: int, p: int) -> MatrixGroup:
    """``x1 -> x2 -> ... -> xn -> x1`` over ``F_p``."""
    m = [[1 if i == (j + 1) % n else 0 for j in range(n)] for i in range(n)]
    return MatrixGroup(GF(p), [m], names=["c"])


def veronese_group(n: int) -> MatrixGroup:
    """``<diag(z, z)>`` with ``z`` of order ``n`` in the smallest field ``F_(p^k)`` containing one."""
    p = next(q for q in range(2, 10 ** 6) if is_prime(q) and n % q)
    k = 1
    while (p ** k - 1) % n:
        k += 1
    F = GF(p, k)
    zeta = next(a for a in _nonzero(F) if _order(F, a) == n)
    return MatrixGroup(F, [[[zeta, F.zero], [F.zero, zeta]]], names=["z"])


def _nonzero(F):
    if F.spec.n == 1:
        return [F.from_int(a) for a in range(1, F.p)]
    return [c for c in F.elements() if c != F.zero]


def _order(F, a) -> int:
    k, x = 1, a
    while x != F.one:
        x = F.mul(x, a)
        k += 1
    return k


def trivial_group(n: int, p: int = 2) -> MatrixGroup:
    ident = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    return MatrixGroup(GF(p), [ident], names=["id"])


def builtin_group(name: str, p: int | None = None, alpha=None) -> MatrixGroup:
    name = name.strip().lower()
    if name == "a3":
        return cyclic_permutation_group(3, 3)
    if name == "z4-f2":
        return cyclic_permutation_group(4, 2)
    if name in ("counterexample", "counterexample-s3"):
        if alpha is not None:
            return counterexample_group(alpha)
        return counterexample_group()
    m = re.fullmatch(r"(cyclic|veronese|trivial|unipotent)-(\d+)", name)
    if not m:
        raise UnknownBuiltin(name)
    kind, k = m.group(1), int(m.group(2))
    if k < 1:
        raise GroupError("the size parameter must be positive")
    if kind == "cyclic":
        return cyclic_permutation_group(k, p or _smallest_prime_factor(max(k, 2)))
    if kind == "veronese":
        return veronese_group(k)
    if kind == "trivial":
        return trivial_group(k, p or 2)
    if not is_prime(k):
        raise FieldError(f"unipotent-<p> needs a prime, got {k}")
    return unipotent_group(k)


def builtin_hypersurface(name: str) -> HypersurfacePresentation:
    m = re.fullmatch(r"hypersurface-(\d+)", name.strip().lower())
    if not m:
        raise UnknownBuiltin(name)
    p = int(m.group(1))
    if not is_prime(p):
        raise FieldError(f"hypersurface-<p> needs a prime, got {p}")
    return hypersurface_presentation(p)
