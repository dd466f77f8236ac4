"""Text syntax for field elements, polynomials, group files and polynomial files.

Expressions use ``+ - * / ^`` and parentheses.  Exponents are integers or
parenthesised rationals such as ``(1/3)`` or ``(2/3^2)``.  In the perfection
of F_p(t) the symbol ``t`` is the transcendental; in an extension field the
symbol ``w`` is the fixed generator.

Group file::

    field: GF(3)(t)
    gen s: [[1,1,0],[0,1,1],[0,0,1]]
    gen u: [[1,t,0],[0,1,t],[0,0,1]]
    relators: s^3, u^3, s*u*s^-1*u^-1
    order: 9

Polynomial file::

    field: GF(2)
    vars: x1:1, x2:1, t:3, u:4, v:4
    poly: t^2 - v*x1^2 - u*x2^2 - t*(x1*x2^2 - x1^2*x2)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .fields import ExtensionField, Field, FieldElement, FieldSpec, PerfectClosure, make_field


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^(),\[\]:]))")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def tokenize(text: str, line: int = 1, col0: int = 1) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(_Tok("num", m.group(1), col0 + start))
        elif m.group(2):
            toks.append(_Tok("name", m.group(2), col0 + start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            toks.append(_Tok("op", op, col0 + start))
        pos = m.end()
    toks.append(_Tok("end", "", col0 + len(text)))
    return toks


class _Parser:
    """Recursive descent into an AST of nested tuples."""

    def __init__(self, text: str, line: int = 1, col0: int = 1):
        self.toks = tokenize(text, line, col0)
        self.i = 0
        self.line = line

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.take()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}",
                             self.line, tok.col)
        return tok

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col)

    def parse_all(self):
        node = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return node

    def expr(self):
        tok = self.peek()
        if tok.text in "+-" and tok.kind == "op":
            self.take()
            node = self.term()
            if tok.text == "-":
                node = ("neg", node)
        else:
            node = self.term()
        while self.peek().kind == "op" and self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in ("*", "/"):
            op = self.take().text
            rhs = self.factor()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def factor(self):
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            ex = self.exponent()
            return ("pow", base, ex)
        return base

    def exponent(self) -> Fraction:
        tok = self.peek()
        if tok.text == "-":
            self.take()
            return -self.exponent()
        if tok.kind == "num":
            self.take()
            return Fraction(int(tok.text))
        if tok.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return _rational(node, self.line, tok.col)
        self.error("expected an exponent")

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return ("num", int(tok.text))
        if tok.kind == "name":
            return ("sym", tok.text, tok.col)
        if tok.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", self.line, tok.col)


def _rational(node, line, col) -> Fraction:
    kind = node[0]
    if kind == "num":
        return Fraction(node[1])
    if kind == "neg":
        return -_rational(node[1], line, col)
    if kind in ("add", "sub", "mul", "div"):
        a, b = _rational(node[1], line, col), _rational(node[2], line, col)
        if kind == "div" and b == 0:
            raise ParseError("division by zero in exponent", line, col)
        return {"add": a + b, "sub": a - b, "mul": a * b, "div": a / b if b else 0}[kind]
    if kind == "pow":
        base = _rational(node[1], line, col)
        if node[2].denominator != 1:
            raise ParseError("fractional power inside an exponent", line, col)
        return base ** int(node[2])
    raise ParseError("exponents must be rational constants", line, col)


def parse_ast(text: str, line: int = 1, col0: int = 1):
    return _Parser(text, line, col0).parse_all()


# ---------------------------------------------------------------------------
# evaluation

def _field_symbol(field: Field, name: str):
    if name == "t" and isinstance(field, PerfectClosure):
        return field.t
    if name == "w" and isinstance(field, ExtensionField):
        return field.generator
    return None


def _eval_element(node, field: Field, line: int):
    kind = node[0]
    if kind == "num":
        return field.from_int(node[1])
    if kind == "sym":
        raw = _field_symbol(field, node[1])
        if raw is None:
            raise ParseError(f"unknown symbol {node[1]!r} in {field}", line, node[2])
        return raw
    if kind == "neg":
        return field.neg(_eval_element(node[1], field, line))
    if kind in ("add", "sub", "mul", "div"):
        a = _eval_element(node[1], field, line)
        b = _eval_element(node[2], field, line)
        if kind == "div" and field.is_zero(b):
            raise ParseError("division by zero", line, _col(node))
        return getattr(field, kind)(a, b)
    if kind == "pow":
        return _field_pow(field, _eval_element(node[1], field, line), node[2], line, node)
    raise ParseError("malformed expression", line, 1)


def _col(node) -> int:
    for part in node[1:]:
        if isinstance(part, tuple):
            c = _col(part)
            if c:
                return c
    return node[2] if node[0] == "sym" else 1


def parse_element(text: str, field: Field, line: int = 1, col0: int = 1) -> FieldElement:
    return FieldElement(field, _eval_element(parse_ast(text, line, col0), field, line))


def _eval_poly(node, ring, line: int):
    kind = node[0]
    if kind == "num":
        return ring.const(node[1])
    if kind == "sym":
        if node[1] in ring.names:
            return ring[node[1]]
        raw = _field_symbol(ring.field, node[1])
        if raw is None:
            raise ParseError(f"unknown symbol {node[1]!r}", line, node[2])
        return ring.const(raw)
    if kind == "neg":
        return -_eval_poly(node[1], ring, line)
    if kind in ("add", "sub", "mul"):
        a = _eval_poly(node[1], ring, line)
        b = _eval_poly(node[2], ring, line)
        return a + b if kind == "add" else a - b if kind == "sub" else a * b
    if kind == "div":
        a = _eval_poly(node[1], ring, line)
        b = _eval_poly(node[2], ring, line)
        if not b.is_constant() or not b:
            raise ParseError("can only divide by a non-zero constant", line, _col(node[2]))
        return a.scale(ring.field.inv(b.constant_coefficient().raw))
    if kind == "pow":
        base = _eval_poly(node[1], ring, line)
        ex = node[2]
        if ex < 0:
            if base.is_constant() and base:
                c = base.constant_coefficient().raw
                return ring.const(_field_pow(ring.field, c, ex, line, node))
            raise ParseError("negative powers of variables are not polynomials", line, _col(node))
        den, e = ex.denominator, 0
        while den % ring.p == 0:
            den //= ring.p
            e += 1
        if den != 1:
            raise ParseError(f"exponent {ex} is not in Z[1/{ring.p}]", line, _col(node))
        return (base ** ex.numerator).frobenius_root(e)
    raise ParseError("malformed expression", line, 1)


def _field_pow(field, raw, ex: Fraction, line, node):
    den, e = ex.denominator, 0
    while den % field.p == 0:
        den //= field.p
        e += 1
    if den != 1:
        raise ParseError(f"exponent {ex} is not in Z[1/{field.p}]", line, _col(node))
    if field.is_zero(raw) and ex < 0:
        raise ParseError("division by zero", line, _col(node))
    return field.root(field.power(raw, ex.numerator), e)


def parse_polynomial(text: str, ring, line: int = 1, col0: int = 1):
    return _eval_poly(parse_ast(text, line, col0), ring, line)


# ---------------------------------------------------------------------------
# field headers, matrices, files

_FIELD_RE = re.compile(
    r"^\s*(?:GF|F)_?\(?\s*(\d+)\s*(?:\^\s*(\d+))?\s*\)?\s*(\(\s*t\s*\))?\s*$")


def parse_field_spec(text: str, line: int = 1, col: int = 1) -> FieldSpec:
    """``GF(3)``, ``GF(2^2)``, ``GF(3)(t)`` (the perfection of F_3(t))."""
    m = _FIELD_RE.match(text)
    if not m:
        raise ParseError(f"cannot read field {text.strip()!r}", line, col)
    p = int(m.group(1))
    n = int(m.group(2) or 1)
    try:
        return FieldSpec(p, n, bool(m.group(3)))
    except ValueError as exc:
        raise ParseError(str(exc), line, col) from None


def parse_matrix(text: str, field: Field, line: int = 1, col0: int = 1) -> list[list]:
    """Row-major bracket syntax ``[[a, b], [c, d]]`` with element entries."""
    s = text.strip()
    offset = col0 + (len(text) - len(text.lstrip()))
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("matrix must be written as [[...], ...]", line, offset)
    rows = []
    depth = 0
    start = None
    for i, ch in enumerate(s):
        if ch == "[":
            depth += 1
            if depth == 2:
                start = i + 1
            elif depth > 2:
                raise ParseError("nested brackets inside a matrix row", line, offset + i)
        elif ch == "]":
            if depth == 2:
                rows.append((s[start:i], offset + start))
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ']'", line, offset + i)
    if depth != 0:
        raise ParseError("unbalanced '['", line, offset + len(s))
    if not rows:
        raise ParseError("empty matrix", line, offset)
    out = []
    for body, col in rows:
        entries = []
        pos = 0
        for piece in _split_top(body):
            entries.append(_eval_element(parse_ast(piece, line, col + pos), field, line))
            pos += len(piece) + 1
        out.append(entries)
    width = len(out[0])
    for (body, col), row in zip(rows, out):
        if len(row) != width:
            raise ParseError(f"row has {len(row)} entries, expected {width}", line, col)
    if len(out) != width:
        raise ParseError(f"matrix is {len(out)}x{width}, expected square", line, offset)
    return out


def _split_top(body: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    if any(not p.strip() for p in parts):
        raise ParseError("empty matrix entry")
    return parts


@dataclass
class GroupFile:
    field: Field
    generators: list
    names: list
    relators: list = dc_field(default_factory=list)
    order: int | None = None


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if body.strip():
            yield lineno, body


def _key_value(body: str, lineno: int):
    if ":" not in body:
        raise ParseError("expected 'key: value'", lineno, 1)
    key, _, value = body.partition(":")
    return key.strip(), value, len(key) + 2


def parse_group_text(text: str) -> GroupFile:
    field = None
    gens, names, relators, order = [], [], [], None
    for lineno, body in _lines(text):
        key, value, col = _key_value(body, lineno)
        head = key.split()
        if head[0] == "field":
            field = make_field(parse_field_spec(value, lineno, col))
        elif head[0] in ("gen", "generator"):
            if field is None:
                raise ParseError("the field must be declared before generators", lineno, 1)
            name = head[1] if len(head) > 1 else f"g{len(gens) + 1}"
            if name in names:
                raise ParseError(f"duplicate generator name {name!r}", lineno, 1)
            gens.append(parse_matrix(value, field, lineno, col))
            names.append(name)
        elif head[0] == "relators":
            for word in value.split(","):
                if word.strip():
                    relators.append((parse_ast(word, lineno, col), word.strip()))
        elif head[0] == "order":
            try:
                order = int(value)
            except ValueError:
                raise ParseError("order must be an integer", lineno, col) from None
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    if field is None:
        raise ParseError("missing 'field:' header", 1, 1)
    if not gens:
        raise ParseError("no generators given", 1, 1)
    n = len(gens[0])
    for g in gens:
        if len(g) != n:
            raise ParseError("generators have different sizes", 1, 1)
    return GroupFile(field, gens, names, relators, order)


@dataclass
class PolyFile:
    ring: object
    polys: list


def parse_poly_text(text: str) -> PolyFile:
    from .polyring import PolyRing

    field = None
    ring = None
    polys = []
    for lineno, body in _lines(text):
        key, value, col = _key_value(body, lineno)
        if key == "field":
            field = make_field(parse_field_spec(value, lineno, col))
        elif key == "vars":
            if field is None:
                raise ParseError("the field must be declared before vars", lineno, 1)
            names, weights = [], []
            for item in value.split(","):
                name, _, w = item.partition(":")
                name = name.strip()
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                    raise ParseError(f"bad variable name {name!r}", lineno, col)
                names.append(name)
                try:
                    weights.append(Fraction(w.strip()) if w.strip() else Fraction(1))
                except ValueError:
                    raise ParseError(f"bad weight {w!r}", lineno, col) from None
            ring = PolyRing(field, names, weights)
        elif key == "poly":
            if ring is None:
                raise ParseError("vars must be declared before poly", lineno, 1)
            polys.append(parse_polynomial(value, ring, lineno, col))
        else:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
    if ring is None or not polys:
        raise ParseError("a polynomial file needs field, vars and poly lines", 1, 1)
    return PolyFile(ring, polys)
