"""Text syntax for path-algebra expressions.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := ["-"] factor ([ "*" ] factor)*
    factor := atom ["^" INT]
    atom   := RATIONAL | ARROW | "t" | "e(" VERTEX ")" | "(" expr ")"

A ``*`` glued to an arrow name (``a*``) names the star partner when that
arrow exists; any other ``*`` is multiplication, as is juxtaposition. So ``a*b`` reads as a* times
b, while ``a * b`` is a times b. Adjacent bare arrows that do not compose
raise :class:`NonComposable`; products involving idempotents or groups just
vanish where supports disagree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import NonComposable, ParseError
from .ncpath import PathPoly
from .quiver import DoubledQuiver
from .scalars import QQ, Field

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*\*?)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    out = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if not m:
            raise ParseError(f"unexpected character {src[i]!r}", position=i)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), i))
        i = m.end()
    out.append(Token("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, qd: DoubledQuiver, field: Field, src: str):
        self.qd = qd
        self.field = field
        self.src = src
        self.toks = tokenize(src)
        self.k = 0
        self.vertex_names = {str(v): v for v in qd.vertices}

    @property
    def cur(self) -> Token:
        return self.toks[self.k]

    def take(self) -> Token:
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, text: str) -> Token:
        if self.cur.text != text:
            raise ParseError(f"expected {text!r}, found {self.cur.text or 'end of input'!r}", position=self.cur.pos)
        return self.take()

    def parse(self) -> PathPoly:
        p = self.expr()
        if self.cur.kind != "end":
            raise ParseError(f"unexpected {self.cur.text!r}", position=self.cur.pos)
        return p

    def expr(self) -> PathPoly:
        p = self.term()
        while self.cur.text in ("+", "-"):
            op = self.take().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def _starts_factor(self) -> bool:
        c = self.cur
        return c.kind in ("num", "ident") or c.text == "("

    def term(self) -> PathPoly:
        neg = False
        if self.cur.text == "-":
            self.take()
            neg = True
        p, last = self.factor()
        while self._starts_factor() or self.cur.text == "*":
            if self.cur.text == "*":
                self.take()
            pos = self.cur.pos
            q, arrow = self.factor()
            if last is not None and arrow is not None and self.qd.tgt(last) != self.qd.src(arrow):
                raise NonComposable(f"{last} ends at {self.qd.tgt(last)!r} but {arrow} starts at {self.qd.src(arrow)!r} (position {pos})")
            last = arrow
            p = p * q
        return -p if neg else p

    def factor(self) -> tuple[PathPoly, str | None]:
        p, arrow = self.atom()
        if self.cur.text == "^":
            self.take()
            tok = self.cur
            if tok.kind != "num" or "/" in tok.text:
                raise ParseError("exponent must be a non-negative integer", position=tok.pos)
            self.take()
            n = int(tok.text)
            if arrow is not None and n > 1 and self.qd.tgt(arrow) != self.qd.src(arrow):
                raise NonComposable(f"{arrow}^{n} is not composable (position {tok.pos})")
            p = p ** n
            if n == 0:
                arrow = None
        return p, arrow

    def atom(self) -> tuple[PathPoly, str | None]:
        tok = self.cur
        qd, field = self.qd, self.field
        if tok.kind == "num":
            self.take()
            return PathPoly.one(qd, field).scale(Fraction(tok.text)), None
        if tok.text == "(":
            self.take()
            p = self.expr()
            self.expect(")")
            return p, None
        if tok.kind == "ident":
            self.take()
            if tok.text.endswith("*") and not qd.has_arrow(tok.text) and (tok.text == "t*" or qd.has_arrow(tok.text[:-1])):
                # no such star partner: the '*' is a multiplication sign
                star = Token("op", "*", tok.pos + len(tok.text) - 1)
                self.toks.insert(self.k, star)
                tok = Token("ident", tok.text[:-1], tok.pos)
            if tok.text == "t":
                return PathPoly.tpower(qd, field, 1), None
            if tok.text == "e":
                self.expect("(")
                vt = self.cur
                if vt.kind not in ("num", "ident") or vt.text not in self.vertex_names:
                    raise ParseError(f"unknown vertex {vt.text!r}", position=vt.pos)
                self.take()
                self.expect(")")
                return PathPoly.idem(qd, field, self.vertex_names[vt.text]), None
            if not qd.has_arrow(tok.text):
                raise ParseError(f"unknown arrow {tok.text!r}", position=tok.pos)
            return PathPoly.arrow(qd, field, tok.text), tok.text
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", position=tok.pos)


def parse_expr(qd: DoubledQuiver, src: str, field: Field = QQ) -> PathPoly:
    """Parse and normalize ``src`` into a PathPoly."""
    return _Parser(qd, field, src).parse()
