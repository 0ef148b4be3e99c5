"""Recursive-descent parser for the ASCII formula language.

Grammar::

    sentence := quant | binary
    quant    := ("exists" | "forall") ident "." sentence
    binary   := iff
    iff      := imp ("<->" imp)*
    imp      := disj ("->" imp)?
    disj     := conj ("|" conj)*
    conj     := unary ("&" unary)*
    unary    := "!" unary | atom | "(" sentence ")"
    atom     := ident "~" ident | ident "!~" ident | ident "=" ident
              | ident "!=" ident | Ident "(" ident ")"

Lowercase identifiers are vertex (FO) variables, capitalized ones are set
(MSO) variables.  A quantifier body extends as far right as possible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    Adj, And, Eq, ExistsFO, ExistsMSO, ForallFO, ForallMSO, Formula, FormulaError,
    Iff, Implies, In, Not, Or, is_fo_name,
)


class ParseError(FormulaError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"at position {pos}: {message}")
        self.pos = pos


class UnboundVariableError(ParseError):
    pass


class SortError(ParseError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|!~|!=|[~=!&|().])|(?P<ident>[A-Za-z][A-Za-z0-9_']*))"
)
KEYWORDS = ("exists", "forall")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip():
                bad = pos + len(rest) - len(rest.lstrip())
                raise ParseError(f"unexpected character {text[bad]!r}", bad)
            break
        start = m.start("op") if m.group("op") else m.start("ident")
        if m.group("op"):
            toks.append(_Tok("op", m.group("op"), start))
        else:
            word = m.group("ident")
            toks.append(_Tok("kw" if word in KEYWORDS else "ident", word, start))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.fo_scope: list[str] = []
        self.mso_scope: list[str] = []

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind not in ("op",):
            raise ParseError(f"expected {text!r}, found {self.describe()}", self.tok.pos)
        return self.advance()

    def describe(self) -> str:
        return "end of input" if self.tok.kind == "eof" else repr(self.tok.text)

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def sentence(self) -> Formula:
        if self.tok.kind == "kw":
            return self.quant()
        return self.iff()

    def quant(self) -> Formula:
        word = self.advance().text
        name_tok = self.tok
        if name_tok.kind != "ident":
            raise ParseError(f"expected a variable after {word!r}, found {self.describe()}", name_tok.pos)
        self.advance()
        self.expect(".")
        name = name_tok.text
        fo = is_fo_name(name)
        scope = self.fo_scope if fo else self.mso_scope
        scope.append(name)
        try:
            body = self.sentence()
        finally:
            scope.pop()
        if fo:
            return (ExistsFO if word == "exists" else ForallFO)(name, body)
        return (ExistsMSO if word == "exists" else ForallMSO)(name, body)

    def iff(self) -> Formula:
        left = self.imp()
        while self.at("<->"):
            self.advance()
            left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.advance()
            return Implies(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.at("|"):
            self.advance()
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        if self.at("("):
            self.advance()
            inner = self.sentence()
            self.expect(")")
            return inner
        if self.tok.kind == "kw":
            raise ParseError(
                f"quantifier {self.tok.text!r} must be parenthesized here", self.tok.pos
            )
        return self.atom()

    def fo_name(self) -> str:
        t = self.tok
        if t.kind != "ident":
            raise ParseError(f"expected a vertex variable, found {self.describe()}", t.pos)
        if not is_fo_name(t.text):
            raise SortError(f"set variable {t.text!r} used where a vertex variable is required", t.pos)
        if t.text not in self.fo_scope:
            raise UnboundVariableError(f"unbound variable {t.text!r}", t.pos)
        self.advance()
        return t.text

    def atom(self) -> Formula:
        t = self.tok
        if t.kind != "ident":
            raise ParseError(f"expected an atom, found {self.describe()}", t.pos)
        nxt = self.toks[self.i + 1]
        if nxt.kind == "op" and nxt.text == "(":
            if is_fo_name(t.text):
                raise SortError(f"vertex variable {t.text!r} used as a set variable", t.pos)
            if t.text not in self.mso_scope:
                raise UnboundVariableError(f"unbound variable {t.text!r}", t.pos)
            self.advance()
            self.advance()
            x = self.fo_name()
            self.expect(")")
            return In(t.text, x)
        x = self.fo_name()
        op = self.tok
        if op.kind != "op" or op.text not in ("~", "!~", "=", "!="):
            raise ParseError(f"expected '~', '!~', '=' or '!=', found {self.describe()}", op.pos)
        self.advance()
        y = self.fo_name()
        base: Formula = Adj(x, y) if op.text in ("~", "!~") else Eq(x, y)
        return Not(base) if op.text.startswith("!") else base


def parse_formula(text: str) -> Formula:
    """Parse a closed sentence; raises :class:`ParseError` (or a subclass) on failure."""
    p = _Parser(text)
    out = p.sentence()
    if p.tok.kind != "eof":
        raise ParseError(f"unexpected {p.describe()} after complete sentence", p.tok.pos)
    return out
