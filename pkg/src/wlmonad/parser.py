"""Recursive-descent parser for the canonical text grammar.

Precedence, loosest to tightest::

    :=   (statement level, non-associative)
    <-   (non-associative)
    ->   (right-associative)
    :    (named pattern, name must be a symbol)
    ...  (postfix, RepeatedNull)
    f[...]  application, including curried f[a][b]

Comments are ``(* ... *)`` and do not nest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .expr import (
    BLANK,
    BLANK_NULL_SEQUENCE,
    LEFT_ARROW,
    LIST,
    PATTERN,
    REPEATED_NULL,
    RULE,
    SET_DELAYED,
    Compound,
    Expr,
    Integer,
    String,
    Symbol,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, int, string, blank, op, eof
    text: str
    line: int
    col: int
    nl_before: bool = False


_IDENT = r"[A-Za-z][A-Za-z0-9]*"
_BLANK_RE = re.compile(rf"({_IDENT})?(_+)({_IDENT})?")
_IDENT_RE = re.compile(_IDENT)
_INT_RE = re.compile(r"-?[0-9]+")
_OPS = (":=", "->", "<-", "...", "[", "]", "{", "}", "(", ")", ",", ";", ":")


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    nl = False
    n = len(src)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for ch in src[i:i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = src[i]
        if ch in " \t\r\n":
            if ch == "\n":
                nl = True
            advance(1)
            continue
        if src.startswith("(*", i):
            end = src.find("*)", i + 2)
            if end < 0:
                raise ParseError(line, col, "unterminated comment", frozenset({"*)"}))
            chunk = src[i:end + 2]
            if "\n" in chunk:
                nl = True
            advance(len(chunk))
            continue
        start_line, start_col = line, col
        if ch == "$":
            raise ParseError(line, col, "identifiers may not begin with '$'")
        m = _BLANK_RE.match(src, i)
        if m and m.group(2):
            if m.group(2) not in ("_", "___"):
                raise ParseError(line, col + len(m.group(1) or ""),
                                 f"unsupported blank {m.group(2)!r}", frozenset({"_", "___"}))
            toks.append(Token("blank", m.group(0), start_line, start_col, nl))
            advance(m.end() - i)
        elif m := _IDENT_RE.match(src, i):
            toks.append(Token("ident", m.group(0), start_line, start_col, nl))
            advance(m.end() - i)
        elif m := _INT_RE.match(src, i):
            toks.append(Token("int", m.group(0), start_line, start_col, nl))
            advance(m.end() - i)
        elif ch == '"':
            j = i + 1
            buf = []
            while j < n and src[j] != '"':
                if src[j] == "\\" and j + 1 < n:
                    buf.append(src[j + 1])
                    j += 2
                else:
                    buf.append(src[j])
                    j += 1
            if j >= n:
                raise ParseError(line, col, "unterminated string", frozenset({'"'}))
            toks.append(Token("string", "".join(buf), start_line, start_col, nl))
            advance(j + 1 - i)
        else:
            if src.startswith("..", i) and not src.startswith("...", i):
                raise ParseError(line, col, "'..' is not supported; use '...'")
            op = next((o for o in _OPS if src.startswith(o, i)), None)
            if op is None:
                raise ParseError(line, col, f"unexpected character {ch!r}")
            toks.append(Token("op", op, start_line, start_col, nl))
            advance(len(op))
        nl = False
    toks.append(Token("eof", "", line, col, nl))
    return toks


def _blank_expr(text: str) -> Expr:
    m = _BLANK_RE.fullmatch(text)
    name, mark, head = m.groups()
    blank = Compound(BLANK if mark == "_" else BLANK_NULL_SEQUENCE,
                     (Symbol(head),) if head else ())
    if name:
        return Compound(PATTERN, (Symbol(name), blank))
    return blank


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, message: str, expected=()) -> ParseError:
        t = self.tok
        return ParseError(t.line, t.col, message, frozenset(expected))

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expect(self, text: str) -> None:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", {repr(text)})
        self.pos += 1

    def statement(self) -> Expr:
        lhs = self.arrow()
        if self.at(":="):
            self.pos += 1
            rhs = self.arrow()
            if self.at(":="):
                raise self.error("':=' is not associative")
            return Compound(SET_DELAYED, (lhs, rhs))
        return lhs

    def arrow(self) -> Expr:
        lhs = self.rule()
        if self.at("<-"):
            self.pos += 1
            rhs = self.rule()
            if self.at("<-"):
                raise self.error("'<-' is not associative; parenthesise")
            return Compound(LEFT_ARROW, (lhs, rhs))
        return lhs

    def rule(self) -> Expr:
        lhs = self.named()
        if self.at("->"):
            self.pos += 1
            return Compound(RULE, (lhs, self.rule()))
        return lhs

    def named(self) -> Expr:
        t = self.tok
        lhs = self.repeat()
        if self.at(":"):
            if not isinstance(lhs, Symbol):
                raise ParseError(t.line, t.col, "pattern name must be a symbol")
            self.pos += 1
            rhs = self.repeat()
            if self.at(":"):
                raise self.error("':' is not associative; parenthesise")
            return Compound(PATTERN, (lhs, rhs))
        return lhs

    def repeat(self) -> Expr:
        e = self.application()
        while self.at("..."):
            self.pos += 1
            e = Compound(REPEATED_NULL, (e,))
        return e

    def application(self) -> Expr:
        e = self.primary()
        while self.at("["):
            self.pos += 1
            e = Compound(e, self.arguments("]"))
        return e

    def arguments(self, close: str) -> tuple[Expr, ...]:
        args: list[Expr] = []
        if self.at(close):
            self.pos += 1
            return tuple(args)
        while True:
            args.append(self.statement())
            if self.at(","):
                self.pos += 1
                continue
            self.expect(close)
            return tuple(args)

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "ident":
            self.pos += 1
            return Symbol(t.text)
        if t.kind == "int":
            self.pos += 1
            return Integer(int(t.text))
        if t.kind == "string":
            self.pos += 1
            return String(t.text)
        if t.kind == "blank":
            self.pos += 1
            return _blank_expr(t.text)
        if self.at("{"):
            self.pos += 1
            return Compound(LIST, self.arguments("}"))
        if self.at("("):
            self.pos += 1
            e = self.statement()
            self.expect(")")
            return e
        found = t.text or "end of input"
        raise self.error(f"unexpected {found!r}",
                         {"identifier", "integer", "string", "blank", "'{'", "'('"})


def parse(src: str) -> Expr:
    """Parse exactly one expression."""
    p = _Parser(tokenize(src))
    e = p.statement()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r} after expression", {"end of input"})
    return e


def parse_program_positions(src: str) -> list[tuple[Expr, tuple[int, int]]]:
    """Like :func:`parse_program` but also returns each statement's line/column."""
    p = _Parser(tokenize(src))
    out: list[tuple[Expr, tuple[int, int]]] = []
    while p.tok.kind != "eof":
        if p.at(";"):
            p.pos += 1
            continue
        start = (p.tok.line, p.tok.col)
        out.append((p.statement(), start))
        if p.at(";"):
            p.pos += 1
        elif p.tok.kind != "eof" and not p.tok.nl_before:
            raise p.error(f"unexpected {p.tok.text!r}", {"';'", "newline"})
    return out


def parse_program(src: str) -> list[Expr]:
    """Split a script into statements separated by ``;`` or newlines."""
    return [e for e, _ in parse_program_positions(src)]
