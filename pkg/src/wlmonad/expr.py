"""Immutable expression trees, canonical printing, substitution and gensyms.

Everything the engine touches is an :class:`Expr`: values, patterns and
programs share one representation.  Lists, rules and friends are ordinary
compounds with a distinguished head symbol.
"""

from __future__ import annotations

import itertools
import threading
import weakref
from typing import Iterable, Mapping, Union


class Expr:
    __slots__ = ("_hash", "_nf")

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __delattr__(self, name):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return to_string(self)

    def __getitem__(self, args) -> Compound:
        """``f[x, y]`` builds the compound ``f[x,y]``; plain ints and strings are lifted."""
        if not isinstance(args, tuple):
            args = (args,)
        return Compound(self, tuple(lift(a) for a in args))


class Symbol(Expr):
    """Symbols are interned: ``Symbol("x") is Symbol("x")``."""

    __slots__ = ("name", "_syms", "__weakref__")
    _table: "weakref.WeakValueDictionary[str, Symbol]" = weakref.WeakValueDictionary()
    _lock = threading.Lock()

    def __new__(cls, name: str):
        with cls._lock:
            s = cls._table.get(name)
            if s is None:
                s = object.__new__(cls)
                object.__setattr__(s, "name", name)
                object.__setattr__(s, "_hash", hash(("Symbol", name)))
                object.__setattr__(s, "_nf", None)
                object.__setattr__(s, "_syms", frozenset((name,)))
                cls._table[name] = s
        return s

    def __init__(self, name: str):
        pass

    def __reduce__(self):
        return (Symbol, (self.name,))

    def __eq__(self, other):
        return self is other

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Symbol({self.name!r})"


class Integer(Expr):
    __slots__ = ("value",)

    def __init__(self, value: int):
        object.__setattr__(self, "value", int(value))
        object.__setattr__(self, "_hash", hash(("Integer", self.value)))
        object.__setattr__(self, "_nf", None)

    def __eq__(self, other):
        return self is other or (type(other) is Integer and other.value == self.value)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Integer({self.value})"


class String(Expr):
    __slots__ = ("value",)

    def __init__(self, value: str):
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "_hash", hash(("String", value)))
        object.__setattr__(self, "_nf", None)

    def __eq__(self, other):
        return self is other or (type(other) is String and other.value == self.value)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"String({self.value!r})"


class Compound(Expr):
    __slots__ = ("head", "args", "_syms")

    def __init__(self, head: Expr, args: Iterable[Expr] = ()):
        if type(args) is not tuple:
            args = tuple(args)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash((head, args)))
        object.__setattr__(self, "_nf", None)
        object.__setattr__(self, "_syms", None)

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not Compound or other._hash != self._hash:
            return False
        return self.head == other.head and self.args == other.args

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Compound({self.head!r}, {list(self.args)!r})"


class Sequence:
    """A run of expressions captured by a sequence pattern; spliced on substitution."""

    __slots__ = ("items",)

    def __init__(self, items: Iterable[Expr] = ()):
        self.items = tuple(items)

    def __eq__(self, other):
        return isinstance(other, Sequence) and other.items == self.items

    def __hash__(self):
        return hash(("Sequence", self.items))

    def __repr__(self):
        return "Sequence(" + ", ".join(map(repr, self.items)) + ")"

    def __str__(self):
        return "Sequence[" + ",".join(to_string(e) for e in self.items) + "]"


Bindings = Mapping[str, Union[Expr, Sequence]]


def _mark_nf(e: Expr, token) -> None:
    object.__setattr__(e, "_nf", token)


# -- well-known symbols -------------------------------------------------------

LIST = Symbol("List")
RULE = Symbol("Rule")
LEFT_ARROW = Symbol("LeftArrow")
FUNCTION = Symbol("Function")
SET_DELAYED = Symbol("SetDelayed")
BLANK = Symbol("Blank")
BLANK_NULL_SEQUENCE = Symbol("BlankNullSequence")
PATTERN = Symbol("Pattern")
REPEATED_NULL = Symbol("RepeatedNull")
EXCEPT = Symbol("Except")
SEQUENCE = Symbol("Sequence")

_INTEGER_HEAD = Symbol("Integer")
_STRING_HEAD = Symbol("String")
_SYMBOL_HEAD = Symbol("Symbol")


def sym(name: str) -> Symbol:
    return Symbol(name)


def lift(value) -> Expr:
    """Convert plain Python data (int, str, list/tuple, Expr) into an Expr."""
    if isinstance(value, Expr):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans have no expression form")
    if isinstance(value, int):
        return Integer(value)
    if isinstance(value, str):
        return String(value)
    if isinstance(value, (list, tuple)):
        return Compound(LIST, [lift(v) for v in value])
    raise TypeError(f"cannot lift {type(value).__name__} to an expression")


def lst(*items) -> Compound:
    return Compound(LIST, [lift(i) for i in items])


def rule(lhs, rhs) -> Compound:
    return Compound(RULE, (lift(lhs), lift(rhs)))


def larrow(lhs, rhs) -> Compound:
    return Compound(LEFT_ARROW, (lift(lhs), lift(rhs)))


def function(param: Symbol, body: Expr) -> Compound:
    return Compound(FUNCTION, (param, body))


def head_of(e: Expr) -> Expr:
    if isinstance(e, Compound):
        return e.head
    if isinstance(e, Integer):
        return _INTEGER_HEAD
    if isinstance(e, String):
        return _STRING_HEAD
    return _SYMBOL_HEAD


def is_list(e: Expr) -> bool:
    return isinstance(e, Compound) and e.head == LIST


def has_head(e: Expr, head: Symbol, arity: int | None = None) -> bool:
    return (
        isinstance(e, Compound)
        and e.head == head
        and (arity is None or len(e.args) == arity)
    )


def root_symbol(e: Expr) -> Symbol | None:
    """Follow the head chain of ``f[a][b]...`` down to ``f``."""
    while isinstance(e, Compound):
        e = e.head
    return e if isinstance(e, Symbol) else None


def walk(e: Expr) -> Iterable[Expr]:
    stack = [e]
    while stack:
        x = stack.pop()
        yield x
        if isinstance(x, Compound):
            stack.append(x.head)
            stack.extend(reversed(x.args))


# -- printing -----------------------------------------------------------------

# Binding strength, loosest first.  A child printed at a position that needs
# level L is parenthesised when its own level is below L.
_SET, _ARROW, _RULE, _NAMED, _REPEAT, _ATOM = range(-1, 5)


def _escape(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _blank_text(e: Expr) -> str | None:
    """Text of a Blank/BlankNullSequence form, or None if it has no short form."""
    if not isinstance(e, Compound) or e.head not in (BLANK, BLANK_NULL_SEQUENCE):
        return None
    mark = "_" if e.head == BLANK else "___"
    if not e.args:
        return mark
    if len(e.args) == 1 and isinstance(e.args[0], Symbol) and _is_ident(e.args[0].name):
        return mark + e.args[0].name
    return None


def _is_ident(name: str) -> bool:
    return bool(name) and name[0].isascii() and name[0].isalpha() and name.isascii() and name.isalnum()


def _level(e: Expr) -> int:
    if isinstance(e, Compound):
        h, n = e.head, len(e.args)
        if h == SET_DELAYED and n == 2:
            return _SET
        if h == LEFT_ARROW and n == 2:
            return _ARROW
        if h == RULE and n == 2:
            return _RULE
        if h == PATTERN and n == 2 and isinstance(e.args[0], Symbol):
            if _blank_text(e.args[1]) is not None:
                return _ATOM
            return _NAMED
        if h == REPEATED_NULL and n == 1:
            return _REPEAT
    return _ATOM


def _parts(e: Expr, out: list[str], need: int = _SET) -> None:
    if _level(e) < need:
        out.append("(")
        _parts(e, out)
        out.append(")")
        return
    if isinstance(e, Symbol):
        out.append(e.name)
    elif isinstance(e, Integer):
        out.append(str(e.value))
    elif isinstance(e, String):
        out.append(_escape(e.value))
    else:
        h, args = e.head, e.args
        lvl = _level(e)
        if lvl == _SET:
            _parts(args[0], out, _ARROW)
            out.append(":=")
            _parts(args[1], out, _ARROW)
        elif lvl == _ARROW:
            _parts(args[0], out, _RULE)
            out.append("<-")
            _parts(args[1], out, _RULE)
        elif lvl == _RULE:
            _parts(args[0], out, _NAMED)
            out.append("->")
            _parts(args[1], out, _RULE)
        elif lvl == _NAMED:
            out.append(args[0].name)
            out.append(":")
            _parts(args[1], out, _REPEAT)
        elif lvl == _REPEAT:
            _parts(args[0], out, _REPEAT)
            out.append("...")
        elif h == PATTERN and len(args) == 2 and isinstance(args[0], Symbol):
            out.append(args[0].name)
            out.append(_blank_text(args[1]))
        elif (b := _blank_text(e)) is not None:
            out.append(b)
        elif h == LIST:
            out.append("{")
            _args(args, out)
            out.append("}")
        else:
            _parts(h, out, _ATOM)
            out.append("[")
            _args(args, out)
            out.append("]")


def _args(args, out: list[str]) -> None:
    for i, a in enumerate(args):
        if i:
            out.append(",")
        _parts(a, out)


def to_string(e: Expr, pretty: bool = False, width: int = 60, indent: str = "   ") -> str:
    """Canonical text form; ``parse(to_string(e)) == e``.

    With ``pretty=True`` long lists and applications are broken over several
    lines with one argument per line.  Whitespace is insignificant to the
    parser, so the pretty form parses back to the same expression.
    """
    out: list[str] = []
    _parts(e, out)
    flat = "".join(out)
    if not pretty:
        return flat
    return _pretty(e, 0, width, indent)


def _pretty(e: Expr, depth: int, width: int, indent: str) -> str:
    flat = to_string(e)
    if len(indent) * depth + len(flat) <= width or not isinstance(e, Compound) or _level(e) != _ATOM or not e.args:
        return flat
    if _blank_text(e) is not None or (e.head == PATTERN and len(e.args) == 2):
        return flat
    if e.head == LIST:
        opener, closer = "{", "}"
    else:
        opener, closer = to_string(e.head) + "[", "]"
        if _level(e.head) != _ATOM:
            opener = "(" + opener[:-1] + ")["
    pad = indent * (depth + 1)
    body = ",\n".join(pad + _pretty(a, depth + 1, width, indent) for a in e.args)
    return f"{opener}\n{body}\n{indent * depth}{closer}"


# -- substitution -------------------------------------------------------------

def substitute(e: Expr, b: Bindings) -> Expr | Sequence:
    """Replace free occurrences of bound names.

    Sequence values splice into the argument list of the enclosing compound.
    ``Function[v, body]`` binds ``v`` inside ``body``.
    """
    if not b:
        return e
    return _subst(e, b)


_NO_SYMS: frozenset = frozenset()


def symbol_names(e: Expr) -> frozenset:
    """Names of all symbols occurring in ``e``; cached on compounds."""
    t = type(e)
    if t is Symbol:
        return e._syms
    if t is not Compound:
        return _NO_SYMS
    s = e._syms
    return s if s is not None else _fill_syms(e)


def _fill_syms(e: Compound) -> frozenset:
    acc = None
    for c in (e.head, *e.args):
        t = type(c)
        if t is Symbol:
            cs = c._syms
        elif t is Compound:
            cs = c._syms
            if cs is None:
                cs = _fill_syms(c)
        else:
            continue
        # siblings usually share their symbols, so reuse rather than rebuild
        if acc is None or acc < cs:
            acc = cs
        elif not cs <= acc:
            acc = acc | cs
    if acc is None:
        acc = _NO_SYMS
    object.__setattr__(e, "_syms", acc)
    return acc


def _subst(e: Expr, b: Bindings):
    t = type(e)
    if t is Symbol:
        return b.get(e.name, e)
    if t is not Compound:
        return e
    s = e._syms
    if s is None:
        s = symbol_names(e)
    if s.isdisjoint(b):
        return e
    head = _subst(e.head, b)
    if type(head) is Sequence:
        head = Compound(SEQUENCE, head.items)
    args = e.args
    if e.head is FUNCTION and len(args) == 2 and type(args[0]) is Symbol and args[0].name in b:
        inner = {k: v for k, v in b.items() if k != args[0].name}
        if not inner:
            return e if head is e.head else Compound(head, args)
        body = _subst(args[1], inner)
        if type(body) is Sequence:
            return Compound(head, (args[0], *body.items))
        if body is args[1] and head is e.head:
            return e
        return Compound(head, (args[0], body))
    out = None
    for i, a in enumerate(args):
        # leaves and untouched subtrees are handled inline: most arguments are one or the other
        ta = type(a)
        if ta is Symbol:
            r = b.get(a.name, a)
        elif ta is not Compound:
            r = a
        else:
            sa = a._syms
            r = a if sa is not None and sa.isdisjoint(b) else _subst(a, b)
        if r is a:
            if out is not None:
                out.append(a)
            continue
        if out is None:
            out = list(args[:i])
        if type(r) is Sequence:
            out.extend(r.items)
        else:
            out.append(r)
    if out is None:
        return e if head is e.head else Compound(head, args)
    return Compound(head, out)


# -- fresh symbols ------------------------------------------------------------

class FreshSupply:
    """Generates ``$<hint><n>`` symbols; ``$`` never survives the parser."""

    def __init__(self, start: int = 1):
        self._counter = itertools.count(start)
        self._lock = threading.Lock()

    def __call__(self, hint: str = "v") -> Symbol:
        with self._lock:
            n = next(self._counter)
        return Symbol(f"${hint}{n}")


_default_supply = FreshSupply()


def fresh_symbol(hint: str = "v") -> Symbol:
    """A process-wide unique symbol, e.g. ``$do1``, ``$do2``..."""
    return _default_supply(hint)


def identity_memo(maxsize: int):
    """Memoize a two-argument function on argument identity rather than equality.

    Structural equality of two large, separately built trees is a full walk,
    so an ``lru_cache`` hit can cost more than the call it saves.  Hits here
    only happen for the very same objects; the stored arguments keep their
    ids from being reused.
    """
    def deco(fn):
        table: dict = {}

        def wrapper(x, y):
            key = (id(x), id(y))
            hit = table.get(key)
            if hit is not None and hit[0] is x and hit[1] is y:
                return hit[2]
            result = fn(x, y)
            if len(table) >= maxsize:
                table.clear()
            table[key] = (x, y, result)
            return result

        wrapper.cache_clear = table.clear
        wrapper.__wrapped__ = fn
        wrapper.__doc__ = fn.__doc__
        return wrapper
    return deco
