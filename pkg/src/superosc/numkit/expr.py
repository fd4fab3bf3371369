"""Power-law / exponential expressions: parsing, printing, evaluation, d/dvar.

Grammar (whitespace insensitive)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := ('-' | '+') unary | power
    power    := atom ('^' exponent)*
    exponent := '(' rational ')' | signed_int
    rational := ['-' | '+'] number ['/' int]
    atom     := number | ident | 'exp' '(' expr ')' | '(' expr ')'

Division, unary signs and bare integer exponents extend the minimal grammar
(``factor := base ('^' '(' rational ')')?``); everything the minimal grammar
accepts parses identically.  Exponents are stored as exact ``Fraction``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Union

import numpy as np

from .special import real_power

__all__ = [
    "Expr",
    "Const",
    "Sym",
    "Add",
    "Mul",
    "Pow",
    "Exp",
    "ParseError",
    "parse_expr",
    "diff_expr",
    "as_expr",
    "const",
    "sym",
    "exp",
    "polynomial_identity",
    "substitute",
]

Number = Union[int, Fraction, float]


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        pointer = f"\n  {text}\n  {' ' * position}^" if text else ""
        super().__init__(f"{message} at position {position}{pointer}")


def _norm_number(v) -> Number:
    if isinstance(v, bool):
        raise TypeError("booleans are not expression constants")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, Fraction):
        return v
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"non-finite constant {v}")
    return v


class Expr:
    """Immutable expression node.  Build with the helpers or operators."""

    __slots__ = ()

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, mul(const(-1), as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(const(-1), self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return mul(self, power(as_expr(other), Fraction(-1)))

    def __rtruediv__(self, other):
        return mul(as_expr(other), power(self, Fraction(-1)))

    def __neg__(self):
        return mul(const(-1), self)

    def __pow__(self, exponent):
        return power(self, _rational(exponent))

    # -- API ----------------------------------------------------------------
    def evaluate(self, env: Mapping[str, object] | None = None, *, odd_roots: bool = False, **kw):
        """Numeric value; ``env`` maps symbol names to floats, Fractions or arrays.

        With Fraction inputs and integer exponents only, the result is exact.
        """
        scope = dict(env or {}, **kw)
        return self._eval(scope, odd_roots)

    def __call__(self, env=None, **kw):
        return self.evaluate(env, **kw)

    def diff(self, var: str) -> "Expr":
        return diff_expr(self, var)

    @property
    def free_symbols(self) -> frozenset[str]:
        return frozenset()

    def to_callable(self, *names: str, odd_roots: bool = False):
        """Positional-argument evaluator ``f(*values)`` for the given symbols."""
        def fn(*values):
            return self._eval(dict(zip(names, values)), odd_roots)
        return fn

    def _eval(self, env, odd_roots):  # pragma: no cover - abstract
        raise NotImplementedError

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:  # pragma: no cover - abstract
        raise NotImplementedError

    # sort key for canonical ordering
    @cached_property
    def _key(self) -> str:
        return f"{type(self).__name__}:{self.to_text()}"


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: Number

    def _eval(self, env, odd_roots):
        return self.value

    def to_text(self):
        v = self.value
        if isinstance(v, Fraction):
            if v.denominator == 1:
                return str(v.numerator) if v >= 0 else f"({v.numerator})"
            return f"({v.numerator}/{v.denominator})"
        s = repr(float(v))
        return s if v >= 0 else f"({s})"

    @property
    def is_zero(self):
        return self.value == 0

    @property
    def is_one(self):
        return self.value == 1


@dataclass(frozen=True, eq=True)
class Sym(Expr):
    name: str

    def _eval(self, env, odd_roots):
        try:
            return env[self.name]
        except KeyError:
            raise KeyError(f"no value bound for symbol {self.name!r}") from None

    @property
    def free_symbols(self):
        return frozenset({self.name})

    def to_text(self):
        return self.name


@dataclass(frozen=True, eq=True)
class Add(Expr):
    args: tuple

    def _eval(self, env, odd_roots):
        total = self.args[0]._eval(env, odd_roots)
        for a in self.args[1:]:
            total = total + a._eval(env, odd_roots)
        return total

    @property
    def free_symbols(self):
        return frozenset().union(*(a.free_symbols for a in self.args))

    def to_text(self):
        parts = []
        for i, a in enumerate(self.args):
            coef, rest = _split_coef(a)
            if i and coef < 0:
                parts.append(" - " + _term_text(-coef, rest))
            elif i:
                parts.append(" + " + a.to_text())
            else:
                parts.append(a.to_text())
        return "".join(parts)


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    args: tuple

    def _eval(self, env, odd_roots):
        total = self.args[0]._eval(env, odd_roots)
        for a in self.args[1:]:
            total = total * a._eval(env, odd_roots)
        return total

    @property
    def free_symbols(self):
        return frozenset().union(*(a.free_symbols for a in self.args))

    def to_text(self):
        return "*".join(_paren(a) if isinstance(a, Add) else a.to_text() for a in self.args)


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction

    def _eval(self, env, odd_roots):
        return real_power(self.base._eval(env, odd_roots), self.exponent, odd_roots=odd_roots)

    @property
    def free_symbols(self):
        return self.base.free_symbols

    def to_text(self):
        b = self.base
        btxt = b.to_text() if isinstance(b, (Sym, Exp)) or (
            isinstance(b, Const) and isinstance(b.value, Fraction)
            and b.value.denominator == 1 and b.value >= 0) else _paren(b)
        e = self.exponent
        etxt = f"({e.numerator})" if e.denominator == 1 else f"({e.numerator}/{e.denominator})"
        return f"{btxt}^{etxt}"


@dataclass(frozen=True, eq=True)
class Exp(Expr):
    arg: Expr

    def _eval(self, env, odd_roots):
        v = self.arg._eval(env, odd_roots)
        if isinstance(v, np.ndarray):
            return np.exp(v)
        return math.exp(float(v))

    @property
    def free_symbols(self):
        return self.arg.free_symbols

    def to_text(self):
        return f"exp({self.arg.to_text()})"


def _paren(e: Expr) -> str:
    return f"({e.to_text()})"


def _term_text(coef, rest) -> str:
    if rest is None:
        return const(coef).to_text()
    if coef == 1:
        return rest.to_text() if not isinstance(rest, Add) else _paren(rest)
    return mul(const(coef), rest).to_text()


# -- constructors with light canonicalisation ------------------------------


def const(v) -> Const:
    return Const(_norm_number(v))


def sym(name: str) -> Sym:
    return Sym(name)


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, str):
        return parse_expr(v)
    return const(v)


def _rational(e) -> Fraction:
    if isinstance(e, Fraction):
        return e
    if isinstance(e, int):
        return Fraction(e)
    if isinstance(e, Const) and isinstance(e.value, Fraction):
        return e.value
    if isinstance(e, float):
        f = Fraction(e).limit_denominator(10**6)
        if abs(float(f) - e) <= 1e-14 * max(1.0, abs(e)):
            return f
    raise ValueError(f"exponent {e!r} is not rational")


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def _split_coef(e: Expr):
    """``e = coef * rest`` with ``rest`` free of a leading constant (None if e is constant)."""
    if isinstance(e, Const):
        return e.value, None
    if isinstance(e, Mul) and isinstance(e.args[0], Const):
        rest = e.args[1:]
        return e.args[0].value, rest[0] if len(rest) == 1 else Mul(rest)
    return Fraction(1), e


def add(*terms: Expr) -> Expr:
    flat = []
    for t in terms:
        if isinstance(t, Add):
            flat.extend(t.args)
        else:
            flat.append(t)
    constant: Number = Fraction(0)
    coeffs: dict = {}
    order = []
    for t in flat:
        coef, rest = _split_coef(t)
        if rest is None:
            constant = constant + coef
            continue
        if rest in coeffs:
            coeffs[rest] = coeffs[rest] + coef
        else:
            coeffs[rest] = coef
            order.append(rest)
    out = []
    for rest in sorted(order, key=lambda r: r._key):
        c = coeffs[rest]
        if c == 0:
            continue
        out.append(rest if c == 1 else mul(const(c), rest))
    if constant != 0 or not out:
        out.insert(0, const(constant))
    if len(out) == 1:
        return out[0]
    return Add(tuple(out))


def mul(*factors: Expr) -> Expr:
    flat = []
    for f in factors:
        if isinstance(f, Mul):
            flat.extend(f.args)
        else:
            flat.append(f)
    coef: Number = Fraction(1)
    powers: dict = {}
    order = []
    exp_args = []
    for f in flat:
        if isinstance(f, Const):
            coef = coef * f.value
            continue
        if isinstance(f, Exp):
            exp_args.append(f.arg)
            continue
        base, e = (f.base, f.exponent) if isinstance(f, Pow) else (f, Fraction(1))
        if base in powers:
            powers[base] += e
        else:
            powers[base] = e
            order.append(base)
    if coef == 0:
        return ZERO
    rest = []
    for base in sorted(order, key=lambda b: b._key):
        e = powers[base]
        if e == 0:
            continue
        p = base if e == 1 else Pow(base, e)
        if isinstance(p, Const):
            coef *= p.value
        else:
            rest.append(p)
    if exp_args:
        ex = exp(add(*exp_args))
        if isinstance(ex, Const):
            coef *= ex.value
        else:
            rest.append(ex)
    if not rest:
        return const(coef)
    if coef != 1:
        rest.insert(0, const(coef))
    if len(rest) == 1:
        return rest[0]
    return Mul(tuple(rest))


def power(base: Expr, e) -> Expr:
    e = _rational(e)
    if e == 0:
        return ONE
    if e == 1:
        return base
    if isinstance(base, Const):
        v = base.value
        if e.denominator == 1:
            if v == 0 and e < 0:
                raise ZeroDivisionError("0 raised to a negative power")
            return const(v ** int(e))
        if isinstance(v, float) and v > 0:
            return const(v ** float(e))
        if isinstance(v, Fraction) and v > 0:
            num = _exact_root(v.numerator, e.denominator)
            den = _exact_root(v.denominator, e.denominator)
            if num is not None and den is not None:
                return const(Fraction(num, den) ** e.numerator)
        return Pow(base, e)
    if isinstance(base, Pow) and e.denominator == 1:
        return power(base.base, base.exponent * e)
    if isinstance(base, Exp):
        return exp(mul(const(e), base.arg))
    if isinstance(base, Mul) and e.denominator == 1:
        return mul(*(power(f, e) for f in base.args))
    return Pow(base, e)


def _exact_root(n: int, q: int):
    r = round(n ** (1.0 / q))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** q == n:
            return cand
    return None


def exp(arg) -> Expr:
    arg = as_expr(arg)
    if isinstance(arg, Const):
        if arg.value == 0:
            return ONE
    return Exp(arg)


# -- differentiation --------------------------------------------------------


def diff_expr(e: Expr, var: str) -> Expr:
    """Symbolic derivative of ``e`` with respect to the symbol ``var``."""
    if var not in e.free_symbols:
        return ZERO
    if isinstance(e, Sym):
        return ONE
    if isinstance(e, Add):
        return add(*(diff_expr(a, var) for a in e.args))
    if isinstance(e, Mul):
        terms = []
        for i, a in enumerate(e.args):
            da = diff_expr(a, var)
            if isinstance(da, Const) and da.is_zero:
                continue
            terms.append(mul(*e.args[:i], da, *e.args[i + 1:]))
        return add(*terms) if terms else ZERO
    if isinstance(e, Pow):
        return mul(const(e.exponent), power(e.base, e.exponent - 1), diff_expr(e.base, var))
    if isinstance(e, Exp):
        return mul(e, diff_expr(e.arg, var))
    raise TypeError(f"cannot differentiate {type(e).__name__}")


# -- parser -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)

_FUNCTIONS = {"exp"}


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise ParseError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2], self.text)
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok[2], self.text)

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self):
        terms = [self.term()]
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else -t)
        return add(*terms)

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            e = e * rhs if op == "*" else e / rhs
        return e

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        while self.peek()[1] == "^":
            self.take()
            base = power(base, self.exponent())
        return base

    def _signed_number(self):
        sign = 1
        if self.peek()[1] in ("-", "+"):
            sign = -1 if self.take()[1] == "-" else 1
        tok = self.peek()
        if tok[0] != "num":
            raise self.error("exponent not rational")
        self.take()
        return sign * Fraction(tok[1])

    def exponent(self) -> Fraction:
        if self.peek()[1] == "(":
            self.take()
            num = self._signed_number()
            if self.peek()[1] == "/":
                self.take()
                tok = self.peek()
                if tok[0] != "num" or not tok[1].isdigit():
                    raise self.error("exponent not rational")
                self.take()
                den = int(tok[1])
                if den == 0:
                    raise self.error("zero denominator in exponent", tok)
                num = num / den
            if self.peek()[1] != ")":
                raise self.error("exponent not rational")
            self.take()
            return num
        tok = self.peek()
        num = self._signed_number()
        if num.denominator != 1:
            raise ParseError("bare exponents must be integers; use ^(p/q)", tok[2], self.text)
        return num

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            if re.fullmatch(r"\d+", val):
                return const(int(val))
            return const(float(val))
        if kind == "id":
            if self.peek()[1] == "(":
                if val not in _FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", pos, self.text)
                self.take()
                inner = self.expr()
                self.expect(")")
                return exp(inner)
            if val in _FUNCTIONS:
                raise ParseError(f"function {val!r} needs an argument", pos, self.text)
            return sym(val)
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos, self.text)


def parse_expr(text: str) -> Expr:
    """Parse ``text`` into an :class:`Expr`; raises :class:`ParseError`."""
    if not isinstance(text, str):
        raise TypeError("parse_expr expects a string")
    return _Parser(text).parse()


def polynomial_identity(e1: Expr, e2: Expr, var: str, degree: int, env=None) -> bool:
    """Exact test that two polynomials of degree <= ``degree`` in ``var`` coincide.

    Both sides are evaluated in rational arithmetic at ``degree + 1``
    distinct integer points; other symbols take the rational values in
    ``env``.  Float constants make the comparison inexact and are rejected.
    """
    for e in (e1, e2):
        if _has_float(e):
            raise ValueError("exact comparison needs rational constants")
    base = {k: Fraction(v) for k, v in (env or {}).items()}
    for j in range(degree + 1):
        point = dict(base, **{var: Fraction(j + 1)})
        if Fraction(e1.evaluate(point)) != Fraction(e2.evaluate(point)):
            return False
    return True


def _has_float(e: Expr) -> bool:
    if isinstance(e, Const):
        return isinstance(e.value, float)
    if isinstance(e, (Add, Mul)):
        return any(_has_float(a) for a in e.args)
    if isinstance(e, Pow):
        return _has_float(e.base) or e.exponent.denominator != 1
    if isinstance(e, Exp):
        return True
    return False


def substitute(e: Expr, var: str, repl) -> Expr:
    """Replace every occurrence of the symbol ``var`` in ``e`` by ``repl``."""
    repl = as_expr(repl)
    if var not in e.free_symbols:
        return e
    if isinstance(e, Sym):
        return repl
    if isinstance(e, Add):
        return add(*(substitute(a, var, repl) for a in e.args))
    if isinstance(e, Mul):
        return mul(*(substitute(a, var, repl) for a in e.args))
    if isinstance(e, Pow):
        return power(substitute(e.base, var, repl), e.exponent)
    if isinstance(e, Exp):
        return exp(substitute(e.arg, var, repl))
    raise TypeError(f"cannot substitute into {type(e).__name__}")
