"""One-variable expression language for generating functions.

Grammar (EBNF, whitespace ignored)::

    expr     = term , { ("+" | "-") , term } ;
    term     = unary , { ("*" | "/") , unary } ;
    unary    = "-" , unary | power ;
    power    = atom , [ "^" , unary ] ;          (* right associative *)
    atom     = number | "t" | func , "(" , expr , ")" | "(" , expr , ")" ;
    func     = "sin" | "cos" | "sinh" | "cosh" | "tanh" | "exp" | "ln" | "sqrt" | "abs" ;
    number   = digits , [ "." , [ digits ] ] , [ exponent ] | "." , digits , [ exponent ] ;
    exponent = ("e" | "E") , [ "+" | "-" ] , digits ;

Evaluation accepts floats or numpy arrays and raises DomainError instead of
producing NaN or infinities.
"""

import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExprSyntaxError, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "sinh", "cosh", "tanh", "exp", "ln", "sqrt", "abs")

# printing precedence; higher binds tighter
_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


class Expr:
    """Base class of the immutable expression tree."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, _coerce(other))

    def __radd__(self, other):
        return Add(_coerce(other), self)

    def __sub__(self, other):
        return Sub(self, _coerce(other))

    def __rsub__(self, other):
        return Sub(_coerce(other), self)

    def __mul__(self, other):
        return Mul(self, _coerce(other))

    def __rmul__(self, other):
        return Mul(_coerce(other), self)

    def __truediv__(self, other):
        return Div(self, _coerce(other))

    def __rtruediv__(self, other):
        return Div(_coerce(other), self)

    def __pow__(self, other):
        return Pow(self, _coerce(other))

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return to_string(self)

    def eval(self, t):
        return evaluate(self, t)

    def diff(self):
        return differentiate(self)


def _coerce(value):
    if isinstance(value, Expr):
        return value
    return Num(float(value))


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError("numeric literal must be finite")
        object.__setattr__(self, "value", float(self.value))

    def __repr__(self):
        return f"Num({_format_number(self.value)})"


@dataclass(frozen=True, eq=True)
class Var(Expr):
    def __repr__(self):
        return "t"


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr

    def __repr__(self):
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, eq=True)
class _Binary(Expr):
    left: Expr
    right: Expr

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r},{self.right!r})"


class Add(_Binary):
    pass


class Sub(_Binary):
    pass


class Mul(_Binary):
    pass


class Div(_Binary):
    pass


class Pow(_Binary):
    pass


@dataclass(frozen=True, eq=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")

    def __repr__(self):
        return f"{self.name.capitalize()}({self.arg!r})"


T = Var()

_BINARY_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/", Pow: "^"}
_SYMBOL_BINARY = {v: k for k, v in _BINARY_SYMBOL.items()}


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_ATOM_START = ("number", "t", "function", "(", "-")


@dataclass(frozen=True)
class _Token:
    kind: str  # number, name, op, end, bad
    text: str
    offset: int  # byte offset


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        byte_off = len(text[:pos].encode("utf-8"))
        if pos >= n:
            tokens.append(_Token("end", "", byte_off))
            return tokens
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            tokens.append(_Token("bad", text[pos], byte_off))
            tokens.append(_Token("end", "", len(text.encode("utf-8"))))
            return tokens
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), byte_off))
        pos = m.end()


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0
        self.depth = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def _fail(self, expected):
        tok = self.tok
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"unexpected {what}", tok.offset, expected)

    def _after_operand(self):
        closing = ")" if self.depth > 0 else "end"
        return ("+", "-", "*", "/", "^", closing)

    def parse(self):
        e = self.expr()
        if self.tok.kind != "end":
            self._fail(self._after_operand())
        return e

    def expr(self):
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = _SYMBOL_BINARY[self.tok.text]
            self.i += 1
            left = op(left, self.term())
        return left

    def term(self):
        left = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = _SYMBOL_BINARY[self.tok.text]
            self.i += 1
            left = op(left, self.unary())
        return left

    def unary(self):
        if self.tok.kind == "op" and self.tok.text == "-":
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.i += 1
            return Pow(base, self.unary())
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            if tok.text == "t":
                self.i += 1
                return T
            if tok.text not in FUNCTIONS:
                raise UnknownIdentifier(f"unknown identifier {tok.text!r}", tok.offset, _ATOM_START)
            self.i += 1
            if not (self.tok.kind == "op" and self.tok.text == "("):
                self._fail(("(",))
            arg = self._parenthesized()
            return Func(tok.text, arg)
        if tok.kind == "op" and tok.text == "(":
            return self._parenthesized()
        self._fail(_ATOM_START)

    def _parenthesized(self):
        self.i += 1  # consume "("
        self.depth += 1
        inner_expr = self.expr()
        if not (self.tok.kind == "op" and self.tok.text == ")"):
            self._fail(self._after_operand())
        self.depth -= 1
        self.i += 1
        return inner_expr


def parse(text):
    """Parse expression text into an Expr tree.

    Raises:
        ExprSyntaxError: malformed input; ``offset`` is the byte offset of the
            first token that cannot be consumed.
        UnknownIdentifier: a name other than ``t`` or a known function.
    """
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError("empty expression", 0, _ATOM_START)
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

def _format_number(value):
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(float(value))


def _prec(e):
    if isinstance(e, (Add, Sub)):
        return _PREC_ADD
    if isinstance(e, (Mul, Div)):
        return _PREC_MUL
    if isinstance(e, Neg) or (isinstance(e, Num) and e.value < 0):
        return _PREC_NEG
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM


def to_string(e):
    """Render with the minimum parentheses that parse back to the same tree."""
    if isinstance(e, Num):
        return _format_number(e.value)
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, Neg):
        inner_s = to_string(e.arg)
        if _prec(e.arg) < _PREC_NEG:
            inner_s = f"({inner_s})"
        return f"-{inner_s}"
    if isinstance(e, Pow):
        left = to_string(e.left)
        if _prec(e.left) <= _PREC_POW:
            left = f"({left})"
        right = to_string(e.right)
        if _prec(e.right) < _PREC_NEG:
            right = f"({right})"
        return f"{left}^{right}"
    if isinstance(e, _Binary):
        p = _prec(e)
        left = to_string(e.left)
        if _prec(e.left) < p:
            left = f"({left})"
        right = to_string(e.right)
        if _prec(e.right) <= p:
            right = f"({right})"
        return f"{left}{_BINARY_SYMBOL[type(e)]}{right}"
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# evaluation

def _domain_fail(message, node, t, bad):
    t = np.asarray(t)
    where = t if t.ndim == 0 else np.broadcast_to(t, bad.shape)[bad].flat[0]
    raise DomainError(f"{message} in {to_string(node)} at t={float(where)!r}", node, float(where))


def _checked(result, node, t):
    bad = ~np.isfinite(result)
    if np.any(bad):
        _domain_fail("non-finite value", node, t, bad)
    return result


def _ev(e, t):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return t
    if isinstance(e, Neg):
        return -_ev(e.arg, t)
    if isinstance(e, Func):
        a = _ev(e.arg, t)
        name = e.name
        if name == "ln":
            bad = np.asarray(a <= 0)
            if np.any(bad):
                _domain_fail("logarithm of non-positive value", e, t, bad)
            return np.log(a)
        if name == "sqrt":
            bad = np.asarray(a < 0)
            if np.any(bad):
                _domain_fail("square root of negative value", e, t, bad)
            return np.sqrt(a)
        return _checked(_NUMPY_FUNCS[name](a), e, t)
    a = _ev(e.left, t)
    b = _ev(e.right, t)
    if isinstance(e, Add):
        return _checked(a + b, e, t)
    if isinstance(e, Sub):
        return _checked(a - b, e, t)
    if isinstance(e, Mul):
        return _checked(a * b, e, t)
    if isinstance(e, Div):
        bad = np.asarray(b == 0)
        if np.any(bad):
            _domain_fail("division by zero", e, t, bad)
        return _checked(a / b, e, t)
    if isinstance(e, Pow):
        if isinstance(e.right, Num) and e.right.value.is_integer():
            n = e.right.value
            if n < 0:
                bad = np.asarray(a == 0)
                if np.any(bad):
                    _domain_fail("zero raised to a negative power", e, t, bad)
            return _checked(np.power(a, int(n)) if abs(n) < 2**31 else np.power(a, n), e, t)
        # exponents that evaluate to integers (e.g. 3^2) still take the exact power route
        a_arr, b_arr = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
        integral = (b_arr == np.round(b_arr)) & (np.abs(b_arr) < 2**31)
        bad = np.where(integral, (a_arr == 0) & (b_arr < 0), a_arr <= 0)
        if np.any(bad):
            reason = "zero raised to a negative power" if np.any(integral & bad) else "non-positive base with real exponent"
            _domain_fail(reason, e, t, bad)
        whole = np.power(a_arr, np.where(integral, b_arr, 0.0))
        with np.errstate(all="ignore"):
            real = np.exp(b_arr * np.log(np.where(integral, 1.0, a_arr)))
        out = np.where(integral, whole, real)
        return _checked(out if out.ndim else float(out), e, t)
    raise TypeError(f"not an expression: {e!r}")


_NUMPY_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "exp": np.exp,
    "abs": np.abs,
}


def evaluate(e, t):
    """Evaluate ``e`` at ``t`` (float or array) in IEEE double precision."""
    arr = np.asarray(t, dtype=float)
    with np.errstate(all="ignore"):
        out = _ev(e, arr)
    if arr.ndim == 0:
        return float(out)
    return np.broadcast_to(out, arr.shape).astype(float, copy=True)


# ---------------------------------------------------------------------------
# simplification and differentiation

def _is_num(e, value=None):
    return isinstance(e, Num) and (value is None or e.value == value)


def simplify(e):
    """Constant folding plus identity elimination (0+x, 1*x, x^1, 0*x, ...)."""
    if isinstance(e, (Num, Var)):
        return e
    if isinstance(e, Neg):
        a = simplify(e.arg)
        if isinstance(a, Num):
            return Num(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)
    if isinstance(e, Func):
        a = simplify(e.arg)
        out = Func(e.name, a)
        return _fold(out) if isinstance(a, Num) else out
    a = simplify(e.left)
    b = simplify(e.right)
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold(type(e)(a, b))
    if isinstance(e, Add):
        if _is_num(a, 0.0):
            return b
        if _is_num(b, 0.0):
            return a
        return Add(a, b)
    if isinstance(e, Sub):
        if _is_num(b, 0.0):
            return a
        if _is_num(a, 0.0):
            return simplify(Neg(b))
        return Sub(a, b)
    if isinstance(e, Mul):
        if _is_num(a, 0.0) or _is_num(b, 0.0):
            return Num(0.0)
        if _is_num(a, 1.0):
            return b
        if _is_num(b, 1.0):
            return a
        if _is_num(a, -1.0):
            return simplify(Neg(b))
        if _is_num(b, -1.0):
            return simplify(Neg(a))
        return Mul(a, b)
    if isinstance(e, Div):
        if _is_num(b, 1.0):
            return a
        return Div(a, b)
    if isinstance(e, Pow):
        if _is_num(b, 1.0):
            return a
        if _is_num(b, 0.0):
            return Num(1.0)
        return Pow(a, b)
    raise TypeError(f"not an expression: {e!r}")


def _fold(e):
    try:
        return Num(evaluate(e, 0.0))
    except DomainError:
        return e


def _d(e):
    if isinstance(e, Num):
        return Num(0.0)
    if isinstance(e, Var):
        return Num(1.0)
    if isinstance(e, Neg):
        return Neg(_d(e.arg))
    if isinstance(e, Add):
        return Add(_d(e.left), _d(e.right))
    if isinstance(e, Sub):
        return Sub(_d(e.left), _d(e.right))
    if isinstance(e, Mul):
        return Add(Mul(_d(e.left), e.right), Mul(e.left, _d(e.right)))
    if isinstance(e, Div):
        a, b = e.left, e.right
        return Div(Sub(Mul(_d(a), b), Mul(a, _d(b))), Pow(b, Num(2.0)))
    if isinstance(e, Pow):
        a, b = e.left, e.right
        if isinstance(b, Num):
            return Mul(Mul(b, Pow(a, Num(b.value - 1.0))), _d(a))
        # d(a^b) = a^b * (b' ln a + b a'/a)
        return Mul(e, Add(Mul(_d(b), Func("ln", a)), Div(Mul(b, _d(a)), a)))
    if isinstance(e, Func):
        a = e.arg
        da = _d(a)
        name = e.name
        if name == "sin":
            outer = Func("cos", a)
        elif name == "cos":
            outer = Neg(Func("sin", a))
        elif name == "sinh":
            outer = Func("cosh", a)
        elif name == "cosh":
            outer = Func("sinh", a)
        elif name == "tanh":
            outer = Sub(Num(1.0), Pow(Func("tanh", a), Num(2.0)))
        elif name == "exp":
            outer = e
        elif name == "ln":
            return Div(da, a)
        elif name == "sqrt":
            return Div(da, Mul(Num(2.0), e))
        elif name == "abs":
            # sign(a) written as a/abs(a): evaluation fails exactly at the kink
            outer = Div(a, e)
        return Mul(outer, da)
    raise TypeError(f"not an expression: {e!r}")


def differentiate(e):
    """Exact derivative with respect to ``t``, simplified."""
    return simplify(_d(simplify(e)))


def depends_on_t(e):
    if isinstance(e, Var):
        return True
    if isinstance(e, Num):
        return False
    if isinstance(e, (Neg, Func)):
        return depends_on_t(e.arg)
    return depends_on_t(e.left) or depends_on_t(e.right)
