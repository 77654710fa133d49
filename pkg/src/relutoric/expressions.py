"""A small expression language for homogeneous piecewise linear functions.

Grammar (whitespace insensitive, rationals written p/q or as integers):

    expr := ['+'|'-'] term { ('+'|'-') term }
    term := [rational '*'] atom
    atom := 'max(' expr {',' expr} ')' | 'min(' expr {',' expr} ')'
          | var | rational
    var  := 'x1' .. 'xN'

min is canonicalized at parse time to -max(-...), so downstream code only
ever sees max nodes.  Nonzero constants are rejected unless they cancel:
the compiled function must be positively homogeneous.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InhomogeneousConstant, ParseError, UnknownVariable
from .exact_math import frac, ratvec, sign_canonical, rational_to_primitive, vadd, vneg, vscale
from .divisor import SupportFunction, slopes_by_evaluation
from .fan import EXTENDED, Hyperplane, augmented_central_fan, merge_hyperplanes


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Scale:
    coeff: Fraction
    arg: "Expr"


@dataclass(frozen=True)
class Sum:
    terms: tuple["Expr", ...]


@dataclass(frozen=True)
class Max:
    args: tuple["Expr", ...]


Expr = Var | Const | Neg | Scale | Sum | Max


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str):
        if self.peek() != char:
            raise ParseError(self.pos, f"expected '{char}'")
        self.pos += 1

    def try_char(self, char: str) -> bool:
        if self.peek() == char:
            self.pos += 1
            return True
        return False

    def number(self) -> Fraction:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError(start, "expected a number")
        numerator = int(self.text[start:self.pos])
        save = self.pos
        if self.try_char("/"):
            self.skip_ws()
            dstart = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == dstart:
                self.pos = save
                return Fraction(numerator)
            return Fraction(numerator, int(self.text[dstart:self.pos]))
        return Fraction(numerator)

    def word(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum()):
            self.pos += 1
        return self.text[start:self.pos]


def parse_expression(text: str, dim: int) -> Expr:
    """Parse, resolve variables against the declared dimension, and verify
    positive homogeneity (constants must cancel)."""
    lexer = _Lexer(text)
    expr = _parse_expr(lexer, dim)
    lexer.skip_ws()
    if lexer.pos != len(text):
        raise ParseError(lexer.pos, "trailing input")
    _check_homogeneous(expr, dim)
    return expr


def _parse_expr(lexer: _Lexer, dim: int) -> Expr:
    terms = []
    negate = False
    if lexer.try_char("-"):
        negate = True
    else:
        lexer.try_char("+")
    term = _parse_term(lexer, dim)
    terms.append(Neg(term) if negate else term)
    while True:
        ch = lexer.peek()
        if ch == "+":
            lexer.pos += 1
            terms.append(_parse_term(lexer, dim))
        elif ch == "-":
            lexer.pos += 1
            terms.append(Neg(_parse_term(lexer, dim)))
        else:
            break
    if len(terms) == 1:
        return terms[0]
    return Sum(tuple(terms))


def _parse_term(lexer: _Lexer, dim: int) -> Expr:
    if lexer.peek().isdigit():
        value = lexer.number()
        if lexer.try_char("*"):
            return Scale(value, _parse_atom(lexer, dim))
        return Const(value)
    return _parse_atom(lexer, dim)


def _parse_atom(lexer: _Lexer, dim: int) -> Expr:
    ch = lexer.peek()
    if ch.isdigit():
        return Const(lexer.number())
    if not ch.isalpha():
        raise ParseError(lexer.pos, "expected max, min, a variable or a number")
    start = lexer.pos
    word = lexer.word()
    if word in ("max", "min"):
        lexer.expect("(")
        args = [_parse_expr(lexer, dim)]
        while lexer.try_char(","):
            args.append(_parse_expr(lexer, dim))
        lexer.expect(")")
        if word == "max":
            return Max(tuple(args))
        return Neg(Max(tuple(Neg(a) for a in args)))
    if word.startswith("x") and word[1:].isdigit():
        index = int(word[1:])
        if not 1 <= index <= dim:
            raise UnknownVariable(f"{word} outside declared dimension {dim}")
        return Var(index)
    raise ParseError(start, f"unknown name '{word}'")


def format_expression(expr: Expr) -> str:
    """Canonical text form; parse(format(e)) is structurally equal to e for
    parser-produced trees."""
    if isinstance(expr, Var):
        return f"x{expr.index}"
    if isinstance(expr, Const):
        return _format_rational(expr.value)
    if isinstance(expr, Neg):
        return "-" + format_expression(expr.arg)
    if isinstance(expr, Scale):
        return f"{_format_rational(expr.coeff)}*{format_expression(expr.arg)}"
    if isinstance(expr, Max):
        return "max(" + ", ".join(format_expression(a) for a in expr.args) + ")"
    if isinstance(expr, Sum):
        parts = [format_expression(expr.terms[0])]
        for term in expr.terms[1:]:
            if isinstance(term, Neg):
                parts.append(" - " + format_expression(term.arg))
            else:
                parts.append(" + " + format_expression(term))
        return "".join(parts)
    raise TypeError(f"not an expression node: {expr!r}")


def _format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# ---------------------------------------------------------------------------
# semantics
# ---------------------------------------------------------------------------

def evaluate_expression(expr: Expr, point) -> Fraction:
    point = ratvec(point)
    return _eval(expr, point)


def _eval(expr: Expr, point) -> Fraction:
    if isinstance(expr, Var):
        return point[expr.index - 1]
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Neg):
        return -_eval(expr.arg, point)
    if isinstance(expr, Scale):
        return expr.coeff * _eval(expr.arg, point)
    if isinstance(expr, Sum):
        return sum(_eval(t, point) for t in expr.terms)
    if isinstance(expr, Max):
        return max(_eval(a, point) for a in expr.args)
    raise TypeError(f"not an expression node: {expr!r}")


def affine_forms(expr: Expr, dim: int) -> set:
    """All affine forms (slope, constant) the expression can take on linear
    pieces; an overapproximation for nested maxima."""
    zero = tuple(Fraction(0) for _ in range(dim))
    if isinstance(expr, Var):
        slope = tuple(Fraction(1) if i == expr.index - 1 else Fraction(0)
                      for i in range(dim))
        return {(slope, Fraction(0))}
    if isinstance(expr, Const):
        return {(zero, expr.value)}
    if isinstance(expr, Neg):
        return {(vneg(s), -c) for s, c in affine_forms(expr.arg, dim)}
    if isinstance(expr, Scale):
        return {(vscale(expr.coeff, s), expr.coeff * c)
                for s, c in affine_forms(expr.arg, dim)}
    if isinstance(expr, Sum):
        forms = {(zero, Fraction(0))}
        for term in expr.terms:
            forms = {(vadd(s1, s2), c1 + c2)
                     for s1, c1 in forms
                     for s2, c2 in affine_forms(term, dim)}
        return forms
    if isinstance(expr, Max):
        out = set()
        for arg in expr.args:
            out |= affine_forms(arg, dim)
        return out
    raise TypeError(f"not an expression node: {expr!r}")


def _check_homogeneous(expr: Expr, dim: int) -> None:
    for node in _walk(expr):
        if isinstance(node, Max):
            for arg in node.args:
                for _, const in affine_forms(arg, dim):
                    if const != 0:
                        raise InhomogeneousConstant(
                            f"constant {const} inside max breaks homogeneity")
    for _, const in affine_forms(expr, dim):
        if const != 0:
            raise InhomogeneousConstant(
                f"constant {const} breaks homogeneity")


def _walk(expr: Expr):
    yield expr
    if isinstance(expr, Neg):
        yield from _walk(expr.arg)
    elif isinstance(expr, Scale):
        yield from _walk(expr.arg)
    elif isinstance(expr, Sum):
        for t in expr.terms:
            yield from _walk(t)
    elif isinstance(expr, Max):
        for a in expr.args:
            yield from _walk(a)


# ---------------------------------------------------------------------------
# compilation to a support function
# ---------------------------------------------------------------------------

def candidate_hyperplanes(expr: Expr, dim: int) -> tuple[Hyperplane, ...]:
    """Pairwise differences of the possible linear forms of max arguments;
    every locus where the compiled function can bend lies on one of these."""
    normals = []
    for node in _walk(expr):
        if not isinstance(node, Max):
            continue
        form_sets = [affine_forms(arg, dim) for arg in node.args]
        for i in range(len(form_sets)):
            for j in range(i + 1, len(form_sets)):
                for si, _ in form_sets[i]:
                    for sj, _ in form_sets[j]:
                        diff = tuple(a - b for a, b in zip(si, sj))
                        if any(x != 0 for x in diff):
                            normal = sign_canonical(rational_to_primitive(diff))
                            if normal not in normals:
                                normals.append(normal)
    return tuple(Hyperplane(n, EXTENDED) for n in normals)


def compile_expression(expr: Expr, dim: int) -> SupportFunction:
    """Support function of a parsed expression: central fan of the candidate
    hyperplanes (synthetically augmented when rank-deficient), slopes by
    exact evaluation on each maximal cone."""
    _check_homogeneous(expr, dim)
    planes = merge_hyperplanes(candidate_hyperplanes(expr, dim))
    fan = augmented_central_fan(planes, dim)
    return slopes_by_evaluation(fan, lambda p: evaluate_expression(expr, p))


def parse_and_compile(text: str, dim: int) -> SupportFunction:
    return compile_expression(parse_expression(text, dim), dim)
