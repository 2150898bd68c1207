"""
Parser de la forma de texto de polinomios e invariantes.

Gramática (descenso recursivo):
    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' exponent)?
    atom   := INT | VAR | 'ln' '(' expr ')' | '(' expr ')'

Variables: n_i_k, x_a; también n_ik cuando ambos índices tienen un dígito y
x a secas si el universo tiene un único x.
"""
import logging
import re
from fractions import Fraction

from utils.errors import ExpressionSyntaxError, NonRationalValue, RangeError
from utils.expressions import InvariantExpr
from utils.polynomials import VarId, poly_to_text

logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")
FULL_NAME = re.compile(r"n_(\d+)_(\d+)$")
COMPACT_NAME = re.compile(r"n_(\d)(\d)$")
X_NAME = re.compile(r"x_?(\d+)$")


def tokenize(text):
    tokens = []
    position = 0
    text = text.rstrip()
    while position < len(text):
        match = TOKEN_PATTERN.match(text, position)
        if not match or match.end() == position:
            raise ExpressionSyntaxError(f"carácter inesperado {text[position]!r}", position, text)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        position = match.end()
    tokens.append(('end', '', len(text)))
    return tokens


class _Parser:
    def __init__(self, text, uni):
        self.text = text
        self.uni = uni
        self.field = uni.field
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, value):
        kind, token, where = self.advance()
        if token != value:
            raise ExpressionSyntaxError(f"se esperaba {value!r} y se encontró {token or 'fin'!r}", where, self.text)

    def error(self, message, where=None):
        if where is None:
            where = self.peek()[2]
        return ExpressionSyntaxError(message, where, self.text)

    def parse(self):
        value = self.expr()
        kind, token, where = self.peek()
        if kind != 'end':
            raise self.error(f"símbolo sobrante {token!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ('+', '-'):
            op = self.advance()[1]
            rhs = self.term()
            value = value + rhs if op == '+' else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[1] in ('*', '/'):
            op, where = self.advance()[1:]
            rhs = self.unary()
            if op == '*':
                try:
                    value = value * rhs
                except ValueError as exc:
                    raise self.error(str(exc), where) from None
            else:
                try:
                    value = value / rhs
                except (ValueError, ZeroDivisionError) as exc:
                    raise self.error(str(exc), where) from None
        return value

    def unary(self):
        op = self.peek()[1]
        if op in ('+', '-'):
            self.advance()
            value = self.unary()
            return -value if op == '-' else value
        return self.power()

    def power(self):
        where = self.peek()[2]
        base = self.atom()
        if self.peek()[1] != '^':
            return base
        self.advance()
        exponent = self.exponent()
        return self._raise(base, exponent, where)

    def exponent(self):
        kind, token, where = self.peek()
        if kind == 'num':
            self.advance()
            return Fraction(int(token))
        if token == '-':
            self.advance()
            return -self.exponent()
        if token == '(':
            self.advance()
            value = self.expr()
            self.expect(')')
            return self._constant(value, where)
        raise self.error("exponente inválido", where)

    def _constant(self, value, where):
        if value.is_polynomial:
            p = value.to_polynomial()
            if p.is_ground:
                coeff = p.LC if p else 0
                return Fraction(int(coeff.numerator), int(coeff.denominator)) if p else Fraction(0)
        raise self.error("el exponente debe ser un racional constante", where)

    def _raise(self, base, exponent, where):
        if exponent.denominator == 1:
            try:
                return base ** int(exponent)
            except (ValueError, ZeroDivisionError) as exc:
                raise self.error(str(exc), where) from None
        if not base.is_polynomial:
            raise self.error("solo un polinomio admite exponente fraccionario", where)
        p = base.to_polynomial()
        if not p:
            raise self.error("potencia fraccionaria de cero", where)
        return InvariantExpr.power_product([(p, exponent)], field=self.field)

    def atom(self):
        kind, token, where = self.advance()
        if kind == 'num':
            return InvariantExpr.constant(self.field, int(token))
        if token == '(':
            value = self.expr()
            self.expect(')')
            return value
        if kind == 'name':
            if token == 'ln':
                self.expect('(')
                arg_where = self.peek()[2]
                argument = self.expr()
                self.expect(')')
                try:
                    q = argument.to_polynomial()
                except NonRationalValue:
                    raise self.error("el argumento de ln debe ser un polinomio", arg_where) from None
                if q.is_ground:
                    raise self.error("el argumento de ln debe ser no constante", arg_where)
                return InvariantExpr.log(q)
            return InvariantExpr.from_poly(self.variable(token, where))
        raise self.error(f"símbolo inesperado {token or 'fin'!r}", where)

    def variable(self, token, where):
        var = resolve_variable(token, self.uni)
        if var is None:
            raise self.error(f"identificador desconocido {token!r}", where)
        try:
            return self.uni.gen(var)
        except RangeError as exc:
            raise self.error(str(exc), where) from None


def resolve_variable(token, uni):
    """Convierte un nombre de variable en VarId, o None si no es válido"""
    match = FULL_NAME.match(token) or COMPACT_NAME.match(token)
    if match:
        return VarId.n(int(match.group(1)), int(match.group(2)))
    match = X_NAME.match(token)
    if match:
        return VarId.x(int(match.group(1)))
    if token == 'x' and uni.f == 1:
        return VarId.x(1)
    return None


def parse_expression(text, uni):
    """
    Parsea un invariante en forma de texto.

    Args:
        text: expresión, por ejemplo "2*n_1_3*n_2_4/n_1_4^2 - ln(n_1_4)"
        uni: universo donde se resuelven las variables

    Returns:
        InvariantExpr
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError("expresión vacía", 0, text)
    expr = _Parser(text, uni).parse()
    for qa, qb, common in expr.shared_log_factors():
        logger.warning("ln(%s) y ln(%s) comparten el factor %s", poly_to_text(qa), poly_to_text(qb), poly_to_text(common))
    return expr


def parse_polynomial(text, uni):
    expr = parse_expression(text, uni)
    if not expr.is_polynomial:
        raise ExpressionSyntaxError("el texto no describe un polinomio", None, text)
    return expr.to_polynomial()
