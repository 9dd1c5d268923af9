"""
Expression Parser
Grammar for noncommutative polynomials and potentials: sums of terms, rational
coefficients, powers of x and y, parentheses and cyc(...) for cyclicization.
"""

import logging
from functools import lru_cache
from typing import List, Optional

import lark

from errors import FieldError, ParseError
from nc_core import RATIONALS, FieldSpec, FreePoly, poly_mul
from potential import cyclicize

logger = logging.getLogger(__name__)

GRAMMAR = r"""
start: expr

expr: lead_term (ADDOP term)*
lead_term: ADDOP? term
term: RATIONAL factor*
    | factor+

factor: VAR power?          -> letter
      | "cyc" "(" expr ")"  -> cyc
      | "(" expr ")"        -> group
power: "^" NAT

ADDOP: "+" | "-"
RATIONAL: /[0-9]+(\/[0-9]+)?/
NAT: /[0-9]+/
VAR: "x" | "y"

%import common.WS
%ignore WS
"""


@lru_cache(maxsize=1)
def get_parser() -> lark.Lark:
    return lark.Lark(GRAMMAR, parser="lalr", lexer="contextual", propagate_positions=True)


def _describe(error: lark.exceptions.UnexpectedInput) -> str:
    if isinstance(error, lark.exceptions.UnexpectedCharacters):
        return f"unexpected character {error.char!r}"
    if isinstance(error, lark.exceptions.UnexpectedEOF):
        return "unexpected end of input"
    if isinstance(error, lark.exceptions.UnexpectedToken):
        if error.token.type == "$END":
            return "unexpected end of input"
        return f"unexpected {str(error.token)!r}"
    return str(error)


class _Evaluator:
    def __init__(self, field: FieldSpec, cap: Optional[int]):
        self.field, self.cap = field, cap

    def unit(self) -> FreePoly:
        return FreePoly({"": 1}, self.field, self.cap)

    def expr(self, node: lark.Tree, in_cyc: bool) -> FreePoly:
        children = node.children
        total = self.lead_term(children[0], in_cyc)
        for sign, term in zip(children[1::2], children[2::2]):
            value = self.term(term, in_cyc)
            total = total - value if str(sign) == "-" else total + value
        return total

    def lead_term(self, node: lark.Tree, in_cyc: bool) -> FreePoly:
        if len(node.children) == 2:
            sign, term = node.children
            value = self.term(term, in_cyc)
            return -value if str(sign) == "-" else value
        return self.term(node.children[0], in_cyc)

    def term(self, node: lark.Tree, in_cyc: bool) -> FreePoly:
        factors = node.children
        if factors and isinstance(factors[0], lark.Token):
            token, factors = factors[0], factors[1:]
            try:
                coeff = self.field.coerce(str(token))
            except FieldError as e:
                raise ParseError(f"coefficient {token} is not a valid element of {self.field.label}",
                                 token.start_pos) from e
        else:
            coeff = self.field.one
        value = self.unit().scale(coeff)
        for factor in factors:
            value = poly_mul(value, self.factor(factor, in_cyc), self.cap)
        if in_cyc and not factors:
            raise ParseError("degree-0 word inside cyc", node.meta.start_pos)
        return value

    def factor(self, node: lark.Tree, in_cyc: bool) -> FreePoly:
        if node.data == "letter":
            var = str(node.children[0])
            power = 1
            if len(node.children) == 2:
                nat = node.children[1].children[0]
                power = int(str(nat))
                if power == 0 and in_cyc:
                    raise ParseError("exponent 0 inside cyc", nat.start_pos)
            return FreePoly.monomial(var * power, 1, self.field, self.cap)
        if node.data == "cyc":
            body = self.expr(node.children[0], True)
            if body.constant_term():
                raise ParseError("degree-0 word inside cyc", node.meta.start_pos)
            return cyclicize(body)
        return self.expr(node.children[0], in_cyc)


def parse_poly(text: str, field: FieldSpec = RATIONALS, cap: Optional[int] = None) -> FreePoly:
    """
    Parse a polynomial expression.

    Args:
        text: e.g. "x^3 + y^3 + cyc(x y x y)" or "1/3 y x y - x^2"
        field: coefficient field
        cap: truncation degree

    Returns:
        The parsed polynomial

    Raises:
        ParseError: On a syntax error (with character offset), a degree-0 word inside cyc
            or a coefficient that is not an element of the field
    """
    try:
        tree = get_parser().parse(text)
    except lark.exceptions.UnexpectedInput as e:
        position = e.pos_in_stream if e.pos_in_stream is not None and e.pos_in_stream >= 0 else len(text)
        raise ParseError(_describe(e), position)
    return _Evaluator(field, cap).expr(tree.children[0], False)


def parse_relations(text: str, field: FieldSpec = RATIONALS, cap: Optional[int] = None) -> List[FreePoly]:
    """Parse a comma-separated relation list."""
    parts = text.split(",")
    out, offset = [], 0
    for part in parts:
        try:
            out.append(parse_poly(part, field, cap))
        except ParseError as e:
            pos = None if e.position is None else e.position + offset
            raise ParseError(e.message, pos)
        offset += len(part) + 1
    return out


def parse_field_label(label: str) -> FieldSpec:
    """"QQ" or "GF(p)" (a bare prime is accepted too)."""
    label = str(label).strip()
    if label in ("QQ", "0", ""):
        return RATIONALS
    digits = label[3:-1] if label.startswith("GF(") and label.endswith(")") else label
    if not digits.isdigit():
        raise ParseError(f"unknown field {label!r}")
    return FieldSpec(int(digits))
