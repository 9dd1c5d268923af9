"""
Potentials
Cyclic potentials, the two cyclic-derivative conventions, relation extraction,
syzygy identities and cyclic-class coordinates.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

from errors import InvalidInputError
from nc_core import (
    DEFAULT_ORDER,
    FieldSpec,
    FreePoly,
    MonomialOrder,
    Variable,
    Word,
    commutator,
    poly_mul,
    words_of_degree,
)

logger = logging.getLogger(__name__)


class DerivativeMode(str, Enum):
    SIMPLE = "simple"
    GINZBURG = "ginzburg"


@dataclass(frozen=True)
class Potential:
    """
    A polynomial with zero constant term together with the derivative convention used
    to extract its relations.
    """

    body: FreePoly
    derivative_mode: DerivativeMode = DerivativeMode.SIMPLE

    def __post_init__(self):
        if self.body.constant_term():
            raise InvalidInputError(f"Potential has a nonzero constant term: {self.body.render()}")
        object.__setattr__(self, "derivative_mode", DerivativeMode(self.derivative_mode))

    @property
    def field(self) -> FieldSpec:
        return self.body.field

    @property
    def cap(self) -> Optional[int]:
        return self.body.cap

    def graded_part(self, d: int) -> FreePoly:
        return self.body.degree_part(d)

    def with_mode(self, mode: DerivativeMode) -> "Potential":
        return Potential(self.body, DerivativeMode(mode))

    def render(self) -> str:
        return self.body.render()


def rotations(w: Word) -> List[Word]:
    """All |w| rotations of w, duplicates included."""
    if not w:
        return [w]
    return [w[i:] + w[:i] for i in range(len(w))]


def cyclicize(f: FreePoly) -> FreePoly:
    """Linear extension of w -> sum of all rotations of w."""
    return f.map_words(lambda w: ((r, 1) for r in rotations(w)))


def derive_simple(f: FreePoly, v: str) -> FreePoly:
    """Words starting with v lose that letter; every other word maps to 0."""
    v = Variable(v).value
    return f.map_words(lambda w: [(w[1:], 1)] if w[:1] == v else [])


def derive_ginzburg(f: FreePoly, v: str) -> FreePoly:
    """For each occurrence of v, the rotation starting just after it with v removed."""
    v = Variable(v).value
    return f.map_words(lambda w: [(w[i + 1:] + w[:i], 1) for i, c in enumerate(w) if c == v])


def derive(f: FreePoly, v: str, mode: DerivativeMode = DerivativeMode.SIMPLE) -> FreePoly:
    if DerivativeMode(mode) is DerivativeMode.GINZBURG:
        return derive_ginzburg(f, v)
    return derive_simple(f, v)


def relations_of(F: Potential, normalize: bool = False,
                 order: MonomialOrder = DEFAULT_ORDER) -> Tuple[FreePoly, FreePoly]:
    """
    The two cyclic derivatives of a potential in its derivative mode.

    Args:
        F: the potential
        normalize: make each relation monic (rationals only)
        order: order deciding the leading coefficient for normalization

    Returns:
        (dF/dx, dF/dy)
    """
    if F.body.is_zero():
        logger.warning("Zero potential: both relations vanish")
        zero = FreePoly.zero(F.field, F.cap)
        return zero, zero
    F.field.warn_small_characteristic("Deriving a potential")
    rx, ry = derive(F.body, "x", F.derivative_mode), derive(F.body, "y", F.derivative_mode)
    if normalize:
        if F.field.is_rational:
            rx, ry = (r.monic(order) if r else r for r in (rx, ry))
        else:
            logger.debug(f"Skipping relation normalization over {F.field.label}")
    return rx, ry


def syzygy_residual(F: Potential) -> Tuple[FreePoly, FreePoly]:
    """
    Residuals of the two syzygy identities, with simple derivatives.

    r1 = F - x dF/dx - y dF/dy vanishes for every F with zero constant term;
    r2 = [x, dF/dx] + [y, dF/dy] vanishes exactly when F is cyclically invariant.
    """
    f = F.body
    x, y = FreePoly.letter("x", f.field, f.cap), FreePoly.letter("y", f.field, f.cap)
    dx, dy = derive_simple(f, "x"), derive_simple(f, "y")
    r1 = f - poly_mul(x, dx) - poly_mul(y, dy)
    r2 = commutator(x, dx) + commutator(y, dy)
    return r1, r2


def cyclic_representative(w: Word) -> Word:
    """The lex-greatest rotation (x > y) naming the cyclic class of w."""
    return min(rotations(w))


def class_size(rep: Word) -> int:
    return len(set(rotations(rep)))


def cyclic_class_coordinates(f: FreePoly) -> Dict[Word, Any]:
    """Map each cyclic class representative to the sum of f's coefficients over the class."""
    zero = f.field.zero
    coords: Dict[Word, Any] = {}
    for w, c in f.terms.items():
        rep = cyclic_representative(w)
        coords[rep] = coords.get(rep, zero) + c
    return {rep: c for rep, c in coords.items() if c}


def from_class_coordinates(coords: Dict[Word, Any], field: FieldSpec, cap: Optional[int] = None) -> FreePoly:
    """The cyclically invariant polynomial with the given class coordinates."""
    terms: Dict[Word, Any] = {}
    for rep, s in coords.items():
        members = set(rotations(rep))
        share = field.coerce(s) / field.coerce(len(members))
        for r in members:
            terms[r] = share
    return FreePoly(terms, field, cap)


def cyclically_symmetrize(f: FreePoly) -> FreePoly:
    """Spread each class sum evenly over the class; cyclically equivalent inputs agree."""
    return from_class_coordinates(cyclic_class_coordinates(f), f.field, f.cap)


def is_cyclically_invariant(f: FreePoly) -> bool:
    return f == cyclically_symmetrize(f)


def cyclically_equivalent(f: FreePoly, g: FreePoly) -> bool:
    return cyclic_class_coordinates(f - g) == {}


def classes_of_degree(d: int, words: Optional[Iterable[Word]] = None) -> List[Word]:
    """Cyclic class representatives of degree d, sorted lex-greatest first."""
    source = words if words is not None else words_of_degree(d)
    return sorted({cyclic_representative(w) for w in source if len(w) == d})
