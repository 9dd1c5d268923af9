"""
Noncommutative Core
Words over the alphabet {x, y}, monomial orders, exact coefficient fields,
truncated free-algebra arithmetic and formal substitutions.
"""

import itertools
import logging
import warnings
from dataclasses import dataclass
from enum import Enum, IntEnum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

from sympy import isprime
from sympy.polys.domains import GF, QQ

from errors import FieldError, FieldMismatchError, InvalidInputError, SingularSubstitutionError, SubstitutionError

logger = logging.getLogger(__name__)

# A word is a plain string over "xy"; the empty string is the unit word.
Word = str
LETTERS = "xy"


class Variable(str, Enum):
    X = "x"
    Y = "y"


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class OrderMode(str, Enum):
    LOCAL = "local"
    GLOBAL = "global"


def words_of_degree(d: int) -> List[Word]:
    """All words of degree d in lexicographic order (x before y)."""
    return ["".join(letters) for letters in itertools.product(LETTERS, repeat=d)]


def words_up_to(d: int) -> List[Word]:
    return [w for n in range(d + 1) for w in words_of_degree(n)]


def render_word(w: Word) -> str:
    """Render a word with collapsed powers, e.g. "xxyx" -> "x^2 y x"."""
    if not w:
        return "1"
    parts = []
    for letter, run in itertools.groupby(w):
        n = len(list(run))
        parts.append(letter if n == 1 else f"{letter}^{n}")
    return " ".join(parts)


@dataclass(frozen=True)
class MonomialOrder:
    """
    Degree-lexicographic comparison with a choice of leading-word convention.

    Attributes:
        precedence: two-letter string, first letter is lex-greater ("xy" means x > y)
        mode: local picks the lex-greatest word among minimal-degree words as leading,
              global picks the lex-greatest among maximal-degree words
    """

    precedence: str = "xy"
    mode: OrderMode = OrderMode.LOCAL

    def __post_init__(self):
        if sorted(self.precedence) != ["x", "y"]:
            raise InvalidInputError(f"Precedence must be 'xy' or 'yx', got {self.precedence!r}")
        object.__setattr__(self, "mode", OrderMode(self.mode))

    @property
    def is_local(self) -> bool:
        return self.mode is OrderMode.LOCAL

    def _lex(self, w: Word) -> str:
        # Translated so that a smaller string is the lex-greater word.
        return w if self.precedence == "xy" else w.translate(_SWAP)

    def word_key(self, w: Word) -> Tuple[int, str]:
        """Ascending key: degree ascending, then lex descending by precedence."""
        return (len(w), self._lex(w))

    def reduction_key(self, w: Word) -> Tuple[int, str]:
        """Ascending key whose minimum is the leading word under this order's mode."""
        if self.is_local:
            return (len(w), self._lex(w))
        return (-len(w), self._lex(w))

    def leading_word(self, words: Iterable[Word]) -> Word:
        return min(words, key=self.reduction_key)

    def compare(self, u: Word, v: Word) -> Ordering:
        if len(u) != len(v):
            return Ordering.GREATER if len(u) > len(v) else Ordering.LESS
        lu, lv = self._lex(u), self._lex(v)
        if lu == lv:
            return Ordering.EQUAL
        return Ordering.GREATER if lu < lv else Ordering.LESS

    def to_dict(self) -> Dict[str, str]:
        return {"precedence": self.precedence, "mode": self.mode.value}


_SWAP = str.maketrans("xy", "yx")
DEFAULT_ORDER = MonomialOrder()


def compare_words(u: Word, v: Word, order: MonomialOrder = DEFAULT_ORDER) -> Ordering:
    """
    Compare two words: degree first, then left-to-right lex by precedence.

    Args:
        u: first word
        v: second word
        order: monomial order supplying the precedence

    Returns:
        Ordering of u relative to v
    """
    return order.compare(u, v)


@lru_cache(maxsize=None)
def _domain(characteristic: int):
    return QQ if characteristic == 0 else GF(characteristic)


@dataclass(frozen=True)
class FieldSpec:
    """
    Exact coefficient field: the rationals (characteristic 0) or a prime field.
    """

    characteristic: int = 0

    def __post_init__(self):
        p = self.characteristic
        if p != 0 and (p < 2 or not isprime(p)):
            raise InvalidInputError(f"Prime field needs a prime characteristic, got {p}")

    @property
    def domain(self):
        return _domain(self.characteristic)

    @property
    def is_rational(self) -> bool:
        return self.characteristic == 0

    @property
    def label(self) -> str:
        return "QQ" if self.is_rational else f"GF({self.characteristic})"

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def coerce(self, value: Any):
        """Convert an int, Fraction, "a/b" string or domain element into this field."""
        K = self.domain
        if not isinstance(value, (int, Fraction, str)) and K.of_type(value):
            return value
        if isinstance(value, str):
            try:
                value = Fraction(value.strip())
            except (ValueError, ZeroDivisionError) as e:
                raise FieldError(f"Not an exact rational: {value!r} ({e})")
        if isinstance(value, int):
            return K(value)
        if isinstance(value, Fraction):
            num, den = value.numerator, value.denominator
        else:
            # An element of another domain, most often QQ.
            try:
                num, den = int(QQ.numer(value)), int(QQ.denom(value))
            except Exception as e:
                raise FieldError(f"Cannot coerce {value!r} into {self.label}: {e}")
        if self.is_rational:
            return K(num, den)
        if den % self.characteristic == 0:
            raise FieldError(f"Denominator {den} is not invertible in {self.label}")
        return K(num) / K(den)

    def to_int(self, c) -> int:
        """Canonical representative in [0, p) for prime fields."""
        return int(c) % self.characteristic

    def to_fraction(self, c) -> Fraction:
        if self.is_rational:
            return Fraction(int(QQ.numer(c)), int(QQ.denom(c)))
        return Fraction(self.to_int(c))

    def render(self, c) -> str:
        if not self.is_rational:
            return str(self.to_int(c))
        frac = self.to_fraction(c)
        return str(frac.numerator) if frac.denominator == 1 else f"{frac.numerator}/{frac.denominator}"

    def is_negative(self, c) -> bool:
        return self.is_rational and c < 0

    def inverse(self, c):
        if not c:
            raise FieldError(f"Division by zero in {self.label}")
        return self.one / c

    def warn_small_characteristic(self, context: str) -> None:
        if not self.is_rational and self.characteristic < 7:
            warnings.warn(
                f"{context} over {self.label}: cyclic multiplicities 2, 3, 4 may vanish",
                RuntimeWarning,
                stacklevel=3,
            )


RATIONALS = FieldSpec(0)


def _min_cap(*caps: Optional[int]) -> Optional[int]:
    bounded = [c for c in caps if c is not None]
    return min(bounded) if bounded else None


class FreePoly:
    """
    Exact noncommutative polynomial, truncated at a degree cap.

    Terms map words to nonzero field elements; words above the cap are never stored.
    A cap of None means no truncation.
    """

    __slots__ = ("terms", "field", "cap")

    def __init__(self, terms: Optional[Mapping[Word, Any]] = None, field: FieldSpec = RATIONALS,
                 cap: Optional[int] = None):
        clean: Dict[Word, Any] = {}
        for w, c in (terms or {}).items():
            if cap is not None and len(w) > cap:
                continue
            c = field.coerce(c)
            if c:
                clean[w] = c
        self.terms, self.field, self.cap = clean, field, cap

    @classmethod
    def _raw(cls, terms: Dict[Word, Any], field: FieldSpec, cap: Optional[int]) -> "FreePoly":
        # Terms are already coerced, nonzero and within the cap.
        poly = cls.__new__(cls)
        poly.terms, poly.field, poly.cap = terms, field, cap
        return poly

    @classmethod
    def zero(cls, field: FieldSpec = RATIONALS, cap: Optional[int] = None) -> "FreePoly":
        return cls._raw({}, field, cap)

    @classmethod
    def monomial(cls, word: Word, coeff: Any = 1, field: FieldSpec = RATIONALS,
                 cap: Optional[int] = None) -> "FreePoly":
        return cls({word: coeff}, field, cap)

    @classmethod
    def letter(cls, v: str, field: FieldSpec = RATIONALS, cap: Optional[int] = None) -> "FreePoly":
        return cls.monomial(Variable(v).value, 1, field, cap)

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Word, Any]]:
        return iter(self.terms.items())

    def words(self) -> List[Word]:
        return list(self.terms)

    def coefficient(self, w: Word):
        return self.terms.get(w, self.field.zero)

    def constant_term(self):
        return self.coefficient("")

    def low_degree(self) -> Optional[int]:
        return min(map(len, self.terms)) if self.terms else None

    def max_degree(self) -> Optional[int]:
        return max(map(len, self.terms)) if self.terms else None

    def degree_part(self, d: int) -> "FreePoly":
        return FreePoly._raw({w: c for w, c in self.terms.items() if len(w) == d}, self.field, self.cap)

    def degrees(self) -> List[int]:
        return sorted({len(w) for w in self.terms})

    def is_homogeneous(self, d: Optional[int] = None) -> bool:
        degs = self.degrees()
        return len(degs) <= 1 and (d is None or not degs or degs[0] == d)

    def leading_word(self, order: MonomialOrder = DEFAULT_ORDER) -> Word:
        if not self.terms:
            raise InvalidInputError("The zero polynomial has no leading word")
        return order.leading_word(self.terms)

    def leading_coefficient(self, order: MonomialOrder = DEFAULT_ORDER):
        return self.terms[self.leading_word(order)]

    # -- arithmetic -------------------------------------------------------

    def _check_field(self, other: "FreePoly") -> None:
        if other.field != self.field:
            raise FieldMismatchError(f"Cannot combine {self.field.label} with {other.field.label}")

    def truncate(self, cap: Optional[int]) -> "FreePoly":
        cap = _min_cap(cap, self.cap)
        if cap is None:
            return self
        return FreePoly._raw({w: c for w, c in self.terms.items() if len(w) <= cap}, self.field, cap)

    def with_cap(self, cap: Optional[int]) -> "FreePoly":
        """Replace the cap (dropping terms above it when it shrinks)."""
        terms = self.terms if cap is None else {w: c for w, c in self.terms.items() if len(w) <= cap}
        return FreePoly._raw(dict(terms), self.field, cap)

    def scale(self, c: Any) -> "FreePoly":
        c = self.field.coerce(c)
        if not c:
            return FreePoly.zero(self.field, self.cap)
        return FreePoly._raw({w: a * c for w, a in self.terms.items()}, self.field, self.cap)

    def monic(self, order: MonomialOrder = DEFAULT_ORDER) -> "FreePoly":
        lc = self.leading_coefficient(order)
        try:
            return self.scale(self.field.inverse(lc))
        except FieldError as e:
            raise FieldError(f"Cannot make monic, leading coefficient {self.field.render(lc)}: {e}")

    def __add__(self, other: "FreePoly") -> "FreePoly":
        self._check_field(other)
        cap = _min_cap(self.cap, other.cap)
        out = dict(self.terms) if cap is None else {w: c for w, c in self.terms.items() if len(w) <= cap}
        for w, c in other.terms.items():
            if cap is not None and len(w) > cap:
                continue
            s = out.get(w, self.field.zero) + c
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        return FreePoly._raw(out, self.field, cap)

    def __neg__(self) -> "FreePoly":
        return FreePoly._raw({w: -c for w, c in self.terms.items()}, self.field, self.cap)

    def __sub__(self, other: "FreePoly") -> "FreePoly":
        return self + (-other)

    def __mul__(self, other: Any) -> "FreePoly":
        if isinstance(other, FreePoly):
            return poly_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Any) -> "FreePoly":
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FreePoly):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def map_words(self, fn: Callable[[Word], Iterable[Tuple[Word, int]]]) -> "FreePoly":
        """Linear extension of a word map returning (word, multiplicity) pairs."""
        out: Dict[Word, Any] = {}
        zero = self.field.zero
        for w, c in self.terms.items():
            for image, mult in fn(w):
                if self.cap is not None and len(image) > self.cap:
                    continue
                out[image] = out.get(image, zero) + c * mult
        return FreePoly._raw({w: c for w, c in out.items() if c}, self.field, self.cap)

    # -- rendering --------------------------------------------------------

    def render(self, order: MonomialOrder = DEFAULT_ORDER) -> str:
        """Terms by degree ascending then lex descending, exact coefficients."""
        if not self.terms:
            return "0"
        pieces: List[str] = []
        for i, w in enumerate(sorted(self.terms, key=order.word_key)):
            c = self.terms[w]
            negative = self.field.is_negative(c)
            mag = -c if negative else c
            coeff = self.field.render(mag)
            if not w:
                body = coeff
            elif coeff == "1":
                body = render_word(w)
            else:
                body = f"{coeff} {render_word(w)}"
            if i == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(pieces)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"FreePoly({self.render()!r}, field={self.field.label}, cap={self.cap})"


def poly_mul(f: FreePoly, g: FreePoly, cap: Optional[int] = None) -> FreePoly:
    """
    Concatenation product, truncated to degree <= cap.

    Args:
        f: left factor
        g: right factor
        cap: optional extra truncation on top of the operands' caps

    Returns:
        The product carrying the smallest of the caps

    Raises:
        FieldMismatchError: If f and g live over different fields
    """
    f._check_field(g)
    cap = _min_cap(cap, f.cap, g.cap)
    zero = f.field.zero
    out: Dict[Word, Any] = {}
    right = sorted(g.terms.items(), key=lambda t: len(t[0]))
    for u, a in f.terms.items():
        for v, b in right:
            if cap is not None and len(u) + len(v) > cap:
                break
            w = u + v
            out[w] = out.get(w, zero) + a * b
    return FreePoly._raw({w: c for w, c in out.items() if c}, f.field, cap)


def commutator(f: FreePoly, g: FreePoly) -> FreePoly:
    return poly_mul(f, g) - poly_mul(g, f)


@dataclass(frozen=True)
class Substitution:
    """
    Formal change of variables x -> image_x, y -> image_y.

    Both images must have zero constant term; the substitution is invertible iff its
    linear part is.
    """

    image_x: FreePoly
    image_y: FreePoly
    cap: Optional[int] = None

    def __post_init__(self):
        self.image_x._check_field(self.image_y)
        for v, image in (("x", self.image_x), ("y", self.image_y)):
            if image.constant_term():
                raise SubstitutionError(f"Image of {v} has nonzero constant term: {image.render()}")

    @property
    def field(self) -> FieldSpec:
        return self.image_x.field

    def image(self, v: str) -> FreePoly:
        return self.image_x if v == "x" else self.image_y

    @classmethod
    def identity(cls, field: FieldSpec = RATIONALS, cap: Optional[int] = None) -> "Substitution":
        return cls(FreePoly.letter("x", field, cap), FreePoly.letter("y", field, cap), cap)

    @classmethod
    def scaling(cls, alpha: Any, beta: Any, field: FieldSpec = RATIONALS, cap: Optional[int] = None) -> "Substitution":
        """x -> alpha x, y -> beta y."""
        return cls(FreePoly({"x": alpha}, field, cap), FreePoly({"y": beta}, field, cap), cap)

    @classmethod
    def from_images(cls, images: Mapping[str, FreePoly], cap: Optional[int] = None) -> "Substitution":
        field = next(iter(images.values())).field
        x = images.get("x", FreePoly.letter("x", field, cap))
        y = images.get("y", FreePoly.letter("y", field, cap))
        return cls(x, y, cap)

    def linear_matrix(self) -> Tuple[Tuple[Any, Any], Tuple[Any, Any]]:
        """Rows are (coefficient of x, coefficient of y) in image_x and image_y."""
        return (
            (self.image_x.coefficient("x"), self.image_x.coefficient("y")),
            (self.image_y.coefficient("x"), self.image_y.coefficient("y")),
        )

    def determinant(self):
        (a, b), (c, d) = self.linear_matrix()
        return a * d - b * c

    def is_invertible(self) -> bool:
        return bool(self.determinant())

    def is_identity(self) -> bool:
        return self == Substitution.identity(self.field, self.cap)

    def then(self, other: "Substitution", cap: Optional[int] = None) -> "Substitution":
        """The substitution applying self first and other afterwards."""
        cap = _min_cap(cap, self.cap, other.cap)
        return Substitution(substitute(self.image_x, other, cap), substitute(self.image_y, other, cap), cap)

    def to_dict(self, order: MonomialOrder = DEFAULT_ORDER) -> Dict[str, str]:
        return {"x": self.image_x.render(order), "y": self.image_y.render(order)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Substitution):
            return NotImplemented
        return self.image_x == other.image_x and self.image_y == other.image_y

    __hash__ = None  # type: ignore[assignment]


def substitute(f: FreePoly, s: Substitution, cap: Optional[int] = None) -> FreePoly:
    """
    Replace every letter of f by its image under s.

    Args:
        f: polynomial to transform
        s: substitution with zero constant terms
        cap: truncation degree; the result is exact through it

    Returns:
        Transformed polynomial

    Raises:
        FieldMismatchError: If f and s live over different fields
    """
    f._check_field(s.image_x)
    cap = _min_cap(cap, f.cap, s.cap)
    images = {"x": s.image_x.with_cap(cap), "y": s.image_y.with_cap(cap)}
    one = FreePoly({"": 1}, f.field, cap)
    expanded: Dict[Word, FreePoly] = {"": one}

    def expand(w: Word) -> FreePoly:
        # Memoized over suffixes; every image has low degree >= 1.
        if w not in expanded:
            expanded[w] = poly_mul(images[w[0]], expand(w[1:]), cap)
        return expanded[w]

    zero = f.field.zero
    out: Dict[Word, Any] = {}
    for w in sorted(f.terms, key=len):
        if cap is not None and len(w) > cap:
            continue
        c = f.terms[w]
        for u, a in expand(w).terms.items():
            out[u] = out.get(u, zero) + c * a
    return FreePoly._raw({w: c for w, c in out.items() if c}, f.field, cap)


def invert_substitution(s: Substitution, cap: Optional[int] = None) -> Substitution:
    """
    Inverse of an invertible substitution through degree cap.

    Solves t = L^-1((x, y) - N(t)) by fixed-point iteration, where L is the linear part of s
    and N its higher-degree part; each pass fixes one more degree.

    Raises:
        SingularSubstitutionError: If the linear part is not invertible
    """
    cap = _min_cap(cap, s.cap)
    if cap is None:
        raise InvalidInputError("Inverting a substitution needs a finite cap")
    field = s.field
    det = s.determinant()
    if not det:
        raise SingularSubstitutionError("Linear part of the substitution is singular")
    (a, b), (c, d) = s.linear_matrix()
    inv_det = field.inverse(det)
    inv = ((d * inv_det, -b * inv_det), (-c * inv_det, a * inv_det))

    x, y = FreePoly.letter("x", field, cap), FreePoly.letter("y", field, cap)
    nonlinear = []
    for image in (s.image_x, s.image_y):
        nonlinear.append(FreePoly({w: k for w, k in image.terms.items() if len(w) >= 2}, field, cap))

    def combine(row, u: FreePoly, v: FreePoly) -> FreePoly:
        return u.scale(row[0]) + v.scale(row[1])

    t = Substitution(combine(inv[0], x, y), combine(inv[1], x, y), cap)
    for _ in range(cap):
        rx = x - substitute(nonlinear[0], t, cap)
        ry = y - substitute(nonlinear[1], t, cap)
        nxt = Substitution(combine(inv[0], rx, ry), combine(inv[1], rx, ry), cap)
        if nxt == t:
            break
        t = nxt
    return t


def abelianize_cubic(F3: FreePoly) -> Tuple[Any, Any, Any, Any]:
    """
    Coefficients of x^3, x^2 y, x y^2, y^3 after letting x and y commute.

    Raises:
        InvalidInputError: If F3 is not homogeneous of degree 3
    """
    if not F3.is_homogeneous(3):
        raise InvalidInputError(f"Abelianization needs a homogeneous cubic, got {F3.render()}")
    coeffs = [F3.field.zero] * 4
    for w, c in F3.terms.items():
        coeffs[3 - w.count("x")] += c
    return tuple(coeffs)  # type: ignore[return-value]
