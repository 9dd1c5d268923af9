"""
Quotient Algebras
Normal-word bases, Hilbert functions, finiteness certificates, multiplication tables
and linear-algebra isomorphism invariants.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import InvalidInputError, NotFiniteError, ResourceCapExceeded
from expr_parser import parse_field_label
from linear import rank, rref
from nc_core import DEFAULT_ORDER, FieldSpec, FreePoly, MonomialOrder, Word
from rewrite import RewriteSystem, complete, normal_form
from settings import WorkbenchSettings, get_settings

logger = logging.getLogger(__name__)

Vector = List[Any]


class Growth(str, Enum):
    BOUNDED_CONSTANT = "bounded-constant"
    GROWING = "growing"


def word_label(w: Word) -> str:
    return w if w else "1"


def label_word(label: str) -> Word:
    return "" if label == "1" else label


@dataclass
class StructureTable:
    """
    Structure constants of a unital algebra on a basis of words.

    products[(i, j)] holds the nonzero coordinates of e_i * e_j; index 0 is the unit.
    """

    field: FieldSpec
    words: List[Word]
    products: Dict[Tuple[int, int], Dict[int, Any]]

    def __post_init__(self):
        if not self.words or self.words[0] != "":
            raise InvalidInputError("The first basis element must be the unit word")

    @property
    def dim(self) -> int:
        return len(self.words)

    @property
    def degrees(self) -> List[int]:
        return [len(w) for w in self.words]

    @property
    def unit_index(self) -> int:
        return 0

    def index(self, w: Word) -> int:
        return self.words.index(w)

    def radical_indices(self) -> List[int]:
        return [i for i, w in enumerate(self.words) if w]

    def zero_vector(self) -> Vector:
        return [self.field.zero] * self.dim

    def basis_vector(self, i: int) -> Vector:
        v = self.zero_vector()
        v[i] = self.field.one
        return v

    def product(self, i: int, j: int) -> Dict[int, Any]:
        return self.products.get((i, j), {})

    def multiply(self, a: Sequence[Any], b: Sequence[Any]) -> Vector:
        out = self.zero_vector()
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                for k, c in self.product(i, j).items():
                    out[k] += ai * bj * c
        return out

    def check_associative(self) -> Optional[Tuple[int, int, int]]:
        """First basis triple (i, j, k) with (e_i e_j) e_k != e_i (e_j e_k), or None."""
        n = self.dim
        basis = [self.basis_vector(i) for i in range(n)]
        for i in range(n):
            for j in range(n):
                ij = self.multiply(basis[i], basis[j])
                for k in range(n):
                    if self.multiply(ij, basis[k]) != self.multiply(basis[i], self.multiply(basis[j], basis[k])):
                        return (i, j, k)
        return None

    def to_array(self) -> np.ndarray:
        """Dense int64 tensor T[i, j, k] with entries in [0, p); prime fields only."""
        if self.field.is_rational:
            raise InvalidInputError("Dense tensors are only built over prime fields")
        T = np.zeros((self.dim, self.dim, self.dim), dtype=np.int64)
        for (i, j), coords in self.products.items():
            for k, c in coords.items():
                T[i, j, k] = self.field.to_int(c)
        return T

    def to_json(self) -> Dict[str, Any]:
        n = self.dim
        table = {}
        for i in range(n):
            for j in range(n):
                vec = self.zero_vector()
                for k, c in self.product(i, j).items():
                    vec[k] = c
                table[f"{word_label(self.words[i])},{word_label(self.words[j])}"] = [self.field.render(c) for c in vec]
        return {"basis": [word_label(w) for w in self.words], "field": self.field.label, "table": table}

    @classmethod
    def from_json(cls, data: Dict[str, Any], field: Optional[FieldSpec] = None) -> "StructureTable":
        """Read the quotient JSON format; an explicit field reduces rational entries into it."""
        try:
            words = [label_word(w) for w in data["basis"]]
            field = field or parse_field_label(data.get("field", "QQ"))
            index = {w: i for i, w in enumerate(words)}
            products: Dict[Tuple[int, int], Dict[int, Any]] = {}
            for key, vec in data["table"].items():
                left, right = key.split(",")
                coords = {k: field.coerce(str(c)) for k, c in enumerate(vec)}
                coords = {k: c for k, c in coords.items() if c}
                if coords:
                    products[(index[label_word(left)], index[label_word(right)])] = coords
        except (KeyError, ValueError, AttributeError) as e:
            raise InvalidInputError(f"Malformed algebra JSON: {e}")
        return cls(field, words, products)


@dataclass
class QuotientAlgebra:
    """
    Normal-word basis and Hilbert data of K<<x,y>>/I.

    Attributes:
        system: the completed rewrite system
        normal_basis: normal words sorted by degree, then lex-greatest first
        hilbert: h_n for n up to the first empty degree (finite) or complete_through
        finite: whether an empty degree was found within the certified range
        first_empty_degree: that degree, when finite
        growth: trend flag for inconclusive runs
        table: structure constants once mult_table has run
    """

    system: RewriteSystem
    normal_basis: List[Word]
    hilbert: List[int]
    finite: bool
    first_empty_degree: Optional[int] = None
    growth: Optional[Growth] = None
    uncertified_counts: List[int] = dc_field(default_factory=list)
    table: Optional[StructureTable] = None

    @property
    def field(self) -> FieldSpec:
        return self.system.field

    @property
    def order(self) -> MonomialOrder:
        return self.system.order

    @property
    def total_dimension(self) -> Optional[int]:
        return sum(self.hilbert) if self.finite else None

    @property
    def nilpotency_index(self) -> Optional[int]:
        return self.first_empty_degree

    def by_degree(self) -> Dict[int, List[Word]]:
        out: Dict[int, List[Word]] = {}
        for w in self.normal_basis:
            out.setdefault(len(w), []).append(w)
        return out

    def summary(self) -> Dict[str, Any]:
        return {
            "hilbert": self.hilbert,
            "total": self.total_dimension,
            "finite": self.finite,
            "first_empty_degree": self.first_empty_degree,
            "nilpotency_index": self.nilpotency_index,
            "growth": self.growth.value if self.growth else None,
            "cap": self.system.cap,
            "complete_through": self.system.complete_through,
        }

    def to_json(self, include_table: bool = True) -> Dict[str, Any]:
        data = self.summary()
        data["basis"] = [word_label(w) for w in self.normal_basis]
        data["field"] = self.field.label
        if include_table and self.finite:
            data["table"] = mult_table(self).to_json()["table"]
        return data


def _normal_words_by_degree(G: RewriteSystem, limit: int) -> List[List[Word]]:
    # Normal words are factor-closed, so every normal word extends a shorter one.
    levels: List[List[Word]] = [[""]]
    for _ in range(limit):
        nxt = [w + c for w in levels[-1] for c in "xy" if G.is_normal(w + c)]
        levels.append(nxt)
        if not nxt:
            break
    return levels


def hilbert(G: RewriteSystem) -> QuotientAlgebra:
    """
    Count normal words per degree.

    The algebra is certified finite when some degree n <= complete_through has no normal words;
    otherwise the counts through complete_through are reported with a growth flag.
    """
    levels = _normal_words_by_degree(G, G.cap)
    counts = [len(level) for level in levels]
    certified = counts[: G.complete_through + 1]
    key = G.order.word_key
    if 0 in certified:
        first_empty = certified.index(0)
        basis = sorted((w for level in levels[:first_empty] for w in level), key=key)
        Q = QuotientAlgebra(G, basis, certified[:first_empty], True, first_empty)
        logger.info(f"Finite quotient of dimension {Q.total_dimension}, hilbert {Q.hilbert}")
        return Q
    tail = certified[-3:]
    growth = Growth.BOUNDED_CONSTANT if len(tail) == 3 and len(set(tail)) == 1 else Growth.GROWING
    basis = sorted((w for level in levels[: G.complete_through + 1] for w in level), key=key)
    logger.warning(f"No empty degree through {G.complete_through}; counts {certified} ({growth.value})")
    return QuotientAlgebra(G, basis, certified, False, None, growth, counts[len(certified):])


def dimension_of(relations: Iterable[FreePoly], cap: Optional[int] = None, order: MonomialOrder = DEFAULT_ORDER,
                 workers: Optional[int] = None, settings: Optional[WorkbenchSettings] = None) -> QuotientAlgebra:
    """
    Complete and count, extending the cap once when finiteness is nearly certified.

    Nearly certified means an empty degree appears beyond complete_through but within the cap.
    """
    settings = settings or get_settings()
    rels = list(relations)
    cap = settings.default_cap if cap is None else cap
    Q = hilbert(complete(rels, order, cap, workers, settings))
    if not Q.finite and 0 in Q.uncertified_counts and settings.extended_cap > cap:
        logger.info(f"Finiteness nearly certified at cap {cap}; extending to {settings.extended_cap}")
        Q = hilbert(complete(rels, order, settings.extended_cap, workers, settings))
    return Q


def mult_table(Q: QuotientAlgebra, workers: Optional[int] = None) -> StructureTable:
    """
    Structure constants: coordinates of normal_form(u v) for basis words u, v.

    Raises:
        NotFiniteError: If Q is not certified finite
    """
    if not Q.finite:
        raise NotFiniteError("Multiplication tables need a finite quotient")
    if Q.table is not None:
        return Q.table
    workers = workers or get_settings().workers
    words = Q.normal_basis
    index = {w: i for i, w in enumerate(words)}
    G = Q.system

    def row(i: int) -> Dict[Tuple[int, int], Dict[int, Any]]:
        out = {}
        for j, v in enumerate(words):
            nf = normal_form(FreePoly.monomial(words[i] + v, 1, G.field, G.cap), G)
            coords = {}
            for w, c in nf.terms.items():
                if w not in index:
                    raise NotFiniteError(f"Normal form of {words[i] + v} leaves the certified basis: {w}")
                coords[index[w]] = c
            if coords:
                out[(i, j)] = coords
        return out

    products: Dict[Tuple[int, int], Dict[int, Any]] = {}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(row, range(len(words))):
            products.update(part)
    Q.table = StructureTable(G.field, list(words), products)
    return Q.table


@dataclass(frozen=True)
class InvariantProfile:
    """Isomorphism invariants computed by exact linear algebra."""

    field: str
    dimension: int
    hilbert: Tuple[int, ...]
    radical_powers: Tuple[int, ...]
    left_annihilator: int
    right_annihilator: int
    two_sided_annihilator: int
    center: int
    square_zero_count: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["hilbert"], data["radical_powers"] = list(self.hilbert), list(self.radical_powers)
        return data

    def mismatches(self, other: "InvariantProfile") -> List[str]:
        keys = ["dimension", "hilbert", "radical_powers", "left_annihilator", "right_annihilator",
                "two_sided_annihilator", "center"]
        if self.square_zero_count is not None and other.square_zero_count is not None:
            keys.append("square_zero_count")
        return [k for k in keys if getattr(self, k) != getattr(other, k)]


def _span_rank(vectors: List[Vector], table: StructureTable) -> int:
    return rank(vectors, table.dim, table.field) if vectors else 0


def _hilbert_from_table(table: StructureTable) -> Tuple[int, ...]:
    counts: Dict[int, int] = {}
    for d in table.degrees:
        counts[d] = counts.get(d, 0) + 1
    return tuple(counts.get(d, 0) for d in range(max(counts) + 1))


def _square_zero_count(table: StructureTable, budget: int) -> int:
    p = table.field.characteristic
    rad = table.radical_indices()
    total = p ** len(rad)
    if total > budget:
        raise ResourceCapExceeded(f"Square-zero count needs {total} elements, budget {budget}")
    T = table.to_array()[np.ix_(rad, rad, range(table.dim))]
    count = 0
    batch = 4096
    for start in range(0, total, batch):
        idx = np.arange(start, min(start + batch, total), dtype=np.int64)
        digits = (idx[:, None] // (p ** np.arange(len(rad), dtype=np.int64))[None, :]) % p
        partial = np.einsum("ni,ijk->njk", digits, T) % p
        squares = np.einsum("nj,njk->nk", digits, partial) % p
        count += int(np.count_nonzero(~squares.any(axis=1)))
    return count


def radical_powers(table: StructureTable) -> Tuple[int, ...]:
    """Dimensions of J, J^2, ... until they vanish or stabilize; each power is kept as an echelon basis."""
    rad = table.radical_indices()
    powers = [len(rad)]
    current = [table.basis_vector(i) for i in rad]
    while powers[-1] > 0:
        products = [table.multiply(v, table.basis_vector(j)) for v in current for j in rad]
        current, _ = rref([v for v in products if any(v)], table.dim, table.field)
        powers.append(len(current))
        if powers[-1] == powers[-2]:
            break
    return tuple(powers)


def invariant_profile(A: Any, square_zero: Optional[bool] = None,
                      settings: Optional[WorkbenchSettings] = None) -> InvariantProfile:
    """
    Hilbert sequence, radical powers, annihilators of the radical, center and (prime fields)
    the number of square-zero elements.

    Args:
        A: QuotientAlgebra or StructureTable
        square_zero: True forces the count, False skips it, None counts when cheap over a prime field

    Raises:
        InvalidInputError: If the square-zero count is requested over the rationals
    """
    settings = settings or get_settings()
    table = mult_table(A) if isinstance(A, QuotientAlgebra) else A
    F, n = table.field, table.dim
    if square_zero and F.is_rational:
        raise InvalidInputError("Square-zero counts need a prime field")
    rad = table.radical_indices()

    def annihilator_rows(side: str) -> List[Vector]:
        rows = []
        for j in rad:
            for k in range(n):
                if side == "left":
                    rows.append([table.product(i, j).get(k, F.zero) for i in range(n)])
                else:
                    rows.append([table.product(j, i).get(k, F.zero) for i in range(n)])
        return rows

    left, right = annihilator_rows("left"), annihilator_rows("right")
    center_rows = [
        [table.product(i, j).get(k, F.zero) - table.product(j, i).get(k, F.zero) for i in range(n)]
        for j in range(n)
        for k in range(n)
    ]
    count = None
    if not F.is_rational and square_zero is not False:
        try:
            count = _square_zero_count(table, settings.square_zero_budget)
        except ResourceCapExceeded:
            if square_zero:
                raise
            logger.info("Skipping square-zero count: over budget")

    return InvariantProfile(
        field=F.label,
        dimension=n,
        hilbert=_hilbert_from_table(table),
        radical_powers=radical_powers(table),
        left_annihilator=n - _span_rank(left, table),
        right_annihilator=n - _span_rank(right, table),
        two_sided_annihilator=n - _span_rank(left + right, table),
        center=n - _span_rank(center_rows, table),
        square_zero_count=count,
    )
