"""
Braces and Trusses
Finite braces and trusses on explicit tables, ideal filtrations, associated graded
structures, the pre-Lie check and the right-distributivity correction series.
"""

import itertools
import json
import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from errors import InvalidInputError, ResourceCapExceeded
from settings import WorkbenchSettings, get_settings

logger = logging.getLogger(__name__)

Triple = Tuple[int, int, int]


@dataclass
class BraceVerdict:
    valid: bool
    failed: Optional[str] = None
    witness: Optional[Tuple[int, ...]] = None
    details: Dict[str, Any] = dc_field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "failed": self.failed,
            "witness": list(self.witness) if self.witness is not None else None,
            **self.details,
        }


@dataclass
class FiniteBrace:
    """
    Abelian group table add (0 is the identity) and a second operation star, a*b.

    The circle operation is a o b = a + b + a*b.
    """

    add: np.ndarray
    star: np.ndarray

    def __post_init__(self):
        self.add = np.asarray(self.add, dtype=np.int64)
        self.star = np.asarray(self.star, dtype=np.int64)
        n = self.add.shape[0]
        for name, table in (("add", self.add), ("star", self.star)):
            if table.shape != (n, n):
                raise InvalidInputError(f"{name} table must be {n}x{n}, got {table.shape}")
            if table.min() < 0 or table.max() >= n:
                raise InvalidInputError(f"{name} table has entries outside 0..{n - 1}")

    @property
    def order(self) -> int:
        return self.add.shape[0]

    @property
    def neg(self) -> np.ndarray:
        """Additive inverses (-1 where none exists)."""
        out = np.full(self.order, -1, dtype=np.int64)
        rows, cols = np.nonzero(self.add == 0)
        for a, b in zip(rows[::-1], cols[::-1]):
            out[a] = b
        return out

    @property
    def circ(self) -> np.ndarray:
        return self.add[self.add, self.star]

    def plus(self, a: int, b: int) -> int:
        return int(self.add[a, b])

    def minus(self, a: int, b: int) -> int:
        return int(self.add[a, self.neg[b]])

    def times(self, a: int, b: int) -> int:
        return int(self.star[a, b])

    def defect(self, a: int, b: int, c: int) -> int:
        """(a+b)*c - a*c - b*c."""
        return self.minus(self.minus(self.times(self.plus(a, b), c), self.times(a, c)), self.times(b, c))

    def linear_part(self) -> "FiniteBrace":
        """The product that filtrations and graded structures are built on."""
        return self


@dataclass
class FiniteTruss(FiniteBrace):
    """Brace-like tables with a*(b+c) = a*b + a*c + alpha(a)."""

    alpha: np.ndarray = dc_field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        super().__post_init__()
        self.alpha = np.asarray(self.alpha, dtype=np.int64)
        if self.alpha.shape != (self.order,):
            raise InvalidInputError(f"alpha must list {self.order} values")

    def linear_part(self) -> FiniteBrace:
        """a*b + alpha(a), additive in b and zero at b = 0."""
        star = self.add[self.star, self.alpha[:, None]]
        return FiniteBrace(self.add, star)


def _first(mask: np.ndarray) -> Optional[Tuple[int, ...]]:
    """Lexicographically first index where mask is False."""
    bad = np.argwhere(~mask)
    return tuple(int(v) for v in bad[0]) if len(bad) else None


def _associativity(table: np.ndarray) -> Optional[Triple]:
    n = table.shape[0]
    idx = np.arange(n)
    lhs = table[table[:, :, None], idx[None, None, :]]
    rhs = table[idx[:, None, None], table[None, :, :]]
    return _first(lhs == rhs)  # type: ignore[return-value]


def _group_failure(table: np.ndarray, name: str) -> Optional[BraceVerdict]:
    n = table.shape[0]
    idx = np.arange(n)
    if not (np.array_equal(table[0], idx) and np.array_equal(table[:, 0], idx)):
        a = int(np.flatnonzero((table[0] != idx) | (table[:, 0] != idx))[0])
        return BraceVerdict(False, f"{name} identity", (0, a))
    witness = _associativity(table)
    if witness:
        return BraceVerdict(False, f"{name} associativity", witness)
    no_inverse = np.flatnonzero(~(table == 0).any(axis=1))
    if len(no_inverse):
        return BraceVerdict(False, f"{name} inverse", (int(no_inverse[0]),))
    return None


def _brace_axiom(B: FiniteBrace) -> np.ndarray:
    """(a*b + a + b)*c == a*c + b*c + a*(b*c), indexed [a, b, c]."""
    add, star = B.add, B.star
    lhs = star[B.circ[:, :, None], np.arange(B.order)[None, None, :]]
    ac = star[:, None, :]
    bc = star[None, :, :]
    a_bc = star[np.arange(B.order)[:, None, None], star[None, :, :]]
    rhs = add[add[ac, bc], a_bc]
    return lhs == rhs


def _left_distributivity(B: FiniteBrace, alpha: Optional[np.ndarray] = None) -> np.ndarray:
    """a*(b+c) == a*b + a*c (+ alpha(a)), indexed [a, b, c]."""
    add, star, n = B.add, B.star, B.order
    idx = np.arange(n)
    lhs = star[idx[:, None, None], add[None, :, :]]
    rhs = add[star[:, :, None], star[:, None, :]]
    if alpha is not None:
        rhs = add[rhs, alpha[:, None, None]]
    return lhs == rhs


def check_brace(B: FiniteBrace) -> BraceVerdict:
    """
    Exhaustive check of the brace axioms.

    (B, +) abelian group, (B, o) group, the brace axiom and left distributivity; the first
    failing axiom is reported with its lexicographically first witness.
    """
    if not np.array_equal(B.add, B.add.T):
        return BraceVerdict(False, "additive commutativity", _first(B.add == B.add.T))
    for table, name in ((B.add, "additive"), (B.circ, "circle")):
        failure = _group_failure(table, name)
        if failure:
            return failure
    for mask, name in ((_brace_axiom(B), "brace axiom"), (_left_distributivity(B), "left distributivity")):
        witness = _first(mask)
        if witness:
            return BraceVerdict(False, name, witness)
    return BraceVerdict(True)


def check_truss(T: FiniteTruss) -> BraceVerdict:
    """
    Abelian group, associative o and a*(b+c) = a*b + a*c + alpha(a).

    Associativity of o here gives (a o b)*c = a*c + b*c + a*(b*c) + 2 alpha(a), so the brace
    axiom is not required.
    """
    if not np.array_equal(T.add, T.add.T):
        return BraceVerdict(False, "additive commutativity", _first(T.add == T.add.T))
    failure = _group_failure(T.add, "additive")
    if failure:
        return failure
    witness = _associativity(T.circ)
    if witness:
        return BraceVerdict(False, "circle associativity", witness)
    witness = _first(_left_distributivity(T, T.alpha))
    if witness:
        return BraceVerdict(False, "truss axiom", witness)
    return BraceVerdict(True)


@dataclass
class Filtration:
    """B = B_1 > B_2 > ... > B_m = {0}; indices past m mean {0}."""

    order: int
    components: List[FrozenSet[int]]

    @classmethod
    def from_lists(cls, order: int, lists: Sequence[Sequence[int]]) -> "Filtration":
        comps = [frozenset(int(a) for a in part) for part in lists]
        everything = frozenset(range(order))
        if not comps or comps[0] != everything:
            comps.insert(0, everything)
        if comps[-1] != frozenset({0}):
            comps.append(frozenset({0}))
        return cls(order, comps)

    @property
    def length(self) -> int:
        return len(self.components)

    def part(self, i: int) -> FrozenSet[int]:
        return self.components[min(i, self.length) - 1]

    def degree(self, a: int) -> float:
        """Largest i with a in B_i; the zero element has degree infinity."""
        if a == 0:
            return math.inf
        return max(i + 1 for i, comp in enumerate(self.components) if a in comp)

    def to_lists(self) -> List[List[int]]:
        return [sorted(c) for c in self.components[1:]]


def additive_closure(B: FiniteBrace, generators: Sequence[int]) -> FrozenSet[int]:
    closed = {0}
    frontier = [0]
    gens = sorted(set(int(g) for g in generators))
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                s = B.plus(a, g)
                if s not in closed:
                    closed.add(s)
                    nxt.append(s)
        frontier = nxt
    return frozenset(closed)


def check_filtration(B: Union[FiniteBrace, FiniteTruss], chain: Filtration) -> BraceVerdict:
    """
    Subgroups, descending, ending at {0}, congruence ideals, B_i * B_j inside B_{i+j}
    and, for trusses, alpha(B) inside B_3.

    For trusses the product conditions apply to a*b + alpha(a), since a*0 = -alpha(a).
    """
    n = B.order
    L = B.linear_part()
    if chain.components[0] != frozenset(range(n)):
        return BraceVerdict(False, "first component is not B")
    if chain.components[-1] != frozenset({0}):
        return BraceVerdict(False, "last component is not {0}")
    neg = B.neg
    for i, comp in enumerate(chain.components, start=1):
        if 0 not in comp:
            return BraceVerdict(False, "subgroup", (i,))
        for a, b in itertools.product(sorted(comp), repeat=2):
            if B.plus(a, b) not in comp or neg[a] not in comp:
                return BraceVerdict(False, "subgroup", (i, a, b))
        if i < chain.length and not chain.components[i] <= comp:
            return BraceVerdict(False, "descending", (i,))
    for i, comp in enumerate(chain.components, start=1):
        for a, b in itertools.product(range(n), repeat=2):
            ab = L.times(a, b)
            for t in sorted(comp):
                if L.minus(L.times(a, L.plus(b, t)), ab) not in comp:
                    return BraceVerdict(False, "right ideal", (i, a, b, t))
                if L.minus(L.times(L.plus(a, t), b), ab) not in comp:
                    return BraceVerdict(False, "left ideal", (i, a, b, t))
    for i, j in itertools.product(range(1, chain.length + 1), repeat=2):
        target = chain.part(i + j)
        for a in sorted(chain.part(i)):
            for b in sorted(chain.part(j)):
                if L.times(a, b) not in target:
                    return BraceVerdict(False, "multiplicativity", (i, j, a, b))
    if isinstance(B, FiniteTruss):
        third = chain.part(3)
        for a in range(n):
            if int(B.alpha[a]) not in third:
                return BraceVerdict(False, "alpha degree", (a,))
    return BraceVerdict(True)


@dataclass
class GradedStructure:
    """
    Components B_i / B_{i+1} (i = 1 .. m-1) on coset representatives (least index) and the
    induced product of homogeneous classes.
    """

    brace: FiniteBrace
    chain: Filtration
    representative: Dict[int, Dict[int, int]]
    components: Dict[int, List[int]]
    well_defined: bool = True
    witnesses: List[Tuple[int, ...]] = dc_field(default_factory=list)

    @property
    def top(self) -> int:
        return self.chain.length - 1

    def rep(self, degree: int, a: int) -> int:
        if degree > self.top:
            return 0
        return self.representative[degree][a]

    def add(self, degree: int, a: int, b: int) -> int:
        return self.rep(degree, self.brace.plus(a, b))

    def sub(self, degree: int, a: int, b: int) -> int:
        return self.rep(degree, self.brace.minus(a, b))

    def product(self, i: int, a: int, j: int, b: int) -> int:
        """Class of a*b in degree i + j (0 past the top)."""
        return self.rep(i + j, self.brace.times(a, b))

    def to_dict(self) -> Dict[str, Any]:
        table = {}
        for i, j in itertools.product(self.components, repeat=2):
            for a in self.components[i]:
                for b in self.components[j]:
                    c = self.product(i, a, j, b)
                    if c:
                        table[f"{i}:{a},{j}:{b}"] = f"{i + j}:{c}"
        return {
            "components": {str(i): reps for i, reps in self.components.items()},
            "product": table,
            "well_defined": self.well_defined,
            "witnesses": [list(w) for w in self.witnesses[:10]],
        }


def associated_graded(B: FiniteBrace, chain: Filtration) -> GradedStructure:
    """
    Build the associated graded structure and check exhaustively that products of classes
    do not depend on the representatives.
    """
    representative: Dict[int, Dict[int, int]] = {}
    components: Dict[int, List[int]] = {}
    for i in range(1, chain.length):
        below = chain.part(i + 1)
        reps = {}
        for a in chain.part(i):
            reps[a] = min(B.plus(a, h) for h in below)
        representative[i] = reps
        components[i] = sorted(set(reps.values()))
    G = GradedStructure(B.linear_part(), chain, representative, components)
    for i, j in itertools.product(components, repeat=2):
        for a, b in itertools.product(sorted(chain.part(i)), sorted(chain.part(j))):
            expected = G.product(i, G.rep(i, a), j, G.rep(j, b))
            if G.product(i, a, j, b) != expected:
                G.well_defined = False
                G.witnesses.append((i, a, j, b))
    if not G.well_defined:
        logger.warning(f"Graded product is not well defined: {len(G.witnesses)} representative pairs")
    return G


@dataclass
class PreLieReport:
    defect: int
    triples: int
    witness: Optional[Tuple[Tuple[int, int], ...]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "defect": self.defect,
            "triples": self.triples,
            "witness": [list(p) for p in self.witness] if self.witness else None,
        }


def pre_lie_defect(G: GradedStructure) -> PreLieReport:
    """
    Count homogeneous triples where (a,b,c) != (b,a,c), with (a,b,c) = (a b) c - a (b c).
    """
    failures, checked, witness = 0, 0, None
    for (i, j, k) in itertools.product(G.components, repeat=3):
        n = i + j + k
        for a, b, c in itertools.product(G.components[i], G.components[j], G.components[k]):
            checked += 1
            if n > G.top:
                continue
            abc = G.sub(n, G.product(i + j, G.product(i, a, j, b), k, c), G.product(i, a, j + k, G.product(j, b, k, c)))
            bac = G.sub(n, G.product(i + j, G.product(j, b, i, a), k, c), G.product(j, b, i + k, G.product(i, a, k, c)))
            if abc != bac:
                failures += 1
                if witness is None:
                    witness = ((i, a), (j, b), (k, c))
    return PreLieReport(failures, checked, witness)


@dataclass
class SeriesReport:
    """Right-distributivity defect (a+b)*c - a*c - b*c against its alternating correction series."""

    direct: int
    partial_sums: List[int]
    remainders: List[int]
    terminated_at: Optional[int]

    @property
    def exact(self) -> bool:
        return self.partial_sums[-1] == self.direct

    def to_dict(self) -> Dict[str, Any]:
        return {
            "direct": self.direct,
            "partial_sums": self.partial_sums,
            "remainders": self.remainders,
            "terminated_at": self.terminated_at,
            "exact": self.exact,
        }


def distributivity_series(B: FiniteBrace, a: int, b: int, c: int, N: int) -> SeriesReport:
    """
    Partial sums of sum_{i>=0} (-1)^(i+1) [(d_i*d_i')*c - d_i*(d_i'*c)] with d_0 = a, d_0' = b,
    d_{i+1} = d_i + d_i', d_{i+1}' = d_i * d_i'.

    After t terms the remainder is (-1)^t ((d_t + d_t')*c - d_t*c - d_t'*c), which vanishes once d_t' = 0.
    """
    d, dp = a, b
    total = 0
    partial, remainders = [0], [B.defect(a, b, c)]
    terminated = 0 if b == 0 else None
    for t in range(N):
        term = B.minus(B.times(B.times(d, dp), c), B.times(d, B.times(dp, c)))
        total = B.plus(total, term) if t % 2 else B.minus(total, term)
        d, dp = B.plus(d, dp), B.times(d, dp)
        partial.append(total)
        rem = B.defect(d, dp, c)
        remainders.append(rem if (t + 1) % 2 == 0 else int(B.neg[rem]))
        if dp == 0 and terminated is None:
            terminated = t + 1
    return SeriesReport(B.defect(a, b, c), partial, remainders, terminated)


def degree_bound_violations(B: FiniteBrace, chain: Filtration) -> List[Triple]:
    """Triples with deg a < deg b where deg((a+b)*c - a*c - b*c) <= deg b + deg c."""
    out = []
    degree = [chain.degree(a) for a in range(B.order)]
    for a, b, c in itertools.product(range(B.order), repeat=3):
        if degree[a] < degree[b] and degree[B.defect(a, b, c)] <= degree[b] + degree[c]:
            out.append((a, b, c))
    return out


@dataclass
class FiniteRing:
    """Finite associative ring (possibly without unit) on explicit tables."""

    name: str
    add: np.ndarray
    mul: np.ndarray

    @property
    def order(self) -> int:
        return self.add.shape[0]

    def is_associative(self) -> bool:
        return _associativity(self.mul) is None

    def power_filtration(self) -> Filtration:
        """R > R^2 > R^3 > ... as additive closures of products."""
        B = FiniteBrace(self.add, self.mul)
        comps = [frozenset(range(self.order))]
        while comps[-1] != frozenset({0}):
            products = [int(self.mul[a, r]) for a in comps[-1] for r in range(self.order)]
            nxt = additive_closure(B, products)
            if nxt == comps[-1]:
                break
            comps.append(nxt)
        return Filtration(self.order, comps)

    def is_nilpotent(self) -> bool:
        return self.power_filtration().components[-1] == frozenset({0})

    def annihilator(self) -> List[int]:
        """Elements t with at = ta = 0 for every a."""
        return [t for t in range(self.order) if not self.mul[:, t].any() and not self.mul[t, :].any()]


def _modular_add(moduli: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """Addition table of Z/m1 x Z/m2 x ... and the digit matrix of each element."""
    digits = np.array(list(itertools.product(*[range(m) for m in reversed(moduli)])), dtype=np.int64)[:, ::-1]
    if not len(moduli):
        digits = np.zeros((1, 0), dtype=np.int64)
    weights = np.cumprod([1] + list(moduli[:-1])).astype(np.int64) if moduli else np.zeros(0, dtype=np.int64)
    sums = (digits[:, None, :] + digits[None, :, :]) % np.array(moduli, dtype=np.int64)
    return (sums * weights).sum(axis=-1), digits


def zero_ring(n: int) -> FiniteRing:
    add, _ = _modular_add([n])
    return FiniteRing(f"zero(Z/{n})", add, np.zeros((n, n), dtype=np.int64))


def cyclic_ring(n: int, scale: int = 1) -> FiniteRing:
    """Z/n with a*b = scale*a*b."""
    idx = np.arange(n, dtype=np.int64)
    return FiniteRing(f"Z/{n} (x{scale})", (idx[:, None] + idx[None, :]) % n, (scale * idx[:, None] * idx[None, :]) % n)


def ideal_ring(n: int, k: int) -> FiniteRing:
    """kZ/nZ with the ring product, element i standing for k*i."""
    if n % k:
        raise InvalidInputError(f"{k} does not divide {n}")
    m = n // k
    idx = np.arange(m, dtype=np.int64)
    add = (idx[:, None] + idx[None, :]) % m
    mul = ((k * idx[:, None]) * (k * idx[None, :]) % n) // k
    return FiniteRing(f"{k}Z/{n}", add, mul)


def truncated_polynomial_ring(p: int, k: int) -> FiniteRing:
    """x F_p[x] / (x^k): polynomials c_1 x + ... + c_{k-1} x^{k-1}."""
    size = k - 1
    add, digits = _modular_add([p] * size)
    weights = p ** np.arange(size, dtype=np.int64)
    n = add.shape[0]
    mul = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            coeffs = np.zeros(size, dtype=np.int64)
            for i in range(size):
                for j in range(size):
                    deg = (i + 1) + (j + 1)
                    if deg <= size:
                        coeffs[deg - 1] += digits[a, i] * digits[b, j]
            mul[a, b] = int(((coeffs % p) * weights).sum())
    return FiniteRing(f"xF_{p}[x]/(x^{k})", add, mul)


def upper_triangular_ring(p: int, size: int) -> FiniteRing:
    """Strictly upper triangular size x size matrices over F_p."""
    cells = [(i, j) for i in range(size) for j in range(i + 1, size)]
    add, digits = _modular_add([p] * len(cells))
    weights = p ** np.arange(len(cells), dtype=np.int64)
    n = add.shape[0]

    def matrix(a: int) -> np.ndarray:
        M = np.zeros((size, size), dtype=np.int64)
        for t, (i, j) in enumerate(cells):
            M[i, j] = digits[a, t]
        return M

    mats = [matrix(a) for a in range(n)]
    mul = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            prod = (mats[a] @ mats[b]) % p
            mul[a, b] = int(sum(prod[i, j] * weights[t] for t, (i, j) in enumerate(cells)))
    return FiniteRing(f"N_{size}(F_{p})", add, mul)


def brace_from_nilpotent_ring(R: FiniteRing) -> FiniteBrace:
    """
    The adjoint brace: a*b is the ring product, a o b = a + b + ab.

    Raises:
        InvalidInputError: If R is not associative or not nilpotent
    """
    if not R.is_associative():
        raise InvalidInputError(f"{R.name} is not associative")
    if not R.is_nilpotent():
        raise InvalidInputError(f"{R.name} is not nilpotent")
    B = FiniteBrace(R.add.copy(), R.mul.copy())
    verdict = check_brace(B)
    if not verdict.valid:
        raise InvalidInputError(f"{R.name} does not give a brace: {verdict.failed} at {verdict.witness}")
    return B


def truss_from_nilpotent_ring(R: FiniteRing, t: int) -> FiniteTruss:
    """
    The truss a*b = ab - t with constant alpha = t, for t in the two-sided annihilator of R.

    Raises:
        InvalidInputError: If R is not an associative nilpotent ring or t does not annihilate R
    """
    B = brace_from_nilpotent_ring(R)
    if t not in R.annihilator():
        raise InvalidInputError(f"{t} is not in the annihilator of {R.name}")
    star = B.add[R.mul, B.neg[t]]
    T = FiniteTruss(R.add.copy(), star, np.full(R.order, t, dtype=np.int64))
    verdict = check_truss(T)
    if not verdict.valid:
        raise InvalidInputError(f"{R.name} with alpha = {t} does not give a truss: {verdict.failed}")
    return T


def power_chain(B: FiniteBrace) -> Filtration:
    """
    Fixed point C_1 = B, C_i = additive closure of C_j * C_k over j + k >= i, cut at the first {0}.

    The chain is descending, so for each j only k = max(1, i - j) contributes new products.
    """
    n = B.order
    limit = n + 1
    chain = [frozenset(range(n))] * (limit + 1)
    while True:
        new = [chain[0], chain[0]]
        for i in range(2, limit + 1):
            gens = set()
            for j in range(1, limit + 1):
                k = max(1, i - j)
                gens.update(int(B.star[a, b]) for a in chain[j] for b in chain[k])
            new.append(additive_closure(B, sorted(gens)))
        if new == chain:
            break
        chain = new
    comps: List[FrozenSet[int]] = []
    for comp in chain[1:]:
        comps.append(comp)
        if comp == frozenset({0}):
            break
    else:
        # never reaches {0}: keep the chain up to where it becomes constant
        while len(comps) > 1 and comps[-1] == comps[-2]:
            comps.pop()
    return Filtration(n, comps)


def _automorphisms(add: np.ndarray, digits: np.ndarray, moduli: Sequence[int]) -> List[np.ndarray]:
    """Automorphisms of Z/m1 x ... as permutation arrays, by brute force over generator images."""
    n = add.shape[0]
    gens = []
    for t in range(len(moduli)):
        target = np.zeros(len(moduli), dtype=np.int64)
        target[t] = 1
        gens.append(int(np.flatnonzero((digits == target).all(axis=1))[0]))

    def multiple(a: int, k: int) -> int:
        out = 0
        for _ in range(k):
            out = int(add[out, a])
        return out

    autos = []
    for images in itertools.product(range(n), repeat=len(gens)):
        if any(multiple(img, m) != 0 for img, m in zip(images, moduli)):
            continue
        perm = np.zeros(n, dtype=np.int64)
        for a in range(n):
            value = 0
            for t, img in enumerate(images):
                value = int(add[value, multiple(img, int(digits[a, t]))])
            perm[a] = value
        if len(set(perm.tolist())) == n:
            autos.append(perm)
    return autos


def enumerate_braces(moduli: Sequence[int], settings: Optional[WorkbenchSettings] = None) -> List[FiniteBrace]:
    """
    All left braces on Z/m1 x Z/m2 x ... given by maps a -> lambda_a in Aut(A) with
    lambda_{a + lambda_a(b)} = lambda_a lambda_b; a*b = lambda_a(b) - b.

    Raises:
        ResourceCapExceeded: If the search exceeds the configured node budget
    """
    settings = settings or get_settings()
    add, digits = _modular_add(list(moduli))
    n = add.shape[0]
    neg = FiniteBrace(add, np.zeros_like(add)).neg
    autos = _automorphisms(add, digits, moduli)
    identity = next(i for i, s in enumerate(autos) if np.array_equal(s, np.arange(n)))
    compose = [[int(next(k for k, s in enumerate(autos) if np.array_equal(s, autos[i][autos[j]])))
                for j in range(len(autos))] for i in range(len(autos))]
    budget = settings.enumeration_node_budget
    nodes = 0
    found: List[FiniteBrace] = []

    def propagate(assign: List[Optional[int]], start: int) -> Optional[List[Optional[int]]]:
        assign = list(assign)
        queue = [start]
        while queue:
            a = queue.pop()
            for b in range(n):
                pairs = [(a, b), (b, a)]
                for u, v in pairs:
                    if assign[u] is None or assign[v] is None:
                        continue
                    c = int(add[u, autos[assign[u]][v]])
                    want = compose[assign[u]][assign[v]]
                    if assign[c] is None:
                        assign[c] = want
                        queue.append(c)
                    elif assign[c] != want:
                        return None
        return assign

    def search(assign: List[Optional[int]]) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise ResourceCapExceeded(f"Brace enumeration exceeded {budget} nodes")
        try:
            a = assign.index(None)
        except ValueError:
            lam = np.array([autos[assign[x]] for x in range(n)])
            star = add[lam, neg[np.arange(n)][None, :]]
            found.append(FiniteBrace(add.copy(), star))
            return
        for choice in range(len(autos)):
            trial = list(assign)
            trial[a] = choice
            nxt = propagate(trial, a)
            if nxt is not None:
                search(nxt)

    start: List[Optional[int]] = [None] * n
    start[0] = identity
    initial = propagate(start, 0)
    if initial is not None:
        search(initial)
    logger.info(f"Enumerated {len(found)} braces on Z/{moduli} with {len(autos)} automorphisms ({nodes} nodes)")
    return found


def sign_brace(n: int) -> FiniteBrace:
    """Z/n (n even) with a o b = a + (-1)^a b, so a*b = -2b for odd a and 0 otherwise."""
    if n % 2:
        raise InvalidInputError(f"sign brace needs an even order, got {n}")
    idx = np.arange(n, dtype=np.int64)
    add = (idx[:, None] + idx[None, :]) % n
    star = np.where((idx % 2)[:, None] == 1, (-2 * idx[None, :]) % n, 0)
    return FiniteBrace(add, star)


def is_right_distributive(B: FiniteBrace) -> bool:
    n = B.order
    return all(B.defect(a, b, c) == 0 for a, b, c in itertools.product(range(n), repeat=3))


class BraceFile(BaseModel):
    """JSON format for braces and trusses on the carrier {0, ..., order-1}, 0 the additive identity."""

    order: int = Field(..., ge=1)
    add: List[List[int]]
    star: List[List[int]]
    alpha: Optional[List[int]] = None
    filtration: List[List[int]] = Field(default_factory=list)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "order": 3,
                "add": [[0, 1, 2], [1, 2, 0], [2, 0, 1]],
                "star": [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
                "filtration": [],
            }
        }
    )

    @model_validator(mode="after")
    def _shapes(self) -> "BraceFile":
        n = self.order
        for name in ("add", "star"):
            table = getattr(self, name)
            if len(table) != n or any(len(row) != n for row in table):
                raise ValueError(f"{name} must be an {n}x{n} table")
            if any(not 0 <= v < n for row in table for v in row):
                raise ValueError(f"{name} entries must lie in 0..{n - 1}")
        if self.alpha is not None and (len(self.alpha) != n or any(not 0 <= v < n for v in self.alpha)):
            raise ValueError(f"alpha must list {n} values in 0..{n - 1}")
        if any(not 0 <= v < n for part in self.filtration for v in part):
            raise ValueError(f"filtration entries must lie in 0..{n - 1}")
        return self

    def structure(self) -> FiniteBrace:
        if self.alpha is not None:
            return FiniteTruss(np.array(self.add), np.array(self.star), np.array(self.alpha))
        return FiniteBrace(np.array(self.add), np.array(self.star))

    def chain(self) -> Filtration:
        return Filtration.from_lists(self.order, self.filtration)

    @classmethod
    def from_structure(cls, B: FiniteBrace, chain: Optional[Filtration] = None) -> "BraceFile":
        return cls(
            order=B.order,
            add=B.add.tolist(),
            star=B.star.tolist(),
            alpha=B.alpha.tolist() if isinstance(B, FiniteTruss) else None,
            filtration=chain.to_lists() if chain else [],
        )


def load_brace_file(path: str) -> Tuple[FiniteBrace, Filtration]:
    """
    Raises:
        InvalidInputError: If the file is missing, not JSON or fails validation
    """
    try:
        with open(path, "r") as f:
            data = BraceFile(**json.load(f))
    except (OSError, json.JSONDecodeError, TypeError) as e:
        raise InvalidInputError(f"Cannot read brace file {path}: {e}")
    except ValidationError as e:
        raise InvalidInputError(f"Invalid brace file {path}: {e}")
    return data.structure(), data.chain()
