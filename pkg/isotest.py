"""
Isomorphism Tests
Decide isomorphism of small local algebras given by multiplication tables: exact witness
checks, exhaustive and degree-lifted searches over prime fields, and invariant comparison.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import FieldError, FieldMismatchError, InvalidInputError, ResourceCapExceeded
from linear import rank, solve_affine
from nc_core import FieldSpec, FreePoly, Substitution, Word
from quotient import QuotientAlgebra, StructureTable, invariant_profile, mult_table
from settings import WorkbenchSettings, get_settings

logger = logging.getLogger(__name__)

Images = Dict[str, List[Any]]

_SWAP = str.maketrans("xy", "yx")


class IsoStatus(str, Enum):
    ISOMORPHIC = "isomorphic"
    NOT_ISOMORPHIC = "not_isomorphic"
    INCONCLUSIVE = "inconclusive"


class Strategy(str, Enum):
    AUTO = "auto"
    BRUTE = "brute"
    LIFT = "lift"
    INVARIANTS = "invariants"


@dataclass
class IsoVerdict:
    """
    Outcome of an isomorphism test.

    proxy is set when the verdict was reached over a prime field standing in for the rationals.
    """

    status: IsoStatus
    field: str
    witness: Optional[Images] = None
    certificate: Dict[str, Any] = dc_field(default_factory=dict)
    proxy: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "field": self.field,
            "proxy": self.proxy,
            "witness": {v: [str(c) for c in vec] for v, vec in self.witness.items()} if self.witness else None,
            "certificate": self.certificate,
        }


class FiniteAlgebra(StructureTable):
    """
    Structure table on a suffix-closed set of words in which e_w = e_{w[0]} e_{w[1:]}.

    Such a basis makes a map determined by the images of x and y.
    """

    def __post_init__(self):
        super().__post_init__()
        index = {w: i for i, w in enumerate(self.words)}
        for v in "xy":
            if v not in index:
                raise InvalidInputError(f"Basis lacks the generator {v}")
        for i, w in enumerate(self.words):
            if not w:
                continue
            if w[1:] not in index:
                raise InvalidInputError(f"Basis is not suffix-closed: {w} without {w[1:] or '1'}")
            if self.product(index[w[0]], index[w[1:]]) != {i: self.field.one}:
                raise InvalidInputError(f"Basis word {w} is not the product of its letters")

    @classmethod
    def from_table(cls, table: StructureTable) -> "FiniteAlgebra":
        return cls(table.field, list(table.words), dict(table.products))

    @classmethod
    def from_quotient(cls, Q: QuotientAlgebra, workers: Optional[int] = None) -> "FiniteAlgebra":
        return cls.from_table(mult_table(Q, workers))

    @cached_property
    def tensor(self) -> np.ndarray:
        return self.to_array()

    @cached_property
    def build_order(self) -> List[Tuple[int, str, int]]:
        """(index, first letter, suffix index) for every non-unit word, shortest first."""
        index = {w: i for i, w in enumerate(self.words)}
        return [(index[w], w[0], index[w[1:]]) for w in sorted(self.words[1:], key=len)]

    def degree_indices(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for i, w in enumerate(self.words):
            out.setdefault(len(w), []).append(i)
        return out

    def left_multiplication(self, i: int) -> List[List[Any]]:
        """Matrix M with M[k][j] = coordinate k of e_i e_j."""
        M = [[self.field.zero] * self.dim for _ in range(self.dim)]
        for j in range(self.dim):
            for k, c in self.product(i, j).items():
                M[k][j] = c
        return M

    def evaluate(self, f: FreePoly) -> List[Any]:
        """Coordinates of the image of f under x -> e_x, y -> e_y."""
        if f.field != self.field:
            raise FieldMismatchError(f"Cannot evaluate a {f.field.label} polynomial in a {self.field.label} algebra")
        letters = {v: self.basis_vector(self.index(v)) for v in "xy"}
        cache: Dict[Word, List[Any]] = {"": self.basis_vector(0)}

        def word_vector(w: Word) -> List[Any]:
            if w not in cache:
                cache[w] = self.multiply(letters[w[0]], word_vector(w[1:]))
            return cache[w]

        out = self.zero_vector()
        for w, c in sorted(f.terms.items(), key=lambda item: len(item[0])):
            for k, a in enumerate(word_vector(w)):
                if a:
                    out[k] += c * a
        return out


def as_finite(A: Union[QuotientAlgebra, StructureTable], workers: Optional[int] = None) -> FiniteAlgebra:
    if isinstance(A, FiniteAlgebra):
        return A
    if isinstance(A, QuotientAlgebra):
        return FiniteAlgebra.from_quotient(A, workers)
    return FiniteAlgebra.from_table(A)


def reduce_mod_p(Q: Union[QuotientAlgebra, StructureTable], p: int) -> FiniteAlgebra:
    """
    Entry-wise reduction of a rational table.

    Raises:
        FieldError: If an entry has a denominator divisible by p
    """
    A = as_finite(Q)
    if not A.field.is_rational:
        raise FieldError(f"Reduction mod p needs a rational table, got {A.field.label}")
    F = FieldSpec(p)
    products = {}
    for key, coords in A.products.items():
        reduced = {}
        for k, c in coords.items():
            try:
                value = F.coerce(A.field.to_fraction(c))
            except FieldError:
                raise FieldError(f"Entry {A.field.render(c)} of {key} has a denominator divisible by {p}")
            if value:
                reduced[k] = value
        if reduced:
            products[key] = reduced
    return FiniteAlgebra(F, list(A.words), products)


def swap_letters(A: FiniteAlgebra) -> FiniteAlgebra:
    """The same algebra with the generator names exchanged."""
    return FiniteAlgebra(A.field, [w.translate(_SWAP) for w in A.words], dict(A.products))


def permuted_copy(A: FiniteAlgebra, permutation: Sequence[int]) -> FiniteAlgebra:
    """Reorder the non-unit basis: new position i holds old element permutation[i - 1] + 1."""
    order = [0] + [p + 1 for p in permutation]
    if sorted(order) != list(range(A.dim)):
        raise InvalidInputError("Not a permutation of the radical basis")
    new_index = {old: new for new, old in enumerate(order)}
    products = {
        (new_index[i], new_index[j]): {new_index[k]: c for k, c in coords.items()}
        for (i, j), coords in A.products.items()
    }
    return FiniteAlgebra(A.field, [A.words[i] for i in order], products)


def images_of(B: FiniteAlgebra, s: Substitution) -> Images:
    return {v: B.evaluate(s.image(v)) for v in "xy"}


def identity_images(B: FiniteAlgebra) -> Images:
    return {v: B.basis_vector(B.index(v)) for v in "xy"}


def _image_columns(A: FiniteAlgebra, B: FiniteAlgebra, images: Images) -> List[List[Any]]:
    P: List[Optional[List[Any]]] = [None] * A.dim
    P[0] = B.basis_vector(0)
    for i, letter, suffix in A.build_order:
        P[i] = B.multiply(images[letter], P[suffix])
    return P  # type: ignore[return-value]


def verify_isomorphism(A: FiniteAlgebra, B: FiniteAlgebra, images: Images) -> bool:
    """
    Exact check that x -> images["x"], y -> images["y"] extends to an isomorphism A -> B.

    The map is built on basis words; it is multiplicative iff left multiplication by each
    generator is intertwined, and bijective iff the image matrix has full rank.
    """
    if A.field != B.field:
        raise FieldMismatchError(f"Algebras over {A.field.label} and {B.field.label}")
    if A.dim != B.dim:
        return False
    if any(images[v][0] for v in "xy"):
        return False
    P = _image_columns(A, B, images)
    F = A.field
    for v in "xy":
        a = A.index(v)
        for i in range(A.dim):
            lhs = B.zero_vector()
            for k, c in A.product(a, i).items():
                for t, b in enumerate(P[k]):
                    if b:
                        lhs[t] += c * b
            if lhs != B.multiply(images[v], P[i]):
                return False
    return rank(P, B.dim, F) == B.dim


def _mod_rank(P: np.ndarray, F: FieldSpec) -> int:
    return rank([[int(v) for v in row] for row in P], P.shape[1], F)


class _ModularMaps:
    """Vectorized image matrices and intertwining residuals over GF(p)."""

    def __init__(self, A: FiniteAlgebra, B: FiniteAlgebra):
        if A.field != B.field or A.field.is_rational:
            raise InvalidInputError("Modular searches need two algebras over the same prime field")
        self.A, self.B, self.p = A, B, A.field.characteristic
        self.TB = B.tensor
        self.LA = {v: A.tensor[A.index(v)].T.copy() for v in "xy"}

    def left(self, X: np.ndarray) -> np.ndarray:
        return np.einsum("...j,jik->...ki", X, self.TB) % self.p

    def residual(self, X: np.ndarray, Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Image matrices P and stacked residuals L(X_v) P - P L_v, batched over leading axes."""
        L = {"x": self.left(X), "y": self.left(Y)}
        batch = X.shape[:-1]
        P = np.zeros(batch + (self.B.dim, self.A.dim), dtype=np.int64)
        P[..., 0, 0] = 1
        for i, letter, suffix in self.A.build_order:
            P[..., :, i] = np.einsum("...ki,...i->...k", L[letter], P[..., :, suffix]) % self.p
        res = np.stack([(L[v] @ P - P @ self.LA[v]) % self.p for v in "xy"], axis=-3)
        return P, res


def brute_force_iso(A: FiniteAlgebra, B: FiniteAlgebra, workers: Optional[int] = None,
                    settings: Optional[WorkbenchSettings] = None) -> IsoVerdict:
    """
    Exhaust all pairs of radical images (phi(x), phi(y)).

    Candidates are numbered in base p and checked in chunks; the lowest-numbered witness is reported.

    Raises:
        ResourceCapExceeded: If p^(2(dim-1)) exceeds the configured budget
    """
    settings = settings or get_settings()
    workers = workers or settings.workers
    maps = _ModularMaps(A, B)
    F, p = A.field, maps.p
    if A.dim != B.dim:
        return IsoVerdict(IsoStatus.NOT_ISOMORPHIC, F.label, certificate={"dimension": [A.dim, B.dim]})
    rad = B.radical_indices()
    r = len(rad)
    total = p ** (2 * r)
    if total > settings.brute_force_budget:
        raise ResourceCapExceeded(f"Brute force needs {total} candidates, budget {settings.brute_force_budget}")
    powers = p ** np.arange(2 * r, dtype=np.int64)
    chunk = 2048

    def scan(start: int) -> Optional[Tuple[int, np.ndarray, np.ndarray]]:
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % p
        X = np.zeros((len(idx), B.dim), dtype=np.int64)
        Y = np.zeros((len(idx), B.dim), dtype=np.int64)
        X[:, rad], Y[:, rad] = digits[:, :r], digits[:, r:]
        P, res = maps.residual(X, Y)
        for h in np.flatnonzero(~res.any(axis=(1, 2, 3))):
            if _mod_rank(P[h], F) == B.dim:
                return int(idx[h]), X[h], Y[h]
        return None

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for hit in pool.map(scan, range(0, total, chunk)):
            if hit is not None:
                index, X, Y = hit
                logger.info(f"Brute force over {F.label}: witness at candidate {index}")
                return IsoVerdict(IsoStatus.ISOMORPHIC, F.label, _images(X, Y, F),
                                  {"strategy": "brute", "candidate": index})
    logger.info(f"Brute force over {F.label}: {total} candidates exhausted")
    return IsoVerdict(IsoStatus.NOT_ISOMORPHIC, F.label,
                      certificate={"strategy": "brute", "exhausted_candidates": total})


def _images(X: np.ndarray, Y: np.ndarray, F: FieldSpec) -> Images:
    return {"x": [F.coerce(int(v)) for v in X], "y": [F.coerce(int(v)) for v in Y]}


class _Lift:
    def __init__(self, A: FiniteAlgebra, B: FiniteAlgebra, budget: int):
        self.maps = _ModularMaps(A, B)
        self.A, self.B, self.F, self.p = A, B, A.field, self.maps.p
        self.degrees = B.degree_indices()
        self.top = max(self.degrees)
        self.budget, self.nodes = budget, 0

    def rows(self, res: np.ndarray, t: int) -> np.ndarray:
        return res[:, self.degrees.get(t, []), :].ravel()

    def extend(self, X: np.ndarray, Y: np.ndarray, e: int) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """Choose the degree-e coefficients so that every residual row of degree e + 1 vanishes."""
        self.nodes += 1
        if self.nodes > self.budget:
            raise ResourceCapExceeded(f"Lifted search exceeded {self.budget} nodes")
        if e >= self.top:
            P, res = self.maps.residual(X, Y)
            if not res.any() and _mod_rank(P, self.F) == self.B.dim:
                return X, Y
            return None
        slots = [(0, k) for k in self.degrees[e]] + [(1, k) for k in self.degrees[e]]
        _, res = self.maps.residual(X, Y)
        base = self.rows(res, e + 1)
        columns = []
        for s, k in slots:
            X2, Y2 = X.copy(), Y.copy()
            (X2 if s == 0 else Y2)[k] = 1
            columns.append((self.rows(self.maps.residual(X2, Y2)[1], e + 1) - base) % self.p)
        matrix = [[int(col[r]) for col in columns] for r in range(len(base))]
        solved = solve_affine(matrix, [int(-b) % self.p for b in base], len(slots), self.F)
        if solved is None:
            return None
        particular, basis = solved
        part = np.array([self.F.to_int(c) for c in particular], dtype=np.int64)
        free = [np.array([self.F.to_int(c) for c in v], dtype=np.int64) for v in basis]
        for t in itertools.product(range(self.p), repeat=len(free)):
            u = part.copy()
            for coeff, v in zip(t, free):
                u = (u + coeff * v) % self.p
            X2, Y2 = X.copy(), Y.copy()
            for (s, k), value in zip(slots, u):
                (X2 if s == 0 else Y2)[k] = value
            found = self.extend(X2, Y2, e + 1)
            if found is not None:
                return found
        return None


def lifted_iso_search(A: FiniteAlgebra, B: FiniteAlgebra, p: Optional[int] = None,
                      settings: Optional[WorkbenchSettings] = None) -> IsoVerdict:
    """
    Enumerate invertible linear parts over GF(p) and lift each degree by degree.

    At each degree the new coefficients of phi(x), phi(y) enter the next degree's conditions
    linearly; every solution of that affine system is tried. Top-degree coefficients are 0.

    Raises:
        ResourceCapExceeded: If the node budget runs out
    """
    settings = settings or get_settings()
    if p is not None and A.field.characteristic != p:
        A, B = reduce_mod_p(A, p), reduce_mod_p(B, p)
    F = A.field
    if A.dim != B.dim:
        return IsoVerdict(IsoStatus.NOT_ISOMORPHIC, F.label, certificate={"dimension": [A.dim, B.dim]})
    search = _Lift(A, B, settings.lift_node_budget)
    q = search.p
    ex, ey = B.index("x"), B.index("y")
    tried = 0
    for a, b, c, d in itertools.product(range(q), repeat=4):
        if (a * d - b * c) % q == 0:
            continue
        tried += 1
        X = np.zeros(B.dim, dtype=np.int64)
        Y = np.zeros(B.dim, dtype=np.int64)
        X[ex], X[ey], Y[ex], Y[ey] = a, b, c, d
        _, res = search.maps.residual(X, Y)
        if search.rows(res, 2).any():
            continue
        found = search.extend(X, Y, 2)
        if found is not None:
            logger.info(f"Lifted search over {F.label}: witness with linear part {(a, b, c, d)}")
            return IsoVerdict(IsoStatus.ISOMORPHIC, F.label, _images(found[0], found[1], F),
                              {"strategy": "lift", "linear_part": [[a, b], [c, d]], "nodes": search.nodes})
    logger.info(f"Lifted search over {F.label}: all {tried} linear parts fail ({search.nodes} nodes)")
    return IsoVerdict(IsoStatus.NOT_ISOMORPHIC, F.label,
                      certificate={"strategy": "lift", "linear_parts": tried, "nodes": search.nodes})


def _rational_candidates(A: FiniteAlgebra, B: FiniteAlgebra, hint: Optional[Substitution]) -> List[Tuple[str, Images]]:
    candidates = []
    if hint is not None and hint.field == B.field:
        candidates.append(("hint", images_of(B, hint)))
    ident = identity_images(B)
    candidates.append(("identity", ident))
    candidates.append(("swap", {"x": ident["y"], "y": ident["x"]}))
    return candidates


def distinguish(A: Union[QuotientAlgebra, StructureTable], B: Union[QuotientAlgebra, StructureTable],
                hint: Optional[Substitution] = None, strategy: Strategy = Strategy.AUTO,
                primes: Optional[List[int]] = None, workers: Optional[int] = None,
                settings: Optional[WorkbenchSettings] = None) -> IsoVerdict:
    """
    Invariants over the base field, then exact candidate witnesses, then proxy searches.

    Non-isomorphism over the rationals is certified only by an invariant mismatch; prime-field
    outcomes carry proxy=True and name the field used.
    """
    settings = settings or get_settings()
    strategy = Strategy(strategy)
    A, B = as_finite(A, workers), as_finite(B, workers)
    if A.field != B.field:
        raise FieldMismatchError(f"Algebras over {A.field.label} and {B.field.label}")
    base = A.field

    pa, pb = invariant_profile(A, square_zero=False, settings=settings), invariant_profile(B, square_zero=False,
                                                                                          settings=settings)
    mismatch = pa.mismatches(pb)
    if mismatch:
        logger.info(f"Invariant mismatch over {base.label}: {mismatch}")
        return IsoVerdict(IsoStatus.NOT_ISOMORPHIC, base.label,
                          certificate={"invariants": mismatch, "a": pa.to_dict(), "b": pb.to_dict()})

    for name, images in _rational_candidates(A, B, hint):
        if verify_isomorphism(A, B, images):
            logger.info(f"Exact witness over {base.label}: {name}")
            return IsoVerdict(IsoStatus.ISOMORPHIC, base.label, images, {"strategy": name, "profile": pa.to_dict()})
    if strategy is Strategy.INVARIANTS:
        return IsoVerdict(IsoStatus.INCONCLUSIVE, base.label, certificate={"invariants": "agree"})

    if not base.is_rational:
        primes, reduced = [base.characteristic], {base.characteristic: (A, B)}
    else:
        primes = primes or list(settings.proxy_primes)
        reduced = {}
    attempts: List[Dict[str, Any]] = []
    for p in primes:
        try:
            Ap, Bp = reduced.get(p) or (reduce_mod_p(A, p), reduce_mod_p(B, p))
        except FieldError as e:
            attempts.append({"field": f"GF({p})", "skipped": str(e)})
            continue
        proxy = base.is_rational
        qa, qb = invariant_profile(Ap, settings=settings), invariant_profile(Bp, settings=settings)
        if qa.mismatches(qb):
            return IsoVerdict(IsoStatus.NOT_ISOMORPHIC, Ap.field.label,
                              certificate={"invariants": qa.mismatches(qb), "a": qa.to_dict(), "b": qb.to_dict()},
                              proxy=proxy)
        try:
            if strategy is Strategy.BRUTE:
                verdict = brute_force_iso(Ap, Bp, workers, settings)
            else:
                verdict = lifted_iso_search(Ap, Bp, settings=settings)
        except ResourceCapExceeded as e:
            attempts.append({"field": Ap.field.label, "exhausted": str(e)})
            if strategy is not Strategy.AUTO:
                raise
            continue
        verdict.proxy = proxy
        if verdict.status is IsoStatus.NOT_ISOMORPHIC:
            verdict.certificate["attempts"] = attempts
            return verdict
        verdict.certificate["profiles_agree"] = True
        attempts.append({"field": Ap.field.label, "status": verdict.status.value, "witness": verdict.to_dict()["witness"]})
        if not proxy:
            return verdict
    return IsoVerdict(IsoStatus.INCONCLUSIVE, base.label, certificate={"attempts": attempts}, proxy=base.is_rational)
