"""
Rewriting
Truncated Buchberger-style completion in the free power-series algebra, normal forms,
and an independent row-reduction oracle for per-degree dimensions.
"""

import heapq
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from errors import FieldMismatchError, InvalidInputError, ResourceCapExceeded
from expr_parser import parse_field_label, parse_poly
from linear import sparse_pivots
from nc_core import (
    DEFAULT_ORDER,
    FieldSpec,
    FreePoly,
    MonomialOrder,
    OrderMode,
    Word,
    render_word,
    words_of_degree,
    words_up_to,
)
from settings import WorkbenchSettings, get_settings

logger = logging.getLogger(__name__)


class AmbiguityKind(str, Enum):
    OVERLAP = "overlap"
    INCLUSION = "inclusion"


@dataclass(frozen=True)
class Ambiguity:
    """
    A word with two reductions.

    word == left_split[0] + lead(left_element) + left_split[1]
         == right_split[0] + lead(right_element) + right_split[1]
    """

    kind: AmbiguityKind
    left_element: int
    right_element: int
    word: Word
    left_split: Tuple[Word, Word]
    right_split: Tuple[Word, Word]

    @property
    def degree(self) -> int:
        return len(self.word)


def overlap_ambiguities(i: int, lead_i: Word, j: int, lead_j: Word,
                        max_degree: Optional[int] = None) -> List[Ambiguity]:
    """Proper nonempty suffixes of lead_i equal to prefixes of lead_j."""
    found = []
    for k in range(1, min(len(lead_i), len(lead_j))):
        if lead_i[-k:] != lead_j[:k]:
            continue
        word = lead_i + lead_j[k:]
        if max_degree is not None and len(word) > max_degree:
            continue
        found.append(Ambiguity(AmbiguityKind.OVERLAP, i, j, word, ("", lead_j[k:]), (lead_i[:-k], "")))
    return found


def inclusion_ambiguities(i: int, lead_i: Word, j: int, lead_j: Word) -> List[Ambiguity]:
    """Occurrences of lead_j as a factor of lead_i (i != j)."""
    if i == j or len(lead_j) > len(lead_i):
        return []
    found = []
    for p in range(len(lead_i) - len(lead_j) + 1):
        if lead_i[p:p + len(lead_j)] == lead_j:
            found.append(Ambiguity(AmbiguityKind.INCLUSION, i, j, lead_i, ("", ""),
                                   (lead_i[:p], lead_i[p + len(lead_j):])))
    return found


def sandwich(u: Word, g: FreePoly, v: Word, cap: Optional[int] = None) -> FreePoly:
    """u * g * v, truncated."""
    terms = {}
    for w, c in g.terms.items():
        nw = u + w + v
        if cap is None or len(nw) <= cap:
            terms[nw] = c
    return FreePoly._raw(terms, g.field, cap if cap is not None else g.cap)


class _Reducer:
    """Leftmost-occurrence lookup of leading words."""

    def __init__(self, elements: Sequence[Tuple[int, FreePoly]], order: MonomialOrder):
        self.order = order
        self.elements = dict(elements)
        self.leads: Dict[Word, int] = {}
        for idx, g in elements:
            lead = g.leading_word(order)
            if lead not in self.leads or idx < self.leads[lead]:
                self.leads[lead] = idx
        self.lengths = sorted({len(w) for w in self.leads})

    def find(self, w: Word) -> Optional[Tuple[int, int, Word]]:
        for pos in range(len(w)):
            best = None
            for L in self.lengths:
                if pos + L > len(w):
                    break
                idx = self.leads.get(w[pos:pos + L])
                if idx is not None and (best is None or idx < best[0]):
                    best = (idx, pos, w[pos:pos + L])
            if best is not None:
                return best
        return None

    def is_normal(self, w: Word) -> bool:
        return self.find(w) is None

    def reduce(self, f: FreePoly, cap: Optional[int]) -> FreePoly:
        """Full normal form, processing words in increasing reduction key."""
        order, field = self.order, f.field
        zero = field.zero
        key = order.reduction_key
        terms = {w: c for w, c in f.terms.items() if cap is None or len(w) <= cap}
        heap = [(key(w), w) for w in terms]
        heapq.heapify(heap)
        result: Dict[Word, Any] = {}
        while heap:
            _, w = heapq.heappop(heap)
            c = terms.pop(w, None)
            if c is None:
                continue
            hit = self.find(w)
            if hit is None:
                result[w] = c
                continue
            idx, pos, lead = hit
            g = self.elements[idx]
            u, v = w[:pos], w[pos + len(lead):]
            factor = c / g.terms[lead]
            for t, a in g.terms.items():
                if t == lead:
                    continue
                nw = u + t + v
                if cap is not None and len(nw) > cap:
                    continue
                if nw not in terms:
                    heapq.heappush(heap, (key(nw), nw))
                new = terms.get(nw, zero) - factor * a
                if new:
                    terms[nw] = new
                else:
                    terms.pop(nw, None)
        return FreePoly._raw(result, field, _cap_of(f.cap, cap))


def _cap_of(*caps: Optional[int]) -> Optional[int]:
    bounded = [c for c in caps if c is not None]
    return min(bounded) if bounded else None


@dataclass
class RewriteSystem:
    """
    An interreduced, truncated Gröbner basis.

    Attributes:
        elements: monic basis elements sorted by leading word
        order: monomial order (local mode certifies dimensions)
        cap: degree bound of the truncated computation
        complete_through: degree through which dimension claims are made
        field: coefficient field
    """

    elements: List[FreePoly]
    order: MonomialOrder
    cap: int
    complete_through: int
    field: FieldSpec
    _reducer: Optional[_Reducer] = dc_field(default=None, repr=False, compare=False)

    @property
    def reducer(self) -> _Reducer:
        if self._reducer is None:
            self._reducer = _Reducer(list(enumerate(self.elements)), self.order)
        return self._reducer

    def leading_words(self) -> List[Word]:
        return [g.leading_word(self.order) for g in self.elements]

    def is_normal(self, w: Word) -> bool:
        return self.reducer.is_normal(w)

    def normal_form(self, f: FreePoly) -> FreePoly:
        return normal_form(f, self)

    def to_record(self) -> Dict[str, Any]:
        return {
            "order": self.order.to_dict(),
            "cap": self.cap,
            "complete_through": self.complete_through,
            "field": self.field.label,
            "elements": [g.render(self.order) for g in self.elements],
            "leading_words": [render_word(w) for w in self.leading_words()],
        }

    @classmethod
    def from_record(cls, record: Dict[str, Any]) -> "RewriteSystem":
        order = MonomialOrder(**record["order"])
        field = parse_field_label(record.get("field", "QQ"))
        cap = int(record["cap"])
        elements = [parse_poly(text, field=field, cap=cap) for text in record["elements"]]
        return cls(elements, order, cap, int(record["complete_through"]), field)


def normal_form(f: FreePoly, G: RewriteSystem) -> FreePoly:
    """
    Reduce f until no leading word of G occurs in any of its words.

    Occurrences are taken leftmost first, elements tried in basis order; exact through G.cap.
    """
    if f.field != G.field:
        raise FieldMismatchError(f"Cannot reduce a {f.field.label} polynomial by a {G.field.label} system")
    return G.reducer.reduce(f, G.cap)


def s_element(amb: Ambiguity, elements: Dict[int, FreePoly], cap: Optional[int]) -> FreePoly:
    """Difference of the two reductions of an ambiguity's word (both elements monic)."""
    left = sandwich(amb.left_split[0], elements[amb.left_element], amb.left_split[1], cap)
    right = sandwich(amb.right_split[0], elements[amb.right_element], amb.right_split[1], cap)
    return left - right


def ambiguities(elements: Sequence[FreePoly], order: MonomialOrder = DEFAULT_ORDER,
                max_degree: Optional[int] = None) -> List[Ambiguity]:
    """All overlap and inclusion ambiguities among elements, witness degree at most max_degree."""
    leads = [g.leading_word(order) for g in elements]
    found: List[Ambiguity] = []
    for i, j in itertools.product(range(len(leads)), repeat=2):
        found.extend(overlap_ambiguities(i, leads[i], j, leads[j], max_degree))
        found.extend(inclusion_ambiguities(i, leads[i], j, leads[j]))
    return found


def unresolved_ambiguities(G: RewriteSystem, max_degree: Optional[int] = None) -> List[Ambiguity]:
    """Ambiguities of G (witness degree <= max_degree, default the cap) whose S-element is not reducible to 0."""
    limit = G.cap if max_degree is None else max_degree
    elements = dict(enumerate(G.elements))
    return [a for a in ambiguities(G.elements, G.order, limit) if normal_form(s_element(a, elements, G.cap), G)]


class _Completion:
    """Mutable state of one completion run."""

    def __init__(self, order: MonomialOrder, cap: int, field: FieldSpec):
        self.order, self.cap, self.field = order, cap, field
        self.basis: Dict[int, FreePoly] = {}
        self.leads: Dict[int, Word] = {}
        self.queue: List[Tuple[int, int, Any]] = []
        self.counter = itertools.count()
        self.next_id = itertools.count()
        self._reducer: Optional[_Reducer] = None

    def reducer(self) -> _Reducer:
        if self._reducer is None:
            self._reducer = _Reducer(sorted(self.basis.items()), self.order)
        return self._reducer

    def push_poly(self, p: FreePoly) -> None:
        if p:
            heapq.heappush(self.queue, (len(p.leading_word(self.order)), next(self.counter), p))

    def push_ambiguity(self, amb: Ambiguity) -> None:
        heapq.heappush(self.queue, (amb.degree, next(self.counter), amb))

    def insert(self, h: FreePoly) -> None:
        h = h.monic(self.order)
        lead = h.leading_word(self.order)
        for idx in [i for i, w in self.leads.items() if lead in w]:
            logger.debug(f"Requeueing element with lead {self.leads[idx]} (contains {lead})")
            self.push_poly(self.basis.pop(idx))
            del self.leads[idx]
        idx = next(self.next_id)
        self.basis[idx], self.leads[idx] = h, lead
        self._reducer = None
        limit = self.cap
        for j, w in self.leads.items():
            for amb in overlap_ambiguities(idx, lead, j, w, limit):
                self.push_ambiguity(amb)
            if j != idx:
                for amb in overlap_ambiguities(j, w, idx, lead, limit):
                    self.push_ambiguity(amb)

    def run(self) -> None:
        while self.queue:
            _, _, payload = heapq.heappop(self.queue)
            if isinstance(payload, Ambiguity):
                if payload.left_element not in self.basis or payload.right_element not in self.basis:
                    continue
                s = s_element(payload, self.basis, self.cap)
            else:
                s = payload
            h = self.reducer().reduce(s, self.cap)
            if h:
                self.insert(h)

    def interreduce(self) -> List[FreePoly]:
        reducer = self.reducer()
        out = []
        for idx in sorted(self.basis, key=lambda i: self.order.reduction_key(self.leads[i])):
            g, lead = self.basis[idx], self.leads[idx]
            tail = FreePoly._raw({w: c for w, c in g.terms.items() if w != lead}, g.field, g.cap)
            head = FreePoly._raw({lead: g.terms[lead]}, g.field, g.cap)
            out.append((head + reducer.reduce(tail, self.cap)).monic(self.order))
        return out


def complete(relations: Iterable[FreePoly], order: MonomialOrder = DEFAULT_ORDER, cap: Optional[int] = None,
             workers: Optional[int] = None, settings: Optional[WorkbenchSettings] = None) -> RewriteSystem:
    """
    Complete a relation set into an interreduced truncated Gröbner basis.

    Args:
        relations: generators of the ideal (zero relations are ignored)
        order: monomial order; local mode computes in K<<x,y>>/(I + words of degree > cap)
        cap: degree bound, defaults to the configured cap
        workers: threads used to reduce the final batch of S-elements

    Returns:
        RewriteSystem whose ambiguities up to the cap all resolve

    Raises:
        InvalidInputError: If no nonzero relation is given or the cap is below the relation degrees
        FieldError: If an element cannot be made monic
    """
    settings = settings or get_settings()
    cap = settings.default_cap if cap is None else cap
    workers = workers or settings.workers
    rels = [r for r in relations if r]
    if not rels:
        raise InvalidInputError("Completion needs at least one nonzero relation")
    field = rels[0].field
    for r in rels:
        rels[0]._check_field(r)
    rels = [r.with_cap(cap) if order.is_local else r.with_cap(None) for r in rels]
    if order.mode is OrderMode.GLOBAL and max(r.max_degree() for r in rels) > cap:
        raise InvalidInputError(f"Global completion needs cap >= relation degree, got cap {cap}")
    rels = [r for r in rels if r]
    if not rels:
        raise InvalidInputError(f"Every relation vanishes below the cap {cap}")
    input_degree = max(len(r.leading_word(order)) for r in rels)
    if input_degree > cap:
        raise InvalidInputError(f"Cap {cap} is below the leading degree {input_degree}")

    state = _Completion(order, cap, field)
    for r in rels:
        state.push_poly(r)
    rounds = 0
    while True:
        rounds += 1
        state.run()
        elements = state.interreduce()
        indexed = dict(enumerate(elements))
        pending = ambiguities(elements, order, cap)
        reducer = _Reducer(list(indexed.items()), order)

        def residue(amb: Ambiguity) -> FreePoly:
            return reducer.reduce(s_element(amb, indexed, cap), cap)

        with ThreadPoolExecutor(max_workers=workers) as pool:
            residues = [r for r in pool.map(residue, pending) if r]
        if not residues:
            break
        logger.debug(f"Verification round {rounds}: {len(residues)} unresolved ambiguities")
        for r in residues:
            state.push_poly(r)

    system = RewriteSystem(elements, order, cap, max(cap - input_degree, 0), field)
    logger.info(
        f"Completed {len(rels)} relations into {len(elements)} elements "
        f"(cap {cap}, complete through {system.complete_through})"
    )
    return system


def oracle_dimension(relations: Iterable[FreePoly], cap: int, field: Optional[FieldSpec] = None,
                     settings: Optional[WorkbenchSettings] = None) -> List[int]:
    """
    Per-degree dimensions of K<x,y>/(I + words of degree > cap) by row reduction.

    Rows are all truncated products u*r*v; with columns ordered by degree, the pivot count in degree n
    is the dimension of the degree-n initial forms of the ideal.

    Raises:
        ResourceCapExceeded: If cap exceeds the configured oracle limit
    """
    settings = settings or get_settings()
    if cap > settings.oracle_max_cap:
        raise ResourceCapExceeded(f"Oracle cap {cap} exceeds the limit {settings.oracle_max_cap}")
    rels = [r.with_cap(cap) for r in relations]
    rels = [r for r in rels if r]
    if field is None:
        field = rels[0].field if rels else FieldSpec(0)
    columns = {w: i for i, w in enumerate(words_up_to(cap))}
    rows: List[Dict[int, Any]] = []
    for r in rels:
        low = r.low_degree()
        for du in range(cap - low + 1):
            for dv in range(cap - low - du + 1):
                for u in words_of_degree(du):
                    for v in words_of_degree(dv):
                        row = {}
                        for w, c in r.terms.items():
                            if len(w) + du + dv <= cap:
                                row[columns[u + w + v]] = c
                        if row:
                            rows.append(row)
    counts = [2**n for n in range(cap + 1)]
    degree_of = [len(w) for w in columns]
    for p in sparse_pivots(rows, len(columns), field):
        counts[degree_of[p]] -= 1
    logger.debug(f"Oracle reduced {len(rows)} rows over {len(columns)} words")
    return counts
