"""
Classification
Cubic normal forms of potentials, degree-by-degree cleanup by kill-substitutions,
the X2Y family dimension formula and the end-to-end classification driver.
"""

import logging
from dataclasses import dataclass, field as dc_field, replace
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import Any, Dict, List, Optional, Set, Tuple

import sympy
from sympy.ntheory import factorint

from errors import InvalidInputError
from expr_parser import parse_poly
from linear import solve_sparse
from nc_core import (
    LETTERS,
    RATIONALS,
    FieldSpec,
    FreePoly,
    Substitution,
    Word,
    abelianize_cubic,
    render_word,
    substitute,
    words_of_degree,
)
from potential import (
    DerivativeMode,
    Potential,
    classes_of_degree,
    cyclic_class_coordinates,
    from_class_coordinates,
    relations_of,
)
from quotient import QuotientAlgebra, dimension_of
from settings import WorkbenchSettings, get_settings

logger = logging.getLogger(__name__)

_X, _Y = sympy.symbols("x y")

X2Y_CUBIC = {"xxy": 3}
X3Y3_CUBIC = {"xxx": 1, "yyy": 1}
X3_CUBIC = {"xxx": 1}

REPRESENTATIVES = {
    "dim8": "x^3 + y^3 + cyc(x y x y)",
    "dim9-a": "cyc(x^2 y) + y^4",
    "dim9-b": "cyc(x^2 y) + y^4 + y^5",
}


class CubicLabel(str, Enum):
    ZERO = "Zero"
    X3 = "X3"
    X2Y = "X2Y"
    X3Y3 = "X3Y3"


class StepKind(str, Enum):
    LINEAR = "linear"
    KILL = "kill"
    SCALE = "scale"


@dataclass
class CubicClass:
    """
    Root-multiplicity class of the abelianized cubic part.

    When transform is set, scale * (F o transform) has cubic part cyclically equal to the
    normal form of the label.
    """

    label: CubicLabel
    transform: Optional[Substitution] = None
    scale: Any = 1
    extension_required: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label.value,
            "transform": self.transform.to_dict() if self.transform else None,
            "scale": str(self.scale),
            "extension_required": self.extension_required,
        }


@dataclass
class KillStep:
    kind: StepKind
    degree: int
    substitution: Substitution
    killed: List[Word] = dc_field(default_factory=list)
    potential_scale: Any = 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "degree": self.degree,
            "substitution": self.substitution.to_dict(),
            "killed": [render_word(w) for w in self.killed],
            "potential_scale": str(self.potential_scale),
        }


@dataclass
class CanonicalX2Y:
    """cyc(x^2 y) + y^4 p(y) through the working cap."""

    potential: Potential
    p: List[Any]
    n: Optional[int]
    k: Optional[int]
    trail: List[KillStep]
    scale: Any = 1
    notes: List[str] = dc_field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "potential": self.potential.render(),
            "p": [str(c) for c in self.p],
            "n": self.n,
            "k": self.k,
            "trail": [s.to_dict() for s in self.trail],
            "notes": self.notes,
        }


@dataclass
class CanonicalX3Y3:
    potential: Potential
    trail: List[KillStep]
    scale: Any = 1
    notes: List[str] = dc_field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "potential": self.potential.render(),
            "trail": [s.to_dict() for s in self.trail],
            "notes": self.notes,
        }


def _require_rationals(field: FieldSpec) -> None:
    if not field.is_rational:
        raise InvalidInputError(f"Classification runs over QQ, got {field.label}")


def _rational(value: Any, field: FieldSpec = RATIONALS) -> sympy.Rational:
    q = field.to_fraction(value)
    return sympy.Rational(q.numerator, q.denominator)


def _fraction(value: sympy.Rational) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _rational_root(value: Any, n: int) -> Optional[Fraction]:
    """The rational n-th root of value, or None."""
    q = Fraction(value)
    if q < 0 and n % 2 == 0:
        return None
    num, exact_num = sympy.integer_nthroot(abs(q.numerator), n)
    den, exact_den = sympy.integer_nthroot(q.denominator, n)
    if not (exact_num and exact_den):
        return None
    return Fraction(-num if q < 0 else num, den)


def _squarefree_kernel(q: sympy.Rational) -> int:
    n = int(q.p) * int(q.q)
    kernel = -1 if n < 0 else 1
    for prime, exp in factorint(abs(n)).items():
        if exp % 2:
            kernel *= prime
    return kernel


def _linear_form(factor: sympy.Poly) -> Tuple[sympy.Rational, sympy.Rational]:
    return factor.coeff_monomial(_X), factor.coeff_monomial(_Y)


def _transform_from_forms(rows: List[Tuple[Any, Any]], field: FieldSpec, cap: Optional[int]) -> Substitution:
    """The substitution whose new variables are the given linear forms: (x, y) -> M^-1 (x, y)."""
    inv = sympy.Matrix(rows).inv()
    x, y = FreePoly.letter("x", field, cap), FreePoly.letter("y", field, cap)
    images = [
        x.scale(field.coerce(_fraction(inv[r, 0]))) + y.scale(field.coerce(_fraction(inv[r, 1])))
        for r in range(2)
    ]
    return Substitution(images[0], images[1], cap)


def _hessian_split(f: sympy.Poly) -> Tuple[Optional[List[Tuple[Any, Any]]], Optional[str]]:
    """Linear forms l1, l2 with f = a l1^3 + b l2^3 when the Hessian splits over QQ."""
    expr = f.as_expr()
    H = sympy.Poly(
        sympy.diff(expr, _X, 2) * sympy.diff(expr, _Y, 2) - sympy.diff(expr, _X, _Y) ** 2, _X, _Y
    )
    _, factors = H.factor_list()
    linear = [g for g, m in factors if g.total_degree() == 1]
    if len(linear) < 2:
        a, b, c = (H.coeff_monomial(m) for m in (_X**2, _X * _Y, _Y**2))
        return None, f"QQ(sqrt({_squarefree_kernel(b**2 - 4 * a * c)}))"
    return [_linear_form(linear[0]), _linear_form(linear[1])], None


def cubic_class(F: Potential) -> CubicClass:
    """
    Classify the degree-3 part of F by the root multiplicities of its abelianization.

    Triple root gives X3, double root X2Y, three distinct roots X3Y3. The transform and the
    potential scale realize the normal forms x^3, cyc(x^2 y) and x^3 + y^3 when the needed
    roots are rational; otherwise extension_required names the field extension.
    """
    field, cap = F.field, F.cap
    _require_rationals(field)
    coeffs = abelianize_cubic(F.graded_part(3))
    if not any(coeffs):
        return CubicClass(CubicLabel.ZERO, Substitution.identity(field, cap), field.one)

    a0, a1, a2, a3 = (_rational(c) for c in coeffs)
    f = sympy.Poly(a0 * _X**3 + a1 * _X**2 * _Y + a2 * _X * _Y**2 + a3 * _Y**3, _X, _Y)
    content, factors = f.factor_list()
    by_mult = {m: g for g, m in factors if g.total_degree() == 1}

    if 3 in by_mult:
        alpha, beta = _linear_form(by_mult[3])
        other = (0, 1) if alpha != 0 else (1, 0)
        transform = _transform_from_forms([(alpha, beta), other], field, cap)
        return CubicClass(CubicLabel.X3, transform, field.coerce(_fraction(1 / content)))
    if 2 in by_mult:
        u, v = _linear_form(by_mult[2]), _linear_form(by_mult[1])
        transform = _transform_from_forms([u, v], field, cap)
        return CubicClass(CubicLabel.X2Y, transform, field.coerce(_fraction(3 / content)))

    forms, extension = _hessian_split(f)
    if forms is None:
        logger.info(f"X3Y3 cubic needs the extension {extension}")
        return CubicClass(CubicLabel.X3Y3, None, field.one, extension)
    inv = sympy.Matrix(forms).inv()
    new_x = inv[0, 0] * _X + inv[0, 1] * _Y
    new_y = inv[1, 0] * _X + inv[1, 1] * _Y
    g = sympy.Poly(sympy.expand(f.as_expr().subs({_X: new_x, _Y: new_y}, simultaneous=True)), _X, _Y)
    a, b = g.coeff_monomial(_X**3), g.coeff_monomial(_Y**3)
    t = _rational_root(_fraction(b / a), 3)
    if t is None:
        extension = f"QQ(cbrt({b / a}))"
        logger.info(f"X3Y3 cubic needs the extension {extension}")
        return CubicClass(CubicLabel.X3Y3, None, field.one, extension)
    l1, l2 = forms
    rows = [l1, (l2[0] * _rational(t), l2[1] * _rational(t))]
    transform = _transform_from_forms(rows, field, cap)
    return CubicClass(CubicLabel.X3Y3, transform, field.coerce(_fraction(1 / a)))


def normalize_cubic(F: Potential, cc: Optional[CubicClass] = None) -> Tuple[FreePoly, CubicClass]:
    """scale * (F o transform); the body is returned unchanged when no transform exists."""
    cc = cc or cubic_class(F)
    if cc.transform is None:
        return F.body, cc
    return substitute(F.body, cc.transform, F.cap).scale(cc.scale), cc


def _first_order(part: FreePoly, v: str, m: Word) -> Dict[Word, Any]:
    """Class coordinates of the linear change of part under v -> v + m."""
    moved = part.map_words(lambda w: [(w[:i] + m + w[i + 1:], 1) for i, c in enumerate(w) if c == v])
    return cyclic_class_coordinates(moved)


def _survivors(label: CubicLabel, d: int) -> Set[Word]:
    if label is CubicLabel.X2Y:
        return {"y" * d}
    if label is CubicLabel.X3Y3 and d % 2 == 0:
        return {"xy" * (d // 2)}
    return set()


def _consistent_subset(rows: List[Dict[int, Any]], rhs: List[Any], ncols: int,
                       field: FieldSpec) -> List[int]:
    kept: List[int] = []
    for i in range(len(rows)):
        trial = kept + [i]
        if solve_sparse([rows[t] for t in trial], [rhs[t] for t in trial], ncols, field) is not None:
            kept = trial
    return kept


def _kill_degree(G: FreePoly, d: int, label: CubicLabel, cap: int) -> Tuple[FreePoly, Optional[KillStep]]:
    """
    One joint linear solve removing every degree-d class outside the survivors.

    Corrections x -> x + sum a_m m, y -> y + sum b_m m over words m of degree d-2 change degree d
    only through the cubic part. For X2Y with a nonzero y^4 coefficient the same corrections also
    reach y^(d+1), which is killed here too.
    """
    field = G.field
    survivors = _survivors(label, d)
    coords = cyclic_class_coordinates(G.degree_part(d))
    kill_classes = [c for c in classes_of_degree(d) if c not in survivors]
    extra = None
    quartic = G.degree_part(4)
    if label is CubicLabel.X2Y and d >= 5 and d + 1 <= cap and quartic.coefficient("yyyy"):
        extra = "y" * (d + 1)
        coords[extra] = cyclic_class_coordinates(G.degree_part(d + 1)).get(extra, field.zero)
        kill_classes.append(extra)
    targets = {c: coords[c] for c in kill_classes if coords.get(c)}
    if not targets:
        return G, None

    index = {c: i for i, c in enumerate(kill_classes)}
    cubic = G.degree_part(3)
    generators: List[Tuple[str, Word]] = []
    columns: List[Dict[Word, Any]] = []
    seen = set()
    for v in LETTERS:
        for m in words_of_degree(d - 2):
            effect = _first_order(cubic, v, m)
            if extra:
                reach = _first_order(quartic, v, m).get(extra)
                if reach:
                    effect[extra] = reach
            effect = {c: e for c, e in effect.items() if c in index}
            key = tuple(sorted((c, str(e)) for c, e in effect.items()))
            if not effect or key in seen:
                continue
            seen.add(key)
            generators.append((v, m))
            columns.append(effect)

    rows: List[Dict[int, Any]] = [{} for _ in kill_classes]
    for j, effect in enumerate(columns):
        for c, e in effect.items():
            rows[index[c]][j] = e
    rhs = [-coords.get(c, field.zero) for c in kill_classes]
    solution = solve_sparse(rows, rhs, len(columns), field)
    residual: List[Word] = []
    if solution is None:
        kept = _consistent_subset(rows, rhs, len(columns), field)
        residual = [c for i, c in enumerate(kill_classes) if i not in kept]
        logger.warning(f"Degree {d}: classes {residual} cannot be killed")
        solution = solve_sparse([rows[i] for i in kept], [rhs[i] for i in kept], len(columns), field)

    corrections = {"x": dict(), "y": dict()}
    for (v, m), a in zip(generators, solution):
        if a:
            corrections[v][m] = a
    images = [FreePoly({v: 1, **corrections[v]}, field, cap) for v in LETTERS]
    phi = Substitution(images[0], images[1], cap)
    killed = [c for c in targets if c not in residual]
    logger.debug(f"Degree {d}: killing {killed} with {len(columns)} independent corrections")
    return substitute(G, phi, cap), KillStep(StepKind.KILL, d, phi, killed)


def _check_cubic(F: Potential, expected: Dict[Word, int], name: str) -> None:
    got = cyclic_class_coordinates(F.graded_part(3))
    want = {c: F.field.coerce(v) for c, v in expected.items()}
    if got != want:
        raise InvalidInputError(f"{name} needs a potential in cubic normal form, got cubic {F.graded_part(3).render()}")


def _run_cleanup(body: FreePoly, label: CubicLabel, cap: int) -> Tuple[FreePoly, List[KillStep]]:
    G = body.with_cap(cap)
    trail: List[KillStep] = []
    for d in range(4, cap + 1):
        G, step = _kill_degree(G, d, label, cap)
        if step:
            trail.append(step)
    return G, trail


def _scaled(G: FreePoly, alpha: Any, beta: Any, potential_scale: Any, cap: int) -> Tuple[FreePoly, KillStep]:
    field = G.field
    phi = Substitution.scaling(field.coerce(alpha), field.coerce(beta), field, cap)
    step = KillStep(StepKind.SCALE, 1, phi, [], field.coerce(potential_scale))
    return substitute(G, phi, cap).scale(step.potential_scale), step


def _canonical_body(G: FreePoly) -> FreePoly:
    return from_class_coordinates(cyclic_class_coordinates(G), G.field, G.cap)


def cleanup_x2y(F: Potential, cap: Optional[int] = None) -> CanonicalX2Y:
    """
    Reduce a potential with cubic part cyc(x^2 y) to cyc(x^2 y) + y^4 p(y) through cap.

    Raises:
        InvalidInputError: If the cubic part is not cyc(x^2 y) up to cyclic equivalence
    """
    cap = cap if cap is not None else (F.cap or get_settings().default_cap)
    _require_rationals(F.field)
    _check_cubic(F, X2Y_CUBIC, "X2Y cleanup")
    field = F.field
    G, trail = _run_cleanup(F.body, CubicLabel.X2Y, cap)
    notes: List[str] = []
    scale = field.one

    coords = cyclic_class_coordinates(G)
    c4, c5 = coords.get("yyyy", field.zero), coords.get("y" * 5, field.zero)
    alpha = beta = None
    if c4:
        square = _rational_root(field.to_fraction(c4) ** 4 / field.to_fraction(c5) ** 3, 2) if c5 else None
        if square is not None:
            alpha, beta = square, field.to_fraction(c4) / field.to_fraction(c5)
        else:
            lam = field.to_fraction(c4)
            alpha, beta = lam * lam, lam
            if c5:
                notes.append("y^5 coefficient is not a rational square multiple; normalized y^4 only")
    else:
        lowest = min((len(c) for c, v in coords.items() if v and set(c) == {"y"} and len(c) >= 4), default=None)
        if lowest is not None:
            c = field.to_fraction(coords["y" * lowest])
            root = _rational_root(1 / c, lowest - 1)
            if root is not None:
                alpha, beta = Fraction(1), root
            elif _rational_root(c, 2) is not None:
                alpha, beta = _rational_root(c, 2), Fraction(1)
            else:
                notes.append(f"y^{lowest} coefficient left unnormalized over QQ")
    if alpha is not None and (alpha, beta) != (1, 1):
        potential_scale = 1 / (Fraction(alpha) ** 2 * Fraction(beta))
        G, step = _scaled(G, alpha, beta, potential_scale, cap)
        trail.append(step)
        scale = scale * step.potential_scale

    coords = cyclic_class_coordinates(G)
    p = [coords.get("y" * j, field.zero) for j in range(4, cap + 1)]
    while p and not p[-1]:
        p.pop()
    nonzero = [j for j, c in enumerate(p) if c]
    k = nonzero[0] if nonzero else None
    even = [j for j in nonzero if j % 2 == 0]
    n = even[0] // 2 if even else None
    canonical = Potential(_canonical_body(G))
    logger.info(f"X2Y canonical form {canonical.render()} (n={n}, k={k}, {len(trail)} steps)")
    return CanonicalX2Y(canonical, p, n, k, trail, scale, notes)


def cleanup_x3y3(F: Potential, cap: Optional[int] = None) -> CanonicalX3Y3:
    """
    Remove every class above degree 3 except the alternating ones, then scale cyc(x y x y) to 1.

    Raises:
        InvalidInputError: If the cubic part is not x^3 + y^3 up to cyclic equivalence
    """
    cap = cap if cap is not None else (F.cap or get_settings().default_cap)
    _require_rationals(F.field)
    _check_cubic(F, X3Y3_CUBIC, "X3Y3 cleanup")
    field = F.field
    G, trail = _run_cleanup(F.body, CubicLabel.X3Y3, cap)
    notes: List[str] = []
    scale = field.one
    c = cyclic_class_coordinates(G).get("xyxy", field.zero)
    if not c:
        notes.append("cyc(x y x y) coefficient vanishes")
    elif c != field.coerce(4):
        t = Fraction(4) / field.to_fraction(c)
        G, step = _scaled(G, t, t, 1 / t**3, cap)
        trail.append(step)
        scale = step.potential_scale
    canonical = Potential(_canonical_body(G))
    logger.info(f"X3Y3 canonical form {canonical.render()} ({len(trail)} steps)")
    return CanonicalX3Y3(canonical, trail, scale, notes)


def dim_formula(n: int, k: int) -> int:
    """Dimension of cyc(x^2 y) + y^4 p(y) where p has order k and even part of order 2n."""
    if n < 0 or k < 0:
        raise InvalidInputError("Family parameters must be nonnegative")
    return 3 * (2 * n + 3) if k == 2 * n else 4 * n + k + 9


def family_basis(n: int, k: int) -> List[Word]:
    """Expected leading words of the family's Gröbner basis."""
    return ["xy", "xx", "y" * (2 * n + 3) + "x", "y" * (2 * n + 6 + k)]


def family_potential(p: List[Any], field: FieldSpec = RATIONALS, cap: Optional[int] = None) -> Potential:
    """cyc(x^2 y) + y^4 (p_0 + p_1 y + ...)."""
    terms: Dict[Word, Any] = {"xxy": 1, "xyx": 1, "yxx": 1}
    for j, c in enumerate(p):
        if c:
            terms["y" * (4 + j)] = c
    return Potential(FreePoly(terms, field, cap))


def representative_potential(name: str, cap: Optional[int] = None) -> Potential:
    try:
        text = REPRESENTATIVES[name]
    except KeyError:
        raise InvalidInputError(f"Unknown representative {name!r}; known: {sorted(REPRESENTATIVES)}")
    return Potential(parse_poly(text, RATIONALS, cap))


@dataclass
class ClassificationReport:
    """
    Outcome of classify_potential.

    canonical is related to the input by scale * (input o substitution()) up to cyclic equivalence
    through the cap, apart from terms above the nilpotency index that a note reports as dropped.
    Those lie in the ideal, so the substitution still maps the input's algebra onto the canonical
    one. quotient holds the dimension verdict of its simple-derivative relations.
    """

    source: Potential
    cubic: CubicClass
    canonical: Potential
    trail: List[KillStep]
    scale: Any
    quotient: QuotientAlgebra
    family: Optional[CanonicalX2Y] = None
    formula_dimension: Optional[int] = None
    representative: Optional[str] = None
    lower_bound: Optional[int] = None
    notes: List[str] = dc_field(default_factory=list)

    @property
    def finite(self) -> bool:
        return self.quotient.finite

    @property
    def dimension(self) -> Optional[int]:
        return self.quotient.total_dimension

    def substitution(self) -> Substitution:
        cap = self.canonical.cap
        start = Substitution.identity(self.source.field, cap)
        return reduce(lambda acc, step: acc.then(step.substitution, cap), self.trail, start)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "cubic": self.cubic.to_dict(),
            "canonical": self.canonical.render(),
            "trail": [s.to_dict() for s in self.trail],
            "verdict": "finite" if self.finite else "inconclusive",
            "quotient": self.quotient.summary(),
            "representative": self.representative,
            "lower_bound": self.lower_bound,
            "formula_dimension": self.formula_dimension,
            "notes": self.notes,
            "isomorphism_hint": isomorphism_hint(self).to_dict(),
        }
        if self.family:
            data["family"] = {"p": [str(c) for c in self.family.p], "n": self.family.n, "k": self.family.k}
        return data


def isomorphism_hint(report: ClassificationReport) -> Substitution:
    """Images of x, y under the isomorphism from the input's algebra to the canonical one (Ginzburg relations)."""
    return report.substitution()


def dominates(hilbert: List[int], prefix: Tuple[int, ...] = (1, 2, 3, 4)) -> bool:
    padded = list(hilbert) + [0] * len(prefix)
    return all(a >= b for a, b in zip(padded, prefix))


def x3_lower_bound(quotient: QuotientAlgebra) -> int:
    """Dimension lower bound from the certified Hilbert values (the exact total when finite)."""
    if quotient.finite:
        return quotient.total_dimension or 0
    return sum(quotient.hilbert[:4])


def _above(body: FreePoly, degree: int) -> List[Word]:
    return [w for w in body.terms if len(w) > degree]


def _drop_vanishing_tail(canonical: Potential, quotient: QuotientAlgebra, cap: int, workers: Optional[int],
                         settings: WorkbenchSettings) -> Tuple[Potential, QuotientAlgebra, Optional[int]]:
    """
    Drop the terms of degree above the nilpotency index when the algebra does not change.

    Such terms only move the relations inside m^index, which lies in the ideal of a finite
    algebra. The ideals agree once the truncated potential gives the same dimension, under
    both derivative conventions. Returns the index used, or None when nothing was dropped.
    """
    if not quotient.finite or not _above(canonical.body, quotient.nilpotency_index):
        return canonical, quotient, None
    ginzburg = dimension_of(relations_of(canonical.with_mode(DerivativeMode.GINZBURG)), cap,
                            workers=workers, settings=settings)
    if not ginzburg.finite:
        return canonical, quotient, None
    index = max(quotient.nilpotency_index, ginzburg.nilpotency_index)
    dropped = _above(canonical.body, index)
    if not dropped:
        return canonical, quotient, None
    body = canonical.body
    truncated = Potential(FreePoly({w: c for w, c in body.terms.items() if len(w) <= index}, body.field, body.cap))
    simple = dimension_of(relations_of(truncated), cap, workers=workers, settings=settings)
    twisted = dimension_of(relations_of(truncated.with_mode(DerivativeMode.GINZBURG)), cap,
                           workers=workers, settings=settings)
    if (simple.finite and simple.total_dimension == quotient.total_dimension
            and twisted.finite and twisted.total_dimension == ginzburg.total_dimension):
        logger.debug(f"Dropped {len(dropped)} terms above degree {index}")
        return truncated, simple, index
    logger.warning(f"Terms above degree {index} change the algebra; keeping them")
    return canonical, quotient, None


def classify_potential(F: Potential, cap: Optional[int] = None, workers: Optional[int] = None,
                       settings: Optional[WorkbenchSettings] = None) -> ClassificationReport:
    """
    Cubic class, cleanup, completion and Hilbert verdict of a potential over QQ.

    Inconclusive finiteness is reported in the verdict, not raised.
    """
    settings = settings or get_settings()
    cap = cap if cap is not None else settings.default_cap
    _require_rationals(F.field)
    F = Potential(F.body.with_cap(cap), F.derivative_mode)
    body, cc = normalize_cubic(F)
    trail: List[KillStep] = []
    scale = cc.scale
    notes: List[str] = []
    if cc.transform is not None and not cc.transform.is_identity():
        trail.append(KillStep(StepKind.LINEAR, 1, cc.transform, [], cc.scale))
    if cc.extension_required:
        notes.append(f"cubic normal form needs {cc.extension_required}")

    family = None
    if cc.label is CubicLabel.X2Y:
        family = cleanup_x2y(Potential(body), cap)
        canonical, steps = family.potential, family.trail
        scale, notes = scale * family.scale, notes + family.notes
    elif cc.label is CubicLabel.X3Y3 and cc.transform is not None:
        result = cleanup_x3y3(Potential(body), cap)
        canonical, steps = result.potential, result.trail
        scale, notes = scale * result.scale, notes + result.notes
    else:
        canonical, steps = Potential(_canonical_body(body)), []
    trail.extend(steps)

    relations = relations_of(canonical.with_mode(DerivativeMode.SIMPLE))
    quotient = dimension_of(relations, cap, workers=workers, settings=settings)
    canonical, quotient, index = _drop_vanishing_tail(canonical, quotient, cap, workers, settings)
    if index is not None:
        notes.append(f"terms of degree above {index} dropped; they lie in the ideal")
        if family:
            p = family.p[:max(index - 3, 0)]
            while p and not p[-1]:
                p.pop()
            family = replace(family, potential=canonical, p=p)
    report = ClassificationReport(F, cc, canonical, trail, scale, quotient, family, notes=notes)

    if family and family.n is not None:
        report.formula_dimension = dim_formula(family.n, family.k)
        if quotient.finite and quotient.total_dimension != report.formula_dimension:
            notes.append(
                f"measured dimension {quotient.total_dimension} differs from formula {report.formula_dimension}"
            )
    if quotient.finite:
        total = quotient.total_dimension
        if cc.label is CubicLabel.X3Y3 and total == 8:
            report.representative = "dim8"
        elif cc.label is CubicLabel.X2Y and total == 9 and family:
            report.representative = "dim9-b" if len(family.p) > 1 and family.p[1] else "dim9-a"
    if cc.label is CubicLabel.X3:
        report.lower_bound = x3_lower_bound(quotient)
    logger.info(
        f"Classified {F.render()}: {cc.label.value}, "
        f"{'dimension ' + str(quotient.total_dimension) if quotient.finite else 'inconclusive'}"
    )
    return report
