"""Toric residues through the map Phi and global residues in the torus.

A toric residue is ``theta * prod(k) * n! * vol(P)`` where ``theta`` is the
Jacobian coordinate of any solution of ``Phi(Lambda, theta) = H``. Global
residues of monomials reduce to toric residues with ``F_0 = x^(mu- + c)``
and ``H = x^(mu+ + c)``; mixed systems are first brought to one common
degree with random multipliers.
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass, replace
from itertools import combinations_with_replacement
from math import prod
from typing import Any, Callable, Mapping, Optional, Sequence

from sympy.polys.domains import QQ
from sympy.polys.domains.domain import Domain
from sympy.polys.polyerrors import ExactQuotientFailed

from toricres.config import (
    COMPLETION_SEARCH_LIMIT,
    DEFAULT_SEED,
    EXTRA_SAMPLES,
    MAX_EVALUATION_RETRIES,
    MAX_GENERICITY_RETRIES,
    MAX_MODULI,
    MAX_SAMPLE_RETRIES,
    Q_DRAW_RANGE,
    SAMPLE_RANGE,
    SYMBOLIC_SOLVE_LIMIT,
    Strategy,
)
from toricres.cox import CoxRing, dehomogenize
from toricres.errors import (
    ArityMismatch,
    DegenerateLeadingForm,
    DegreeMismatch,
    DenominatorNotCertified,
    FacetResultantVanishes,
    GenericityFailure,
    InternalError,
    MismatchBetweenDraws,
    ResultantVanishes,
    SingularMatrix,
)
from toricres.lattice import (
    dot,
    minkowski_sum,
    mixed_volume,
    newton_polytope,
    normalized_volume,
    scaled_lattice_points,
    smith_decomposition,
)
from toricres.linalg import (
    PolyMatrix,
    cramer_component,
    random_point,
    select_independent_columns,
    solve_component_numeric,
)
from toricres.modular import (
    combine_residues,
    evaluate_reduced,
    modular_primes,
    monomial_mod,
    rational_reconstruction,
    reduce_element,
    solve_component_mod,
    transposed_vandermonde_solve,
)
from toricres.models import (
    CompletionVector,
    CoxPolynomial,
    FacetResultantSet,
    Factorization,
    FactorPower,
    LatticePolytope,
    MixedReduction,
    PhiMatrix,
    Point,
    ResidueValue,
)
from toricres.polynomials import (
    RationalFunction,
    SparsePolynomial,
    as_coefficient,
    domain_symbols,
    evaluate_element,
    is_numeric,
)
from toricres.resultants import (
    GenericSystem,
    build_phi,
    facet_resultants,
    generic_system,
    is_generic_system,
)

logger = logging.getLogger(__name__)


# --- Toric residues ---


@dataclass(frozen=True)
class ToricResidueProblem:
    """``n+1`` forms with supports in ``k_i P`` and a numerator supported in ``(kappa P)°``.

    Everything is kept in torus coordinates; ``from_cox`` accepts
    homogeneous data and dehomogenizes it.
    """

    polytope: LatticePolytope
    forms: tuple[SparsePolynomial, ...]
    k: tuple[int, ...]
    numerator: SparsePolynomial

    def __post_init__(self) -> None:
        n = self.polytope.ambient_dim
        if len(self.forms) != n + 1 or len(self.k) != n + 1:
            raise ArityMismatch(f"a toric residue needs {n + 1} forms and degrees")
        for i, (form, ki) in enumerate(zip(self.forms, self.k)):
            if any(not self.polytope.contains(e, ki) for e in form.support):
                raise DegreeMismatch(f"F{i} is not of degree {ki}*beta")
        kappa = sum(self.k)
        if any(not self.polytope.contains(e, kappa, strict=True) for e in self.numerator.support):
            raise DegreeMismatch(f"H is not of the critical degree {kappa}*beta - beta0")

    @classmethod
    def from_cox(cls, ring: CoxRing, forms: Sequence[CoxPolynomial], numerator: CoxPolynomial) -> ToricResidueProblem:
        kappa = sum(F.k for F in forms)
        if not numerator.interior or numerator.k != kappa:
            raise DegreeMismatch(f"H must have degree {kappa}*beta - beta0")
        return cls(
            ring.polytope,
            tuple(dehomogenize(F, ring) for F in forms),
            tuple(F.k for F in forms),
            dehomogenize(numerator, ring),
        )

    @property
    def normalization(self) -> int:
        return prod(self.k) * normalized_volume(self.polytope)


@dataclass(frozen=True)
class InterpolationPlan:
    """What is known about a symbolic residue before interpolating ``N = Res * D``.

    ``N`` has degree ``deg_g(D) - 1`` in the parameters of each group ``g``
    and, when ``D`` is weight homogeneous, torus weight ``weight(D) - shift``.
    """

    denominator: Any
    groups: tuple[tuple[str, ...], ...]
    weights: Mapping[str, Point]
    shift: Point


def _phi_system(problem: ToricResidueProblem) -> tuple[PhiMatrix, list[Any]]:
    phi = build_phi(problem.forms, problem.polytope, problem.k)
    domain = phi.matrix.domain
    rhs = [as_coefficient(domain, problem.numerator.coefficient(row)) for row in phi.layout.rows]
    return phi, rhs


def _numeric_theta(phi: PhiMatrix, rhs: Sequence[Any], point: Optional[Mapping[str, Any]] = None) -> Optional[Any]:
    matrix = phi.matrix
    if point is not None:
        domain = matrix.domain
        matrix = matrix.specialize(point)
        rhs = [evaluate_element(domain, x, point) for x in rhs]
    solution = solve_component_numeric(matrix, rhs, phi.layout.jacobian_column)
    return solution.value if solution.unique else None


def _check_residual(phi: PhiMatrix, rhs: Sequence[Any], theta: RationalFunction, rng: random.Random) -> None:
    """Compare ``theta`` with the numeric solution of the full system at a random point."""
    domain = phi.matrix.domain
    for _ in range(MAX_EVALUATION_RETRIES):
        point = random_point(domain, rng)
        if not evaluate_element(domain, theta.denominator, point):
            continue
        expected = _numeric_theta(phi, rhs, point)
        if expected is None:
            continue
        if expected != theta.evaluate(point):
            raise InternalError("Cramer solution does not solve the full system")
        return
    logger.warning("residual check skipped: no usable evaluation point")


def _symbolic_theta(phi: PhiMatrix, rhs: Sequence[Any], rng: random.Random) -> RationalFunction:
    """``theta`` by Cramer's rule on a nonsingular square column selection containing J."""
    matrix = phi.matrix
    jacobian = phi.layout.jacobian_column
    order = [jacobian] + [c for c in range(matrix.ncols) if c != jacobian]
    try:
        columns = select_independent_columns(matrix, order, rng)
    except SingularMatrix as exc:
        raise ResultantVanishes("Phi is not surjective: the resultant vanishes") from exc
    if jacobian not in columns:
        raise ResultantVanishes("the Jacobian column is dependent on the others")
    square = matrix.submatrix(range(matrix.nrows), columns)
    try:
        theta = cramer_component(square, rhs, columns.index(jacobian))
    except SingularMatrix as exc:
        raise ResultantVanishes("the selected minor vanishes identically") from exc
    _check_residual(phi, rhs, theta, rng)
    return theta


def _candidate_monomials(domain: Domain, plan: InterpolationPlan) -> list[tuple[int, ...]]:
    names = domain_symbols(domain)
    index = {name: i for i, name in enumerate(names)}
    denominator_terms = list(plan.denominator.terms())
    covered = {name for group in plan.groups for name in group}
    groups = [(tuple(g), True) for g in plan.groups]
    leftover = tuple(name for name in names if name not in covered)
    if leftover:
        groups.append((leftover, False))

    allowed = []
    for group, homogeneous in groups:
        degrees = {sum(monom[index[v]] for v in group) for monom, _ in denominator_terms}
        if not homogeneous or len(degrees) != 1:
            allowed.append(range(0, max(degrees) + 1))
        else:
            top = degrees.pop()
            allowed.append(range(top - 1, top) if top >= 1 else range(0))

    n = len(plan.shift)
    weights = {name: tuple(plan.weights.get(name, (0,) * n)) for name in names}

    def weight_of(monom: Sequence[int]) -> Point:
        return tuple(sum(e * weights[name][i] for name, e in zip(names, monom)) for i in range(n))

    def add(u: Sequence[int], v: Sequence[int]) -> tuple[int, ...]:
        return tuple(a + b for a, b in zip(u, v))

    denominator_weights = {weight_of(monom) for monom, _ in denominator_terms}
    target = None
    if len(denominator_weights) == 1 and plan.weights:
        target = tuple(w - s for w, s in zip(denominator_weights.pop(), plan.shift))

    # one bucket per group: torus weight -> monomials of an allowed degree
    buckets: list[dict[Point, list[tuple[int, ...]]]] = []
    for (group, _), degrees in zip(groups, allowed):
        bucket: dict[Point, list[tuple[int, ...]]] = {}
        for degree in degrees:
            for combo in combinations_with_replacement([index[v] for v in group], degree):
                monom = [0] * len(names)
                for i in combo:
                    monom[i] += 1
                bucket.setdefault(weight_of(monom), []).append(tuple(monom))
        buckets.append(bucket)

    partial: dict[Point, list[tuple[int, ...]]] = {(0,) * n: [(0,) * len(names)]}
    for bucket in buckets[:-1]:
        merged: dict[Point, list[tuple[int, ...]]] = {}
        for w1, firsts in partial.items():
            for w2, seconds in bucket.items():
                merged.setdefault(add(w1, w2), []).extend(add(a, b) for a in firsts for b in seconds)
        partial = merged

    last = buckets[-1]
    everything = [m for ms in last.values() for m in ms]
    selected: set[tuple[int, ...]] = set()
    for w1, firsts in partial.items():
        # the last group only contributes the complementary weight
        matches = everything if target is None else last.get(tuple(t - w for t, w in zip(target, w1)), [])
        selected.update(add(a, b) for a in firsts for b in matches)
    return sorted(selected)


def _modular_images(
    square: PolyMatrix,
    rhs: Sequence[Any],
    target: int,
    normalization: int,
    denominator: Any,
    candidates: Sequence[tuple[int, ...]],
    p: int,
    rng: random.Random,
) -> Optional[list[int]]:
    """Coefficients of ``N`` mod ``p`` from samples at the powers of a random point.

    At ``omega^k`` the sample equals ``sum_c N_c * nu_c^k`` with
    ``nu_c = omega^c``, a transposed Vandermonde system. None when ``p``
    divides a coefficient denominator.
    """
    domain = square.domain
    rows = [[reduce_element(domain, x, p) for x in row] for row in square.entries]
    values = [reduce_element(domain, x, p) for x in rhs]
    scale_terms = reduce_element(domain, denominator, p)
    if scale_terms is None or any(v is None for v in values) or any(e is None for row in rows for e in row):
        return None
    width = len(domain_symbols(domain))
    for _ in range(MAX_SAMPLE_RETRIES):
        omega = [rng.randrange(2, p) for _ in range(width)]
        nodes = [monomial_mod(omega, c, p) for c in candidates]
        if len(set(nodes)) < len(nodes):
            continue
        samples: list[int] = []
        current = [1] * width
        for _ in candidates:
            current = [x * w % p for x, w in zip(current, omega)]
            scale = evaluate_reduced(scale_terms, current, p)
            theta = solve_component_mod(
                [[evaluate_reduced(e, current, p) for e in row] for row in rows],
                [evaluate_reduced(v, current, p) for v in values],
                target,
                p,
            ) if scale else None
            if theta is None:
                break
            samples.append(theta * normalization * scale % p)
        else:
            shifted = transposed_vandermonde_solve(nodes, samples, p)
            return [y * pow(node, -1, p) % p for y, node in zip(shifted, nodes)]
    raise GenericityFailure("too many degenerate interpolation samples")


def _agrees_exactly(
    phi: PhiMatrix, rhs: Sequence[Any], normalization: int, denominator: Any, numerator: Any, rng: random.Random
) -> bool:
    """Compare ``N`` with exact residues times ``D`` at small random points."""
    domain = phi.matrix.domain
    checked = 0
    for _ in range(MAX_SAMPLE_RETRIES):
        point = random_point(domain, rng, SAMPLE_RANGE)
        scale = evaluate_element(domain, denominator, point)
        theta = _numeric_theta(phi, rhs, point) if scale else None
        if theta is None:
            continue
        if theta * normalization * scale != evaluate_element(domain, numerator, point):
            return False
        checked += 1
        if checked == EXTRA_SAMPLES:
            return True
    raise GenericityFailure("too many degenerate interpolation samples")


def _interpolated_value(
    phi: PhiMatrix, rhs: Sequence[Any], normalization: int, plan: InterpolationPlan, rng: random.Random
) -> RationalFunction:
    """Numerator by sparse interpolation modulo primes, checked exactly over QQ."""
    domain = phi.matrix.domain
    candidates = _candidate_monomials(domain, plan)
    logger.info("interpolating over %d candidate monomials", len(candidates))
    if not candidates:
        if not _agrees_exactly(phi, rhs, normalization, plan.denominator, domain.zero, rng):
            raise DenominatorNotCertified("nonzero residue where the degree bound forces zero")
        return RationalFunction.build(domain.zero, plan.denominator, domain)

    matrix = phi.matrix
    jacobian = phi.layout.jacobian_column
    order = [jacobian] + [c for c in range(matrix.ncols) if c != jacobian]
    try:
        columns = select_independent_columns(matrix, order, rng)
    except SingularMatrix as exc:
        raise ResultantVanishes("Phi is not surjective: the resultant vanishes") from exc
    if jacobian not in columns:
        raise ResultantVanishes("the Jacobian column is dependent on the others")
    square = matrix.submatrix(range(matrix.nrows), columns)

    residues: list[int] = []
    modulus = 1
    used = 0
    for p in modular_primes(MAX_MODULI):
        images = _modular_images(
            square, rhs, columns.index(jacobian), normalization, plan.denominator, candidates, p, rng
        )
        if images is None:
            logger.debug("prime %d divides a coefficient denominator, skipped", p)
            continue
        residues = images if modulus == 1 else combine_residues(residues, modulus, images, p)
        modulus *= p
        used += 1
        coefficients = [rational_reconstruction(r, modulus) for r in residues]
        if any(c is None for c in coefficients):
            continue
        numerator = domain.ring.from_dict({m: c for m, c in zip(candidates, coefficients) if c})
        if _agrees_exactly(phi, rhs, normalization, plan.denominator, numerator, rng):
            logger.debug("numerator recovered modulo %d primes", used)
            return RationalFunction.build(numerator, plan.denominator, domain)
    raise DenominatorNotCertified("interpolated numerator fails the exact check under the denominator bound")


def _trivial_factorization(value: RationalFunction) -> Factorization:
    if value.is_polynomial:
        return Factorization(value.domain, QQ.one)
    return Factorization(value.domain, QQ.one, (FactorPower("denominator", value.denominator, 1),))


def toric_residue(
    problem: ToricResidueProblem,
    strategy: Strategy = Strategy.AUTO,
    plan: Optional[InterpolationPlan] = None,
    rng: Optional[random.Random] = None,
) -> ResidueValue:
    """Toric residue of ``H`` with respect to ``F_0, ..., F_n``.

    Numeric systems are solved exactly over QQ. Symbolic systems use
    Cramer's rule unless interpolation is requested (or chosen by AUTO for
    large layouts) and a denominator ``plan`` is available.
    """
    rng = rng or random.Random(DEFAULT_SEED)
    phi, rhs = _phi_system(problem)
    domain = phi.matrix.domain
    normalization = problem.normalization
    if is_numeric(domain):
        theta = _numeric_theta(phi, rhs)
        if theta is None:
            raise ResultantVanishes("Phi(Lambda, theta) = H has no unique theta: the resultant vanishes")
        value = RationalFunction.from_element(theta * normalization, domain)
        used = "numeric"
    else:
        interpolate = plan is not None and (
            strategy is Strategy.INTERPOLATE
            or (strategy is Strategy.AUTO and phi.matrix.nrows > SYMBOLIC_SOLVE_LIMIT)
        )
        if strategy is Strategy.INTERPOLATE and plan is None:
            logger.warning("no denominator bound available, falling back to Cramer's rule")
        if interpolate:
            value = _interpolated_value(phi, rhs, normalization, plan, rng)
            used = "interpolate"
        else:
            value = _symbolic_theta(phi, rhs, rng).scale(normalization)
            used = "cramer"
    logger.info("toric residue solved (%s) on a %dx%d Phi", used, phi.matrix.nrows, phi.matrix.ncols)
    return ResidueValue(value, _trivial_factorization(value), normalization, used)


# --- Exponent bookkeeping ---


def mu_split(m: Sequence[int], normals: Sequence[Point], offsets: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """``mu+ = max(0, <m,eta> + off - 1)`` and ``mu- = -min(0, <m,eta> + off - 1)``."""
    values = [dot(m, eta) + off - 1 for eta, off in zip(normals, offsets)]
    return tuple(max(0, v) for v in values), tuple(max(0, -v) for v in values)


def _search_completions(ring: CoxRing, a: Sequence[int], avoid: Sequence[int], k0: int) -> list[tuple[int, ...]]:
    found = []
    for point in scaled_lattice_points(ring.polytope, k0):
        c = tuple(e - x for e, x in zip(ring.exponent_of(point, k0), a))
        if min(c) >= 0 and all(c[i] == 0 for i in avoid):
            found.append(c)
    return sorted(found, key=lambda c: (sum(c), c))


def _constructive_completion(ring: CoxRing, a: Sequence[int], avoid: Optional[int]) -> CompletionVector:
    """Barycenter construction on one facet; always succeeds."""
    i = 0 if avoid is None else avoid
    facet = ring.polytope.facets[i]
    on_facet = [v for v in ring.polytope.vertices if facet.value(v) == 0]
    tau = len(on_facet)
    u = tuple(sum(c) for c in zip(*on_facet))
    smith = smith_decomposition([facet.normal])
    sign = smith.left[0][0]
    m = tuple(a[i] * sign * row[0] for row in smith.right)
    weights = [dot(u, eta) + tau * b for eta, b in zip(ring.normals, ring.offsets)]
    rests = [dot(m, eta) - x for eta, x in zip(ring.normals, a)]
    multiple = 1
    for w, r in zip(weights, rests):
        if r < 0 and w > 0:
            multiple = max(multiple, -(r // w))
    k0 = tau * multiple
    c = tuple(multiple * w + r for w, r in zip(weights, rests))
    return CompletionVector(c, k0, avoid, "construction")


def completion_vector(ring: CoxRing, a: Sequence[int], avoid: Optional[int] = None) -> CompletionVector:
    """Nonnegative ``c`` and ``k0`` with ``x^(a+c)`` of degree ``k0*beta``.

    The smallest ``k0`` up to the search limit wins; the facet barycenter
    construction is the fallback.
    """
    for k0 in range(1, COMPLETION_SEARCH_LIMIT + 1):
        found = _search_completions(ring, a, () if avoid is None else (avoid,), k0)
        if found:
            return CompletionVector(found[0], k0, avoid)
    logger.debug("completion search exhausted, using the facet construction")
    return _constructive_completion(ring, a, avoid)


def completion_vectors(ring: CoxRing, a: Sequence[int], count: int) -> list[CompletionVector]:
    """Up to ``count`` distinct completions, by increasing ``k0``."""
    results: list[CompletionVector] = []
    for k0 in range(1, COMPLETION_SEARCH_LIMIT + 1):
        for c in _search_completions(ring, a, (), k0):
            results.append(CompletionVector(c, k0))
            if len(results) == count:
                return results
    return results


# --- Denominators ---


def _primitive(element: Any) -> Any:
    _, primitive = element.primitive()
    return -primitive if primitive.LC < 0 else primitive


def denominator_bound(mu_minus: Sequence[int], facet_set: FacetResultantSet) -> Factorization:
    """``prod_i (R^eta_i)^mu-_i`` over the facets of the Minkowski sum, in facet order."""
    factors = tuple(
        FactorPower(entry.label, entry.resultant, mu)
        for entry, mu in zip(facet_set.entries, mu_minus)
        if mu
    )
    return Factorization(facet_set.domain, QQ.one, factors)


def certify_denominator(value: RationalFunction, facet_set: FacetResultantSet, mu_minus: Sequence[int]) -> Factorization:
    """Split the reduced denominator into facet resultant powers and a rational unit."""
    domain = value.domain
    if is_numeric(domain) or value.is_polynomial:
        return Factorization(domain, QQ.one)
    remainder = value.denominator
    factors = []
    for entry, mu in zip(facet_set.entries, mu_minus):
        base = as_coefficient(domain, entry.base)
        if not mu or base.is_ground:
            continue
        # a specialized facet resultant may only partly survive in the denominator
        pieces: Counter = Counter()
        for _ in range(mu * entry.ell):
            common = remainder.gcd(base)
            if common.is_ground:
                break
            common = _primitive(common)
            try:
                remainder = remainder.exquo(common)
            except ExactQuotientFailed as exc:
                raise InternalError(f"gcd {common} does not divide the denominator") from exc
            pieces[common] += 1
        factors.extend(FactorPower(entry.label, piece, count) for piece, count in pieces.items())
    if not remainder.is_ground:
        raise DenominatorNotCertified(f"denominator factor {remainder} divides no facet resultant power")
    return Factorization(domain, remainder.LC, tuple(factors))


def _check_facets(facet_set: FacetResultantSet, exponents: Sequence[int]) -> None:
    if not is_numeric(facet_set.domain):
        return
    for entry, e in zip(facet_set.entries, exponents):
        if e and not entry.resultant:
            raise FacetResultantVanishes(entry.facet.normal)


def _completion_off_vanishing(ring: CoxRing, facet_set: FacetResultantSet, mu_minus: Sequence[int]) -> CompletionVector:
    """A completion that is zero on every facet whose resultant vanishes."""
    vanishing = []
    if is_numeric(facet_set.domain):
        normals = list(ring.normals)
        vanishing = [normals.index(entry.facet.normal) for entry in facet_set.entries if not entry.resultant]
    if not vanishing:
        return completion_vector(ring, mu_minus)
    for k0 in range(1, COMPLETION_SEARCH_LIMIT + 1):
        found = _search_completions(ring, mu_minus, vanishing, k0)
        if found:
            return CompletionVector(found[0], k0, vanishing[0] if len(vanishing) == 1 else None)
    logger.warning("no completion avoids all %d facets with vanishing resultants", len(vanishing))
    return completion_vector(ring, mu_minus, vanishing[0])


# --- Global residues ---


def _supports(polys: Sequence[SparsePolynomial]) -> list[tuple[Point, ...]]:
    return [scaled_lattice_points(newton_polytope(p)) for p in polys]


def _plan(
    polys: Sequence[SparsePolynomial], bound: Factorization, m: Sequence[int]
) -> Optional[InterpolationPlan]:
    """Interpolation plan for a generic system: groups and weights come from the supports."""
    domain = polys[0].domain
    if is_numeric(domain):
        return None
    groups = []
    weights: dict[str, Point] = {}
    for p in polys:
        names = []
        for point, coeff in p.terms:
            name = domain_symbols(domain)[coeff.terms()[0][0].index(1)]
            names.append(name)
            weights[name] = point
        groups.append(tuple(names))
    return InterpolationPlan(bound.expand(), tuple(groups), weights, tuple(m))


def _aligned(values: Sequence[int], normals: Sequence[Point], facet_set: FacetResultantSet) -> tuple[int, ...]:
    """Reorder per-facet values from ``normals`` order to facet-resultant order."""
    return tuple(values[list(normals).index(entry.facet.normal)] for entry in facet_set.entries)


def _check_arity(polys: Sequence[SparsePolynomial], m: Sequence[int]) -> int:
    if not polys:
        raise ArityMismatch("global residue of no polynomials")
    n = polys[0].nvars
    if len(polys) != n or len(m) != n:
        raise ArityMismatch(f"global residue needs {n} polynomials and an exponent of length {n}")
    return n


def _unmixed(
    polys: Sequence[SparsePolynomial],
    m: Sequence[int],
    strategy: Strategy,
    seed: int,
    completion: Optional[CompletionVector],
) -> ResidueValue:
    n = _check_arity(polys, m)
    polytope = newton_polytope(polys[0])
    if any(set(newton_polytope(p).vertices) != set(polytope.vertices) for p in polys[1:]):
        raise DegreeMismatch("the polynomials do not share a Newton polytope")
    ring = CoxRing.from_polytope(polytope, polys[0].variables)
    offsets = tuple(n * b for b in ring.offsets)
    mu_plus, mu_minus = mu_split(m, ring.normals, offsets)
    facet_set = facet_resultants(polys)
    _check_facets(facet_set, _aligned(mu_minus, ring.normals, facet_set))
    completion = completion or _completion_off_vanishing(ring, facet_set, mu_minus)
    low = tuple(x + c for x, c in zip(mu_minus, completion.c))
    high = tuple(x + c for x, c in zip(mu_plus, completion.c))
    mu_minus = _aligned(mu_minus, ring.normals, facet_set)
    k0 = completion.k0
    domain = polys[0].domain
    f0 = SparsePolynomial.monomial(polys[0].variables, domain, ring.monomial_point(low, k0))
    h = SparsePolynomial.monomial(polys[0].variables, domain, ring.monomial_point(high, k0 + n, interior=True))
    problem = ToricResidueProblem(polytope, (f0,) + tuple(polys), (k0,) + (1,) * n, h)
    bound = denominator_bound(mu_minus, facet_set)
    plan = _plan(polys, bound, m)
    result = toric_residue(problem, strategy, plan, random.Random(seed))
    denominator = certify_denominator(result.value, facet_set, mu_minus)
    return ResidueValue(
        result.value, denominator, result.normalization, result.strategy, mu_minus, completion, (seed,)
    )


def _draw_multipliers(
    deltas: Sequence[LatticePolytope], variables: Sequence[str], domain: Domain, rng: random.Random
) -> tuple[SparsePolynomial, ...]:
    """Random ``q_j`` supported on the sum of every Newton polytope except the ``j``-th."""
    low, high = Q_DRAW_RANGE
    multipliers = []
    for j in range(len(deltas)):
        others = [d for i, d in enumerate(deltas) if i != j]
        if others:
            points = scaled_lattice_points(minkowski_sum(others).polytope)
        else:
            points = ((0,) * len(variables),)
        multipliers.append(SparsePolynomial.from_terms(
            variables, domain, [(p, rng.randint(low, high)) for p in points]
        ))
    return tuple(multipliers)


def mixed_reduction(polys: Sequence[SparsePolynomial], seed: int) -> MixedReduction:
    deltas = [newton_polytope(p) for p in polys]
    total = minkowski_sum(deltas)
    multipliers = _draw_multipliers(deltas, polys[0].variables, polys[0].domain, random.Random(seed))
    return MixedReduction(total.polytope, total.summand_offsets, multipliers, seed)


def _mixed_problem(
    polys: Sequence[SparsePolynomial], reduction: MixedReduction, ring: CoxRing,
    low: Sequence[int], high: Sequence[int], k0: int,
) -> ToricResidueProblem:
    n = len(polys)
    domain = polys[0].domain
    variables = polys[0].variables
    f0 = SparsePolynomial.monomial(variables, domain, ring.monomial_point(low, k0))
    h = SparsePolynomial.monomial(variables, domain, ring.monomial_point(high, k0 + 1, interior=True))
    for q in reduction.multipliers:
        h = h * q
    forms = (f0,) + tuple(p * q for p, q in zip(polys, reduction.multipliers))
    return ToricResidueProblem(reduction.polytope, forms, (k0,) + (1,) * n, h)


def _mixed(
    polys: Sequence[SparsePolynomial],
    m: Sequence[int],
    strategy: Strategy,
    seed: int,
) -> ResidueValue:
    _check_arity(polys, m)
    domain = polys[0].domain
    deltas = [newton_polytope(p) for p in polys]
    if mixed_volume(deltas) == 0:
        logger.info("mixed volume is zero: the residue vanishes")
        zero = RationalFunction.zero(domain)
        return ResidueValue(zero, Factorization(domain, QQ.one), 0, "zero", (), None, (seed,))
    total = minkowski_sum(deltas).polytope
    ring = CoxRing.from_polytope(total, polys[0].variables)
    mu_plus, mu_minus = mu_split(m, ring.normals, ring.offsets)
    facet_set = facet_resultants(polys)
    _check_facets(facet_set, _aligned(mu_minus, ring.normals, facet_set))
    completion = _completion_off_vanishing(ring, facet_set, mu_minus)
    low = tuple(x + c for x, c in zip(mu_minus, completion.c))
    high = tuple(x + c for x, c in zip(mu_plus, completion.c))
    mu_minus = _aligned(mu_minus, ring.normals, facet_set)
    plan = _plan(polys, denominator_bound(mu_minus, facet_set), m)

    first: Optional[ResidueValue] = None
    seeds: list[int] = []
    draw_seed = seed
    failures = 0
    while len(seeds) < 2:
        reduction = mixed_reduction(polys, draw_seed)
        problem = _mixed_problem(polys, reduction, ring, low, high, completion.k0)
        rng = random.Random(draw_seed)
        try:
            if first is None:
                first = toric_residue(problem, strategy, plan, rng)
            elif first.strategy == "interpolate":
                _verify_draw(problem, first.value, rng)
            else:
                second = toric_residue(problem, strategy, None, rng)
                if second.value != first.value:
                    raise MismatchBetweenDraws(f"draws {seeds[0]} and {draw_seed} give different residues")
            seeds.append(draw_seed)
        except ResultantVanishes:
            failures += 1
            logger.info("multiplier draw with seed %d is degenerate, redrawing", draw_seed)
            if failures >= MAX_GENERICITY_RETRIES:
                raise GenericityFailure(f"{failures} degenerate multiplier draws") from None
        draw_seed += 1
    denominator = certify_denominator(first.value, facet_set, mu_minus)
    return ResidueValue(
        first.value, denominator, first.normalization, first.strategy, mu_minus, completion, tuple(seeds)
    )


def _verify_draw(problem: ToricResidueProblem, value: RationalFunction, rng: random.Random) -> None:
    """Check an interpolated residue against an independent draw at a few points."""
    phi, rhs = _phi_system(problem)
    domain = phi.matrix.domain
    checked = 0
    for _ in range(MAX_SAMPLE_RETRIES):
        point = random_point(domain, rng, SAMPLE_RANGE)
        if not evaluate_element(domain, value.denominator, point):
            continue
        theta = _numeric_theta(phi, rhs, point)
        if theta is None:
            continue
        if theta * problem.normalization != value.evaluate(point):
            raise MismatchBetweenDraws("an independent draw disagrees with the interpolated residue")
        checked += 1
        if checked == EXTRA_SAMPLES:
            return
    raise ResultantVanishes("no usable verification point for the second draw")


def substitute_generic(value: RationalFunction, system: GenericSystem) -> RationalFunction:
    """A residue of the generic system with the original coefficients substituted back."""
    return value.substitute(system.substitution, system.target)


def _through_generic(
    polys: Sequence[SparsePolynomial],
    compute: Callable[[Sequence[SparsePolynomial]], ResidueValue],
) -> ResidueValue:
    """Run ``compute`` on a generic system when the coefficients are not distinct parameters."""
    supports = _supports(polys)
    if is_numeric(polys[0].domain) or is_generic_system(polys, supports):
        return compute(polys)
    system = generic_system(polys, supports)
    generic = compute(system.polynomials)
    value = substitute_generic(generic.value, system)
    facet_set = facet_resultants(polys)
    mu_minus = generic.mu_minus or (0,) * len(facet_set.entries)
    return replace(generic, value=value, denominator=certify_denominator(value, facet_set, mu_minus))


def global_residue_unmixed(
    polys: Sequence[SparsePolynomial],
    m: Sequence[int],
    strategy: Strategy = Strategy.AUTO,
    seed: int = DEFAULT_SEED,
    completion: Optional[CompletionVector] = None,
) -> ResidueValue:
    """Global residue of ``t^m`` for polynomials sharing one Newton polytope."""
    return _through_generic(polys, lambda fs: _unmixed(fs, m, strategy, seed, completion))


def global_residue_mixed(
    polys: Sequence[SparsePolynomial],
    m: Sequence[int],
    strategy: Strategy = Strategy.AUTO,
    seed: int = DEFAULT_SEED,
) -> ResidueValue:
    """Global residue of ``t^m`` for arbitrary Newton polytopes, with two independent draws."""
    return _through_generic(polys, lambda fs: _mixed(fs, m, strategy, seed))


def is_unmixed(polys: Sequence[SparsePolynomial]) -> bool:
    vertex_sets = {frozenset(newton_polytope(p).vertices) for p in polys}
    return len(vertex_sets) == 1 and newton_polytope(polys[0]).is_full_dimensional


def residue_of_monomial(
    polys: Sequence[SparsePolynomial],
    m: Sequence[int],
    strategy: Strategy = Strategy.AUTO,
    seed: int = DEFAULT_SEED,
) -> ResidueValue:
    if is_unmixed(polys):
        return global_residue_unmixed(polys, m, strategy, seed)
    return global_residue_mixed(polys, m, strategy, seed)


def global_residue(
    q: SparsePolynomial,
    polys: Sequence[SparsePolynomial],
    strategy: Strategy = Strategy.AUTO,
    seed: int = DEFAULT_SEED,
) -> ResidueValue:
    """Global residue of a Laurent polynomial ``q``, by linearity over its terms."""
    domain = polys[0].domain
    q = q.convert(domain)
    total = RationalFunction.zero(domain)
    mu_minus: tuple[int, ...] = ()
    seeds: list[int] = []
    normalization = 0
    for exponent, coeff in q.terms:
        term = residue_of_monomial(polys, exponent, strategy, seed)
        total = total + term.value.scale(coeff)
        if term.mu_minus:
            mu_minus = tuple(max(a, b) for a, b in zip(mu_minus, term.mu_minus)) if mu_minus else term.mu_minus
        seeds.extend(s for s in term.seeds if s not in seeds)
        normalization = term.normalization or normalization
    facet_set = facet_resultants(polys)
    denominator = certify_denominator(total, facet_set, mu_minus or (0,) * len(facet_set.entries))
    return ResidueValue(total, denominator, normalization, strategy.value, mu_minus, None, tuple(seeds))


# --- Oracles and conditions ---


def univariate_residue_oracle(f: SparsePolynomial, m: int) -> RationalFunction:
    """Sum over the roots of ``f`` of ``t^m / (t f'(t))``, without computing roots.

    With ``g = t^(-low) f`` of degree ``d`` the sum equals the coefficient of
    ``t^(d-1)`` in ``t^(m-low-1)`` reduced modulo ``g``, divided by the
    leading coefficient of ``g``.
    """
    if f.nvars != 1:
        raise ArityMismatch("the univariate oracle needs a univariate polynomial")
    if len(f.terms) < 2:
        raise DegenerateLeadingForm("a monomial has no roots in the torus")
    domain = f.domain
    low = f.min_exponents()[0]
    degree = f.max_exponents()[0] - low
    g = [RationalFunction.from_element(f.coefficient((low + i,)), domain) for i in range(degree + 1)]
    zero = RationalFunction.zero(domain)
    vector = [RationalFunction.from_element(1, domain)] + [zero] * (degree - 1)
    power = m - low - 1
    for _ in range(max(power, 0)):
        top = vector[-1]
        vector = [zero] + vector[:-1]
        if not top.is_zero:
            ratio = top / g[degree]
            vector = [v - ratio * c for v, c in zip(vector, g[:degree])]
    for _ in range(max(-power, 0)):
        bottom = vector[0]
        vector = vector[1:] + [zero]
        if not bottom.is_zero:
            ratio = bottom / g[0]
            vector = [v - ratio * c for v, c in zip(vector, g[1:])]
    return vector[degree - 1] / g[degree]


def satisfies_monomial_face_condition(deltas: Sequence[LatticePolytope]) -> bool:
    """Every facet of the Minkowski sum meets some summand in a single vertex."""
    total = minkowski_sum(deltas).polytope
    for facet in total.facets:
        if not any(
            len([v for v in d.vertices if dot(v, facet.normal) == min(dot(w, facet.normal) for w in d.vertices)]) == 1
            for d in deltas
        ):
            return False
    return True
