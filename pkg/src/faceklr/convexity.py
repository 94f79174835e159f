"""Faces of root systems, convex orders, and minimal pairs at bounded height.

A face splits the positive roots of height <= N into plus / zero / minus
zones subject to the cone conditions; those are checked by exact rational
LP feasibility over the finite root list.  Convex orders are realized as
stacks of rational functionals compared through height-normalized ratios.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .linalg import lp_feasible, lp_solve_strict
from .rootdata import CartanSpec, Root, positive_roots, pairing, ht, sub_w


class FaceError(ValueError):
    pass


class OrderError(ValueError):
    pass


PLUS, ZERO, MINUS = "plus", "zero", "minus"


@dataclass(frozen=True)
class Face:
    spec: CartanSpec
    N: int
    zones: tuple  # sorted tuple of (root coeff tuple, zone string)

    def __post_init__(self):
        roots = {r.coeffs for r in positive_roots(self.spec, self.N)}
        assigned = {c for c, _ in self.zones}
        if roots != assigned:
            raise FaceError("zone assignment must cover exactly the roots of height <= N")
        for _, z in self.zones:
            if z not in (PLUS, ZERO, MINUS):
                raise FaceError(f"unknown zone {z!r}")

    @property
    def zone_map(self):
        return dict(self.zones)

    def zone(self, root):
        coeffs = root.coeffs if isinstance(root, Root) else tuple(root)
        try:
            return self.zone_map[coeffs]
        except KeyError:
            raise FaceError(f"root {coeffs} outside the height bound") from None

    def part(self, zone):
        return [c for c, z in self.zones if z == zone]

    @property
    def face_roots(self):
        return self.part(ZERO)

    def __repr__(self):
        f = len(self.part(ZERO))
        p = len(self.part(PLUS))
        m = len(self.part(MINUS))
        return f"Face({self.spec.name or 'spec'}, N={self.N}, |F|={f}, |F+|={p}, |F-|={m})"


def make_face(spec, N, zone_of) -> Face:
    zones = tuple(sorted((r.coeffs, zone_of(r)) for r in positive_roots(spec, N)))
    return Face(spec, N, zones)


def face_from_functional(spec: CartanSpec, c, N: int) -> Face:
    """Face cut out by the sign of a rational functional (coefficients per label)."""
    c = [Fraction(x) for x in c]
    if len(c) != spec.rank:
        raise FaceError("functional length must match the index set")

    def val(r):
        return sum(ci * xi for ci, xi in zip(c, r.coeffs))

    def zone_of(r):
        v = val(r)
        return PLUS if v > 0 else (MINUS if v < 0 else ZERO)

    return make_face(spec, N, zone_of)


def is_face(face: Face) -> bool:
    """Cone conditions over the height-bounded root list, by exact LP.

    Condition (1) fails iff some nonnegative combination of F plus a
    nonzero nonnegative combination of F+ lands in the cone of F- and F;
    condition (2) is the mirror image.
    """
    F = face.part(ZERO)
    P = face.part(PLUS)
    M = face.part(MINUS)
    return not (_cone_violation(face.spec, F, P, M + F)
                or _cone_violation(face.spec, F, M, P + F))


def _cone_violation(spec, F, Y, target):
    """Feasibility of: f + y = t with f in cone(F), y in cone(Y) normalized
    to total mass 1, t in cone(target)."""
    if not Y:
        return False
    cols = [(v, +1) for v in F] + [(v, +1) for v in Y] + [(v, -1) for v in target]
    rows = []
    for i in range(spec.rank):
        rows.append([Fraction(sign * v[i]) for v, sign in cols])
    rows.append([Fraction(0)] * len(F)
                + [Fraction(1)] * len(Y)
                + [Fraction(0)] * len(target))
    rhs = [Fraction(0)] * spec.rank + [Fraction(1)]
    return lp_feasible(rows, rhs)


@lru_cache(maxsize=None)
def witness_functional(face: Face):
    """Rational functional vanishing on F, >= 1 on F+ and <= -1 on F-.

    This is the bounded-height functional behind the cuspidality test.
    """
    spec = face.spec
    n = spec.rank
    F = face.part(ZERO)
    P = face.part(PLUS)
    M = face.part(MINUS)
    # variables: u_i, v_i >= 0 with c_i = u_i - v_i, slacks s_p, t_m >= 0
    nv = 2 * n + len(P) + len(M)
    rows, rhs = [], []

    def crow(root, sign_c):
        row = [Fraction(0)] * nv
        for i in range(n):
            row[i] = Fraction(sign_c * root[i])
            row[n + i] = Fraction(-sign_c * root[i])
        return row

    for f in F:
        rows.append(crow(f, 1))
        rhs.append(Fraction(0))
    for idx, p in enumerate(P):
        row = crow(p, 1)
        row[2 * n + idx] = Fraction(-1)
        rows.append(row)
        rhs.append(Fraction(1))
    for idx, m in enumerate(M):
        row = crow(m, -1)
        row[2 * n + len(P) + idx] = Fraction(-1)
        rows.append(row)
        rhs.append(Fraction(1))
    sol = lp_solve_strict(rows, rhs, nv, [])
    if sol is None:
        raise FaceError("no witness functional exists: not a face at this height")
    return tuple(sol[i] - sol[n + i] for i in range(n))


@dataclass(frozen=True)
class ConvexOrder:
    """Total preorder on positive roots from a lexicographic functional stack.

    alpha <= beta iff the tuple (c_k(alpha)/ht(alpha))_k is lexicographically
    <= the corresponding tuple for beta.  Construction validates totality on
    real roots and the betweenness property at height <= N.
    """
    spec: CartanSpec
    N: int
    functionals: tuple  # tuple of tuples of Fractions

    def __post_init__(self):
        roots = positive_roots(self.spec, self.N)
        seen = {}
        for r in roots:
            k = self.key(r)
            if k in seen:
                other = seen[k]
                if not (r.imaginary and other.imaginary):
                    raise OrderError(
                        f"functional stack does not separate {other.coeffs} and "
                        f"{r.coeffs}; add refinement functionals")
            else:
                seen[k] = r
        if not is_convex_order(self):
            raise OrderError("functional stack violates betweenness; not convex")

    def key(self, root):
        coeffs = root.coeffs if isinstance(root, Root) else tuple(root)
        h = Fraction(sum(coeffs))
        return tuple(
            sum(Fraction(ci) * xi for ci, xi in zip(c, coeffs)) / h
            for c in self.functionals)

    def less(self, a, b):
        return self.key(a) < self.key(b)

    def leq(self, a, b):
        return self.key(a) <= self.key(b)

    def equiv(self, a, b):
        return self.key(a) == self.key(b)

    def sorted_roots(self):
        return sorted(positive_roots(self.spec, self.N),
                      key=lambda r: (self.key(r), r.coeffs))


def is_convex_order(order: ConvexOrder) -> bool:
    """Whenever alpha + beta = gamma are all roots of height <= N, gamma
    lies weakly between alpha and beta."""
    roots = positive_roots(order.spec, order.N)
    coeff_set = {r.coeffs for r in roots}
    for a in roots:
        for b in roots:
            if a.coeffs >= b.coeffs:
                continue
            g = tuple(x + y for x, y in zip(a.coeffs, b.coeffs))
            if g in coeff_set:
                ka, kb, kg = order.key(a), order.key(b), order.key(g)
                if not (min(ka, kb) <= kg <= max(ka, kb)):
                    return False
    return True


def order_from_functionals(spec, N, functionals) -> ConvexOrder:
    rows = tuple(tuple(Fraction(x) for x in row) for row in functionals)
    return ConvexOrder(spec, N, rows)


def coordinate_tiebreakers(spec):
    return tuple(tuple(Fraction(1 if j == i else 0) for j in range(spec.rank))
                 for i in range(spec.rank))


def default_order(spec, N) -> ConvexOrder:
    """The convex order cut out by the coordinate functional stack alone."""
    return ConvexOrder(spec, N, coordinate_tiebreakers(spec))


def compatible_order(face: Face, inner=None, extra=None) -> ConvexOrder:
    """A convex order compatible with the face: F- < F < F+ and F an
    equivalence interval of the leading functional, refined inside the face
    by the `inner` functional rows (if given) and finally by coordinates.

    The restriction to the face roots is checked to agree with `inner`'s
    own comparisons when inner is a ConvexOrder; a mismatch is an error,
    never silently accepted.
    """
    spec, N = face.spec, face.N
    stack = [witness_functional(face)]
    inner_rows = ()
    if inner is not None:
        inner_rows = inner.functionals if isinstance(inner, ConvexOrder) else tuple(
            tuple(Fraction(x) for x in row) for row in inner)
        stack.extend(inner_rows)
    if extra is not None:
        stack.extend(tuple(Fraction(x) for x in row) for row in extra)
    stack.extend(coordinate_tiebreakers(spec))
    order = ConvexOrder(spec, N, tuple(tuple(row) for row in stack))
    for c, z in face.zones:
        v = sum(Fraction(ci) * xi for ci, xi in zip(stack[0], c))
        expected = ZERO if v == 0 else (PLUS if v > 0 else MINUS)
        if expected != z:
            raise FaceError("witness functional does not realize the face")
    if isinstance(inner, ConvexOrder):
        face_roots = [r for r in positive_roots(spec, N)
                      if face.zone(r) == ZERO]
        for a in face_roots:
            for b in face_roots:
                ka, kb = order.key(a), order.key(b)
                ia, ib = inner.key(a), inner.key(b)
                if (ka < kb) != (ia < ib):
                    raise OrderError(
                        f"restriction to the face disagrees with the inner order "
                        f"on {a.coeffs}, {b.coeffs}")
    return order


def simple_face_roots(face: Face):
    """Positive real roots in the zero zone that are not sums of >= 2
    face-zone roots (searched at height <= N)."""
    roots = positive_roots(face.spec, face.N)
    zone_map = face.zone_map
    face_coeffs = [r.coeffs for r in roots if zone_map[r.coeffs] == ZERO]
    face_set = set(face_coeffs)

    def decomposable(target):
        # can target be written as a sum of >= 2 face roots?
        def rec(remaining, start, count):
            if not any(remaining):
                return count >= 2
            if count > ht(target):
                return False
            for idx in range(start, len(face_coeffs)):
                c = face_coeffs[idx]
                if all(x <= y for x, y in zip(c, remaining)) and any(c):
                    if rec(sub_w(remaining, c), idx, count + 1):
                        return True
            return False

        return rec(target, 0, 0)

    out = []
    for r in roots:
        if r.imaginary or zone_map[r.coeffs] != ZERO:
            continue
        if not decomposable(r.coeffs):
            out.append(r)
    out.sort(key=lambda r: (r.ht, r.coeffs))
    return out


@dataclass(frozen=True)
class MinimalPair:
    alpha: tuple
    beta: tuple
    gamma: tuple  # gamma < beta in the order, beta + gamma = alpha


def minimal_pair(spec, alpha, order: ConvexOrder) -> MinimalPair:
    """Deterministic minimal pair for a non-simple positive root: among the
    valid pairs, gamma is taken maximal in the order, ties broken
    lexicographically."""
    alpha = tuple(alpha.coeffs if isinstance(alpha, Root) else alpha)
    if ht(alpha) <= 1:
        raise OrderError("simple roots have no minimal pair")
    roots = positive_roots(spec, order.N)
    coeffs = {r.coeffs for r in roots}
    pairs = []
    for r in roots:
        other = sub_w(alpha, r.coeffs)
        if all(x >= 0 for x in other) and other in coeffs and any(other):
            b, g = r.coeffs, other
            if order.key(g) < order.key(b):
                pairs.append((b, g))
    if not pairs:
        raise OrderError(f"{alpha} admits no decomposition at this height")
    minimal = []
    for b, g in pairs:
        kb, kg = order.key(b), order.key(g)
        dominated = any(
            kg < order.key(g2) and order.key(g2) < order.key(b2) and order.key(b2) < kb
            for b2, g2 in pairs if (b2, g2) != (b, g))
        if not dominated:
            minimal.append((b, g))
    minimal.sort(key=lambda bg: (order.key(bg[1]), bg[1], bg[0]), reverse=True)
    best = minimal[0]
    return MinimalPair(alpha, best[0], best[1])


def face_cartan(face: Face):
    """Cartan data of the face root system: simple roots Delta_F with the
    restricted pairing.  Returns (CartanSpec, list of simple face roots).

    Affine faces locate their distinguished node by trying each candidate
    whose deletion leaves a finite system (first match wins).
    """
    simples = simple_face_roots(face)
    if not simples:
        raise FaceError("face has no simple roots")
    n = len(simples)
    spec = face.spec
    gram = [[pairing(spec, a.coeffs, b.coeffs) for b in simples] for a in simples]
    for i in range(n):
        if gram[i][i] <= 0 or gram[i][i] % 2:
            raise FaceError("face root with nonpositive or odd self-pairing")
    d = [gram[i][i] // 2 for i in range(n)]
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            num = gram[i][j]
            if num % d[i]:
                raise FaceError("face pairing is not an integral Cartan matrix")
            a[i][j] = num // d[i]
            if i != j and a[i][j] > 0:
                raise FaceError("face Cartan matrix has positive off-diagonal entry")
    labels = tuple(str(i) for i in range(n))
    matrix = tuple(tuple(row) for row in a)
    try:
        return CartanSpec(labels, matrix, tuple(d), "finite",
                          name="face-finite"), simples
    except Exception:
        pass
    for z in range(n):
        try:
            return CartanSpec(labels, matrix, tuple(d), "affine", z,
                              name="face-affine"), simples
        except Exception:
            continue
    raise FaceError("face Cartan data is neither finite nor untwisted affine")


def serialize_face(face: Face) -> dict:
    return {
        "N": face.N,
        "zones": {",".join(map(str, c)): z for c, z in face.zones},
    }


def serialize_order(order: ConvexOrder) -> dict:
    return {
        "N": order.N,
        "functionals": [[str(x) for x in row] for row in order.functionals],
    }
