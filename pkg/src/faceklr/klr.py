"""The KLR algebra engine: parameters, relations, and normal forms.

Elements of R(nu) are exact rational combinations of monomials
psi_{k_1}..psi_{k_m} * y^r * e_word, written left to right.  A monomial is
in normal form when its psi-word is the lexicographically smallest reduced
word of its permutation.  The rewriting routines below push every product
into that shape using the defining relations; termination is by crossing
count (every correction term strictly drops it) plus structural recursion
on word length inside the conversion helpers.

Conventions (0-based):
  - strands are positions 0..n-1 read at the right idempotent,
  - psi_k crosses positions k, k+1; y_j is the dot on position j,
  - psi_k e_i = e_{s_k i} psi_k, so the idempotent word is carried on the
    right and transported left through crossings,
  - deg e_i = 0, deg y_j e_i = i_j . i_j, deg psi_k e_i = -(i_k . i_{k+1}).

A crucial simplification used throughout: multiplying a dot polynomial on
the right of a monomial commutes with taking normal forms, because
psi_w f e_i = (psi_w e_i) * (f e_i).  So the engine only ever normalizes
dot-free words and merges exponents afterwards, which also makes the
(psis, word) cache exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .laurent import GradedDim, geometric
from .rootdata import CartanSpec, seq


# -- permutations and words -------------------------------------------------

def apply_word(psis, word):
    """Transport a word leftward through the crossings (rightmost first)."""
    w = list(word)
    for k in reversed(psis):
        w[k], w[k + 1] = w[k + 1], w[k]
    return tuple(w)


def perm_of(psis, n):
    return apply_word(psis, tuple(range(n)))


def inversions(perm):
    n = len(perm)
    return sum(1 for p in range(n) for q in range(p + 1, n) if perm[p] > perm[q])


@lru_cache(maxsize=None)
def canonical_word(perm):
    """Lexicographically smallest reduced word for a permutation tuple."""
    for k in range(len(perm) - 1):
        if perm[k] > perm[k + 1]:
            swapped = list(perm)
            swapped[k], swapped[k + 1] = swapped[k + 1], swapped[k]
            return (k,) + canonical_word(tuple(swapped))
    return ()


def block_swap_word(m, n):
    """The permutation moving a front block of m strands past a back block
    of n strands (i -> i+n for i < m), as a psi letter sequence.

    Unique reduced expression up to two-term moves; we use the row-by-row
    one, which is also its canonical word.
    """
    perm = tuple(list(range(n, n + m)) + list(range(n)))
    return canonical_word(perm)


# -- polynomials in the dots ------------------------------------------------
# A dot polynomial is a dict {exponent tuple: Fraction}.

def poly_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            c = out.get(e, 0) + ca * cb
            if c:
                out[e] = c
            else:
                out.pop(e, None)
    return out


def poly_swap(a, k):
    out = {}
    for e, c in a.items():
        ee = list(e)
        ee[k], ee[k + 1] = ee[k + 1], ee[k]
        out[tuple(ee)] = c
    return out


def poly_partial(a, k):
    """Divided difference (f - s_k f)/(y_{k+1} - y_k), exact on each monomial."""
    out = {}

    def bump(e, c):
        v = out.get(e, 0) + c
        if v:
            out[e] = v
        else:
            del out[e]

    for e, c in a.items():
        p, q = e[k], e[k + 1]
        if p == q:
            continue
        span = abs(p - q)
        lo = min(p, q)
        sign = -1 if p > q else 1
        for t in range(span):
            ee = list(e)
            ee[k] = lo + t
            ee[k + 1] = lo + span - 1 - t
            bump(tuple(ee), sign * c)
    return out


def _one(n):
    return {(0,) * n: Fraction(1)}


def _ymono(n, j):
    e = [0] * n
    e[j] = 1
    return {tuple(e): Fraction(1)}


# -- parameters Q_ij ---------------------------------------------------------

class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class Parameters:
    """Choice of Q_ij polynomials, stored for i < j as ((pu, pv), coeff) tuples."""
    spec: CartanSpec
    table: tuple  # tuple of ((i, j), ((pu, pv, Fraction), ...)) with i < j
    pseudo: bool = False

    def __post_init__(self):
        seen = set()
        for (i, j), terms in self.table:
            if not (0 <= i < j < self.spec.rank):
                raise ParameterError("Q table keys must satisfy i < j")
            seen.add((i, j))
            a_ij = self.spec.matrix[i][j]
            a_ji = self.spec.matrix[j][i]
            di, dj = self.spec.sym[i], self.spec.sym[j]
            target = -2 * di * a_ij
            for pu, pv, c in terms:
                if c == 0:
                    raise ParameterError("zero coefficients must be omitted")
                if 2 * di * pu + 2 * dj * pv != target:
                    raise ParameterError(
                        f"Q_{i}{j} not homogeneous of degree {target} "
                        f"(term u^{pu} v^{pv})")
            if not self.pseudo:
                t_ij = sum((c for pu, pv, c in terms if (pu, pv) == (-a_ij, 0)),
                           Fraction(0))
                t_ji = sum((c for pu, pv, c in terms if (pu, pv) == (0, -a_ji)),
                           Fraction(0))
                if t_ij == 0 or t_ji == 0:
                    raise ParameterError(
                        f"leading coefficient of Q_{i}{j} vanishes; "
                        "use pseudo=True for pseudo-KLR experiments")
        for i in range(self.spec.rank):
            for j in range(i + 1, self.spec.rank):
                if (i, j) not in seen:
                    raise ParameterError(f"missing polynomial Q_{i}{j}")

    def q_poly(self, i, j):
        """Q_ij as a dict {(pu, pv): coeff}; Q_ii = 0, Q_ji(u,v) = Q_ij(v,u)."""
        if i == j:
            return {}
        if i < j:
            for key, terms in self.table:
                if key == (i, j):
                    return {(pu, pv): c for pu, pv, c in terms}
        return {(pv, pu): c for (pu, pv), c in self.q_poly(j, i).items()}

    def t_coeff(self, i, j):
        """Coefficient of u^{-a_ij} in Q_ij."""
        if i == j:
            return Fraction(0)
        return Fraction(self.q_poly(i, j).get((-self.spec.matrix[i][j], 0), 0))


def parameters_from_dict(spec, qdict, pseudo=False) -> Parameters:
    """Build Parameters from {(i, j): {(pu, pv): coeff}} given for i < j."""
    table = []
    for i in range(spec.rank):
        for j in range(i + 1, spec.rank):
            poly = qdict.get((i, j))
            if poly is None:
                raise ParameterError(f"missing Q_{i}{j}")
            terms = tuple(sorted((pu, pv, Fraction(c))
                                 for (pu, pv), c in poly.items() if c))
            table.append(((i, j), terms))
    return Parameters(spec, tuple(table), pseudo)


def standard_parameters(spec: CartanSpec) -> Parameters:
    """Default parameters: (u - v)^{-a_ij} on edges oriented i -> j by index
    order (geometric in every supported symmetric type), u^{-a_ij} + v^{-a_ji}
    in non-symmetric types, and 1 on non-edges."""
    qdict = {}
    for i in range(spec.rank):
        for j in range(i + 1, spec.rank):
            a_ij, a_ji = spec.matrix[i][j], spec.matrix[j][i]
            if a_ij == 0:
                qdict[(i, j)] = {(0, 0): Fraction(1)}
            elif spec.is_symmetric():
                m = -a_ij
                # cyclic affine sl_n: orient the wrap edge as (n-1) -> 0
                wrap = (spec.kind == "affine" and spec.rank > 2
                        and {i, j} == {0, spec.rank - 1})
                poly = {}
                for t in range(m + 1):
                    c = Fraction(comb(m, t) * (-1) ** t)
                    if wrap:
                        c *= Fraction((-1) ** m)
                    poly[(m - t, t)] = c
                qdict[(i, j)] = poly
            else:
                qdict[(i, j)] = {(-a_ij, 0): Fraction(1), (0, -a_ji): Fraction(1)}
    return parameters_from_dict(spec, qdict)


def sl_n_affine_parameters(spec, s, t, pseudo=False) -> Parameters:
    """Cyclic affine sl_n parameters Q_{i,i+1}(u, v) = s_i u + t_i v, indices
    mod n.  For n = 2 this is the quadratic Q_01 = s_0 u^2 + t_0' uv + ...;
    use parameters_from_dict directly in that case."""
    n = spec.rank
    if n < 3:
        raise ParameterError("cyclic parameters need n >= 3")
    qdict = {}
    for i in range(n):
        for j in range(i + 1, n):
            if spec.matrix[i][j] == 0:
                qdict[(i, j)] = {(0, 0): Fraction(1)}
            elif j == i + 1:
                qdict[(i, j)] = {k: Fraction(v) for k, v in
                                 {(1, 0): s[i], (0, 1): t[i]}.items() if v}
            else:
                # wrap pair (0, n-1): Q_{n-1,0}(u, v) = s_{n-1} u + t_{n-1} v
                qdict[(i, j)] = {k: Fraction(v) for k, v in
                                 {(0, 1): s[n - 1], (1, 0): t[n - 1]}.items() if v}
    return parameters_from_dict(spec, qdict, pseudo)


def rescale(params: Parameters, z) -> Parameters:
    """Rescaling action: Q'_ij(u, v) = z_ij z_ji Q_ij(z_ii u, z_jj v).

    z maps (i, j) pairs to nonzero scalars; missing entries default to 1.
    """
    spec = params.spec

    def zz(i, j):
        c = Fraction(z.get((i, j), 1))
        if c == 0:
            raise ParameterError("rescaling scalars must be nonzero")
        return c

    qdict = {}
    for i in range(spec.rank):
        for j in range(i + 1, spec.rank):
            out = {}
            for (pu, pv), c in params.q_poly(i, j).items():
                out[(pu, pv)] = c * zz(i, j) * zz(j, i) * zz(i, i) ** pu * zz(j, j) ** pv
            qdict[(i, j)] = out
    return parameters_from_dict(spec, qdict, params.pseudo)


def is_geometric(params: Parameters) -> bool:
    """Parameter criterion for geometric type (symmetric kinds only):
    trees always; cyclic affine sl_n via the product ratio (-1)^n; affine
    sl2 via vanishing discriminant of Q_01."""
    spec = params.spec
    if not spec.is_symmetric():
        raise ParameterError("geometric type is only defined in symmetric type")
    if spec.rank == 2 and spec.matrix[0][1] == -2:
        q = params.q_poly(0, 1)
        a = Fraction(q.get((2, 0), 0))
        b = Fraction(q.get((1, 1), 0))
        c = Fraction(q.get((0, 2), 0))
        return b * b - 4 * a * c == 0
    edges = [(i, j) for i in range(spec.rank) for j in range(i + 1, spec.rank)
             if spec.matrix[i][j] != 0]
    if len(edges) < spec.rank:
        return True  # tree diagram
    if len(edges) == spec.rank and spec.kind == "affine":
        n = spec.rank
        s_prod, t_prod = Fraction(1), Fraction(1)
        for i in range(n):
            j = (i + 1) % n
            q = params.q_poly(i, j)
            if set(q) - {(1, 0), (0, 1)}:
                raise ParameterError("cyclic criterion needs linear Q_{i,i+1}")
            s_prod *= Fraction(q.get((1, 0), 0))
            t_prod *= Fraction(q.get((0, 1), 0))
        if t_prod == 0:
            return False
        return s_prod / t_prod == Fraction((-1) ** n)
    raise ParameterError("geometric criterion unavailable for this diagram")


# -- the rewriting engine -----------------------------------------------------

class Engine:
    """Normal form computer for one (spec, params) pair.

    Elements are dicts {(psis, ys, word): Fraction} with psis canonical in
    normal forms.
    """

    def __init__(self, spec: CartanSpec, params: Parameters):
        if params.spec != spec:
            raise ParameterError("parameters built for a different Cartan spec")
        self.spec = spec
        self.params = params
        self._nf_cache = {}
        self._block_cache = {}

    # .. degrees ..

    def deg_mono(self, psis, ys, word):
        spec = self.spec
        d = 0
        for p, r in enumerate(ys):
            if r:
                d += r * spec.dot(word[p], word[p])
        u = list(word)
        for k in reversed(psis):
            d -= spec.dot(u[k], u[k + 1])
            u[k], u[k + 1] = u[k + 1], u[k]
        return d

    def degree(self, elem):
        """Degree of a homogeneous element (None for 0); raises if mixed."""
        degs = {self.deg_mono(*m) for m in elem}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous element with degrees {sorted(degs)}")
        return degs.pop()

    # .. Q polynomial helpers ..

    def q_at(self, i, j, n, k):
        """Q_{ij}(y_k, y_{k+1}) as a dot polynomial on n strands."""
        out = {}
        for (pu, pv), c in self.params.q_poly(i, j).items():
            e = [0] * n
            e[k], e[k + 1] = pu, pv
            out[tuple(e)] = Fraction(c)
        return out

    def q_braid_diff(self, i, j, n, k):
        """(Q_ij(y_k, y_{k+1}) - Q_ij(y_{k+2}, y_{k+1})) / (y_k - y_{k+2})."""
        out = {}
        for (pu, pv), c in self.params.q_poly(i, j).items():
            for a in range(pu):
                e = [0] * n
                e[k], e[k + 1], e[k + 2] = a, pv, pu - 1 - a
                key = tuple(e)
                v = out.get(key, 0) + c
                if v:
                    out[key] = v
                else:
                    del out[key]
        return out

    # .. normal form ..

    def nf_basis(self, psis, word):
        """Normal form of psi_{psis} e_word as {basis monomial: coeff}."""
        psis, word = tuple(psis), tuple(word)
        key = (psis, word)
        hit = self._nf_cache.get(key)
        if hit is None:
            out = {}
            self._nf_compute(Fraction(1), psis, word, out)
            hit = {m: c for m, c in out.items() if c}
            self._nf_cache[key] = hit
        return hit

    def _nf(self, coeff, psis, poly, word, out):
        """Accumulate coeff * psi_{psis} * poly * e_word into out (normalized)."""
        if not coeff or not poly:
            return
        base = self.nf_basis(psis, word)
        for (ps2, ys2, w2), c2 in base.items():
            cc = coeff * c2
            for m, cm in poly.items():
                key = (ps2, tuple(a + b for a, b in zip(ys2, m)), w2)
                v = out.get(key, 0) + cc * cm
                if v:
                    out[key] = v
                else:
                    del out[key]

    def _nf_compute(self, coeff, psis, word, out):
        n = len(word)
        perm = perm_of(psis, n)
        if inversions(perm) == len(psis):
            can = canonical_word(perm)
            if psis == can:
                key = (psis, (0,) * n, word)
                v = out.get(key, 0) + coeff
                if v:
                    out[key] = v
                else:
                    del out[key]
                return
            k = can[0]
            if psis[0] == k:
                tail_out = {}
                self._nf_compute(Fraction(1), psis[1:], word, tail_out)
                for (ps2, ys2, w2), c2 in tail_out.items():
                    self._nf(coeff * c2, (k,) + ps2, {ys2: Fraction(1)}, w2, out)
            else:
                for c2, ps2, poly2 in self.bring_to_front(psis, k, word):
                    self._nf(coeff * c2, ps2, poly2, word, out)
            return
        # non-reduced: locate the shortest non-reduced prefix
        t = 2
        while inversions(perm_of(psis[:t], n)) == t:
            t += 1
        w1, k, rest = psis[:t - 1], psis[t - 1], psis[t:]
        right_word = apply_word((k,) + rest, word)
        terms = self.bring_to_back(w1, k, right_word)
        main_c, main_ps, _ = terms[0]
        assert main_ps[-1] == k
        u = apply_word(rest, word)
        qp = self.q_at(u[k], u[k + 1], n, k)
        if qp:
            for ps3, poly3 in self.poly_past(rest, qp, word):
                self._nf(coeff * main_c, main_ps[:-1] + ps3, poly3, word, out)
        for c2, ps2, poly2 in terms[1:]:
            for ps3, poly3 in self.poly_past((k,) + rest, poly2, word):
                self._nf(coeff * c2, ps2 + ps3, poly3, word, out)

    def bring_to_front(self, w, k, word):
        """Rewrite the reduced word w (right word `word`) as a sum whose main
        term starts with the letter k.  Returns [(coeff, psis, poly)] with the
        main term first (coefficient 1, trivial poly); corrections have
        strictly fewer crossings, polys already right of their crossings."""
        n = len(word)
        if w[0] == k:
            return [(Fraction(1), w, _one(n))]
        a, tail = w[0], w[1:]
        out = []
        if abs(a - k) >= 2:
            terms = self.bring_to_front(tail, k, word)
            main = terms[0]
            assert main[1][0] == k
            out.append((Fraction(1), (k, a) + main[1][1:], _one(n)))
            for c, ps, poly in terms[1:]:
                out.append((c, (a,) + ps, poly))
            return out
        terms1 = self.bring_to_front(tail, k, word)
        assert terms1[0][1][0] == k
        rest1 = terms1[0][1][1:]          # tail ~ (k, rest1) + corrections
        terms2 = self.bring_to_front(rest1, a, word)
        assert terms2[0][1][0] == a
        rest2 = terms2[0][1][1:]          # rest1 ~ (a, rest2) + corrections
        out.append((Fraction(1), (k, a, k) + rest2, _one(n)))
        u = apply_word(rest2, word)
        m = min(a, k)
        if u[m] == u[m + 2]:
            qd = self.q_braid_diff(u[m], u[m + 1], n, m)
            if qd:
                sign = Fraction(1) if a == m + 1 else Fraction(-1)
                for ps3, poly3 in self.poly_past(rest2, qd, word):
                    out.append((sign, ps3, poly3))
        for c, ps, poly in terms2[1:]:
            out.append((c, (a, k) + ps, poly))
        for c, ps, poly in terms1[1:]:
            out.append((c, (a,) + ps, poly))
        return out

    def bring_to_back(self, w, k, word):
        """Mirror of bring_to_front: the main term ends with the letter k.

        `word` is the right word of this subword in its ambient context."""
        n = len(word)
        if w[-1] == k:
            return [(Fraction(1), w, _one(n))]
        b, front = w[-1], w[:-1]
        out = []

        def append_past(c, ps, poly, suffix):
            for ps4, poly4 in self.poly_past(suffix, poly, word):
                out.append((c, ps + ps4, poly4))

        if abs(b - k) >= 2:
            terms = self.bring_to_back(front, k, apply_word((b,), word))
            main = terms[0]
            assert main[1][-1] == k
            out.append((Fraction(1), main[1][:-1] + (b, k), _one(n)))
            for c, ps, poly in terms[1:]:
                append_past(c, ps, poly, (b,))
            return out
        terms1 = self.bring_to_back(front, k, apply_word((b,), word))
        assert terms1[0][1][-1] == k
        rest1 = terms1[0][1][:-1]         # front ~ (rest1, k) + corrections
        terms2 = self.bring_to_back(rest1, b, apply_word((k, b), word))
        assert terms2[0][1][-1] == b
        rest2 = terms2[0][1][:-1]         # rest1 ~ (rest2, b) + corrections
        out.append((Fraction(1), rest2 + (k, b, k), _one(n)))
        m = min(b, k)
        if word[m] == word[m + 2]:
            qd = self.q_braid_diff(word[m], word[m + 1], n, m)
            if qd:
                sign = Fraction(1) if b == m + 1 else Fraction(-1)
                out.append((sign, rest2, qd))
        for c, ps, poly in terms2[1:]:
            append_past(c, ps, poly, (k, b))
        for c, ps, poly in terms1[1:]:
            append_past(c, ps, poly, (b,))
        return out

    def poly_past(self, psis, poly, word):
        """Move a dot polynomial rightward through psi_{psis} (right word
        `word`).  Returns [(psis', poly')] with sum psi' poly' = poly psi."""
        if not psis:
            return [((), poly)]
        b, rest = psis[0], psis[1:]
        u = apply_word(rest, word)
        out = []
        for ps2, poly2 in self.poly_past(rest, poly_swap(poly, b), word):
            out.append(((b,) + ps2, poly2))
        if u[b] == u[b + 1]:
            dp = poly_partial(poly, b)
            if dp:
                out.extend(self.poly_past(rest, dp, word))
        return out

    # .. products and generator action ..

    def nf_raw(self, terms):
        """Normal form of raw terms [(coeff, psis, poly_or_None, word)]."""
        out = {}
        for coeff, psis, poly, word in terms:
            if poly is None:
                poly = _one(len(word))
            self._nf(Fraction(coeff), tuple(psis), poly, tuple(word), out)
        return {m: c for m, c in out.items() if c}

    def nf_monomial(self, coeff, psis, ys, word):
        out = {}
        self._nf(Fraction(coeff), tuple(psis), {tuple(ys): Fraction(1)},
                 tuple(word), out)
        return {m: c for m, c in out.items() if c}

    def mul(self, A, B):
        out = {}
        for (psB, ysB, wB), cB in B.items():
            lwB = apply_word(psB, wB)
            yB = {tuple(ysB): Fraction(1)}
            for (psA, ysA, wA), cA in A.items():
                if wA != lwB:
                    continue
                c = cA * cB
                if any(ysA):
                    moved = self.poly_past(psB, {tuple(ysA): Fraction(1)}, wB)
                else:
                    moved = [(tuple(psB), None)]
                for ps2, poly2 in moved:
                    poly = dict(yB) if poly2 is None else poly_mul(poly2, yB)
                    self._nf(c, tuple(psA) + ps2, poly, wB, out)
        return {m: c for m, c in out.items() if c}

    def left_mul_gen(self, gen, elem):
        """Multiply on the left by ('e', word) / ('y', j) / ('psi', k)."""
        kind = gen[0]
        out = {}
        for (ps, ys, w), c in elem.items():
            if kind == "e":
                if apply_word(ps, w) == tuple(gen[1]):
                    key = (ps, ys, w)
                    v = out.get(key, 0) + c
                    if v:
                        out[key] = v
                    else:
                        del out[key]
            elif kind == "y":
                for ps2, poly2 in self.poly_past(ps, _ymono(len(w), gen[1]), w):
                    poly = {tuple(x + y for x, y in zip(e, ys)): cc
                            for e, cc in poly2.items()}
                    self._nf(c, ps2, poly, w, out)
            else:
                self._nf(c, (gen[1],) + tuple(ps), {tuple(ys): Fraction(1)}, w, out)
        return {m: cc for m, cc in out.items() if cc}

    def dagger(self, elem):
        """The anti-automorphism fixing e_i, y_j and psi_k (word reversal)."""
        out = {}
        for (ps, ys, w), c in elem.items():
            lw = apply_word(ps, w)
            rev = tuple(reversed(ps))
            for ps2, poly2 in self.poly_past(rev, {tuple(ys): Fraction(1)}, lw):
                self._nf(c, ps2, poly2, lw, out)
        return {m: cc for m, cc in out.items() if cc}

    # .. block decomposition for induced modules ..

    def to_blocks(self, elem, blocks):
        """Decompose elements of R(nu) e_{lam_1 ... lam_m} over the free right
        module basis psi_w, w a minimal-coset shuffle for the block sizes.

        Returns {(shuffle_perm, ((psis_t, ys_t, word_t) per block)): coeff}
        with each block entry a normal-form monomial of its local algebra.
        """
        blocks = tuple(blocks)
        offsets, o = [], 0
        for h in blocks:
            offsets.append(o)
            o += h
        offsets = tuple(offsets)
        out = {}
        for (ps, ys, w), c in elem.items():
            base = self._blocks_basis(ps, w, blocks, offsets)
            for (shuf, monos), c2 in base.items():
                merged = tuple(
                    (mps, tuple(a + b for a, b in zip(mys, ys[o:o + h])), mw)
                    for (mps, mys, mw), o, h in zip(monos, offsets, blocks))
                key = (shuf, merged)
                v = out.get(key, 0) + c * c2
                if v:
                    out[key] = v
                else:
                    del out[key]
        return out

    def _blocks_basis(self, ps, w, blocks, offsets):
        key = (ps, w, blocks)
        hit = self._block_cache.get(key)
        if hit is None:
            out = {}
            self._blocks_compute(Fraction(1), ps, (0,) * len(w), w,
                                 blocks, offsets, out)
            hit = {m: c for m, c in out.items() if c}
            self._block_cache[key] = hit
        return hit

    def _blocks_compute(self, coeff, ps, ys, w, blocks, offsets, out):
        # factor perm = interior o shuffle: relabel the values inside each
        # block so they appear in increasing order (the minimal coset rep);
        # what is left over is block-preserving.
        n = len(w)
        perm = perm_of(ps, n)
        shuffle = [0] * n
        interiors = []
        for o, h in zip(offsets, blocks):
            positions = [p for p in range(n) if o <= perm[p] < o + h]
            for r, p in enumerate(positions):
                shuffle[p] = o + r
            interiors.append(tuple(perm[p] - o for p in positions))
        shuffle = tuple(shuffle)
        target = canonical_word(shuffle)
        for o, loc in zip(offsets, interiors):
            target = target + tuple(kk + o for kk in canonical_word(loc))

        def emit(c):
            monos = tuple(
                (canonical_word(loc), tuple(ys[o:o + h]), tuple(w[o:o + h]))
                for loc, o, h in zip(interiors, offsets, blocks))
            key = (shuffle, monos)
            v = out.get(key, 0) + c
            if v:
                out[key] = v
            else:
                del out[key]

        if ps == target:
            emit(coeff)
            return
        terms = self.convert_front(ps, target, w)
        assert terms[0][1] == target
        emit(coeff * terms[0][0])
        for c2, ps2, poly2 in terms[1:]:
            # corrections have strictly fewer crossings; normalize and recurse
            sub = {}
            poly = poly2 if not any(ys) else poly_mul(
                poly2, {tuple(ys): Fraction(1)})
            self._nf(coeff * c2, ps2, poly, w, sub)
            for (ps3, ys3, w3), c3 in sub.items():
                self._blocks_compute(c3, ps3, ys3, w3, blocks, offsets, out)

    def convert_front(self, ps, target, word):
        """Rewrite reduced word ps into the reduced word `target` of the same
        permutation, plus corrections with strictly fewer crossings.  The
        main term (coefficient 1, trivial poly, psis == target) comes first."""
        if ps == target:
            return [(Fraction(1), ps, _one(len(word)))]
        k = target[0]
        terms = self.bring_to_front(ps, k, word)
        main = terms[0]
        out = []
        for c2, ps2, poly2 in self.convert_front(main[1][1:], target[1:], word):
            out.append((c2, (k,) + ps2, poly2))
        out.extend(terms[1:])
        return out

    # .. element constructors ..

    def e(self, word):
        word = tuple(word)
        return {((), (0,) * len(word), word): Fraction(1)}

    def one(self, nu):
        out = {}
        for word in seq(nu):
            out[((), (0,) * len(word), word)] = Fraction(1)
        return out

    def y_gen(self, nu, j):
        out = {}
        for word in seq(nu):
            e = [0] * len(word)
            e[j] = 1
            out[((), tuple(e), word)] = Fraction(1)
        return out

    def psi_gen(self, nu, k):
        out = {}
        for word in seq(nu):
            for m, c in self.nf_monomial(1, (k,), (0,) * len(word), word).items():
                out[m] = out.get(m, 0) + c
        return {m: c for m, c in out.items() if c}


# -- graded dimensions --------------------------------------------------------

def basis_monomials(spec: CartanSpec, nu, max_degree):
    """All normal-form basis monomials of R(nu) of degree <= max_degree,
    in deterministic order (word, permutation, exponents)."""
    eng = Engine(spec, standard_parameters(spec))
    n = sum(nu)
    from itertools import permutations
    perms = sorted(permutations(range(n)))
    out = []
    for word in seq(nu):
        dot_degs = [spec.dot(word[p], word[p]) for p in range(n)]
        for perm in perms:
            ps = canonical_word(perm)
            budget = max_degree - eng.deg_mono(ps, (0,) * n, word)
            if budget < 0:
                continue

            def rec(p, left, exps):
                if p == n:
                    out.append((ps, tuple(exps), word))
                    return
                step = dot_degs[p]
                r = 0
                while r * step <= left:
                    exps.append(r)
                    rec(p + 1, left - r * step, exps)
                    exps.pop()
                    r += 1

            rec(0, budget, [])
    return out


def graded_dim_R(spec: CartanSpec, nu, max_degree) -> GradedDim:
    """Graded dimension of R(nu) up to max_degree by basis enumeration."""
    eng = Engine(spec, standard_parameters(spec))
    counts = {}
    for ps, ys, word in basis_monomials(spec, nu, max_degree):
        d = eng.deg_mono(ps, ys, word)
        counts[d] = counts.get(d, 0) + 1
    return GradedDim(counts, max_degree)


def graded_dim_R_closed(spec: CartanSpec, nu, max_degree) -> GradedDim:
    """The same series by the closed form: sum over (word, sigma) of
    q^{deg psi_sigma e_word} * prod_p 1/(1 - q^{word_p . word_p})."""
    eng = Engine(spec, standard_parameters(spec))
    n = sum(nu)
    from itertools import permutations
    total = GradedDim.zero(max_degree)
    for word in seq(nu):
        prod = GradedDim.one(max_degree)
        for p in range(n):
            prod = prod * geometric(spec.dot(word[p], word[p]), max_degree)
        for perm in sorted(permutations(range(n))):
            ps = canonical_word(perm)
            d = eng.deg_mono(ps, (0,) * n, word)
            total = total + prod.shift(d).truncate(max_degree)
    return total
