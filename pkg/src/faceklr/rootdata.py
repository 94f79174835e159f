"""Cartan data, weights, positive roots and word enumeration.

Weights live in NI and are stored as tuples of nonnegative ints indexed by
position in the spec's label list.  Supported kinds: all finite types and
untwisted affine types.  Twisted affine and indefinite matrices are
rejected at validation time.
"""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache


class CartanError(ValueError):
    pass


@dataclass(frozen=True)
class Root:
    coeffs: tuple
    imaginary: bool = False

    @property
    def ht(self):
        return sum(self.coeffs)


def ht(weight) -> int:
    return sum(weight)


def add_w(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub_w(a, b):
    return tuple(x - y for x, y in zip(a, b))


def scale_w(a, n):
    return tuple(n * x for x in a)


@dataclass(frozen=True)
class CartanSpec:
    labels: tuple
    matrix: tuple          # tuple of tuples of ints
    sym: tuple             # symmetrizers d_i, positive ints
    kind: str              # 'finite' | 'affine'
    affine_node: int = -1  # index of the distinguished node in affine kind
    name: str = ""

    def __post_init__(self):
        n = len(self.labels)
        a, d = self.matrix, self.sym
        if len(a) != n or any(len(row) != n for row in a):
            raise CartanError("matrix shape does not match index set")
        for i in range(n):
            if a[i][i] != 2:
                raise CartanError("diagonal Cartan entries must be 2")
            if d[i] <= 0:
                raise CartanError("symmetrizers must be positive")
            for j in range(n):
                if i != j and a[i][j] > 0:
                    raise CartanError("off-diagonal Cartan entries must be <= 0")
                if (a[i][j] == 0) != (a[j][i] == 0):
                    raise CartanError("Cartan matrix zero pattern must be symmetric")
                if d[i] * a[i][j] != d[j] * a[j][i]:
                    raise CartanError("symmetrizers do not symmetrize the matrix")
        if self.kind == "finite":
            if not _is_positive_definite(self._sym_matrix()):
                raise CartanError("matrix is not of finite type")
        elif self.kind == "affine":
            _validate_untwisted_affine(self)
        else:
            raise CartanError(f"unsupported kind {self.kind!r}")

    # -- basics ----------------------------------------------------------

    @property
    def rank(self):
        return len(self.labels)

    def _sym_matrix(self):
        n = self.rank
        return [[Fraction(self.sym[i] * self.matrix[i][j]) for j in range(n)] for i in range(n)]

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise CartanError(f"unknown label {label!r}") from None

    def alpha(self, i) -> tuple:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def zero(self) -> tuple:
        return (0,) * self.rank

    def dot(self, i, j) -> int:
        """i . j = d_i a_ij, the symmetric pairing on simple roots."""
        return self.sym[i] * self.matrix[i][j]

    def is_symmetric(self) -> bool:
        return all(d == 1 for d in self.sym)

    # -- affine structure --------------------------------------------------

    @property
    def delta(self) -> tuple:
        """Minimal imaginary root (affine kind only)."""
        if self.kind != "affine":
            raise CartanError("delta only exists in affine kind")
        return _affine_marks(self)

    def finite_part(self) -> "CartanSpec":
        if self.kind != "affine":
            raise CartanError("finite_part only exists in affine kind")
        z = self.affine_node
        keep = [i for i in range(self.rank) if i != z]
        return CartanSpec(
            labels=tuple(self.labels[i] for i in keep),
            matrix=tuple(tuple(self.matrix[i][j] for j in keep) for i in keep),
            sym=tuple(self.sym[i] for i in keep),
            kind="finite",
            name=self.name + "-finite" if self.name else "",
        )

    def project(self, weight) -> tuple:
        """Standard projection pi to the finite root lattice; sends delta to 0.

        Returns an integer vector over the finite part's labels (may be
        negative)."""
        z = self.affine_node
        marks = self.delta
        m0 = weight[z]
        keep = [i for i in range(self.rank) if i != z]
        return tuple(weight[i] - m0 * marks[i] for i in keep)


def pairing(spec: CartanSpec, lam, mu) -> int:
    """Symmetric bilinear form extending i.j = d_i a_ij."""
    if len(lam) != spec.rank or len(mu) != spec.rank:
        raise CartanError("weight length does not match the Cartan spec")
    total = 0
    for i, li in enumerate(lam):
        if not li:
            continue
        for j, mj in enumerate(mu):
            if mj:
                total += li * mj * spec.dot(i, j)
    return total


def _is_positive_definite(m) -> bool:
    n = len(m)
    work = [row[:] for row in m]
    for k in range(n):
        # leading principal minors via fraction-free-ish elimination
        if work[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = work[i][k] / work[k][k]
            for j in range(k, n):
                work[i][j] -= f * work[k][j]
    return True


def _kernel_vector(m):
    """One-dimensional rational kernel of a square matrix, or None."""
    n = len(m)
    work = [[Fraction(x) for x in row] for row in m]
    pivots = {}
    for col in range(n):
        row_idx = None
        for r in range(n):
            if r not in pivots.values() and work[r][col] != 0:
                row_idx = r
                break
        if row_idx is None:
            continue
        pivots[col] = row_idx
        pr = work[row_idx]
        for r in range(n):
            if r != row_idx and work[r][col] != 0:
                f = work[r][col] / pr[col]
                for c in range(n):
                    work[r][c] -= f * pr[c]
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        return None
    f = free[0]
    sol = [Fraction(0)] * n
    sol[f] = Fraction(1)
    for col, r in pivots.items():
        sol[col] = -work[r][f] / work[r][col]
    # clear denominators, make primitive and positive
    from math import gcd, lcm
    den = lcm(*[x.denominator for x in sol])
    ints = [int(x * den) for x in sol]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    if any(x < 0 for x in ints):
        ints = [-x for x in ints]
    return tuple(ints)


@lru_cache(maxsize=None)
def _affine_marks(spec: CartanSpec) -> tuple:
    # columns of A kill the marks: sum_j a_ij m_j = 0
    v = _kernel_vector([list(row) for row in spec.matrix])
    if v is None or any(x <= 0 for x in v):
        raise CartanError("matrix is not of affine type (no positive null vector)")
    return v


def _validate_untwisted_affine(spec: CartanSpec):
    z = spec.affine_node
    if not (0 <= z < spec.rank):
        raise CartanError("affine kind needs a valid affine_node")
    marks = _affine_marks(spec)
    if marks[z] != 1:
        raise CartanError("twisted affine kinds are unsupported (mark at affine node != 1)")
    fin = spec.finite_part()
    # highest root of the finite part must reproduce row/column of the node
    pos = [r.coeffs for r in positive_roots(fin, sum(marks))]
    theta_fin = max(pos, key=ht)
    keep = [i for i in range(spec.rank) if i != z]
    if tuple(marks[i] for i in keep) != theta_fin:
        raise CartanError("marks do not match the highest root: unsupported affine kind")
    theta_full = [0] * spec.rank
    for pos_idx, i in enumerate(keep):
        theta_full[i] = theta_fin[pos_idx]
    theta_theta = pairing(spec, tuple(theta_full), tuple(theta_full))
    if 2 * spec.sym[z] != theta_theta:
        raise CartanError("twisted affine kinds are unsupported (node normalization)")
    for j in keep:
        if spec.matrix[j][z] != -sum(theta_full[i] * spec.matrix[j][i] for i in keep):
            raise CartanError("twisted affine kinds are unsupported (column check)")


@lru_cache(maxsize=None)
def positive_roots(spec: CartanSpec, N: int):
    """All positive roots of height <= N as a deterministically ordered list.

    Finite kind enumerates by root strings; affine kind lays out
    {gamma + m delta} and {m delta} explicitly.
    """
    if N < 1:
        raise CartanError("height bound must be >= 1")
    if spec.kind == "finite":
        return tuple(_finite_positive_roots(spec, N))
    fin = spec.finite_part()
    marks = spec.delta
    z = spec.affine_node
    keep = [i for i in range(spec.rank) if i != z]
    fin_pos = [r.coeffs for r in _finite_positive_roots(fin, sum(marks) * (N + 1))]

    def embed(gamma_fin, m):
        w = [m * marks[i] for i in range(spec.rank)]
        for pos_idx, i in enumerate(keep):
            w[i] += gamma_fin[pos_idx]
        return tuple(w)

    roots = []
    for m in range(0, N + 1):
        for gamma in fin_pos:
            w = embed(gamma, m)
            if 0 < ht(w) <= N:
                roots.append(Root(w, False))
    for m in range(1, N + 1):
        for gamma in fin_pos:
            w = embed(tuple(-x for x in gamma), m)
            if 0 < ht(w) <= N and all(x >= 0 for x in w):
                roots.append(Root(w, False))
        dm = scale_w(marks, m)
        if ht(dm) <= N:
            roots.append(Root(dm, True))
    roots.sort(key=lambda r: (r.ht, r.coeffs))
    return tuple(roots)


def _finite_positive_roots(spec: CartanSpec, N: int):
    """Height-by-height root string enumeration (finite type)."""
    n = spec.rank
    all_roots = {spec.alpha(i) for i in range(n)}
    frontier = set(all_roots)
    height = 1
    while frontier and height < N:
        nxt = set()
        for beta in frontier:
            for i in range(n):
                alpha_i = spec.alpha(i)
                # p = how far the root string extends downward from beta
                p = 0
                walk = sub_w(beta, alpha_i)
                while all(x >= 0 for x in walk) and walk in all_roots:
                    p += 1
                    walk = sub_w(walk, alpha_i)
                pair = sum(beta[j] * spec.matrix[i][j] for j in range(n))
                if p - pair > 0:
                    nxt.add(add_w(beta, alpha_i))
        all_roots |= nxt
        frontier = nxt
        height += 1
    out = [Root(w, False) for w in all_roots if ht(w) <= N]
    out.sort(key=lambda r: (r.ht, r.coeffs))
    return out


def seq(nu) -> list:
    """All words with content nu, in lexicographic order on index tuples."""
    n = len(nu)
    words = []

    def rec(remaining, prefix):
        if not any(remaining):
            words.append(tuple(prefix))
            return
        for i in range(n):
            if remaining[i]:
                rem = list(remaining)
                rem[i] -= 1
                prefix.append(i)
                rec(tuple(rem), prefix)
                prefix.pop()

    rec(tuple(nu), [])
    return words


def weight_of_word(spec: CartanSpec, word) -> tuple:
    w = [0] * spec.rank
    for i in word:
        w[i] += 1
    return tuple(w)


# -- builtin systems -------------------------------------------------------

def _type_a_matrix(n):
    return tuple(tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n))
                 for i in range(n))


def builtin(name: str) -> CartanSpec:
    """Named Cartan specs used throughout the test suites."""
    key = name.lower()
    if key in ("a1", "a2", "a3", "a4"):
        n = int(key[1])
        return CartanSpec(tuple(str(i) for i in range(1, n + 1)),
                          _type_a_matrix(n), (1,) * n, "finite", name=key)
    if key == "b2":
        # convention d = (2, 1): alpha_1 long, alpha_2 short
        return CartanSpec(("1", "2"), ((2, -1), (-2, 2)), (2, 1), "finite", name=key)
    if key == "g2":
        return CartanSpec(("1", "2"), ((2, -1), (-3, 2)), (3, 1), "finite", name=key)
    if key in ("a1-affine", "sl2-affine"):
        return CartanSpec(("0", "1"), ((2, -2), (-2, 2)), (1, 1), "affine", 0, name="a1-affine")
    if key in ("a2-affine", "sl3-affine"):
        n = 3
        m = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        for i in range(n):
            m[i][(i + 1) % n] = -1
            m[i][(i - 1) % n] = -1
        return CartanSpec(tuple(str(i) for i in range(n)),
                          tuple(tuple(r) for r in m), (1,) * n, "affine", 0, name="a2-affine")
    if key in ("a3-affine", "sl4-affine"):
        n = 4
        m = [[0] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = 2
            m[i][(i + 1) % n] = -1
            m[i][(i - 1) % n] = -1
        return CartanSpec(tuple(str(i) for i in range(n)),
                          tuple(tuple(r) for r in m), (1,) * n, "affine", 0, name="a3-affine")
    raise CartanError(f"unknown builtin system {name!r}")


def load_cartan(text: str) -> CartanSpec:
    """Parse a CartanSpec from sectioned key-value text.

    Expected section [cartan] with keys: kind, labels, matrix (rows joined
    by '/'), symmetrizers, and affine_node for affine kind.  A key
    `builtin` short-circuits to a named system.
    """
    cp = configparser.ConfigParser()
    cp.read_file(io.StringIO(text))
    sec = cp["cartan"]
    if "builtin" in sec:
        return builtin(sec["builtin"].strip())
    labels = tuple(sec["labels"].split())
    rows = [r.split() for r in sec["matrix"].split("/")]
    matrix = tuple(tuple(int(x) for x in row) for row in rows)
    sym = tuple(int(x) for x in sec["symmetrizers"].split())
    kind = sec["kind"].strip()
    node = -1
    if kind == "affine":
        node = labels.index(sec["affine_node"].strip())
    return CartanSpec(labels, matrix, sym, kind, node)
