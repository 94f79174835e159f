"""Exact sparse linear algebra over the rationals.

Vectors are dicts mapping hashable keys to nonzero Fractions. Everything
here is exact; no floats anywhere.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable


Vec = dict


def vec_add(a: Vec, b: Vec, coeff=Fraction(1)) -> Vec:
    """Return a + coeff*b, dropping zero entries."""
    out = dict(a)
    for k, v in b.items():
        w = out.get(k, 0) + coeff * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def vec_scale(a: Vec, coeff) -> Vec:
    if not coeff:
        return {}
    return {k: coeff * v for k, v in a.items()}


class SparseSpan:
    """Incrementally maintained reduced-row-echelon span of sparse vectors.

    Invariant: every stored row is normalized to pivot coefficient 1 and
    contains no other pivot key, so reduction is a single pass and the
    echelon form is canonical (hence deterministic).  A key -> rows index
    keeps insertions proportional to the rows actually touched.
    """

    def __init__(self):
        self.pivots: dict[Hashable, Vec] = {}
        self._uses: dict[Hashable, set] = {}

    def reduce(self, vec: Vec) -> Vec:
        """Reduce vec against the current span; returns the residual."""
        v = dict(vec)
        for key in [k for k in v if k in self.pivots]:
            c = v.get(key)
            if c:
                v = vec_add(v, self.pivots[key], -c)
        return v

    def add(self, vec: Vec) -> bool:
        """Insert vec; returns True if it enlarged the span."""
        v = self.reduce(vec)
        if not v:
            return False
        pivot = min(v.keys(), key=repr)
        c = v[pivot]
        v = {k: val / c for k, val in v.items()}
        for key in list(self._uses.get(pivot, ())):
            row = self.pivots[key]
            coeff = row.get(pivot)
            if coeff:
                new_row = vec_add(row, v, -coeff)
                self.pivots[key] = new_row
                for kk in row:
                    if kk not in new_row:
                        self._uses.get(kk, set()).discard(key)
                for kk in new_row:
                    if kk not in row:
                        self._uses.setdefault(kk, set()).add(key)
        self.pivots[pivot] = v
        for kk in v:
            self._uses.setdefault(kk, set()).add(pivot)
        return True

    def contains(self, vec: Vec) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rank_of(vectors: Iterable[Vec]) -> int:
    span = SparseSpan()
    for v in vectors:
        span.add(v)
    return span.rank


def nullspace(rows: list[Vec], variables: list[Hashable]) -> list[Vec]:
    """Kernel basis of the linear system  sum_j rows[i][j]*x_j = 0.

    `variables` fixes the column order; the result is a deterministic
    list of sparse solution vectors keyed by variable.
    """
    var_index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    # dense-ish elimination on sparse rows keyed by column index
    work = []
    for r in rows:
        rr = {}
        for k, c in r.items():
            if c:
                rr[var_index[k]] = Fraction(c)
        if rr:
            work.append(rr)
    pivots: dict[int, dict] = {}
    for rr in work:
        v = dict(rr)
        while v:
            j = min(v.keys())
            if j in pivots:
                row = pivots[j]
                c = v[j] / row[j]
                v = vec_add(v, row, -c)
            else:
                pivots[j] = v
                break
    pivot_cols = set(pivots.keys())
    free_cols = [j for j in range(n) if j not in pivot_cols]
    basis = []
    for f in free_cols:
        sol = {f: Fraction(1)}
        # back substitute in decreasing pivot order
        for j in sorted(pivots.keys(), reverse=True):
            row = pivots[j]
            s = sum(row.get(k, 0) * sol.get(k, 0) for k in row if k != j)
            if s:
                sol[j] = -s / row[j]
        basis.append({variables[j]: c for j, c in sol.items() if c})
    return basis


def solve(rows: list[Vec], rhs: list, variables: list[Hashable]):
    """Solve the inhomogeneous system rows*x = rhs.

    Returns (particular solution dict, nullspace basis) or None if
    inconsistent.
    """
    var_index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    RHS = n  # extra column
    work = []
    for r, b in zip(rows, rhs):
        rr = {var_index[k]: Fraction(c) for k, c in r.items() if c}
        if b:
            rr[RHS] = -Fraction(b)
        if rr:
            work.append(rr)
    pivots: dict[int, dict] = {}
    for rr in work:
        v = dict(rr)
        while v:
            j = min(v.keys())
            if j in pivots:
                c = v[j] / pivots[j][j]
                v = vec_add(v, pivots[j], -c)
            else:
                pivots[j] = v
                break
    if RHS in pivots:
        return None  # 0 = nonzero
    sol = {RHS: Fraction(1)}
    for j in sorted(pivots.keys(), reverse=True):
        row = pivots[j]
        s = sum(row.get(k, 0) * sol.get(k, 0) for k in row if k != j)
        sol[j] = -s / row[j] if s else Fraction(0)
    particular = {variables[j]: c for j, c in sol.items() if j != RHS and c}
    hom_rows = [{k: c for k, c in r.items()} for r in rows]
    return particular, nullspace(hom_rows, variables)


def lp_feasible(eq_rows: list[list[Fraction]], eq_rhs: list[Fraction]) -> bool:
    """Exact feasibility of  A x = b, x >= 0  via phase-1 simplex.

    Bland's rule guarantees termination. Rows/rhs are dense rational lists.
    """
    m = len(eq_rows)
    if m == 0:
        return True
    n = len(eq_rows[0])
    # make rhs nonnegative
    T = []
    for row, b in zip(eq_rows, eq_rhs):
        row = [Fraction(x) for x in row]
        b = Fraction(b)
        if b < 0:
            row = [-x for x in row]
            b = -b
        T.append(row + [b])
    # artificial variables: columns n..n+m-1
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T[i] = T[i][:n] + art + [T[i][n]]
    total = n + m
    basis = list(range(n, n + m))
    # objective: minimize sum of artificials; cost row in terms of nonbasic
    cost = [Fraction(0)] * (total + 1)
    for i in range(m):
        for j in range(total + 1):
            cost[j] += T[i][j]
    while True:
        enter = None
        for j in range(n):
            if j not in basis and cost[j] > 0:
                enter = j
                break  # Bland: smallest structural index (artificials never re-enter)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][total] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            break  # unbounded in phase 1 cannot happen, but be safe
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter]:
                c = T[i][enter]
                T[i] = [a - c * b for a, b in zip(T[i], T[leave])]
        c = cost[enter]
        if c:
            cost = [a - c * b for a, b in zip(cost, T[leave])]
        basis[leave] = enter
    return cost[total] == 0


def lp_solve_strict(eq_rows, eq_rhs, n_vars, strict_vars, trials=None):
    """Find rational x with A x = b, x_j >= 0 and x_j >= 1 for j in strict_vars.

    Used to build witness functionals. Returns a dense list or None.
    Shifts x_j = 1 + x'_j on the strict variables and runs phase-1.
    """
    rows2, rhs2 = [], []
    for row, b in zip(eq_rows, eq_rhs):
        shift = sum(row[j] for j in strict_vars)
        rows2.append(list(row))
        rhs2.append(Fraction(b) - shift)
    # feasibility with a certificate: rerun simplex but track the solution
    m = len(rows2)
    if m == 0:
        x = [Fraction(0)] * n_vars
        for j in strict_vars:
            x[j] = Fraction(1)
        return x
    n = n_vars
    T = []
    for row, b in zip(rows2, rhs2):
        row = [Fraction(v) for v in row]
        b = Fraction(b)
        if b < 0:
            row = [-v for v in row]
            b = -b
        T.append(row + [b])
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T[i] = T[i][:n] + art + [T[i][n]]
    total = n + m
    basis = list(range(n, n + m))
    cost = [Fraction(0)] * (total + 1)
    for i in range(m):
        for j in range(total + 1):
            cost[j] += T[i][j]
    while True:
        enter = None
        for j in range(n):
            if j not in basis and cost[j] > 0:
                enter = j
                break
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][total] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            break
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter]:
                c = T[i][enter]
                T[i] = [a - c * b for a, b in zip(T[i], T[leave])]
        c = cost[enter]
        if c:
            cost = [a - c * b for a, b in zip(cost, T[leave])]
        basis[leave] = enter
    if cost[total] != 0:
        return None
    x = [Fraction(0)] * n_vars
    for i, bv in enumerate(basis):
        if bv < n_vars:
            x[bv] = T[i][total]
    for j in strict_vars:
        x[j] += 1
    return x
