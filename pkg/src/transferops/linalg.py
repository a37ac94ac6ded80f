"""Exact linear algebra over the rationals and over real multi-quadratic extensions.

Everything here is field-generic: a matrix is a list of lists whose entries
support +, -, *, /, == and bool().  Fraction covers the purely rational
modules; Radical (numbers of the form sum c_d * sqrt(d), d squarefree) covers
the representation module where square roots of edge weights appear.
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(value):
    """Parse "p/q" strings, ints and integer-valued data into Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ValueError(f"expected exact rational (int or 'p/q' string), got {value!r}")


def format_rational(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _squarefree_split(n):
    """n = s*f**2 with s squarefree; returns (s, f).  n must be a positive int."""
    s, f = 1, 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            f *= d ** (e // 2)
            if e % 2:
                s *= d
        d += 1 if d == 2 else 2
    return s * n, f


class Radical:
    """Element of Q(sqrt(d1), sqrt(d2), ...): a map squarefree d -> rational coeff.

    Exact arithmetic, including division (by iterated rationalization).  The
    key soundness fact is that square roots of distinct squarefree integers
    are linearly independent over Q, so an element is zero iff all stored
    coefficients are zero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {d: c for d, c in (coeffs or {}).items() if c}

    @staticmethod
    def of(q):
        q = Fraction(q)
        return Radical({1: q}) if q else Radical()

    @staticmethod
    def sqrt_rational(q):
        """sqrt(p/q) as an exact Radical; q must be a nonnegative rational."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("sqrt of negative rational")
        if q == 0:
            return Radical()
        # sqrt(p/q) = sqrt(p*q)/q
        n = q.numerator * q.denominator
        s, f = _squarefree_split(n)
        return Radical({s: Fraction(f, q.denominator)})

    def is_rational(self):
        return all(d == 1 for d in self.coeffs)

    def rational_part(self):
        return self.coeffs.get(1, Fraction(0))

    def as_fraction(self):
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.rational_part()

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        other = _as_radical(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        other = _as_radical(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.coeffs)
        for d, c in other.coeffs.items():
            out[d] = out.get(d, Fraction(0)) + c
        return Radical(out)

    __radd__ = __add__

    def __neg__(self):
        return Radical({d: -c for d, c in self.coeffs.items()})

    def __sub__(self, other):
        other = _as_radical(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _as_radical(other) - self

    def __mul__(self, other):
        other = _as_radical(other)
        if other is NotImplemented:
            return NotImplemented
        out = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                # sqrt(d1)*sqrt(d2) = f*sqrt(s) with d1*d2 = s*f**2
                s, f = _squarefree_split(d1 * d2)
                out[s] = out.get(s, Fraction(0)) + c1 * c2 * f
        return Radical(out)

    __rmul__ = __mul__

    def inverse(self):
        if not self.coeffs:
            raise ZeroDivisionError("radical division by zero")
        # Rationalize one prime radicand at a time: split x = a + b*sqrt(p)
        # where a, b avoid the prime p; then 1/x = (a - b*sqrt(p))/(a^2 - b^2 p).
        primes = sorted({f for d in self.coeffs for f in _prime_factors(d)})
        if not primes:
            return Radical.of(1 / self.rational_part())
        p = primes[-1]
        a, b = {}, {}
        for d, c in self.coeffs.items():
            if d % p == 0:
                b[d // p] = c
            else:
                a[d] = c
        ra, rb = Radical(a), Radical(b)
        denom = ra * ra - rb * rb * Radical.of(p)
        conj = ra - rb * Radical({p: Fraction(1)})
        return conj * denom.inverse()

    def __truediv__(self, other):
        other = _as_radical(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_radical(other) * self.inverse()

    def __float__(self):
        return float(sum(float(c) * d ** 0.5 for d, c in self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for d in sorted(self.coeffs):
            c = self.coeffs[d]
            parts.append(format_rational(c) if d == 1 else f"{format_rational(c)}*sqrt({d})")
        return " + ".join(parts)

    def to_json(self):
        return {str(d): format_rational(c) for d, c in sorted(self.coeffs.items())}


def _prime_factors(n):
    out = set()
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.add(n)
    return out


def _as_radical(x):
    if isinstance(x, Radical):
        return x
    if isinstance(x, (int, Fraction)):
        return Radical.of(x)
    return NotImplemented


# -- generic dense matrix helpers ------------------------------------------

def zeros(n, m, zero=Fraction(0)):
    return [[zero] * m for _ in range(n)]


def identity(n, one=Fraction(1), zero=Fraction(0)):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(m):
            acc = None
            for t in range(k):
                if ai[t] and b[t][j]:
                    term = ai[t] * b[t][j]
                    acc = term if acc is None else acc + term
            row.append(acc if acc is not None else ai[0] * 0)
        out.append(row)
    return out


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a):
    return [[c * x for x in row] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def mat_eq(a, b):
    return len(a) == len(b) and all(ra == rb for ra, rb in zip(a, b))


def is_zero_matrix(a):
    return all(not x for row in a for x in row)


def mat_apply(a, v):
    return [sum((x * y for x, y in zip(row, v) if x and y), row[0] * 0) for row in a]


def rref(matrix):
    """Reduced row echelon form; returns (rows, pivot_columns).  Input untouched."""
    rows = [list(r) for r in matrix]
    n = len(rows)
    m = len(rows[0]) if n else 0
    pivots = []
    r = 0
    for c in range(m):
        pivot = next((i for i in range(r, n) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return rows, pivots


def rank(matrix):
    if not matrix or not matrix[0]:
        return 0
    return len(rref(matrix)[1])


def nullspace(matrix):
    """Basis of {x : matrix @ x = 0} as a list of vectors."""
    if not matrix:
        return []
    m = len(matrix[0])
    rows, pivots = rref(matrix)
    one = Fraction(1)
    if any(any(x for x in row) for row in matrix):
        for row in matrix:
            for x in row:
                if x:
                    one = x / x
                    break
            else:
                continue
            break
    zero = one - one
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fc in free:
        v = [zero] * m
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = -rows[r][fc]
        basis.append(v)
    return basis


def solve(matrix, rhs):
    """One exact solution of matrix @ x = rhs, or None if inconsistent."""
    if not matrix:
        return [] if not any(rhs) else None
    m = len(matrix[0])
    aug = [list(r) + [b] for r, b in zip(matrix, rhs)]
    rows, pivots = rref(aug)
    if m in pivots:
        return None
    sample = matrix[0][0]
    zero = sample - sample
    x = [zero] * m
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][m]
    return x


def row_space_contains(rows, vector):
    if not rows:
        return not any(vector)
    return rank(rows) == rank(rows + [vector])


def same_span(rows_a, rows_b):
    """Exact equality of the row spans of two generator lists."""
    ra = rank(rows_a) if rows_a else 0
    rb = rank(rows_b) if rows_b else 0
    if ra != rb:
        return False
    both = (rows_a or []) + (rows_b or [])
    return (rank(both) if both else 0) == ra
