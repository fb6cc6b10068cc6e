"""Exact arithmetic substrate: rationals, degree-bounded polynomials, and
matrices over both.

Everything is immutable and exact.  The ground field is Q (fraction field
Q(t) for polynomial matrices); no floating point is used anywhere.  A
``BoundedPoly`` models a global section of O(n) on the projective line in
the affine coordinate t: an ordinary polynomial of degree at most n, where
the missing degree n - deg(f) records the vanishing order at infinity of
the homogenized form.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

Rational = Fraction

__all__ = [
    "Rational",
    "parse_rational",
    "format_rational",
    "rational_nth_roots",
    "BoundedPoly",
    "PolyMatrix",
    "poly_mul",
    "poly_sqrt",
]


def parse_rational(text) -> Fraction:
    """Parse an exact rational from 'num/den' or 'num' strings (or ints).

    Floats are rejected: exactness is a hard requirement.
    """
    if isinstance(text, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if isinstance(text, float):
        raise ValueError(f"floats are not accepted as exact rationals: {text!r}")
    if not isinstance(text, str):
        raise ValueError(f"cannot parse rational from {type(text).__name__}")
    s = text.strip()
    if "/" in s:
        num, _, den = s.partition("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _int_nth_root(n: int, k: int) -> Optional[int]:
    """Exact k-th root of a non-negative integer, or None."""
    if n < 0:
        return None
    if n in (0, 1):
        return n
    lo, hi = 0, 1
    while hi ** k < n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** k == n else None


def rational_nth_roots(q: Fraction, k: int) -> tuple[Fraction, ...]:
    """All rational solutions z of z**k == q, in increasing order."""
    if k <= 0:
        raise ValueError("root order must be positive")
    q = Fraction(q)
    if q == 0:
        return (Fraction(0),)
    neg = q < 0
    if neg and k % 2 == 0:
        return ()
    num = _int_nth_root(abs(q.numerator), k)
    den = _int_nth_root(q.denominator, k)
    if num is None or den is None:
        return ()
    root = Fraction(num, den)
    if neg:
        return (-root,)
    if k % 2 == 0:
        return (-root, root)
    return (root,)


# ---------------------------------------------------------------------------
# raw polynomial helpers (ascending coefficient tuples over Fraction)
# ---------------------------------------------------------------------------


def _trim(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _trim(out)


def _pscale(a, s: Fraction):
    if s == 0:
        return ()
    return tuple(c * s for c in a)


def _pdivmod(a, b):
    """Polynomial division with remainder; b must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    quo = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    db, lb = len(b) - 1, b[-1]
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i] / lb
        if c:
            quo[i - db] = c
            for j, bj in enumerate(b):
                rem[i - db + j] -= c * bj
    return _trim(quo), _trim(rem)


def _pgcd(a, b):
    """Monic gcd in Q[t]."""
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    if a:
        a = _pscale(a, 1 / a[-1])
    return a


class BoundedPoly:
    """A polynomial in the affine coordinate t with an explicit degree bound.

    ``bound`` is the homogeneous degree: the value models a section of
    O(bound) on the projective line.  bound == -1 forces the zero polynomial
    (the zero section of any negative twist).
    """

    __slots__ = ("coeffs", "bound")

    def __init__(self, coeffs: Iterable, bound: int):
        cs = _trim([Fraction(c) for c in coeffs])
        if bound < -1:
            bound = -1
        if len(cs) > bound + 1:
            raise ValueError(
                f"polynomial of degree {len(cs) - 1} exceeds bound {bound}"
            )
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "bound", bound)

    def __setattr__(self, *a):
        raise AttributeError("BoundedPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, bound: int = -1) -> "BoundedPoly":
        return cls((), bound)

    @classmethod
    def const(cls, value, bound: int = 0) -> "BoundedPoly":
        return cls((Fraction(value),), bound)

    @classmethod
    def t(cls, bound: int = 1) -> "BoundedPoly":
        return cls((Fraction(0), Fraction(1)), bound)

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Affine degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def leading_coefficient(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def vanishing_order_at_infinity(self) -> Optional[int]:
        """Order of the homogenized form at infinity; None for zero."""
        if self.is_zero():
            return None
        return self.bound - self.degree()

    def value_at_infinity(self) -> Fraction:
        """Coefficient of t**bound: the homogenized form evaluated at (1:0)."""
        return self.coefficient(self.bound)

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * Fraction(x) + c
        return acc

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    # -- arithmetic --------------------------------------------------------

    def _check_same_bound(self, other: "BoundedPoly"):
        if self.bound != other.bound:
            raise ValueError(
                f"cannot combine sections of O({self.bound}) and O({other.bound})"
            )

    def __add__(self, other: "BoundedPoly") -> "BoundedPoly":
        self._check_same_bound(other)
        return BoundedPoly(_padd(self.coeffs, other.coeffs), self.bound)

    def __radd__(self, other):
        # lets sum() over mixed matrix rows start from its integer 0
        if other == 0:
            return self
        return NotImplemented

    def __sub__(self, other: "BoundedPoly") -> "BoundedPoly":
        return self + (-other)

    def __neg__(self) -> "BoundedPoly":
        return BoundedPoly(tuple(-c for c in self.coeffs), self.bound)

    def __mul__(self, other):
        if isinstance(other, BoundedPoly):
            return BoundedPoly(
                _pmul(self.coeffs, other.coeffs), self.bound + other.bound
            )
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, s) -> "BoundedPoly":
        return BoundedPoly(_pscale(self.coeffs, Fraction(s)), self.bound)

    def divide_scalar(self, s) -> "BoundedPoly":
        s = Fraction(s)
        if s == 0:
            raise ZeroDivisionError("division by zero scalar")
        return self.scale(1 / s)

    def divexact(self, other: "BoundedPoly") -> "BoundedPoly":
        """Exact polynomial division; raises if the remainder is nonzero."""
        quo, rem = _pdivmod(self.coeffs, other.coeffs)
        if rem:
            raise ValueError("inexact polynomial division")
        return BoundedPoly(quo, self.bound - other.bound)

    def with_bound(self, bound: int) -> "BoundedPoly":
        """Reinterpret as a section of O(bound) (twist by a divisor at infinity)."""
        return BoundedPoly(self.coeffs, bound)

    def gcd(self, other: "BoundedPoly") -> tuple[Fraction, ...]:
        return _pgcd(self.coeffs, other.coeffs)

    def sqrt(self) -> Optional["BoundedPoly"]:
        return poly_sqrt(self)

    # -- dunder plumbing ---------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BoundedPoly)
            and self.coeffs == other.coeffs
            and self.bound == other.bound
        )

    def __hash__(self):
        return hash((self.coeffs, self.bound))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return f"BoundedPoly(0; bound={self.bound})"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(format_rational(c))
            else:
                tk = "t" if k == 1 else f"t^{k}"
                terms.append(tk if c == 1 else f"{format_rational(c)}*{tk}")
        return f"BoundedPoly({' + '.join(terms)}; bound={self.bound})"


def poly_mul(a: BoundedPoly, b: BoundedPoly) -> BoundedPoly:
    """Product of sections; realizes H0(O(m)) x H0(O(n)) -> H0(O(m+n))."""
    return a * b


def poly_sqrt(a: BoundedPoly) -> Optional[BoundedPoly]:
    """Exact square root in Q[t] with positive leading coefficient, or None.

    The bound must be even for the result to be a genuine section (a square
    in H0(O(2k)) is the square of a section of O(k)); an odd bound on a
    nonzero input always returns None because the homogenized form has odd
    degree.
    """
    if a.is_zero():
        return BoundedPoly.zero(a.bound // 2 if a.bound >= 0 else -1)
    if a.bound % 2 != 0:
        return None
    deg = a.degree()
    if deg % 2 != 0:
        return None
    lc_roots = rational_nth_roots(a.leading_coefficient(), 2)
    if not lc_roots:
        return None
    half = deg // 2
    b = [Fraction(0)] * (half + 1)
    b[half] = lc_roots[-1]  # positive root
    # determine lower coefficients top-down from (b^2)[deg - k] == a[deg - k]
    for k in range(1, half + 1):
        idx = deg - k
        acc = Fraction(0)
        for i in range(half - k + 1, half + 1):
            j = idx - i
            if 0 <= j <= half and j > half - k:
                acc += b[i] * b[j]
        b[half - k] = (Fraction(a.coefficient(idx)) - acc) / (2 * b[half])
    cand = BoundedPoly(b, a.bound // 2)
    if cand * cand == a:
        return cand
    return None


# ---------------------------------------------------------------------------
# matrices of bounded polynomials
# ---------------------------------------------------------------------------


class PolyMatrix:
    """A rows x cols grid of BoundedPoly entries.

    The owning type (a sheaf map) derives the per-entry bounds; PolyMatrix
    only checks dimensional consistency and provides exact linear algebra
    over Q[t] / Q(t).
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[BoundedPoly]]):
        ents = tuple(tuple(row) for row in entries)
        if not ents or not ents[0]:
            raise ValueError("PolyMatrix must be non-empty")
        cols = len(ents[0])
        for row in ents:
            if len(row) != cols:
                raise ValueError("ragged rows in PolyMatrix")
            for e in row:
                if not isinstance(e, BoundedPoly):
                    raise TypeError("entries must be BoundedPoly")
        object.__setattr__(self, "rows", len(ents))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", ents)

    def __setattr__(self, *a):
        raise AttributeError("PolyMatrix is immutable")

    @classmethod
    def from_rows(cls, rows) -> "PolyMatrix":
        return cls(rows)

    @classmethod
    def zero(cls, rows: int, cols: int, bounds) -> "PolyMatrix":
        """bounds: callable (i, j) -> entry bound."""
        return cls(
            [
                [BoundedPoly.zero(bounds(i, j)) for j in range(cols)]
                for i in range(rows)
            ]
        )

    def __getitem__(self, ij) -> BoundedPoly:
        i, j = ij
        return self.entries[i][j]

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols})"

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch in matrix addition")
        return PolyMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix([[-e for e in row] for row in self.entries])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError(
                f"dimension mismatch: ({self.rows}x{self.cols}) * "
                f"({other.rows}x{other.cols})"
            )
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = None
                for k in range(self.cols):
                    term = self.entries[i][k] * other.entries[k][j]
                    acc = term if acc is None else acc + term
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def scale(self, s) -> "PolyMatrix":
        return PolyMatrix([[e.scale(s) for e in row] for row in self.entries])

    def scale_poly(self, p: BoundedPoly) -> "PolyMatrix":
        return PolyMatrix([[e * p for e in row] for row in self.entries])

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def trace(self) -> BoundedPoly:
        if not self.is_square():
            raise ValueError("trace of a non-square matrix")
        acc = self.entries[0][0]
        for i in range(1, self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def det(self) -> BoundedPoly:
        """Determinant by fraction-free (Bareiss) elimination over Q[t]."""
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        m = [[e for e in row] for row in self.entries]
        sign = 1
        prev = None
        for k in range(n - 1):
            if m[k][k].is_zero():
                for i in range(k + 1, n):
                    if not m[i][k].is_zero():
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    total = sum(e.bound for e in (self.entries[i][i] for i in range(n)))
                    return BoundedPoly.zero(total)
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                    m[i][j] = num if prev is None else num.divexact(prev)
            prev = m[k][k]
        d = m[n - 1][n - 1]
        return d if sign == 1 else -d

    def charpoly(self) -> list[BoundedPoly]:
        """Coefficients [c_1, ..., c_r] with det(x*I - M) = x^r + sum c_k x^(r-k).

        Faddeev-LeVerrier; divisions are by integers only, so everything
        stays in Q[t].
        """
        if not self.is_square():
            raise ValueError("characteristic polynomial of a non-square matrix")
        r = self.rows
        coeffs: list[BoundedPoly] = []
        mk = self
        for k in range(1, r + 1):
            ck = mk.trace().divide_scalar(-k)
            coeffs.append(ck)
            if k < r:
                mk = self * (mk + _scalar_diag(ck, mk))
        return coeffs

    def elementary_symmetric(self) -> list[BoundedPoly]:
        """[e_1, ..., e_r] of the eigenvalues: e_k = (-1)^k * charpoly c_k."""
        return [
            -c if k % 2 == 1 else c
            for k, c in enumerate(self.charpoly(), start=1)
        ]

    def rank(self) -> int:
        return len(_row_echelon(self.entries)[0])

    def kernel_basis(self) -> list[tuple[BoundedPoly, ...]]:
        """Basis of the kernel over Q(t) as primitive polynomial vectors.

        Each vector has entries in Q[t] with no common polynomial factor,
        integer-primitive, and a positive leading coefficient in its first
        nonzero entry.
        """
        pivots, red = _row_echelon(self.entries)
        pivot_cols = [c for _, c in pivots]
        free_cols = [j for j in range(self.cols) if j not in pivot_cols]
        basis = []
        for fc in free_cols:
            vec = _kernel_vector(red, pivots, free_cols, fc, self.cols)
            basis.append(_primitive_vector(vec))
        return basis


def _scalar_diag(c: BoundedPoly, template: PolyMatrix) -> PolyMatrix:
    """c * identity, with zero off-diagonals carrying template's entry bounds."""
    n = template.rows
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(c.with_bound(template.entries[i][j].bound))
            else:
                row.append(BoundedPoly.zero(template.entries[i][j].bound))
        out.append(row)
    return PolyMatrix(out)


def _row_echelon(entries):
    """Fraction-free row echelon over Q[t]; returns (pivots, reduced rows).

    pivots is a list of (row, col) in order; reduced rows are lists of
    BoundedPoly (bounds are not meaningful afterwards, only the raw
    polynomials matter).
    """
    rows = [list(r) for r in entries]
    nrows, ncols = len(rows), len(rows[0])
    pivots = []
    pr = 0
    for pc in range(ncols):
        piv = None
        for i in range(pr, nrows):
            if not rows[i][pc].is_zero():
                piv = i
                break
        if piv is None:
            continue
        rows[pr], rows[piv] = rows[piv], rows[pr]
        for i in range(pr + 1, nrows):
            if rows[i][pc].is_zero():
                continue
            a, b = rows[pr][pc], rows[i][pc]
            g = _pgcd(a.coeffs, b.coeffs)
            am = _RawPoly(_pdivmod(a.coeffs, g)[0])
            bm = _RawPoly(_pdivmod(b.coeffs, g)[0])
            rows[i] = [
                _as_bp(_raw(rows[i][j]) * am - _raw(rows[pr][j]) * bm)
                for j in range(ncols)
            ]
        pivots.append((pr, pc))
        pr += 1
        if pr == nrows:
            break
    return pivots, rows


class _RawPoly:
    """Internal bound-free polynomial wrapper for elimination."""

    __slots__ = ("c",)

    def __init__(self, c):
        self.c = _trim(c)

    def __mul__(self, other):
        return _RawPoly(_pmul(self.c, other.c))

    def __sub__(self, other):
        return _RawPoly(_padd(self.c, _pscale(other.c, Fraction(-1))))


def _raw(p: BoundedPoly) -> _RawPoly:
    return _RawPoly(p.coeffs)


def _as_bp(p: _RawPoly) -> BoundedPoly:
    return BoundedPoly(p.c, len(p.c) - 1 if p.c else -1)


def _kernel_vector(red, pivots, free_cols, fc, ncols):
    """Back-substitute one kernel vector (free column fc set to 1) over Q(t).

    Works with (num, den) coefficient-tuple pairs and clears denominators at
    the end.
    """
    one = (Fraction(1),)
    val = {j: ((), one) for j in range(ncols)}
    val[fc] = (one, one)
    for pr, pc in reversed(pivots):
        num_acc, den_acc = (), one
        for j in range(pc + 1, ncols):
            vj_num, vj_den = val[j]
            if not vj_num or red[pr][j].is_zero():
                continue
            term_num = _pmul(red[pr][j].coeffs, vj_num)
            num_acc, den_acc = (
                _padd(_pmul(num_acc, vj_den), _pmul(term_num, den_acc)),
                _pmul(den_acc, vj_den),
            )
        if num_acc:
            piv = red[pr][pc].coeffs
            val[pc] = (_pscale(num_acc, Fraction(-1)), _pmul(den_acc, piv))
        else:
            val[pc] = ((), one)
    # common denominator
    lcm = one
    for j in range(ncols):
        _, den = val[j]
        g = _pgcd(lcm, den)
        lcm = _pmul(lcm, _pdivmod(den, g)[0])
    out = []
    for j in range(ncols):
        num, den = val[j]
        mult = _pdivmod(lcm, den)[0]
        out.append(_pmul(num, mult))
    return out


def _primitive_vector(raw_vec) -> tuple[BoundedPoly, ...]:
    """Divide by the polynomial gcd of the entries, normalize scalars."""
    g = ()
    for c in raw_vec:
        g = _pgcd(g, c)
    if g:
        raw_vec = [_pdivmod(c, g)[0] for c in raw_vec]
    # integer-primitive, positive leading coefficient of first nonzero entry
    nums = [c for p in raw_vec for c in p]
    if nums:
        from math import gcd, lcm

        den_lcm = 1
        for c in nums:
            den_lcm = lcm(den_lcm, c.denominator)
        raw_vec = [_pscale(p, Fraction(den_lcm)) for p in raw_vec]
        num_gcd = 0
        for p in raw_vec:
            for c in p:
                num_gcd = gcd(num_gcd, c.numerator)
        if num_gcd > 1:
            raw_vec = [_pscale(p, Fraction(1, num_gcd)) for p in raw_vec]
        for p in raw_vec:
            if p:
                if p[-1] < 0:
                    raw_vec = [_pscale(q, Fraction(-1)) for q in raw_vec]
                break
    return tuple(
        BoundedPoly(p, len(p) - 1 if p else -1) for p in raw_vec
    )
