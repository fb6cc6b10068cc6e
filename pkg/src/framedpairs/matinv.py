"""Invariant theory of tuples of r x r matrices under simultaneous conjugation.

Trace-word invariants, characteristic vectors and their weighted-projective
normalization, nullcone and triangularizability tests, a desk-scale
one-parameter-subgroup checker, and the rank-2 arity-2 generator tuple.

Matrices are tuples of tuples; entries are Fractions for the pure conjugation
problem and may be BoundedPoly for the twisted-endomorphism components fed in
by the Hitchin-map cross-checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .exactcore import BoundedPoly, rational_nth_roots

__all__ = [
    "Word",
    "MatrixTuple",
    "CharVector",
    "OneParamSubgroup",
    "LimitResult",
    "GitStatus",
    "word_list",
    "eval_word",
    "char_vector",
    "char_vector_normalize",
    "char_classes_equal",
    "is_nilpotent_tuple",
    "is_triangularizable",
    "git_status",
    "ops_limit_exists",
    "destabilizing_one_param_subgroup",
    "r2u2_invariants",
    "r2u2_jacobian",
    "invariant_monomials",
    "mat_mul",
    "mat_trace",
    "mat_det",
    "mat_charpoly",
    "mat_rank",
    "mat_kernel",
    "mat_inverse",
    "identity_matrix",
    "conjugate_tuple",
]

WORD_ENUMERATION_CAP = 300000


# ---------------------------------------------------------------------------
# dense rational matrix helpers
# ---------------------------------------------------------------------------


def identity_matrix(r: int):
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(r))
        for i in range(r)
    )


def zero_matrix(r: int, c: Optional[int] = None):
    c = r if c is None else c
    return tuple(tuple(Fraction(0) for _ in range(c)) for _ in range(r))


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum(a[i][x] * b[x][j] for x in range(k)) for j in range(m))
        for i in range(n)
    )


def mat_add(a, b):
    return tuple(
        tuple(a[i][j] + b[i][j] for j in range(len(a[0]))) for i in range(len(a))
    )

def mat_sub(a, b):
    return tuple(
        tuple(a[i][j] - b[i][j] for j in range(len(a[0]))) for i in range(len(a))
    )


def mat_scale(a, s):
    return tuple(tuple(e * s for e in row) for row in a)


def mat_trace(a):
    return sum(a[i][i] for i in range(len(a)))


def mat_is_zero(a) -> bool:
    return all(not e for row in a for e in row)


def mat_det(a) -> Fraction:
    n = len(a)
    m = [list(map(Fraction, row)) for row in a]
    det = Fraction(1)
    for k in range(n):
        piv = None
        for i in range(k, n):
            if m[i][k]:
                piv = i
                break
        if piv is None:
            return Fraction(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        det *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            if m[i][k]:
                f = m[i][k] * inv
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    return det


def mat_charpoly(a) -> list[Fraction]:
    """[c_1,...,c_r] with det(xI - A) = x^r + c_1 x^(r-1) + ... + c_r."""
    r = len(a)
    coeffs = []
    mk = a
    for k in range(1, r + 1):
        ck = -mat_trace(mk) / k
        coeffs.append(ck)
        if k < r:
            mk = mat_mul(a, mat_add(mk, mat_scale(identity_matrix(r), ck)))
    return coeffs


def mat_is_nilpotent(a) -> bool:
    return all(c == 0 for c in mat_charpoly(a))


def _echelon(a):
    """Row echelon over Q; returns (pivot cols, reduced rows)."""
    m = [list(map(Fraction, row)) for row in a]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    piv_cols = []
    pr = 0
    for pc in range(ncols):
        piv = None
        for i in range(pr, nrows):
            if m[i][pc]:
                piv = i
                break
        if piv is None:
            continue
        m[pr], m[piv] = m[piv], m[pr]
        inv = 1 / m[pr][pc]
        m[pr] = [e * inv for e in m[pr]]
        for i in range(nrows):
            if i != pr and m[i][pc]:
                f = m[i][pc]
                m[i] = [e - f * p for e, p in zip(m[i], m[pr])]
        piv_cols.append(pc)
        pr += 1
        if pr == nrows:
            break
    return piv_cols, m


def mat_rank(a) -> int:
    if not a or not a[0]:
        return 0
    return len(_echelon(a)[0])


def mat_kernel(a):
    """Basis of the right kernel over Q, as tuples."""
    piv_cols, red = _echelon(a)
    ncols = len(a[0])
    free = [j for j in range(ncols) if j not in piv_cols]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for pr, pc in zip(range(len(piv_cols)), piv_cols):
            v[pc] = -red[pr][fc]
        basis.append(tuple(v))
    return basis


def mat_image_basis(a):
    """Basis of the column span over Q."""
    piv_cols, _ = _echelon(a)
    return [tuple(row[j] for row in a) for j in piv_cols]


def mat_inverse(a):
    n = len(a)
    aug = [list(map(Fraction, a[i])) + [
        Fraction(1) if i == j else Fraction(0) for j in range(n)
    ] for i in range(n)]
    piv_cols, red = _echelon(aug)
    if piv_cols[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return tuple(tuple(red[i][n:]) for i in range(n))


# ---------------------------------------------------------------------------
# words and matrix tuples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """A nonempty word in letters 1..u, standing for a product of tuple slots."""

    letters: tuple[int, ...]

    def __post_init__(self):
        if len(self.letters) < 1:
            raise ValueError("words must be nonempty")

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        return "".join(f"x{i}" for i in self.letters)


@dataclass(frozen=True)
class MatrixTuple:
    """u square matrices of size r under simultaneous conjugation."""

    r: int
    u: int
    matrices: tuple

    def __post_init__(self):
        if self.u < 1 or self.r < 1:
            raise ValueError("need r >= 1 and u >= 1")
        if len(self.matrices) != self.u:
            raise ValueError(f"expected {self.u} matrices, got {len(self.matrices)}")
        for m in self.matrices:
            if len(m) != self.r or any(len(row) != self.r for row in m):
                raise ValueError("all matrices must be square of size r")

    @classmethod
    def of(cls, *matrices) -> "MatrixTuple":
        mats = tuple(
            tuple(tuple(_coerce_entry(e) for e in row) for row in m) for m in matrices
        )
        return cls(r=len(mats[0]), u=len(mats), matrices=mats)


def _coerce_entry(e):
    if isinstance(e, BoundedPoly):
        return e
    return Fraction(e)


def conjugate_tuple(mt: MatrixTuple, g) -> MatrixTuple:
    """g^-1 . m_i . g for each slot."""
    ginv = mat_inverse(g)
    return MatrixTuple(
        mt.r, mt.u, tuple(mat_mul(ginv, mat_mul(m, g)) for m in mt.matrices)
    )


def word_list(r: int, u: int, cap: int = WORD_ENUMERATION_CAP) -> list[Word]:
    """All nonempty words of length <= r*r, ordered by length then lexicographic."""
    if r < 1 or u < 1:
        raise ValueError("need r >= 1 and u >= 1")
    max_len = r * r
    total = sum(u ** k for k in range(1, max_len + 1))
    if total > cap:
        raise ValueError(
            f"word enumeration would produce {total} words (cap {cap})"
        )
    out = []
    for length in range(1, max_len + 1):
        for letters in itertools.product(range(1, u + 1), repeat=length):
            out.append(Word(letters))
    return out


def eval_word(mt: MatrixTuple, word) -> tuple:
    """The product matrix m_w, substituting m_i for the letter x_i."""
    letters = word.letters if isinstance(word, Word) else tuple(word)
    acc = None
    for i in letters:
        if not (1 <= i <= mt.u):
            raise ValueError(f"letter {i} out of range 1..{mt.u}")
        m = mt.matrices[i - 1]
        acc = m if acc is None else mat_mul(acc, m)
    if acc is None:
        raise ValueError("cannot evaluate the empty word")
    return acc


# ---------------------------------------------------------------------------
# characteristic vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CharVector:
    """epsilon plus all trace-word invariants, with their scaling weights.

    entries[i] is the trace of the i-th word in the canonical enumeration;
    weights[i] is that word's length.  The torus acts by z^weight on each
    slot and by z on epsilon.
    """

    epsilon: object
    entries: tuple
    weights: tuple[int, ...]

    def slots(self):
        yield 1, self.epsilon
        yield from zip(self.weights, self.entries)

    def is_zero(self) -> bool:
        return all(_entry_is_zero(v) for _, v in self.slots())

    def scaled(self, z) -> "CharVector":
        z = Fraction(z)
        return CharVector(
            _entry_scale(self.epsilon, z),
            tuple(_entry_scale(v, z ** w) for w, v in zip(self.weights, self.entries)),
            self.weights,
        )


def _entry_is_zero(v) -> bool:
    if isinstance(v, BoundedPoly):
        return v.is_zero()
    return v == 0


def _entry_scale(v, s: Fraction):
    if isinstance(v, BoundedPoly):
        return v.scale(s)
    return v * s


def _entry_key(v) -> Fraction:
    """The rational the normalization acts on: the value itself, or the
    leading coefficient for polynomial slots."""
    if isinstance(v, BoundedPoly):
        return v.leading_coefficient()
    return Fraction(v)


def char_vector(mt: MatrixTuple, epsilon=Fraction(0)) -> CharVector:
    words = word_list(mt.r, mt.u)
    entries = []
    weights = []
    cache = {(): None}
    for w in words:
        entries.append(_trace_of_word(mt, w, cache))
        weights.append(len(w))
    return CharVector(_coerce_entry(epsilon), tuple(entries), tuple(weights))


def _trace_of_word(mt, word, cache):
    letters = word.letters
    m = cache.get(letters)
    if m is None:
        prefix = cache.get(letters[:-1])
        last = mt.matrices[letters[-1] - 1]
        m = last if prefix is None else mat_mul(prefix, last)
        cache[letters] = m
    return mat_trace(m)


def _factor_int(n: int) -> dict[int, int]:
    """Prime factorization by trial division (desk-scale inputs)."""
    n = abs(n)
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    while p * p <= n:
        for q in (p, p + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        p += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _factor_rational(q: Fraction) -> dict[int, int]:
    f = _factor_int(q.numerator)
    for p, e in _factor_int(q.denominator).items():
        f[p] = f.get(p, 0) - e
    return f


class ZeroVector(ValueError):
    """The characteristic vector vanishes identically (epsilon included)."""


@dataclass(frozen=True)
class NormalizedCharVector:
    vector: CharVector
    exact_unit: bool  # True when the leading slot was scaled exactly to 1


def char_vector_normalize(v: CharVector) -> NormalizedCharVector:
    """Canonical representative of the weighted-projective class under the
    rational rescaling z: slot of weight w scales by z^w.

    Representatives are equal iff the classes agree under rational
    rescaling; ``char_classes_equal`` is the independent cross-check.
    """
    first = None
    for w, val in v.slots():
        if not _entry_is_zero(val):
            first = (w, _entry_key(val))
            break
    if first is None:
        raise ZeroVector("cannot normalize the zero characteristic vector")
    w, key = first
    # reduce every prime exponent of the leading key modulo w
    z = Fraction(1)
    for p, e in _factor_rational(key).items():
        z *= Fraction(p) ** (-(e // w))
    if w % 2 == 1 and key * z ** w < 0:
        z = -z
    out = v.scaled(z)
    # residual stabilizer for even leading weight: z' = -1 flips odd slots
    if w % 2 == 0:
        for ww, val in out.slots():
            if ww % 2 == 1 and not _entry_is_zero(val):
                if _entry_key(val) < 0:
                    out = out.scaled(Fraction(-1))
                break
    lead_val = None
    for ww, val in out.slots():
        if not _entry_is_zero(val):
            lead_val = _entry_key(val)
            break
    return NormalizedCharVector(out, exact_unit=(lead_val == 1))


def char_classes_equal(a: CharVector, b: CharVector) -> bool:
    """Authoritative class-equality test by explicit rational rescaling."""
    if a.weights != b.weights:
        return False
    slots_a = list(a.slots())
    slots_b = list(b.slots())
    lead = None
    for (w, va), (_, vb) in zip(slots_a, slots_b):
        za, zb = _entry_is_zero(va), _entry_is_zero(vb)
        if za != zb:
            return False
        if not za and lead is None:
            lead = (w, va, vb)
    if lead is None:
        return True
    w, va, vb = lead
    ratio = _entry_key(vb) / _entry_key(va)
    for z in rational_nth_roots(ratio, w):
        if all(
            _entries_equal(_entry_scale(x, z ** wx), y)
            for (wx, x), (_, y) in zip(slots_a, slots_b)
        ):
            return True
    return False


def _entries_equal(x, y) -> bool:
    if isinstance(x, BoundedPoly) or isinstance(y, BoundedPoly):
        return isinstance(x, BoundedPoly) and isinstance(y, BoundedPoly) and x == y
    return x == y


# ---------------------------------------------------------------------------
# nullcone, triangularizability, GIT status
# ---------------------------------------------------------------------------


def is_nilpotent_tuple(mt: MatrixTuple) -> bool:
    """True iff every word of length exactly r evaluates to zero,
    equivalently the r-fold tuple composition vanishes."""
    for letters in itertools.product(range(1, mt.u + 1), repeat=mt.r):
        if not mat_is_zero(eval_word(mt, letters)):
            return False
    return True


def is_triangularizable(mt: MatrixTuple) -> bool:
    """McCoy-style criterion: m_w (m_i m_j - m_j m_i) is nilpotent for every
    word w of length <= r^2 (the empty word acting as the identity) and
    every pair i < j.  Single matrices (u = 1) are always triangularizable
    over the algebraic closure."""
    comms = []
    for i in range(mt.u):
        for j in range(i + 1, mt.u):
            c = mat_sub(
                mat_mul(mt.matrices[i], mt.matrices[j]),
                mat_mul(mt.matrices[j], mt.matrices[i]),
            )
            if not mat_is_zero(c):
                comms.append(c)
    if not comms:
        return True
    for c in comms:
        if not mat_is_nilpotent(c):
            return False
    cache = {(): None}
    for w in word_list(mt.r, mt.u):
        letters = w.letters
        prefix = cache.get(letters[:-1])
        last = mt.matrices[letters[-1] - 1]
        mw = last if prefix is None else mat_mul(prefix, last)
        cache[letters] = mw
        for c in comms:
            if not mat_is_nilpotent(mat_mul(mw, c)):
                return False
    return True


class GitStatus:
    STABLE = "stable"
    SEMISTABLE_NOT_STABLE = "semistable_not_stable"
    NULLFORM = "nullform"


def git_status(mt: MatrixTuple) -> str:
    if is_nilpotent_tuple(mt):
        return GitStatus.NULLFORM
    if is_triangularizable(mt):
        return GitStatus.SEMISTABLE_NOT_STABLE
    return GitStatus.STABLE


# ---------------------------------------------------------------------------
# one-parameter subgroups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OneParamSubgroup:
    """A 1-PS of SL_r: a basis change (columns are the basis vectors) and
    ascending integer weights summing to zero."""

    basis_change: tuple
    weights: tuple[int, ...]

    def __post_init__(self):
        ws = self.weights
        if any(ws[i] > ws[i + 1] for i in range(len(ws) - 1)):
            raise ValueError("weights must be ascending")
        if sum(ws) != 0:
            raise ValueError("weights must sum to zero")


@dataclass(frozen=True)
class LimitResult:
    limit: Optional[MatrixTuple]
    drives_to_zero: bool


def ops_limit_exists(mt: MatrixTuple, lam: OneParamSubgroup) -> LimitResult:
    """Conjugate the tuple into lam's basis; entry (i, j) scales by
    z^(w_j - w_i).  The limit as z -> 0 exists iff all entries with
    negative exponent vanish; the limit is zero iff the weight-zero
    entries vanish too."""
    conj = conjugate_tuple(mt, lam.basis_change)
    ws = lam.weights
    limit_mats = []
    drives = True
    for m in conj.matrices:
        lim = []
        for i in range(mt.r):
            row = []
            for j in range(mt.r):
                e = m[i][j]
                expo = ws[j] - ws[i]
                if expo < 0 and not _entry_is_zero(e):
                    return LimitResult(limit=None, drives_to_zero=False)
                if expo == 0:
                    row.append(e)
                    if not _entry_is_zero(e):
                        drives = False
                else:
                    row.append(e.scale(0) if isinstance(e, BoundedPoly) else Fraction(0))
            lim.append(tuple(row))
        limit_mats.append(tuple(lim))
    return LimitResult(
        limit=MatrixTuple(mt.r, mt.u, tuple(limit_mats)), drives_to_zero=drives
    )


def destabilizing_one_param_subgroup(mt: MatrixTuple) -> Optional[OneParamSubgroup]:
    """A 1-PS driving the tuple to zero, built from the common-kernel flag
    K_j = {v : m_w v = 0 for all words of length j}; complete because the
    tuple is a nullform iff that chain exhausts the whole space."""
    r, u = mt.r, mt.u
    chain = []
    prev_dim = 0
    basis_vectors: list[tuple] = []
    for length in range(1, r + 1):
        rows = []
        for letters in itertools.product(range(1, u + 1), repeat=length):
            rows.extend(eval_word(mt, letters))
        kern = mat_kernel(tuple(rows)) if rows else []
        dim = len(kern)
        if dim == prev_dim and dim < r:
            return None
        chain.append(kern)
        prev_dim = dim
        if dim == r:
            break
    if not chain or len(chain[-1]) < r:
        return None
    # adapted basis: extend through the chain, remembering each vector's level
    basis_vectors = []
    block_of = []
    for b, kern in enumerate(chain, start=1):
        for v in kern:
            if mat_rank(tuple(basis_vectors) + (v,)) > len(basis_vectors):
                basis_vectors.append(v)
                block_of.append(b)
    # ascending integer weights by block, recentered to sum zero
    shift = sum(block_of)
    weights = tuple(b * r - shift for b in block_of)
    g = 0
    for w in weights:
        g = gcd(g, abs(w))
    if g > 1:
        weights = tuple(w // g for w in weights)
    if all(w == 0 for w in weights):
        # the zero tuple: any nontrivial 1-PS drives it to zero
        if r == 1:
            return None
        weights = tuple([-(r - 1)] + [1] * (r - 1))
    basis = tuple(zip(*basis_vectors))  # columns are the basis vectors
    return OneParamSubgroup(basis_change=basis, weights=weights)


# ---------------------------------------------------------------------------
# the r = 2 = u generators and invariant monomials
# ---------------------------------------------------------------------------


def r2u2_invariants(mt: MatrixTuple):
    """(tr m1, det m1, tr m2, det m2, tr m1 m2) for a pair of 2x2 matrices."""
    if mt.r != 2 or mt.u != 2:
        raise ValueError(f"expected r=2, u=2, got r={mt.r}, u={mt.u}")
    m1, m2 = mt.matrices
    return (
        mat_trace(m1),
        mat_det(m1),
        mat_trace(m2),
        mat_det(m2),
        mat_trace(mat_mul(m1, m2)),
    )


def r2u2_jacobian(mt: MatrixTuple):
    """Exact 5x8 Jacobian of the generator tuple at mt, rows in the order of
    r2u2_invariants, columns in the order (m1_11, m1_12, m1_21, m1_22,
    m2_11, ..., m2_22)."""
    if mt.r != 2 or mt.u != 2:
        raise ValueError("expected r=2, u=2")
    (a, b), (c, d) = mt.matrices[0]
    (e, f), (g, h) = mt.matrices[1]
    zero = Fraction(0)
    one = Fraction(1)
    rows = [
        (one, zero, zero, one, zero, zero, zero, zero),          # tr m1
        (d, -c, -b, a, zero, zero, zero, zero),                  # det m1
        (zero, zero, zero, zero, one, zero, zero, one),          # tr m2
        (zero, zero, zero, zero, h, -g, -f, e),                  # det m2
        (e, g, f, h, a, c, b, d),                                # tr m1 m2
    ]
    return tuple(rows)


def invariant_monomials(weights: Sequence[int], max_total_degree: int):
    """All nonzero exponent vectors e >= 0 with sum(e) <= max_total_degree
    and sum(e_i * weights_i) == 0."""
    n = len(weights)
    out = []

    def rec(i, left, acc, wsum):
        if i == n:
            if wsum == 0 and any(acc):
                out.append(tuple(acc))
            return
        for e in range(left + 1):
            acc.append(e)
            rec(i + 1, left - e, acc, wsum + e * weights[i])
            acc.pop()

    rec(0, max_total_degree, [], 0)
    return out
