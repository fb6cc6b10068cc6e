"""Vector bundles on the projective line and exact subsheaf machinery.

A bundle is a descending splitting type (a_1 >= ... >= a_r); a sheaf map is
a matrix of degree-bounded polynomials; subsheaves are full-column-rank
polynomial inclusions with explicit twists.  Saturation is checked at every
point including infinity (via the homogeneous degree bounds), so degrees of
kernels and saturations are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exactcore import BoundedPoly, PolyMatrix, _pdivmod, _pgcd, _pmul, _trim
from .matinv import mat_kernel, mat_rank

__all__ = [
    "BundleP1",
    "SheafMap",
    "Subsheaf",
    "FramedHitchinPair",
    "InvariantLines",
    "ImageKernel",
    "ZeroMap",
    "hilbert_poly",
    "hilbert_coeffs",
    "compose",
    "compose_twisted",
    "kernel_filtration",
    "phi_is_nilpotent",
    "saturate",
    "invariant_line_subbundles",
    "image_and_kernel",
    "mu_max_min",
    "line_subsheaf",
    "saturated_line_of_degree",
    "saturated_line_degrees_exist",
    "invariance_residual",
    "transform_pair",
]


class ZeroMap(ValueError):
    """An operation that needs a nonzero map received the zero map."""


@dataclass(frozen=True)
class BundleP1:
    """A vector bundle on P^1 as its descending splitting type."""

    splitting: tuple[int, ...]

    def __post_init__(self):
        if not self.splitting:
            raise ValueError("a bundle needs positive rank")
        s = tuple(int(a) for a in self.splitting)
        if any(s[i] < s[i + 1] for i in range(len(s) - 1)):
            raise ValueError(f"splitting type must be descending: {s}")
        object.__setattr__(self, "splitting", s)

    @property
    def rank(self) -> int:
        return len(self.splitting)

    @property
    def degree(self) -> int:
        return sum(self.splitting)

    def slope(self) -> Fraction:
        return Fraction(self.degree, self.rank)

    def twist(self, k: int) -> "BundleP1":
        return BundleP1(tuple(a + k for a in self.splitting))

    def __repr__(self):
        return "O(" + ")+O(".join(str(a) for a in self.splitting) + ")"


def hilbert_poly(E: BundleP1, n: int) -> Fraction:
    """chi(E(n)) = d + r(n+1) on the projective line."""
    return Fraction(E.degree + E.rank * (n + 1))


def hilbert_coeffs(E: BundleP1) -> tuple[Fraction, Fraction]:
    """(slope coefficient, constant term): P(n) = r*n + (d + r)."""
    return Fraction(E.rank), Fraction(E.degree + E.rank)


def mu_max_min(E: BundleP1) -> tuple[int, int]:
    """(mu_max, mu_min) of the Harder-Narasimhan data; on P^1 these are the
    extreme summand degrees."""
    return E.splitting[0], E.splitting[-1]


class SheafMap:
    """A morphism E -> F(twist) between bundles on P^1.

    Entry (i, j) is a section of O(F_i + twist - E_j); negative bound forces
    the zero entry.
    """

    __slots__ = ("source", "target", "twist", "matrix")

    def __init__(self, source: BundleP1, target: BundleP1, twist: int, matrix: PolyMatrix):
        if twist < 0:
            raise ValueError("negative twisting line bundles are rejected")
        if matrix.rows != target.rank or matrix.cols != source.rank:
            raise ValueError(
                f"matrix is {matrix.rows}x{matrix.cols}, expected "
                f"{target.rank}x{source.rank}"
            )
        for i in range(target.rank):
            for j in range(source.rank):
                want = target.splitting[i] + twist - source.splitting[j]
                e = matrix[i, j]
                if want < 0:
                    if not e.is_zero():
                        raise ValueError(
                            f"entry ({i},{j}) must vanish (bound {want} < 0)"
                        )
                elif e.bound != want:
                    raise ValueError(
                        f"entry ({i},{j}) carries bound {e.bound}, expected {want}"
                    )
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "twist", twist)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, *a):
        raise AttributeError("SheafMap is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_coeffs(cls, source: BundleP1, target: BundleP1, twist: int, rows) -> "SheafMap":
        """rows[i][j] is an ascending coefficient list (or a BoundedPoly)."""
        ents = []
        for i in range(target.rank):
            row = []
            for j in range(source.rank):
                bound = max(target.splitting[i] + twist - source.splitting[j], -1)
                raw = rows[i][j]
                coeffs = raw.coeffs if isinstance(raw, BoundedPoly) else raw
                row.append(BoundedPoly(coeffs, bound))
            ents.append(row)
        return cls(source, target, twist, PolyMatrix(ents))

    @classmethod
    def zero(cls, source: BundleP1, target: BundleP1, twist: int = 0) -> "SheafMap":
        return cls.from_coeffs(
            source, target, twist, [[()] * source.rank for _ in range(target.rank)]
        )

    @classmethod
    def identity(cls, E: BundleP1) -> "SheafMap":
        return cls.from_coeffs(
            E, E, 0,
            [[(1,) if i == j else () for j in range(E.rank)] for i in range(E.rank)],
        )

    @classmethod
    def scalar(cls, E: BundleP1, c: BoundedPoly) -> "SheafMap":
        """c * id : E -> E(bound of c)."""
        ell = c.bound
        rows = [
            [c if i == j else BoundedPoly.zero(ell) for j in range(E.rank)]
            for i in range(E.rank)
        ]
        return cls(E, E, ell, PolyMatrix(rows))

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def entry(self, i: int, j: int) -> BoundedPoly:
        return self.matrix[i, j]

    def rank_generic(self) -> int:
        return self.matrix.rank()

    def det(self) -> BoundedPoly:
        return self.matrix.det()

    def trace(self) -> BoundedPoly:
        if self.source.splitting != self.target.splitting:
            raise ValueError("trace needs an endomorphism")
        return self.matrix.trace()

    def __eq__(self, other):
        return (
            isinstance(other, SheafMap)
            and self.source == other.source
            and self.target == other.target
            and self.twist == other.twist
            and self.matrix == other.matrix
        )

    def __hash__(self):
        return hash((self.source, self.target, self.twist, self.matrix))

    def __repr__(self):
        return f"SheafMap({self.source} -> {self.target}({self.twist}))"

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "SheafMap") -> "SheafMap":
        if (self.source, self.target, self.twist) != (other.source, other.target, other.twist):
            raise ValueError("can only add maps with the same source/target/twist")
        return SheafMap(self.source, self.target, self.twist, self.matrix + other.matrix)

    def __sub__(self, other: "SheafMap") -> "SheafMap":
        return self + other.scale(Fraction(-1))

    def scale(self, s) -> "SheafMap":
        return SheafMap(self.source, self.target, self.twist, self.matrix.scale(s))

    def scale_poly(self, c: BoundedPoly) -> "SheafMap":
        """Multiply by a section of O(c.bound); raises the twist."""
        return SheafMap(
            self.source, self.target, self.twist + c.bound, self.matrix.scale_poly(c)
        )

    def twist_by(self, k: int) -> "SheafMap":
        """The same matrix viewed as E(k) -> F(twist + k)."""
        return SheafMap(self.source.twist(k), self.target.twist(k), self.twist, self.matrix)


def compose(g: SheafMap, f: SheafMap) -> SheafMap:
    """g o f, with g implicitly twisted by f's twist: the result maps
    f.source -> g.target(f.twist + g.twist)."""
    if g.source.splitting != f.target.splitting:
        raise ValueError(
            f"cannot compose: {f.target} feeds into {g.source}"
        )
    return SheafMap(
        f.source,
        g.target,
        f.twist + g.twist,
        g.matrix * f.matrix,
    )


def compose_twisted(phi: SheafMap, k: int) -> SheafMap:
    """The k-fold twisted self-composition of a twisted endomorphism."""
    if phi.source.splitting != phi.target.splitting:
        raise ValueError("compose_twisted needs a twisted endomorphism")
    if k < 1:
        raise ValueError("k must be at least 1")
    acc = phi
    for _ in range(k - 1):
        acc = compose(phi, acc)
    return acc


# ---------------------------------------------------------------------------
# subsheaves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subsheaf:
    """A subsheaf of a bundle, as a full-column-rank polynomial inclusion.

    Column j is a map O(twists[j]) -> ambient; entry (i, j) is bounded by
    ambient.splitting[i] - twists[j].  The degree of the subsheaf itself is
    the sum of the twists (the inclusion is injective as a sheaf map).
    """

    ambient: BundleP1
    columns: tuple  # tuple of columns; each column is a tuple of BoundedPoly
    twists: tuple[int, ...]
    saturated: bool

    def __post_init__(self):
        if not self.columns:
            raise ValueError("a subsheaf needs at least one column")
        for col, c in zip(self.columns, self.twists):
            if len(col) != self.ambient.rank:
                raise ValueError("column length must match ambient rank")
            for i, e in enumerate(col):
                want = self.ambient.splitting[i] - c
                if want < 0 and not e.is_zero():
                    raise ValueError("column entry exceeds its bound")
                if not e.is_zero() and e.degree() > want:
                    raise ValueError("column entry exceeds its bound")
        if self.as_matrix().rank() != len(self.columns):
            raise ValueError("inclusion must be injective over Q(t)")

    @property
    def rank(self) -> int:
        return len(self.columns)

    @property
    def degree(self) -> int:
        return sum(self.twists)

    def slope(self) -> Fraction:
        return Fraction(self.degree, self.rank)

    def splitting(self) -> tuple[int, ...]:
        return tuple(sorted(self.twists, reverse=True))

    def as_bundle(self) -> BundleP1:
        return BundleP1(self.splitting())

    def inclusion_map(self) -> SheafMap:
        order = sorted(range(self.rank), key=lambda j: -self.twists[j])
        src = BundleP1(tuple(self.twists[j] for j in order))
        ents = [
            [self.columns[j][i].with_bound(self.ambient.splitting[i] - self.twists[j])
             for j in order]
            for i in range(self.ambient.rank)
        ]
        return SheafMap(src, self.ambient, 0, PolyMatrix(ents))

    def as_matrix(self) -> PolyMatrix:
        return PolyMatrix(
            [
                [self.columns[j][i] for j in range(self.rank)]
                for i in range(self.ambient.rank)
            ]
        )

    def contains_vector(self, col) -> bool:
        """Whether a polynomial column lies in this (saturated) subsheaf.

        For a saturated subsheaf the quotient is a bundle, so membership is
        the generic-rank test.
        """
        if not self.saturated:
            raise ValueError("containment test requires a saturated subsheaf")
        rows = []
        for i in range(self.ambient.rank):
            rows.append([self.columns[j][i] for j in range(self.rank)] + [col[i]])
        m = PolyMatrix(rows)
        return m.rank() == self.rank

    def contains(self, other: "Subsheaf") -> bool:
        return all(self.contains_vector(col) for col in other.columns)

    def same_subsheaf(self, other: "Subsheaf") -> bool:
        """Equality as saturated subsheaves of the same ambient bundle."""
        if self.ambient != other.ambient or self.rank != other.rank:
            return False
        return self.contains(other) and other.contains(self)

    def is_phi_invariant(self, phi: SheafMap) -> bool:
        """phi(F) <= F tensor O(ell), decided exactly."""
        if not self.saturated:
            return saturate(self).is_phi_invariant(phi)
        for col in self.columns:
            img = _apply_map(phi, col)
            if not self.contains_vector(img):
                return False
        return True


def _apply_map(f: SheafMap, col):
    """Apply a sheaf map to a column of polynomials."""
    out = []
    for i in range(f.target.rank):
        acc = None
        for j in range(f.source.rank):
            term = f.matrix[i, j] * col[j]
            acc = term if acc is None else _raw_add(acc, term)
        out.append(acc)
    return tuple(out)


def _raw_add(a: BoundedPoly, b: BoundedPoly) -> BoundedPoly:
    """Add ignoring bound mismatch (keep the larger bound)."""
    if a.bound == b.bound:
        return a + b
    bound = max(a.bound, b.bound)
    return a.with_bound(bound) + b.with_bound(bound)


def line_subsheaf(E: BundleP1, twist: int, coeff_lists) -> Subsheaf:
    """A rank-1 subsheaf O(twist) -> E from ascending coefficient lists."""
    col = tuple(
        BoundedPoly(cs, max(E.splitting[i] - twist, -1))
        for i, cs in enumerate(coeff_lists)
    )
    if all(e.is_zero() for e in col):
        raise ValueError("the zero column is not a subsheaf inclusion")
    sub = Subsheaf(E, (col,), (twist,), saturated=False)
    sat = saturate(sub)
    if sat.twists == (twist,):
        return sat
    return sub


def saturated_line_degrees_exist(E: BundleP1, c: int) -> bool:
    """Whether E admits a saturated line subbundle of degree exactly c.

    On P^1 with splitting (a_1 >= ... >= a_r): any c <= a_2 works (mix two
    summands), as do the summand degrees themselves.
    """
    if E.rank == 1:
        return c == E.splitting[0]
    return c <= E.splitting[1] or c in E.splitting


def saturated_line_of_degree(E: BundleP1, c: int) -> Subsheaf:
    """A canonical saturated line subbundle of degree c (rank 2 ambient)."""
    if E.rank == 1:
        if c != E.splitting[0]:
            raise ValueError("rank-1 bundle has only itself as a line subbundle")
        return line_subsheaf(E, c, [(1,)])
    a1, a2 = E.splitting[0], E.splitting[1]
    if c == a1:
        cols = [(1,)] + [()] * (E.rank - 1)
        return line_subsheaf(E, c, cols)
    if c > a2:
        raise ValueError(f"no saturated line subbundle of degree {c} in {E}")
    cols = [(1,), tuple([0] * (a2 - c) + [1])] + [()] * (E.rank - 2)
    return line_subsheaf(E, c, cols)


# ---------------------------------------------------------------------------
# saturation
# ---------------------------------------------------------------------------


def saturate(S: Subsheaf) -> Subsheaf:
    """The minimal subbundle containing S; degree never decreases.

    Rank 1: divide the column by its affine content and raise the twist by
    the common vanishing order at infinity.  Higher rank: a Smith-style
    affine saturation followed by column reduction at infinity.
    """
    if S.saturated:
        return S
    if S.rank == 1:
        return _saturate_line(S)
    if S.rank == S.ambient.rank:
        # a full-rank subsheaf saturates to the whole bundle
        cols = tuple(
            tuple(
                BoundedPoly((1,) if i == j else (), max(0 if i == j else -1, -1))
                for i in range(S.ambient.rank)
            )
            for j in range(S.ambient.rank)
        )
        return Subsheaf(S.ambient, cols, S.ambient.splitting, saturated=True)
    raw_cols = [[e.coeffs for e in col] for col in S.columns]
    sat_cols = _module_saturation_affine(raw_cols, S.ambient.rank)
    cols, twists = _assign_twists(S.ambient, sat_cols)
    cols, twists = _saturate_at_infinity(S.ambient, cols, twists)
    order = sorted(range(len(cols)), key=lambda j: -twists[j])
    return Subsheaf(
        S.ambient,
        tuple(_bounded_column(S.ambient, cols[j], twists[j]) for j in order),
        tuple(twists[j] for j in order),
        saturated=True,
    )


def _saturate_line(S: Subsheaf) -> Subsheaf:
    col = S.columns[0]
    c = S.twists[0]
    g = ()
    for e in col:
        g = _pgcd(g, e.coeffs)
    div = [(_pdivmod(e.coeffs, g)[0] if e.coeffs else ()) for e in col]
    inf = min(
        (S.ambient.splitting[i] - c - (len(p) - 1) - (len(g) - 1)
         for i, p in enumerate(div) if p),
    )
    c_new = c + (len(g) - 1) + inf
    new_col = tuple(
        BoundedPoly(p, max(S.ambient.splitting[i] - c_new, -1))
        for i, p in enumerate(div)
    )
    return Subsheaf(S.ambient, (new_col,), (c_new,), saturated=True)


def _bounded_column(E: BundleP1, raw_col, twist: int):
    return tuple(
        BoundedPoly(p, max(E.splitting[i] - twist, -1)) for i, p in enumerate(raw_col)
    )


def _assign_twists(E: BundleP1, raw_cols):
    """Maximal twist per column: c_j = min over nonzero entries of
    (a_i - deg entry)."""
    cols, twists = [], []
    for col in raw_cols:
        c = min(
            E.splitting[i] - (len(p) - 1) for i, p in enumerate(col) if p
        )
        cols.append(list(col))
        twists.append(c)
    return cols, twists


def _module_saturation_affine(raw_cols, r: int):
    """Saturate the Q[t]-module spanned by the columns (affine points only).

    Computed as the kernel module of the left annihilator: kernel modules
    over a PID are saturated.  Falls back to the columns themselves when
    they already span a free summand (k == r).
    """
    k = len(raw_cols)
    if k >= r:
        return raw_cols
    # left annihilator over Q(t): kernel of the transpose
    mat = PolyMatrix(
        [
            [BoundedPoly(raw_cols[j][i], len(raw_cols[j][i]) - 1 if raw_cols[j][i] else -1)
             for j in range(k)]
            for i in range(r)
        ]
    )
    ann = mat.transpose().kernel_basis()  # rows annihilating the columns
    if not ann:
        return raw_cols
    q_rows = [[e.coeffs for e in v] for v in ann]
    kern = _smith_kernel(q_rows, r)
    assert len(kern) == k, "saturation must preserve the rank"
    return kern


def _smith_kernel(q_rows, ncols: int):
    """Basis of the kernel module {v in Q[t]^ncols : Qv = 0} via
    diagonalization with tracked column operations."""
    m = [list(row) for row in q_rows]
    nrows = len(m)
    v = [
        [((Fraction(1),) if i == j else ()) for j in range(ncols)]
        for i in range(ncols)
    ]

    def col_op(j, jq, quo):  # col_j -= quo * col_jq
        for i in range(nrows):
            m[i][j] = _trim(_padd_raw(m[i][j], _pmul(quo, m[i][jq]), neg=True))
        for i in range(ncols):
            v[i][j] = _trim(_padd_raw(v[i][j], _pmul(quo, v[i][jq]), neg=True))

    def swap_cols(a, b):
        for i in range(nrows):
            m[i][a], m[i][b] = m[i][b], m[i][a]
        for i in range(ncols):
            v[i][a], v[i][b] = v[i][b], v[i][a]

    p = 0
    dim = min(nrows, ncols)
    while p < dim:
        best = None
        for i in range(p, nrows):
            for j in range(p, ncols):
                if m[i][j]:
                    if best is None or len(m[i][j]) < len(m[best[0]][best[1]]):
                        best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != p:
            m[p], m[bi] = m[bi], m[p]
        if bj != p:
            swap_cols(p, bj)
        dirty = False
        for i in range(p + 1, nrows):
            if m[i][p]:
                quo, rem = _pdivmod(m[i][p], m[p][p])
                if quo:
                    m[i] = [
                        _trim(_padd_raw(m[i][j], _pmul(quo, m[p][j]), neg=True))
                        for j in range(ncols)
                    ]
                if rem:
                    dirty = True
        for j in range(p + 1, ncols):
            if m[p][j]:
                quo, rem = _pdivmod(m[p][j], m[p][p])
                if quo:
                    col_op(j, p, quo)
                if rem:
                    dirty = True
        if dirty:
            continue
        p += 1
    kernel_cols = []
    for j in range(ncols):
        if all(not m[i][j] for i in range(nrows)):
            kernel_cols.append([v[i][j] for i in range(ncols)])
    return kernel_cols


def _padd_raw(a, b, neg=False):
    if neg:
        b = tuple(-c for c in b)
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return out


def _saturate_at_infinity(E: BundleP1, cols, twists):
    """Column reduction at infinity: while the top-degree evaluation matrix
    is column-degenerate, replace a minimal-twist column by the degree-
    raised combination.  Each step raises one twist by >= 1."""
    k = len(cols)
    while True:
        h_rows = []
        for i in range(E.rank):
            row = []
            for j in range(k):
                p = cols[j][i]
                want = E.splitting[i] - twists[j]
                row.append(p[want] if 0 <= want < len(p) else Fraction(0))
            h_rows.append(tuple(row))
        if mat_rank(tuple(h_rows)) == k:
            return cols, twists
        mu = mat_kernel(tuple(h_rows))[0]
        support = [j for j in range(k) if mu[j]]
        cmin = min(twists[j] for j in support)
        jstar = next(j for j in support if twists[j] == cmin)
        new_col = [()] * E.rank
        for j in support:
            shift = twists[j] - cmin
            for i in range(E.rank):
                term = _pmul(cols[j][i], (Fraction(0),) * shift + (mu[j],))
                new_col[i] = _trim(_padd_raw(new_col[i], term))
        # the combination vanishes at infinity to some order e >= 1
        e = min(
            (E.splitting[i] - cmin) - (len(p) - 1)
            for i, p in enumerate(new_col)
            if p
        )
        assert e >= 1, "infinity reduction must raise the twist"
        cols[jstar] = [tuple(p) for p in new_col]
        twists[jstar] = cmin + e


# ---------------------------------------------------------------------------
# kernels and filtrations
# ---------------------------------------------------------------------------


def sheaf_kernel(f: SheafMap) -> Optional[Subsheaf]:
    """The kernel subbundle (saturated), or None when f is generically
    injective."""
    k = f.source.rank - f.matrix.rank()
    if k == 0:
        return None
    basis = f.matrix.kernel_basis()
    raw_cols = [[e.coeffs for e in vec] for vec in basis]
    sat_cols = _module_saturation_affine(raw_cols, f.source.rank)
    cols, twists = _assign_twists(f.source, sat_cols)
    cols, twists = _saturate_at_infinity(f.source, cols, twists)
    order = sorted(range(len(cols)), key=lambda j: -twists[j])
    return Subsheaf(
        f.source,
        tuple(_bounded_column(f.source, cols[j], twists[j]) for j in order),
        tuple(twists[j] for j in order),
        saturated=True,
    )


def kernel_filtration(phi: SheafMap) -> list[Subsheaf]:
    """Saturated kernels F_i of the i-fold twisted compositions, up to
    stabilization; ranks strictly increase and the chain has length <= r."""
    E = phi.source
    out: list[Subsheaf] = []
    prev_rank = 0
    power = None
    for i in range(1, E.rank + 1):
        power = phi if power is None else compose(phi, power)
        ker = sheaf_kernel(power)
        if ker is None:
            break
        if ker.rank == prev_rank:
            break
        assert ker.rank > prev_rank
        out.append(ker)
        prev_rank = ker.rank
        if prev_rank == E.rank:
            break
    return out


def phi_is_nilpotent(phi: SheafMap) -> bool:
    filt = kernel_filtration(phi)
    return bool(filt) and filt[-1].rank == phi.source.rank


# ---------------------------------------------------------------------------
# invariant line subbundles (rank 2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantLines:
    """Result of enumerating phi-invariant line subbundles of a rank-2 bundle.

    ``central`` marks phi = c * id, where every line subbundle is invariant.
    ``complete_over_Q`` is False exactly when eigenlines exist only over a
    quadratic extension of Q(t) (non-square discriminant).
    """

    central: bool
    central_scalar: Optional[BoundedPoly]
    lines: tuple[Subsheaf, ...]
    complete_over_Q: bool
    discriminant: Optional[BoundedPoly]


def invariant_line_subbundles(phi: SheafMap) -> InvariantLines:
    E = phi.source
    if E.rank != 2:
        raise ValueError("invariant-line enumeration is implemented for rank 2")
    if phi.source.splitting != phi.target.splitting:
        raise ValueError("phi must be a twisted endomorphism")
    tr = phi.trace()
    half_tr = tr.divide_scalar(2)
    central_cand = phi - SheafMap.scalar(E, half_tr)
    if central_cand.is_zero():
        return InvariantLines(
            central=True,
            central_scalar=half_tr,
            lines=(),
            complete_over_Q=True,
            discriminant=BoundedPoly.zero(2 * phi.twist),
        )
    det = phi.det()
    disc = tr * tr - det.scale(4)
    delta = disc.sqrt()
    if delta is None:
        return InvariantLines(
            central=False,
            central_scalar=None,
            lines=(),
            complete_over_Q=False,
            discriminant=disc,
        )
    eigenvalues = [half_tr + delta.divide_scalar(2)]
    if not delta.is_zero():
        eigenvalues.append(half_tr - delta.divide_scalar(2))
    lines = []
    for lam in eigenvalues:
        ker = sheaf_kernel(phi - SheafMap.scalar(E, lam))
        assert ker is not None and ker.rank == 1
        lines.append(ker)
    return InvariantLines(
        central=False,
        central_scalar=None,
        lines=tuple(lines),
        complete_over_Q=True,
        discriminant=disc,
    )


def invariance_residual(phi: SheafMap, line: Subsheaf) -> BoundedPoly:
    """det[phi(v) | v] for the line's inclusion vector v: zero iff the line
    is phi-invariant (rank-2 ambient)."""
    if phi.source.rank != 2 or line.rank != 1:
        raise ValueError("residual is defined for lines in rank-2 bundles")
    v = line.columns[0]
    w = _apply_map(phi, v)
    return _raw_mul_sub(w[0], v[1], w[1], v[0])


def _raw_mul_sub(a, b, c, d) -> BoundedPoly:
    """a*b - c*d with bound reconciliation."""
    x = a * b
    y = c * d
    return _raw_add(x, y.scale(-1))


# ---------------------------------------------------------------------------
# framings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImageKernel:
    kernel: Optional[Subsheaf]
    image_degree: int
    div_degree: Optional[int]  # deg D for a rank-1 framing target O(m0)


def image_and_kernel(psi: SheafMap) -> ImageKernel:
    """Saturated kernel and image-degree data of a nonzero framing."""
    if psi.is_zero():
        raise ZeroMap("the framing is the zero map")
    ker = sheaf_kernel(psi)
    ker_deg = ker.degree if ker is not None else 0
    image_degree = psi.source.degree - ker_deg
    div_degree = None
    if psi.target.rank == 1 and psi.matrix.rank() == 1:
        div_degree = psi.target.splitting[0] - image_degree
        assert div_degree >= 0, "image of psi must sit inside the framing target"
    return ImageKernel(kernel=ker, image_degree=image_degree, div_degree=div_degree)


# ---------------------------------------------------------------------------
# framed Hitchin pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FramedHitchinPair:
    """(E, epsilon, phi, psi) with framing target H and twisting line O(ell).

    Shape invariants are enforced here.  The definitional exclusions (psi
    nonzero for framed pairs; phi non-nilpotent when epsilon = 0) are
    exposed through ``is_admissible`` so that classification sweeps can
    score degenerate inputs instead of crashing; oriented pairs may carry
    psi = 0 legitimately.
    """

    E: BundleP1
    epsilon: Fraction
    phi: SheafMap
    psi: SheafMap
    H: BundleP1
    ell: int

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.phi.source != self.E or self.phi.target != self.E:
            raise ValueError("phi must be an endomorphism of E")
        if self.phi.twist != self.ell:
            raise ValueError(f"phi must be twisted by ell = {self.ell}")
        if self.ell < 0:
            raise ValueError("ell must be nonnegative")
        if self.psi.source != self.E or self.psi.target != self.H:
            raise ValueError("psi must map E to H")
        if self.psi.twist != 0:
            raise ValueError("psi is untwisted")

    @classmethod
    def make(cls, E_splitting, epsilon, phi_rows, psi_rows, H_splitting, ell) -> "FramedHitchinPair":
        E = BundleP1(tuple(E_splitting))
        H = BundleP1(tuple(H_splitting))
        phi = SheafMap.from_coeffs(E, E, ell, phi_rows)
        psi = SheafMap.from_coeffs(E, H, 0, psi_rows)
        return cls(E=E, epsilon=Fraction(epsilon), phi=phi, psi=psi, H=H, ell=ell)

    def is_admissible(self, *, require_framing: bool = True) -> bool:
        if require_framing and self.psi.is_zero():
            return False
        if self.epsilon == 0 and phi_is_nilpotent(self.phi):
            return False
        return True

    def scaled(self, z, lam=Fraction(1)) -> "FramedHitchinPair":
        """(epsilon, phi) -> (z epsilon, z phi); psi -> lam psi."""
        return FramedHitchinPair(
            E=self.E,
            epsilon=self.epsilon * Fraction(z),
            phi=self.phi.scale(z),
            psi=self.psi.scale(lam),
            H=self.H,
            ell=self.ell,
        )

    def kernel_of_framing(self) -> Optional[Subsheaf]:
        if self.psi.is_zero():
            return None
        return sheaf_kernel(self.psi)


def transform_pair(pair: FramedHitchinPair, rho: SheafMap) -> FramedHitchinPair:
    """Push the pair along a bundle automorphism rho of E:
    phi -> rho phi rho^-1, psi -> psi rho^-1."""
    rho_inv = _invert_automorphism(rho)
    new_phi = compose(compose(rho, pair.phi), rho_inv)
    new_psi = compose(pair.psi, rho_inv)
    return FramedHitchinPair(
        E=pair.E, epsilon=pair.epsilon, phi=new_phi, psi=new_psi,
        H=pair.H, ell=pair.ell,
    )


def _invert_automorphism(rho: SheafMap) -> SheafMap:
    """Inverse of a bundle automorphism (constant nonzero determinant)."""
    if rho.source.splitting != rho.target.splitting:
        raise ValueError("automorphism must preserve the splitting type")
    det = rho.det()
    if det.is_zero() or not det.is_constant():
        raise ValueError("not an automorphism: determinant is not a nonzero constant")
    r = rho.source.rank
    if r == 1:
        inv_entry = BoundedPoly.const(1 / det.coefficient(0), 0)
        return SheafMap(rho.source, rho.source, 0, PolyMatrix([[inv_entry]]))
    det0 = det.coefficient(0)
    cof_rows = []
    for i in range(r):
        row = []
        for j in range(r):
            minor_rows = [
                [rho.matrix[a, b] for b in range(r) if b != i]
                for a in range(r) if a != j
            ]
            minor = PolyMatrix(minor_rows).det()
            sign = -1 if (i + j) % 2 else 1
            want = max(rho.source.splitting[i] - rho.source.splitting[j], -1)
            row.append(BoundedPoly(minor.scale(Fraction(sign) / det0).coeffs, want))
        cof_rows.append(row)
    return SheafMap(rho.source, rho.source, 0, PolyMatrix(cof_rows))
