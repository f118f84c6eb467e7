"""Laurent (trigonometric) polynomials with exact coefficients.

A LaurentPoly represents t(xi) = sum_k h_k e^{2 pi i (k, xi)} as a finite
map from integer offsets k in Z^d to exact scalars. The algebra here
(products, modulation, linear substitution, conjugate-reflection, moments,
polyphase split/merge) is the substrate for every mask and frame
construction in the package.

Polyphase components use the SCALED convention throughout: the component
nu_k of t for digit s_k has coefficient m * h_{M beta + s_k} at beta, and

    t(xi) = (1/m) * sum_k e^{2 pi i (s_k, xi)} nu_k(M* xi).

With this scaling an interpolatory mask has nu_0 = 1 and every identity in
the construction pipeline stays inside Q (or Q(zeta)); no square roots of m
ever appear.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import comb, gcd
from typing import Tuple

from .exact import (
    Cyclotomic,
    conj as scalar_conj,
    format_scalar,
    parse_scalar,
    to_complex,
    zeta,
)
from .lattice import DigitSystem

__all__ = [
    "LaurentPoly",
    "PolyphaseRow",
    "polyphase_split",
    "polyphase_merge",
    "lower_set",
    "mi_binom",
    "mi_leq",
    "vec_pow",
    "parse_table",
    "format_table",
]


# ---------------------------------------------------------------------------
# multi-index helpers (shared by masks, frames, verify)
# ---------------------------------------------------------------------------

def lower_set(n: int, d: int):
    """Delta_n = {alpha in Z^d_+ : |alpha| < n} in graded lexicographic order."""
    out = []
    for total in range(n):
        out.extend(_compositions(total, d))
    return out


def _compositions(total, d):
    if d == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, d - 1):
            out.append((first,) + rest)
    return out


def mi_leq(alpha, beta):
    return all(a <= b for a, b in zip(alpha, beta))


def mi_binom(beta, alpha):
    """Product of componentwise binomial coefficients."""
    return reduce(lambda acc, ab: acc * comb(ab[0], ab[1]), zip(beta, alpha), 1)


def vec_pow(v, alpha):
    """v^alpha = prod v_j^alpha_j with the 0^0 = 1 convention."""
    out = Fraction(1)
    for x, a in zip(v, alpha):
        if a:
            out *= Fraction(x) ** a
    return out


def _norm_scalar(v):
    if isinstance(v, int):
        return Fraction(v)
    return v


# ---------------------------------------------------------------------------
# the polynomial type
# ---------------------------------------------------------------------------

class LaurentPoly:
    """Finite exact coefficient map k -> h_k; zero coefficients never stored."""

    __slots__ = ("dimension", "_c")

    def __init__(self, dimension, terms=None):
        self.dimension = int(dimension)
        c = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for k, v in items:
                k = tuple(int(x) for x in k)
                if len(k) != self.dimension:
                    raise ValueError(f"offset {k} has wrong dimension")
                v = _norm_scalar(v)
                if v != 0:
                    cur = c.get(k)
                    v = v if cur is None else cur + v
                    if v != 0:
                        c[k] = v
                    elif k in c:
                        del c[k]
        self._c = c

    @classmethod
    def one(cls, d):
        return cls(d, {(0,) * d: Fraction(1)})

    @classmethod
    def delta(cls, d, k=None, value=Fraction(1)):
        k = (0,) * d if k is None else tuple(k)
        return cls(d, {k: value})

    # -- inspection ---------------------------------------------------------

    def coeff(self, k):
        return self._c.get(tuple(k), Fraction(0))

    def terms(self):
        """Coefficient items in the canonical (sorted-offset) order."""
        return [(k, self._c[k]) for k in sorted(self._c)]

    def support(self):
        return sorted(self._c)

    def is_zero(self):
        return not self._c

    def __len__(self):
        return len(self._c)

    def __repr__(self):
        inner = ", ".join(f"{k}: {format_scalar(v)}" for k, v in self.terms()[:4])
        more = "" if len(self._c) <= 4 else f", ... ({len(self._c)} terms)"
        return f"LaurentPoly(d={self.dimension}, {{{inner}{more}}})"

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.dimension == other.dimension and self._c == other._c
        return NotImplemented

    __hash__ = None

    # -- ring structure -----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        c = dict(self._c)
        for k, v in other._c.items():
            s = c.get(k, 0) + v
            if s != 0:
                c[k] = s
            elif k in c:
                del c[k]
        out = LaurentPoly(self.dimension)
        out._c = c
        return out

    def __neg__(self):
        out = LaurentPoly(self.dimension)
        out._c = {k: -v for k, v in self._c.items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def scale(self, s):
        s = _norm_scalar(s)
        if s == 0:
            return LaurentPoly(self.dimension)
        out = LaurentPoly(self.dimension)
        out._c = {k: v * s for k, v in self._c.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic)):
            return self.scale(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        if not self._c or not other._c:
            return LaurentPoly(self.dimension)
        if _all_rational(self._c) and _all_rational(other._c):
            return self._mul_rational_fast(other)
        return self._mul_general(other)

    __rmul__ = __mul__

    def _mul_rational_fast(self, other):
        # clear denominators once, convolve in machine/big ints, divide once
        la = _denominator_lcm(self._c)
        lb = _denominator_lcm(other._c)
        A = {k: int(v * la) for k, v in self._c.items()}
        B = {k: int(v * lb) for k, v in other._c.items()}
        acc = {}
        for ka, va in A.items():
            for kb, vb in B.items():
                kk = tuple(x + y for x, y in zip(ka, kb))
                acc[kk] = acc.get(kk, 0) + va * vb
        scale = Fraction(1, la * lb)
        out = LaurentPoly(self.dimension)
        out._c = {k: v * scale for k, v in acc.items() if v}
        return out

    def _mul_general(self, other):
        acc = {}
        for ka, va in self._c.items():
            for kb, vb in other._c.items():
                kk = tuple(x + y for x, y in zip(ka, kb))
                cur = acc.get(kk)
                acc[kk] = va * vb if cur is None else cur + va * vb
        out = LaurentPoly(self.dimension)
        out._c = {k: v for k, v in acc.items() if v != 0}
        return out

    # -- analysis-flavoured operations ---------------------------------------

    def moment(self, beta):
        """Normalized derivative at zero: D^beta t(0)/(2 pi i)^|beta| = sum h_k k^beta."""
        total = Fraction(0)
        for k, v in self._c.items():
            p = 1
            for x, b in zip(k, beta):
                if b:
                    p *= x ** b
            if p:
                total = total + v * p
        return total

    def dilated_moment(self, M, alpha):
        """lambda_alpha = sum_k h_k (M^-1 k)^alpha, exactly."""
        ds_minv = _minv(M)
        total = Fraction(0)
        for k, v in self._c.items():
            w = tuple(sum(ds_minv[i][j] * k[j] for j in range(len(k)))
                      for i in range(len(k)))
            p = vec_pow(w, alpha)
            if p:
                total = total + v * p
        return total

    def modulate(self, a):
        """e^{2 pi i (a, xi)} * t: shift every offset by a."""
        a = tuple(int(x) for x in a)
        out = LaurentPoly(self.dimension)
        out._c = {tuple(x + y for x, y in zip(k, a)): v for k, v in self._c.items()}
        return out

    def substitute_linear(self, A):
        """t(A* xi): coefficient at k moves to A k. A must be unimodular so
        the support stays on Z^d and the operation is invertible."""
        from .linalg import integer_det
        if abs(integer_det(A)) != 1:
            raise ValueError("substitution matrix must be unimodular")
        out = LaurentPoly(self.dimension)
        out._c = {
            tuple(sum(A[i][j] * k[j] for j in range(self.dimension))
                  for i in range(self.dimension)): v
            for k, v in self._c.items()
        }
        return out

    def upsample(self, M):
        """t(M* xi): coefficient at k moves to M k. Any invertible integer
        matrix is allowed; the support just spreads onto the M-sublattice."""
        from .linalg import integer_det
        if integer_det(M) == 0:
            raise ValueError("upsampling matrix must be invertible")
        d = self.dimension
        out = LaurentPoly(d)
        out._c = {
            tuple(sum(M[i][j] * k[j] for j in range(d)) for i in range(d)): v
            for k, v in self._c.items()
        }
        return out

    def conjugate_reflect(self):
        """Coefficients of conj(t(xi)): k -> conj(h_{-k})."""
        out = LaurentPoly(self.dimension)
        out._c = {tuple(-x for x in k): scalar_conj(v) for k, v in self._c.items()}
        return out

    # -- evaluation -----------------------------------------------------------

    def evaluate_rational(self, xi):
        """Exact value of t at a rational point xi (entries Fraction); the
        result lives in Q(zeta_L) for L = lcm of the exponent denominators."""
        xi = tuple(Fraction(x) for x in xi)
        total = Fraction(0)
        for k, v in self._c.items():
            e = sum(Fraction(x) * y for x, y in zip(k, xi))
            q = e.denominator
            p = e.numerator % q
            w = zeta(q) ** p if p else Fraction(1)
            total = total + v * w
        return total

    def evaluate_complex(self, xi):
        import cmath
        total = 0j
        for k, v in self._c.items():
            phase = 2j * cmath.pi * sum(float(x) * float(y) for x, y in zip(k, xi))
            total += to_complex(v) * cmath.exp(phase)
        return total

    # -- serialization ----------------------------------------------------------

    def to_json_dict(self):
        return {
            "dim": self.dimension,
            "terms": [{"k": list(k), "v": format_scalar(v)} for k, v in self.terms()],
        }

    @classmethod
    def from_json_dict(cls, obj):
        d = int(obj["dim"])
        terms = [(tuple(t["k"]), parse_scalar(t["v"])) for t in obj["terms"]]
        return cls(d, terms)

    def to_json(self):
        return json.dumps(self.to_json_dict(), separators=(",", ":"), sort_keys=True)

    @classmethod
    def from_json(cls, s):
        return cls.from_json_dict(json.loads(s))


def _all_rational(cmap):
    return all(isinstance(v, Fraction) for v in cmap.values())


def _denominator_lcm(cmap):
    acc = 1
    for v in cmap.values():
        acc = acc // gcd(acc, v.denominator) * v.denominator
    return acc


def _minv(M):
    from .linalg import fraction_matrix_inverse
    return fraction_matrix_inverse(M)


# ---------------------------------------------------------------------------
# polyphase representation (scaled)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyphaseRow:
    """Scaled polyphase components of one polynomial over a digit system."""
    digit_system: DigitSystem
    components: Tuple[LaurentPoly, ...]

    def merge(self):
        return polyphase_merge(self)


def polyphase_split(t: LaurentPoly, ds: DigitSystem) -> PolyphaseRow:
    """Components nu_k with coefficient m*h_{M beta + s_k} at beta."""
    if t.dimension != ds.dimension:
        raise ValueError("dimension mismatch")
    m = ds.m
    maps = [dict() for _ in range(m)]
    for k, v in t._c.items():
        idx = ds.index_of(k)
        s = ds.digits[idx]
        diff = tuple(a - b for a, b in zip(k, s))
        beta = tuple(
            sum(ds.Minv[i][j] * diff[j] for j in range(ds.dimension))
            for i in range(ds.dimension)
        )
        beta = tuple(int(x) for x in beta)  # exact by congruence
        maps[idx][beta] = v * m
    comps = []
    for cm in maps:
        p = LaurentPoly(t.dimension)
        p._c = cm
        comps.append(p)
    return PolyphaseRow(ds, tuple(comps))


def polyphase_merge(row: PolyphaseRow) -> LaurentPoly:
    """t(xi) = (1/m) sum_k e^{2 pi i (s_k, xi)} nu_k(M* xi)."""
    ds = row.digit_system
    if len(row.components) != ds.m:
        raise ValueError(f"expected {ds.m} components, got {len(row.components)}")
    d = ds.dimension
    M = ds.M
    out = {}
    for s, comp in zip(ds.digits, row.components):
        for beta, v in comp._c.items():
            k = tuple(
                sum(M[i][j] * beta[j] for j in range(d)) + s[i] for i in range(d)
            )
            cur = out.get(k)
            val = v if cur is None else cur + v
            if val != 0:
                out[k] = val
            elif k in out:
                del out[k]
    t = LaurentPoly(d)
    t._c = {k: v / ds.m if isinstance(v, Cyclotomic) else v * Fraction(1, ds.m)
            for k, v in out.items()}
    return t


# ---------------------------------------------------------------------------
# dense 2-d table text form (publication-style matrix layout)
# ---------------------------------------------------------------------------
#
# Rows run top to bottom with the SECOND coordinate decreasing, columns left
# to right with the FIRST coordinate increasing; the anchor cell (wrapped in
# square brackets) marks offset (0,0). Cell (r, c) holds h at
# (c - c0, r0 - r) where (r0, c0) is the anchor position.

def parse_table(text: str) -> LaurentPoly:
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows:
        raise ValueError("empty table")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged table: all rows must have the same cell count")
    anchor = None
    for r, row in enumerate(rows):
        for c, cell in enumerate(row):
            if cell.startswith("[") and cell.endswith("]"):
                if anchor is not None:
                    raise ValueError("multiple anchor cells")
                anchor = (r, c)
    if anchor is None:
        raise ValueError("no anchor cell marking the origin (wrap one cell in [])")
    r0, c0 = anchor
    terms = []
    for r, row in enumerate(rows):
        for c, cell in enumerate(row):
            if (r, c) == anchor:
                cell = cell[1:-1]
            v = parse_scalar(cell)
            if v != 0:
                terms.append(((c - c0, r0 - r), v))
    return LaurentPoly(2, terms)


def format_table(t: LaurentPoly) -> str:
    """Dense print-ready table; inverse of parse_table on d=2 polynomials."""
    if t.dimension != 2:
        raise ValueError("dense tables are only defined for d=2")
    sup = t.support() or [(0, 0)]
    xs = [k[0] for k in sup] + [0]
    ys = [k[1] for k in sup] + [0]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    cells = []
    for y in range(ymax, ymin - 1, -1):
        row = []
        for x in range(xmin, xmax + 1):
            v = t.coeff((x, y))
            s = format_scalar(v)
            if (x, y) == (0, 0):
                s = "[" + s + "]"
            row.append(s)
        cells.append(row)
    widths = [max(len(cells[r][c]) for r in range(len(cells)))
              for c in range(len(cells[0]))]
    lines = [
        "  ".join(cell.rjust(widths[c]) for c, cell in enumerate(row)).rstrip()
        for row in cells
    ]
    return "\n".join(lines) + "\n"
