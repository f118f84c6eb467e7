"""Integer lattice machinery: dilation matrices, symmetry groups, digits, orbits.

Conventions used throughout the package:

* matrices and integer vectors are nested tuples, so everything is hashable
  and safely shared;
* a digit system for a dilation M lists one representative per coset of
  Z^d / M Z^d, with the zero digit first;
* a symmetry group H acts on cosets by E<s> = <Es + c - Ec> where c is the
  symmetry center; orbits of that action drive all mask constructions.

Ordering is deterministic everywhere. Integer vectors are ranked by
``vec_key`` (sup-norm first, then per-component magnitude/sign starting from
the last axis), which is what makes rebuilt orbit structures reproduce the
worked examples digit for digit.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Dict, Tuple

from .linalg import (
    char_poly,
    fraction_matrix_inverse,
    identity_matrix,
    integer_det,
    mat_mul,
)

__all__ = [
    "vec_key",
    "is_dilation",
    "SymmetryGroup",
    "validate_group",
    "group_identity",
    "group_axis",
    "group_full",
    "group_hexagonal",
    "check_dilation_compatibility",
    "DigitSystem",
    "default_digits",
    "act_on_coset",
    "Orbit",
    "OrbitStructure",
    "orbit_decomposition",
    "refinable_symmetry_center",
]

IntVec = Tuple[int, ...]
IntMat = Tuple[Tuple[int, ...], ...]


def _enc(x):
    # magnitude first, nonnegative before negative
    return (abs(x), 0 if x >= 0 else 1)


def vec_key(v):
    """Total order on integer vectors: sup-norm, then (|x|, sign) per
    component starting from the last axis. The zero vector is least."""
    return (max(abs(x) for x in v),) + tuple(_enc(v[j]) for j in range(len(v) - 1, -1, -1))


def _element_key(E):
    return tuple(_enc(x) for row in E for x in row)


def _neg(E):
    return tuple(tuple(-x for x in row) for row in E)


# ---------------------------------------------------------------------------
# dilation test
# ---------------------------------------------------------------------------

def is_dilation(M: IntMat) -> bool:
    """True iff every eigenvalue of the integer matrix M has modulus > 1.

    Entirely exact: the reciprocal characteristic polynomial must have all
    roots strictly inside the unit disk, which after the Moebius substitution
    z = (1+w)/(1-w) becomes a strict Routh-Hurwitz condition over Q.
    """
    d = len(M)
    if any(len(row) != d for row in M):
        raise ValueError("dilation matrix must be square")
    if abs(integer_det(M)) <= 1:
        return False  # |det| = prod |eigenvalue| must exceed 1
    p = char_poly(M)  # ascending, monic degree d
    q = tuple(reversed(p))  # q(z) = z^d p(1/z); roots are 1/lambda
    # Q(w) = (1-w)^d q((1+w)/(1-w)) = sum_j q_j (1+w)^j (1-w)^(d-j)
    Q = [Fraction(0)] * (d + 1)
    for j, qj in enumerate(q):
        if qj == 0:
            continue
        for a in range(j + 1):
            ca = comb(j, a)
            for b in range(d - j + 1):
                Q[a + b] += qj * ca * comb(d - j, b) * ((-1) ** b)
    if Q[d] == 0:
        return False  # q(-1) = 0: an eigenvalue sits on the unit circle
    return _routh_hurwitz_strict(Q)


def _routh_hurwitz_strict(asc):
    """All roots strictly in the open left half-plane (exact Routh table)."""
    desc = list(reversed(asc))
    deg = len(desc) - 1
    if deg <= 0:
        return True
    rows = [desc[0::2], desc[1::2]]
    for _ in range(2, deg + 1):
        prev2, prev = rows[-2], rows[-1]
        if not prev or prev[0] == 0:
            return False
        new = []
        for j in range(len(prev2) - 1):
            a = prev2[j + 1]
            b = prev[j + 1] if j + 1 < len(prev) else 0
            new.append((prev[0] * a - prev2[0] * b) / prev[0])
        rows.append(new if new else [Fraction(0)])
    first = [r[0] if r else Fraction(0) for r in rows]
    if any(f == 0 for f in first):
        return False
    return all(f > 0 for f in first) or all(f < 0 for f in first)


# ---------------------------------------------------------------------------
# symmetry groups
# ---------------------------------------------------------------------------

class SymmetryGroup:
    """A finite group of unimodular integer matrices, identity first.

    Elements are stored in a canonical order (identity, then sorted by a
    per-entry magnitude/sign key), so two groups with equal element sets
    compare equal index for index. The multiplication table and inverses are
    precomputed.
    """

    def __init__(self, elements):
        elements = [tuple(tuple(int(x) for x in row) for row in E) for E in elements]
        d = len(elements[0])
        ident = identity_matrix(d)
        if ident not in elements:
            raise ValueError("group must contain the identity")
        rest = sorted((E for E in elements if E != ident), key=_element_key)
        self.dimension = d
        self.elements = (ident,) + tuple(rest)
        self._index = {E: i for i, E in enumerate(self.elements)}
        n = len(self.elements)
        table = []
        for i in range(n):
            row = []
            for j in range(n):
                prod_ij = mat_mul(self.elements[i], self.elements[j])
                k = self._index.get(prod_ij)
                if k is None:
                    raise ValueError("element set is not closed under multiplication")
                row.append(k)
            table.append(tuple(row))
        self.table = tuple(table)
        inv = [None] * n
        for i in range(n):
            for j in range(n):
                if self.table[i][j] == 0:
                    inv[i] = j
        self.inverse = tuple(inv)
        self.abelian = all(
            self.table[i][j] == self.table[j][i] for i in range(n) for j in range(n)
        )

    def __len__(self):
        return len(self.elements)

    def index_of(self, E) -> int:
        return self._index[tuple(tuple(int(x) for x in row) for row in E)]

    def conjugate_map(self, M: IntMat):
        """Indices k(i) with M^-1 E_i M = E_{k(i)}; raises if any conjugate
        leaves the group (i.e. H is not M-compatible)."""
        Minv = fraction_matrix_inverse(M)
        out = []
        for E in self.elements:
            conj = mat_mul(mat_mul(Minv, E), M)
            intconj = []
            for row in conj:
                r = []
                for x in row:
                    if Fraction(x).denominator != 1:
                        raise ValueError("group is not compatible with this dilation")
                    r.append(int(x))
                intconj.append(tuple(r))
            k = self._index.get(tuple(intconj))
            if k is None:
                raise ValueError("group is not compatible with this dilation")
            out.append(k)
        return tuple(out)


def validate_group(generators, cap: int = 1024) -> SymmetryGroup:
    """Close a set of unimodular integer generators into a SymmetryGroup.

    Raises ValueError on a non-square or non-unimodular generator, or when
    the closure exceeds ``cap`` elements (the group is then infinite for all
    practical purposes, e.g. a shear).
    """
    gens = [tuple(tuple(int(x) for x in row) for row in G) for G in generators]
    if not gens:
        raise ValueError("at least one generator (e.g. the identity) is required")
    d = len(gens[0])
    for G in gens:
        if len(G) != d or any(len(row) != d for row in G):
            raise ValueError("generators must be square matrices of equal dimension")
        if abs(integer_det(G)) != 1:
            raise ValueError(f"generator {G} is not unimodular")
    ident = identity_matrix(d)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for E in frontier:
            for G in gens:
                P = mat_mul(E, G)
                if P not in seen:
                    seen.add(P)
                    nxt.append(P)
                    if len(seen) > cap:
                        raise ValueError(
                            f"group closure exceeds {cap} elements; "
                            "generators do not span a finite group of supported size")
        frontier = nxt
    return SymmetryGroup(sorted(seen, key=_element_key))


def group_identity(d: int) -> SymmetryGroup:
    """H^id = {I, -I} in dimension d."""
    return validate_group([_neg(identity_matrix(d))])


def group_axis(d: int) -> SymmetryGroup:
    """All diagonal matrices with +-1 entries (axial symmetry group)."""
    gens = []
    for j in range(d):
        E = [[1 if a == b else 0 for b in range(d)] for a in range(d)]
        E[j][j] = -1
        gens.append(tuple(tuple(r) for r in E))
    return validate_group(gens)


def group_full() -> SymmetryGroup:
    """The 8-element symmetry group of the square lattice (d=2)."""
    return validate_group([((0, 1), (-1, 0)), ((0, 1), (1, 0))])


def group_hexagonal() -> SymmetryGroup:
    """The 12-element symmetry group of the hexagonal lattice (d=2)."""
    return validate_group([((1, -1), (1, 0)), ((0, 1), (1, 0))])


def check_dilation_compatibility(H: SymmetryGroup, M: IntMat) -> bool:
    """True iff M^-1 E M is an integer matrix inside H for every E in H."""
    try:
        H.conjugate_map(M)
    except ValueError:
        return False
    return True


# ---------------------------------------------------------------------------
# digit systems
# ---------------------------------------------------------------------------

class DigitSystem:
    """One representative per coset of Z^d / M Z^d, zero digit first."""

    def __init__(self, M: IntMat, digits):
        M = tuple(tuple(int(x) for x in row) for row in M)
        digits = tuple(tuple(int(x) for x in v) for v in digits)
        self.M = M
        self.dimension = len(M)
        self.m = abs(integer_det(M))
        if self.m <= 1:
            raise ValueError("not a dilation-sized determinant")
        self.Minv = fraction_matrix_inverse(M)
        if digits[0] != (0,) * self.dimension:
            raise ValueError("the zero digit must come first")
        if len(digits) != self.m:
            raise ValueError(f"expected {self.m} digits, got {len(digits)}")
        ids = {}
        for i, v in enumerate(digits):
            cid = self.coset_id(v)
            if cid in ids:
                raise ValueError(f"digits {digits[ids[cid]]} and {v} are congruent mod M")
            ids[cid] = i
        self.digits = digits
        self._by_coset = ids

    def coset_id(self, v):
        """Fractional part of M^-1 v; equal iff vectors are congruent mod M."""
        return tuple(
            sum(self.Minv[i][j] * v[j] for j in range(self.dimension)) % 1
            for i in range(self.dimension)
        )

    def digit_of(self, v):
        """The digit congruent to v modulo M."""
        return self.digits[self._by_coset[self.coset_id(v)]]

    def index_of(self, v) -> int:
        return self._by_coset[self.coset_id(v)]


def _shell(d, r):
    """Integer vectors with sup-norm exactly r, in vec_key order."""
    if r == 0:
        return [(0,) * d]
    out = [v for v in product(range(-r, r + 1), repeat=d) if max(abs(x) for x in v) == r]
    out.sort(key=vec_key)
    return out


def default_digits(M: IntMat) -> DigitSystem:
    """Deterministic digit system: each coset gets its vec_key-least member.

    Scans sup-norm shells outward; since vec_key ranks by sup-norm first,
    first-come assignment per coset is exactly global vec_key minimality.
    """
    d = len(M)
    m = abs(integer_det(M))
    if m <= 1:
        raise ValueError("M is not expanding")
    probe = DigitSystem.__new__(DigitSystem)
    probe.M = tuple(tuple(int(x) for x in row) for row in M)
    probe.dimension = d
    probe.m = m
    probe.Minv = fraction_matrix_inverse(M)
    found = {}
    order = []
    r = 0
    while len(order) < m:
        for v in _shell(d, r):
            cid = DigitSystem.coset_id(probe, v)
            if cid not in found:
                found[cid] = v
                order.append(v)
                if len(order) == m:
                    break
        r += 1
    return DigitSystem(M, order)


def _as_fraction_vec(c, d):
    if c is None:
        return (Fraction(0),) * d
    v = tuple(Fraction(x) for x in c)
    if len(v) != d:
        raise ValueError("center has wrong dimension")
    return v


def act_on_coset(E: IntMat, s, ds: DigitSystem, c) -> IntVec:
    """The digit congruent to E s + c - E c modulo M (the H-action on cosets)."""
    d = ds.dimension
    c = _as_fraction_vec(c, d)
    w = []
    for a in range(d):
        val = sum(Fraction(E[a][b]) * s[b] for b in range(d))
        val += c[a] - sum(Fraction(E[a][b]) * c[b] for b in range(d))
        if val.denominator != 1:
            raise ValueError("center does not satisfy c - Ec in Z^d")
        w.append(int(val))
    return ds.digit_of(tuple(w))


# ---------------------------------------------------------------------------
# orbit decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Orbit:
    """One H-orbit of cosets with all the bookkeeping the constructions use.

    ``stabilizer`` and ``transversal`` hold indices into the parent group's
    element list; ``digits[i]`` is the renumbered digit induced by the i-th
    transversal element; ``r_stab[f]`` is the integer vector with
    F s0 = M r + s0 + Fc - c; ``jr[(i, k)] = (j, r)`` encodes
    K s_i = M r + s_j + Kc - c for every group element K.
    """
    index: int
    representative: IntVec
    stabilizer: Tuple[int, ...]
    transversal: Tuple[int, ...]
    digits: Tuple[IntVec, ...]
    r_stab: Dict[int, IntVec]
    jr: Dict[Tuple[int, int], Tuple[int, IntVec]]


class OrbitStructure:
    """Full orbit decomposition of the digit cosets under the H-action."""

    def __init__(self, group, M, center, orbits, digit_system):
        self.group = group
        self.M = M
        self.center = center
        self.orbits = tuple(orbits)
        self.digit_system = digit_system
        chans = []
        for p, o in enumerate(self.orbits):
            for i in range(len(o.digits)):
                chans.append((p, i))
        self.channels = tuple(chans)  # flat (p, i) in digit order
        self.channel_index = {pi: k for k, pi in enumerate(chans)}

    def to_debug_dict(self):
        """JSON-ready dump of the decomposition (for inspection/goldens)."""
        return {
            "dimension": self.group.dimension,
            "M": [list(r) for r in self.M],
            "center": [str(x) for x in self.center],
            "group_order": len(self.group),
            "orbits": [
                {
                    "representative": list(o.representative),
                    "digits": [list(s) for s in o.digits],
                    "stabilizer": list(o.stabilizer),
                    "transversal": list(o.transversal),
                    "r_stab": {str(f): list(r) for f, r in sorted(o.r_stab.items())},
                    "jmap": {
                        f"{i},{k}": [j, list(r)]
                        for (i, k), (j, r) in sorted(o.jr.items())
                    },
                }
                for o in self.orbits
            ],
        }


def _exact_int_vec(fracs):
    out = []
    for x in fracs:
        if x.denominator != 1:
            raise ValueError("expected an integer vector; symmetry data is inconsistent")
        out.append(int(x))
    return tuple(out)


def orbit_decomposition(H: SymmetryGroup, M: IntMat, c) -> OrbitStructure:
    """Decompose the cosets of Z^d / M Z^d into H-orbits with renumbered digits.

    The orbit containing the zero coset always comes first; remaining orbits
    are ordered by (size, vec_key of representative). Within an orbit, digit
    i = 0 is the representative and the rest follow the vec_key order of the
    induced digits E s0 + c - Ec.
    """
    d = len(M)
    c = _as_fraction_vec(c, d)
    if not check_dilation_compatibility(H, M):
        raise ValueError("symmetry group is not compatible with this dilation")
    for E in H.elements:
        for a in range(d):
            val = c[a] - sum(Fraction(E[a][b]) * c[b] for b in range(d))
            if val.denominator != 1:
                raise ValueError("center must satisfy c - Ec in Z^d for all E in H")
    ds0 = default_digits(M)
    m = ds0.m
    Minv = ds0.Minv

    # orbits of the coset action
    unassigned = set(range(m))
    raw_orbits = []
    while unassigned:
        start = min(unassigned)
        block = set()
        frontier = [ds0.digits[start]]
        block.add(start)
        while frontier:
            s = frontier.pop()
            for E in H.elements:
                q = act_on_coset(E, s, ds0, c)
                qi = ds0.index_of(q)
                if qi not in block:
                    block.add(qi)
                    frontier.append(ds0.digits[qi])
        raw_orbits.append(block)
        unassigned -= block

    def rep_of(block):
        return min((ds0.digits[i] for i in block), key=vec_key)

    zero_block = next(b for b in raw_orbits if ds0.index_of((0,) * d) in b)
    rest = [b for b in raw_orbits if b is not zero_block]
    rest.sort(key=lambda b: (len(b), vec_key(rep_of(b))))
    ordered = [zero_block] + rest

    orbits = []
    flat_digits = []
    for p, block in enumerate(ordered):
        rep = rep_of(block)
        rep_cid = ds0.coset_id(rep)
        stab = tuple(
            i for i, E in enumerate(H.elements)
            if ds0.coset_id(_induced_digit(E, rep, c)) == rep_cid
        )
        # pick one transversal element per coset in the orbit: minimize the
        # induced digit's vec_key, break ties by canonical element order
        chosen = {}
        for i, E in enumerate(H.elements):
            w = _induced_digit(E, rep, c)
            cid = ds0.coset_id(w)
            cur = chosen.get(cid)
            if cur is None or vec_key(w) < vec_key(cur[1]):
                chosen[cid] = (i, w)
        others = [v for cid, v in chosen.items() if cid != rep_cid]
        others.sort(key=lambda iw: vec_key(iw[1]))
        transversal = (0,) + tuple(i for i, _ in others)
        digits = (rep,) + tuple(w for _, w in others)
        if len(digits) != len(block):
            raise ValueError("transversal does not cover the orbit")  # pragma: no cover
        r_stab = {}
        for f in stab:
            F = H.elements[f]
            r_stab[f] = _solve_r(Minv, F, digits[0], digits[0], c, d)
        jr = {}
        cid_to_j = {ds0.coset_id(s): j for j, s in enumerate(digits)}
        for i, s in enumerate(digits):
            for k, K in enumerate(H.elements):
                target = _induced_digit(K, s, c)
                j = cid_to_j[ds0.coset_id(target)]
                jr[(i, k)] = (j, _solve_r(Minv, K, s, digits[j], c, d))
        orbits.append(Orbit(p, rep, stab, transversal, digits, r_stab, jr))
        flat_digits.extend(digits)

    digit_system = DigitSystem(M, flat_digits)
    return OrbitStructure(H, tuple(tuple(int(x) for x in r) for r in M), c,
                          orbits, digit_system)


def _induced_digit(E, s, c):
    d = len(s)
    out = []
    for a in range(d):
        val = sum(Fraction(E[a][b]) * s[b] for b in range(d))
        val += c[a] - sum(Fraction(E[a][b]) * c[b] for b in range(d))
        out.append(val)
    return _exact_int_vec(out)


def _solve_r(Minv, K, s_i, s_j, c, d):
    """Integer r with K s_i = M r + s_j + Kc - c."""
    rhs = []
    for a in range(d):
        val = sum(Fraction(K[a][b]) * s_i[b] for b in range(d)) - s_j[a]
        val -= sum(Fraction(K[a][b]) * c[b] for b in range(d)) - c[a]
        rhs.append(val)
    r = tuple(
        sum(Minv[a][b] * rhs[b] for b in range(d)) for a in range(d)
    )
    return _exact_int_vec(r)


def refinable_symmetry_center(M: IntMat, c):
    """The point C with (M - I) C = c; the symmetry center of the refinable
    function associated with a mask symmetric about c."""
    d = len(M)
    c = _as_fraction_vec(c, d)
    MI = [[Fraction(M[i][j] - (1 if i == j else 0)) for j in range(d)] for i in range(d)]
    from .linalg import exact_solve
    try:
        return tuple(exact_solve(MI, list(c)))
    except ValueError:
        raise ValueError("M - I is singular; no refinable symmetry center exists")
