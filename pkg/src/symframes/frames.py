"""Dual wavelet frame filter banks from a refinable pair (m0, m0~).

Two construction routes are provided. The mutual extension completes the
pair with wavelets read off the scaled polyphase identity directly; it works
for every symmetry group. The symmetrized extension additionally conjugates
the wavelet block by per-orbit DFT symmetrizers built from a cyclic
decomposition of the orbit transversals, which upgrades plain mutual
symmetry to the generalized (per-element) symmetry property; it needs an
abelian group and the per-orbit special assumption on the r-vectors.

Every bank is verified against the mixed extension principle exactly before
it is returned.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .exact import (
    Cyclotomic,
    conj as scalar_conj,
    format_scalar,
    parse_scalar,
    zeta,
)
from .lattice import OrbitStructure, SymmetryGroup, orbit_decomposition
from .laurent import LaurentPoly, PolyphaseRow, polyphase_merge, polyphase_split
from .linalg import mat_mul
from .masks import Mask, _orbit_of, _require_refinable
from .verify import (
    VerificationError,
    VerificationReport,
    check_generalized_symmetry,
    duality_defect,
    h_symmetry_defect,
    mep_defect,
    sum_rule_order,
    vanishing_moment_order,
)

__all__ = [
    "FilterBank",
    "AbelianStructure",
    "SymmetrizerPair",
    "mutual_extension",
    "abelian_decomposition",
    "build_symmetrizer",
    "check_special_assumption",
    "symmetrized_extension",
    "custom_extension",
    "stabilizer_group",
]


# ---------------------------------------------------------------------------
# bank container
# ---------------------------------------------------------------------------

@dataclass
class FilterBank:
    """2m masks in channel order: refinable pair first, wavelets by (p, i)."""
    orbit: OrbitStructure
    primals: Tuple[LaurentPoly, ...]
    duals: Tuple[LaurentPoly, ...]
    mode: str
    center: Tuple[Fraction, ...]
    symmetrizer: Optional["SymmetrizerPair"] = None

    def __post_init__(self):
        m = self.orbit.digit_system.m
        if len(self.primals) != m or len(self.duals) != m:
            raise ValueError(f"bank needs exactly m={m} masks per side")

    @property
    def M(self):
        return self.orbit.M

    @property
    def digit_system(self):
        return self.orbit.digit_system

    def polyphase_matrices(self):
        ds = self.digit_system
        N = [polyphase_split(t, ds).components for t in self.primals]
        Nd = [polyphase_split(t, ds).components for t in self.duals]
        return N, Nd

    def verify(self, n_max: int = 8) -> VerificationReport:
        rep = VerificationReport()
        ds = self.digit_system
        w = mep_defect(self.primals, self.duals, ds)
        rep.add("mep", w is None, None if w is None else (w[0], w[1]))
        w = duality_defect(self.primals[0], self.duals[0], ds)
        rep.add("duality", w is None)
        sr0 = sum_rule_order(self.primals[0], ds, n_max)
        srd = sum_rule_order(self.duals[0], ds, n_max)
        rep.add("sum_rule_primal", sr0 >= 1, sr0)
        rep.add("sum_rule_dual", srd >= 1, srd)
        vm_p = [vanishing_moment_order(t, n_max) for t in self.primals[1:]]
        vm_d = [vanishing_moment_order(t, n_max) for t in self.duals[1:]]
        rep.add("vm_transfer_primal", all(v >= srd for v in vm_p), vm_p)
        rep.add("vm_transfer_dual", all(v >= sr0 for v in vm_d), vm_d)
        rep.add("frame_certified_algebraic",
                sr0 >= 1 and srd >= 1 and min(vm_p + vm_d, default=0) >= 1)
        if self.mode == "symmetrized":
            H = self.orbit.group
            ok = all(
                check_generalized_symmetry(t, E) is not None
                for t in list(self.primals[1:]) + list(self.duals[1:])
                for E in H.elements)
            rep.add("generalized_symmetry", ok)
        return rep

    def to_json_dict(self):
        out = {
            "mode": self.mode,
            "dilation": [list(r) for r in self.M],
            "center": [format_scalar(Fraction(x)) for x in self.center],
            "group_elements": [[list(r) for r in E]
                               for E in self.orbit.group.elements],
            "digits": [list(s) for s in self.digit_system.digits],
            "primals": [t.to_json_dict() for t in self.primals],
            "duals": [t.to_json_dict() for t in self.duals],
        }
        if self.symmetrizer is not None:
            out["symmetrizer"] = self.symmetrizer.to_json_dict()
        return out

    @classmethod
    def from_json_dict(cls, obj):
        H = SymmetryGroup(tuple(
            tuple(tuple(int(x) for x in row) for row in E)
            for E in obj["group_elements"]))
        M = tuple(tuple(int(x) for x in r) for r in obj["dilation"])
        center = tuple(Fraction(parse_scalar(s)) for s in obj["center"])
        orb = orbit_decomposition(H, M, center)
        got = [tuple(s) for s in obj["digits"]]
        if got != [tuple(s) for s in orb.digit_system.digits]:
            raise ValueError("digit order in file does not match the "
                             "canonical orbit numbering")
        sym = None
        if "symmetrizer" in obj:
            sym = SymmetrizerPair.from_json_dict(obj["symmetrizer"])
        return cls(orbit=orb,
                   primals=tuple(LaurentPoly.from_json_dict(t)
                                 for t in obj["primals"]),
                   duals=tuple(LaurentPoly.from_json_dict(t)
                               for t in obj["duals"]),
                   mode=obj["mode"], center=center, symmetrizer=sym)


def stabilizer_group(orb: OrbitStructure, p: int, i: int = 0) -> SymmetryGroup:
    """Stabilizer of the coset of s_{p,i} as a SymmetryGroup (the i=0
    stabilizer conjugated by the i-th transversal element)."""
    H = orb.group
    o = orb.orbits[p]
    E = H.elements[o.transversal[i]]
    Einv = H.elements[H.inverse[o.transversal[i]]]
    elems = []
    for f in o.stabilizer:
        F = H.elements[f]
        elems.append(mat_mul(mat_mul(E, F), Einv))
    return SymmetryGroup(tuple(elems))


# ---------------------------------------------------------------------------
# mutual extension
# ---------------------------------------------------------------------------

def _as_refinable_pair(m0, m0_dual):
    _require_refinable(m0)
    if m0_dual.role != "dual-refinable":
        raise ValueError("second argument must be a dual refinable mask")
    orb = _orbit_of(m0)
    ds = orb.digit_system
    w = duality_defect(m0.poly, m0_dual.poly, ds)
    if w is not None:
        raise VerificationError(f"masks are not a dual pair: defect {w!r}")
    return orb, ds


def _finish_bank(orb, primals, duals, mode, center, symmetrizer=None):
    w = mep_defect(primals, duals, orb.digit_system)
    if w is not None:
        raise VerificationError(
            f"extension principle identity failed at entry ({w[0]},{w[1]})")
    return FilterBank(orbit=orb, primals=tuple(primals), duals=tuple(duals),
                      mode=mode, center=center, symmetrizer=symmetrizer)


def mutual_extension(m0: Mask, m0_dual: Mask) -> FilterBank:
    """Complete (m0, m0~) to a dual frame bank with one wavelet per nonzero
    digit:

        m_{(p,i)}  = e^{2 pi i (s_{p,i}, xi)} - cr(nu~_{0,p,i})(M* xi) m0(xi)
        m~_{(p,i)} = (e^{2 pi i (s_{p,i}, xi)} - cr(nu_{0,p,i})(M* xi)) / m

    so each primal wavelet inherits the dual mask's sum rule as vanishing
    moments and vice versa. For a symmetric pair about 0 the wavelets also
    satisfy m_{(p,i)} = m_{(p,0)}(E^{(i)* } xi) exactly.
    """
    orb, ds = _as_refinable_pair(m0, m0_dual)
    M = orb.M
    d = ds.dimension
    row = polyphase_split(m0.poly, ds).components
    drow = polyphase_split(m0_dual.poly, ds).components
    primals = [m0.poly]
    duals = [m0_dual.poly]
    minv = Fraction(1, ds.m)
    for k in range(1, ds.m):
        s = ds.digits[k]
        primals.append(LaurentPoly.delta(d, s)
                       - drow[k].conjugate_reflect().upsample(M) * m0.poly)
        duals.append((LaurentPoly.delta(d, s)
                      - row[k].conjugate_reflect().upsample(M)).scale(minv))
    bank = _finish_bank(orb, primals, duals, "mutual", m0.center)
    if all(x == 0 for x in m0.center):
        _assert_mutual_symmetry(bank)
    return bank


def _assert_mutual_symmetry(bank: FilterBank):
    """m_{(p,i)} = m_{(p,0)}(E^{(i)*} xi) on both sides (center 0)."""
    orb = bank.orbit
    H = orb.group
    for p, o in enumerate(orb.orbits):
        base = orb.channel_index[(p, 0)]
        if base == 0:
            continue  # refinable channel; orbit 0 has no wavelets at c=0
        for i in range(1, len(o.digits)):
            E = H.elements[o.transversal[i]]
            ch = orb.channel_index[(p, i)]
            for fam in (bank.primals, bank.duals):
                if fam[ch] != fam[base].substitute_linear(E):
                    raise VerificationError(
                        f"mutual symmetry failed for channel ({p},{i})")


# ---------------------------------------------------------------------------
# abelian machinery
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbelianStructure:
    """Per-orbit cyclic decomposition of the transversal subgroups.

    ``generators[p]`` lists matrices E_1..E_g with orders ``orders[p]``;
    every transversal element is uniquely prod_j E_j^{k_j} and the flat index
    is k = sum_j k_j L_j with the mixed-radix weights ``weights[p]``
    (L_1 = 1, L_{j+1} = L_j N_j). ``add[p]`` is the digit-wise addition
    table and ``perm[p]`` maps the abelian index k to the position of that
    element in the orbit's canonical transversal order.
    """
    generators: Tuple[Tuple, ...]
    orders: Tuple[Tuple[int, ...], ...]
    weights: Tuple[Tuple[int, ...], ...]
    add: Tuple[Tuple[Tuple[int, ...], ...], ...]
    perm: Tuple[Tuple[int, ...], ...]

    def block_size(self, p):
        return len(self.perm[p])


def _matrix_order(E, identity):
    A, n = E, 1
    while A != identity:
        A = mat_mul(A, E)
        n += 1
        if n > 64:
            raise ValueError("element order did not terminate")
    return n


def _span(gens, identity):
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for A in frontier:
            for g in gens:
                B = mat_mul(A, g)
                if B not in seen:
                    seen.add(B)
                    nxt.append(B)
        frontier = nxt
    return seen


def abelian_decomposition(orb: OrbitStructure) -> AbelianStructure:
    """Cyclic direct-product decomposition of every orbit transversal.

    The transversals must be abelian subgroups (checked; a transversal of a
    coset space has no reason to be closed under multiplication in general,
    so this is a real restriction, reported per orbit). Generators are found
    greedily by maximal order with a direct-product constraint; the mixed
    radix bijection E^{(k)} = prod E_j^{k_j} is verified exhaustively.
    """
    H = orb.group
    if not H.abelian:
        raise ValueError("symmetrized construction needs an abelian group")
    d = H.dimension
    identity = tuple(tuple(1 if i == j else 0 for j in range(d))
                     for i in range(d))
    all_gens, all_orders, all_weights, all_add, all_perm = [], [], [], [], []
    for p, o in enumerate(orb.orbits):
        elems = [H.elements[i] for i in o.transversal]
        eset = set(elems)
        for A in elems:
            for B in elems:
                if mat_mul(A, B) not in eset:
                    raise ValueError(
                        f"transversal of orbit {p} is not closed under "
                        "multiplication; no symmetrizer exists")
        gens: List = []
        orders: List[int] = []
        spanned = {identity}
        rest = [E for E in elems if E != identity]
        while len(spanned) < len(elems):
            best = None
            for g in rest:
                if g in spanned:
                    continue
                n = _matrix_order(g, identity)
                cyc = {identity}
                A = g
                while A != identity:
                    cyc.add(A)
                    A = mat_mul(A, g)
                if any(x in spanned and x != identity for x in cyc):
                    continue  # not a direct complement of the current span
                if best is None or n > best[1]:
                    best = (g, n)
            if best is None:
                raise ValueError(
                    f"could not split the transversal of orbit {p} into "
                    "cyclic factors")
            gens.append(best[0])
            orders.append(best[1])
            spanned = _span(gens, identity)
        weights = []
        w = 1
        for n in orders:
            weights.append(w)
            w *= n
        # flat index -> element, and the exhaustive bijection check
        Np = len(elems)
        by_index = []
        for k in range(Np):
            A = identity
            for g, n, L in zip(gens, orders, weights):
                e = (k // L) % n
                for _ in range(e):
                    A = mat_mul(A, g)
            by_index.append(A)
        if len(set(by_index)) != Np or set(by_index) != eset:
            raise ValueError(f"mixed-radix numbering of orbit {p} is not a "
                             "bijection")
        add = []
        for k in range(Np):
            rowk = []
            for l in range(Np):
                s = sum((((k // L) % n + (l // L) % n) % n) * L
                        for n, L in zip(orders, weights))
                rowk.append(s)
                if mat_mul(by_index[k], by_index[l]) != by_index[s]:
                    raise ValueError("addition table mismatch")
            add.append(tuple(rowk))
        perm = tuple(elems.index(A) for A in by_index)
        all_gens.append(tuple(gens))
        all_orders.append(tuple(orders))
        all_weights.append(tuple(weights))
        all_add.append(tuple(add))
        all_perm.append(perm)
    return AbelianStructure(tuple(all_gens), tuple(all_orders),
                            tuple(all_weights), tuple(all_add), tuple(all_perm))


@dataclass(frozen=True)
class SymmetrizerPair:
    """Per-orbit matrices (W_p, W~_p) over exact scalars with W_p W~_p* = I."""
    blocks: Tuple[Tuple[Tuple, ...], ...]
    blocks_dual: Tuple[Tuple[Tuple, ...], ...]

    def to_json_dict(self):
        return {
            "blocks": [[[format_scalar(x) for x in row] for row in B]
                       for B in self.blocks],
            "blocks_dual": [[[format_scalar(x) for x in row] for row in B]
                            for B in self.blocks_dual],
        }

    @classmethod
    def from_json_dict(cls, obj):
        rd = lambda Bs: tuple(
            tuple(tuple(parse_scalar(x) for x in row) for row in B)
            for B in Bs)
        return cls(rd(obj["blocks"]), rd(obj["blocks_dual"]))


def _sqrt_int_exact(N: int):
    """sqrt(N) as an exact scalar, when it lives in a cyclotomic field we
    can reach with conductors 8 and 12 (squares times products of 2 and 3)."""
    if N < 1:
        raise ValueError("N must be positive")
    root = 1
    rem = N
    f = 2
    square = 1
    counts: Dict[int, int] = {}
    while f * f <= rem:
        while rem % f == 0:
            counts[f] = counts.get(f, 0) + 1
            rem //= f
        f += 1
    if rem > 1:
        counts[rem] = counts.get(rem, 0) + 1
    val = Fraction(1)
    for prime, e in counts.items():
        square = prime ** (e // 2)
        val = val * square
        if e % 2:
            if prime == 2:
                z = zeta(8)
                val = val * (z - z ** 3)  # sqrt(2)
            elif prime == 3:
                z = zeta(12)
                val = val * (z + z ** 11)  # 2 cos(pi/6)
            else:
                raise ValueError(
                    f"sqrt({N}) is not expressible in the permitted "
                    "cyclotomic conductors")
    return val


def build_symmetrizer(ab: AbelianStructure,
                      normalization: str = "exact-paraunitary") -> SymmetrizerPair:
    """DFT-Kronecker symmetrizers for every orbit.

    Default mode keeps W_p unnormalized (entries are roots of unity) and
    puts the full 1/N_p on W~_p, so W_p W~_p* = I holds with no square
    roots. The unitary mode splits the normalization as 1/sqrt(N_p) on both
    sides when sqrt(N_p) is exactly expressible.
    """
    if normalization not in ("exact-paraunitary", "unitary"):
        raise ValueError(f"unknown normalization {normalization!r}")
    blocks = []
    blocks_dual = []
    for p in range(len(ab.perm)):
        orders = ab.orders[p]
        weights = ab.weights[p]
        Np = ab.block_size(p)
        roots = [zeta(n) if n > 2 else Fraction(-1) if n == 2 else Fraction(1)
                 for n in orders]
        W = []
        for k in range(Np):
            row = []
            for l in range(Np):
                x = Fraction(1)
                for n, L, eps in zip(orders, weights, roots):
                    e = (((k // L) % n) * ((l // L) % n)) % n
                    if e:
                        x = x * eps ** e
                row.append(x)
            W.append(tuple(row))
        if normalization == "unitary":
            s = _sqrt_int_exact(Np)
            inv = (Fraction(1) / s) if isinstance(s, Fraction) else s.inverse()
            Wn = tuple(tuple(x * inv for x in row) for row in W)
            Wd = Wn
        else:
            Wn = tuple(W)
            Wd = tuple(tuple(x * Fraction(1, Np) for x in row) for row in W)
        # contract: W W~* = I, checked exactly
        for a in range(Np):
            for b in range(Np):
                acc = sum((Wn[a][l] * scalar_conj(Wd[b][l]) for l in range(Np)),
                          Fraction(0))
                if acc != (1 if a == b else 0):
                    raise VerificationError(
                        f"symmetrizer block {p} is not paraunitary")
        # listed entry relation [W]_{k,l}[W]_{n,l} = [W]_{k (+) n, l}
        for k in range(Np):
            for n2 in range(Np):
                for l in range(Np):
                    if W[k][l] * W[n2][l] != W[ab.add[p][k][n2]][l]:
                        raise VerificationError(
                            "symmetrizer entry relation failed")
        blocks.append(Wn)
        blocks_dual.append(Wd)
    return SymmetrizerPair(tuple(blocks), tuple(blocks_dual))


def check_special_assumption(orb: OrbitStructure) -> Tuple[bool, ...]:
    """Per orbit: r^F_{p,0} = M^-1 E M r^F_{p,0} for all stabilizer F and
    transversal E (the condition that lets constant symmetrizers commute
    with the stabilizer modulations)."""
    H = orb.group
    ds = orb.digit_system
    d = H.dimension
    out = []
    for o in orb.orbits:
        ok = True
        for f, r in o.r_stab.items():
            for ti in o.transversal:
                E = H.elements[ti]
                EM = mat_mul(E, orb.M)
                img = tuple(
                    sum(ds.Minv[i][j] * sum(EM[j][l] * r[l] for l in range(d))
                        for j in range(d))
                    for i in range(d))
                if tuple(Fraction(x) for x in img) != tuple(Fraction(x) for x in r):
                    ok = False
        out.append(ok)
    return tuple(out)


def _scalar_matrix_conj_transpose(B):
    n = len(B)
    return tuple(tuple(scalar_conj(B[j][i]) for j in range(n)) for i in range(n))


def symmetrized_extension(m0: Mask, m0_dual: Mask,
                          symmetrizer: Optional[SymmetrizerPair] = None
                          ) -> FilterBank:
    """Bank whose wavelets have the generalized H-symmetry property.

    Takes the mutual-extension wavelet block and conjugates it per orbit by
    the DFT symmetrizers: (U, U~) = (W*, W~*) blockwise in abelian
    (mixed-radix) numbering. Requires an abelian group, orbit transversals
    that are subgroups, and the special assumption on the r-vectors.
    """
    orb, ds = _as_refinable_pair(m0, m0_dual)
    if not orb.group.abelian:
        raise ValueError("symmetrized extension needs an abelian group")
    if len(orb.orbits[0].digits) != 1:
        raise ValueError("symmetrized extension needs the zero coset to be "
                         "a fixed point of the group action")
    special = check_special_assumption(orb)
    if not all(special):
        bad = [p for p, ok in enumerate(special) if not ok]
        raise ValueError(f"special assumption fails for orbits {bad}")
    ab = abelian_decomposition(orb)
    if symmetrizer is None:
        symmetrizer = build_symmetrizer(ab)
    d = ds.dimension
    m = ds.m
    # U = W* and U~ = W~* as (m-1)x(m-1) scalar matrices in canonical
    # channel order: conjugate each orbit block by its mixed-radix
    # permutation, skipping the zero-coset channel.
    U = [[Fraction(0)] * (m - 1) for _ in range(m - 1)]
    Ud = [[Fraction(0)] * (m - 1) for _ in range(m - 1)]
    for p, o in enumerate(orb.orbits):
        if p == 0:
            continue
        Ws = _scalar_matrix_conj_transpose(symmetrizer.blocks[p])
        Wds = _scalar_matrix_conj_transpose(symmetrizer.blocks_dual[p])
        base = orb.channel_index[(p, 0)] - 1
        perm = ab.perm[p]
        Np = len(perm)
        for a in range(Np):
            for b in range(Np):
                U[base + perm[a]][base + perm[b]] = Ws[a][b]
                Ud[base + perm[a]][base + perm[b]] = Wds[a][b]
    bank = custom_extension(m0, m0_dual, U, Ud, mode="symmetrized",
                            symmetrizer=symmetrizer)
    H = orb.group
    for t in list(bank.primals[1:]) + list(bank.duals[1:]):
        for E in H.elements:
            if check_generalized_symmetry(t, E) is None:
                raise VerificationError(
                    "a wavelet failed the generalized symmetry check")
    return bank


def _const_poly(d, x):
    return LaurentPoly(d, {(0,) * d: x})


def custom_extension(m0: Mask, m0_dual: Mask, U, U_dual,
                     mode: str = "custom",
                     symmetrizer: Optional[SymmetrizerPair] = None
                     ) -> FilterBank:
    """General block extension: wavelet polyphase rows

        N  row a:  [ -(U V~*)_a | m U_a - (U V~*)_a V ]
        N~ row a:  [ -(U~ V*)_a | U~_a ]

    for any (m-1)x(m-1) pair with U U~* = I (entries may be Laurent
    polynomials; scalars are promoted). U = U~ = I gives mutual_extension.
    """
    orb, ds = _as_refinable_pair(m0, m0_dual)
    d = ds.dimension
    m = ds.m
    M = orb.M

    def as_poly(x):
        return x if isinstance(x, LaurentPoly) else _const_poly(d, x)

    U = [[as_poly(x) for x in row] for row in U]
    Ud = [[as_poly(x) for x in row] for row in U_dual]
    if len(U) != m - 1 or len(Ud) != m - 1 or \
            any(len(r) != m - 1 for r in U + Ud):
        raise ValueError(f"U blocks must be {m-1}x{m-1}")
    for a in range(m - 1):
        for b in range(m - 1):
            acc = LaurentPoly(d)
            for c_ in range(m - 1):
                acc = acc + U[a][c_] * Ud[b][c_].conjugate_reflect()
            want = LaurentPoly.one(d) if a == b else LaurentPoly(d)
            if acc != want:
                raise VerificationError(
                    f"U U~* is not the identity at entry ({a},{b})")

    row = polyphase_split(m0.poly, ds).components
    drow = polyphase_split(m0_dual.poly, ds).components
    primals = [m0.poly]
    duals = [m0_dual.poly]
    minv = Fraction(1, m)
    for a in range(m - 1):
        # wsum = (U V~*)_a, dsum = (U~ V*)_a
        wsum = LaurentPoly(d)
        dsum = LaurentPoly(d)
        for b in range(m - 1):
            wsum = wsum + U[a][b] * drow[b + 1].conjugate_reflect()
            dsum = dsum + Ud[a][b] * row[b + 1].conjugate_reflect()
        ncomp = [wsum.scale(Fraction(-1))]
        ndcomp = [dsum.scale(Fraction(-1))]
        for k in range(1, m):
            ncomp.append(U[a][k - 1].scale(m) - wsum * row[k])
            ndcomp.append(Ud[a][k - 1])
        primals.append(polyphase_merge(PolyphaseRow(ds, tuple(ncomp))))
        duals.append(polyphase_merge(PolyphaseRow(ds, tuple(ndcomp))))
    return _finish_bank(orb, primals, duals, mode, m0.center, symmetrizer)
