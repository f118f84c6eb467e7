"""Construction of H-symmetric interpolatory refinable masks and their duals.

The primal construction works orbit by orbit in the scaled polyphase domain:
solve a small moment system on a lower set of lattice points (the seed),
average the seed over the coset stabilizer, propagate it across the orbit by
the transversal substitutions, and merge. Every constructed mask is
re-verified exactly before it is returned; a failed obligation raises
VerificationError instead of producing a silently wrong mask.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .exact import format_scalar, parse_scalar
from .lattice import (
    DigitSystem,
    Orbit,
    OrbitStructure,
    SymmetryGroup,
    check_dilation_compatibility,
    orbit_decomposition,
)
from .laurent import (
    LaurentPoly,
    PolyphaseRow,
    format_table,
    lower_set,
    polyphase_merge,
    polyphase_split,
    vec_pow,
)
from .linalg import exact_solve, fraction_matrix_inverse, integer_det, mat_mul
from .verify import (
    VerificationError,
    h_symmetry_defect,
    is_interpolatory,
    linear_phase_moment_order,
    sum_rule_order,
    duality_defect,
)

__all__ = [
    "Mask",
    "SeedPolynomial",
    "build_seed",
    "symmetrize_seed",
    "build_interpolatory_mask",
    "build_dual_mask",
    "build_dual_mask_low_order",
]

ROLES = ("primal-refinable", "dual-refinable", "primal-wavelet", "dual-wavelet")


@dataclass(frozen=True)
class Mask:
    """A Laurent polynomial together with its construction context."""
    poly: LaurentPoly
    M: Tuple[Tuple[int, ...], ...]
    role: str
    center: Tuple[Fraction, ...]
    order: Optional[int] = None
    group: Optional[SymmetryGroup] = None
    orbit: Optional[OrbitStructure] = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown mask role {self.role!r}")

    @property
    def dimension(self):
        return self.poly.dimension

    def to_json_dict(self):
        out = {
            "poly": self.poly.to_json_dict(),
            "dilation": [list(r) for r in self.M],
            "center": [format_scalar(Fraction(x)) for x in self.center],
            "role": self.role,
        }
        if self.order is not None:
            out["order"] = self.order
        if self.group is not None:
            out["group_elements"] = [[list(r) for r in E]
                                     for E in self.group.elements]
        return out

    @classmethod
    def from_json_dict(cls, obj):
        poly = LaurentPoly.from_json_dict(obj["poly"])
        M = tuple(tuple(int(x) for x in r) for r in obj["dilation"])
        center = tuple(Fraction(parse_scalar(s)) for s in obj["center"])
        group = None
        if "group_elements" in obj:
            group = SymmetryGroup(tuple(
                tuple(tuple(int(x) for x in row) for row in E)
                for E in obj["group_elements"]))
        return cls(poly=poly, M=M, role=obj["role"], center=center,
                   order=obj.get("order"), group=group)

    def export_table(self):
        """Dense text table (2-d only) with the zero offset marked."""
        return format_table(self.poly)


@dataclass(frozen=True)
class SeedPolynomial:
    """Solution of the orbit-seed moment system on a lower-set support."""
    orbit_index: int
    poly: LaurentPoly
    order: int
    support: Tuple[Tuple[int, ...], ...]


def _conjugated(M, Minv, E):
    """M^-1 E M as an integer matrix."""
    d = len(M)
    EM = mat_mul(E, M)
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            x = sum(Minv[i][k] * EM[k][j] for k in range(d))
            if x.denominator != 1:
                raise ValueError("group is not compatible with the dilation")
            row.append(int(x))
        rows.append(tuple(row))
    return tuple(rows)


def build_seed(p: int, M, s_p0, n: int) -> SeedPolynomial:
    """Laurent polynomial G with moment_beta(G) = (-M^-1 s_{p,0})^beta on Delta_n.

    The support is the lower set Delta_n itself, translated to the integer
    point nearest the moment target and reflected per axis so the points lean
    toward it. Lower sets keep the multivariate Vandermonde system unisolvent.
    """
    if n < 1:
        raise ValueError("order must be at least 1")
    d = len(M)
    Minv = fraction_matrix_inverse(M)
    target = tuple(-sum(Minv[i][j] * s_p0[j] for j in range(d)) for i in range(d))
    t0 = tuple(math.floor(x + Fraction(1, 2)) for x in target)
    sign = tuple(-1 if target[i] < t0[i] else 1 for i in range(d))
    alphas = lower_set(n, d)
    points = [tuple(t0[i] + sign[i] * a[i] for i in range(d)) for a in alphas]
    A = [[Fraction(vec_pow(pt, beta)) for pt in points] for beta in alphas]
    b = [vec_pow(target, beta) for beta in alphas]
    try:
        g = exact_solve(A, b)
    except ValueError as exc:  # unreachable for a lower set, kept as a guard
        raise ValueError(f"seed moment system is singular: {exc}") from exc
    poly = LaurentPoly(d, {pt: v for pt, v in zip(points, g) if v != 0})
    return SeedPolynomial(p, poly, n, tuple(points))


def symmetrize_seed(seed: SeedPolynomial, orbit: Orbit,
                    orb: OrbitStructure) -> LaurentPoly:
    """Average the seed over the coset stabilizer:

        nu_{0,p,0}(xi) = (1/#stab) sum_F G((M^-1 F M)* xi) e^{2 pi i (r^F, xi)}.

    The average keeps the seed's moment conditions and gains the stabilizer
    symmetry the orbit channels need.
    """
    H = orb.group
    M = orb.M
    Minv = orb.digit_system.Minv
    acc = LaurentPoly(seed.poly.dimension)
    w = Fraction(1, len(orbit.stabilizer))
    for f in orbit.stabilizer:
        F = H.elements[f]
        term = seed.poly.substitute_linear(_conjugated(M, Minv, F))
        acc = acc + term.modulate(orbit.r_stab[f]).scale(w)
    return acc


def build_interpolatory_mask(H: SymmetryGroup, M, c=None, n: int = 1,
                             orb: Optional[OrbitStructure] = None) -> Mask:
    """H-symmetric interpolatory refinable mask with sum rule of order >= n.

    Channel 0 (the zero-coset orbit) is pinned to 1; every other orbit gets a
    symmetrized seed propagated by the transversal substitutions. The result
    is verified exactly (interpolatory, symmetric, sum rule, linear-phase
    moments) before being returned.
    """
    d = len(M)
    c = tuple(Fraction(x) for x in (c if c is not None else (0,) * d))
    if n < 1:
        raise ValueError("order must be at least 1")
    if not check_dilation_compatibility(H, M):
        raise ValueError("group is not compatible with the dilation")
    if orb is None:
        orb = orbit_decomposition(H, M, c)
    ds = orb.digit_system
    Minv = ds.Minv
    comps = []
    for p, o in enumerate(orb.orbits):
        if p == 0:
            comps.extend([LaurentPoly.one(d)] * len(o.digits))
            continue
        seed = build_seed(p, M, o.digits[0], n)
        nu0 = symmetrize_seed(seed, o, orb)
        comps.append(nu0)
        for i in range(1, len(o.digits)):
            E = H.elements[o.transversal[i]]
            comps.append(nu0.substitute_linear(_conjugated(M, Minv, E)))
    t = polyphase_merge(PolyphaseRow(ds, tuple(comps)))

    rep_checks = []
    if not is_interpolatory(t, M):
        rep_checks.append("interpolatory")
    w = h_symmetry_defect(t, H, c)
    if w is not None:
        rep_checks.append(f"h_symmetric (witness {w})")
    if sum_rule_order(t, ds, n_max=n) < n:
        rep_checks.append(f"sum_rule_order < {n}")
    if all(x == 0 for x in c) and linear_phase_moment_order(t, c, n_max=n) < n:
        rep_checks.append(f"linear_phase_moments < {n}")
    if rep_checks:
        raise VerificationError(
            "constructed mask failed exact verification: " + ", ".join(rep_checks))
    return Mask(poly=t, M=tuple(tuple(int(x) for x in r) for r in M),
                role="primal-refinable", center=c, order=n, group=H, orbit=orb)


def _require_refinable(m0: Mask):
    if m0.role != "primal-refinable":
        raise ValueError("dual construction needs a primal refinable mask")
    if not is_interpolatory(m0.poly, m0.M):
        raise ValueError("mask is not interpolatory")


def _orbit_of(m0: Mask) -> OrbitStructure:
    if m0.orbit is not None:
        return m0.orbit
    H = m0.group if m0.group is not None else SymmetryGroup(
        (tuple(tuple(1 if i == j else 0 for j in range(m0.dimension))
               for i in range(m0.dimension)),))
    return orbit_decomposition(H, m0.M, m0.center)


def _verify_dual(m0: Mask, dual_poly: LaurentPoly, ds: DigitSystem,
                 order_claim: int) -> None:
    w = duality_defect(m0.poly, dual_poly, ds)
    if w is not None:
        raise VerificationError(f"duality identity failed: defect {w!r}")
    if m0.group is not None:
        wd = h_symmetry_defect(dual_poly, m0.group, m0.center)
        if wd is not None:
            raise VerificationError(f"dual lost the symmetry: witness {wd}")
    if sum_rule_order(dual_poly, ds, n_max=order_claim) < order_claim:
        raise VerificationError(f"dual sum rule dropped below {order_claim}")


def build_dual_mask(m0: Mask) -> Mask:
    """Dual refinable mask: keep the nonzero polyphase components, replace
    the first one by nu~_00 = m - sum_{k>=1} nu_0k conjugate_reflect(nu_0k).

    The dual inherits the sum rule order and the symmetry of m0, and the
    scaled duality identity holds as an exact polynomial identity.
    """
    _require_refinable(m0)
    orb = _orbit_of(m0)
    ds = orb.digit_system
    row = polyphase_split(m0.poly, ds)
    acc = LaurentPoly.one(m0.dimension).scale(ds.m)
    for comp in row.components[1:]:
        acc = acc - comp * comp.conjugate_reflect()
    dual = polyphase_merge(PolyphaseRow(ds, (acc,) + row.components[1:]))
    _verify_dual(m0, dual, ds, m0.order or 1)
    return Mask(poly=dual, M=m0.M, role="dual-refinable", center=m0.center,
                order=m0.order, group=m0.group, orbit=orb)


def build_dual_mask_low_order(m0: Mask, n_dual: int) -> Mask:
    """Dual refinable mask with a smaller construction order (and support).

    Builds an independent interpolatory mask of order n_dual, then replaces
    its first scaled component by
    nu~_00 = m - sum_{k>=1} conjugate_reflect(nu_0k) nu~_0k, which restores
    the exact duality identity with m0 regardless of n_dual.
    """
    _require_refinable(m0)
    if n_dual < 1:
        raise ValueError("dual order must be at least 1")
    if m0.group is None:
        raise ValueError("low-order duals need the symmetry group of m0")
    orb = _orbit_of(m0)
    ds = orb.digit_system
    t_low = build_interpolatory_mask(m0.group, m0.M, m0.center, n_dual, orb=orb)
    row = polyphase_split(m0.poly, ds)
    drow = polyphase_split(t_low.poly, ds)
    acc = LaurentPoly.one(m0.dimension).scale(ds.m)
    for comp, dcomp in zip(row.components[1:], drow.components[1:]):
        acc = acc - comp.conjugate_reflect() * dcomp
    dual = polyphase_merge(PolyphaseRow(ds, (acc,) + drow.components[1:]))
    _verify_dual(m0, dual, ds, 1)
    return Mask(poly=dual, M=m0.M, role="dual-refinable", center=m0.center,
                order=min(n_dual, m0.order or n_dual), group=m0.group, orbit=orb)
