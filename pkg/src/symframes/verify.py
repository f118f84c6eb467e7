"""Exact property checkers for masks, polyphase rows, and filter banks.

Every checker here works purely in exact arithmetic; floating point never
decides a property. Checkers that can fail return a concrete witness
(offending multi-index, group element, digit, or matrix entry) through the
``*_defect`` variants; the plain ``check_*`` / ``*_order`` forms are thin
wrappers for call sites that only need the verdict.

Two independent routes exist for sum rules on purpose: the polyphase-moment
criterion (`sum_rule_order`) and a direct root-of-unity evaluation of the
defining derivative conditions (`sum_rule_order_bruteforce`). They must
agree; tests and the acceptance suite compare them rather than trusting one.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .exact import Cyclotomic, conj as scalar_conj, format_scalar, zeta
from .lattice import DigitSystem, OrbitStructure, SymmetryGroup, default_digits
from .laurent import (
    LaurentPoly,
    PolyphaseRow,
    lower_set,
    mi_binom,
    mi_leq,
    polyphase_split,
    vec_pow,
)
from .linalg import fraction_matrix_inverse, integer_det, mat_mul

__all__ = [
    "VerificationError",
    "VerificationReport",
    "is_interpolatory",
    "sum_rule_order",
    "sum_rule_order_bruteforce",
    "vanishing_moment_order",
    "linear_phase_moment_order",
    "check_h_symmetric",
    "h_symmetry_defect",
    "check_generalized_symmetry",
    "check_polyphase_symmetry",
    "polyphase_symmetry_defect",
    "check_duality",
    "duality_defect",
    "check_mep",
    "mep_defect",
    "refinable_mask_report",
    "dual_pair_report",
]


class VerificationError(Exception):
    """An exact post-construction obligation failed; carries the defect."""


# ---------------------------------------------------------------------------
# report container
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    """Named check results; failing entries always carry a witness."""
    checks: dict = field(default_factory=dict)

    def add(self, name, passed, witness=None):
        self.checks[name] = {"pass": bool(passed), "witness": witness}

    @property
    def ok(self):
        return all(c["pass"] for c in self.checks.values())

    def to_json_dict(self):
        return {"ok": self.ok, "checks": self.checks}

    def lines(self):
        out = []
        for name in sorted(self.checks):
            c = self.checks[name]
            tag = "PASS" if c["pass"] else "FAIL"
            w = "" if c["witness"] is None else f"  ({c['witness']})"
            out.append(f"{name}: {tag}{w}")
        return out


# ---------------------------------------------------------------------------
# elementary mask properties
# ---------------------------------------------------------------------------

def is_interpolatory(t: LaurentPoly, M) -> bool:
    """h_{M beta} = delta_{beta,0}/m in coefficient form."""
    m = abs(integer_det(M))
    Minv = fraction_matrix_inverse(M)
    d = t.dimension
    if t.coeff((0,) * d) != Fraction(1, m):
        return False
    for k, _v in t.terms():
        if all(x == 0 for x in k):
            continue
        pre = tuple(sum(Minv[i][j] * k[j] for j in range(d)) for i in range(d))
        if all(x.denominator == 1 for x in pre):
            return False  # a nonzero coefficient sits on the M-sublattice
    return True


def _degree_slices(n_max, d):
    """Multi-indices grouped by total degree 0..n_max-1 (graded lex inside)."""
    full = lower_set(n_max, d)
    slices = [[] for _ in range(n_max)]
    for a in full:
        slices[sum(a)].append(a)
    return slices


def sum_rule_order(t: LaurentPoly, ds: DigitSystem, n_max: int = 8) -> int:
    """Largest n <= n_max with the polyphase moment criterion satisfied:

        moment_beta(nu_k) = sum_{alpha<=beta} lambda_alpha C(beta,alpha)
                            (-M^-1 s_k)^(beta-alpha)   for all beta in Delta_n,

    where lambda_alpha is the dilated moment of t.
    """
    d = t.dimension
    row = polyphase_split(t, ds)
    lam = {a: t.dilated_moment(ds.M, a) for a in lower_set(n_max, d)}
    neg_ms = []
    for s in ds.digits:
        neg_ms.append(tuple(
            -sum(ds.Minv[i][j] * s[j] for j in range(d)) for i in range(d)
        ))
    slices = _degree_slices(n_max, d)
    for n in range(1, n_max + 1):
        for beta in slices[n - 1]:
            for k in range(ds.m):
                target = Fraction(0)
                for alpha in lower_set(sum(beta) + 1, d):
                    if mi_leq(alpha, beta):
                        diff = tuple(b - a for b, a in zip(beta, alpha))
                        target = target + lam[alpha] * mi_binom(beta, alpha) \
                            * vec_pow(neg_ms[k], diff)
                if row.components[k].moment(beta) != target:
                    return n - 1
    return n_max


def sum_rule_order_bruteforce(t: LaurentPoly, M, n_max: int = 8) -> int:
    """Independent route: evaluate the defining derivative sums

        sum_k h_k (M^-1 k)^beta e^{2 pi i (M^-1 k, s)} = 0

    for every nonzero digit s of M* and every beta in Delta_n, using exact
    roots of unity for the exponentials.
    """
    d = t.dimension
    Mt = tuple(tuple(M[j][i] for j in range(d)) for i in range(d))
    star_digits = default_digits(Mt).digits[1:]
    Minv = fraction_matrix_inverse(M)
    pre = []
    for k, v in t.terms():
        w = tuple(sum(Minv[i][j] * k[j] for j in range(d)) for i in range(d))
        pre.append((w, v))
    slices = _degree_slices(n_max, d)
    for n in range(1, n_max + 1):
        for beta in slices[n - 1]:
            for s in star_digits:
                total = Fraction(0)
                for w, v in pre:
                    p = vec_pow(w, beta)
                    if p == 0:
                        continue
                    e = sum(Fraction(x) * y for x, y in zip(w, s))
                    q = e.denominator
                    rot = zeta(q) ** (e.numerator % q) if q > 1 else Fraction(1)
                    total = total + v * p * rot
                if total != 0:
                    return n - 1
    return n_max


def vanishing_moment_order(t: LaurentPoly, n_max: int = 8) -> int:
    """Largest n with moment_beta(t) = 0 for all beta in Delta_n."""
    slices = _degree_slices(n_max, t.dimension)
    for n in range(1, n_max + 1):
        for beta in slices[n - 1]:
            if t.moment(beta) != 0:
                return n - 1
    return n_max


def linear_phase_moment_order(t: LaurentPoly, c, n_max: int = 8) -> int:
    """Largest n with moment_beta(t) = c^beta for all beta in Delta_n."""
    c = tuple(Fraction(x) for x in c)
    slices = _degree_slices(n_max, t.dimension)
    for n in range(1, n_max + 1):
        for beta in slices[n - 1]:
            if t.moment(beta) != vec_pow(c, beta):
                return n - 1
    return n_max


# ---------------------------------------------------------------------------
# symmetry checks
# ---------------------------------------------------------------------------

def h_symmetry_defect(t: LaurentPoly, H: SymmetryGroup, c):
    """None if h_k = h_{E(k-c)+c} for all E in H; else (E, k) witness."""
    d = t.dimension
    c = tuple(Fraction(x) for x in c)
    cmap = dict(t.terms())
    for E in H.elements:
        shift = tuple(c[i] - sum(Fraction(E[i][j]) * c[j] for j in range(d))
                      for i in range(d))
        if any(x.denominator != 1 for x in shift):
            return (E, "center")
        shift = tuple(int(x) for x in shift)
        for k, v in cmap.items():
            kk = tuple(
                sum(E[i][j] * k[j] for j in range(d)) + shift[i] for i in range(d)
            )
            if cmap.get(kk, Fraction(0)) != v:
                return (E, k)
    return None


def check_h_symmetric(t, H, c) -> bool:
    return h_symmetry_defect(t, H, c) is None


def _scalar_div(a, b):
    if isinstance(b, Fraction):
        return a * (Fraction(1) / b)
    return a * b.inverse()


def check_generalized_symmetry(t: LaurentPoly, E) -> Optional[Tuple[object, tuple]]:
    """Find (eps, r) with t(E* xi) = eps e^{2 pi i (r, xi)} t(xi), or None.

    r comes from aligning the lexicographically least support points (a
    translation-equivariant anchor), eps from the coefficient ratio there;
    both are then verified against the whole coefficient map, and eps must
    be unimodular (eps conj(eps) = 1).
    """
    if t.is_zero():
        return (Fraction(1), (0,) * t.dimension)
    u = t.substitute_linear(E)
    st, su = min(t.support()), min(u.support())
    r = tuple(a - b for a, b in zip(su, st))
    eps = _scalar_div(u.coeff(su), t.coeff(st))
    if eps * scalar_conj(eps) != 1:
        return None
    if t.scale(eps).modulate(r) != u:
        return None
    return (eps, r)


def polyphase_symmetry_defect(row: PolyphaseRow, orb: OrbitStructure):
    """None if nu_{p,i}((M^-1 K M)* xi) = e^{2 pi i (r^K_{p,i}, xi)} nu_{p,j}(xi)
    for all K in H and all channels (p,i); else witness (K, p, i)."""
    H = orb.group
    M = orb.M
    Minv = orb.digit_system.Minv
    d = orb.group.dimension
    comps = row.components
    for kidx, K in enumerate(H.elements):
        KM = mat_mul(K, M)
        pre = tuple(
            tuple(sum(Minv[i][j] * KM[j][jj] for j in range(d)) for jj in range(d))
            for i in range(d)
        )
        if any(x.denominator != 1 for r in pre for x in r):
            raise ValueError("group is not compatible with the dilation")
        conj_K = tuple(tuple(int(x) for x in r) for r in pre)
        for p, o in enumerate(orb.orbits):
            for i in range(len(o.digits)):
                j, r = o.jr[(i, kidx)]
                # K s_{p,i} = M r + s_{p,j} + Kc - c translates to
                # nu_{p,i}((M^-1 K M)* xi) = e^{-2 pi i (r, xi)} nu_{p,j}(xi)
                lhs = comps[orb.channel_index[(p, i)]].substitute_linear(conj_K)
                rhs = comps[orb.channel_index[(p, j)]].modulate(tuple(-x for x in r))
                if lhs != rhs:
                    return (K, p, i)
    return None


def check_polyphase_symmetry(row, orb) -> bool:
    return polyphase_symmetry_defect(row, orb) is None


# ---------------------------------------------------------------------------
# duality and the mixed extension principle
# ---------------------------------------------------------------------------

def duality_defect(m0: LaurentPoly, m0_dual: LaurentPoly, ds: DigitSystem):
    """None if sum_k nu_{0k} conjugate_reflect(nu~_{0k}) = m identically;
    otherwise the defect polynomial."""
    row = polyphase_split(m0, ds)
    drow = polyphase_split(m0_dual, ds)
    acc = LaurentPoly(m0.dimension)
    for a, b in zip(row.components, drow.components):
        acc = acc + a * b.conjugate_reflect()
    target = LaurentPoly.one(m0.dimension).scale(ds.m)
    if acc != target:
        return acc - target
    return None


def check_duality(m0, m0_dual, ds) -> bool:
    return duality_defect(m0, m0_dual, ds) is None


def mep_defect(primals, duals, ds: DigitSystem):
    """None if N* N~ = m I_m as an exact polynomial identity, where row nu of
    N / N~ is the scaled polyphase row of primals[nu] / duals[nu]; otherwise
    a witness (k, l, defect polynomial)."""
    if len(primals) != ds.m or len(duals) != ds.m:
        raise ValueError(f"bank must have exactly m={ds.m} masks per side")
    d = ds.dimension
    N = [polyphase_split(t, ds).components for t in primals]
    Nd = [polyphase_split(t, ds).components for t in duals]
    Nconj = [[comp.conjugate_reflect() for comp in rowc] for rowc in N]
    for k in range(ds.m):
        for l in range(ds.m):
            acc = LaurentPoly(d)
            for nu in range(ds.m):
                acc = acc + Nconj[nu][k] * Nd[nu][l]
            want = LaurentPoly.one(d).scale(ds.m) if k == l else LaurentPoly(d)
            if acc != want:
                return (k, l, acc - want)
    return None


def check_mep(primals, duals, ds) -> bool:
    return mep_defect(primals, duals, ds) is None


# ---------------------------------------------------------------------------
# report aggregators
# ---------------------------------------------------------------------------

def _witness_json(w):
    if w is None:
        return None
    if isinstance(w, LaurentPoly):
        return w.to_json_dict()
    if isinstance(w, (Fraction, Cyclotomic)):
        return format_scalar(w)
    if isinstance(w, tuple):
        return [_witness_json(x) for x in w]
    return w


def refinable_mask_report(t, H, M, c=(0,), n_expected=None, n_max=8,
                          orb=None) -> VerificationReport:
    """Default verification suite for a refinable mask candidate."""
    rep = VerificationReport()
    d = t.dimension
    c = tuple(Fraction(x) for x in c) if len(c) == d else (Fraction(0),) * d
    rep.add("normalization", t.moment((0,) * d) == 1)
    rep.add("interpolatory", is_interpolatory(t, M))
    w = h_symmetry_defect(t, H, c)
    rep.add("h_symmetric", w is None, _witness_json(w))
    if orb is None:
        from .lattice import orbit_decomposition
        orb = orbit_decomposition(H, M, c)
    n = sum_rule_order(t, orb.digit_system, n_max)
    rep.add("sum_rule_order", n >= (n_expected or 1), n)
    lp = linear_phase_moment_order(t, c, n_max)
    rep.add("linear_phase_moments", lp >= (n_expected or 1), lp)
    w = polyphase_symmetry_defect(polyphase_split(t, orb.digit_system), orb)
    rep.add("polyphase_symmetry", w is None, _witness_json(w))
    return rep


def dual_pair_report(m0, m0_dual, ds, H=None, c=None, n_expected=None,
                     n_max=8) -> VerificationReport:
    """Verification suite for a (primal, dual) refinable pair."""
    rep = VerificationReport()
    d = m0.dimension
    w = duality_defect(m0, m0_dual, ds)
    rep.add("duality", w is None, _witness_json(w))
    rep.add("dual_normalization", m0_dual.moment((0,) * d) == 1)
    n = sum_rule_order(m0_dual, ds, n_max)
    rep.add("dual_sum_rule_order", n >= (n_expected or 1), n)
    if H is not None:
        cc = c if c is not None else (0,) * d
        wd = h_symmetry_defect(m0_dual, H, cc)
        rep.add("dual_h_symmetric", wd is None, _witness_json(wd))
    return rep
