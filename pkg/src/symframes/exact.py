"""Exact scalar arithmetic over Q and the cyclotomic fields Q(zeta_L).

Every quantity in this package that has to be *checked* (sum rules,
duality products, extension identities) is computed over an exact field.
Plain rationals are ``fractions.Fraction``; values that genuinely involve
roots of unity live in ``Cyclotomic``, the field Q[x]/(Phi_L(x)) in the
power basis 1, zeta, ..., zeta^(phi(L)-1) with zeta = exp(2*pi*i/L).

Normalisation rules, applied by every constructor and every operation:

* a ``Cyclotomic`` whose non-constant coordinates all vanish is demoted
  to a ``Fraction``;
* conductors 1 and 2 are always demoted (zeta_1 = 1, zeta_2 = -1);
* mixed-conductor arithmetic promotes both operands to the lcm.

Because of the demotion rule a rational value never hides inside a
``Cyclotomic``, so ``==`` between the two kinds can simply be False.
``Cyclotomic`` is deliberately unhashable; use the serialised form as a
dict key if one is ever needed.
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Tuple, Union

ExactScalar = Union[Fraction, "Cyclotomic"]

__all__ = [
    "ExactScalar",
    "Cyclotomic",
    "cyclotomic_polynomial",
    "euler_phi",
    "zeta",
    "conj",
    "promote",
    "demote",
    "as_scalar",
    "parse_scalar",
    "format_scalar",
    "to_complex",
    "scalar_is_rational",
]


# ---------------------------------------------------------------------------
# integer / rational polynomial helpers (ascending coefficient tuples)
# ---------------------------------------------------------------------------

def _int_poly_div_exact(num, den):
    """Divide integer polynomials exactly; den must be monic. Returns quotient."""
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        q = num[i]
        out[i - dn] = q
        if q:
            for j, dj in enumerate(den):
                num[i - dn + j] -= q * dj
    if any(num[:dn]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(L: int) -> Tuple[int, ...]:
    """Coefficients of Phi_L, ascending, as integers.

    Computed by the divisor recursion Phi_L = (x^L - 1) / prod_{d|L, d<L} Phi_d,
    which stays in integer arithmetic throughout (every Phi_d is monic).
    """
    if L < 1:
        raise ValueError("conductor must be a positive integer")
    num = [0] * (L + 1)
    num[0], num[L] = -1, 1  # x^L - 1
    for d in range(1, L):
        if L % d == 0:
            num = _int_poly_div_exact(num, cyclotomic_polynomial(d))
    return tuple(num)


def euler_phi(L: int) -> int:
    """Euler totient, read off as deg Phi_L."""
    return len(cyclotomic_polynomial(L)) - 1


def _reduce_mod_phi(coeffs, L):
    """Reduce an ascending Fraction-coefficient list modulo Phi_L."""
    phi = cyclotomic_polynomial(L)
    n = len(phi) - 1
    work = list(coeffs)
    for i in range(len(work) - 1, n - 1, -1):
        q = work[i]
        if q:
            for j in range(n + 1):
                work[i - n + j] -= q * phi[j]
    work = work[:n]
    while len(work) < n:
        work.append(Fraction(0))
    return work


def _poly_xgcd_mod_phi(coeffs, L):
    """Inverse of the residue `coeffs` in Q[x]/Phi_L via the extended Euclid run.

    Phi_L is irreducible over Q, so any nonzero residue is invertible.
    """
    def trim(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    def pdivmod(a, b):
        a = list(a)
        db = len(b) - 1
        q = [Fraction(0)] * max(1, len(a) - db)
        inv_lead = 1 / b[-1]
        for i in range(len(a) - 1, db - 1, -1):
            c = a[i] * inv_lead
            if c:
                q[i - db] = c
                for j in range(db + 1):
                    a[i - db + j] -= c * b[j]
        return q, trim(a)

    r0 = [Fraction(c) for c in cyclotomic_polynomial(L)]
    r1 = trim([Fraction(c) for c in coeffs])
    if not r1:
        raise ZeroDivisionError("division by zero in cyclotomic field")
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        # s_{k+1} = s_{k-1} - q*s_k
        prod = [Fraction(0)] * (len(q) + len(s1) - 1) if s1 else []
        for i, qi in enumerate(q):
            if qi:
                for j, sj in enumerate(s1):
                    prod[i + j] += qi * sj
        nxt = [Fraction(0)] * max(len(s0), len(prod))
        for i, c in enumerate(s0):
            nxt[i] += c
        for i, c in enumerate(prod):
            nxt[i] -= c
        s0, s1 = s1, trim(nxt)
    # r1 is a nonzero constant: scale s1 so that s1*a = 1 mod Phi
    scale = 1 / r1[0]
    return [c * scale for c in s1]


# ---------------------------------------------------------------------------
# the Cyclotomic class
# ---------------------------------------------------------------------------

class Cyclotomic:
    """An element of Q(zeta_L) in the power basis modulo Phi_L.

    Instances are immutable and always normalised (see module docstring);
    construct through :func:`zeta`, arithmetic, or :meth:`from_coeffs`.
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Tuple[Fraction, ...]):
        # assumes coeffs already reduced and non-rational; external code
        # should go through from_coeffs
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *a):
        raise AttributeError("Cyclotomic is immutable")

    @classmethod
    def from_coeffs(cls, conductor, coeffs) -> ExactScalar:
        """Build from an ascending coefficient sequence, normalising fully."""
        if conductor < 1:
            raise ValueError("conductor must be a positive integer")
        red = _reduce_mod_phi([Fraction(c) for c in coeffs], conductor)
        if conductor <= 2 or all(c == 0 for c in red[1:]):
            if conductor == 2:
                # basis is {1}; value is red[0] evaluated at zeta=-1... but the
                # reduction already folded zeta=-1 in via Phi_2 = x+1
                return red[0]
            return red[0]
        return cls(conductor, tuple(red))

    # -- basic protocol ----------------------------------------------------

    def __repr__(self):
        return f"Cyclotomic({self.conductor}, {self.coeffs})"

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            if self.conductor == other.conductor:
                return self.coeffs == other.coeffs
            L = _lcm(self.conductor, other.conductor)
            return promote(self, L) == promote(other, L)
        if isinstance(other, (int, Fraction)):
            return False  # normalised Cyclotomic is never rational-valued
        return NotImplemented

    __hash__ = None  # mutable-looking values as dict keys invite bugs

    def __bool__(self):
        return True  # zero always demotes to Fraction(0)

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other):
        """Return (a_coeffs, b_coeffs, L) with both operands in conductor L."""
        if isinstance(other, (int, Fraction)):
            n = len(self.coeffs)
            oc = [Fraction(other)] + [Fraction(0)] * (n - 1)
            return list(self.coeffs), oc, self.conductor
        if isinstance(other, Cyclotomic):
            L = _lcm(self.conductor, other.conductor)
            a = _promote_coeffs(self, L)
            b = _promote_coeffs(other, L)
            return a, b, L
        return None

    def __add__(self, other):
        co = self._coerce(other)
        if co is None:
            return NotImplemented
        a, b, L = co
        return Cyclotomic.from_coeffs(L, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.conductor, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        co = self._coerce(other)
        if co is None:
            return NotImplemented
        a, b, L = co
        return Cyclotomic.from_coeffs(L, [x - y for x, y in zip(a, b)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            if f == 0:
                return Fraction(0)
            return Cyclotomic(self.conductor, tuple(c * f for c in self.coeffs))
        co = self._coerce(other)
        if co is None:
            return NotImplemented
        a, b, L = co
        prod = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        return Cyclotomic.from_coeffs(L, prod)

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        inv = _poly_xgcd_mod_phi(list(self.coeffs), self.conductor)
        return Cyclotomic.from_coeffs(self.conductor, inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return Cyclotomic(self.conductor, tuple(c / f for c in self.coeffs))
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return Fraction(1)
        base: ExactScalar = self if n > 0 else self.inverse()
        n = abs(n)
        out: ExactScalar = Fraction(1)
        while n:
            if n & 1:
                out = base * out if isinstance(base, Cyclotomic) else out * base
            n >>= 1
            if n:
                base = base * base
        return out

    # -- field-specific operations ------------------------------------------

    def conjugate(self) -> ExactScalar:
        """Complex conjugate: substitute zeta -> zeta^(L-1) = 1/zeta."""
        L = self.conductor
        out = [Fraction(0)] * ((L - 1) * (len(self.coeffs) - 1) + 1)
        for j, c in enumerate(self.coeffs):
            if c:
                out[j * (L - 1)] += c
        return Cyclotomic.from_coeffs(L, out)


def _lcm(a, b):
    return a // gcd(a, b) * b


def _promote_coeffs(x: Cyclotomic, L: int):
    """Coefficients of x viewed in conductor L (L a multiple of x.conductor)."""
    k = L // x.conductor
    out = [Fraction(0)] * ((len(x.coeffs) - 1) * k + 1)
    for j, c in enumerate(x.coeffs):
        out[j * k] = c
    return _reduce_mod_phi(out, L)


# ---------------------------------------------------------------------------
# module-level API working uniformly on ExactScalar
# ---------------------------------------------------------------------------

def zeta(L: int) -> ExactScalar:
    """The primitive root exp(2*pi*i/L), demoted to Fraction for L <= 2."""
    if L < 1:
        raise ValueError("conductor must be a positive integer")
    if L == 1:
        return Fraction(1)
    if L == 2:
        return Fraction(-1)
    n = euler_phi(L)
    coeffs = [Fraction(0)] * n
    coeffs[1] = Fraction(1)
    return Cyclotomic(L, tuple(coeffs))


def conj(x: ExactScalar) -> ExactScalar:
    """Complex conjugation; the identity on rationals."""
    if isinstance(x, Cyclotomic):
        return x.conjugate()
    return Fraction(x)


def promote(x: ExactScalar, L: int) -> ExactScalar:
    """View x in conductor L. L must be a multiple of the current conductor."""
    if isinstance(x, (int, Fraction)):
        n = euler_phi(L)
        coeffs = [Fraction(x)] + [Fraction(0)] * (n - 1)
        return Cyclotomic.from_coeffs(L, coeffs)
    if L % x.conductor:
        raise ValueError(f"cannot promote conductor {x.conductor} into {L}")
    return Cyclotomic.from_coeffs(L, _promote_coeffs(x, L))


def demote(x: ExactScalar, L: int) -> ExactScalar:
    """Express x in the subfield Q(zeta_L), or raise ValueError if it is not there.

    Solves the exact linear system whose columns are the conductor-L' power
    basis images of 1, zeta_L, ..., zeta_L^(phi(L)-1).
    """
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    Lbig = x.conductor
    if Lbig % L:
        raise ValueError(f"{L} does not divide the current conductor {Lbig}")
    nb = euler_phi(Lbig)
    ns = euler_phi(L)
    # column j = coeffs of zeta_L^j inside conductor Lbig
    cols = []
    zl = promote(zeta(L), Lbig) if L > 2 else None
    acc: ExactScalar = Fraction(1)
    for j in range(ns):
        if isinstance(acc, Cyclotomic):
            cols.append(_promote_coeffs(acc, Lbig))
        else:
            cols.append([Fraction(acc)] + [Fraction(0)] * (nb - 1))
        if zl is not None:
            acc = acc * zl if isinstance(acc, Cyclotomic) else zl * acc
        else:
            acc = acc * zeta(L)
    # solve cols * y = x.coeffs by Gaussian elimination over Q
    A = [[cols[j][i] for j in range(ns)] + [x.coeffs[i]] for i in range(nb)]
    row = 0
    pivots = []
    for col in range(ns):
        piv = next((r for r in range(row, nb) if A[r][col] != 0), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = 1 / A[row][col]
        A[row] = [v * inv for v in A[row]]
        for r in range(nb):
            if r != row and A[r][col] != 0:
                f = A[r][col]
                A[r] = [v - f * w for v, w in zip(A[r], A[row])]
        pivots.append(col)
        row += 1
    # consistency: zero rows must have zero rhs
    for r in range(row, nb):
        if A[r][ns] != 0:
            raise ValueError(f"value is not in the subfield Q(zeta_{L})")
    y = [Fraction(0)] * ns
    for r, col in enumerate(pivots):
        y[col] = A[r][ns]
    return Cyclotomic.from_coeffs(L, y)


def as_scalar(x) -> ExactScalar:
    """Coerce int / Fraction / Cyclotomic / string into an ExactScalar."""
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as an exact scalar")


def scalar_is_rational(x: ExactScalar) -> bool:
    return isinstance(x, (int, Fraction))


def format_scalar(x: ExactScalar) -> str:
    """Canonical text form: 'p/q' (or 'p') for rationals,
    'zeta(L):[c0,c1,...]' with phi(L) rational entries otherwise."""
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return "zeta(%d):[%s]" % (x.conductor, ",".join(str(c) for c in x.coeffs))


def parse_scalar(s: str) -> ExactScalar:
    """Inverse of :func:`format_scalar`. Accepts only the canonical grammar."""
    s = s.strip()
    if not s:
        raise ValueError("empty scalar")
    if s.startswith("zeta("):
        close = s.index(")")
        L = int(s[5:close])
        rest = s[close + 1:]
        if not (rest.startswith(":[") and rest.endswith("]")):
            raise ValueError(f"malformed cyclotomic literal: {s!r}")
        body = rest[2:-1]
        parts = body.split(",") if body else []
        if L < 1 or len(parts) != euler_phi(L):
            raise ValueError(
                f"cyclotomic literal must carry exactly phi(L) coefficients: {s!r}")
        return Cyclotomic.from_coeffs(L, [Fraction(p) for p in parts])
    return Fraction(s)


def to_complex(x: ExactScalar) -> complex:
    """Float image for cross-checks and numeric pipelines. Never used in proofs."""
    if isinstance(x, (int, Fraction)):
        return complex(float(x), 0.0)
    import cmath
    z = cmath.exp(2j * cmath.pi / x.conductor)
    acc = 0j
    for c in reversed(x.coeffs):
        acc = acc * z + float(c)
    return acc
