"""Periodic filter bank transforms and the subdivision renderer.

Signals live on the quotient Z^d / M^J Z^d and are indexed through the
J-term digit expansion alpha = sum_{j<J} M^j s_{k_j}, which turns the
quotient into a flat array of m^J doubles. Analysis and synthesis are the
direct (non FFT) convolutions

    y_nu[beta] = m * sum_alpha conj(h~_nu[alpha - M beta]) x[alpha]
    x^[alpha]  = sum_nu sum_beta h_nu[alpha - M beta] y_nu[beta]

with periodic wraparound supplied by the codec itself; for a bank that
satisfies the extension principle identity exactly, reconstruction error is
pure floating-point noise. Filters are exact and converted to floats once
per call; the signal path is float64 (complex128 when a bank has genuinely
complex coefficients).

The renderer iterates the subdivision operator

    c^(j+1)_alpha = m * sum_beta h_{alpha - M beta} c^(j)_beta

from the delta sequence, either in exact rational arithmetic or in floats,
and tags every sample with its exact dyadic-style coordinate M^-J alpha.
"""

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Tuple

import numpy as np

from .exact import to_complex
from .lattice import DigitSystem, default_digits
from .laurent import LaurentPoly
from .linalg import (
    exact_solve,
    fraction_matrix_inverse,
    identity_matrix,
    integer_det,
    mat_mul,
    mat_vec,
)
from .masks import Mask

__all__ = [
    "GridCodec",
    "grid_codec",
    "PeriodicSignal",
    "LevelBands",
    "SubbandPyramid",
    "analyze",
    "synthesize",
    "CascadeResult",
    "render_refinable",
    "refinable_support_box",
    "write_signal",
    "read_signal",
    "write_signal_csv",
    "read_signal_csv",
]


# ---------------------------------------------------------------------------
# index codec for Z^d / M^J Z^d
# ---------------------------------------------------------------------------

class GridCodec:
    """Bijection between 0..m^J-1 and representatives of Z^d / M^J Z^d.

    decode(i) expands i in base m and maps the digit string through
    alpha = sum_j M^j s_{k_j}; encode peels digits off an arbitrary integer
    vector, so it also acts as the periodization map Z^d -> representatives.
    J = 0 is allowed internally (a single cell) although the public
    grid_codec entry point insists on J >= 1.
    """

    def __init__(self, M, J: int, digit_system: Optional[DigitSystem] = None):
        if J < 0:
            raise ValueError("J must be nonnegative")
        self.ds = digit_system if digit_system is not None else default_digits(M)
        self.M = self.ds.M
        self.J = J
        self.d = self.ds.dimension
        self.m = self.ds.m
        self.size = self.m ** J
        self._powers = [identity_matrix(self.d)]
        for _ in range(J):
            self._powers.append(mat_mul(self.M, self._powers[-1]))
        # integer inverse step: M^-1 v = adj(M) v / det(M)
        det = integer_det(self.M)
        inv = fraction_matrix_inverse(self.M)
        self._adj = tuple(tuple(int(inv[i][j] * det) for j in range(self.d))
                          for i in range(self.d))
        self._det = det
        self._reps = tuple(self._expand(i) for i in range(self.size))
        self._index = {v: i for i, v in enumerate(self._reps)}

    def _expand(self, i: int):
        alpha = (0,) * self.d
        for j in range(self.J):
            s = self.ds.digits[(i // self.m ** j) % self.m]
            step = mat_vec(self._powers[j], s)
            alpha = tuple(a + b for a, b in zip(alpha, step))
        return alpha

    def decode(self, i: int):
        return self._reps[i]

    def encode(self, alpha) -> int:
        alpha = tuple(int(x) for x in alpha)
        got = self._index.get(alpha)
        if got is not None:
            return got
        i = 0
        v = alpha
        for j in range(self.J):
            k = self.ds.index_of(v)
            i += k * self.m ** j
            s = self.ds.digits[k]
            w = tuple(x - y for x, y in zip(v, s))
            v = tuple(sum(self._adj[r][c] * w[c] for c in range(self.d))
                      // self._det for r in range(self.d))
        return i

    def representatives(self):
        return self._reps


def grid_codec(M, J: int, digit_system: Optional[DigitSystem] = None) -> GridCodec:
    if J < 1:
        raise ValueError("J must be at least 1")
    return GridCodec(M, J, digit_system)


# ---------------------------------------------------------------------------
# signals and pyramids
# ---------------------------------------------------------------------------

class PeriodicSignal:
    """Real double-precision samples on Z^d / M^J Z^d in codec order."""

    def __init__(self, M, J: int, values, codec: Optional[GridCodec] = None):
        self.codec = codec if codec is not None else GridCodec(M, J)
        self.M = self.codec.M
        self.J = J
        vals = np.asarray(values, dtype=np.float64)
        if vals.shape != (self.codec.size,):
            raise ValueError(f"expected {self.codec.size} samples, "
                             f"got shape {vals.shape}")
        self.values = vals

    @classmethod
    def constant(cls, M, J: int, value: float = 1.0):
        codec = GridCodec(M, J)
        return cls(M, J, np.full(codec.size, float(value)), codec)

    @classmethod
    def delta(cls, M, J: int, alpha=None):
        codec = GridCodec(M, J)
        vals = np.zeros(codec.size)
        if alpha is None:
            alpha = (0,) * codec.d
        vals[codec.encode(alpha)] = 1.0
        return cls(M, J, vals, codec)

    def sample(self, alpha) -> float:
        return float(self.values[self.codec.encode(alpha)])


@dataclass
class LevelBands:
    """Wavelet subbands of one analysis step, channel-tagged by (p, i)."""
    level: int
    wavelets: Dict[Tuple[int, int], np.ndarray]


@dataclass
class SubbandPyramid:
    M: tuple
    J: int
    depth: int
    levels: List[LevelBands]
    coarse: np.ndarray

    def total_samples(self) -> int:
        n = int(self.coarse.size)
        for lv in self.levels:
            for band in lv.wavelets.values():
                n += int(band.size)
        return n


def _filter_taps(t: LaurentPoly):
    """Coefficient dict as floats; complex only when truly complex."""
    taps = {}
    is_complex = False
    for k in t.support():
        z = to_complex(t.coeff(k))
        if z.imag != 0.0:
            is_complex = True
        taps[k] = z
    if not is_complex:
        taps = {k: z.real for k, z in taps.items()}
    return taps, is_complex


class _StepPlan:
    """Gather tables for one analysis/synthesis step at a fixed level.

    For channel nu, row b of ``idx[nu]`` lists the fine-grid indices of
    M beta_b + gamma over the filter taps gamma, so the whole convolution
    becomes one fancy-indexing contraction per channel. Each output cell is
    touched by exactly one row.
    """

    def __init__(self, fine: GridCodec, coarse: GridCodec, filters):
        M = fine.M
        self.idx = []
        self.taps = []
        self.complex = False
        for taps, is_complex in filters:
            self.complex = self.complex or is_complex
            gammas = sorted(taps)
            w = np.array([taps[g] for g in gammas])
            rows = np.empty((coarse.size, len(gammas)), dtype=np.int64)
            for b in range(coarse.size):
                Mb = mat_vec(M, coarse.decode(b))
                for j, g in enumerate(gammas):
                    rows[b, j] = fine.encode(tuple(x + y for x, y in zip(Mb, g)))
            self.idx.append(rows)
            self.taps.append(w)


def _bank_plans(bank, J: int, depth: int):
    cache = bank.__dict__.setdefault("_transform_plans", {})
    key = (J, depth)
    if key in cache:
        return cache[key]
    dual_filters = [_filter_taps(t) for t in bank.duals]
    primal_filters = [_filter_taps(t) for t in bank.primals]
    codecs = [GridCodec(bank.M, j) for j in range(J + 1)]
    plans = []
    for lvl in range(1, depth + 1):
        fine = codecs[J - lvl + 1]
        coarse = codecs[J - lvl]
        plans.append((
            _StepPlan(fine, coarse, dual_filters),
            _StepPlan(fine, coarse, primal_filters),
        ))
    cache[key] = (codecs, plans)
    return codecs, plans


def _channel_tags(bank):
    inv = {}
    for pi, k in bank.orbit.channel_index.items():
        inv[k] = pi
    return [inv[k] for k in range(len(bank.primals))]


def analyze(signal: PeriodicSignal, bank, levels: int) -> SubbandPyramid:
    """Cascade `levels` analysis steps; the coarse band is re-analyzed."""
    if tuple(map(tuple, bank.M)) != signal.M:
        raise ValueError("bank and signal use different dilation matrices")
    if not 1 <= levels <= signal.J:
        raise ValueError(f"levels must be in 1..{signal.J}, got {levels}")
    tags = _channel_tags(bank)
    m = bank.digit_system.m
    _, plans = _bank_plans(bank, signal.J, levels)
    cur = signal.values
    out_levels = []
    for lvl in range(1, levels + 1):
        aplan, _ = plans[lvl - 1]
        bands = {}
        coarse = None
        for nu in range(m):
            w = aplan.taps[nu]
            y = m * (cur[aplan.idx[nu]] @ np.conj(w))
            if nu == 0:
                coarse = y
            else:
                bands[tags[nu]] = y
        out_levels.append(LevelBands(level=lvl, wavelets=bands))
        cur = coarse
    return SubbandPyramid(M=signal.M, J=signal.J, depth=levels,
                          levels=out_levels, coarse=cur)


def synthesize(pyramid: SubbandPyramid, bank) -> PeriodicSignal:
    """Invert `analyze` with the primal filters; exact MEP banks give
    reconstruction up to floating-point error."""
    if tuple(map(tuple, bank.M)) != pyramid.M:
        raise ValueError("bank and pyramid use different dilation matrices")
    tags = _channel_tags(bank)
    m = bank.digit_system.m
    want = set(tags[1:])
    for lv in pyramid.levels:
        if set(lv.wavelets) != want:
            raise ValueError("pyramid subband channels do not match the bank")
    _, plans = _bank_plans(bank, pyramid.J, pyramid.depth)
    cur = pyramid.coarse
    for lvl in range(pyramid.depth, 0, -1):
        _, splan = plans[lvl - 1]
        dtype = np.complex128 if (splan.complex or np.iscomplexobj(cur)) \
            else np.float64
        size = cur.size * m
        acc = np.zeros(size, dtype=dtype)
        bands = pyramid.levels[lvl - 1].wavelets
        for nu in range(m):
            y = cur if nu == 0 else bands[tags[nu]]
            if y.size * m != size:
                raise ValueError("pyramid band sizes are inconsistent")
            contrib = y[:, None] * splan.taps[nu][None, :]
            np.add.at(acc, splan.idx[nu].reshape(-1), contrib.reshape(-1))
        cur = acc
    vals = cur.real if np.iscomplexobj(cur) else cur
    return PeriodicSignal(pyramid.M, pyramid.J, vals)


# ---------------------------------------------------------------------------
# subdivision renderer
# ---------------------------------------------------------------------------

@dataclass
class CascadeResult:
    """J-th subdivision iterate; values[alpha] approximates phi(M^-J alpha)."""
    M: tuple
    J: int
    mode: str
    values: Dict[tuple, object]

    @property
    def m(self) -> int:
        return abs(integer_det(self.M))

    def position(self, alpha) -> Tuple[Fraction, ...]:
        inv = fraction_matrix_inverse(self.M)
        v = tuple(Fraction(x) for x in alpha)
        for _ in range(self.J):
            v = tuple(sum(inv[i][j] * v[j] for j in range(len(v)))
                      for i in range(len(v)))
        return v

    def normalized_mass(self):
        total = sum(self.values.values())
        if self.mode == "rational":
            return total / Fraction(self.m ** self.J)
        return total / float(self.m ** self.J)

    def shift_sums(self):
        """Sums of the iterate over each residue class mod M^J Z^d; a mask
        with sum rule order >= 1 gives exactly 1 in every class."""
        codec = GridCodec(self.M, self.J)
        zero = Fraction(0) if self.mode == "rational" else 0.0
        sums = [zero] * codec.size
        for alpha, v in self.values.items():
            sums[codec.encode(alpha)] += v
        return sums

    def box_grid(self, box):
        """All grid samples M^-J alpha with M^-J alpha inside the exact
        coordinate box (lo, hi), zero-padded where the iterate carries no
        coefficient. The box usually comes from refinable_support_box."""
        d = len(self.M)
        lo, hi = box
        MJ = identity_matrix(d)
        for _ in range(self.J):
            MJ = mat_mul(self.M, MJ)
        # integer bounding box of M^J * [lo, hi]
        blo = [Fraction(0)] * d
        bhi = [Fraction(0)] * d
        for i in range(d):
            for j in range(d):
                a, b = MJ[i][j] * lo[j], MJ[i][j] * hi[j]
                blo[i] += min(a, b)
                bhi[i] += max(a, b)
        inv = fraction_matrix_inverse(MJ)
        zero = Fraction(0) if self.mode == "rational" else 0.0
        out = []
        ranges = [range(math.ceil(blo[i]), math.floor(bhi[i]) + 1)
                  for i in range(d)]
        for alpha in product(*ranges):
            x = tuple(sum(inv[r][c] * alpha[c] for c in range(d))
                      for r in range(d))
            if all(lo[r] <= x[r] <= hi[r] for r in range(d)):
                out.append((alpha, self.values.get(alpha, zero)))
        return out


def refinable_support_box(mask: Mask):
    """Exact coordinate box containing the support of the refinable limit:
    the fixed point of B -> M^-1 (S + B) over interval boxes, where S is
    the coefficient hull. Solvable whenever I - |M^-1| is invertible with a
    nonnegative solution; raises ValueError otherwise."""
    t = mask.poly
    d = t.dimension
    keys = list(t.support())
    if not keys:
        raise ValueError("empty mask")
    lo_s = [Fraction(min(k[i] for k in keys)) for i in range(d)]
    hi_s = [Fraction(max(k[i] for k in keys)) for i in range(d)]
    c_s = [(lo_s[i] + hi_s[i]) / 2 for i in range(d)]
    r_s = [(hi_s[i] - lo_s[i]) / 2 for i in range(d)]
    inv = fraction_matrix_inverse(mask.M)
    A = [[abs(inv[i][j]) for j in range(d)] for i in range(d)]
    # r = A (r_s + r)  and  c = M^-1 (c_s + c)
    IA = [[(1 if i == j else 0) - A[i][j] for j in range(d)] for i in range(d)]
    try:
        r = exact_solve(IA, mat_vec(A, r_s))
    except Exception:
        raise ValueError("support box equations are singular for this dilation")
    if any(x < 0 for x in r):
        raise ValueError("support box fixed point is not a box")
    IM = [[(1 if i == j else 0) - inv[i][j] for j in range(d)] for i in range(d)]
    c = exact_solve(IM, mat_vec(inv, c_s))
    lo = tuple(c[i] - r[i] for i in range(d))
    hi = tuple(c[i] + r[i] for i in range(d))
    # invariance check: M^-1 (S + B) inside B, via exact interval arithmetic
    for i in range(d):
        a = sum(min(inv[i][j] * (lo_s[j] + lo[j]), inv[i][j] * (hi_s[j] + hi[j]))
                for j in range(d))
        b = sum(max(inv[i][j] * (lo_s[j] + lo[j]), inv[i][j] * (hi_s[j] + hi[j]))
                for j in range(d))
        if a < lo[i] or b > hi[i]:
            raise ValueError("support box fixed point failed invariance")
    return lo, hi


def render_refinable(mask: Mask, J: int, mode: str = "float") -> CascadeResult:
    """J subdivision steps c^(j+1)_a = m sum_b h_{a - M b} c^(j)_b from the
    delta sequence. mode="rational" keeps exact Fractions (mask coefficients
    must be rational); mode="float" runs the same recursion in float64."""
    if J < 1:
        raise ValueError("J must be at least 1")
    if mode not in ("float", "rational"):
        raise ValueError(f"unknown render mode {mode!r}")
    t = mask.poly
    d = t.dimension
    M = tuple(tuple(int(x) for x in row) for row in mask.M)
    m = abs(integer_det(M))
    taps = {}
    for k in t.support():
        c = t.coeff(k)
        if not isinstance(c, Fraction):
            raise ValueError("renderer needs a rational-coefficient mask")
        taps[k] = m * c if mode == "rational" else float(m * c)
    cur = {(0,) * d: Fraction(1) if mode == "rational" else 1.0}
    for _ in range(J):
        nxt = {}
        for beta, cb in cur.items():
            Mb = mat_vec(M, beta)
            for gamma, hg in taps.items():
                key = tuple(x + y for x, y in zip(Mb, gamma))
                nxt[key] = nxt.get(key, Fraction(0) if mode == "rational"
                                    else 0.0) + hg * cb
        if mode == "rational":
            nxt = {k: v for k, v in nxt.items() if v != 0}
        cur = nxt
    return CascadeResult(M=M, J=J, mode=mode, values=cur)


# ---------------------------------------------------------------------------
# signal files
# ---------------------------------------------------------------------------

_MAGIC = b"SWSG"
_VERSION = 1


def write_signal(path, signal: PeriodicSignal) -> None:
    """Binary signal file: magic, version, d, J, M row-major (int64), then
    m^J little-endian float64 samples in codec order."""
    d = len(signal.M)
    flat = [x for row in signal.M for x in row]
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIII", _MAGIC, _VERSION, d, signal.J))
        fh.write(struct.pack(f"<{d * d}q", *flat))
        fh.write(signal.values.astype("<f8").tobytes())


def read_signal(path) -> PeriodicSignal:
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) != 16:
            raise ValueError("signal file truncated in header")
        magic, version, d, J = struct.unpack("<4sIII", head)
        if magic != _MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {_MAGIC!r}")
        if version != _VERSION:
            raise ValueError(f"unsupported signal file version {version}")
        raw = fh.read(8 * d * d)
        flat = struct.unpack(f"<{d * d}q", raw)
        M = tuple(tuple(flat[i * d + j] for j in range(d)) for i in range(d))
        codec = GridCodec(M, J)
        body = fh.read()
    vals = np.frombuffer(body, dtype="<f8")
    if vals.size != codec.size:
        raise ValueError(f"expected {codec.size} samples, file has {vals.size}")
    return PeriodicSignal(M, J, vals.copy(), codec)


def write_signal_csv(path, signal: PeriodicSignal) -> None:
    """CSV alternative for d <= 2: a metadata comment line, a header, then
    one row per sample in codec order (coordinates then the value)."""
    d = len(signal.M)
    if d > 2:
        raise ValueError("CSV signal files are limited to d <= 2")
    flat = ",".join(str(x) for row in signal.M for x in row)
    cols = [f"a{i + 1}" for i in range(d)] + ["value"]
    with open(path, "w") as fh:
        fh.write(f"# SWSG {_VERSION} d={d} J={signal.J} M={flat}\n")
        fh.write(",".join(cols) + "\n")
        for i in range(signal.codec.size):
            alpha = signal.codec.decode(i)
            row = [str(x) for x in alpha] + [repr(float(signal.values[i]))]
            fh.write(",".join(row) + "\n")


def read_signal_csv(path) -> PeriodicSignal:
    with open(path) as fh:
        meta = fh.readline().strip()
        if not meta.startswith("# SWSG"):
            raise ValueError("missing SWSG metadata line")
        fields = dict(part.split("=", 1) for part in meta.split()[3:])
        d = int(fields["d"])
        J = int(fields["J"])
        flat = [int(x) for x in fields["M"].split(",")]
        if len(flat) != d * d:
            raise ValueError("metadata dilation matrix has wrong size")
        M = tuple(tuple(flat[i * d + j] for j in range(d)) for i in range(d))
        fh.readline()  # header row
        vals = []
        for line in fh:
            line = line.strip()
            if line:
                vals.append(float(line.split(",")[-1]))
    return PeriodicSignal(M, J, np.array(vals))
