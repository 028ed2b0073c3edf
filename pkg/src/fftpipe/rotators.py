"""Rotator datapaths for the streaming FFT.

Every twiddle W_L^m = exp(-2j*pi*m/L) is reduced to a quarter-turn part plus
a residual angle alpha in [0, pi/4].  The number of distinct alphas decides
how much multiplier hardware a rotator needs:

* quarter turns only          -> swap/negate wiring, no arithmetic
* eighth turns (45 degrees)   -> one constant multiplier (1/sqrt(2)), CSD
* sixteenth turns             -> three constants sharing one shift-add datapath
* anything else               -> four-multiplier complex rotation from a table

Numerically every rotation is "exact integer coefficient products, one
rounding per component", so specialized and general datapaths agree bit for
bit whenever their coefficients reduce to the same rationals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .fixedpoint import (
    FixedFormat,
    Fx,
    CFx,
    apply_overflow,
    shift_round,
    round_real,
)

INV_SQRT2 = 0.70710678118654752
COS_PI_8 = 0.92387953251128676
SIN_PI_8 = 0.38268343236508977


class AllocationError(KeyError):
    """A rotator was asked for an exponent outside its coefficient table."""


# ---------------------------------------------------------------------------
# twiddle exponents and symmetric angle decomposition


@dataclass(frozen=True)
class TwiddleExponent:
    """W_base^m with m canonicalized into [0, base)."""

    base: int
    m: int

    def __post_init__(self):
        if self.base < 1 or self.base & (self.base - 1):
            raise ValueError(f"base must be a power of two, got {self.base}")
        object.__setattr__(self, "m", self.m % self.base)

    @property
    def angle(self) -> float:
        return -2.0 * math.pi * self.m / self.base

    @property
    def value(self) -> complex:
        return complex(math.cos(self.angle), math.sin(self.angle))


_QUADRANT_TRIVIA = {
    # n -> (swap_re_im, negate_re, negate_im) for rotation by n*pi/2
    0: (False, False, False),
    1: (True, True, False),
    2: (False, True, True),
    3: (True, False, True),
}


@dataclass(frozen=True)
class SasForm:
    """Angle split into quadrant_n * pi/2 + sign * alpha with alpha in [0, pi/4].

    alpha_frac is the exact fraction of pi/4, kept rational so equal alphas
    compare equal without float noise.
    """

    quadrant_n: int
    sign: int
    alpha_frac: Fraction
    swap_re_im: bool
    negate_re: bool
    negate_im: bool

    @property
    def alpha(self) -> float:
        return float(self.alpha_frac) * math.pi / 4.0

    @property
    def angle(self) -> float:
        return self.quadrant_n * math.pi / 2.0 + self.sign * self.alpha


def sas_decompose(tw: TwiddleExponent) -> SasForm:
    """Decompose W_base^m into quadrant plus alpha, exactly in rationals."""
    L = tw.base
    pos = (-tw.m) % L  # ccw angle in units of a turn/L
    if L < 8:
        pos, L = pos * (8 // L), 8
    oct_idx, rem = divmod(8 * pos, L)
    k, odd = divmod(oct_idx, 2)
    if not odd:
        n, sign, alpha = k, +1, Fraction(rem, L)
    elif rem == 0:
        n, sign, alpha = k, +1, Fraction(1)  # exact pi/4 canonicalizes to +
    else:
        n, sign, alpha = (k + 1) % 4, -1, Fraction(L - rem, L)
    swap, neg_re, neg_im = _QUADRANT_TRIVIA[n]
    return SasForm(n, sign, alpha, swap, neg_re, neg_im)


def mrot_order(base: int) -> int:
    """Distinct residual angles over all exponents of a twiddle base: base/8 + 1."""
    if base < 8 or base & (base - 1):
        raise ValueError(f"base must be a power of two >= 8, got {base}")
    return base // 8 + 1


# ---------------------------------------------------------------------------
# CSD shift-and-add recipes for constant multipliers


@dataclass(frozen=True)
class CsdOp:
    """One add/sub: result = (a << a_shift) +/- (b << b_shift).

    Operand selectors: "x" is the rotator input, "p1"/"p2" the most recent /
    second most recent intermediate.
    """

    a_src: str
    a_shift: int
    sign: int
    b_src: str
    b_shift: int

    def render(self, out_name: str, names: dict[str, str]) -> str:
        op = "+" if self.sign > 0 else "-"
        a, b = names[self.a_src], names[self.b_src]
        return f"{out_name} = ({a} << {self.a_shift}) {op} ({b} << {self.b_shift})"


@dataclass(frozen=True)
class CsdRecipe:
    """Shift-and-add network computing target * x with len(ops) add/subs."""

    target: int
    ops: tuple[CsdOp, ...]
    out_shift: int = 0

    @property
    def num_ops(self) -> int:
        return len(self.ops)

    def evaluate(self, x):
        """Exact integer (or integer-array) product target * x."""
        if not self.ops:
            return x << self.out_shift if self.out_shift else x
        vals = []  # intermediates in creation order
        for op in self.ops:
            a = _pick(x, vals, op.a_src) << op.a_shift
            b = _pick(x, vals, op.b_src) << op.b_shift
            vals.append(a + b if op.sign > 0 else a - b)
        return vals[-1]

    def dump(self) -> str:
        """Text form, one `out = (a << s) +/- (b << t)` line per operation."""
        if not self.ops:
            return f"out = (x << {self.out_shift})  # {self.target} * x"
        lines = []
        names = {"x": "x", "p1": "x", "p2": "x"}
        for i, op in enumerate(self.ops):
            out = "out" if i == len(self.ops) - 1 else f"t{i + 1}"
            lines.append(op.render(out, names))
            names["p2"] = names["p1"]
            names["p1"] = out
        lines.append(f"# out == {self.target} * x")
        return "\n".join(lines)


def _pick(x, vals, src):
    if src == "x":
        return x
    if src == "p1":
        return vals[-1]
    if src == "p2":
        return vals[-2]
    raise ValueError(f"bad operand selector {src!r}")


def naf_digits(n: int) -> list[int]:
    """Non-adjacent signed-digit form, least significant digit first."""
    digits = []
    while n:
        if n & 1:
            d = 2 - (n & 3)  # 1 if n % 4 == 1 else -1
            digits.append(d)
            n -= d
        else:
            digits.append(0)
        n >>= 1
    return digits


def csd_recipe(constant: int) -> CsdRecipe:
    """Minimal signed-digit shift-and-add chain for a positive constant."""
    if constant <= 0:
        raise ValueError("constant must be positive")
    digits = naf_digits(constant)
    terms = [(d, s) for s, d in enumerate(digits) if d]  # (sign, shift), LSB first
    terms.reverse()
    if len(terms) == 1:
        return CsdRecipe(constant, (), out_shift=terms[0][1])
    ops = [CsdOp("x", terms[0][1], terms[1][0], "x", terms[1][1])]
    for d, s in terms[2:]:
        ops.append(CsdOp("p1", 0, d, "x", s))
    recipe = CsdRecipe(constant, tuple(ops))
    assert recipe.evaluate(1) == constant
    return recipe


def w8_constant(frac_bits: int) -> int:
    # default width 8 gives 181/256; 1448/2048 is the equally valid wider
    # choice, reachable here via frac_bits=11
    return round_real(INV_SQRT2 * (1 << frac_bits), "round-half-even")


def w8_csd_recipe(frac_bits: int = 8, max_ops: int | None = None) -> CsdRecipe:
    """Recipe for the single 45-degree constant at the given coefficient width."""
    if not 6 <= frac_bits <= 16:
        raise ValueError(f"frac_bits must be in [6, 16], got {frac_bits}")
    recipe = csd_recipe(w8_constant(frac_bits))
    if max_ops is not None and recipe.num_ops > max_ops:
        raise ValueError(
            f"no {frac_bits}-bit recipe within {max_ops} operations "
            f"(need {recipe.num_ops})"
        )
    return recipe


def w16_shared_recipes() -> dict[int, CsdRecipe]:
    """The three 9-bit sixteenth-turn constants on one 3-adder datapath.

    473x = ((x<<9) - (x<<5) - (x<<3)) + x
    362x: t1 = x + 4x = 5x; t2 = 8*t1 + t1 = 45x; out = 8*t2 + 2x
    196x = (x<<7) + (x<<6) + (x<<2)
    """
    r473 = CsdRecipe(473, (
        CsdOp("x", 9, -1, "x", 5),
        CsdOp("p1", 0, -1, "x", 3),
        CsdOp("p1", 0, +1, "x", 0),
    ))
    r362 = CsdRecipe(362, (
        CsdOp("x", 0, +1, "x", 2),
        CsdOp("p1", 3, +1, "p1", 0),
        CsdOp("p1", 3, +1, "x", 1),
    ))
    r196 = CsdRecipe(196, (
        CsdOp("x", 7, +1, "x", 6),
        CsdOp("p1", 0, +1, "x", 2),
    ))
    for r in (r473, r362, r196):
        assert r.evaluate(1) == r.target
    return {473: r473, 362: r362, 196: r196}


# ---------------------------------------------------------------------------
# coefficient selection


@dataclass(frozen=True)
class CoeffConfig:
    """Fraction bits of each coefficient family."""

    w8_frac: int = 8
    w16_frac: int = 9
    tw_frac: int = 11

    @classmethod
    def for_format(cls, fmt: FixedFormat) -> "CoeffConfig":
        f = fmt.frac_bits
        return cls(w8_frac=max(f - 3, 6), w16_frac=max(f - 2, 7), tw_frac=max(f, 4))


def angle_class(base: int, m: int) -> int:
    """Smallest power-of-two base expressing W_base^m (1, 2, 4, 8, 16, ...)."""
    frac = Fraction(m % base, base)
    return frac.denominator


_QUARTER_COEFFS = {0: (1, 0), 1: (0, -1), 2: (-1, 0), 3: (0, 1)}


def w16_constants(frac_bits: int = 9) -> tuple[int, int, int]:
    """(cos, 1/sqrt2, sin) of pi/8 family scaled by 2**frac_bits."""
    s = 1 << frac_bits
    return (
        round_real(COS_PI_8 * s, "round-half-even"),
        round_real(INV_SQRT2 * s, "round-half-even"),
        round_real(SIN_PI_8 * s, "round-half-even"),
    )


def unit_coefficients(base: int, m: int, cfg: CoeffConfig) -> tuple[int, int, int]:
    """(wr, wi, frac) integer coefficients of W_base^m at its natural width."""
    den = angle_class(base, m)
    if den <= 4:
        k = (m * 4 // base) % 4
        wr, wi = _QUARTER_COEFFS[k]
        return wr, wi, 0
    if den == 8:
        c = w8_constant(cfg.w8_frac)
        e = (m * 8 // base) % 8
        wr, wi = {1: (c, -c), 3: (-c, -c), 5: (-c, c), 7: (c, c)}[e]
        return wr, wi, cfg.w8_frac
    if den == 16:
        C, R, S = w16_constants(cfg.w16_frac)
        e = (m * 16 // base) % 16
        wr, wi = {
            1: (C, -S), 3: (S, -C), 5: (-S, -C), 7: (-C, -S),
            9: (-C, S), 11: (-S, C), 13: (S, C), 15: (C, S),
        }[e]
        return wr, wi, cfg.w16_frac
    ang = -2.0 * math.pi * (m % base) / base
    s = 1 << cfg.tw_frac
    wr = round_real(math.cos(ang) * s, "round-half-even")
    wi = round_real(math.sin(ang) * s, "round-half-even")
    return wr, wi, cfg.tw_frac


def rotate_coeff_raw(re, im, wr: int, wi: int, frac: int, fmt: FixedFormat):
    """Rotate raw components by integer coefficients, one rounding each."""
    acc_re = re * wr - im * wi
    acc_im = re * wi + im * wr
    rr = shift_round(acc_re, frac, fmt.rounding)
    ri = shift_round(acc_im, frac, fmt.rounding)
    return apply_overflow(rr, fmt), apply_overflow(ri, fmt)


# ---------------------------------------------------------------------------
# public rotation ops on CFx samples


def rotate_w4(x: CFx, m: int) -> CFx:
    """Trivial rotation: m = 0 passes through, m = 1 multiplies by -j."""
    if m not in (0, 1):
        raise ValueError(f"rotate_w4 handles m in {{0, 1}}, got {m}")
    if m == 0:
        return x
    fmt = x.fmt
    # (re + j*im) * -j = im - j*re; negation may overflow on min_raw
    return CFx(
        Fx(int(apply_overflow(x.im.raw, fmt)), fmt),
        Fx(int(apply_overflow(-x.re.raw, fmt)), fmt),
    )


def rotate_w8(x: CFx, m: int, coeff_frac: int = 8) -> CFx:
    """Eighth-turn rotation; odd m costs one constant multiply per component.

    The constant multiplier sits at the rotator input (scales re and im
    before the add/sub pair); with exact integer products and one rounding
    per output this is numerically identical to multiplying after the adds.
    """
    if not 0 <= m < 8:
        raise ValueError(f"rotate_w8 expects m in [0, 8), got {m}")
    fmt = x.fmt
    wr, wi, frac = unit_coefficients(8, m, CoeffConfig(w8_frac=coeff_frac))
    rr, ri = rotate_coeff_raw(x.re.raw, x.im.raw, wr, wi, frac, fmt)
    return CFx(Fx(int(rr), fmt), Fx(int(ri), fmt))


def rotate_w16(x: CFx, m: int, coeff_frac: int = 9) -> CFx:
    """Sixteenth-turn rotation from the three-constant shared datapath."""
    if not 0 <= m < 16:
        raise ValueError(f"rotate_w16 expects m in [0, 16), got {m}")
    fmt = x.fmt
    wr, wi, frac = unit_coefficients(16, m, CoeffConfig(w16_frac=coeff_frac))
    rr, ri = rotate_coeff_raw(x.re.raw, x.im.raw, wr, wi, frac, fmt)
    return CFx(Fx(int(rr), fmt), Fx(int(ri), fmt))


def rotate_general(x: CFx, tw: TwiddleExponent,
                   table: dict[int, tuple[int, int, int]]) -> CFx:
    """Table-driven rotation; the table must cover the requested exponent."""
    if tw.m not in table:
        raise AllocationError(f"exponent {tw.m} (base {tw.base}) not in table")
    wr, wi, frac = table[tw.m]
    fmt = x.fmt
    if frac == 0:  # exact quarter turn straight from the table
        rr = wr * x.re.raw - wi * x.im.raw
        ri = wr * x.im.raw + wi * x.re.raw
        return CFx(Fx(int(apply_overflow(rr, fmt)), fmt),
                   Fx(int(apply_overflow(ri, fmt)), fmt))
    rr, ri = rotate_coeff_raw(x.re.raw, x.im.raw, wr, wi, frac, fmt)
    return CFx(Fx(int(rr), fmt), Fx(int(ri), fmt))


def general_table(base: int, exponents,
                  cfg: CoeffConfig) -> dict[int, tuple[int, int, int]]:
    """Coefficient ROM for a set of exponents: m -> (wr, wi, frac).

    Entries hold the same class-reduced rationals the specialized datapaths
    use (exact quarter turns, the 45-degree constant, the 22.5-degree
    family), so a general rotator is bit-identical to a specialized one on
    any exponent they both cover; only angles outside those classes round
    cos/sin at tw_frac.
    """
    return {m: unit_coefficients(base, m, cfg)
            for m in sorted(set(int(m) % base for m in exponents))}


# ---------------------------------------------------------------------------
# rotator kinds (cheapest datapath covering an exponent set)

KIND_NONE = "none"
KIND_W4 = "w4-trivial"
KIND_W8 = "w8-csd"
KIND_W16 = "w16-shared"
KIND_TW = "general"

_KIND_RANK = {KIND_NONE: 1, KIND_W4: 4, KIND_W8: 8, KIND_W16: 16}


def kind_for_exponents(base: int, exponents) -> str:
    """Lowest-capability rotator covering every W_base^m in the set."""
    worst = 1
    for m in exponents:
        worst = max(worst, angle_class(base, m))
    if worst == 1:
        return KIND_NONE
    for kind, rank in _KIND_RANK.items():
        if worst <= rank:
            return kind
    return KIND_TW


def kind_cost(kind: str, cfg: CoeffConfig) -> tuple[int, int]:
    """(general multipliers, add/sub units) of one rotator instance."""
    if kind in (KIND_NONE, KIND_W4):
        return 0, 0
    if kind == KIND_W8:
        return 0, csd_recipe(w8_constant(cfg.w8_frac)).num_ops
    if kind == KIND_W16:
        return 0, max(r.num_ops for r in w16_shared_recipes().values())
    if kind == KIND_TW:
        # direct-form complex multiply: 4 real multipliers, 2 add/sub
        return 4, 2
    raise ValueError(f"unknown rotator kind {kind!r}")


class BoundRotator:
    """A rotator instance bound to a format and coefficient widths.

    Kinds below "general" fall back to full-precision table coefficients for
    exponents outside their capability, so a deliberately scrambled schedule
    still streams data and the allocation checker can report the violation.
    """

    def __init__(self, kind: str, base: int, exponents, fmt: FixedFormat,
                 cfg: CoeffConfig):
        self.kind = kind
        self.base = base
        self.fmt = fmt
        self.cfg = cfg
        self.exponents = frozenset(int(m) % base for m in exponents)
        self._coeffs: dict[int, tuple[int, int, int]] = {}
        if kind == KIND_TW:
            self._coeffs = general_table(base, self.exponents, cfg)
        else:
            for m in self.exponents:
                self._coeffs[m] = unit_coefficients(base, m, cfg)

    def covers(self, m: int) -> bool:
        rank = _KIND_RANK.get(self.kind)
        if rank is None:  # general covers whatever is in its table
            return m % self.base in self._coeffs
        return angle_class(self.base, m) <= rank

    def rotate_raw(self, re: int, im: int, m: int) -> tuple[int, int]:
        m %= self.base
        coeffs = self._coeffs.get(m)
        if coeffs is None:
            if self.kind == KIND_TW:
                raise AllocationError(f"exponent {m} (base {self.base}) not allocated")
            coeffs = unit_coefficients(self.base, m, self.cfg)
            self._coeffs[m] = coeffs
        wr, wi, frac = coeffs
        if frac == 0:  # trivial quarter turn, no arithmetic
            if (wr, wi) == (1, 0):
                return re, im
            if (wr, wi) == (0, -1):
                rr, ri = im, -re
            elif (wr, wi) == (-1, 0):
                rr, ri = -re, -im
            else:
                rr, ri = -im, re
            return (int(apply_overflow(rr, self.fmt)),
                    int(apply_overflow(ri, self.fmt)))
        rr, ri = rotate_coeff_raw(re, im, wr, wi, frac, self.fmt)
        return int(rr), int(ri)
