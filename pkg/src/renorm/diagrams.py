"""Exact Wick-pairing moments of the quadratic source.

A single vertex carries two external lines; the Gaussian moment of the
k-th power of the source is the sum over all perfect matchings of the
2k lines.  Every matching decomposes into closed loops, an l-line loop
evaluating to the loop value b_l / 2**l, so moments are polynomials in
the loop symbols b1, b2, ... with positive rational coefficients.

Everything here is exact: coefficients are ``fractions.Fraction``;
floating point enters only when a caller substitutes numeric loop
values into a series coefficient.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction

__all__ = [
    "INFINITE",
    "InfiniteCoefficient",
    "MomentPolynomial",
    "all_pairings",
    "wick_moment",
    "wick_moment_by_pairings",
    "tadpole_free_moment",
    "shifted_moment",
    "renorm_identity_holds",
    "series_coefficients",
    "partial_sum_scan",
]

SERIES_KINDS = ("phi", "z", "phi_renorm", "z_renorm")


class InfiniteCoefficient(Exception):
    """A series coefficient references the divergent single-loop value."""


class _Infinite:
    """Tagged stand-in for a divergent loop value.

    Deliberately supports no arithmetic: using it outside the allowed
    substitution paths must raise, not propagate a NaN.
    """

    _singleton = None

    def __new__(cls):
        if cls._singleton is None:
            cls._singleton = super().__new__(cls)
        return cls._singleton

    def __repr__(self):
        return "Infinite"


INFINITE = _Infinite()


class MomentPolynomial:
    """Exact polynomial in loop symbols b1..bK and the shift symbol zeta.

    Terms map (zeta exponent, loop exponent vector) to a Fraction.  The
    loop vector keeps the exponent of b_m at position m-1 with trailing
    zeros trimmed, so equal polynomials compare equal structurally.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean: dict[tuple[int, tuple[int, ...]], Fraction] = {}
        for key, coef in (terms or {}).items():
            coef = Fraction(coef)
            if coef == 0:
                continue
            zexp, loops = key
            loops = tuple(int(e) for e in loops)
            while loops and loops[-1] == 0:
                loops = loops[:-1]
            if any(e < 0 for e in loops) or zexp < 0:
                raise ValueError("exponents must be nonnegative")
            k = (int(zexp), loops)
            clean[k] = clean.get(k, Fraction(0)) + coef
        self.terms = {k: v for k, v in clean.items() if v != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "MomentPolynomial":
        return cls()

    @classmethod
    def constant(cls, value) -> "MomentPolynomial":
        return cls({(0, ()): Fraction(value)})

    @classmethod
    def one(cls) -> "MomentPolynomial":
        return cls.constant(1)

    @classmethod
    def loop(cls, m: int) -> "MomentPolynomial":
        """The loop symbol b_m."""
        if m < 1:
            raise ValueError("loop order is 1-based")
        exps = [0] * m
        exps[m - 1] = 1
        return cls({(0, tuple(exps)): Fraction(1)})

    @classmethod
    def shift(cls) -> "MomentPolynomial":
        """The shift symbol zeta."""
        return cls({(1, ()): Fraction(1)})

    # -- algebra -----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MomentPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> "MomentPolynomial":
        if not isinstance(other, MomentPolynomial):
            return NotImplemented
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + v
        return MomentPolynomial(out)

    def __neg__(self) -> "MomentPolynomial":
        return MomentPolynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "MomentPolynomial":
        if not isinstance(other, MomentPolynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "MomentPolynomial":
        if isinstance(other, MomentPolynomial):
            out: dict[tuple[int, tuple[int, ...]], Fraction] = {}
            for (z1, l1), c1 in self.terms.items():
                for (z2, l2), c2 in other.terms.items():
                    n = max(len(l1), len(l2))
                    loops = tuple(
                        (l1[i] if i < len(l1) else 0) + (l2[i] if i < len(l2) else 0)
                        for i in range(n)
                    )
                    k = (z1 + z2, loops)
                    out[k] = out.get(k, Fraction(0)) + c1 * c2
            return MomentPolynomial(out)
        if isinstance(other, (int, Fraction)):
            return MomentPolynomial(
                {k: v * Fraction(other) for k, v in self.terms.items()}
            )
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MomentPolynomial":
        if n < 0:
            raise ValueError("only nonnegative powers")
        out = MomentPolynomial.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- structure ----------------------------------------------------------

    def drop_tadpoles(self) -> "MomentPolynomial":
        """Delete every monomial containing the single-line loop b1."""
        return MomentPolynomial(
            {
                (z, loops): c
                for (z, loops), c in self.terms.items()
                if not (loops and loops[0] > 0)
            }
        )

    def max_loop_index(self) -> int:
        return max((len(loops) for _, loops in self.terms), default=0)

    def evaluate(self, loop_values, shift=0) -> Fraction:
        """Exact value with numeric loop values and shift.

        ``loop_values[m-1]`` supplies b_m; entries may be numbers or the
        INFINITE marker.  Touching an INFINITE entry raises
        InfiniteCoefficient; floats are converted to exact rationals
        before any arithmetic.
        """
        shift_f = Fraction(shift)
        total = Fraction(0)
        for (zexp, loops), coef in self.terms.items():
            term = coef * shift_f**zexp
            for m, e in enumerate(loops, start=1):
                if e == 0:
                    continue
                if m > len(loop_values):
                    raise ValueError(
                        f"monomial needs loop value b{m} but only "
                        f"{len(loop_values)} were supplied"
                    )
                v = loop_values[m - 1]
                if v is INFINITE:
                    raise InfiniteCoefficient(
                        f"monomial with b{m}^{e} hits a divergent loop value"
                    )
                term *= Fraction(v) ** e
            total += term
        return total

    # -- serialization --------------------------------------------------------

    def to_json_obj(self) -> list[dict]:
        out = []
        for (zexp, loops), coef in sorted(self.terms.items()):
            exps = {f"b{m}": e for m, e in enumerate(loops, start=1) if e}
            if zexp:
                exps["zeta"] = zexp
            out.append(
                {
                    "exponents": exps,
                    "num": str(coef.numerator),
                    "den": str(coef.denominator),
                }
            )
        return out

    @classmethod
    def from_json_obj(cls, obj) -> "MomentPolynomial":
        terms = {}
        for entry in obj:
            zexp = 0
            loops: dict[int, int] = {}
            for sym, e in entry["exponents"].items():
                if sym == "zeta":
                    zexp = int(e)
                elif sym.startswith("b"):
                    loops[int(sym[1:])] = int(e)
                else:
                    raise ValueError(f"unknown symbol {sym!r}")
            size = max(loops) if loops else 0
            vec = tuple(loops.get(m, 0) for m in range(1, size + 1))
            terms[(zexp, vec)] = Fraction(int(entry["num"]), int(entry["den"]))
        return cls(terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (zexp, loops), coef in sorted(self.terms.items()):
            syms = [f"b{m}^{e}" if e > 1 else f"b{m}" for m, e in enumerate(loops, 1) if e]
            if zexp:
                syms.append(f"zeta^{zexp}" if zexp > 1 else "zeta")
            body = "*".join(syms)
            parts.append(f"{coef}*{body}" if body else f"{coef}")
        return " + ".join(parts)


# -- moments ------------------------------------------------------------------

_MOMENTS: dict[int, MomentPolynomial] = {0: MomentPolynomial.one()}


def wick_moment(k: int) -> MomentPolynomial:
    """Moment of the k-th power of the source, as an exact polynomial.

    Generated by the moment-cumulant recurrence with m-th cumulant
    (m-1)! * b_m / 2 (the cumulant of a squared centered Gaussian summed
    over modes); the pairing enumerator below validates the recurrence
    term-by-term on small orders.
    """
    if not 0 <= k <= 60:
        raise ValueError("moment order limited to k <= 60")
    for n in range(max(_MOMENTS) + 1, k + 1):
        acc = MomentPolynomial.zero()
        for m in range(1, n + 1):
            cum = MomentPolynomial.loop(m) * Fraction(math.factorial(m - 1), 2)
            acc = acc + cum * _MOMENTS[n - m] * math.comb(n - 1, m - 1)
        _MOMENTS[n] = acc
    return _MOMENTS[k]


def all_pairings(items):
    """Yield every pairing (partition into blocks of two) of the items."""
    items = list(items)
    if not items:
        yield []
        return
    first = items.pop(0)
    for i, other in enumerate(items):
        rest = items[:i] + items[i + 1 :]
        for pairing in all_pairings(rest):
            yield [(first, other)] + pairing


def _loop_sizes(pairing, k: int) -> list[int]:
    """Loop decomposition of a matching of 2k half-lines.

    Half-lines 2v and 2v+1 belong to vertex v; a loop alternates a
    matched line with the passage through a vertex, and its size is the
    number of lines traversed.
    """
    partner = {}
    for x, y in pairing:
        partner[x] = y
        partner[y] = x
    visited = [False] * (2 * k)
    sizes = []
    for start in range(2 * k):
        if visited[start]:
            continue
        size = 0
        h = start
        while not visited[h]:
            visited[h] = True
            p = partner[h]
            visited[p] = True
            size += 1
            h = p ^ 1
        sizes.append(size)
    return sizes


def wick_moment_by_pairings(k: int) -> MomentPolynomial:
    """Brute-force oracle for :func:`wick_moment`.

    Enumerates all (2k-1)!! matchings, decomposes each into loops and
    charges b_l / 2**l per l-line loop.  Exponential cost; keep k small.
    """
    if not 0 <= k <= 8:
        raise ValueError("pairing enumeration limited to k <= 8")
    counts: dict[tuple[int, ...], int] = {}
    for pairing in all_pairings(range(2 * k)):
        sizes = _loop_sizes(pairing, k)
        vec = [0] * (max(sizes) if sizes else 0)
        for size in sizes:
            vec[size - 1] += 1
        key = tuple(vec)
        counts[key] = counts.get(key, 0) + 1
    scale = Fraction(1, 2**k)
    return MomentPolynomial(
        {(0, loops): scale * count for loops, count in counts.items()}
    )


def tadpole_free_moment(k: int) -> MomentPolynomial:
    """Moment with every single-line-loop (tadpole) monomial removed."""
    return wick_moment(k).drop_tadpoles()


def _moment_op(op: str):
    if op == "H":
        return wick_moment
    if op == "H1":
        return tadpole_free_moment
    raise ValueError("op must be 'H' (full) or 'H1' (tadpole-free)")


def shifted_moment(op: str, n: int) -> MomentPolynomial:
    """Moment of the n-th power of the shifted source (source - zeta).

    Binomial expansion with exact coefficients; zeta stays symbolic.
    """
    base = _moment_op(op)
    acc = MomentPolynomial.zero()
    for j in range(n + 1):
        coef = Fraction((-1) ** (n - j) * math.comb(n, j))
        acc = acc + base(j) * MomentPolynomial({(n - j, ()): coef})
    return acc


def renorm_identity_holds(n: int) -> bool:
    """Exact check of the rearrangement that finances the shift.

    The full moment of (source - zeta)^n equals the tadpole-free moment
    of (source + xi - zeta)^n once xi = b1/2: all tadpole content is
    absorbed into the shift, so only the finite combination xi - zeta
    survives.  Returns the verdict of exact polynomial equality.
    """
    if not 0 <= n <= 20:
        raise ValueError("identity check limited to n <= 20")
    lhs = shifted_moment("H", n)
    xi_minus_zeta = MomentPolynomial.loop(1) * Fraction(1, 2) - MomentPolynomial.shift()
    rhs = MomentPolynomial.zero()
    for i in range(n + 1):
        rhs = rhs + tadpole_free_moment(i) * math.comb(n, i) * xi_minus_zeta ** (n - i)
    return lhs == rhs


def series_coefficients(
    kind: str, order: int, loop_values, shift_value: float = 0.0
) -> list[float]:
    """Numeric coefficients 0..order of a formal series.

    kind selects the series: "phi" uses moment(j)/j!, "z" uses
    moment(2j)/j!; the "_renorm" variants use the tadpole-free moment of
    the shifted source, evaluated at the finite net shift
    ``shift_value`` (the value of xi - zeta), so the single-loop value
    never appears.

    ``loop_values[m-1]`` supplies b_m; b1 may be the INFINITE marker,
    which is only legal for the renormalized kinds.  Evaluation is exact
    in rationals, converted to float at the end.

    Raises
    ------
    InfiniteCoefficient
        If a plain (non-renormalized) kind touches an INFINITE b1.
    """
    if kind not in SERIES_KINDS:
        raise ValueError(f"kind must be one of {SERIES_KINDS}")
    if order < 0:
        raise ValueError("order must be nonnegative")
    for m, v in enumerate(loop_values, start=1):
        if v is INFINITE and m != 1:
            raise ValueError("only b1 may be INFINITE")
    renorm = kind.endswith("_renorm")
    stride = 2 if kind.startswith("z") else 1
    needed = stride * order
    if len(loop_values) < needed:
        raise ValueError(f"need loop values b1..b{needed} for order {order}")
    out = []
    for j in range(order + 1):
        power = stride * j
        if renorm:
            poly = shifted_moment("H1", power)
            val = poly.evaluate(loop_values, shift=-Fraction(shift_value))
        else:
            val = wick_moment(power).evaluate(loop_values)
        out.append(float(val / math.factorial(j)))
    return out


def partial_sum_scan(s: float, max_order: int):
    """Partial sums of the single-mode series against its closed form.

    For the one-factor spectrum with unit frequency every loop value is
    1, the order-k series coefficient is (2k)! / (k!^2 4^k), and the
    closed form is (1 - i s)^(-1/2).  Inside |s| < 1 the partial sums
    converge to it; outside they blow up, which the scan exhibits.

    Returns rows (order, partial_sum, reference, abs_error).
    """
    if not 0 <= max_order <= 300:
        raise ValueError("max_order limited to 300")
    ref = cmath.exp(-0.5 * cmath.log(1.0 - 1j * s))
    rows = []
    acc = complex(0.0, 0.0)
    term = complex(1.0, 0.0)  # (is)^k * (2k)!/(k!^2 4^k), built incrementally
    for k in range(max_order + 1):
        if k > 0:
            ratio = (2.0 * k) * (2.0 * k - 1.0) / (4.0 * k * k)
            term *= 1j * s * ratio
        acc += term
        rows.append((k, acc, ref, abs(acc - ref)))
    return rows
