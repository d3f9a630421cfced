"""Exact monotone null sequences.

Every sequence here is nonnegative and nonincreasing.  Terms are exact
``Fraction`` values.  Infinite families (geometric, power law) carry
closed-form or rigorously enclosed tail sums, and an *eventual form*
that lets other modules prove termwise comparisons beyond a finite
horizon without touching infinitely many terms.

Indices are 1-based throughout, matching the usual sequence notation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Union

Rat = Fraction
RatLike = Union[int, str, Fraction]


class ArtifactError(Exception):
    """Base class for the library's domain errors."""


class HorizonExceeded(ArtifactError):
    pass


class NotMonotone(ArtifactError):
    pass


class NotSummable(ArtifactError):
    pass


class BadParams(ArtifactError, ValueError):
    pass


def rat(x: RatLike) -> Fraction:
    """Coerce ints, fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused on purpose: silently importing a binary rounding
    error would defeat every exact comparison downstream.
    """
    if isinstance(x, bool):
        raise BadParams("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise BadParams(f"cannot read {x!r} as an exact rational")


def rat_str(x: Fraction) -> str:
    return str(Fraction(x))


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalRat:
    """A closed rational interval, or one of the flags ``diverges``/``unknown``.

    Only nonnegative quantities flow through here (tail sums), so a
    divergent summand makes any sum divergent regardless of other parts.
    """

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    flag: Optional[str] = None

    def __post_init__(self):
        if self.flag is None:
            if self.lo is None or self.hi is None or self.lo > self.hi:
                raise BadParams(f"bad interval [{self.lo}, {self.hi}]")
        elif self.flag not in ("diverges", "unknown"):
            raise BadParams(f"unknown interval flag {self.flag!r}")

    @classmethod
    def point(cls, x: RatLike) -> "IntervalRat":
        x = rat(x)
        return cls(x, x)

    @classmethod
    def diverges(cls) -> "IntervalRat":
        return cls(flag="diverges")

    @classmethod
    def unknown(cls) -> "IntervalRat":
        return cls(flag="unknown")

    @property
    def is_point(self) -> bool:
        return self.flag is None and self.lo == self.hi

    @property
    def is_finite(self) -> bool:
        return self.flag is None

    @property
    def is_divergent(self) -> bool:
        return self.flag == "diverges"

    @property
    def is_unknown(self) -> bool:
        return self.flag == "unknown"

    def __add__(self, other):
        if not isinstance(other, IntervalRat):
            other = IntervalRat.point(other)
        if self.is_divergent or other.is_divergent:
            return IntervalRat.diverges()
        if self.is_unknown or other.is_unknown:
            return IntervalRat.unknown()
        return IntervalRat(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def scale(self, c: RatLike) -> "IntervalRat":
        c = rat(c)
        if c < 0:
            raise BadParams("interval scaling by a negative number")
        if self.flag is not None:
            if c == 0 and self.is_divergent:
                return IntervalRat.unknown()
            return self
        return IntervalRat(self.lo * c, self.hi * c)

    def to_json(self):
        if self.flag is not None:
            return {"flag": self.flag}
        return {"lo": rat_str(self.lo), "hi": rat_str(self.hi)}

    def __str__(self):
        if self.flag is not None:
            return self.flag
        if self.is_point:
            return f"[{self.lo}]"
        return f"[{self.lo}, {self.hi}]"


# ---------------------------------------------------------------------------
# Eventual forms: analytic descriptions of a sequence beyond an index H
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvZero:
    """term(n) = 0 for n > H."""
    H: int


@dataclass(frozen=True)
class EvGeo:
    """term(n) = C * r**(n-1) for n > H."""
    H: int
    C: Fraction
    r: Fraction


@dataclass(frozen=True)
class EvPow:
    """term(n) = c / (n + a)**s for n > H."""
    H: int
    c: Fraction
    s: int
    a: int


EvForm = Union[EvZero, EvGeo, EvPow]


def _form_value(f: EvForm, n: int) -> Fraction:
    if isinstance(f, EvZero):
        return Fraction(0)
    if isinstance(f, EvGeo):
        return f.C * f.r ** (n - 1)
    return f.c / Fraction(n + f.a) ** f.s


def _first_true(pred: Callable[[int], bool], lo: int, cap: int = 1 << 62) -> Optional[int]:
    """Smallest n >= lo with pred(n), assuming pred is monotone false->true.

    Galloping search followed by bisection; returns None past ``cap``.
    """
    if pred(lo):
        return lo
    step = 1
    prev = lo
    while True:
        cur = lo + step
        if cur > cap:
            return None
        if pred(cur):
            break
        prev = cur
        step *= 2
    a, b = prev, cur  # pred(a) false, pred(b) true
    while b - a > 1:
        mid = (a + b) // 2
        if pred(mid):
            b = mid
        else:
            a = mid
    return b


def eventual_le(x: Optional[EvForm], y: Optional[EvForm]) -> Optional[int]:
    """Prove x_n <= y_n for all n > n0 and return n0, or None.

    The returned n0 is at least the validity index of both forms.  None
    means no proof was found; it is not a disproof, although for the
    covered family pairs it coincides with failure of eventual domination.
    """
    if x is None or y is None:
        return None
    base = max(x.H, y.H)
    if isinstance(x, EvZero):
        return base
    if isinstance(y, EvZero):
        return None
    start = max(base + 1, 1)

    if isinstance(x, EvGeo) and isinstance(y, EvGeo):
        if x.r > y.r:
            return None
        if x.r == y.r:
            return base if x.C <= y.C else None
        # ratio (x.r / y.r)**(n-1) * x.C / y.C decreases to zero
        n = _first_true(lambda k: _form_value(x, k) <= _form_value(y, k), start)
        return None if n is None else n - 1

    if isinstance(x, EvPow) and isinstance(y, EvPow):
        if x.s < y.s:
            return None
        if x.s == y.s:
            if x.a == y.a:
                return base if x.c <= y.c else None
            if x.c > y.c:
                return None
            if x.c == y.c:
                return base if y.a <= x.a else None
            # x.c < y.c: ratio tends to x.c/y.c < 1
            if y.a < x.a:
                return base  # (n+y.a)/(n+x.a) < 1 already
            n = _first_true(lambda k: _form_value(x, k) <= _form_value(y, k), start)
            return None if n is None else n - 1
        # x.s > y.s: log-ratio derivative negative once n > T
        num = y.s * x.a - x.s * y.a
        den = x.s - y.s
        T = -((-num) // den)  # ceil(num/den)
        lo = max(start, T + 1)
        n = _first_true(lambda k: _form_value(x, k) <= _form_value(y, k), lo)
        return None if n is None else n - 1

    if isinstance(x, EvGeo) and isinstance(y, EvPow):
        # f(n) = x_n / y_n; f(n+1)/f(n) = r ((n+1+a)/(n+a))**s, decreasing in n
        def ratio_le_one(k: int) -> bool:
            return x.r * Fraction(k + 1 + y.a) ** y.s <= Fraction(k + y.a) ** y.s

        T = _first_true(ratio_le_one, start)
        if T is None:
            return None
        n = _first_true(lambda k: _form_value(x, k) <= _form_value(y, k), T)
        return None if n is None else n - 1

    return None  # power law against geometric never dominates


def same_tail(x: Optional[EvForm], y: Optional[EvForm]) -> bool:
    """True when the two forms describe identical terms beyond their H."""
    if x is None or y is None or type(x) is not type(y):
        return False
    if isinstance(x, EvZero):
        return True
    if isinstance(x, EvGeo):
        return x.C == y.C and x.r == y.r
    return x.c == y.c and x.s == y.s and x.a == y.a


def _shift_form(f: Optional[EvForm], head_len: int, offset: int) -> Optional[EvForm]:
    # term(L + j) = tail.term(offset + j), i.e. tail index k = n + offset - L
    if f is None:
        return None
    H = head_len + max(0, f.H - offset)
    d = offset - head_len
    if isinstance(f, EvZero):
        return EvZero(H)
    if isinstance(f, EvGeo):
        return EvGeo(H, f.C * f.r ** d, f.r)
    return EvPow(H, f.c, f.s, f.a + d)


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------

def _check_nonincreasing(values: Sequence[Fraction], what: str) -> None:
    for i, v in enumerate(values):
        if v < 0:
            raise NotMonotone(f"{what}: negative entry at index {i + 1}")
        if i and values[i - 1] < v:
            raise NotMonotone(f"{what}: increase at index {i + 1}")


class MonotoneSeq:
    """Common interface of the sequence variants.

    Subclasses supply ``term``; partial sums are cached cumulatively
    unless a closed form exists.
    """

    def term(self, n: int) -> Fraction:  # pragma: no cover - abstract
        raise NotImplementedError

    # number of computable terms, None when unlimited
    @property
    def horizon(self) -> Optional[int]:
        return None

    def support(self) -> Optional[int]:
        """Length of the support if known to be finite, else None."""
        return None

    def form(self) -> Optional[EvForm]:
        return None

    def _check_index(self, n: int) -> None:
        if n < 1:
            raise BadParams(f"sequence index must be >= 1, got {n}")
        h = self.horizon
        if h is not None and n > h:
            raise HorizonExceeded(f"term {n} requested beyond stored horizon {h}")

    def terms(self, n: int) -> List[Fraction]:
        return [self.term(j) for j in range(1, n + 1)]

    def partial_sum(self, n: int) -> Fraction:
        if n < 0:
            raise BadParams("partial_sum needs n >= 0")
        cache = self._ps_cache()
        while len(cache) <= n:
            k = len(cache)
            cache.append(cache[-1] + self.term(k))
        return cache[n]

    def _ps_cache(self) -> List[Fraction]:
        c = getattr(self, "_ps", None)
        if c is None:
            c = [Fraction(0)]
            object.__setattr__(self, "_ps", c)
        return c

    def tail_sum(self, n: int) -> IntervalRat:
        return IntervalRat.unknown()

    def total(self) -> IntervalRat:
        return self.tail_sum(1)

    def is_summable(self) -> Optional[bool]:
        t = self.total()
        if t.is_finite:
            return True
        if t.is_divergent:
            return False
        return None


@dataclass(frozen=True, eq=True)
class FiniteSupport(MonotoneSeq):
    """Strictly positive nonincreasing values followed by zeros."""

    values: tuple

    def __init__(self, values: Iterable[RatLike]):
        vals = tuple(rat(v) for v in values)
        _check_nonincreasing(vals, "FiniteSupport")
        if vals and vals[-1] <= 0:
            raise NotMonotone("FiniteSupport values must be strictly positive; use finite()")
        object.__setattr__(self, "values", vals)

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return self.values[n - 1] if n <= len(self.values) else Fraction(0)

    def partial_sum(self, n: int) -> Fraction:
        if n < 0:
            raise BadParams("partial_sum needs n >= 0")
        cache = self._ps_cache()
        m = min(n, len(self.values))
        while len(cache) <= m:
            cache.append(cache[-1] + self.values[len(cache) - 1])
        return cache[m]

    def tail_sum(self, n: int) -> IntervalRat:
        if n < 1:
            raise BadParams("tail_sum needs n >= 1")
        return IntervalRat.point(self.partial_sum(len(self.values)) - self.partial_sum(n - 1))

    def support(self) -> int:
        return len(self.values)

    def form(self) -> EvForm:
        return EvZero(len(self.values))


def finite(values: Iterable[RatLike]) -> FiniteSupport:
    """FiniteSupport from a nonincreasing list that may end in zeros."""
    vals = [rat(v) for v in values]
    _check_nonincreasing(vals, "finite")
    while vals and vals[-1] == 0:
        vals.pop()
    return FiniteSupport(vals)


@dataclass(frozen=True)
class Geometric(MonotoneSeq):
    """term(n) = c * r**(n-1) with c > 0 and 0 < r < 1."""

    c: Fraction
    r: Fraction

    def __init__(self, c: RatLike, r: RatLike):
        c, r = rat(c), rat(r)
        if c <= 0 or not (0 < r < 1):
            raise BadParams("Geometric needs c > 0 and 0 < r < 1")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", r)

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return self.c * self.r ** (n - 1)

    def partial_sum(self, n: int) -> Fraction:
        if n < 0:
            raise BadParams("partial_sum needs n >= 0")
        return self.c * (1 - self.r ** n) / (1 - self.r)

    def tail_sum(self, n: int) -> IntervalRat:
        if n < 1:
            raise BadParams("tail_sum needs n >= 1")
        return IntervalRat.point(self.term(n) / (1 - self.r))

    def form(self) -> EvForm:
        return EvGeo(0, self.c, self.r)


@dataclass(frozen=True)
class PowerLaw(MonotoneSeq):
    """term(n) = c / n**s with c > 0 and integer s >= 1.  omega is PowerLaw(1, 1)."""

    c: Fraction
    s: int

    def __init__(self, c: RatLike, s: int):
        c = rat(c)
        if c <= 0 or not isinstance(s, int) or isinstance(s, bool) or s < 1:
            raise BadParams("PowerLaw needs c > 0 and integer s >= 1")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return self.c / Fraction(n) ** self.s

    def tail_sum(self, n: int, refine: int = 0) -> IntervalRat:
        """Integral enclosure of the tail from n.

        With ``refine=k`` the first k terms are summed exactly and the
        integral bounds are applied from n+k, which tightens the width
        from about c/n**s to c/(n+k)**s.
        """
        if n < 1:
            raise BadParams("tail_sum needs n >= 1")
        if self.s == 1:
            return IntervalRat.diverges()
        head = sum((self.term(j) for j in range(n, n + refine)), Fraction(0))
        m = n + refine
        integral = self.c / ((self.s - 1) * Fraction(m) ** (self.s - 1))
        return IntervalRat(head + integral, head + self.term(m) + integral)

    def form(self) -> EvForm:
        return EvPow(0, self.c, self.s, 0)


def omega() -> PowerLaw:
    """The harmonic sequence <1/n>."""
    return PowerLaw(1, 1)


@dataclass(frozen=True)
class Prefix(MonotoneSeq):
    """Finitely many stored terms of an otherwise unknown null sequence."""

    values: tuple

    def __init__(self, values: Iterable[RatLike]):
        vals = tuple(rat(v) for v in values)
        _check_nonincreasing(vals, "Prefix")
        object.__setattr__(self, "values", vals)

    @property
    def horizon(self) -> int:
        return len(self.values)

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return self.values[n - 1]

    def support(self) -> Optional[int]:
        return None


@dataclass(frozen=True)
class Spliced(MonotoneSeq):
    """A finite head followed by a shifted tail.

    term(j) = head[j-1] for j <= L, and term(L + j) = tail.term(offset + j).
    """

    head: tuple
    offset: int
    tail: MonotoneSeq

    def __init__(self, head: Iterable[RatLike], offset: int, tail: MonotoneSeq):
        vals = tuple(rat(v) for v in head)
        if offset < 0:
            raise BadParams("Spliced offset must be >= 0")
        _check_nonincreasing(vals, "Spliced head")
        if vals:
            th = tail.horizon
            if th is None or offset + 1 <= th:
                if vals[-1] < tail.term(offset + 1):
                    raise NotMonotone("Spliced: head ends below the first tail term")
        object.__setattr__(self, "head", vals)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "tail", tail)

    @property
    def horizon(self) -> Optional[int]:
        th = self.tail.horizon
        if th is None:
            return None
        return len(self.head) + max(0, th - self.offset)

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        L = len(self.head)
        if n <= L:
            return self.head[n - 1]
        return self.tail.term(self.offset + n - L)

    def partial_sum(self, n: int) -> Fraction:
        if n < 0:
            raise BadParams("partial_sum needs n >= 0")
        L = len(self.head)
        cache = self._ps_cache()
        while len(cache) <= min(n, L):
            cache.append(cache[-1] + self.head[len(cache) - 1])
        if n <= L:
            return cache[n]
        self._check_index(n)
        return cache[L] + self.tail.partial_sum(self.offset + n - L) - self.tail.partial_sum(self.offset)

    def tail_sum(self, n: int) -> IntervalRat:
        if n < 1:
            raise BadParams("tail_sum needs n >= 1")
        L = len(self.head)
        if n <= L:
            rest = self.tail.tail_sum(self.offset + 1)
            return rest + (self.partial_sum(L) - self.partial_sum(n - 1))
        return self.tail.tail_sum(self.offset + n - L)

    def support(self) -> Optional[int]:
        ts = self.tail.support()
        if ts is None:
            return None
        return len(self.head) + max(0, ts - self.offset)

    def form(self) -> Optional[EvForm]:
        return _shift_form(self.tail.form(), len(self.head), self.offset)


@dataclass(frozen=True)
class Ampliated(MonotoneSeq):
    """D_m applied to ``base``: every entry repeated m times."""

    base: MonotoneSeq
    m: int

    def __init__(self, base: MonotoneSeq, m: int):
        if m < 1:
            raise BadParams("ampliation factor must be >= 1")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "m", m)

    @property
    def horizon(self) -> Optional[int]:
        h = self.base.horizon
        return None if h is None else h * self.m

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return self.base.term(-(-n // self.m))

    def partial_sum(self, n: int) -> Fraction:
        if n < 0:
            raise BadParams("partial_sum needs n >= 0")
        if n == 0:
            return Fraction(0)
        b = -(-n // self.m)
        return self.m * self.base.partial_sum(b - 1) + (n - (b - 1) * self.m) * self.base.term(b)

    def tail_sum(self, n: int) -> IntervalRat:
        if n < 1:
            raise BadParams("tail_sum needs n >= 1")
        b = -(-n // self.m)
        first = (b * self.m - n + 1) * self.base.term(b)
        return self.base.tail_sum(b + 1).scale(self.m) + first

    def support(self) -> Optional[int]:
        s = self.base.support()
        return None if s is None else s * self.m

    def form(self) -> Optional[EvForm]:
        return self.base.form() if self.m == 1 else None


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def scale(s: MonotoneSeq, c: RatLike) -> MonotoneSeq:
    """c * s, staying inside the same family."""
    c = rat(c)
    if c < 0:
        raise BadParams("scaling factor must be nonnegative")
    if c == 0:
        return FiniteSupport([])
    if isinstance(s, FiniteSupport):
        return FiniteSupport([v * c for v in s.values])
    if isinstance(s, Geometric):
        return Geometric(s.c * c, s.r)
    if isinstance(s, PowerLaw):
        return PowerLaw(s.c * c, s.s)
    if isinstance(s, Prefix):
        return Prefix([v * c for v in s.values])
    if isinstance(s, Spliced):
        return Spliced([v * c for v in s.head], s.offset, scale(s.tail, c))
    if isinstance(s, Ampliated):
        return Ampliated(scale(s.base, c), s.m)
    raise BadParams(f"cannot scale {type(s).__name__}")


def shift(s: MonotoneSeq, n: int) -> MonotoneSeq:
    """The truncated sequence <s_{n+1}, s_{n+2}, ...>."""
    if n < 0:
        raise BadParams("shift needs n >= 0")
    if n == 0:
        return s
    if isinstance(s, FiniteSupport):
        return FiniteSupport(s.values[n:])
    if isinstance(s, Geometric):
        return Geometric(s.c * s.r ** n, s.r)
    if isinstance(s, Prefix):
        return Prefix(s.values[n:])
    if isinstance(s, Spliced):
        L = len(s.head)
        if n <= L:
            return Spliced(s.head[n:], s.offset, s.tail)
        return Spliced([], s.offset + n - L, s.tail)
    return Spliced([], n, s)


def chi_prefix(s: MonotoneSeq, n: int) -> FiniteSupport:
    """s times the indicator of [1, n]."""
    return finite(s.terms(n))


def star(data) -> MonotoneSeq:
    """Nonincreasing rearrangement of finite data.

    Accepts a plain list (possibly unsorted), a FiniteSupport or a Prefix.
    """
    if isinstance(data, FiniteSupport):
        return data
    if isinstance(data, Prefix):
        return Prefix(sorted(data.values, reverse=True))
    if isinstance(data, MonotoneSeq):
        raise BadParams("star needs finite data (a list, FiniteSupport or Prefix)")
    vals = [rat(v) for v in data]
    if any(v < 0 for v in vals):
        raise NotMonotone("star: negative entry")
    return finite(sorted(vals, reverse=True))


def ampliate(s: MonotoneSeq, m: int) -> MonotoneSeq:
    if m < 1:
        raise BadParams("ampliate needs m >= 1")
    if m == 1:
        return s
    if isinstance(s, FiniteSupport):
        return FiniteSupport([v for v in s.values for _ in range(m)])
    if isinstance(s, Prefix):
        return Prefix([v for v in s.values for _ in range(m)])
    return Ampliated(s, m)


def reshape(kind: str, s, arg: Optional[int] = None) -> MonotoneSeq:
    """Dispatcher over shift / chi_prefix / star / ampliate."""
    if kind == "shift":
        return shift(s, arg)
    if kind == "chi_prefix":
        return chi_prefix(s, arg)
    if kind == "star":
        return star(s)
    if kind == "ampliate":
        return ampliate(s, arg)
    raise BadParams(f"unknown reshape kind {kind!r}")


def am_means(kind: str, s: MonotoneSeq, n: int):
    """Arithmetic means: ``am`` gives (1/n) sum_1^n, ``am_inf`` gives (1/n) sum_{n+1}^oo."""
    if n < 1:
        raise BadParams("am_means needs n >= 1")
    if kind == "am":
        return s.partial_sum(n) / n
    if kind == "am_inf":
        if s.total().is_divergent:
            raise NotSummable("am_inf of a nonsummable sequence")
        return s.tail_sum(n + 1).scale(Fraction(1, n))
    raise BadParams(f"unknown mean kind {kind!r}")


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def seq_to_json(s: MonotoneSeq) -> dict:
    if isinstance(s, FiniteSupport):
        return {"kind": "finite", "values": [rat_str(v) for v in s.values]}
    if isinstance(s, Geometric):
        return {"kind": "geometric", "c": rat_str(s.c), "r": rat_str(s.r)}
    if isinstance(s, PowerLaw):
        return {"kind": "powerlaw", "c": rat_str(s.c), "s": s.s}
    if isinstance(s, Prefix):
        return {"kind": "prefix", "values": [rat_str(v) for v in s.values]}
    if isinstance(s, Spliced):
        return {"kind": "spliced", "head": [rat_str(v) for v in s.head],
                "offset": s.offset, "tail": seq_to_json(s.tail)}
    if isinstance(s, Ampliated):
        return {"kind": "ampliated", "m": s.m, "base": seq_to_json(s.base)}
    if hasattr(s, "to_json"):
        return s.to_json()
    raise BadParams(f"no JSON form for {type(s).__name__}")


def seq_from_json(d: dict) -> MonotoneSeq:
    kind = d.get("kind")
    if kind == "finite":
        return finite(d["values"])
    if kind == "geometric":
        return Geometric(d["c"], d["r"])
    if kind == "powerlaw":
        return PowerLaw(d["c"], int(d["s"]))
    if kind == "prefix":
        return Prefix(d["values"])
    if kind == "spliced":
        return Spliced(d.get("head", []), int(d.get("offset", 0)), seq_from_json(d["tail"]))
    if kind == "ampliated":
        return Ampliated(seq_from_json(d["base"]), int(d["m"]))
    raise BadParams(f"unknown sequence kind {kind!r}")
