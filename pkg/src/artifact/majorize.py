"""Decision procedures for majorization between monotone null sequences.

Relations are answered with a three-valued ``Verdict3``.  Failures found
by exact prefix-sum comparison are conclusive and carry the smallest
violating index.  A ``holds`` answer is only issued together with a
certificate that covers the infinitely many indices beyond the scanned
range; without one the answer is ``inconclusive``.

Conventions for failures that happen "at infinity" (a limit inferior
that is provably positive, or totals that differ) use witness index 0
and record the reason in ``info``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from .seqcore import (
    BadParams,
    EvGeo,
    EvPow,
    EvZero,
    IntervalRat,
    MonotoneSeq,
    NotSummable,
    eventual_le,
    rat_str,
    same_tail,
    shift,
)

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"

DEFAULT_HORIZON = 1000


@dataclass(frozen=True)
class MajorCert:
    """kind is one of HorizonPlusTermwiseTail, FiniteSupportExact,
    BlockEquality, TailSumComparison, SumEquality."""

    kind: str
    data: Dict[str, Any] = field(default_factory=dict)

    def to_json(self):
        return {"kind": self.kind, **{k: _jsonable(v) for k, v in self.data.items()}}


@dataclass
class Verdict3:
    status: str
    cert: Optional[MajorCert] = None
    witness_index: Optional[int] = None
    deficit: Optional[Fraction] = None
    horizon: Optional[int] = None
    info: Dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    @property
    def conclusive(self) -> bool:
        return self.status != INCONCLUSIVE

    def to_json(self) -> dict:
        out: Dict[str, Any] = {"verdict": self.status, "horizon": self.horizon}
        if self.cert is not None:
            out["certificate"] = self.cert.to_json()
        if self.status == FAILS:
            out["witness"] = {
                "index": self.witness_index,
                "deficit": None if self.deficit is None else rat_str(self.deficit),
            }
        if self.info:
            out["info"] = {k: _jsonable(v) for k, v in self.info.items()}
        return out


def _jsonable(v):
    if isinstance(v, Fraction):
        return rat_str(v)
    if isinstance(v, IntervalRat):
        return v.to_json()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if hasattr(v, "to_json"):
        return v.to_json()
    return v


def holds(kind: str, horizon: int, **data) -> Verdict3:
    return Verdict3(HOLDS, cert=MajorCert(kind, data), horizon=horizon)


def fails(index: int, deficit: Optional[Fraction], horizon: int, **info) -> Verdict3:
    return Verdict3(FAILS, witness_index=index, deficit=deficit, horizon=horizon, info=info)


def inconclusive(horizon: int, **info) -> Verdict3:
    return Verdict3(INCONCLUSIVE, horizon=horizon, info=info)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _limit(xi: MonotoneSeq, eta: MonotoneSeq, horizon: int) -> int:
    lim = horizon
    for s in (xi, eta):
        if s.horizon is not None:
            lim = min(lim, s.horizon)
    return lim


def _both_finite(xi: MonotoneSeq, eta: MonotoneSeq) -> Optional[int]:
    a, b = xi.support(), eta.support()
    if a is None or b is None:
        return None
    return max(a, b)


def diff(xi: MonotoneSeq, eta: MonotoneSeq, n: int) -> Fraction:
    """D(n) = sum_{j<=n} (eta_j - xi_j)."""
    return eta.partial_sum(n) - xi.partial_sum(n)


# ---------------------------------------------------------------------------
# limit of the difference partial sums
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiffLimit:
    """Information about lim_n D(n).

    kind: ``exact`` (value), ``diverges`` (to +infinity), ``enclosure``
    (rigorous interval), ``negative`` (to -infinity, weak majorization
    fails), or ``unknown``.
    """

    kind: str
    value: Optional[Fraction] = None
    interval: Optional[IntervalRat] = None
    reason: str = ""

    @property
    def exact(self) -> bool:
        return self.kind == "exact"

    def lower(self) -> Optional[Fraction]:
        if self.kind == "exact":
            return self.value
        if self.kind == "enclosure":
            return self.interval.lo
        return None

    def upper(self) -> Optional[Fraction]:
        if self.kind == "exact":
            return self.value
        if self.kind == "enclosure":
            return self.interval.hi
        return None

    def is_positive(self) -> Optional[bool]:
        """True if the limit is provably > 0, False if provably == 0."""
        if self.kind == "diverges":
            return True
        if self.kind == "exact":
            return self.value > 0
        if self.kind == "enclosure":
            if self.interval.lo > 0:
                return True
            if self.interval.hi < 0:
                return None
        return None

    def to_json(self):
        out = {"kind": self.kind, "reason": self.reason}
        if self.value is not None:
            out["value"] = rat_str(self.value)
        if self.interval is not None:
            out["interval"] = self.interval.to_json()
        return out


def _telescoped(xf: EvPow, yf: EvPow) -> Fraction:
    # sum_{n>H} c/(n+ya) - c/(n+xa) for equal c, s = 1
    H = max(xf.H, yf.H)
    c = xf.c
    lo, hi = H + 1 + yf.a, H + xf.a
    if xf.a >= yf.a:
        return c * sum((Fraction(1, k) for k in range(lo, hi + 1)), Fraction(0))
    return -c * sum((Fraction(1, k) for k in range(H + 1 + xf.a, H + yf.a + 1)), Fraction(0))


def diff_limit(xi: MonotoneSeq, eta: MonotoneSeq, horizon: int = DEFAULT_HORIZON) -> DiffLimit:
    """lim_n sum_{j<=n}(eta_j - xi_j), exactly when the structure allows."""
    fx, fy = xi.form(), eta.form()
    if fx is not None and fy is not None and same_tail(fx, fy):
        H = max(fx.H, fy.H)
        return DiffLimit("exact", diff(xi, eta, H), reason="identical tails")
    tx, ty = xi.total(), eta.total()
    if tx.is_point and ty.is_point:
        return DiffLimit("exact", ty.lo - tx.lo, reason="exact totals")
    if tx.is_finite and ty.is_divergent:
        return DiffLimit("diverges", reason="eta nonsummable, xi summable")
    if tx.is_divergent and ty.is_finite:
        return DiffLimit("negative", reason="xi nonsummable, eta summable")
    if tx.is_finite and ty.is_finite:
        # tighten through exact partial sums up to n, enclosures beyond
        n = max(1, min(horizon, _limit(xi, eta, horizon)))
        d = diff(xi, eta, n)
        te, tx_ = _tail(eta, n + 1), _tail(xi, n + 1)
        enc = IntervalRat(d + te.lo - tx_.hi, d + te.hi - tx_.lo)
        return DiffLimit("enclosure", interval=enc, reason="tail enclosures")
    if tx.is_divergent and ty.is_divergent:
        if isinstance(fx, EvPow) and isinstance(fy, EvPow) and fx.s == 1 and fy.s == 1:
            if fx.c < fy.c:
                return DiffLimit("diverges", reason="harmonic coefficients differ")
            if fx.c > fy.c:
                return DiffLimit("negative", reason="harmonic coefficients differ")
            H = max(fx.H, fy.H)
            return DiffLimit("exact", diff(xi, eta, H) + _telescoped(fx, fy),
                             reason="telescoping harmonic tails")
    return DiffLimit("unknown", reason="no analytic handle on the tails")


def _tail(s: MonotoneSeq, n: int) -> IntervalRat:
    try:
        return s.tail_sum(n, refine=64)  # PowerLaw accepts refinement
    except TypeError:
        return s.tail_sum(n)


# ---------------------------------------------------------------------------
# weak majorization
# ---------------------------------------------------------------------------

def _scan_fail(xi, eta, upto: int) -> Optional[Tuple[int, Fraction]]:
    for n in range(1, upto + 1):
        d = diff(xi, eta, n)
        if d < 0:
            return n, -d
    return None


def weak(xi: MonotoneSeq, eta: MonotoneSeq, horizon: int = DEFAULT_HORIZON) -> Verdict3:
    lim = _limit(xi, eta, horizon)
    N = _both_finite(xi, eta)
    if N is not None:
        hit = _scan_fail(xi, eta, N)
        if hit:
            return fails(hit[0], hit[1], N)
        return holds("FiniteSupportExact", N, support=N)

    n0 = eventual_le(xi.form(), eta.form())
    if n0 is not None and n0 <= max(lim, 0):
        n0 = max(n0, 1)
        hit = _scan_fail(xi, eta, n0)
        if hit:
            return fails(hit[0], hit[1], n0)
        return holds("HorizonPlusTermwiseTail", n0, n0=n0)

    n1 = _equal_total_anchor(xi, eta, 0)
    if n1 is not None and n1 <= max(lim, 0):
        hit = _scan_fail(xi, eta, n1)
        if hit:
            return fails(hit[0], hit[1], n1)
        return holds("TailSumComparison", n1, n0=n1, equal_totals=xi.total().lo)

    # D(n) nonincreasing beyond n1 with an exact limit >= 0 stays >= 0
    n1 = eventual_le(eta.form(), xi.form())
    if n1 is not None and n1 <= max(lim, 0):
        dl = diff_limit(xi, eta, horizon)
        if dl.exact and dl.value >= 0:
            n1 = max(n1, 1)
            hit = _scan_fail(xi, eta, n1)
            if hit:
                return fails(hit[0], hit[1], n1)
            return holds("TailSumComparison", n1, n0=n1, limit_from_above=dl.value)

    T = xi.total()
    bound = T.hi if T.is_finite else None
    for n in range(1, lim + 1):
        d = diff(xi, eta, n)
        if d < 0:
            return fails(n, -d, lim)
        if bound is not None and eta.partial_sum(n) >= bound:
            return holds("TailSumComparison", lim, n0=n, xi_total_upper=bound)
    return inconclusive(lim, reason="no tail certificate within horizon")


# ---------------------------------------------------------------------------
# strong and block majorization
# ---------------------------------------------------------------------------

def _equality_indices(xi, eta, upto: int) -> List[int]:
    return [n for n in range(1, upto + 1) if diff(xi, eta, n) == 0]


def strong(xi: MonotoneSeq, eta: MonotoneSeq, horizon: int = DEFAULT_HORIZON) -> Verdict3:
    w = weak(xi, eta, horizon)
    if w.fails:
        return w
    lim = diff_limit(xi, eta, horizon)
    if lim.kind == "negative":
        # weak must fail somewhere; it did not within the horizon
        return inconclusive(w.horizon, reason="differences tend to -infinity beyond horizon")
    pos = lim.is_positive()
    if pos:
        return fails(0, lim.value, w.horizon, reason="liminf", limit=lim)
    if lim.exact and lim.value == 0:
        if not w.holds:
            return inconclusive(w.horizon, reason="weak majorization not certified", limit=lim)
        return holds("SumEquality", w.horizon, limit=Fraction(0), weak=w.cert)
    return inconclusive(w.horizon, reason="liminf undecided", limit=lim)


def block(xi: MonotoneSeq, eta: MonotoneSeq, horizon: int = DEFAULT_HORIZON) -> Verdict3:
    w = weak(xi, eta, horizon)
    if w.fails:
        return w
    N = _both_finite(xi, eta)
    if N is not None:
        if diff(xi, eta, N) != 0:
            return fails(0, diff(xi, eta, N), N, reason="liminf", limit=diff(xi, eta, N))
        idx = _equality_indices(xi, eta, N)
        return holds("BlockEquality", N, indices=idx, all_from=N)
    fx, fy = xi.form(), eta.form()
    lim_n = _limit(xi, eta, horizon)
    if same_tail(fx, fy):
        H = max(fx.H, fy.H, 1)
        if diff(xi, eta, H) == 0 and w.holds:
            return holds("BlockEquality", lim_n, indices=_equality_indices(xi, eta, lim_n), all_from=H)
    s = strong(xi, eta, horizon)
    if s.fails:
        return s
    idx = _equality_indices(xi, eta, lim_n)
    return inconclusive(lim_n, reason="block evidence only", indices=idx)


# ---------------------------------------------------------------------------
# majorization at infinity
# ---------------------------------------------------------------------------

def _require_summable(xi, eta):
    for s in (xi, eta):
        if s.total().is_divergent:
            raise NotSummable("majorization at infinity needs summable sequences")


def at_inf(xi: MonotoneSeq, eta: MonotoneSeq, horizon: int = DEFAULT_HORIZON) -> Verdict3:
    """xi <_oo eta: every tail sum of xi is at most that of eta."""
    _require_summable(xi, eta)
    if xi.total().is_unknown or eta.total().is_unknown:
        return inconclusive(0, reason="tail sums unknown (prefix data)")
    lim = diff_limit(xi, eta, horizon)
    N = _both_finite(xi, eta)
    n0 = eventual_le(xi.form(), eta.form())
    upto = horizon
    if N is not None:
        upto = N
    elif n0 is not None:
        upto = max(n0 + 1, 1)
    if upto > max(horizon, N or 0):
        upto = horizon
        certified = False
    else:
        certified = N is not None or n0 is not None
    for n in range(1, upto + 1):
        if lim.exact:
            gap = lim.value - diff(xi, eta, n - 1)  # tail_eta(n) - tail_xi(n)
            if gap < 0:
                return fails(n, -gap, upto)
            continue
        tx, ty = _tail(xi, n), _tail(eta, n)
        if tx.hi <= ty.lo:
            continue
        if tx.lo > ty.hi:
            return fails(n, tx.lo - ty.hi, upto, note="deficit is a lower bound")
        return inconclusive(n, reason="overlapping tail enclosures", index=n)
    if certified:
        return holds("HorizonPlusTermwiseTail", upto, n0=upto)
    return inconclusive(upto, reason="no termwise tail certificate")


def strong_at_inf(xi: MonotoneSeq, eta: MonotoneSeq, horizon: int = DEFAULT_HORIZON) -> Verdict3:
    v = at_inf(xi, eta, horizon)
    if v.fails:
        return v
    lim = diff_limit(xi, eta, horizon)
    if lim.exact and lim.value != 0:
        return fails(1, -lim.value, v.horizon, reason="totals differ")
    if lim.kind == "enclosure" and (lim.interval.lo > 0 or lim.interval.hi < 0):
        return fails(1, None, v.horizon, reason="totals differ", limit=lim)
    if v.holds and lim.exact:
        return holds("SumEquality", v.horizon, limit=Fraction(0), tails=v.cert)
    return inconclusive(v.horizon, reason="equal totals not certified", limit=lim)


# ---------------------------------------------------------------------------
# p-shifted majorization
# ---------------------------------------------------------------------------

def _index_shift(f, d: int):
    """The form of n -> f(n + d)."""
    H = max(0, f.H - d)
    if isinstance(f, EvZero):
        return EvZero(H)
    if isinstance(f, EvGeo):
        return EvGeo(H, f.C * f.r ** d, f.r)
    return EvPow(H, f.c, f.s, f.a + d)


def _tail_forms(f):
    """Eventual forms bounding tail_sum(n) from above and below, or None."""
    if isinstance(f, EvZero):
        return f, f
    if isinstance(f, EvGeo):
        g = EvGeo(f.H, f.C / (1 - f.r), f.r)
        return g, g
    if isinstance(f, EvPow) and f.s >= 2:
        # integral comparison for the decreasing terms c / (k + a)^s
        c = f.c / (f.s - 1)
        H = max(f.H, 1 - f.a)
        return EvPow(H, c, f.s - 1, f.a - 1), EvPow(H, c, f.s - 1, f.a)
    return None


def _equal_total_anchor(xi: MonotoneSeq, eta: MonotoneSeq, p: int) -> Optional[int]:
    """With equal totals, sum_1^{n+p} xi <= sum_1^n eta iff tail_eta(n+1) <= tail_xi(n+p+1)."""
    tx, te = xi.total(), eta.total()
    if not (tx.is_point and te.is_point and tx.lo == te.lo):
        return None
    fx, fe = xi.form(), eta.form()
    if fx is None or fe is None:
        return None
    bx, be = _tail_forms(fx), _tail_forms(fe)
    if bx is None or be is None:
        return None
    n0 = eventual_le(_index_shift(be[0], 1), _index_shift(bx[1], p + 1))
    return None if n0 is None else max(n0 + 1, 1)


def p_shift(xi: MonotoneSeq, eta: MonotoneSeq, p: int, horizon: int = DEFAULT_HORIZON) -> Verdict3:
    """xi <^p eta: xi < eta and sum_1^{n+p} xi <= sum_1^n eta for all n >= N.

    The certificate records the smallest admissible N.
    """
    if p < 0:
        raise BadParams("p must be >= 0")
    w = weak(xi, eta, horizon)
    if w.fails or p == 0:
        if w.holds:
            return holds("HorizonPlusTermwiseTail", w.horizon, N=1, p=0, weak=w.cert)
        return w

    def B(n: int) -> bool:
        return xi.partial_sum(n + p) <= eta.partial_sum(n)

    lim_n = _limit(xi, eta, horizon)
    if xi.horizon is not None:
        lim_n = min(lim_n, xi.horizon - p)
    xs = shift(xi, p)
    anchor = None
    n1 = eventual_le(xs.form(), eta.form())
    if n1 is not None and n1 <= lim_n:
        # increments eta_n - xi_{n+p} are >= 0 beyond n1
        n1 = max(n1, 1)
        if B(n1):
            anchor = n1
        else:
            for n in range(n1 + 1, lim_n + 1):
                if B(n):
                    anchor = n
                    break
    if anchor is None:
        anchor = _equal_total_anchor(xi, eta, p)
    if anchor is None:
        T = xi.total()
        if T.is_finite:
            for n in range(1, lim_n + 1):
                if eta.partial_sum(n) >= T.hi:
                    anchor = n
                    break
    if anchor is None:
        dl = diff_limit(xs, eta, horizon)
        head = xi.partial_sum(p)
        up = dl.upper()
        if (up is not None and up < head) or dl.kind == "negative":
            return fails(0, None, lim_n, reason="shifted sums exceed eta eventually", limit=dl)
        return inconclusive(lim_n, reason="no tail certificate for the shifted condition")
    N = anchor
    while N > 1 and anchor - N < horizon and B(N - 1):
        N -= 1
    if not w.holds:
        return inconclusive(w.horizon, reason="weak majorization not certified", N=N)
    return holds("HorizonPlusTermwiseTail", anchor, N=N, p=p, anchor=anchor, weak=w.cert)


# ---------------------------------------------------------------------------
# dispatcher
# ---------------------------------------------------------------------------

def relation(kind: str, xi: MonotoneSeq, eta: MonotoneSeq,
             horizon: int = DEFAULT_HORIZON, p: Optional[int] = None) -> Verdict3:
    """Decide ``kind`` in {weak, strong, block, at_inf, strong_at_inf, p_shift}.

    ``p_shift`` takes its shift either from ``p`` or from a ``p_shift(3)``
    style kind string.
    """
    if horizon < 1:
        raise BadParams("horizon must be >= 1")
    if kind.startswith("p_shift"):
        if "(" in kind:
            p = int(kind[kind.index("(") + 1:kind.rindex(")")])
        if p is None:
            raise BadParams("p_shift needs p")
        return p_shift(xi, eta, p, horizon)
    table = {"weak": weak, "strong": strong, "block": block,
             "at_inf": at_inf, "strong_at_inf": strong_at_inf}
    if kind not in table:
        raise BadParams(f"unknown relation {kind!r}")
    return table[kind](xi, eta, horizon)


# ---------------------------------------------------------------------------
# attainment of the minimum of the difference sums
# ---------------------------------------------------------------------------

def min_attainment(xi: MonotoneSeq, eta: MonotoneSeq, m: int,
                   horizon: int = DEFAULT_HORIZON) -> Tuple[Verdict3, int, Fraction]:
    """Is min_{n>=m} D(n) attained?  Returns (verdict, argmin, value).

    When the minimum is not attained, argmin is 0 and value is the infimum.
    """
    if m < 1:
        raise BadParams("m must be >= 1")

    def argmin(lo: int, hi: int) -> Tuple[int, Fraction]:
        best, at = None, lo
        for n in range(lo, hi + 1):
            d = diff(xi, eta, n)
            if best is None or d < best:
                best, at = d, n
        return at, best

    N = _both_finite(xi, eta)
    if N is not None:
        at, val = argmin(m, max(m, N))
        return holds("FiniteSupportExact", max(m, N)), at, val
    fx, fy = xi.form(), eta.form()
    n0 = eventual_le(fx, fy)
    if n0 is not None and n0 <= horizon:
        at, val = argmin(m, max(m, n0))
        return holds("HorizonPlusTermwiseTail", max(m, n0), n0=n0), at, val
    n1 = eventual_le(fy, fx)
    lim = diff_limit(xi, eta, horizon)
    if n1 is not None and n1 <= horizon and not same_tail(fx, fy):
        # D nonincreasing beyond n1 and never constant: the infimum over
        # n > n1 is the limit and is not attained
        lo, hi = lim.lower(), lim.upper()
        if m > n1:
            if lo is not None:
                return fails(0, None, n1, reason="strictly decreasing tail", limit=lim), 0, lo
        else:
            at, val = argmin(m, n1)
            if hi is not None and val <= lo:
                return holds("HorizonPlusTermwiseTail", n1, n0=n1, limit=lim), at, val
            if lo is not None and val > hi:
                return fails(0, None, n1, reason="strictly decreasing tail", limit=lim), 0, (
                    lim.value if lim.exact else lo)
    lim_n = _limit(xi, eta, horizon)
    at, val = argmin(m, max(m, lim_n))
    return inconclusive(lim_n, reason="horizon minimizer only", limit=lim), at, val
