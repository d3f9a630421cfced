"""Intermediate sequences between two majorized sequences.

Finite case: given xi < eta find zeta with xi << zeta <= eta, or rho with
xi <= rho << eta, and the analogues for majorization at infinity.

Infinite case: outputs are exact ``Spliced`` sequences, a finite head
computed block by block followed by an analytic tail.  The clip
construction uses eta(t) = <min(t, eta_n)>, represented by ``ClipSeq``.
Every output is verified exactly after construction and returned inside
an ``IntermediateResult`` that records the construction branch.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .canon import NotMajorized
from .decomp import AlphaUnknown, alpha_estimate
from .majorize import (
    DEFAULT_HORIZON,
    Verdict3,
    _jsonable,
    at_inf,
    diff,
    diff_limit,
    strong,
    strong_at_inf,
    weak,
)
from .seqcore import (
    ArtifactError,
    BadParams,
    IntervalRat,
    MonotoneSeq,
    NotSummable,
    Prefix,
    Spliced,
    _first_true,
    eventual_le,
    finite,
    rat,
    rat_str,
    same_tail,
    seq_to_json,
    shift,
)


class BranchUndetermined(ArtifactError):
    """No construction branch could be certified for the pair."""


class NotTailMajorized(ArtifactError):
    """The pair is not majorized at infinity."""


# ---------------------------------------------------------------------------
# clipped sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClipSeq(MonotoneSeq):
    """eta(t) = <min(t, base_n)>."""

    base: MonotoneSeq
    t: Fraction

    def __init__(self, base: MonotoneSeq, t):
        t = rat(t)
        if t < 0:
            raise BadParams("clip level must be >= 0")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "t", t)

    @property
    def horizon(self) -> Optional[int]:
        return self.base.horizon

    def term(self, n: int) -> Fraction:
        self._check_index(n)
        return min(self.t, self.base.term(n))

    def first_unclipped(self) -> Optional[int]:
        """Smallest J with base_J <= t; from J on the clip is inactive."""
        cap = self.base.horizon or (1 << 62)
        return _first_true(lambda j: self.base.term(j) <= self.t, 1, cap)

    def support(self) -> Optional[int]:
        if self.t == 0:
            return 0
        return self.base.support()

    def tail_sum(self, n: int) -> IntervalRat:
        if n < 1:
            raise BadParams("tail_sum needs n >= 1")
        if self.t == 0:
            return IntervalRat.point(0)
        J = self.first_unclipped()
        if J is None:
            return IntervalRat.unknown()
        flat = max(0, J - n) * self.t
        return self.base.tail_sum(max(n, J)) + flat

    def form(self):
        if self.t == 0:
            from .seqcore import EvZero
            return EvZero(0)
        f = self.base.form()
        if f is None:
            return None
        J = self.first_unclipped()
        if J is None:
            return None
        return dataclasses.replace(f, H=max(f.H, J - 1))


def clip(eta: MonotoneSeq, t) -> ClipSeq:
    return ClipSeq(eta, t)


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass
class IntermediateResult:
    seq: MonotoneSeq
    branch: str
    conclusive: bool
    checks: Dict[str, Any] = field(default_factory=dict)
    data: Dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict:
        try:
            s = seq_to_json(self.seq)
        except Exception:  # pragma: no cover - exotic sequence types
            s = {"kind": type(self.seq).__name__}
        return {"sequence": s, "branch": self.branch, "conclusive": self.conclusive,
                "checks": _jsonable(self.checks), "data": _jsonable(self.data)}


# ---------------------------------------------------------------------------
# finite relations
# ---------------------------------------------------------------------------

def _ps(v: Sequence[Fraction]) -> List[Fraction]:
    out = [Fraction(0)]
    for x in v:
        out.append(out[-1] + x)
    return out


def f_weak(x: Sequence[Fraction], y: Sequence[Fraction]) -> bool:
    """x < y: every prefix sum of x is at most that of y."""
    a, b = _ps(x), _ps(y)
    return all(a[n] <= b[n] for n in range(1, len(x) + 1))


def f_strong(x, y) -> bool:
    return f_weak(x, y) and sum(x) == sum(y)


def f_at_inf(x, y) -> bool:
    """x <_oo y: every tail sum of x is at most that of y."""
    N = len(x)
    return all(sum(x[n:]) <= sum(y[n:]) for n in range(N))


def f_strong_at_inf(x, y) -> bool:
    return f_at_inf(x, y) and sum(x) == sum(y)


def _nonincreasing(v: Sequence[Fraction]) -> bool:
    return all(a >= b for a, b in zip(v, v[1:])) and all(a >= 0 for a in v)


def _prep(xi, eta) -> Tuple[List[Fraction], List[Fraction]]:
    x = [rat(v) for v in xi]
    y = [rat(v) for v in eta]
    if len(x) != len(y):
        raise BadParams("finite_intermediate needs sequences of equal length")
    if not (_nonincreasing(x) and _nonincreasing(y)):
        raise BadParams("inputs must be nonnegative and nonincreasing")
    return x, y


# ---------------------------------------------------------------------------
# finite constructions
# ---------------------------------------------------------------------------

def mirsky_clip(x: List[Fraction], y: List[Fraction]) -> List[Fraction]:
    """zeta = <y_1..y_{N-1}, total(x) - sum_{<N} y, 0, ...> for the smallest
    N with sum_1^N y >= total(x)."""
    T = sum(x, Fraction(0))
    acc = Fraction(0)
    out: List[Fraction] = []
    for v in y:
        if acc + v >= T:
            out.append(T - acc)
            break
        out.append(v)
        acc += v
    return out + [Fraction(0)] * (len(y) - len(out))


def fan_raise(x: List[Fraction], y: List[Fraction]) -> List[Fraction]:
    """Greedy left-to-right raise of x inside the prefix constraints of y."""
    N = len(x)
    P = _ps(y)
    X = _ps(x)
    rho: List[Fraction] = []
    used = Fraction(0)
    for j in range(1, N + 1):
        # room left at n >= j if entries j..n stay at x
        slack = min(P[n] - used - (X[n] - X[j - 1]) for n in range(j, N + 1))
        v = x[j - 1] + slack
        if rho:
            v = min(v, rho[-1])
        rho.append(v)
        used += v
    return rho


def b_i_induction(x: List[Fraction], y: List[Fraction]) -> List[Fraction]:
    """zeta with x <<_oo zeta <= y, by induction on the length."""
    N = len(x)
    if N == 0 or sum(y) == sum(x):
        return list(y)
    if N == 1:
        return list(x)
    tails = [sum(y[n:], Fraction(0)) - sum(x[n:], Fraction(0)) for n in range(N)]
    a = min(tails)
    y = y[:-1] + [y[-1] - a]
    if sum(y) == sum(x):
        return y
    # the smallest m > 1 where the tail sum from m vanishes
    m = next(n + 1 for n in range(1, N) if sum(y[n:]) == sum(x[n:]))
    head = b_i_induction(x[:m - 1], y[:m - 1])
    return head + y[m - 1:]


def b_ii_bump(x: List[Fraction], y: List[Fraction]) -> List[Fraction]:
    return [x[0] + sum(y) - sum(x)] + x[1:]


def finite_intermediate(kind: str, xi, eta) -> List[Fraction]:
    """kind in A_i, A_ii, B_i, B_ii; output verified exactly."""
    x, y = _prep(xi, eta)
    if kind in ("A_i", "A_ii"):
        if not f_weak(x, y):
            raise NotMajorized(_first_bad_prefix(x, y), msg="xi is not majorized by eta")
    elif kind in ("B_i", "B_ii"):
        if not f_at_inf(x, y):
            raise NotMajorized(0, msg="xi is not majorized at infinity by eta")
    else:
        raise BadParams(f"unknown kind {kind!r}")
    if not x:
        return []
    if kind == "A_i":
        out = mirsky_clip(x, y)
        ok = f_strong(x, out) and all(a <= b for a, b in zip(out, y))
    elif kind == "A_ii":
        out = fan_raise(x, y)
        ok = f_strong(out, y) and all(a <= b for a, b in zip(x, out))
    elif kind == "B_i":
        out = b_i_induction(x, y)
        ok = f_strong_at_inf(x, out) and all(a <= b for a, b in zip(out, y))
    else:
        out = b_ii_bump(x, y)
        ok = f_strong_at_inf(out, y) and all(a <= b for a, b in zip(x, out))
    if not (ok and _nonincreasing(out) and len(out) == len(x)):
        raise ArtifactError(f"{kind} construction failed its post-check")
    return out


def _first_bad_prefix(x, y) -> int:
    a, b = _ps(x), _ps(y)
    return next(n for n in range(1, len(x) + 1) if a[n] > b[n])


# ---------------------------------------------------------------------------
# clip threshold
# ---------------------------------------------------------------------------

@dataclass
class ClipThreshold:
    t1: Fraction
    N1: int
    conclusive: bool
    scanned: int
    binding_n: int

    def to_json(self):
        return {"t1": rat_str(self.t1), "N1": self.N1, "conclusive": self.conclusive,
                "scanned": self.scanned, "binding_n": self.binding_n}


def _count_at_least(eta: MonotoneSeq, t: Fraction) -> int:
    """Number of indices j with eta_j >= t (eta in c0, t > 0)."""
    cap = eta.horizon or (1 << 62)
    j = _first_true(lambda n: eta.term(n) < t, 1, cap)
    return cap if j is None else j - 1


def _limit_level(eta: MonotoneSeq, a: Fraction) -> Fraction:
    """Smallest t >= 0 with sum_j (eta_j - t)^+ <= a."""
    r = 1
    while True:
        t = (eta.partial_sum(r) - a) / r
        if t <= 0:
            return Fraction(0)
        if eta.term(r + 1) <= t:
            return t
        r += 1


def clip_threshold(xi: MonotoneSeq, eta: MonotoneSeq,
                   horizon: int = DEFAULT_HORIZON) -> ClipThreshold:
    """Smallest t with xi < eta(t), and N1 with eta_{N1+1} < t1 <= eta_{N1}.

    For each n the constraint sum_{j<=n} min(t, eta_j) >= sum_{j<=n} xi_j
    is piecewise linear in t; t1 is the largest per-n solution.  Past an
    index n0 beyond which xi_j <= eta_j termwise, no constraint can bind
    because t1 >= xi_1 >= xi_j.
    """
    x1 = xi.term(1)
    if x1 <= 0:
        raise BadParams("clip_threshold needs xi_1 > 0")
    if x1 > eta.term(1):
        raise NotMajorized(1, 1, "xi_1 exceeds eta_1")
    sx, sy = xi.support(), eta.support()
    n0 = eventual_le(xi.form(), eta.form())
    if sx is not None and sy is not None:
        upto, conclusive = max(sx, 1), True
    elif n0 is not None and n0 <= horizon:
        upto, conclusive = max(n0, 1), True
    else:
        upto, conclusive = horizon, False
    T = x1
    if not conclusive:
        # past n1 the constraints only weaken towards their limit
        # sum_j (eta_j - t)^+ <= alpha, which is solved exactly
        n1 = eventual_le(eta.form(), xi.form())
        lim = diff_limit(xi, eta, horizon)
        if n1 is not None and n1 <= horizon and lim.exact:
            if lim.value < 0:
                raise NotMajorized(0, None, "difference sums tend to a negative limit")
            T = max(T, _limit_level(eta, lim.value))
            upto, conclusive = max(n1, 1), True
    r = _count_at_least(eta, T)
    binding = 1
    for n in range(1, upto + 1):
        S = xi.partial_sum(n)
        k = min(n, r)
        f = T * k + (eta.partial_sum(n) - eta.partial_sum(k))
        if f >= S:
            continue
        # a larger t is needed: solve on the piece with k' entries clipped
        Pn = eta.partial_sum(n)
        t = None
        for kk in range(k, 0, -1):
            cand = (S - Pn + eta.partial_sum(kk)) / kk
            lower = eta.term(kk + 1) if kk < n else Fraction(0)
            if lower <= cand <= eta.term(kk):
                t = cand
                break
        if t is None:
            raise NotMajorized(n, n, "no clip level satisfies the prefix constraint")
        T, binding = t, n
        r = _count_at_least(eta, T)
    return ClipThreshold(T, r, conclusive, upto, binding)


# ---------------------------------------------------------------------------
# verification helpers
# ---------------------------------------------------------------------------

def _check_below(a: MonotoneSeq, b: MonotoneSeq, upto: int) -> bool:
    """a_j <= b_j for j <= upto (within available data)."""
    for j in range(1, upto + 1):
        if a.horizon is not None and j > a.horizon:
            break
        if b.horizon is not None and j > b.horizon:
            break
        if a.term(j) > b.term(j):
            return False
    return True


def _verdict_json(v: Verdict3) -> dict:
    return v.to_json()


def _finalize_zeta(xi, eta, zeta, branch, conclusive, horizon, data) -> IntermediateResult:
    H = min(horizon, 200)
    below = _check_below(zeta, eta, H)
    w = weak(xi, zeta, horizon)
    s = strong(xi, zeta, horizon)
    checks = {"zeta_le_eta": below, "weak_xi_zeta": w.to_json(), "strong_xi_zeta": s.to_json()}
    if not below or w.fails or s.fails:
        raise ArtifactError(f"zeta construction ({branch}) failed its post-check: {checks}")
    return IntermediateResult(zeta, branch, conclusive and s.holds, checks, data)


def _finalize_rho(xi, eta, rho, branch, conclusive, horizon, data) -> IntermediateResult:
    H = min(horizon, 200)
    above = _check_below(xi, rho, H)
    mono = all(rho.term(j) >= rho.term(j + 1) for j in range(1, H)
               if rho.horizon is None or j + 1 <= rho.horizon)
    w = weak(rho, eta, horizon)
    s = strong(rho, eta, horizon)
    checks = {"xi_le_rho": above, "monotone": mono, "weak_rho_eta": w.to_json(),
              "strong_rho_eta": s.to_json()}
    if not above or not mono or w.fails or s.fails:
        raise ArtifactError(f"rho construction ({branch}) failed its post-check: {checks}")
    return IntermediateResult(rho, branch, conclusive and s.holds, checks, data)


def _attained_everywhere(xi: MonotoneSeq, eta: MonotoneSeq) -> Optional[int]:
    """An index n0 past which D(n) is nondecreasing, or None."""
    sx, sy = xi.support(), eta.support()
    if sx is not None and sy is not None:
        return max(sx, sy)
    return eventual_le(xi.form(), eta.form())


def _exact_total(s: MonotoneSeq) -> Optional[Fraction]:
    T = s.total()
    return T.lo if T.is_finite and T.is_point else None


# ---------------------------------------------------------------------------
# infinite zeta
# ---------------------------------------------------------------------------

def infinite_zeta(xi: MonotoneSeq, eta: MonotoneSeq, horizon: int = DEFAULT_HORIZON,
                  budget: int = 256) -> IntermediateResult:
    """zeta with xi << zeta <= eta."""
    w = weak(xi, eta, horizon)
    if w.fails:
        raise NotMajorized(w.witness_index or 0, w.witness_index)
    alpha = alpha_estimate(xi, eta, horizon)
    if alpha.kind == "exact" and alpha.value == 0:
        return _finalize_zeta(xi, eta, eta, "alpha_zero", w.holds, horizon, {"alpha": alpha})

    Tx = _exact_total(xi)
    if Tx is not None:
        # xi summable: clip eta at the first index where its sum reaches total(xi)
        N = _first_true(lambda n: eta.partial_sum(n) >= Tx, 1, 1 << 40)
        if N is None:
            raise BranchUndetermined("eta never reaches the total of xi")
        head = eta.terms(N - 1) + [Tx - eta.partial_sum(N - 1)]
        return _finalize_zeta(xi, eta, finite(head), "summable_clip", True, horizon,
                              {"alpha": alpha, "N": N})

    n0 = _attained_everywhere(xi, eta)
    if n0 is not None or alpha.is_infinite:
        return _zeta_blocks(xi, eta, n0, horizon, budget, alpha)

    n1 = eventual_le(eta.form(), xi.form())
    if alpha.kind == "exact" and n1 is not None and not same_tail(xi.form(), eta.form()):
        return _zeta_clip_iteration(xi, eta, horizon, budget, alpha)
    raise BranchUndetermined("neither summable, minimum-attaining, divergent nor "
                             "certifiably non-attaining")


def _first_zero(xi: MonotoneSeq, src: MonotoneSeq, o: int, upto: int) -> Optional[int]:
    """Smallest m in 1..upto with sum_{j<=m}(src_{o+j} - xi_{o+j}) == 0."""
    acc = Fraction(0)
    for m in range(1, upto + 1):
        acc += src.term(o + m) - xi.term(o + m)
        if acc == 0:
            return m
    return None


def _zeta_blocks(xi, eta, n0, horizon, budget, alpha) -> IntermediateResult:
    head: List[Fraction] = []
    blocks: List[Tuple[int, Fraction]] = []
    o = 0
    limit = n0 if n0 is not None else horizon
    while o < limit:
        if len(blocks) >= budget:
            break
        ct = clip_threshold(shift(xi, o), shift(eta, o), horizon)
        c = ClipSeq(eta, ct.t1)
        span = max(limit - o, 1)
        m = _first_zero(xi, c, o, span)
        if m is None:
            raise BranchUndetermined(f"no block end found after index {o}")
        head.extend(c.term(o + j) for j in range(1, m + 1))
        blocks.append((o + m, ct.t1))
        o += m
    data = {"alpha": alpha, "blocks": [[n, t] for n, t in blocks], "n0": n0}
    if n0 is not None and o >= n0:
        zeta = Spliced(head, o, xi) if head else xi
        return _finalize_zeta(xi, eta, zeta, "block_splice", True, horizon, data)
    return _finalize_zeta(xi, eta, Prefix(head), "block_splice_truncated", False, horizon, data)


def _zeta_clip_iteration(xi, eta, horizon, budget, alpha) -> IntermediateResult:
    head: List[Fraction] = []
    steps: List[Tuple[int, Fraction]] = []
    o = 0
    for _ in range(budget):
        ct = clip_threshold(shift(xi, o), shift(eta, o), horizon)
        c = ClipSeq(eta, ct.t1)
        lim = diff_limit(shift(xi, o), shift(c, o), horizon)
        if lim.kind == "exact" and lim.value == 0:
            steps.append((0, ct.t1))
            data = {"alpha": alpha, "steps": [[n, t] for n, t in steps]}
            zeta = Spliced(head, o, c)
            return _finalize_zeta(xi, eta, zeta, "clip_iteration", ct.conclusive, horizon, data)
        m = _first_zero(xi, c, o, horizon)
        if m is None:
            raise BranchUndetermined(f"clip step after index {o} has no certified end")
        head.extend(c.term(o + j) for j in range(1, m + 1))
        steps.append((o + m, ct.t1))
        o += m
    data = {"alpha": alpha, "steps": [[n, t] for n, t in steps], "budget_exhausted": True}
    return _finalize_zeta(xi, eta, Prefix(head), "clip_iteration_truncated", False, horizon, data)


# ---------------------------------------------------------------------------
# infinite rho
# ---------------------------------------------------------------------------

def infinite_rho(xi: MonotoneSeq, eta: MonotoneSeq, horizon: int = DEFAULT_HORIZON,
                 budget: int = 256) -> IntermediateResult:
    """rho with xi <= rho << eta."""
    w = weak(xi, eta, horizon)
    if w.fails:
        raise NotMajorized(w.witness_index or 0, w.witness_index)
    alpha = alpha_estimate(xi, eta, horizon)
    if alpha.kind not in ("exact", "diverges"):
        raise AlphaUnknown(f"alpha is not certified ({alpha.reason})")
    if alpha.kind == "exact" and alpha.value == 0:
        return _finalize_rho(xi, eta, xi, "alpha_zero", w.holds, horizon, {"alpha": alpha})
    n0 = _attained_everywhere(xi, eta)
    if n0 is not None:
        return _rho_blocks(xi, eta, n0, horizon, alpha)
    n1 = eventual_le(eta.form(), xi.form())
    if alpha.kind == "exact" and n1 is not None and not same_tail(xi.form(), eta.form()):
        a = alpha.value
        N = 0
        for n in range(1, n1 + 1):
            if diff(xi, eta, n) <= a:
                N = n
        fan = fan_raise(xi.terms(N), eta.terms(N)) if N else []
        bump = xi.term(N + 1) + a - diff(xi, eta, N)
        rho = Spliced(fan + [bump], N + 1, xi)
        return _finalize_rho(xi, eta, rho, "nonattaining_bump", True, horizon,
                             {"alpha": alpha, "N": N})
    raise BranchUndetermined("minimum attainment of the difference sums is undecided")


def _rho_blocks(xi, eta, n0, horizon, alpha) -> IntermediateResult:
    head: List[Fraction] = []
    cuts: List[int] = []
    o = 0
    while o < n0:
        hi = max(n0, o + 1)
        best, at = None, None
        for n in range(o + 1, hi + 1):
            d = diff(xi, eta, n)
            if best is None or d < best:
                best, at = d, n
        head.extend(fan_raise(xi.terms(at)[o:], eta.terms(at)[o:]))
        cuts.append(at)
        o = at
    data = {"alpha": alpha, "block_ends": cuts, "n0": n0}
    if xi.support() is not None and eta.support() is not None:
        rho = finite(head)
    else:
        rho = Spliced(head, o, eta) if head else eta
    return _finalize_rho(xi, eta, rho, "block_fan", True, horizon, data)


# ---------------------------------------------------------------------------
# majorization at infinity (summable pairs)
# ---------------------------------------------------------------------------

def rho_t_p_step(x: Sequence[Fraction], y: Sequence[Fraction]) -> Optional[Tuple[int, Fraction, int]]:
    """One block of the rho(t, p) construction on finite windows.

    Returns (p1, t1, n1), or None when y < rho(x_p, p) for every p (the
    window gives no block).
    """
    x = [rat(v) for v in x]
    y = [rat(v) for v in y]
    L = len(x)
    if L == 0:
        return None
    if y[0] > x[0]:
        return 1, y[0], 1
    Y = _ps(y)
    X = _ps(x)

    def y_below_rho(t: Fraction, p: int) -> bool:
        for n in range(1, L + 1):
            r = X[n] if n < p else X[p - 1] + (n - p + 1) * t
            if r < Y[n]:
                return False
        return True

    for p in range(2, L + 1):
        if not y_below_rho(x[p - 1], p):
            best, n1 = None, None
            for n in range(p, L + 1):
                t = (Y[n] - X[p - 1]) / (n - p + 1)
                if best is None or t > best:
                    best, n1 = t, n
            return p, best, n1
    return None


def rho_t_p_splice(xi: MonotoneSeq, eta: MonotoneSeq, upto: int) -> Tuple[List[Fraction], List[Tuple[int, Fraction, int]]]:
    """Blocks of the rho(t, p) construction on indices 1..upto."""
    x, y = xi.terms(upto), eta.terms(upto)
    out: List[Fraction] = []
    blocks = []
    o = 0
    while o < upto:
        st = rho_t_p_step(x[o:], y[o:])
        if st is None:
            break
        p, t, n = st
        out.extend(x[o:o + p - 1] + [t] * (n - p + 1))
        blocks.append((p, t, o + n))
        o += n
    return out, blocks


def inf_intermediate(kind: str, xi: MonotoneSeq, eta: MonotoneSeq,
                     horizon: int = DEFAULT_HORIZON) -> IntermediateResult:
    """Intermediate sequences for majorization at infinity of summable pairs."""
    Tx, Ty = _exact_total(xi), _exact_total(eta)
    if Tx is None or Ty is None:
        raise NotSummable("both sequences need exact finite totals")
    v = at_inf(xi, eta, horizon)
    if v.fails:
        raise NotTailMajorized(f"tail sums of xi exceed those of eta at index {v.witness_index}")
    if kind == "rho":
        rho = Spliced([xi.term(1) + Ty - Tx], 1, xi)
        s = strong_at_inf(rho, eta, horizon)
        ok = _check_below(xi, rho, min(horizon, 200))
        checks = {"xi_le_rho": ok, "strong_at_inf_rho_eta": s.to_json()}
        if not ok or s.fails:
            raise ArtifactError(f"rho post-check failed: {checks}")
        return IntermediateResult(rho, "first_entry_bump", v.holds and s.holds, checks,
                                  {"deficit": Ty - Tx})
    if kind != "zeta":
        raise BadParams(f"unknown kind {kind!r}")
    for N in range(0, horizon + 1):
        t = weak(shift(eta, N), shift(xi, N), horizon)
        if t.holds:
            head = b_i_induction(xi.terms(N), eta.terms(N)) if N else []
            zeta = Spliced(head, N, eta) if head else eta
            branch = "tail_split"
            break
        if N >= min(horizon, 200):
            t = None
            break
    else:  # pragma: no cover
        t = None
    if t is None:
        n0 = eventual_le(xi.form(), eta.form())
        if n0 is not None and _check_below(xi, eta, max(n0, 1)):
            # xi <= eta termwise: zeta = xi already qualifies
            return IntermediateResult(xi, "termwise", v.holds,
                                      {"xi_le_eta": True, "n0": n0}, {})
    if t is None:
        # no tested tail of eta is majorized by that of xi: splice block solves
        upto = min(horizon, 200)
        head, cuts = [], []
        o = 0
        while o < upto:
            acc = Fraction(0)
            end = None
            for n in range(o + 1, upto + 1):
                acc += eta.term(n) - xi.term(n)
                if acc > 0:
                    end = n
                    break
            if end is None:
                break
            head.extend(b_i_induction(xi.terms(end)[o:], eta.terms(end)[o:]))
            cuts.append(end)
            o = end
        zeta = Prefix(head)
        branch = "block_splice_truncated"
        H = len(head)
        ok = _check_below(zeta, eta, H)
        checks = {"zeta_le_eta": ok, "prefix_len": H}
        return IntermediateResult(zeta, branch, False, checks, {"block_ends": cuts})
    s = strong_at_inf(xi, zeta, horizon)
    ok = _check_below(zeta, eta, min(horizon, 200))
    checks = {"zeta_le_eta": ok, "strong_at_inf_xi_zeta": s.to_json()}
    if not ok or s.fails:
        raise ArtifactError(f"zeta post-check failed: {checks}")
    return IntermediateResult(zeta, branch, v.holds and s.holds, checks, {"N": N})
