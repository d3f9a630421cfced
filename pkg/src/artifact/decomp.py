"""Splitting a nonsummable weak majorization into strong ones.

A weak majorization xi < eta with xi nonsummable and positive limit
inferior alpha of the difference sums is split in three stages:

* ``shift_search`` finds integers p < n with xi chi[1,n] < eta chi[1,n-p]
  and xi^(n) < eta^(n-p) (the tail parts, shifted).
* ``partition_construct`` moves a sparse subsequence of each tail into the
  finite heads so that the heads become a strong majorization
  xi' << eta' while the remainders keep a weak one, xi'' < eta''.
* ``assemble`` builds the canonical matrix for xi' << eta' and scatters it
  into the rows and columns it occupies.

Index streams are generated greedily with the smallest admissible index
at every choice.  Every displayed inequality is re-checked exactly on the
generated data and recorded in ``PartitionPlan.checks``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from .canon import canon_run
from .majorize import (
    DEFAULT_HORIZON,
    Verdict3,
    _jsonable,
    diff,
    diff_limit,
    strong,
    weak,
)
from .seqcore import (
    ArtifactError,
    BadParams,
    HorizonExceeded,
    IntervalRat,
    MonotoneSeq,
    Prefix,
    _first_true,
    eventual_le,
    rat_str,
    shift,
)
from .stoch import RationalMatTrunc, apply, direct_sum


class NotApplicable(ArtifactError):
    """The inputs do not satisfy the preconditions of the construction."""


class AlphaUnknown(ArtifactError):
    """The limit inferior of the difference sums could not be certified."""


class NotFound(ArtifactError):
    """No shift certificate within the search horizon."""


class CaseUndetermined(ArtifactError):
    """Neither the beta > 0 nor the certified gamma > 0 case applies."""


class HorizonExhausted(ArtifactError):
    """Index streams could not be extended within the horizon."""


class DepthExhausted(ArtifactError):
    """The recursion depth cap was reached before the rows were covered."""


# cap on the number of terms in the exact prefix-sum checks of a plan
CHECK_CAP = 2000
# cap on the number of k-indices a single plan may select
TERM_BUDGET = 20000


# ---------------------------------------------------------------------------
# alpha
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlphaEstimate:
    """liminf of sum_{j<=n}(eta_j - xi_j).

    kind is ``exact`` (value), ``diverges``, ``enclosure`` (interval) or
    ``unknown``.  ``rigorous`` is False for estimates read off horizon data.
    """

    kind: str
    value: Optional[Fraction] = None
    interval: Optional[IntervalRat] = None
    rigorous: bool = True
    reason: str = ""

    @property
    def is_infinite(self) -> bool:
        return self.kind == "diverges"

    def certified_positive(self) -> bool:
        if self.kind == "diverges":
            return True
        if self.kind == "exact":
            return self.value > 0
        return self.kind == "enclosure" and self.rigorous and self.interval.lo > 0

    def to_json(self) -> dict:
        out = {"kind": self.kind, "rigorous": self.rigorous, "reason": self.reason}
        if self.value is not None:
            out["value"] = rat_str(self.value)
        if self.interval is not None:
            out["interval"] = self.interval.to_json()
        return out


def alpha_estimate(xi: MonotoneSeq, eta: MonotoneSeq,
                   horizon: int = DEFAULT_HORIZON) -> AlphaEstimate:
    """Exact when the difference sums are analytically under control.

    Raises NotApplicable when the sums provably tend to -infinity (weak
    majorization then fails).
    """
    lim = diff_limit(xi, eta, horizon)
    if lim.kind == "negative":
        raise NotApplicable("difference sums tend to -infinity: weak majorization fails")
    if lim.kind == "exact":
        return AlphaEstimate("exact", value=lim.value, reason=lim.reason)
    if lim.kind == "diverges":
        return AlphaEstimate("diverges", reason=lim.reason)
    if lim.kind == "enclosure":
        return AlphaEstimate("enclosure", interval=lim.interval, reason=lim.reason)
    # horizon data only: report the range of D over the last stretch
    lo_n = max(1, horizon // 2)
    vals = [diff(xi, eta, n) for n in range(lo_n, horizon + 1)]
    return AlphaEstimate("enclosure", interval=IntervalRat(min(vals), max(vals)),
                         rigorous=False, reason="horizon data only")


# ---------------------------------------------------------------------------
# shift certificates
# ---------------------------------------------------------------------------

@dataclass
class ShiftCert:
    p: int
    n: int
    finite_check: bool
    tail_check: Verdict3

    def __post_init__(self):
        if not 0 <= self.p < self.n:
            raise BadParams("a shift certificate needs 0 <= p < n")

    @property
    def conclusive(self) -> bool:
        return self.finite_check and self.tail_check.holds

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "finite_check": self.finite_check,
                "tail_check": self.tail_check.to_json()}


def finite_part_ok(xi: MonotoneSeq, eta: MonotoneSeq, n: int, p: int) -> bool:
    """Exact test of xi chi[1,n] < eta chi[1,n-p]."""
    for m in range(1, n - p + 1):
        if diff(xi, eta, m) < 0:
            return False
    return xi.partial_sum(n) <= eta.partial_sum(n - p)


def shift_search(xi: MonotoneSeq, eta: MonotoneSeq, horizon: int = DEFAULT_HORIZON,
                 min_n: int = 1) -> ShiftCert:
    """Smallest (n, then p) with n >= min_n passing both checks.

    A certificate whose tail check holds conclusively is preferred; if
    none exists within the horizon the first non-failing one is returned.
    """
    a = alpha_estimate(xi, eta, horizon)
    if a.kind == "exact" and a.value == 0:
        raise NotApplicable("the difference sums tend to 0: strong majorization, nothing to split")
    if not a.certified_positive():
        raise AlphaUnknown(f"cannot certify alpha > 0 ({a.reason})")
    w = weak(xi, eta, horizon)
    if w.fails:
        raise NotApplicable(f"weak majorization fails at index {w.witness_index}")
    fallback: Optional[ShiftCert] = None
    prefix_ok = all(diff(xi, eta, m) >= 0 for m in range(1, min_n))
    for n in range(min_n, min_n + horizon):
        if not prefix_ok:
            break
        Sn = xi.partial_sum(n)
        for p in range(0, n):
            if Sn > eta.partial_sum(n - p):
                break
            tail = weak(shift(xi, n), shift(eta, n - p), horizon)
            if tail.holds:
                return ShiftCert(p, n, True, tail)
            if fallback is None and not tail.fails:
                fallback = ShiftCert(p, n, True, tail)
        prefix_ok = diff(xi, eta, n) >= 0
    if fallback is not None:
        return fallback
    raise NotFound(f"no shift certificate with {min_n} <= n < {min_n + horizon}")


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

@dataclass
class PartitionPlan:
    """Generated prefixes of the two index partitions.

    n1 = <1..N, k_1, k_2, ...> indexes xi', m1 = <1..N-p, h_1, h_2, ...>
    indexes eta'.  n2 and m2 are the complements, listed up to the indices
    ``xi_fixed`` and ``eta_fixed`` below which later stages cannot add
    anything.
    """

    N: int
    p: int
    alpha: AlphaEstimate
    beta: Fraction
    case: str
    k: List[int]
    h: List[int]
    q: List[int]
    delta: List[Fraction] = field(default_factory=list)
    M: Optional[int] = None
    gamma_o: Optional[Fraction] = None
    xi_fixed: int = 0
    eta_fixed: int = 0
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def stages(self) -> int:
        return len(self.q)

    @property
    def n1(self) -> List[int]:
        return list(range(1, self.N + 1)) + self.k

    @property
    def m1(self) -> List[int]:
        return list(range(1, self.N - self.p + 1)) + self.h

    @property
    def n2(self) -> List[int]:
        taken = set(self.k)
        return [j for j in range(self.N + 1, self.xi_fixed + 1) if j not in taken]

    @property
    def m2(self) -> List[int]:
        taken = set(self.h)
        return [j for j in range(self.N - self.p + 1, self.eta_fixed + 1) if j not in taken]

    def xi_prime(self, xi: MonotoneSeq) -> Prefix:
        return Prefix([xi.term(j) for j in self.n1])

    def eta_prime(self, eta: MonotoneSeq) -> Prefix:
        return Prefix([eta.term(j) for j in self.m1])

    def xi_second(self, xi: MonotoneSeq) -> Prefix:
        return Prefix([xi.term(j) for j in self.n2])

    def eta_second(self, eta: MonotoneSeq) -> Prefix:
        return Prefix([eta.term(j) for j in self.m2])

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"N": self.N, "p": self.p, "case": self.case,
                "alpha": self.alpha.to_json(), "beta": rat_str(self.beta),
                "gamma": "inf" if self.alpha.is_infinite else (
                    rat_str(self.alpha.value - self.beta) if self.alpha.kind == "exact" else None),
                "k": self.k, "h": self.h, "q": self.q,
                "delta": [rat_str(d) for d in self.delta],
                "M": self.M, "gamma_o": None if self.gamma_o is None else rat_str(self.gamma_o),
                "n1": self.n1, "m1": self.m1, "n2": self.n2, "m2": self.m2,
                "xi_fixed": self.xi_fixed, "eta_fixed": self.eta_fixed,
                "checks": dict(self.checks)}


def _first_below(s: MonotoneSeq, bound: Fraction, lo: int, cap: int) -> Optional[int]:
    """Smallest j >= lo with s_j < bound, or None past cap."""
    if bound <= 0:
        return None
    return _first_true(lambda j: s.term(j) < bound, lo, cap)


def _next_strict_drop(s: MonotoneSeq, j: int, cap: int) -> Optional[int]:
    """Smallest i >= j with s_i > s_{i+1}."""
    while j <= cap:
        if s.term(j) > s.term(j + 1):
            return j
        j += 1
    return None


class _Budget:
    def __init__(self, n: int):
        self.left = n

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise HorizonExhausted("term budget exhausted")


def _fill(xi: MonotoneSeq, S: Fraction, U: Fraction, L: Fraction, cur: int,
          cap: int, budget: _Budget, picks: List[int]):
    """Append smallest admissible indices until L < S (keeping S < U)."""
    while S <= L:
        k = _first_below(xi, U - S, cur, cap)
        if k is None:
            raise HorizonExhausted("no admissible k-index within the horizon")
        budget.spend()
        picks.append(k)
        S += xi.term(k)
        cur = k + 1
    return S, cur


def partition_construct(xi: MonotoneSeq, eta: MonotoneSeq, cert: ShiftCert,
                        alpha: Optional[AlphaEstimate] = None,
                        horizon: int = 1 << 40, stages: int = 6) -> PartitionPlan:
    """Greedy index streams for the split of xi < eta along ``cert``.

    ``horizon`` caps every generated index; ``stages`` is the number of
    (k-group, h) rounds to generate.
    """
    if xi.is_summable() is not False:
        raise NotApplicable("xi must be certified nonsummable")
    if alpha is None:
        alpha = alpha_estimate(xi, eta)
    if alpha.kind not in ("exact", "diverges") or not alpha.certified_positive():
        raise AlphaUnknown("the construction needs alpha exact and > 0, or divergent")
    if not cert.finite_check:
        raise NotApplicable("the certificate's finite check does not hold")
    N, p = cert.n, cert.p
    beta = eta.partial_sum(N - p) - xi.partial_sum(N)
    if beta < 0:
        raise NotApplicable("negative beta contradicts the finite check")
    budget = _Budget(TERM_BUDGET)
    if beta > 0:
        plan = _beta_case(xi, eta, N, p, alpha, beta, horizon, stages, budget)
    else:
        plan = _gamma_case(xi, eta, N, p, alpha, horizon, stages, budget)
    _verify(xi, eta, plan)
    return plan


def _beta_case(xi, eta, N, p, alpha, beta, horizon, stages, budget) -> PartitionPlan:
    k: List[int] = []
    h: List[int] = []
    q: List[int] = []
    delta: List[Fraction] = []
    S = Fraction(0)      # sum of the chosen xi_k
    H = Fraction(0)      # sum of the chosen eta_h
    cur = N + 1
    for i in range(1, stages + 1):
        U = beta + H
        L = U - Fraction(1, i)
        picks: List[int] = []
        try:
            S_new, c = _fill(xi, S, U, L, cur, horizon, budget, picks)
            # the closing index of the group must be a strict drop
            kk = _first_below(xi, U - S_new, c, horizon)
            kk = None if kk is None else _next_strict_drop(xi, kk, horizon)
            if kk is None:
                raise HorizonExhausted("no strict drop of xi within the horizon")
            budget.spend()
        except HorizonExhausted:
            if i == 1:
                raise
            break
        picks.append(kk)
        S_new += xi.term(kk)
        qi = len(k) + len(picks)
        d = S_new - (xi.partial_sum(kk + qi) - xi.partial_sum(kk))
        hb = min(Fraction(1, 2 ** i), d - H)
        hi = _first_below(eta, hb, kk + 1, horizon)
        if hi is None:
            if i == 1:
                raise HorizonExhausted("no admissible h-index within the horizon")
            break
        k.extend(picks)
        q.append(qi)
        delta.append(d)
        h.append(hi)
        S = S_new
        H += eta.term(hi)
        cur = hi + p + 1
    plan = PartitionPlan(N, p, alpha, beta, "beta", k, h, q, delta)
    # later k exceed h_last + p and later h exceed later k
    plan.xi_fixed = h[-1] + p
    plan.eta_fixed = h[-1] + p
    return plan


def _gamma_case(xi, eta, N, p, alpha, horizon, stages, budget) -> PartitionPlan:
    xs, ys = shift(xi, N), shift(eta, N - p)
    n0 = eventual_le(xs.form(), ys.form())
    if n0 is None:
        raise CaseUndetermined("beta = 0 and the tails admit no termwise comparison")
    n0 = max(n0, 1)
    # D'(m) is nondecreasing for m >= n0; find where it turns positive
    M = None
    for m in range(n0, n0 + DEFAULT_HORIZON):
        if diff(xs, ys, m) > 0:
            M = m
            break
    if M is None:
        raise CaseUndetermined("gamma could not be certified positive within the horizon")
    gamma_o = diff(xs, ys, M) / 2
    h: List[int] = []
    lo = N - p + M
    for j in range(1, stages + 1):
        hj = _first_below(eta, gamma_o / 2 ** j, lo, horizon)
        if hj is None:
            break
        h.append(hj)
        lo = hj + 1
    if not h:
        raise HorizonExhausted("no admissible h-index within the horizon")
    k: List[int] = []
    q: List[int] = []
    S, H = Fraction(0), Fraction(0)
    cur = N + 1
    done_h = []
    for i, hi in enumerate(h, 1):
        H += eta.term(hi)
        picks: List[int] = []
        try:
            S_new, c = _fill(xi, S, H, H - Fraction(1, i), cur, horizon, budget, picks)
            if not picks:
                kk = _first_below(xi, H - S_new, c, horizon)
                if kk is None:
                    raise HorizonExhausted("no admissible k-index within the horizon")
                picks.append(kk)
                S_new += xi.term(kk)
                c = kk + 1
        except HorizonExhausted:
            if i == 1:
                raise
            break
        k.extend(picks)
        q.append(len(k))
        done_h.append(hi)
        S, cur = S_new, c
    plan = PartitionPlan(N, p, alpha, Fraction(0), "gamma", k, done_h, q, [],
                         M=M, gamma_o=gamma_o)
    plan.xi_fixed = k[-1]
    plan.eta_fixed = done_h[-1]
    return plan


def _verify(xi: MonotoneSeq, eta: MonotoneSeq, plan: PartitionPlan) -> None:
    """Re-check the construction inequalities exactly on the generated data."""
    c = plan.checks
    N, p, k, h, q = plan.N, plan.p, plan.k, plan.h, plan.q
    n1, m1 = plan.n1, plan.m1
    c["n1_increasing"] = all(a < b for a, b in zip(n1, n1[1:]))
    c["m1_increasing"] = all(a < b for a, b in zip(m1, m1[1:]))
    c["q_increasing"] = all(a < b for a, b in zip([0] + q, q))
    fx = [j for j in n1 if j <= plan.xi_fixed]
    c["partition_xi"] = (not set(fx) & set(plan.n2)
                         and sorted(fx + plan.n2) == list(range(1, plan.xi_fixed + 1)))
    fe = [j for j in m1 if j <= plan.eta_fixed]
    c["partition_eta"] = (not set(fe) & set(plan.m2)
                          and sorted(fe + plan.m2) == list(range(1, plan.eta_fixed + 1)))
    sums = []
    acc = Fraction(0)
    for j in k:
        acc += xi.term(j)
        sums.append(acc)
    if plan.case == "beta":
        ok24 = ok25 = ok26 = order = drops = True
        H = Fraction(0)
        prev_d = Fraction(0)
        for i, qi in enumerate(q, 1):
            S = sums[qi - 1]
            U = plan.beta + H
            ok24 &= U - Fraction(1, i) < S < U
            kq = k[qi - 1]
            drops &= xi.term(kq) > xi.term(kq + 1)
            d = S - (xi.partial_sum(kq + qi) - xi.partial_sum(kq))
            ok25 &= d == plan.delta[i - 1] and d > prev_d
            ok26 &= eta.term(h[i - 1]) < min(Fraction(1, 2 ** i), d - H)
            order &= kq < h[i - 1]
            if i < len(q):
                order &= h[i - 1] + p < k[qi]
            prev_d = d
            H += eta.term(h[i - 1])
        order &= not k or k[0] > N
        c.update({"sandwich_k": ok24, "delta_increasing": ok25,
                  "h_bound": ok26, "index_order": order, "strict_drops": drops})
    else:
        ok31 = True
        H = Fraction(0)
        for i, qi in enumerate(q, 1):
            H += eta.term(h[i - 1])
            ok31 &= H - Fraction(1, i) < sums[qi - 1] < H
        xs, ys = shift(xi, N), shift(eta, N - p)
        c["gamma_sandwich"] = ok31
        c["h_sum_below_gamma_o"] = sum((eta.term(j) for j in h), Fraction(0)) < plan.gamma_o
        c["h_start"] = h[0] >= N - p + plan.M
        c["gamma_o_witness"] = diff(xs, ys, plan.M) > plan.gamma_o
    # xi' < eta' on all generated entries (unknown eta' entries count as 0)
    xp, ep = plan.xi_prime(xi), plan.eta_prime(eta)
    good = True
    for m in range(1, min(xp.horizon, CHECK_CAP) + 1):
        if xp.partial_sum(m) > ep.partial_sum(min(m, ep.horizon)):
            good = False
            break
    c["xi1_weak_eta1"] = good
    # xi'' < eta'' on the determined prefixes
    x2, e2 = plan.n2, plan.m2
    upto = min(len(x2), len(e2), CHECK_CAP)
    sx = se = Fraction(0)
    good = True
    for a, b in zip(x2[:upto], e2[:upto]):
        sx += xi.term(a)
        se += eta.term(b)
        if sx > se:
            good = False
            break
    c["xi2_weak_eta2"] = good


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def assemble(xi: MonotoneSeq, eta: MonotoneSeq, depth_cap: int = 16, K: int = 50,
             horizon: int = DEFAULT_HORIZON, stages: int = 2) -> RationalMatTrunc:
    """Rows 1..K of an orthostochastic Q with Q eta = xi.

    If the strong majorization is certified the canonical construction is
    used directly.  Otherwise the pair is split once with the split index
    n chosen at least K, so that rows 1..K all belong to the strong part
    xi' << eta'; its canonical matrix is then scattered through the index
    streams.  The prefix action is verified exactly before returning.
    """
    if K < 1:
        raise BadParams("K must be >= 1")
    if depth_cap < 1:
        raise DepthExhausted("depth cap must allow at least one level")
    s = strong(xi, eta, horizon)
    if s.holds:
        run = canon_run(xi, eta, K)
        Q = run.Q_matrix()
        Q.meta.update({"route": "strong", "levels": 1, "uncovered_rows": []})
        _check_action(Q, xi, eta, K)
        return Q
    if s.fails and s.witness_index != 0:
        raise NotApplicable(f"weak majorization fails at index {s.witness_index}")
    if xi.is_summable() is not False:
        raise NotApplicable("xi must be certified nonsummable")
    alpha = alpha_estimate(xi, eta, horizon)
    if not alpha.certified_positive() or alpha.kind not in ("exact", "diverges"):
        raise AlphaUnknown(f"alpha not certified ({alpha.reason})")
    min_n = K
    last_err: Optional[Exception] = None
    for _ in range(8):
        cert = shift_search(xi, eta, horizon, min_n=min_n)
        if not cert.conclusive:
            raise NotFound("only an inconclusive shift certificate was found")
        plan = partition_construct(xi, eta, cert, alpha, stages=stages)
        if not plan.ok:
            raise ArtifactError(f"partition checks failed: {plan.checks}")
        xp, ep = plan.xi_prime(xi), plan.eta_prime(eta)
        try:
            run = canon_run(xp, ep, K)
            Qb = run.Q_matrix()
            if Qb.n_cols > len(plan.m1):
                raise HorizonExceeded("block needs more eta' entries than generated")
        except HorizonExceeded as e:
            last_err = e
            min_n = 2 * max(min_n, cert.n)
            continue
        rows = plan.n1[:K]
        cols = plan.m1[:Qb.n_cols]
        Q = direct_sum([(rows, cols, Qb)], n_rows=K, n_cols=max(cols))
        Q.rows_finalized = K
        Q.cols_finalized = min(run.cols_done, plan.N - plan.p)
        route = "alpha_infinite" if alpha.is_infinite else "split"
        Q.meta.update({"route": route, "levels": 1, "uncovered_rows": [],
                       "shift_cert": cert.to_json(), "plan": plan.to_json()})
        _check_action(Q, xi, eta, K)
        return Q
    raise DepthExhausted(f"could not cover rows 1..{K}: {last_err}")


def _check_action(Q: RationalMatTrunc, xi: MonotoneSeq, eta: MonotoneSeq, K: int) -> None:
    got = apply(Q, eta, K)
    for i, v in enumerate(got, 1):
        if v != xi.term(i):
            raise ArtifactError(f"assembled row {i} gives {v}, expected {xi.term(i)}")


def assembly_to_json(Q: RationalMatTrunc) -> dict:
    out = Q.to_json()
    out["meta"] = _jsonable(Q.meta)
    return out

