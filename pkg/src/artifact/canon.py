"""The canonical T-transform construction for xi < eta with diagnostics.

Step k picks the largest m with rho(k-1)_m >= xi_k, sets

    t_k = (xi_k - rho_{m+1}) / (rho_m - rho_{m+1}),
    delta_k = rho_m + rho_{m+1} - xi_k,

and replaces rho by <rho_1, ..., rho_{m-1}, delta_k, rho_{m+2}, ...>.  The
orthogonal matrix W^{(k)} = (I_{k-1} + V(m_k, t_k)) W^{(k-1)} is tracked
column by column: below the finalized rows every column has at most one
nonzero entry, so a column is fully described by its "live" row, sign
and radicand.  Rows above the live region never change again.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .seqcore import (
    ArtifactError,
    BadParams,
    HorizonExceeded,
    MonotoneSeq,
    rat,
    rat_str,
)
from .majorize import Verdict3, fails, holds
from .stoch import RationalMatTrunc, SignedSqrtMat, radical_sum


class NotMajorized(ArtifactError):
    def __init__(self, k: int, witness: Optional[int] = None, msg: str = ""):
        self.k = k
        self.witness = witness
        super().__init__(msg or f"no admissible step at k={k}"
                         + (f" (prefix sum violated at n={witness})" if witness else ""))


class ZeroXi(ArtifactError):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"xi_{k} = 0; the construction needs positive terms")


class ColumnNotTracked(ArtifactError):
    pass


MAX_HEAD = 1_000_000


# ---------------------------------------------------------------------------
# lazy rho
# ---------------------------------------------------------------------------

class Rho:
    """rho_j = head[j-1] for j <= len(head), eta_{j+shift} beyond."""

    def __init__(self, eta: MonotoneSeq, head: Optional[List[Fraction]] = None, shift: int = 0):
        self.eta = eta
        self.head = list(head or [])
        self.shift = shift

    def __call__(self, j: int) -> Fraction:
        if j <= len(self.head):
            return self.head[j - 1]
        return self.eta.term(j + self.shift)

    def ensure(self, n: int) -> None:
        if n > MAX_HEAD:
            raise HorizonExceeded(f"rho head would exceed {MAX_HEAD} entries")
        while len(self.head) < n:
            self.head.append(self.eta.term(len(self.head) + 1 + self.shift))

    def last_at_least(self, x: Fraction, strict: bool = False) -> int:
        """Largest j with rho_j >= x (or > x when strict); 0 if there is none."""
        ok = (lambda v: v > x) if strict else (lambda v: v >= x)
        h = self.head
        lo, hi = 0, len(h)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if ok(h[mid - 1]):
                lo = mid
            else:
                hi = mid - 1
        if lo < len(h):
            return lo
        # whole head qualifies: gallop into the eta tail
        base = len(h)
        if not ok(self(base + 1)):
            return base
        step = 1
        good = base + 1
        cap = MAX_HEAD
        if self.eta.horizon is not None:
            cap = min(cap, self.eta.horizon - self.shift)
        while True:
            probe = min(good + step, cap)
            if probe <= good:
                raise HorizonExceeded("step index exceeds the available data")
            if ok(self(probe)):
                good = probe
                step *= 2
            else:
                bad = probe
                break
        while bad - good > 1:
            mid = (good + bad) // 2
            if ok(self(mid)):
                good = mid
            else:
                bad = mid
        return good

    def canon_update(self, m: int, delta: Fraction) -> None:
        self.ensure(m + 1)
        self.head = self.head[:m - 1] + [delta] + self.head[m + 1:]
        self.shift += 1

    def snapshot(self, k: int) -> "RhoState":
        return RhoState(k, tuple(self.head), self.shift)


@dataclass(frozen=True)
class RhoState:
    k: int
    head: tuple
    tail_offset: int

    def value(self, j: int, eta: MonotoneSeq) -> Fraction:
        return self.head[j - 1] if j <= len(self.head) else eta.term(j + self.tail_offset)

    def to_json(self):
        return {"k": self.k, "head": [rat_str(x) for x in self.head], "tail_offset": self.tail_offset}


# ---------------------------------------------------------------------------
# column engine
# ---------------------------------------------------------------------------

class ColumnEngine:
    """Rows of a product of T-transform blocks, tracked column by column.

    Columns beyond ``frontier`` are untouched identity columns whose live
    entry is (row c, +, 1).  ``n`` rows are finalized.
    """

    def __init__(self, tracked: Iterable[int] = ()):
        self.n = 0
        self.frontier = 0
        self.live: Dict[int, Tuple[int, int, Fraction]] = {}
        self.by_row: Dict[int, Set[int]] = {}
        self.rows: List[Dict[int, Tuple[int, Fraction]]] = []
        self.tracked = sorted(set(tracked))
        self.gamma: Dict[Tuple[int, int], Tuple[int, Fraction]] = {}
        self._record()

    def set_initial(self, placement: Dict[int, int], frontier: int) -> None:
        """Start from a permutation: column c sits in row placement[c]."""
        self.live = {c: (r, 1, Fraction(1)) for c, r in placement.items()}
        self.by_row = {}
        for c, r in placement.items():
            self.by_row.setdefault(r, set()).add(c)
        self.frontier = frontier
        self.gamma.clear()
        self._record()

    def materialize(self, upto: int) -> None:
        for r in range(self.frontier + 1, upto + 1):
            self.live[r] = (r, 1, Fraction(1))
            self.by_row.setdefault(r, set()).add(r)
        self.frontier = max(self.frontier, upto)

    def _move(self, c: int, row: Optional[int], sign: int = 1, val: Fraction = Fraction(0)) -> None:
        old = self.live.get(c)
        if old is not None:
            s = self.by_row.get(old[0])
            if s is not None:
                s.discard(c)
                if not s:
                    del self.by_row[old[0]]
        if row is None:
            self.live.pop(c, None)
            return
        self.live[c] = (row, sign, val)
        self.by_row.setdefault(row, set()).add(c)

    def step(self, m: int, t: Fraction) -> Dict[int, Tuple[int, Fraction]]:
        """Left-multiply by I_n + V(m, t) + I and finalize row n+1."""
        n0 = self.n
        self.materialize(n0 + m + 1)
        touched = []
        for r in range(n0 + 1, n0 + m + 2):
            for c in self.by_row.get(r, ()):
                touched.append((c,) + self.live[c])
        new_row: Dict[int, Tuple[int, Fraction]] = {}
        for c, r, s, g in touched:
            q = r - n0
            if q < m:
                self._move(c, r + 1, s, g)
            elif q == m:
                new_row[c] = (s, g * t)
                if t == 1:
                    self._move(c, None)
                else:
                    self._move(c, n0 + 1 + m, s, g * (1 - t))
            else:  # q == m + 1
                if t != 1:
                    new_row[c] = (-s, g * (1 - t))
                    self._move(c, n0 + 1 + m, s, g * t)
        self.rows.append(new_row)
        self.n += 1
        self._record()
        return new_row

    def permute_rows(self, mapping: Dict[int, int]) -> None:
        """Move active rows: the contents of row a go to row mapping[a]."""
        if sorted(mapping) != sorted(mapping.values()):
            raise BadParams("row mapping is not a permutation")
        if any(r <= self.n for r in mapping):
            raise BadParams("finalized rows cannot be permuted")
        self.materialize(max(mapping))
        moved = [(c, self.live[c]) for a in mapping for c in self.by_row.get(a, ())]
        for c, (r, s, g) in moved:
            self._move(c, None)
        for c, (r, s, g) in moved:
            self._move(c, mapping[r], s, g)

    def _record(self) -> None:
        for j in self.tracked:
            if j > self.frontier:
                q = j - self.n
                self.gamma[(self.n, j)] = (q, Fraction(1)) if q > 0 else (0, Fraction(0))
            elif j in self.live:
                r, _, g = self.live[j]
                self.gamma[(self.n, j)] = (r - self.n, g)
            else:
                self.gamma[(self.n, j)] = (0, Fraction(0))

    def dead_prefix(self) -> int:
        """Largest c such that columns 1..c have no mass below the finalized rows."""
        c = 0
        while c < self.frontier and (c + 1) not in self.live:
            c += 1
        return c


def _choose_step(rho: Rho, x: Fraction, k: int, limit: Optional[int] = None):
    m = rho.last_at_least(x)
    if m == 0:
        raise NotMajorized(k)
    if limit is not None:
        m = min(m, limit)
    rho.ensure(m + 1)
    a, b = rho(m), rho(m + 1)
    t = (x - b) / (a - b)
    delta = a + b - x
    return m, t, delta


# ---------------------------------------------------------------------------
# runs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonStep:
    k: int
    m_k: int
    t_k: Fraction
    delta_k: Fraction

    def to_json(self):
        return {"k": self.k, "m": self.m_k, "t": rat_str(self.t_k), "delta": rat_str(self.delta_k)}


@dataclass
class CanonRun:
    xi: MonotoneSeq
    eta: MonotoneSeq
    steps: List[CanonStep]
    rho: RhoState
    W_rows: List[Dict[int, Tuple[int, Fraction]]]
    gamma_table: Dict[Tuple[int, int], Tuple[int, Fraction]]
    g_seq: List[Fraction]
    tracked: List[int]
    cols_done: int = 0
    rho_history: List[RhoState] = field(default_factory=list)

    @property
    def K(self) -> int:
        return len(self.steps)

    @property
    def Q_rows(self) -> List[Dict[int, Fraction]]:
        return [{c: v for c, (_, v) in row.items()} for row in self.W_rows]

    def n_cols(self) -> int:
        return max((c for row in self.W_rows for c in row), default=0)

    def W_matrix(self) -> SignedSqrtMat:
        e = {(i, c): sv for i, row in enumerate(self.W_rows, 1) for c, sv in row.items()}
        return SignedSqrtMat(self.K, max(self.n_cols(), self.K), e,
                             meta={"rows_finalized": self.K, "cols_finalized": self.cols_done})

    def Q_matrix(self) -> RationalMatTrunc:
        e = {(i, c): v for i, row in enumerate(self.Q_rows, 1) for c, v in row.items()}
        return RationalMatTrunc(self.K, max(self.n_cols(), self.K), e,
                                rows_finalized=self.K, cols_finalized=self.cols_done)

    def block_boundaries(self) -> List[int]:
        return [s.k for s in self.steps if s.m_k == 1 and s.t_k == 1]

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps],
                "g_seq": [rat_str(g) for g in self.g_seq],
                "block_boundaries": self.block_boundaries(),
                "rows": [[[c, "+" if s > 0 else "-", rat_str(v)] for c, (s, v) in sorted(r.items())]
                         for r in self.W_rows],
                "rho": self.rho.to_json()}


def _g_sequence(steps: Sequence[CanonStep]) -> List[Fraction]:
    g = Fraction(1)
    out = []
    for s in steps:
        if s.m_k == 1:
            g *= 1 - s.t_k
        out.append(g)
    return out


def _prefix_violation(xi: MonotoneSeq, eta: MonotoneSeq, upto: int) -> Optional[int]:
    for n in range(1, upto + 1):
        if xi.partial_sum(n) > eta.partial_sum(n):
            return n
    return None


def canon_run(xi: MonotoneSeq, eta: MonotoneSeq, K: int,
              tracked_cols: Optional[Iterable[int]] = None,
              keep_rho_history: bool = False) -> CanonRun:
    if K < 0:
        raise BadParams("K must be >= 0")
    tracked = list(range(1, K + 1)) if tracked_cols is None else sorted(set(tracked_cols))
    for k in range(1, K + 1):
        if xi.term(k) <= 0:
            raise ZeroXi(k)
    rho = Rho(eta)
    eng = ColumnEngine(tracked)
    steps: List[CanonStep] = []
    history = [rho.snapshot(0)] if keep_rho_history else []
    for k in range(1, K + 1):
        x = xi.term(k)
        try:
            m, t, delta = _choose_step(rho, x, k)
        except NotMajorized:
            w = _prefix_violation(xi, eta, k + len(rho.head) + 1)
            raise NotMajorized(k, w) from None
        rho.canon_update(m, delta)
        eng.step(m, t)
        steps.append(CanonStep(k, m, t, delta))
        if keep_rho_history:
            history.append(rho.snapshot(k))
    return CanonRun(xi, eta, steps, rho.snapshot(K), eng.rows, dict(eng.gamma),
                    _g_sequence(steps), tracked, eng.dead_prefix(), history)


# ---------------------------------------------------------------------------
# oracles and diagnostics
# ---------------------------------------------------------------------------

def closed_form_ones(t: Sequence, K: int) -> Tuple[SignedSqrtMat, RationalMatTrunc]:
    """Rows 1..K of W and Q when every m_k = 1, from the explicit product formula."""
    ts = [rat(x) for x in t]
    if len(ts) < K:
        raise BadParams("need at least K values of t")
    if any(not (0 < x <= 1) for x in ts):
        raise BadParams("t_k must lie in (0, 1]")
    e: Dict[Tuple[int, int], Tuple[int, Fraction]] = {}
    for k in range(1, K + 1):
        tk = ts[k - 1]

        def prod(a: int, b: int) -> Fraction:
            out = Fraction(1)
            for i in range(a, b + 1):
                out *= 1 - ts[i - 1]
            return out

        e[(k, 1)] = (1, tk * prod(1, k - 1))
        for j in range(2, k + 1):
            e[(k, j)] = (1, tk * ts[j - 2] * prod(j, k - 1))
        e[(k, k + 1)] = (-1, 1 - tk)
    W = SignedSqrtMat(K, K + 1, e, meta={"rows_finalized": K})
    Q = RationalMatTrunc(K, K + 1, {key: v for key, (_, v) in W.entries.items()},
                         rows_finalized=K, cols_finalized=0)
    return W, Q


def g_diagnostics(run: CanonRun) -> Tuple[List[Fraction], Fraction]:
    mass = sum((row.get(1, Fraction(0)) for row in run.Q_rows), Fraction(0))
    return _g_sequence(run.steps), mass


def gamma_recurrence(steps: Sequence[CanonStep], j: int) -> List[Tuple[int, Fraction]]:
    """(q(n, j), gamma(n, j)^2) for n = 0..K from the step list alone."""
    q, g = j, Fraction(1)
    out = [(q, g)]
    for s in steps:
        m, t = s.m_k, s.t_k
        if q == 0:
            pass
        elif q < m:
            pass
        elif q == m:
            if t == 1:
                q, g = 0, Fraction(0)
            else:
                g *= 1 - t
        elif q == m + 1:
            q, g = q - 1, g * t
        else:
            q -= 1
        out.append((q, g))
    return out


def _column_replay(steps: Sequence[CanonStep], j: int):
    """Column j of W^{(n)} for n = 0..K by sparse matrix-vector products."""
    col: Dict[int, Tuple[int, Fraction]] = {j: (1, Fraction(1))}
    out = [dict(col)]
    for n, s in enumerate(steps, start=1):
        m, t = s.m_k, s.t_k
        get = lambda r: col.get(r)
        new = {r: v for r, v in col.items() if r < n or r > n + m}

        def combine(terms):
            red = radical_sum([(sg * s2, v * w) for (sg, v), (s2, w) in terms if v])
            if not red:
                return None
            if len(red) > 1:
                raise ArtifactError("column entry mixes square classes")
            coef, rep = red[0]
            return (1 if coef > 0 else -1, coef * coef * rep)

        a, b = get(n + m - 1), get(n + m)
        terms1 = []
        if a:
            terms1.append(((1, t), a))
        if b:
            terms1.append(((-1, 1 - t), b))
        terms2 = []
        if a:
            terms2.append(((1, 1 - t), a))
        if b:
            terms2.append(((1, t), b))
        for r, v in ((n, combine(terms1)), (n + m, combine(terms2))):
            if v:
                new[r] = v
        for i in range(2, m + 1):
            v = get(n + i - 2)
            if v:
                new[n + i - 1] = v
        col = new
        out.append(dict(col))
    return out


def gamma_check(run: CanonRun, j: int) -> Verdict3:
    if j not in run.tracked:
        raise ColumnNotTracked(f"column {j} was not tracked")
    rec = gamma_recurrence(run.steps, j)
    cols = _column_replay(run.steps, j)
    prev_q = None
    for n, ((q, g2), col) in enumerate(zip(rec, cols)):
        below = [(r, v) for r, v in col.items() if r > n]
        if len(below) > 1:
            return fails(n, None, run.K, reason="more than one entry below the finalized rows")
        actual_q, actual_g = (below[0][0] - n, below[0][1][1]) if below else (0, Fraction(0))
        if (actual_q, actual_g) != (q, g2):
            return fails(max(n, 1), actual_g - g2, run.K, q_expected=q, q_actual=actual_q)
        if run.gamma_table.get((n, j), (q, g2)) != (q, g2):
            return fails(max(n, 1), None, run.K, reason="engine table disagrees with the recurrence")
        if prev_q is not None and q > prev_q:
            return fails(max(n, 1), None, run.K, reason="q(n, j) increased")
        prev_q = q
    return holds("GammaRecurrence", run.K, column=j, final_q=rec[-1][0], final_gamma_sq=rec[-1][1])


def _tail_ratio_ok(xi: MonotoneSeq, k: int, t: Fraction) -> Optional[bool]:
    a, b = xi.tail_sum(k + 1), xi.tail_sum(k)
    if not (a.is_point and b.is_point):
        return None
    return 1 - t == a.lo / b.lo


def classify_run(run: CanonRun) -> dict:
    bounds = run.block_boundaries()
    s_t = sum((s.t_k for s in run.steps if s.m_k == 1), Fraction(0))
    report = {"block_boundaries": bounds, "sum_t_m1": s_t, "K": run.K}
    eta_supp = run.eta.support()
    xi_supp = run.xi.support()
    if eta_supp is not None and xi_supp is None:
        tx, te = run.xi.total(), run.eta.total()
        if tx.is_point and te.is_point and tx.lo == te.lo:
            start = next((s.k for s in run.steps if s.k >= eta_supp - 1 and s.m_k == 1), None)
            if start is not None:
                checked = 0
                for s in run.steps:
                    if s.k > max(start, eta_supp):
                        ok = _tail_ratio_ok(run.xi, s.k, s.t_k)
                        if ok is False or s.m_k != 1:
                            raise ArtifactError(f"tail ratio identity broken at k={s.k}")
                        checked += ok is True
                report.update(verdict="ConclusiveOrtho", stable_from=start, tail_ratio_checked=checked)
                return report
    if bounds:
        report.update(verdict="BlockEvidence", count=len(bounds))
    elif s_t > 0:
        report.update(verdict="StrongEvidence", partial_sum=s_t)
    else:
        report.update(verdict="Inconclusive")
    return report


def report_to_json(report: dict) -> dict:
    return {k: rat_str(v) if isinstance(v, Fraction) else v for k, v in report.items()}
