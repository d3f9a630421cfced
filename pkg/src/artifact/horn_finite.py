"""Finite and finitely-supported Schur-Horn constructions.

* ``horn_construct``: the finite T-transform algorithm, with the
  orthogonal witness built by explicit exact matrix products.
* ``lemma_2_7_construct``: eta with finite support, xi arbitrary with
  the same total; the columns that carry eta are exact.
* ``lemma_6_9_construct``: xi = Q <0^p, eta> for a p-shifted majorization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .seqcore import (
    ArtifactError,
    BadParams,
    FiniteSupport,
    MonotoneSeq,
    NotMonotone,
    rat,
    rat_str,
)
from .majorize import p_shift, strong
from .stoch import (
    RationalMatTrunc,
    SignedSqrtMat,
    embed,
    orthogonality_defect,
    schur_square,
    v_transform,
)
from .canon import ColumnEngine, NotMajorized, Rho, _choose_step

EXACT_ORTHO_MAX_N = 6
FLOAT_TOL = 1e-10


class NotStronglyMajorized(ArtifactError):
    pass


class BadSupport(ArtifactError):
    pass


class ShiftNotCertified(ArtifactError):
    pass


@dataclass
class HornWitness:
    U: SignedSqrtMat
    Q: RationalMatTrunc
    steps: List[Tuple[int, Fraction]]

    def to_json(self) -> dict:
        return {"U": self.U.to_json(), "Q": self.Q.to_json(),
                "steps": [[m, rat_str(t)] for m, t in self.steps]}


def _check_vectors(xi: Sequence[Fraction], eta: Sequence[Fraction]) -> None:
    if len(xi) != len(eta):
        raise BadParams("xi and eta must have the same length")
    for name, v in (("xi", xi), ("eta", eta)):
        if any(x < 0 for x in v):
            raise NotMonotone(f"{name} has a negative entry")
        if any(v[i] < v[i + 1] for i in range(len(v) - 1)):
            raise NotMonotone(f"{name} is not nonincreasing")
    sx = se = Fraction(0)
    for k, (a, b) in enumerate(zip(xi, eta), start=1):
        sx += a
        se += b
        if sx > se:
            raise NotMajorized(k, k, f"prefix sum of xi exceeds eta at k={k}")
    if sx != se:
        raise NotMajorized(len(xi), len(xi), "totals differ")


def finite_steps(xi: Sequence[Fraction], eta: Sequence[Fraction]) -> List[Tuple[int, Fraction]]:
    """The (m_k, t_k) list of the finite algorithm, stopping at the first zero of xi."""
    rho = list(eta)
    steps = []
    for k, x in enumerate(xi, start=1):
        if x == 0:
            break
        m = max(j for j in range(1, len(rho) + 1) if rho[j - 1] >= x)
        a = rho[m - 1]
        b = rho[m] if m < len(rho) else Fraction(0)
        t = (x - b) / (a - b)
        steps.append((m, t))
        rho = rho[:m - 1] + [a + b - x] + rho[m + 1:]
    return steps


def horn_construct(xi: Sequence, eta: Sequence) -> HornWitness:
    xi = [rat(x) for x in xi]
    eta = [rat(x) for x in eta]
    _check_vectors(xi, eta)
    N = len(xi)
    steps = finite_steps(xi, eta)
    W = SignedSqrtMat.identity(N)
    for k, (m, t) in enumerate(steps, start=1):
        if t == 1:
            # V(m, 1) only permutes its first m indices
            block = v_transform(m, t)
            if k - 1 + m + 1 > N:
                block = SignedSqrtMat(m, m, {key: v for key, v in block.entries.items()
                                             if key[0] <= m and key[1] <= m})
        else:
            block = v_transform(m, t)
        W = embed(block, k - 1, N) @ W
    return HornWitness(W, schur_square(W), steps)


def verify_witness(w: HornWitness, xi: Sequence, eta: Sequence, exact: bool = None) -> dict:
    """Exact Q eta = xi and double stochasticity; orthogonality exact or float by size."""
    xi = [rat(x) for x in xi]
    eta = [rat(x) for x in eta]
    N = len(xi)
    Q = w.Q
    out = {"action": all(sum((Q.get(i, j) * eta[j - 1] for j in range(1, N + 1)), Fraction(0)) == xi[i - 1]
                         for i in range(1, N + 1)),
           "doubly_stochastic": all(s == 1 for s in Q.row_sums()) and all(s == 1 for s in Q.col_sums()),
           "schur": schur_square(w.U).entries == Q.entries}
    if exact is None:
        exact = N <= EXACT_ORTHO_MAX_N
    if exact:
        out["orthogonal"] = not orthogonality_defect(w.U)
        out["ortho_method"] = "exact"
    else:
        res = orthogonality_defect(w.U, exact=False)
        out["orthogonal"] = res < FLOAT_TOL
        out["ortho_method"] = "float"
        out["residual"] = res
    out["ok"] = out["action"] and out["doubly_stochastic"] and out["schur"] and out["orthogonal"]
    return out


# ---------------------------------------------------------------------------
# eta with finite support
# ---------------------------------------------------------------------------

def _mgs_complete(cols: np.ndarray, size: int) -> Tuple[np.ndarray, float]:
    """Extend the given columns to a size x size orthogonal matrix (float)."""
    basis = [cols[:, j] for j in range(cols.shape[1])]
    extra = []
    for e in range(size):
        if len(basis) + len(extra) == size:
            break
        v = np.zeros(size)
        v[e] = 1.0
        for _ in range(2):  # re-orthogonalize once for stability
            for b in basis + extra:
                nb = b @ b
                if nb > 0:
                    v = v - (b @ v) / nb * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            extra.append(v / nv)
    U = np.column_stack(basis + extra) if basis or extra else np.zeros((size, 0))
    if extra:
        E = np.column_stack(extra)
        res = max(float(np.max(np.abs(E.T @ E - np.eye(E.shape[1])))),
                  float(np.max(np.abs(cols.T @ E))) if cols.size else 0.0)
    else:
        res = 0.0
    return U, res


def lemma_2_7_construct(xi: MonotoneSeq, eta: FiniteSupport, K: int):
    """Q with (Q eta)_i = xi_i for i <= K, and a float orthogonal completion.

    Q holds only the first n columns (n = support of eta), which are exact.
    ``Q.meta`` records the float completion residual and the mass of the
    n-th column lying below the truncation.
    """
    n = eta.support() if isinstance(eta, MonotoneSeq) else None
    if not isinstance(eta, FiniteSupport) or n is None or n == 0:
        raise BadSupport("eta must be a nonzero FiniteSupport sequence")
    if not strong(xi, eta).holds:
        raise NotStronglyMajorized("xi is not strongly majorized by eta")
    e_vals = list(eta.values)
    eta_n = e_vals[-1]
    if n == 1:
        m, alpha = 0, None
        Uo = None
    else:
        head = eta.partial_sum(n - 1)
        m = 1
        while xi.partial_sum(m) <= head:
            m += 1
        alpha = xi.partial_sum(m) - head
        target = [xi.term(j) for j in range(1, m + 1)]
        source = e_vals[:n - 1] + [alpha] + [Fraction(0)] * (m - n)
        Uo = horn_construct(target, source).U
    size = max(K, m)
    ents: Dict[Tuple[int, int], Tuple[int, Fraction]] = {}
    if n == 1:
        for i in range(1, size + 1):
            ents[(i, 1)] = (1, xi.term(i) / eta_n)
    else:
        for (i, j), (s, v) in Uo.entries.items():
            if j < n:
                ents[(i, j)] = (s, v)
            elif j == n:
                ents[(i, j)] = (s, alpha / eta_n * v)
        for i in range(m + 1, size + 1):
            ents[(i, n)] = (1, xi.term(i) / eta_n)
    exact_cols = SignedSqrtMat(size, n, ents)
    Q = RationalMatTrunc(size, n, {k: v for k, (_, v) in exact_cols.entries.items()},
                         rows_finalized=size, cols_finalized=0)
    tail = xi.tail_sum(size + 1)
    defect = tail.hi / eta_n if tail.is_finite else None
    U_approx, res = _mgs_complete(exact_cols.to_float(), size)
    Q.meta.update({"exact_cols": n, "completion_residual": res,
                   "truncation_defect": rat_str(defect) if defect is not None else "unknown"})
    return Q, U_approx


# ---------------------------------------------------------------------------
# p-shifted construction
# ---------------------------------------------------------------------------

def _finite_shift_case(xi: MonotoneSeq, eta: FiniteSupport, p: int, K: int) -> RationalMatTrunc:
    """Both finite: Horn on <xi> vs <eta, 0^p>, then undo the cyclic placement."""
    n = eta.support()
    L = max(K, p + n, (xi.support() or 0))
    x = [xi.term(i) for i in range(1, L + 1)]
    y = [eta.term(i) for i in range(1, L + 1)]
    Qp = horn_construct(x, y).Q
    # column j of Q' multiplies eta_j, which sits at position p + j of <0^p, eta>
    def col(c):
        if c <= n:
            return c + p
        if c <= n + p:
            return c - n
        return c
    ents = {(i, col(c)): v for (i, c), v in Qp.entries.items()}
    return RationalMatTrunc(L, L, ents)


def lemma_6_9_construct(xi: MonotoneSeq, eta: MonotoneSeq, p: int, K: int,
                        horizon: int = 1000, with_w: bool = False):
    """Rows 1..K of Q with (Q <0^p, eta>)_i = xi_i.

    With ``with_w`` the finalized rows of the orthogonal factor are also
    returned (as a SignedSqrtMat) when eta has infinite support, else None.
    """
    if p < 0 or K < 1:
        raise BadParams("need p >= 0 and K >= 1")
    v = p_shift(xi, eta, p, horizon)
    if not v.holds:
        raise ShiftNotCertified(f"p-shift relation not certified ({v.status})")
    if xi.is_summable() and not strong(xi, eta, horizon).holds:
        raise ShiftNotCertified("xi is summable but strong majorization is not certified")
    if isinstance(eta, FiniteSupport):
        if xi.support() is not None:
            Q = _finite_shift_case(xi, eta, p, K)
            return (Q, None) if with_w else Q
        Qp, _ = lemma_2_7_construct(xi, eta, K)
        n = eta.support()
        ents = {(i, c + p): val for (i, c), val in Qp.entries.items()}
        Q = RationalMatTrunc(Qp.n_rows, n + p, ents, rows_finalized=Qp.rows_finalized,
                             cols_finalized=0,
                             meta={"known_cols": [p + 1, p + n],
                                   "completion_residual": Qp.meta["completion_residual"]})
        return (Q, None) if with_w else Q
    for k in range(1, K + 1):
        if xi.term(k) <= 0:
            raise ShiftNotCertified("xi must be positive when eta has infinite support")
    N = v.cert.data["N"] if p > 0 else 0
    rho = Rho(eta)
    eng = ColumnEngine()
    if p > 0:
        # column c of <0^p, eta> starts in row sigma(c) of eta~ = <eta_1..eta_N, 0^p, eta_{N+1}..>
        placement = {c: N + c for c in range(1, p + 1)}
        placement.update({p + j: j for j in range(1, N + 1)})
        eng.set_initial(placement, N + p)
    steps = []
    for k in range(1, K + 1):
        x = xi.term(k)
        if p > 0:
            rho.ensure(N + 1)
            if x >= rho(N):
                if x == rho(N):
                    m, t, delta = N, Fraction(1), rho(N + 1)
                else:
                    m, t, delta = _choose_step(rho, x, k, limit=N - 1)
                rho.canon_update(m, delta)
                eng.step(m, t)
                N -= 1
                if N < 1:
                    raise ShiftNotCertified("shift bookkeeping ran out of head entries")
            else:
                t = x / rho(N)
                eng.step(N, t)
                vN = rho(N) - x
                # sort vN into eta~'s tail: r entries of the tail exceed it
                r = rho.last_at_least(vN, strict=True) - N
                rho.ensure(N + r)
                rho.head = rho.head[:N - 1] + rho.head[N:N + r] + [vN] + rho.head[N + r:]
                if r:
                    eng.permute_rows(_shift_block_mapping(eng.n, N, p, r))
                m = N
                p -= 1
            steps.append((m, t))
        else:
            m, t, delta = _choose_step(rho, x, k)
            rho.canon_update(m, delta)
            eng.step(m, t)
            steps.append((m, t))
    e = {(i, c): val for i, row in enumerate(eng.rows, 1) for c, (_, val) in row.items()}
    ncols = max((c for (_, c) in e), default=K)
    Q = RationalMatTrunc(K, ncols, e, rows_finalized=K, cols_finalized=eng.dead_prefix(),
                         meta={"steps": [[m, rat_str(t)] for m, t in steps]})
    if not with_w:
        return Q
    W = SignedSqrtMat(K, ncols, {(i, c): sv for i, row in enumerate(eng.rows, 1) for c, sv in row.items()},
                      meta={"rows_finalized": K})
    return Q, W


def _shift_block_mapping(o: int, N: int, p: int, r: int) -> Dict[int, int]:
    """Row moves that sort the leftover value into the tail.

    After the step, rows o+1.. hold <rho_1..rho_{N-1}, v, 0^{p-1}, tau_1, tau_2, ...>
    with tau_1..tau_r > v.  The target is <.., tau_1, 0^{p-1}, tau_2..tau_r, v, ...>.
    """
    v_row = o + N
    first_tau = o + N + p
    mapping = {first_tau: v_row}
    for i in range(2, r + 1):
        mapping[first_tau + i - 1] = first_tau + i - 2
    mapping[v_row] = first_tau + r - 1
    return mapping
