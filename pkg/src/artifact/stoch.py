"""Sparse matrices for stochastic-matrix algebra.

Two containers are used everywhere:

* ``SignedSqrtMat`` stores entries ``sign * sqrt(value)`` with a rational
  ``value >= 0``.  Orthogonal matrices built from T-transforms live here;
  their Schur square is read off without any arithmetic.
* ``RationalMatTrunc`` stores a finite truncation of a nonnegative
  (possibly infinite) matrix together with how many leading rows and
  columns are complete.

Indices are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .seqcore import (
    ArtifactError,
    BadParams,
    HorizonExceeded,
    IntervalRat,
    MonotoneSeq,
    rat,
    rat_str,
)
from .majorize import Verdict3, fails, holds


class NegativeEntry(ArtifactError):
    pass


class NotDoublyStochastic(ArtifactError):
    pass


class NoMatching(ArtifactError):
    pass


class TooLarge(ArtifactError):
    pass


class OverlappingIndices(ArtifactError):
    pass


class NotRepresentable(ArtifactError):
    """A product entry is a sum of radicals from distinct square classes."""


class DivergentRowSum(ArtifactError):
    pass


# ---------------------------------------------------------------------------
# radicals
# ---------------------------------------------------------------------------

def is_square(q: Fraction) -> bool:
    if q < 0:
        return False
    n, d = q.numerator, q.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def qsqrt(q: Fraction) -> Fraction:
    """Exact square root of a rational square."""
    return Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))


def radical_sum(terms: Iterable[Tuple[int, Fraction]]) -> List[Tuple[Fraction, Fraction]]:
    """Reduce sum(sign * sqrt(x)) to sum(coef * sqrt(rep)) over square classes.

    Two radicands lie in the same class when their product is a rational
    square, which is the same as having equal squarefree parts, so the
    representation is unique and the sum vanishes iff every coefficient
    does.  No integer factoring is needed.
    """
    classes: List[List[Fraction]] = []  # [rep, coef]
    for sign, x in terms:
        if x == 0:
            continue
        for c in classes:
            ratio = x / c[0]
            if is_square(ratio):
                c[1] += sign * qsqrt(ratio)
                break
        else:
            classes.append([x, Fraction(sign)])
    return [(coef, rep) for rep, coef in classes if coef != 0]


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------

@dataclass
class SignedSqrtMat:
    n_rows: int
    n_cols: int
    entries: Dict[Tuple[int, int], Tuple[int, Fraction]] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for (i, j), (s, v) in list(self.entries.items()):
            if v < 0 or s not in (1, -1):
                raise BadParams(f"bad radical entry at {(i, j)}")
            if v == 0:
                del self.entries[(i, j)]
            elif not (1 <= i <= self.n_rows and 1 <= j <= self.n_cols):
                raise BadParams(f"entry {(i, j)} outside {self.n_rows}x{self.n_cols}")

    @classmethod
    def identity(cls, n: int) -> "SignedSqrtMat":
        return cls(n, n, {(i, i): (1, Fraction(1)) for i in range(1, n + 1)})

    def rows(self) -> Dict[int, Dict[int, Tuple[int, Fraction]]]:
        out: Dict[int, Dict[int, Tuple[int, Fraction]]] = {}
        for (i, j), e in self.entries.items():
            out.setdefault(i, {})[j] = e
        return out

    def cols(self) -> Dict[int, Dict[int, Tuple[int, Fraction]]]:
        out: Dict[int, Dict[int, Tuple[int, Fraction]]] = {}
        for (i, j), e in self.entries.items():
            out.setdefault(j, {})[i] = e
        return out

    def transpose(self) -> "SignedSqrtMat":
        return SignedSqrtMat(self.n_cols, self.n_rows,
                             {(j, i): e for (i, j), e in self.entries.items()})

    def __matmul__(self, other: "SignedSqrtMat") -> "SignedSqrtMat":
        if self.n_cols != other.n_rows:
            raise BadParams("shape mismatch")
        orows = other.rows()
        acc: Dict[Tuple[int, int], List[Tuple[int, Fraction]]] = {}
        for (i, k), (s1, v1) in self.entries.items():
            for j, (s2, v2) in orows.get(k, {}).items():
                acc.setdefault((i, j), []).append((s1 * s2, v1 * v2))
        out = {}
        for key, terms in acc.items():
            red = radical_sum(terms)
            if not red:
                continue
            if len(red) > 1:
                raise NotRepresentable(f"entry {key} mixes square classes")
            coef, rep = red[0]
            out[key] = (1 if coef > 0 else -1, coef * coef * rep)
        return SignedSqrtMat(self.n_rows, other.n_cols, out)

    def to_float(self) -> np.ndarray:
        a = np.zeros((self.n_rows, self.n_cols))
        for (i, j), (s, v) in self.entries.items():
            a[i - 1, j - 1] = s * math.sqrt(v)
        return a

    def to_json(self) -> dict:
        ents = sorted(self.entries.items())
        return {"kind": "signed_sqrt", "rows": self.n_rows, "cols": self.n_cols,
                "entries": [[i, j, "+" if s > 0 else "-", rat_str(v)] for (i, j), (s, v) in ents],
                **({"meta": self.meta} if self.meta else {})}


@dataclass
class RationalMatTrunc:
    n_rows: int
    n_cols: int
    entries: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)
    rows_finalized: Optional[int] = None
    cols_finalized: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, v in list(self.entries.items()):
            v = rat(v)
            if v < 0:
                raise NegativeEntry(f"negative entry at {key}")
            if v == 0:
                del self.entries[key]
                continue
            i, j = key
            if not (1 <= i <= self.n_rows and 1 <= j <= self.n_cols):
                raise BadParams(f"entry {key} outside {self.n_rows}x{self.n_cols}")
            self.entries[key] = v
        if self.rows_finalized is None:
            self.rows_finalized = self.n_rows
        if self.cols_finalized is None:
            self.cols_finalized = self.n_cols if self.rows_finalized == self.n_rows else 0
        if self.rows_finalized > self.n_rows:
            raise BadParams("rows_finalized exceeds the number of rows")

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], **kw) -> "RationalMatTrunc":
        n = len(rows)
        m = len(rows[0]) if rows else 0
        ents = {(i + 1, j + 1): rat(v) for i, r in enumerate(rows) for j, v in enumerate(r) if rat(v) != 0}
        return cls(n, m, ents, **kw)

    @classmethod
    def identity(cls, n: int) -> "RationalMatTrunc":
        return cls(n, n, {(i, i): Fraction(1) for i in range(1, n + 1)})

    def get(self, i: int, j: int) -> Fraction:
        return self.entries.get((i, j), Fraction(0))

    def rows(self) -> Dict[int, Dict[int, Fraction]]:
        out: Dict[int, Dict[int, Fraction]] = {}
        for (i, j), v in self.entries.items():
            out.setdefault(i, {})[j] = v
        return out

    def dense(self) -> List[List[Fraction]]:
        a = [[Fraction(0)] * self.n_cols for _ in range(self.n_rows)]
        for (i, j), v in self.entries.items():
            a[i - 1][j - 1] = v
        return a

    def row_sums(self) -> List[Fraction]:
        s = [Fraction(0)] * self.n_rows
        for (i, _), v in self.entries.items():
            s[i - 1] += v
        return s

    def col_sums(self) -> List[Fraction]:
        s = [Fraction(0)] * self.n_cols
        for (_, j), v in self.entries.items():
            s[j - 1] += v
        return s

    def __matmul__(self, other: "RationalMatTrunc") -> "RationalMatTrunc":
        if self.n_cols != other.n_rows:
            raise BadParams("shape mismatch")
        orows = other.rows()
        out: Dict[Tuple[int, int], Fraction] = {}
        for (i, k), v in self.entries.items():
            for j, w in orows.get(k, {}).items():
                out[(i, j)] = out.get((i, j), Fraction(0)) + v * w
        return RationalMatTrunc(self.n_rows, other.n_cols, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatTrunc):
            return NotImplemented
        return (self.n_rows, self.n_cols, self.entries) == (other.n_rows, other.n_cols, other.entries)

    def to_json(self) -> dict:
        out = {"rows": self.n_rows, "cols": self.n_cols,
               "entries": [[i, j, rat_str(v)] for (i, j), v in sorted(self.entries.items())],
               "rows_finalized": self.rows_finalized}
        if self.cols_finalized != (self.n_cols if self.rows_finalized == self.n_rows else 0):
            out["cols_finalized"] = self.cols_finalized
        if self.meta:
            out["meta"] = self.meta
        return out


def mat_from_json(d: dict):
    ents = d.get("entries", [])
    if d.get("kind") == "signed_sqrt" or (ents and len(ents[0]) == 4):
        e = {}
        for i, j, s, v in ents:
            if s not in ("+", "-"):
                raise BadParams(f"bad sign {s!r}")
            e[(int(i), int(j))] = (1 if s == "+" else -1, rat(v))
        return SignedSqrtMat(int(d["rows"]), int(d["cols"]), e, dict(d.get("meta", {})))
    e = {(int(i), int(j)): rat(v) for i, j, v in ents}
    return RationalMatTrunc(int(d["rows"]), int(d["cols"]), e,
                            rows_finalized=d.get("rows_finalized"),
                            cols_finalized=d.get("cols_finalized"),
                            meta=dict(d.get("meta", {})))


def to_csv(M) -> str:
    """Dense CSV; radical entries become signed decimals (export only)."""
    if isinstance(M, SignedSqrtMat):
        a = M.to_float()
        return "\n".join(",".join(f"{x:.15g}" for x in row) for row in a) + "\n"
    return "\n".join(",".join(rat_str(x) for x in row) for row in M.dense()) + "\n"


# ---------------------------------------------------------------------------
# T-transform blocks and Schur squares
# ---------------------------------------------------------------------------

def v_transform(m: int, t, n: Optional[int] = None) -> SignedSqrtMat:
    """The (m+1)x(m+1) orthogonal block V(m, t), or its n x n embedding."""
    t = rat(t)
    if m < 1 or not (0 < t <= 1):
        raise BadParams("v_transform needs m >= 1 and 0 < t <= 1")
    size = m + 1
    if n is not None:
        if not (1 <= m <= n - 1):
            raise BadParams("v_transform embedding needs 1 <= m <= n-1")
        size = n
    e: Dict[Tuple[int, int], Tuple[int, Fraction]] = {}
    e[(1, m)] = (1, t)
    e[(1, m + 1)] = (-1, 1 - t)
    for i in range(2, m + 1):
        e[(i, i - 1)] = (1, Fraction(1))
    e[(m + 1, m)] = (1, 1 - t)
    e[(m + 1, m + 1)] = (1, t)
    for i in range(m + 2, size + 1):
        e[(i, i)] = (1, Fraction(1))
    return SignedSqrtMat(size, size, e)


def embed(A: SignedSqrtMat, offset: int, size: int) -> SignedSqrtMat:
    """I_offset (+) A (+) I, cut to size x size."""
    e = {(i, i): (1, Fraction(1)) for i in range(1, size + 1)
         if i <= offset or i > offset + A.n_rows}
    for (i, j), v in A.entries.items():
        e[(i + offset, j + offset)] = v
    return SignedSqrtMat(size, size, e)


def schur_square(A: SignedSqrtMat) -> RationalMatTrunc:
    rows_fin = A.meta.get("rows_finalized", A.n_rows)
    cols_fin = A.meta.get("cols_finalized")
    return RationalMatTrunc(A.n_rows, A.n_cols, {k: v for k, (_, v) in A.entries.items()},
                            rows_finalized=rows_fin, cols_finalized=cols_fin)


def orthogonality_defect(U: SignedSqrtMat, exact: bool = True):
    """Check U U^T = I.

    With ``exact`` the row inner products are reduced to square-class
    form and compared with zero exactly; the return value is the list of
    offending row pairs.  Otherwise the max-abs float residual is returned.
    """
    if not exact:
        a = U.to_float()
        return float(np.max(np.abs(a @ a.T - np.eye(U.n_rows)))) if U.n_rows else 0.0
    rows = U.rows()
    bad = []
    idx = list(range(1, U.n_rows + 1))
    for a_pos, i in enumerate(idx):
        ri = rows.get(i, {})
        if sum((v for _, v in ri.values()), Fraction(0)) != 1:
            bad.append((i, i))
        for j in idx[a_pos + 1:]:
            rj = rows.get(j, {})
            terms = [(s1 * rj[k][0], v1 * rj[k][1]) for k, (s1, v1) in ri.items() if k in rj]
            if radical_sum(terms):
                bad.append((i, j))
    return bad


def is_orthogonal(U: SignedSqrtMat) -> bool:
    return U.n_rows == U.n_cols and not orthogonality_defect(U)


# ---------------------------------------------------------------------------
# classification and action
# ---------------------------------------------------------------------------

@dataclass
class StochClass:
    substochastic: bool
    row_stochastic: bool
    column_stochastic: bool
    doubly_stochastic: bool
    block_doubly: bool
    blocks: List[Tuple[int, int]]

    def to_json(self):
        return {"substochastic": self.substochastic, "row_stochastic": self.row_stochastic,
                "column_stochastic": self.column_stochastic,
                "doubly_stochastic": self.doubly_stochastic,
                "block_doubly": self.block_doubly, "blocks": [list(b) for b in self.blocks]}


def block_cuts(P: RationalMatTrunc, upto: Optional[int] = None) -> List[int]:
    """Indices k with no entries linking [1, k] and (k, oo) in either direction."""
    n = upto if upto is not None else min(P.n_rows, P.n_cols)
    # reach[k]: largest row/col index touched from an index <= k
    reach = [0] * (n + 2)
    for (i, j), _ in P.entries.items():
        lo, hi = min(i, j), max(i, j)
        if lo <= n:
            reach[lo] = max(reach[lo], hi)
    cuts = []
    far = 0
    for k in range(1, n + 1):
        far = max(far, reach[k], k)
        if far == k:
            cuts.append(k)
    return cuts


def classify(P: RationalMatTrunc) -> StochClass:
    for v in P.entries.values():
        if v < 0:
            raise NegativeEntry("negative entry")
    rs = P.row_sums()[:P.rows_finalized]
    cs = P.col_sums()[:P.cols_finalized]
    all_rows = P.row_sums()
    all_cols = P.col_sums()
    sub = all(s <= 1 for s in all_rows) and all(s <= 1 for s in all_cols)
    row = sub and P.rows_finalized > 0 and all(s == 1 for s in rs)
    col = sub and P.cols_finalized > 0 and all(s == 1 for s in cs)
    fin = min(P.rows_finalized, P.cols_finalized)
    cuts = block_cuts(P, fin) if fin else []
    blocks = []
    prev = 0
    for c in cuts:
        blocks.append((prev + 1, c))
        prev = c
    block_ok = len(blocks) >= 2
    if block_ok:
        for a, b in blocks:
            if any(rs[i - 1] != 1 for i in range(a, b + 1)) or any(cs[j - 1] != 1 for j in range(a, b + 1)):
                block_ok = False
                break
    return StochClass(sub, row, col, row and col, block_ok and sub, blocks)


def apply(P: RationalMatTrunc, s: MonotoneSeq, out_len: int):
    """(P s)_i for i <= out_len.

    Entries are exact Fractions.  A matrix may know only a window of its
    columns: ``meta['exact_cols'] = n`` means columns 1..n and
    ``meta['known_cols'] = [a, b]`` means columns a..b.  When s has mass
    outside the window the entry is an IntervalRat enclosing the unknown
    remainder (matrix entries are <= 1).
    """
    if out_len > P.rows_finalized:
        raise HorizonExceeded(f"only {P.rows_finalized} rows are finalized")
    rows = P.rows()
    window = None
    if P.meta.get("known_cols") is not None:
        a, b = P.meta["known_cols"]
        window = (int(a), int(b))
    elif P.meta.get("exact_cols") is not None:
        window = (1, int(P.meta["exact_cols"]))
    rest = None
    if window is not None:
        a, b = window
        rest = s.tail_sum(b + 1) + s.partial_sum(a - 1)
        if rest.is_divergent:
            raise DivergentRowSum("rows meet a nonsummable tail outside the known columns")
    out = []
    for i in range(1, out_len + 1):
        acc = sum((v * s.term(j) for j, v in rows.get(i, {}).items()), Fraction(0))
        if rest is None or (rest.is_finite and rest.hi == 0):
            out.append(acc)
        else:
            out.append(IntervalRat(acc, acc + rest.hi) if rest.is_finite else IntervalRat.unknown())
    return out


def conjugate_diagonal_check(L: SignedSqrtMat, eta: MonotoneSeq, xi: MonotoneSeq, n: int) -> Verdict3:
    """Compare the diagonal of L diag(eta) L^T with xi on rows 1..n."""
    fin = L.meta.get("rows_finalized", L.n_rows)
    if n > fin:
        raise HorizonExceeded(f"only {fin} rows of L are finalized")
    rows = L.rows()
    for i in range(1, n + 1):
        d = sum((v * eta.term(j) for j, (_, v) in rows.get(i, {}).items()), Fraction(0))
        x = xi.term(i)
        if d != x:
            return fails(i, d - x, n)
    return holds("ExactDiagonal", n, rows=n)


def lemma_2_12_profile(P: RationalMatTrunc, horizon: int) -> List[Fraction]:
    """n - sum_{i,j<=n} P_ij for n = 1..horizon."""
    if horizon > P.rows_finalized:
        raise HorizonExceeded("profile needs finalized rows up to the horizon")
    corner = [Fraction(0)] * (horizon + 1)
    for (i, j), v in P.entries.items():
        k = max(i, j)
        if k <= horizon:
            corner[k] += v
    out, acc = [], Fraction(0)
    for n in range(1, horizon + 1):
        acc += corner[n]
        out.append(n - acc)
    return out


# ---------------------------------------------------------------------------
# Birkhoff decomposition
# ---------------------------------------------------------------------------

def _has_perfect_matching(adj: List[List[int]], rows: List[int], banned_cols: set) -> bool:
    match: Dict[int, int] = {}

    def try_row(r, seen):
        for c in adj[r]:
            if c in banned_cols or c in seen:
                continue
            seen.add(c)
            if c not in match or try_row(match[c], seen):
                match[c] = r
                return True
        return False

    return all(try_row(r, set()) for r in rows)


def _lex_matching(adj: List[List[int]], n: int) -> Tuple[int, ...]:
    used: set = set()
    perm = []
    for r in range(n):
        for c in sorted(adj[r]):
            if c in used:
                continue
            used.add(c)
            if _has_perfect_matching(adj, list(range(r + 1, n)), used):
                perm.append(c)
                break
            used.discard(c)
        else:
            raise NoMatching("no perfect matching on the positive entries")
    return tuple(perm)


def _nullspace_vector(cols: List[List[Fraction]]) -> List[Fraction]:
    """A nonzero x with sum_k x_k cols[k] = 0 (cols are linearly dependent)."""
    m = len(cols)
    n = len(cols[0])
    A = [[cols[k][i] for k in range(m)] for i in range(n)]
    pivots = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(n):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    free = next(c for c in range(m) if c not in pivots)
    x = [Fraction(0)] * m
    x[free] = Fraction(1)
    for row, c in enumerate(pivots):
        x[c] = -A[row][free]
    return x


def _caratheodory(terms: List[Tuple[Fraction, Tuple[int, ...]]], N: int, limit: int):
    while len(terms) > limit:
        vecs = []
        for _, perm in terms:
            v = [Fraction(0)] * (N * N + 1)
            for r, c in enumerate(perm):
                v[r * N + c] = Fraction(1)
            v[N * N] = Fraction(1)
            vecs.append(v)
        lam = _nullspace_vector(vecs)
        if all(x <= 0 for x in lam):
            lam = [-x for x in lam]
        theta = min(w / l for (w, _), l in zip(terms, lam) if l > 0)
        terms = [(w - theta * l, p) for (w, p), l in zip(terms, lam)]
        terms = [(w, p) for w, p in terms if w != 0]
    return terms


def birkhoff_decompose(P: RationalMatTrunc, N: Optional[int] = None) -> List[Tuple[Fraction, Tuple[int, ...]]]:
    """Exact convex decomposition into permutation matrices.

    Each permutation is a tuple ``perm`` with ``perm[i-1]`` the column of
    the 1 in row i.  The greedy phase extracts the lexicographically
    smallest permutation supported on positive entries with weight equal
    to the smallest entry on it; if more than (N-1)^2 + 1 terms result,
    an exact Caratheodory reduction trims the list.
    """
    N = N if N is not None else P.n_rows
    if P.n_rows != N or P.n_cols != N:
        raise NotDoublyStochastic("matrix must be N x N")
    A = P.dense()
    if any(sum(r) != 1 for r in A) or any(sum(A[i][j] for i in range(N)) != 1 for j in range(N)):
        raise NotDoublyStochastic("row or column sum differs from 1")
    terms: List[Tuple[Fraction, Tuple[int, ...]]] = []
    while True:
        adj = [[j for j in range(N) if A[i][j] > 0] for i in range(N)]
        if not any(adj):
            break
        perm = _lex_matching(adj, N)
        w = min(A[i][perm[i]] for i in range(N))
        for i in range(N):
            A[i][perm[i]] -= w
        terms.append((w, perm))
    terms = _caratheodory(terms, N, (N - 1) ** 2 + 1)
    return [(w, tuple(c + 1 for c in perm)) for w, perm in terms]


def perm_matrix(perm: Sequence[int]) -> RationalMatTrunc:
    n = len(perm)
    return RationalMatTrunc(n, n, {(i + 1, c): Fraction(1) for i, c in enumerate(perm)})


def recompose(terms, N: int) -> RationalMatTrunc:
    out: Dict[Tuple[int, int], Fraction] = {}
    for w, perm in terms:
        for i, c in enumerate(perm, start=1):
            out[(i, c)] = out.get((i, c), Fraction(0)) + w
    return RationalMatTrunc(N, N, out)


# ---------------------------------------------------------------------------
# orthostochastic decision for small matrices
# ---------------------------------------------------------------------------

def orthostochastic_decide_small(Q: RationalMatTrunc, N: Optional[int] = None,
                                 tol: float = 1e-10) -> Optional[SignedSqrtMat]:
    """Return a real orthogonal U with U_ij^2 = Q_ij, or None if none exists.

    Column sign flips make row 1 nonnegative and row sign flips make the
    first nonzero of each row positive, so only the remaining signs are
    searched.  Rows are placed one at a time and a partial assignment is
    dropped as soon as it breaks orthogonality with an earlier row (a
    float test first, then the exact square-class test).  This covers the
    same 2^(N^2) sign patterns as a plain enumeration.
    """
    N = N if N is not None else Q.n_rows
    if N > 5:
        raise TooLarge("exhaustive sign search is limited to N <= 5")
    if Q.n_rows != N or Q.n_cols != N:
        raise BadParams("Q must be N x N")
    A = Q.dense()
    if any(sum(r) != 1 for r in A) or any(sum(A[i][j] for i in range(N)) != 1 for j in range(N)):
        raise NotDoublyStochastic("Q must be doubly stochastic")
    fl = [[math.sqrt(x) for x in r] for r in A]
    chosen: List[List[int]] = []

    def compatible(i: int, signs: List[int]) -> bool:
        for k, prev in enumerate(chosen):
            if abs(sum(prev[j] * signs[j] * fl[k][j] * fl[i][j] for j in range(N))) > 1e-6:
                return False
            terms = [(prev[j] * signs[j], A[k][j] * A[i][j]) for j in range(N) if A[k][j] and A[i][j]]
            if radical_sum(terms):
                return False
        return True

    def rec(i: int) -> bool:
        if i == N:
            return True
        nz = [j for j in range(N) if A[i][j] != 0]
        if i == 0:
            options = [[1] * N]
        else:
            free = nz[1:]
            options = []
            for pat in product((1, -1), repeat=len(free)):
                s = [1] * N
                for j, v in zip(free, pat):
                    s[j] = v
                options.append(s)
        for s in options:
            if compatible(i, s):
                chosen.append(s)
                if rec(i + 1):
                    return True
                chosen.pop()
        return False

    if not rec(0):
        return None
    ents = {(i + 1, j + 1): (chosen[i][j], A[i][j]) for i in range(N) for j in range(N) if A[i][j]}
    return SignedSqrtMat(N, N, ents)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def remark_2_6_matrix() -> RationalMatTrunc:
    """The 3x3 doubly stochastic matrix that is not unistochastic."""
    h = Fraction(1, 2)
    return RationalMatTrunc.from_dense([[h, h, 0], [h, 0, h], [0, h, h]])


def remark_2_9_matrix(n_cols: int) -> RationalMatTrunc:
    """P_{2i-1,i} = P_{2i,i} = 1/2, truncated to 2*n_cols rows."""
    h = Fraction(1, 2)
    e = {}
    for i in range(1, n_cols + 1):
        e[(2 * i - 1, i)] = h
        e[(2 * i, i)] = h
    return RationalMatTrunc(2 * n_cols, n_cols, e, rows_finalized=2 * n_cols, cols_finalized=n_cols)


def ex_2_11_indices(K: int) -> Tuple[List[int], List[int]]:
    """n_k (the non-squares-from-4 listing) and m_k = (k+1)^2 for k <= K."""
    m = [(k + 1) ** 2 for k in range(1, K + 1)]
    squares = set((k + 1) ** 2 for k in range(1, K + 2))
    n, j = [], 0
    while len(n) < K:
        j += 1
        if j not in squares:
            n.append(j)
    return n, m


def ex_2_11(K: int) -> SignedSqrtMat:
    if K < 1:
        raise BadParams("ex_2_11 needs K >= 1")
    n, m = ex_2_11_indices(K)
    h = Fraction(1, 2)
    e = {}
    for k in range(1, K + 1):
        e[(2 * k - 1, n[k - 1])] = (1, h)
        e[(2 * k - 1, m[k - 1])] = (1, h)
        e[(2 * k, n[k - 1])] = (1, h)
        e[(2 * k, m[k - 1])] = (-1, h)
    cols = max(m[-1], n[-1])
    return SignedSqrtMat(2 * K, cols, e, meta={"rows_finalized": 2 * K, "cols_finalized": 0})


def ex_6_11(a: MonotoneSeq, N: int) -> SignedSqrtMat:
    """N x N truncation of the orthogonal matrix with U_ij = 0 for i > j > 1."""
    if N < 1:
        raise BadParams("ex_6_11 needs N >= 1")
    T = a.total()
    if not (T.is_point and T.lo == 1):
        raise BadParams("ex_6_11 needs a positive sequence with exact total 1")
    av = a.terms(N + 1)
    if any(x <= 0 for x in av):
        raise BadParams("ex_6_11 needs a_n > 0")
    b = [None] + [1 / a.partial_sum(n) for n in range(1, N + 1)]
    e = {}
    for i in range(1, N + 1):
        e[(i, 1)] = (1, av[i - 1])
        if i >= 2:
            e[(i, i)] = (-1, 1 - av[i - 1] * b[i])
        for j in range(max(i + 1, 2), N + 1):
            e[(i, j)] = (1, av[i - 1] * (b[j - 1] - b[j]))
    return SignedSqrtMat(N, N, e, meta={"rows_finalized": 0, "cols_finalized": 0})


def gen_example(which: str, *args) -> SignedSqrtMat:
    if which == "ex_2_11":
        return ex_2_11(*args)
    if which == "ex_6_11":
        return ex_6_11(*args)
    raise BadParams(f"unknown example {which!r}")


def direct_sum(blocks: Sequence[Tuple[Sequence[int], Sequence[int], RationalMatTrunc]],
               n_rows: Optional[int] = None, n_cols: Optional[int] = None) -> RationalMatTrunc:
    """Scatter blocks: block entry (a, b) lands at (rows[a-1], cols[b-1])."""
    seen_r, seen_c = set(), set()
    out: Dict[Tuple[int, int], Fraction] = {}
    for ri, ci, B in blocks:
        if len(ri) != B.n_rows or len(ci) != B.n_cols:
            raise BadParams("block shape does not match its index lists")
        if seen_r & set(ri) or seen_c & set(ci):
            raise OverlappingIndices("block index sets overlap")
        seen_r |= set(ri)
        seen_c |= set(ci)
        for (a, b), v in B.entries.items():
            out[(ri[a - 1], ci[b - 1])] = v
    R = n_rows if n_rows is not None else max(seen_r, default=0)
    C = n_cols if n_cols is not None else max(seen_c, default=0)
    return RationalMatTrunc(R, C, out)
