"""Sequence calculus for principal operator ideals.

A principal ideal is represented by a generator g in c_o^*.  Its
characteristic set consists of the sequences whose decreasing
rearrangement is dominated termwise by c * D_m(g) for some constant c > 0
and ampliation factor m.  Membership, arithmetic-mean closures and
invariance under stochastic matrices are decided (or probed) here with a
finite search over (c, m) plus analytic tail certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .majorize import DEFAULT_HORIZON, Verdict3, at_inf, fails, holds, inconclusive, weak
from .seqcore import (
    ArtifactError,
    BadParams,
    EvGeo,
    EvPow,
    EvZero,
    IntervalRat,
    MonotoneSeq,
    NotSummable,
    ampliate,
    eventual_le,
    rat,
    rat_str,
    scale,
    seq_to_json,
)
from .stoch import NegativeEntry, RationalMatTrunc, apply

DEFAULT_C_GRID: Tuple[Fraction, ...] = tuple(Fraction(2) ** i for i in range(-4, 21))
DEFAULT_M_MAX = 64


class BadCombo(ArtifactError, ValueError):
    """A convex permutation combination with invalid weights or maps."""


@dataclass(frozen=True)
class PrincipalIdeal:
    """The ideal generated by a single sequence g."""

    generator: MonotoneSeq

    def dilated(self, c, m: int) -> MonotoneSeq:
        """c * D_m(g)."""
        return scale(ampliate(self.generator, m), rat(c))

    def to_json(self) -> dict:
        return {"generator": seq_to_json(self.generator)}


PermSpec = Union[Dict[int, int], Sequence[Tuple[int, int]]]


@dataclass
class ConvexPermCombo:
    """sum_j t_j Pi_j with positive exact weights and finitely supported permutations.

    Each permutation is a map i -> pi(i) on finitely many indices (identity
    elsewhere); Pi sends the basis vector e_i to e_{pi(i)}.
    """

    terms: List[Tuple[Fraction, Dict[int, int]]] = field(default_factory=list)

    def __post_init__(self):
        clean = []
        total = Fraction(0)
        for w, perm in self.terms:
            w = rat(w)
            if w <= 0:
                raise BadCombo("weights must be positive")
            mapping = {int(i): int(j) for i, j in (perm.items() if isinstance(perm, dict) else perm)}
            if any(i < 1 or j < 1 for i, j in mapping.items()):
                raise BadCombo("permutation indices are 1-based")
            if set(mapping) != set(mapping.values()):
                raise BadCombo("permutation map is not a bijection of its support")
            total += w
            clean.append((w, mapping))
        if total > 1:
            raise BadCombo("weights sum to more than 1")
        self.terms = clean

    @classmethod
    def transpositions(cls, weights: Sequence) -> "ConvexPermCombo":
        """The combination sum_k t_k (1 <-> k), with k = 1 the identity."""
        terms = []
        for k, w in enumerate(weights, start=1):
            terms.append((w, {} if k == 1 else {1: k, k: 1}))
        return cls(terms)


def convex_perm_apply(combo: ConvexPermCombo, xi: MonotoneSeq, out_len: int) -> List[Fraction]:
    """Exact prefix of (sum_j t_j Pi_j) xi of length out_len."""
    if not isinstance(combo, ConvexPermCombo):
        raise BadCombo("expected a ConvexPermCombo")
    out = [Fraction(0)] * out_len
    for w, mapping in combo.terms:
        inverse = {j: i for i, j in mapping.items()}
        for k in range(1, out_len + 1):
            src = inverse.get(k, k)
            out[k - 1] += w * xi.term(src)
    return out


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------

def _lower_form(g: MonotoneSeq, c: Fraction, m: int):
    """An eventual form bounding c * D_m(g) from below, or None.

    For power laws, ceil(n/m) <= (n + m - 1)/m gives an exact lower power
    law; geometric generators are only handled at m = 1 here (the m > 1
    geometric case is treated directly in _geo_pair).
    """
    f = g.form()
    if f is None:
        return None
    if isinstance(f, EvZero):
        return EvZero(f.H * m)
    if isinstance(f, EvPow):
        return EvPow(f.H * m, c * f.c * Fraction(m) ** f.s, f.s, m - 1 + m * f.a)
    if isinstance(f, EvGeo) and m == 1:
        return EvGeo(f.H, c * f.C, f.r)
    return None


def _geo_pair(ef: EvGeo, gf: EvGeo, c: Fraction, m: int) -> Optional[int]:
    """Tail certificate for a geometric eta against c * D_m(g), g geometric.

    With g_k = C r**(k-1) for k > H, ceil(n/m) - 1 <= (n-1)/m gives
    (D_m g)_n >= C r**((n-1)/m), which dominates C_eta rho**(n-1) once
    rho**m <= r and C_eta <= c C.
    """
    if ef.r ** m <= gf.r and ef.C <= c * gf.C:
        return max(ef.H, m * gf.H)
    return None


def _tail_cert(eta: MonotoneSeq, g: MonotoneSeq, c: Fraction, m: int) -> Optional[int]:
    ef, gf = eta.form(), g.form()
    if ef is None or gf is None:
        return None
    if isinstance(ef, EvGeo) and isinstance(gf, EvGeo) and m > 1:
        return _geo_pair(ef, gf, c, m)
    return eventual_le(ef, _lower_form(g, c, m))


def _growth_failure(eta: MonotoneSeq, g: MonotoneSeq) -> Optional[str]:
    """Reason why no (c, m) can work, for the decidable family pairs."""
    ef, gf = eta.form(), g.form()
    if isinstance(ef, EvPow) and isinstance(gf, EvPow) and ef.s < gf.s:
        return f"power law exponent {ef.s} below generator exponent {gf.s}"
    if isinstance(ef, EvPow) and isinstance(gf, EvGeo):
        return "power law decay cannot be dominated by geometric decay"
    if isinstance(ef, (EvPow, EvGeo)) and isinstance(gf, EvZero):
        return "infinite support against a finitely supported generator"
    return None


def _first_violation(vals: Sequence[Fraction], g: MonotoneSeq, c: Fraction, m: int) -> Optional[int]:
    for n, v in enumerate(vals, start=1):
        if v > c * g.term(-(-n // m)):
            return n
    return None


def _grid(c_grid, m_max):
    grid = sorted(rat(c) for c in (DEFAULT_C_GRID if c_grid is None else c_grid))
    if not grid or grid[0] <= 0:
        raise BadParams("the constant grid must be nonempty and positive")
    if m_max < 1:
        raise BadParams("m_max must be >= 1")
    return grid, m_max


def member(eta: MonotoneSeq, I: PrincipalIdeal, c_grid=None, m_max: int = DEFAULT_M_MAX,
           horizon: int = DEFAULT_HORIZON) -> Verdict3:
    """Decide eta in Sigma(I) by searching (m, c) in increasing order."""
    g = I.generator
    grid, m_max = _grid(c_grid, m_max)
    reason = _growth_failure(eta, g)
    if reason is not None:
        return fails(0, None, horizon, reason=reason)
    if eta.horizon is not None:
        horizon = min(horizon, eta.horizon)
    prefix = [eta.term(n) for n in range(1, horizon + 1)]
    best_scan = None
    for m in range(1, m_max + 1):
        for c in grid:
            bad = _first_violation(prefix, g, c, m)
            if bad is not None:
                continue
            if best_scan is None:
                best_scan = (c, m)
            n0 = _tail_cert(eta, g, c, m)
            if n0 is None:
                continue
            if n0 > horizon:
                extra = [eta.term(n) for n in range(horizon + 1, n0 + 1)] if n0 <= 20 * horizon and eta.horizon is None else None
                if extra is None or _first_violation(prefix + extra, g, c, m) is not None:
                    continue
            return holds("HorizonPlusTermwiseTail", max(horizon, n0), c=c, m=m, n0=n0)
    if best_scan is not None:
        c, m = best_scan
        return inconclusive(horizon, reason="termwise domination at horizon without a tail certificate",
                            c=c, m=m)
    return inconclusive(horizon, reason="no grid point dominates the prefix")


# ---------------------------------------------------------------------------
# arithmetic-mean closures
# ---------------------------------------------------------------------------

def _summable(s: MonotoneSeq) -> bool:
    return not s.total().is_divergent


def closure_member(kind: str, xi: MonotoneSeq, I: PrincipalIdeal, c_grid=None,
                   m_max: int = DEFAULT_M_MAX, horizon: int = DEFAULT_HORIZON) -> Verdict3:
    """xi in Sigma(I^-) (kind am) or Sigma(I^-oo) (kind am_inf).

    am searches eta = c D_m(g) with weak(xi, eta); am_inf uses at_inf
    instead and needs xi and g summable.
    """
    if kind not in ("am", "am_inf"):
        raise BadParams(f"unknown closure kind {kind!r}")
    g = I.generator
    grid, m_max = _grid(c_grid, m_max)
    if kind == "am_inf":
        if not (_summable(xi) and _summable(g)):
            raise NotSummable("the am-infinity closure needs summable xi and generator")
        # tail sums of these families decay at the same relative rates as
        # the terms, so the membership growth test rules out every (c, m)
        reason = _growth_failure(xi, g)
        if reason is not None:
            return fails(0, None, horizon, reason=reason)
        test = at_inf
    else:
        test = weak
        if not _summable(xi) and _summable(g):
            # every c D_m g has bounded partial sums while those of xi diverge
            c0 = next((c for c in grid if c >= 1), grid[-1])
            v = weak(xi, I.dilated(c0, 1), horizon)
            idx = v.witness_index if v.fails else 0
            return fails(idx, v.deficit if v.fails else None, horizon,
                         reason="xi is not summable but the generator is", c=c0, m=1)
    all_failed = True
    first_fail = None
    for m in range(1, m_max + 1):
        for c in grid:
            v = test(xi, I.dilated(c, m), horizon)
            if v.holds:
                v.cert.data.update(c=c, m=m)
                return v
            if v.fails:
                first_fail = first_fail or (c, m, v)
            else:
                all_failed = False
    info = {"reason": "no grid point certified", "grid_all_fail": all_failed}
    if first_fail is not None:
        info.update(c=first_fail[0], m=first_fail[1], witness_index=first_fail[2].witness_index)
    return inconclusive(horizon, **info)


# ---------------------------------------------------------------------------
# invariance probes
# ---------------------------------------------------------------------------

def _upper(v) -> Fraction:
    if isinstance(v, IntervalRat):
        if not v.is_finite:
            raise BadParams("entry of the image is not bounded")
        return v.hi
    return v


def invariance_probe(I: PrincipalIdeal, P: RationalMatTrunc, samples: Sequence[MonotoneSeq],
                     horizon: int = 200, c_grid=None, m_max: int = DEFAULT_M_MAX) -> dict:
    """Sampled evidence on whether (P xi)^* stays in Sigma(I).

    Each sample is first checked to lie in Sigma(I).  The image prefix
    of length min(horizon, finalized rows) is sorted decreasingly and
    compared termwise with c D_m(g) over the grid.  Only the visible
    prefix is inspected, so a "holds_at_horizon" entry is evidence and
    not a proof.
    """
    for (i, j), v in P.entries.items():
        if v < 0:
            raise NegativeEntry(f"negative entry at {(i, j)}")
    grid, m_max = _grid(c_grid, m_max)
    H = min(horizon, P.rows_finalized)
    g = I.generator
    report = []
    for idx, xi in enumerate(samples):
        pre = member(xi, I, grid, m_max, min(horizon, DEFAULT_HORIZON))
        entry = {"sample": idx, "sample_member": pre.status}
        if not pre.holds:
            entry["evidence"] = "skipped"
            report.append(entry)
            continue
        vals = sorted((_upper(v) for v in apply(P, xi, H)), reverse=True)
        hit = None
        last_bad = None
        for m in range(1, m_max + 1):
            for c in grid:
                bad = _first_violation(vals, g, c, m)
                if bad is None:
                    hit = (c, m)
                    break
                last_bad = bad
            if hit:
                break
        if hit:
            entry.update(evidence="holds_at_horizon", c=rat_str(hit[0]), m=hit[1])
        else:
            entry.update(evidence="fails_at_horizon", witness_index=last_bad,
                         c=rat_str(grid[-1]), m=m_max)
        report.append(entry)
    return {"horizon": H, "ideal": I.to_json(), "samples": report,
            "scope": "sampled evidence only"}
