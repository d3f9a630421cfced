"""Command-line front end.

Every subcommand reads sequence or matrix JSON files and prints a JSON
payload with sorted keys (or CSV with ``--format csv``).  Exit codes:
0 holds/success, 1 fails, 2 inconclusive, 3 for library errors and 64
for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Any, List, Optional

from . import canon, decomp, horn_finite, ideals, intermediate, majorize, stoch
from .seqcore import ArtifactError, IntervalRat, MonotoneSeq, finite, rat_str, seq_from_json, seq_to_json

EXIT_OK, EXIT_FAILS, EXIT_INCONCLUSIVE, EXIT_ERROR, EXIT_USAGE = 0, 1, 2, 3, 64
STATUS_EXIT = {"holds": EXIT_OK, "fails": EXIT_FAILS, "inconclusive": EXIT_INCONCLUSIVE}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    horizon: int = 1000
    tolerance: Decimal = Decimal("1e-10")
    format: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.horizon < 1:
            raise UsageError("--horizon must be >= 1")
        if self.format not in ("json", "csv"):
            raise UsageError("--format must be json or csv")
        if self.seed < 0:
            raise UsageError("--seed must be >= 0")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# input and output helpers
# ---------------------------------------------------------------------------

def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e.msg}") from None


def load_seq(path: str) -> MonotoneSeq:
    d = _load_json(path)
    if isinstance(d, list):
        return finite(d)
    return seq_from_json(d)


def load_vector(path: str) -> List[Fraction]:
    s = load_seq(path)
    if s.support() is None:
        raise UsageError(f"{path} must describe a finitely supported vector")
    n = s.support()
    return [s.term(k) for k in range(1, n + 1)]


def load_matrix(path: str):
    d = _load_json(path)
    if isinstance(d, list):
        return stoch.RationalMatTrunc.from_dense(d)
    return stoch.mat_from_json(d)


def plain(v: Any) -> Any:
    """Recursively turn exact values into JSON-ready data."""
    if isinstance(v, Fraction):
        return rat_str(v)
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, IntervalRat):
        return v.to_json()
    if isinstance(v, MonotoneSeq):
        return seq_to_json(v)
    if isinstance(v, dict):
        return {str(k): plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [plain(x) for x in v]
    if hasattr(v, "to_json"):
        return plain(v.to_json())
    return str(v)


def _emit(payload: dict, cfg: RunConfig, out: Optional[str], matrix=None) -> None:
    if cfg.format == "csv":
        if matrix is not None:
            text = stoch.to_csv(matrix)
        else:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            for k in sorted(payload):
                v = payload[k]
                w.writerow([k, v if isinstance(v, (str, int)) else json.dumps(v, sort_keys=True)])
            text = buf.getvalue()
    else:
        text = json.dumps(plain(payload), sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, exit code, optional matrix for csv)
# ---------------------------------------------------------------------------

RELATIONS = ("weak", "strong", "block", "at_inf", "strong_at_inf")


def cmd_check(a, cfg):
    if a.kind not in RELATIONS and not a.kind.startswith("p_shift"):
        raise UsageError(f"unknown relation {a.kind!r}")
    v = majorize.relation(a.kind, load_seq(a.xi), load_seq(a.eta), cfg.horizon, p=a.p)
    payload = v.to_json()
    return payload, STATUS_EXIT[v.status], None


def _padded(a):
    xi, eta = load_vector(a.xi), load_vector(a.eta)
    n = max(len(xi), len(eta))
    return xi + [Fraction(0)] * (n - len(xi)), eta + [Fraction(0)] * (n - len(eta))


def cmd_horn(a, cfg):
    xi, eta = _padded(a)
    w = horn_finite.horn_construct(xi, eta)
    payload = w.to_json()
    payload["verification"] = horn_finite.verify_witness(w, xi, eta)
    return payload, EXIT_OK, w.Q


def cmd_canon(a, cfg):
    run = canon.canon_run(load_seq(a.xi), load_seq(a.eta), a.steps)
    payload = run.to_json()
    payload["classification"] = canon.report_to_json(canon.classify_run(run))
    return payload, EXIT_OK, run.Q_matrix()


FINITE_KINDS = ("A_i", "A_ii", "B_i", "B_ii")


def cmd_intermediate(a, cfg):
    if a.kind in FINITE_KINDS:
        out = intermediate.finite_intermediate(a.kind, *_padded(a))
        return {"kind": a.kind, "sequence": out, "conclusive": True}, EXIT_OK, None
    xi, eta = load_seq(a.xi), load_seq(a.eta)
    if a.kind == "zeta":
        res = intermediate.infinite_zeta(xi, eta, cfg.horizon)
    elif a.kind == "rho":
        res = intermediate.infinite_rho(xi, eta, cfg.horizon)
    elif a.kind in ("inf_rho", "inf_zeta"):
        res = intermediate.inf_intermediate(a.kind[4:], xi, eta, cfg.horizon)
    else:
        raise UsageError(f"unknown intermediate kind {a.kind!r}")
    payload = res.to_json()
    payload["kind"] = a.kind
    return payload, EXIT_OK if res.conclusive else EXIT_INCONCLUSIVE, None


def cmd_decompose(a, cfg):
    Q = decomp.assemble(load_seq(a.xi), load_seq(a.eta), depth_cap=a.depth, K=a.steps,
                        horizon=cfg.horizon)
    return decomp.assembly_to_json(Q), EXIT_OK, Q


def cmd_classify(a, cfg):
    return stoch.classify(load_matrix(a.matrix)).to_json(), EXIT_OK, None


def cmd_birkhoff(a, cfg):
    P = load_matrix(a.matrix)
    terms = stoch.birkhoff_decompose(P)
    payload = {"terms": [{"weight": w, "perm": list(p)} for w, p in terms], "count": len(terms)}
    return payload, EXIT_OK, None


def cmd_ortho(a, cfg):
    Q = load_matrix(a.matrix)
    U = stoch.orthostochastic_decide_small(Q, tol=float(cfg.tolerance))
    if U is None:
        return {"answer": "no", "verdict": "fails"}, EXIT_FAILS, None
    return {"answer": "yes", "verdict": "holds", "witness": U.to_json()}, EXIT_OK, None


def _ideal(path: str) -> ideals.PrincipalIdeal:
    return ideals.PrincipalIdeal(load_seq(path))


def cmd_ideal(a, cfg):
    grid = None
    if a.c_grid:
        try:
            grid = [Fraction(x) for x in a.c_grid.split(",")]
        except (ValueError, ZeroDivisionError):
            raise UsageError("--c-grid must be a comma separated list of rationals") from None
    if a.op == "probe":
        if not a.args or len(a.args) < 2:
            raise UsageError("ideal probe needs <generator.json> <matrix.json> [sample.json ...]")
        I = _ideal(a.args[0])
        P = load_matrix(a.args[1])
        samples = [load_seq(p) for p in a.args[2:]] or [I.generator]
        report = ideals.invariance_probe(I, P, samples, cfg.horizon, grid, a.m_max)
        return report, EXIT_OK, None
    if len(a.args) != 2:
        raise UsageError(f"ideal {a.op} needs <seq.json> <generator.json>")
    s, I = load_seq(a.args[0]), _ideal(a.args[1])
    if a.op == "member":
        v = ideals.member(s, I, grid, a.m_max, cfg.horizon)
    else:
        kind = {"am-closure": "am", "aminf-closure": "am_inf"}[a.op]
        v = ideals.closure_member(kind, s, I, grid, a.m_max, cfg.horizon)
    return v.to_json(), STATUS_EXIT[v.status], None


def cmd_gen(a, cfg):
    if a.which == "ex_2_11":
        if len(a.args) != 1:
            raise UsageError("gen ex_2_11 needs K")
        M = stoch.ex_2_11(_int(a.args[0], "K"))
    else:
        if len(a.args) != 2:
            raise UsageError("gen ex_6_11 needs <a.json> N")
        M = stoch.ex_6_11(load_seq(a.args[0]), _int(a.args[1], "N"))
    if a.schur:
        M = stoch.schur_square(M)
    return M.to_json(), EXIT_OK, M


def _int(s: str, name: str) -> int:
    try:
        return int(s)
    except ValueError:
        raise UsageError(f"{name} must be an integer") from None


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--horizon", type=int, default=1000)
    common.add_argument("--tol", default="1e-10")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")

    p = _Parser(prog="artifact", description="Exact majorization toolkit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("check", parents=[common], help="decide a majorization relation")
    s.add_argument("kind")
    s.add_argument("xi")
    s.add_argument("eta")
    s.add_argument("--p", type=int)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("horn", parents=[common], help="finite Schur-Horn witness")
    s.add_argument("xi")
    s.add_argument("eta")
    s.set_defaults(func=cmd_horn)

    s = sub.add_parser("canon", parents=[common], help="canonical construction transcript")
    s.add_argument("xi")
    s.add_argument("eta")
    s.add_argument("--steps", type=int, default=20)
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("intermediate", parents=[common], help="intermediate sequences")
    s.add_argument("kind", choices=FINITE_KINDS + ("zeta", "rho", "inf_zeta", "inf_rho"))
    s.add_argument("xi")
    s.add_argument("eta")
    s.set_defaults(func=cmd_intermediate)

    s = sub.add_parser("decompose", parents=[common], help="assemble Q with Q eta = xi on a prefix")
    s.add_argument("xi")
    s.add_argument("eta")
    s.add_argument("--steps", type=int, default=50)
    s.add_argument("--depth", type=int, default=16)
    s.set_defaults(func=cmd_decompose)

    for name, fn in (("classify", cmd_classify), ("birkhoff", cmd_birkhoff), ("ortho-decide", cmd_ortho)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("matrix")
        s.set_defaults(func=fn)

    s = sub.add_parser("ideal", parents=[common], help="principal ideal calculus")
    s.add_argument("op", choices=("member", "am-closure", "aminf-closure", "probe"))
    s.add_argument("args", nargs="*")
    s.add_argument("--c-grid")
    s.add_argument("--m-max", type=int, default=ideals.DEFAULT_M_MAX)
    s.set_defaults(func=cmd_ideal)

    s = sub.add_parser("gen", parents=[common], help="generate an example matrix")
    s.add_argument("which", choices=("ex_2_11", "ex_6_11"))
    s.add_argument("args", nargs="*")
    s.add_argument("--schur", action="store_true", help="emit the Schur square instead")
    s.set_defaults(func=cmd_gen)
    return p


def dispatch(argv: Optional[List[str]] = None) -> int:
    try:
        a = build_parser().parse_args(argv)
        try:
            tol = Decimal(a.tol)
        except InvalidOperation:
            raise UsageError("--tol must be a decimal number") from None
        cfg = RunConfig(a.horizon, tol, a.format, a.seed)
        payload, code, matrix = a.func(a, cfg)
        _emit(payload, cfg, a.out, matrix)
        return code
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ArtifactError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except RecursionError:
        print("error: recursion limit reached", file=sys.stderr)
        return EXIT_ERROR


def main(argv: Optional[List[str]] = None) -> int:
    return dispatch(argv)
