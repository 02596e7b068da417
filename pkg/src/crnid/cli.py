"""Command-line front end: certify, discriminate, matrix, groebner, witness."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .certify import (
    CertifyOptions,
    DegenerateData,
    StationarySolveError,
    certify_discriminability,
    certify_identifiability,
    constraints_from_decl,
    crn_summary,
    evaluate_matrix_float,
    exact_witness_at,
    find_rank_drop_witness,
    point_values,
    solve_stationary,
    discriminate_from_data,
    verdict_report,
    Status,
    Verdict,
    _rationalize,
)
from .crn import CrnDocument, CrnSyntaxError, load_crn, row_labels, stationary_matrix
from .extrinsic import ExtrinsicSpec, certify_augmented, extrinsic_matrix, inherit_identifiability
from .fixtures import UnknownFixture, check_fixture
from .groebner import GroebnerOptions, Triviality, buchberger, is_trivial, reduce_basis
from .poly import PolyRing, TermOrder, VariableCatalog, format_polynomial, names_in, parse_polynomial
from .symmat import bareiss_rank

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_NEGATIVE = 0, 1, 2, 3
DEFAULT_SEED = 20240101


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    paths: list[str]
    fmt: str = "text"
    order: TermOrder | None = None
    budget_pairs: int = 1_000_000
    budget_seconds: float | None = None
    threads: int = 1
    seed: int = DEFAULT_SEED
    timing: bool = True
    nonneg_states: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.budget_pairs <= 0:
            raise CliError("--budget-pairs must be positive")
        if self.budget_seconds is not None and self.budget_seconds <= 0:
            raise CliError("--budget-seconds must be positive")
        if self.threads <= 0:
            raise CliError("--threads must be positive")

    def certify_options(self) -> CertifyOptions:
        return CertifyOptions(order=self.order or TermOrder.GREVLEX, max_pairs=self.budget_pairs,
                              max_seconds=self.budget_seconds, nonneg_states=self.nonneg_states)


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------

def _load(path: str) -> CrnDocument:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"cannot read {path}: no such file")
    return load_crn(p)


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise CliError(f"{what} must be comma-separated integers, got {text!r}") from None


def _rational_list(text: str, what: str) -> list[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise CliError(f"{what} must be comma-separated rationals, got {text!r}") from None


def _pair(text: str | None, doc: CrnDocument) -> tuple[int, int]:
    declared = [tuple(p) for p in doc.constraints.exactly_one]
    if text is None:
        if len(declared) != 1:
            raise CliError("give --pair i,j (the file does not declare exactly one exactly_one pair)")
        return declared[0]
    vals = _int_list(text, "--pair")
    if len(vals) != 2:
        raise CliError("--pair takes two rate indices")
    i, j = vals
    if (i, j) not in declared and (j, i) not in declared:
        raise CliError(f"rates k{i}, k{j} are not declared exactly_one in this network")
    return (i, j) if (i, j) in declared else (j, i)


def _extrinsic_spec(doc: CrnDocument) -> ExtrinsicSpec:
    if doc.extrinsic is None:
        raise CliError("the network has no extrinsic: block")
    return ExtrinsicSpec.from_decl(doc.extrinsic)


def _subset(text: str | None, e: ExtrinsicSpec) -> list[int] | None:
    if text is None:
        return None
    idx = [c - 1 for c in _int_list(text, "--subset")]
    if not idx or any(not 0 <= c < len(e.points) for c in idx) or len(set(idx)) != len(idx):
        raise CliError(f"--subset must list distinct support indices in 1..{len(e.points)}")
    return idx


def read_moments(text: str, species: list[str], omega: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Moments from CSV: a species header, then raw samples or a ``#moments`` block.

    Raw rows are concentrations X/Omega, so the LNA covariance is Omega times the sample covariance.
    A ``#moments`` block holds the mean row followed by n covariance rows, already on the LNA scale.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CliError("moments file is empty")
    header = [h.strip() for h in next(csv.reader([lines[0]]))]
    if header != species:
        raise CliError(f"moments header {header} does not match species {species}")
    n = len(species)
    body = lines[1:]

    def rows(block):
        out = []
        for ln in csv.reader(block):
            try:
                vals = [float(v) for v in ln]
            except ValueError:
                raise CliError(f"non-numeric moments row: {ln}") from None
            if len(vals) != n:
                raise CliError(f"moments row has {len(vals)} columns, expected {n}")
            out.append(vals)
        return np.array(out, dtype=float).reshape(-1, n)

    if body and body[0].lower().startswith("#moments"):
        M = rows(body[1:])
        if M.shape[0] != n + 1:
            raise CliError(f"#moments block needs 1 mean row and {n} covariance rows")
        return M[0], M[1:]
    S = rows([ln for ln in body if not ln.startswith("#")])
    if S.shape[0] < 2:
        raise CliError("need at least two sample rows to estimate a covariance")
    return S.mean(axis=0), omega * np.atleast_2d(np.cov(S, rowvar=False))


def parse_ideal_file(text: str, order: TermOrder | None = None) -> tuple[PolyRing, list]:
    """Ideal file: optional ``vars: a b c`` and ``order: lex|grlex|grevlex`` headers, one polynomial per line."""
    names: list[str] | None = None
    file_order = None
    polys_txt = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        low = line.lower()
        if low.startswith(("vars:", "variables:")):
            names = line.split(":", 1)[1].replace(",", " ").split()
            continue
        if low.startswith("order:"):
            try:
                file_order = TermOrder(line.split(":", 1)[1].strip().lower())
            except ValueError:
                raise CliError(f"line {lineno}: unknown term order {line.split(':', 1)[1].strip()!r}") from None
            continue
        polys_txt.append((lineno, line.rstrip(",")))
    if not polys_txt:
        raise CliError("ideal file contains no polynomials")
    if names is None:
        seen: dict[str, None] = {}
        for _, t in polys_txt:
            for v in names_in(t):
                seen.setdefault(v, None)
        names = list(seen) or ["z"]
    ring = PolyRing(VariableCatalog.from_names(names), order or file_order or TermOrder.GREVLEX)
    polys = []
    for lineno, t in polys_txt:
        try:
            polys.append(parse_polynomial(t, ring))
        except Exception as exc:  # noqa: BLE001 - re-raised with position
            raise CliError(f"line {lineno}: {exc}") from None
    return ring, polys


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _emit(cfg: RunConfig, payload: dict, text: str, out) -> None:
    if cfg.fmt == "json":
        out.write(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _verdict_text(v: Verdict, rep: dict) -> str:
    lines = []
    crn = rep.get("crn")
    if crn:
        lines.append(f"network: {crn['source']} (n={crn['n']}, r={crn['r']})")
    lines.append(f"criterion: {v.criterion}")
    if v.constraints:
        lines.append(f"constraints: {v.constraints}")
    lines.append(f"verdict: {v.status.value}")
    if v.reason:
        lines.append(f"reason: {v.reason}")
    if v.num_generators:
        lines.append(f"ideal: {v.num_generators} generators ({v.raw_generators} before dedup), {v.num_vars} variables")
    if v.stats is not None:
        s = v.stats
        lines.append(f"groebner: {s.pairs_processed} pairs, {s.reductions_to_zero} zero reductions, "
                     f"basis size {s.basis_size}, max degree {s.max_degree}")
    if v.witness is not None:
        w = v.witness.as_dict()
        lines.append(f"witness: k={w['k']} x={w['x']} P={w['P']} rank={w['rank']} null_vector={w['null_vector']}")
    if rep.get("extrinsic"):
        lines.append("extrinsic: " + json.dumps(rep["extrinsic"], sort_keys=True))
    for a in v.assumptions:
        lines.append(f"assumption: {a}")
    for note in v.notes:
        lines.append(f"note: {note}")
    if rep.get("timing_ms") is not None:
        lines.append(f"time: {rep['timing_ms']:.1f} ms")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_certify(cfg: RunConfig, out) -> int:
    doc = _load(cfg.paths[0])
    m = doc.model
    opts = cfg.certify_options()
    K = constraints_from_decl(doc.constraints, m.r)
    if cfg.extra.get("extrinsic"):
        e = _extrinsic_spec(doc)
        v = None
        subset = _subset(cfg.extra.get("subset"), e)
        # inheritance needs g(u) > 0 on U; check that before paying for the base certificate
        if (K.all_positive and e.strictly_positive() and subset is None
                and not cfg.extra.get("rre_only") and not cfg.extra.get("full")):
            v = inherit_identifiability(m, e, certify_identifiability(m, K, opts))
        if v is None:
            rre = True if cfg.extra.get("rre_only") else (False if cfg.extra.get("full") else None)
            v = certify_augmented(m, e, K, subset, rre, opts)
    else:
        v = certify_identifiability(m, K, opts)
        samples = cfg.extra.get("witness_samples") or 0
        if not v.certified and samples > 0:
            search = find_rank_drop_witness(m, samples=samples, seed=cfg.seed)
            if search.witness is not None:
                v.status, v.witness = Status.NOT_IDENTIFIABLE, search.witness
                v.reason = "exact rank-drop witness found"
            elif search.suspected:
                v.status = Status.SUSPECTED
                v.reason = f"{len(search.suspected)} numeric rank drop(s) failed exact re-verification"
                v.notes.append(json.dumps(search.suspected[0]))
    rep = verdict_report(v, m, timing=cfg.timing)
    _emit(cfg, rep, _verdict_text(v, rep), out)
    return v.exit_code


def cmd_discriminate(cfg: RunConfig, out) -> int:
    doc = _load(cfg.paths[0])
    m = doc.model
    i, j = _pair(cfg.extra.get("pair"), doc)
    data = cfg.extra.get("data")
    if data:
        p = Path(data)
        if not p.is_file():
            raise CliError(f"cannot read {data}: no such file")
        xhat, Phat = read_moments(p.read_text(), list(m.species), cfg.extra.get("omega", 1.0))
        try:
            res = discriminate_from_data(m, (i, j), xhat, Phat)
        except DegenerateData as exc:
            raise CliError(f"degenerate moments: {exc}") from None
        payload = {"tool_version": __version__, "crn": crn_summary(m), "pair": [i, j],
                   "model_1": f"k{j} = 0", "model_2": f"k{i} = 0", "c1": res.c1, "c2": res.c2,
                   "selected": res.selected, "k1": res.k1, "k2": res.k2}
        text = (f"pair: k{i}, k{j}\nmodel 1 (k{j} = 0): c1 = {res.c1:.6e}\n"
                f"model 2 (k{i} = 0): c2 = {res.c2:.6e}\nselected: model {res.selected}")
        _emit(cfg, payload, text, out)
        return EXIT_OK
    v = certify_discriminability(m, i, j, cfg.certify_options())
    rep = verdict_report(v, m, timing=cfg.timing)
    rep["pair"] = [i, j]
    text = _verdict_text(v, rep)
    text += f"\ndiscriminable: {'yes' if v.certified else 'not established'} (k{i} versus k{j})"
    _emit(cfg, rep, text, out)
    return v.exit_code


def cmd_matrix(cfg: RunConfig, out) -> int:
    doc = _load(cfg.paths[0])
    m = doc.model
    if cfg.extra.get("extrinsic"):
        e = _extrinsic_spec(doc)
        A = extrinsic_matrix(m, e, _subset(cfg.extra.get("subset"), e), bool(cfg.extra.get("rre_only")))
        nb = m.n if cfg.extra.get("rre_only") else len(row_labels(m.n))
        labels = [f"{lab}@{c + 1}" for c in range(A.rows // nb) for lab in row_labels(m.n)[:nb]]
    else:
        sm = stationary_matrix(m)
        A, labels = sm.A, sm.labels
    payload = {"shape": list(A.shape), "rows": labels, "columns": m.labels, "matrix": A.to_strings()}
    text = A.format_text(labels)
    code = EXIT_OK
    name = cfg.extra.get("check_fixture")
    if name:
        try:
            diff = check_fixture(A, name)
        except UnknownFixture as exc:
            raise CliError(str(exc.args[0])) from None
        payload["fixture"] = {"name": name, "equal": not diff,
                              "diff": [{"row": a, "col": b, "got": g, "expected": x} for a, b, g, x in diff]}
        if diff:
            text += f"\nfixture {name}: DIFF"
            for a, b, g, x in diff:
                text += f"\n  ({a + 1},{b + 1}): got {g}, expected {x}"
            code = EXIT_INCONCLUSIVE
        else:
            text += f"\nfixture {name}: equal"
    _emit(cfg, payload, text, out)
    return code


def cmd_groebner(cfg: RunConfig, out) -> int:
    p = Path(cfg.paths[0])
    if not p.is_file():
        raise CliError(f"cannot read {p}: no such file")
    ring, polys = parse_ideal_file(p.read_text(), cfg.order)
    gopts = GroebnerOptions(max_pairs=cfg.budget_pairs, max_seconds=cfg.budget_seconds)
    if cfg.extra.get("is_trivial"):
        res = is_trivial(polys, ring.order, gopts)
        answer = {Triviality.TRIVIAL: "yes", Triviality.NOT_TRIVIAL: "no"}.get(res.status, "unknown")
        payload = {"trivial": answer, "status": res.status.value, "reason": res.reason,
                   "stats": _stats(res.stats, cfg.timing)}
        _emit(cfg, payload, answer if not res.reason else f"{answer} ({res.reason})", out)
        return EXIT_OK if res.status is Triviality.TRIVIAL else EXIT_INCONCLUSIVE
    opts = GroebnerOptions(early_unit_abort=False, max_pairs=cfg.budget_pairs, max_seconds=cfg.budget_seconds)
    G = reduce_basis(buchberger(polys, ring.order, opts))
    basis = [format_polynomial(g) for g in G.polys]
    stats = _stats(G.stats, cfg.timing)
    payload = {"variables": list(ring.catalog.names), "order": ring.order.value, "basis": basis, "stats": stats}
    text = "\n".join(basis) + "\n# " + ", ".join(f"{k}={v}" for k, v in stats.items())
    _emit(cfg, payload, text, out)
    return EXIT_OK


def _stats(stats, timing: bool) -> dict:
    d = stats.as_dict() if stats is not None else {}
    if not timing:
        d.pop("wall_time", None)
    return d


def cmd_witness(cfg: RunConfig, out) -> int:
    doc = _load(cfg.paths[0])
    m = doc.model
    k = _rational_list(cfg.extra.get("k") or "", "--k")
    if len(k) != m.r:
        raise CliError(f"--k needs {m.r} values for this network, got {len(k)}")
    if any(v <= 0 for v in k):
        raise CliError("--k values must be strictly positive")
    try:
        sol = solve_stationary(m, k)
    except StationarySolveError as exc:
        out.write(f"stationary solve failed: {exc}\n")
        return EXIT_ERROR
    A = stationary_matrix(m).A
    xq = [_rationalize(v) for v in sol.x]
    Pq = [[_rationalize(v) for v in row] for row in sol.P]
    exact_rank = bareiss_rank(A.evaluate(point_values(m, xq, Pq)))
    w = exact_witness_at(m, k, xq, Pq, A)
    An = evaluate_matrix_float(A, point_values(m, sol.x, sol.P))
    sv = np.linalg.svd(An, compute_uv=False)
    num_rank = int(np.sum(sv > 1e-8 * max(sv[0], 1.0)))
    payload = {"tool_version": __version__, "crn": crn_summary(m), "k": [str(v) for v in k],
               "x": [str(v) for v in xq], "P": [[str(v) for v in row] for row in Pq],
               "x_float": sol.x.tolist(), "residual": sol.drift_residual, "rank": exact_rank,
               "numeric_rank": num_rank, "r": m.r, "witness": None}
    if w is not None:
        wd = w.as_dict()
        payload["witness"] = wd
        payload["verdict"] = Status.NOT_IDENTIFIABLE.value
        text = (f"witness (verified exactly): rank A = {w.rank} < r - 1 = {m.r - 1}\n"
                f"k = {wd['k']}\nx = {wd['x']}\nP = {wd['P']}\nnull vector independent of k: {wd['null_vector']}")
        code = EXIT_NEGATIVE
    elif num_rank < m.r - 1:
        payload["verdict"] = Status.SUSPECTED.value
        text = (f"suspected rank drop: numeric rank {num_rank} < {m.r - 1}, "
                f"but exact re-verification at the rationalized point gave rank {exact_rank}")
        code = EXIT_NEGATIVE
    else:
        payload["verdict"] = None
        text = f"no rank drop at this k (rank {exact_rank})"
        code = EXIT_INCONCLUSIVE
    _emit(cfg, payload, text, out)
    return code


COMMANDS = {"certify": cmd_certify, "discriminate": cmd_discriminate, "matrix": cmd_matrix,
            "groebner": cmd_groebner, "witness": cmd_witness}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _global_flags(sub: bool) -> argparse.ArgumentParser:
    # on subcommands the defaults are suppressed so flags given before the command survive
    d = (lambda v: argparse.SUPPRESS) if sub else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=["text", "json"], default=d("text"))
    p.add_argument("--order", choices=[o.value for o in TermOrder], default=d(None))
    p.add_argument("--budget-pairs", type=int, default=d(1_000_000))
    p.add_argument("--budget-seconds", type=float, default=d(None))
    p.add_argument("--threads", type=int, default=d(1))
    p.add_argument("--seed", type=int, default=d(DEFAULT_SEED))
    p.add_argument("--no-timing", action="store_true", default=d(False))
    p.add_argument("--nonneg-states", action="store_true", default=d(False))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crnid", parents=[_global_flags(False)],
                                     description="Certify stationary identifiability of reaction networks.")
    parser.add_argument("--version", action="version", version=f"crnid {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    g = _global_flags(True)

    p = subs.add_parser("certify", parents=[g], help="certify identifiability of a network")
    p.add_argument("file")
    p.add_argument("--extrinsic", action="store_true", help="certify the reporter-augmented extrinsic network")
    p.add_argument("--rre-only", action="store_true", help="use only the drift rows per component")
    p.add_argument("--full", action="store_true", help="use all stationary rows per component")
    p.add_argument("--subset", help="1-based support indices, e.g. 1,2,3")
    p.add_argument("--witness-samples", type=int, default=0,
                   help="if not certified, search this many seeded rate vectors for a rank-drop witness")

    p = subs.add_parser("discriminate", parents=[g], help="decide between two exactly-one models")
    p.add_argument("file")
    p.add_argument("--pair", help="rate indices i,j declared exactly_one")
    p.add_argument("--data", help="CSV of samples or a #moments block")
    p.add_argument("--omega", type=float, default=1.0, help="system size used to scale sample covariances")

    p = subs.add_parser("matrix", parents=[g], help="print the stationary matrix A(x,P)")
    p.add_argument("file")
    p.add_argument("--extrinsic", action="store_true")
    p.add_argument("--rre-only", action="store_true")
    p.add_argument("--subset")
    p.add_argument("--check-fixture", help="compare against an embedded reference matrix")

    p = subs.add_parser("groebner", parents=[g], help="reduced Groebner basis of an ideal file")
    p.add_argument("file")
    p.add_argument("--is-trivial", action="store_true")

    p = subs.add_parser("witness", parents=[g], help="check for an exact rank drop at given rates")
    p.add_argument("file")
    p.add_argument("--k", required=True, help="comma-separated positive rationals")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    extra = {k: v for k, v in vars(ns).items()
             if k not in {"command", "file", "format", "order", "budget_pairs", "budget_seconds", "threads",
                          "seed", "no_timing", "nonneg_states"}}
    return RunConfig(command=ns.command, paths=[ns.file], fmt=ns.format,
                     order=TermOrder(ns.order) if ns.order else None, budget_pairs=ns.budget_pairs,
                     budget_seconds=ns.budget_seconds, threads=ns.threads, seed=ns.seed,
                     timing=not ns.no_timing, nonneg_states=ns.nonneg_states, extra=extra)


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg, out)
    except (CliError, CrnSyntaxError, ValueError, OSError) as exc:
        err.write(f"crnid {ns.command}: error: {exc}\n")
        return EXIT_ERROR


def run(argv: list[str]) -> tuple[int, str, str]:
    """Run the CLI in-process and capture (exit code, stdout, stderr)."""
    o, e = io.StringIO(), io.StringIO()
    code = main(argv, o, e)
    return code, o.getvalue(), e.getvalue()
