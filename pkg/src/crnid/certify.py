"""Identifiability and discriminability certificates, rank-drop witnesses, and data-driven selection."""
from __future__ import annotations

import enum
import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .crn import ConstraintDecl, CrnModel, drift, stationary_matrix, stationary_residuals
from .groebner import GroebnerBasis, GroebnerOptions, GroebnerStats, IdealGenerators, Triviality, is_trivial
from .poly import (
    Polynomial,
    PolyRing,
    Role,
    TermOrder,
    VariableCatalog,
    format_polynomial,
    partial_derivative,
    substitute,
)
from .symmat import PolyMatrix, bareiss_rank, canonical_key, count_minors, minors, nullspace

# criterion names recorded in reports
CRITERION_POSITIVE = "identifiability_positive_rates"
CRITERION_GENERAL = "identifiability_general_rates"
CRITERION_DISCRIMINATION = "discriminability_exactly_one"

ASSUMPTION_EQUILIBRIUM = "unique_stable_equilibrium"
ASSUMPTION_CONE = "cone_disjointness_exactly_one"


# ---------------------------------------------------------------------------
# constraint sets
# ---------------------------------------------------------------------------

STRICT, NONNEG, ZERO, PAIR = "strict", "nonneg", "zero", "pair"


@dataclass(frozen=True)
class ConstraintSet:
    """A semialgebraic rate set K together with its lift to slack variables y.

    ``kinds[i]`` describes rate i+1: ``strict`` (k > 0, lift k y^2 - 1),
    ``nonneg`` (k >= 0, lift k - y^2), ``zero`` (k = 0, lift k) or ``pair``
    (member of an exactly-one pair; k - y^2 plus the pair lifts).
    """

    r: int
    kinds: tuple[str, ...]
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.r < 1 or len(self.kinds) != self.r:
            raise ValueError("one constraint kind per rate is required")
        bad = set(self.kinds) - {STRICT, NONNEG, ZERO, PAIR}
        if bad:
            raise ValueError(f"unknown constraint kinds {bad}")
        members = [i for p in self.pairs for i in p]
        if len(set(members)) != len(members):
            raise ValueError("a rate appears in two exactly-one pairs")
        for i in range(1, self.r + 1):
            if (self.kinds[i - 1] == PAIR) != (i in members):
                raise ValueError(f"rate k{i}: pair membership and kind disagree")

    @property
    def all_positive(self) -> bool:
        return all(k == STRICT for k in self.kinds)

    @property
    def has_pair(self) -> bool:
        return bool(self.pairs)

    @property
    def rate_names(self) -> list[str]:
        return [f"k{i}" for i in range(1, self.r + 1)]

    @property
    def slack_names(self) -> list[str]:
        names = [f"y{i}" for i, k in enumerate(self.kinds, start=1) if k != ZERO]
        names += [f"y{self.r + t}" for t in range(1, len(self.pairs) + 1)]
        return names

    @property
    def num_slacks(self) -> int:
        return len(self.slack_names)

    def describe(self) -> str:
        parts = []
        for i, k in enumerate(self.kinds, start=1):
            if k == STRICT:
                parts.append(f"k{i} > 0")
            elif k == NONNEG:
                parts.append(f"k{i} >= 0")
            elif k == ZERO:
                parts.append(f"k{i} = 0")
        parts += [f"exactly_one(k{i}, k{j})" for i, j in self.pairs]
        return ", ".join(parts)

    def ring(self, order: TermOrder = TermOrder.GREVLEX) -> PolyRing:
        return PolyRing(VariableCatalog.from_names(self.rate_names + self.slack_names), order)

    def polynomials(self, ring: PolyRing | None = None) -> list[Polynomial]:
        ring = ring or self.ring()
        out = []
        for i, kind in enumerate(self.kinds, start=1):
            k = ring.var(f"k{i}")
            if kind == STRICT:
                out.append(k * ring.var(f"y{i}") ** 2 - 1)
            elif kind in (NONNEG, PAIR):
                out.append(k - ring.var(f"y{i}") ** 2)
            else:
                out.append(k)
        for t, (i, j) in enumerate(self.pairs, start=1):
            ki, kj = ring.var(f"k{i}"), ring.var(f"k{j}")
            out.append(ki * kj)
            out.append((ki + kj) * ring.var(f"y{self.r + t}") ** 2 - 1)
        return out

    def contains(self, k: Sequence) -> bool:
        if len(k) != self.r:
            raise ValueError("rate vector has the wrong length")
        for v, kind in zip(k, self.kinds):
            if kind == STRICT and not v > 0:
                return False
            if kind in (NONNEG, PAIR) and v < 0:
                return False
            if kind == ZERO and v != 0:
                return False
        for i, j in self.pairs:
            a, b = k[i - 1], k[j - 1]
            if a * b != 0 or not a + b > 0:
                return False
        return True

    def lift_squares(self, k: Sequence) -> dict[str, Fraction] | None:
        """Values of y^2 that put ``(k, y)`` on the lifted variety, or None when k is outside K."""
        if not self.contains(k):
            return None
        k = [Fraction(v) for v in k]
        out = {}
        for i, kind in enumerate(self.kinds, start=1):
            if kind == STRICT:
                out[f"y{i}"] = 1 / k[i - 1]
            elif kind in (NONNEG, PAIR):
                out[f"y{i}"] = k[i - 1]
        for t, (i, j) in enumerate(self.pairs, start=1):
            out[f"y{self.r + t}"] = 1 / (k[i - 1] + k[j - 1])
        return out


def positivity_constraints(r: int) -> ConstraintSet:
    return ConstraintSet(r, (STRICT,) * r)


def mixed_constraints(spec: Sequence[tuple[str, int]], r: int | None = None) -> ConstraintSet:
    """From entries ``("strict", i)`` / ``("nonneg", i)`` with 1-based indices covering 1..r exactly once."""
    idx = [i for _, i in spec]
    r = r if r is not None else len(spec)
    if sorted(idx) != list(range(1, r + 1)):
        raise ValueError("every rate index must be constrained exactly once")
    kinds = [None] * r
    for kind, i in spec:
        if kind not in (STRICT, NONNEG):
            raise ValueError(f"unsupported constraint kind {kind!r}")
        kinds[i - 1] = kind
    return ConstraintSet(r, tuple(kinds))


def exactly_one_constraints(r: int, i: int, j: int) -> tuple[ConstraintSet, ConstraintSet, ConstraintSet]:
    """(K1, K2, K1 u K2) where K1 has k_j = 0, K2 has k_i = 0, all other rates positive."""
    if i == j or not (1 <= i <= r and 1 <= j <= r):
        raise ValueError(f"invalid exactly-one pair ({i}, {j}) for {r} rates")
    base = [STRICT] * r
    k1, k2, ku = list(base), list(base), list(base)
    k1[j - 1] = ZERO
    k2[i - 1] = ZERO
    ku[i - 1] = ku[j - 1] = PAIR
    return (ConstraintSet(r, tuple(k1)), ConstraintSet(r, tuple(k2)),
            ConstraintSet(r, tuple(ku), ((i, j),)))


def constraints_from_decl(decl: ConstraintDecl, r: int) -> ConstraintSet:
    """Rates not mentioned in the declaration default to strictly positive."""
    kinds = [STRICT] * r
    seen: set[int] = set()
    for i in decl.nonneg:
        kinds[i - 1] = NONNEG
    for i in decl.strict:
        kinds[i - 1] = STRICT
    for i, j in decl.exactly_one:
        for t in (i, j):
            if t in seen:
                raise ValueError(f"rate k{t} is in two exactly-one pairs")
            seen.add(t)
            kinds[t - 1] = PAIR
    return ConstraintSet(r, tuple(kinds), tuple(decl.exactly_one))


# ---------------------------------------------------------------------------
# ideal assembly
# ---------------------------------------------------------------------------

@dataclass
class CertifyOptions:
    order: TermOrder = TermOrder.GREVLEX
    max_pairs: int = 1_000_000
    max_degree: int = 60
    max_seconds: float | None = None
    batch_size: int = 32
    selection: str = "normal"
    priority: str = "minors_first"  # or "lifts_first"
    nonneg_states: bool = False
    track_cofactors: bool = False

    def groebner_options(self) -> GroebnerOptions:
        return GroebnerOptions(early_unit_abort=True, max_pairs=self.max_pairs, max_degree=self.max_degree,
                               max_seconds=self.max_seconds, selection=self.selection,
                               batch_size=self.batch_size, track_cofactors=self.track_cofactors)


@dataclass
class CertificationIdeal:
    """Generators of the certification ideal, grouped for batched feeding."""

    ring: PolyRing
    lifts: list[Polynomial]
    rows: list[Polynomial]
    minors: list[Polynomial]
    raw_count: int
    priority: str = "minors_first"

    def groups(self) -> list[list[Polynomial]]:
        if self.priority == "lifts_first":
            return [self.lifts, self.rows, self.minors]
        if self.priority == "minors_first":
            return [self.minors, self.rows, self.lifts]
        raise ValueError(f"unknown priority {self.priority!r}")

    def batches(self) -> list[list[Polynomial]]:
        """Groups in priority order with duplicates (up to scale) removed globally."""
        seen: set = set()
        out = []
        for g in self.groups():
            grp = []
            for p in g:
                key = canonical_key(p)
                if p and key not in seen:
                    seen.add(key)
                    grp.append(p)
            out.append(grp)
        return out

    def generators(self) -> IdealGenerators:
        return IdealGenerators([p for g in self.batches() for p in g], self.ring)

    @property
    def num_generators(self) -> int:
        return len(self.generators())

    @property
    def num_vars(self) -> int:
        return self.ring.nvars


def certification_ring(base: PolyRing, K: ConstraintSet, state_names: Sequence[str] = (),
                       nonneg_states: bool = False, order: TermOrder = TermOrder.GREVLEX) -> PolyRing:
    names = list(base.catalog.names)
    roles = list(base.catalog.roles)
    for k in K.rate_names:
        if k not in names:
            names.append(k)
            roles.append(Role.RATE)
    for y in K.slack_names:
        names.append(y)
        roles.append(Role.SLACK)
    if nonneg_states:
        for j in range(len(state_names)):
            names.append(f"w{j + 1}")
            roles.append(Role.SLACK)
    return PolyRing(VariableCatalog(tuple(names), tuple(roles)), TermOrder(order))


def assemble_ideal(A: PolyMatrix, K: ConstraintSet, state_names: Sequence[str] = (),
                   opts: CertifyOptions | None = None) -> CertificationIdeal:
    """Lifts h, the rows of A k, and the (r-1)-minors of A on one ring."""
    opts = opts or CertifyOptions()
    r = A.cols
    if K.r != r:
        raise ValueError(f"constraint set covers {K.r} rates but the matrix has {r} columns")
    ring = certification_ring(A.ring, K, state_names, opts.nonneg_states, opts.order)
    Ae = A.with_ring(ring)
    ks = [ring.var(k) for k in K.rate_names]
    lifts = [p.embed(ring) for p in K.polynomials()]
    if opts.nonneg_states:
        lifts += [ring.var(x) - ring.var(f"w{j + 1}") ** 2 for j, x in enumerate(state_names)]
    rows = [p for p in Ae.matvec(ks) if p]
    if r >= 2:
        mins = minors(Ae, r - 1)
        raw_minors = count_minors(A.rows, r, r - 1)
    else:
        # (r-1) = 0: the empty minor is 1, so rank < 0 is impossible
        mins = [ring.one()]
        raw_minors = 1
    mins.sort(key=lambda p: p.total_degree())
    raw = len(lifts) + A.rows + raw_minors
    return CertificationIdeal(ring, lifts, rows, mins, raw, opts.priority)


def identifiability_ideal(m: CrnModel | PolyMatrix, K: ConstraintSet,
                          opts: CertifyOptions | None = None) -> CertificationIdeal:
    if isinstance(m, CrnModel):
        A = stationary_matrix(m).A
        states = m.state_names()
    else:
        A = m
        states = A.ring.catalog.of_role(Role.STATE)
    return assemble_ideal(A, K, states, opts)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

class Status(str, enum.Enum):
    CERTIFIED = "certified"
    INCONCLUSIVE = "inconclusive"
    NOT_IDENTIFIABLE = "not_identifiable"
    SUSPECTED = "suspected"


EXIT_CODES = {Status.CERTIFIED: 0, Status.INCONCLUSIVE: 2, Status.NOT_IDENTIFIABLE: 3, Status.SUSPECTED: 3}


@dataclass
class Witness:
    """An exact point where A(x, P) k = 0 and rank A(x, P) < r - 1."""

    k: list[Fraction]
    x: list[Fraction]
    P: list[list[Fraction]]
    rank: int
    null_vector: list[Fraction]
    verified: bool = True

    def as_dict(self) -> dict:
        s = lambda v: str(Fraction(v))
        return {"k": [s(v) for v in self.k], "x": [s(v) for v in self.x],
                "P": [[s(v) for v in row] for row in self.P], "rank": self.rank,
                "null_vector": [s(v) for v in self.null_vector]}


@dataclass
class Verdict:
    status: Status
    criterion: str
    basis: GroebnerBasis | None = None
    stats: GroebnerStats | None = None
    witness: Witness | None = None
    reason: str = ""
    num_generators: int = 0
    raw_generators: int = 0
    num_vars: int = 0
    timing_ms: float = 0.0
    assumptions: list[str] = field(default_factory=lambda: [ASSUMPTION_EQUILIBRIUM])
    constraints: str = ""
    extrinsic: dict | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def _run_ideal(ideal: CertificationIdeal, opts: CertifyOptions, criterion: str, constraints: str) -> Verdict:
    t0 = time.perf_counter()
    # one priority-ordered list, cut into fixed-size batches regardless of group boundaries
    res = is_trivial(ideal.generators(), opts.order, opts.groebner_options())
    ms = (time.perf_counter() - t0) * 1000
    common = dict(criterion=criterion, stats=res.stats, num_generators=ideal.num_generators,
                  raw_generators=ideal.raw_count, num_vars=ideal.num_vars, timing_ms=ms,
                  constraints=constraints)
    if res.status is Triviality.TRIVIAL:
        return Verdict(Status.CERTIFIED, basis=res.basis, reason="reduced Groebner basis is {1}", **common)
    if res.status is Triviality.BUDGET_EXHAUSTED:
        return Verdict(Status.INCONCLUSIVE, reason=f"budget exhausted: {res.reason}", **common)
    return Verdict(Status.INCONCLUSIVE, basis=res.basis,
                   reason=f"reduced Groebner basis has {len(res.basis)} elements, not {{1}}", **common)


def certify_identifiability(m: CrnModel, K: ConstraintSet | None = None,
                            opts: CertifyOptions | None = None) -> Verdict:
    """Certified iff the certification ideal is the whole ring; never claims non-identifiability."""
    opts = opts or CertifyOptions()
    K = K or positivity_constraints(m.r)
    ideal = identifiability_ideal(m, K, opts)
    crit = CRITERION_POSITIVE if K.all_positive else CRITERION_GENERAL
    v = _run_ideal(ideal, opts, crit, K.describe())
    if opts.nonneg_states:
        v.assumptions.append("nonnegative_states_lifted")
    return v


def certify_discriminability(m: CrnModel, i: int, j: int, opts: CertifyOptions | None = None) -> Verdict:
    """Identifiability over the exactly-one union lift; certified implies the two models are discriminable."""
    _, _, Ku = exactly_one_constraints(m.r, i, j)
    v = certify_identifiability(m, Ku, opts)
    v.criterion = CRITERION_DISCRIMINATION
    v.assumptions.append(ASSUMPTION_CONE)
    v.notes.append(f"k{i} = 0 versus k{i} > 0 separates the two rate cones")
    return v


# ---------------------------------------------------------------------------
# numerics: stationary solution
# ---------------------------------------------------------------------------

class StationarySolveError(RuntimeError):
    pass


class _Compiled:
    """Float evaluation of a polynomial at a full-catalog vector."""

    def __init__(self, p: Polynomial):
        dec = p.ring.codec.decode
        items = list(p.terms.items())
        self.coeffs = np.array([float(c) for _, c in items]) if items else np.zeros(0)
        self.exps = (np.array([dec(k) for k, _ in items], dtype=float) if items
                     else np.zeros((0, p.ring.nvars)))

    def __call__(self, v: np.ndarray) -> float:
        if not len(self.coeffs):
            return 0.0
        return float(np.prod(np.power(v, self.exps), axis=1) @ self.coeffs)


@dataclass
class StationarySolution:
    x: np.ndarray
    P: np.ndarray
    drift_residual: float
    lyapunov_residual: float
    iterations: int


def _rate_values(m: CrnModel, k: Sequence, strict: bool) -> dict[str, Fraction]:
    if len(k) != m.r:
        raise ValueError(f"expected {m.r} rate constants, got {len(k)}")
    vals = [Fraction(v) for v in k]
    if strict and any(v <= 0 for v in vals):
        raise ValueError("rate constants must be strictly positive")
    if any(v < 0 for v in vals):
        raise ValueError("rate constants must be nonnegative")
    return dict(zip(m.rate_names(), vals))


def solve_stationary(m: CrnModel, k: Sequence, tol: float = 1e-10, max_iter: int = 100,
                     max_halvings: int = 30, strict: bool = True) -> StationarySolution:
    """Damped Newton for f(x; k) = 0 from x = 1, then the linear Lyapunov system for P."""
    ring = m.default_ring()
    kv = _rate_values(m, k, strict)
    xs = m.state_names()
    f = [substitute(p, kv) for p in drift(m, ring)]
    Fc = [_Compiled(p) for p in f]
    Jc = [[_Compiled(partial_derivative(p, x)) for x in xs] for p in f]
    xi = [ring.catalog.index(x) for x in xs]
    v = np.zeros(ring.nvars)

    def F(x):
        v[xi] = x
        return np.array([c(v) for c in Fc])

    def J(x):
        v[xi] = x
        return np.array([[c(v) for c in row] for row in Jc])

    x = np.ones(m.n)
    Fx = F(x)
    it = 0
    while np.linalg.norm(Fx) > tol:
        if it >= max_iter:
            raise StationarySolveError(f"Newton did not converge in {max_iter} iterations")
        try:
            dx = np.linalg.solve(J(x), -Fx)
        except np.linalg.LinAlgError:
            raise StationarySolveError("singular Jacobian during Newton iteration") from None
        t, base = 1.0, np.linalg.norm(Fx)
        for _ in range(max_halvings):
            Fn = F(x + t * dx)
            if np.linalg.norm(Fn) < base:
                break
            t /= 2
        x = x + t * dx
        Fx = F(x)
        it += 1
    if np.any(x < -tol):
        raise StationarySolveError(f"equilibrium has a negative component: {x.tolist()}")
    x = np.maximum(x, 0.0)
    try:
        if abs(np.linalg.det(J(x))) < 1e-14:
            raise StationarySolveError("Jacobian is singular at the equilibrium")
    except np.linalg.LinAlgError:
        raise StationarySolveError("Jacobian is singular at the equilibrium") from None

    # Lyapunov rows are affine in the p-variables once x and k are fixed
    ps = m.covariance_names()
    L = [substitute(p, kv) for p in stationary_residuals(m, ring)[m.n:]]
    v[:] = 0
    v[xi] = x
    M = np.array([[_Compiled(partial_derivative(p, q))(v) for q in ps] for p in L])
    c = np.array([_Compiled(p)(v) for p in L])
    try:
        pv = np.linalg.solve(M, -c)
    except np.linalg.LinAlgError:
        raise StationarySolveError("Lyapunov system is singular") from None
    P = np.zeros((m.n, m.n))
    t = 0
    for a in range(m.n):
        for b in range(a, m.n):
            P[a, b] = P[b, a] = pv[t]
            t += 1
    lres = float(np.linalg.norm(M @ pv + c))
    return StationarySolution(x, P, float(np.linalg.norm(Fx)), lres, it)


def point_values(m: CrnModel, x: Sequence, P) -> dict:
    vals = {name: x[j] for j, name in enumerate(m.state_names())}
    t = 0
    names = m.covariance_names()
    for a in range(m.n):
        for b in range(a, m.n):
            vals[names[t]] = P[a][b]
            t += 1
    return vals


def evaluate_matrix_float(A: PolyMatrix, point: dict) -> np.ndarray:
    v = np.zeros(A.ring.nvars)
    for name, val in point.items():
        if name in A.ring.catalog:
            v[A.ring.catalog.index(name)] = float(val)
    return np.array([[_Compiled(e)(v) for e in row] for row in A.entries])


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

def _rationalize(v: float, max_den: int = 10**6) -> Fraction:
    return Fraction(v).limit_denominator(max_den)


@dataclass
class WitnessSearch:
    witness: Witness | None
    suspected: list[dict] = field(default_factory=list)
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def verdict_status(self) -> Status | None:
        if self.witness is not None:
            return Status.NOT_IDENTIFIABLE
        if self.suspected:
            return Status.SUSPECTED
        return None


def exact_witness_at(m: CrnModel, k: Sequence, x: Sequence, P, A: PolyMatrix | None = None) -> Witness | None:
    """Exactly verified witness at a rational point, or None."""
    A = A or stationary_matrix(m).A
    kq = [Fraction(v) for v in k]
    if any(v <= 0 for v in kq):
        return None
    xq = [Fraction(v) for v in x]
    Pq = [[Fraction(v) for v in row] for row in P]
    vals = point_values(m, xq, Pq)
    Aq = A.evaluate(vals)
    if any(sum(a * b for a, b in zip(row, kq)) != 0 for row in Aq):
        return None
    rank = bareiss_rank(Aq)
    if rank >= m.r - 1:
        return None
    kernel = nullspace(Aq)
    second = None
    for vec in kernel:
        if bareiss_rank([vec, kq]) == 2:
            second = vec
            break
    if second is None:
        return None
    return Witness(kq, xq, Pq, rank, second)


def find_rank_drop_witness(m: CrnModel, candidates: Iterable[Sequence] | None = None, samples: int = 20,
                           seed: int = 0, max_den: int = 10**6, tol: float = 1e-10) -> WitnessSearch:
    """Search rate vectors for an exact rank drop of A at the stationary point.

    Without explicit candidates, ``samples`` vectors are drawn (seeded) from the grid {1/2, 1, 2}^r.
    Numerical drops that fail exact re-verification are reported as suspected only.
    """
    A = stationary_matrix(m).A
    if candidates is None:
        rng = random.Random(seed)
        grid = [Fraction(1, 2), Fraction(1), Fraction(2)]
        candidates = [[rng.choice(grid) for _ in range(m.r)] for _ in range(samples)]
    out = WitnessSearch(None)
    for k in candidates:
        kq = [Fraction(v) for v in k]
        if len(kq) != m.r:
            raise ValueError(f"expected {m.r} rate constants, got {len(kq)}")
        if any(v <= 0 for v in kq):
            raise ValueError("witness search needs strictly positive rate constants")
        out.checked += 1
        try:
            sol = solve_stationary(m, kq, tol=tol)
        except StationarySolveError as exc:
            out.failures.append(str(exc))
            continue
        xq = [_rationalize(v, max_den) for v in sol.x]
        Pq = [[_rationalize(v, max_den) for v in row] for row in sol.P]
        w = exact_witness_at(m, kq, xq, Pq, A)
        if w is not None:
            out.witness = w
            return out
        An = evaluate_matrix_float(A, point_values(m, sol.x, sol.P))
        s = np.linalg.svd(An, compute_uv=False)
        num_rank = int(np.sum(s > 1e-8 * max(s[0], 1.0)))
        if num_rank < m.r - 1:
            out.suspected.append({"k": [str(v) for v in kq], "x": sol.x.tolist(), "numeric_rank": num_rank})
    return out


# ---------------------------------------------------------------------------
# data-driven discrimination
# ---------------------------------------------------------------------------

class DegenerateData(ValueError):
    pass


@dataclass
class Discrimination:
    c1: float
    c2: float
    selected: int
    k1: list[float]
    k2: list[float]


def _min_on_orthant_sphere(A: np.ndarray, cols: list[int], r: int) -> tuple[float, np.ndarray]:
    """min ||A k||^2 over k >= 0, ||k|| = 1, supp(k) within ``cols``.

    Every minimizer restricted to its support is a positive eigenvector of the
    support's Gram matrix, so enumerating supports and eigenvectors is exact.
    """
    if len(cols) > 20:
        raise ValueError("exhaustive support search is limited to 20 free rates")
    best, arg = np.inf, None
    for size in range(1, len(cols) + 1):
        for S in itertools.combinations(cols, size):
            As = A[:, S]
            w, V = np.linalg.eigh(As.T @ As)
            for lam, vec in zip(w, V.T):
                if np.all(vec > 1e-12) or np.all(vec < -1e-12):
                    val = float(np.linalg.norm(As @ vec) ** 2)
                    if val < best:
                        k = np.zeros(r)
                        k[list(S)] = np.abs(vec)
                        best, arg = val, k
    return best, arg


def discriminate_from_data(m: CrnModel, pair: tuple[int, int], xhat: Sequence[float], Phat) -> Discrimination:
    """c_l = min ||A(xhat, Phat) k||^2 over the closure of K_l with ||k|| = 1; model 1 has k_j = 0."""
    i, j = pair
    xhat = np.asarray(xhat, dtype=float)
    Phat = np.asarray(Phat, dtype=float)
    if xhat.shape != (m.n,) or Phat.shape != (m.n, m.n):
        raise ValueError("moment dimensions do not match the species count")
    if not (np.all(np.isfinite(xhat)) and np.all(np.isfinite(Phat))):
        raise DegenerateData("moments must be finite")
    if not np.allclose(Phat, Phat.T):
        raise ValueError("covariance estimate is not symmetric")
    if not np.any(xhat) and not np.any(Phat):
        raise DegenerateData("all moments are zero")
    A = stationary_matrix(m).A
    An = evaluate_matrix_float(A, point_values(m, xhat, Phat))
    if not np.any(An):
        raise DegenerateData("A(x, P) vanishes at the supplied moments")
    all_cols = list(range(m.r))
    c1, k1 = _min_on_orthant_sphere(An, [c for c in all_cols if c != j - 1], m.r)
    c2, k2 = _min_on_orthant_sphere(An, [c for c in all_cols if c != i - 1], m.r)
    return Discrimination(c1, c2, 1 if c1 <= c2 else 2, k1.tolist(), k2.tolist())


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def crn_summary(m: CrnModel) -> dict:
    return {"species": list(m.species), "rates": m.labels, "n": m.n, "r": m.r, "source": m.source}


def verdict_report(v: Verdict, m: CrnModel | None = None, timing: bool = True, basis: bool = True) -> dict:
    stats = v.stats.as_dict() if v.stats else {}
    stats.pop("wall_time", None)
    if basis and v.basis is not None:
        stats["reduced_basis"] = [format_polynomial(p) for p in v.basis.polys]
    rep = {
        "tool_version": __version__,
        "crn": crn_summary(m) if m is not None else None,
        "theorem": v.criterion,
        "verdict": v.status.value,
        "ideal": {"num_generators": v.num_generators, "num_vars": v.num_vars, "raw_generators": v.raw_generators},
        "basis_stats": stats,
        "witness": v.witness.as_dict() if v.witness else None,
        "assumptions": list(v.assumptions),
        "constraints": v.constraints,
        "reason": v.reason,
        "timing_ms": round(v.timing_ms, 3) if timing else None,
    }
    if v.extrinsic is not None:
        rep["extrinsic"] = v.extrinsic
    if v.notes:
        rep["notes"] = list(v.notes)
    return rep
