"""Extrinsic noise: stacked component matrices, reporter augmentation, and their certificates."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .certify import (
    CertifyOptions,
    ConstraintSet,
    Status,
    Verdict,
    _run_ideal,
    assemble_ideal,
    positivity_constraints,
    CRITERION_POSITIVE,
)
from .crn import CrnModel, ExtrinsicDecl, Reaction, stationary_matrix
from .poly import Polynomial, PolyRing, Role, TermOrder, VariableCatalog, evaluate, parse_polynomial
from .symmat import PolyMatrix

CRITERION_FULL = "extrinsic_augmented_full"
CRITERION_RRE = "extrinsic_augmented_rre"
CRITERION_INHERITED = "extrinsic_inherited"

RRE_VARIABLE_THRESHOLD = 20


@dataclass(frozen=True)
class ExtrinsicSpec:
    """Finite extrinsic-noise support U with weights, rate modulation g(u), and reporter constants."""

    dim: int
    points: tuple[tuple[Fraction, ...], ...]
    weights: tuple[Fraction, ...]
    g: tuple[str, ...]
    alpha: tuple[Fraction, ...] = ()
    gamma: Fraction = Fraction(1)
    name: str = "u"

    def __post_init__(self):
        pts = tuple(tuple(Fraction(v) for v in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        object.__setattr__(self, "g", tuple(str(s) for s in self.g))
        alpha = tuple(Fraction(a) for a in self.alpha) or (Fraction(1),) * self.dim
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if self.dim < 0:
            raise ValueError("negative noise dimension")
        if not pts:
            raise ValueError("the support U must be nonempty")
        if any(len(p) != self.dim for p in pts):
            raise ValueError("support point has the wrong dimension")
        if len(set(pts)) != len(pts):
            raise ValueError("support points must be distinct")
        if len(self.weights) != len(pts) or any(w <= 0 for w in self.weights):
            raise ValueError("one positive weight per support point is required")
        if sum(self.weights) != 1:
            raise ValueError("weights must sum to 1")
        if len(alpha) != self.dim or any(a <= 0 for a in alpha):
            raise ValueError("reporter alphas must be positive, one per noise coordinate")
        if self.gamma <= 0:
            raise ValueError("reporter gamma must be positive")
        for c in range(len(pts)):
            vals = self.g_at(c)
            if any(v < 0 for v in vals):
                raise ValueError(f"g is negative at support point {c + 1}")

    @property
    def u_names(self) -> list[str]:
        return [f"{self.name}{i}" for i in range(1, self.dim + 1)]

    def u_ring(self) -> PolyRing:
        return PolyRing(VariableCatalog.from_names(self.u_names or ["_"]))

    def g_polys(self) -> list[Polynomial]:
        ring = self.u_ring()
        return [parse_polynomial(s, ring) for s in self.g]

    def g_at(self, c: int) -> list[Fraction]:
        pt = dict(zip(self.u_names, self.points[c]))
        return [Fraction(evaluate(p, pt)) for p in self.g_polys()]

    def strictly_positive(self) -> bool:
        return all(v > 0 for c in range(len(self.points)) for v in self.g_at(c))

    def restricted(self, subset: Sequence[int]) -> "ExtrinsicSpec":
        """The spec on a sub-support, with weights renormalized."""
        pts = [self.points[i] for i in subset]
        ws = [self.weights[i] for i in subset]
        tot = sum(ws)
        return ExtrinsicSpec(self.dim, tuple(pts), tuple(w / tot for w in ws), self.g, self.alpha,
                             self.gamma, self.name)

    @classmethod
    def from_decl(cls, decl: ExtrinsicDecl) -> "ExtrinsicSpec":
        n = len(decl.points)
        weights = decl.weights or [Fraction(1, n)] * n
        return cls(decl.dim, tuple(decl.points), tuple(weights), tuple(decl.g), tuple(decl.alpha or ()),
                   decl.gamma, decl.name)

    def summary(self) -> dict:
        return {"dim": self.dim, "U": [[str(v) for v in p] for p in self.points],
                "rho": [str(w) for w in self.weights], "g": list(self.g),
                "alpha": [str(a) for a in self.alpha], "gamma": str(self.gamma)}


def check_spec(m: CrnModel, e: ExtrinsicSpec) -> None:
    if len(e.g) != m.r:
        raise ValueError(f"g has {len(e.g)} entries but the network has {m.r} reactions")


@dataclass(frozen=True)
class AugmentedCrn:
    """Base network plus reporters Z_i with 0 -> Z_i at rate u_i alpha_i and Z_i -> 0 at rate gamma."""

    model: CrnModel
    base: CrnModel
    known_rates: dict = field(default_factory=dict)

    @property
    def inferred_rates(self) -> list[str]:
        return self.base.labels


def augment(m: CrnModel, e: ExtrinsicSpec, reporter_prefix: str = "Z") -> AugmentedCrn:
    check_spec(m, e)
    if e.dim == 0:
        return AugmentedCrn(m, m, {})
    names = [f"{reporter_prefix}{i}" for i in range(1, e.dim + 1)]
    clash = set(names) & set(m.species)
    if clash:
        raise ValueError(f"reporter species collide with existing species: {sorted(clash)}")
    n0, s = m.n, e.dim
    species = m.species + tuple(names)
    pad = (0,) * s
    reactions = [Reaction(rx.reactants + pad, rx.products + pad, rx.label) for rx in m.reactions]
    known = {}
    labels = set(m.labels)
    for i in range(s):
        unit = tuple(1 if t == n0 + i else 0 for t in range(n0 + s))
        zero = (0,) * (n0 + s)
        prod, deg = f"alpha{i + 1}", f"gamma{i + 1}"
        if prod in labels or deg in labels:
            raise ValueError("reporter rate labels collide with existing rate labels")
        reactions.append(Reaction(zero, unit, prod))
        reactions.append(Reaction(unit, zero, deg))
        known[prod] = f"{e.u_names[i]}*{e.alpha[i]}"
        known[deg] = str(e.gamma)
    return AugmentedCrn(CrnModel(species, tuple(reactions), m.source), m, known)


# ---------------------------------------------------------------------------
# stacked component matrices
# ---------------------------------------------------------------------------

def component_names(m: CrnModel, c: int, rre_only: bool) -> dict[str, str]:
    """Per-component renaming, e.g. x1 -> x1_2 and p12 -> p12_2 for component 2 (1-based)."""
    names = m.state_names() + ([] if rre_only else m.covariance_names())
    return {v: f"{v}_{c}" for v in names}


def component_ring(m: CrnModel, l: int, rre_only: bool, order: TermOrder = TermOrder.GREVLEX) -> PolyRing:
    xs = [f"{x}_{c}" for c in range(1, l + 1) for x in m.state_names()]
    ps = [] if rre_only else [f"{p}_{c}" for c in range(1, l + 1) for p in m.covariance_names()]
    names = xs + ps + m.rate_names()
    roles = [Role.EXT_STATE] * len(xs) + [Role.EXT_COVARIANCE] * len(ps) + [Role.RATE] * m.r
    return PolyRing(VariableCatalog(tuple(names), tuple(roles)), order)


def _rename(p: Polynomial, ring: PolyRing, mapping: dict[str, str]) -> Polynomial:
    src = p.ring.catalog.names
    dec, enc = p.ring.codec.decode, ring.codec.encode
    out = {}
    for k, c in p.terms.items():
        vec = [0] * ring.nvars
        for name, ex in zip(src, dec(k)):
            if ex:
                vec[ring.catalog.index(mapping.get(name, name))] += ex
        out[enc(vec)] = c
    return Polynomial(ring, out)


def _resolve_subset(e: ExtrinsicSpec, subset) -> list[int]:
    if subset is None:
        return list(range(len(e.points)))
    subset = list(subset)
    if not subset:
        raise ValueError("the component subset must be nonempty")
    if len(set(subset)) != len(subset) or any(not 0 <= c < len(e.points) for c in subset):
        raise ValueError(f"invalid component subset {subset}")
    return subset


def extrinsic_matrix(m: CrnModel, e: ExtrinsicSpec, subset: Sequence[int] | None = None,
                     rre_only: bool = False) -> PolyMatrix:
    """Vertical stack of A(x_c, P_c) diag(g(u^c)) over the chosen support points (0-based indices)."""
    check_spec(m, e)
    subset = _resolve_subset(e, subset)
    base = stationary_matrix(m).A
    ring = component_ring(m, len(subset), rre_only)
    rows = []
    nrows = m.n if rre_only else base.rows
    for pos, c in enumerate(subset, start=1):
        mapping = component_names(m, pos, rre_only)
        gv = e.g_at(c)
        for i in range(nrows):
            rows.append(tuple(_rename(a, ring, mapping).scale(g) if a and g else ring.zero()
                              for a, g in zip(base.row(i), gv)))
    return PolyMatrix(ring, tuple(rows))


def default_rre_only(m: CrnModel, l: int, K: ConstraintSet) -> bool:
    return m.n * l + m.r + K.num_slacks > RRE_VARIABLE_THRESHOLD


def certify_augmented(m: CrnModel, e: ExtrinsicSpec, K: ConstraintSet | None = None,
                      subset: Sequence[int] | None = None, rre_only: bool | None = None,
                      opts: CertifyOptions | None = None) -> Verdict:
    """Identifiability of the reporter-augmented network from the stacked component matrix."""
    opts = opts or CertifyOptions()
    K = K or positivity_constraints(m.r)
    subset = _resolve_subset(e, subset)
    if rre_only is None:
        rre_only = default_rre_only(m, len(subset), K)
    Abar = extrinsic_matrix(m, e, subset, rre_only)
    states = [n for n, r in zip(Abar.ring.catalog.names, Abar.ring.catalog.roles) if r is Role.EXT_STATE]
    ideal = assemble_ideal(Abar, K, states, opts)
    v = _run_ideal(ideal, opts, CRITERION_RRE if rre_only else CRITERION_FULL, K.describe())
    v.extrinsic = {"U_size": len(e.points), "subset": [c + 1 for c in subset], "rre_only": rre_only,
                   "augmented": True, "alpha": [str(a) for a in e.alpha], "gamma": str(e.gamma)}
    v.assumptions.append("reporters_known_alpha_gamma")
    v.notes.append("constitutive reporters make the mixture-component assignment unique")
    return v


def inherit_identifiability(m: CrnModel, e: ExtrinsicSpec, base_verdict: Verdict) -> Verdict | None:
    """Certified for the extrinsic network when the base is certified over positive rates and g > 0 on U."""
    check_spec(m, e)
    if not (base_verdict.certified and base_verdict.criterion == CRITERION_POSITIVE):
        return None
    if not e.strictly_positive():
        return None
    v = Verdict(Status.CERTIFIED, CRITERION_INHERITED, reason="base network certified and g(u) > 0 on U",
                num_generators=base_verdict.num_generators, raw_generators=base_verdict.raw_generators,
                num_vars=base_verdict.num_vars, stats=base_verdict.stats, constraints=base_verdict.constraints)
    v.extrinsic = {"U_size": len(e.points), "subset": list(range(1, len(e.points) + 1)), "rre_only": False,
                   "augmented": False, "alpha": [str(a) for a in e.alpha], "gamma": str(e.gamma)}
    return v
