"""Reaction networks, their text format, and the stationary moment matrix A(x, P)."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .poly import PolyRing, Polynomial, TermOrder, VariableCatalog
from .symmat import PolyMatrix, covariance_names, jacobian, lyapunov_residual, symmetric_matrix


class CrnSyntaxError(ValueError):
    """Parse or validation failure with a 1-based source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Reaction:
    reactants: tuple[int, ...]
    products: tuple[int, ...]
    label: str

    @property
    def net(self) -> tuple[int, ...]:
        return tuple(p - r for p, r in zip(self.products, self.reactants))


@dataclass(frozen=True)
class CrnModel:
    """Mass-action network: species names plus reactions with rate labels ``k_1..k_r``."""

    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]
    source: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        n = len(self.species)
        if n < 1:
            raise ValueError("a network needs at least one species")
        if len(set(self.species)) != n:
            raise ValueError("duplicate species names")
        if not self.reactions:
            raise ValueError("a network needs at least one reaction")
        labels = [r.label for r in self.reactions]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate rate symbol")
        for rx in self.reactions:
            if len(rx.reactants) != n or len(rx.products) != n:
                raise ValueError(f"reaction {rx.label}: stoichiometry length differs from species count")
            if any(c < 0 for c in rx.reactants + rx.products):
                raise ValueError(f"reaction {rx.label}: negative stoichiometric coefficient")
            if rx.reactants == rx.products:
                raise ValueError(f"reaction {rx.label} does not change any species")

    @property
    def n(self) -> int:
        return len(self.species)

    @property
    def r(self) -> int:
        return len(self.reactions)

    @property
    def labels(self) -> list[str]:
        return [rx.label for rx in self.reactions]

    def stoichiometry(self) -> list[list[int]]:
        """n x r net stoichiometry matrix S."""
        return [[rx.net[j] for rx in self.reactions] for j in range(self.n)]

    def state_names(self) -> list[str]:
        return [f"x{j + 1}" for j in range(self.n)]

    def covariance_names(self) -> list[str]:
        return covariance_names(self.n)

    def rate_names(self) -> list[str]:
        return [f"k{i + 1}" for i in range(self.r)]

    def default_ring(self, order: TermOrder = TermOrder.GREVLEX) -> PolyRing:
        names = self.state_names() + self.covariance_names() + self.rate_names()
        return PolyRing(VariableCatalog.from_names(names), TermOrder(order))

    def to_text(self) -> str:
        return format_crn(self)

    def __eq__(self, other):
        if not isinstance(other, CrnModel):
            return NotImplemented
        return self.species == other.species and self.reactions == other.reactions

    def __hash__(self):
        return hash((self.species, self.reactions))


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

@dataclass
class ConstraintDecl:
    """Sign constraints as written in a file, keyed by 1-based rate index."""

    strict: list[int] = field(default_factory=list)
    nonneg: list[int] = field(default_factory=list)
    exactly_one: list[tuple[int, int]] = field(default_factory=list)
    explicit: bool = False


@dataclass
class ExtrinsicDecl:
    name: str
    dim: int
    g: list[str] = field(default_factory=list)
    points: list[tuple[Fraction, ...]] = field(default_factory=list)
    weights: list[Fraction] | None = None
    alpha: tuple[Fraction, ...] | None = None
    gamma: Fraction = Fraction(1)
    line: int = 0


@dataclass
class CrnDocument:
    model: CrnModel
    constraints: ConstraintDecl
    extrinsic: ExtrinsicDecl | None = None


_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _parse_complex(text: str, species_index: dict, n: int, lineno: int, col0: int) -> tuple[int, ...]:
    vec = [0] * n
    body = text.strip()
    if body == "0" or body == "∅":
        return tuple(vec)
    offset = col0 + (len(text) - len(text.lstrip()))
    for part in body.split("+"):
        raw = part
        part = part.strip()
        col = offset + (len(raw) - len(raw.lstrip())) + 1
        offset += len(raw) + 1
        if not part:
            raise CrnSyntaxError("empty term in complex", lineno, col)
        m = re.fullmatch(r"(?:(\d+)\s*\*?\s*)?(" + _IDENT + r")", part)
        if not m:
            raise CrnSyntaxError(f"malformed stoichiometric term {part!r}", lineno, col)
        coeff = int(m.group(1)) if m.group(1) is not None else 1
        if coeff < 1:
            raise CrnSyntaxError(f"stoichiometric coefficient must be a positive integer in {part!r}", lineno, col)
        name = m.group(2)
        if name not in species_index:
            raise CrnSyntaxError(f"unknown species {name!r}", lineno, col)
        vec[species_index[name]] += coeff
    return tuple(vec)


def _parse_rational(text: str, lineno: int, col: int) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise CrnSyntaxError(f"expected a rational number, got {text.strip()!r}", lineno, col) from None


def _parse_constraints(body: str, labels: dict, lineno: int, col0: int, decl: ConstraintDecl):
    decl.explicit = True
    for mt in re.finditer(r"\s*(exactly_one\s*\([^)]*\)|[^,]+)\s*(?:,|$)", body):
        it = mt.group(1).strip()
        col = col0 + mt.start(1) + 1
        if not it:
            continue
        m = re.fullmatch(r"exactly_one\s*\(\s*(" + _IDENT + r")\s*,\s*(" + _IDENT + r")\s*\)", it)
        if m:
            a, b = m.group(1), m.group(2)
            for s in (a, b):
                if s not in labels:
                    raise CrnSyntaxError(f"unknown rate symbol {s!r}", lineno, col)
            if a == b:
                raise CrnSyntaxError("exactly_one needs two different rates", lineno, col)
            decl.exactly_one.append((labels[a], labels[b]))
            continue
        m = re.fullmatch(r"(" + _IDENT + r")\s*(>=|≥|>)\s*0", it)
        if not m:
            raise CrnSyntaxError(f"cannot parse constraint {it!r}", lineno, col)
        s = m.group(1)
        if s not in labels:
            raise CrnSyntaxError(f"unknown rate symbol {s!r}", lineno, col)
        (decl.strict if m.group(2) == ">" else decl.nonneg).append(labels[s])


def _parse_points(body: str, dim: int, lineno: int, col0: int):
    pts, ws = [], []
    for chunk in body.split(";"):
        c = chunk.strip()
        if not c:
            continue
        col = col0 + body.find(chunk) + 1
        m = re.fullmatch(r"\(([^)]*)\)\s*(\S+)?", c)
        if not m:
            raise CrnSyntaxError(f"malformed support point {c!r}", lineno, col)
        coords = tuple(_parse_rational(t, lineno, col) for t in m.group(1).split(","))
        if len(coords) != dim:
            raise CrnSyntaxError(f"support point {c!r} has {len(coords)} coordinates, expected {dim}", lineno, col)
        pts.append(coords)
        ws.append(_parse_rational(m.group(2), lineno, col) if m.group(2) else None)
    if not pts:
        raise CrnSyntaxError("empty support list", lineno, col0 + 1)
    if all(w is None for w in ws):
        weights = None
    elif any(w is None for w in ws):
        raise CrnSyntaxError("either all or none of the support points carry weights", lineno, col0 + 1)
    else:
        weights = ws
    return pts, weights


def _parse_tuple(text: str, lineno: int, col: int) -> tuple[Fraction, ...]:
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    return tuple(_parse_rational(v, lineno, col) for v in t.split(","))


def parse_crn(text: str, source: str | None = None) -> CrnDocument:
    """Parse the line-oriented network format (see the README for the grammar)."""
    species: list[str] | None = None
    index: dict[str, int] = {}
    reactions: list[Reaction] = []
    label_pos: dict[str, int] = {}
    constraint_lines: list[tuple[str, int, int]] = []
    ext: ExtrinsicDecl | None = None
    in_ext = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        if in_ext and indent > 0:
            key, _, body = stripped.partition(":")
            col = indent + len(key) + 2
            key = key.strip()
            if key == "g":
                b = body.strip()
                if not (b.startswith("[") and b.endswith("]")):
                    raise CrnSyntaxError("g must be a bracketed list", lineno, col)
                ext.g = [s.strip() for s in b[1:-1].split(",")]
            elif key == "U":
                ext.points, ext.weights = _parse_points(body, ext.dim, lineno, col)
            elif key == "reporters":
                for part in re.findall(r"\w+\s*=\s*(?:\([^)]*\)|[^,]+)", body):
                    name, _, val = part.partition("=")
                    name = name.strip()
                    if name == "alpha":
                        ext.alpha = _parse_tuple(val, lineno, col)
                    elif name == "gamma":
                        ext.gamma = _parse_rational(val, lineno, col)
                    else:
                        raise CrnSyntaxError(f"unknown reporter parameter {name!r}", lineno, col)
            else:
                raise CrnSyntaxError(f"unknown extrinsic field {key!r}", lineno, indent + 1)
            continue
        in_ext = False
        head, sep, body = stripped.partition(":")
        if not sep:
            raise CrnSyntaxError(f"expected 'keyword: ...', got {stripped!r}", lineno, indent + 1)
        body_col = indent + len(head) + 1
        words = head.split()
        kw = words[0] if words else ""
        if kw == "species":
            if species is not None:
                raise CrnSyntaxError("species declared twice", lineno, indent + 1)
            species = body.split()
            for s in species:
                if not re.fullmatch(_IDENT, s):
                    raise CrnSyntaxError(f"invalid species name {s!r}", lineno, body_col + body.find(s) + 1)
            if len(set(species)) != len(species):
                raise CrnSyntaxError("duplicate species name", lineno, body_col + 1)
            index = {s: i for i, s in enumerate(species)}
        elif kw == "reaction":
            if species is None:
                raise CrnSyntaxError("reaction before species declaration", lineno, indent + 1)
            if len(words) != 2 or not re.fullmatch(_IDENT, words[1]):
                raise CrnSyntaxError("expected 'reaction <rate>: <complex> -> <complex>'", lineno, indent + 1)
            label = words[1]
            if label in label_pos:
                raise CrnSyntaxError(f"duplicate rate symbol {label!r}", lineno, indent + 1)
            lhs, arrow, rhs = body.partition("->")
            if not arrow:
                raise CrnSyntaxError("missing '->'", lineno, body_col + 1)
            n = len(species)
            reac = _parse_complex(lhs, index, n, lineno, body_col)
            prod = _parse_complex(rhs, index, n, lineno, body_col + len(lhs) + 2)
            if reac == prod:
                raise CrnSyntaxError(f"reaction {label} does not change any species", lineno, indent + 1)
            label_pos[label] = len(reactions) + 1
            reactions.append(Reaction(reac, prod, label))
        elif kw == "constraints":
            constraint_lines.append((body, lineno, body_col))
        elif kw == "extrinsic":
            m = re.fullmatch(r"\s*(" + _IDENT + r")\s+dim\s+(\d+)\s*", body)
            if not m:
                raise CrnSyntaxError("expected 'extrinsic: <name> dim <s>'", lineno, body_col + 1)
            ext = ExtrinsicDecl(m.group(1), int(m.group(2)), line=lineno)
            in_ext = True
        else:
            raise CrnSyntaxError(f"unknown keyword {kw!r}", lineno, indent + 1)

    if species is None:
        raise CrnSyntaxError("no species declaration")
    if not reactions:
        raise CrnSyntaxError("no reactions")
    decl = ConstraintDecl()
    for body, lineno, col in constraint_lines:
        _parse_constraints(body, label_pos, lineno, col, decl)
    model = CrnModel(tuple(species), tuple(reactions), source)
    return CrnDocument(model, decl, ext)


def load_crn(path) -> CrnDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_crn(fh.read(), source=str(path))


def _format_complex(vec: Sequence[int], species: Sequence[str]) -> str:
    parts = [(f"{c} " if c > 1 else "") + s for c, s in zip(vec, species) if c]
    return " + ".join(parts) if parts else "0"


def format_crn(m: CrnModel, constraints: ConstraintDecl | None = None) -> str:
    lines = ["species: " + " ".join(m.species)]
    for rx in m.reactions:
        lines.append(f"reaction {rx.label}: {_format_complex(rx.reactants, m.species)} -> "
                     f"{_format_complex(rx.products, m.species)}")
    if constraints is not None and constraints.explicit:
        labs = m.labels
        items = [f"{labs[i - 1]} > 0" for i in constraints.strict]
        items += [f"{labs[i - 1]} >= 0" for i in constraints.nonneg]
        items += [f"exactly_one({labs[i - 1]}, {labs[j - 1]})" for i, j in constraints.exactly_one]
        lines.append("constraints: " + ", ".join(items))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# kinetics
# ---------------------------------------------------------------------------

def _ring_for(m: CrnModel, ring: PolyRing | None) -> PolyRing:
    return ring if ring is not None else m.default_ring()


def propensities(m: CrnModel, ring: PolyRing | None = None,
                 state_names: Sequence[str] | None = None) -> list[Polynomial]:
    """q_i = k_i * prod_j x_j^{reactant stoichiometry}."""
    ring = _ring_for(m, ring)
    xs = list(state_names or m.state_names())
    ks = m.rate_names()
    out = []
    for i, rx in enumerate(m.reactions):
        exps = {ks[i]: 1}
        for j, c in enumerate(rx.reactants):
            if c:
                exps[xs[j]] = exps.get(xs[j], 0) + c
        out.append(ring.monomial(exps))
    return out


def drift(m: CrnModel, ring: PolyRing | None = None, state_names: Sequence[str] | None = None) -> list[Polynomial]:
    """f = S q."""
    ring = _ring_for(m, ring)
    q = propensities(m, ring, state_names)
    S = m.stoichiometry()
    out = []
    for j in range(m.n):
        acc = ring.zero()
        for i in range(m.r):
            if S[j][i]:
                acc = acc + q[i].scale(S[j][i])
        out.append(acc)
    return out


def diffusion(m: CrnModel, ring: PolyRing | None = None, state_names: Sequence[str] | None = None) -> PolyMatrix:
    """S diag(q) S^T."""
    ring = _ring_for(m, ring)
    q = propensities(m, ring, state_names)
    S = m.stoichiometry()
    n = m.n
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            acc = ring.zero()
            for i in range(m.r):
                c = S[a][i] * S[b][i]
                if c:
                    acc = acc + q[i].scale(c)
            row.append(acc)
        rows.append(tuple(row))
    return PolyMatrix(ring, tuple(rows))


def stationary_residuals(m: CrnModel, ring: PolyRing | None = None) -> list[Polynomial]:
    """[drift; upper triangle of J P + P J^T + S diag(q) S^T], each linear in k."""
    ring = _ring_for(m, ring)
    f = drift(m, ring)
    J = jacobian(f, m.state_names())
    P = symmetric_matrix(ring, m.n)
    Q = diffusion(m, ring)
    return f + lyapunov_residual(J, P, Q)


def row_labels(n: int) -> list[str]:
    return [f"f{j}" for j in range(1, n + 1)] + [f"L{a}{b}" if n < 10 else f"L{a}_{b}"
                                                  for a in range(1, n + 1) for b in range(a, n + 1)]


def linear_coefficients(p: Polynomial, linear_vars: Sequence[str]) -> list[Polynomial]:
    """Coefficients c_i with p = sum c_i * v_i, asserting p is linear and homogeneous in ``linear_vars``."""
    ring = p.ring
    codec = ring.codec
    idx = [ring.catalog.index(v) for v in linear_vars]
    weights = [codec.weights[i] for i in idx]
    out: list[dict] = [dict() for _ in linear_vars]
    for key, c in p.terms.items():
        exps = codec.decode(key)
        hit = [t for t, i in enumerate(idx) if exps[i]]
        if len(hit) != 1 or exps[idx[hit[0]]] != 1:
            raise AssertionError("residual is not linear in the rate constants")
        t = hit[0]
        out[t][key - weights[t]] = c
    return [Polynomial(ring, d) for d in out]


@dataclass(frozen=True)
class StationaryMatrix:
    A: PolyMatrix
    labels: tuple[str, ...]
    n: int
    r: int

    @property
    def rows(self) -> int:
        return self.A.rows


def stationary_matrix(m: CrnModel, ring: PolyRing | None = None) -> StationaryMatrix:
    """A(x, P) with A(x, P) k equal to the stacked stationary residuals."""
    ring = _ring_for(m, ring)
    res = stationary_residuals(m, ring)
    ks = m.rate_names()
    rows = tuple(tuple(linear_coefficients(p, ks)) for p in res)
    A = PolyMatrix(ring, rows)
    assert A.rows == (m.n * m.n + 3 * m.n) // 2 and A.cols == m.r
    return StationaryMatrix(A, tuple(row_labels(m.n)), m.n, m.r)


def rate_vector(m: CrnModel, ring: PolyRing) -> list[Polynomial]:
    return [ring.var(k) for k in m.rate_names()]


def crn_from_spec(species: Sequence[str], reactions: Sequence[tuple[str, str, str]]) -> CrnModel:
    """Build a model from ``(label, lhs, rhs)`` strings such as ``("k1", "0", "X1")``."""
    text = "species: " + " ".join(species) + "\n" + "".join(
        f"reaction {lab}: {lhs} -> {rhs}\n" for lab, lhs, rhs in reactions)
    return parse_crn(text).model
