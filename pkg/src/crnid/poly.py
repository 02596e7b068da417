"""Exact sparse multivariate polynomials over the rationals.

Monomials are packed into a single Python int whose integer ordering coincides
with the active term order.  Multiplying monomials is integer addition, so the
hot loops of polynomial and Groebner arithmetic never touch exponent tuples.

Layout (``W`` bits per field, top bit of every field is a guard bit):

* ``lex``     fields e_1 .. e_n followed by the total degree in the lowest field
* ``grlex``   total degree in the top field, then e_1 .. e_n
* ``grevlex`` partial sums S_n (= degree), S_{n-1}, .., S_1 with S_k = e_1+..+e_k

All three are linear images of the exponent vector, which is what makes
``key(a*b) == key(a) + key(b)`` hold.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Mapping, Sequence, Union

Coeff = Union[int, Fraction]

FIELD_BITS = 16
VALUE_BITS = FIELD_BITS - 1
MAX_EXPONENT = (1 << VALUE_BITS) - 1


class CatalogMismatch(ValueError):
    pass


class UnknownVariable(KeyError):
    pass


class Role(str, enum.Enum):
    STATE = "state"
    COVARIANCE = "covariance"
    RATE = "rate"
    SLACK = "slack"
    EXT_STATE = "ext_state"
    EXT_COVARIANCE = "ext_covariance"
    OTHER = "other"


_ROLE_PREFIX = {"x": Role.STATE, "p": Role.COVARIANCE, "k": Role.RATE, "y": Role.SLACK, "w": Role.SLACK}


def guess_role(name: str) -> Role:
    """Role from the naming convention used throughout the package (``x1``, ``p12``, ``k3``, ``x1_2`` ...)."""
    m = re.fullmatch(r"([a-z])(\d+)(_\d+)?", name)
    if not m:
        return Role.OTHER
    role = _ROLE_PREFIX.get(m.group(1), Role.OTHER)
    if m.group(3):
        if role is Role.STATE:
            return Role.EXT_STATE
        if role is Role.COVARIANCE:
            return Role.EXT_COVARIANCE
    return role


@dataclass(frozen=True)
class VariableCatalog:
    """Ordered variable names with roles.  Position 0 is the largest variable."""

    names: tuple[str, ...]
    roles: tuple[Role, ...]

    def __post_init__(self):
        if len(self.names) != len(self.roles):
            raise ValueError("names and roles differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in catalog: {self.names}")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    @classmethod
    def from_names(cls, names: Iterable[str], roles: Iterable[Role] | None = None) -> "VariableCatalog":
        names = tuple(names)
        if roles is None:
            roles = tuple(guess_role(n) for n in names)
        return cls(names, tuple(Role(r) for r in roles))

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def of_role(self, *roles: Role) -> list[str]:
        return [n for n, r in zip(self.names, self.roles) if r in roles]

    def extend(self, names: Iterable[str], roles: Iterable[Role] | None = None) -> "VariableCatalog":
        names = tuple(names)
        roles = tuple(guess_role(n) for n in names) if roles is None else tuple(roles)
        return VariableCatalog(self.names + names, self.roles + roles)


class TermOrder(str, enum.Enum):
    LEX = "lex"
    GRLEX = "grlex"
    GREVLEX = "grevlex"


class MonomialCodec:
    """Packs exponent vectors for one (catalog size, order) pair."""

    def __init__(self, nvars: int, order: TermOrder):
        self.n = nvars
        self.order = TermOrder(order)
        W = FIELD_BITS
        n = nvars
        nfields = n + 1 if self.order in (TermOrder.LEX, TermOrder.GRLEX) else max(n, 1)
        self.nfields = nfields
        self.guard = sum(1 << (W * f + VALUE_BITS) for f in range(nfields))
        self.field_mask = (1 << W) - 1
        if self.order is TermOrder.LEX:
            # e_1 at the top, degree at field 0
            self.deg_shift = 0
            self.weights = tuple((1 << (W * (n - i))) + 1 for i in range(n))
        elif self.order is TermOrder.GRLEX:
            self.deg_shift = W * n
            self.weights = tuple((1 << (W * n)) + (1 << (W * (n - 1 - i))) for i in range(n))
        else:
            # field f (0-based from the bottom) holds S_{f+1}; variable i feeds S_{i+1} .. S_n
            self.deg_shift = W * (n - 1) if n else 0
            self.weights = tuple(sum(1 << (W * f) for f in range(i, n)) for i in range(n))
            low = max(n - 1, 0)
            self._low_guard = sum(1 << (W * f + VALUE_BITS) for f in range(low))
            self._low_mask = sum(MAX_EXPONENT << (W * f) for f in range(low))

    def encode(self, exps: Sequence[int]) -> int:
        if len(exps) != self.n:
            raise ValueError("exponent vector has wrong length")
        if any(e < 0 for e in exps):
            raise ValueError("negative exponent")
        if sum(exps) > MAX_EXPONENT:
            raise OverflowError("total degree exceeds packed monomial capacity")
        return sum(e * w for e, w in zip(exps, self.weights))

    def decode(self, key: int) -> tuple[int, ...]:
        W, fm, n = FIELD_BITS, self.field_mask, self.n
        if self.order is TermOrder.LEX:
            return tuple((key >> (W * (n - i))) & fm for i in range(n))
        if self.order is TermOrder.GRLEX:
            return tuple((key >> (W * (n - 1 - i))) & fm for i in range(n))
        sums = [(key >> (W * f)) & fm for f in range(n)]
        return tuple(s - (sums[i - 1] if i else 0) for i, s in enumerate(sums))

    def degree(self, key: int) -> int:
        return (key >> self.deg_shift) & self.field_mask

    def divides(self, a: int, b: int) -> bool:
        """True if monomial ``a`` divides monomial ``b``."""
        g = self.guard
        if ((b | g) - a) & g != g:
            return False
        if self.order is not TermOrder.GREVLEX:
            return True
        d = b - a
        lg = self._low_guard
        return (((d >> FIELD_BITS) | lg) - (d & self._low_mask)) & lg == lg

    def lcm(self, a: int, b: int) -> int:
        return self.encode([max(x, y) for x, y in zip(self.decode(a), self.decode(b))])

    def coprime(self, a: int, b: int) -> bool:
        return all(not (x and y) for x, y in zip(self.decode(a), self.decode(b)))


@lru_cache(maxsize=None)
def _codec(nvars: int, order: TermOrder) -> MonomialCodec:
    return MonomialCodec(nvars, order)


@dataclass(frozen=True)
class PolyRing:
    """A catalog together with the term order used to sort its monomials."""

    catalog: VariableCatalog
    order: TermOrder = TermOrder.GREVLEX

    @property
    def codec(self) -> MonomialCodec:
        return _codec(len(self.catalog), TermOrder(self.order))

    @property
    def nvars(self) -> int:
        return len(self.catalog)

    def with_order(self, order: TermOrder) -> "PolyRing":
        return PolyRing(self.catalog, TermOrder(order))

    # constructors
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c) -> "Polynomial":
        c = _norm_coeff(c)
        return Polynomial(self, {0: c} if c else {})

    def var(self, name: str) -> "Polynomial":
        i = self.catalog.index(name)
        return Polynomial(self, {self.codec.weights[i]: 1})

    def vars(self, *names: str) -> list["Polynomial"]:
        return [self.var(n) for n in names]

    def monomial(self, exps: Mapping[str, int] | Sequence[int], coeff=1) -> "Polynomial":
        if isinstance(exps, Mapping):
            vec = [0] * self.nvars
            for name, e in exps.items():
                vec[self.catalog.index(name)] += e
            exps = vec
        c = _norm_coeff(coeff)
        return Polynomial(self, {self.codec.encode(exps): c} if c else {})

    def from_terms(self, terms: Iterable[tuple[Coeff, Sequence[int]]]) -> "Polynomial":
        out: dict[int, Coeff] = {}
        enc = self.codec.encode
        for c, exps in terms:
            k = enc(exps)
            out[k] = out.get(k, 0) + c
        return Polynomial(self, _clean(out))

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)


def _norm_coeff(c) -> Coeff:
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, str):
        return _norm_coeff(Fraction(c))
    if isinstance(c, float):
        raise TypeError("floating-point coefficients are not supported")
    return _norm_coeff(Fraction(c))


def _clean(terms: dict[int, Coeff]) -> dict[int, Coeff]:
    out = {}
    for k, c in terms.items():
        if c:
            if isinstance(c, Fraction) and c.denominator == 1:
                c = c.numerator
            out[k] = c
    return out


class Polynomial:
    """Immutable polynomial: a mapping from packed monomial to nonzero rational."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict[int, Coeff]):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- basic protocol -------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            if other.ring.catalog != self.ring.catalog:
                return False
            if other.ring.order != self.ring.order:
                other = other.with_order(self.ring.order)
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            canon = self if self.ring.order is TermOrder.GREVLEX else self.with_order(TermOrder.GREVLEX)
            self._hash = hash((self.ring.catalog, frozenset(canon.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        return format_polynomial(self)

    # -- structure --------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Coeff, int]]:
        """(coefficient, packed monomial) pairs, strictly descending in the ring's order."""
        return [(self.terms[k], k) for k in sorted(self.terms, reverse=True)]

    def exponent_terms(self) -> list[tuple[Coeff, tuple[int, ...]]]:
        dec = self.ring.codec.decode
        return [(c, dec(k)) for c, k in self.sorted_terms()]

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        deg = self.ring.codec.degree
        return max(deg(k) for k in self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> Coeff:
        return self.terms.get(0, 0)

    def variables(self) -> set[str]:
        names = self.ring.catalog.names
        used = set()
        for k in self.terms:
            for i, e in enumerate(self.ring.codec.decode(k)):
                if e:
                    used.add(names[i])
        return used

    def degree_in(self, name: str) -> int:
        i = self.ring.catalog.index(name)
        dec = self.ring.codec.decode
        return max((dec(k)[i] for k in self.terms), default=-1)

    def with_order(self, order: TermOrder) -> "Polynomial":
        order = TermOrder(order)
        if order is self.ring.order:
            return self
        ring = self.ring.with_order(order)
        dec, enc = self.ring.codec.decode, ring.codec.encode
        return Polynomial(ring, {enc(dec(k)): c for k, c in self.terms.items()})

    def embed(self, ring: PolyRing) -> "Polynomial":
        """Re-express in a catalog containing all of this polynomial's variables."""
        if ring == self.ring:
            return self
        src = self.ring.catalog.names
        idx = [ring.catalog.index(n) for n in src]
        dec, enc = self.ring.codec.decode, ring.codec.encode
        out = {}
        for k, c in self.terms.items():
            vec = [0] * ring.nvars
            for i, e in zip(idx, dec(k)):
                vec[i] = e
            out[enc(vec)] = c
        return Polynomial(ring, out)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring.catalog != self.ring.catalog:
                raise CatalogMismatch("polynomials live on different variable catalogs")
            return other.with_order(self.ring.order)
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other):
        try:
            q = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for k, c in q.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Polynomial(self.ring, _clean(out))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        try:
            q = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-q)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        try:
            q = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not self.terms or not q.terms:
            return self.ring.zero()
        if self.total_degree() + q.total_degree() > MAX_EXPONENT:
            raise OverflowError("product degree exceeds packed monomial capacity")
        out: dict[int, Coeff] = {}
        get = out.get
        for k1, c1 in self.terms.items():
            for k2, c2 in q.terms.items():
                k = k1 + k2
                out[k] = get(k, 0) + c1 * c2
        return Polynomial(self.ring, _clean(out))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c) -> "Polynomial":
        c = _norm_coeff(c)
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, _clean({k: v * c for k, v in self.terms.items()}))

    def mul_monomial(self, key: int, c: Coeff = 1) -> "Polynomial":
        return Polynomial(self.ring, {k + key: v * c for k, v in self.terms.items()})


# --------------------------------------------------------------------------
# module-level operations mirroring the documented interface
# --------------------------------------------------------------------------

def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def partial_derivative(p: Polynomial, var: str) -> Polynomial:
    i = p.ring.catalog.index(var)
    codec = p.ring.codec
    w = codec.weights[i]
    out: dict[int, Coeff] = {}
    for k, c in p.terms.items():
        e = codec.decode(k)[i]
        if e:
            out[k - w] = c * e
    return Polynomial(p.ring, out)


def evaluate(p: Polynomial, point: Mapping[str, object]):
    """Exact value of ``p`` at a point; every variable occurring in ``p`` must be assigned.

    Values may be ints, Fractions or Polynomials (partial substitution is not
    supported; use :func:`substitute` for that).
    """
    names = p.ring.catalog.names
    dec = p.ring.codec.decode
    vals: list = [None] * len(names)
    for i, n in enumerate(names):
        if n in point:
            v = point[n]
            vals[i] = v if isinstance(v, (int, Fraction)) else Fraction(v)
    total: Coeff = 0
    for k, c in p.terms.items():
        term = c
        for i, e in enumerate(dec(k)):
            if e:
                v = vals[i]
                if v is None:
                    raise UnknownVariable(f"variable {names[i]} is not assigned")
                term = term * v**e
        total += term
    return _norm_coeff(total)


def substitute(p: Polynomial, values: Mapping[str, object]) -> Polynomial:
    """Replace some variables by rationals, keeping the catalog."""
    ring = p.ring
    codec = ring.codec
    idx = {ring.catalog.index(n): _norm_coeff(v) for n, v in values.items()}
    out: dict[int, Coeff] = {}
    for k, c in p.terms.items():
        exps = list(codec.decode(k))
        for i, v in idx.items():
            e = exps[i]
            if e:
                c = c * v**e
                exps[i] = 0
        if c:
            kk = codec.encode(exps)
            out[kk] = out.get(kk, 0) + c
    return Polynomial(ring, _clean(out))


def leading_term(p: Polynomial, order: TermOrder | None = None) -> tuple[Coeff, tuple[int, ...]]:
    """Leading coefficient and exponent vector of ``p`` under ``order``."""
    if not p.terms:
        raise ValueError("zero polynomial has no leading term")
    if order is not None:
        p = p.with_order(order)
    k = max(p.terms)
    return p.terms[k], p.ring.codec.decode(k)


def content_normalize(p: Polynomial) -> Polynomial:
    """Scale to coprime integer coefficients with a positive leading coefficient."""
    if not p.terms:
        return p
    lcm_den = 1
    for c in p.terms.values():
        if isinstance(c, Fraction):
            d = c.denominator
            lcm_den = lcm_den * d // gcd(lcm_den, d)
    ints = {k: int(c * lcm_den) for k, c in p.terms.items()}
    g = reduce(gcd, ints.values())
    if ints[max(ints)] < 0:
        g = -g
    return Polynomial(p.ring, {k: c // g for k, c in ints.items()})


def monic(p: Polynomial) -> Polynomial:
    if not p.terms:
        return p
    lc = p.terms[max(p.terms)]
    if lc == 1:
        return p
    return p.scale(Fraction(1) / lc)


# --------------------------------------------------------------------------
# text syntax
# --------------------------------------------------------------------------

def _format_coeff(c: Coeff) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def format_monomial(exps: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    names = p.ring.catalog.names
    out = []
    for i, (c, exps) in enumerate(p.exponent_terms()):
        neg = c < 0
        a = -c if neg else c
        mono = format_monomial(exps, names)
        if not mono:
            body = _format_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_format_coeff(a)}*{mono}"
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at column {pos + 1}: {text!r}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialSyntaxError("unexpected character", text, pos)
        if m.group(1) is not None:
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), m.start(2)))
        else:
            op = m.group(3)
            toks.append(("op", "^" if op == "**" else op, m.start(3)))
        pos = m.end()
    return toks


class _Parser:
    # expr   := ['+'|'-'] term (('+'|'-') term)*
    # term   := factor (('*'|'/') factor | factor)*     juxtaposition = product
    # factor := atom ('^' int)?
    # atom   := int | name | '(' expr ')'
    def __init__(self, text: str, ring: PolyRing):
        self.text = text
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        t = self.peek()
        if t is None:
            raise PolynomialSyntaxError("unexpected end of input", self.text, len(self.text))
        self.i += 1
        return t

    def parse(self) -> Polynomial:
        if not self.toks:
            raise PolynomialSyntaxError("empty polynomial", self.text, 0)
        p = self.expr()
        t = self.peek()
        if t is not None:
            raise PolynomialSyntaxError(f"unexpected token {t[1]!r}", self.text, t[2])
        return p

    def expr(self):
        sign = 1
        t = self.peek()
        if t and t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            t = self.peek()
            if t and t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t[1] == "+" else acc - rhs
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            t = self.peek()
            if t is None:
                return acc
            if t[0] == "op" and t[1] == "*":
                self.take()
                acc = acc * self.factor()
            elif t[0] == "op" and t[1] == "/":
                self.take()
                d = self.factor()
                if not d.is_constant() or not d:
                    raise PolynomialSyntaxError("division only by nonzero constants", self.text, t[2])
                acc = acc.scale(Fraction(1) / Fraction(d.constant_value()))
            elif t[0] in ("num", "name") or (t[0] == "op" and t[1] == "("):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self):
        base = self.atom()
        t = self.peek()
        if t and t[0] == "op" and t[1] == "^":
            self.take()
            e = self.take()
            if e[0] != "num":
                raise PolynomialSyntaxError("exponent must be a non-negative integer", self.text, e[2])
            base = base ** int(e[1])
        return base

    def atom(self):
        t = self.take()
        if t[0] == "num":
            return self.ring.constant(int(t[1]))
        if t[0] == "name":
            if t[1] not in self.ring.catalog:
                raise PolynomialSyntaxError(f"unknown variable {t[1]!r}", self.text, t[2])
            return self.ring.var(t[1])
        if t[1] == "(":
            inner = self.expr()
            close = self.take()
            if close[1] != ")":
                raise PolynomialSyntaxError("expected ')'", self.text, close[2])
            return inner
        raise PolynomialSyntaxError(f"unexpected token {t[1]!r}", self.text, t[2])


def parse_polynomial(text: str, ring: PolyRing) -> Polynomial:
    return _Parser(text, ring).parse()


def names_in(text: str) -> list[str]:
    """Identifiers appearing in polynomial text, in order of first appearance."""
    seen: dict[str, None] = {}
    for kind, val, _ in _tokenize(text):
        if kind == "name":
            seen.setdefault(val)
    return list(seen)
