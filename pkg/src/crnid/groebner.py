"""Buchberger's algorithm over the rationals and the ideal-triviality test.

Internally every polynomial is a dict ``{packed monomial: int}`` kept primitive
(coprime integer coefficients, positive leading coefficient), which keeps the
bignums small without paying for ``Fraction`` arithmetic.  Public results are
:class:`~crnid.poly.Polynomial` objects; reduced bases are monic.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

from .poly import FIELD_BITS, Polynomial, PolyRing, TermOrder, monic

IntPoly = dict  # {packed monomial: int}


class BudgetExhausted(RuntimeError):
    """Raised when a Groebner computation exceeds its configured caps."""

    def __init__(self, reason: str, stats: "GroebnerStats"):
        super().__init__(reason)
        self.reason = reason
        self.stats = stats


@dataclass
class GroebnerOptions:
    early_unit_abort: bool = True
    max_pairs: int = 1_000_000
    max_degree: int = 60
    max_seconds: float | None = None
    selection: str = "normal"  # or "sugar"
    batch_size: int | None = None
    track_cofactors: bool = False
    progress: object = None  # callable(stats, pending_pairs) invoked every 100 pairs


@dataclass
class GroebnerStats:
    pairs_processed: int = 0
    reductions_to_zero: int = 0
    pairs_skipped: int = 0
    max_degree: int = 0
    basis_size: int = 0
    batches: int = 0
    generators_fed: int = 0
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class IdealGenerators:
    """Nonzero generators on one ring, with exact duplicates removed."""

    ring: PolyRing
    polys: list[Polynomial]

    def __init__(self, polys: Iterable[Polynomial], ring: PolyRing | None = None):
        polys = [p for p in polys if p]
        if ring is None:
            if not polys:
                raise ValueError("cannot infer the ring of an empty generator list")
            ring = polys[0].ring
        seen = set()
        out = []
        for p in polys:
            if p.ring.catalog != ring.catalog:
                raise ValueError("generators live on different catalogs")
            p = p.with_order(ring.order)
            h = frozenset(_primitive(_to_int_poly(p)).items())
            if h not in seen:
                seen.add(h)
                out.append(p)
        self.ring = ring
        self.polys = out

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)


@dataclass
class GroebnerBasis:
    ring: PolyRing
    polys: list[Polynomial]
    reduced: bool = False
    stats: GroebnerStats = field(default_factory=GroebnerStats)
    cofactors: list[list[Polynomial]] | None = None

    @property
    def order(self) -> TermOrder:
        return self.ring.order

    def is_unit(self) -> bool:
        return len(self.polys) == 1 and self.polys[0].is_constant() and bool(self.polys[0])

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)


class Triviality(str, enum.Enum):
    TRIVIAL = "trivial"
    NOT_TRIVIAL = "not_trivial"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class TrivialityResult:
    status: Triviality
    basis: GroebnerBasis | None
    stats: GroebnerStats
    reason: str = ""

    @property
    def trivial(self) -> bool:
        return self.status is Triviality.TRIVIAL


# ---------------------------------------------------------------------------
# integer-polynomial helpers
# ---------------------------------------------------------------------------

def _denominator(p: Polynomial) -> int:
    den = 1
    for c in p.terms.values():
        if isinstance(c, Fraction):
            den = den * c.denominator // gcd(den, c.denominator)
    return den


def _to_int_poly(p: Polynomial) -> IntPoly:
    den = _denominator(p)
    return {k: int(c * den) for k, c in p.terms.items()}


def _primitive(f: IntPoly) -> IntPoly:
    if not f:
        return f
    g = reduce(gcd, f.values())
    if f[max(f)] < 0:
        g = -g
    if g == 1:
        return f
    return {k: c // g for k, c in f.items()}


def _from_int_poly(ring: PolyRing, f: IntPoly) -> Polynomial:
    return Polynomial(ring, dict(f))


class _Reducer:
    """Division of integer polynomials by a list of basis elements."""

    def __init__(self, codec):
        self.codec = codec
        self.grevlex = codec.order is TermOrder.GREVLEX
        self.guard = codec.guard
        if self.grevlex:
            self.low_guard = codec._low_guard
            self.low_mask = codec._low_mask

    def find(self, lm: int, lms: Sequence[int]) -> int:
        g = self.guard
        bg = lm | g
        if self.grevlex:
            lg, msk = self.low_guard, self.low_mask
            for idx, a in enumerate(lms):
                if (bg - a) & g == g:
                    d = lm - a
                    if (((d >> FIELD_BITS) | lg) - (d & msk)) & lg == lg:
                        return idx
            return -1
        for idx, a in enumerate(lms):
            if (bg - a) & g == g:
                return idx
        return -1

    def reduce(self, f: IntPoly, lms: Sequence[int], polys: Sequence[IntPoly], full: bool = True,
               cof=None, basis_cofs=None) -> IntPoly:
        """Remainder of ``f`` on division by ``polys`` (whose leading monomials are ``lms``).

        The result is a positive-integer multiple of the true remainder, made primitive.
        """
        f = dict(f)
        r: IntPoly = {}
        find = self.find
        while f:
            lm = max(f)
            idx = find(lm, lms)
            if idx < 0:
                if not full:
                    r.update(f)
                    break
                r[lm] = f.pop(lm)
                continue
            g = polys[idx]
            glm = lms[idx]
            c = f[lm]
            gc = g[glm]
            q = gcd(c, gc)
            a, b = gc // q, c // q
            if a < 0:
                a, b = -a, -b
            if a != 1:
                for k in f:
                    f[k] *= a
                for k in r:
                    r[k] *= a
            m = lm - glm
            get = f.get
            for k, v in g.items():
                kk = k + m
                nv = get(kk, 0) - b * v
                if nv:
                    f[kk] = nv
                else:
                    del f[kk]
            if cof is not None:
                _cof_update(cof, a, b, m, basis_cofs[idx])
            if len(f) > 8 and a != 1:
                cnt = reduce(gcd, f.values(), reduce(gcd, r.values(), 0))
                if cnt > 1:
                    for k in f:
                        f[k] //= cnt
                    for k in r:
                        r[k] //= cnt
                    if cof is not None:
                        _cof_scale(cof, Fraction(1, cnt))
        if cof is not None and r:
            g = reduce(gcd, r.values())
            if r[max(r)] < 0:
                g = -g
            if g != 1:
                _cof_scale(cof, Fraction(1, g))
        return _primitive(r)


def _cof_update(cof, a, b, m, gcof):
    # cof <- a*cof - b*x^m*gcof
    for i in range(len(cof)):
        ci = cof[i]
        if a != 1:
            for k in ci:
                ci[k] *= a
        for k, v in gcof[i].items():
            kk = k + m
            nv = ci.get(kk, 0) - b * v
            if nv:
                ci[kk] = nv
            else:
                ci.pop(kk, None)


def _cof_scale(cof, s):
    for ci in cof:
        for k in ci:
            v = ci[k] * s
            ci[k] = v.numerator if isinstance(v, Fraction) and v.denominator == 1 else v


# ---------------------------------------------------------------------------
# Buchberger engine
# ---------------------------------------------------------------------------

class BuchbergerEngine:
    """Resumable Buchberger completion with Gebauer-Moeller pair pruning.

    ``feed`` inserts generators (reduced against the current basis); ``complete``
    processes pairs until none remain.  Both stop immediately when a nonzero
    constant shows up and ``early_unit_abort`` is set.
    """

    def __init__(self, ring: PolyRing, opts: GroebnerOptions | None = None, ngens: int = 0):
        self.ring = ring
        self.codec = ring.codec
        self.opts = opts or GroebnerOptions()
        self.red = _Reducer(self.codec)
        self.polys: list[IntPoly] = []
        self.lms: list[int] = []
        self.sugar: list[int] = []
        self.active: list[int] = []
        self.pairs: list[tuple] = []
        self.unit = False
        self.stats = GroebnerStats()
        self._t0 = time.perf_counter()
        self._elapsed = 0.0
        self.track = self.opts.track_cofactors
        self.ngens = ngens
        self.cofs: list[list[dict]] = []

    # -- budget -------------------------------------------------------------
    def _check_budget(self):
        o = self.opts
        if self.stats.pairs_processed > o.max_pairs:
            raise BudgetExhausted(f"pair budget {o.max_pairs} exceeded", self._final_stats())
        if self.stats.max_degree > o.max_degree:
            raise BudgetExhausted(f"degree cap {o.max_degree} exceeded", self._final_stats())
        if o.max_seconds is not None and time.perf_counter() - self._t0 > o.max_seconds:
            raise BudgetExhausted(f"time budget {o.max_seconds}s exceeded", self._final_stats())

    def _final_stats(self) -> GroebnerStats:
        self.stats.wall_time = time.perf_counter() - self._t0
        self.stats.basis_size = len(self.active)
        return self.stats

    # -- insertion ----------------------------------------------------------
    def _active_lists(self):
        act = self.active
        return [self.lms[i] for i in act], [self.polys[i] for i in act], (
            [self.cofs[i] for i in act] if self.track else None)

    def feed(self, gens: Iterable[IntPoly], gen_offset: int = 0) -> None:
        deg = self.codec.degree
        gens = [g for g in gens if g]
        for j, g in enumerate(gens):
            if self.unit and self.opts.early_unit_abort:
                return
            self.stats.generators_fed += 1
            pg = _primitive(g)
            cof = None
            if self.track:
                # pg = g / content, so pg is (1/content) times generator j
                cont = next(iter(g.values())) // next(iter(pg.values()))
                cof = [dict() for _ in range(self.ngens)]
                cof[gen_offset + j] = {0: Fraction(1, cont) if cont != 1 else 1}
            lms, polys, bcofs = self._active_lists()
            sugar = max(deg(k) for k in g)
            h = self.red.reduce(pg, lms, polys, cof=cof, basis_cofs=bcofs) if lms else pg
            if not h:
                continue
            self._insert(h, sugar, cof)
        self.stats.batches += 1

    def _insert(self, h: IntPoly, sugar: int, cof=None) -> None:
        codec = self.codec
        lm = max(h)
        d = codec.degree(lm)
        if d > self.stats.max_degree:
            self.stats.max_degree = d
        idx = len(self.polys)
        self.polys.append(h)
        self.lms.append(lm)
        self.sugar.append(sugar)
        if self.track:
            self.cofs.append(cof)
        if lm == 0:
            self.unit = True
        self._update(idx)
        self._check_budget()

    def _pair_key(self, lcm: int, i: int, j: int):
        deg = self.codec.degree
        if self.opts.selection == "sugar":
            si = self.sugar[i] + deg(lcm) - deg(self.lms[i])
            sj = self.sugar[j] + deg(lcm) - deg(self.lms[j])
            return (max(si, sj), lcm)
        return (deg(lcm), lcm)

    def _update(self, h: int) -> None:
        """Gebauer-Moeller update of the pair list and active set for new element ``h``."""
        codec = self.codec
        divides = codec.divides
        lcm_of = codec.lcm
        coprime = codec.coprime
        lms = self.lms
        lmh = lms[h]

        C = [(g, lcm_of(lmh, lms[g])) for g in self.active]
        D = []
        # chain criterion among new pairs
        while C:
            g, lcm_hg = C.pop()
            cp = coprime(lmh, lms[g])
            if cp or not (any(divides(l2, lcm_hg) for _, l2 in C) or any(divides(l2, lcm_hg) for _, l2, _ in D)):
                D.append((g, lcm_hg, cp))
        E = []
        for g, lcm_hg, cp in D:
            if cp:
                self.stats.pairs_skipped += 1
            else:
                E.append(g)
        # B-criterion on old pairs
        keep = []
        for pr in self.pairs:
            _, i, j, lij = pr
            if divides(lmh, lij) and lcm_of(lms[i], lmh) != lij and lcm_of(lmh, lms[j]) != lij:
                self.stats.pairs_skipped += 1
                continue
            keep.append(pr)
        for g, lcm_hg, _ in D:
            if g in E:
                keep.append((self._pair_key(lcm_hg, g, h), g, h, lcm_hg))
        self.pairs = keep
        self.active = [g for g in self.active if not divides(lmh, lms[g])] + [h]

    # -- completion ---------------------------------------------------------
    def s_poly(self, i: int, j: int, lcm: int):
        f, g = self.polys[i], self.polys[j]
        lf, lg = self.lms[i], self.lms[j]
        cf, cg = f[lf], g[lg]
        q = gcd(cf, cg)
        a, b = cg // q, cf // q
        mf, mg = lcm - lf, lcm - lg
        out = {}
        for k, v in f.items():
            out[k + mf] = a * v
        get = out.get
        for k, v in g.items():
            kk = k + mg
            nv = get(kk, 0) - b * v
            if nv:
                out[kk] = nv
            else:
                del out[kk]
        cof = None
        if self.track:
            cof = [dict() for _ in range(self.ngens)]
            _cof_update(cof, 1, -a, mf, self.cofs[i])
            _cof_update(cof, 1, b, mg, self.cofs[j])
        return out, cof

    def complete(self) -> None:
        deg = self.codec.degree
        while self.pairs and not (self.unit and self.opts.early_unit_abort):
            best = min(range(len(self.pairs)), key=lambda t: self.pairs[t][0])
            _, i, j, lcm = self.pairs[best]
            last = self.pairs.pop()
            if best < len(self.pairs):
                self.pairs[best] = last
            self.stats.pairs_processed += 1
            if self.opts.progress is not None and self.stats.pairs_processed % 100 == 0:
                self.opts.progress(self.stats, len(self.pairs), len(self.active))
            s, cof = self.s_poly(i, j, lcm)
            if not s:
                self.stats.reductions_to_zero += 1
                continue
            sugar = max(self.sugar[i] + deg(lcm) - deg(self.lms[i]), self.sugar[j] + deg(lcm) - deg(self.lms[j]))
            lms, polys, bcofs = self._active_lists()
            h = self.red.reduce(s, lms, polys, cof=cof, basis_cofs=bcofs)
            if not h:
                self.stats.reductions_to_zero += 1
                self._check_budget()
                continue
            self._insert(h, sugar, cof)

    # -- results ------------------------------------------------------------
    def basis_int(self) -> list[IntPoly]:
        if self.unit:
            return [{0: 1}]
        return [self.polys[i] for i in self.active]

    def unit_cofactors(self) -> list[dict] | None:
        if not self.track or not self.unit:
            return None
        idx = next(i for i, lm in enumerate(self.lms) if lm == 0)
        c = self.polys[idx][0]
        cof = [dict(ci) for ci in self.cofs[idx]]
        _cof_scale(cof, Fraction(1, c))
        return cof


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def _as_ring_int(polys: Iterable[Polynomial], ring: PolyRing) -> list[IntPoly]:
    return [_to_int_poly(p.with_order(ring.order)) for p in polys]


def normal_form(p: Polynomial, G: Sequence[Polynomial], order: TermOrder | None = None) -> Polynomial:
    """Remainder of multivariate division of ``p`` by ``G`` (exact rational scale)."""
    if not G or any(not g for g in G):
        raise ValueError("divisors must be a nonempty list of nonzero polynomials")
    order = TermOrder(order or p.ring.order)
    ring = p.ring.with_order(order)
    pp = p.with_order(order)
    if not pp:
        return pp
    gi = _as_ring_int(G, ring)
    red = _Reducer(ring.codec)
    return _reduce_exact(red, pp, gi)


def _reduce_exact(red: _Reducer, p: Polynomial, gi: list[IntPoly]) -> Polynomial:
    """Division with rational arithmetic, so the remainder is exactly p - sum(q_i g_i)."""
    ring = p.ring
    lms = [max(g) for g in gi]
    f: dict = dict(p.terms)
    r: dict = {}
    while f:
        lm = max(f)
        idx = red.find(lm, lms)
        if idx < 0:
            r[lm] = f.pop(lm)
            continue
        g = gi[idx]
        c = Fraction(f[lm]) / g[lms[idx]]
        m = lm - lms[idx]
        for k, v in g.items():
            kk = k + m
            nv = f.get(kk, 0) - c * v
            if nv:
                f[kk] = nv
            else:
                f.pop(kk, None)
    return Polynomial(ring, {k: (v.numerator if isinstance(v, Fraction) and v.denominator == 1 else v)
                             for k, v in r.items()})


def s_polynomial(f: Polynomial, g: Polynomial, order: TermOrder | None = None) -> Polynomial:
    """lcm/LT(f) * f - lcm/LT(g) * g, content-normalized."""
    if not f or not g:
        raise ValueError("S-polynomial of a zero polynomial")
    order = TermOrder(order or f.ring.order)
    f, g = f.with_order(order), g.with_order(order)
    codec = f.ring.codec
    lf, lg = max(f.terms), max(g.terms)
    lcm = codec.lcm(lf, lg)
    s = f.mul_monomial(lcm - lf, Fraction(1) / Fraction(f.terms[lf])) - g.mul_monomial(
        lcm - lg, Fraction(1) / Fraction(g.terms[lg]))
    from .poly import content_normalize

    return content_normalize(s)


def _batches(gens: list[IntPoly], size: int | None):
    if not size:
        yield 0, gens
        return
    for start in range(0, len(gens), size):
        yield start, gens[start:start + size]


def buchberger(gens: IdealGenerators | Sequence[Polynomial], order: TermOrder | None = None,
               opts: GroebnerOptions | None = None, batches: Sequence[Sequence[Polynomial]] | None = None
               ) -> GroebnerBasis:
    """A (not necessarily reduced) Groebner basis of the ideal generated by ``gens``.

    ``batches`` optionally splits the generators into priority groups; each group
    is fed and completed before the next is touched.  Raises :class:`BudgetExhausted`.
    """
    opts = opts or GroebnerOptions()
    if batches is None:
        gens = gens if isinstance(gens, IdealGenerators) else IdealGenerators(gens)
        if len(gens) == 0:
            raise ValueError("buchberger needs at least one generator")
        groups = [gens.polys]
        ring = gens.ring
    else:
        groups = [list(b) for b in batches if len(b)]
        if not groups:
            raise ValueError("buchberger needs at least one generator")
        ring = groups[0][0].ring
    ring = ring.with_order(order or ring.order)
    flat = [p for grp in groups for p in grp]
    eng = BuchbergerEngine(ring, opts, ngens=len(flat))
    offset = 0
    for grp in groups:
        ints = _as_ring_int(grp, ring)
        for start, chunk in _batches(ints, opts.batch_size):
            eng.feed(chunk, gen_offset=offset + start)
            eng.complete()
            if eng.unit and opts.early_unit_abort:
                break
        offset += len(grp)
        if eng.unit and opts.early_unit_abort:
            break
    stats = eng._final_stats()
    cof = None
    if opts.track_cofactors and eng.unit:
        cof_int = eng.unit_cofactors()
        # the engine works with denominator-cleared generators; undo that scaling
        dens = [_denominator(p) for p in flat]
        cof = [Polynomial(ring, _clean_fracs(c)).scale(d) for c, d in zip(cof_int, dens)]
    polys = [_from_int_poly(ring, f) for f in eng.basis_int()]
    basis = GroebnerBasis(ring, polys, reduced=False, stats=stats)
    basis.cofactors = None if cof is None else [cof]
    basis.generators = flat
    return basis


def _clean_fracs(d: dict) -> dict:
    return {k: (v.numerator if isinstance(v, Fraction) and v.denominator == 1 else v) for k, v in d.items() if v}


def reduce_basis(B: GroebnerBasis | Sequence[Polynomial]) -> GroebnerBasis:
    """The unique reduced Groebner basis of the ideal spanned by a Groebner basis."""
    if isinstance(B, GroebnerBasis):
        polys, ring, stats = B.polys, B.ring, B.stats
    else:
        polys = list(B)
        ring, stats = polys[0].ring, GroebnerStats()
    ring = ring
    codec = ring.codec
    ints = [_primitive(_to_int_poly(p.with_order(ring.order))) for p in polys if p]
    if any(max(f) == 0 for f in ints):
        return GroebnerBasis(ring, [ring.one()], reduced=True, stats=stats)
    # minimal basis: drop elements whose LM is divisible by another LM
    ints.sort(key=lambda f: max(f))
    minimal: list[IntPoly] = []
    for f in ints:
        lf = max(f)
        if any(codec.divides(max(g), lf) for g in minimal):
            continue
        minimal = [g for g in minimal if not codec.divides(lf, max(g))]
        minimal.append(f)
    red = _Reducer(codec)
    out = []
    for i, f in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        lm = max(f)
        if others:
            tail = {k: v for k, v in f.items() if k != lm}
            rt = _reduce_exact(red, Polynomial(ring, tail), others)
            full = Polynomial(ring, {lm: f[lm]}) + rt
        else:
            full = Polynomial(ring, dict(f))
        out.append(monic(full))
    out.sort(key=lambda p: max(p.terms), reverse=True)
    return GroebnerBasis(ring, out, reduced=True, stats=stats)


def groebner(gens: Sequence[Polynomial], order: TermOrder | None = None,
             opts: GroebnerOptions | None = None) -> GroebnerBasis:
    """Reduced Groebner basis (no early abort, so a full basis is always produced)."""
    opts = opts or GroebnerOptions()
    o = GroebnerOptions(**{**opts.__dict__, "early_unit_abort": False})
    return reduce_basis(buchberger(gens, order, o))


def is_trivial(gens: IdealGenerators | Sequence[Polynomial], order: TermOrder | None = None,
               opts: GroebnerOptions | None = None,
               batches: Sequence[Sequence[Polynomial]] | None = None) -> TrivialityResult:
    """Decide whether 1 lies in the ideal (reduced basis equal to {1})."""
    opts = opts or GroebnerOptions()
    try:
        B = buchberger(gens, order, opts, batches=batches)
    except BudgetExhausted as exc:
        return TrivialityResult(Triviality.BUDGET_EXHAUSTED, None, exc.stats, exc.reason)
    if B.is_unit():
        rb = GroebnerBasis(B.ring, [B.ring.one()], reduced=True, stats=B.stats, cofactors=B.cofactors)
        return TrivialityResult(Triviality.TRIVIAL, rb, B.stats)
    rb = reduce_basis(B)
    return TrivialityResult(Triviality.NOT_TRIVIAL, rb, B.stats)


def spoly_residues(basis: Sequence[Polynomial]) -> list[Polynomial]:
    """Normal forms of all pairwise S-polynomials (all zero for a Groebner basis)."""
    out = []
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            s = s_polynomial(basis[i], basis[j])
            out.append(normal_form(s, basis) if s else s)
    return out
