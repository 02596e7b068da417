"""Reference matrices for the worked networks, stored as polynomial strings for exact comparison."""
from __future__ import annotations

from dataclasses import dataclass

from .poly import PolyRing, Role, VariableCatalog, guess_role, names_in
from .symmat import PolyMatrix


@dataclass(frozen=True)
class Fixture:
    name: str
    rows: tuple[tuple[str, ...], ...]
    network: str = ""
    description: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for row in self.rows:
            for s in row:
                for v in names_in(s):
                    seen.setdefault(v, None)
        return sorted(seen, key=_var_sort_key)

    def matrix(self, ring: PolyRing | None = None) -> PolyMatrix:
        ring = ring or PolyRing(VariableCatalog.from_names(self.variables() or ["x1"]))
        return PolyMatrix.from_rows(ring, self.rows)


def _var_sort_key(name: str):
    order = {Role.STATE: 0, Role.EXT_STATE: 0, Role.COVARIANCE: 1, Role.EXT_COVARIANCE: 1}
    return order.get(guess_role(name), 2), name


def _f(name, text, network="", description=""):
    rows = tuple(tuple(c.strip() for c in line.split(";")) for line in text.strip().splitlines())
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"ragged fixture {name}")
    return Fixture(name, rows, network, description)


_XX = "x1*x2"
_L11_X1X2 = "x1*x2 - 2*p12*x1 - 2*p11*x2"
_L12_X1X2 = "x1*x2 - p12*x1 - p12*x2 - p22*x1 - p11*x2"
_L22_X1X2 = "x1*x2 - 2*p22*x1 - 2*p12*x2"

FIXTURES: dict[str, Fixture] = {
    f.name: f
    for f in [
        _f("ex1_A", """
            1 ; -x1 ; -x1^2
            1 ; x1 - 2*p11 ; x1^2 - 4*p11*x1
        """, "r1", "birth, death and pairwise decay of one species"),
        _f("ex3_A", """
            1 ; -x1 ; 0
            0 ; x1 ; -x2
            1 ; x1 - 2*p11 ; 0
            0 ; p11 - p12 - x1 ; -p12
            0 ; 2*p12 + x1 ; x2 - 2*p22
        """, "r3", "two-step conversion cascade (hand-derived)"),
        _f("ex3_A_display", """
            1 ; -x1 ; 0 ; 0 ; 0
            0 ; 0 ; 1 ; -x2 ; x1
            1 ; x1 - 2*p11 ; 0 ; 0 ; 0
            0 ; -p12 ; 0 ; -p12 ; p11
            0 ; 0 ; 1 ; x2 - 2*p22 ; 2*p12 + x1
        """, "", "0<->X1, 0<->X2, X1->X1+X2"),
        _f("ex4_A", f"""
            1 ; -x1 ; 0 ; 0 ; -{_XX}
            0 ; 0 ; 1 ; -x2 ; -{_XX}
            1 ; x1 - 2*p11 ; 0 ; 0 ; {_L11_X1X2}
            0 ; -p12 ; 0 ; -p12 ; {_L12_X1X2}
            0 ; 0 ; 1 ; x2 - 2*p22 ; {_L22_X1X2}
        """, "r4", "mutual degradation"),
        _f("ex5_A", """
            1 ; -x1 ; 0 ; 0 ; 0
            0 ; 0 ; 1 ; -x2 ; -x1^2*x2
            1 ; x1 - 2*p11 ; 0 ; 0 ; 0
            0 ; -p12 ; 0 ; -p12 ; -p12*x1^2 - 2*p11*x2*x1
            0 ; 0 ; 1 ; x2 - 2*p22 ; x1^2*x2 - 2*p22*x1^2 - 4*p12*x1*x2
        """, "r5", "enzymatic degradation by two copies"),
        _f("ex6_A", """
            1 ; -x1 ; 0 ; 0 ; 0 ; 0 ; 0 ; 0
            0 ; 0 ; 1 ; -x2 ; 0 ; 0 ; x1 ; 0
            0 ; 0 ; 0 ; 0 ; 1 ; -x3 ; 0 ; x2
            1 ; x1 - 2*p11 ; 0 ; 0 ; 0 ; 0 ; 0 ; 0
            0 ; -p12 ; 0 ; -p12 ; 0 ; 0 ; p11 ; 0
            0 ; -p13 ; 0 ; 0 ; 0 ; -p13 ; 0 ; p12
            0 ; 0 ; 1 ; x2 - 2*p22 ; 0 ; 0 ; 2*p12 + x1 ; 0
            0 ; 0 ; 0 ; -p23 ; 0 ; -p23 ; p13 ; p22
            0 ; 0 ; 0 ; 0 ; 1 ; x3 - 2*p33 ; 0 ; 2*p23 + x2
        """, "r6", "three-stage activation cascade"),
        _f("ex7_A", f"""
            1 ; -x1 ; 0 ; 0 ; -{_XX} ; 0
            0 ; 0 ; 1 ; 0 ; -{_XX} ; -x2*x3
            0 ; 0 ; 0 ; 1 ; 0 ; -x2*x3
            1 ; x1 - 2*p11 ; 0 ; 0 ; {_L11_X1X2} ; 0
            0 ; -p12 ; 0 ; 0 ; {_L12_X1X2} ; -p12*x3 - p13*x2
            0 ; -p13 ; 0 ; 0 ; -p13*x2 - p23*x1 ; -p12*x3 - p13*x2
            0 ; 0 ; 1 ; 0 ; {_L22_X1X2} ; x2*x3 - 2*p23*x2 - 2*p22*x3
            0 ; 0 ; 0 ; 0 ; -p13*x2 - p23*x1 ; x2*x3 - p23*x2 - p23*x3 - p33*x2 - p22*x3
            0 ; 0 ; 0 ; 1 ; 0 ; x2*x3 - 2*p33*x2 - 2*p23*x3
        """, "r7", "two targets sharing one degrader"),
        _f("ex8_A", """
            1 ; -x1 ; 0 ; 0 ; 0 ; x2
            0 ; 0 ; 1 ; -x2 ; x1 ; 0
            1 ; x1 - 2*p11 ; 0 ; 0 ; 0 ; 2*p12 + x2
            0 ; -p12 ; 0 ; -p12 ; p11 ; p22
            0 ; 0 ; 1 ; x2 - 2*p22 ; 2*p12 + x1 ; 0
        """, "r8", "which species activates the other"),
        _f("ex9_A", f"""
            1 ; -x1 ; 0 ; 0 ; -{_XX} ; -{_XX}
            0 ; 0 ; 1 ; -x2 ; -{_XX} ; 0
            1 ; x1 - 2*p11 ; 0 ; 0 ; {_L11_X1X2} ; {_L11_X1X2}
            0 ; -p12 ; 0 ; -p12 ; {_L12_X1X2} ; -p12*x2 - p22*x1
            0 ; 0 ; 1 ; x2 - 2*p22 ; {_L22_X1X2} ; 0
        """, "r9", "mutual versus one-sided degradation"),
        _f("fb_A", f"""
            1 ; -x1 ; 0 ; 0 ; -{_XX} ; x2
            0 ; 0 ; 1 ; -x2 ; -{_XX} ; 0
            1 ; x1 - 2*p11 ; 0 ; 0 ; {_L11_X1X2} ; 2*p12 + x2
            0 ; -p12 ; 0 ; -p12 ; {_L12_X1X2} ; p22
            0 ; 0 ; 1 ; x2 - 2*p22 ; {_L22_X1X2} ; 0
        """, "feedback", "antithetic-style feedback loop"),
        _f("fb_A_bar_rre", "\n".join(
            f"{g1} ; -x1_{c} ; 0 ; 0 ; -x1_{c}*x2_{c} ; x2_{c}\n0 ; 0 ; {g2} ; -x2_{c} ; -x1_{c}*x2_{c} ; 0"
            for c, (g1, g2) in enumerate([(1, 0), (0, 1), (1, 1), (1, 2), (2, 1), (2, 2)], start=1)
        ), "feedback", "stacked drift rows over six extrinsic points"),
        _f("r1_extrinsic_A_bar_rre", """
            0 ; -x1_1 ; -x1_1^2
            1 ; -x1_2 ; -x1_2^2
            2 ; -x1_3 ; -x1_3^2
        """, "r1_extrinsic", "birth rate scaled by copy number 0, 1, 2"),
    ]
}

# certification ideal of ex1_A over positive rates: the three 2x2 minors
EX1_MINORS = ("2*x1 - 2*p11", "2*x1^2 - 4*p11*x1", "2*p11*x1^2")


class UnknownFixture(KeyError):
    pass


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None


def _union_ring(a: PolyRing, b: PolyRing) -> PolyRing:
    names = list(a.catalog.names) + [n for n in b.catalog.names if n not in a.catalog.names]
    return PolyRing(VariableCatalog.from_names(names), a.order)


def matrix_diff(A: PolyMatrix, B: PolyMatrix) -> list[tuple[int, int, str, str]]:
    """Entries where A and B differ as polynomials; a shape mismatch is reported as (-1, -1, ...)."""
    if A.shape != B.shape:
        return [(-1, -1, f"shape {A.shape}", f"shape {B.shape}")]
    ring = _union_ring(A.ring, B.ring)
    out = []
    for i in range(A.rows):
        for j in range(A.cols):
            a, b = A[i, j].embed(ring), B[i, j].embed(ring)
            if a != b:
                out.append((i, j, str(A[i, j]), str(B[i, j])))
    return out


def check_fixture(A: PolyMatrix, name: str) -> list[tuple[int, int, str, str]]:
    return matrix_diff(A, get_fixture(name).matrix())
