"""Small ideals shared by the Groebner tests and the acceptance suite."""
from crnid.poly import PolyRing, VariableCatalog

GB_CASES = {
    "unit_root_shared": (["z"], ["z^2 - 1", "z - 1"]),
    "unit_root_coprime": (["z"], ["z^2 - 1", "z - 2"]),
    "clo_lex": (["x", "y"], ["x^3 - 2*x*y", "x^2*y - 2*y^2 + x"]),
    "twisted_cubic": (["x", "y", "z"], ["y - x^2", "z - x^3"]),
    "circle_line": (["x", "y"], ["x^2 + y^2 - 1", "x - y"]),
    "three_spheres": (["x", "y", "z"], ["x^2 + y^2 + z^2 - 1", "x*y - z", "x - y + z^2"]),
    "unit_hyperbola": (["x", "y"], ["x*y - 1", "x", "y"]),
    "ex1_minors": (["x1", "p11"], ["2*x1 - 2*p11", "2*x1^2 - 4*p11*x1", "2*p11*x1^2"]),
    "ex1_positive": (["x1", "p11", "k1", "k2", "k3", "y1", "y2", "y3"],
                     ["k1*y1^2 - 1", "k2*y2^2 - 1", "k3*y3^2 - 1",
                      "k1 - k2*x1 - k3*x1^2", "k1 + (x1 - 2*p11)*k2 + (x1^2 - 4*p11*x1)*k3",
                      "2*x1 - 2*p11", "2*x1^2 - 4*p11*x1", "2*p11*x1^2"]),
}


def case(name, order=None):
    names, gens = GB_CASES[name]
    ring = PolyRing(VariableCatalog.from_names(names))
    if order is not None:
        ring = ring.with_order(order)
    return ring, [ring.parse(g) for g in gens]
