"""Regenerate src/resolvent/_resolvent_table.py.

Expands 4*det(A x - B y) over the integers, where A and B are the symmetric
(half-integral) Gram matrices of the ternary forms sum_{i<=j} a_ij x_i x_j.
"""
from __future__ import annotations

import pathlib

import sympy as sp

NAMES = ["11", "12", "13", "22", "23", "33"]


def resolvent_terms():
    a = sp.symbols("a11 a12 a13 a22 a23 a33")
    b = sp.symbols("b11 b12 b13 b22 b23 b33")
    x, y = sp.symbols("x y")

    def gram(c):
        h = sp.Rational(1, 2)
        return sp.Matrix([[c[0], h * c[1], h * c[2]],
                          [h * c[1], c[3], h * c[4]],
                          [h * c[2], h * c[4], c[5]]])

    f = sp.expand(4 * (gram(a) * x - gram(b) * y).det())
    variables = list(a) + list(b)
    out = []
    for k in range(4):
        coeff = sp.Poly(f.coeff(x, 3 - k).coeff(y, k), *variables)
        terms = []
        for monom, c in sorted(coeff.terms()):
            assert c == int(c)
            idx = []
            for v, e in enumerate(monom):
                idx.extend([v] * e)
            terms.append((int(c), *idx))
        out.append(tuple(terms))
    return tuple(out)


def main():
    terms = resolvent_terms()
    lines = [
        '"""Generated by tools/gen_resolvent_table.py; do not edit.',
        "",
        "Integer expansion of the cubic resolvent 4 det(A x - B y) of a pair of",
        "ternary quadratic forms.  Coordinates are ordered",
        "a11 a12 a13 a22 a23 a33 b11 b12 b13 b22 b23 b33 (indices 0..11).",
        "RESOLVENT_TERMS[k] lists (coefficient, i, j, l) for the x^(3-k) y^k coefficient.",
        '"""',
        "",
        "RESOLVENT_TERMS = (",
    ]
    for block in terms:
        lines.append("    (")
        for t in block:
            lines.append(f"        {t!r},")
        lines.append("    ),")
    lines.append(")")
    path = pathlib.Path(__file__).resolve().parents[1] / "src" / "resolvent" / "_resolvent_table.py"
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path} ({sum(len(b) for b in terms)} terms)")


if __name__ == "__main__":
    main()
