"""Generated by tools/gen_resolvent_table.py; do not edit.

Integer expansion of the cubic resolvent 4 det(A x - B y) of a pair of
ternary quadratic forms.  Coordinates are ordered
a11 a12 a13 a22 a23 a33 b11 b12 b13 b22 b23 b33 (indices 0..11).
RESOLVENT_TERMS[k] lists (coefficient, i, j, l) for the x^(3-k) y^k coefficient.
"""

RESOLVENT_TERMS = (
    (
        (-1, 2, 2, 3),
        (1, 1, 2, 4),
        (-1, 1, 1, 5),
        (-1, 0, 4, 4),
        (4, 0, 3, 5),
    ),
    (
        (1, 4, 4, 6),
        (-4, 3, 5, 6),
        (-1, 2, 4, 7),
        (2, 2, 3, 8),
        (1, 2, 2, 9),
        (2, 1, 5, 7),
        (-1, 1, 4, 8),
        (-1, 1, 2, 10),
        (1, 1, 1, 11),
        (-4, 0, 5, 9),
        (2, 0, 4, 10),
        (-4, 0, 3, 11),
    ),
    (
        (-1, 5, 7, 7),
        (4, 5, 6, 9),
        (1, 4, 7, 8),
        (-2, 4, 6, 10),
        (-1, 3, 8, 8),
        (4, 3, 6, 11),
        (-2, 2, 8, 9),
        (1, 2, 7, 10),
        (1, 1, 8, 10),
        (-2, 1, 7, 11),
        (-1, 0, 10, 10),
        (4, 0, 9, 11),
    ),
    (
        (1, 8, 8, 9),
        (-1, 7, 8, 10),
        (1, 7, 7, 11),
        (1, 6, 10, 10),
        (-4, 6, 9, 11),
    ),
)
