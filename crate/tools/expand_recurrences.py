#!/usr/bin/env python3
"""Expands the published factored recurrences for b_2 and b_3 into the JSON
recurrence format (ascending coefficient lists of p_0(n) .. p_L(n))."""
import json
import sys
from pathlib import Path

import sympy as sp

n = sp.symbols("n")

B2 = [
    36 * (2 * n + 3) * (2 * n + 1) * (n + 1),
    -2 * (2 * n + 3) * (10 * n**2 + 30 * n + 23),
    (n + 2) ** 3,
]

B3 = [
    51200 * (2*n + 7) * (2*n + 5) * (2*n + 3) * (2*n + 1) * (n + 2) * (n + 1) * (33*n**2 + 242*n + 445),
    -128 * (2*n + 7) * (2*n + 5) * (2*n + 3) * (n + 2)
    * (7491*n**4 + 84898*n**3 + 351364*n**2 + 628997*n + 414370),
    16 * (2*n + 5) * (2*n + 7)
    * (2772*n**6 + 48048*n**5 + 344379*n**4 + 1307394*n**3 + 2775099*n**2 + 3125336*n + 1460132),
    2 * (2*n + 7) * (n + 3)
    * (3201*n**6 + 61886*n**5 + 497179*n**4 + 2124170*n**3 + 5089654*n**2 + 6484024*n + 3431096),
    -(n + 3) * (n + 4) ** 5 * (33*n**2 + 176*n + 236),
]


def encode(polys):
    coeffs = [[str(c) for c in reversed(sp.Poly(sp.expand(p), n).all_coeffs())] for p in polys]
    return {
        "order": len(polys) - 1,
        "degree": max(len(c) for c in coeffs) - 1,
        "coeffs": coeffs,
    }


def main():
    out = Path(sys.argv[1])
    for name, polys in (("b2_order2.json", B2), ("b3_order4.json", B3)):
        (out / name).write_text(json.dumps(encode(polys), indent=2) + "\n")


if __name__ == "__main__":
    main()
