#!/usr/bin/env python3
"""Reference term generator for the bundled OEIS fixtures.

The sandbox that produced this repository could not reach oeis.org, so the
fixtures under crates/core/fixtures/oeis are produced here with algorithms that
share no code or method with the Rust engines:

* balanced matrices: row-by-row contingency-table DP whose state is the
  multiset of current column sums (binomial weights per row), not powers of
  an elementary symmetric polynomial;
* A002896: the closed form C(2n,n) * sum_j C(n,j)^2 C(2j,j);
* A060521: DP over pairs of consecutive 3-bit columns.

Usage: python3 tools/reference_counts.py OUTDIR
"""
import hashlib
import sys
from functools import lru_cache
from math import comb
from pathlib import Path


def contingency(rows, cols, row_sum, col_sum):
    """Number of rows x cols 0-1 matrices with constant row and column sums.

    Rows are placed one at a time; the state is (c_0, ..., c_col_sum) where
    c_j is the number of columns whose running sum is j.
    """
    assert rows * row_sum == cols * col_sum
    layer = {(cols,) + (0,) * col_sum: 1}
    for _ in range(rows):
        nxt = {}
        for state, weight in layer.items():
            for moves, w in _distributions(state, row_sum):
                new = list(state)
                for i, j in enumerate(moves):
                    new[i] -= j
                    new[i + 1] += j
                key = tuple(new)
                nxt[key] = nxt.get(key, 0) + weight * w
        layer = nxt
    return layer.get((0,) * col_sum + (cols,), 0)


def _distributions(state, total):
    """Ways to pick `total` columns, j_i of them from class i < col_sum."""
    out = []
    classes = len(state) - 1

    def rec(i, remaining, moves, weight):
        if i == classes:
            if remaining == 0:
                out.append((tuple(moves), weight))
            return
        for j in range(min(state[i], remaining) + 1):
            moves.append(j)
            rec(i + 1, remaining - j, moves, weight * comb(state[i], j))
            moves.pop()

    rec(0, total, [], 1)
    return out


def balanced(k, n):
    # b_k(n) counts 2k x 2n matrices with row sums n and column sums k;
    # the transpose is counted by the same routine, pick the one with fewer
    # column-sum classes.
    if k <= n:
        return contingency(2 * k, 2 * n, n, k)
    return contingency(2 * n, 2 * k, k, n)


def a002896(n):
    return comb(2 * n, n) * sum(comb(n, j) ** 2 * comb(2 * j, j) for j in range(n + 1))


def a060521(n):
    cols = [c for c in range(8) if c not in (0b000, 0b111)]
    if n == 1:
        return len(cols)

    def ok(a, b, c):
        # rows i: bits a_i, b_i, c_i must not be 000 or 111
        for i in range(3):
            x = ((a >> i) & 1, (b >> i) & 1, (c >> i) & 1)
            if x in ((0, 0, 0), (1, 1, 1)):
                return False
        return True

    ways = {(a, b): 1 for a in cols for b in cols}
    for _ in range(n - 2):
        nxt = {}
        for (a, b), w in ways.items():
            for c in cols:
                if ok(a, b, c):
                    nxt[(b, c)] = nxt.get((b, c), 0) + w
        ways = nxt
    return sum(ways.values())


SEQUENCES = {
    # id: (offset, count, generator, description)
    "A002896": (0, 30, a002896, "closed walks of length 2n on the cubic lattice; balanced 4 x 2n"),
    "A060521": (1, 30, a060521, "3 x n binary arrays avoiding 000 and 111 in rows and columns"),
    "A172556": (1, 30, lambda n: balanced(3, n), "balanced 6 x 2n binary matrices"),
    "A172555": (1, 16, lambda n: balanced(4, n), "balanced 8 x 2n binary matrices"),
    "A172557": (1, 10, lambda n: balanced(5, n), "balanced 10 x 2n binary matrices"),
    "A172558": (1, 8, lambda n: balanced(6, n), "balanced 12 x 2n binary matrices"),
    "A172559": (1, 7, lambda n: balanced(7, n), "balanced 14 x 2n binary matrices"),
    "A172560": (1, 6, lambda n: balanced(8, n), "balanced 16 x 2n binary matrices"),
    "A172554": (1, 6, lambda n: balanced(9, n), "balanced 18 x 2n binary matrices"),
}


def main():
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    sums = []
    for sid, (offset, count, gen, desc) in sorted(SEQUENCES.items()):
        lines = [f"# {sid}: {desc}",
                 "# reference terms from tools/reference_counts.py"]
        for n in range(offset, offset + count):
            lines.append(f"{n} {gen(n)}")
        body = "\n".join(lines) + "\n"
        name = f"b{sid[1:]}.txt"
        (out / name).write_text(body)
        sums.append(f"{hashlib.sha256(body.encode()).hexdigest()}  {name}")
        print(sid, "done", file=sys.stderr)
    (out / "SHA256SUMS").write_text("\n".join(sums) + "\n")


if __name__ == "__main__":
    main()
