#!/usr/bin/env python3
"""Tour of the symmetric-function layer: blocks, dimensions, and multiplicities.

n copies of a d-level system decompose into joint blocks labelled by Young
indices (length-d non-decreasing integer tuples summing to n).  Each block
carries a unitary-group dimension and a symmetric-group dimension, and the
products tile the full d^n-dimensional space exactly.  This script walks that
bookkeeping end to end with exact integer arithmetic.

Run:  python3 demos/01_block_structure.py
"""

from schurest.partitions import (
    enumerate_young,
    kostka,
    multinomial,
    sn_dim,
    total_schur_dim,
    type_entropy_bounds,
    weyl_dim,
)


def show_block_table(n: int, d: int) -> None:
    print(f"Blocks for n={n} copies of a d={d} system")
    print(f"{'young':>12} {'unitary dim':>12} {'perm dim':>9} {'product':>9}")
    total = 0
    for young in enumerate_young(n, d):
        u = weyl_dim(young)
        v, _ = sn_dim(young)
        total += u * v
        print(f"{str(young):>12} {u:>12} {v:>9} {u * v:>9}")
    print(f"{'':>12} {'':>12} {'sum':>9} {total:>9}  (d^n = {d**n})")
    assert total == d**n
    print()


def show_multiplicity_tiling(n: int, d: int) -> None:
    """Each unitary block splits across weight vectors with Kostka multiplicity."""
    print(f"Multiplicity tiling at n={n}, d={d}: sum of Kostka numbers per block")
    from schurest.partitions import compositions

    for young in enumerate_young(n, d):
        parts = [kostka(young, w) for w in compositions(n, d)]
        u = weyl_dim(young)
        print(f"  {str(young):>12}: {sum(parts):>4} weight slots  == unitary dim {u}")
        assert sum(parts) == u
    print()


def show_growth(d: int) -> None:
    """Block count grows polynomially in n while the space grows as d^n."""
    print(f"Polynomial block growth at d={d} (count <= (n+1)^(d-1) shown as ratio)")
    print(f"{'n':>4} {'blocks':>8} {'total dim':>12} {'count/bound':>12}")
    for n in (4, 8, 16, 32):
        summary = total_schur_dim(n, d)
        ratio = summary.count / summary.count_bound
        print(f"{n:>4} {summary.count:>8} {summary.total:>12} {ratio:>12.4f}")
        assert summary.count <= summary.count_bound
        assert summary.total <= summary.total_bound
    print()


def show_type_entropy(n: int, d: int) -> None:
    """The multinomial weight of a block sits within an entropy-rate sandwich."""
    print(f"Type-counting sandwich at n={n}, d={d}: "
          f"exp(nH)/(n+1)^(d-1) <= multinomial <= exp(nH)")
    print(f"{'young':>12} {'entropy H':>10} {'lower':>10} {'multinomial':>12} {'upper':>10}")
    for young in enumerate_young(n, d):
        entropy, lower, upper = type_entropy_bounds(young)
        multi = multinomial(young)
        print(f"{str(young):>12} {entropy:>10.4f} {lower:>10.3f} {multi:>12} {upper:>10.3f}")
        assert lower - 1e-9 <= multi <= upper + 1e-9
    print()


def main() -> None:
    show_block_table(4, 2)
    show_block_table(3, 3)
    show_multiplicity_tiling(4, 2)
    show_growth(2)
    show_growth(3)
    show_type_entropy(6, 2)
    print("All exact identities verified.")


if __name__ == "__main__":
    main()
