#!/usr/bin/env python3
"""Generate the bundled benchmark corpus.

Every unsatisfiable problem is a short goal chain wrapped in junk axioms.
The main junk device is a pool of constant equations g1=g2, ..., whose
pairwise paramodulation closure is quadratic in the pool size at the same
clause weight as the chain's derived facts, so an unguided weight/age
strategy must grind through the pool before it finishes the chain.  Chain
symbols repeat across the instances of a family while the junk volume
varies: a clause classifier can learn chain-vs-junk on the small instances
and transfer to the large ones.  A handful of satisfiable problems with
finite closures rounds the corpus out.

The output is deterministic; rerunning regenerates identical files.
"""

from __future__ import annotations

import argparse
from pathlib import Path


def _pool(size: int) -> list[str]:
    return [f"cnf(pool_{i}, axiom, g{i} = g{i + 1})." for i in range(1, size)]


def _rel_chain(depth: int) -> list[str]:
    lines = ["cnf(start, axiom, p1(h(c0)))."]
    for i in range(1, depth):
        lines.append(f"cnf(step_{i}, axiom, ~p{i}(X) | p{i + 1}(X)).")
    lines.append(f"cnf(goal, negated_conjecture, ~p{depth}(h(c0))).")
    return lines


def _prop_chain(depth: int) -> list[str]:
    lines = ["cnf(start, axiom, a1)."]
    for i in range(1, depth):
        lines.append(f"cnf(step_{i}, axiom, ~a{i} | a{i + 1}).")
    lines.append(f"cnf(goal, negated_conjecture, ~a{depth}).")
    return lines


def rel_chain(depth: int, pool: int) -> str:
    """p-chain on h(c0) with a linked-relation distractor and a junk pool."""
    lines = [f"% relational goal chain, depth {depth}, junk pool {pool}"]
    lines += _pool(pool)
    for i in range(1, 6):
        lines.append(f"cnf(link_{i}, axiom, r(d{i}, d{i + 1})).")
    lines.append("cnf(sym, axiom, ~r(X, Y) | r(Y, X)).")
    lines.append("cnf(trans, axiom, ~r(X, Y) | ~r(Y, Z) | r(X, Z)).")
    lines += _rel_chain(depth)
    return "\n".join(lines) + "\n"


def mix_rel_eq(depth: int, pool: int) -> str:
    """p-chain distracted by the junk pool alone."""
    lines = [f"% relational chain with equational junk, depth {depth}, pool {pool}"]
    lines += _pool(pool)
    lines += _rel_chain(depth)
    return "\n".join(lines) + "\n"


def eq_chain(depth: int, pool: int) -> str:
    """Equation chain e0=...=e<depth> against goal e0 != e<depth>."""
    lines = [f"% equational goal chain, depth {depth}, junk pool {pool}"]
    lines += _pool(pool)
    for i in range(depth):
        lines.append(f"cnf(eq_{i}, axiom, e{i} = e{i + 1}).")
    lines.append(f"cnf(goal, negated_conjecture, e0 != e{depth}).")
    return "\n".join(lines) + "\n"


def prop_chain(depth: int, junk: int) -> str:
    """a-chain of implications with a complete b-implication digraph."""
    lines = [f"% propositional goal chain, depth {depth}, {junk} junk atoms"]
    for i in range(1, junk + 1):
        for j in range(1, junk + 1):
            if i != j:
                lines.append(f"cnf(junk_{i}_{j}, axiom, ~b{i} | b{j}).")
    if junk:
        lines.append("cnf(junk_seed, axiom, b1).")
    lines += _prop_chain(depth)
    return "\n".join(lines) + "\n"


def mix_prop_eq(depth: int, pool: int, junk: int) -> str:
    """a-chain with both junk kinds present."""
    lines = [f"% propositional chain, junk pool {pool} plus {junk} junk atoms"]
    lines += _pool(pool)
    for i in range(1, junk + 1):
        for j in range(1, junk + 1):
            if i != j:
                lines.append(f"cnf(junk_{i}_{j}, axiom, ~b{i} | b{j}).")
    if junk:
        lines.append("cnf(junk_seed, axiom, b1).")
    lines += _prop_chain(depth)
    return "\n".join(lines) + "\n"


def sat_rel(size: int) -> str:
    """Symmetric link facts with an unreachable goal: finite closure,
    satisfiable."""
    lines = [f"% satisfiable: symmetric links over {size} constants, goal disconnected"]
    for i in range(1, size):
        lines.append(f"cnf(link_{i}, axiom, r(d{i}, d{i + 1})).")
    lines.append("cnf(sym, axiom, ~r(X, Y) | r(Y, X)).")
    lines.append("cnf(goal, negated_conjecture, ~r(d1, u1)).")
    return "\n".join(lines) + "\n"


def sat_prop(size: int) -> str:
    """An implication cycle with no seed fact: nothing grounds, satisfiable."""
    lines = [f"% satisfiable: propositional implication cycle of {size} atoms"]
    for i in range(1, size + 1):
        j = i % size + 1
        lines.append(f"cnf(cyc_{i}, axiom, ~b{i} | b{j}).")
    lines.append("cnf(goal, negated_conjecture, ~b1 | ~b2).")
    return "\n".join(lines) + "\n"


def sat_eq(size: int) -> str:
    """Two disjoint ground equality classes; the goal equates across them."""
    lines = [f"% satisfiable: two equality classes of {size} constants each"]
    for i in range(1, size):
        lines.append(f"cnf(left_{i}, axiom, e{i} = e{i + 1}).")
        lines.append(f"cnf(right_{i}, axiom, g{i} = g{i + 1}).")
    lines.append("cnf(goal, negated_conjecture, e1 != g1).")
    return "\n".join(lines) + "\n"


def build_corpus() -> dict[str, str]:
    problems: dict[str, str] = {}
    for depth in (3, 5, 7):
        for pool in (0, 8, 12, 16, 20):
            problems[f"rel_d{depth}_j{pool:02d}"] = rel_chain(depth, pool)
    for depth in (3, 5, 7):
        for pool in (6, 10, 14, 18, 22):
            problems[f"mixa_d{depth}_j{pool:02d}"] = mix_rel_eq(depth, pool)
    for depth in (2, 3, 4):
        for pool in (4, 10, 16, 22):
            problems[f"eq_d{depth}_j{pool:02d}"] = eq_chain(depth, pool)
    for depth in (3, 5, 7):
        for junk in (3, 5, 8):
            problems[f"prop_d{depth}_j{junk:02d}"] = prop_chain(depth, junk)
    for depth in (3, 5, 7):
        problems[f"mixb_d{depth}_j06"] = mix_prop_eq(depth, 6, 4)
    for size in (3, 5, 8):
        problems[f"sat_rel_{size}"] = sat_rel(size)
        problems[f"sat_prop_{size}"] = sat_prop(size)
    for size in (3, 5):
        problems[f"sat_eq_{size}"] = sat_eq(size)
    return problems


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="corpus")
    args = parser.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    problems = build_corpus()
    for name in sorted(problems):
        (out / f"{name}.p").write_text(problems[name], encoding="utf-8")
    print(f"wrote {len(problems)} problems to {out}")


if __name__ == "__main__":
    main()
