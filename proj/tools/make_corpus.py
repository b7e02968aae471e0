#!/usr/bin/env python3
"""Writes the instance corpus (hand-written cases plus seeded random ones).

Usage: tools/make_corpus.py [corpus_dir]
"""

import json
import random
import sys
from pathlib import Path

SCHEMA = "tracesolve-instance/1"


def instance(constants, variables, lhs, rhs, resources=("r1", "r2"), mode="monoid", monoid=None, note=""):
    j = {"schema": SCHEMA, "mode": mode, "resources": list(resources), "constants": constants,
         "variables": variables, "equation": {"lhs": lhs, "rhs": rhs}}
    if monoid is not None:
        j["monoid"] = monoid
    if note:
        j["note"] = note
    return j


def letter(name, bar, rho):
    return {"name": name, "bar": bar, "rho": rho}


def var(name, rho=("r1", "r2"), mu=None):
    v = {"name": name, "rho": list(rho)}
    if mu is not None:
        v["mu"] = mu
    return v


def counter(cap, letters):
    """Commutative monoid {0..cap} under capped addition; each listed letter counts 1."""
    n = cap + 1
    return {"elements": [str(i) for i in range(n)], "unit": "0",
            "mult": [[str(min(i + j, cap)) for j in range(n)] for i in range(n)],
            "inv": [str(i) for i in range(n)], "images": {a: "1" for a in letters}}


def parity(letters):
    return {"elements": ["even", "odd"], "unit": "even",
            "mult": [["even", "odd"], ["odd", "even"]], "inv": ["even", "odd"],
            "images": {a: "odd" for a in letters}}


A = letter("a", "A", ["r1"])
B = letter("b", "B", ["r2"])
B1 = letter("b", "B", ["r1"])
C12 = letter("c", "C", ["r1", "r2"])


def handwritten():
    out = {}
    # Small named cases.
    out["toy1"] = instance([A], [var("X")], ["X"], ["a"], note="X = a")
    out["toy2"] = instance([A], [var("X")], ["X", "a"], ["a", "X"], note="Xa = aX")
    out["toy3"] = instance([A, B], [var("X"), var("Y")], ["X", "b", "Y"], ["a", "b", "b", "a"],
                           note="XbY = abba with a, b commuting")
    out["toy4"] = instance([A, B1], [var("X"), var("Y")], ["X", "Y"], ["Y", "X"], note="XY = YX")

    # Finiteness cases with known status (recorded in the note).
    out["fin_single"] = instance([A], [var("X")], ["X"], ["a"], note="finite 1")
    out["fin_commute"] = instance([A], [var("X")], ["X", "a"], ["a", "X"], note="infinite")
    out["fin_unsat"] = instance([A, B1], [var("X")], ["X", "a"], ["b", "X"], note="finite 0")
    out["fin_split"] = instance([A, B1], [var("X"), var("Y")], ["X", "Y"], ["a", "b"], note="finite 3")
    out["fin_square"] = instance([A], [var("X")], ["X", "X"], ["a", "a"], note="finite 1")
    out["fin_trace"] = instance([A, B], [var("X")], ["X"], ["b", "a"], note="finite 1")
    out["fin_counted"] = instance([A], [var("X", mu="1")], ["X", "a"], ["a", "X"], monoid=counter(3, ["a", "A"]),
                                  note="finite 1: the constraint allows one letter")
    out["fin_bar"] = instance([A], [var("X")], ["X", "A"], ["A", "X"], note="infinite")
    out["fin_empty"] = instance([A], [var("X")], ["X", "a"], ["a"], note="finite 1: X empty")
    out["fin_suffix"] = instance([A, B1], [var("X")], ["a", "X"], ["X", "a"], note="infinite")

    # Further monoid cases.
    out["mix_indep"] = instance([A, B], [var("X")], ["X", "a"], ["a", "b", "X"],
                                note="unsat: b cannot be absorbed")
    out["mix_shared"] = instance([A, C12], [var("X"), var("Y")], ["X", "c"], ["c", "Y"],
                                 note="letter with all resources")
    out["mix_rho"] = instance([A, B], [var("X", rho=["r1"])], ["X", "b"], ["b", "a", "X"],
                              note="X restricted to r1 letters")
    out["mix_bar"] = instance([A], [var("X")], ["X", "A"], ["a", "A", "X~"], note="involution on the right")
    out["mix_two"] = instance([A, B1], [var("X"), var("Y")], ["X", "a", "Y"], ["Y", "a", "X"],
                              note="two variables")
    out["mix_parity"] = instance([A], [var("X", mu="odd")], ["X", "a"], ["a", "X"], monoid=parity(["a", "A"]),
                                 note="odd powers of a (infinite, but no cycle closes below length 5)")
    out["mix_sym"] = instance([letter("s", "s", ["r1"])], [var("X")], ["X", "s"], ["s", "X"],
                              note="self-involuting letter")
    out["mix_sym2"] = instance([letter("s", "s", ["r1"]), B], [var("X")], ["X", "b"], ["b", "s", "s"],
                               note="self-involuting letter next to a commuting one")
    return out


def raag():
    # Graph groups: generators a, b (and c); commuting pairs share no resource.
    out = {}
    ga = letter("a", "A", ["r1"])
    gb = letter("b", "B", ["r2"])
    gb1 = letter("b", "B", ["r1"])
    out["raag_free"] = instance([ga, gb1], [var("X")], ["X", "a"], ["a", "b", "B", "X"], mode="group",
                                note="free group: Xa = a b B X")
    out["raag_abelian"] = instance([ga, gb], [var("X")], ["X", "a"], ["a", "X"], mode="group",
                                   note="Z^2: X commutes with a")
    out["raag_inverse"] = instance([ga, gb1], [var("X")], ["X", "a"], [], mode="group", note="X = a^-1")
    out["raag_conj"] = instance([ga, gb1], [var("X")], ["X", "a", "X~"], ["b"], mode="group",
                                note="conjugacy of a and b in a free group: unsat")
    out["raag_path"] = instance([ga, gb, letter("c", "C", ["r1", "r2"])], [var("X"), var("Y")],
                                ["X", "Y"], ["c", "a"], mode="group", note="XY = ca")
    return out


def random_instances(count, seed):
    rng = random.Random(seed)
    rhos = [["r1"], ["r2"], ["r1", "r2"]]
    out = {}
    made = 0
    while made < count:
        nl = rng.choice([1, 2, 2, 3])
        consts = [letter(n, n.upper(), rng.choice(rhos)) for n in "abc"[:nl]]
        nv = rng.choice([1, 1, 2])
        vars_ = [var(n) for n in "XY"[:nv]]
        syms = [c["name"] for c in consts] + [c["bar"] for c in consts]
        vsyms = [v["name"] for v in vars_]
        if made % 2 == 0:
            # Unconstrained random sides (usually unsatisfiable).
            total = rng.randint(3, 8)
            word = [rng.choice(vsyms) if rng.random() < 0.4 else rng.choice(syms) for _ in range(total)]
            cut = rng.randint(1, total - 1)
            lhs, rhs = word[:cut], word[cut:]
        else:
            # Satisfiable by construction: rhs is sigma(lhs) with one factor
            # sigma(X) folded back into X.
            sigma = {v: [rng.choice(syms) for _ in range(rng.randint(1, 2))] for v in vsyms}
            lhs = [rng.choice(vsyms) if rng.random() < 0.5 else rng.choice(syms) for _ in range(rng.randint(2, 4))]
            flat = [x for s in lhs for x in (sigma[s] if s in sigma else [s])]
            v = rng.choice(vsyms)
            sv = sigma[v]
            rhs = flat
            for i in range(len(flat) - len(sv) + 1):
                if flat[i:i + len(sv)] == sv:
                    rhs = flat[:i] + [v] + flat[i + len(sv):]
                    break
        if len(lhs) + len(rhs) > 8 or not lhs or not rhs:
            continue
        if not all(v in lhs + rhs for v in vsyms):
            continue
        out[f"rand{made:02d}"] = instance(consts, vars_, lhs, rhs, note=f"random, seed {seed}")
        made += 1
    return out


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "corpus")
    root.mkdir(parents=True, exist_ok=True)
    allc = {}
    allc.update(handwritten())
    allc.update(raag())
    allc.update(random_instances(10, 20240611))
    for name, j in sorted(allc.items()):
        (root / f"{name}.json").write_text(json.dumps(j, indent=2) + "\n")
    print(f"wrote {len(allc)} instances to {root}")


if __name__ == "__main__":
    main()
