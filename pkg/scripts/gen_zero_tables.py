#!/usr/bin/env python3
"""Regenerate the bundled L-function zero tables.

Produces two files under src/sievelab/data/:

  zeta_zeros_100.txt   first 100 ordinates of the Riemann zeta zeros
  mod4_zeros_50.txt    first 50 ordinates for the odd real character mod 4

Ordinates are computed from scratch with mpmath (no table downloads): zeta
zeros via ``mp.zetazero``, the mod-4 zeros by bisecting sign changes of the
completed L-function, which is real on the critical line for this character.
Writing 15 significant digits keeps the files byte-stable across reruns.
"""

from __future__ import annotations

import pathlib

import mpmath as mp

mp.mp.dps = 25

DATA = pathlib.Path(__file__).resolve().parent.parent / "src" / "sievelab" / "data"


def completed_mod4(t):
    # (q/pi)^((s+1)/2) Gamma((s+1)/2) L(s, chi) with chi the odd character
    # mod 4; real-valued for s = 1/2 + it because the root number is +1.
    s = mp.mpc(mp.mpf(1) / 2, t)
    lval = mp.dirichlet(s, [0, 1, 0, -1])
    return ((mp.mpf(4) / mp.pi) ** ((s + 1) / 2) * mp.gamma((s + 1) / 2) * lval).real


def mod4_ordinates(count: int) -> list[mp.mpf]:
    found: list[mp.mpf] = []
    step = mp.mpf(1) / 4
    t = mp.mpf(2)
    prev = completed_mod4(t)
    while len(found) < count:
        t_next = t + step
        cur = completed_mod4(t_next)
        if mp.sign(prev) != mp.sign(cur):
            root = mp.findroot(completed_mod4, (t, t_next), solver="anderson")
            found.append(root)
        t, prev = t_next, cur
    return found


def write_table(
    path: pathlib.Path, comments: list[str], directives: list[str], ordinates
) -> None:
    lines = [f"# {h}" for h in comments] + directives
    lines += [mp.nstr(g, 15) for g in ordinates]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(ordinates)} ordinates)")


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)

    zeta = [mp.zetazero(n).imag for n in range(1, 101)]
    write_table(
        DATA / "zeta_zeros_100.txt",
        [
            "first 100 ordinates of the Riemann zeta zeros, critical line",
            "generated by scripts/gen_zero_tables.py (mpmath zetazero)",
        ],
        ["conductor 1", "character principal"],
        zeta,
    )

    mod4 = mod4_ordinates(50)
    write_table(
        DATA / "mod4_zeros_50.txt",
        [
            "first 50 zero ordinates for the odd real character mod 4",
            "generated by scripts/gen_zero_tables.py (completed-L bisection)",
        ],
        ["conductor 4", "character 4.3"],
        mod4,
    )


if __name__ == "__main__":
    main()
