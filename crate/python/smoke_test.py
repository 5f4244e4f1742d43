#!/usr/bin/env python3
"""Build the bernwf_py extension with cargo, import it, and exercise
the bound surface against values known in closed form.

Run from anywhere:

    python3 python/smoke_test.py          # quick checks, a few seconds
    python3 python/smoke_test.py --full   # also run the verification suite

Exits nonzero on the first failed check.
"""

import math
import os
import shutil
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

PASSED = 0


def check(name, cond):
    global PASSED
    if not cond:
        print(f"FAIL {name}")
        sys.exit(1)
    PASSED += 1
    print(f"PASS {name}")


def build_and_load():
    subprocess.run(["cargo", "build", "-p", "bernwf-py"], cwd=ROOT, check=True)
    src = os.path.join(ROOT, "target", "debug", "libbernwf_py.so")
    tmp = tempfile.mkdtemp(prefix="bernwf_py.")
    shutil.copy2(src, os.path.join(tmp, "bernwf_py.so"))
    sys.path.insert(0, tmp)
    import bernwf_py

    return bernwf_py


def main():
    bw = build_and_load()

    # Deep iteration lands on the straight line through the endpoints:
    # for f = x^2 on a 5-interval grid the residue is (4/5)^100 x(1-x).
    f = bw.GridFunction.monomial(5, 2)
    worst = max(abs(f.iterate_eval(100, x) - x) for x in (0.2, 0.4, 0.6, 0.8))
    check("deep iterate is the identity line", worst <= 1e-9)
    check("kr_limit of x^2 is (0, 1)", f.kr_limit() == (0.0, 1.0))

    # One closed form the iterates must match exactly (up to float
    # roundoff): B_n^k(x^2) = q^k x^2 + (1-q^k) x with q = 1 - 1/n.
    n, k = 5, 10
    q = (1 - 1 / n) ** k
    it = f.iterate(k)
    worst = max(
        abs(v - (q * (j / n) ** 2 + (1 - q) * (j / n)))
        for j, v in enumerate(it.values())
    )
    check("iterate matches the q^k closed form", worst <= 1e-12)

    # Convexity: B_n of a convex function stays convex and dominates it.
    g = bw.GridFunction.abs_half(8)
    check(
        "operator preserves convexity",
        all(g.second_derivative(x) >= -1e-12 for x in (0.1, 0.3, 0.5, 0.7, 0.9)),
    )
    check("operator dominates convex f", g.apply(0.5) >= 0.0)

    # Absorption survival: from the middle of a 10-site chain, one step
    # absorbs with probability 2/2^10, so beta = 511/512 exactly.
    check("beta_str is exact", bw.beta_str(10, 1)[5] == "511/512")
    bounds_hold = all(
        b <= bw.beta_upper_bound(10, kk, j / 10) + 1e-15
        for kk in (1, 5, 25)
        for j, b in enumerate(bw.beta(10, kk))
    )
    check("beta below its decay bound", bounds_hold)
    check(
        "kr_error_bound is 2 sup|f| times the bound",
        math.isclose(
            bw.kr_error_bound(0.25, 10, 5, 0.5),
            2 * 0.25 * bw.beta_upper_bound(10, 5, 0.5),
            rel_tol=1e-15,
        ),
    )

    # Diffusion moments: E[X_t^2 | X_0 = x] = x + (x^2 - x) e^(-t).
    want = 0.5 - 0.25 * math.exp(-1.0)
    check(
        "second moment closed form",
        abs(bw.moment_eval(2, 1.0, 0.5) - want) <= 1e-12,
    )
    check("moment at absorbing endpoint", bw.moment_eval(3, 2.0, 1.0) == 1.0)

    # The two moment-coefficient routes agree exactly on all 220
    # triples through order 10.
    check("coefficient identity", bw.coefficient_identity_check(10) == (220, 0))

    # Fourth central moment of binomial(20, 1/2): n(3n-2)/16 = 72.5.
    check("binomial fourth moment", bw.fourth_moment(20, 0.5) == 72.5)

    # Exact binomial tail for n=20, eps=1/4, y=1/2 is 1549/131072,
    # a dyadic rational, so the float comparison is exact.
    check(
        "exact tail probability",
        bw.tail_probability(20, (1, 4), (1, 2)) == 1549 / 131072,
    )

    # Chain Monte Carlo recovers the start point as the absorption law.
    est, se, absorbed, censored = bw.absorption_prob_mc(10, 0.3, 20000)
    check("chain absorption estimate", censored == 0 and abs(est - 0.3) <= 4 * se)

    # Euler-Maruyama: full path, stays in [0, 1], reproducible by seed.
    path = bw.euler_maruyama(0.5, 0.5, 1e-3)
    check("path length is t/dt + 1", len(path) == 501)
    check("path stays in [0, 1]", all(0.0 <= v <= 1.0 for v in path))
    check("same seed, same path", path == bw.euler_maruyama(0.5, 0.5, 1e-3))
    check(
        "different seed, different path",
        path != bw.euler_maruyama(0.5, 0.5, 1e-3, seed=7),
    )

    # Errors surface as ValueError naming the parameter.
    try:
        bw.moment_eval(0, 1.0, 0.5)
        check("domain error raises", False)
    except ValueError as e:
        check("domain error raises", "`r`" in str(e))

    if "--full" in sys.argv[1:]:
        results = bw.run_acceptance(bw.DEFAULT_SEED)
        for cid, name, passed, details in results:
            print(f"  criterion {cid:2} [{'PASS' if passed else 'FAIL'}] {name}: {details}")
        check("verification suite", all(r[2] for r in results) and len(results) == 11)

    print(f"all {PASSED} checks passed")


if __name__ == "__main__":
    main()
