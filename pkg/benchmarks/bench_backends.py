"""Benchmark the jit-compiled kernels against the interpreted fallback.

Two workloads dominated by the hot loops:
  * coset enumeration of the built-in subgroup in the three-generator
    ambient presentation, up to a configurable coset limit;
  * breadth-first closure of the ambient image modulo a prime
    (the interpreted side uses the dict-based closure, which is what the
    package actually runs when numba is unavailable).

Results are checked for equality between backends before timings print.
"""

import argparse
import time

import numpy as np

from coindex._kernels import get_kernels
from coindex.congruence import _digit_rows, _next_prime_at_least, reduce_group
from coindex.eiszeta import builtin_dataset
from coindex.ffq import make_reduction
from coindex.toddcoxeter import _encode_words


def bench_tc(limit: int) -> dict:
    ds = builtin_dataset()
    pres = ds.reduced_presentation()
    subgens = [ds.m_words[k] for k in ds.m_words]
    rel_flat, rel_off = _encode_words(pres.relators, pres.n_gens)
    sub_flat, sub_off = _encode_words(subgens, pres.n_gens)

    results = {}
    for name in ("python", "numba"):
        try:
            ks = get_kernels(name)
        except Exception as exc:
            print(f"  [{name}] unavailable: {exc}")
            continue
        if name == "numba":  # compile outside the timed region
            ks.tc_core(6, rel_flat, rel_off, sub_flat, sub_off, 64, 0)
        t0 = time.perf_counter()
        out = ks.tc_core(6, rel_flat, rel_off, sub_flat, sub_off, limit, 0)
        elapsed = time.perf_counter() - t0
        results[name] = (out, elapsed)
        alive = int(np.count_nonzero(out[3][:out[1]] == np.arange(out[1], dtype=np.int32)))
        print(f"  [{name:6}] status={out[0]} defined={out[1]} alive={alive}  {elapsed:8.3f}s")
    _crosscheck(results, lambda a, b: a[0] == b[0] and a[1] == b[1]
                and np.array_equal(a[2], b[2]) and np.array_equal(a[3], b[3]))
    return results


def bench_closure(p: int, cap: int) -> dict:
    ds = builtin_dataset()
    f = make_reduction(p)
    group = reduce_group(ds.gamma_gens, f)

    results = {}
    t0 = time.perf_counter()
    order_py = _dict_closure(group, cap)
    elapsed = time.perf_counter() - t0
    results["python"] = (order_py, elapsed)
    print(f"  [python] order={order_py}  {elapsed:8.3f}s")

    try:
        ks = get_kernels("numba")
    except Exception as exc:
        print(f"  [numba ] unavailable: {exc}")
        return results
    gen_digits = _digit_rows(group.expansion(), f)
    capacity = _next_prime_at_least(2 * cap + 1)
    ks.closure_count(gen_digits, f.p, f.degree, 64, 131)  # compile
    t0 = time.perf_counter()
    status, count, _ = ks.closure_count(gen_digits, f.p, f.degree, cap, capacity)
    elapsed = time.perf_counter() - t0
    order_nb = None if status == 1 else int(count)
    results["numba"] = (order_nb, elapsed)
    print(f"  [numba ] order={order_nb}  {elapsed:8.3f}s")
    _crosscheck(results, lambda a, b: a == b)
    return results


def _dict_closure(group, cap):
    from coindex.congruence import _generic_closure_count
    from coindex.ffq import MatFq2

    return _generic_closure_count(group.expansion(), MatFq2.identity(group.field),
                                  lambda m: m.encode(), cap)


def _crosscheck(results, same):
    if len(results) == 2:
        (a, ta), (b, tb) = results["python"], results["numba"]
        assert same(a, b), "backends disagree"
        speedup = ta / tb if tb > 0 else float("inf")
        print(f"  backends agree; numba speedup {speedup:.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tc-limit", type=int, default=300_000)
    ap.add_argument("--closure-p", type=int, default=31)
    ap.add_argument("--closure-cap", type=int, default=1_000_000)
    args = ap.parse_args()

    print(f"coset enumeration to {args.tc_limit} cosets:")
    bench_tc(args.tc_limit)
    print(f"closure of the ambient image mod {args.closure_p}:")
    bench_closure(args.closure_p, args.closure_cap)


if __name__ == "__main__":
    main()
