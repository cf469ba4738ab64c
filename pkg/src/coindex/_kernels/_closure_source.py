"""Breadth-first closure of a 2x2 matrix group over F_q, numba form.

Elements are packed into int64 keys (base-p digits of their residues, in
the same order as ``MatFq2.encode``).  Deduplication uses an open-
addressing table with prime capacity and linear probing, so behaviour
does not depend on integer wrap-around.  This kernel is only invoked
jit-compiled; the interpreted backend uses the dict-based closure in
``coindex.congruence``.
"""

import numpy as np


def closure_count(gen_digits, p, degree, cap, capacity):
    """Count the closure of the identity under right multiplication.

    gen_digits: (n, 4) or (n, 8) int64 array of generator digit vectors
    (generators and inverses, in expansion order).  Returns
    (status, count, keys) with status 1 if count would pass ``cap``;
    keys[:count] are element keys in discovery order.
    """
    nd = gen_digits.shape[1]
    n_gens = gen_digits.shape[0]
    slots = np.full(capacity, -1, dtype=np.int64)
    keys = np.empty(cap, dtype=np.int64)
    cur = np.empty(nd, dtype=np.int64)
    out = np.empty(nd, dtype=np.int64)

    # identity element
    for i in range(nd):
        cur[i] = 0
    if degree == 1:
        cur[0] = 1
        cur[3] = 1
    else:
        cur[0] = 1
        cur[6] = 1
    ident_key = 0
    for i in range(nd):
        ident_key = ident_key * p + cur[i]
    slots[ident_key % capacity] = 0
    keys[0] = ident_key
    count = 1
    head = 0

    while head < count:
        # unpack keys[head] into cur
        k = keys[head]
        for i in range(nd - 1, -1, -1):
            cur[i] = k % p
            k //= p
        for gi in range(n_gens):
            if degree == 1:
                # digits: [e00, e01, e10, e11]
                a0 = cur[0]
                a1 = cur[1]
                a2 = cur[2]
                a3 = cur[3]
                b0 = gen_digits[gi, 0]
                b1 = gen_digits[gi, 1]
                b2 = gen_digits[gi, 2]
                b3 = gen_digits[gi, 3]
                out[0] = (a0 * b0 + a1 * b2) % p
                out[1] = (a0 * b1 + a1 * b3) % p
                out[2] = (a2 * b0 + a3 * b2) % p
                out[3] = (a2 * b1 + a3 * b3) % p
            else:
                # digits: [e00c0, e00c1, e01c0, e01c1, e10c0, e10c1, e11c0, e11c1]
                for r in range(2):
                    for c in range(2):
                        s0 = 0
                        s1 = 0
                        for t in range(2):
                            x0 = cur[4 * r + 2 * t]
                            x1 = cur[4 * r + 2 * t + 1]
                            y0 = gen_digits[gi, 4 * t + 2 * c]
                            y1 = gen_digits[gi, 4 * t + 2 * c + 1]
                            hi = x1 * y1
                            s0 += x0 * y0 - hi
                            s1 += x0 * y1 + x1 * y0 - hi
                        out[4 * r + 2 * c] = s0 % p
                        out[4 * r + 2 * c + 1] = s1 % p
            key = 0
            for i in range(nd):
                key = key * p + out[i]
            h = key % capacity
            while True:
                s = slots[h]
                if s < 0:
                    if count >= cap:
                        return 1, count, keys
                    slots[h] = count
                    keys[count] = key
                    count += 1
                    break
                if keys[s] == key:
                    break
                h += 1
                if h == capacity:
                    h = 0
        head += 1
    return 0, count, keys
