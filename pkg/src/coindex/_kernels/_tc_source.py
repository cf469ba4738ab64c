"""HLT coset-enumeration core, written to compile under numba unchanged.

Everything here operates on flat numpy arrays: the coset table is an
int32 array with one column per signed letter (column 2*g for generator
g, 2*g+1 for its inverse; -1 marks undefined), relator and subgroup
words arrive as CSR-style flat/offset pairs of column indices, and
coincidences are handled by a union-find over coset indices.

The same source runs interpreted (pure-python backend) or jit-compiled;
both paths produce identical tables.
"""

import numpy as np


def uf_find(parent, k):
    # find with full path compression
    root = k
    while parent[root] != root:
        root = parent[root]
    while parent[k] != root:
        nxt = parent[k]
        parent[k] = root
        k = nxt
    return root


def uf_merge(parent, queue, qt, a, b):
    # union by smaller index; dead coset goes on the queue
    ra = uf_find(parent, a)
    rb = uf_find(parent, b)
    if ra != rb:
        if ra < rb:
            mu, v = ra, rb
        else:
            mu, v = rb, ra
        parent[v] = mu
        queue[qt] = v
        qt += 1
    return qt


def process_coincidence(table, parent, queue, n_letters, a, b):
    # transfer table entries of dead cosets onto their representatives,
    # queueing any further coincidences this uncovers
    qh = 0
    qt = 0
    qt = uf_merge(parent, queue, qt, a, b)
    while qh < qt:
        g = queue[qh]
        qh += 1
        for x in range(n_letters):
            d = table[g, x]
            if d >= 0:
                table[d, x ^ 1] = -1
                mu = uf_find(parent, g)
                nu = uf_find(parent, d)
                if table[mu, x] >= 0:
                    qt = uf_merge(parent, queue, qt, nu, table[mu, x])
                elif table[nu, x ^ 1] >= 0:
                    qt = uf_merge(parent, queue, qt, mu, table[nu, x ^ 1])
                else:
                    table[mu, x] = nu
                    table[nu, x ^ 1] = mu


def audit_consistency(table, parent, n_letters, next_id):
    """Involution check on live rows: c.x = d defined implies d.x^-1 = c.

    Returns the first offending coset, or -1 when consistent.  Entries
    pointing at dead cosets are chased to their representatives.
    """
    for c in range(next_id):
        if parent[c] != c:
            continue
        for x in range(n_letters):
            d = table[c, x]
            if d >= 0:
                dd = uf_find(parent, d)
                back = table[dd, x ^ 1]
                if back >= 0 and uf_find(parent, back) != c:
                    return c
    return -1


def tc_core(n_letters, rel_flat, rel_off, sub_flat, sub_off, max_cosets, audit):
    """Relator-first enumeration; returns (status, next_id, table, parent).

    status 0: the table closed; live cosets are those with
    parent[i] == i for i < next_id.  status 1: allocation hit
    max_cosets without closing.  status 2: an audit failure (only with
    audit != 0, which re-checks table consistency after every merge).
    """
    table = np.full((max_cosets, n_letters), -1, dtype=np.int32)
    parent = np.arange(max_cosets).astype(np.int32)
    queue = np.empty(max_cosets, dtype=np.int32)
    n_rel = rel_off.shape[0] - 1
    n_sub = sub_off.shape[0] - 1
    next_id = 1
    exceeded = False

    alpha = 0
    while alpha < next_id and not exceeded:
        if parent[alpha] != alpha:
            alpha += 1
            continue
        sub_here = n_sub if alpha == 0 else 0
        n_words = n_rel + sub_here
        wi = 0
        while wi < n_words:
            if wi < sub_here:
                lo = sub_off[wi]
                hi = sub_off[wi + 1]
                flat = sub_flat
            else:
                k = wi - sub_here
                lo = rel_off[k]
                hi = rel_off[k + 1]
                flat = rel_flat

            # scan word flat[lo:hi] at coset alpha, filling gaps
            f = alpha
            b = alpha
            i = lo
            j = hi - 1
            pending = False
            cf = 0
            cb = 0
            while True:
                while i <= j and table[f, flat[i]] >= 0:
                    f = table[f, flat[i]]
                    i += 1
                if i > j:
                    if f != b:
                        pending = True
                        cf = f
                        cb = b
                    break
                while j >= i and table[b, flat[j] ^ 1] >= 0:
                    b = table[b, flat[j] ^ 1]
                    j -= 1
                if j < i:
                    pending = True
                    cf = f
                    cb = b
                    break
                elif j == i:
                    # deduction closes the gap
                    x = flat[i]
                    table[f, x] = b
                    table[b, x ^ 1] = f
                    break
                else:
                    if next_id >= max_cosets:
                        exceeded = True
                        break
                    beta = next_id
                    next_id += 1
                    x = flat[i]
                    table[f, x] = beta
                    table[beta, x ^ 1] = f
                    # forward scan resumes through the new coset

            if exceeded:
                break
            if pending:
                process_coincidence(table, parent, queue, n_letters, cf, cb)
                if audit != 0:
                    if audit_consistency(table, parent, n_letters, next_id) >= 0:
                        return 2, next_id, table, parent
                if parent[alpha] != alpha:
                    break
            wi += 1

        if not exceeded and parent[alpha] == alpha:
            # complete the row so every live coset ends up fully defined
            for x in range(n_letters):
                if table[alpha, x] < 0:
                    if next_id >= max_cosets:
                        exceeded = True
                        break
                    beta = next_id
                    next_id += 1
                    table[alpha, x] = beta
                    table[beta, x ^ 1] = alpha
        alpha += 1

    status = 1 if exceeded else 0
    return status, next_id, table, parent
