"""Hot numeric kernels: numba-compiled fast path, pure-numpy fallback.

The numba path is used when numba imports successfully and the environment
variable ``STAGETREE_NUMBA`` is not set to ``0``/``false``/``off``. Both
implementations are importable (``NUMPY_IMPL`` / ``NUMBA_IMPL``) so tests
and benchmarks can compare them directly.

Kernels operate on plain arrays and integer codes; the public modules own
validation and name resolution.

Metric codes:  0 totalvariation, 1 hellinger, 2 fisher, 3 jensenshannon,
               4 kaniadakis, 5 totalkl.
Linkage codes: 0 average, 1 complete, 2 mcquitty, 3 ward.D2.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "ACTIVE_BACKEND",
    "NUMBA_AVAILABLE",
    "NUMPY_IMPL",
    "NUMBA_IMPL",
    "count_pairs",
    "pairwise_dissimilarity",
    "linkage_merge",
    "cut_labels",
    "merge_ll_deltas",
    "bhc_labels",
]

TV, HELLINGER, FISHER, JS, KANIADAKIS, TOTALKL = range(6)
AVERAGE, COMPLETE, MCQUITTY, WARD_D2 = range(4)


# --------------------------------------------------------------------------
# pure-numpy implementations
# --------------------------------------------------------------------------

def _count_pairs_np(codes, values, n_rows, n_cols):
    """Tally (code, value) pairs into an (n_rows, n_cols) table."""
    flat = np.bincount(codes * n_cols + values, minlength=n_rows * n_cols)
    return flat.reshape(n_rows, n_cols).astype(np.int64)


def _pairwise_np(V, code, kappa):
    n = V.shape[0]
    if code == TV:
        M = 0.5 * np.abs(V[:, None, :] - V[None, :, :]).sum(axis=-1)
    elif code == HELLINGER:
        R = np.sqrt(V)
        M = np.sqrt(0.5 * ((R[:, None, :] - R[None, :, :]) ** 2).sum(axis=-1))
    elif code == FISHER:
        R = np.sqrt(V)
        bc = np.clip(R @ R.T, 0.0, 1.0)
        M = 4.0 * np.arccos(bc) ** 2
    elif code == JS:
        P = V[:, None, :]
        Q = V[None, :, :]
        mid = P + Q
        with np.errstate(divide="ignore", invalid="ignore"):
            tp = np.where(P > 0.0, P * np.log(2.0 * P / mid), 0.0)
            tq = np.where(Q > 0.0, Q * np.log(2.0 * Q / mid), 0.0)
        M = 0.5 * (tp + tq).sum(axis=-1)
    elif code == KANIADAKIS:
        K = (V**kappa - V**(-kappa)) / (2.0 * kappa)
        self_term = (V * K).sum(axis=1)
        G = V @ K.T
        M = self_term[:, None] + self_term[None, :] - G - G.T
    elif code == TOTALKL:
        L = np.log(V)
        self_term = (V * L).sum(axis=1)
        G = V @ L.T
        M = self_term[:, None] + self_term[None, :] - G - G.T
    else:
        raise ValueError(f"unknown metric code {code}")
    # mirror the upper triangle so symmetry is exact despite BLAS rounding
    upper = np.triu(M, 1)
    return upper + upper.T


def _linkage_merge_np(D, code):
    n = D.shape[0]
    merges = np.zeros((n - 1, 4))
    if n == 1:
        return merges
    W = D.astype(np.float64).copy()
    if code == WARD_D2:
        W = W * W
    np.fill_diagonal(W, np.inf)
    size = np.ones(n)
    ids = np.arange(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    next_id = n
    for step in range(n - 1):
        # the smallest-id-pair tie rule reduces to: the smallest-id row
        # among rows achieving the global minimum, then its smallest-id
        # partner (both endpoints of a minimal pair achieve the row min)
        rmin = W.min(axis=1)
        best = rmin.min()
        cand = np.nonzero(rmin == best)[0]
        a = int(cand[np.argmin(ids[cand])])
        partners = np.nonzero(W[a] == best)[0]
        b = int(partners[np.argmin(ids[partners])])
        lo, hi = ids[a], ids[b]
        if b < a:
            a, b = b, a
        ni, nj, dij = size[a], size[b], W[a, b]
        others = alive.copy()
        others[a] = others[b] = False
        if code == AVERAGE:
            new = (ni * W[a, others] + nj * W[b, others]) / (ni + nj)
        elif code == COMPLETE:
            new = np.maximum(W[a, others], W[b, others])
        elif code == MCQUITTY:
            new = 0.5 * (W[a, others] + W[b, others])
        elif code == WARD_D2:
            nk = size[others]
            new = ((ni + nk) * W[a, others] + (nj + nk) * W[b, others] - nk * dij) / (
                ni + nj + nk
            )
        else:
            raise ValueError(f"unknown linkage code {code}")
        W[a, others] = new
        W[others, a] = new
        W[b, :] = np.inf
        W[:, b] = np.inf
        alive[b] = False
        size[a] = ni + nj
        height = math.sqrt(max(dij, 0.0)) if code == WARD_D2 else dij
        merges[step] = (lo, hi, height, size[a])
        ids[a] = next_id
        next_id += 1
    return merges


def _row_ll_np(rows, alpha):
    """Log-likelihood contribution of count rows under their own smoothed fit."""
    rows = np.atleast_2d(rows)
    s = rows.shape[1]
    denom = rows.sum(axis=1, keepdims=True) + alpha * s
    with np.errstate(divide="ignore", invalid="ignore"):
        term = np.where(rows > 0, rows * (np.log(rows + alpha) - np.log(denom)), 0.0)
    return term.sum(axis=1)


def _cut_labels_np(pairs, n, k):
    """Partition labels after applying the first n - k merges.

    `pairs` holds (left id, right id) per merge; merge t creates id n + t.
    Labels are canonical: 0, 1, 2, ... in order of first member.
    """
    parent = np.arange(2 * n - 1, dtype=np.int64)
    for step in range(n - k):
        parent[pairs[step, 0]] = parent[pairs[step, 1]] = n + step
    roots = parent[np.arange(n)]
    while True:  # chase parent pointers; merge ids only point upward
        nxt = parent[roots]
        if np.array_equal(nxt, roots):
            break
        roots = nxt
    labels = np.empty(n, dtype=np.int64)
    remap: dict = {}
    for i, root in enumerate(roots.tolist()):
        if root not in remap:
            remap[root] = len(remap)
        labels[i] = remap[root]
    return labels


def _merge_ll_deltas_np(rows, pairs, alpha):
    """Log-likelihood change of each dendrogram merge, in merge order.

    Node t >= m is the cluster created by merge t - m; delta[t] is
    ll(pooled child rows) - ll(left) - ll(right).
    """
    m, s = rows.shape
    pooled = np.zeros((2 * m - 1, s))
    pooled[:m] = rows
    for t in range(pairs.shape[0]):
        pooled[m + t] = pooled[pairs[t, 0]] + pooled[pairs[t, 1]]
    ll = _row_ll_np(pooled, alpha)
    return ll[m:] - ll[pairs[:, 0]] - ll[pairs[:, 1]]


def _bhc_labels_np(counts, alpha, log_n):
    m, s = counts.shape
    label = np.arange(m, dtype=np.int64)
    if m == 1:
        return label
    P = counts.astype(np.float64).copy()
    ll = _row_ll_np(P, alpha)
    alive = np.ones(m, dtype=bool)
    penalty = (s - 1.0) * log_n
    while alive.sum() > 1:
        act = np.nonzero(alive)[0]
        merged = P[act][:, None, :] + P[act][None, :, :]
        denom = merged.sum(axis=-1) + alpha * s
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(
                merged > 0,
                merged * (np.log(merged + alpha) - np.log(denom)[..., None]),
                0.0,
            )
        mll = term.sum(axis=-1)
        delta = -2.0 * (mll - ll[act][:, None] - ll[act][None, :]) - penalty
        iu = np.triu_indices(len(act), 1)
        vals = delta[iu]
        pos = int(np.argmin(vals))  # row-major first = smallest (a, b) pair
        if not vals[pos] < 0.0:
            break
        a, b = int(act[iu[0][pos]]), int(act[iu[1][pos]])
        P[a] += P[b]
        ll[a] = _row_ll_np(P[a], alpha)[0]
        alive[b] = False
        label[label == b] = a
    return label


NUMPY_IMPL = {
    "count_pairs": _count_pairs_np,
    "pairwise_dissimilarity": _pairwise_np,
    "linkage_merge": _linkage_merge_np,
    "cut_labels": _cut_labels_np,
    "merge_ll_deltas": _merge_ll_deltas_np,
    "bhc_labels": _bhc_labels_np,
}


# --------------------------------------------------------------------------
# numba implementations (same contracts, explicit loops)
# --------------------------------------------------------------------------

def _build_numba_impl():
    from numba import njit

    @njit(cache=True)
    def count_pairs_nb(codes, values, n_rows, n_cols):
        out = np.zeros((n_rows, n_cols), dtype=np.int64)
        for i in range(codes.shape[0]):
            out[codes[i], values[i]] += 1
        return out

    @njit(cache=True)
    def pairwise_nb(V, code, kappa):
        n, s = V.shape
        M = np.zeros((n, n))
        if code == HELLINGER or code == FISHER:
            H = np.sqrt(V)
        elif code == KANIADAKIS:
            H = (V**kappa - V ** (-kappa)) / (2.0 * kappa)
        elif code == TOTALKL:
            H = np.log(V)
        else:
            H = V
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0.0
                if code == TV:
                    for x in range(s):
                        acc += abs(V[i, x] - V[j, x])
                    acc *= 0.5
                elif code == HELLINGER:
                    for x in range(s):
                        d = H[i, x] - H[j, x]
                        acc += d * d
                    acc = math.sqrt(0.5 * acc)
                elif code == FISHER:
                    for x in range(s):
                        acc += H[i, x] * H[j, x]
                    if acc > 1.0:
                        acc = 1.0
                    elif acc < 0.0:
                        acc = 0.0
                    t = math.acos(acc)
                    acc = 4.0 * t * t
                elif code == JS:
                    for x in range(s):
                        p = V[i, x]
                        q = V[j, x]
                        if p > 0.0:
                            acc += p * math.log(2.0 * p / (p + q))
                        if q > 0.0:
                            acc += q * math.log(2.0 * q / (p + q))
                    acc *= 0.5
                else:  # KANIADAKIS and TOTALKL share the symmetrized form
                    for x in range(s):
                        acc += (H[i, x] - H[j, x]) * (V[i, x] - V[j, x])
                M[i, j] = acc
                M[j, i] = acc
        return M

    _SENTINEL = 1e300  # masks the diagonal; far above any squared distance

    @njit(cache=True)
    def _rescan_row_nb(W, m, i, rmin, argmin):
        bv = _SENTINEL
        ba = -1
        for j in range(m):
            v = W[i, j]
            if v < bv:
                bv = v
                ba = j
        rmin[i] = bv
        argmin[i] = ba

    @njit(cache=True)
    def linkage_merge_nb(D, code):
        # Active clusters stay compacted in the leading slots of W (with a
        # sentinel diagonal). Each row caches its exact minimum and where
        # it is attained; a merge only rescans rows whose cached position
        # was touched. For the smallest-id-pair tie rule it is enough to
        # take the smallest cluster id among rows achieving the global
        # minimum, then that row's smallest-id partner (both endpoints of
        # a minimal pair achieve the row minimum).
        n = D.shape[0]
        merges = np.zeros((n - 1, 4))
        if n == 1:
            return merges
        W = D.copy()
        if code == WARD_D2:
            W = W * W
        for i in range(n):
            W[i, i] = _SENTINEL
        size = np.ones(n)
        ids = np.arange(n, dtype=np.int64)
        rmin = np.empty(n)
        argmin = np.empty(n, dtype=np.int64)
        for i in range(n):
            _rescan_row_nb(W, n, i, rmin, argmin)
        next_id = n
        for step in range(n - 1):
            m = n - step
            best = _SENTINEL
            for i in range(m):
                best = min(best, rmin[i])
            ga = -1
            for i in range(m):
                if rmin[i] == best and (ga < 0 or ids[i] < ids[ga]):
                    ga = i
            gb = -1
            for j in range(m):
                if j != ga and W[ga, j] == best and (gb < 0 or ids[j] < ids[gb]):
                    gb = j
            blo = ids[ga]
            bhi = ids[gb]
            a = min(ga, gb)
            b = max(ga, gb)
            ni = size[a]
            nj = size[b]
            dij = W[a, b]
            for k in range(m):
                if k == a or k == b:
                    continue
                dki = W[a, k]
                dkj = W[b, k]
                if code == AVERAGE:
                    nd = (ni * dki + nj * dkj) / (ni + nj)
                elif code == COMPLETE:
                    nd = max(dki, dkj)
                elif code == MCQUITTY:
                    nd = 0.5 * (dki + dkj)
                else:
                    nk = size[k]
                    nd = ((ni + nk) * dki + (nj + nk) * dkj - nk * dij) / (ni + nj + nk)
                W[a, k] = nd
                W[k, a] = nd
            size[a] = ni + nj
            if code == WARD_D2:
                height = math.sqrt(max(dij, 0.0))
            else:
                height = dij
            merges[step, 0] = blo
            merges[step, 1] = bhi
            merges[step, 2] = height
            merges[step, 3] = size[a]
            ids[a] = next_id
            next_id += 1
            last = m - 1
            if b != last:  # retire slot b by moving the last active cluster in
                for k in range(m):
                    W[b, k] = W[last, k]
                    W[k, b] = W[k, last]
                W[b, b] = _SENTINEL
                ids[b] = ids[last]
                size[b] = size[last]
                rmin[b] = rmin[last]
                argmin[b] = argmin[last]
            # repair caches against the new active prefix of length m - 1:
            # rows keyed to a touched slot rescan; everyone else only needs
            # the new distance to the merged cluster checked in
            for k in range(m - 1):
                if k == a:
                    continue
                am = argmin[k]
                if am == a or am == b:
                    _rescan_row_nb(W, m - 1, k, rmin, argmin)
                    continue
                if am == last:
                    argmin[k] = b  # same cluster, moved slot
                v = W[k, a]
                if v < rmin[k]:
                    rmin[k] = v
                    argmin[k] = a
            _rescan_row_nb(W, m - 1, a, rmin, argmin)
        return merges

    @njit(cache=True)
    def cut_labels_nb(pairs, n, k):
        parent = np.arange(2 * n - 1)
        for step in range(n - k):
            parent[pairs[step, 0]] = n + step
            parent[pairs[step, 1]] = n + step
        labels = np.empty(n, dtype=np.int64)
        remap = np.full(2 * n - 1, -1, dtype=np.int64)
        fresh = 0
        for i in range(n):
            r = i
            while parent[r] != r:
                r = parent[r]
            node = i  # compress the chased path for later leaves
            while parent[node] != r:
                nxt = parent[node]
                parent[node] = r
                node = nxt
            if remap[r] < 0:
                remap[r] = fresh
                fresh += 1
            labels[i] = remap[r]
        return labels

    @njit(cache=True)
    def _row_ll_nb(row, alpha):
        s = row.shape[0]
        denom = row.sum() + alpha * s
        acc = 0.0
        for x in range(s):
            if row[x] > 0.0:
                acc += row[x] * (math.log(row[x] + alpha) - math.log(denom))
        return acc

    @njit(cache=True)
    def merge_ll_deltas_nb(rows, pairs, alpha):
        m, s = rows.shape
        pooled = np.zeros((2 * m - 1, s))
        pooled[:m] = rows
        ll = np.empty(2 * m - 1)
        for i in range(m):
            ll[i] = _row_ll_nb(pooled[i], alpha)
        deltas = np.empty(pairs.shape[0])
        for t in range(pairs.shape[0]):
            a = pairs[t, 0]
            b = pairs[t, 1]
            for x in range(s):
                pooled[m + t, x] = pooled[a, x] + pooled[b, x]
            ll[m + t] = _row_ll_nb(pooled[m + t], alpha)
            deltas[t] = ll[m + t] - ll[a] - ll[b]
        return deltas

    @njit(cache=True)
    def bhc_labels_nb(counts, alpha, log_n):
        m, s = counts.shape
        label = np.arange(m, dtype=np.int64)
        if m == 1:
            return label
        P = counts.astype(np.float64).copy()
        ll = np.empty(m)
        for i in range(m):
            ll[i] = _row_ll_nb(P[i], alpha)
        alive = np.ones(m, dtype=np.bool_)
        penalty = (s - 1.0) * log_n
        merged = np.empty(s)
        while True:
            best = 0.0
            ba = -1
            bb = -1
            for a in range(m):
                if not alive[a]:
                    continue
                for b in range(a + 1, m):
                    if not alive[b]:
                        continue
                    for x in range(s):
                        merged[x] = P[a, x] + P[b, x]
                    delta = -2.0 * (_row_ll_nb(merged, alpha) - ll[a] - ll[b]) - penalty
                    if delta < best:  # first minimal pair in (a, b) order wins ties
                        best = delta
                        ba = a
                        bb = b
            if ba < 0:
                break
            for x in range(s):
                P[ba, x] += P[bb, x]
            ll[ba] = _row_ll_nb(P[ba], alpha)
            alive[bb] = False
            for i in range(m):
                if label[i] == bb:
                    label[i] = ba
        return label

    return {
        "count_pairs": count_pairs_nb,
        "pairwise_dissimilarity": pairwise_nb,
        "linkage_merge": linkage_merge_nb,
        "cut_labels": cut_labels_nb,
        "merge_ll_deltas": merge_ll_deltas_nb,
        "bhc_labels": bhc_labels_nb,
    }


def _select_backend():
    flag = os.environ.get("STAGETREE_NUMBA", "").strip().lower()
    if flag in ("0", "false", "off", "no"):
        return "numpy", None
    try:
        impl = _build_numba_impl()
    except ImportError:
        return "numpy", None
    return "numba", impl


ACTIVE_BACKEND, NUMBA_IMPL = _select_backend()
NUMBA_AVAILABLE = NUMBA_IMPL is not None

_active = NUMBA_IMPL if NUMBA_IMPL is not None else NUMPY_IMPL

count_pairs = _active["count_pairs"]
pairwise_dissimilarity = _active["pairwise_dissimilarity"]
linkage_merge = _active["linkage_merge"]
cut_labels = _active["cut_labels"]
merge_ll_deltas = _active["merge_ll_deltas"]
bhc_labels = _active["bhc_labels"]
