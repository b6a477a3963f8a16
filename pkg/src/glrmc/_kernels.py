"""Hot numeric kernels: bipartite matching and exact GF(p) elimination.

Every kernel ships in two flavors: a plain Python/NumPy implementation
(the ``*_py`` names) and, when numba is importable and not disabled, a
``@njit``-compiled wrapper of the same function.  The public names
(``hk_matching``, ``gf_rank``, ...) point at the compiled version when it
is active.  Set the environment variable ``GLRMC_NUMBA=0`` before import
to force the pure-Python path (useful for debugging and benchmarking).

All kernels are deterministic: scan order is fixed ascending, there is no
randomness, and integer arithmetic is exact (int64 with moduli bounded so
products never overflow).
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("GLRMC_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in ("0", "false", "off", "no")

if NUMBA_REQUESTED:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False

BACKEND = "numba" if NUMBA_ENABLED else "python"

# Largest safe modulus: (p-1)^2 + (p-1)*(p-1) style accumulations must stay
# inside int64.  3037000499 is the floor of sqrt(2^63).
MAX_MODULUS = 3_037_000_499


def _jit(fn):
    if NUMBA_ENABLED:
        return njit(cache=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# Bipartite maximum matching (Hopcroft-Karp)
# ---------------------------------------------------------------------------


def _hk_matching_impl(support):
    """Maximum matching of a bipartite support matrix.

    ``support`` is an (n, m) uint8 array with nonzero entries marking
    edges between row vertex j and column vertex i.  Returns
    ``(size, row_match, col_match)`` where ``row_match[j]`` is the matched
    column of row j (or -1) and ``col_match[i]`` the matched row of column
    i (or -1).  Free rows are processed in ascending order and columns are
    scanned ascending, so the returned matching is deterministic.
    """
    n, m = support.shape
    inf = n + 2
    row_match = np.full(n, -1, np.int64)
    col_match = np.full(m, -1, np.int64)
    dist = np.zeros(n, np.int64)
    queue = np.zeros(n, np.int64)
    stack_row = np.zeros(n + 1, np.int64)
    stack_ci = np.zeros(n + 1, np.int64)
    desc_col = np.zeros(n + 1, np.int64)
    size = 0
    while True:
        # BFS phase: layer rows by alternating distance from free rows.
        head = 0
        tail = 0
        for j in range(n):
            if row_match[j] == -1:
                dist[j] = 0
                queue[tail] = j
                tail += 1
            else:
                dist[j] = inf
        free_dist = inf
        while head < tail:
            j = queue[head]
            head += 1
            if dist[j] >= free_dist:
                continue
            for i in range(m):
                if support[j, i] != 0:
                    j2 = col_match[i]
                    if j2 == -1:
                        if free_dist == inf:
                            free_dist = dist[j] + 1
                    elif dist[j2] == inf:
                        dist[j2] = dist[j] + 1
                        queue[tail] = j2
                        tail += 1
        if free_dist == inf:
            break
        # DFS phase: augment along shortest alternating paths.
        augmented = 0
        for j0 in range(n):
            if row_match[j0] != -1:
                continue
            top = 0
            stack_row[0] = j0
            stack_ci[0] = 0
            while top >= 0:
                j = stack_row[top]
                ci = stack_ci[top]
                moved = False
                while ci < m:
                    if support[j, ci] != 0:
                        j2 = col_match[ci]
                        if j2 == -1:
                            if dist[j] + 1 == free_dist:
                                # Flip matches along the pending path.
                                col_match[ci] = j
                                row_match[j] = ci
                                for lvl in range(top - 1, -1, -1):
                                    c = desc_col[lvl]
                                    r0 = stack_row[lvl]
                                    row_match[r0] = c
                                    col_match[c] = r0
                                size += 1
                                augmented += 1
                                top = -2
                                break
                        elif dist[j2] == dist[j] + 1:
                            desc_col[top] = ci
                            stack_ci[top] = ci + 1
                            top += 1
                            stack_row[top] = j2
                            stack_ci[top] = 0
                            moved = True
                            break
                    ci += 1
                if top == -2:
                    break
                if moved:
                    continue
                # Dead end: prune this row for the rest of the phase.
                dist[j] = inf
                top -= 1
        if augmented == 0:
            break
    return size, row_match, col_match


def _augment_exists_impl(support, row_match, banned_row, start_col):
    """Alternating-path probe used for deleted-row rank queries.

    Given a maximum matching of ``support`` in which ``banned_row`` was
    matched to ``start_col``, decide whether the matching size survives
    removal of ``banned_row``: search (read-only) for an alternating path
    from the freed column to any free row avoiding the banned one.
    """
    n, m = support.shape
    visited = np.zeros(n, np.uint8)
    stack = np.zeros(n + 2, np.int64)
    top = 0
    stack[0] = start_col
    while top >= 0:
        c = stack[top]
        top -= 1
        for j in range(n):
            if j != banned_row and support[j, c] != 0 and visited[j] == 0:
                visited[j] = 1
                jc = row_match[j]
                if jc == -1:
                    return True
                top += 1
                stack[top] = jc
    return False


# ---------------------------------------------------------------------------
# Exact linear algebra over GF(p)
# ---------------------------------------------------------------------------


def _mod_pow_impl(base, exp, p):
    result = 1
    b = base % p
    e = exp
    while e > 0:
        if e & 1:
            result = (result * b) % p
        b = (b * b) % p
        e >>= 1
    return result


# The elimination kernels call this by name, so it must be jitted first
# when numba is active (nopython code cannot call a plain function).
_mod_pow = _jit(_mod_pow_impl)


def _gf_rank_impl(a, p):
    """Rank over GF(p) via forward Gaussian elimination (int64, exact)."""
    w = a % p
    n, m = w.shape
    r = 0
    for c in range(m):
        if r >= n:
            break
        piv = -1
        for j in range(r, n):
            if w[j, c] != 0:
                piv = j
                break
        if piv == -1:
            continue
        if piv != r:
            for i2 in range(c, m):
                tmp = w[r, i2]
                w[r, i2] = w[piv, i2]
                w[piv, i2] = tmp
        inv = _mod_pow(w[r, c], p - 2, p)
        for j in range(r + 1, n):
            if w[j, c] != 0:
                f = (w[j, c] * inv) % p
                for i2 in range(c, m):
                    w[j, i2] = (w[j, i2] - f * w[r, i2]) % p
        r += 1
    return r


def _gf_left_null_impl(a, p):
    """Rows spanning the left null space of ``a`` over GF(p).

    Eliminates the augmented block [a | I]; the identity-part rows whose
    a-part vanished span {q : q a = 0} and are linearly independent.
    Returns an (n - rank, n) int64 array.
    """
    n, m = a.shape
    w = np.zeros((n, m + n), np.int64)
    for j in range(n):
        for i in range(m):
            w[j, i] = a[j, i] % p
        w[j, m + j] = 1
    r = 0
    for c in range(m):
        if r >= n:
            break
        piv = -1
        for j in range(r, n):
            if w[j, c] != 0:
                piv = j
                break
        if piv == -1:
            continue
        if piv != r:
            for i2 in range(m + n):
                tmp = w[r, i2]
                w[r, i2] = w[piv, i2]
                w[piv, i2] = tmp
        inv = _mod_pow(w[r, c], p - 2, p)
        for j in range(r + 1, n):
            if w[j, c] != 0:
                f = (w[j, c] * inv) % p
                for i2 in range(m + n):
                    w[j, i2] = (w[j, i2] - f * w[r, i2]) % p
        r += 1
    out = np.zeros((n - r, n), np.int64)
    for j in range(n - r):
        for i in range(n):
            out[j, i] = w[r + j, m + i]
    return out


def _gf_solve_aug_impl(aug, p, nb):
    """Reduce the augmented system [B | y] (y = last column) over GF(p).

    Returns ``(rank_b, rank_aug, alpha)`` where ``rank_b`` counts pivots in
    the first ``nb`` columns.  The system is consistent iff
    ``rank_aug == rank_b``; in that case ``alpha`` (free variables set to
    zero) satisfies B alpha = y.
    """
    w = aug % p
    n, mtot = w.shape
    piv_col = np.full(n, -1, np.int64)
    r = 0
    for c in range(mtot):
        if r >= n:
            break
        piv = -1
        for j in range(r, n):
            if w[j, c] != 0:
                piv = j
                break
        if piv == -1:
            continue
        if piv != r:
            for i2 in range(c, mtot):
                tmp = w[r, i2]
                w[r, i2] = w[piv, i2]
                w[piv, i2] = tmp
        inv = _mod_pow(w[r, c], p - 2, p)
        for i2 in range(c, mtot):
            w[r, i2] = (w[r, i2] * inv) % p
        for j in range(n):
            if j != r and w[j, c] != 0:
                f = w[j, c]
                for i2 in range(c, mtot):
                    w[j, i2] = (w[j, i2] - f * w[r, i2]) % p
        piv_col[r] = c
        r += 1
    rank_aug = r
    rank_b = 0
    for t in range(r):
        if piv_col[t] < nb:
            rank_b += 1
    alpha = np.zeros(nb, np.int64)
    if rank_aug == rank_b:
        for t in range(r):
            alpha[piv_col[t]] = w[t, mtot - 1]
    return rank_b, rank_aug, alpha


def _gf_rref_impl(a, p):
    """Reduced row-echelon form over GF(p).

    Returns ``(rref, piv_col, rank)`` where ``piv_col[t]`` is the pivot
    column of pivot row t (-1 padding beyond the rank).
    """
    w = a % p
    n, mtot = w.shape
    piv_col = np.full(n, -1, np.int64)
    r = 0
    for c in range(mtot):
        if r >= n:
            break
        piv = -1
        for j in range(r, n):
            if w[j, c] != 0:
                piv = j
                break
        if piv == -1:
            continue
        if piv != r:
            for i2 in range(c, mtot):
                tmp = w[r, i2]
                w[r, i2] = w[piv, i2]
                w[piv, i2] = tmp
        inv = _mod_pow(w[r, c], p - 2, p)
        for i2 in range(c, mtot):
            w[r, i2] = (w[r, i2] * inv) % p
        for j in range(n):
            if j != r and w[j, c] != 0:
                f = w[j, c]
                for i2 in range(c, mtot):
                    w[j, i2] = (w[j, i2] - f * w[r, i2]) % p
        piv_col[r] = c
        r += 1
    return w, piv_col, r


def _gf_matmul_impl(a, b, p):
    """Modular matrix product with per-term reduction (no int64 overflow)."""
    n, kk = a.shape
    _, m = b.shape
    out = np.zeros((n, m), np.int64)
    for i in range(n):
        for j in range(m):
            acc = 0
            for t in range(kk):
                acc = (acc + a[i, t] * b[t, j]) % p
            out[i, j] = acc
    return out


# ---------------------------------------------------------------------------
# Backend dispatch
# ---------------------------------------------------------------------------

hk_matching_py = _hk_matching_impl
augment_exists_py = _augment_exists_impl
gf_rank_py = _gf_rank_impl
gf_left_null_py = _gf_left_null_impl
gf_solve_aug_py = _gf_solve_aug_impl
gf_rref_py = _gf_rref_impl
gf_matmul_py = _gf_matmul_impl

hk_matching = _jit(_hk_matching_impl)
augment_exists = _jit(_augment_exists_impl)
gf_rank = _jit(_gf_rank_impl)
gf_left_null = _jit(_gf_left_null_impl)
gf_solve_aug = _jit(_gf_solve_aug_impl)
gf_rref = _jit(_gf_rref_impl)
gf_matmul = _jit(_gf_matmul_impl)

# Kernel table for benchmarks and backend-equivalence tests.
KERNELS = {
    "hk_matching": (hk_matching, hk_matching_py),
    "augment_exists": (augment_exists, augment_exists_py),
    "gf_rank": (gf_rank, gf_rank_py),
    "gf_left_null": (gf_left_null, gf_left_null_py),
    "gf_solve_aug": (gf_solve_aug, gf_solve_aug_py),
    "gf_rref": (gf_rref, gf_rref_py),
    "gf_matmul": (gf_matmul, gf_matmul_py),
}
