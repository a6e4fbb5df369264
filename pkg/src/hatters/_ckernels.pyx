# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  ``_pykernels`` holds the reference versions."""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset
import time


ctypedef long long i64
ctypedef int i32
ctypedef unsigned char u8

WINNABLE, NOT_WINNABLE, UNKNOWN = 1, 0, 2


# -- coloring scans --------------------------------------------------------------

cdef inline bint _hit(int v, const i64* c, const i64* nb_ptr, const i64* nb_idx,
                      const i64* nb_w, const i64* tab_ptr, int s, const i32* guesses) noexcept nogil:
    cdef i64 code = 0, base
    cdef i64 i
    cdef int j
    for i in range(nb_ptr[v], nb_ptr[v + 1]):
        code += c[nb_idx[i]] * nb_w[i]
    base = tab_ptr[v] + code * s
    for j in range(s):
        if guesses[base + j] == c[v]:
            return True
    return False


def first_demonic_range(const i64[::1] palette, const i64[::1] nb_ptr, const i64[::1] nb_idx,
                        const i64[::1] nb_w, const i64[::1] tab_ptr, int s,
                        const i32[::1] guesses, i64 start, i64 stop):
    cdef int n = palette.shape[0]
    cdef int v
    cdef i64 r = start, rank = start, result = -1
    cdef bint any_hit
    cdef i64* c = <i64*> malloc((n + 1) * sizeof(i64))
    if c == NULL:
        raise MemoryError()
    with nogil:
        for v in range(n - 1, -1, -1):
            c[v] = r % palette[v]
            r = r // palette[v]
        while rank < stop:
            any_hit = False
            for v in range(n):
                if _hit(v, c, &nb_ptr[0], &nb_idx[0] if nb_idx.shape[0] else NULL,
                        &nb_w[0] if nb_w.shape[0] else NULL, &tab_ptr[0], s, &guesses[0]):
                    any_hit = True
                    break
            if not any_hit:
                result = rank
                break
            rank += 1
            v = n - 1
            while v >= 0:
                c[v] += 1
                if c[v] < palette[v]:
                    break
                c[v] = 0
                v -= 1
    free(c)
    return result


def first_demonic_list(const i64[::1] palette, const i64[::1] nb_ptr, const i64[::1] nb_idx,
                       const i64[::1] nb_w, const i64[::1] tab_ptr, int s,
                       const i32[::1] guesses, const i64[:, ::1] cols):
    cdef int n = palette.shape[0]
    cdef i64 i, result = -1
    cdef int v
    cdef bint any_hit
    with nogil:
        for i in range(cols.shape[0]):
            any_hit = False
            for v in range(n):
                if _hit(v, &cols[i, 0], &nb_ptr[0], &nb_idx[0] if nb_idx.shape[0] else NULL,
                        &nb_w[0] if nb_w.shape[0] else NULL, &tab_ptr[0], s, &guesses[0]):
                    any_hit = True
                    break
            if not any_hit:
                result = i
                break
    return result


# -- tree demon ------------------------------------------------------------------

cdef bint _has_cube(const u8* P, int ndim, int k, int m, u8* scratch) noexcept nogil:
    """Same recursion as ``demon._has_cube`` on a flat C-order k^ndim array."""
    cdef i64 sub = 1, need = 1, x
    cdef int a, i, t, nrows = 0
    cdef int rows[64]
    cdef int idx[64]
    cdef i64 cnt
    if ndim == 0:
        return P[0] != 0
    for i in range(ndim - 1):
        sub *= k
        need *= m
    for a in range(k):
        cnt = 0
        for x in range(sub):
            cnt += P[a * sub + x]
        if cnt >= need:
            rows[nrows] = a
            nrows += 1
    if nrows < m:
        return False
    for i in range(m):
        idx[i] = i
    while True:
        cnt = 0
        for x in range(sub):
            scratch[x] = 1
            for i in range(m):
                scratch[x] &= P[rows[idx[i]] * sub + x]
            cnt += scratch[x]
        if cnt >= need and _has_cube(scratch, ndim - 1, k, m, scratch + sub):
            return True
        # next m-combination of range(nrows)
        i = m - 1
        while i >= 0 and idx[i] == nrows - m + i:
            i -= 1
        if i < 0:
            return False
        idx[i] += 1
        for t in range(i + 1, m):
            idx[t] = idx[t - 1] + 1


cdef int _pinned(int v, int pin_pos, int pin_color, int k, int s, int deg, i64 tab_off,
                 const i32* guesses, int d, u8* out) noexcept nogil:
    """Indicator over the other coordinates: does v's rule guess d there?

    Coordinates keep neighbor order with the pinned one removed; the first
    remaining neighbor is the most significant (C order), matching numpy.
    Returns the number of remaining coordinates.
    """
    cdef int t = deg - 1, i, j
    cdef i64 size = 1, y, code, rem, digit, w
    cdef i64 wts[64]
    w = 1
    for i in range(deg):
        wts[i] = w
        w *= k
    for i in range(t):
        size *= k
    for y in range(size):
        code = pin_color * wts[pin_pos]
        rem = y
        for i in range(deg - 1, -1, -1):  # last remaining coordinate is least significant
            if i == pin_pos:
                continue
            digit = rem % k
            rem //= k
            code += digit * wts[i]
        out[y] = 0
        for j in range(s):
            if guesses[tab_off + code * s + j] == d:
                out[y] = 1
    return t


def tree_demon(int k, int s, const i64[::1] nb_ptr, const i64[::1] nb_idx, const i64[::1] tab_ptr,
               const i32[::1] guesses, const i64[::1] parent, const i64[::1] roots,
               const i64[::1] targets, i64[::1] out):
    """Tree recursion with brute dominant sets; 0 on success, else failing vertex + 1."""
    cdef int n = out.shape[0]
    cdef int maxdeg = 0, v, i, r
    cdef i64 bufsize = 1
    for v in range(n):
        if nb_ptr[v + 1] - nb_ptr[v] > maxdeg:
            maxdeg = nb_ptr[v + 1] - nb_ptr[v]
    if maxdeg > 60 or k > 64:
        raise ValueError("degree or palette too large for the tree kernel")
    for i in range(maxdeg):
        bufsize *= k
    cdef u8* P = <u8*> malloc(bufsize + 1)
    cdef u8* scratch = <u8*> malloc(2 * bufsize + 2)
    cdef int* allowed = <int*> malloc((n * k + 1) * sizeof(int))
    cdef int* nallowed = <int*> malloc((n + 1) * sizeof(int))
    cdef int* stack = <int*> malloc((n + 1) * sizeof(int))
    cdef int* ctr = <int*> malloc((maxdeg + 1) * sizeof(int))
    cdef int* kids = <int*> malloc((maxdeg + 1) * sizeof(int))
    cdef int status = 0
    try:
        for i in range(n):
            out[i] = -1
        for r in range(roots.shape[0]):
            out[roots[r]] = targets[r]
            status = _tree_solve(roots[r], k, s, nb_ptr, nb_idx, tab_ptr, guesses, parent, out,
                                 P, scratch, allowed, nallowed, stack, ctr, kids)
            if status:
                break
    finally:
        free(P); free(scratch); free(allowed); free(nallowed); free(stack); free(ctr); free(kids)
    return status


cdef int _pos(const i64[::1] nb_ptr, const i64[::1] nb_idx, int v, int u) noexcept nogil:
    cdef i64 i
    for i in range(nb_ptr[v], nb_ptr[v + 1]):
        if nb_idx[i] == u:
            return <int> (i - nb_ptr[v])
    return -1


cdef int _tree_solve(int root, int k, int s, const i64[::1] nb_ptr, const i64[::1] nb_idx,
                     const i64[::1] tab_ptr, const i32[::1] guesses, const i64[::1] parent,
                     i64[::1] out, u8* P, u8* scratch, int* allowed, int* nallowed,
                     int* stack, int* ctr, int* kids) noexcept nogil:
    # out[root] already holds the target; vertices are finished in DFS preorder
    cdef int top = 0, v, p, u, nk, i, d, t, cnt, x, j, deg, ppos
    cdef i64 code, w, e
    cdef bint dom, found
    stack[top] = root
    top += 1
    while top > 0:
        top -= 1
        v = stack[top]
        p = <int> parent[v]
        deg = <int> (nb_ptr[v + 1] - nb_ptr[v])
        nk = 0
        for e in range(nb_ptr[v], nb_ptr[v + 1]):
            if nb_idx[e] != p:
                kids[nk] = <int> nb_idx[e]
                nk += 1
        # allowed colors of each child: complement of its padded dominant set
        for i in range(nk):
            u = kids[i]
            ppos = _pos(nb_ptr, nb_idx, u, v)
            cnt = 0
            nallowed[u] = 0
            for d in range(k):
                t = _pinned(u, ppos, <int> out[v], k, s, <int> (nb_ptr[u + 1] - nb_ptr[u]),
                            tab_ptr[u], &guesses[0], d, P)
                dom = _has_cube(P, t, k, k - s, scratch)
                if dom:
                    cnt += 1
                else:
                    allowed[u * k + nallowed[u]] = d
                    nallowed[u] += 1
            if cnt > s:
                return v + 1
            # pad: drop the smallest non-dominant colors until s are excluded
            while cnt < s:
                for j in range(nallowed[u] - 1):
                    allowed[u * k + j] = allowed[u * k + j + 1]
                nallowed[u] -= 1
                cnt += 1
        # first product tuple (first child slowest) on which v misses its target
        for i in range(nk):
            ctr[i] = 0
        found = False
        while True:
            code = 0
            w = 1
            j = 0
            for e in range(nb_ptr[v], nb_ptr[v + 1]):
                u = <int> nb_idx[e]
                if u == p:
                    x = <int> out[p]
                else:
                    x = allowed[u * k + ctr[j]]
                    j += 1
                code += x * w
                w *= k
            dom = False
            for t in range(s):
                if guesses[tab_ptr[v] + code * s + t] == out[v]:
                    dom = True
            if not dom:
                found = True
                break
            i = nk - 1
            while i >= 0:
                ctr[i] += 1
                if ctr[i] < nallowed[kids[i]]:
                    break
                ctr[i] = 0
                i -= 1
            if i < 0:
                break
        if not found:
            return v + 1
        for i in range(nk):
            out[kids[i]] = allowed[kids[i] * k + ctr[i]]
        for i in range(nk - 1, -1, -1):
            stack[top] = kids[i]
            top += 1
    return 0


# -- solver search ---------------------------------------------------------------

cdef struct Trail:
    i64 cell
    int x
    char kind     # 0 = assign, 1 = forbid
    char flag


cdef class _Search:
    cdef int n, s, P
    cdef i64 M, C
    cdef const i64* cell_pal
    cdef const i64* cell_of
    cdef const i64* col_of
    cdef const i64* mem_ptr
    cdef const i64* mem_idx
    cdef u8* cset
    cdef i32* forb
    cdef i32* csize
    cdef i32* hits
    cdef i32* opts
    cdef i64* cnt
    cdef i64 unhit
    cdef Trail* trail
    cdef i64 tlen, tcap
    cdef i64* vals
    cdef i64* th_cell
    cdef i64* th_val
    cdef i64* f_cell
    cdef i64* f_color
    cdef int* th_room
    cdef i64 tight_cell
    cdef int tight_alive

    def __dealloc__(self):
        free(self.cset); free(self.forb); free(self.csize); free(self.hits)
        free(self.opts); free(self.cnt); free(self.trail); free(self.vals)
        free(self.th_cell); free(self.th_val); free(self.f_cell); free(self.f_color)
        free(self.th_room)

    cdef int push(self, char kind, i64 cell, int x, char flag) except -1:
        cdef Trail* t
        if self.tlen == self.tcap:
            self.tcap = self.tcap * 2 + 64
            t = <Trail*> realloc(self.trail, self.tcap * sizeof(Trail))
            if t == NULL:
                raise MemoryError()
            self.trail = t
        self.trail[self.tlen].kind = kind
        self.trail[self.tlen].cell = cell
        self.trail[self.tlen].x = x
        self.trail[self.tlen].flag = flag
        self.tlen += 1
        return 0

    cdef inline void mark_hit(self, i64 j, int delta) noexcept:
        cdef int v
        cdef i64 base = j * self.n
        for v in range(self.n):
            self.cnt[self.cell_of[base + v] * self.P + self.col_of[base + v]] += delta
        self.unhit += delta

    cdef int assign(self, i64 cell, int x) except -1:
        cdef i64 key = cell * self.P + x, a, j, key2
        cdef int y, ok = 1
        cdef char closed
        self.cset[key] = 1
        self.csize[cell] += 1
        for a in range(self.mem_ptr[key], self.mem_ptr[key + 1]):
            j = self.mem_idx[a]
            self.opts[j] -= 1
            self.hits[j] += 1
            if self.hits[j] == 1:
                self.mark_hit(j, -1)
        closed = self.csize[cell] == self.s
        self.push(0, cell, x, closed)
        if closed:
            for y in range(self.cell_pal[cell]):
                key2 = cell * self.P + y
                if self.cset[key2] or self.forb[key2]:
                    continue
                for a in range(self.mem_ptr[key2], self.mem_ptr[key2 + 1]):
                    j = self.mem_idx[a]
                    self.opts[j] -= 1
                    if self.opts[j] == 0 and self.hits[j] == 0:
                        ok = 0
        return ok

    cdef int forbid(self, i64 cell, int x) except -1:
        cdef i64 key = cell * self.P + x, a, j
        cdef int ok = 1
        cdef char effective = self.csize[cell] < self.s and not self.cset[key] and not self.forb[key]
        self.forb[key] += 1
        self.push(1, cell, x, effective)
        if effective:
            for a in range(self.mem_ptr[key], self.mem_ptr[key + 1]):
                j = self.mem_idx[a]
                self.opts[j] -= 1
                if self.opts[j] == 0 and self.hits[j] == 0:
                    ok = 0
        return ok

    cdef void undo_to(self, i64 mark) noexcept:
        cdef Trail t
        cdef i64 key, key2, a, j
        cdef int y
        while self.tlen > mark:
            self.tlen -= 1
            t = self.trail[self.tlen]
            key = t.cell * self.P + t.x
            if t.kind == 1:
                self.forb[key] -= 1
                if t.flag:
                    for a in range(self.mem_ptr[key], self.mem_ptr[key + 1]):
                        self.opts[self.mem_idx[a]] += 1
                continue
            if t.flag:
                for y in range(self.cell_pal[t.cell]):
                    key2 = t.cell * self.P + y
                    if self.cset[key2] or self.forb[key2]:
                        continue
                    for a in range(self.mem_ptr[key2], self.mem_ptr[key2 + 1]):
                        self.opts[self.mem_idx[a]] += 1
            for a in range(self.mem_ptr[key], self.mem_ptr[key + 1]):
                j = self.mem_idx[a]
                self.opts[j] += 1
                self.hits[j] -= 1
                if self.hits[j] == 0:
                    self.mark_hit(j, 1)
            self.cset[key] = 0
            self.csize[t.cell] -= 1

    cdef int propagate(self) except -1:
        """Mirror of the Python ``propagate``; 1 = consistent, 0 = dead end."""
        cdef i64 total, cell, key, tmp, slack, th
        cdef int room, y, nv, a, b, nth, t, alive, last, nforced
        while True:
            total = 0
            nth = 0
            for cell in range(self.C):
                room = self.s - self.csize[cell]
                if room <= 0:
                    continue
                nv = 0
                for y in range(self.cell_pal[cell]):
                    key = cell * self.P + y
                    if not self.cset[key] and not self.forb[key]:
                        self.vals[nv] = self.cnt[key]
                        nv += 1
                for a in range(1, nv):  # insertion sort, descending
                    tmp = self.vals[a]
                    b = a - 1
                    while b >= 0 and self.vals[b] < tmp:
                        self.vals[b + 1] = self.vals[b]
                        b -= 1
                    self.vals[b + 1] = tmp
                for a in range(min(room, nv)):
                    total += self.vals[a]
                if nv >= room and self.vals[room - 1] > 0:
                    self.th_cell[nth] = cell
                    self.th_room[nth] = room
                    self.th_val[nth] = self.vals[room - 1]
                    nth += 1
            slack = total - self.unhit
            if slack < 0:
                return 0
            nforced = 0
            self.tight_cell = -1
            self.tight_alive = self.P + 1
            for t in range(nth):
                cell = self.th_cell[t]
                th = self.th_val[t]
                if th <= slack:
                    continue
                alive = 0
                last = -1
                for y in range(self.cell_pal[cell]):
                    key = cell * self.P + y
                    if self.cset[key] or self.forb[key]:
                        continue
                    if th - self.cnt[key] > slack:
                        if not self.forbid(cell, y):
                            return 0
                    else:
                        alive += 1
                        last = y
                if self.th_room[t] == 1 and alive == 1:
                    self.f_cell[nforced] = cell
                    self.f_color[nforced] = last
                    nforced += 1
                elif alive < self.tight_alive:
                    self.tight_cell = cell
                    self.tight_alive = alive
            if nforced == 0:
                return 1
            for t in range(nforced):
                cell = self.f_cell[t]
                y = <int> self.f_color[t]
                key = cell * self.P + y
                if self.csize[cell] < self.s and not self.forb[key] and not self.cset[key]:
                    if not self.assign(cell, y):
                        return 0
            if self.unhit == 0:
                return 1

    cdef i64 choose(self, i64* best_opts) noexcept:
        cdef i64 best = -1, j
        cdef i64 bo = self.n + 1
        for j in range(self.M):
            if self.hits[j] == 0 and self.opts[j] < bo:
                best = j
                bo = self.opts[j]
                if bo <= 1:
                    break
        best_opts[0] = bo
        return best


def solve_search(int n, i64 M, int s, int P, const i64[::1] cell_pal, const i64[::1] cell_of,
                 const i64[::1] col_of, const i64[::1] mem_ptr, const i64[::1] mem_idx,
                 const i64[::1] init_cells, const i64[::1] init_colors,
                 const i64[::1] forbid_cells, const i64[::1] forbid_colors,
                 i64 node_limit, double time_limit, u8[::1] out_sets):
    """Compiled twin of ``_pykernels.solve_search`` (same node order and result)."""
    cdef _Search S = _Search()
    cdef i64 C = cell_pal.shape[0], key, j, jopts, nodes = 0, cell, top, a, mark, fb
    cdef int x, ok = 1
    cdef bint failed, exhausted, descended
    cdef i64* frames
    cdef double deadline
    S.n, S.s, S.P, S.M, S.C = n, s, P, M, C
    S.cell_pal = &cell_pal[0] if C else NULL
    S.cell_of = &cell_of[0] if cell_of.shape[0] else NULL
    S.col_of = &col_of[0] if col_of.shape[0] else NULL
    S.mem_ptr = &mem_ptr[0]
    S.mem_idx = &mem_idx[0] if mem_idx.shape[0] else NULL
    S.cset = <u8*> malloc(C * P + 1)
    S.forb = <i32*> malloc((C * P + 1) * sizeof(i32))
    S.csize = <i32*> malloc((C + 1) * sizeof(i32))
    S.hits = <i32*> malloc((M + 1) * sizeof(i32))
    S.opts = <i32*> malloc((M + 1) * sizeof(i32))
    S.cnt = <i64*> malloc((C * P + 1) * sizeof(i64))
    S.vals = <i64*> malloc((P + 1) * sizeof(i64))
    S.th_cell = <i64*> malloc((C + 1) * sizeof(i64))
    S.th_val = <i64*> malloc((C + 1) * sizeof(i64))
    S.th_room = <int*> malloc((C + 1) * sizeof(int))
    S.f_cell = <i64*> malloc((C + 1) * sizeof(i64))
    S.f_color = <i64*> malloc((C + 1) * sizeof(i64))
    if not (S.cset and S.forb and S.csize and S.hits and S.opts and S.cnt and S.vals
            and S.th_cell and S.th_val and S.th_room and S.f_cell and S.f_color):
        raise MemoryError()
    memset(S.cset, 0, C * P + 1)
    memset(S.forb, 0, (C * P + 1) * sizeof(i32))
    memset(S.csize, 0, (C + 1) * sizeof(i32))
    memset(S.hits, 0, (M + 1) * sizeof(i32))
    for j in range(M):
        S.opts[j] = n
    for key in range(C * P):
        S.cnt[key] = mem_ptr[key + 1] - mem_ptr[key]
    S.unhit = M
    S.tight_cell = -1
    S.tight_alive = P + 1

    for a in range(init_cells.shape[0]):
        ok = S.assign(init_cells[a], <int> init_colors[a]) and ok
    for a in range(forbid_cells.shape[0]):
        ok = S.forbid(forbid_cells[a], <int> forbid_colors[a]) and ok
    if not ok:
        return NOT_WINNABLE, 0

    # frame (7 slots): kind (0 coloring, 1 cell), id, branch count, next branch,
    # current branch, entry mark, branch mark
    frames = <i64*> malloc(7 * (C * s + 2) * sizeof(i64))
    if frames == NULL:
        raise MemoryError()
    top = 0
    deadline = time.monotonic() + time_limit
    try:
        while True:
            nodes += 1
            if nodes > node_limit or ((nodes & 1023) == 0 and time.monotonic() > deadline):
                return UNKNOWN, nodes
            failed = True
            mark = S.tlen
            if S.unhit == 0 or S.propagate():
                if S.unhit == 0:
                    for key in range(C * P):
                        out_sets[key] = S.cset[key]
                    return WINNABLE, nodes
                j = S.choose(&jopts)
                if S.tight_cell >= 0 and 0 < S.tight_alive < jopts:
                    fb = 7 * top
                    frames[fb] = 1
                    frames[fb + 1] = S.tight_cell
                    frames[fb + 2] = cell_pal[S.tight_cell]
                    failed = False
                elif jopts > 0:
                    fb = 7 * top
                    frames[fb] = 0
                    frames[fb + 1] = j
                    frames[fb + 2] = n
                    failed = False
                if not failed:
                    frames[fb + 3] = 0
                    frames[fb + 4] = -1
                    frames[fb + 5] = mark
                    frames[fb + 6] = S.tlen
                    top += 1
            elif top == 0:
                return NOT_WINNABLE, nodes
            while True:
                if top == 0:
                    return NOT_WINNABLE, nodes
                fb = 7 * (top - 1)
                exhausted = False
                if failed and frames[fb + 4] >= 0:
                    S.undo_to(frames[fb + 6])
                    _item(frames, fb, frames[fb + 4], n, cell_of, col_of, &cell, &x)
                    if not S.forbid(cell, x):
                        exhausted = True
                descended = False
                while not exhausted and frames[fb + 3] < frames[fb + 2]:
                    a = frames[fb + 3]
                    frames[fb + 3] += 1
                    _item(frames, fb, a, n, cell_of, col_of, &cell, &x)
                    key = cell * P + x
                    if S.csize[cell] >= s or S.forb[key] or S.cset[key]:
                        continue
                    frames[fb + 4] = a
                    frames[fb + 6] = S.tlen
                    if S.assign(cell, x):
                        descended = True
                        break
                    S.undo_to(frames[fb + 6])
                    if not S.forbid(cell, x):
                        exhausted = True
                if descended:
                    break
                S.undo_to(frames[fb + 5])
                top -= 1
                failed = True
    finally:
        free(frames)


cdef inline void _item(const i64* frames, i64 fb, i64 i, int n, const i64[::1] cell_of,
                       const i64[::1] col_of, i64* cell, int* x) noexcept:
    cdef i64 j
    if frames[fb] == 0:
        j = frames[fb + 1]
        cell[0] = cell_of[j * n + i]
        x[0] = <int> col_of[j * n + i]
    else:
        cell[0] = frames[fb + 1]
        x[0] = <int> i
