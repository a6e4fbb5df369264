"""Pure-Python versions of the compiled kernels in ``_ckernels.pyx``.

Signatures and results match the compiled module exactly; the test suite
runs both and compares them.
"""

from __future__ import annotations


def _hit(v, c, nb_ptr, nb_idx, nb_w, tab_ptr, s, guesses):
    code = 0
    for i in range(nb_ptr[v], nb_ptr[v + 1]):
        code += c[nb_idx[i]] * nb_w[i]
    base = tab_ptr[v] + code * s
    x = c[v]
    for j in range(base, base + s):
        if guesses[j] == x:
            return True
    return False


def first_demonic_range(palette, nb_ptr, nb_idx, nb_w, tab_ptr, s, guesses, start, stop):
    """First rank in ``[start, stop)`` whose coloring nobody guesses, else -1.

    Ranks enumerate colorings lexicographically (vertex 0 most significant).
    """
    palette = [int(a) for a in palette]
    nb_ptr, nb_idx, nb_w, tab_ptr = (list(map(int, a)) for a in (nb_ptr, nb_idx, nb_w, tab_ptr))
    guesses = list(map(int, guesses))
    n = len(palette)
    c = [0] * n
    r = int(start)
    for v in range(n - 1, -1, -1):
        r, c[v] = divmod(r, palette[v])
    rank = int(start)
    while rank < stop:
        for v in range(n):
            if _hit(v, c, nb_ptr, nb_idx, nb_w, tab_ptr, s, guesses):
                break
        else:
            return rank
        rank += 1
        v = n - 1
        while v >= 0:
            c[v] += 1
            if c[v] < palette[v]:
                break
            c[v] = 0
            v -= 1
    return -1


def first_demonic_list(palette, nb_ptr, nb_idx, nb_w, tab_ptr, s, guesses, cols):
    """Index of the first row of ``cols`` that nobody guesses, else -1."""
    nb_ptr, nb_idx, nb_w, tab_ptr = (list(map(int, a)) for a in (nb_ptr, nb_idx, nb_w, tab_ptr))
    guesses = list(map(int, guesses))
    n = len(palette)
    for i, row in enumerate(cols):
        c = [int(x) for x in row]
        if not any(_hit(v, c, nb_ptr, nb_idx, nb_w, tab_ptr, s, guesses) for v in range(n)):
            return i
    return -1


# -- solver search -------------------------------------------------------------
#
# Cells are (vertex, view) pairs; every admissible coloring touches one cell
# per vertex.  ``cell_of[i*n + v]`` / ``col_of[i*n + v]`` give coloring i's
# cell and color at v; ``mem_ptr``/``mem_idx`` list, for every (cell, color),
# the colorings that cell would win with that color (CSR, key cell*P + color).

WINNABLE, NOT_WINNABLE, UNKNOWN = 1, 0, 2


def solve_search(n, M, s, P, cell_pal, cell_of, col_of, mem_ptr, mem_idx,
                 init_cells, init_colors, forbid_cells, forbid_colors,
                 node_limit, time_limit, out_sets):
    """Backtracking search for a winning table assignment.

    Returns ``(status, nodes)``; on success ``out_sets[cell*P + x]`` is 1 for
    every color assigned to a cell.
    """
    import time

    C = len(cell_pal)
    cell_of = [int(x) for x in cell_of]
    col_of = [int(x) for x in col_of]
    mem_ptr = [int(x) for x in mem_ptr]
    mem_idx = [int(x) for x in mem_idx]
    cell_pal = [int(x) for x in cell_pal]

    cset = [0] * (C * P)
    forb = [0] * (C * P)
    csize = [0] * C
    hits = [0] * M
    opts = [n] * M
    cnt = [mem_ptr[key + 1] - mem_ptr[key] for key in range(C * P)]
    unhit = [M]
    trail = []  # ("a", cell, x, closed) | ("f", cell, x, effective)

    def members(cell, x):
        key = cell * P + x
        return mem_idx[mem_ptr[key]:mem_ptr[key + 1]]

    def mark_hit(j, delta):
        base = j * n
        for v in range(n):
            cnt[cell_of[base + v] * P + col_of[base + v]] += delta
        unhit[0] += delta

    def assign(cell, x):
        """Add color x to cell; False on an immediate conflict (still trailed)."""
        key = cell * P + x
        cset[key] = 1
        csize[cell] += 1
        for j in members(cell, x):
            opts[j] -= 1
            hits[j] += 1
            if hits[j] == 1:
                mark_hit(j, -1)
        closed = csize[cell] == s
        trail.append(("a", cell, x, closed))
        ok = True
        if closed:
            for y in range(cell_pal[cell]):
                if cset[cell * P + y] or forb[cell * P + y]:
                    continue
                for j in members(cell, y):
                    opts[j] -= 1
                    if opts[j] == 0 and hits[j] == 0:
                        ok = False
        return ok

    def forbid(cell, x):
        key = cell * P + x
        effective = csize[cell] < s and not cset[key] and not forb[key]
        forb[key] += 1
        trail.append(("f", cell, x, effective))
        ok = True
        if effective:
            for j in members(cell, x):
                opts[j] -= 1
                if opts[j] == 0 and hits[j] == 0:
                    ok = False
        return ok

    def undo_to(mark):
        while len(trail) > mark:
            kind, cell, x, flag = trail.pop()
            key = cell * P + x
            if kind == "f":
                forb[key] -= 1
                if flag:
                    for j in members(cell, x):
                        opts[j] += 1
                continue
            if flag:
                for y in range(cell_pal[cell]):
                    if cset[cell * P + y] or forb[cell * P + y]:
                        continue
                    for j in members(cell, y):
                        opts[j] += 1
            for j in members(cell, x):
                opts[j] += 1
                hits[j] -= 1
                if hits[j] == 0:
                    mark_hit(j, +1)
            cset[key] = 0
            csize[cell] -= 1

    tight = [-1, 0]  # must-use cell with the fewest live colors, and that count

    def propagate():
        """Counting bound plus slack reasoning, to a fixpoint; False on a dead end.

        Open cell ``c`` can win at most the sum of its ``room`` largest
        counts; the excess of that total over the unwon colorings is the
        slack.  A color whose count falls short of the cell's ``room``-th
        best by more than the slack can never be part of a winning
        completion, so it is forbidden.  A cell whose ``room``-th best count
        exceeds the slack must still receive a color ("must-use"); with one
        slot left and one live color, that color is assigned.
        """
        while True:
            total = 0
            thresholds = []
            for cell in range(C):
                room = s - csize[cell]
                if room <= 0:
                    continue
                vals = [cnt[cell * P + y] for y in range(cell_pal[cell])
                        if not cset[cell * P + y] and not forb[cell * P + y]]
                vals.sort(reverse=True)
                total += sum(vals[:room])
                if len(vals) >= room and vals[room - 1] > 0:
                    thresholds.append((cell, room, vals[room - 1]))
            slack = total - unhit[0]
            if slack < 0:
                return False
            forced = []
            tight[0], tight[1] = -1, P + 1
            for cell, room, th in thresholds:
                if th <= slack:
                    continue
                alive = 0
                last = -1
                for y in range(cell_pal[cell]):
                    key = cell * P + y
                    if cset[key] or forb[key]:
                        continue
                    if th - cnt[key] > slack:
                        if not forbid(cell, y):
                            return False
                    else:
                        alive += 1
                        last = y
                if room == 1 and alive == 1:
                    forced.append((cell, last))
                elif alive < tight[1]:
                    tight[0], tight[1] = cell, alive
            if not forced:
                return True
            for cell, y in forced:
                if csize[cell] < s and not forb[cell * P + y] and not cset[cell * P + y]:
                    if not assign(cell, y):
                        return False
            if unhit[0] == 0:
                return True

    def choose():
        best, best_opts = -1, n + 1
        for j in range(M):
            if hits[j] == 0 and opts[j] < best_opts:
                best, best_opts = j, opts[j]
                if best_opts <= 1:
                    break
        return best, best_opts

    def item(frame, i):
        """(cell, color) of branch ``i``: vertex ``i`` of a coloring, or color ``i`` of a cell."""
        if frame[0] == 0:
            j = frame[1]
            return cell_of[j * n + i], col_of[j * n + i]
        return frame[1], i

    ok = True
    for cell, x in zip(init_cells, init_colors):
        ok = assign(int(cell), int(x)) and ok
    for cell, x in zip(forbid_cells, forbid_colors):
        ok = forbid(int(cell), int(x)) and ok
    if not ok:
        return NOT_WINNABLE, 0

    deadline = time.monotonic() + time_limit
    nodes = 0
    # frame: [kind (0 coloring, 1 cell), id, branch count, next branch,
    #         current branch, entry mark, branch mark]
    stack = []
    while True:
        # enter a node
        nodes += 1
        if nodes > node_limit or (nodes & 1023 == 0 and time.monotonic() > deadline):
            return UNKNOWN, nodes
        failed = True
        mark = len(trail)
        if unhit[0] == 0 or propagate():
            if unhit[0] == 0:
                for key in range(C * P):
                    out_sets[key] = cset[key]
                return WINNABLE, nodes
            j, jopts = choose()
            if tight[0] >= 0 and 0 < tight[1] < jopts:
                stack.append([1, tight[0], cell_pal[tight[0]], 0, -1, mark, len(trail)])
                failed = False
            elif jopts > 0:
                stack.append([0, j, n, 0, -1, mark, len(trail)])
                failed = False
        elif not stack:
            return NOT_WINNABLE, nodes
        # find the next branch to descend into, backtracking as needed
        while True:
            if not stack:
                return NOT_WINNABLE, nodes
            frame = stack[-1]
            exhausted = False
            if failed and frame[4] >= 0:
                undo_to(frame[6])
                if not forbid(*item(frame, frame[4])):
                    exhausted = True
            descended = False
            while not exhausted and frame[3] < frame[2]:
                i = frame[3]
                frame[3] += 1
                cell, x = item(frame, i)
                if csize[cell] >= s or forb[cell * P + x] or cset[cell * P + x]:
                    continue
                frame[4] = i
                frame[6] = len(trail)
                if assign(cell, x):
                    descended = True
                    break
                undo_to(frame[6])
                if not forbid(cell, x):
                    exhausted = True
            if descended:
                break
            undo_to(frame[5])
            stack.pop()
            failed = True
