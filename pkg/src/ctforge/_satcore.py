"""Incremental CDCL solver core.

Cython pure-Python-mode source: setup.py compiles it into the extension
``ctforge._satcore`` which shadows this file; uncompiled it runs as the pure
fallback with identical behaviour (same ops, same order, same floats).

Internals use the usual packed-literal scheme: variable v (1-based) becomes
code 2v for the positive literal and 2v+1 for the negative one, so negation
is ``code ^ 1``.  Clauses live in one flat int arena: [size, flags, lbd,
lit0, lit1, ...]; a clause reference is its arena offset.  The first two
literal slots are always the watched pair.

Design: two-watched-literal propagation with blockers, first-UIP learning,
exponential-decay activity heap, phase saving, Luby restarts, lazy clause
deletion by LBD, assumptions as forced first decisions with final-conflict
core extraction.  No operation iterates a set or dict, so runs are
reproducible for an identical (clauses, config, call-sequence) triple.

Budget accounting (shared by both backends): the per-call conflict counter
is bumped on every refutation event, including an assumption found false at
decision time, and the budget is tested right after the bump, before the
event is analysed.  A budgeted call can therefore give up on a conflict that
an unbudgeted call would have turned into a decisive Unsat; that optimism is
what callers rely on for cheap consistency probes.
"""

from __future__ import annotations

from array import array
from time import monotonic

import cython

COMPILED = cython.compiled

# solve() results
R_SAT = 0
R_UNSAT = 1
R_BUDGET = 2

# per-variable assignment states; literal value = state ^ (code & 1) when < 2
V_TRUE = 0
V_FALSE = 1
V_UNDEF = 2

# clause flag bits
F_LEARNT = 1
F_DEAD = 2

MASK64 = 0xFFFFFFFFFFFFFFFF
DOUBLE_NORM = 1.0 / 9007199254740992.0  # 2^-53

RESTART_BASE = 100
ACT_RESCALE_LIMIT = 1e100
ACT_RESCALE = 1e-100
VAR_DECAY = 0.95


def _luby(i: cython.int) -> cython.int:
    # value of the Luby sequence 1,1,2,1,1,2,4,... at index i (0-based)
    size: cython.int = 1
    seq: cython.int = 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


@cython.cclass
class CoreSolver:
    num_vars: cython.int
    ok: cython.bint
    qhead: cython.int
    trail_len: cython.int
    n_levels: cython.int
    heap_len: cython.int
    conflicts_call: cython.longlong
    conflicts_total: cython.longlong
    propagations: cython.longlong
    next_reduce: cython.longlong
    reduce_step: cython.longlong
    var_inc: cython.double
    var_inc_mult: cython.double
    rnd_dec: cython.double
    rnd_pol: cython.double
    rng: cython.ulonglong
    lbd_tick: cython.int

    ca: object          # array('i') clause arena
    trail: object       # array('i'), capacity num_vars (+pad)
    trail_lim: object   # array('i') level -> trail start
    assigns: object     # array('b') per var
    level_arr: object   # array('i') per var
    reason_arr: object  # array('i') per var, cref or -1
    polarity: object    # array('b') saved phase bit per var
    seen: object        # array('b') per var, analyze scratch
    activity: object    # array('d') per var
    heap: object        # array('i') max-heap of vars by activity
    heap_pos: object    # array('i') var -> heap slot or -1
    lbd_stamp: object   # array('i') per level, scratch for LBD counting
    watch_data: object  # list of array('i'): (cref, blocker) pairs per lit code
    watch_len: object   # array('i') used ints per lit code
    clauses: object     # list of problem crefs
    learnts: object     # list of learnt crefs
    assumptions: object  # list of lit codes for the running solve
    model_store: object  # list of V_TRUE/V_FALSE per var 1..n after Sat
    core_store: object   # list of failing assumption codes after Unsat

    def __init__(self):
        self.num_vars = 0
        self.ok = True
        self.qhead = 0
        self.trail_len = 0
        self.n_levels = 0
        self.heap_len = 0
        self.conflicts_call = 0
        self.conflicts_total = 0
        self.propagations = 0
        self.next_reduce = 4000
        self.reduce_step = 4000
        self.var_inc = 1.0
        self.var_inc_mult = 1.0 / VAR_DECAY
        self.rnd_dec = 0.0
        self.rnd_pol = 0.0
        self.rng = 0
        self.lbd_tick = 0
        self.ca = array("i", [0, 0, 0])  # pad so cref 0 is never a clause
        self.trail = array("i", [0])
        self.trail_lim = array("i", [0])
        self.assigns = array("b", [V_UNDEF])
        self.level_arr = array("i", [0])
        self.reason_arr = array("i", [-1])
        self.polarity = array("b", [1])
        self.seen = array("b", [0])
        self.activity = array("d", [0.0])
        self.heap = array("i")
        self.heap_pos = array("i", [-1])
        self.lbd_stamp = array("i", [0])
        self.watch_data = [array("i"), array("i")]
        self.watch_len = array("i", [0, 0])
        self.clauses = []
        self.learnts = []
        self.assumptions = []
        self.model_store = []
        self.core_store = []

    # ------------------------------------------------------------- setup

    def set_seed(self, seed) -> None:
        self.rng = seed & MASK64

    def set_random(self, decision_freq: cython.double, polarity_freq: cython.double) -> None:
        self.rnd_dec = decision_freq
        self.rnd_pol = polarity_freq

    def ensure_vars(self, n: cython.int) -> None:
        while self.num_vars < n:
            self.num_vars += 1
            v: cython.int = self.num_vars
            self.assigns.append(V_UNDEF)
            self.level_arr.append(0)
            self.reason_arr.append(-1)
            self.polarity.append(1)
            self.seen.append(0)
            self.activity.append(0.0)
            self.heap_pos.append(-1)
            self.lbd_stamp.append(0)
            self.trail.append(0)
            self.trail_lim.append(0)
            self.watch_data.append(array("i"))
            self.watch_data.append(array("i"))
            self.watch_len.append(0)
            self.watch_len.append(0)
            self._heap_insert(v)

    # ------------------------------------------------------------- RNG

    @cython.cfunc
    def _rand64(self) -> cython.ulonglong:
        self.rng = (self.rng + 0x9E3779B97F4A7C15) & MASK64
        z: cython.ulonglong = self.rng
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    @cython.cfunc
    def _rand_double(self) -> cython.double:
        return (self._rand64() >> 11) * DOUBLE_NORM

    # ------------------------------------------------------------- heap

    @cython.cfunc
    def _heap_insert(self, v: cython.int):
        pos: cython.int = self.heap_len
        if len(self.heap) > pos:
            self.heap[pos] = v
        else:
            self.heap.append(v)
        self.heap_pos[v] = pos
        self.heap_len = pos + 1
        self._heap_up(pos)

    @cython.cfunc
    def _heap_up(self, pos: cython.int):
        heap: cython.int[:] = self.heap
        hpos: cython.int[:] = self.heap_pos
        act: cython.double[:] = self.activity
        v: cython.int = heap[pos]
        a: cython.double = act[v]
        while pos > 0:
            parent: cython.int = (pos - 1) >> 1
            pv: cython.int = heap[parent]
            if a > act[pv]:
                heap[pos] = pv
                hpos[pv] = pos
                pos = parent
            else:
                break
        heap[pos] = v
        hpos[v] = pos

    @cython.cfunc
    def _heap_pop(self) -> cython.int:
        heap: cython.int[:] = self.heap
        hpos: cython.int[:] = self.heap_pos
        act: cython.double[:] = self.activity
        top: cython.int = heap[0]
        hpos[top] = -1
        n: cython.int = self.heap_len - 1
        self.heap_len = n
        if n == 0:
            return top
        v: cython.int = heap[n]
        a: cython.double = act[v]
        pos: cython.int = 0
        while True:
            left: cython.int = 2 * pos + 1
            if left >= n:
                break
            best: cython.int = left
            right: cython.int = left + 1
            if right < n and act[heap[right]] > act[heap[left]]:
                best = right
            bv: cython.int = heap[best]
            if act[bv] > a:
                heap[pos] = bv
                hpos[bv] = pos
                pos = best
            else:
                break
        heap[pos] = v
        hpos[v] = pos
        return top

    @cython.cfunc
    def _bump_var(self, v: cython.int):
        act: cython.double[:] = self.activity
        act[v] += self.var_inc
        if act[v] > ACT_RESCALE_LIMIT:
            i: cython.int = 1
            while i <= self.num_vars:
                act[i] *= ACT_RESCALE
                i += 1
            self.var_inc *= ACT_RESCALE
        if self.heap_pos[v] >= 0:
            self._heap_up(self.heap_pos[v])

    # ------------------------------------------------------------- state

    @cython.cfunc
    def _value_code(self, code: cython.int) -> cython.int:
        a: cython.int = self.assigns[code >> 1]
        if a >= V_UNDEF:
            return V_UNDEF
        return a ^ (code & 1)

    @cython.cfunc
    def _new_level(self):
        self.trail_lim[self.n_levels] = self.trail_len
        self.n_levels += 1

    @cython.cfunc
    def _enqueue(self, code: cython.int, reason: cython.int):
        v: cython.int = code >> 1
        self.assigns[v] = code & 1
        self.level_arr[v] = self.n_levels
        self.reason_arr[v] = reason
        self.trail[self.trail_len] = code
        self.trail_len += 1

    @cython.cfunc
    def _cancel_until(self, target: cython.int, save_phase: cython.bint):
        if self.n_levels <= target:
            return
        assigns: cython.schar[:] = self.assigns
        polarity: cython.schar[:] = self.polarity
        hpos: cython.int[:] = self.heap_pos
        trail: cython.int[:] = self.trail
        start: cython.int = self.trail_lim[target]
        i: cython.int = self.trail_len - 1
        while i >= start:
            code: cython.int = trail[i]
            v: cython.int = code >> 1
            assigns[v] = V_UNDEF
            if save_phase:
                polarity[v] = code & 1
            if hpos[v] < 0:
                self._heap_insert(v)
            i -= 1
        self.trail_len = start
        self.qhead = start
        self.n_levels = target

    # ------------------------------------------------------------- clauses

    @cython.cfunc
    def _alloc(self, lits, learnt: cython.bint, lbd: cython.int) -> cython.int:
        cref: cython.int = len(self.ca)
        ca = self.ca
        ca.append(len(lits))
        ca.append(F_LEARNT if learnt else 0)
        ca.append(lbd)
        ca.extend(lits)
        l0: cython.int = lits[0]
        l1: cython.int = lits[1]
        self._watch_push(l0 ^ 1, cref, l1)
        self._watch_push(l1 ^ 1, cref, l0)
        return cref

    @cython.cfunc
    def _watch_push(self, code: cython.int, cref: cython.int, blocker: cython.int):
        wl = self.watch_data[code]
        n: cython.int = self.watch_len[code]
        if len(wl) >= n + 2:
            wl[n] = cref
            wl[n + 1] = blocker
        else:
            wl.append(cref)
            wl.append(blocker)
        self.watch_len[code] = n + 2

    @cython.cfunc
    def _watch_remove(self, code: cython.int, cref: cython.int):
        wl = self.watch_data[code]
        n: cython.int = self.watch_len[code]
        i: cython.int = 0
        while i < n:
            if wl[i] == cref:
                wl[i] = wl[n - 2]
                wl[i + 1] = wl[n - 1]
                self.watch_len[code] = n - 2
                return
            i += 2

    @cython.cfunc
    def _remove_clause(self, cref: cython.int):
        ca = self.ca
        l0: cython.int = ca[cref + 3]
        l1: cython.int = ca[cref + 4]
        self._watch_remove(l0 ^ 1, cref)
        self._watch_remove(l1 ^ 1, cref)
        ca[cref + 1] = ca[cref + 1] | F_DEAD

    @cython.cfunc
    def _locked(self, cref: cython.int) -> cython.bint:
        l0: cython.int = self.ca[cref + 3]
        return self.reason_arr[l0 >> 1] == cref and self._value_code(l0) == V_TRUE

    def add_clause(self, lits) -> None:
        """lits: iterable of external nonzero ints.  Root-simplifies on entry."""
        if not self.ok:
            return
        codes = []
        top: cython.int = 0
        for l in lits:
            li: cython.int = l
            v: cython.int = li if li > 0 else -li
            if v > top:
                top = v
            codes.append((v << 1) | (1 if li < 0 else 0))
        self.ensure_vars(top)
        codes.sort()
        out = []
        prev: cython.int = -9
        for ci in codes:
            c: cython.int = ci
            if c == prev:
                continue
            if (c ^ 1) == prev:
                return  # tautology
            val: cython.int = self._value_code(c)
            if val == V_TRUE:
                return  # satisfied at root
            if val == V_FALSE:
                continue  # false at root: literal dropped
            out.append(c)
            prev = c
        if len(out) == 0:
            self.ok = False
            return
        if len(out) == 1:
            self._enqueue(out[0], -1)  # propagated lazily at the next call
            return
        cref: cython.int = self._alloc(out, False, 0)
        self.clauses.append(cref)

    # ------------------------------------------------------------- propagate

    @cython.cfunc
    def _propagate(self) -> cython.int:
        ca: cython.int[:] = self.ca
        assigns: cython.schar[:] = self.assigns
        level: cython.int[:] = self.level_arr
        reason: cython.int[:] = self.reason_arr
        trail: cython.int[:] = self.trail
        wlen: cython.int[:] = self.watch_len
        wd = self.watch_data
        lev: cython.int = self.n_levels
        tl: cython.int = self.trail_len
        ql: cython.int = self.qhead
        confl: cython.int = -1
        nprops: cython.longlong = 0
        while ql < tl:
            p: cython.int = trail[ql]
            ql += 1
            nprops += 1
            n: cython.int = wlen[p]
            if n == 0:
                continue
            wl = wd[p]
            wlv: cython.int[:] = wl
            i: cython.int = 0
            j: cython.int = 0
            false_lit: cython.int = p ^ 1
            while i < n:
                cref: cython.int = wlv[i]
                blocker: cython.int = wlv[i + 1]
                bv: cython.int = assigns[blocker >> 1]
                if bv < V_UNDEF and (bv ^ (blocker & 1)) == V_TRUE:
                    wlv[j] = cref
                    wlv[j + 1] = blocker
                    j += 2
                    i += 2
                    continue
                base: cython.int = cref + 3
                if ca[base] == false_lit:
                    ca[base] = ca[base + 1]
                    ca[base + 1] = false_lit
                first: cython.int = ca[base]
                fa: cython.int = assigns[first >> 1]
                fval: cython.int = V_UNDEF if fa >= V_UNDEF else fa ^ (first & 1)
                if first != blocker and fval == V_TRUE:
                    wlv[j] = cref
                    wlv[j + 1] = first
                    j += 2
                    i += 2
                    continue
                size: cython.int = ca[cref]
                k: cython.int = 2
                found: cython.bint = False
                while k < size:
                    q: cython.int = ca[base + k]
                    qa: cython.int = assigns[q >> 1]
                    if qa >= V_UNDEF or (qa ^ (q & 1)) == V_TRUE:
                        ca[base + 1] = q
                        ca[base + k] = false_lit
                        self._watch_push(q ^ 1, cref, first)
                        found = True
                        break
                    k += 1
                if found:
                    i += 2
                    continue
                # clause is unit or falsified under the current trail
                wlv[j] = cref
                wlv[j + 1] = first
                j += 2
                i += 2
                if fval == V_FALSE:
                    while i < n:
                        wlv[j] = wlv[i]
                        wlv[j + 1] = wlv[i + 1]
                        j += 2
                        i += 2
                    confl = cref
                    ql = tl
                else:
                    v: cython.int = first >> 1
                    assigns[v] = first & 1
                    level[v] = lev
                    reason[v] = cref
                    trail[tl] = first
                    tl += 1
            wlen[p] = j
            if confl >= 0:
                break
        self.qhead = ql
        self.trail_len = tl
        self.propagations += nprops
        return confl

    # ------------------------------------------------------------- analyze

    @cython.cfunc
    def _analyze(self, confl: cython.int):
        """First-UIP learning: returns (learnt codes, backtrack level, lbd)."""
        ca: cython.int[:] = self.ca
        seen: cython.schar[:] = self.seen
        level: cython.int[:] = self.level_arr
        reason: cython.int[:] = self.reason_arr
        trail: cython.int[:] = self.trail
        cur: cython.int = self.n_levels
        learnt = [0]
        path: cython.int = 0
        p: cython.int = -1
        index: cython.int = self.trail_len - 1
        while True:
            base: cython.int = confl + 3
            size: cython.int = ca[confl]
            start: cython.int = 0 if p < 0 else 1
            k: cython.int = start
            while k < size:
                q: cython.int = ca[base + k]
                v: cython.int = q >> 1
                if seen[v] == 0 and level[v] > 0:
                    seen[v] = 1
                    self._bump_var(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
                k += 1
            while seen[trail[index] >> 1] == 0:
                index -= 1
            p = trail[index]
            index -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = 0
            path -= 1
            if path <= 0:
                break
        learnt[0] = p ^ 1
        # backtrack level: highest level below the asserting literal's
        bt: cython.int = 0
        if len(learnt) > 1:
            max_i: cython.int = 1
            i: cython.int = 2
            while i < len(learnt):
                if level[learnt[i] >> 1] > level[learnt[max_i] >> 1]:
                    max_i = i
                i += 1
            tmp: cython.int = learnt[max_i]
            learnt[max_i] = learnt[1]
            learnt[1] = tmp
            bt = level[tmp >> 1]
        # LBD = distinct decision levels among the learnt literals
        self.lbd_tick += 1
        tick: cython.int = self.lbd_tick
        stamp: cython.int[:] = self.lbd_stamp
        lbd: cython.int = 0
        i2: cython.int = 0
        while i2 < len(learnt):
            lv: cython.int = level[learnt[i2] >> 1]
            if stamp[lv] != tick:
                stamp[lv] = tick
                lbd += 1
            i2 += 1
        i3: cython.int = 0
        while i3 < len(learnt):
            seen[learnt[i3] >> 1] = 0
            i3 += 1
        return learnt, bt, lbd

    @cython.cfunc
    def _analyze_final(self, p: cython.int):
        """Assumption literal neg(p) failed; collect the responsible subset."""
        core = [p ^ 1]
        if self.n_levels == 0:
            self.core_store = core
            return
        seen: cython.schar[:] = self.seen
        level: cython.int[:] = self.level_arr
        reason: cython.int[:] = self.reason_arr
        trail: cython.int[:] = self.trail
        ca: cython.int[:] = self.ca
        seen[p >> 1] = 1
        bottom: cython.int = self.trail_lim[0]
        i: cython.int = self.trail_len - 1
        while i >= bottom:
            code: cython.int = trail[i]
            x: cython.int = code >> 1
            if seen[x] != 0:
                r: cython.int = reason[x]
                if r < 0:
                    core.append(code)
                else:
                    base: cython.int = r + 3
                    size: cython.int = ca[r]
                    k: cython.int = 1
                    while k < size:
                        q: cython.int = ca[base + k] >> 1
                        if level[q] > 0:
                            seen[q] = 1
                        k += 1
                seen[x] = 0
            i -= 1
        seen[p >> 1] = 0
        self.core_store = core

    # ------------------------------------------------------------- reduce

    @cython.cfunc
    def _reduce_db(self):
        ca = self.ca
        cands = []
        for cref in self.learnts:
            flags = ca[cref + 1]
            if flags & F_DEAD:
                continue
            lbd = ca[cref + 2]
            if lbd <= 2:
                continue
            if self._locked(cref):
                continue
            cands.append((lbd, ca[cref], cref))
        cands.sort()
        for idx in range(len(cands) // 2, len(cands)):
            self._remove_clause(cands[idx][2])
        self.learnts = [c for c in self.learnts if not (ca[c + 1] & F_DEAD)]

    # ------------------------------------------------------------- search

    @cython.cfunc
    def _pick_branch(self) -> cython.int:
        v: cython.int = 0
        if self.rnd_dec > 0.0 and self._rand_double() < self.rnd_dec:
            nv: cython.ulonglong = self.num_vars
            while True:
                cand: cython.int = 1 + self._rand64() % nv
                if self.assigns[cand] >= V_UNDEF:
                    v = cand
                    break
        else:
            while self.heap_len > 0:
                c: cython.int = self._heap_pop()
                if self.assigns[c] >= V_UNDEF:
                    v = c
                    break
        sign: cython.int = self.polarity[v]
        if self.rnd_pol > 0.0 and self._rand_double() < self.rnd_pol:
            sign = self._rand64() & 1
        return (v << 1) | sign

    @cython.cfunc
    def _record_learnt(self, learnt, lbd: cython.int):
        if len(learnt) == 1:
            self._enqueue(learnt[0], -1)
            return
        cref: cython.int = self._alloc(learnt, True, lbd)
        self.learnts.append(cref)
        self._enqueue(learnt[0], cref)

    @cython.cfunc
    def _search(self, budget: cython.longlong, wall: cython.double) -> cython.int:
        n_assumps: cython.int = len(self.assumptions)
        deadline: cython.double = 0.0
        if wall > 0.0:
            deadline = monotonic() + wall
        curr_restarts: cython.int = 0
        while True:
            restart_limit: cython.int = _luby(curr_restarts) * RESTART_BASE
            conflict_c: cython.int = 0
            while True:
                confl: cython.int = self._propagate()
                if confl >= 0:
                    self.conflicts_call += 1
                    self.conflicts_total += 1
                    conflict_c += 1
                    if self.n_levels == 0:
                        # decisive root refutation: record it even on a budgeted call,
                        # or the falsified-at-root state could be resumed as harmless
                        self.ok = False
                        self.core_store = []
                        return R_UNSAT
                    if budget >= 0 and self.conflicts_call >= budget:
                        return R_BUDGET
                    if wall > 0.0 and (self.conflicts_call & 63) == 0 and monotonic() > deadline:
                        return R_BUDGET
                    learnt, bt, lbd = self._analyze(confl)
                    self._cancel_until(bt, True)
                    self._record_learnt(learnt, lbd)
                    self.var_inc *= self.var_inc_mult
                    if self.conflicts_total >= self.next_reduce:
                        self.next_reduce += self.reduce_step
                        self._reduce_db()
                    continue
                if conflict_c >= restart_limit:
                    self._cancel_until(0, True)
                    curr_restarts += 1
                    break
                dl: cython.int = self.n_levels
                if dl < n_assumps:
                    p: cython.int = self.assumptions[dl]
                    val: cython.int = self._value_code(p)
                    if val == V_TRUE:
                        self._new_level()  # placeholder level, nothing to enqueue
                    elif val == V_FALSE:
                        self.conflicts_call += 1
                        self.conflicts_total += 1
                        if budget >= 0 and self.conflicts_call >= budget:
                            return R_BUDGET
                        self._analyze_final(p ^ 1)
                        return R_UNSAT
                    else:
                        self._new_level()
                        self._enqueue(p, -1)
                else:
                    if self.trail_len == self.num_vars:
                        self._save_model()
                        return R_SAT
                    lit: cython.int = self._pick_branch()
                    self._new_level()
                    self._enqueue(lit, -1)

    @cython.cfunc
    def _save_model(self):
        assigns = self.assigns
        out = []
        v: cython.int = 1
        while v <= self.num_vars:
            out.append(assigns[v])
            v += 1
        self.model_store = out

    # ------------------------------------------------------------- API

    def solve_codes(self, assumps, budget, wall) -> cython.int:
        """assumps: list of lit codes; budget < 0 = off; wall <= 0 = off."""
        self.conflicts_call = 0
        self.model_store = []
        self.core_store = []
        if not self.ok:
            return R_UNSAT
        self.assumptions = list(assumps)
        # level bookkeeping space: one level per decision plus one per assumption
        need: cython.int = self.num_vars + len(self.assumptions) + 2
        while len(self.trail_lim) < need:
            self.trail_lim.append(0)
        while len(self.lbd_stamp) < need:
            self.lbd_stamp.append(0)
        confl: cython.int = self._propagate()
        if confl >= 0:
            self.ok = False
            return R_UNSAT
        res: cython.int = self._search(budget, wall)
        self._cancel_until(0, True)
        self.assumptions = []
        return res

    def propagate_codes(self, assumps):
        """Unit-propagation fixpoint under assumps; no search, no learning.

        Returns (conflict_flag, list of trail codes).  The list includes
        root-level facts, the assumptions, and everything they imply.
        """
        if not self.ok:
            return 1, []
        confl: cython.int = self._propagate()
        if confl >= 0:
            self.ok = False
            return 1, []
        need: cython.int = self.num_vars + 2
        while len(self.trail_lim) < need:
            self.trail_lim.append(0)
        self._new_level()
        failed: cython.bint = False
        for a in assumps:
            code: cython.int = a
            val: cython.int = self._value_code(code)
            if val == V_FALSE:
                failed = True
                break
            if val == V_UNDEF:
                self._enqueue(code, -1)
        if not failed:
            confl = self._propagate()
            if confl >= 0:
                failed = True
        out = []
        if not failed:
            i: cython.int = 0
            while i < self.trail_len:
                out.append(self.trail[i])
                i += 1
        self._cancel_until(0, False)
        return (1, []) if failed else (0, out)

    def get_model(self):
        return self.model_store

    def get_core(self):
        return self.core_store

    def get_num_vars(self) -> cython.int:
        return self.num_vars

    def last_conflicts(self) -> cython.longlong:
        return self.conflicts_call

    def stats(self):
        return {
            "conflicts_total": self.conflicts_total,
            "propagations": self.propagations,
            "clauses": len(self.clauses),
            "learnts": len(self.learnts),
        }
