# cython: language_level=3, boundscheck=False, infer_types=True
"""Compiled reduction kernel; same interface and results as ``_pykernel``."""

DEF VAR = 0
DEF FREE = 1
DEF CONST = 2
DEF CON = 3
DEF LAM = 4
DEF APP = 5
DEF META = 6


cdef tuple _shift(tuple t, Py_ssize_t d, Py_ssize_t c):
    cdef long tag = t[0]
    cdef Py_ssize_t i, n
    cdef tuple args, f, a, b
    if tag == VAR:
        i = t[1]
        return (VAR, i + d) if i >= c else t
    if tag == APP:
        f = _shift(<tuple>t[1], d, c)
        a = _shift(<tuple>t[2], d, c)
        if f is t[1] and a is t[2]:
            return t
        return (APP, f, a)
    if tag == LAM:
        b = _shift(<tuple>t[1], d, c + 1)
        return t if b is t[1] else (LAM, b)
    if tag == CON:
        args = <tuple>t[2]
        n = len(args)
        if n == 0:
            return t
        return (CON, t[1], tuple([_shift(<tuple>args[i], d, c) for i in range(n)]))
    return t


cpdef tuple shift(tuple t, Py_ssize_t d, Py_ssize_t cutoff=0):
    if d == 0:
        return t
    return _shift(t, d, cutoff)


cdef tuple _beta(tuple t, tuple arg, Py_ssize_t depth):
    cdef long tag = t[0]
    cdef Py_ssize_t i, n
    cdef tuple args
    if tag == VAR:
        i = t[1]
        if i == depth:
            return shift(arg, depth, 0)
        if i > depth:
            return (VAR, i - 1)
        return t
    if tag == APP:
        return (APP, _beta(<tuple>t[1], arg, depth), _beta(<tuple>t[2], arg, depth))
    if tag == LAM:
        return (LAM, _beta(<tuple>t[1], arg, depth + 1))
    if tag == CON:
        args = <tuple>t[2]
        n = len(args)
        if n == 0:
            return t
        return (CON, t[1], tuple([_beta(<tuple>args[i], arg, depth) for i in range(n)]))
    return t


cpdef tuple beta(tuple body, tuple arg):
    return _beta(body, arg, 0)


cpdef tuple instantiate(tuple template, dict binding, Py_ssize_t depth=0):
    cdef long tag = template[0]
    cdef Py_ssize_t i, n
    cdef tuple args
    if tag == META:
        return shift(<tuple>binding[template[1]], depth, 0)
    if tag == APP:
        return (APP, instantiate(<tuple>template[1], binding, depth), instantiate(<tuple>template[2], binding, depth))
    if tag == LAM:
        return (LAM, instantiate(<tuple>template[1], binding, depth + 1))
    if tag == CON:
        args = <tuple>template[2]
        n = len(args)
        if n == 0:
            return template
        return (CON, template[1], tuple([instantiate(<tuple>args[i], binding, depth) for i in range(n)]))
    return template


cpdef bint match_pattern(tuple p, tuple t, dict binding):
    cdef Py_ssize_t i
    cdef tuple subs, args
    if p[0] == 0:
        binding[p[1]] = t
        return True
    if t[0] != CON or t[1] != p[1]:
        return False
    subs = <tuple>p[2]
    args = <tuple>t[2]
    for i in range(len(subs)):
        if not match_pattern(<tuple>subs[i], <tuple>args[i], binding):
            return False
    return True


cpdef object contract_const(rules, list args):
    cdef dict binding
    cdef Py_ssize_t i
    cdef bint ok
    for patterns, template in rules:
        binding = {}
        ok = True
        for i in range(len(patterns)):
            if not match_pattern(<tuple>patterns[i], <tuple>args[i], binding):
                ok = False
                break
        if ok:
            return instantiate(<tuple>template, binding, 0)
    return None


cdef class _Lookup:
    """Memoising wrapper around the Python-level rule lookup."""

    cdef object fn
    cdef dict memo

    def __init__(self, fn):
        self.fn = fn
        self.memo = {}

    cdef object get(self, name):
        try:
            return self.memo[name]
        except KeyError:
            entry = self.fn(name)
            self.memo[name] = entry
            return entry


cdef list _root_contracta(tuple t, _Lookup lookup):
    cdef list out = []
    cdef long tag = t[0]
    cdef tuple f, head
    cdef list args
    if tag == APP:
        f = <tuple>t[1]
        if f[0] == LAM:
            out.append(_beta(<tuple>f[1], <tuple>t[2], 0))
        head = t
        args = []
        while head[0] == APP:
            args.append(head[2])
            head = <tuple>head[1]
        if head[0] == CONST:
            entry = lookup.get(head[1])
            if entry is not None and entry[0] == len(args):
                args.reverse()
                r = contract_const(entry[1], args)
                if r is not None:
                    out.append(r)
    elif tag == CONST:
        entry = lookup.get(t[1])
        if entry is not None and entry[0] == 0:
            r = contract_const(entry[1], [])
            if r is not None:
                out.append(r)
    return out


def root_contracta(tuple t, lookup):
    return _root_contracta(t, _Lookup(lookup))


cdef void _reducts(tuple t, _Lookup lookup, tuple pos, list out):
    cdef long tag
    cdef tuple f, a, args
    cdef list sub, new
    cdef Py_ssize_t i
    for r in _root_contracta(t, lookup):
        out.append((pos, r))
    tag = t[0]
    if tag == APP:
        f = <tuple>t[1]
        a = <tuple>t[2]
        sub = []
        _reducts(f, lookup, pos + (0,), sub)
        for p, r in sub:
            out.append((p, (APP, r, a)))
        sub = []
        _reducts(a, lookup, pos + (1,), sub)
        for p, r in sub:
            out.append((p, (APP, f, r)))
    elif tag == LAM:
        sub = []
        _reducts(<tuple>t[1], lookup, pos + (0,), sub)
        for p, r in sub:
            out.append((p, (LAM, r)))
    elif tag == CON:
        args = <tuple>t[2]
        for i in range(len(args)):
            sub = []
            _reducts(<tuple>args[i], lookup, pos + (i,), sub)
            for p, r in sub:
                new = list(args)
                new[i] = r
                out.append((p, (CON, t[1], tuple(new))))


def reducts(tuple t, lookup):
    cdef list out = []
    _reducts(t, _Lookup(lookup), (), out)
    return out


cdef list _successors(tuple t, _Lookup lookup):
    cdef list raw = []
    cdef set seen = set()
    cdef list out = []
    _reducts(t, lookup, (), raw)
    for _, r in raw:
        if r not in seen:
            seen.add(r)
            out.append(r)
    return out


def successors(tuple t, lookup):
    return _successors(t, _Lookup(lookup))


cdef class _Graph:
    cdef _Lookup lk
    cdef dict ids
    cdef list terms
    cdef list succ
    cdef list color
    cdef list longest
    cdef Py_ssize_t edges

    def __init__(self, tuple root, _Lookup lk):
        self.lk = lk
        self.ids = {root: 0}
        self.terms = [root]
        self.succ = [None]
        self.color = [1]
        self.longest = [0]
        self.edges = 0

    cdef list expand(self, Py_ssize_t i):
        cdef list raw = []
        cdef list out = []
        cdef set seen = set()
        cdef Py_ssize_t j
        _reducts(<tuple>self.terms[i], self.lk, (), raw)
        for _, r in raw:
            o = self.ids.get(r)
            if o is None:
                j = len(self.terms)
                self.ids[r] = j
                self.terms.append(r)
                self.succ.append(None)
                self.color.append(0)
                self.longest.append(0)
            else:
                j = o
            if j not in seen:
                seen.add(j)
                out.append(j)
        self.succ[i] = out
        self.edges += len(out)
        return out


def explore(tuple root, lookup, Py_ssize_t max_states):
    cdef _Graph g = _Graph(root, _Lookup(lookup))
    cdef list path = [0]
    cdef list iters = [0]
    cdef list kids
    cdef Py_ssize_t states = 1, node, i, kid, best, v, start, c, top
    g.expand(0)
    while path:
        top = len(path) - 1
        node = path[top]
        kids = <list>g.succ[node]
        i = iters[top]
        if i < len(kids):
            iters[top] = i + 1
            kid = kids[i]
            c = g.color[kid]
            if c == 1:
                start = path.index(kid)
                return ("cycle", states, [g.terms[n] for n in path[start:]] + [g.terms[kid]], g.edges)
            if c == 2:
                continue
            if states >= max_states:
                return ("exhausted", states, None, g.edges)
            g.expand(kid)
            states += 1
            g.color[kid] = 1
            path.append(kid)
            iters.append(0)
        else:
            best = 0
            for k in kids:
                v = <Py_ssize_t>g.longest[k] + 1
                if v > best:
                    best = v
            g.longest[node] = best
            g.color[node] = 2
            path.pop()
            iters.pop()
    return ("sn", states, g.longest[0], g.edges)
