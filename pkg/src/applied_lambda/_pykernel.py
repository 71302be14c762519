"""Reduction kernel over nameless terms (pure Python backend).

Nodes are the tuples produced by :func:`applied_lambda.syntax.canonical`:

    (0, i)              bound variable, de Bruijn index i
    (1, name)           free variable
    (2, name)           constant
    (3, name, args)     constructor application, args a tuple of nodes
    (4, body)           abstraction
    (5, fun, arg)       application
    (6, name)           rule metavariable (right-hand-side templates only)

``lookup(name)`` returns ``None`` for a constant without rules, otherwise
``(arity, rules)`` with each rule ``(patterns, template)``; a pattern is
``(0, var)`` or ``(1, constructor, subpatterns)``.

The compiled extension ``_ckernel`` implements the same functions.
"""

VAR, FREE, CONST, CON, LAM, APP, META = range(7)


def shift(t, d, cutoff=0):
    if d == 0:
        return t
    return _shift(t, d, cutoff)


def _shift(t, d, c):
    tag = t[0]
    if tag == VAR:
        i = t[1]
        return (VAR, i + d) if i >= c else t
    if tag == APP:
        f = _shift(t[1], d, c)
        a = _shift(t[2], d, c)
        if f is t[1] and a is t[2]:
            return t
        return (APP, f, a)
    if tag == LAM:
        b = _shift(t[1], d, c + 1)
        return t if b is t[1] else (LAM, b)
    if tag == CON:
        args = t[2]
        if not args:
            return t
        new = tuple([_shift(a, d, c) for a in args])
        return (CON, t[1], new)
    return t


def beta(body, arg):
    """Contract ``(\\. body) arg``."""
    return _beta(body, arg, 0)


def _beta(t, arg, depth):
    tag = t[0]
    if tag == VAR:
        i = t[1]
        if i == depth:
            return shift(arg, depth, 0)
        if i > depth:
            return (VAR, i - 1)
        return t
    if tag == APP:
        return (APP, _beta(t[1], arg, depth), _beta(t[2], arg, depth))
    if tag == LAM:
        return (LAM, _beta(t[1], arg, depth + 1))
    if tag == CON:
        args = t[2]
        if not args:
            return t
        return (CON, t[1], tuple([_beta(a, arg, depth) for a in args]))
    return t


def instantiate(template, binding, depth=0):
    """Replace metavariables by their bindings, shifted under the template's binders."""
    tag = template[0]
    if tag == META:
        return shift(binding[template[1]], depth, 0)
    if tag == APP:
        return (APP, instantiate(template[1], binding, depth), instantiate(template[2], binding, depth))
    if tag == LAM:
        return (LAM, instantiate(template[1], binding, depth + 1))
    if tag == CON:
        args = template[2]
        if not args:
            return template
        return (CON, template[1], tuple([instantiate(a, binding, depth) for a in args]))
    return template


def match_pattern(p, t, binding):
    if p[0] == 0:
        binding[p[1]] = t
        return True
    if t[0] != CON or t[1] != p[1]:
        return False
    subs = p[2]
    args = t[2]
    for i in range(len(subs)):
        if not match_pattern(subs[i], args[i], binding):
            return False
    return True


def contract_const(rules, args):
    """Contractum of a saturated constant application, or ``None`` if no rule matches."""
    for patterns, template in rules:
        binding = {}
        ok = True
        for i in range(len(patterns)):
            if not match_pattern(patterns[i], args[i], binding):
                ok = False
                break
        if ok:
            return instantiate(template, binding, 0)
    return None


def root_contracta(t, lookup):
    """All contracta of redexes at the root of ``t`` (beta first, then the rule)."""
    out = []
    tag = t[0]
    if tag == APP:
        f = t[1]
        if f[0] == LAM:
            out.append(beta(f[1], t[2]))
        head = t
        args = []
        while head[0] == APP:
            args.append(head[2])
            head = head[1]
        if head[0] == CONST:
            entry = lookup(head[1])
            if entry is not None and entry[0] == len(args):
                args.reverse()
                r = contract_const(entry[1], args)
                if r is not None:
                    out.append(r)
    elif tag == CONST:
        entry = lookup(t[1])
        if entry is not None and entry[0] == 0:
            r = contract_const(entry[1], [])
            if r is not None:
                out.append(r)
    return out


def reducts(t, lookup):
    """Every one-step reduct as ``(position, term)``, positions in pre-order."""
    out = []
    _reducts(t, lookup, (), out)
    return out


def _reducts(t, lookup, pos, out):
    for r in root_contracta(t, lookup):
        out.append((pos, r))
    tag = t[0]
    if tag == APP:
        f = t[1]
        a = t[2]
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
        _reducts(t[1], lookup, pos + (0,), sub)
        for p, r in sub:
            out.append((p, (LAM, r)))
    elif tag == CON:
        args = t[2]
        for i in range(len(args)):
            sub = []
            _reducts(args[i], lookup, pos + (i,), sub)
            for p, r in sub:
                new = list(args)
                new[i] = r
                out.append((p, (CON, t[1], tuple(new))))


def successors(t, lookup):
    """Distinct one-step reducts in enumeration order."""
    seen = set()
    out = []
    for _, r in reducts(t, lookup):
        if r not in seen:
            seen.add(r)
            out.append(r)
    return out


def explore(root, lookup, max_states):
    """Depth-first search of the reduction graph from ``root``.

    Returns one of
        ("sn", states, longest, edges)
        ("cycle", states, cycle, edges)   cycle = [n0, ..., nk] with nk == n0
        ("exhausted", states, None, edges)

    Terms are interned to integer ids once, so each reduct is hashed once.
    """
    ids = {root: 0}
    terms = [root]
    succ = []  # succ[i] is None until node i is expanded
    color = [1]  # 0 white, 1 on the DFS path, 2 finished
    longest = [0]
    edges = 0

    def expand(i):
        nonlocal edges
        out = []
        seen = set()
        for _, r in reducts(terms[i], lookup):
            j = ids.get(r)
            if j is None:
                j = len(terms)
                ids[r] = j
                terms.append(r)
                succ.append(None)
                color.append(0)
                longest.append(0)
            if j not in seen:
                seen.add(j)
                out.append(j)
        succ[i] = out
        edges += len(out)

    succ.append(None)
    expand(0)
    states = 1
    path = [0]
    iters = [0]
    while path:
        node = path[-1]
        kids = succ[node]
        i = iters[-1]
        if i < len(kids):
            iters[-1] = i + 1
            kid = kids[i]
            c = color[kid]
            if c == 1:
                start = path.index(kid)
                return ("cycle", states, [terms[n] for n in path[start:]] + [terms[kid]], edges)
            if c == 2:
                continue
            if states >= max_states:
                return ("exhausted", states, None, edges)
            expand(kid)
            states += 1
            color[kid] = 1
            path.append(kid)
            iters.append(0)
        else:
            best = 0
            for k in kids:
                v = longest[k] + 1
                if v > best:
                    best = v
            longest[node] = best
            color[node] = 2
            path.pop()
            iters.pop()
    return ("sn", states, longest[0], edges)
