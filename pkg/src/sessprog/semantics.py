"""Reduction semantics: structural-congruence canonicalization, one-step
reduction, exhaustive exploration, finite approximants and the
approximation preorder.

A canonical state is a flat multiset of sequential threads under one
block of hoisted restrictions.  Two states are equal iff their sorted
serializations (with bound names de-Bruijn-renumbered and restricted
channels renumbered by first occurrence) coincide, which decides
structural congruence on the hoisted fragment.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .sestypes import type_key
from .syntax import (
    INF,
    Endpoint,
    Idle,
    Input,
    New,
    Output,
    Par,
    Process,
    ProcVar,
    Rec,
    SessionType,
    TRec,
    TIn,
    TOut,
    TypeVar,
    Var,
    Base,
    End,
    all_idents,
    co,
    free_names,
    pretty_proc,
    subst_name,
    subst_proc,
)


class NotUserProcess(Exception):
    pass


@dataclass(frozen=True)
class RedexLabel:
    kind: str  # "comm" | "rec"
    positions: tuple  # thread indices involved (two for comm, one for rec)
    channel: str | None = None
    payload: object = None

    def describe(self) -> str:
        if self.kind == "comm":
            from .syntax import name_str

            return f"comm {self.channel} ! {name_str(self.payload)}"
        return f"rec @{self.positions[0]}"


@dataclass(frozen=True)
class CanonState:
    key: str
    channels: tuple = field(compare=False)
    threads: tuple = field(compare=False)
    # channel -> (pos_type|None, neg_type|None); informational, kept for
    # rebuilding processes and for the typing harness
    anns: tuple = field(compare=False, default=())

    def ann_map(self) -> dict:
        return {c: (t, s) for c, t, s in self.anns}

    def __repr__(self):
        return f"CanonState({pretty_proc(state_to_process(self))!r})"


def _thread_ser(p: Process, chan_map=None, env=None, counter=None) -> str:
    """Serialization of a sequential term with binders numbered in
    traversal order and channels mapped through ``chan_map``."""
    chan_map = chan_map or {}
    env = env if env is not None else {}
    counter = counter if counter is not None else [0]

    def name(v):
        if isinstance(v, Var):
            return env.get(("v", v.ident), f"'{v.ident}")
        if isinstance(v, Endpoint):
            return chan_map.get(v.channel, env.get(("c", v.channel), f"'{v.channel}")) + v.polarity
        return str(v)

    def bind(kind, ident):
        tok = f"%{counter[0]}"
        counter[0] += 1
        return {**env, (kind, ident): tok}, tok

    if isinstance(p, Idle):
        return "0"
    if isinstance(p, ProcVar):
        return env.get(("p", p.ident), f"'{p.ident}")
    if isinstance(p, Input):
        env2, tok = bind("v", p.binder)
        return f"{name(p.subject)}?({tok}).{_thread_ser(p.body, chan_map, env2, counter)}"
    if isinstance(p, Output):
        return f"{name(p.subject)}!{name(p.payload)}.{_thread_ser(p.body, chan_map, env, counter)}"
    if isinstance(p, Par):
        return f"({_thread_ser(p.left, chan_map, env, counter)}|{_thread_ser(p.right, chan_map, env, counter)})"
    if isinstance(p, New):
        env2, tok = bind("c", p.channel)
        ann = ""
        if p.pos_type is not None:
            ann = ":" + type_key(p.pos_type)
            if p.neg_type is not None:
                ann += "~" + type_key(p.neg_type)
        return f"new {tok}{ann}.{_thread_ser(p.body, chan_map, env2, counter)}"
    if isinstance(p, Rec):
        env2, tok = bind("p", p.var)
        return f"rec[{p.index}]{tok}.{_thread_ser(p.body, chan_map, env2, counter)}"
    raise TypeError(p)


def _channels_in_order(p: Process, restricted: set, acc: list):
    """Restricted channels in AST preorder of their endpoint occurrences."""
    if isinstance(p, (Idle, ProcVar)):
        return
    if isinstance(p, (Input, Output)):
        for v in ([p.subject, p.payload] if isinstance(p, Output) else [p.subject]):
            if isinstance(v, Endpoint) and v.channel in restricted and v.channel not in acc:
                acc.append(v.channel)
        _channels_in_order(p.body, restricted, acc)
        return
    if isinstance(p, Par):
        _channels_in_order(p.left, restricted, acc)
        _channels_in_order(p.right, restricted, acc)
        return
    if isinstance(p, (New, Rec)):
        _channels_in_order(p.body, restricted, acc)
        return
    raise TypeError(p)


def _make_state(chan_anns: dict, threads: list) -> CanonState:
    threads = [t for t in threads if not isinstance(t, Idle)]
    used = set()
    for t in threads:
        for n in free_names(t):
            if isinstance(n, Endpoint):
                used.add(n.channel)
    chans = {c: chan_anns[c] for c in chan_anns if c in used}
    # order threads by their channel-agnostic serialization, then derive a
    # canonical channel numbering from first occurrences in that order
    threads.sort(key=lambda t: _thread_ser(t))
    occ: list = []
    for t in threads:
        _channels_in_order(t, set(chans), occ)
    chan_map = {c: f"#{i}" for i, c in enumerate(occ)}
    keys = sorted(_thread_ser(t, chan_map) for t in threads)
    key = f"nu[{len(chans)}] " + " || ".join(keys)
    return CanonState(
        key=key,
        channels=tuple(sorted(chans)),
        threads=tuple(threads),
        anns=tuple((c, *chans[c]) for c in sorted(chans)),
    )


def canonicalize(p: Process, outer_anns: dict | None = None) -> CanonState:
    """Flatten parallel composition, drop idle components, hoist all
    unguarded restrictions and drop those whose endpoints are unused.
    Idempotent and invariant under the structural congruence laws."""
    chan_anns = dict(outer_anns or {})
    threads: list = []

    def walk(q):
        if isinstance(q, Par):
            walk(q.left)
            walk(q.right)
        elif isinstance(q, New):
            chan_anns[q.channel] = (q.pos_type, q.neg_type)
            walk(q.body)
        elif isinstance(q, Idle):
            pass
        else:
            threads.append(q)

    walk(p)
    return _make_state(chan_anns, threads)


def state_to_process(s: CanonState) -> Process:
    body: Process = Idle()
    if s.threads:
        body = s.threads[-1]
        for t in reversed(s.threads[:-1]):
            body = Par(t, body)
    anns = s.ann_map()
    for c in reversed(s.channels):
        pos_t, neg_t = anns[c]
        body = New(c, pos_t, neg_t, body)
    return body


def is_user_process(p: Process) -> bool:
    if isinstance(p, (Idle, ProcVar)):
        return True
    if isinstance(p, (Input, Output, New)):
        return is_user_process(p.body)
    if isinstance(p, Par):
        return is_user_process(p.left) and is_user_process(p.right)
    if isinstance(p, Rec):
        return p.index == INF and is_user_process(p.body)
    raise TypeError(p)


def approximant(p: Process, iota) -> Process:
    """Replace every infinite recursion index (in processes and in type
    annotations) with ``iota``; requires a user process."""
    if not is_user_process(p):
        raise NotUserProcess("finite recursion index in a user process")
    return _approx(p, iota)


def _approx(p: Process, iota) -> Process:
    if isinstance(p, (Idle, ProcVar)):
        return p
    if isinstance(p, (Input, Output)):
        return replace(p, body=_approx(p.body, iota))
    if isinstance(p, Par):
        return replace(p, left=_approx(p.left, iota), right=_approx(p.right, iota))
    if isinstance(p, New):
        return replace(
            p,
            pos_type=None if p.pos_type is None else approximant_type(p.pos_type, iota),
            neg_type=None if p.neg_type is None else approximant_type(p.neg_type, iota),
            body=_approx(p.body, iota),
        )
    if isinstance(p, Rec):
        idx = iota if p.index == INF else p.index
        return replace(p, index=idx, body=_approx(p.body, iota))
    raise TypeError(p)


def approximant_type(t: SessionType, iota) -> SessionType:
    if isinstance(t, (End, Base, TypeVar)):
        return t
    if isinstance(t, (TIn, TOut)):
        return replace(
            t, payload=approximant_type(t.payload, iota), cont=approximant_type(t.cont, iota)
        )
    if isinstance(t, TRec):
        idx = iota if t.index == INF else t.index
        return replace(t, index=idx, body=approximant_type(t.body, iota))
    raise TypeError(t)


def approx_leq(p: Process, q: Process) -> bool:
    """The approximation preorder: structural identity except recursion
    indices, pointwise smaller on the left."""
    if type(p) is not type(q):
        return False
    if isinstance(p, Idle):
        return True
    if isinstance(p, ProcVar):
        return p.ident == q.ident
    if isinstance(p, Input):
        return p.subject == q.subject and p.binder == q.binder and approx_leq(p.body, q.body)
    if isinstance(p, Output):
        return (
            p.subject == q.subject and p.payload == q.payload and approx_leq(p.body, q.body)
        )
    if isinstance(p, Par):
        return approx_leq(p.left, q.left) and approx_leq(p.right, q.right)
    if isinstance(p, New):
        return (
            p.channel == q.channel
            and _ann_leq(p.pos_type, q.pos_type)
            and _ann_leq(p.neg_type, q.neg_type)
            and approx_leq(p.body, q.body)
        )
    if isinstance(p, Rec):
        return p.index <= q.index and p.var == q.var and approx_leq(p.body, q.body)
    raise TypeError(p)


def _ann_leq(t, s) -> bool:
    if t is None or s is None:
        return t is s
    return approx_leq_type(t, s)


def approx_leq_type(t: SessionType, s: SessionType) -> bool:
    if type(t) is not type(s):
        return False
    if isinstance(t, (End, Base, TypeVar)):
        return t == s
    if isinstance(t, (TIn, TOut)):
        return (
            t.obl == s.obl
            and t.cap == s.cap
            and approx_leq_type(t.payload, s.payload)
            and approx_leq_type(t.cont, s.cont)
        )
    if isinstance(t, TRec):
        return t.index <= s.index and t.var == s.var and approx_leq_type(t.body, s.body)
    raise TypeError(t)


def _rename_clashing_news(p: Process, seen: set) -> Process:
    """Rename ``new`` binders whose channel name is already taken; needed
    because unfolding duplicates restriction binders and hoisting requires
    globally unique channels.  Other binders are left alone."""

    def go(q, cenv):
        if isinstance(q, (Idle, ProcVar)):
            return q
        if isinstance(q, Input):
            return replace(q, subject=ren(q.subject, cenv), body=go(q.body, cenv))
        if isinstance(q, Output):
            return replace(
                q, subject=ren(q.subject, cenv), payload=ren(q.payload, cenv), body=go(q.body, cenv)
            )
        if isinstance(q, Par):
            return replace(q, left=go(q.left, cenv), right=go(q.right, cenv))
        if isinstance(q, Rec):
            return replace(q, body=go(q.body, cenv))
        if isinstance(q, New):
            name = q.channel
            if name in seen:
                k = 0
                while True:
                    k += 1
                    cand = f"{q.channel}_{k}"
                    if cand not in seen:
                        name = cand
                        break
                seen.add(name)
                return replace(q, channel=name, body=go(q.body, {**cenv, q.channel: name}))
            seen.add(name)
            return replace(q, body=go(q.body, cenv))
        raise TypeError(q)

    def ren(v, cenv):
        if isinstance(v, Endpoint) and v.channel in cenv:
            return Endpoint(cenv[v.channel], v.polarity)
        return v

    return go(p, {})


def step(s: CanonState) -> list[tuple[RedexLabel, CanonState]]:
    """All one-step reductions of a canonical state: communications
    between complementary prefixes on peer endpoints, and unfoldings of
    recursions with nonzero index (decremented unless infinite)."""
    out = []
    used = set(s.channels)
    for t in s.threads:
        used |= all_idents(t)
    anns = s.ann_map()

    for i, t in enumerate(s.threads):
        if isinstance(t, Rec) and t.index > 0:
            folded = Rec(t.index - 1, t.var, t.body)
            body = subst_proc(t.body, t.var, folded)
            if body is None:  # freshening guarantees this cannot happen
                raise RuntimeError("capture during recursion unfolding")
            body = _rename_clashing_news(body, set(used))
            threads = list(s.threads)
            threads[i] = body
            label = RedexLabel("rec", (i,))
            out.append((label, _merge(anns, threads)))

    for i, t in enumerate(s.threads):
        if not isinstance(t, Output) or not isinstance(t.subject, Endpoint):
            continue
        a = t.subject
        for j, u in enumerate(s.threads):
            if j == i or not isinstance(u, Input) or not isinstance(u.subject, Endpoint):
                continue
            if u.subject.channel != a.channel or u.subject.polarity != co(a.polarity):
                continue
            recv = subst_name(u.body, u.binder, t.payload)
            if recv is None:  # unique channel binders make this unreachable
                raise RuntimeError("capture during communication")
            threads = list(s.threads)
            threads[i] = t.body
            threads[j] = recv
            label = RedexLabel("comm", (i, j), channel=a.channel, payload=t.payload)
            out.append((label, _merge(anns, threads)))

    out.sort(key=lambda lr: (lr[0].kind, lr[0].positions))
    return out


def _merge(anns: dict, threads: list) -> CanonState:
    chan_anns = dict(anns)
    flat: list = []

    def walk(q):
        if isinstance(q, Par):
            walk(q.left)
            walk(q.right)
        elif isinstance(q, New):
            chan_anns[q.channel] = (q.pos_type, q.neg_type)
            walk(q.body)
        elif isinstance(q, Idle):
            pass
        else:
            flat.append(q)

    for t in threads:
        walk(t)
    return _make_state(chan_anns, flat)


def is_normal_form(s: CanonState) -> bool:
    return not step(s)


@dataclass
class Reachable:
    states: dict  # key -> CanonState
    truncated: bool
    edges: list  # (state, label, successor)
    parents: dict  # key -> (parent_key, label) for trace reconstruction


def reachable(s: CanonState, max_states: int = 100_000) -> Reachable:
    """Deterministic BFS over ``step``, deduplicating by canonical
    equality."""
    if max_states <= 0:
        raise ValueError("max_states must be positive")
    states = {s.key: s}
    parents: dict = {s.key: None}
    frontier = [s]
    edges = []
    truncated = False
    while frontier:
        nxt = []
        for st in frontier:
            for label, succ in step(st):
                edges.append((st, label, succ))
                if succ.key not in states:
                    if len(states) >= max_states:
                        truncated = True
                        continue
                    states[succ.key] = succ
                    parents[succ.key] = (st.key, label)
                    nxt.append(succ)
        frontier = nxt
    return Reachable(states=states, truncated=truncated, edges=edges, parents=parents)


def trace_to(r: Reachable, key: str) -> list:
    """Labels along the BFS tree path from the initial state to ``key``."""
    labels = []
    while r.parents[key] is not None:
        parent, label = r.parents[key]
        labels.append(label)
        key = parent
    labels.reverse()
    return labels
