"""Rational-tails classes: the graph-formula cycles and their identities.

Terms live over a rational-tails graph (genus vertex 0, rational tails) and
carry, besides the ψ-decoration, a factored root monomial: exponents of
(kω_x - η) keyed by the root's own legs and, per tail, by the tail's leg set
(all ω-classes of a tail restrict to the ω of its root edge, so the net
exponent after cancelling against the legs' divisor factors sits on the edge).
k stays symbolic inside the factored basis; coefficients are rationals.

The graph formula can produce decorated graphs whose net tail exponent is
negative while the total degree is fine; such a bracket is not a cycle, but
the per-root-profile sum of those terms is a combination of vanishing cycles
(the degree argument behind the D-polynomial vanishing theorem).  `f_class_m`
verifies that per profile and drops them, so emitted classes are genuine.

Pushforwards expand the factored basis: along the bundle map the η-powers
reduce through the rank-r Chern relation (λ-classes), keeping the coefficient
of (-η)^{r-1}; along the point-forgetting map ψ-powers become κ-classes and
coefficients become integer polynomials in k.
"""

from __future__ import annotations

import itertools
import time
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Mapping, Optional

from .trees import (
    H0,
    Decoration,
    InvalidArgument,
    Tree,
    beyond_legs,
    build_tree,
    child_edges_of,
    decorations_of_degree,
    enumerate_rt_graphs,
    label_key,
    parent_edge_of,
    valence,
    vertex_of_leg,
    vertex_slots,
)
from .strata0 import pair_term, strata_family
from .weights import coeff_c
from .cycles import VerificationReport


def _leg_slot(label):
    return ("leg", label)


def _tail_slot(legs):
    return ("tail", tuple(sorted(legs, key=label_key)))


def _fact_tuple(fact: Mapping) -> tuple:
    return tuple(sorted(((k, e) for k, e in fact.items() if e), key=lambda t: (t[0][0], str(t[0][1]))))


def rt_term_degree(graph: Tree, dec: Decoration, fact: tuple) -> int:
    return graph.num_edges() + dec.degree() + sum(e for _, e in fact)


def _rt_term_is_zero(graph: Tree, dec: Decoration) -> bool:
    # rational vertices die above their moduli dimension; the root is exempt
    load = [0] * graph.num_vertices()
    for (eid, side), e in dec.half:
        load[graph.edges[eid][side]] += e
    for l, e in dec.leg:
        load[vertex_of_leg(graph, l)] += e
    return any(load[v] > valence(graph, v) - 3 for v in range(1, graph.num_vertices()))


def _check_fact_keys(graph: Tree, fact: tuple) -> None:
    tails = {_tail_slot(beyond_legs(graph, e)) for e in child_edges_of(graph, 0)}
    legs = {_leg_slot(l) for l in graph.legs[0]}
    for key, _ in fact:
        if key not in tails and key not in legs:
            raise InvalidArgument(f"factored slot {key!r} is not a root slot")


class RtClass:
    """Formal sum of rational-tails terms with factored root monomials."""

    __slots__ = ("legs", "terms")

    def __init__(self, legs, terms: Optional[Mapping] = None):
        self.legs = frozenset(legs)
        self.terms = {}
        for (graph, dec, fact), coeff in (terms or {}).items():
            self._add(graph, dec, fact, coeff)

    def _add(self, graph: Tree, dec: Decoration, fact, coeff) -> None:
        coeff = Fraction(coeff)
        if not coeff or _rt_term_is_zero(graph, dec):
            return
        if frozenset(graph.all_legs()) != self.legs:
            raise InvalidArgument("term legs do not match the class")
        fact = _fact_tuple(dict(fact))
        _check_fact_keys(graph, fact)
        key = (graph, dec, fact)
        new = self.terms.get(key, 0) + coeff
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    def items(self):
        def sk(kv):
            (graph, dec, fact), _ = kv
            return (graph.sort_key(), dec.sort_key(), tuple((k[0], str(k[1]), e) for k, e in fact))

        return sorted(self.terms.items(), key=sk)

    def __add__(self, other: "RtClass") -> "RtClass":
        if self.legs != other.legs:
            raise InvalidArgument("leg mismatch")
        out = RtClass(self.legs, self.terms)
        for (g, d, f), c in other.terms.items():
            out._add(g, d, f, c)
        return out

    def __sub__(self, other: "RtClass") -> "RtClass":
        return self + other.scale(-1)

    def scale(self, factor) -> "RtClass":
        factor = Fraction(factor)
        return RtClass(self.legs, {k: c * factor for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RtClass)
            and self.legs == other.legs
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return f"RtClass(n={len(self.legs)}, {len(self.terms)} terms)"

    def degrees(self) -> set:
        return {rt_term_degree(*k) for k in self.terms}


# ---------------------------------------------------------------------------
# the graph formula


def _fact_for(graph: Tree, dec: Decoration, mults: Mapping) -> dict:
    """Net factored exponents after the per-tail ω-cancellation."""
    fact = {}
    for l in graph.legs[0]:
        fact[_leg_slot(l)] = mults[l] - dec.leg_exp(l)
    half = dec.half_dict()
    legexp = dec.leg_dict()
    for e in child_edges_of(graph, 0):
        region = beyond_legs(graph, e)
        total = sum(mults[l] - legexp.get(l, 0) for l in region)
        edges_in = [e2 for e2 in range(graph.num_edges()) if beyond_legs(graph, e2) <= region]
        psi_on_tail = sum(
            ex for (eid, _), ex in half.items() if eid in edges_in
        )
        fact[_tail_slot(region)] = total - len(edges_in) - psi_on_tail
    return fact


_f_cache: dict = {}


def f_class_m(k, g, mults, *, keep_formal: bool = False) -> RtClass:
    """The multiplicity graph-formula class; legs 1..n with weights ``mults``.

    k and g ride along symbolically (the factored basis carries k, the genus
    vertex is opaque).  Decorated graphs with a negative net tail exponent are
    verified to sum to zero per root profile and dropped, unless
    ``keep_formal``.
    """
    mults = tuple(int(m) for m in mults)
    if not mults or any(m < 1 for m in mults):
        raise InvalidArgument("multiplicities must be positive")
    key = (mults, keep_formal)
    if key in _f_cache:
        return _f_cache[key]
    n = len(mults)
    weights = {l: mults[l - 1] for l in range(1, n + 1)}
    total_degree = sum(mults)
    out = RtClass(range(1, n + 1))
    formal = RtClass(range(1, n + 1))
    for graph in enumerate_rt_graphs(n):
        budget = total_degree - graph.num_edges()
        if budget < 0:
            continue
        sign = (-1) ** graph.num_edges()
        for dec in _decorations_up_to(graph, budget, weights):
            c = coeff_c(graph, dec, weights)
            if not c:
                continue
            fact = _fact_for(graph, dec, weights)
            term_deg = rt_term_degree(graph, dec, _fact_tuple(fact))
            if term_deg != total_degree:
                raise ArithmeticError("graph formula degree bookkeeping broke")
            if min(fact.values(), default=0) < 0:
                formal._add(graph, dec, fact, sign * c)
            else:
                out._add(graph, dec, fact, sign * c)
    if formal.terms:
        if keep_formal:
            out = out + formal
        else:
            _verify_profile_vanishing(formal, context=f"f_class_m{mults} negative exponents")
    _f_cache[key] = out
    return out


def _decorations_up_to(graph: Tree, cap: int, weights: Mapping):
    for d in range(cap + 1):
        yield from decorations_of_degree(graph, d, leg_bounds=weights)


def f_class(k, g, n: int) -> RtClass:
    """The unit-multiplicity graph formula (k and g are carried, not used)."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    return f_class_m(k, g, (1,) * n)


def over_degree_terms(n: int) -> RtClass:
    """The graph-formula contributions with deg β > n, kept formally.

    These are dropped from `f_class`; the vanishing theorem makes their
    per-profile sums zero, which `verify_profile_vanishing` can certify.
    """
    weights = {l: 1 for l in range(1, n + 1)}
    out = RtClass(range(1, n + 1))
    for graph in enumerate_rt_graphs(n):
        # nonzero coefficients are bounded by the rational vertices' moduli
        # dimensions plus the chain bound n-2 per root-edge tail slot
        cap = sum(valence(graph, v) - 3 for v in range(1, graph.num_vertices()))
        cap += len(child_edges_of(graph, 0)) * max(n - 2, 0)
        for dec in _decorations_up_to(graph, cap, weights):
            if graph.num_edges() + dec.degree() <= n:
                continue
            c = coeff_c(graph, dec, weights)
            if not c:
                continue
            fact = _fact_for(graph, dec, mults=weights)
            out._add(graph, dec, fact, (-1) ** graph.num_edges() * c)
    return out


# ---------------------------------------------------------------------------
# root profiles and the per-profile zero test


def extract_tail(graph: Tree, dec: Decoration, root_edge: int):
    """The genus-0 content of a tail as a rooted rational tree with leg h0."""
    region_edges = [
        e for e in range(graph.num_edges()) if beyond_legs(graph, e) <= beyond_legs(graph, root_edge)
    ]
    inner = [e for e in region_edges if e != root_edge]
    verts = sorted({graph.edges[e][1] for e in region_edges})
    vmap = {v: idx for idx, v in enumerate(verts)}
    legs_by = [list(graph.legs[v]) for v in verts]
    legs_by[vmap[graph.edges[root_edge][1]]].append(H0)
    pairs = [(vmap[graph.edges[e][0]], vmap[graph.edges[e][1]]) for e in inner]
    half = {}
    for (eid, side), ex in dec.half:
        if eid in inner:
            half[(inner.index(eid), side)] = ex
    legexp = {l: e for l, e in dec.leg if vertex_of_leg(graph, l) in verts}
    legexp[H0] = dec.half_exp((root_edge, 1))
    return build_tree(legs_by, pairs, half_exp=half, leg_exp=legexp)


def root_profile(graph: Tree, dec: Decoration, fact: tuple):
    """(root data, ordered tail contents): the grouping of the identity proofs."""
    fd = dict(fact)
    root_legs = tuple(
        (l, dec.leg_exp(l), fd.get(_leg_slot(l), 0)) for l in graph.legs[0]
    )
    tails = []
    for e in child_edges_of(graph, 0):
        legs = tuple(sorted(beyond_legs(graph, e), key=label_key))
        tails.append((legs, dec.half_exp((e, 0)), fd.get(_tail_slot(legs), 0), e))
    tails.sort(key=lambda t: t[0])
    profile = (root_legs, tuple(t[:3] for t in tails))
    contents = tuple(extract_tail(graph, dec, e) for _, _, _, e in tails)
    return profile, contents


def _profile_groups(x: RtClass) -> dict:
    groups: dict = {}
    for (graph, dec, fact), coeff in x.terms.items():
        profile, contents = root_profile(graph, dec, fact)
        groups.setdefault(profile, {})
        bucket = groups[profile]
        bucket[contents] = bucket.get(contents, Fraction(0)) + coeff
    return groups


def _tensor_is_zero(profile, bucket: dict) -> bool:
    """Zero test in the tensor product of the tails' strata algebras.

    Pairs the residual against every tuple of boundary strata; sound and
    complete because each factor's pairing is perfect and strata span.
    """
    bucket = {k: c for k, c in bucket.items() if c}
    if not bucket:
        return True
    _, tail_meta = profile
    ambients = [frozenset(legs) | {H0} for legs, _, _ in tail_meta]
    families = []
    for amb in ambients:
        fam = []
        for codim in range(len(amb) - 2):
            fam.extend(strata_family(amb, codim))
        families.append(fam)
    for strata in itertools.product(*families):
        total = Fraction(0)
        for contents, coeff in bucket.items():
            prod = coeff
            for (tree, dec), S, amb in zip(contents, strata, ambients):
                prod *= pair_term(tree, dec, S, amb)
                if not prod:
                    break
            total += prod
        if total:
            return False
    return True


def _verify_profile_vanishing(x: RtClass, context: str) -> None:
    for profile, bucket in _profile_groups(x).items():
        if not _tensor_is_zero(profile, bucket):
            raise ArithmeticError(f"{context}: profile {profile} does not vanish")


def verify_overdegree_drop(n: int) -> VerificationReport:
    """The dropped deg β > n contributions vanish per root profile."""
    t0 = time.perf_counter()
    extra = over_degree_terms(n)
    try:
        _verify_profile_vanishing(extra, context=f"over-degree terms at n={n}")
    except ArithmeticError as exc:
        return VerificationReport("overdegree_drop", (n,), False, str(exc), time.perf_counter() - t0)
    return VerificationReport("overdegree_drop", (n,), True, None, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# operations


def multiply_divisor(x: RtClass, leg) -> RtClass:
    """Multiply by (kω_leg - η): a factored bump at the leg's root slot."""
    if leg not in x.legs:
        raise InvalidArgument(f"no leg {leg!r}")
    out = RtClass(x.legs)
    for (graph, dec, fact), coeff in x.terms.items():
        fd = dict(fact)
        if leg in graph.legs[0]:
            slot = _leg_slot(leg)
        else:
            e = _root_edge_of(graph, leg)
            slot = _tail_slot(beyond_legs(graph, e))
        fd[slot] = fd.get(slot, 0) + 1
        out._add(graph, dec, fd, coeff)
    return out


def _root_edge_of(graph: Tree, leg) -> int:
    v = vertex_of_leg(graph, leg)
    up = parent_edge_of(graph)
    while graph.edges[up[v]][0] != 0:
        v = graph.edges[up[v]][0]
    return up[v]


def pullback_forget_rt(x: RtClass, new_leg) -> RtClass:
    """Pull back along the bundle map forgetting ``new_leg``."""
    if new_leg in x.legs:
        raise InvalidArgument(f"leg {new_leg!r} already present")
    out = RtClass(x.legs | {new_leg})
    for (graph, dec, fact), coeff in x.terms.items():
        fd = dict(fact)
        for v in range(graph.num_vertices()):
            out._add(*_attach_rt(graph, dec, fd, v, new_leg), coeff)
            for slot in vertex_slots(graph, v):
                corr = _split_rt(graph, dec, fd, v, new_leg, slot)
                if corr is not None:
                    out._add(*corr, -coeff)
    return out


def _tail_keys_with(graph: Tree, v: int):
    """Root-edge fact key of the tail containing vertex v (None at the root)."""
    if v == 0:
        return None
    up = parent_edge_of(graph)
    while graph.edges[up[v]][0] != 0:
        v = graph.edges[up[v]][0]
    return _tail_slot(beyond_legs(graph, up[v]))


def _attach_rt(graph: Tree, dec: Decoration, fd: dict, v: int, new_leg):
    legs_by = [list(ls) for ls in graph.legs]
    legs_by[v].append(new_leg)
    g2, d2 = build_tree(legs_by, list(graph.edges), rt_root=0, half_exp=dec.half_dict(), leg_exp=dec.leg_dict())
    f2 = dict(fd)
    key = _tail_keys_with(graph, v)
    if key is not None and key in f2:
        f2[_tail_slot(set(key[1]) | {new_leg})] = f2.pop(key)
    return g2, d2, f2


def _split_rt(graph: Tree, dec: Decoration, fd: dict, v: int, new_leg, slot):
    """One ψ-comparison correction: split ``slot`` and the new leg off ``v``."""
    half = dec.half_dict()
    legexp = dec.leg_dict()
    d = half.get(slot, 0) if isinstance(slot, tuple) else legexp.get(slot, 0)
    if d == 0:
        return None
    nv = graph.num_vertices()
    legs_by = [list(ls) for ls in graph.legs] + [[new_leg]]
    pairs = [list(p) for p in graph.edges]
    if isinstance(slot, tuple):
        eid, side = slot
        half.pop(slot)
        pairs[eid][side] = nv
    else:
        legexp.pop(slot)
        legs_by[v].remove(slot)
        legs_by[nv].append(slot)
    new_eid = len(pairs)
    pairs.append((v, nv))
    if d - 1:
        half[(new_eid, 0)] = d - 1
    g2, d2 = build_tree(legs_by, [tuple(p) for p in pairs], rt_root=0, half_exp=half, leg_exp=legexp)

    f2 = dict(fd)
    if v == 0:
        if isinstance(slot, tuple):
            # a decorated root-edge tail: the inserted vertex joins its tail
            old_key = _tail_slot(beyond_legs(graph, slot[0]))
            if old_key in f2:
                f2[_tail_slot(set(old_key[1]) | {new_leg})] = f2.pop(old_key)
        else:
            # a decorated root leg becomes a fresh two-leg tail
            old_key = _leg_slot(slot)
            if old_key in f2:
                f2[_tail_slot({slot, new_leg})] = f2.pop(old_key)
    else:
        key = _tail_keys_with(graph, v)
        if key is not None and key in f2:
            f2[_tail_slot(set(key[1]) | {new_leg})] = f2.pop(key)
    return g2, d2, f2


def collide_rt(x: RtClass, leg_i, leg_j) -> RtClass:
    """Collide two legs: multiply by the {i,j} divisor and forget ``leg_j``."""
    if leg_i == leg_j or leg_i not in x.legs or leg_j not in x.legs:
        raise InvalidArgument("collide needs two distinct present legs")
    out = RtClass(x.legs - {leg_j})
    for (graph, dec, fact), coeff in x.terms.items():
        vi = vertex_of_leg(graph, leg_i)
        if vi != vertex_of_leg(graph, leg_j):
            continue
        fd = dict(fact)
        half = dec.half_dict()
        legexp = dec.leg_dict()
        if vi != 0 and valence(graph, vi) == 3:
            # contract the supporting edge; ψ moves up with a unit bump
            e1 = parent_edge_of(graph)[vi]
            u = graph.edges[e1][0]
            exp = half.pop((e1, 0), 0)
            half.pop((e1, 1), None)
            legexp.pop(leg_j, None)
            legexp[leg_i] = exp + 1
            legs_by = [list(ls) for ls in graph.legs]
            legs_by[vi] = []
            legs_by[u].append(leg_i)
            keep = [k for k in range(graph.num_edges()) if k != e1]
            new_half = {(keep.index(eid), side): ex for (eid, side), ex in half.items()}
            pairs = [graph.edges[k] for k in keep]
            legs_by2 = [ls for idx, ls in enumerate(legs_by) if idx != vi]
            remap = [idx - (1 if idx > vi else 0) for idx in range(graph.num_vertices())]
            pairs = [(remap[a], remap[b]) for a, b in pairs]
            g2, d2 = build_tree(legs_by2, pairs, rt_root=0, half_exp=new_half, leg_exp=legexp)
            _merge_fact_keys(fd, graph, e1, leg_i, leg_j)
            out._add(g2, d2, fd, -coeff)
        else:
            if legexp.get(leg_i) or legexp.get(leg_j):
                continue
            legs_by = [list(ls) for ls in graph.legs]
            legs_by[vi].remove(leg_j)
            g2, d2 = build_tree(legs_by, list(graph.edges), rt_root=0, half_exp=half, leg_exp=legexp)
            if vi == 0:
                b = fd.pop(_leg_slot(leg_j), 0)
                if b:
                    fd[_leg_slot(leg_i)] = fd.get(_leg_slot(leg_i), 0) + b
            else:
                key = _tail_keys_with(graph, vi)
                if key in fd:
                    fd[_tail_slot(set(key[1]) - {leg_j})] = fd.pop(key)
            out._add(g2, d2, fd, coeff)
    return out


def _merge_fact_keys(fd: dict, graph: Tree, contracted_edge: int, leg_i, leg_j) -> None:
    """Update tail fact keys after a trivalent {i, j} vertex contraction."""
    u = graph.edges[contracted_edge][0]
    if u == 0:
        # the whole two-leg tail collapses onto a root leg
        key = _tail_slot({leg_i, leg_j})
        if key in fd:
            fd[_leg_slot(leg_i)] = fd.get(_leg_slot(leg_i), 0) + fd.pop(key)
    else:
        key = _tail_keys_with(graph, u)
        if key in fd:
            fd[_tail_slot(set(key[1]) - {leg_j})] = fd.pop(key)


def relabel_rt(x: RtClass, mapping: Mapping) -> RtClass:
    out = RtClass(frozenset(mapping.get(l, l) for l in x.legs))
    for (graph, dec, fact), coeff in x.terms.items():
        legs_by = [[mapping.get(l, l) for l in ls] for ls in graph.legs]
        legexp = {mapping.get(l, l): e for l, e in dec.leg}
        g2, d2 = build_tree(legs_by, list(graph.edges), rt_root=0, half_exp=dec.half_dict(), leg_exp=legexp)
        fd = {}
        for (kind, payload), e in fact:
            if kind == "leg":
                fd[_leg_slot(mapping.get(payload, payload))] = e
            else:
                fd[_tail_slot({mapping.get(l, l) for l in payload})] = e
        out._add(g2, d2, fd, coeff)
    return out


def e_class(k, g, n: int, I) -> RtClass:
    """γ_* of the heavy-multiplicity class: the coda-glued extra class."""
    I = frozenset(I)
    m = len(I)
    if not I or not I <= set(range(1, n)):
        raise InvalidArgument("I must be a non-empty subset of 1..n-1")
    base = f_class_m(k, g, (m,) + (1,) * (n - m - 1))
    free = sorted(set(range(1, n)) - I)
    mapping = {old: new for old, new in zip(range(2, n - m + 1), free)}
    mapping[1] = "@node"
    y = relabel_rt(base, mapping)
    out = RtClass(range(1, n + 1))
    coda = sorted(I | {n})
    for (graph, dec, fact), coeff in y.terms.items():
        v = vertex_of_leg(graph, "@node")
        legs_by = [list(ls) for ls in graph.legs] + [coda]
        legs_by[v].remove("@node")
        nv = graph.num_vertices()
        pairs = list(graph.edges) + [(v, nv)]
        half = dec.half_dict()
        legexp = dec.leg_dict()
        d_node = legexp.pop("@node", 0)
        if d_node:
            half[(graph.num_edges(), 0)] = d_node
        g2, d2 = build_tree(legs_by, pairs, rt_root=0, half_exp=half, leg_exp=legexp)
        fd = {}
        for (kind, payload), e in fact:
            if kind == "leg" and payload == "@node":
                fd[_tail_slot(coda)] = e
            elif kind == "leg":
                fd[_leg_slot(payload)] = e
            elif "@node" in payload:
                fd[_tail_slot((set(payload) - {"@node"}) | set(coda))] = e
            else:
                fd[_tail_slot(set(payload))] = e
        out._add(g2, d2, fd, coeff)
    return out


# ---------------------------------------------------------------------------
# identity checks


def verify_frec(k, g, n: int) -> VerificationReport:
    """π* F_{n-1} · (kω_n - η) - Σ |I| E_I = F_n, per root profile."""
    if n < 2:
        raise InvalidArgument("n must be >= 2")
    t0 = time.perf_counter()
    lhs = multiply_divisor(pullback_forget_rt(f_class(k, g, n - 1), n), n)
    for r in range(1, n):
        for I in itertools.combinations(range(1, n), r):
            lhs = lhs - e_class(k, g, n, I).scale(len(I))
    diff = lhs - f_class(k, g, n)
    for profile, bucket in _profile_groups(diff).items():
        if not _tensor_is_zero(profile, bucket):
            return VerificationReport("frec", (n,), False, profile, time.perf_counter() - t0)
    return VerificationReport("frec", (n,), True, None, time.perf_counter() - t0)


def verify_colliding_rt(k, g, mults) -> VerificationReport:
    """Colliding consecutive legs carries the unit class onto the heavy one."""
    mults = tuple(int(m) for m in mults)
    total = sum(mults)
    t0 = time.perf_counter()
    x = f_class(k, g, total)
    # fold the legs left to right: collide (pos, pos+1) until each weight is met
    pos = 1
    for m in mults:
        for _ in range(m - 1):
            x = collide_rt(x, pos, pos + 1)
            mapping = {l: l - 1 for l in sorted(x.legs) if l >= pos + 2}
            x = relabel_rt(x, mapping)
        pos += 1
    expected = f_class_m(k, g, mults)
    if x == expected:
        method = "termwise"
    else:
        diff = x - expected
        for profile, bucket in _profile_groups(diff).items():
            if not _tensor_is_zero(profile, bucket):
                return VerificationReport(
                    "colliding_rt", mults, False, profile, time.perf_counter() - t0
                )
        method = "per-profile"
    return VerificationReport("colliding_rt", mults, True, method, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# pushforwards


class KPoly:
    """Integer-coefficient polynomials in the symbol k, with Fraction arithmetic."""

    __slots__ = ("c",)

    def __init__(self, c=None):
        self.c = {}
        for d, v in dict(c or {}).items():
            v = Fraction(v)
            if v:
                self.c[int(d)] = v

    @staticmethod
    def const(v) -> "KPoly":
        return KPoly({0: Fraction(v)})

    @staticmethod
    def k(power: int = 1) -> "KPoly":
        return KPoly({power: 1})

    def __add__(self, other: "KPoly") -> "KPoly":
        out = dict(self.c)
        for d, v in other.c.items():
            out[d] = out.get(d, Fraction(0)) + v
        return KPoly(out)

    def __mul__(self, other) -> "KPoly":
        if not isinstance(other, KPoly):
            other = KPoly.const(other)
        out: dict = {}
        for d1, v1 in self.c.items():
            for d2, v2 in other.c.items():
                out[d1 + d2] = out.get(d1 + d2, Fraction(0)) + v1 * v2
        return KPoly(out)

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        return isinstance(other, KPoly) and self.c == other.c

    def __hash__(self):
        return hash(tuple(sorted(self.c.items())))

    def subs(self, value) -> Fraction:
        return sum((v * Fraction(value) ** d for d, v in self.c.items()), Fraction(0))

    def __repr__(self) -> str:
        if not self.c:
            return "0"
        bits = []
        for d in sorted(self.c, reverse=True):
            v = self.c[d]
            mag = abs(v)
            mono = "" if d == 0 else ("k" if d == 1 else f"k^{d}")
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            bits.append(("-" if v < 0 else "+", body))
        out = ("-" if bits[0][0] == "-" else "") + bits[0][1]
        for sign, body in bits[1:]:
            out += f" {sign} {body}"
        return out


class PushedClass:
    """η-reduced pushforward: symbols ω, ψ, λ, κ, η over boundary graphs."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping] = None):
        self.terms = {}
        for key, coeff in (terms or {}).items():
            self._add(key, coeff)

    def _add(self, key, coeff) -> None:
        if not isinstance(coeff, KPoly):
            coeff = KPoly.const(coeff)
        if not coeff:
            return
        new = self.terms.get(key, KPoly()) + coeff
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    def __eq__(self, other) -> bool:
        return isinstance(other, PushedClass) and self.terms == other.terms

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: repr(kv[0]))

    def __repr__(self) -> str:
        return f"PushedClass({len(self.terms)} terms)"


@lru_cache(maxsize=None)
def _eta_reduce(p: int, r: int):
    """(-η)^p as a combination {(λ-monomial, q): coeff} with q < r."""
    if p < r:
        return {((), p): Fraction(1)}
    out: dict = {}
    # (-η)^p = -Σ_q λ_q (-η)^{p-q}
    for q in range(1, r + 1):
        for (lam, pe), c in _eta_reduce(p - q, r).items():
            key = (tuple(sorted(lam + (q,))), pe)
            out[key] = out.get(key, Fraction(0)) - c
    return out


def pushforward_phi(x: RtClass, k: int, g: int, rank_override: Optional[int] = None) -> PushedClass:
    """Push down the bundle: keep the (-η)^{r-1} coefficient after reduction.

    The bundle rank r is g for k = 1; for k >= 2 it must be supplied (the
    Riemann-Roch value (2k-1)(g-1) is the natural input).
    """
    if not isinstance(k, int):
        raise InvalidArgument("pushforward_phi needs a numeric k")
    if k >= 2 and rank_override is None:
        raise InvalidArgument("k >= 2 needs rank_override")
    r = g if k == 1 else rank_override
    out = PushedClass()
    for (graph, dec, fact), coeff in x.terms.items():
        slots = list(fact)
        if any(e < 0 for _, e in slots):
            raise InvalidArgument("negative factored exponent cannot be expanded")
        ranges = [range(e + 1) for _, e in slots]
        for eta_picks in itertools.product(*ranges):
            p = sum(eta_picks)
            scalar = Fraction(1)
            omegas = []
            for (slotkey, e), t in zip(slots, eta_picks):
                a = e - t
                scalar *= comb(e, a) * Fraction(k) ** a
                if a:
                    omegas.append((slotkey, a))
            for (lam, pe), c in _eta_reduce(p, r).items():
                if pe != r - 1:
                    continue
                key = (graph, dec, tuple(sorted(omegas)), lam)
                out._add(key, KPoly.const(coeff * scalar * c))
    return out


def pushforward_point(x: RtClass, k="k", g: Optional[int] = None) -> PushedClass:
    """Push a single-leg class down the point-forgetting map via κ-classes.

    With the default symbolic k the coefficients are polynomials in k; a
    numeric k evaluates them.  κ_0 evaluates to 2g - 2 when g is numeric.
    """
    if len(x.legs) != 1:
        raise InvalidArgument("pushforward_point needs a single-leg class")
    out = PushedClass()
    for (graph, dec, fact), coeff in x.terms.items():
        if graph.num_edges():
            raise InvalidArgument("single-leg classes are supported on the smooth locus only")
        leg = next(iter(x.legs))
        d = dec.leg_exp(leg)
        b = dict(fact).get(_leg_slot(leg), 0)
        if b < 0:
            raise InvalidArgument("negative factored exponent cannot be expanded")
        # ω = ψ at the single marked point; expand ((k)ψ - η)^b ψ^d
        for t in range(b + 1):
            a = b - t + d  # ψ-power
            kc = KPoly({b - t: Fraction(coeff) * comb(b, t) * (-1) ** t})
            if a == 0:
                continue  # π_*(η^t) with no ψ dies
            kappa = a - 1
            if kappa == 0 and g is not None:
                out._add(("eta", t), kc * KPoly.const(2 * g - 2))
            else:
                out._add(("kappa", kappa, "eta", t), kc)
    if k not in ("k", "sym"):
        out = PushedClass({key: KPoly.const(c.subs(k)) for key, c in out.terms.items()})
    return out


def heavy_point_expansion(a: int) -> dict:
    """Coefficients of ∏_{b=0}^{a-1}((k+b)ψ - η) as {(ψ-exp, η-exp): KPoly}."""
    terms = {(0, 0): KPoly.const(1)}
    for b in range(a):
        new: dict = {}
        for (pp, pe), c in terms.items():
            for key, mult in (((pp + 1, pe), KPoly({1: 1, 0: b})), ((pp, pe + 1), KPoly.const(-1))):
                prev = new.get(key, KPoly())
                new[key] = prev + c * mult
        terms = {k: v for k, v in new.items() if v}
    return terms


def f_heavy_expanded(a: int) -> dict:
    """The one-heavy-leg class expanded in (ψ, η) after the ω = ψ identification."""
    x = f_class_m("k", "g", (a,))
    out: dict = {}
    for (graph, dec, fact), coeff in x.terms.items():
        d = dec.leg_exp(1)
        b = dict(fact).get(_leg_slot(1), 0)
        for t in range(b + 1):
            key = (b - t + d, t)
            kc = KPoly({b - t: Fraction(coeff) * comb(b, t) * (-1) ** t})
            prev = out.get(key, KPoly())
            new = prev + kc
            if new:
                out[key] = new
            else:
                out.pop(key, None)
    return out


def emit_relation(g: int, n: int) -> RtClass:
    """The vanishing-regime class (k = 1, n > 2g-2), rendered by the caller."""
    if n <= 2 * g - 2:
        raise InvalidArgument("relations need n > 2g-2")
    return f_class(1, g, n)
