"""The genus-0 strata algebra.

A `Class0` is an exact formal sum of ψ-decorated boundary-strata pushforwards
on the moduli space of stable rational curves determined by its leg set.
Terms are keyed by the canonical (tree, decoration) encoding; coefficients are
`Fraction`s.  Terms whose decoration kills a vertex's moduli factor, and terms
of degree above the ambient dimension, are dropped on construction.

Products with undecorated strata use the excess-intersection formula: the leg
splits of the two trees must form a laminar family (otherwise the product is
empty), the common refinement is the unique minimal joint degeneration, and
every shared edge contributes a factor -ψ' - ψ''.

The zero test pairs a homogeneous class against every boundary stratum of
complementary dimension.  Boundary strata span these spaces and the
intersection pairing is perfect over the rationals, so a class vanishes
exactly when all such pairings do.
"""

from __future__ import annotations

import itertools
import os
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Mapping, Optional

from .trees import (
    H0,
    Decoration,
    InvalidArgument,
    Tree,
    attach_leg,
    beyond_legs,
    build_tree,
    enumerate_stable_trees,
    label_key,
    make_decoration,
    relabel,
    sort_labels,
    split_off,
    term_sort_key,
    valence,
    vertex_of_leg,
    vertex_slots,
)


class Class0:
    """Formal sum of decorated strata on the moduli space with the given legs."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: Iterable, terms: Optional[Mapping] = None):
        self.ambient = frozenset(ambient)
        if len(self.ambient) < 3:
            raise InvalidArgument("ambient needs at least three legs")
        self.terms = {}
        for (tree, dec), coeff in (terms or {}).items():
            self._add(tree, dec, coeff)

    def _add(self, tree: Tree, dec: Decoration, coeff: Fraction) -> None:
        if not coeff or term_is_zero(tree, dec, self.ambient):
            return
        key = (tree, dec)
        new = self.terms.get(key, 0) + coeff
        if new:
            self.terms[key] = new
        else:
            self.terms.pop(key, None)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: term_sort_key(*kv[0]))

    def __add__(self, other: "Class0") -> "Class0":
        if self.ambient != other.ambient:
            raise InvalidArgument("ambient mismatch")
        out = Class0(self.ambient, self.terms)
        for (tree, dec), coeff in other.terms.items():
            out._add(tree, dec, coeff)
        return out

    def __sub__(self, other: "Class0") -> "Class0":
        return self + other.scale(-1)

    def scale(self, factor) -> "Class0":
        factor = Fraction(factor)
        return Class0(self.ambient, {k: c * factor for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Class0)
            and self.ambient == other.ambient
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return f"Class0({sorted(self.ambient, key=label_key)!r}, {len(self.terms)} terms)"

    def degrees(self) -> set:
        return {term_degree(t, d) for t, d in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def mul_psi(self, leg, power: int = 1) -> "Class0":
        """Multiply by ψ_leg^power (the ψ-class at a marked point)."""
        out = Class0(self.ambient)
        for (tree, dec), coeff in self.terms.items():
            legexp = dec.leg_dict()
            legexp[leg] = legexp.get(leg, 0) + power
            out._add(tree, make_decoration(dec.half_dict(), legexp), coeff)
        return out


def dim_of(ambient: frozenset) -> int:
    return len(ambient) - 3


def term_degree(tree: Tree, dec: Decoration) -> int:
    return tree.num_edges() + dec.degree()


def term_is_zero(tree: Tree, dec: Decoration, ambient: frozenset) -> bool:
    if frozenset(tree.all_legs()) != ambient:
        raise InvalidArgument("term legs do not match the ambient")
    if term_degree(tree, dec) > dim_of(ambient):
        return True
    # a decoration exceeding a vertex factor's dimension kills the term
    load = [0] * tree.num_vertices()
    for (eid, side), e in dec.half:
        load[tree.edges[eid][side]] += e
    for l, e in dec.leg:
        load[vertex_of_leg(tree, l)] += e
    return any(load[v] > valence(tree, v) - 3 for v in range(tree.num_vertices()))


def zero(ambient) -> Class0:
    return Class0(ambient)


def push_tree(tree: Tree, dec: Decoration = Decoration()) -> Class0:
    """The single-term class of a decorated stratum pushforward."""
    out = Class0(frozenset(tree.all_legs()))
    out._add(tree, dec, Fraction(1))
    return out


def from_terms(ambient, triples) -> Class0:
    out = Class0(ambient)
    for tree, dec, coeff in triples:
        out._add(tree, dec, Fraction(coeff))
    return out


# ---------------------------------------------------------------------------
# integration


def integrate_term(tree: Tree, dec: Decoration, ambient: frozenset) -> Fraction:
    """∏ over vertices of the top ψ-integral on that vertex's factor."""
    if term_degree(tree, dec) != dim_of(ambient):
        return Fraction(0)
    load: list = [[] for _ in range(tree.num_vertices())]
    for (eid, side), e in dec.half:
        load[tree.edges[eid][side]].append(e)
    for l, e in dec.leg:
        load[vertex_of_leg(tree, l)].append(e)
    total = Fraction(1)
    for v in range(tree.num_vertices()):
        k = valence(tree, v)
        exps = load[v]
        if sum(exps) != k - 3:
            return Fraction(0)
        num = factorial(k - 3)
        den = 1
        for e in exps:
            den *= factorial(e)
        total *= Fraction(num, den)
    return total


def integrate(x: Class0) -> Fraction:
    return sum((c * integrate_term(t, d, x.ambient) for (t, d), c in x.terms.items()), Fraction(0))


# ---------------------------------------------------------------------------
# strata families and split masks


_strata_cache: dict = {}


def _cache_limit() -> Optional[int]:
    raw = os.environ.get("RTAILS_CACHE_LIMIT")
    return int(raw) if raw else None


def strata_family(ambient, codim: int) -> tuple:
    """Undecorated boundary strata of the given codimension, canonical order."""
    key = (frozenset(ambient), codim)
    if key not in _strata_cache:
        limit = _cache_limit()
        if limit is not None and len(_strata_cache) >= limit:
            _strata_cache.pop(next(iter(_strata_cache)))
        if codim < 0 or codim > dim_of(frozenset(ambient)):
            _strata_cache[key] = ()
        else:
            _strata_cache[key] = enumerate_stable_trees(sort_labels(ambient), num_edges=codim)
    return _strata_cache[key]


@lru_cache(maxsize=None)
def _bit_order(ambient: frozenset) -> tuple:
    return sort_labels(ambient)


@lru_cache(maxsize=None)
def split_masks(tree: Tree, ambient: frozenset) -> tuple:
    """Per-edge bitmask of the legs beyond the edge (never the base label)."""
    order = _bit_order(ambient)
    bit = {l: i for i, l in enumerate(order)}
    out = []
    for eid in range(tree.num_edges()):
        mask = 0
        for l in beyond_legs(tree, eid):
            mask |= 1 << bit[l]
        out.append(mask)
    return tuple(out)


@lru_cache(maxsize=None)
def _tree_from_masks(ambient: frozenset, masks: tuple) -> Tree:
    order = _bit_order(ambient)
    fam = [frozenset(l for i, l in enumerate(order) if (m >> i) & 1) for m in masks]
    # split off parts largest-first: a part's legs are then still co-located
    verts = [set(order)]
    edges: list = []
    for part in sorted(fam, key=len, reverse=True):
        vi = next(i for i, vs in enumerate(verts) if part <= vs)
        verts[vi] -= part
        verts.append(set(part))
        edges.append((vi, len(verts) - 1))
    tree, _ = build_tree([sorted(vs, key=label_key) for vs in verts], edges)
    return tree


@lru_cache(maxsize=None)
def _refine(tree: Tree, stratum: Tree, ambient: frozenset):
    """Common minimal degeneration of a decorated tree and a stratum.

    Returns ``(gamma, edge_of_mask, shared_masks)`` or None when the two trees
    admit no joint degeneration (their splits are not laminar).
    """
    t_masks = split_masks(tree, ambient)
    s_masks = split_masks(stratum, ambient)
    union = sorted(set(t_masks) | set(s_masks))
    for p, q in itertools.combinations(union, 2):
        inter = p & q
        if inter and inter != p and inter != q:
            return None
    gamma = _tree_from_masks(ambient, tuple(union))
    g_masks = split_masks(gamma, ambient)
    edge_of_mask = {m: e for e, m in enumerate(g_masks)}
    shared = tuple(m for m in t_masks if m in set(s_masks))
    return gamma, edge_of_mask, shared


def _transport_dec(tree: Tree, dec: Decoration, ambient: frozenset, edge_of_mask) -> dict:
    """Half-exponents of ``dec`` re-keyed on the refinement's edges."""
    t_masks = split_masks(tree, ambient)
    out = {}
    for (eid, side), e in dec.half:
        out[(edge_of_mask[t_masks[eid]], side)] = e
    return out


def product_with_stratum(x: Class0, stratum: Tree) -> Class0:
    """Excess-intersection product with an undecorated boundary stratum."""
    if frozenset(stratum.all_legs()) != x.ambient:
        raise InvalidArgument("ambient mismatch")
    out = Class0(x.ambient)
    for (tree, dec), coeff in x.terms.items():
        ref = _refine(tree, stratum, x.ambient)
        if ref is None:
            continue
        gamma, edge_of_mask, shared = ref
        half = _transport_dec(tree, dec, x.ambient, edge_of_mask)
        legexp = dec.leg_dict()
        # each shared edge contributes -ψ' - ψ'': expand over side choices
        for sides in itertools.product((0, 1), repeat=len(shared)):
            h2 = dict(half)
            for m, side in zip(shared, sides):
                slot = (edge_of_mask[m], side)
                h2[slot] = h2.get(slot, 0) + 1
            sign = (-1) ** len(shared)
            out._add(gamma, make_decoration(h2, legexp), coeff * sign)
    return out


def pair_term(tree: Tree, dec: Decoration, stratum: Tree, ambient: frozenset) -> Fraction:
    ref = _refine(tree, stratum, ambient)
    if ref is None:
        return Fraction(0)
    gamma, edge_of_mask, shared = ref
    half = _transport_dec(tree, dec, ambient, edge_of_mask)
    legexp = dec.leg_dict()
    total = Fraction(0)
    for sides in itertools.product((0, 1), repeat=len(shared)):
        h2 = dict(half)
        for m, side in zip(shared, sides):
            slot = (edge_of_mask[m], side)
            h2[slot] = h2.get(slot, 0) + 1
        total += integrate_term(gamma, make_decoration(h2, legexp), ambient)
    return total * (-1) ** len(shared)


def pair(x: Class0, stratum: Tree) -> Fraction:
    """Integral of the product against an undecorated stratum."""
    if frozenset(stratum.all_legs()) != x.ambient:
        raise InvalidArgument("ambient mismatch")
    if x.terms:
        degs = x.degrees()
        if len(degs) > 1:
            raise InvalidArgument("pairing needs a homogeneous class")
        if degs.pop() + stratum.num_edges() != dim_of(x.ambient):
            raise InvalidArgument("degree mismatch")
    return sum(
        (c * pair_term(t, d, stratum, x.ambient) for (t, d), c in x.terms.items()),
        Fraction(0),
    )


def zero_witness(x: Class0) -> Optional[Tree]:
    """A complementary stratum with nonzero pairing, or None when x = 0."""
    if not x.terms:
        return None
    degs = x.degrees()
    if len(degs) > 1:
        raise InvalidArgument("zero test needs a homogeneous class")
    deg = degs.pop()
    codim = dim_of(x.ambient) - deg
    by_tree: dict = {}
    for (tree, dec), coeff in x.terms.items():
        by_tree.setdefault(tree, []).append((dec, coeff))
    for stratum in strata_family(x.ambient, codim):
        total = Fraction(0)
        for tree, items in by_tree.items():
            ref = _refine(tree, stratum, x.ambient)
            if ref is None:
                continue
            gamma, edge_of_mask, shared = ref
            for dec, coeff in items:
                half = _transport_dec(tree, dec, x.ambient, edge_of_mask)
                legexp = dec.leg_dict()
                sub = Fraction(0)
                for sides in itertools.product((0, 1), repeat=len(shared)):
                    h2 = dict(half)
                    for m, side in zip(shared, sides):
                        slot = (edge_of_mask[m], side)
                        h2[slot] = h2.get(slot, 0) + 1
                    sub += integrate_term(gamma, make_decoration(h2, legexp), x.ambient)
                total += coeff * sub * (-1) ** len(shared)
        if total:
            return stratum
    return None


def is_zero(x: Class0) -> bool:
    return zero_witness(x) is None


# ---------------------------------------------------------------------------
# forgetful maps


def pullback_forget(x: Class0, new_leg) -> Class0:
    """Pull back along the map forgetting ``new_leg``.

    Per term and vertex: attach the leg, minus one splitting per decorated
    slot at that vertex (the ψ-comparison corrections).
    """
    if new_leg in x.ambient:
        raise InvalidArgument(f"leg {new_leg!r} already present")
    out = Class0(x.ambient | {new_leg})
    for (tree, dec), coeff in x.terms.items():
        for v in range(tree.num_vertices()):
            t2, d2 = attach_leg(tree, dec, v, new_leg)
            out._add(t2, d2, coeff)
            for slot in vertex_slots(tree, v):
                split = split_off(tree, dec, new_leg, slot, fresh=True)
                if split is not None:
                    out._add(split[0], split[1], -coeff)
    return out


def _eliminate_leg_psi(x: Class0, leg) -> Class0:
    """Rewrite every ψ_leg factor via ψ_leg = Σ δ_M (M containing leg, not a, b)."""
    ambient = x.ambient
    others = sort_labels(ambient - {leg})
    a, b = others[0], others[1]
    pool = sort_labels(ambient - {leg, a, b})
    divisors = []
    for r in range(1, len(pool) + 1):
        for extra in itertools.combinations(pool, r):
            part = set(extra) | {leg}
            if len(part) <= len(ambient) - 2:
                tree, _ = build_tree([sorted(ambient - part, key=label_key), sorted(part, key=label_key)], [(0, 1)])
                divisors.append(tree)
    current = x
    while True:
        pending = Class0(ambient)
        done = Class0(ambient)
        for (tree, dec), coeff in current.terms.items():
            if dec.leg_exp(leg):
                legexp = dec.leg_dict()
                legexp[leg] -= 1
                reduced = Class0(ambient, {(tree, make_decoration(dec.half_dict(), legexp)): coeff})
                for div in divisors:
                    pending += product_with_stratum(reduced, div)
            else:
                done._add(tree, dec, coeff)
        if not pending.terms:
            return done
        current = done + pending


def pushforward_forget(x: Class0, leg) -> Class0:
    """Push forward along the map forgetting ``leg``; degree drops by one."""
    if leg not in x.ambient:
        raise InvalidArgument(f"no leg {leg!r}")
    if len(x.ambient) < 4:
        raise InvalidArgument("cannot forget below three legs")
    ambient2 = x.ambient - {leg}
    flat = _eliminate_leg_psi(x, leg)
    out = Class0(ambient2)
    for (tree, dec), coeff in flat.terms.items():
        v = vertex_of_leg(tree, leg)
        if valence(tree, v) >= 4:
            # string rule: lower one decorated slot at v by one
            for slot in vertex_slots(tree, v):
                if slot == leg:
                    continue
                half = dec.half_dict()
                legexp = dec.leg_dict()
                store = half if isinstance(slot, tuple) else legexp
                if store.get(slot, 0):
                    store[slot] -= 1
                    legs_by = [list(ls) for ls in tree.legs]
                    legs_by[v].remove(leg)
                    t2, d2 = build_tree(legs_by, list(tree.edges), half_exp=half, leg_exp=legexp)
                    out._add(t2, d2, coeff)
        else:
            out._add(*_contract_trivalent(tree, dec, leg), coeff)
    return out


def _contract_trivalent(tree: Tree, dec: Decoration, leg):
    """Stabilize after removing ``leg`` from its trivalent vertex."""
    v = vertex_of_leg(tree, leg)
    half = dec.half_dict()
    legexp = dec.leg_dict()
    slots = [s for s in vertex_slots(tree, v) if s != leg]
    incident = [s for s in slots if isinstance(s, tuple)]
    # decorated slots at a trivalent vertex are already zero in normal form
    legs_by = [list(ls) for ls in tree.legs]
    legs_by[v].remove(leg)
    if len(incident) == 2:
        (e1, _), (e2, _) = incident
        u = tree.edges[e1][0] if tree.edges[e1][1] == v else tree.edges[e1][1]
        w = tree.edges[e2][0] if tree.edges[e2][1] == v else tree.edges[e2][1]
        keep = [k for k in range(tree.num_edges()) if k not in (e1, e2)]
        pairs = [tree.edges[k] for k in keep] + [(u, w)]
        new_half = {}
        for (eid, side), e in half.items():
            if eid in keep:
                new_half[(keep.index(eid), side)] = e
            elif eid == e1:
                if tree.edges[e1][side] != v:
                    new_half[(len(keep), 0)] = new_half.get((len(keep), 0), 0) + e
            elif eid == e2:
                if tree.edges[e2][side] != v:
                    new_half[(len(keep), 1)] = new_half.get((len(keep), 1), 0) + e
        legs_by2 = [ls for i, ls in enumerate(legs_by) if i != v]
        remap = [i - (1 if i > v else 0) for i in range(tree.num_vertices())]
        pairs = [(remap[a], remap[b]) for a, b in pairs]
        return build_tree(legs_by2, pairs, half_exp=new_half, leg_exp=legexp)
    # one edge and one leg: the leg inherits the far node branch's exponent
    (e1, _) = incident[0]
    other_leg = [s for s in slots if not isinstance(s, tuple)][0]
    u = tree.edges[e1][0] if tree.edges[e1][1] == v else tree.edges[e1][1]
    far_side = 0 if tree.edges[e1][0] == u else 1
    exp = half.pop((e1, far_side), 0)
    half.pop((e1, 1 - far_side), None)
    legexp[other_leg] = legexp.get(other_leg, 0) + exp
    legs_by[v].remove(other_leg)
    legs_by[u].append(other_leg)
    keep = [k for k in range(tree.num_edges()) if k != e1]
    new_half = {(keep.index(eid), side): e for (eid, side), e in half.items()}
    pairs = [tree.edges[k] for k in keep]
    legs_by2 = [ls for i, ls in enumerate(legs_by) if i != v]
    remap = [i - (1 if i > v else 0) for i in range(tree.num_vertices())]
    pairs = [(remap[a], remap[b]) for a, b in pairs]
    return build_tree(legs_by2, pairs, half_exp=new_half, leg_exp=legexp)


def collide(x: Class0, leg_i, leg_j) -> Class0:
    """Multiply with the {i,j} boundary divisor and forget ``leg_j``.

    Implemented by the direct rule: a trivalent vertex carrying both legs
    contracts with a ψ-bump and a sign; a larger vertex merges the legs (ψ on
    either colliding leg kills the term); legs apart give zero.
    """
    if leg_i == leg_j:
        raise InvalidArgument("cannot collide a leg with itself")
    if leg_i not in x.ambient or leg_j not in x.ambient:
        raise InvalidArgument("legs must sit in the ambient")
    out = Class0(x.ambient - {leg_j})
    for (tree, dec), coeff in x.terms.items():
        vi = vertex_of_leg(tree, leg_i)
        if vi != vertex_of_leg(tree, leg_j):
            continue
        if valence(tree, vi) == 3:
            # contract the supporting edge; the far branch exponent moves to
            # leg_i and gains one from the excess -ψ
            half = dec.half_dict()
            legexp = dec.leg_dict()
            e1 = [s for s in vertex_slots(tree, vi) if isinstance(s, tuple)][0][0]
            u = tree.edges[e1][0] if tree.edges[e1][1] == vi else tree.edges[e1][1]
            far_side = 0 if tree.edges[e1][0] == u else 1
            exp = half.pop((e1, far_side), 0)
            half.pop((e1, 1 - far_side), None)
            legs_by = [list(ls) for ls in tree.legs]
            legs_by[vi] = []
            legs_by[u].append(leg_i)
            legexp.pop(leg_j, None)
            legexp[leg_i] = exp + 1
            keep = [k for k in range(tree.num_edges()) if k != e1]
            new_half = {(keep.index(eid), side): e for (eid, side), e in half.items()}
            pairs = [tree.edges[k] for k in keep]
            legs_by2 = [ls for i2, ls in enumerate(legs_by) if i2 != vi]
            remap = [i2 - (1 if i2 > vi else 0) for i2 in range(tree.num_vertices())]
            pairs = [(remap[a], remap[b]) for a, b in pairs]
            t2, d2 = build_tree(legs_by2, pairs, half_exp=new_half, leg_exp=legexp)
            out._add(t2, d2, -coeff)
        else:
            if dec.leg_exp(leg_i) or dec.leg_exp(leg_j):
                continue
            legs_by = [list(ls) for ls in tree.legs]
            legs_by[vi].remove(leg_j)
            t2, d2 = build_tree(legs_by, list(tree.edges), half_exp=dec.half_dict(), leg_exp=dec.leg_dict())
            out._add(t2, d2, coeff)
    return out


def collide_via_product(x: Class0, leg_i, leg_j) -> Class0:
    """Reference route: product with δ_{ij} then pushforward; for cross-checks."""
    part = {leg_i, leg_j}
    tree, _ = build_tree(
        [sorted(x.ambient - part, key=label_key), sorted(part, key=label_key)],
        [(0, 1)],
    )
    return pushforward_forget(product_with_stratum(x, tree), leg_j)


# ---------------------------------------------------------------------------
# gluing pushforwards


def relabel_class(x: Class0, mapping: Mapping) -> Class0:
    out = Class0(frozenset(mapping.get(l, l) for l in x.ambient))
    for (tree, dec), coeff in x.terms.items():
        t2, d2 = relabel(tree, dec, mapping)
        out._add(t2, d2, coeff)
    return out


def glue_push_gamma(x: Class0, I, n: int) -> Class0:
    """Attach the coda vertex with legs I ∪ {n} at the first marked point.

    ``x`` lives on the space with legs {1..n-m, h0}; its leg 1 becomes the
    node, its remaining legs are relabeled order-preservingly onto
    {1..n-1} - I, and the output lives on {1..n, h0}.
    """
    I = frozenset(I)
    m = len(I)
    if not I or not I <= set(range(1, n)):
        raise InvalidArgument("I must be a non-empty subset of 1..n-1")
    expected = set(range(1, n - m + 1)) | {H0}
    if x.ambient != frozenset(expected):
        raise InvalidArgument("class lives on the wrong space for this coda")
    free = sorted(set(range(1, n)) - I)
    mapping = {old: new for old, new in zip(range(2, n - m + 1), free)}
    mapping[1] = "@node"
    y = relabel_class(x, mapping)
    out = Class0(frozenset(range(1, n + 1)) | {H0})
    for (tree, dec), coeff in y.terms.items():
        v = vertex_of_leg(tree, "@node")
        legs_by = [list(ls) for ls in tree.legs] + [sorted(I | {n})]
        legs_by[v].remove("@node")
        nv = tree.num_vertices()
        pairs = list(tree.edges) + [(v, nv)]
        half = dec.half_dict()
        legexp = dec.leg_dict()
        d_node = legexp.pop("@node", 0)
        if d_node:
            half[(tree.num_edges(), 0)] = d_node
        t2, d2 = build_tree(legs_by, pairs, half_exp=half, leg_exp=legexp)
        out._add(t2, d2, coeff)
    return out


def glue_push_sigma0(x: Class0, n: int) -> Class0:
    """Attach a rational bridge carrying h0 and the new leg n at the root leg."""
    if H0 not in x.ambient:
        raise InvalidArgument("sigma0 needs the root leg h0")
    expected = frozenset(range(1, n)) | {H0}
    if x.ambient != expected:
        raise InvalidArgument("class lives on the wrong space for sigma0")
    out = Class0(frozenset(range(1, n + 1)) | {H0})
    for (tree, dec), coeff in x.terms.items():
        v = vertex_of_leg(tree, H0)
        legs_by = [list(ls) for ls in tree.legs] + [[H0, n]]
        legs_by[v].remove(H0)
        nv = tree.num_vertices()
        pairs = list(tree.edges) + [(v, nv)]
        half = dec.half_dict()
        legexp = dec.leg_dict()
        d0 = legexp.pop(H0, 0)
        if d0:
            half[(tree.num_edges(), 0)] = d0
        t2, d2 = build_tree(legs_by, pairs, half_exp=half, leg_exp=legexp)
        out._add(t2, d2, coeff)
    return out
