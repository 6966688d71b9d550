"""Cycle systems from weighted rooted trees, and their identity checks.

The D-polynomial of a rooted context collects, per tree and decoration, the
signed coefficient times the stratum pushforward at the D-power minus the size
of the echelon index set.  Its graded pieces (by class degree) are assembled
directly; degrees above the ambient dimension vanish and are never built.

Every verifier returns a `VerificationReport`; failures carry the witness
stratum whose pairing does not vanish.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .trees import (
    H0,
    InvalidArgument,
    build_tree,
    child_edges_of,
    decorations_of_degree,
    enumerate_trees0,
    make_decoration,
    path_edges,
    vertex_of_leg,
)
from .strata0 import (
    Class0,
    collide,
    dim_of,
    glue_push_gamma,
    glue_push_sigma0,
    pullback_forget,
    relabel_class,
    zero,
    zero_witness,
)
from .weights import coeff_c_im, coeff_c_im_truncated, coeff_d


@dataclass(frozen=True)
class VerificationReport:
    identity: str
    params: tuple
    passed: bool
    witness: Optional[object] = None
    seconds: float = 0.0

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        extra = "" if self.passed else f"  witness={self.witness!r}"
        return f"{status} {self.identity}{self.params}{extra}"


def _report(identity: str, params: tuple, diff: Class0, t0: float) -> VerificationReport:
    w = zero_witness(diff)
    return VerificationReport(identity, params, w is None, w, time.perf_counter() - t0)


def ambient0(n: int) -> frozenset:
    return frozenset(range(1, n + 1)) | {H0}


_z_cache: dict = {}


def z_cycle(n: int, i: int, j: int, m: int = 1) -> Class0:
    """The degree-(n+m-2+j-i) cycle of the rooted D-polynomial."""
    if n < 2 or i < 1 or m < 1:
        raise InvalidArgument("z_cycle needs n >= 2, i >= 1, m >= 1")
    key = (n, i, j, m, False)
    if key not in _z_cache:
        _z_cache[key] = _assemble_z(n, i, j, m, truncated=False)
    return _z_cache[key]


def z_truncated(n: int, i: int, j: int) -> Class0:
    """Z^t: the same sum restricted by the truncation property at the root."""
    key = (n, i, j, 1, True)
    if key not in _z_cache:
        _z_cache[key] = _assemble_z(n, i, j, 1, truncated=True)
    return _z_cache[key]


def _assemble_z(n: int, i: int, j: int, m: int, truncated: bool) -> Class0:
    amb = ambient0(n)
    degree = n + m - 2 + j - i
    out = zero(amb)
    if degree < 0 or degree > dim_of(amb):
        return out
    for tree in enumerate_trees0(n):
        psi_budget = degree - tree.num_edges()
        if psi_budget < 0:
            continue
        sign = (-1) ** (1 + tree.num_edges())
        for dec in decorations_of_degree(tree, psi_budget, leg_bounds={1: m}):
            if truncated:
                c = coeff_c_im_truncated(tree, dec, i, m)
            else:
                c = coeff_c_im(tree, dec, i, m)
            if c:
                out._add(tree, dec, Fraction(sign * c))
    return out


@dataclass(frozen=True)
class DecPolynomial:
    """Graded coefficients of the D-polynomial, keyed by the index j."""

    n: int
    i: int
    m: int
    coefficients: tuple  # of (j, Class0)

    def coefficient(self, j: int) -> Class0:
        for jj, c in self.coefficients:
            if jj == j:
                return c
        return zero(ambient0(self.n))

    def j_range(self):
        return [j for j, _ in self.coefficients]


def dec_polynomial(n: int, i: int, m: int = 1) -> DecPolynomial:
    """All graded pieces of Dec with degrees inside the ambient dimension."""
    if n < 2 or i < 1 or m < 1:
        raise InvalidArgument("dec_polynomial needs n >= 2, i >= 1, m >= 1")
    lo = i - n - m + 2
    hi = lo + dim_of(ambient0(n))
    coeffs = tuple((j, z_cycle(n, i, j, m)) for j in range(lo, hi + 1))
    return DecPolynomial(n, i, m, coeffs)


def e_cycle(n: int, I, i: int, j: int) -> Class0:
    """E_I(i,j): the coda cycle of degree n-1+j-i."""
    I = frozenset(I)
    if not I or not I <= set(range(1, n)):
        raise InvalidArgument("I must be a non-empty subset of 1..n-1")
    amb = ambient0(n)
    degree = n - 1 + j - i
    out = zero(amb)
    if degree < 0 or degree > dim_of(amb):
        return out
    full = I == set(range(1, n))
    for tree in enumerate_trees0(n):
        v_n = vertex_of_leg(tree, n)
        if child_edges_of(tree, v_n):
            continue
        path = path_edges(tree, v_n)
        if not path:
            if not full:
                continue
        elif set(tree.legs[v_n]) != I | {n}:
            continue
        psi_budget = degree - tree.num_edges()
        if psi_budget < 0:
            continue
        sign = (-1) ** tree.num_edges()
        coda_head = (path[-1], 1) if path else None
        for dec in decorations_of_degree(tree, psi_budget):
            if coda_head is not None and dec.half_exp(coda_head):
                continue
            if coda_head is None and dec.degree():
                continue
            d = coeff_d(tree, dec, i, I)
            if d:
                out._add(tree, dec, Fraction(sign) * d)
    return out


# ---------------------------------------------------------------------------
# identity checks


def _recursion_lhs(n: int, i: int, j: int) -> Class0:
    lhs = pullback_forget(z_cycle(n - 1, i, j + 1), n)
    for I in _nonempty_subsets(n - 1):
        e = e_cycle(n, I, i, j)
        if e.terms:
            lhs = lhs - e.scale(len(I))
    return lhs


def _nonempty_subsets(k: int):
    import itertools

    for r in range(1, k + 1):
        yield from (frozenset(c) for c in itertools.combinations(range(1, k + 1), r))


def verify_recursion_a(n: int, i: int, j: int) -> VerificationReport:
    """Pullback recursion onto the truncated cycle, for 1 <= i <= n-2."""
    if not 1 <= i <= n - 2:
        raise InvalidArgument("verify_recursion_a needs 1 <= i <= n-2")
    t0 = time.perf_counter()
    diff = _recursion_lhs(n, i, j) - z_truncated(n, i, j)
    return _report("recursion_a", (n, i, j), diff, t0)


def verify_recursion_all(n: int, i: int, j: int) -> VerificationReport:
    """The same identity without the upper restriction on i."""
    if i < 1:
        raise InvalidArgument("i must be >= 1")
    t0 = time.perf_counter()
    diff = _recursion_lhs(n, i, j) - z_truncated(n, i, j)
    return _report("recursion_all", (n, i, j), diff, t0)


def verify_dect(n: int, i: int, j: int) -> VerificationReport:
    """Z = Z^t - sum_{i+ > i} i sigma0_*(Z(n-1, i+, j+)) with j+ - i+ = j - i."""
    if i < 1:
        raise InvalidArgument("i must be >= 1")
    t0 = time.perf_counter()
    diff = z_cycle(n, i, j) - z_truncated(n, i, j)
    for ip in range(i + 1, n - 1):
        jp = j - i + ip
        corr = z_cycle(n - 1, ip, jp)
        if corr.terms:
            diff = diff + glue_push_sigma0(corr, n).scale(i)
    return _report("dect", (n, i, j), diff, t0)


def verify_decrec(n: int, i: int) -> VerificationReport:
    """The D-polynomial recursion, checked coefficientwise in D^{-1}."""
    if n < 3 or i < 1:
        raise InvalidArgument("verify_decrec needs n >= 3, i >= 1")
    t0 = time.perf_counter()
    for j in range(i - n + 1, i):
        diff = _recursion_lhs(n, i, j) - z_cycle(n, i, j)
        for ip in range(i + 1, n - 1):
            jp = j - i + ip
            corr = z_cycle(n - 1, ip, jp)
            if corr.terms:
                diff = diff - glue_push_sigma0(corr, n).scale(i)
        w = zero_witness(diff)
        if w is not None:
            return VerificationReport("decrec", (n, i), False, (j, w), time.perf_counter() - t0)
    return VerificationReport("decrec", (n, i), True, None, time.perf_counter() - t0)


def verify_vanishing(n_max: int):
    """is_zero for Z(n,i,j) and Z^t(n,i,j), 1 <= j < i <= n-1, 3 <= n <= n_max."""
    if n_max < 3:
        raise InvalidArgument("n_max must be >= 3")
    reports = []
    for n in range(3, n_max + 1):
        for i in range(1, n):
            for j in range(1, i):
                t0 = time.perf_counter()
                reports.append(_report("vanishing_z", (n, i, j), z_cycle(n, i, j), t0))
                t0 = time.perf_counter()
                reports.append(_report("vanishing_zt", (n, i, j), z_truncated(n, i, j), t0))
    return reports


def collide_first_legs(x: Class0, steps: int) -> Class0:
    """Collide legs 1 and 2, relabel down, repeated ``steps`` times."""
    for _ in range(steps):
        x = collide(x, 1, 2)
        mapping = {k: k - 1 for k in sorted(l for l in x.ambient if isinstance(l, int) and l >= 3)}
        x = relabel_class(x, mapping)
    return x


def verify_collide0(n: int, m_target: int) -> VerificationReport:
    """Colliding the first m points carries Z(n,i,j) onto Z^m(n-m+1,i,j)."""
    if not 1 <= m_target < n:
        raise InvalidArgument("need 1 <= m < n")
    t0 = time.perf_counter()
    n_small = n - m_target + 1
    for i in range(1, n):
        for j in range(i - n + 1, i):
            collided = collide_first_legs(z_cycle(n, i, j), m_target - 1)
            diff = collided - z_cycle(n_small, i, j, m_target)
            w = zero_witness(diff)
            if w is not None:
                return VerificationReport(
                    "collide0", (n, m_target), False, (i, j, w), time.perf_counter() - t0
                )
    return VerificationReport("collide0", (n, m_target), True, None, time.perf_counter() - t0)


def verify_ei_pushforward(n: int, I, i: int) -> VerificationReport:
    """E_I^i(D) = γ_* Dec^{i,m}(D), termwise per D-coefficient."""
    I = frozenset(I)
    m = len(I)
    if not I or not I <= set(range(1, n)) or m > n - 2:
        raise InvalidArgument("need a non-empty I inside 1..n-1 with |I| <= n-2")
    t0 = time.perf_counter()
    # degrees outside [0, dim] vanish on both sides, so this j-range is complete
    for j in range(i - n + 1, i):
        lhs = e_cycle(n, I, i, j)
        rhs = glue_push_gamma(z_cycle(n - m, i, j, m), I, n)
        if lhs == rhs:
            continue
        w = zero_witness(lhs - rhs)
        if w is not None:
            return VerificationReport("ei_pushforward", (n, tuple(sorted(I)), i), False, (j, w), time.perf_counter() - t0)
    return VerificationReport("ei_pushforward", (n, tuple(sorted(I)), i), True, None, time.perf_counter() - t0)


def closed_form_z_top(n: int) -> Class0:
    """-(n-1) C(n,2) ψ_{h0} + (n-1) Σ_m C(m,2) δ_m, the displayed divisor form."""
    import itertools

    amb = ambient0(n)
    out = zero(amb)
    top, _ = build_tree([sorted(amb, key=str)], [])
    out._add(top, make_decoration(leg_exp={H0: 1}), -Fraction((n - 1) * n * (n - 1), 2))
    for r in range(2, n):
        coeff = Fraction((n - 1) * r * (r - 1), 2)
        for M in itertools.combinations(range(1, n + 1), r):
            t, _ = build_tree([sorted(amb - set(M), key=str), sorted(M)], [(0, 1)])
            out._add(t, make_decoration(), coeff)
    return out


def verify_closed_forms(n: int) -> VerificationReport:
    """Termwise closed form of Z(n,n-1,1), its vanishing, and the j-recursion."""
    if n < 3:
        raise InvalidArgument("n must be >= 3")
    t0 = time.perf_counter()
    z = z_cycle(n, n - 1, 1)
    if z != closed_form_z_top(n):
        return VerificationReport("closed_forms", (n,), False, "termwise closed form", time.perf_counter() - t0)
    w = zero_witness(z)
    if w is not None:
        return VerificationReport("closed_forms", (n,), False, w, time.perf_counter() - t0)
    for j in range(2, n - 1):
        diff = (
            z_cycle(n, n - 1, j)
            - z_cycle(n, n - 2, j - 1).scale(Fraction(n - 1, n - 2))
            - z_cycle(n, n - 1, j - 1).mul_psi(H0).scale(n - 1)
        )
        w = zero_witness(diff)
        if w is not None:
            return VerificationReport("closed_forms", (n,), False, (j, w), time.perf_counter() - t0)
    return VerificationReport("closed_forms", (n,), True, None, time.perf_counter() - t0)
