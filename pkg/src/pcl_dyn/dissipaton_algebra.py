"""Single-dissipaton ordering algebra.

Coefficient tables for the generalized-normal-ordering calculus: Hermite
expansion of ordered powers, the ordered product rule, and the contraction
of an ordered power with exp(+-i lam f).  Everything here is one scalar
dissipaton; the hierarchy builder composes per-mode tables as products,
since each dissipaton space is independent of the others.

Polynomials over the ordered monomials O(f^j) are plain dicts
{degree: complex coefficient}.
"""

from __future__ import annotations

import cmath
import math

__all__ = [
    "hermite_expand",
    "power_to_ordered",
    "ordered_product",
    "exp_contraction",
    "poly_mul_ordered",
]


def _trim(poly: dict, tol: float = 0.0) -> dict:
    return {j: c for j, c in poly.items() if c != 0 and abs(c) > tol}


def hermite_expand(n: int, eta: complex) -> dict:
    """Coefficients of the ordered power O(f^n) over plain powers f^j.

    These are the Hermite-type polynomials H_n generated by
    exp(z f - eta z^2 / 2); they obey H_{n+1} = f H_n - eta n H_{n-1}.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    prev = {0: 1.0 + 0j}  # H_0
    if n == 0:
        return prev
    cur = {1: 1.0 + 0j}  # H_1
    for k in range(1, n):
        nxt: dict = {}
        for j, c in cur.items():
            nxt[j + 1] = nxt.get(j + 1, 0) + c
        for j, c in prev.items():
            nxt[j] = nxt.get(j, 0) - eta * k * c
        prev, cur = cur, _trim(nxt)
    return cur


def power_to_ordered(n: int, eta: complex) -> dict:
    """Expand the plain power f^n over ordered monomials O(f^j).

    Exact inverse of reading hermite_expand as O(f^n) = H_n(f): substitute
    the highest plain power repeatedly.  Coefficients differ from the
    Hermite ones only by the sign flip eta -> -eta.
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    # Mirrored recurrence: inverting the Hermite triangle flips eta -> -eta,
    # which is the i^{-n} O[H_n(i f)] identity in disguise.
    prev = {0: 1.0 + 0j}
    if n == 0:
        return prev
    cur = {1: 1.0 + 0j}
    for k in range(1, n):
        nxt: dict = {}
        for j, c in cur.items():
            nxt[j + 1] = nxt.get(j + 1, 0) + c
        for j, c in prev.items():
            nxt[j] = nxt.get(j, 0) + eta * k * c
        prev, cur = cur, _trim(nxt)
    return cur


def ordered_product(m: int, n: int, eta: complex) -> dict:
    """Product rule O(f^m) O(f^n) = sum_l C(m,l) C(n,l) eta^l l! O(f^{m+n-2l})."""
    if m < 0 or n < 0:
        raise ValueError("degrees must be non-negative")
    out: dict = {}
    for l in range(min(m, n) + 1):
        coeff = math.comb(m, l) * math.comb(n, l) * math.factorial(l) * (eta**l)
        out[m + n - 2 * l] = out.get(m + n - 2 * l, 0) + coeff
    return _trim(out)


def poly_mul_ordered(p: dict, q: dict, eta: complex) -> dict:
    """Multiply two polynomials in ordered monomials using ordered_product."""
    out: dict = {}
    for a, ca in p.items():
        for b, cb in q.items():
            for j, c in ordered_product(a, b, eta).items():
                out[j] = out.get(j, 0) + ca * cb * c
    return _trim(out)


def exp_contraction(
    n: int,
    lam: float,
    eta: complex,
    sign: int = +1,
    max_degree: int | None = None,
    prefactor: bool = True,
) -> dict:
    """Contract O(f^n) with exp(sign * i lam f) acting from the same side.

    Returns the coefficient of each O(f^j), j <= max_degree, of

        O(f^n) e^{i lam f} = e^{-eta lam^2/2} sum_{m,l}
            (i lam)^m eta^l / (m-l)! * C(n,l) * O(f^{n+m-2l}),

    with i lam -> -i lam for sign = -1.  For a target degree j the sum is
    finite: l <= n and m = j - n + 2l.  ``prefactor=False`` omits the
    e^{-eta lam^2/2} factor (used when an external renormalization factor
    replaces it).
    """
    if n < 0:
        raise ValueError("degree must be non-negative")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if max_degree is None:
        max_degree = n + 2
    il = sign * 1j * lam
    pref = cmath.exp(-eta * lam**2 / 2.0) if prefactor else 1.0 + 0j
    out: dict = {}
    for j in range(max_degree + 1):
        total = 0.0 + 0j
        for l in range(n + 1):
            m = j - n + 2 * l
            if m < 0 or l > m:
                continue
            total += il**m * eta**l / math.factorial(m - l) * math.comb(n, l)
        if total != 0:
            out[j] = pref * total
    return out
