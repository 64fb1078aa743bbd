"""Taylor expansion of the dispersion symbol |xi|^p about the carrier (k, 0).

The corrector hierarchy needs the homogeneous Taylor polynomials
``T_j(a, b)`` of ``((k+a)^2 + b^2)^(p/2)`` with ``a = xi1 - k``, ``b = xi2``.
Coefficients are produced by exact symbolic differentiation of the closed-form
symbol, not copied from any hand expansion; in particular

    T_2(a, b) = (1/2) p (p-1) k^(p-2) a^2  +  (1/2) p k^(p-2) b^2

whose ``b^2`` coefficient carries the 1/2 from the second derivative.

A polynomial is a dict ``{(i, j): c}`` meaning ``sum c * a^i * b^j``; only
even ``j`` occur because the symbol is even in ``xi2``.  The same dicts act
as real frequency-side multipliers for envelope operators, with ``a, b`` read
as the slow frequencies.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial

Poly = tuple[tuple[tuple[int, int], float], ...]


def poly(d: dict[tuple[int, int], float]) -> Poly:
    """Canonical (sorted, zero-free) polynomial representation."""
    return tuple(sorted((ij, float(c)) for ij, c in d.items() if c != 0.0))


def poly_reflect(p: Poly) -> Poly:
    """Polynomial for the conjugated multiplier: flips odd monomials."""
    return tuple(((i, j), c * ((-1.0) ** (i + j))) for (i, j), c in p)


@lru_cache(maxsize=64)
def dispersion_taylor(p: float, k: float, max_degree: int) -> dict[int, Poly]:
    """Homogeneous Taylor pieces ``{degree: T_degree}`` of |xi|^p at (k, 0).

    Degrees 0..max_degree.  Exact rational differentiation via sympy when p is
    an integer, floating otherwise.
    """
    import sympy as sp

    if k <= 0:
        raise ValueError("carrier k must be positive")
    a, b = sp.symbols("a b", real=True)
    expo = sp.Rational(int(p), 2) if float(p).is_integer() else sp.Float(p) / 2
    f = ((k + a) ** 2 + b ** 2) ** expo
    out: dict[int, dict[tuple[int, int], float]] = {}
    for deg in range(max_degree + 1):
        coeffs: dict[tuple[int, int], float] = {}
        for i in range(deg + 1):
            j = deg - i
            if j % 2 != 0:
                continue  # symbol even in xi2
            d = sp.diff(f, a, i, b, j).subs({a: 0, b: 0})
            c = float(d) / (factorial(i) * factorial(j))
            if c != 0.0:
                coeffs[(i, j)] = c
        out[deg] = coeffs
    return {deg: poly(c) for deg, c in out.items()}


def taylor_through(p: float, k: float, max_degree: int) -> Poly:
    """Sum of all Taylor pieces of degree <= max_degree, as one polynomial."""
    pieces = dispersion_taylor(p, k, max_degree)
    merged: dict[tuple[int, int], float] = {}
    for deg in range(max_degree + 1):
        for ij, c in pieces[deg]:
            merged[ij] = merged.get(ij, 0.0) + c
    return poly(merged)
