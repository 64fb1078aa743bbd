"""Symbolic algebra over envelope fields.

The corrector hierarchy and the packet time derivatives need expressions in
the envelopes A^(1)..A^(depth): pointwise products, conjugates, polynomial
spectral operators, and slow-time derivatives where every d/dT is replaced by
the right-hand side of the corresponding evolution equation.  Expressions are
plain nested tuples so that structurally equal subtrees compare and hash
equal, which the evaluator exploits to share work within one evaluation.

Node forms
----------
    ("env", n)              the envelope A^(n) at the current slow time
    ("cenv", n)             its complex conjugate
    ("op", poly, e)         real frequency-polynomial multiplier applied to e
    ("prod", (e1, ..., em)) pointwise product (sorted: products commute)
    ("sum", ((c1, e1), ...)) complex-weighted sum

Operator polynomials are the dicts of :mod:`modlab.symbols`: `(i, j) -> c`
meaning the multiplier ``c * eta1^i * eta2^j`` on slow frequencies.  They are
kept real; imaginary prefactors live in sum coefficients, so conjugation is
the monomial sign flip of :func:`modlab.symbols.poly_reflect`.
"""

from __future__ import annotations

import numpy as np
import scipy.fft as _fft

from .grid import TorusGrid
from .symbols import Poly, poly_reflect

Expr = tuple


def env(n: int) -> Expr:
    return ("env", n)


def cenv(n: int) -> Expr:
    return ("cenv", n)


def op(p: Poly, e: Expr) -> Expr:
    return ("op", p, e)


def prod(*es: Expr) -> Expr:
    return ("prod", tuple(sorted(es)))


def esum(terms) -> Expr:
    return ("sum", tuple((complex(c), e) for c, e in terms))


def conj(e: Expr) -> Expr:
    """Conjugate, pushed down to the leaves."""
    tag = e[0]
    if tag == "env":
        return ("cenv", e[1])
    if tag == "cenv":
        return ("env", e[1])
    if tag == "op":
        return ("op", poly_reflect(e[1]), conj(e[2]))
    if tag == "prod":
        return ("prod", tuple(sorted(conj(x) for x in e[1])))
    if tag == "sum":
        return ("sum", tuple((np.conj(c), conj(x)) for c, x in e[1]))
    raise ValueError(f"bad expression tag {tag!r}")


def d_slow_time(e: Expr, rhs: dict[int, Expr]) -> Expr:
    """d/dT of ``e`` with every envelope derivative replaced via ``rhs``.

    ``rhs[n]`` must be the evolution expression for d A^(n)/dT; the product
    rule and linearity do the rest.  T-differentiation commutes with the
    spectral operators.
    """
    tag = e[0]
    if tag == "env":
        return rhs[e[1]]
    if tag == "cenv":
        return conj(rhs[e[1]])
    if tag == "op":
        return ("op", e[1], d_slow_time(e[2], rhs))
    if tag == "prod":
        factors = e[1]
        terms = []
        for i in range(len(factors)):
            rest = factors[:i] + factors[i + 1:]
            dfi = d_slow_time(factors[i], rhs)
            terms.append((1.0 + 0j, prod(dfi, *rest) if rest else dfi))
        return ("sum", tuple(terms))
    if tag == "sum":
        return ("sum", tuple((c, d_slow_time(x, rhs)) for c, x in e[1]))
    raise ValueError(f"bad expression tag {tag!r}")


class EnvelopeEvaluator:
    """Evaluates expressions against spectral envelope arrays on one grid."""

    def __init__(self, grid: TorusGrid):
        self.grid = grid
        self._poly_cache: dict[Poly, np.ndarray] = {}

    def multiplier(self, p: Poly) -> np.ndarray:
        m = self._poly_cache.get(p)
        if m is None:
            K1, K2 = self.grid.xi
            m = np.zeros((self.grid.nx, self.grid.ny))
            for (i, j), c in p:
                m += c * K1 ** i * K2 ** j
            # the Nyquist lines have no mirror mode, which breaks the
            # conjugation rule for odd monomials; envelopes carry no content
            # there, so the lines are zeroed for every operator
            m[self.grid.nx // 2, :] = 0.0
            m[:, self.grid.ny // 2] = 0.0
            self._poly_cache[p] = m
        return m

    def evaluate(self, e: Expr, env_hat: dict[int, np.ndarray],
                 memo: dict | None = None) -> np.ndarray:
        """Physical-space value of ``e``; ``env_hat[n]`` are spectral arrays.

        ``memo`` shares subtree results within one call; pass the same dict
        when evaluating several expressions against the same envelopes.
        """
        if memo is None:
            memo = {}
        hit = memo.get(e)
        if hit is not None:
            return hit
        tag = e[0]
        if tag == "env":
            v = _fft.ifft2(env_hat[e[1]])
        elif tag == "cenv":
            v = np.conj(_fft.ifft2(env_hat[e[1]]))
        elif tag == "op":
            v = _fft.ifft2(self.multiplier(e[1]) * _fft.fft2(
                self.evaluate(e[2], env_hat, memo)))
        elif tag == "prod":
            v = self.evaluate(e[1][0], env_hat, memo).copy()
            for x in e[1][1:]:
                v *= self.evaluate(x, env_hat, memo)
        elif tag == "sum":
            v = np.zeros((self.grid.nx, self.grid.ny), dtype=np.complex128)
            for c, x in e[1]:
                v += c * self.evaluate(x, env_hat, memo)
        else:
            raise ValueError(f"bad expression tag {tag!r}")
        memo[e] = v
        return v
