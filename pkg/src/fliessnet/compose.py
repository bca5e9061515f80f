"""Composition products for single-input generating series.

compose(c, d) is the generating series of the cascade F_c[F_d[v]]: each
non-drift letter of c is substituted by e -> x0 (d sh e), the drift letter
prepends x0. mixed_compose(c, d) realizes the direct-plus-feedback channel
u = v + F_d[v] via the substitution e -> x1 e + x0 (d sh e).

Both products are linear in c, and the coefficient of a degree-n output word
depends on d only through degree n-1: every substitution prepends at least
one letter. That degreewise causality is what makes the network fixed point
converge in finitely many sweeps.
"""

from __future__ import annotations

import math

from .errors import AlphabetError
from .series import Coeff, MaximalSeriesSpec, Series, _shuffle_terms, as_coeff
from .words import Word

_TermMap = dict[Word, Coeff]


def _require_siso(c: Series, d: Series) -> None:
    if c.m != 1 or d.m != 1:
        raise AlphabetError("composition is defined over the alphabet {x0, x1}")


def _prepend(letter: int, e: _TermMap, limit: int) -> _TermMap:
    return {
        (letter,) + word: coeff for word, coeff in e.items() if len(word) < limit
    }


def _accumulate(acc: _TermMap, extra: _TermMap, scale: Coeff = 1) -> None:
    if scale == 1:
        for word, coeff in extra.items():
            acc[word] = acc.get(word, 0) + coeff
    elif scale != 0:
        for word, coeff in extra.items():
            acc[word] = acc.get(word, 0) + scale * coeff


def _substitute_input(d_terms: _TermMap, e: _TermMap, limit: int, mixed: bool) -> _TermMap:
    """Image of e under the non-drift substitution, truncated at limit."""
    out = _prepend(0, _shuffle_terms(d_terms, e, limit - 1), limit) if limit >= 1 else {}
    if mixed:
        _accumulate(out, _prepend(1, e, limit))
    return out


def _image(word: Word, d_terms: _TermMap, limit: int, mixed: bool, memo: dict) -> _TermMap:
    """psi(word)(1) computed right to left; suffixes shared through memo."""
    cached = memo.get(word)
    if cached is not None:
        return cached
    if not word:
        result: _TermMap = {(): 1}
    else:
        rest = _image(word[1:], d_terms, limit, mixed, memo)
        if word[0] == 0:
            result = _prepend(0, rest, limit)
        else:
            result = _substitute_input(d_terms, rest, limit, mixed)
    memo[word] = result
    return result


def compose_at(c: Series, d: Series, n_out: int, mixed: bool = False) -> Series:
    """Composition with an explicit output truncation degree.

    Valid whenever d is exact through n_out - 1; the network sweep relies on
    this to grow one degree per iteration instead of paying full depth every
    time.
    """
    _require_siso(c, d)
    exact_to = min(c.exact_to, d.exact_to + 1, n_out)
    d_terms = dict(d.terms)
    memo: dict = {}
    acc: _TermMap = {}
    for word, coeff in c.terms.items():
        if len(word) > n_out:
            continue
        _accumulate(acc, _image(word, d_terms, n_out, mixed, memo), coeff)
    return Series(1, n_out, acc, exact_to=exact_to)


def compose(c: Series, d: Series) -> Series:
    """Cascade composition c o d, truncated at the smaller operand degree."""
    return compose_at(c, d, min(c.max_degree, d.max_degree), mixed=False)


def mixed_compose(c: Series, d: Series) -> Series:
    """Composition with an identity channel: mixed_compose(c, 0) == c."""
    return compose_at(c, d, min(c.max_degree, d.max_degree), mixed=True)


def compose_maximal(spec: MaximalSeriesSpec, d: Series, n_out: int, mixed: bool) -> Series:
    """compose/mixed_compose with a maximal left operand, without enumerating words.

    The degree-k slice of a maximal series is K M^k k! (x0 + x1)^k, a
    concatenation power, so the image is K sum_k M^k k! A^k(1) where
    A(e) = x0 e + x0 (d sh e) (+ x1 e for the mixed product). Identical to
    the general route by linearity; this one stays polynomial in the degree.
    """
    if d.m != 1:
        raise AlphabetError("composition is defined over the alphabet {x0, x1}")
    K = as_coeff(spec.K)
    M = as_coeff(spec.M)
    d_terms = dict(d.terms)
    acc: _TermMap = {}
    e: _TermMap = {(): 1}
    for k in range(n_out + 1):
        _accumulate(acc, e, K * M**k * math.factorial(k))
        if k == n_out:
            break
        stepped = _prepend(0, e, n_out)
        _accumulate(stepped, _substitute_input(d_terms, e, n_out, mixed))
        e = stepped
    exact_to = min(d.exact_to + 1, n_out)
    return Series(1, n_out, acc, exact_to=exact_to)
