"""Expression trees over the generator functions of a finite lattice.

A term is built from generators, the zero function, scalar multiples, sums,
joins (pointwise max) and meets (pointwise min).  Every term denotes a
positively homogeneous function on R^L that vanishes at the origin; the
grammar admits no nonzero constants, which is exactly why.  Evaluation is
exact structural recursion in double precision with no simplification pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import IndexOutOfRange, ParseError


class Term:
    """Base class; concrete nodes are Gen, Zero, Scale, Add, Join, Meet."""

    __slots__ = ()


@dataclass(frozen=True)
class Gen(Term):
    index: int


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class Scale(Term):
    coef: float
    sub: Term


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Join(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Meet(Term):
    left: Term
    right: Term


ZERO = Zero()


def pos(t: Term) -> Term:
    """Positive part: t joined with zero."""
    return Join(ZERO, t)


def neg(t: Term) -> Term:
    """Negative part: (-t) joined with zero."""
    return Join(ZERO, Scale(-1.0, t))


def abs_term(t: Term) -> Term:
    """Absolute value: t joined with -t."""
    return Join(t, Scale(-1.0, t))


def eval_term(t: Term, u: Sequence[float]) -> float:
    """Evaluate at a point of R^L (one coordinate per lattice element).

    The point need not satisfy the homomorphism law; anything in or beyond
    the cube is accepted.
    """
    if isinstance(t, Gen):
        if not 0 <= t.index < len(u):
            raise IndexOutOfRange(f"generator {t.index} outside 0..{len(u) - 1}")
        return float(u[t.index])
    if isinstance(t, Zero):
        return 0.0
    if isinstance(t, Scale):
        return t.coef * eval_term(t.sub, u)
    if isinstance(t, Add):
        return eval_term(t.left, u) + eval_term(t.right, u)
    if isinstance(t, Join):
        return max(eval_term(t.left, u), eval_term(t.right, u))
    if isinstance(t, Meet):
        return min(eval_term(t.left, u), eval_term(t.right, u))
    raise TypeError(f"not a term node: {t!r}")


def eval_term_batch(t: Term, pts: np.ndarray) -> np.ndarray:
    """Vectorized evaluation over an (m, n) array of points.

    Uses numpy elementwise ops, which follow the same IEEE-754 semantics as
    the scalar recursion, so results are bit-identical to eval_term.
    """
    if isinstance(t, Gen):
        if not 0 <= t.index < pts.shape[1]:
            raise IndexOutOfRange(f"generator {t.index} outside 0..{pts.shape[1] - 1}")
        return pts[:, t.index].astype(np.float64, copy=True)
    if isinstance(t, Zero):
        return np.zeros(pts.shape[0])
    if isinstance(t, Scale):
        return t.coef * eval_term_batch(t.sub, pts)
    if isinstance(t, Add):
        return eval_term_batch(t.left, pts) + eval_term_batch(t.right, pts)
    if isinstance(t, Join):
        return np.maximum(eval_term_batch(t.left, pts), eval_term_batch(t.right, pts))
    if isinstance(t, Meet):
        return np.minimum(eval_term_batch(t.left, pts), eval_term_batch(t.right, pts))
    raise TypeError(f"not a term node: {t!r}")


def lipschitz_bound(t: Term) -> float:
    """A certified bound B with |t(u) - t(v)| <= B * max|u - v|.

    Generators move 1:1 with their coordinate; sums add bounds; joins and
    meets keep the larger one.  Since t(0) = 0, B also bounds max|t| on the
    unit cube.
    """
    if isinstance(t, Gen):
        return 1.0
    if isinstance(t, Zero):
        return 0.0
    if isinstance(t, Scale):
        return abs(t.coef) * lipschitz_bound(t.sub)
    if isinstance(t, Add):
        return lipschitz_bound(t.left) + lipschitz_bound(t.right)
    if isinstance(t, (Join, Meet)):
        return max(lipschitz_bound(t.left), lipschitz_bound(t.right))
    raise TypeError(f"not a term node: {t!r}")


def generators(t: Term) -> set[int]:
    """Indices of all generators occurring in the term."""
    if isinstance(t, Gen):
        return {t.index}
    if isinstance(t, Zero):
        return set()
    if isinstance(t, Scale):
        return generators(t.sub)
    if isinstance(t, (Add, Join, Meet)):
        return generators(t.left) | generators(t.right)
    raise TypeError(f"not a term node: {t!r}")


def reindex(t: Term, mapping: dict[int, int]) -> Term:
    """Rewrite generator indices through the given map."""
    if isinstance(t, Gen):
        return Gen(mapping[t.index])
    if isinstance(t, Zero):
        return t
    if isinstance(t, Scale):
        return Scale(t.coef, reindex(t.sub, mapping))
    if isinstance(t, Add):
        return Add(reindex(t.left, mapping), reindex(t.right, mapping))
    if isinstance(t, Join):
        return Join(reindex(t.left, mapping), reindex(t.right, mapping))
    if isinstance(t, Meet):
        return Meet(reindex(t.left, mapping), reindex(t.right, mapping))
    raise TypeError(f"not a term node: {t!r}")


def restrict_consistency_check(t: Term, xstar: Sequence[float], members: Sequence[int]) -> bool:
    """Evaluating over the big index set equals evaluating the reindexed term
    over the restriction of the point.  Holds structurally for every term
    whose generators lie in the subset; this is a regression guard.
    """
    mem = list(members)
    gens = generators(t)
    if not gens <= set(mem):
        raise ValueError("term has generators outside the subset")
    local = {p: i for i, p in enumerate(mem)}
    big = eval_term(t, xstar)
    small = eval_term(reindex(t, local), [xstar[p] for p in mem])
    return big == small


# --- text grammar ----------------------------------------------------------
#
# Prefix s-expressions, whitespace-insensitive:
#   (gen i)  zero  (scale c t)  (add t t)  (join t t)  (meet t t)
# plus sugar (pos t) and (abs t), which desugar to joins.


_Token = tuple[str, str, int, int]  # kind, text, line, column


def _tokenize(text: str) -> Iterator[_Token]:
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch in "()":
            yield ("paren", ch, line, col)
            col += 1
            i += 1
            continue
        start = i
        start_col = col
        while i < len(text) and not text[i].isspace() and text[i] not in "()":
            i += 1
            col += 1
        yield ("atom", text[start:i], line, start_col)
    yield ("eof", "", line, col)


class _Parser:
    def __init__(self, text: str):
        self._tokens = list(_tokenize(text))
        self._pos = 0

    def _peek(self) -> _Token:
        return self._tokens[self._pos]

    def _next(self) -> _Token:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _fail(self, message: str, tok: _Token):
        raise ParseError(message, tok[2], tok[3])

    def parse(self) -> Term:
        term = self._term()
        tok = self._peek()
        if tok[0] != "eof":
            self._fail(f"unexpected trailing input {tok[1]!r}", tok)
        return term

    def _term(self) -> Term:
        tok = self._next()
        if tok[0] == "atom":
            if tok[1] == "zero":
                return ZERO
            self._fail(f"expected a term, got {tok[1]!r}", tok)
        if tok[0] != "paren" or tok[1] != "(":
            self._fail("expected '(' or 'zero'", tok)
        head = self._next()
        if head[0] != "atom":
            self._fail("expected an operator name after '('", head)
        op = head[1]
        if op == "gen":
            idx = self._int()
            self._close()
            return Gen(idx)
        if op == "scale":
            coef = self._number()
            sub = self._term()
            self._close()
            return Scale(coef, sub)
        if op in ("add", "join", "meet"):
            left = self._term()
            right = self._term()
            self._close()
            node = {"add": Add, "join": Join, "meet": Meet}[op]
            return node(left, right)
        if op == "pos":
            sub = self._term()
            self._close()
            return pos(sub)
        if op == "abs":
            sub = self._term()
            self._close()
            return abs_term(sub)
        self._fail(f"unknown operator {op!r}", head)

    def _int(self) -> int:
        tok = self._next()
        if tok[0] != "atom":
            self._fail("expected a generator index", tok)
        try:
            value = int(tok[1])
        except ValueError:
            self._fail(f"expected an integer, got {tok[1]!r}", tok)
        if value < 0:
            self._fail("generator index must be nonnegative", tok)
        return value

    def _number(self) -> float:
        tok = self._next()
        if tok[0] != "atom":
            self._fail("expected a coefficient", tok)
        try:
            value = float(tok[1])
        except ValueError:
            self._fail(f"expected a decimal number, got {tok[1]!r}", tok)
        if not math.isfinite(value):
            self._fail("coefficient must be finite", tok)
        return value

    def _close(self):
        tok = self._next()
        if tok[0] != "paren" or tok[1] != ")":
            self._fail("expected ')'", tok)


def parse_term(text: str) -> Term:
    return _Parser(text).parse()


def format_term(t: Term) -> str:
    """Canonical text form; parse_term(format_term(t)) == t."""
    if isinstance(t, Gen):
        return f"(gen {t.index})"
    if isinstance(t, Zero):
        return "zero"
    if isinstance(t, Scale):
        return f"(scale {t.coef!r} {format_term(t.sub)})"
    if isinstance(t, Add):
        return f"(add {format_term(t.left)} {format_term(t.right)})"
    if isinstance(t, Join):
        return f"(join {format_term(t.left)} {format_term(t.right)})"
    if isinstance(t, Meet):
        return f"(meet {format_term(t.left)} {format_term(t.right)})"
    raise TypeError(f"not a term node: {t!r}")
