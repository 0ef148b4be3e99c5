"""Brute-force Tarskian evaluation of FO/MSO sentences on a graph.

Set quantifiers range over all 2^n subsets.  Two mechanical devices keep this
tractable without changing the semantics:

* A subformula with free vertex variables ``v1 < ... < vk`` is evaluated once
  for all assignments at the same time, as an array indexed by those
  variables (set semantics).  Quantifying a vertex variable reduces its axis.
* The innermost set quantifier is evaluated for all 2^n values of its variable
  simultaneously: every truth value is a packed bit vector whose bit ``s``
  answers the question for the subset with characteristic vector ``s``.
  Outer set quantifiers are plain loops over subsets; for an existential one,
  subsets failing a conjunct that mentions no deeper set variable are skipped
  (``exists X. exists Y. (A(X) & B)`` is ``exists X. (A(X) & exists Y. B)``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..graph import Graph
from .formula import (
    Adj, And, Eq, ExistsFO, ExistsMSO, ForallFO, ForallMSO, Formula, FormulaError,
    Iff, Implies, In, MSO_QUANTIFIERS, Not, Or, free_variables, mso_quantifier_depth,
    subformulas,
)

MAX_N_ONE_SET_VAR = 14
MAX_SET_WORK_LOG2 = 24


class EvaluationGuardError(ValueError):
    def __init__(self, message: str, work_log2: int):
        super().__init__(message)
        self.work_log2 = work_log2


def check_guard(n: int, s: Formula) -> None:
    d = mso_quantifier_depth(s)
    work = n * d
    if d == 1 and n > MAX_N_ONE_SET_VAR:
        raise EvaluationGuardError(
            f"set enumeration would visit 2^{work} subsets; one nested set quantifier "
            f"is limited to n <= {MAX_N_ONE_SET_VAR}", work)
    if d >= 2 and work > MAX_SET_WORK_LOG2:
        raise EvaluationGuardError(
            f"set enumeration would visit 2^{work} set tuples ({d} nested set quantifiers, "
            f"n={n}); the limit is 2^{MAX_SET_WORK_LOG2}", work)


@lru_cache(maxsize=None)
def _membership(n: int) -> tuple[np.ndarray, np.ndarray]:
    """(membership words per vertex, all-ones words) for a batch of all 2^n subsets."""
    count = 1 << n
    subsets = np.arange(count, dtype=np.uint64)
    mem = ((subsets[None, :] >> np.arange(n, dtype=np.uint64)[:, None]) & np.uint64(1))
    if count < 64:
        weights = np.uint64(1) << subsets
        words = (mem * weights).sum(axis=1, dtype=np.uint64)[:, None]
        full = np.array([(1 << count) - 1], dtype=np.uint64)
    else:
        weights = np.uint64(1) << np.arange(64, dtype=np.uint64)
        words = (mem.reshape(n, count // 64, 64) * weights).sum(axis=2, dtype=np.uint64)
        full = np.full(count // 64, np.iinfo(np.uint64).max, dtype=np.uint64)
    words.setflags(write=False)
    full.setflags(write=False)
    return words, full


_SCALAR_FULL = np.array([1], dtype=np.uint64)


@dataclass
class _Val:
    vars: tuple[str, ...]
    arr: np.ndarray  # shape (n,) * len(vars) + (W,)


class _Ctx:
    def __init__(self, g: Graph, full: np.ndarray, sets: dict, batch_var: str | None, members: np.ndarray | None):
        self.g = g
        self.full = full
        self.sets = sets
        self.batch_var = batch_var
        self.members = members


def _layout(v: _Val, target: tuple[str, ...], n: int) -> np.ndarray:
    if v.vars == target:
        return v.arr
    shape = [n if name in v.vars else 1 for name in target] + [v.arr.shape[-1]]
    return v.arr.reshape(shape)


def _combine(a: _Val, b: _Val, op, n: int) -> _Val:
    target = tuple(sorted(set(a.vars) | set(b.vars)))
    return _Val(target, op(_layout(a, target, n), _layout(b, target, n)))


class _Evaluator:
    def __init__(self, g: Graph):
        self.g = g
        self.n = g.n
        n = g.n
        adj = np.zeros((n, n), dtype=bool)
        for u, v in g.edges():
            adj[u - 1, v - 1] = adj[v - 1, u - 1] = True
        self.adj = adj
        self.eye = np.eye(n, dtype=bool)

    def const(self, ctx: _Ctx, truth: bool) -> _Val:
        return _Val((), (ctx.full if truth else np.zeros_like(ctx.full)).copy())

    def ev(self, s: Formula, ctx: _Ctx) -> _Val:
        n = self.n
        full = ctx.full
        if isinstance(s, (Adj, Eq)):
            rel = self.adj if isinstance(s, Adj) else self.eye
            if s.x == s.y:
                diag = np.diagonal(rel)
                return _Val((s.x,), np.where(diag[:, None], full, np.uint64(0)))
            if s.x < s.y:
                m = rel
            else:
                m = rel.T
            return _Val(tuple(sorted((s.x, s.y))), np.where(m[:, :, None], full, np.uint64(0)))
        if isinstance(s, In):
            if s.set_var == ctx.batch_var:
                return _Val((s.x,), ctx.members)
            if s.set_var not in ctx.sets:
                raise FormulaError(f"unbound set variable {s.set_var!r}")
            mask = ctx.sets[s.set_var]
            inside = np.array([bool(mask >> v & 1) for v in range(n)])
            return _Val((s.x,), np.where(inside[:, None], full, np.uint64(0)))
        if isinstance(s, Not):
            a = self.ev(s.arg, ctx)
            return _Val(a.vars, a.arr ^ full)
        if isinstance(s, And):
            a = self.ev(s.left, ctx)
            if not a.arr.any():
                return a
            return _combine(a, self.ev(s.right, ctx), np.bitwise_and, n)
        if isinstance(s, Or):
            a = self.ev(s.left, ctx)
            if (a.arr == full).all():
                return a
            return _combine(a, self.ev(s.right, ctx), np.bitwise_or, n)
        if isinstance(s, Implies):
            a = self.ev(s.left, ctx)
            if not a.arr.any():
                return _Val(a.vars, a.arr ^ full)
            return _combine(_Val(a.vars, a.arr ^ full), self.ev(s.right, ctx), np.bitwise_or, n)
        if isinstance(s, Iff):
            a = self.ev(s.left, ctx)
            b = self.ev(s.right, ctx)
            x = _combine(a, b, np.bitwise_xor, n)
            return _Val(x.vars, x.arr ^ full)
        if isinstance(s, (ExistsFO, ForallFO)):
            body = self.ev(s.body, ctx)
            if s.var not in body.vars:
                return body
            axis = body.vars.index(s.var)
            red = np.bitwise_or if isinstance(s, ExistsFO) else np.bitwise_and
            return _Val(tuple(v for v in body.vars if v != s.var), red.reduce(body.arr, axis=axis))
        if isinstance(s, (ExistsMSO, ForallMSO)):
            return self.ev_set_quantifier(s, ctx)
        raise TypeError(f"not a formula node: {s!r}")

    def ev_set_quantifier(self, s: ExistsMSO | ForallMSO, ctx: _Ctx) -> _Val:
        exists = isinstance(s, ExistsMSO)
        if ctx.batch_var is None and not _has_set_quantifier(s.body):
            members, bfull = _membership(self.n)
            inner = _Ctx(self.g, bfull, ctx.sets, s.var, members)
            body = self.ev(s.body, inner)
            if exists:
                hit = body.arr.any(axis=-1)
            else:
                hit = (body.arr == bfull).all(axis=-1)
            return _Val(body.vars, np.where(hit[..., None], ctx.full, np.uint64(0)))
        if ctx.batch_var is not None:
            raise FormulaError("set quantifier nested under a batched set variable")
        candidates = range(1 << self.n)
        if exists:
            filt = _prefilter(s)
            if filt is not None:
                candidates = self.filter_candidates(s.var, filt, ctx)
        acc: _Val | None = None
        for mask in candidates:
            sets = dict(ctx.sets)
            sets[s.var] = mask
            val = self.ev(s.body, _Ctx(self.g, ctx.full, sets, None, None))
            if acc is None:
                acc = val
            else:
                acc = _combine(acc, val, np.bitwise_or if exists else np.bitwise_and, self.n)
            if exists and (acc.arr == ctx.full).all():
                break
            if not exists and not acc.arr.any():
                break
        if acc is None:
            return self.const(ctx, not exists)
        return acc

    def filter_candidates(self, var: str, filt: Formula, ctx: _Ctx) -> list[int]:
        members, bfull = _membership(self.n)
        val = self.ev(filt, _Ctx(self.g, bfull, ctx.sets, var, members))
        words = np.bitwise_and.reduce(val.arr.reshape(-1, val.arr.shape[-1]), axis=0) if val.vars else val.arr
        out = []
        for wi, word in enumerate(words.tolist()):
            while word:
                low = word & -word
                out.append(wi * 64 + low.bit_length() - 1)
                word ^= low
        return out


def _has_set_quantifier(s: Formula) -> bool:
    return any(isinstance(node, MSO_QUANTIFIERS) for node in subformulas(s))


def _conjuncts(s: Formula) -> list[Formula]:
    if isinstance(s, And):
        return _conjuncts(s.left) + _conjuncts(s.right)
    return [s]


def _prefilter(s: ExistsMSO) -> Formula | None:
    """Conjunction of the matrix conjuncts of ``s.body`` that any satisfying value of
    ``s.var`` must make true and that can be decided with ``s.var`` batched."""
    inner_bound: set[str] = set()
    node = s.body
    while isinstance(node, ExistsMSO):
        inner_bound.add(node.var)
        node = node.body
    if not inner_bound:
        return None
    keep = []
    for c in _conjuncts(node):
        fo, mso = free_variables(c)
        if not fo and not (mso & inner_bound) and not _has_set_quantifier(c):
            keep.append(c)
    if not keep:
        return None
    out = keep[0]
    for c in keep[1:]:
        out = And(out, c)
    return out


def evaluate(g: Graph, s: Formula) -> bool:
    """Truth value of the closed sentence ``s`` on ``g``."""
    fo, mso = free_variables(s)
    if fo or mso:
        raise FormulaError(f"not a sentence; free variables {sorted(fo | mso)}")
    check_guard(g.n, s)
    ev = _Evaluator(g)
    val = ev.ev(s, _Ctx(g, _SCALAR_FULL, {}, None, None))
    return bool(val.arr.reshape(-1)[0])
