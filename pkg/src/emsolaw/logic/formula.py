"""Formula AST for first-order and monadic second-order sentences over graphs.

FO variables are lowercase names and range over vertices; MSO variables are
uppercase names and range over vertex sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Adj:
    x: str
    y: str


@dataclass(frozen=True)
class Eq:
    x: str
    y: str


@dataclass(frozen=True)
class In:
    set_var: str
    x: str


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ExistsFO:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForallFO:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsMSO:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForallMSO:
    var: str
    body: "Formula"


Formula = Union[Adj, Eq, In, Not, And, Or, Implies, Iff, ExistsFO, ForallFO, ExistsMSO, ForallMSO]

ATOMS = (Adj, Eq, In)
BINARY = (And, Or, Implies, Iff)
FO_QUANTIFIERS = (ExistsFO, ForallFO)
MSO_QUANTIFIERS = (ExistsMSO, ForallMSO)
QUANTIFIERS = FO_QUANTIFIERS + MSO_QUANTIFIERS


def is_fo_name(name: str) -> bool:
    return name[:1].islower()


def is_mso_name(name: str) -> bool:
    return name[:1].isupper()


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction of one or more formulas."""
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def subformulas(s: Formula) -> Iterator[Formula]:
    yield s
    if isinstance(s, Not):
        yield from subformulas(s.arg)
    elif isinstance(s, BINARY):
        yield from subformulas(s.left)
        yield from subformulas(s.right)
    elif isinstance(s, QUANTIFIERS):
        yield from subformulas(s.body)


def free_variables(s: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """(free FO variables, free MSO variables)."""
    if isinstance(s, (Adj, Eq)):
        return frozenset((s.x, s.y)), frozenset()
    if isinstance(s, In):
        return frozenset((s.x,)), frozenset((s.set_var,))
    if isinstance(s, Not):
        return free_variables(s.arg)
    if isinstance(s, BINARY):
        lf, lm = free_variables(s.left)
        rf, rm = free_variables(s.right)
        return lf | rf, lm | rm
    fo, mso = free_variables(s.body)
    if isinstance(s, FO_QUANTIFIERS):
        return fo - {s.var}, mso
    return fo, mso - {s.var}


def is_sentence(s: Formula) -> bool:
    fo, mso = free_variables(s)
    return not fo and not mso


def check_sorts(s: Formula) -> None:
    """Raise :class:`FormulaError` if a name is used with the wrong sort."""
    for node in subformulas(s):
        names: list[tuple[str, bool]] = []
        if isinstance(node, (Adj, Eq)):
            names = [(node.x, False), (node.y, False)]
        elif isinstance(node, In):
            names = [(node.set_var, True), (node.x, False)]
        elif isinstance(node, FO_QUANTIFIERS):
            names = [(node.var, False)]
        elif isinstance(node, MSO_QUANTIFIERS):
            names = [(node.var, True)]
        for name, mso in names:
            if (mso and not is_mso_name(name)) or (not mso and not is_fo_name(name)):
                kind = "MSO" if mso else "FO"
                raise FormulaError(f"{name!r} used as an {kind} variable")


def quantifier_depth(s: Formula) -> int:
    """Longest chain of nested quantifiers of either sort."""
    if isinstance(s, ATOMS):
        return 0
    if isinstance(s, Not):
        return quantifier_depth(s.arg)
    if isinstance(s, BINARY):
        return max(quantifier_depth(s.left), quantifier_depth(s.right))
    return 1 + quantifier_depth(s.body)


def fo_quantifier_depth(s: Formula) -> int:
    """Longest chain of nested FO quantifiers; set quantifiers are not counted."""
    if isinstance(s, ATOMS):
        return 0
    if isinstance(s, Not):
        return fo_quantifier_depth(s.arg)
    if isinstance(s, BINARY):
        return max(fo_quantifier_depth(s.left), fo_quantifier_depth(s.right))
    return fo_quantifier_depth(s.body) + isinstance(s, FO_QUANTIFIERS)


def mso_quantifier_depth(s: Formula) -> int:
    if isinstance(s, ATOMS):
        return 0
    if isinstance(s, Not):
        return mso_quantifier_depth(s.arg)
    if isinstance(s, BINARY):
        return max(mso_quantifier_depth(s.left), mso_quantifier_depth(s.right))
    return mso_quantifier_depth(s.body) + isinstance(s, MSO_QUANTIFIERS)


def fo_variables(s: Formula) -> frozenset[str]:
    out: set[str] = set()
    for node in subformulas(s):
        if isinstance(node, (Adj, Eq)):
            out.update((node.x, node.y))
        elif isinstance(node, In):
            out.add(node.x)
        elif isinstance(node, FO_QUANTIFIERS):
            out.add(node.var)
    return frozenset(out)


def mso_variables(s: Formula) -> frozenset[str]:
    out: set[str] = set()
    for node in subformulas(s):
        if isinstance(node, In):
            out.add(node.set_var)
        elif isinstance(node, MSO_QUANTIFIERS):
            out.add(node.var)
    return frozenset(out)


def fo_variable_count(s: Formula) -> int:
    return len(fo_variables(s))


def negate_adjacencies(s: Formula) -> Formula:
    """Rewrite so that ``evaluate(G, s) == evaluate(complement(G), negate_adjacencies(s))``.

    ``x ~ y`` becomes ``x != y & x !~ y``; the inequality keeps the loop-free
    convention intact when both names denote the same vertex.
    """
    if isinstance(s, Adj):
        return And(Not(Eq(s.x, s.y)), Not(s))
    if isinstance(s, (Eq, In)):
        return s
    if isinstance(s, Not):
        return Not(negate_adjacencies(s.arg))
    if isinstance(s, BINARY):
        return type(s)(negate_adjacencies(s.left), negate_adjacencies(s.right))
    return type(s)(s.var, negate_adjacencies(s.body))


# Pretty printing.  Levels: 0 quantifier, 1 <->, 2 ->, 3 |, 4 &, 5 unary, 6 atom.

def pretty(s: Formula) -> str:
    return _pp(s, 0)


def _pp(s: Formula, ctx: int) -> str:
    text, level = _render(s)
    return f"({text})" if level < ctx else text


def _render(s: Formula) -> tuple[str, int]:
    if isinstance(s, Adj):
        return f"{s.x} ~ {s.y}", 6
    if isinstance(s, Eq):
        return f"{s.x} = {s.y}", 6
    if isinstance(s, In):
        return f"{s.set_var}({s.x})", 6
    if isinstance(s, Not):
        if isinstance(s.arg, Adj):
            return f"{s.arg.x} !~ {s.arg.y}", 6
        if isinstance(s.arg, Eq):
            return f"{s.arg.x} != {s.arg.y}", 6
        return "!" + _pp(s.arg, 5), 5
    if isinstance(s, Iff):
        return f"{_pp(s.left, 1)} <-> {_pp(s.right, 2)}", 1
    if isinstance(s, Implies):
        return f"{_pp(s.left, 3)} -> {_pp(s.right, 2)}", 2
    if isinstance(s, Or):
        return f"{_pp(s.left, 3)} | {_pp(s.right, 4)}", 3
    if isinstance(s, And):
        return f"{_pp(s.left, 4)} & {_pp(s.right, 5)}", 4
    word = "exists" if isinstance(s, (ExistsFO, ExistsMSO)) else "forall"
    return f"{word} {s.var}. {_pp(s.body, 0)}", 0
