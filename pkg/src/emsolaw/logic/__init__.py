from .builtins import BUILTINS, builtin, builtin_text, strip_comments
from .evaluate import EvaluationGuardError, check_guard, evaluate
from .formula import (
    Adj, And, Eq, ExistsFO, ExistsMSO, ForallFO, ForallMSO, Formula, FormulaError, Iff,
    Implies, In, Not, Or, conj, disj, fo_quantifier_depth, fo_variable_count, free_variables,
    is_sentence, mso_quantifier_depth, mso_variables, negate_adjacencies, pretty,
    quantifier_depth,
)
from .parser import ParseError, SortError, UnboundVariableError, parse_formula
