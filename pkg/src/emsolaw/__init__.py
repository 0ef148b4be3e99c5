"""Two-clique EMSO property on random graphs.

Subpackages and modules:

* :mod:`emsolaw.graph` - bit-packed graphs, G(n, p) sampling, enumeration, edge-list I/O
* :mod:`emsolaw.logic` - formula AST, parser, generic evaluator, built-in sentences
* :mod:`emsolaw.witness` / :mod:`emsolaw.family` - fast exact checkers
* :mod:`emsolaw.moments` / :mod:`emsolaw.general_p` - moment calculus
* :mod:`emsolaw.montecarlo`, :mod:`emsolaw.equivalence`, :mod:`emsolaw.cli`
"""

__version__ = "0.1.0"
