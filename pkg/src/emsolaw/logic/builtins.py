"""The sentences of the construction, loaded from the shipped ``.fml`` files."""

from functools import lru_cache
from importlib import resources

from .formula import Formula
from .parser import parse_formula

BUILTINS = ("phi", "phi1", "phi2", "phi1_literal", "phi2_literal")


def builtin_text(name: str) -> str:
    if name not in BUILTINS:
        raise KeyError(f"unknown built-in sentence {name!r}; choose from {', '.join(BUILTINS)}")
    text = resources.files(__package__).joinpath("sentences", f"{name}.fml").read_text()
    return strip_comments(text)


def strip_comments(text: str) -> str:
    return "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))


@lru_cache(maxsize=None)
def builtin(name: str) -> Formula:
    return parse_formula(builtin_text(name))
