"""Variant-based unification modulo exclusive-or style theories."""

from .axunify import DiophantineExplosion, Unifier, b_equal, b_match, b_unify
from .normalize import RewriteTrace, StepBudgetExceeded, normalize
from .sigterm import App, FreshScope, Op, Signature, Subst, Term, Var, apply, render
from .theoryparse import (LoadError, ParseError, Problem, Theory, load_module,
                          parse_module, parse_problem, parse_term)
from .varnarrow import Variant, VariantBoundExceeded, VariantTree, get_variants
from .varunify import (ALGORITHMS, UnifierSet, UnifQuery, solve, unify_baseline,
                       unify_cr, unify_cr_fast, unify_fast)

__all__ = [
    "ALGORITHMS", "App", "DiophantineExplosion", "FreshScope", "LoadError", "Op",
    "ParseError", "Problem", "RewriteTrace", "Signature", "StepBudgetExceeded",
    "Subst", "Term", "Theory", "UnifQuery", "Unifier", "UnifierSet", "Var",
    "Variant", "VariantBoundExceeded", "VariantTree", "apply", "b_equal", "b_match",
    "b_unify", "get_variants", "load_module", "normalize", "parse_module",
    "parse_problem", "parse_term", "render", "solve", "unify_baseline", "unify_cr",
    "unify_cr_fast", "unify_fast",
]
