"""Constraint language: formulas, brute-force evaluation, validated normal forms."""

from .evaluate import FO_CAP, MSO_CAP, Evaluator, eval_local, model_check_fo, model_check_mso
from .formula import Formula, parse_formula, syntactic_radius, to_text
from .normal_forms import (
    EqualityForest,
    EqualityTree,
    GaifmanBlock,
    GaifmanDisjunct,
    GaifmanForm,
    KsDisjunct,
    KsNormalForm,
    TauConstraint,
    dump_gaifman,
    dump_ks,
    ks_violations,
    load_gaifman,
    load_ks,
    validate_gaifman,
    validate_ks,
)

__all__ = [
    "FO_CAP", "MSO_CAP", "Evaluator", "eval_local", "model_check_fo", "model_check_mso",
    "Formula", "parse_formula", "syntactic_radius", "to_text",
    "EqualityForest", "EqualityTree", "GaifmanBlock", "GaifmanDisjunct", "GaifmanForm",
    "KsDisjunct", "KsNormalForm", "TauConstraint", "dump_gaifman", "dump_ks",
    "ks_violations", "load_gaifman", "load_ks", "validate_gaifman", "validate_ks",
]
