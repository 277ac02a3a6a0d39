"""Multi-agent epistemic logic checks of the four-agent Wigner's-friend argument."""

from .logic.formula import FormulaSyntaxError, parse, to_text
from .logic.kripke import FrameProperty, KripkeModel, check_frame_property, model, satisfies
from .logic.finder import ModelSpec, find_model
from .modelio import load_model, save_model
from .quantum import EPS, appendix_values

__all__ = [
    "EPS",
    "FormulaSyntaxError",
    "FrameProperty",
    "KripkeModel",
    "ModelSpec",
    "appendix_values",
    "check_frame_property",
    "find_model",
    "load_model",
    "model",
    "parse",
    "satisfies",
    "save_model",
    "to_text",
]
