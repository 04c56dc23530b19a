from optgym.gcc.options import (
    CategoricalAction,
    GccSpec,
    Option,
    apply_categorical_action,
    categorical_actions,
    parse_command_line,
    render_command_line,
    space_size_log10,
)
from optgym.gcc.extract import extract_space

__all__ = [
    "CategoricalAction",
    "GccSpec",
    "Option",
    "apply_categorical_action",
    "categorical_actions",
    "extract_space",
    "parse_command_line",
    "render_command_line",
    "space_size_log10",
]
