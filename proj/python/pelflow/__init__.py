"""Pel-recursive dense motion estimation with GCV-selected regularization.

Frames are 2-D uint8 arrays (rows, cols); flow fields are float64 arrays of
shape (rows, cols, 2) holding (dx, dy).
"""

from ._core import (
    IoError,
    NumericError,
    ParameterError,
    ParseError,
    add_noise,
    algorithms,
    estimate,
    evaluate,
    gcv_value,
    load_flo,
    load_pgm,
    minimize_gcv,
    rls_solve,
    run_cli,
    save_flo,
    save_pgm,
    synthesize,
    wiener_solve,
)

__all__ = [
    "IoError",
    "NumericError",
    "ParameterError",
    "ParseError",
    "add_noise",
    "algorithms",
    "estimate",
    "evaluate",
    "gcv_value",
    "load_flo",
    "load_pgm",
    "minimize_gcv",
    "rls_solve",
    "run_cli",
    "save_flo",
    "save_pgm",
    "synthesize",
    "wiener_solve",
]
