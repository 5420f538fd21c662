from .cli import Options, generate_complex, main, parse_args
from .complex import SimplicialComplex, load_complex
from .report import build_report

__all__ = [
    "parse_args",
    "Options",
    "main",
    "generate_complex",
    "SimplicialComplex",
    "load_complex",
    "build_report",
]
