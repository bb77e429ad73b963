from .bench import BenchConfig, BenchResult, StatsRow, run_bench, sample_pairs
from .dimacs import DimacsFormatError, DimacsSource, load_dimacs, read_gr, write_dimacs
from .generate import generate_grid_graph, generate_random_graph
from .storage import load_hierarchy, save_hierarchy
from .verify import VerifyConfig, VerifyReport, run_verify

__all__ = [
    "BenchConfig", "BenchResult", "StatsRow", "run_bench", "sample_pairs",
    "DimacsFormatError", "DimacsSource", "load_dimacs", "read_gr", "write_dimacs",
    "generate_grid_graph", "generate_random_graph",
    "load_hierarchy", "save_hierarchy",
    "VerifyConfig", "VerifyReport", "run_verify",
]
