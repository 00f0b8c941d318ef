"""Book algorithm for diagonal Ramsey numbers, with small Ramsey oracles,
trace monitors and certified interval numerics."""

from .book import BookParams, BookState, StepKind, Trace, run, step_class, trace_violations
from .graph import BLUE, RED, BookPair, Colour, Colouring, gen_density, is_book, is_clique, random_colouring
from .ramsey import classic_extract, lower_bound_certificate, paley_witness, ramsey_oracle

__version__ = "0.1.0"
