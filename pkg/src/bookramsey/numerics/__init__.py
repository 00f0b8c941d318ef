"""Outward-rounded intervals, expression trees and a branch-and-bound prover."""

from .enclose import eval_interval
from .expr import Expr, Goal, Var, differentiate, parse, parse_goal
from .interval import Interval
from .prover import Certificate, concavity_certificate, prove_ineq
