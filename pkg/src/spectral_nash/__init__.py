"""Approximate Nash equilibria of two-player games by regret descent.

The regret ``f(x) = max(Ax) - x^T A x`` of a symmetric game vanishes exactly
at symmetric equilibria.  This package minimizes it with LP-direction
descent from a grid of low-support starting points chosen with the help of
the spectrum of ``A + A^T``, and checks every output against the
stationarity and spectral inequalities that such points must satisfy.
"""

__version__ = "0.1.0"

from .descent import (FullSimplex, SpectralBall, StationaryResult, SupportFace,
                      certify_stationarity, direction_subproblem, find_stationary,
                      gradient_D, line_search, pairwise_bound_check, suppmax)
from .errors import SpectralNashError
from .gamefile import format_game, parse_game, read_game, write_game
from .games import (BimatrixGame, SymmetricGame, extract_strategies, normalize,
                    regret_f, remove_dominated, summed_regret_bound, symmetrize)
from .graph import InducedGraph, decompose, is_bipartite, perron_check, validate_winlose
from .oracle import exact_symmetric_ne, lmm_support_search, verify_epsilon_ne
from .search import (SearchPlan, crossover_n0, enumerate_supports, multi_start_search,
                     planner, region_start, solve_bimatrix, solve_symmetric)
from .spectral import (PositivePart, Spectrum, covering_check, eig_sym, metric_d2,
                       project_pm, shifted_matrix, spectrum_of, sqrt_m_bound_check,
                       xi_value)
