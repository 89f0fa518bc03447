"""Top-k critical nodes of weighted directed networks.

Cooperative-game value allocations (Shapley/Banzhaf) over diffusion-based
valuations (independent cascade / linear threshold), with elimination and
discounting post-processing, greedy hill-climbing, and the combined
allocation-greedy algorithms. Thin wrapper over the C++ core.
"""

from ._core import (
    Graph,
    banzhaf,
    brute_force_topk,
    erdos_renyi,
    greedy,
    hybrid,
    select,
    shapley,
    shapley_greedy,
    spread,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "banzhaf",
    "brute_force_topk",
    "erdos_renyi",
    "greedy",
    "hybrid",
    "select",
    "shapley",
    "shapley_greedy",
    "spread",
    "__version__",
]
