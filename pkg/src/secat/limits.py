"""Default search budgets, gathered in one place."""

from __future__ import annotations

# Cap on maps visited or enumerated during any single homotopy search.
DEFAULT_HOM_BUDGET = 2_000_000

# Generalized covers search all subsets of the base; cap its size.
GENERALIZED_SIZE_LIMIT = 12

# Cap on the number of simplices of an order complex.
DEFAULT_COMPLEX_LIMIT = 50_000
