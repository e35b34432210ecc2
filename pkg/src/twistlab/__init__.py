"""twistlab: numerical laboratory for quadratic twists of GL(3) L-series,
double Dirichlet series, their functional-equation group, and residues."""

__version__ = "0.1.0"
