"""diskspan: (1+eps)-spanners for unit disk and disk graphs in the plane,
with separator decomposition and 3/2-diameter approximation on top."""

__version__ = "0.1.0"
