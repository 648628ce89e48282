"""Numerical workbench for L-functions.

Library layout:

* ``specfun``      -- gamma/Bessel/2F1 primitives and vertical-line Mellin quadrature
* ``repdata``      -- gamma-factor data, coefficient streams, Dirichlet characters
* ``afe``          -- smoothed approximate functional equation and central values
* ``expsums``      -- exact Kloosterman / Gauss / Ramanujan sums and bound audits
* ``circle``       -- overlapping-interval (Jutila-style) circle method, exact L2 errors
* ``shiftconv``    -- shifted convolution sums, Voronoi checks, amplified moments
* ``startransform``-- the Mellin star-transform of weights against a K-Bessel kernel
* ``harness``      -- suite runner, report writer, coefficient cache files, CLI
"""

__version__ = "0.1.0"
