"""Exact and matrix computations for the fuzzy sphere algebra.

Subpackages and modules:

- ``surd``, ``coefficients``: half-integers, exact surds, Clebsch-Gordan and 6-j values
- ``symalg``: the algebra in ladder normal form, basis elements P^m_n, Hahn forms
- ``matrep``: spin-k matrix representations, trace form, product expansions
- ``psi``: Wigner-operator fields between neighbouring representations, geometry
- ``limits``: commutative limit, Poisson bracket, Moebius maps
- ``verify``, ``cli``: verification suites and the ``fuzzysphere`` command
"""

__version__ = "0.1.0"
