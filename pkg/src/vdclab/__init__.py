"""Finite-scale experiments on difference sets of floor sequences floor(h(n)).

Modules: ``growth`` (growth functions and their inverses), ``sequence``
(the sets S_h), ``kernels`` (Fejer and Dirichlet kernels), ``cosine``
(cosine polynomials and minimum certificates), ``witness`` (the
Fejer-weighted witness polynomial), ``analysis`` (numerical checks of the
analytic chain), ``extremal`` (largest difference-avoiding sets),
``lpgamma`` (the optimal constant term by linear programming), ``verify``
(property suites) and ``cli``.
"""
__version__ = "0.1.0"
SCHEMA = 1
