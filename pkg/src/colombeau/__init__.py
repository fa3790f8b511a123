"""Nonlinear generalized functions as eps-nets of smooth functions.

Submodules:

* :mod:`colombeau.epsnet` -- expression trees and nets
* :mod:`colombeau.mollify` -- kernels and embeddings of distributions
* :mod:`colombeau.asymptotics` -- order estimation, valuation, equivalence
* :mod:`colombeau.pairing` -- test-function pairings and association
* :mod:`colombeau.hilbert_scale` -- weighted Fourier scale with nuclear inclusions
"""

from .asymptotics import (
    DecayReport, EpsLadder, GenNumberNet, classify, estimate_order, r_equivalent,
    sharp_distance, valuation,
)
from .epsnet import EPS, X, EpsNet, add, derive, evaluate, mul, sup_on
from .mollify import (
    AbsX, Dirac, FiniteSum, Heaviside, Mollifier, Sign, Smooth, delta_net, embed, make_mollifier,
)
from .pairing import TestFunction, associated, pair, pair_limit, plateau, schwartz_core

__version__ = "0.1.0"
