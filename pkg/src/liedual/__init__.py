"""Fourier analysis on the unitary dual of torus, SU(2) and product groups.

Difference operators on symbols, homogeneous Sobolev seminorms on both sides of
the group Fourier transform, spectral multipliers of the Laplacian and
Hormander / Mihlin / Marcinkiewicz checkers.
"""
from ._accel import USE_NUMBA, backend_name
from .fields import (BandMismatchError, CoefficientField, Field, HigherField, MarginError, Symbol,
                     field_from_json, field_to_json)
from .fourier import (GridFunction, InsufficientQuadratureError, convolve, forward_transform,
                      inverse_transform, plancherel_norm_sq, rule_for_band)
from .groups import (Group, GroupElement, GroupMismatchError, QuadratureRule, distance_to_identity,
                     element, exp_map, haar_quadrature, identity, inverse, multiply)
from .reps import (TensorDecomposition, casimir_eigenvalue, decompose_fund_tensor, dim,
                   enumerate_band, evaluate, fundamental_set, infinitesimal)
from .symbols import (annihilation_test, apply, delta, delta_all, delta_word, fourier_of_X,
                      leibniz_residual, op_matrix, random_symbol, spectral)
from .sobolev import (hs_norm_diffside, hs_norm_kernelside, l1s_norm, ldot_norm, linfs_norm,
                      q1_values, qs_values)
from .multipliers import (DyadicPartition, heat_kernel, hormander_norm, marcinkiewicz_constant,
                          mihlin_constant)

__version__ = "0.1.0"
