# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Exceptions raised across the cascademf modules"""


class CascadeError(Exception):
    """Base class for every error raised by cascademf"""


class InvalidModelError(CascadeError):
    """A weight model breaks one of its structural invariants"""


class DivergentExpectationError(CascadeError):
    """An expectation such as E(sum |W_i|^q L_i^-t) is infinite"""


class UndecidableError(CascadeError):
    """Divergence cannot be decided analytically for a generator family"""


class NoBracketError(CascadeError):
    """Bracket expansion failed to find a sign change"""


class NoRootError(CascadeError):
    """A scan over a finite range found no sign change"""


class DepthOverflowError(CascadeError):
    """The requested depth exceeds the node budget"""


class NonMonotoneError(CascadeError):
    """Abscissae that must be strictly increasing are not"""


class LengthUnderflowError(CascadeError):
    """A sequence is too short for the requested finite difference"""


class IntervalError(CascadeError):
    """A query interval lies outside the sample range"""


class InsufficientRadiiError(CascadeError):
    """Fewer than four radii produced a usable oscillation"""


class OutsideJError(CascadeError):
    """The requested q lies outside the interval J"""


class ConfigError(CascadeError):
    """A run configuration is malformed or inconsistent"""
