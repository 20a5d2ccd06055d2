"""Unit conversions between user-facing GHz/MHz and internal rad/ns.

Every frequency-like quantity (detunings, couplings, dephasing rates) is
stored internally as an angular rate in rad/ns; plain frequencies pick up
a factor 2*pi on ingestion.  Times are ns everywhere.
"""

import math

TWO_PI = 2.0 * math.pi


def ghz(f):
    """Plain frequency in GHz -> angular rate in rad/ns."""
    return TWO_PI * f


def mhz(f):
    """Plain frequency in MHz -> angular rate in rad/ns."""
    return TWO_PI * f * 1e-3


def to_ghz(w):
    """Angular rate in rad/ns -> plain frequency in GHz."""
    return w / TWO_PI


def to_mhz(w):
    """Angular rate in rad/ns -> plain frequency in MHz."""
    return 1e3 * w / TWO_PI
