"""Shared high-precision oracles for the test suite.

The mpmath reference sums the defining series with working precision sized
from the largest intermediate term, so cancellation on the negative axis is
fully absorbed.  It is deliberately independent of every evaluation path in
the package.
"""

import mpmath as mp
import numpy as np
import pytest


def ml_reference(beta, gamma, z, extra_dps=50):
    """E_{beta,gamma}(z) by direct series summation at auto-sized precision."""
    az = abs(z)
    azb = max(az, 1.0) ** (1.0 / beta)
    kstar = azb / beta
    logmax = max(0.0, (kstar * np.log(max(az, 1.0))
                       - float(mp.loggamma(max(beta * kstar + gamma, 1.0)).real)) / np.log(10))
    dps = int(max(40, logmax + extra_dps))
    if dps > 1200:
        raise ValueError("argument too large for the series reference; "
                         "use a closed form or the asymptotic law instead")
    kmax = int(8 * kstar + 400)
    with mp.workdps(dps):
        zz = mp.mpmathify(z)
        b = mp.mpf(beta)
        g = mp.mpf(gamma)
        s = mp.mpf(0)
        max_mag = mp.mpf(0)
        for k in range(kmax):
            t = zz ** k * mp.rgamma(b * k + g)
            s += t
            max_mag = max(max_mag, abs(t))
            if k > 10 and abs(t) < mp.mpf(10) ** (-dps + 8) * max(max_mag, mp.mpf(1)):
                break
        else:
            raise RuntimeError("series reference did not converge")
        return complex(s)


def ml_deriv_reference(beta, gamma, z):
    """Term-by-term derivative of the defining series, high precision."""
    az = abs(z)
    azb = max(az, 1.0) ** (1.0 / beta)
    kstar = azb / beta
    logmax = max(0.0, (kstar * np.log(max(az, 1.0))
                       - float(mp.loggamma(max(beta * kstar + gamma, 1.0)).real)) / np.log(10))
    dps = int(max(40, logmax + 50))
    if dps > 1200:
        raise ValueError("argument too large for the series reference")
    with mp.workdps(dps):
        zz = mp.mpmathify(z)
        b = mp.mpf(beta)
        g = mp.mpf(gamma)
        s = mp.mpf(0)
        max_mag = mp.mpf(0)
        for k in range(1, int(8 * kstar + 400)):
            t = k * zz ** (k - 1) * mp.rgamma(b * k + g)
            s += t
            max_mag = max(max_mag, abs(t))
            if k > 10 and abs(t) < mp.mpf(10) ** (-dps + 8) * max(max_mag, mp.mpf(1)):
                break
        else:
            raise RuntimeError("series reference did not converge")
        return complex(s)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
