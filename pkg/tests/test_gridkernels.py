import math

import numpy as np
import pytest

from scatmap.errors import NoCrossing, ScatmapError
from scatmap.gridkernels import reduced_poincare_grid
from scatmap.model import TWO_PI
from scatmap.scattering import reduced_poincare

THETAS = np.linspace(0.0, TWO_PI, 40, endpoint=False)


def scalar_row(params, I):
    out = np.empty(len(THETAS))
    for j, th in enumerate(THETAS):
        try:
            out[j] = reduced_poincare(params, I, float(th))
        except NoCrossing:
            out[j] = np.nan
    return out


def test_matches_scalar_single_regime(p06):
    I_vals = np.linspace(-2.5, 2.5, 7)
    Z = reduced_poincare_grid(p06, I_vals, THETAS)
    for i, I in enumerate(I_vals):
        ref = scalar_row(p06, float(I))
        np.testing.assert_allclose(Z[i], ref, atol=1e-10)


def test_matches_scalar_holes_regime(p15):
    Z = reduced_poincare_grid(p15, np.array([1.0]), THETAS)[0]
    ref = scalar_row(p15, 1.0)
    assert np.array_equal(np.isnan(Z), np.isnan(ref))
    good = ~np.isnan(ref)
    assert good.sum() > 0 and (~good).sum() > 0
    np.testing.assert_allclose(Z[good], ref[good], atol=1e-9)


def test_even_rows(p06):
    Z = reduced_poincare_grid(p06, np.array([-1.3, 1.3]), THETAS)
    np.testing.assert_allclose(Z[0], Z[1], atol=1e-12)
