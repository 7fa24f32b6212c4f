import io

import numpy as np
import pytest

from gfet_prva import device


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def synth_lib():
    return device.synthetic_library()


def linear_library(slope=1e-3, offset=0.0, v_lo=0.5, v_hi=20.0, bias=1.0):
    """Library with one curve I = slope*(V + offset), kept positive on its grid."""
    v = np.linspace(v_lo, v_hi, 41)
    return device.CharacteristicLibrary([device.TransferCurve(bias, v, slope * (v + offset))])


def csv_text(rows, header="v_gs,i_ds,v_ds,branch,unit_i"):
    return io.StringIO(header + "\n" + "\n".join(rows) + "\n")
