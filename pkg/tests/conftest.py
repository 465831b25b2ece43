import numpy as np
import pytest

from ftqc import csscode as cc
from ftqc import f2linalg as f2


@pytest.fixture(scope="session")
def steane_classical():
    return f2.puncture(f2.reed_muller(1, 3))


@pytest.fixture(scope="session")
def steane(steane_classical):
    return cc.build_css_code(steane_classical)


@pytest.fixture
def corrector_layout(steane):
    """(data block, work region, total qubits) for single-block gadgets."""
    from ftqc.gadgets import WorkRegion

    n = steane.n
    layout = cc.BlockLayout.from_sizes([("data", n), ("cat", n), ("aux", 1)])
    work = WorkRegion(cat=layout.block("cat"), aux=layout.block("aux")[0])
    return layout.block("data"), work, layout.total_qubits


def random_unit_coeffs(rng, dim):
    raw = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return raw / np.linalg.norm(raw)
