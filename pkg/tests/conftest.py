import math

import pytest

from twistmap import CellParams, build_diagram

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Collects one line per acceptance criterion for the terminal summary."""
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ref_cell():
    return CellParams(math.pi / 6, math.pi / 4)


@pytest.fixture(scope="session")
def mirror_cell():
    return CellParams(math.pi / 4, math.pi / 6)


@pytest.fixture(scope="session")
def sym_cell():
    return CellParams(math.pi / 4, math.pi / 4)


@pytest.fixture(scope="session")
def diagram_k2(ref_cell):
    return build_diagram(ref_cell, k_max=2, L_max=8.0, n_points=100)


@pytest.fixture(scope="session")
def diagram_k0(ref_cell):
    return build_diagram(ref_cell, k_max=0, L_max=8.0, n_points=60, overlay_symmetric=True)
