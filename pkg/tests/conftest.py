import numpy as np
import pytest

from raagham.graphs import complete_graph, find_planar_emulator, path_graph, planarity
from raagham.lift import assemble_Hv, default_study_annulus, enumerate_group, schottky_pair
from raagham.twist import build_configuration, build_representation


@pytest.fixture(scope="session")
def k5_emulator():
    res = find_planar_emulator(complete_graph(list("abcde")), 2, allow_trivial=False)
    assert not isinstance(res, tuple)
    return res


@pytest.fixture(scope="session")
def p3_rep():
    return build_representation(path_graph(["u", "v", "w"]), N=2, grid=512)


@pytest.fixture(scope="session")
def schottky_gens():
    return schottky_pair(0.98)


@pytest.fixture(scope="session")
def assembled_depth6(schottky_gens):
    elements = enumerate_group(schottky_gens, 6)
    tail = [e for e in enumerate_group(schottky_gens, 7) if e.length == 7]
    return assemble_Hv("v", elements, default_study_annulus(), tail_elements=tail[:64])
