"""Shared fixtures: the expensive solves run once per session."""

import pytest

from scottlab.scott import scott_experiment_tf
from scottlab.thomas_fermi import atomic_tf, solve_universal_tf


@pytest.fixture(scope="session")
def universal():
    return solve_universal_tf()


@pytest.fixture(scope="session")
def atom_z1(universal):
    return atomic_tf(1.0, universal=universal)


@pytest.fixture(scope="session")
def atom_z8(universal):
    return atomic_tf(8.0, universal=universal)


@pytest.fixture(scope="session")
def scott_z1(atom_z1):
    """The headline experiment: z = 1 over the acceptance h sweep."""
    return scott_experiment_tf(1.0, (0.12, 0.09, 0.07, 0.05), solution=atom_z1)
