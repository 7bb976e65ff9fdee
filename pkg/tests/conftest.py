import numpy as np
import pytest

from meshes import bump_mesh, icosphere, plane_mesh

from snapforge import distfield, forcemodel


@pytest.fixture(scope="session")
def sphere_mesh():
    return icosphere(subdivisions=3)  # 1280 triangles


@pytest.fixture(scope="session")
def sphere_df(sphere_mesh):
    return distfield.build_distance_field(sphere_mesh, resolution=48)


@pytest.fixture(scope="session")
def plane():
    return plane_mesh(size=1.0, divisions=8)


@pytest.fixture(scope="session")
def plane_df(plane):
    return distfield.build_distance_field(plane, resolution=64)


@pytest.fixture(scope="session")
def bump():
    return bump_mesh()


@pytest.fixture(scope="session")
def bump_df(bump):
    return distfield.build_distance_field(bump, resolution=64)


@pytest.fixture
def plane_params(plane, plane_df):
    return forcemodel.ForceParams.defaults_for(plane, plane_df)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
