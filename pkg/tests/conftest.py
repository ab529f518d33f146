import os
import sys

import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.geometry.curves import Circle, Point2
from src.geometry.domains import unit_disk, unit_square, vertical_chord
from src.meshgen.builders import build_disk_polar_mesh, build_square_line_mesh


@pytest.fixture
def disk_domain():
    return unit_disk(Circle(Point2(0.0, 0.0), 0.5))


@pytest.fixture
def square_domain():
    return unit_square(vertical_chord(0.5))


@pytest.fixture
def disk_mesh(disk_domain):
    return build_disk_polar_mesh(disk_domain, 0.25)


@pytest.fixture
def square_mesh(square_domain):
    return build_square_line_mesh(square_domain, 0.25)
