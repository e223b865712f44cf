import os

import pytest
import torch
from hypothesis import HealthCheck, settings

from text2plan.data import Sample, perturb_to_init, synth_generate
from text2plan.geometry import Floorplan, Loop, rect_loop
from text2plan.rooms import RoomType

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=150, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

torch.set_num_threads(1)

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "fixtures", "llm")
GOLDEN = os.path.join(os.path.dirname(os.path.abspath(__file__)), "golden")


@pytest.fixture
def two_rooms():
    """Living room and bedroom side by side, one door on the shared wall."""
    return Floorplan((
        rect_loop(8, 8, 128, 120, RoomType.LivingRoom),
        rect_loop(128, 8, 200, 120, RoomType.Bedroom),
        Loop(((128, 50), (128, 66)), RoomType.InteriorDoor),
    ))


@pytest.fixture
def l_room():
    corners = ((10, 10), (100, 10), (100, 50), (50, 50), (50, 100), (10, 100))
    return Floorplan((Loop(corners, RoomType.LivingRoom),))


@pytest.fixture(scope="session")
def six_room_plans():
    return synth_generate(8, 6, 0)


@pytest.fixture(scope="session")
def six_room_samples(six_room_plans):
    return [Sample(p, perturb_to_init(p, 8, k)) for k, p in enumerate(six_room_plans)]
