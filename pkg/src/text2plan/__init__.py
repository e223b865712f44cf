"""Text-to-floorplan generation: a language-model layout draft refined by a conditional diffusion model."""
from .errors import FloorplanError
from .geometry import Floorplan, Loop, rect_loop
from .layout import InitRoom, LayoutInit
from .rooms import RoomType

__version__ = "0.1.0"
__all__ = ["FloorplanError", "Floorplan", "InitRoom", "LayoutInit", "Loop", "RoomType", "rect_loop"]
