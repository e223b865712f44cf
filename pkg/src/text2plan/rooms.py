"""The 25-slot room-type table.

Slots 0-12 follow the RPlan category names, 13-22 are extra residential
categories, and 23/24 are the two door categories.

====  ============  ====  ============
 id   label          id   label
====  ============  ====  ============
  0   LivingRoom      13  Bedroom
  1   MasterRoom      14  Corridor
  2   Kitchen         15  Laundry
  3   Bathroom        16  Garage
  4   DiningRoom      17  Office
  5   ChildRoom       18  Pantry
  6   StudyRoom       19  Closet
  7   SecondRoom      20  Utility
  8   GuestRoom       21  Gym
  9   Balcony         22  Unknown
 10   Entrance        23  InteriorDoor
 11   Storage         24  FrontDoor
 12   WallIn
====  ============  ====  ============
"""
from __future__ import annotations

import enum
import re

import numpy as np

from .errors import UnknownTypeError

NUM_ROOM_TYPES = 25


class RoomType(enum.IntEnum):
    LivingRoom = 0
    MasterRoom = 1
    Kitchen = 2
    Bathroom = 3
    DiningRoom = 4
    ChildRoom = 5
    StudyRoom = 6
    SecondRoom = 7
    GuestRoom = 8
    Balcony = 9
    Entrance = 10
    Storage = 11
    WallIn = 12
    Bedroom = 13
    Corridor = 14
    Laundry = 15
    Garage = 16
    Office = 17
    Pantry = 18
    Closet = 19
    Utility = 20
    Gym = 21
    Unknown = 22
    InteriorDoor = 23
    FrontDoor = 24

    @property
    def label(self) -> str:
        return self.name

    @property
    def is_door(self) -> bool:
        return self in (RoomType.InteriorDoor, RoomType.FrontDoor)

    @property
    def display(self) -> str:
        """Lower-case human name, e.g. ``living room``."""
        return _DISPLAY.get(self, re.sub(r"(?<!^)(?=[A-Z])", " ", self.name).lower())

    @classmethod
    def from_label(cls, label: str) -> "RoomType":
        try:
            return cls[label]
        except KeyError:
            raise UnknownTypeError(f"unknown room type label {label!r}") from None


_DISPLAY = {
    RoomType.MasterRoom: "master bedroom",
    RoomType.ChildRoom: "child room",
    RoomType.SecondRoom: "second bedroom",
    RoomType.WallIn: "walk-in closet",
}

# Free-text room names (lower-case, digits and punctuation stripped) -> type.
SYNONYMS: dict[str, RoomType] = {
    "living room": RoomType.LivingRoom,
    "living": RoomType.LivingRoom,
    "livingroom": RoomType.LivingRoom,
    "lounge": RoomType.LivingRoom,
    "family room": RoomType.LivingRoom,
    "sitting room": RoomType.LivingRoom,
    "master room": RoomType.MasterRoom,
    "master bedroom": RoomType.MasterRoom,
    "masterroom": RoomType.MasterRoom,
    "master": RoomType.MasterRoom,
    "kitchen": RoomType.Kitchen,
    "kitchenette": RoomType.Kitchen,
    "bathroom": RoomType.Bathroom,
    "bath": RoomType.Bathroom,
    "toilet": RoomType.Bathroom,
    "wc": RoomType.Bathroom,
    "restroom": RoomType.Bathroom,
    "washroom": RoomType.Bathroom,
    "dining room": RoomType.DiningRoom,
    "dining": RoomType.DiningRoom,
    "diningroom": RoomType.DiningRoom,
    "child room": RoomType.ChildRoom,
    "children room": RoomType.ChildRoom,
    "kids room": RoomType.ChildRoom,
    "nursery": RoomType.ChildRoom,
    "childroom": RoomType.ChildRoom,
    "study room": RoomType.StudyRoom,
    "study": RoomType.StudyRoom,
    "studyroom": RoomType.StudyRoom,
    "library": RoomType.StudyRoom,
    "second room": RoomType.SecondRoom,
    "second bedroom": RoomType.SecondRoom,
    "secondroom": RoomType.SecondRoom,
    "guest room": RoomType.GuestRoom,
    "guest bedroom": RoomType.GuestRoom,
    "guestroom": RoomType.GuestRoom,
    "balcony": RoomType.Balcony,
    "terrace": RoomType.Balcony,
    "veranda": RoomType.Balcony,
    "entrance": RoomType.Entrance,
    "entry": RoomType.Entrance,
    "foyer": RoomType.Entrance,
    "hall": RoomType.Entrance,
    "storage": RoomType.Storage,
    "storage room": RoomType.Storage,
    "store room": RoomType.Storage,
    "storeroom": RoomType.Storage,
    "wall in": RoomType.WallIn,
    "wallin": RoomType.WallIn,
    "walk in closet": RoomType.WallIn,
    "bedroom": RoomType.Bedroom,
    "bed room": RoomType.Bedroom,
    "corridor": RoomType.Corridor,
    "hallway": RoomType.Corridor,
    "laundry": RoomType.Laundry,
    "laundry room": RoomType.Laundry,
    "garage": RoomType.Garage,
    "office": RoomType.Office,
    "home office": RoomType.Office,
    "pantry": RoomType.Pantry,
    "closet": RoomType.Closet,
    "utility": RoomType.Utility,
    "utility room": RoomType.Utility,
    "gym": RoomType.Gym,
    "unknown": RoomType.Unknown,
    "interior door": RoomType.InteriorDoor,
    "interiordoor": RoomType.InteriorDoor,
    "door": RoomType.InteriorDoor,
    "front door": RoomType.FrontDoor,
    "frontdoor": RoomType.FrontDoor,
}


def normalize_name(name: str) -> str:
    s = re.sub(r"(?<=[a-z])(?=[A-Z])", " ", name)
    s = re.sub(r"[^a-zA-Z]+", " ", s).strip().lower()
    return re.sub(r"\s+", " ", s)


def room_type_from_name(name: str) -> RoomType:
    """Map a free-text room name (``"Bedroom 2"``, ``"master_bedroom"``) to a type."""
    key = normalize_name(name)
    if key in SYNONYMS:
        return SYNONYMS[key]
    if key.replace(" ", "") in SYNONYMS:
        return SYNONYMS[key.replace(" ", "")]
    raise UnknownTypeError(f"cannot map room name {name!r} to a room type")


def one_hot(ids, width: int) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.int64)
    out = np.zeros(ids.shape + (width,), dtype=np.float64)
    np.put_along_axis(out, ids[..., None], 1.0, axis=-1)
    return out
