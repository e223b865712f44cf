import json

import pytest
from hypothesis import given, strategies as st

from text2plan.errors import NoJSONError, SchemaError
from text2plan.layout import InitRoom, LayoutInit
from text2plan.llm.parse import extract_json_object, parse_layout_init

GOOD = {"rooms": [
    {"name": "LivingRoom", "style": "modern", "position": [40, 40], "size": [120, 100], "door": "down"},
    {"name": "Kitchen", "style": "modern", "position": [160, 40], "size": [60, 60], "door": "left"},
]}


def test_well_formed():
    init, repairs = parse_layout_init(json.dumps(GOOD))
    assert repairs == []
    assert init.rooms[0] == InitRoom("LivingRoom", (40, 40), (120, 100), "down")
    assert len(init.rooms) == 2


def test_embedded_in_prose():
    init, repairs = parse_layout_init(f"Here is your layout: {json.dumps(GOOD)} Enjoy!")
    assert repairs == [] and len(init.rooms) == 2


def test_skips_non_json_braces():
    raw = "Steps {1} and {room: kitchen} first. " + json.dumps(GOOD) + " {trailing"
    assert len(parse_layout_init(raw)[0].rooms) == 2


def test_clamp_position():
    room = {"name": "Kitchen", "style": "modern", "position": [300, -5], "size": [1, 1], "door": "up"}
    init, repairs = parse_layout_init(json.dumps({"rooms": [room]}))
    assert init.rooms[0].position == (254, 0)
    assert len(repairs) == 1 and repairs[0].field == "position"


def test_shrink_size():
    room = {"name": "Kitchen", "style": "modern", "position": [200, 10], "size": [100, 20], "door": "up"}
    init, repairs = parse_layout_init(json.dumps({"rooms": [room]}))
    assert init.rooms[0].size == (55, 20)
    assert [r.field for r in repairs] == ["size"]


def test_defaults_and_dropped_fields():
    room = {"name": "Kitchen", "position": [10, 10], "size": [20, 20], "door": "UP", "color": "red"}
    init, repairs = parse_layout_init(json.dumps({"rooms": [room]}))
    assert init.rooms[0].style == "modern" and init.rooms[0].door == "up"
    assert sorted(r.field for r in repairs) == ["color", "style"]


def test_equation_style_wrapping():
    raw = '{"House": {"rooms": [{"name": ["Bedroom"], "style": ["modern"], "position": [[10, 20]], ' \
          '"size": [[30, 40]], "door": ["left"]}]}}'
    init, repairs = parse_layout_init(raw)
    assert init.rooms[0] == InitRoom("Bedroom", (10, 20), (30, 40), "left")
    assert [r.field for r in repairs] == ["House"]


def test_type_hint_rescues_name():
    room = {"name": "Zen Den", "type": "StudyRoom", "position": [10, 10], "size": [20, 20], "door": "up"}
    init, _ = parse_layout_init(json.dumps({"rooms": [room]}))
    assert init.rooms[0].name == "StudyRoom"


def test_duplicate_names_suffixed():
    rooms = [{"name": "Bedroom", "position": [10 + 40 * k, 10], "size": [30, 30], "door": "up",
              "style": "modern"} for k in range(2)]
    init, repairs = parse_layout_init(json.dumps({"rooms": rooms}))
    assert [r.name for r in init.rooms] == ["Bedroom", "Bedroom 2"]
    assert len(repairs) == 1


@pytest.mark.parametrize("raw, err", [
    ("no json at all", NoJSONError),
    ("[1, 2, 3]", NoJSONError),
    ('{"rooms": [{"name": "Moon Base", "position": [1, 1], "size": [5, 5], "door": "up"}]}', SchemaError),
    ('{"rooms": [{"name": "Kitchen", "position": [1, 1], "size": [5, 5], "door": "north"}]}', SchemaError),
    ('{"rooms": []}', SchemaError),
    ('{"layout": 3}', SchemaError),
    ('{"rooms": [{"name": "Kitchen", "position": "here", "size": [5, 5], "door": "up"}]}', SchemaError),
])
def test_errors(raw, err):
    with pytest.raises(err) as e:
        parse_layout_init(raw)
    assert e.value.code in ("E_NO_JSON", "E_SCHEMA")


def test_extract_first_object():
    assert extract_json_object('x {"a": "}"} {"b": 1}') == {"a": "}"}


room_st = st.fixed_dictionaries({
    "name": st.sampled_from(["Kitchen", "Bedroom", "Bathroom", "LivingRoom", "balcony", "study"]),
    "style": st.text(min_size=1, max_size=8),
    "position": st.tuples(st.integers(-50, 320), st.integers(-50, 320)).map(list),
    "size": st.tuples(st.integers(-5, 300), st.integers(-5, 300)).map(list),
    "door": st.sampled_from(["up", "Down", " left ", "RIGHT"]),
})


@given(st.lists(room_st, min_size=1, max_size=8))
def test_idempotent(rooms):
    init, _ = parse_layout_init(json.dumps({"rooms": rooms}))
    again, repairs = parse_layout_init(init.to_json())
    assert again == init and repairs == []
    assert isinstance(again, LayoutInit)
