"""Regenerate the canned language-model replies under fixtures/llm/.

Each case pairs a buyer-style request with the layout a careful model would
return for the default prompt. Replies vary in surface form (reasoning before
the JSON, code fences, a wrapper object, synonym room names) so the offline
suite exercises the parser, not just the happy path.

    python scripts/make_fixtures.py [--out fixtures/llm]
"""
import argparse
import json
import shutil
from pathlib import Path

from text2plan.llm import build_prompt, load_demos
from text2plan.llm.client import save_fixture
from text2plan.llm.frontend import template

# (description, [(name, x, y, w, h, door)], expected type labels, reply style)
CASES = [
    ("A cosy flat with a living room, one bedroom, a kitchen, a bathroom and a balcony off the lounge.",
     [("Living Room", 30, 100, 120, 90, "up"), ("Bedroom", 150, 100, 80, 90, "left"),
      ("Kitchen", 30, 40, 70, 60, "down"), ("Bathroom", 100, 40, 50, 60, "down"),
      ("Balcony", 30, 190, 120, 40, "up")],
     ["LivingRoom", "Bedroom", "Kitchen", "Bathroom", "Balcony"], "cot"),
    ("I want a living room, a master bedroom, a kitchen, a bathroom and a dining room next to the kitchen.",
     [("LivingRoom", 40, 110, 110, 100, "up"), ("MasterRoom", 150, 110, 80, 100, "left"),
      ("Kitchen", 40, 40, 60, 70, "down"), ("DiningRoom", 100, 40, 60, 70, "down"),
      ("Bathroom", 160, 40, 70, 70, "down")],
     ["LivingRoom", "MasterRoom", "Kitchen", "DiningRoom", "Bathroom"], "plain"),
    ("Two bedrooms, a living room, a kitchen, a bathroom and a small balcony please.",
     [("LivingRoom", 30, 90, 120, 90, "up"), ("Bedroom 1", 150, 30, 80, 80, "down"),
      ("Bedroom 2", 150, 110, 80, 80, "left"), ("Kitchen", 30, 30, 70, 60, "down"),
      ("Bathroom", 100, 30, 50, 60, "down"), ("Balcony", 30, 180, 120, 40, "up")],
     ["LivingRoom", "Bedroom", "Bedroom", "Kitchen", "Bathroom", "Balcony"], "fenced"),
    ("A family home: living room, master bedroom, child room, kitchen, bathroom and a study.",
     [("Living Room", 30, 100, 110, 100, "up"), ("Master Bedroom", 140, 100, 90, 100, "left"),
      ("Child Room", 140, 30, 90, 70, "down"), ("Kitchen", 30, 30, 60, 70, "down"),
      ("Bathroom", 90, 30, 50, 70, "down"), ("Study", 30, 200, 110, 40, "up")],
     ["LivingRoom", "MasterRoom", "ChildRoom", "Kitchen", "Bathroom", "StudyRoom"], "cot"),
    ("Please design a house with a lounge, a bedroom, a second bedroom, a kitchen, a WC and a terrace.",
     [("Lounge", 30, 100, 120, 90, "up"), ("Bedroom", 150, 100, 80, 90, "left"),
      ("Second Bedroom", 150, 30, 80, 70, "down"), ("Kitchen", 30, 30, 70, 70, "down"),
      ("WC", 100, 30, 50, 70, "down"), ("Terrace", 30, 190, 120, 40, "up")],
     ["LivingRoom", "Bedroom", "SecondRoom", "Kitchen", "Bathroom", "Balcony"], "wrapped"),
    ("A seven-room home: living room, master bedroom, bedroom, kitchen, dining room, bathroom, balcony.",
     [("LivingRoom", 30, 100, 110, 90, "up"), ("MasterRoom", 140, 100, 90, 90, "left"),
      ("Bedroom", 140, 190, 90, 45, "up"), ("Kitchen", 30, 30, 60, 70, "down"),
      ("DiningRoom", 90, 30, 60, 70, "down"), ("Bathroom", 150, 30, 80, 70, "down"),
      ("Balcony", 30, 190, 110, 45, "up")],
     ["LivingRoom", "MasterRoom", "Bedroom", "Kitchen", "DiningRoom", "Bathroom", "Balcony"], "cot"),
    ("I need a living room, three bedrooms, a kitchen and a bathroom.",
     [("LivingRoom", 30, 90, 120, 80, "up"), ("Bedroom 1", 150, 30, 80, 70, "down"),
      ("Bedroom 2", 150, 100, 80, 70, "left"), ("Bedroom 3", 150, 170, 80, 60, "left"),
      ("Kitchen", 30, 30, 70, 60, "down"), ("Bathroom", 100, 30, 50, 60, "down")],
     ["LivingRoom", "Bedroom", "Bedroom", "Bedroom", "Kitchen", "Bathroom"], "plain"),
    ("Open-plan living room with kitchen and dining, plus a master bedroom, a guest room and two bathrooms.",
     [("LivingRoom", 30, 100, 120, 90, "up"), ("Kitchen", 30, 30, 60, 70, "down"),
      ("DiningRoom", 90, 30, 60, 70, "down"), ("MasterRoom", 150, 30, 80, 90, "down"),
      ("GuestRoom", 150, 120, 80, 70, "left"), ("Bathroom 1", 30, 190, 60, 40, "up"),
      ("Bathroom 2", 150, 190, 80, 40, "up")],
     ["LivingRoom", "Kitchen", "DiningRoom", "MasterRoom", "GuestRoom", "Bathroom", "Bathroom"], "fenced"),
    ("Small starter home with a living room, a bedroom, a kitchen, a bathroom and a storage room.",
     [("Living Room", 30, 90, 120, 100, "up"), ("Bedroom", 150, 90, 80, 100, "left"),
      ("Kitchen", 30, 30, 70, 60, "down"), ("Bathroom", 100, 30, 50, 60, "down"),
      ("Storage", 150, 30, 80, 60, "down")],
     ["LivingRoom", "Bedroom", "Kitchen", "Bathroom", "Storage"], "cot"),
    ("An eight-room house: living room, master bedroom, two bedrooms, kitchen, dining room, bathroom and balcony.",
     [("LivingRoom", 30, 100, 100, 90, "up"), ("MasterRoom", 130, 100, 100, 90, "left"),
      ("Bedroom 1", 130, 190, 50, 45, "up"), ("Bedroom 2", 180, 190, 50, 45, "up"),
      ("Kitchen", 30, 30, 60, 70, "down"), ("DiningRoom", 90, 30, 70, 70, "down"),
      ("Bathroom", 160, 30, 70, 70, "down"), ("Balcony", 30, 190, 100, 45, "up")],
     ["LivingRoom", "MasterRoom", "Bedroom", "Bedroom", "Kitchen", "DiningRoom", "Bathroom", "Balcony"],
     "wrapped"),
    ("A bungalow with a living room, a master bedroom, a child room, a kitchen, a bathroom, a balcony and an entrance.",
     [("Entrance", 100, 200, 50, 35, "up"), ("LivingRoom", 30, 100, 120, 100, "down"),
      ("MasterRoom", 150, 100, 80, 100, "left"), ("ChildRoom", 150, 30, 80, 70, "down"),
      ("Kitchen", 30, 30, 60, 70, "down"), ("Bathroom", 90, 30, 60, 70, "down"),
      ("Balcony", 30, 200, 70, 35, "up")],
     ["Entrance", "LivingRoom", "MasterRoom", "ChildRoom", "Kitchen", "Bathroom", "Balcony"], "cot"),
    ("Living room, kitchen, bathroom, bedroom and a home office for remote work.",
     [("LivingRoom", 30, 100, 110, 100, "up"), ("Kitchen", 30, 30, 60, 70, "down"),
      ("Bathroom", 90, 30, 50, 70, "down"), ("Bedroom", 140, 100, 90, 100, "left"),
      ("Home Office", 140, 30, 90, 70, "down")],
     ["LivingRoom", "Kitchen", "Bathroom", "Bedroom", "Office"], "plain"),
    ("A house with a living room, two bedrooms, a kitchen, a bathroom, a laundry and a balcony.",
     [("LivingRoom", 30, 100, 110, 90, "up"), ("Bedroom 1", 140, 30, 90, 80, "down"),
      ("Bedroom 2", 140, 110, 90, 80, "left"), ("Kitchen", 30, 30, 60, 70, "down"),
      ("Bathroom", 90, 30, 50, 40, "down"), ("Laundry", 90, 70, 50, 30, "down"),
      ("Balcony", 30, 190, 110, 40, "up")],
     ["LivingRoom", "Bedroom", "Bedroom", "Kitchen", "Bathroom", "Laundry", "Balcony"], "fenced"),
    ("Family house: living room, dining room, kitchen, master bedroom, child room, second bedroom, bathroom, balcony.",
     [("LivingRoom", 30, 100, 100, 90, "up"), ("DiningRoom", 90, 30, 60, 70, "down"),
      ("Kitchen", 30, 30, 60, 70, "down"), ("MasterRoom", 130, 100, 100, 90, "left"),
      ("ChildRoom", 150, 30, 80, 70, "down"), ("SecondRoom", 130, 190, 100, 45, "up"),
      ("Bathroom", 80, 190, 50, 45, "up"), ("Balcony", 30, 190, 50, 45, "up")],
     ["LivingRoom", "DiningRoom", "Kitchen", "MasterRoom", "ChildRoom", "SecondRoom", "Bathroom", "Balcony"],
     "cot"),
    ("A compact home: living room, bedroom, kitchen, bathroom and a dining room.",
     [("Living", 30, 100, 120, 90, "up"), ("Bedroom", 150, 100, 80, 90, "left"),
      ("Kitchen", 30, 30, 60, 70, "down"), ("Dining", 90, 30, 60, 70, "down"),
      ("Bath", 150, 30, 80, 70, "down")],
     ["LivingRoom", "Bedroom", "Kitchen", "DiningRoom", "Bathroom"], "wrapped"),
    ("Living room, master bedroom, bedroom, kitchen, bathroom and a study room.",
     [("LivingRoom", 30, 100, 110, 90, "up"), ("MasterRoom", 140, 100, 90, 90, "left"),
      ("Bedroom", 140, 190, 90, 40, "up"), ("Kitchen", 30, 30, 60, 70, "down"),
      ("Bathroom", 90, 30, 50, 70, "down"), ("StudyRoom", 140, 30, 90, 70, "down")],
     ["LivingRoom", "MasterRoom", "Bedroom", "Kitchen", "Bathroom", "StudyRoom"], "plain"),
    ("I would like a living room, a kitchen, two bathrooms, a master bedroom, a bedroom and a balcony.",
     [("LivingRoom", 30, 100, 110, 90, "up"), ("Kitchen", 30, 30, 60, 70, "down"),
      ("Bathroom 1", 90, 30, 50, 70, "down"), ("Bathroom 2", 30, 190, 50, 40, "up"),
      ("MasterRoom", 140, 30, 90, 90, "down"), ("Bedroom", 140, 120, 90, 70, "left"),
      ("Balcony", 80, 190, 60, 40, "up")],
     ["LivingRoom", "Kitchen", "Bathroom", "Bathroom", "MasterRoom", "Bedroom", "Balcony"], "cot"),
    ("Five rooms: living room, guest room, kitchen, bathroom, balcony.",
     [("LivingRoom", 30, 100, 120, 90, "up"), ("GuestRoom", 150, 100, 80, 90, "left"),
      ("Kitchen", 30, 30, 70, 70, "down"), ("Bathroom", 100, 30, 50, 70, "down"),
      ("Balcony", 150, 30, 80, 70, "down")],
     ["LivingRoom", "GuestRoom", "Kitchen", "Bathroom", "Balcony"], "fenced"),
    ("A townhouse with an entrance hall, living room, kitchen, dining room, two bedrooms and a bathroom.",
     [("Entrance", 30, 190, 60, 40, "up"), ("LivingRoom", 30, 100, 110, 90, "down"),
      ("Kitchen", 30, 30, 60, 70, "down"), ("DiningRoom", 90, 30, 50, 70, "down"),
      ("Bedroom 1", 140, 30, 90, 80, "down"), ("Bedroom 2", 140, 110, 90, 80, "left"),
      ("Bathroom", 140, 190, 90, 40, "up")],
     ["Entrance", "LivingRoom", "Kitchen", "DiningRoom", "Bedroom", "Bedroom", "Bathroom"], "cot"),
    ("A spacious home with living room, master bedroom, child room, guest room, kitchen, dining room, bathroom and study.",
     [("LivingRoom", 30, 100, 100, 90, "up"), ("MasterRoom", 130, 100, 100, 90, "left"),
      ("ChildRoom", 150, 30, 80, 70, "down"), ("GuestRoom", 130, 190, 100, 45, "up"),
      ("Kitchen", 30, 30, 60, 70, "down"), ("DiningRoom", 90, 30, 60, 70, "down"),
      ("Bathroom", 80, 190, 50, 45, "up"), ("StudyRoom", 30, 190, 50, 45, "up")],
     ["LivingRoom", "MasterRoom", "ChildRoom", "GuestRoom", "Kitchen", "DiningRoom", "Bathroom", "StudyRoom"],
     "plain"),
]

RETRY_TEXT = "A small apartment with a living room, a bedroom, a kitchen and a bathroom."
RETRY_ROOMS = [("LivingRoom", 30, 100, 120, 100, "up"), ("Bedroom", 150, 100, 80, 100, "left"),
               ("Kitchen", 30, 30, 70, 70, "down"), ("Bathroom", 100, 30, 60, 70, "down")]
MALFORMED = ("Step 1: the rooms are a living room, a bedroom, a kitchen and a bathroom.\n"
             '{"rooms": [{"name": "LivingRoom", "position": [30, 100], "size": [120, 100], "door": "up"},')


def layout(rooms) -> dict:
    return {"rooms": [{"name": n, "style": "modern", "position": [x, y], "size": [w, h], "door": d}
                      for n, x, y, w, h, d in rooms]}


def reply(rooms, style: str) -> str:
    obj = layout(rooms)
    body = json.dumps(obj, indent=2)
    if style == "cot":
        names = ", ".join(r[0] for r in rooms)
        return (f"Step 1: the request needs {len(rooms)} rooms: {names}.\n"
                "Step 2: the living room is the largest and sits in the middle of the plan.\n"
                "Step 3: wet rooms are grouped near the kitchen.\n"
                f"Final layout:\n{body}")
    if style == "fenced":
        return f"Here is the layout.\n```json\n{body}\n```"
    if style == "wrapped":
        return json.dumps({"House": obj})
    return body


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="fixtures/llm")
    args = ap.parse_args()
    out = Path(args.out)
    if out.exists():
        shutil.rmtree(out)
    out.mkdir(parents=True)
    demos = load_demos()
    manifest = {"cases": [], "retry": None}
    for text, rooms, expected, style in CASES:
        messages = build_prompt(demos, text, "P4").messages()
        key = save_fixture(out, messages, reply(rooms, style))
        manifest["cases"].append({"text": text, "key": key, "room_count": len(rooms),
                                  "expected_types": sorted(expected)})
    first = build_prompt(demos, RETRY_TEXT, "P4").messages()
    k1 = save_fixture(out, first, MALFORMED)
    from text2plan.llm.parse import parse_layout_init
    try:
        parse_layout_init(MALFORMED)
        raise SystemExit("malformed reply unexpectedly parsed")
    except Exception as exc:  # the exact error text is part of the retry prompt
        err = str(exc)
    second = first + [{"role": "assistant", "content": MALFORMED},
                      {"role": "user", "content": template("retry").replace("{ERROR}", err)}]
    k2 = save_fixture(out, second, reply(RETRY_ROOMS, "cot"))
    manifest["retry"] = {"text": RETRY_TEXT, "keys": [k1, k2], "room_count": len(RETRY_ROOMS),
                         "expected_types": sorted(r[0] for r in RETRY_ROOMS)}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(CASES) + 2} fixtures to {out}")


if __name__ == "__main__":
    main()
