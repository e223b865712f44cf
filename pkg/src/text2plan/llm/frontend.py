"""Chain-of-thought prompting, layout description and Layout-Init generation."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib import resources

from ..errors import ClientError, EmptyInputError, GenerationFailedError, NoJSONError, SchemaError
from ..geometry import Floorplan
from ..graph import extract_bubble_graph
from ..layout import LayoutInit
from .client import LLMClient
from .parse import layout_from_dict, parse_layout_init

log = logging.getLogger(__name__)

VARIANTS = ("P1", "P2", "P3", "P4")
TRIGGER = "Let's think step by step."
_NUMBER_WORDS = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"]


def template(name: str) -> str:
    return resources.files(__package__).joinpath("templates", f"{name}.txt").read_text().strip()


@dataclass(frozen=True)
class DemoPair:
    description: str
    layout_init: LayoutInit

    def render(self, k: int) -> str:
        return (f"Example {k}\nRequest: {self.description}\n"
                f"Layout-Init: {json.dumps(self.layout_init.to_dict(), separators=(', ', ': '))}")


def load_demos(path=None) -> list[DemoPair]:
    """The in-repo demo set, or demos from a JSON list of {description, layout_init}."""
    if path is None:
        text = resources.files(__package__).joinpath("demos.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    out = []
    for rec in json.loads(text):
        init, repairs = layout_from_dict(rec["layout_init"])
        if repairs:
            raise SchemaError(f"demo layout needs repairs: {[str(r) for r in repairs]}")
        out.append(DemoPair(rec["description"], init))
    return out


@dataclass(frozen=True)
class PromptBundle:
    initialization: str
    chain_of_thought: str
    generation: str
    demos: tuple[DemoPair, ...]
    variant: str = "P4"

    def __post_init__(self):
        if not (self.initialization and self.chain_of_thought and self.generation):
            raise ValueError("all prompt sections must be non-empty")

    @property
    def text(self) -> str:
        return "\n\n".join([self.initialization, self.chain_of_thought, self.generation])

    def messages(self) -> list[dict]:
        return [{"role": "system", "content": self.initialization},
                {"role": "user", "content": self.chain_of_thought + "\n\n" + self.generation}]


def build_prompt(demos, user_text: str, variant: str = "P4") -> PromptBundle:
    """Assemble the Initialization -> Chain of Thought -> Generation prompt.

    P1 is the bare task definition, P2 adds design rules of thumb, P3 adds the
    step-by-step trigger and P4 adds the explicit room-by-room reasoning chain.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown prompt variant {variant!r}")
    if not user_text or not user_text.strip():
        raise EmptyInputError("user text is empty")
    demos = tuple(demos or ())
    if variant in ("P3", "P4") and not demos:
        raise ValueError(f"variant {variant} needs at least one demo")
    init = template("initialization")
    if variant != "P1":
        init += "\n\n" + template("common_sense")
    cot = template("cot_base")
    if variant in ("P3", "P4"):
        cot += "\n" + TRIGGER
    if variant == "P4":
        cot += "\n" + template("cot_chain")
    demo_text = "\n\n".join(d.render(k) for k, d in enumerate(demos, 1)) or "(no examples)"
    gen = template("generation").replace("{DEMOS}", demo_text).replace("{USER_TEXT}", user_text.strip())
    return PromptBundle(init, cot, gen, demos, variant)


# -- description ---------------------------------------------------------------

def layout_facts(plan: Floorplan) -> tuple[list[tuple[str, int]], list[tuple[str, str]]]:
    """(display name, count) per room type in first-appearance order, and adjacent display-name pairs."""
    counts: dict = {}
    for _, lp in plan.rooms():
        counts[lp.room_type] = counts.get(lp.room_type, 0) + 1
    g = extract_bubble_graph(plan)
    types = dict(g.nodes)
    pairs = []
    for a, b in sorted(g.edges):
        ta, tb = types[a], types[b]
        subj, obj = (ta, tb) if ta >= tb else (tb, ta)
        pair = (subj.display, obj.display)
        if pair not in pairs:
            pairs.append(pair)
    return [(t.display, n) for t, n in counts.items()], pairs


def _plural(name: str, n: int) -> str:
    word = _NUMBER_WORDS[n] if n < len(_NUMBER_WORDS) else str(n)
    if n == 1:
        return f"{'an' if name[0] in 'aeiou' else 'a'} {name}"
    return f"{word} {name}{'es' if name.endswith(('s', 'sh', 'ch')) else 's'}"


def describe_layout_template(plan: Floorplan) -> str:
    """Deterministic no-LLM description built from the same facts as the LLM prompt."""
    counts, pairs = layout_facts(plan)
    items = [_plural(name, n) for name, n in counts]
    listing = items[0] if len(items) == 1 else ", ".join(items[:-1]) + " and " + items[-1]
    parts = [f"I need a house with {listing}."]
    parts += [f"The {a} is adjacent to the {b}." for a, b in pairs]
    return " ".join(parts)


def describe_prompt(plan: Floorplan) -> list[dict]:
    counts, pairs = layout_facts(plan)
    lines = [f"- {n} x {name}" for name, n in counts]
    lines += [f"- the {a} is adjacent to the {b}" for a, b in pairs]
    return [{"role": "user", "content": template("describe").replace("{FACTS}", "\n".join(lines))}]


def describe_layout(plan: Floorplan, client: LLMClient | None = None, retries: int = 2) -> str:
    """Ask ``client`` for a buyer-style description of ``plan``; template text when no client."""
    if client is None:
        return describe_layout_template(plan)
    messages = describe_prompt(plan)
    last = None
    for _ in range(retries + 1):
        try:
            text = client.send(messages)
            if text and text.strip():
                return text.strip()
            last = ClientError("empty response")
        except ClientError as exc:
            last = exc
    raise ClientError(f"description request failed: {last}")


# -- generation --------------------------------------------------------------

def generate_layout_init(user_text: str, demos, client: LLMClient, max_retries: int = 2,
                         variant: str = "P4") -> LayoutInit:
    """Prompt, parse, and re-prompt with the parse error on failure."""
    if max_retries < 0:
        raise ValueError("max_retries must be >= 0")
    messages = build_prompt(demos, user_text, variant).messages()
    last: Exception | None = None
    for attempt in range(max_retries + 1):
        try:
            raw = client.send(messages)
        except ClientError as exc:
            last = exc
            log.warning("attempt %d: client error %s", attempt + 1, exc)
            continue
        try:
            init, repairs = parse_layout_init(raw)
        except (NoJSONError, SchemaError) as exc:
            last = exc
            log.info("attempt %d: unusable layout (%s)", attempt + 1, exc)
            messages = messages + [{"role": "assistant", "content": raw},
                                   {"role": "user", "content": template("retry").replace("{ERROR}", str(exc))}]
            continue
        if repairs:
            log.info("layout repaired: %s", "; ".join(map(str, repairs)))
        return init
    raise GenerationFailedError(f"no valid Layout-Init after {max_retries + 1} attempts: {last}",
                                last_error=last, attempts=max_retries + 1)
