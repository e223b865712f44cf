from ..layout import InitRoom, LayoutInit, init_to_floorplan
from .client import HTTPClient, LLMClient, MockClient, client_from_env, message_key
from .frontend import (DemoPair, PromptBundle, build_prompt, describe_layout,
                       describe_layout_template, generate_layout_init, load_demos)
from .parse import Repair, parse_layout_init

__all__ = [
    "DemoPair", "HTTPClient", "InitRoom", "LLMClient", "LayoutInit", "MockClient", "PromptBundle",
    "Repair", "build_prompt", "client_from_env", "describe_layout", "describe_layout_template",
    "generate_layout_init", "init_to_floorplan", "load_demos", "message_key", "parse_layout_init",
]
