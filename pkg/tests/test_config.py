import json

import pytest

from text2plan.config import CliConfig, config_from_dict, load_config
from text2plan.errors import ConfigError
from text2plan.render import PALETTE
from text2plan.rooms import RoomType


def test_defaults():
    cfg = load_config()
    assert cfg == CliConfig()
    assert cfg.diffusion.build().schedule.T == 1000
    assert cfg.model.build().d_model == 512


@pytest.mark.parametrize("data, where", [
    ({"sed": 1}, "sed"),
    ({"train": {"learning_rate": 0.1}}, "train"),
    ({"render": {"palette": {"Kitchen": "#000000"}, "colour": 1}}, "colour"),
])
def test_unknown_keys_rejected(data, where):
    with pytest.raises(ConfigError, match=where):
        config_from_dict(data)


def test_section_must_be_mapping():
    with pytest.raises(ConfigError):
        config_from_dict({"train": 3})


def test_yaml_and_json_agree(tmp_path):
    data = {"seed": 7, "train": {"steps": 12, "batch_size": 4}, "diffusion": {"T": 64}}
    (tmp_path / "c.json").write_text(json.dumps(data))
    (tmp_path / "c.yaml").write_text("seed: 7\ntrain:\n  steps: 12\n  batch_size: 4\ndiffusion:\n  T: 64\n")
    a, b = load_config(tmp_path / "c.json"), load_config(tmp_path / "c.yaml")
    assert a == b
    assert a.train.build(a.seed).steps == 12 and a.train.build(a.seed).seed == 7
    assert a.diffusion.build().t_discrete == 2


def test_seed_override(tmp_path):
    (tmp_path / "c.yaml").write_text("seed: 7\n")
    assert load_config(tmp_path / "c.yaml", seed=3).seed == 3
    assert load_config(tmp_path / "c.yaml").seed == 7


def test_missing_and_unparsable(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.yaml")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError, match="cannot parse"):
        load_config(tmp_path / "bad.json")


def test_palette_override():
    cfg = config_from_dict({"render": {"palette": {"Kitchen": "#010203"}}})
    style = cfg.render.build()
    assert style.palette[RoomType.Kitchen] == "#010203"
    assert style.palette[RoomType.Bathroom] == PALETTE[RoomType.Bathroom]
    with pytest.raises(ConfigError, match="Attic"):
        config_from_dict({"render": {"palette": {"Attic": "#000000"}}}).render.build()


def test_ablation_setup():
    s = config_from_dict({"ablation": {"steps": 5}}).ablation.setup(seed=4)
    assert s.steps == 5 and s.seed == 4 and s.T == 64
