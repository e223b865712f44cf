import struct

import pytest
import torch

from text2plan.checkpoint import (FORMAT_VERSION, MAGIC, file_hash, latest_checkpoint, load_checkpoint,
                                  read_checkpoint, save_checkpoint)
from text2plan.data import Sample, perturb_to_init, synth_generate
from text2plan.diffusion import DiffusionConfig, make_schedule
from text2plan.engine import TrainConfig, batch_of, prepare_sample, train
from text2plan.errors import CheckpointError
from text2plan.model import DenoiserConfig

TINY = DenoiserConfig(d_model=32, heads=2, blocks=1, discrete_blocks=1)
DCFG = DiffusionConfig(make_schedule(32), cond_rate=0.01)


@pytest.fixture(scope="module")
def items():
    plans = synth_generate(3, 4, 21)
    return [prepare_sample(Sample(p, perturb_to_init(p, 4, k))) for k, p in enumerate(plans)]


@pytest.fixture(scope="module")
def trained(items):
    return train(items, DCFG, TrainConfig(steps=3, batch_size=2, seed=9), TINY)


def test_roundtrip_bit_identical(tmp_path, items, trained):
    path = save_checkpoint(tmp_path / "a.ckpt", trained)
    state = load_checkpoint(path, expect_model=TINY, expect_diffusion=DCFG)
    assert state.step == 3 and state.history == trained.history
    assert state.diffusion_cfg.cond_rate == 0.01 and state.diffusion_cfg.T == 32
    b = batch_of(items)
    x = torch.randn(b.coords.shape)
    tn = torch.full((len(b),), 0.5)
    assert torch.equal(state.model.predict_noise(x, b, tn), trained.model.predict_noise(x, b, tn))
    o1, o2 = state.optimizer.state_dict(), trained.optimizer.state_dict()
    for pid in o2["state"]:
        for k, v in o2["state"][pid].items():
            assert torch.equal(o1["state"][pid][k], v)


def test_header_layout(tmp_path, trained):
    path = save_checkpoint(tmp_path / "a.ckpt", trained)
    raw = path.read_bytes()
    assert raw.startswith(MAGIC)
    (n,) = struct.unpack("<Q", raw[8:16])
    header, tensors = read_checkpoint(path)
    assert header["format_version"] == FORMAT_VERSION
    assert header["model_config"]["d_model"] == 32
    assert "model.embed.weight" in tensors


def test_resave_same_bytes(tmp_path, trained):
    a = save_checkpoint(tmp_path / "a.ckpt", trained)
    b = save_checkpoint(tmp_path / "b.ckpt", load_checkpoint(a))
    assert file_hash(a) == file_hash(b)


def test_seeded_training_same_hash(tmp_path, items):
    tcfg = TrainConfig(steps=3, batch_size=2, seed=4)
    train(items, DCFG, tcfg, TINY, checkpoint_dir=tmp_path / "r1")
    train(items, DCFG, tcfg, TINY, checkpoint_dir=tmp_path / "r2")
    assert file_hash(tmp_path / "r1" / "step_00000003.ckpt") == file_hash(tmp_path / "r2" / "step_00000003.ckpt")


def test_mismatch_rejected(tmp_path, trained):
    path = save_checkpoint(tmp_path / "a.ckpt", trained)
    with pytest.raises(CheckpointError) as e:
        load_checkpoint(path, expect_model=DenoiserConfig(d_model=64, heads=2, blocks=1, discrete_blocks=1))
    assert e.value.code == "E_CHECKPOINT"
    with pytest.raises(CheckpointError):
        load_checkpoint(path, expect_diffusion=DiffusionConfig(make_schedule(64)))


def test_corrupt_files(tmp_path, trained):
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b"nonsense")
    with pytest.raises(CheckpointError):
        read_checkpoint(bad)
    good = save_checkpoint(tmp_path / "a.ckpt", trained).read_bytes()
    future = good.replace(b'"format_version":1', b'"format_version":9')
    (tmp_path / "v9.ckpt").write_bytes(future)
    with pytest.raises(CheckpointError):
        read_checkpoint(tmp_path / "v9.ckpt")
    with pytest.raises(CheckpointError):
        read_checkpoint(tmp_path / "missing.ckpt")


def test_latest(tmp_path, trained):
    assert latest_checkpoint(tmp_path / "none") is None
    for s in (2, 10, 7):
        save_checkpoint(tmp_path / f"step_{s:08d}.ckpt", trained)
    assert latest_checkpoint(tmp_path).name == "step_00000010.ckpt"
