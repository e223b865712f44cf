import torch

from text2plan.align import align_condition
from text2plan.data import perturb_to_init, synth_generate
from text2plan.diffusion import DiffusionConfig, make_schedule
from text2plan.engine import batch_of, prepare
from text2plan.gradcheck import gradient_check, randomize_heads
from text2plan.model import Denoiser, DenoiserConfig

DCFG = DiffusionConfig(make_schedule(64))


def _batch():
    plans = synth_generate(2, 2, 0)
    return batch_of([prepare(p, align_condition(p, perturb_to_init(p, 4, k))) for k, p in enumerate(plans)])


def _model(cfg, seed=0):
    torch.manual_seed(seed)
    return randomize_heads(Denoiser(cfg), seed=seed)


def test_full_model_gradients():
    cfg = DenoiserConfig(d_model=32, heads=2, blocks=1, discrete_blocks=1)
    err = gradient_check(_model(cfg), _batch(), DCFG, n_weights=24, t=[1, 5])
    assert err < 1e-4


def test_corrupted_control():
    cfg = DenoiserConfig(d_model=32, heads=2, blocks=1, discrete_blocks=1)
    assert gradient_check(_model(cfg), _batch(), DCFG, n_weights=24, t=[1, 5], corrupt=True) > 1e-1


def test_linear_only_gradients():
    cfg = DenoiserConfig(d_model=32, heads=2, blocks=1, discrete_blocks=1, linear_only=True)
    assert gradient_check(_model(cfg), _batch(), DCFG, epsilon=1e-4, n_weights=24, t=[1, 5]) < 1e-6
