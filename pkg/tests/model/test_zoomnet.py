import numpy as np
import pytest

from zoomlens.exceptions import CheckpointMismatchError, InvalidArgumentError
from zoomlens.model import (
    EyePairBatch,
    ModelConfig,
    ZoomNet,
    predicted_grade,
    zoomnet_forward,
)
from zoomlens.metrics import quadratic_weighted_kappa
from zoomlens.sampler import ZoomRegion, ZoomRegions
from zoomlens.tensor import SgdState, backward, reset_graph, sgd_step, zero_grad
from zoomlens.tensor.gradcheck import max_relative_error
from tests.conftest import TINY_MODEL, random_image


class TestModelConfig:
    def test_scale(self, tiny_model_config):
        assert tiny_model_config.scale == 2.0

    def test_high_res_smaller_than_input_raises(self):
        with pytest.raises(InvalidArgumentError):
            ModelConfig(**{**TINY_MODEL, "high_res_size": 20})

    def test_patch_larger_than_high_res_raises(self):
        with pytest.raises(InvalidArgumentError):
            ModelConfig(**{**TINY_MODEL, "patch_size": 60})


class TestZoomNetForward:
    def test_phase_three_runs_every_head(self, tiny_model, low_res_pair, high_res_pair):
        out = zoomnet_forward(tiny_model, low_res_pair, high_res_pair, phase=3)
        for eye in out.eyes():
            assert eye.y_m.data.sum() == pytest.approx(1.0, abs=1e-9)
            assert eye.y_a.data.sum() == pytest.approx(1.0, abs=1e-9)
            assert eye.y_c.data.sum() == pytest.approx(1.0, abs=1e-9)
            assert eye.gated.shape == (1, 5, 4, 4)
            assert 1 <= len(eye.regions) <= 2
            assert len(eye.patches) == 2
            assert all(p.shape == (3, 20, 20) for p in eye.patches)
            assert eye.y_ma.sum() == pytest.approx(1.0)

    @pytest.mark.parametrize("phase", [1, 2])
    def test_early_phases_skip_cnet(self, tiny_model, low_res_pair, phase):
        out = zoomnet_forward(tiny_model, low_res_pair, phase=phase)
        assert out.left.y_c is None
        assert out.right.y_c is None

    def test_phase_one_runs_mnet_only(self, tiny_model, low_res_pair):
        out = zoomnet_forward(tiny_model, low_res_pair, phase=1)
        for eye in out.eyes():
            assert eye.anet is None
            assert eye.regions is None
            assert eye.y_a is None
            assert eye.y_m.data.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.isfinite(out.loss(low_res_pair, 1).item())

    def test_phase_one_leaves_anet_out_of_the_graph(self, tiny_model, low_res_pair):
        params = tiny_model.named_parameters()
        zero_grad(params)
        out = zoomnet_forward(tiny_model, low_res_pair, phase=1)
        backward(out.loss(low_res_pair, 1))
        assert all(params[n].grad is None for n in params if n.startswith("anet."))
        assert any(params[n].grad is not None for n in params if n.startswith("mnet."))

    def test_phase_three_needs_high_res(self, tiny_model, low_res_pair):
        with pytest.raises(InvalidArgumentError):
            zoomnet_forward(tiny_model, low_res_pair, phase=3)

    def test_pairs_must_agree_on_eyes(self, tiny_model, low_res_pair, high_res_pair):
        lone = EyePairBatch(high_res_pair.left, None, 2, None)
        with pytest.raises(InvalidArgumentError):
            zoomnet_forward(tiny_model, low_res_pair, lone)

    def test_single_eye_pair(self, tiny_model, low_res_pair, high_res_pair):
        low = EyePairBatch(low_res_pair.left, None, 2, None)
        high = EyePairBatch(high_res_pair.left, None, 2, None)
        out = zoomnet_forward(tiny_model, low, high)
        assert out.right is None
        assert out.eyes() == [out.left]

    def test_same_seed_same_outputs(self, tiny_model_config, low_res_pair, high_res_pair):
        a = zoomnet_forward(ZoomNet(tiny_model_config, 5), low_res_pair, high_res_pair)
        b = zoomnet_forward(ZoomNet(tiny_model_config, 5), low_res_pair, high_res_pair)
        np.testing.assert_array_equal(a.left.y_c.data, b.left.y_c.data)
        np.testing.assert_array_equal(a.right.gated.data, b.right.gated.data)
        assert a.left.regions == b.left.regions

    def test_given_regions_are_used(self, tiny_model, low_res_pair, high_res_pair):
        regions = ZoomRegions([ZoomRegion(3, 4, 1.0)], 8, 28, 28)
        out = zoomnet_forward(
            tiny_model, low_res_pair, high_res_pair, regions=(regions, regions)
        )
        assert out.left.regions is regions
        # center (3, 4) -> (6, 8) at 56 px, window clamped to the top-left corner
        np.testing.assert_array_equal(out.left.patches[0], high_res_pair.left[:, 0:20, 0:20])

    def test_loss_sums_both_eyes(self, tiny_model, low_res_pair, high_res_pair):
        out = zoomnet_forward(tiny_model, low_res_pair, high_res_pair)
        total = out.loss(low_res_pair, 3).item()
        left = out.left.loss(2, 3).item()
        right = out.right.loss(3, 3).item()
        assert total == pytest.approx(left + right)

    @pytest.mark.parametrize("seed", range(3))
    def test_composed_gradient(self, tiny_model_config, low_res_pair, high_res_pair, seed):
        model = ZoomNet(tiny_model_config, seed)
        first = zoomnet_forward(model, low_res_pair, high_res_pair)
        regions = (first.left.regions, first.right.regions)

        def f():
            out = zoomnet_forward(model, low_res_pair, high_res_pair, regions=regions)
            return out.loss(low_res_pair, 3)

        params = list(model.parameters())
        assert max_relative_error(f, params, max_entries=3, seed=seed) < 1e-4


class TestZoomNetTraining:
    def test_phase_two_freezes_mnet_and_cnet(self, tiny_model):
        frozen = tiny_model.frozen_parameters(2)
        assert frozen
        assert all(name.startswith(("mnet.", "cnet.")) for name in frozen)
        assert not any(name.startswith("anet.") for name in frozen)
        assert tiny_model.frozen_parameters(1) == set()
        assert tiny_model.frozen_parameters(3) == set()

    def test_phase_two_step_leaves_mnet_unchanged(self, tiny_model, low_res_pair):
        params = tiny_model.named_parameters()
        before = tiny_model.state_dict()
        state = SgdState.for_parameters(params, learning_rate=0.1)

        zero_grad(params)
        zoomnet_forward(tiny_model, low_res_pair, phase=2).loss(low_res_pair, 2).backward()
        sgd_step(state, params, tiny_model.frozen_parameters(2))

        after = tiny_model.state_dict()
        for name in before:
            if name.startswith(("mnet.", "cnet.")):
                np.testing.assert_array_equal(before[name], after[name])
        assert any(
            not np.array_equal(before[name], after[name])
            for name in before
            if name.startswith("anet.")
        )


class TestCheckpoints:
    def test_save_and_load(self, tiny_model_config, tmp_path):
        model = ZoomNet(tiny_model_config, 1)
        model.trained_phase = 3
        path = tmp_path / "model.zlt"
        model.save(path)

        loaded = ZoomNet(tiny_model_config, 2)
        loaded.load(path)

        assert loaded.trained_phase == 3
        for name, value in model.state_dict().items():
            np.testing.assert_array_equal(value, loaded.state_dict()[name])

    def test_other_architecture_raises(self, tiny_model, tmp_path):
        path = tmp_path / "model.zlt"
        tiny_model.save(path)
        other = ZoomNet(ModelConfig(**{**TINY_MODEL, "anet_hidden": 6}))
        with pytest.raises(CheckpointMismatchError):
            other.load(path)

    def test_final_grade_uses_cnet_after_phase_three(self, tiny_model, low_res_pair, high_res_pair):
        out = zoomnet_forward(tiny_model, low_res_pair, high_res_pair).left
        tiny_model.trained_phase = 1
        assert tiny_model.predict(out) == predicted_grade(out.y_m)
        tiny_model.trained_phase = 3
        assert tiny_model.predict(out) == predicted_grade(out.y_c)


class TestPredictedGrade:
    def test_ties_go_to_lower_grade(self):
        assert predicted_grade(np.array([0.1, 0.4, 0.4, 0.05, 0.05])) == 1

    def test_accepts_tensor_shaped_input(self):
        assert predicted_grade(np.array([[0.0, 0.0, 0.0, 0.0, 1.0]])) == 4


@pytest.mark.slow
def test_untrained_model_kappa_is_near_zero(tiny_model_config):
    model = ZoomNet(tiny_model_config, seed=0)
    rng = np.random.default_rng(41)
    truths, preds = [], []
    for index in range(250):
        grades = (index % 5, (index // 5) % 5)
        pair = EyePairBatch(random_image(rng, 28), random_image(rng, 28), *grades)
        out = zoomnet_forward(model, pair, phase=1)
        truths.extend(grades)
        preds.extend(predicted_grade(eye.y_m) for eye in out.eyes())
        reset_graph()

    assert len(truths) == 500
    assert all(truths.count(g) == 100 for g in range(5))
    assert abs(quadratic_weighted_kappa(truths, preds)) < 0.1
