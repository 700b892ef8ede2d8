import numpy as np
import pytest

from zoomlens.exceptions import InvalidArgumentError, NonFiniteLossError, NonFiniteValueError
from zoomlens.fundus import FundusDataset
from zoomlens.harness.train import (
    FINAL_CHECKPOINT,
    Trainer,
    build_model,
    phase_checkpoint_name,
)
from zoomlens.requests import Post, listen, stop_listening_to_all
from zoomlens.tensor import zero_grad


def grads_of(params):
    return {
        name: np.zeros_like(p.data) if p.grad is None else p.grad.copy()
        for name, p in params.items()
    }


class TestTrainer:
    def test_empty_dataset_raises(self, tiny_run_config, tmp_path):
        with pytest.raises(InvalidArgumentError):
            Trainer(tiny_run_config, FundusDataset(), tmp_path)

    def test_accumulated_gradients_equal_summed_ones(
        self, tiny_run_config, tiny_train_set, tmp_path
    ):
        trainer = Trainer(tiny_run_config, tiny_train_set, tmp_path)
        params = trainer.model.named_parameters()
        pairs = tiny_train_set.pairs[:2]

        summed = {name: np.zeros_like(p.data) for name, p in params.items()}
        for k, pair in enumerate(pairs):
            zero_grad(params)
            trainer.minibatch_loss(3, 0, k, pair)
            for name, grad in grads_of(params).items():
                summed[name] += grad

        zero_grad(params)
        for k, pair in enumerate(pairs):
            trainer.minibatch_loss(3, 0, k, pair)
        accumulated = grads_of(params)

        for name in params:
            np.testing.assert_allclose(accumulated[name], summed[name], atol=1e-12)

    def test_zero_steps_keep_initial_weights(self, tiny_run_config, tiny_train_set, tmp_path):
        config = tiny_run_config.replace(phase1_steps=0, phase2_steps=0, phase3_steps=0)
        result = Trainer(config, tiny_train_set, tmp_path).train()
        assert result.losses == {1: [], 2: [], 3: []}

        initial = build_model(config)
        trained = build_model(config)
        trained.load(result.final_checkpoint)
        for name, param in initial.named_parameters().items():
            np.testing.assert_array_equal(trained.named_parameters()[name].data, param.data)
        assert trained.trained_phase == 3

    def test_is_deterministic(self, tiny_run_config, tiny_train_set, tmp_path):
        first = Trainer(tiny_run_config, tiny_train_set, tmp_path / "a").train()
        second = Trainer(tiny_run_config, tiny_train_set, tmp_path / "b").train()
        assert first.losses == second.losses
        for name, param in first.model.named_parameters().items():
            np.testing.assert_array_equal(
                second.model.named_parameters()[name].data, param.data
            )

    def test_writes_checkpoints_and_posts(self, tiny_run_config, tiny_train_set, tmp_path):
        updates, phases = [], []

        class Listener:
            pass

        listener = Listener()
        listen(listener, Post.TRAIN_UPDATE_DONE, lambda *args: updates.append(args[:2]))
        listen(listener, Post.TRAIN_PHASE_DONE, lambda phase, path: phases.append(phase))
        try:
            result = Trainer(tiny_run_config, tiny_train_set, tmp_path).train()
        finally:
            stop_listening_to_all(listener)

        assert updates == [(p, s) for p in (1, 2, 3) for s in range(2)]
        assert phases == [1, 2, 3]
        for phase in (1, 2, 3):
            assert (tmp_path / phase_checkpoint_name(phase)).exists()
        assert result.final_checkpoint == tmp_path / FINAL_CHECKPOINT
        assert all(np.isfinite(loss) for losses in result.losses.values() for loss in losses)

    def test_phase_two_keeps_mnet_fixed(self, tiny_run_config, tiny_train_set, tmp_path):
        config = tiny_run_config.replace(phases=(2,))
        trainer = Trainer(config, tiny_train_set, tmp_path)
        before = trainer.model.state_dict()
        trainer.train()
        after = trainer.model.state_dict()

        changed = {name for name in before if not np.array_equal(before[name], after[name])}
        assert changed
        assert all(name.startswith("anet.") for name in changed)

    def test_attention_stays_normalized(self, tiny_run_config, tiny_train_set, tmp_path):
        config = tiny_run_config.replace(phase2_steps=5, phase3_steps=5)
        trainer = Trainer(config, tiny_train_set, tmp_path)
        deviations = []

        def check_attention(output):
            for eye in output.eyes():
                if eye.anet is not None:
                    sums = eye.anet.attention.data.sum(axis=(-2, -1))
                    deviations.append(float(np.abs(sums - 1).max()))

        trainer.forward_hooks.append(check_attention)
        trainer.train()

        # phase 1 runs without A-Net; phases 2 and 3 see both eyes of 5 pairs
        assert len(deviations) >= 20
        assert max(deviations) < 1e-9

    def test_non_finite_loss_aborts(self, tiny_run_config, tiny_train_set, tmp_path):
        trainer = Trainer(tiny_run_config, tiny_train_set, tmp_path)

        def poison(output):
            raise NonFiniteValueError("NaN in forward")

        trainer.forward_hooks.append(poison)
        with pytest.raises(NonFiniteLossError) as excinfo:
            trainer.train()
        assert (excinfo.value.phase, excinfo.value.step) == (1, 0)
        assert not (tmp_path / phase_checkpoint_name(1)).exists()


@pytest.mark.slow
def test_overfits_a_single_pair(tiny_run_config, tiny_train_set, tmp_path):
    config = tiny_run_config.replace(phases=(1,), phase1_steps=200)
    single = FundusDataset(tiny_train_set.pairs[:1])
    losses = Trainer(config, single, tmp_path).train().losses[1]
    assert len(losses) == 200
    assert losses[-1] < 0.05
