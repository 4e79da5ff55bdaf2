import math

import pytest
import torch

from asr_adapter import (
    Checkpoint,
    DataError,
    TrainConfig,
    build_training_set,
    edit_distance,
    finetune,
    load_checkpoint,
    save_checkpoint,
    select_best,
    word_error_rate,
)

from conftest import ref_line, write_wav

MICRO = dict(base_model="local-micro", batch_size=1)


class TestTrainConfig:
    def test_defaults_mirror_published_setup(self):
        cfg = TrainConfig()
        assert cfg.learning_rate == 1e-5
        assert cfg.batch_size == 8
        assert cfg.selection_metric == "wer"
        assert cfg.eval_every == 100

    def test_positive_hyperparameters_enforced(self):
        with pytest.raises(DataError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(DataError):
            TrainConfig(batch_size=0)
        with pytest.raises(DataError):
            TrainConfig(eval_every=0)
        with pytest.raises(DataError):
            TrainConfig(max_steps=0)
        with pytest.raises(DataError):
            TrainConfig(val_fraction=1.0)

    def test_unsupported_metric_rejected(self):
        with pytest.raises(DataError):
            TrainConfig(selection_metric="bleu")

    def test_file_round_trip(self, tmp_path):
        cfg = TrainConfig(base_model="local-micro", max_steps=3, seed=9)
        path = tmp_path / "train.json"
        cfg.dump(path)
        assert TrainConfig.load(path) == cfg

    def test_load_bad_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(DataError):
            TrainConfig.load(path)
        path.write_text('{"no_such_field": 1}', encoding="utf-8")
        with pytest.raises(DataError):
            TrainConfig.load(path)


class TestWer:
    def test_edit_distance_cases(self):
        assert edit_distance([], []) == 0
        assert edit_distance(["a"], []) == 1
        assert edit_distance(["a", "b", "c"], ["a", "x", "c"]) == 1
        assert edit_distance(["a", "b"], ["b", "a"]) == 2
        assert edit_distance(["a", "b", "c"], ["b", "c", "d"]) == 2

    def test_word_error_rate_pools_over_clips(self):
        refs = [["a", "b"], ["c", "d"]]
        hyps = [["a", "b"], ["c", "x"]]
        assert word_error_rate(refs, hyps) == 0.25

    def test_empty_references(self):
        assert word_error_rate([[]], [[]]) == 0.0
        assert word_error_rate([[]], [["noise"]]) == 1.0

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            word_error_rate([["a"]], [])


class TestSelection:
    def _ck(self, step, wer):
        return Checkpoint(step=step, val_wer=wer, train_loss=1.0, state_dict={})

    def test_lowest_wer_wins(self):
        best = select_best([self._ck(100, 0.4), self._ck(200, 0.3)])
        assert best.step == 200 and best.val_wer == 0.3

    def test_ties_break_to_earliest_step(self):
        best = select_best([self._ck(100, 0.3), self._ck(200, 0.3)])
        assert best.step == 100

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            select_best([])


class TestFinetune:
    def test_smoke_one_step_two_clips_finite_loss(self, tmp_path):
        audio = tmp_path / "audio"
        audio.mkdir()
        write_wav(audio / "a.wav", 6.0)
        write_wav(audio / "b.wav", 6.0, freq=330.0)
        ref = tmp_path / "ref.jsonl"
        ref.write_text(
            ref_line("a", 6.0, [2.0]) + "\n" + ref_line("b", 6.0, [3.0]) + "\n",
            encoding="utf-8",
        )
        ts = build_training_set(ref, audio, lyrics={"a": "hey la", "b": "nong se"})
        result = finetune(ts, TrainConfig(max_steps=1, **MICRO))
        assert len(result.losses) == 1
        assert math.isfinite(result.losses[0])
        assert result.best.step == 1

    def test_overfit_ten_steps_strictly_decreases_loss(self, song_corpus):
        ref, audio, lyrics = song_corpus
        ts = build_training_set(ref, audio, lyrics=lyrics)
        cfg = TrainConfig(learning_rate=1e-3, max_steps=10, eval_every=10, seed=1, **MICRO)
        result = finetune(ts, cfg, val_clips=ts.clips)
        assert len(result.losses) == 10
        assert all(
            later < earlier for earlier, later in zip(result.losses, result.losses[1:])
        )

    def test_checkpoint_cadence_and_final_step(self, song_corpus):
        ref, audio, lyrics = song_corpus
        ts = build_training_set(ref, audio, lyrics=lyrics)
        cfg = TrainConfig(max_steps=5, eval_every=2, **MICRO)
        result = finetune(ts, cfg, val_clips=ts.clips)
        assert [c.step for c in result.checkpoints] == [2, 4, 5]
        assert result.best in result.checkpoints

    def test_single_clip_without_val_split_rejected(self, song_corpus):
        ref, audio, lyrics = song_corpus
        ts = build_training_set(ref, audio, lyrics=lyrics)
        with pytest.raises(DataError, match="split"):
            finetune(ts, TrainConfig(**MICRO))

    def test_deterministic_under_seed(self, song_corpus):
        ref, audio, lyrics = song_corpus
        ts = build_training_set(ref, audio, lyrics=lyrics)
        cfg = TrainConfig(max_steps=2, eval_every=2, seed=7, **MICRO)
        first = finetune(ts, cfg, val_clips=ts.clips)
        second = finetune(ts, cfg, val_clips=ts.clips)
        assert first.losses == second.losses

    def test_checkpoint_save_load_round_trip(self, song_corpus, tmp_path):
        ref, audio, lyrics = song_corpus
        ts = build_training_set(ref, audio, lyrics=lyrics)
        cfg = TrainConfig(max_steps=2, eval_every=1, **MICRO)
        result = finetune(ts, cfg, val_clips=ts.clips)
        path = tmp_path / "ck.pt"
        save_checkpoint(path, result, ts.tokenizer, cfg)
        model, tok = load_checkpoint(path)
        assert tok == ts.tokenizer
        for name, tensor in model.state_dict().items():
            assert torch.equal(tensor, result.best.state_dict[name])
