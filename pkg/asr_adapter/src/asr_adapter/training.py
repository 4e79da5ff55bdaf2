"""Fine-tuning loop with WER-based checkpoint selection.

Checkpoints are taken every ``eval_every`` optimization steps (and at the
final step); the checkpoint with the lowest validation word error rate
wins, earliest step breaking ties. Hardware and numerical failures
propagate to the caller unchanged.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .data import TrainingClip, TrainingSet
from .errors import DataError
from .model import BoundaryASRModel, build_model, greedy_decode, resolve_spec
from .tokenizer import EOS_ID, PAD_ID, SOS_ID, Tokenizer, normalize_words


@dataclass(frozen=True)
class TrainConfig:
    """Mirrors the published fine-tuning defaults; all fields overridable."""

    base_model: str = "local-tiny"
    learning_rate: float = 1e-5
    batch_size: int = 8
    selection_metric: str = "wer"
    eval_every: int = 100
    max_steps: int = 100
    val_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise DataError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1 or self.eval_every < 1 or self.max_steps < 1:
            raise DataError("batch_size, eval_every, and max_steps must be >= 1")
        if self.selection_metric != "wer":
            raise DataError(f"unsupported selection metric {self.selection_metric!r}")
        if not 0.0 < self.val_fraction < 1.0:
            raise DataError(f"val_fraction must be in (0, 1), got {self.val_fraction}")

    def dump(self, path) -> None:
        payload = {
            "base_model": self.base_model,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "selection_metric": self.selection_metric,
            "eval_every": self.eval_every,
            "max_steps": self.max_steps,
            "val_fraction": self.val_fraction,
            "seed": self.seed,
        }
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "TrainConfig":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read train config {path}: {exc}") from exc
        if not isinstance(payload, dict):
            raise DataError("train config must be a JSON object")
        try:
            return cls(**payload)
        except TypeError as exc:
            raise DataError(f"bad train config field: {exc}") from exc


@dataclass(frozen=True)
class Checkpoint:
    step: int
    val_wer: float
    train_loss: float
    state_dict: dict = field(repr=False, compare=False)


@dataclass(frozen=True)
class FinetuneResult:
    best: Checkpoint
    checkpoints: tuple[Checkpoint, ...]
    losses: tuple[float, ...]  # one entry per optimization step


def edit_distance(ref: list[str], hyp: list[str]) -> int:
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, start=1):
        cur = [i] + [0] * len(hyp)
        for j, h in enumerate(hyp, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (r != h))
        prev = cur
    return prev[-1]


def word_error_rate(refs: list[list[str]], hyps: list[list[str]]) -> float:
    """Corpus-level WER: pooled edit distance over pooled reference length."""
    if len(refs) != len(hyps):
        raise DataError("refs and hyps must pair up")
    errors = sum(edit_distance(r, h) for r, h in zip(refs, hyps))
    total = sum(len(r) for r in refs)
    if total == 0:
        return 0.0 if errors == 0 else 1.0
    return errors / total


def select_best(checkpoints) -> Checkpoint:
    """Lowest validation WER; earliest step wins ties."""
    candidates = list(checkpoints)
    if not candidates:
        raise DataError("no checkpoints to select from")
    return min(candidates, key=lambda c: (c.val_wer, c.step))


def _batch_tensors(clips: list[TrainingClip]):
    max_samples = max(len(c.samples) for c in clips)
    samples = np.zeros((len(clips), max_samples), dtype=np.float32)
    for i, c in enumerate(clips):
        samples[i, : len(c.samples)] = c.samples
    max_target = max(len(c.target_ids) for c in clips)
    targets = np.full((len(clips), max_target), PAD_ID, dtype=np.int64)
    for i, c in enumerate(clips):
        targets[i, : len(c.target_ids)] = c.target_ids
    return torch.from_numpy(samples), torch.from_numpy(targets)


@torch.no_grad()
def validation_wer(model: BoundaryASRModel, clips, tokenizer: Tokenizer) -> float:
    refs, hyps = [], []
    for clip in clips:
        samples = torch.from_numpy(clip.samples[np.newaxis].astype(np.float32))
        decoded = greedy_decode(model, samples, SOS_ID, EOS_ID)[0]
        refs.append(normalize_words(clip.lyric))
        hyps.append(tokenizer.decode_words(decoded))
    return word_error_rate(refs, hyps)


def finetune(
    training_set: TrainingSet,
    config: TrainConfig,
    val_clips=None,
) -> FinetuneResult:
    """Train on the clip set and return the lowest-WER checkpoint.

    Without an explicit ``val_clips`` the tail ``val_fraction`` of the
    clips is held out. Both splits must be nonempty.
    """
    clips = list(training_set.clips)
    tokenizer = training_set.tokenizer
    if val_clips is None:
        n_val = max(1, int(round(config.val_fraction * len(clips))))
        if n_val >= len(clips):
            raise DataError(
                f"{len(clips)} clips cannot supply a nonempty train/validation split"
            )
        val_clips = clips[-n_val:]
        clips = clips[:-n_val]
    val_clips = list(val_clips)
    if not clips or not val_clips:
        raise DataError("train and validation splits must both be nonempty")

    model = build_model(resolve_spec(config.base_model), tokenizer.vocab_size, config.seed)
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    loss_fn = torch.nn.CrossEntropyLoss(ignore_index=PAD_ID)
    order_rng = np.random.default_rng(config.seed)

    losses: list[float] = []
    checkpoints: list[Checkpoint] = []
    queue: list[int] = []
    for step in range(1, config.max_steps + 1):
        if len(queue) < config.batch_size:
            queue.extend(order_rng.permutation(len(clips)).tolist())
        batch = [clips[i] for i in queue[: config.batch_size]]
        del queue[: config.batch_size]

        samples, targets = _batch_tensors(batch)
        logits = model(samples, targets[:, :-1])
        loss = loss_fn(logits.reshape(-1, logits.shape[-1]), targets[:, 1:].reshape(-1))
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        losses.append(float(loss.detach()))

        if step % config.eval_every == 0 or step == config.max_steps:
            wer = validation_wer(model, val_clips, tokenizer)
            model.train()
            state = copy.deepcopy(model.state_dict())
            checkpoints.append(
                Checkpoint(step=step, val_wer=wer, train_loss=losses[-1], state_dict=state)
            )

    best = select_best(checkpoints)
    return FinetuneResult(best=best, checkpoints=tuple(checkpoints), losses=tuple(losses))


def save_checkpoint(path, result_or_checkpoint, tokenizer: Tokenizer, config: TrainConfig) -> None:
    checkpoint = (
        result_or_checkpoint.best
        if isinstance(result_or_checkpoint, FinetuneResult)
        else result_or_checkpoint
    )
    torch.save(
        {
            "state_dict": checkpoint.state_dict,
            "tokenizer": tokenizer.to_json(),
            "base_model": config.base_model,
            "step": checkpoint.step,
            "val_wer": checkpoint.val_wer,
        },
        path,
    )


def load_checkpoint(path) -> tuple[BoundaryASRModel, Tokenizer]:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    tokenizer = Tokenizer.from_json(payload["tokenizer"])
    model = build_model(resolve_spec(payload["base_model"]), tokenizer.vocab_size)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, tokenizer
