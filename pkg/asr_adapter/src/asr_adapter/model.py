"""Compact encoder-decoder recognizer operating on log-mel features.

The architecture mirrors the published fine-tuning setup in shape (mel
front end, convolutional downsampling, transformer encoder and decoder,
timestamp tokens in the output vocabulary) but is small enough to train on
CPU. Pretrained weights for the original base model are not fetchable at
desk scale, so checkpoints here start from random initialization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .audio import SAMPLE_RATE
from .tokenizer import MAX_CLIP_S


@dataclass(frozen=True)
class ModelSpec:
    name: str
    d_model: int = 64
    n_heads: int = 4
    enc_layers: int = 2
    dec_layers: int = 2
    ffn_dim: int = 128
    n_mels: int = 80
    n_fft: int = 400
    hop: int = 160
    max_target_len: int = 448


REGISTRY = {
    "local-tiny": ModelSpec(name="local-tiny"),
    "local-micro": ModelSpec(
        name="local-micro", d_model=32, n_heads=2, enc_layers=1, dec_layers=1, ffn_dim=64
    ),
}


def resolve_spec(identifier: str) -> ModelSpec:
    if identifier not in REGISTRY:
        known = ", ".join(sorted(REGISTRY))
        raise KeyError(f"unknown base model {identifier!r}; available: {known}")
    return REGISTRY[identifier]


def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int) -> np.ndarray:
    """Triangular mel filterbank over the rFFT bins."""
    def hz_to_mel(f):
        return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=float) / 700.0)

    def mel_to_hz(m):
        return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)

    edges = mel_to_hz(np.linspace(hz_to_mel(0.0), hz_to_mel(sample_rate / 2), n_mels + 2))
    freqs = np.fft.rfftfreq(n_fft, d=1.0 / sample_rate)
    weights = np.zeros((n_mels, len(freqs)))
    for i in range(n_mels):
        lo, center, hi = edges[i], edges[i + 1], edges[i + 2]
        up = (freqs - lo) / max(center - lo, 1e-9)
        down = (hi - freqs) / max(hi - center, 1e-9)
        weights[i] = np.clip(np.minimum(up, down), 0.0, None)
    return weights


def _sinusoids(length: int, channels: int) -> torch.Tensor:
    half = channels // 2
    scale = torch.exp(-math.log(10000.0) * torch.arange(half) / max(half - 1, 1))
    args = torch.arange(length).unsqueeze(1) * scale.unsqueeze(0)
    return torch.cat([torch.sin(args), torch.cos(args)], dim=1)


class BoundaryASRModel(nn.Module):
    """Log-mel encoder plus autoregressive token decoder."""

    def __init__(self, spec: ModelSpec, vocab_size: int):
        super().__init__()
        self.spec = spec
        self.vocab_size = vocab_size
        self.n_frames = int(round(MAX_CLIP_S * SAMPLE_RATE / spec.hop))
        mel = mel_filterbank(spec.n_mels, spec.n_fft, SAMPLE_RATE)
        self.register_buffer("mel_weights", torch.from_numpy(mel).float())
        self.register_buffer("window", torch.hann_window(spec.n_fft))

        d = spec.d_model
        self.conv1 = nn.Conv1d(spec.n_mels, d, kernel_size=3, stride=2, padding=1)
        self.conv2 = nn.Conv1d(d, d, kernel_size=3, stride=2, padding=1)
        enc_positions = (self.n_frames + 3) // 4
        self.register_buffer("enc_pos", _sinusoids(enc_positions, d))
        self.register_buffer("dec_pos", _sinusoids(spec.max_target_len, d))

        layer = nn.TransformerEncoderLayer(
            d, spec.n_heads, spec.ffn_dim, batch_first=True, dropout=0.0
        )
        self.encoder = nn.TransformerEncoder(layer, spec.enc_layers)
        dec_layer = nn.TransformerDecoderLayer(
            d, spec.n_heads, spec.ffn_dim, batch_first=True, dropout=0.0
        )
        self.decoder = nn.TransformerDecoder(dec_layer, spec.dec_layers)
        self.embed = nn.Embedding(vocab_size, d)
        self.out_proj = nn.Linear(d, vocab_size)

    def log_mel(self, samples: torch.Tensor) -> torch.Tensor:
        """[B, n_samples] float in [-1, 1] -> [B, n_mels, n_frames]."""
        target = self.n_frames * self.spec.hop
        if samples.shape[-1] < target:
            pad = target - samples.shape[-1]
            samples = torch.nn.functional.pad(samples, (0, pad))
        else:
            samples = samples[..., :target]
        stft = torch.stft(
            samples,
            n_fft=self.spec.n_fft,
            hop_length=self.spec.hop,
            window=self.window,
            center=True,
            return_complex=True,
        )
        power = stft.abs() ** 2
        mel = self.mel_weights @ power[..., : self.n_frames]
        log_spec = torch.clamp(mel, min=1e-10).log10()
        log_spec = torch.maximum(
            log_spec, log_spec.amax(dim=(-2, -1), keepdim=True) - 8.0
        )
        return (log_spec + 4.0) / 4.0

    def encode(self, features: torch.Tensor) -> torch.Tensor:
        x = torch.nn.functional.gelu(self.conv1(features))
        x = torch.nn.functional.gelu(self.conv2(x))
        x = x.transpose(1, 2)
        x = x + self.enc_pos[: x.shape[1]]
        return self.encoder(x)

    def decode_step(self, memory: torch.Tensor, tokens: torch.Tensor) -> torch.Tensor:
        """Logits [B, L, V] for teacher-forced input tokens [B, L]."""
        length = tokens.shape[1]
        if length > self.spec.max_target_len:
            raise ValueError(f"target length {length} exceeds {self.spec.max_target_len}")
        x = self.embed(tokens) + self.dec_pos[:length]
        mask = nn.Transformer.generate_square_subsequent_mask(length, device=tokens.device)
        out = self.decoder(x, memory, tgt_mask=mask)
        return self.out_proj(out)

    def forward(self, samples: torch.Tensor, tokens: torch.Tensor) -> torch.Tensor:
        return self.decode_step(self.encode(self.log_mel(samples)), tokens)


def build_model(spec: ModelSpec, vocab_size: int, seed: int = 0) -> BoundaryASRModel:
    torch.manual_seed(seed)
    return BoundaryASRModel(spec, vocab_size)


@torch.no_grad()
def greedy_decode(
    model: BoundaryASRModel,
    samples: torch.Tensor,
    sos_id: int,
    eos_id: int,
    max_len: int = 64,
) -> list[list[int]]:
    """Batched greedy decoding; returns token ids without SOS/EOS."""
    model.eval()
    memory = model.encode(model.log_mel(samples))
    batch = samples.shape[0]
    tokens = torch.full((batch, 1), sos_id, dtype=torch.long, device=samples.device)
    finished = torch.zeros(batch, dtype=torch.bool, device=samples.device)
    for _ in range(min(max_len, model.spec.max_target_len - 1)):
        logits = model.decode_step(memory, tokens)
        next_ids = logits[:, -1].argmax(dim=-1)
        next_ids = torch.where(finished, torch.full_like(next_ids, eos_id), next_ids)
        tokens = torch.cat([tokens, next_ids.unsqueeze(1)], dim=1)
        finished |= next_ids == eos_id
        if bool(finished.all()):
            break
    out = []
    for row in tokens[:, 1:].tolist():
        seq = []
        for tid in row:
            if tid == eos_id:
                break
            seq.append(tid)
        out.append(seq)
    return out
