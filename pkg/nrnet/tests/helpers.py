"""Shared oracles and runners for the denoiser tests."""

from __future__ import annotations

import numpy as np
import torch

from nrnet.config import TrainConfig
from nrnet.losses import loss_total
from nrnet.net import NRNet


def softmax_rows(m: np.ndarray) -> np.ndarray:
    e = np.exp(m - m.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def wmsa_naive(tokens: np.ndarray, attn_module) -> np.ndarray:
    """Literal per-head attention on one window: a shared linear map makes
    Q,K,V; each head applies softmax(Q Kᵀ / sqrt(head_dim)) V; heads are
    concatenated token-major and linearly projected."""
    w1 = attn_module.qkv.weight.detach().numpy().astype(np.float64)
    b1 = (attn_module.qkv.bias.detach().numpy().astype(np.float64)
          if attn_module.qkv.bias is not None else 0.0)
    w2 = attn_module.proj.weight.detach().numpy().astype(np.float64)
    b2 = (attn_module.proj.bias.detach().numpy().astype(np.float64)
          if attn_module.proj.bias is not None else 0.0)
    heads = attn_module.num_heads
    n, c = tokens.shape
    hd = c // heads

    qkv = tokens @ w1.T + b1
    q, k, v = qkv[:, :c], qkv[:, c:2 * c], qkv[:, 2 * c:]
    outs = []
    for h in range(heads):
        sl = slice(h * hd, (h + 1) * hd)
        a = softmax_rows(q[:, sl] @ k[:, sl].T / np.sqrt(hd))
        outs.append(a @ v[:, sl])
    y = np.concatenate(outs, axis=1)
    return y @ w2.T + b2


class SinglePairDataset(torch.utils.data.Dataset):
    """One fixed (noisy, clean) pair held in memory."""

    def __init__(self, noisy: torch.Tensor, clean: torch.Tensor):
        self.noisy = noisy
        self.clean = clean

    def set_epoch(self, epoch: int) -> None:
        pass

    def __len__(self) -> int:
        return 1

    def __getitem__(self, idx: int):
        return self.noisy, self.clean


def make_pair(size: int = 56, seed: int = 11, sigma: float = 0.08):
    """A structured clean image in [0,1] plus its Gaussian-noised twin."""
    g = torch.Generator().manual_seed(seed)
    yy, xx = torch.meshgrid(torch.linspace(0, 1, size),
                            torch.linspace(0, 1, size), indexing="ij")
    clean = torch.stack([
        0.5 + 0.4 * torch.sin(6.0 * xx) * torch.cos(4.0 * yy),
        0.3 + 0.5 * xx * yy,
        0.6 - 0.4 * (xx - 0.5).abs(),
    ])
    clean[:, 12:30, 8:26] = torch.tensor([0.9, 0.2, 0.1]).view(3, 1, 1)
    clean = clean.clamp(0, 1)
    noisy = (clean + sigma * torch.randn(clean.shape, generator=g)).clamp(0, 1)
    return noisy, clean


def check_gradient_coverage(cfg, size: int = 112, seed: int = 5):
    """Forward + loss + backward; return parameter names whose gradient is
    missing or identically zero."""
    torch.manual_seed(seed)
    model = NRNet(cfg)
    noisy = torch.rand(1, 3, size, size)
    clean = torch.rand(1, 3, size, size)
    preds = model(noisy)
    loss = loss_total(preds, clean, cfg, TrainConfig())
    loss.backward()
    dead = []
    for name, p in model.named_parameters():
        if p.grad is None or float(p.grad.abs().max()) == 0.0:
            dead.append(name)
    return model, dead
