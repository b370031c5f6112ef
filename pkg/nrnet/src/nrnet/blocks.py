"""Building blocks: windowed attention, transformer layers, patch
resampling, channel attention, and the supervised attention module.

Feature tensors are (B, C, H, W) float32 throughout; token tensors inside
the attention path are (windows, tokens, C).
"""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

from .config import ConfigError, SizeError


def window_partition(x: torch.Tensor, window: int) -> torch.Tensor:
    """(B, C, H, W) -> (B * nWin, window*window, C) token stacks."""
    b, c, h, w = x.shape
    if h % window or w % window:
        raise SizeError(f"{h}x{w} not tileable by window {window}")
    x = x.view(b, c, h // window, window, w // window, window)
    x = x.permute(0, 2, 4, 3, 5, 1)  # b, nh, nw, wh, ww, c
    return x.reshape(-1, window * window, c)


def window_merge(tokens: torch.Tensor, window: int, h: int, w: int,
                 ) -> torch.Tensor:
    """Inverse of :func:`window_partition`."""
    c = tokens.shape[-1]
    b = tokens.shape[0] // ((h // window) * (w // window))
    x = tokens.view(b, h // window, w // window, window, window, c)
    x = x.permute(0, 5, 1, 3, 2, 4)  # b, c, nh, wh, nw, ww
    return x.reshape(b, c, h, w)


class WindowAttention(nn.Module):
    """Multi-head self-attention over one window of tokens.

    A single linear map produces Q, K and V (laid out as three C-sized
    groups, each split head-major); heads attend independently with
    softmax(Q Kᵀ / sqrt(head_dim)) V, are concatenated back, and pass
    through the output linear map.
    """

    def __init__(self, dim: int, num_heads: int, bias: bool = True):
        super().__init__()
        if dim % num_heads:
            raise ConfigError(f"dim {dim} not divisible by heads {num_heads}")
        self.dim = dim
        self.num_heads = num_heads
        self.head_dim = dim // num_heads
        self.qkv = nn.Linear(dim, 3 * dim, bias=bias)
        self.proj = nn.Linear(dim, dim, bias=bias)

    def forward(self, tokens: torch.Tensor) -> torch.Tensor:
        b, n, c = tokens.shape
        qkv = self.qkv(tokens).reshape(b, n, 3, self.num_heads, self.head_dim)
        q, k, v = qkv.permute(2, 0, 3, 1, 4)  # each (b, heads, n, head_dim)
        attn = torch.softmax(
            q @ k.transpose(-2, -1) / self.head_dim ** 0.5, dim=-1)
        y = attn @ v  # (b, heads, n, head_dim)
        y = y.transpose(1, 2).reshape(b, n, c)
        return self.proj(y)

    def attention_weights(self, tokens: torch.Tensor) -> torch.Tensor:
        """The softmax weights, exposed for verification."""
        b, n, _ = tokens.shape
        qkv = self.qkv(tokens).reshape(b, n, 3, self.num_heads, self.head_dim)
        q, k, _ = qkv.permute(2, 0, 3, 1, 4)
        return torch.softmax(
            q @ k.transpose(-2, -1) / self.head_dim ** 0.5, dim=-1)


class Mlp(nn.Module):
    def __init__(self, dim: int, ratio: float, bias: bool = True):
        super().__init__()
        hidden = max(1, int(dim * ratio))
        self.fc1 = nn.Linear(dim, hidden, bias=bias)
        self.fc2 = nn.Linear(hidden, dim, bias=bias)

    def forward(self, x):
        return self.fc2(F.gelu(self.fc1(x)))


class SwinBlock(nn.Module):
    """One transformer block: window partition -> attention -> merge,
    post-attention layer norm on the branch, then an MLP branch; both
    branches are residual.  With every weight zeroed the block is an
    exact identity."""

    def __init__(self, dim: int, num_heads: int, window: int,
                 mlp_ratio: float, bias: bool = True):
        super().__init__()
        self.window = window
        self.attn = WindowAttention(dim, num_heads, bias=bias)
        self.norm1 = nn.LayerNorm(dim)
        self.mlp = Mlp(dim, mlp_ratio, bias=bias)
        self.norm2 = nn.LayerNorm(dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b, c, h, w = x.shape
        tokens = window_partition(x, self.window)
        attn = window_merge(self.norm1(self.attn(tokens)), self.window, h, w)
        x = x + attn
        tokens = x.permute(0, 2, 3, 1).reshape(b, h * w, c)
        mlp = self.norm2(self.mlp(tokens))
        return x + mlp.reshape(b, h, w, c).permute(0, 3, 1, 2)


class SBL(nn.Module):
    """A stack of ``depth`` SwinBlocks (depth 0 is the identity)."""

    def __init__(self, dim: int, num_heads: int, window: int, depth: int,
                 mlp_ratio: float = 2.0, bias: bool = True):
        super().__init__()
        self.blocks = nn.ModuleList(
            SwinBlock(dim, num_heads, window, mlp_ratio, bias=bias)
            for _ in range(depth))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        for blk in self.blocks:
            x = blk(x)
        return x


class PatchMerge(nn.Module):
    """Halve the spatial grid: each 2x2 neighbourhood (top-left, top-right,
    bottom-left, bottom-right order) is concatenated into one vector and
    linearly mapped to ``dim_out`` channels."""

    def __init__(self, dim_in: int, dim_out: int):
        super().__init__()
        self.reduce = nn.Conv2d(4 * dim_in, dim_out, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        _, _, h, w = x.shape
        if h % 2 or w % 2:
            raise SizeError(f"patch merge needs even dims, got {h}x{w}")
        quad = torch.cat([x[:, :, 0::2, 0::2], x[:, :, 0::2, 1::2],
                          x[:, :, 1::2, 0::2], x[:, :, 1::2, 1::2]], dim=1)
        return self.reduce(quad)


class PatchUpsample(nn.Module):
    """Double the spatial grid: a per-pixel linear map emits the four
    pixels of the corresponding 2x2 output block."""

    def __init__(self, dim_in: int, dim_out: int):
        super().__init__()
        self.expand = nn.Conv2d(dim_in, 4 * dim_out, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return F.pixel_shuffle(self.expand(x), 2)


class CAL(nn.Module):
    """Channel attention: global average pool to one scalar per channel,
    a squeeze-excite bottleneck, sigmoid gate, broadcast-multiplied with
    the input."""

    def __init__(self, dim: int, reduction: int = 4):
        super().__init__()
        hidden = max(1, dim // reduction)
        self.squeeze = nn.Conv2d(dim, hidden, 1)
        self.excite = nn.Conv2d(hidden, dim, 1)

    def gate(self, x: torch.Tensor) -> torch.Tensor:
        w = x.mean(dim=(2, 3), keepdim=True)
        return torch.sigmoid(self.excite(F.relu(self.squeeze(w))))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x * self.gate(x)


class CAB(nn.Module):
    """Residual conv block gated by channel attention."""

    def __init__(self, dim: int, reduction: int = 4):
        super().__init__()
        self.conv1 = nn.Conv2d(dim, dim, 3, padding=1)
        self.conv2 = nn.Conv2d(dim, dim, 3, padding=1)
        self.cal = CAL(dim, reduction)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.cal(self.conv2(F.gelu(self.conv1(x))))


class ORB(nn.Module):
    """Residual group of CABs closed by a 3x3 conv."""

    def __init__(self, dim: int, num_cab: int, reduction: int = 4):
        super().__init__()
        self.body = nn.Sequential(
            *[CAB(dim, reduction) for _ in range(num_cab)],
            nn.Conv2d(dim, dim, 3, padding=1))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.body(x)


class SAM(nn.Module):
    """Supervised attention: predict the stage image as a residual on the
    noisy input, derive a sigmoid attention map from it, and gate the
    features that continue to the next stage."""

    def __init__(self, dim: int):
        super().__init__()
        self.to_image = nn.Conv2d(dim, 3, 3, padding=1)
        self.to_attn = nn.Conv2d(3, dim, 3, padding=1)
        self.to_feat = nn.Conv2d(dim, dim, 3, padding=1)

    def forward(self, feat: torch.Tensor, image: torch.Tensor):
        if feat.shape[-2:] != image.shape[-2:]:
            raise SizeError(
                f"features {tuple(feat.shape[-2:])} misaligned with image "
                f"{tuple(image.shape[-2:])}")
        pred = self.to_image(feat) + image
        attn = torch.sigmoid(self.to_attn(pred))
        s = feat + attn * self.to_feat(feat)
        return pred, s


class LevelBlock(nn.Module):
    """One encoder/decoder level: a channel-attention conv block,
    optionally followed by a windowed-transformer stack."""

    def __init__(self, dim: int, num_heads: int, window: int, depth: int,
                 use_sbl: bool, mlp_ratio: float, reduction: int):
        super().__init__()
        self.cab = CAB(dim, reduction)
        self.sbl = SBL(dim, num_heads, window, depth,
                       mlp_ratio) if use_sbl else None

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.cab(x)
        if self.sbl is not None:
            x = self.sbl(x)
        return x
