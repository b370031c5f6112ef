"""The three-stage denoiser.

Stage 1 encodes the four image quarters with a weight-shared U-shaped
encoder, decodes per half after concatenating left/right features along
the width, and emits a first prediction plus carry-over features through
a supervised attention module.  Stage 2 repeats this on the two image
halves with the stage-1 features injected and fused at every encoder
level; the fused maps travel onward as full/half/quarter-resolution
context.  Stage 3 runs the full image through residual channel-attention
groups fed by that context and predicts the final residual.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

from .blocks import (
    CAB,
    LevelBlock,
    ORB,
    PatchMerge,
    PatchUpsample,
    SAM,
    SBL,
)
from .config import SizeError, VariantConfig


def pad_to_multiple(x: torch.Tensor, multiple: int) -> torch.Tensor:
    """Reflect-pad the bottom/right so both sides divide ``multiple``."""
    h, w = x.shape[-2:]
    ph = (-h) % multiple
    pw = (-w) % multiple
    if ph == 0 and pw == 0:
        return x
    if ph >= h or pw >= w:  # reflect padding cannot exceed the input size
        reps_h = -(-(h + ph) // h)
        reps_w = -(-(w + pw) // w)
        x = x.repeat(1, 1, reps_h, reps_w)[..., : h + ph, : w + pw]
        return x
    return F.pad(x, (0, pw, 0, ph), mode="reflect")


class _HalfUNet(nn.Module):
    """Weight container for one stage's encoder/decoder levels."""

    def __init__(self, cfg: VariantConfig):
        super().__init__()
        c = cfg.embed_dim
        mk = dict(num_heads=cfg.num_heads, window=cfg.window_size,
                  depth=cfg.sbl_depth, mlp_ratio=cfg.mlp_ratio,
                  reduction=cfg.cal_reduction)
        self.shallow = nn.Conv2d(3, c, 3, padding=1)
        self.enc = nn.ModuleList([
            LevelBlock(c, use_sbl=cfg.sbl_in_encoder, **mk),
            LevelBlock(2 * c, use_sbl=cfg.sbl_in_encoder, **mk),
            LevelBlock(4 * c, use_sbl=cfg.sbl_in_encoder, **mk),
        ])
        self.merge = nn.ModuleList([PatchMerge(c, 2 * c),
                                    PatchMerge(2 * c, 4 * c)])
        self.dec = nn.ModuleList([
            LevelBlock(4 * c, use_sbl=cfg.sbl_in_decoder, **mk),
            LevelBlock(2 * c, use_sbl=cfg.sbl_in_decoder, **mk),
            LevelBlock(c, use_sbl=cfg.sbl_in_decoder, **mk),
        ])
        self.up = nn.ModuleList([PatchUpsample(4 * c, 2 * c),
                                 PatchUpsample(2 * c, c)])
        self.sam = SAM(c)


class NRNet(nn.Module):
    def __init__(self, cfg: VariantConfig):
        super().__init__()
        self.cfg = cfg
        c = cfg.embed_dim

        self.stage1 = _HalfUNet(cfg)
        self.stage2 = _HalfUNet(cfg)
        self.s1_inject = nn.Conv2d(c, c, 1)
        # cross-stage fusion: bias-free transformer stacks so that zero
        # stage-1 features contribute exactly zero to the fused maps
        self.csff = nn.ModuleList([
            SBL(c, cfg.num_heads, cfg.window_size, cfg.sbl_depth,
                cfg.mlp_ratio, bias=False),
            SBL(2 * c, cfg.num_heads, cfg.window_size, cfg.sbl_depth,
                cfg.mlp_ratio, bias=False),
            SBL(4 * c, cfg.num_heads, cfg.window_size, cfg.sbl_depth,
                cfg.mlp_ratio, bias=False),
        ])

        self.s2_inject = nn.Conv2d(c, c, 1)
        self.shallow3 = nn.Conv2d(3, c, 3, padding=1)
        self.orbs = nn.ModuleList(
            ORB(c, cfg.num_cab_per_orb, cfg.cal_reduction)
            for _ in range(cfg.num_orb))
        self.e1_proj = nn.Conv2d(c, c, 1)
        self.e2_up = PatchUpsample(2 * c, c)
        self.e3_up = nn.Sequential(PatchUpsample(4 * c, 2 * c),
                                   PatchUpsample(2 * c, c))
        self.to_residual = nn.Conv2d(c, 3, 3, padding=1)

    # -- pieces -----------------------------------------------------------

    def _encode(self, unet: _HalfUNet, x: torch.Tensor) -> list[torch.Tensor]:
        feats = []
        f = unet.enc[0](x)
        feats.append(f)
        f = unet.enc[1](unet.merge[0](f))
        feats.append(f)
        f = unet.enc[2](unet.merge[1](f))
        feats.append(f)
        return feats  # [full, 1/2, 1/4] of the piece

    def _decode(self, unet: _HalfUNet, feats: list[torch.Tensor],
                ) -> list[torch.Tensor]:
        d3 = unet.dec[0](feats[2])
        d2 = unet.dec[1](unet.up[0](d3) + feats[1])
        d1 = unet.dec[2](unet.up[1](d2) + feats[0])
        return [d1, d2, d3]  # index by scale like the encoder list

    def csff_forward(self, s1_enc: list[torch.Tensor],
                     s1_dec: list[torch.Tensor],
                     s2_enc: list[torch.Tensor],
                     start_level: int = 0) -> list[torch.Tensor]:
        """Fuse stage-1 encoder+decoder features into the stage-2 encoder
        features at every scale (stage-1 features pass through the
        bias-free transformer stack, then sum elementwise).
        ``start_level`` selects which fusion stack handles the first list
        entry, so callers may fuse one level at a time."""
        out = []
        for lvl, (e, d, s2) in enumerate(zip(s1_enc, s1_dec, s2_enc),
                                         start=start_level):
            if e.shape != d.shape or e.shape != s2.shape:
                raise SizeError(
                    f"scale mismatch at level {lvl}: {tuple(e.shape)} / "
                    f"{tuple(d.shape)} / {tuple(s2.shape)}")
            out.append(self.csff[lvl](e + d) + s2)
        return out

    # -- forward ----------------------------------------------------------

    def forward(self, image: torch.Tensor):
        if image.ndim != 4 or image.shape[1] != 3:
            raise SizeError("expected (B, 3, H, W) input")
        h0, w0 = image.shape[-2:]
        x = pad_to_multiple(image, self.cfg.pad_multiple)
        h, w = x.shape[-2:]
        top, bottom = x[:, :, : h // 2], x[:, :, h // 2:]
        halves = [top, bottom]

        # ---- stage 1: weight-shared encoder over the four quarters
        s1_enc_h, s1_dec_h, s1_pred_h, s1_feat_h = [], [], [], []
        for half in halves:
            left, right = half[..., : w // 2], half[..., w // 2:]
            enc_l = self._encode(self.stage1, self.stage1.shallow(left))
            enc_r = self._encode(self.stage1, self.stage1.shallow(right))
            enc = [torch.cat([a, b], dim=3) for a, b in zip(enc_l, enc_r)]
            dec = self._decode(self.stage1, enc)
            pred, s = self.stage1.sam(dec[0], half)
            s1_enc_h.append(enc)
            s1_dec_h.append(dec)
            s1_pred_h.append(pred)
            s1_feat_h.append(s)
        i1 = torch.cat(s1_pred_h, dim=2)

        # ---- stage 2: halves with stage-1 features injected and fused
        fused_h, s2_pred_h, s2_feat_h = [], [], []
        for half, enc1, dec1, s1 in zip(halves, s1_enc_h, s1_dec_h,
                                        s1_feat_h):
            f = self.stage2.shallow(half) + self.s1_inject(s1)
            e1 = self.stage2.enc[0](f)
            f1 = self.csff_forward([enc1[0]], [dec1[0]], [e1])[0]
            e2 = self.stage2.enc[1](self.stage2.merge[0](f1))
            f2 = self.csff_forward([enc1[1]], [dec1[1]], [e2],
                                   start_level=1)[0]
            e3 = self.stage2.enc[2](self.stage2.merge[1](f2))
            f3 = self.csff_forward([enc1[2]], [dec1[2]], [e3],
                                   start_level=2)[0]
            dec = self._decode(self.stage2, [f1, f2, f3])
            pred, s = self.stage2.sam(dec[0], half)
            fused_h.append([f1, f2, f3])
            s2_pred_h.append(pred)
            s2_feat_h.append(s)
        i2 = torch.cat(s2_pred_h, dim=2)
        s2 = torch.cat(s2_feat_h, dim=2)
        context = [torch.cat([fused_h[0][l], fused_h[1][l]], dim=2)
                   for l in range(3)]  # full, 1/2, 1/4 resolution

        # ---- stage 3: full-resolution residual groups with context
        y = self.shallow3(x) + self.s2_inject(s2)
        inject = [self.e1_proj(context[0]), self.e2_up(context[1]),
                  self.e3_up(context[2])]
        n = len(self.orbs)
        for k, orb in enumerate(self.orbs):
            add = inject[k] if k < min(n, 3) else None
            if k == n - 1:
                for extra in inject[n:3]:
                    add = extra if add is None else add + extra
            y = orb(y if add is None else y + add)
        i3 = x + self.to_residual(y)

        return (i1[..., :h0, :w0], i2[..., :h0, :w0], i3[..., :h0, :w0])

    @property
    def csff_levels(self) -> int:
        return len(self.csff)


def parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())
