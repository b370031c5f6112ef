"""Training criteria.

The main objective sums, over the three stage predictions, the smoothed
Frobenius distance sqrt(||pred - target||^2 + eps^2); a variant adds a
lambda-weighted (1 - SSIM) term on the final prediction.  An MSE and a
multi-scale frequency criterion are available for baseline comparisons.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F

from .config import SizeError, TrainConfig, VariantConfig


def _check_shapes(pred: torch.Tensor, target: torch.Tensor) -> None:
    if pred.shape != target.shape:
        raise SizeError(
            f"prediction {tuple(pred.shape)} vs target {tuple(target.shape)}")


def charbonnier(pred: torch.Tensor, target: torch.Tensor,
                eps: float = 1e-3) -> torch.Tensor:
    """sqrt(||pred - target||_F^2 + eps^2) over the whole batch tensor."""
    _check_shapes(pred, target)
    return torch.sqrt(torch.sum((pred - target) ** 2) + eps * eps)


def charbonnier_total(preds, target: torch.Tensor,
                      eps: float = 1e-3) -> torch.Tensor:
    return sum(charbonnier(p, target, eps) for p in preds)


def _gaussian_kernel(size: int = 11, sigma: float = 1.5) -> torch.Tensor:
    x = torch.arange(size, dtype=torch.float64) - (size - 1) / 2
    g = torch.exp(-(x ** 2) / (2 * sigma * sigma))
    k = torch.outer(g, g)
    return (k / k.sum()).to(torch.float32)


def ssim(pred: torch.Tensor, target: torch.Tensor,
         data_range: float = 1.0) -> torch.Tensor:
    """Differentiable mean SSIM with the 11x11 sigma=1.5 Gaussian window,
    computed per channel and averaged."""
    _check_shapes(pred, target)
    c = pred.shape[1]
    kernel = _gaussian_kernel().to(pred.device, pred.dtype)
    kernel = kernel.expand(c, 1, 11, 11)
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2

    def filt(t):
        return F.conv2d(t, kernel, groups=c)

    mu_p = filt(pred)
    mu_t = filt(target)
    var_p = filt(pred * pred) - mu_p ** 2
    var_t = filt(target * target) - mu_t ** 2
    cov = filt(pred * target) - mu_p * mu_t
    num = (2 * mu_p * mu_t + c1) * (2 * cov + c2)
    den = (mu_p ** 2 + mu_t ** 2 + c1) * (var_p + var_t + c2)
    return (num / den).mean()


def ssim_loss(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """1 - SSIM(target, pred); lies in [0, 2]."""
    return 1.0 - ssim(pred, target)


def mse_loss(pred: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    _check_shapes(pred, target)
    return F.mse_loss(pred, target)


def msfr_loss(pred: torch.Tensor, target: torch.Tensor, levels: int = 3,
              lam: float = 0.1) -> torch.Tensor:
    """Multi-scale content + frequency criterion: mean absolute error of
    the pair plus ``lam`` times the mean absolute error of their 2-D FFTs
    (real and imaginary parts), averaged over ``levels`` dyadic scales."""
    _check_shapes(pred, target)
    total = pred.new_zeros(())
    p, t = pred, target
    for lvl in range(levels):
        fp = torch.fft.fft2(p)
        ft = torch.fft.fft2(t)
        freq = (torch.abs(fp.real - ft.real)
                + torch.abs(fp.imag - ft.imag)).mean()
        total = total + F.l1_loss(p, t) + lam * freq
        if lvl < levels - 1:
            p = F.avg_pool2d(p, 2)
            t = F.avg_pool2d(t, 2)
    return total / levels


def loss_total(preds, target: torch.Tensor, vcfg: VariantConfig,
               tcfg: TrainConfig | None = None) -> torch.Tensor:
    """The training objective for a variant: staged Charbonnier (or a
    selected baseline criterion), plus the weighted SSIM term for
    variants that enable it (applied to the final prediction)."""
    tcfg = tcfg or TrainConfig()
    for p in preds:
        _check_shapes(p, target)
    if tcfg.loss_kind == "mse":
        base = sum(mse_loss(p, target) for p in preds)
    elif tcfg.loss_kind == "msfr":
        base = sum(msfr_loss(p, target) for p in preds)
    else:
        base = charbonnier_total(preds, target, tcfg.charbonnier_eps)
    if vcfg.use_ssim_loss:
        base = base + tcfg.lambda_s * ssim_loss(preds[-1], target)
    return base
