"""Model / training configuration and shared error types."""

from __future__ import annotations

from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Invalid model configuration (e.g. channels not divisible by heads)."""


class SizeError(ValueError):
    """Tensor shape violates an operation's contract."""


class DataError(RuntimeError):
    """Dataset on disk is malformed or incomplete."""


@dataclass(frozen=True)
class VariantConfig:
    """Structural knobs of the denoiser.

    The four shipped presets (``VARIANTS``) differ only in where the
    windowed-transformer layers sit (encoder / decoder), the attention
    window size, the transformer depth, and whether the structural
    similarity term joins the loss.  Width knobs (``embed_dim`` and
    friends) default to the full-size network; the test-suite uses
    slimmer values for CPU-sized runs.
    """

    sbl_in_encoder: bool = True
    sbl_in_decoder: bool = True
    use_ssim_loss: bool = False
    window_size: int = 7
    sbl_depth: int = 2
    embed_dim: int = 48
    num_heads: int = 8
    num_cab_per_orb: int = 8
    num_orb: int = 3
    mlp_ratio: float = 2.0
    cal_reduction: int = 4

    def __post_init__(self):
        if self.window_size not in (7, 11):
            raise ConfigError("window_size must be 7 or 11")
        if self.embed_dim % self.num_heads:
            raise ConfigError("embed_dim must be divisible by num_heads")
        if self.sbl_depth < 0:
            raise ConfigError("sbl_depth must be >= 0")
        if min(self.embed_dim, self.num_heads, self.num_cab_per_orb,
               self.num_orb) < 1:
            raise ConfigError("width knobs must be positive")

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.num_heads

    @property
    def pad_multiple(self) -> int:
        # quarters pass through two 2x downsamplings, and the window must
        # tile every level of a quarter: input sides must be multiples of
        # 8 * window_size (a superset of the 4 * window_size minimum that
        # holds only when the padded half also stays even at every level)
        return 8 * self.window_size


VARIANTS: dict[str, VariantConfig] = {
    "v1": VariantConfig(sbl_in_encoder=True, sbl_in_decoder=False,
                        use_ssim_loss=False, window_size=7, sbl_depth=2),
    "v2": VariantConfig(sbl_in_encoder=True, sbl_in_decoder=True,
                        use_ssim_loss=False, window_size=7, sbl_depth=2),
    "v3": VariantConfig(sbl_in_encoder=True, sbl_in_decoder=True,
                        use_ssim_loss=True, window_size=7, sbl_depth=2),
    "v4": VariantConfig(sbl_in_encoder=True, sbl_in_decoder=True,
                        use_ssim_loss=False, window_size=11, sbl_depth=4),
}


@dataclass
class TrainConfig:
    """Optimization hyper-parameters and dataset selection."""

    lr: float = 1e-3
    min_lr_frac: float = 0.05
    warmup_steps: int = 0
    grad_clip: float | None = None
    batch_size: int = 4
    steps: int = 500
    crop: int | None = 56
    seed: int = 0
    lambda_s: float = 1e-3
    charbonnier_eps: float = 1e-3
    snr_max: float | None = None
    val_fraction: float = 0.2
    log_every: int = 50
    loss_kind: str = "charbonnier"  # or "mse" / "msfr" baseline criteria
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lambda_s < 0:
            raise ConfigError("lambda_s must be >= 0")
        if self.charbonnier_eps <= 0:
            raise ConfigError("charbonnier_eps must be > 0")
        if self.loss_kind not in ("charbonnier", "mse", "msfr"):
            raise ConfigError("loss_kind must be charbonnier|mse|msfr")
        if self.warmup_steps < 0:
            raise ConfigError("warmup_steps must be >= 0")
        if self.grad_clip is not None and self.grad_clip <= 0:
            raise ConfigError("grad_clip must be > 0 when set")
