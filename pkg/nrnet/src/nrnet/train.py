"""Training and inference harness."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict
from pathlib import Path

import torch

from .config import TrainConfig, VariantConfig
from .data import PairDataset, load_tensor, save_tensor, scan_dataset
from .losses import loss_total
from .net import NRNet

CHECKPOINT_FORMAT = 1


def _lr_at(step: int, total: int, cfg: TrainConfig) -> float:
    """Linear warmup, then cosine decay to cfg.lr * cfg.min_lr_frac."""
    if cfg.warmup_steps and step < cfg.warmup_steps:
        return cfg.lr * (step + 1) / cfg.warmup_steps
    lo = cfg.lr * cfg.min_lr_frac
    span = max(1, total - 1 - cfg.warmup_steps)
    t = min((step - cfg.warmup_steps) / span, 1.0)
    return lo + 0.5 * (cfg.lr - lo) * (1 + math.cos(math.pi * t))


def psnr_tensor(a: torch.Tensor, b: torch.Tensor,
                data_range: float = 1.0) -> float:
    mse = torch.mean((a - b) ** 2).item()
    if mse == 0:
        return 100.0
    return min(100.0, 10 * math.log10(data_range ** 2 / mse))


def save_checkpoint(path: str | Path, model: NRNet, vcfg: VariantConfig,
                    tcfg: TrainConfig, log: list[dict],
                    variant_name: str = "custom") -> None:
    torch.save({
        "format": CHECKPOINT_FORMAT,
        "variant_name": variant_name,
        "variant": asdict(vcfg),
        "train": {k: v for k, v in asdict(tcfg).items() if k != "extra"},
        "state_dict": model.state_dict(),
        "log": log,
    }, path)


def load_checkpoint(path: str | Path) -> tuple[NRNet, dict]:
    blob = torch.load(path, map_location="cpu", weights_only=False)
    if blob.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"unsupported checkpoint format in {path}")
    vcfg = VariantConfig(**blob["variant"])
    model = NRNet(vcfg)
    model.load_state_dict(blob["state_dict"])
    model.eval()
    return model, blob


def train_steps(model: NRNet, dataset: PairDataset, tcfg: TrainConfig,
                log: list[dict] | None = None) -> list[dict]:
    """Step-based optimization loop (single process, deterministic)."""
    torch.manual_seed(tcfg.seed)
    torch.set_num_threads(max(1, torch.get_num_threads()))
    model.train()
    opt = torch.optim.Adam(model.parameters(), lr=tcfg.lr)
    loader_gen = torch.Generator().manual_seed(tcfg.seed)
    log = [] if log is None else log

    step = 0
    t0 = time.monotonic()
    while step < tcfg.steps:
        dataset.set_epoch(step)
        order = torch.randperm(len(dataset), generator=loader_gen)
        for start in range(0, len(order), tcfg.batch_size):
            if step >= tcfg.steps:
                break
            idxs = order[start : start + tcfg.batch_size].tolist()
            pairs = [dataset[i] for i in idxs]
            noisy = torch.stack([p[0] for p in pairs])
            clean = torch.stack([p[1] for p in pairs])
            lr = _lr_at(step, tcfg.steps, tcfg)
            for group in opt.param_groups:
                group["lr"] = lr
            opt.zero_grad(set_to_none=True)
            preds = model(noisy)
            loss = loss_total(preds, clean, model.cfg, tcfg)
            loss.backward()
            if tcfg.grad_clip is not None:
                torch.nn.utils.clip_grad_norm_(model.parameters(),
                                               tcfg.grad_clip)
            opt.step()
            if step % tcfg.log_every == 0 or step == tcfg.steps - 1:
                log.append({"step": step, "loss": float(loss.item()),
                            "lr": lr,
                            "seconds": round(time.monotonic() - t0, 2)})
            step += 1
    model.eval()
    return log


def evaluate_dir(model: NRNet, records, limit: int | None = None) -> dict:
    """Mean PSNR of the model output and of the raw noisy input."""
    model.eval()
    noisy_psnr, out_psnr = [], []
    with torch.no_grad():
        for rec in records[:limit]:
            noisy = load_tensor(rec.noisy)[None]
            clean = load_tensor(rec.clean)[None]
            pred = model(noisy)[-1].clamp(0, 1)
            noisy_psnr.append(psnr_tensor(noisy, clean))
            out_psnr.append(psnr_tensor(pred, clean))
    return {"noisy_psnr": sum(noisy_psnr) / len(noisy_psnr),
            "model_psnr": sum(out_psnr) / len(out_psnr),
            "count": len(out_psnr)}


def train_on_dataset(data_root: str | Path, vcfg: VariantConfig,
                     tcfg: TrainConfig, out_dir: str | Path,
                     variant_name: str = "custom") -> dict:
    """Full harness: scan, split train/val by stem, optimize, checkpoint,
    and write a JSON log."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = scan_dataset(data_root, snr_max=tcfg.snr_max)

    stems = sorted({r.stem for r in records})
    n_val = max(1, int(len(stems) * tcfg.val_fraction)) if len(stems) > 1 else 0
    val_stems = set(stems[len(stems) - n_val:])
    train_recs = [r for r in records if r.stem not in val_stems]
    val_recs = [r for r in records if r.stem in val_stems]
    if not train_recs:
        train_recs, val_recs = val_recs, []

    model = NRNet(vcfg)
    dataset = PairDataset(train_recs, crop=tcfg.crop, seed=tcfg.seed)
    log = train_steps(model, dataset, tcfg)

    summary = {"train_pairs": len(train_recs), "val_pairs": len(val_recs),
               "final_loss": log[-1]["loss"] if log else None}
    if val_recs:
        summary.update(evaluate_dir(model, val_recs))

    ckpt = out_dir / "checkpoint.pt"
    save_checkpoint(ckpt, model, vcfg, tcfg, log, variant_name)
    (out_dir / "train_log.json").write_text(
        json.dumps({"log": log, "summary": summary}, indent=2))
    summary["checkpoint"] = str(ckpt)
    return summary


def infer_dir(model: NRNet, in_dir: str | Path, out_dir: str | Path) -> int:
    """Denoise every PNG in ``in_dir`` into ``out_dir`` (same stems)."""
    in_dir, out_dir = Path(in_dir), Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = 0
    with torch.no_grad():
        for p in sorted(in_dir.glob("*.png")):
            pred = model(load_tensor(p)[None])[-1][0].clamp(0, 1)
            save_tensor(pred, out_dir / p.name)
            n += 1
    return n
