"""Raster file I/O: 8-bit RGB in, lossless PNG frames and APNG animations out."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .validation import ConfigurationError, check_image


class ImageIOError(OSError):
    pass


def load_image(path) -> np.ndarray:
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("RGBA", "LA", "PA", "RGBa", "La") or "transparency" in im.info:
                raise ConfigurationError(f"{path}: images with an alpha channel are not supported")
            if mode == "P" or mode == "1":
                im = im.convert("RGB")
            elif mode not in ("RGB", "L"):
                raise ConfigurationError(f"{path}: unsupported image mode {mode!r}; need 8-bit RGB or grayscale")
            arr = np.asarray(im)
    except (FileNotFoundError, IsADirectoryError, PermissionError, UnidentifiedImageError) as exc:
        raise ImageIOError(f"cannot read image {path}: {exc}") from exc
    return check_image(arr, str(path))


def save_png(image: np.ndarray, path) -> None:
    Image.fromarray(np.ascontiguousarray(image, dtype=np.uint8)).save(path, format="PNG")


def save_animation(frames, path, duration_ms: int = 500) -> None:
    """Write ``frames`` as an animated PNG (lossless)."""
    frames = [Image.fromarray(np.ascontiguousarray(f, dtype=np.uint8)) for f in frames]
    if not frames:
        raise ValueError("no frames to animate")
    frames[0].save(
        path,
        format="PNG",
        save_all=True,
        append_images=frames[1:],
        duration=duration_ms,
        loop=0,
    )


def milestone_filename(fraction: float, generation: int) -> str:
    return f"milestone_{fraction * 100:g}_gen{generation}.png"


def frame_filename(generation: int) -> str:
    return f"frame_{generation:08d}.png"
