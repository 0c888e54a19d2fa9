"""Input validation helpers shared by the library, the estimator and the CLI."""
from __future__ import annotations

import numbers

import numpy as np


class ConfigurationError(ValueError):
    """Bad user-supplied images or parameters."""


def check_image(image, name: str = "image") -> np.ndarray:
    """Coerce ``image`` to a C-contiguous ``(m, n, 3)`` uint8 array.

    Grayscale ``(m, n)`` or ``(m, n, 1)`` input is promoted to RGB.  Alpha
    channels are rejected.
    """
    arr = np.asarray(image)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[..., 0]
    if arr.ndim == 2:
        arr = np.repeat(arr[..., None], 3, axis=2)
    if arr.ndim != 3:
        raise ConfigurationError(f"{name} must be an (m, n, 3) RGB raster, got shape {arr.shape}")
    if arr.shape[2] == 4:
        raise ConfigurationError(f"{name} has an alpha channel; only 8-bit RGB is supported")
    if arr.shape[2] != 3:
        raise ConfigurationError(f"{name} must have 3 channels, got {arr.shape[2]}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ConfigurationError(f"{name} has zero area ({arr.shape[0]}x{arr.shape[1]})")
    if arr.dtype != np.uint8:
        if arr.dtype.kind not in "iu":
            raise ConfigurationError(f"{name} must hold integer channel values, got {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ConfigurationError(f"{name} channel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return np.ascontiguousarray(arr)


def check_same_shape(start: np.ndarray, target: np.ndarray) -> None:
    if start.shape != target.shape:
        raise ConfigurationError(
            f"start image is {start.shape[0]}x{start.shape[1]} but target image is "
            f"{target.shape[0]}x{target.shape[1]}"
        )


def check_image_pair(start, target) -> tuple[np.ndarray, np.ndarray]:
    start = check_image(start, "start")
    target = check_image(target, "target")
    check_same_shape(start, target)
    return start, target


def check_int(value, name: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_random_state(seed) -> np.random.Generator:
    """Turn ``None``, an int or a Generator into a Generator.

    Objects that are not ints but expose ``integers`` are passed through
    unchanged, which lets tests drive the operators with scripted draws.
    """
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    if isinstance(seed, np.random.Generator) or hasattr(seed, "integers"):
        return seed
    raise ConfigurationError(f"cannot use {seed!r} as a random state")
