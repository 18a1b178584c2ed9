"""Independent oracles used to derive expected values.

None of these import the package's arithmetic; they are written from the
behavioural definitions with a different structure so that a shared bug is
unlikely.
"""

from __future__ import annotations

import numpy as np

SPLITMIX_SEED0_FIRST = 0xE220A8397B1DCDAF  # published first output for seed 0


def splitmix64_stream(seed: int, n: int) -> list[int]:
    """Vectorised splitmix64 in wrapping uint64 arithmetic."""
    with np.errstate(over="ignore"):
        k = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(seed & (2**64 - 1)) + k * np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return [int(v) for v in z]


def random_pixels(seed: int, count: int) -> bytes:
    return bytes(v & 0xFF for v in splitmix64_stream(seed, count))


STAGES = ("BL", "GAIN", "GAMMA", "CONV")


def pipeline_stages(cfg, pixels: bytes, fault=None) -> dict[str, list[list[int]]]:
    """Row-lists after each stage (disabled stages pass through), optionally with a fault XOR.

    ``fault`` is ``(stage, mask, pixel_index or None)``.
    """
    w, h = cfg.width, cfg.height
    img = [[pixels[y * w + x] for x in range(w)] for y in range(h)]

    def inject(stage, rows):
        if fault is None or fault[0] != stage:
            return rows
        _, mask, index = fault
        out = [list(r) for r in rows]
        for y in range(h):
            for x in range(w):
                if index is None or index == y * w + x:
                    out[y][x] ^= mask
        return out

    stages = {}
    if cfg.bl_en:
        img = inject("BL", [[p - cfg.black_level if p >= cfg.black_level else 0 for p in r] for r in img])
    stages["BL"] = img
    if cfg.gain_en:
        img = inject("GAIN", [[min(255, (p * cfg.gain) // 256) for p in r] for r in img])
    stages["GAIN"] = img
    if cfg.gamma_en:
        img = inject("GAMMA", [[cfg.lut[p] for p in r] for r in img])
    stages["GAMMA"] = img
    if cfg.conv_en:
        k = [cfg.kernel[0:3], cfg.kernel[3:6], cfg.kernel[6:9]]
        src = img
        conv = []
        for y in range(h):
            row = []
            for x in range(w):
                total = 0
                for j in range(3):
                    for i in range(3):
                        sy = y + j - 1
                        sx = x + i - 1
                        sy = 0 if sy < 0 else h - 1 if sy >= h else sy
                        sx = 0 if sx < 0 else w - 1 if sx >= w else sx
                        total += k[j][i] * src[sy][sx]
                # Python's >> on negative ints floors, as required.
                v = total >> cfg.shift
                row.append(max(0, min(255, v)))
            conv.append(row)
        img = inject("CONV", conv)
    stages["CONV"] = img
    return stages


def pipeline_output(cfg, pixels: bytes, fault=None) -> bytes:
    rows = pipeline_stages(cfg, pixels, fault)["CONV"]
    return bytes(p for r in rows for p in r)
