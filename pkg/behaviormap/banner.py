# src/behaviormap/banner.py

import colorsys
import math
import os
import random

LOGO = r"""
 _          _                 _
| |__   ___| |__   __ ___   _(_) ___  _ __ _ __ ___   __ _ _ __
| '_ \ / _ \ '_ \ / _` \ \ / / |/ _ \| '__| '_ ` _ \ / _` | '_ \
| |_) |  __/ | | | (_| |\ V /| | (_) | |  | | | | | | (_| | |_) |
|_.__/ \___|_| |_|\__,_| \_/ |_|\___/|_|  |_| |_| |_|\__,_| .__/
                                                          |_|
""".strip("\n").split("\n")

TAGLINE = "Behavior maps over user myopia and confidence."

FIXED_PALETTES = [
    [(0x1F, 0x77, 0xB4), (0x4C, 0x8E, 0xC9), (0x9A, 0x8F, 0xB8), (0xE0, 0x8C, 0x4A), (0xFF, 0x7F, 0x0E)],
    [(0x33, 0xE0, 0xA1), (0x19, 0xB6, 0xD8), (0x2A, 0xD5, 0x6C), (0x15, 0x90, 0xD3), (0x0D, 0x75, 0xB4)],
    [(0x00, 0xFF, 0xCC), (0x00, 0xDD, 0xFF), (0x66, 0x99, 0xFF), (0xAA, 0x77, 0xFF), (0xFF, 0x66, 0xDD)],
    [(0x3A, 0x0C, 0xF0), (0x66, 0x1B, 0xF6), (0x98, 0x2D, 0xFF), (0xF2, 0x36, 0xA3), (0xFF, 0x73, 0x3F)],
]


def lerp(a, b, t):
    return a + (b - a) * t


def blend(c1, c2, t):
    t = t ** 1.47
    t = 0.82 * t + 0.08 * math.sin(3.2 * t)
    r = int(lerp(c1[0], c2[0], t))
    g = int(lerp(c1[1], c2[1], t))
    b = int(lerp(c1[2], c2[2], t))
    return f"#{r:02x}{g:02x}{b:02x}"


def _procedural_palette(rng, n=5):
    base_h = rng.random()
    spacing = 1.0 / n
    sat = 0.72 + (rng.random() - 0.5) * 0.2
    val = 0.78 + (rng.random() - 0.5) * 0.2
    palette = []
    for i in range(n):
        h = (base_h + i * spacing + (rng.random() - 0.5) * spacing * 0.6) % 1.0
        s = min(max(sat + (rng.random() - 0.5) * 0.18, 0.35), 1.0)
        v = min(max(val + (rng.random() - 0.5) * 0.18, 0.35), 1.0)
        r, g, b = colorsys.hsv_to_rgb(h, s, v)
        palette.append((int(round(r * 255)), int(round(g * 255)), int(round(b * 255))))
    return palette


def choose_palette(rng=None):
    """Fixed palette from ``BEHAVIORMAP_PALETTE`` or a procedural one."""
    rng = rng or random.SystemRandom()
    idx_env = os.getenv("BEHAVIORMAP_PALETTE")
    if idx_env is not None:
        try:
            idx = int(idx_env)
            if 0 <= idx < len(FIXED_PALETTES):
                return list(FIXED_PALETTES[idx]), f"fixed[{idx}]"
        except ValueError:
            pass
        return _procedural_palette(rng), "procedural (bad env fallback)"
    return _procedural_palette(rng), "procedural"


def print_logo():
    from rich.console import Console
    from rich.text import Text

    # stdout carries machine-readable results
    console = Console(stderr=True)
    palette, _mode = choose_palette()

    H = len(LOGO)
    for i, line in enumerate(LOGO):
        tline = Text()
        W = max(len(line), 1)
        for j, ch in enumerate(line):
            t = (i * 0.72 + j * 0.44) / (H * 0.72 + W * 0.44)
            seg = t * (len(palette) - 1)
            k = int(seg)
            c1 = palette[k]
            c2 = palette[min(k + 1, len(palette) - 1)]
            tline.append(ch, style=blend(c1, c2, seg - k))
        console.print(tline)

    console.print(f"[dim]{TAGLINE}[/dim]\n")
