"""Categorical color schemes and a coarse hex-to-color-name mapping.

The schemes follow the usual ColorBrewer and Tableau categorical sets;
every palette carries at least eight distinct colors so series and pie
segments never collide. Color names are resolved to the nearest of a small
set of everyday color words, which is what question templates put in front
of a reader ("the red bars").
"""

from __future__ import annotations

PALETTES: dict[str, list[str]] = {
    "tableau10": [
        "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
        "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
    ],
    "set1": [
        "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
        "#ffff33", "#a65628", "#f781bf", "#999999",
    ],
    "set2": [
        "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3", "#a6d854",
        "#ffd92f", "#e5c494", "#b3b3b3",
    ],
    "set3": [
        "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3",
        "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd",
    ],
    "dark2": [
        "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e",
        "#e6ab02", "#a6761d", "#666666",
    ],
    "paired": [
        "#a6cee3", "#1f78b4", "#b2df8a", "#33a02c", "#fb9a99",
        "#e31a1c", "#fdbf6f", "#ff7f00", "#cab2d6", "#6a3d9a",
    ],
    "accent": [
        "#7fc97f", "#beaed4", "#fdc086", "#ffff99", "#386cb0",
        "#f0027f", "#bf5b17", "#666666",
    ],
    "colorblind10": [
        "#1170aa", "#fc7d0b", "#a3acb9", "#57606c", "#5fa2ce",
        "#c85200", "#7b848f", "#a3cce9", "#ffbc79", "#c8d0d9",
    ],
}

PALETTE_NAMES = sorted(PALETTES)

# Anchor points for everyday color words; nearest-anchor wins.
_NAMED_ANCHORS: list[tuple[str, tuple[int, int, int]]] = [
    ("red", (215, 45, 50)),
    ("orange", (250, 140, 30)),
    ("yellow", (240, 220, 70)),
    ("green", (70, 160, 70)),
    ("teal", (80, 180, 170)),
    ("cyan", (120, 200, 235)),
    ("blue", (60, 110, 190)),
    ("navy", (40, 55, 120)),
    ("purple", (130, 85, 180)),
    ("magenta", (225, 60, 150)),
    ("pink", (250, 170, 190)),
    ("brown", (150, 95, 60)),
    ("gray", (150, 150, 150)),
    ("olive", (130, 130, 45)),
    ("black", (40, 40, 40)),
]


def palette_colors(palette_id: str) -> list[str]:
    try:
        return list(PALETTES[palette_id])
    except KeyError:
        raise KeyError(f"unknown palette {palette_id!r}; known: {PALETTE_NAMES}")


def hex_to_rgb(color: str) -> tuple[int, int, int]:
    c = color.lstrip("#")
    if len(c) == 3:
        c = "".join(ch * 2 for ch in c)
    return int(c[0:2], 16), int(c[2:4], 16), int(c[4:6], 16)


def rgb_distance(a: str, b: str) -> float:
    ra, ga, ba = hex_to_rgb(a)
    rb, gb, bb = hex_to_rgb(b)
    return (ra - rb) ** 2 + (ga - gb) ** 2 + (ba - bb) ** 2


def color_name(color: str) -> str:
    """Nearest everyday color word for a hex color."""
    r, g, b = hex_to_rgb(color)
    best, best_d = "gray", float("inf")
    for name, (ar, ag, ab) in _NAMED_ANCHORS:
        d = (r - ar) ** 2 + (g - ag) ** 2 + (b - ab) ** 2
        if d < best_d:
            best, best_d = name, d
    return best
