# tests/test_render.py

import re

import numpy as np

from behaviormap.atlas_engine import BehaviorMap, GridSpec
from behaviormap.defaults import PALETTE, WANDER_COLOR
from behaviormap.render import render_svg, write_svg


def make_map(labels, palette=("small", "big")):
    labels = np.asarray(labels)
    P, G = labels.shape
    return BehaviorMap(GridSpec.linspace(G, p_res=P), labels, "big_small", palette)


def test_one_rect_per_cell():
    svg = render_svg(make_map(np.zeros((3, 3), dtype=int)))
    assert svg.startswith("<svg")
    assert svg.rstrip().endswith("</svg>")
    assert len(re.findall(r'width="4" height="4"', svg)) == 9
    assert "<title>big_small</title>" in svg


def test_cell_size_and_title():
    svg = render_svg(make_map(np.zeros((3, 4), dtype=int)), cell_size=10, title="a & b")
    assert len(re.findall(r'width="10" height="10"', svg)) == 12
    assert "<title>a &amp; b</title>" in svg


def test_highest_p_on_top():
    labels = np.zeros((3, 3), dtype=int)
    labels[2, :] = 1
    svg = render_svg(make_map(labels))
    cells = re.findall(r'<rect x="\d+" y="(\d+)" width="4" height="4" fill="(#[0-9a-f]{6})"/>', svg)
    top_y = min(int(y) for y, _ in cells)
    assert {fill for y, fill in cells if int(y) == top_y} == {PALETTE[1]}


def test_colors_and_legend():
    labels = np.array([[0, 1, 2], [0, 1, 2], [0, 1, 2]])
    svg = render_svg(make_map(labels, ("small", "big", "wander")))
    assert PALETTE[0] in svg and PALETTE[1] in svg
    assert WANDER_COLOR in svg
    assert len(re.findall(r'width="12" height="12"', svg)) == 3
    assert ">wander</text>" in svg


def test_palette_override():
    svg = render_svg(make_map(np.ones((3, 3), dtype=int)), palette={"big": "#123456"})
    assert "#123456" in svg
    assert PALETTE[1] not in svg


def test_deterministic(tmp_path):
    m = make_map(np.eye(3, dtype=int))
    a = write_svg(m, tmp_path / "a.svg")
    b = write_svg(m, tmp_path / "b.svg")
    assert a.read_bytes() == b.read_bytes()
    assert render_svg(m) == a.read_text(encoding="utf-8")
