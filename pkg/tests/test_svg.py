import re
from fractions import Fraction as F

import pytest

from mumfordkit import PLSection, HyperplaneTerm, ValidationError, bending_locus, data_svg, emit_svg
from mumfordkit.svg import PALETTE, _clip


def coords(svg):
    return [float(a) for a in re.findall(r'(?:x1|y1|x2|y2|cx|cy)="([-0-9.]+)"', svg)]


def test_tate_single_point(examples):
    svg = emit_svg(bending_locus(examples["tate"].sections[0]))
    assert svg.count("<circle") == 1
    assert ">1</text>" in svg  # bending parameter label


def test_theta3_three_colours(examples):
    svg = data_svg(examples["theta3"])
    for colour in PALETTE[:3]:
        assert f'stroke="{colour}"' in svg
    for name in ("b1", "b2", "b3"):
        assert f">{name}</text>" in svg


def test_coordinates_stay_in_frame(examples):
    for name in ("theta3", "shifted-theta"):
        for v in coords(data_svg(examples[name])):
            assert 30 - 1e-9 <= v <= 430 + 1e-9


def test_three_dimensional_input_rejected():
    b = PLSection(3, tuple(HyperplaneTerm(n, 0, 1) for n in ((1, 0, 0), (0, 1, 0), (0, 0, 1))))
    with pytest.raises(ValidationError):
        emit_svg(bending_locus(b))


def test_deterministic(examples):
    assert data_svg(examples["theta3"]) == data_svg(examples["theta3"])


def test_clip():
    assert _clip((F(-1), F(1, 2)), (F(2), F(1, 2))) == ((0, F(1, 2)), (1, F(1, 2)))
    assert _clip((F(2), F(2)), (F(3), F(3))) is None
    assert _clip((F(-1), F(-1)), (F(2), F(2))) == ((0, 0), (1, 1))
