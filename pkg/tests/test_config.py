import math

import pytest

from ballistic_bell.config import ConfigError, parse_angle, parse_device_config, parse_grid
from conftest import SHIPPED_CONFIG


@pytest.mark.parametrize(
    "text,value",
    [
        ("pi", math.pi),
        ("-pi", -math.pi),
        ("pi/2", math.pi / 2),
        ("3pi/4", 3 * math.pi / 4),
        ("2*pi", 2 * math.pi),
        ("0.5pi", math.pi / 2),
        ("1.25", 1.25),
        ("-1e-3", -1e-3),
        ("1/4", 0.25),
        (" PI / 3 ", math.pi / 3),
    ],
)
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", ["", "pie", "/2", "pi/0", "1..2", "pi pi", "__import__('os')"])
def test_parse_angle_rejects(text):
    with pytest.raises(ValueError):
        parse_angle(text)


def test_parse_grid():
    assert parse_grid("0:pi:pi/2") == pytest.approx([0, math.pi / 2, math.pi])
    assert parse_grid("0:1:0.3") == pytest.approx([0, 0.3, 0.6, 0.9])
    assert parse_grid("0,pi") == pytest.approx([0, math.pi])
    assert parse_grid("2") == [2.0]
    for bad in ("0:1", "0:1:0", "1:0:0.1", ","):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_shipped_config_parses():
    params, gates = parse_device_config(SHIPPED_CONFIG.read_text())
    assert params.material.effective_mass_ratio == 0.067
    assert params.energy == 10.0
    assert [g.kind for g in gates] == ["H", "H", "CP", "P", "H"]
    assert gates[2].angle == pytest.approx(math.pi)
    assert gates[3].options == {"realization": "well", "order": 2}


def test_empty_network_config():
    params, gates = parse_device_config("[device]\nenergy = 5\n")
    assert gates == [] and params.energy == 5.0


@pytest.mark.parametrize(
    "text,line,key",
    [
        ("[device]\nenergy = ten\n", 2, "energy"),
        ("[device]\n\n# c\nmass_ratio = 20\n", 4, "mass_ratio"),
        ("[gate]\ntype = H\nqubit = 3\n", 3, "qubit"),
        ("[gate]\ntype = Q\n", 2, "type"),
        ("[gate]\ntype = H\ncolour = red\n", 3, "colour"),
        ("[gate]\ntype = CP\n", 1, "alpha"),
        ("[gate]\ntype = P\nqubit = 1\ntheta = 1\ntheta = 2\n", 5, "theta"),
        ("[gate]\ntype = P\nqubit = 1\norder = 0\n", 4, "order"),
        ("[device]\ntau = -1\n", 2, "tau"),
    ],
)
def test_config_errors_name_line_and_field(text, line, key):
    with pytest.raises(ConfigError) as info:
        parse_device_config(text)
    assert info.value.line == line
    assert info.value.key == key
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize("text,line", [("energy = 1\n", 1), ("[device\n", 1), ("[optics]\n", 1), ("[device]\nnonsense\n", 2)])
def test_config_structure_errors(text, line):
    with pytest.raises(ConfigError) as info:
        parse_device_config(text)
    assert info.value.line == line
