import pytest
from hypothesis import given, settings, strategies as st

from fracriesz.config import (
    ExperimentConfig,
    emit_config,
    expand_grid,
    normalize_config,
    parse_config,
    parse_config_text,
    with_overrides,
)
from fracriesz.errors import ConfigError

BASE = """# reference run
family = vicsek
level = 3
p_grid = 1.5, 2,4
gamma_grid = 0.25:0.75:0.25   # inclusive
families = tent,eigenmode_band
"""


def test_parse_basic():
    c = parse_config_text(BASE)
    assert c.family == "vicsek" and c.level == 3
    assert c.p_grid == (1.5, 2.0, 4.0)
    assert c.gamma_grid == (0.25, 0.5, 0.75)
    assert c.families == ("tent", "eigenmode_band")
    assert c.laziness == 0.5 and c.seed == 0
    assert c.generator.level == 3


def test_round_trip():
    once = normalize_config(BASE)
    assert emit_config(parse_config_text(BASE)) == once
    assert normalize_config(once) == once
    assert parse_config_text(once) == parse_config_text(BASE)


@settings(max_examples=40, deadline=None)
@given(
    level=st.integers(0, 6),
    ps=st.lists(st.sampled_from([1.25, 1.5, 2.0, 3.0, 4.0]), min_size=1, max_size=4),
    gs=st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=5),
    seed=st.integers(0, 10**6),
    verify=st.sampled_from([(), ("volume",), ("volume", "escape", "ue", "dkue")]),
)
def test_round_trip_property(level, ps, gs, seed, verify):
    c = ExperimentConfig("sierpinski", level, tuple(ps), tuple(gs), seed=seed, verify=verify)
    text = emit_config(c)
    assert parse_config_text(text) == c
    assert normalize_config(text) == text


def test_grid_shorthand():
    g = expand_grid("0.1:0.9:0.05")
    assert len(g) == 17
    assert g[0] == 0.1 and g[-1] == 0.9 and g[8] == 0.5
    assert expand_grid("1.5, 2:4:1") == (1.5, 2.0, 3.0, 4.0)
    for bad in ("0.1:0.9", "0.9:0.1:0.1", "0:1:0.3", "0:1:0", "1,,2"):
        with pytest.raises(ConfigError):
            expand_grid(bad)


def test_duplicate_key_names_line():
    text = BASE + "\nlevel = 4\n"
    with pytest.raises(ConfigError) as exc:
        parse_config_text(text)
    assert exc.value.field == "level"
    assert exc.value.line == 8
    assert "8" in str(exc.value) and "line 3" in str(exc.value)


def test_gamma_out_of_range_names_field():
    with pytest.raises(ConfigError) as exc:
        parse_config_text(BASE.replace("0.25:0.75:0.25", "1.5"))
    assert exc.value.field == "gamma_grid"
    assert "gamma_grid" in str(exc.value)


@pytest.mark.parametrize("text,field", [
    (BASE + "colour = red\n", "colour"),
    (BASE.replace("level = 3", "level = three"), "level"),
    (BASE.replace("level = 3", "level = 2.5"), "level"),
    (BASE.replace("p_grid = 1.5, 2,4", "p_grid = 1,2"), "p_grid"),
    (BASE.replace("vicsek", "koch"), "family"),
    (BASE + "laziness = 1\n", "laziness"),
    (BASE + "families = tent,spline\n".replace("families", "verify"), "verify"),
    (BASE + "method = magic\n", "method"),
    (BASE + "n_scales = 3\n", "n_scales"),
    (BASE + "tail_tol = nan\n", "tail_tol"),
    (BASE + "seed =\n", "seed"),
])
def test_rejections_name_field(text, field):
    with pytest.raises(ConfigError) as exc:
        parse_config_text(text)
    assert exc.value.field == field


def test_missing_required_and_malformed_line():
    with pytest.raises(ConfigError) as exc:
        parse_config_text("family = vicsek\nlevel = 2\np_grid = 2\n")
    assert exc.value.field == "gamma_grid"
    with pytest.raises(ConfigError) as exc:
        parse_config_text(BASE + "just words\n")
    assert exc.value.line == 7


def test_verify_none_and_overrides(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(BASE + "verify = none\n")
    c = parse_config(path)
    assert c.verify == ()
    assert "verify = none" in emit_config(c)
    d = with_overrides(c, level=4)
    assert d.level == 4 and c.level == 3
    with pytest.raises(ConfigError):
        with_overrides(c, gamma_grid=(2.0,))
