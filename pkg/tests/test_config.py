import pytest

from mimetic_pic.config import ConfigError, load_config, parse_config

GOOD = """
# sample run
grid.cells = 7 7 7
grid.lengths = 5.0265 5.0265 5.0265
scheme.dt = 0.02
scheme.t_end = 200.0
scheme.hodge_order = 4
scheme.kernel_degree = 2
scheme.neutralize = on
external_b0 = 0.0 0.0 0.1

species.electrons.charge = -1.0
species.electrons.mass = 1.0
species.electrons.per_cell = 10
species.electrons.thermal = 0.0141 0.049 0.049
species.ions.charge = 1.0
species.ions.mass = 10.0
species.ions.count = 300

perturbation.b_amplitude = 1e-4
perturbation.b_component = 1
diagnostics.interval = 10
diagnostics.slice = on
output.directory = runs/sample
"""


def test_parse_good_config():
    cfg = parse_config(GOOD)
    assert cfg.cells == (7, 7, 7)
    assert cfg.dt == 0.02
    assert cfg.hodge_order == 4
    assert cfg.kernel_degree == 2
    assert cfg.neutralize is True
    assert cfg.external_b0 == (0.0, 0.0, 0.1)
    assert cfg.pert_b_amplitude == 1e-4
    assert cfg.diagnostics.interval == 10
    assert cfg.diagnostics.slice_enable is True
    assert cfg.output_dir == "runs/sample"
    assert cfg.n_steps() == 10000
    names = {s.name: s for s in cfg.species}
    assert names["electrons"].count == 10 * 343  # per_cell times cells
    assert names["electrons"].spline_degree == 2
    assert names["electrons"].thermal == (0.0141, 0.049, 0.049)
    assert names["ions"].count == 300
    # derived objects construct cleanly
    assert cfg.grid().cells == (7, 7, 7)
    assert cfg.scheme().dt == 0.02


def test_defaults():
    cfg = parse_config(
        "grid.cells = 4 4 4\ngrid.lengths = 1 1 1\n"
        "scheme.dt = 0.1\nscheme.t_end = 1.0\n")
    assert cfg.hodge_order == 2
    assert cfg.hodge_variant == "natural"
    assert cfg.kernel_degree == 1
    assert cfg.species == []
    assert cfg.diagnostics.interval == 1
    assert cfg.diagnostics.slice_enable is False


REQUIRED = ("grid.cells = 4 4 4\ngrid.lengths = 1 1 1\n"
            "scheme.dt = 0.1\nscheme.t_end = 1.0\n")


@pytest.mark.parametrize("line", [
    "grid.size = 4 4 4",               # unknown key
    "species.e.colour = red",          # unknown species field
    "grid.cells = 4 4",                # wrong vector length
    "scheme.dt = fast",                # unparsable float
    "scheme.neutralize = maybe",       # unparsable bool
    "just some words",                 # no assignment
])
def test_bad_lines_rejected(line):
    with pytest.raises(ConfigError):
        parse_config(REQUIRED + line + "\n")


def test_missing_required_key():
    with pytest.raises(ConfigError):
        parse_config("grid.cells = 4 4 4\nscheme.dt = 0.1\nscheme.t_end = 1\n")


def test_invalid_values_rejected():
    with pytest.raises(ConfigError):
        parse_config(REQUIRED.replace("0.1", "0.1") + "scheme.hodge_order = 3\n")
    with pytest.raises(ConfigError):
        parse_config(REQUIRED + "scheme.kernel_degree = 9\n")
    with pytest.raises(ConfigError):
        parse_config(REQUIRED + "scheme.hodge_variant = wide\n")
    with pytest.raises(ConfigError):
        parse_config(REQUIRED + "diagnostics.interval = 0\n")
    with pytest.raises(ConfigError):
        parse_config(REQUIRED + "diagnostics.slice_axis = 5\n")


def test_species_count_constraints():
    base = REQUIRED + "species.e.charge = -1\nspecies.e.mass = 1\n"
    with pytest.raises(ConfigError):
        parse_config(base)  # neither count nor per_cell
    with pytest.raises(ConfigError):
        parse_config(base + "species.e.count = 8\nspecies.e.per_cell = 2\n")
    with pytest.raises(ConfigError):
        parse_config(REQUIRED + "species.e.count = 8\n")  # missing charge/mass
    cfg = parse_config(base + "species.e.count = 8\n")
    assert cfg.species[0].count == 8


def test_grid_scheme_validated_eagerly():
    # a grid too coarse for the requested stencil order fails at parse time
    with pytest.raises(ValueError):
        parse_config(REQUIRED + "scheme.hodge_order = 8\n")


def test_load_config_file(tmp_path):
    path = tmp_path / "run.config"
    path.write_text(GOOD)
    cfg = load_config(path)
    assert cfg.cells == (7, 7, 7)
