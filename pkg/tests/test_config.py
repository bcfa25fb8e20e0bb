import json

import pytest

from kerrcat.config import ConfigError, RunConfig, dumps, load, loads, table1_config
from kerrcat.params import table1_design


def test_bundled_config_is_table1():
    cfg = table1_config()
    assert cfg.design == table1_design()
    assert cfg.design.pump_frequency == 10.598944
    assert cfg.dims == (20, 20, 5)
    assert cfg.rel_tol == 1e-12 and cfg.abs_tol == 1e-14


def test_round_trip():
    cfg = table1_config()
    cfg.dims = (25, 25, 6)
    cfg.experiment = {"t_g": 25}
    again = loads(dumps(cfg))
    assert again == cfg
    assert dumps(again) == dumps(cfg)


def test_load_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(dumps(table1_config()))
    assert load(path) == table1_config()


def test_minimal_config_uses_defaults():
    data = table1_config().to_dict()
    cfg = RunConfig.from_dict({"circuit": data["circuit"]})
    assert cfg.dims == (20, 20, 5)
    assert cfg.method == "adaptive"


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d["circuit"].update(bogus=1),
        lambda d: d.update(extra={}),
        lambda d: d["circuit"]["qubit1"].pop("squid_count"),
        lambda d: d["circuit"].pop("c12_ff"),
        lambda d: d["numerics"].update(method="euler"),
        lambda d: d["numerics"].update(rel_tol=0.1),
        lambda d: d["space"].update(dims=[1, 20, 5]),
        lambda d: d["circuit"]["coupler"].update(bias_flux_over_2pi=0.7),
        lambda d: d["circuit"].update(qubit1=[1, 2]),
    ],
)
def test_rejects(mutate):
    data = table1_config().to_dict()
    mutate(data)
    with pytest.raises(ConfigError):
        loads(json.dumps(data))


def test_invalid_json():
    with pytest.raises(ConfigError):
        loads("{not json")
