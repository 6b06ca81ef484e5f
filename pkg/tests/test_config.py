import json

import pytest

from halfmass.config import ConfigError, load_config, parse_config

BASE = {"experiment": "coverage", "distribution": {"kind": "gaussian", "dim": 2},
        "n": 50, "alpha": 0.1, "seed": 3}


def _with(**kw):
    doc = dict(BASE)
    doc.update(kw)
    return doc


def test_minimal():
    cfg = parse_config(BASE)
    assert cfg.n == [50] and cfg.alpha == [0.1] and cfg.trials == 1000 and cfg.workers == 1


@pytest.mark.parametrize("missing", ["experiment", "distribution", "n", "alpha", "seed"])
def test_missing_required(missing):
    doc = dict(BASE)
    del doc[missing]
    with pytest.raises(ConfigError) as info:
        parse_config(doc)
    assert info.value.field == missing


@pytest.mark.parametrize("doc, field", [
    (_with(colour="red"), "colour"),
    (_with(alpha=1.2), "alpha"),
    (_with(trials=0), "trials"),
    (_with(n=[0]), "n"),
    (_with(experiment="nope"), "experiment"),
    (_with(experiment="consistency", n=[50]), "n"),
    (_with(experiment="hausdorff", distribution={"kind": "gaussian", "dim": 4}), "grid"),
    (_with(distribution={"kind": "banana"}), "distribution"),
    (_with(grid={"lower": [0], "upper": [1], "counts": [5]}), "grid"),
    (_with(n=5000), "n"),
    (_with(k=50), "k"),
    (_with(experiment="contamination", contamination={"fraction": 0.6}), "contamination.fraction"),
    (_with(seed=-1), "seed"),
    (_with(seed=1.5), "seed"),
])
def test_invalid(doc, field):
    with pytest.raises(ConfigError) as info:
        parse_config(doc)
    assert info.value.field == field


def test_allow_large():
    assert parse_config(_with(n=5000, allow_large=True)).n == [5000]


def test_hausdorff_default_replicates():
    cfg = parse_config(_with(experiment="hausdorff", grid={"lower": [-1, -1], "upper": [1, 1], "counts": [5, 5]}))
    assert cfg.replicates == 20


def test_to_dict_round_trip():
    cfg = parse_config(_with(experiment="proxy", alpha=[0.1, 0.3], grid={"lower": [-1, -1], "upper": [1, 1], "counts": [5, 5]}))
    again = parse_config(cfg.to_dict())
    assert again.to_dict() == cfg.to_dict()


def test_load_bad_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="line 1"):
        load_config(p)


def test_load(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(BASE))
    assert load_config(p).seed == 3


def test_default_grid_box():
    cfg = parse_config(_with(experiment="hausdorff", distribution={"kind": "gaussian", "mean": [1, 2]}))
    assert cfg.grid.lower == (-3.0, -2.0) and cfg.grid.upper == (5.0, 6.0)
    assert cfg.grid.counts == (200, 200)
    assert parse_config(cfg.to_dict()).grid == cfg.grid
