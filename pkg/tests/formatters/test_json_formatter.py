"""Unit tests for the JSON formatter."""

import json
import math

import numpy as np
from keyrate.formatters.json_formatter import JSONFormatter, jsonable


def test_json_formatter(run_config, report):
    """Ensure the document carries the config, values, table and grids."""
    text = JSONFormatter(run_config=run_config).format(report)
    assert text.endswith("}\n")
    document = json.loads(text)
    assert document["title"] == "Example"
    assert document["units"] == "nats"
    assert document["config"]["command"] == "envelope"
    assert document["config"]["parameters"]["rounds"] == "inf"
    assert document["config"]["hash"] == run_config.config_hash
    assert document["values"] == {
        "info": 0.5,
        "count": 3,
        "flag": True,
        "pair": [0.1, 0.2],
        "unbounded": "inf",
    }
    assert document["table"] == {
        "columns": ["S", "R", "s"],
        "rows": [[0.0, 0.0, 1.0], [0.5, 0.25, 0.5]],
    }
    assert document["matrices"]["field"]["axis"] == [0.0, 0.5, 1.0]
    assert document["matrices"]["field"]["values"][0] == ["-inf", 0.0, 1.0]


def test_json_formatter_bits(bits_run_config, report):
    """Ensure nats-valued entries are rescaled and others are not."""
    document = json.loads(JSONFormatter(run_config=bits_run_config).format(report))
    values = document["values"]
    assert document["units"] == "bits"
    assert values["info"] == 0.5 / math.log(2)
    assert values["count"] == 3
    assert values["flag"] is True
    assert document["table"]["rows"][1] == [0.5 / math.log(2), 0.25 / math.log(2), 0.5]
    assert document["matrices"]["field"]["values"][2][1] == 2.0 / math.log(2)


def test_json_formatter_deterministic(run_config, report):
    """Ensure two renderings are byte-identical."""
    formatter = JSONFormatter(run_config=run_config)
    assert formatter.format(report) == formatter.format(report)


def test_jsonable():
    """Ensure numpy scalars and non-finite numbers become strict JSON."""
    assert jsonable(np.float64(1 / 3)) == 1 / 3
    assert jsonable(np.int64(4)) == 4
    assert jsonable(np.bool_(True)) is True
    assert jsonable(float("nan")) == "nan"
    assert jsonable({1: (np.inf, None)}) == {"1": ["inf", None]}
