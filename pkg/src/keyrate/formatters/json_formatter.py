"""JSON formatter.

Shape of the JSON output:

```json
{
    "keyrate": "0.1.0",
    "config": {
        "command": "kbib",
        "parameters": {"variant": "bsc-kernel", "epsilon": 0.11, "rounds": "inf"},
        "envelope": {"grid_n": 201, "sup_norm_tol": 1e-08, ...},
        "output_format": "json",
        "output": null,
        "bits": false,
        "config_text": null,
        "hash": "5f1c..."
    },
    "title": "Key bits per interaction bit",
    "units": "nats",
    "values": {"s_star": 0.6083984375, "kbib": 1.5535..., ...},
    "table": {"columns": ["S", "R", "s"], "rows": [[0.0, 0.0, 0.001], ...]},
    "matrices": {"sigma": {"axis": [...], "values": [[...], ...]}}
}
```

Floats carry every digit needed to round-trip, which never exceeds 17
significant digits; non-finite numbers are written as the strings "inf",
"-inf" and "nan". No timestamp is written, so identical configurations
give byte-identical documents.
"""

import json
import math
from typing import Any

import numpy as np

from keyrate.formatters import Formatter, Report
from keyrate.run_config import keyrate_version


def jsonable(value: Any) -> Any:  # noqa: PLR0911
    """Convert numbers, arrays and containers to strict JSON values."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(f"{float(value):.17g}")
        return number if math.isfinite(number) else str(number)
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if value is None or isinstance(value, str):
        return value
    return str(value)


class JSONFormatter(Formatter):
    """Formatter for JSON output."""

    def format(self, report: Report) -> str:
        """Render the report as a JSON document."""
        config = self._run_config.to_dict()
        config["hash"] = self._run_config.config_hash
        document: dict[str, Any] = {
            "keyrate": keyrate_version(),
            "config": config,
            "title": report.title,
            "units": self.unit,
            "values": {
                key: self.scaled(report, key, value)
                for key, value in report.values.items()
                if key not in report.volatile
            },
        }
        if report.table is not None:
            document["table"] = {
                "columns": list(report.table.columns),
                "rows": [self.scaled_row(report, row) for row in report.table.rows],
            }
        if report.matrices:
            document["matrices"] = {
                name: {"axis": matrix.axis, "values": self.scaled_matrix(matrix)}
                for name, matrix in report.matrices.items()
            }
        return json.dumps(jsonable(document), indent=2, ensure_ascii=False) + "\n"
