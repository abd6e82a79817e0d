"""
Export - CSV and JSON output with bit-stable float formatting
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# 17 significant digits round-trip every double
FLOAT_FORMAT = "%.17g"


def _plain(obj: Any) -> Any:
    """Convert numpy scalars and arrays for JSON serialization"""
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    return str(obj)


class Exporter:
    """Writes frames and reports into one output directory"""

    supported_formats = ("csv", "json")

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def export_frame(self, data: pd.DataFrame, filename: str) -> Dict[str, Any]:
        """Write a frame as CSV with a header row"""
        if data is None or data.empty:
            return {"success": False, "error": "No data to export"}
        path = self.out_dir / filename
        try:
            data.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        except OSError as e:
            logger.error(f"Error exporting {filename}: {e}")
            return {"success": False, "error": str(e)}
        logger.info(f"Wrote {len(data)} rows to {path}")
        return {
            "success": True,
            "format": "csv",
            "filename": filename,
            "path": path,
            "rows": len(data),
            "columns": list(data.columns),
        }

    def export_report(self, report: Dict[str, Any], filename: str) -> Dict[str, Any]:
        """Write a report dictionary as indented JSON"""
        path = self.out_dir / filename
        try:
            path.write_text(json.dumps(report, indent=2, default=_plain) + "\n", encoding="utf-8")
        except OSError as e:
            logger.error(f"Error exporting {filename}: {e}")
            return {"success": False, "error": str(e)}
        logger.info(f"Wrote report to {path}")
        return {"success": True, "format": "json", "filename": filename, "path": path}
