"""
Plotting - deterministic SVG line charts from result CSVs
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from ..config.settings import settings  # noqa: E402
from ..utils.errors import PlotError  # noqa: E402

logger = logging.getLogger(__name__)

# long scenario frames carry one row per (t, country)
SCENARIO_QUANTITIES = ("P", "y", "s")
TITLES = {"P": "Bond price", "y": "Yield", "s": "Spread"}
PALETTE = plt.get_cmap("tab10").colors


def detect_layout(frame: pd.DataFrame) -> Dict[str, object]:
    """Chart layout for a CSV: long (t, country, P, y, s) or wide (t, series...)"""
    columns = list(frame.columns)
    if "t" not in columns:
        raise PlotError(f"CSV has no time column 't': {columns}")
    if "country" in columns:
        quantities = [q for q in SCENARIO_QUANTITIES if q in columns]
        if not quantities:
            raise PlotError(f"scenario CSV needs one of {SCENARIO_QUANTITIES}, got {columns}")
        return {"layout": "long", "series": "country", "quantities": quantities}
    values = [c for c in columns if c not in ("t", "path") and pd.api.types.is_numeric_dtype(frame[c])]
    if not values:
        raise PlotError(f"CSV has no numeric series besides 't': {columns}")
    return {"layout": "wide", "series": values, "quantities": ["value"]}


def line_chart(series: Dict[str, pd.Series], title: str, ylabel: str, path: Path) -> Path:
    """One SVG with a labeled line per series; colors follow series order"""
    if not series or any(s.dropna().empty for s in series.values()):
        raise PlotError(f"empty series for chart {title!r}")
    plt.rcParams["svg.hashsalt"] = "heatkernel"
    plt.rcParams["svg.fonttype"] = "path"
    dpi = settings.chart_dpi
    fig, ax = plt.subplots(figsize=(settings.chart_width / dpi, settings.chart_height / dpi), dpi=dpi)
    try:
        for k, (label, values) in enumerate(series.items()):
            ax.plot(values.index.to_numpy(), values.to_numpy(), label=str(label),
                    color=PALETTE[k % len(PALETTE)], linewidth=1.0)
        ax.set_title(title)
        ax.set_xlabel("t")
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best")
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
    logger.info(f"Wrote chart {path}")
    return path


def _first_path(frame: pd.DataFrame) -> pd.DataFrame:
    if "path" in frame.columns:
        return frame[frame["path"] == frame["path"].min()]
    return frame


def plot_frame(frame: pd.DataFrame, out_dir: Union[str, Path], stem: str,
               quantities: Optional[Sequence[str]] = None) -> List[Path]:
    """Render one SVG per quantity of a result frame"""
    if frame.empty:
        raise PlotError("CSV holds no rows")
    layout = detect_layout(frame)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frame = _first_path(frame)
    written = []
    if layout["layout"] == "long":
        wanted = list(quantities or layout["quantities"])
        missing = [q for q in wanted if q not in frame.columns]
        if missing:
            raise PlotError(f"CSV lacks columns {missing}")
        order = list(dict.fromkeys(frame["country"]))
        for q in wanted:
            series = {c: frame[frame["country"] == c].set_index("t")[q] for c in order}
            written.append(line_chart(series, TITLES.get(q, q), q, out_dir / f"{stem}_{q}.svg"))
    else:
        series = {c: frame.set_index("t")[c] for c in layout["series"]}
        written.append(line_chart(series, stem, "value", out_dir / f"{stem}.svg"))
    return written


def plot_csv(csv_path: Union[str, Path], out_dir: Union[str, Path],
             quantities: Optional[Sequence[str]] = None) -> List[Path]:
    """CSV in one of the documented schemas -> SVG files"""
    csv_path = Path(csv_path)
    try:
        frame = pd.read_csv(csv_path)
    except pd.errors.EmptyDataError as e:
        raise PlotError(f"{csv_path} is empty") from e
    except FileNotFoundError as e:
        raise PlotError(f"{csv_path} not found") from e
    return plot_frame(frame, out_dir, csv_path.stem, quantities)
