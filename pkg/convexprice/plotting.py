"""Static SVG figure of the focal seller's profit curve."""

from __future__ import annotations

import io
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("agg")

import matplotlib.pyplot as plt  # noqa: E402

from convexprice.errors import InputFormatError  # noqa: E402

SVG_HASH_SALT = "convexprice"


def profit_curve_svg(
    curve: Sequence[tuple[float, float, float]],
    breakpoints: Sequence[float] = (),
    p_star: Optional[float] = None,
    title: str = "profit vs normalized price",
) -> str:
    """Render ``(p, share, profit)`` samples as an SVG document.

    Breakpoints are drawn as dotted vertical rules, the optimum as a dashed one.
    Output is byte-identical for identical input.
    """
    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=100)
        try:
            ax.plot([row[0] for row in curve], [row[2] for row in curve], color="tab:blue", linewidth=1.2)
            for p in breakpoints:
                ax.axvline(p, color="grey", linestyle=":", linewidth=0.8)
            if p_star is not None:
                ax.axvline(p_star, color="tab:red", linestyle="--", linewidth=1.0)
            ax.set_title(title)
            ax.set_xlabel("normalized price p")
            ax.set_ylabel("(C - p) * share")
            ax.set_xlim(0.0, 1.0)

            buf = io.StringIO()
            fig.savefig(buf, format="svg", metadata={"Date": None})
            return buf.getvalue()
        finally:
            plt.close(fig)


def write_profit_curve_svg(path: Union[str, Path], *args, **kwargs) -> None:
    try:
        Path(path).write_text(profit_curve_svg(*args, **kwargs), encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"{path}: cannot write ({exc.strerror})") from exc
