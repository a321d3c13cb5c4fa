"""Minimal deterministic SVG line charts.

No timestamps, no randomness, fixed viewport and palette: the same series
always serialize to the same bytes, so charts are snapshot-testable.
"""

from __future__ import annotations

_WIDTH = 640
_HEIGHT = 400
_MARGIN_L = 62
_MARGIN_R = 18
_MARGIN_T = 40
_MARGIN_B = 52

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _tick_label(value: float) -> str:
    text = f"{value:.4g}"
    return text


def line_chart(title: str, x_label: str, y_label: str, x_values, series) -> str:
    """Render named y-series over shared x-values as an SVG document.

    series is an ordered mapping name -> list of y (None entries skipped).
    """
    x_values = list(x_values)
    names = list(series.keys())
    if not x_values or not names:
        raise ValueError("need at least one x value and one series")
    ys = [y for name in names for y in series[name] if y is not None]
    if not ys:
        raise ValueError("no defined y values to plot")
    x_lo, x_hi = min(x_values), max(x_values)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return _MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
        f'<text x="{_WIDTH / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{_escape(title)}</text>',
    ]
    # axes
    x0, y0 = _MARGIN_L, _MARGIN_T + plot_h
    parts.append(
        f'<line x1="{x0}" y1="{_MARGIN_T}" x2="{x0}" y2="{y0}" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    # ticks: 5 per axis, evenly spaced in data units
    for i in range(5):
        xv = x_lo + (x_hi - x_lo) * i / 4
        xpix = px(xv)
        parts.append(
            f'<line x1="{_fmt(xpix)}" y1="{y0}" x2="{_fmt(xpix)}" '
            f'y2="{y0 + 5}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(xpix)}" y="{y0 + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_tick_label(xv)}</text>'
        )
        yv = y_lo + (y_hi - y_lo) * i / 4
        ypix = py(yv)
        parts.append(
            f'<line x1="{x0 - 5}" y1="{_fmt(ypix)}" x2="{x0}" '
            f'y2="{_fmt(ypix)}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{_fmt(ypix + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_tick_label(yv)}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.0f}" y="{_HEIGHT - 12}" '
        f'text-anchor="middle" font-family="sans-serif" font-size="12">'
        f"{_escape(x_label)}</text>"
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_T + plot_h / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.0f})">'
        f"{_escape(y_label)}</text>"
    )
    # series lines and point markers
    for idx, name in enumerate(names):
        color = _PALETTE[idx % len(_PALETTE)]
        points = [
            (px(x), py(y))
            for x, y in zip(x_values, series[name])
            if y is not None
        ]
        if points:
            coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"/>'
            )
            for x, y in points:
                parts.append(
                    f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5" '
                    f'fill="{color}"/>'
                )
        # legend row
        ly = _MARGIN_T + 8 + idx * 16
        lx = _MARGIN_L + plot_w - 130
        parts.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{lx + 24}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="11">{_escape(name)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )
