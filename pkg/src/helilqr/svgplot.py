"""Minimal SVG line charts for trajectory channels."""

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 720, 360
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 120, 40, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

# group name -> (title, unit label, channels, scale applied to model units)
GROUPS = {
    "velocities": ("Translational velocity", "ft/s", ("u", "v", "w"), 1.0),
    "attitudes": ("Attitude", "deg", ("phi", "theta"), 180.0 / math.pi),
    "rates": ("Angular rate", "deg/s", ("p", "q", "r"), 180.0 / math.pi),
    "controls": ("Control input", "deg", ("th_lat", "th_lon", "th_ped", "th_col"),
                 180.0 / math.pi),
}


def _nice_ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def line_chart(t, series, title, y_label, x_label="time [s]"):
    """Render ``series`` (label -> y array sampled at ``t``) as an SVG document."""
    t = np.asarray(t, dtype=float)
    ys = [np.asarray(y, dtype=float) for y in series.values()]
    finite = np.concatenate([y[np.isfinite(y)] for y in ys]) if ys else np.zeros(1)
    y_lo, y_hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if y_hi - y_lo < 1e-12 * max(1.0, abs(y_hi)):
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = float(t[0]), float(t[-1]) if t[-1] > t[0] else float(t[0]) + 1.0

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">'
        f"{escape(title)}</text>",
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#444"/>',
    ]
    for xt in _nice_ticks(x_lo, x_hi):
        px = sx(xt)
        out.append(f'<line x1="{px:.2f}" y1="{MARGIN_TOP}" x2="{px:.2f}" '
                   f'y2="{MARGIN_TOP + plot_h}" stroke="#ddd"/>')
        out.append(f'<text x="{px:.2f}" y="{MARGIN_TOP + plot_h + 16}" '
                   f'text-anchor="middle">{xt:g}</text>')
    for yt in _nice_ticks(y_lo, y_hi):
        py = sy(yt)
        out.append(f'<line x1="{MARGIN_LEFT}" y1="{py:.2f}" x2="{MARGIN_LEFT + plot_w}" '
                   f'y2="{py:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{MARGIN_LEFT - 6}" y="{py + 4:.2f}" '
                   f'text-anchor="end">{yt:.4g}</text>')
    out.append(f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 12}" '
               f'text-anchor="middle">{escape(x_label)}</text>')
    out.append(f'<text transform="translate(16 {MARGIN_TOP + plot_h / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">{escape(y_label)}</text>')

    for i, (label, y) in enumerate(series.items()):
        color = COLORS[i % len(COLORS)]
        keep = np.isfinite(y)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t[keep], y[keep]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{pts}"/>')
        ly = MARGIN_TOP + 14 + 18 * i
        lx = MARGIN_LEFT + plot_w + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def trajectory_charts(traj, groups=("velocities", "attitudes", "rates")):
    """SVG text per channel group for a :class:`~helilqr.sim.Trajectory`."""
    charts = {}
    for name in groups:
        if name not in GROUPS:
            raise ValueError(f"unknown plot group {name!r}; choose from {sorted(GROUPS)}")
        title, unit, channels, scale = GROUPS[name]
        series = {f"{ch} [{unit}]": traj.channel(ch) * scale for ch in channels}
        charts[name] = line_chart(traj.times, series, title, unit)
    return charts
