"""Minimal SVG polyline plots.

CSV is the normative output everywhere; these renderings are a best-effort
visual aid, deliberately free of plotting dependencies.  The effective
configuration is embedded in a <desc> element for auditability.
"""

from __future__ import annotations

import json
import math

WIDTH, HEIGHT = 720, 480
MARGIN = 60
PALETTE = ("#1f77b4", "#111111", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd")


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def render_polylines(
    series: list[dict],
    x_label: str,
    y_label: str,
    title: str,
    config: dict | None = None,
    markers: list[dict] | None = None,
) -> str:
    """Render series = [{name, x, y, dashed?}] into a standalone SVG string."""
    xs = [v for s in series for v in s["x"]]
    ys = [v for s in series for v in s["y"]]
    for m in markers or []:
        xs.append(m["x"])
        ys.append(m["y"])
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad_x = 0.03 * (x_hi - x_lo)
    pad_y = 0.06 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - pad_x, x_hi + pad_x
    y_lo, y_hi = y_lo - pad_y, y_hi + pad_y

    def px(x: float) -> float:
        return MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def py(y: float) -> float:
        return HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
    ]
    if config is not None:
        parts.append(f"<desc>{json.dumps(config, sort_keys=True)}</desc>")
    parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    # axes
    ax = (
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>'
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>'
    )
    parts.append(ax)
    for t in _ticks(x_lo, x_hi):
        parts.append(
            f'<line x1="{px(t):.2f}" y1="{HEIGHT - MARGIN}" x2="{px(t):.2f}" '
            f'y2="{HEIGHT - MARGIN + 5}" stroke="black"/>'
            f'<text x="{px(t):.2f}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        parts.append(
            f'<line x1="{MARGIN - 5}" y1="{py(t):.2f}" x2="{MARGIN}" y2="{py(t):.2f}" stroke="black"/>'
            f'<text x="{MARGIN - 8}" y="{py(t) + 4:.2f}" text-anchor="end">{_fmt(t)}</text>'
        )
    parts.append(
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle">{x_label}</text>'
        f'<text x="16" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {HEIGHT / 2})">{y_label}</text>'
        f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="14">{title}</text>'
    )
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s["x"], s["y"]))
        dash = ' stroke-dasharray="6 4"' if s.get("dashed") else ""
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>'
        )
        ly = MARGIN + 16 * i + 8
        parts.append(
            f'<line x1="{WIDTH - MARGIN - 110}" y1="{ly}" x2="{WIDTH - MARGIN - 86}" '
            f'y2="{ly}" stroke="{color}" stroke-width="1.5"{dash}/>'
            f'<text x="{WIDTH - MARGIN - 80}" y="{ly + 4}">{s["name"]}</text>'
        )
    for m in markers or []:
        parts.append(
            f'<circle cx="{px(m["x"]):.2f}" cy="{py(m["y"]):.2f}" r="4" '
            f'fill="{m.get("color", "red")}"/>'
        )
        if m.get("name"):
            parts.append(
                f'<text x="{px(m["x"]) + 6:.2f}" y="{py(m["y"]) - 6:.2f}">{m["name"]}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
