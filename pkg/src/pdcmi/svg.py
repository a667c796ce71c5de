"""Tiny deterministic SVG writers for maps, bars, and edge diagrams.

No plotting dependency: these emit a fixed layout with fixed color scales
so images from different runs are directly comparable, and byte-identical
for identical inputs.
"""

import math
from xml.sax.saxutils import escape

import numpy as np

from .errors import ContractError
from .io import CLASS1

_CLASS_COLORS = {1: "#c0392b", 2: "#2471a3"}


def _f(value):
    return format(float(value), ".2f")


def _heat_color(t):
    # white -> blue -> dark red, fixed three-stop ramp
    t = min(max(t, 0.0), 1.0)
    if t < 0.5:
        u = t / 0.5
        r, g, b = (1 - u) * 255 + u * 52, (1 - u) * 255 + u * 118, 255
    else:
        u = (t - 0.5) / 0.5
        r, g, b = 52 + u * (170 - 52), 118 - u * 118, 255 - u * 200
    return "#%02x%02x%02x" % (int(r), int(g), int(b))


def _document(width, height, body, title):
    head = ('<svg xmlns="http://www.w3.org/2000/svg" width="%d" '
            'height="%d" viewBox="0 0 %d %d">' % (width, height, width,
                                                  height))
    caption = ('<text x="%s" y="16" font-family="sans-serif" '
               'font-size="13" font-weight="bold">%s</text>'
               % (_f(10), escape(title)))
    return head + caption + body + "</svg>"


def svg_heatmap(values, row_labels, col_labels, title, max_value=None):
    """Matrix heat map on a fixed [0, max] color scale; max is printed."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ContractError("heatmap needs a 2-D matrix")
    if values.shape != (len(row_labels), len(col_labels)):
        raise ContractError("labels do not match matrix shape")
    if max_value is None:
        max_value = float(values.max()) if values.size else 0.0
    cell = 22
    left, top = 58, 28
    width = left + cell * len(col_labels) + 16
    height = top + cell * len(row_labels) + 44
    parts = []
    scale = max_value if max_value > 0 else 1.0
    for i, rlab in enumerate(row_labels):
        parts.append('<text x="%s" y="%s" font-family="sans-serif" '
                     'font-size="10" text-anchor="end">%s</text>'
                     % (_f(left - 4), _f(top + i * cell + cell * 0.7),
                        escape(str(rlab))))
        for j in range(len(col_labels)):
            parts.append('<rect x="%s" y="%s" width="%d" height="%d" '
                         'fill="%s"/>' % (_f(left + j * cell),
                                          _f(top + i * cell), cell, cell,
                                          _heat_color(values[i, j] / scale)))
    for j, clab in enumerate(col_labels):
        parts.append('<text x="%s" y="%s" font-family="sans-serif" '
                     'font-size="10" text-anchor="middle">%s</text>'
                     % (_f(left + j * cell + cell / 2),
                        _f(top + cell * len(row_labels) + 14),
                        escape(str(clab))))
    parts.append('<text x="%s" y="%s" font-family="sans-serif" '
                 'font-size="11">scale max = %s</text>'
                 % (_f(left), _f(top + cell * len(row_labels) + 34),
                    format(max_value, ".6g")))
    return _document(width, height, "".join(parts), title)


def svg_bars(series, labels, title, colors=None):
    """Grouped horizontal bars; series maps name -> list of values."""
    names = list(series)
    if not names:
        raise ContractError("no series")
    rows = len(labels)
    for name in names:
        if len(series[name]) != rows:
            raise ContractError("series %r does not match labels" % name)
    if colors is None:
        palette = ["#c0392b", "#2471a3", "#1e8449", "#9a7d0a"]
        colors = {n: palette[i % len(palette)] for i, n in enumerate(names)}
    peak = max(max(abs(v) for v in series[n]) for n in names) or 1.0
    bar = 10
    group = bar * len(names) + 8
    left, top = 64, 30
    plot_w = 300
    width = left + plot_w + 140
    height = top + rows * group + 20
    parts = []
    for i, lab in enumerate(labels):
        y0 = top + i * group
        parts.append('<text x="%s" y="%s" font-family="sans-serif" '
                     'font-size="10" text-anchor="end">%s</text>'
                     % (_f(left - 4), _f(y0 + group / 2), escape(str(lab))))
        for s, name in enumerate(names):
            val = series[name][i]
            parts.append('<rect x="%s" y="%s" width="%s" height="%d" '
                         'fill="%s"/>' % (_f(left), _f(y0 + s * bar),
                                          _f(plot_w * abs(val) / peak), bar,
                                          colors[name]))
    for s, name in enumerate(names):
        parts.append('<rect x="%s" y="%s" width="10" height="10" '
                     'fill="%s"/>' % (_f(left + plot_w + 16),
                                      _f(top + s * 16), colors[name]))
        parts.append('<text x="%s" y="%s" font-family="sans-serif" '
                     'font-size="10">%s</text>'
                     % (_f(left + plot_w + 30), _f(top + s * 16 + 9),
                        escape(str(name))))
    return _document(width, height, "".join(parts), title)


def svg_digraph(edges, channel_names, title):
    """Edges on a circular channel layout, colored by predominant class.

    edges carry (from_channel, to_channel, predominant_class); arrowheads
    sit at the target end.
    """
    n = len(channel_names)
    if n < 2:
        raise ContractError("need at least 2 channels")
    size = 420
    cx = cy = size / 2
    radius = size / 2 - 50
    pos = []
    for i in range(n):
        ang = 2 * math.pi * i / n - math.pi / 2
        pos.append((cx + radius * math.cos(ang),
                    cy + radius * math.sin(ang)))
    parts = ['<defs>']
    for label, color in _CLASS_COLORS.items():
        parts.append('<marker id="arr%d" viewBox="0 0 10 10" refX="9" '
                     'refY="5" markerWidth="7" markerHeight="7" '
                     'orient="auto-start-reverse">'
                     '<path d="M 0 0 L 10 5 L 0 10 z" fill="%s"/></marker>'
                     % (label, color))
    parts.append('</defs>')
    for edge in edges:
        x1, y1 = pos[edge.from_channel]
        x2, y2 = pos[edge.to_channel]
        # pull endpoints off the node circles
        d = math.hypot(x2 - x1, y2 - y1) or 1.0
        ux, uy = (x2 - x1) / d, (y2 - y1) / d
        color = _CLASS_COLORS.get(edge.predominant_class,
                                  _CLASS_COLORS[CLASS1])
        parts.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="%s" '
                     'stroke-width="1.6" marker-end="url(#arr%d)"/>'
                     % (_f(x1 + 14 * ux), _f(y1 + 14 * uy),
                        _f(x2 - 14 * ux), _f(y2 - 14 * uy), color,
                        edge.predominant_class))
    for i, name in enumerate(channel_names):
        x, y = pos[i]
        parts.append('<circle cx="%s" cy="%s" r="12" fill="#f4f6f6" '
                     'stroke="#555"/>' % (_f(x), _f(y)))
        parts.append('<text x="%s" y="%s" font-family="sans-serif" '
                     'font-size="9" text-anchor="middle">%s</text>'
                     % (_f(x), _f(y + 3), escape(str(name))))
    return _document(size, size, "".join(parts), title)
