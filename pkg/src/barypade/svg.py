"""Static SVG pole map: nodes as circles, targets as crosses, poles as dots."""

from __future__ import annotations

from .search import CertificateBundle

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]
WIDTH = 640
HEIGHT = 640
LEGEND_W = 170


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def pole_map(bundle: CertificateBundle) -> str:
    plan = bundle.plan
    layers = []
    pts = []
    for k, lv in enumerate(plan.levels):
        nodes = [complex(x) for x in lv.level.nodes]
        target = complex(lv.target)
        cert = bundle.certs[k] if k < len(bundle.certs) else None
        pi = complex(cert.pi_k) if cert is not None and cert.pi_k is not None else None
        layers.append((k, nodes, target, pi))
        pts.extend(nodes + [target] + ([pi] if pi is not None else []))

    xs = [p.real for p in pts]
    ys = [p.imag for p in pts]
    cx, cy = (max(xs) + min(xs)) / 2, (max(ys) + min(ys)) / 2
    half = 0.6 * max(max(xs) - min(xs), max(ys) - min(ys), 1e-12)
    scale = (WIDTH - 40) / (2 * half)

    def to_px(z: complex) -> tuple[str, str]:
        return _fmt(20 + (z.real - cx + half) * scale), _fmt(20 + (cy + half - z.imag) * scale)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH + LEGEND_W}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH + LEGEND_W} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH + LEGEND_W}" height="{HEIGHT}" fill="white"/>',
    ]
    ox, oy = to_px(complex(0, 0))
    out.append(f'<line x1="20" y1="{oy}" x2="{WIDTH - 20}" y2="{oy}" stroke="#ccc"/>')
    out.append(f'<line x1="{ox}" y1="20" x2="{ox}" y2="{HEIGHT - 20}" stroke="#ccc"/>')
    for k, nodes, target, pi in layers:
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<g id="level-{k}">')
        for z in nodes:
            x, y = to_px(z)
            out.append(f'<circle cx="{x}" cy="{y}" r="4" fill="none" stroke="{color}"/>')
        x, y = to_px(target)
        fx, fy = float(x), float(y)
        out.append(f'<path d="M{_fmt(fx - 6)} {_fmt(fy - 6)} L{_fmt(fx + 6)} {_fmt(fy + 6)} '
                   f'M{_fmt(fx - 6)} {_fmt(fy + 6)} L{_fmt(fx + 6)} {_fmt(fy - 6)}" stroke="{color}" stroke-width="2"/>')
        if pi is not None:
            x, y = to_px(pi)
            out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>')
        out.append("</g>")
    lx = WIDTH + 10
    out.append(f'<text x="{lx}" y="30" font-family="sans-serif" font-size="13">o node  x target  * pole</text>')
    for k, _, _, _ in layers:
        color = PALETTE[k % len(PALETTE)]
        y = 55 + 22 * k
        out.append(f'<circle cx="{lx + 6}" cy="{y - 4}" r="5" fill="{color}"/>')
        out.append(f'<text x="{lx + 18}" y="{y}" font-family="sans-serif" font-size="13">'
                   f'level {k} (n = {plan.n(k)})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
