"""Deterministic tree drawings: indented text and standalone SVG.

Tokens are laid out in id order left-to-right regardless of script
direction so arcs stay unambiguous; pass rtl=True to mirror the SVG
for right-to-left reading.
"""

from __future__ import annotations

from .conllx import Sentence, Treebank

_FONT_STACK = "'Noto Naskh Arabic', 'Amiri', 'DejaVu Sans', sans-serif"


def render_tree_text(sentence: Sentence) -> str:
    """Indented head-to-dependent lines annotated with coarse POS."""
    children: dict[int, list[int]] = {}
    for tok in sentence:
        children.setdefault(tok.head, []).append(tok.id)

    lines: list[str] = []

    def walk(token_id: int, depth: int):
        tok = sentence.token_by_id(token_id)
        pos = tok.cpostag or tok.postag or "?"
        text = "%s (%s) [%s]" % (tok.form, pos, tok.deprel or "?")
        if depth == 0:
            lines.append("ROOT → " + text)
        else:
            lines.append("  " * depth + "→ " + text)
        for child in children.get(token_id, ()):
            walk(child, depth + 1)

    visited_roots = children.get(0, ())
    for root_child in visited_roots:
        walk(root_child, 0)
    # tokens unreachable from the root (invalid trees) still get printed
    reachable = set()

    def collect(token_id):
        for child in children.get(token_id, ()):
            if child not in reachable:
                reachable.add(child)
                collect(child)

    collect(0)
    for tok in sentence:
        if tok.id not in reachable:
            lines.append(
                "(unreachable) %s (%s) [%s]"
                % (tok.form, tok.cpostag or "?", tok.deprel or "?")
            )
    return "\n".join(lines) + "\n"


def _svg_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def render_tree_svg(sentence: Sentence, rtl: bool = False) -> str:
    """One sentence as a standalone SVG arc diagram."""
    n = len(sentence)
    spacing = 90
    margin = 60
    width = margin * 2 + spacing * max(n - 1, 0)
    max_span = max((abs(t.head - t.id) for t in sentence), default=1)
    arc_unit = 28
    top = 30
    arc_base = top + max_span * arc_unit
    baseline = arc_base + 40
    height = baseline + 50

    def x_of(token_id: int) -> float:
        x = margin + (token_id - 1) * spacing
        return width - x if rtl else x

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (width, height, width, height),
        '<style>text { font-family: %s; }</style>' % _FONT_STACK,
    ]
    # tokens and POS annotations on the baseline
    for tok in sentence:
        x = x_of(tok.id)
        parts.append(
            '<text x="%.1f" y="%d" text-anchor="middle" font-size="16">%s</text>'
            % (x, baseline, _svg_escape(tok.form))
        )
        parts.append(
            '<text x="%.1f" y="%d" text-anchor="middle" font-size="11" '
            'fill="#555">%s</text>' % (x, baseline + 18, _svg_escape(tok.cpostag or "?"))
        )
    # arcs
    for tok in sentence:
        label = _svg_escape(tok.deprel or "?")
        x_dep = x_of(tok.id)
        if tok.head == 0:
            parts.append(
                '<line x1="%.1f" y1="%d" x2="%.1f" y2="%d" stroke="#333"/>'
                % (x_dep, top - 14, x_dep, arc_base + 16)
            )
            parts.append(
                '<text x="%.1f" y="%d" text-anchor="middle" font-size="11" '
                'fill="#036">%s</text>' % (x_dep + 4, top - 18, label)
            )
            continue
        x_head = x_of(tok.head)
        span = abs(tok.head - tok.id)
        peak = arc_base + 16 - span * arc_unit
        mid = (x_head + x_dep) / 2.0
        parts.append(
            '<path d="M %.1f %d Q %.1f %d %.1f %d" fill="none" stroke="#333"/>'
            % (x_head, arc_base + 16, mid, peak, x_dep, arc_base + 16)
        )
        parts.append(
            '<text x="%.1f" y="%d" text-anchor="middle" font-size="11" '
            'fill="#036">%s</text>'
            % (mid, (arc_base + 16 + peak) // 2 - 4, label)
        )
        parts.append(
            '<circle cx="%.1f" cy="%d" r="2.5" fill="#333"/>'
            % (x_dep, arc_base + 16)
        )
    parts.append(
        '<text x="%.1f" y="%d" text-anchor="middle" font-size="11" '
        'fill="#777">ROOT</text>' % (width / 2.0, 12)
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_tree(sentence: Sentence, format: str = "text", rtl: bool = False) -> str:
    if format == "svg":
        return render_tree_svg(sentence, rtl=rtl)
    return render_tree_text(sentence)


def render_treebank(tb: Treebank, format: str = "text", rtl: bool = False) -> str:
    if format == "svg":
        return "".join(render_tree_svg(s, rtl=rtl) for s in tb.sentences)
    return "\n".join(render_tree_text(s) for s in tb.sentences)
