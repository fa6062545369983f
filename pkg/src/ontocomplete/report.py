"""Text, JSON and HTML renderings of an evaluation."""

from __future__ import annotations

import html
import json
from importlib import resources

from .advisor import ImprovementAction, recommend_improvements
from .octree import SUBLEVELS, ConditionNode, EvaluationResult


def pct(x: float) -> str:
    return f"{x * 100:.1f}%"


def node_relative_weights(result: EvaluationResult) -> dict[str, float]:
    out: dict[str, float] = {}

    def descend(node: ConditionNode, acc: float) -> None:
        out[node.path] = acc
        for child, _ in node.children:
            descend(child, acc * result.local_weights[child.path])

    descend(result.tree, 1.0)
    return out


def sublevel_prices(result: EvaluationResult) -> dict[str, float | None]:
    """Weighted price of each sublevel across components (None when never evaluated)."""
    rel = node_relative_weights(result)
    acc: dict[str, list[float]] = {s: [0.0, 0.0] for s in SUBLEVELS}
    for node in result.tree.walk():
        parts = node.path.split("/")
        if len(parts) != 3 or parts[2] not in acc:
            continue
        price = result.node_prices.get(node.path)
        if price is None or rel[node.path] == 0:
            continue
        acc[parts[2]][0] += rel[node.path] * price
        acc[parts[2]][1] += rel[node.path]
    return {s: (num / den if den > 0 else None) for s, (num, den) in acc.items()}


def to_json(result: EvaluationResult, actions: list[ImprovementAction] | None = None) -> dict:
    actions = recommend_improvements(result) if actions is None else actions
    rel = node_relative_weights(result)
    return {
        "oc": result.oc,
        "phase": result.phase.value if result.phase else None,
        "element_counts": result.element_counts.as_dict(),
        "nodes": [
            {
                "path": node.path,
                "weight": result.local_weights[node.path],
                "relative_weight": rel[node.path],
                "price": result.node_prices.get(node.path),
            }
            for node in result.tree.walk()
        ],
        "actions": [
            {"check_id": a.check_id, "gain": a.gain, "findings": [f.as_dict() for f in a.findings]}
            for a in actions
        ],
    }


def dumps(result: EvaluationResult) -> str:
    return json.dumps(to_json(result), indent=2, sort_keys=False)


def report_schema() -> dict:
    text = resources.files("ontocomplete").joinpath("schemas/report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _bar(x: float, width: int = 20) -> str:
    filled = int(round(x * width))
    return "[" + "#" * filled + "-" * (width - filled) + "]"


def to_text(result: EvaluationResult, actions: list[ImprovementAction] | None = None, details: bool = False) -> str:
    actions = recommend_improvements(result) if actions is None else actions
    rel = node_relative_weights(result)
    c = result.element_counts
    lines = [f"Ontology completeness: {pct(result.oc)} {_bar(result.oc)}"]
    if result.phase:
        lines.append(f"Phase: {result.phase.value} ({result.phase.title})")
    lines.append(
        f"Elements: classes={c.classes} properties={c.properties} axioms={c.axioms} individuals={c.individuals}"
    )
    lines += ["", "Conditions:"]
    for node in result.tree.walk():
        depth = node.path.count("/")
        price = result.node_prices.get(node.path)
        shown = "skipped" if price is None else pct(price)
        lines.append(
            f"  {'  ' * depth}{node.name:<{34 - 2 * depth}} w={result.local_weights[node.path]:.3f} "
            f"w'={rel[node.path]:.3f} price={shown}"
        )
    lines += ["", "Improvement actions:"]
    if not actions:
        lines.append("  none")
    for a in actions:
        n = len(a.findings)
        lines.append(f"  +{a.gain:.1f}%  {a.description} ({a.check_id}, {n} finding{'' if n == 1 else 's'})")
        if details:
            for f in a.findings:
                lines.append(f"      - [{f.kind}] {f.suggestion}")
    return "\n".join(lines) + "\n"


_HTML = """<!DOCTYPE html>
<html lang="en">
<head><meta charset="utf-8"><title>Ontology completeness</title>
<style>
body {{ font-family: sans-serif; margin: 2em; }}
.bar {{ width: 20em; height: 1.2em; background: #ddd; }}
.bar > div {{ height: 100%; background: #4a7; }}
table {{ border-collapse: collapse; margin: 1em 0; }}
td, th {{ border: 1px solid #999; padding: 0.2em 0.6em; text-align: left; }}
</style></head>
<body>
<h1>Ontology completeness: <span id="oc">{oc}</span></h1>
<div class="bar"><div style="width: {oc}"></div></div>
<p>Phase: {phase}</p>
<table id="counts"><tr><th>classes</th><th>properties</th><th>axioms</th><th>individuals</th></tr>
<tr><td>{classes}</td><td>{properties}</td><td>{axioms}</td><td>{individuals}</td></tr></table>
<h2>Sublevels</h2>
<table id="sublevels"><tr><th>sublevel</th><th>price</th></tr>
{sublevels}
</table>
<h2>Conditions</h2>
<table id="nodes"><tr><th>path</th><th>weight</th><th>relative weight</th><th>price</th></tr>
{nodes}
</table>
<h2>Improvement actions</h2>
<table id="actions"><tr><th>gain</th><th>action</th><th>check</th><th>findings</th></tr>
{actions}
</table>
</body></html>
"""


def to_html(result: EvaluationResult, actions: list[ImprovementAction] | None = None) -> str:
    actions = recommend_improvements(result) if actions is None else actions
    rel = node_relative_weights(result)
    esc = html.escape
    sub_rows = "\n".join(
        f"<tr><td>{s}</td><td>{'n/a' if p is None else pct(p)}</td></tr>" for s, p in sublevel_prices(result).items()
    )
    node_rows = "\n".join(
        f"<tr><td>{esc(n.path)}</td><td>{result.local_weights[n.path]:.3f}</td><td>{rel[n.path]:.3f}</td>"
        f"<td>{'skipped' if result.node_prices.get(n.path) is None else pct(result.node_prices[n.path])}</td></tr>"  # type: ignore[arg-type]
        for n in result.tree.walk()
    )
    action_rows = "\n".join(
        f"<tr><td>+{a.gain:.1f}%</td><td>{esc(a.description)}</td><td>{esc(a.check_id)}</td><td><ul>"
        + "".join(f"<li>{esc(f.suggestion)}</li>" for f in a.findings)
        + "</ul></td></tr>"
        for a in actions
    )
    c = result.element_counts
    return _HTML.format(
        oc=pct(result.oc),
        phase=esc(f"{result.phase.value} ({result.phase.title})" if result.phase else "custom"),
        classes=c.classes,
        properties=c.properties,
        axioms=c.axioms,
        individuals=c.individuals,
        sublevels=sub_rows,
        nodes=node_rows,
        actions=action_rows,
    )
