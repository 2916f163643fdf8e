"""Assemble figures and a static index page from a harness output tree."""

from __future__ import annotations

import html
from pathlib import Path

from bouslp_report import figures
from bouslp_report.reader import (
    MalformedRecord,
    discover,
    read_estimates_csv,
    read_json,
    read_snapshot,
)


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in text)


def render_report(input_dir, output_dir, style_seed: int = 0) -> str:
    """Render every discovered record set; returns the index page path.

    Malformed inputs are skipped and listed as warnings on the index.
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    found = discover(input_dir)
    sections: list[dict] = []
    warnings: list[str] = []

    for csv_path in found["csvs"]:
        try:
            config_hash, series = read_estimates_csv(csv_path)
        except MalformedRecord as err:
            warnings.append(str(err))
            continue
        for check_id in sorted(series):
            name = f"{_slug(check_id)}_{config_hash or 'nohash'}.png"
            fig = figures.check_series_figure(check_id, series[check_id], style_seed)
            figures.save(fig, out / name)
            sections.append({
                "title": f"{check_id}",
                "source": str(csv_path),
                "config_hash": config_hash,
                "image": name,
            })

    for twin_path in found["twin_runs"]:
        doc = read_json(twin_path)
        chash = doc.get("config_hash", "nohash")
        name = f"twin_run_{_slug(Path(twin_path).stem)}_{chash or 'nohash'}.png"
        fig = figures.osgood_overlay_figure(doc, style_seed)
        figures.save(fig, out / name)
        sections.append({
            "title": "twin-run envelope overlay",
            "source": str(twin_path),
            "config_hash": chash,
            "image": name,
        })

    for approx_path in found["approximations"]:
        doc = read_json(approx_path)
        chash = doc.get("config_hash", "nohash")
        name = f"decay_fit_{_slug(Path(approx_path).stem)}_{chash or 'nohash'}.png"
        fig, refit = figures.decay_fit_figure(doc, style_seed)
        figures.save(fig, out / name)
        sections.append({
            "title": "truncation decay fit",
            "source": str(approx_path),
            "config_hash": chash,
            "image": name,
            "note": f"refit slope {refit:.3f} vs harness {doc.get('slope'):.3f}",
        })

    summary_rows = []
    for s in found["summaries"]:
        doc = read_json(s)
        summary_rows.append((str(s), doc.get("config_hash", ""),
                             doc.get("all_passed")))

    index = out / "index.html"
    index.write_text(_index_html(sections, warnings, summary_rows))
    return str(index)


def render_fields(snapshot_paths, output_dir, style_seed: int = 0) -> list[str]:
    """Heatmaps for field snapshots; rejects files whose shape disagrees
    with their sidecar."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for path in snapshot_paths:
        values, meta = read_snapshot(path)
        chash = meta.get("config_hash", "") or "nohash"
        name = f"field_{_slug(Path(path).stem)}_{chash}.png"
        fig = figures.field_heatmap_figure(values, meta, style_seed)
        figures.save(fig, out / name)
        written.append(str(out / name))
    return written


def _index_html(sections, warnings, summary_rows) -> str:
    parts = [
        "<!doctype html>",
        "<html><head><meta charset='utf-8'><title>harness report</title>",
        "<style>body{font-family:sans-serif;margin:2em;max-width:70em}"
        "figure{margin:1.5em 0;padding:1em;border:1px solid #ccc;border-radius:8px}"
        "figcaption{font-size:0.85em;color:#444;margin-top:0.5em}"
        ".warn{color:#a00}table{border-collapse:collapse}"
        "td,th{border:1px solid #bbb;padding:0.3em 0.7em;font-size:0.9em}"
        "</style></head><body>",
        "<h1>harness report</h1>",
    ]
    if summary_rows:
        parts.append("<h2>runs</h2><table><tr><th>summary</th>"
                     "<th>config hash</th><th>all passed</th></tr>")
        for path, chash, passed in summary_rows:
            parts.append(
                f"<tr><td>{html.escape(path)}</td><td>{html.escape(chash)}</td>"
                f"<td>{passed}</td></tr>"
            )
        parts.append("</table>")
    if warnings:
        parts.append("<h2 class='warn'>warnings</h2><ul>")
        for w in warnings:
            parts.append(f"<li class='warn'>{html.escape(w)}</li>")
        parts.append("</ul>")
    if not sections:
        parts.append("<p><em>no records found.</em></p>")
    for sec in sections:
        caption = (f"{html.escape(sec['title'])} &mdash; "
                   f"source {html.escape(sec['source'])}, "
                   f"config {html.escape(sec['config_hash'] or 'n/a')}")
        if "note" in sec:
            caption += f"<br>{html.escape(sec['note'])}"
        parts.append(
            f"<figure><img src='{sec['image']}' width='760'>"
            f"<figcaption>{caption}</figcaption></figure>"
        )
    parts.append("</body></html>")
    return "\n".join(parts) + "\n"
