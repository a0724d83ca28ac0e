#!/usr/bin/env python3
"""Regenerate the bundled fixture corpus (byte-stable, no randomness).

Writes:
  fixtures/corpus/<domain>/<domain>-<k>.json   7 task domains x 5 variants
  fixtures/flows/...                           program pairs for score tests
  fixtures/manifests/...                       evaluation manifests
"""

from __future__ import annotations

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

INJECT = {"payload": "", "topic": "start", "once": True, "repeat": ""}
DEBUG = {"active": True, "console": False, "complete": "payload", "target": "sidebar"}

SEARCH_OPEN = {
    "url": "https://www.google.com/",
    "tab": "current",
    "focus": False,
    "wait_ms": 250,
    "incognito": False,
    "name": "search-page",
}
SCRAPE = {"selector": "div.result", "attribute": "text", "limit": 10, "flatten": True}


def _chain(specs: list[tuple[str, str, dict]]) -> list[dict]:
    """Node records wired into one chain, in order."""
    nodes = []
    for k, (node_id, node_type, attrs) in enumerate(specs):
        record = {"id": node_id, "type": node_type, **attrs}
        record["wires"] = [[specs[k + 1][0]]] if k + 1 < len(specs) else []
        nodes.append(record)
    return nodes


def _domain_programs(domain: str, variant_count: int = 5) -> list[list[dict]]:
    programs = []
    for k in range(variant_count):
        if domain == "cron-schedule":
            specs = [
                ("n0", "inject", INJECT),
                ("n1", "schedule-trigger", {
                    "cron": f"0 {k} * * *", "timezone": "UTC", "payload": "tick",
                    "once": False, "name": "scheduler", "repeat": True,
                }),
                ("n2", "function", {"func": "return msg;", "outputs": 1, "noerr": 0}),
                ("n3", "debug", DEBUG),
            ]
        elif domain == "form-builder":
            specs = [
                ("n0", "inject", INJECT),
                ("n1", "form", {
                    "fields": ["name", "score", f"field-{k}"], "title": "Entry",
                    "submit": "OK", "layout": "vertical", "width": 320, "validate": True,
                }),
                ("n2", "switch", {"property": "payload", "rules": ["nonempty"], "outputs": 1}),
                ("n3", "template", {"template": "{{payload}}", "syntax": "mustache", "output": "str"}),
                ("n4", "debug", DEBUG),
            ]
        elif domain == "google-search":
            specs = [
                ("n0", "inject", INJECT),
                ("n1", "open", SEARCH_OPEN),
                ("n2", "type", {
                    "text": f"query number {k}", "selector": "input[name=q]",
                    "delay_ms": 20, "enter": True, "clear": True, "focus": True,
                }),
                ("n3", "scrape", SCRAPE),
                ("n4", "debug", DEBUG),
            ]
        elif domain == "search-to-csv":
            specs = [
                ("n0", "inject", INJECT),
                ("n1", "open", SEARCH_OPEN),
                ("n2", "type", {
                    "text": "saved search", "selector": "input[name=q]",
                    "delay_ms": 20, "enter": True, "clear": True, "focus": True,
                }),
                ("n3", "scrape", SCRAPE),
                ("n4", "csv", {"columns": "title,link", "header": True, "separator": ","}),
                ("n5", "file", {
                    "path": f"results-{k}.csv", "append": False, "encoding": "utf-8",
                    "create_dirs": True, "newline": "lf", "mode": "write",
                }),
                ("n6", "debug", DEBUG),
            ]
        elif domain == "telegram-reply":
            specs = [
                ("n0", "inject", INJECT),
                ("n1", "telegram-in", {"bot": "helper", "chat": "any", "types": ["text"]}),
                ("n2", "switch", {"property": "payload", "rules": ["contains"], "outputs": 1}),
                ("n3", "template", {
                    "template": f"canned reply {k}", "syntax": "mustache",
                    "field": "payload", "output": "str", "name": "reply", "fallback": "",
                }),
                ("n4", "telegram-out", {"bot": "helper", "silent": False}),
                ("n5", "debug", DEBUG),
            ]
        elif domain == "twitter-fetch":
            specs = [
                ("n0", "inject", INJECT),
                ("n1", "twitter-search", {
                    "topic": f"#topic{k}", "count": 20, "result_type": "recent",
                    "lang": "en", "include_rts": False, "name": "search",
                }),
                ("n2", "function", {"func": "return msg.tweets;", "outputs": 1, "noerr": 0}),
                ("n3", "debug", DEBUG),
            ]
        elif domain == "youtube-play":
            specs = [
                ("n0", "inject", INJECT),
                ("n1", "open", {
                    "url": f"https://video.example/watch?v=clip{k}", "tab": "new",
                    "focus": True, "wait_ms": 500, "incognito": True, "name": "video-page",
                }),
                ("n2", "find-tab", {"match": "video.example", "activate": True}),
                ("n3", "click", {"selector": "button.play", "button": "left", "count": 1}),
                ("n4", "debug", DEBUG),
            ]
        else:
            raise ValueError(domain)
        programs.append(_chain(specs))
    return programs


DOMAINS = (
    "cron-schedule",
    "form-builder",
    "google-search",
    "search-to-csv",
    "telegram-reply",
    "twitter-fetch",
    "youtube-play",
)


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_corpus() -> dict[str, list[list[dict]]]:
    corpus = {}
    for domain in DOMAINS:
        programs = _domain_programs(domain)
        corpus[domain] = programs
        for k, program in enumerate(programs):
            _write_json(FIXTURES / "corpus" / domain / f"{domain}-{k}.json", program)
    return corpus


def write_flows(corpus) -> None:
    reference = corpus["google-search"][0]
    # Same structure, one node dropped and one attribute changed.
    generated = [dict(record) for record in reference if record["id"] != "n3"]
    for record in generated:
        if record["id"] == "n2":
            record["delay_ms"] = 35
            record["wires"] = [["n4"]]
    _write_json(FIXTURES / "flows" / "pair-reference.json", reference)
    _write_json(FIXTURES / "flows" / "pair-generated.json", generated)
    _write_json(FIXTURES / "flows" / "identical.json", corpus["cron-schedule"][0])
    malformed = FIXTURES / "flows" / "malformed.txt"
    malformed.parent.mkdir(parents=True, exist_ok=True)
    malformed.write_text('[{"id": "n0", "type": "inject"', encoding="utf-8")


def write_manifests(corpus) -> None:
    seen = corpus["cron-schedule"][0]
    _write_json(
        FIXTURES / "manifests" / "single_task.json",
        {
            "system": {"name": "fixture-system", "priors_rho": 1.0},
            "curriculum": {
                "domains": [
                    {
                        "id": "seen-domain",
                        "sample_count": 1,
                        "compute_teraflops": 2.0,
                        "training_time_seconds": 1.0,
                        "tasks": [{"spec_text": "the seen task", "reference_program": seen}],
                    }
                ]
            },
            "test_tasks": [
                {
                    "id": "exact-repeat",
                    "spec_text": "the seen task again",
                    "reference_program": seen,
                    "generated_program": seen,
                }
            ],
        },
    )

    partial = [dict(record) for record in corpus["telegram-reply"][1]]
    for record in partial:
        if record["id"] == "n3":
            record["fallback"] = "sorry?"
    _write_json(
        FIXTURES / "manifests" / "two_domain.json",
        {
            "system": {"name": "fixture-system-2", "priors_rho": 1.0, "notes": "fixture"},
            "curriculum": {
                "domains": [
                    {
                        "id": "messaging",
                        "sample_count": 16,
                        "compute_teraflops": 4.0,
                        "training_time_seconds": 256.0,
                        "tasks": [
                            {"spec_text": "reply A", "reference_program": corpus["telegram-reply"][0]},
                            {"spec_text": "reply B", "reference_program": corpus["telegram-reply"][1]},
                        ],
                    },
                    {
                        "id": "scheduling",
                        "sample_count": 2,
                        "compute_petaflops": 0.002,
                        "training_time_seconds": 1.0,
                        "tasks": [
                            {"spec_text": "cron A", "reference_program": corpus["cron-schedule"][0]},
                        ],
                    },
                ]
            },
            "test_tasks": [
                {
                    "id": "seen-reply",
                    "spec_text": "reply B again",
                    "reference_program": corpus["telegram-reply"][1],
                    "generated_program": corpus["telegram-reply"][1],
                },
                {
                    "id": "near-reply",
                    "spec_text": "reply B with a fallback",
                    "reference_program": corpus["telegram-reply"][1],
                    "generated_program": partial,
                },
                {
                    "id": "broken-output",
                    "spec_text": "a cron the system failed on",
                    "reference_program": corpus["cron-schedule"][2],
                    "generated_program": "[{\"id\": \"oops\"",
                },
            ],
        },
    )


def main() -> None:
    corpus = write_corpus()
    write_flows(corpus)
    write_manifests(corpus)
    count = sum(1 for _ in FIXTURES.rglob("*") if _.is_file())
    print(f"wrote fixtures under {FIXTURES} ({count} files)")


if __name__ == "__main__":
    main()
