#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under tests/fixtures.

Output is a pure function of the seeds below; rerunning must not change
any checked-in file.
"""
import csv
import itertools
import json
import math
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

WORDS = (
    "morning evening work class rent friend sister brother phone sleep coffee city bus "
    "exam shift boss landlord kitchen weekend dog cat winter summer doctor appointment "
    "money car train apartment roommate school project deadline team game movie music "
    "walk gym dinner lunch breakfast book email message meeting family parents trip"
).split()


def sentence(rng, n=12):
    words = [rng.choice(WORDS) for _ in range(n)]
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


def unique_texts(rng, count, sentences=3):
    seen = set()
    out = []
    while len(out) < count:
        text = " ".join(sentence(rng) for _ in range(sentences))
        if text not in seen:
            seen.add(text)
            out.append(text)
    return out


def write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def depression_stress_pair():
    """200 distinct posts with known cells, plus the messiness the loaders
    must absorb: duplicated Dreaddit rows (one with a conflicting label),
    case and whitespace drift on the DepSeverity side, and both spellings of
    the minimal severity."""
    rng = random.Random(2024)
    cells = {"a": 62, "b": 18, "c": 51, "d": 69}
    texts = unique_texts(rng, sum(cells.values()))
    labels = []
    for cell, n in cells.items():
        dep = cell in ("a", "b")
        stress = cell in ("a", "c")
        labels += [(dep, stress)] * n
    rng.shuffle(labels)

    dreaddit = []
    for i, (text, (dep, stress)) in enumerate(zip(texts, labels)):
        dreaddit.append([f"t{i:04d}", rng.choice(["anxiety", "ptsd", "stress", "survivorsofabuse"]), text,
                         int(stress), round(rng.uniform(0.5, 1.0), 3)])
    # Duplicates: identical text later in the file. The last one flips the label.
    for k, i in enumerate([5, 17, 40, 111]):
        row = list(dreaddit[i])
        row[0] = f"dup{k}"
        if k == 3:
            row[3] = 1 - row[3]
        dreaddit.append(row)

    depseverity = []
    for i, (text, (dep, stress)) in enumerate(zip(texts, labels)):
        if dep:
            severity = rng.choice(["mild", "moderate", "severe"])
        else:
            severity = rng.choice(["minimal", "minimum"])
        if i % 7 == 0:
            text = text.upper()
        if i % 5 == 0:
            text = "  " + text.replace(" ", "   ", 2) + "\n"
        depseverity.append([text, severity])
    rng.shuffle(depseverity)

    write_csv(ROOT / "dd" / "dreaddit.csv", ["id", "subreddit", "text", "label", "confidence"], dreaddit)
    write_csv(ROOT / "dd" / "depseverity.csv", ["text", "label"], depseverity)
    expected = {
        "posts": len(texts),
        "dreaddit_rows": len(dreaddit),
        "depseverity_rows": len(depseverity),
        "duplicate_conflicts": 1,
        "cells": cells,
    }
    (ROOT / "dd" / "expected.json").write_text(json.dumps(expected, indent=2) + "\n")


DISORDER_SUBREDDITS = {
    "depression": "depression",
    "anxiety": "Anxiety",
    "adhd": "ADHD",
    "eating_disorder": "EDAnonymous",
    "ptsd": "ptsd",
    "suicide": "SuicideWatch",
}
CONTROL_SUBREDDITS = ["conspiracy", "jokes", "teaching", "personalfinance", "legaladvice"]
KEYWORDS = {
    "depression": ["depressed", "depression"],
    "anxiety": ["anxious", "anxiety"],
    "adhd": ["ADHD"],
    "eating_disorder": ["eating disorder", "anorexia", "bulimia"],
    "ptsd": ["PTSD", "flashbacks"],
    "suicide": ["suicidal", "suicide"],
}


def rmhd():
    """100 posts per disorder subreddit and 20 per control subreddit."""
    rng = random.Random(7)
    rows = []
    for disorder, subreddit in DISORDER_SUBREDDITS.items():
        for i in range(100):
            body = " ".join(sentence(rng) for _ in range(2))
            if rng.random() < 0.7:
                body += f" I think it is the {rng.choice(KEYWORDS[disorder])} again."
            if rng.random() < 0.2:
                other = rng.choice([d for d in KEYWORDS if d != disorder])
                body += f" Maybe some {rng.choice(KEYWORDS[other])} too."
            rows.append([subreddit, f"u{rng.randrange(10**6)}", f"2019/{rng.randint(1, 12):02d}/01", body])
    for subreddit in CONTROL_SUBREDDITS:
        for i in range(20):
            rows.append([subreddit, f"u{rng.randrange(10**6)}", "2019/06/01", " ".join(sentence(rng) for _ in range(2))])
    # Rows outside the filter are skipped by the loader.
    for i in range(10):
        rows.append(["fitness", "u0", "2019/06/01", sentence(rng)])
    rng.shuffle(rows)
    write_csv(ROOT / "rmhd" / "rmhd.csv", ["subreddit", "author", "date", "post"], rows)


ORDER = ["depression", "anxiety", "adhd", "eating_disorder", "ptsd", "suicide"]
BASE = 0.12
AFFINITY = {
    ("depression", "suicide"): 0.75,
    ("anxiety", "depression"): 0.45,
    ("anxiety", "ptsd"): 0.40,
    ("adhd", "anxiety"): 0.30,
    ("depression", "eating_disorder"): 0.30,
    ("depression", "ptsd"): 0.30,
}


def odds_ratio(rows, x, y):
    a = sum(1 for r in rows if r[x] and r[y])
    b = sum(1 for r in rows if r[x] and not r[y])
    c = sum(1 for r in rows if not r[x] and r[y])
    d = sum(1 for r in rows if not r[x] and not r[y])
    if 0 in (a, b, c, d):
        a, b, c, d = a + 0.5, b + 0.5, c + 0.5, d + 0.5
    return a * d / (b * c)


def comorbidity_labels():
    """Six-disorder truth labels in dataset form where the suicide and
    depression pair is the most strongly associated."""
    rng = random.Random(11)
    rows = []
    for origin in ORDER:
        for i in range(200):
            labels = {origin: True}
            for other in ORDER:
                if other == origin:
                    continue
                p = AFFINITY.get(tuple(sorted((origin, other))), BASE)
                labels[other] = rng.random() < p
            rows.append((origin, i, labels))
    for i in range(200):
        rows.append((None, i, {d: rng.random() < BASE / 2 for d in ORDER}))

    ors = {(x, y): odds_ratio([r[2] for r in rows], x, y) for x, y in itertools.combinations(ORDER, 2)}
    best = max(ors, key=ors.get)
    assert set(best) == {"depression", "suicide"}, best

    lines = [json.dumps({"schema": "labelforge.dataset", "version": 1,
                         "meta": {"name": "comorbidity-fixture", "seed": 11, "params": {}},
                         "posts": len(rows)})]
    for origin, i, labels in rows:
        pid = f"{origin or 'control'}-{i:03d}"
        lines.append(json.dumps({
            "id": pid,
            "text": f"synthetic post {pid}",
            "source": "rmhd",
            "origin_subreddit": DISORDER_SUBREDDITS[origin].lower() if origin else "jokes",
            "origin_disorder": origin,
            "is_control": origin is None,
            "truth": {"labels": {d: ("positive" if labels[d] else "negative") for d in ORDER},
                      "sources": {d: ("origin" if d == origin else "llm") for d in ORDER}},
            "annotations": [],
        }))
    path = ROOT / "comorbidity" / "labels.jsonl"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def pipeline_config():
    config = {
        "providers": [
            {"provider": "stub", "model_id": "stub-a", "max_concurrent": 4, "requests_per_minute": 1000000,
             "stub": {"seed": 1, "noise_rate": 0.02}},
            {"provider": "stub", "model_id": "stub-b", "max_concurrent": 4, "requests_per_minute": 1000000,
             "stub": {"seed": 2, "positive_rate": 0.2, "noise_rate": 0.02}},
            {"provider": "stub", "model_id": "stub-c", "max_concurrent": 4, "requests_per_minute": 1000000,
             "stub": {"seed": 3, "keyword_rate": 0.9}},
        ],
        "screening_model": "stub-a",
        "canonical_model": "stub-a",
        "disorders": ORDER,
        "prompt_kind": "single_label",
        "seed": 42,
        "sample": {"initial": 60, "final": 50, "control": 50},
        "reproducible": True,
    }
    (ROOT / "pipeline.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    depression_stress_pair()
    rmhd()
    comorbidity_labels()
    pipeline_config()
