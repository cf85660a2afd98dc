#!/usr/bin/env python3
"""Writes the synthetic JSONL corpora under data/.

Harmful and jailbreak texts are inert placeholders: the toy policy never reads
prompt text, so nothing here describes a real harmful request.
"""
import argparse
import json
import random
from pathlib import Path


def reasoning(prefix, n, rng):
    out = []
    for i in range(n):
        a, b, c = rng.randint(2, 60), rng.randint(2, 60), rng.randint(1, 9)
        out.append({
            "id": f"{prefix}-{i:04d}",
            "text": f"Compute {a} * {c} + {b}. Give the final number.",
            "archetype": "reasoning",
            "answer": str(a * c + b),
        })
    return out


def placeholder(prefix, archetype, label, n):
    return [{"id": f"{prefix}-{i:04d}", "text": f"[{label} placeholder #{i}]",
             "archetype": archetype} for i in range(n)]


def write(path, records):
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)

    write(args.out / "reasoning.jsonl", reasoning("amc", 100, rng))
    write(args.out / "harmful.jsonl", placeholder("jb", "harmful", "jailbreak request", 200))
    write(args.out / "benign.jsonl",
          placeholder("alpaca", "benign_instruction", "benign instruction", 200))
    write(args.out / "eval_harmful.jsonl",
          placeholder("heldout-jb", "harmful", "held-out jailbreak request", 100))
    write(args.out / "eval_reasoning.jsonl", reasoning("heldout-amc", 40, rng))


if __name__ == "__main__":
    main()
