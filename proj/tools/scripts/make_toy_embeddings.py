#!/usr/bin/env python3
# Copyright 2026 The lklm Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes a small synthetic GloVe-format table covering the shipped fixtures.

Vectors are seeded from a hash of the token, so the file is reproducible.
Real experiments should point the harness at a pretrained GloVe file.
"""
import hashlib
import json
import pathlib
import random
import re
import sys

DIM = 16
WORD = re.compile(r"[A-Za-z0-9]+(?:[-'][A-Za-z0-9]+)*|[^\sA-Za-z0-9]")


def vector(token):
    seed = int.from_bytes(hashlib.sha256(token.encode()).digest()[:8], "little")
    rng = random.Random(seed)
    return [rng.gauss(0.0, 1.0) for _ in range(DIM)]


def main(root, out):
    root = pathlib.Path(root)
    texts = [p.read_text() for p in sorted(root.glob("fixtures/**/*.txt"))]
    texts += [p["prompt"] for p in json.loads((root / "prompts.json").read_text())["prompts"]]
    texts += [s["gloss"] for s in json.loads((root / "kg/default_kg.json").read_text())["senses"]]
    vocab = sorted({t.lower() for text in texts for t in WORD.findall(text)})
    with open(out, "w") as f:
        for tok in vocab:
            f.write(tok + " " + " ".join(f"{x:.6f}" for x in vector(tok)) + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
