#!/usr/bin/env python3
# Copyright 2026 The formsql Authors.
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

"""Writes data/bank_manifest.json and data/corpus_manifest.json.

Deliberately independent of the C++ library: bank kinds are read off the DSL
text with a few regular expressions, and gold SQL is checked by preparing it
in SQLite against empty tables built from the schema files.
"""

import argparse
import datetime
import json
import pathlib
import re
import sqlite3

KINDS = ("calculation", "union", "condition")
COMPARATOR = re.compile(r"(<=|>=|!=|<|>|=)")


def kind_of(dsl):
    name, _, body = dsl.partition("=")
    body = body.strip()
    if re.match(r"^IN\s*\(", body):
        return "union"
    if COMPARATOR.search(body):
        return "condition"
    return "calculation"


def bank_manifest(bank_path):
    domains = {}
    total = dict.fromkeys(("total",) + KINDS, 0)
    for line in bank_path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        kind = kind_of(rec["dsl"])
        counts = domains.setdefault(rec["domain"], dict.fromkeys(("total",) + KINDS, 0))
        for c in (counts, total):
            c["total"] += 1
            c[kind] += 1
    return {"domains": dict(sorted(domains.items())), "global": total}


def empty_database(schema):
    db = sqlite3.connect(":memory:")
    db.create_function("NOW", 0, lambda: datetime.date(2026, 1, 1).isoformat())
    db.create_function("YEAR", 1, lambda v: int(str(v)[:4]) if v is not None else None)
    for table in schema["tables"]:
        cols = ", ".join('"%s"' % c["name"].lower() for c in table["columns"])
        db.execute('CREATE TABLE "%s" (%s)' % (table["name"].lower(), cols))
    return db


def corpus_manifest(dataset_path, schema_dir, bank_ids):
    schemas = {}
    for path in sorted(schema_dir.glob("*.json")):
        s = json.loads(path.read_text(encoding="utf-8"))
        schemas[s["db_id"]] = s
    splits = {}
    in_grammar = []
    examples = 0
    with_knowledge = 0
    for line in dataset_path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        ex = json.loads(line)
        examples += 1
        splits[ex["split"]] = splits.get(ex["split"], 0) + 1
        assert ex["schema_id"] in schemas, ex["id"]
        assert set(ex["gold_knowledge_ids"]) <= bank_ids, ex["id"]
        if ex["gold_knowledge_ids"]:
            with_knowledge += 1
        db = empty_database(schemas[ex["schema_id"]])
        try:
            db.execute(ex["gold_sql"]).fetchall()
            in_grammar.append(ex["id"])
        except sqlite3.Error:
            pass
    return {
        "examples": examples,
        "splits": dict(sorted(splits.items())),
        "with_knowledge": with_knowledge,
        "in_grammar": sorted(in_grammar),
        "in_grammar_fraction": len(in_grammar) / examples if examples else 0.0,
    }


def main():
    root = pathlib.Path(__file__).resolve().parent.parent / "data"
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", type=pathlib.Path, default=root)
    args = ap.parse_args()
    bank_path = args.data / "bank.jsonl"
    bank = bank_manifest(bank_path)
    ids = {json.loads(l)["id"] for l in bank_path.read_text(encoding="utf-8").splitlines() if l.strip()}
    corpus = corpus_manifest(args.data / "dataset.jsonl", args.data / "schemas", ids)
    (args.data / "bank_manifest.json").write_text(json.dumps(bank, indent=2) + "\n", encoding="utf-8")
    (args.data / "corpus_manifest.json").write_text(json.dumps(corpus, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
