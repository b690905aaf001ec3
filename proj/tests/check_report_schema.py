"""Validates the JSON reports of the corpus runs against docs/report.schema.json.

usage: check_report_schema.py CONDSAFE_BINARY SCHEMA CORPUS_DIR
"""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main() -> int:
    binary, schema_path, corpus = sys.argv[1:4]
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    runs = [[f] for f in sorted(pathlib.Path(corpus).glob("*.its"))]
    runs.append([pathlib.Path(corpus) / "two_loops_unguarded.its", "--bmc-check",
                 "--bmc-depth", "4", "--bmc-bound", "2"])
    with tempfile.TemporaryDirectory() as tmp:
        for i, args in enumerate(runs):
            out = pathlib.Path(tmp) / f"r{i}.json"
            proc = subprocess.run([binary, "verify", *map(str, args), "--json", str(out)],
                                  capture_output=True, text=True)
            if proc.returncode not in (0, 1):
                print(f"FAIL {args}: exit {proc.returncode}\n{proc.stderr}")
                failures += 1
                continue
            report = json.loads(out.read_text())
            errors = list(validator.iter_errors(report))
            for e in errors:
                print(f"FAIL {args}: {e.message} at {list(e.absolute_path)}")
            failures += bool(errors)
            if json.loads(json.dumps(report)) != report:
                print(f"FAIL {args}: JSON round trip changed the report")
                failures += 1
            if not errors:
                print(f"ok   {' '.join(map(str, args))}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
