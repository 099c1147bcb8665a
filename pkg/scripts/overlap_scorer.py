#!/usr/bin/env python3
"""Deterministic stand-in for an external similarity scorer.

Reads TSV sentence pairs on stdin and emits one score per line: the token
count ratio min(m, n) / max(m, n), a crude adequacy proxy in [0, 1]. Real
deployments substitute a sentence-embedding service honoring the same
contract (TSV in, one decimal score per line out, exit code 0).
"""

import sys


def main() -> int:
    for lineno, line in enumerate(sys.stdin, start=1):
        fields = line.rstrip("\n").split("\t")
        if len(fields) < 2:
            print(f"line {lineno}: expected TSV pair", file=sys.stderr)
            return 1
        m = len(fields[0].split())
        n = len(fields[1].split())
        if m == 0 or n == 0:
            score = 0.0
        else:
            score = min(m, n) / max(m, n)
        sys.stdout.write(f"{score:.6f}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
