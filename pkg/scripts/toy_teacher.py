#!/usr/bin/env python3
"""Deterministic stand-in for an external translation command.

Reads lines on stdin, writes one output line per input line: every ASCII
letter is Caesar-shifted by --shift (negative shifts invert), so the output
is repeatable, token-count preserving, and usable in both directions.
"""

import argparse
import sys


def shift_char(ch: str, k: int) -> str:
    if "a" <= ch <= "z":
        return chr((ord(ch) - ord("a") + k) % 26 + ord("a"))
    if "A" <= ch <= "Z":
        return chr((ord(ch) - ord("A") + k) % 26 + ord("A"))
    return ch


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--shift", type=int, default=7)
    args = parser.parse_args()
    for line in sys.stdin:
        sys.stdout.write("".join(shift_char(c, args.shift) for c in line.rstrip("\n")) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
