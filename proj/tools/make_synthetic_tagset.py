#!/usr/bin/env python3
"""Writes data/synthetic_tagset.txt: 565 mnemonic tags over 10 lexical
categories, modelled on the layout of Icelandic positional tagsets."""

import itertools
import sys
from pathlib import Path

GENDERS = "kvh"
NUMBERS = "ef"
CASES = "noþe"


def tags():
    out = []
    for g, n, c in itertools.product(GENDERS, NUMBERS, CASES):
        for suffix in ("", "g", "-s", "gs", "-ö"):
            out.append(f"n{g}{n}{c}{suffix}")
    for g, n, c, d, deg in itertools.product(GENDERS, NUMBERS, CASES, "sv", "fme"):
        out.append(f"l{g}{n}{c}{d}{deg}")
    for t, g, n, c in itertools.product("abeopst", GENDERS, NUMBERS, CASES):
        if t != "t":
            out.append(f"f{t}{g}{n}{c}")
    for g, n, c in itertools.product(GENDERS, NUMBERS, CASES):
        out.append(f"g{g}{n}{c}")
    out += ["ta", "to"]
    for g, n, c in itertools.product(GENDERS, NUMBERS, CASES):
        out.append(f"tf{g}{n}{c}")
    out += ["sng", "snm"]
    for mood, voice, person, n, tense in itertools.product("fv", "gm", "123", NUMBERS, "nþ"):
        out.append(f"s{mood}{voice}{person}{n}{tense}")
    for voice, g, n, c in itertools.product("gm", GENDERS, NUMBERS, CASES):
        out.append(f"sþ{voice}{g}{n}{c}")
    out += ["a", "aa", "ao", "aþ", "ae", "c", "ct", "e", "x"]
    return out


def main():
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "synthetic_tagset.txt"
    all_tags = tags()
    assert len(all_tags) == len(set(all_tags)) == 565, len(all_tags)
    target.write_text("".join(t + "\n" for t in all_tags), encoding="utf-8")


if __name__ == "__main__":
    main()
