#!/usr/bin/env python3
"""Clean a MediaWiki XML dump into Text8-style text.

Port of Matt Mahoney's wikifil.pl: keeps visible article text, lowercases,
spells out digits and collapses everything else to single spaces.

    python3 scripts/wikifil.py dump.xml[.bz2] > corpus.txt
"""
import bz2
import re
import sys

DIGITS = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine"]

SUBS = [
    (re.compile(r"<.*>"), ""),
    (re.compile(r"&amp;"), "&"),
    (re.compile(r"&lt;"), "<"),
    (re.compile(r"&gt;"), ">"),
    (re.compile(r"<ref[^<]*</ref>"), ""),
    (re.compile(r"<[^>]*>"), ""),
    (re.compile(r"\[http:[^\] ]*"), "["),
    (re.compile(r"\|thumb", re.I), ""),
    (re.compile(r"\|left", re.I), ""),
    (re.compile(r"\|right", re.I), ""),
    (re.compile(r"\|\d+px", re.I), ""),
    (re.compile(r"\[\[image:[^\[\]]*\|", re.I), ""),
    (re.compile(r"\[\[category:([^|\]]*)[^\]]*\]\]", re.I), r"[[\1]]"),
    (re.compile(r"\[\[[a-z\-]*:[^\]]*\]\]"), ""),
    (re.compile(r"\[\[[^\|\]]*\|"), "[["),
    (re.compile(r"\{\{[^}]*\}\}"), ""),
    (re.compile(r"\{[^}]*\}"), ""),
    (re.compile(r"\["), ""),
    (re.compile(r"\]"), ""),
    (re.compile(r"&[^;]*;"), " "),
]
NON_ALPHA = re.compile(r"[^a-z]+")


def records(raw):
    # wikifil.pl reads with $/ = ">"
    start = 0
    while True:
        end = raw.find(">", start)
        if end < 0:
            if start < len(raw):
                yield raw[start:]
            return
        yield raw[start : end + 1]
        start = end + 1


def clean(raw, out):
    in_text = False
    for rec in records(raw):
        if "<text " in rec:
            in_text = True
        if re.search("#redirect", rec, re.I):
            in_text = False
        if not in_text:
            continue
        if "</text>" in rec:
            in_text = False
        for pat, rep in SUBS:
            rec = pat.sub(rep, rec)
        rec = " " + rec + " "
        rec = "".join(c.lower() if "A" <= c <= "Z" else c for c in rec)
        for d, word in enumerate(DIGITS):
            rec = rec.replace(str(d), " " + word + " ")
        rec = NON_ALPHA.sub(" ", rec)
        out.write(rec[:-1])


def main():
    path = sys.argv[1]
    opener = bz2.open if path.endswith(".bz2") else open
    with opener(path, "rt", encoding="utf-8") as f:
        raw = f.read()
    clean(raw, sys.stdout)


if __name__ == "__main__":
    main()
