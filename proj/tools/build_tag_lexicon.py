#!/usr/bin/env python3
# Copyright 2026 The MSTemp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Builds data/tag_lexicon.tsv from a Brill-format lexicon ("word TAG ...").

The Brill lexicon distributed with TextBlob (textblob/en/en-lexicon.txt, MIT)
is the expected input:

    pip download textblob --no-deps -d /tmp/tb
    python3 -m zipfile -e /tmp/tb/textblob-*.whl /tmp/tb/x
    tools/build_tag_lexicon.py /tmp/tb/x/textblob/en/en-lexicon.txt > data/tag_lexicon.tsv

Penn tags are collapsed onto the coarse tagset used by the slot extractor.
"""

import re
import sys

PENN_TO_COARSE = {
    "NN": "noun", "NNS": "noun",
    "NNP": "proper-noun", "NNPS": "proper-noun",
    "PRP": "pronoun",
    "PRP$": "determiner", "DT": "determiner", "PDT": "determiner",
    "WDT": "determiner",
    "VB": "verb", "VBD": "verb", "VBG": "verb", "VBN": "verb", "VBP": "verb",
    "VBZ": "verb", "MD": "verb",
    "JJ": "adjective", "JJR": "adjective", "JJS": "adjective",
    "RB": "adverb", "RBR": "adverb", "RBS": "adverb", "WRB": "adverb",
    "IN": "preposition", "TO": "preposition",
}

# Closed-class corrections applied after the Penn mapping.
OVERRIDES = {
    "myself": "pronoun", "yourself": "pronoun", "himself": "pronoun",
    "herself": "pronoun", "itself": "pronoun", "ourselves": "pronoun",
    "themselves": "pronoun", "today": "noun", "Today": "noun",
    "tonight": "noun", "Tonight": "noun",
}

PRONOUNS = {
    "i", "me", "you", "he", "him", "she", "it", "we", "us", "they", "them",
    "thee", "thou", "ye", "hers", "ours", "theirs", "yours", "oneself",
} | {w for w, t in OVERRIDES.items() if t == "pronoun"}

WORD = re.compile(r"[A-Za-z][A-Za-z']*")


def main(path):
    entries = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.startswith(";;;"):
                continue
            parts = line.split()
            if len(parts) < 2 or not WORD.fullmatch(parts[0]):
                continue
            tag = PENN_TO_COARSE.get(parts[1].split("|")[0], "other")
            if tag == "pronoun" and parts[0].lower() not in PRONOUNS:
                tag = "other"
            entries.setdefault(parts[0], tag)
    entries.update(OVERRIDES)
    out = []
    for word, tag in entries.items():
        # Sentence-initial lookups fall back to the lowercase form, so a
        # capitalized entry that agrees with it is redundant.
        lower = word.lower()
        if word != lower and entries.get(lower) == tag:
            continue
        out.append((word, tag))
    out.sort()
    w = sys.stdout
    w.write("# word\ttag (coarse tagset); derived from the Brill lexicon, see NOTICE\n")
    for word, tag in out:
        w.write(f"{word}\t{tag}\n")


if __name__ == "__main__":
    main(sys.argv[1])
