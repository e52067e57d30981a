#!/usr/bin/env python3
"""Regenerates the bundled resource files under data/.

Offline ingestion step. The C++ toolkit never calls this at runtime; it only
reads the files this script writes. Inputs:

  * CMU Pronouncing Dictionary (pip package ``cmudict``) for pronunciations.
  * ``wordfreq`` English frequencies, scaled to an encyclopedia-sized corpus
    of 4e9 tokens, as the word-count source.
  * The Brill-style English lexicon shipped inside ``pattern3``
    (``en-lexicon.txt``) for the coarse POS lexicon.
  * WordNet 3.0 database files (``index.*`` / ``data.*``) for the synonym
    dictionary.

Usage:
  build_resources.py --brill path/to/en-lexicon.txt --wordnet path/to/wordnet-3.0 \
      [--out data]
"""

import argparse
import json
import os
import re

import cmudict
import wordfreq

CORPUS_TOKENS = 4e9
FREQ_VOCAB = 60000
POS_LEXICON_SIZE = 5000
MAX_SYNONYMS = 8

ALPHA = re.compile(r"^[a-z]+$")

# NLTK English stopword list.
STOPWORDS = """i me my myself we our ours ourselves you you're you've you'll you'd
your yours yourself yourselves he him his himself she she's her hers herself it
it's its itself they them their theirs themselves what which who whom this that
that'll these those am is are was were be been being have has had having do does
did doing a an the and but if or because as until while of at by for with about
against between into through during before after above below to from up down in
out on off over under again further then once here there when where why how all
any both each few more most other some such no nor not only own same so than too
very s t can will just don don't should should've now d ll m o re ve y ain aren
aren't couldn couldn't didn didn't doesn doesn't hadn hadn't hasn hasn't haven
haven't isn isn't ma mightn mightn't mustn mustn't needn needn't shan shan't
shouldn shouldn't wasn wasn't weren weren't won won't wouldn wouldn't""".split()

# Substitution sets for function words; WordNet has no entries for these.
FUNCTION_WORD_SYNONYMS = {
    "the": ["a", "this", "that", "their", "our", "my", "an"],
    "a": ["the", "one", "this", "an", "some"],
    "an": ["a", "the", "one", "this"],
    "this": ["that", "the", "these", "a"],
    "that": ["this", "the", "which", "those"],
    "these": ["those", "the", "some", "this"],
    "those": ["these", "the", "some", "that"],
    "to": ["the", "into", "for", "onto", "in", "at"],
    "into": ["to", "in", "onto", "inside"],
    "in": ["at", "on", "into", "within", "inside"],
    "on": ["in", "at", "onto", "upon", "over"],
    "at": ["in", "on", "by", "to"],
    "for": ["to", "with", "about", "on"],
    "from": ["of", "off", "out", "by"],
    "of": ["from", "in", "about", "for"],
    "with": ["by", "for", "and", "from"],
    "by": ["with", "at", "from", "near"],
    "about": ["on", "of", "over", "for"],
    "my": ["our", "your", "the", "his", "her"],
    "our": ["my", "the", "your", "their"],
    "your": ["my", "the", "our", "their"],
    "their": ["the", "our", "his", "her", "its"],
    "his": ["her", "their", "the", "my"],
    "her": ["his", "their", "the", "my"],
    "me": ["us", "him", "her", "them"],
    "us": ["me", "them", "you"],
    "i": ["we", "you", "they"],
    "we": ["i", "you", "they"],
    "it": ["this", "that", "them"],
    "some": ["any", "few", "more", "the", "those"],
    "any": ["some", "each", "every", "all"],
    "all": ["both", "each", "any", "some"],
    "each": ["every", "any", "all"],
    "and": ["or", "with", "but"],
    "or": ["and", "nor", "but"],
    "but": ["and", "yet", "though"],
    "is": ["was", "be", "are"],
    "are": ["were", "is", "be"],
    "was": ["is", "were", "be"],
    "be": ["is", "been", "being"],
    "can": ["will", "could", "should"],
    "will": ["can", "would", "shall"],
    "what": ["which", "how", "whatever"],
    "which": ["what", "that", "whichever"],
    "when": ["while", "where", "once"],
    "where": ["when", "wherever", "how"],
    "how": ["what", "where", "why"],
    "before": ["after", "until", "by"],
    "after": ["before", "since", "once"],
    "up": ["down", "out", "over"],
    "out": ["off", "up", "down"],
    "then": ["now", "once", "after"],
    "now": ["then", "here", "today"],
    "here": ["there", "now", "where"],
    "there": ["here", "where", "then"],
    "so": ["too", "very", "thus"],
    "very": ["too", "so", "most"],
    "not": ["never", "no", "nor"],
    "no": ["not", "none", "any"],
    "than": ["then", "as", "like"],
    "just": ["only", "simply", "now"],
    "only": ["just", "solely", "merely"],
    "under": ["below", "beneath", "over"],
    "over": ["above", "across", "under"],
    "between": ["among", "amid", "across"],
    "during": ["throughout", "within", "in"],
    "until": ["till", "before", "unless"],
    "through": ["via", "throughout", "across"],
}

CONTRACTIONS = [
    ("don't", "do not"), ("doesn't", "does not"), ("didn't", "did not"),
    ("can't", "cannot"), ("couldn't", "could not"), ("won't", "will not"),
    ("wouldn't", "would not"), ("shouldn't", "should not"), ("isn't", "is not"),
    ("aren't", "are not"), ("wasn't", "was not"), ("weren't", "were not"),
    ("haven't", "have not"), ("hasn't", "has not"), ("hadn't", "had not"),
    ("mustn't", "must not"), ("needn't", "need not"), ("mightn't", "might not"),
    ("i'm", "i am"), ("i've", "i have"), ("i'll", "i will"), ("i'd", "i would"),
    ("you're", "you are"), ("you've", "you have"), ("you'll", "you will"),
    ("you'd", "you would"), ("we're", "we are"), ("we've", "we have"),
    ("we'll", "we will"), ("they're", "they are"), ("they've", "they have"),
    ("they'll", "they will"), ("he's", "he is"), ("she's", "she is"),
    ("it's", "it is"), ("that's", "that is"), ("what's", "what is"),
    ("where's", "where is"), ("who's", "who is"), ("there's", "there is"),
    ("let's", "let us"), ("how's", "how is"),
]

FILLERS = {
    "bos": ["so", "like", "actually", "okay so", "so okay", "so basically", "now", "well"],
    "eos": ["if you please", "please and thank you", "if you can", "right now",
            "right away", "would you mind ?"],
    "pre_verb": ["like", "basically", "actually"],
    "post_verb": ["basically", "actually", "like", "you know"],
    "failsafe_word": "like",
}


def coarse(penn):
    if penn.startswith("VB"):
        return "VERB"
    if penn.startswith("NN"):
        return "NOUN"
    if penn.startswith("JJ"):
        return "ADJ"
    if penn.startswith("RB") or penn == "WRB":
        return "ADV"
    return "OTHER"


def load_brill(path):
    lex = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            parts = line.split()
            if len(parts) != 2 or not ALPHA.match(parts[0]):
                continue
            lex.setdefault(parts[0], parts[1])
    return lex


def load_wordnet_synonyms(root):
    """word -> pos -> ordered synonym list, sense order preserved."""
    by_pos = {}
    for pos, suffix in (("NOUN", "noun"), ("VERB", "verb"), ("ADJ", "adj"), ("ADV", "adv")):
        synsets = {}
        with open(os.path.join(root, "data." + suffix), encoding="latin-1") as f:
            for line in f:
                if line.startswith("  "):
                    continue
                fields = line.split()
                offset, count = fields[0], int(fields[3], 16)
                words = []
                for k in range(count):
                    w = fields[4 + 2 * k].lower()
                    w = re.sub(r"\(.*\)$", "", w)
                    words.append(w)
                synsets[offset] = words
        index = {}
        with open(os.path.join(root, "index." + suffix), encoding="latin-1") as f:
            for line in f:
                if line.startswith("  "):
                    continue
                fields = line.split()
                lemma = fields[0]
                n_synsets = int(fields[2])
                offsets = fields[-n_synsets:]
                index[lemma] = offsets
        by_pos[pos] = (index, synsets)
    return by_pos


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--brill", required=True)
    ap.add_argument("--wordnet", required=True)
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    stop = set(STOPWORDS)
    with open(os.path.join(args.out, "stopwords.txt"), "w") as f:
        for w in STOPWORDS:
            f.write(w + "\n")

    brill = load_brill(args.brill)
    vocab = [w for w in wordfreq.top_n_list("en", FREQ_VOCAB) if ALPHA.match(w)]

    pos_lex = {}
    for w in vocab:
        if w in stop or w not in brill:
            continue
        pos_lex[w] = coarse(brill[w])
        if len(pos_lex) == POS_LEXICON_SIZE:
            break
    with open(os.path.join(args.out, "pos_lexicon.tsv"), "w") as f:
        for w in sorted(pos_lex):
            f.write(f"{w}\t{pos_lex[w]}\n")

    wn = load_wordnet_synonyms(args.wordnet)
    with open(os.path.join(args.out, "synonyms.tsv"), "w") as f:
        entries = {}
        for w, pos in pos_lex.items():
            if pos not in wn:
                continue
            index, synsets = wn[pos]
            seen, out = {w}, []
            for off in index.get(w, []):
                for s in synsets.get(off, []):
                    if s not in seen and ALPHA.match(s):
                        seen.add(s)
                        out.append(s)
            if out:
                entries[w] = out[:MAX_SYNONYMS]
        for w, syns in FUNCTION_WORD_SYNONYMS.items():
            entries[w] = syns
        for w in sorted(entries):
            f.write(f"{w}\t{','.join(entries[w])}\n")

    with open(os.path.join(args.out, "contractions.tsv"), "w") as f:
        for c, e in CONTRACTIONS:
            f.write(f"{c}\t{e}\n")

    with open(os.path.join(args.out, "fillers.json"), "w") as f:
        json.dump(FILLERS, f, indent=2, sort_keys=True)
        f.write("\n")

    cmu = cmudict.dict()
    with open(os.path.join(args.out, "pronunciations.tsv"), "w") as pf, \
            open(os.path.join(args.out, "word_counts.tsv"), "w") as cf:
        for w in vocab:
            count = int(round(wordfreq.word_frequency(w, "en") * CORPUS_TOKENS))
            cf.write(f"{w}\t{count}\n")
        for w in sorted(vocab):
            if w in cmu:
                syms = [re.sub(r"\d", "", s) for s in cmu[w][0]]
                pf.write(f"{w}\t{' '.join(syms)}\n")


if __name__ == "__main__":
    main()
