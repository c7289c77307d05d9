#!/usr/bin/env python3
"""Regenerates the fixture corpora and their expected-value plans.

Plans are computed here with a naive sliding-window count over a separate
Python normalizer, so they serve as an independent oracle for the Rust
pipeline. Output is fully determined by SEED.

    python3 fixtures/generate.py
"""

import datetime as dt
import random
from collections import defaultdict
from pathlib import Path
from xml.sax.saxutils import escape

SEED = 20120101
ROOT = Path(__file__).resolve().parent

LEXICON = [
    ("actions speak louder than words", "proverb"),
    ("the early bird catches the worm", "proverb"),
    ("the early bird", "proverbial_expression"),
    ("time flies", "proverb"),
    ("time will tell", "proverb"),
    ("never say never", "proverb"),
    ("boys will be boys", "proverb"),
    ("hold your tongue", "proverbial_expression"),
    ("history repeats itself", "proverb"),
    ("better late than never", "proverb"),
    ("all is fair in love and war", "proverb"),
    ("practice makes perfect", "proverb"),
    ("out of sight out of mind", "proverb"),
    ("a penny saved is a penny earned", "proverb"),
    ("two heads are better than one", "proverb"),
    ("birds of a feather flock together", "proverb"),
    ("every cloud has a silver lining", "proverb"),
    ("don't judge a book by its cover", "proverb"),
    ("rome wasn't built in a day", "proverb"),
    ("the pen is mightier than the sword", "proverb"),
    ("when in rome do as the romans do", "proverb"),
    ("easy come easy go", "proverb"),
    ("first come first served", "proverb"),
    ("haste makes waste", "proverb"),
    ("look before you leap", "proverb"),
    ("money talks", "proverb"),
    ("no pain no gain", "proverb"),
    ("seeing is believing", "proverb"),
    ("live and learn", "proverb"),
    ("enough is enough", "proverb"),
    ("let sleeping dogs lie", "proverb"),
    ("it takes two to tango", "proverb"),
    ("time is money", "proverb"),
    ("business is business", "proverb"),
    ("rock the boat", "proverbial_expression"),
    ("bite the bullet", "proverbial_expression"),
    ("speak of the devil", "proverbial_expression"),
    ("break the ice", "proverbial_expression"),
]

FILLER = (
    "the a of and to in was it he she that his her with as had for on at by "
    "which but be from they all said time one never will come first house "
    "letter morning road window long little old again night day money boat "
    "early bird tell say ice devil book cover late better"
).split()


def normalize(text):
    """Delete non-alphanumeric, non-space characters; lowercase; split."""
    tokens, cur = [], []
    for ch in text:
        if ch.isspace():
            if cur:
                tokens.append("".join(cur))
                cur = []
        elif ch.isalnum():
            cur.append(ch.lower())
    if cur:
        tokens.append("".join(cur))
    return tokens


def lexicon_entries():
    """(id, phrase, tokens) in load order; ids follow first appearance."""
    return [(i, p, normalize(p)) for i, (p, _) in enumerate(LEXICON)]


def naive_counts(tokens, entries):
    counts = defaultdict(int)
    for pid, _, pat in entries:
        n = len(pat)
        for i in range(len(tokens) - n + 1):
            if tokens[i : i + n] == pat:
                counts[pid] += 1
    return counts


def surface(rng, phrase):
    """A random surface form that normalizes back to the phrase."""
    words = phrase.split()
    style = rng.randrange(5)
    if style == 1:
        words[0] = words[0].capitalize()
    elif style == 2:
        words = [w.upper() for w in words]
    elif style == 3 and len(words) > 1:
        words[0] += ","
    text = " ".join(words)
    return text + rng.choice(["", ".", "!", "?", ";", ""])


def filler(rng, n):
    return [rng.choice(FILLER) for _ in range(n)]


def wrap(words, width=68):
    lines, cur = [], ""
    for w in words:
        if cur and len(cur) + 1 + len(w) > width:
            lines.append(cur)
            cur = w
        else:
            cur = f"{cur} {w}" if cur else w
    if cur:
        lines.append(cur)
    return "\n".join(lines) + "\n"


def plant(rng, n_words, phrases, k):
    """Filler text with k proverb surface forms dropped in at random."""
    words = filler(rng, n_words)
    for _ in range(k):
        pos = rng.randrange(len(words) + 1)
        words[pos:pos] = surface(rng, rng.choice(phrases)).split()
    return words


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def write_tsv(path, header, rows):
    write(path, "\n".join(["\t".join(header)] + ["\t".join(map(str, r)) for r in rows]) + "\n")


def series_plan(doc_bins, doc_counts, all_pids, bin_seq):
    """(proverb_id, bin, count_occ, count_presence, total) for contiguous bins."""
    totals = defaultdict(int)
    for b in doc_bins.values():
        if b is not None:
            totals[b] += 1
    rows = []
    for pid in sorted(all_pids):
        occ, pres = defaultdict(int), defaultdict(int)
        for doc, counts in doc_counts.items():
            b = doc_bins[doc]
            if b is None or counts.get(pid, 0) == 0:
                continue
            occ[b] += counts[pid]
            pres[b] += 1
        for b in bin_seq:
            rows.append((pid, b, occ[b], pres[b], totals[b]))
    return rows


def lexicon_files(rng):
    lines = ["# Fixture lexicon: phrase<TAB>category", ""]
    lines += [f"{p}\t{c}" for p, c in LEXICON]
    # Variants that collide with earlier entries, and a line with no words.
    lines += ["", "# variants", "Time flies!", "NEVER say never.\tproverb", "!!! ... ---", ""]
    write(ROOT / "lexicon" / "proverbs.tsv", "\n".join(lines) + "\n")
    write(
        ROOT / "lexicon" / "expressions.txt",
        "# Phrases treated as proverbial expressions\nhold your tongue\nbreak the ice\nrock the boat\n",
    )


AUTHORS = [
    ("Ashdown, Mary", 1771),
    ("Pell, Jonas", 1788),
    ("Quarles, Edith", 1809),
    ("Marchbanks, Silas", 1822),
    ("Ferrers, Anne", 1837),
    ("Tolley, Amos", 1851),
    ("Wickham, Grace", 1866),
]


def gutenberg(rng, entries):
    base = ROOT / "gutenberg"
    phrases = [p for p, _ in LEXICON]
    meta, doc_counts, doc_bins = [], {}, {}
    for i in range(20):
        doc_id = f"book{i + 1:02d}"
        if i < 14:
            author, born = AUTHORS[i % len(AUTHORS)]
        elif i < 17:
            author, born = "Anonymous", None
        elif i < 19:
            author, born = AUTHORS[i % len(AUTHORS)][0], None
        else:
            author, born = None, None
        title = f"The {rng.choice(['Long', 'Quiet', 'Narrow', 'Northern'])} {rng.choice(['Road', 'House', 'Letter', 'Winter'])} {i + 1}"
        body_words = plant(rng, rng.randrange(300, 700), phrases, rng.randrange(0, 9))
        body = wrap(body_words)
        if i % 5 != 4:
            header = (
                f"The Project Gutenberg eBook of {title}\n"
                "Time is money, and this eBook is for the use of anyone anywhere.\n\n"
                f"*** START OF THE PROJECT GUTENBERG EBOOK {title.upper()} ***\n"
            )
            footer = (
                f"*** END OF THE PROJECT GUTENBERG EBOOK {title.upper()} ***\n"
                "Updated editions will replace the previous one. Time flies.\n"
            )
            text = header + body + footer
        else:
            text = body
        write(base / "texts" / f"{doc_id}.txt", text)
        doc_counts[doc_id] = naive_counts(normalize(body), entries)
        doc_bins[doc_id] = None if born is None else 1700 + (born - 1700) // 20 * 20
        meta.append((doc_id, author or "", "" if born is None else born, title))
    write_tsv(base / "metadata.tsv", ["doc_id", "author", "birth_year", "title"], meta)
    write(
        base / "manifest.toml",
        'corpus_id = "gutenberg"\nkind = "plaintext"\nfiles = ["texts/*.txt"]\nmetadata = "metadata.tsv"\n',
    )

    matched = {pid for c in doc_counts.values() for pid, n in c.items() if n}
    write_tsv(
        base / "plan_matches.tsv",
        ["proverb_id", "doc_id", "occurrence_count"],
        sorted((pid, d, n) for d, c in doc_counts.items() for pid, n in c.items() if n),
    )
    dated = [b for b in doc_bins.values() if b is not None]
    bins = list(range(min(dated), max(dated) + 1, 20))
    write_tsv(
        base / "plan_series_20y.tsv",
        ["proverb_id", "bin_start", "occurrences", "documents", "total"],
        series_plan(doc_bins, doc_counts, matched, bins),
    )
    undated = sorted(d for d, b in doc_bins.items() if b is None)
    write_tsv(base / "plan_undated.tsv", ["doc_id"], [(d,) for d in undated])


def nyt(rng, entries):
    base = ROOT / "nyt"
    phrases = [p for p, _ in LEXICON]
    doc_counts, doc_bins = {}, {}
    days = [dt.date(1990, 1, 1) + dt.timedelta(days=d) for d in range(730)]
    # July 1990 carries no articles, so its bin has a zero denominator.
    days = [d for d in days if not (d.year == 1990 and d.month == 7)]
    for i in range(50):
        doc_id = f"{1000001 + i * 37}"
        date = None if i == 13 else rng.choice(days)
        obituary = i % 9 == 0
        headline = "Obituary: " + rng.choice(["A Printer", "A Teacher", "A Sailor"]) if obituary else ""
        if not headline:
            headline = " ".join(w.capitalize() for w in filler(rng, rng.randrange(3, 7)))
        if i == 21:
            headline = "Time Will Tell, Says Council"
            paragraphs = []
        else:
            paragraphs = [
                " ".join(plant(rng, rng.randrange(40, 120), phrases, rng.randrange(0, 3)))
                for _ in range(rng.randrange(1, 4))
            ]
        head = [f'    <title>{escape(headline)}</title>']
        if date is not None:
            head += [
                f'    <meta name="publication_day_of_month" content="{date.day}"/>',
                f'    <meta name="publication_month" content="{date.month}"/>',
                f'    <meta name="publication_year" content="{date.year}"/>',
            ]
        head.append(f'    <docdata><doc-id id-string="{doc_id}"/></docdata>')
        if date is not None:
            head.append(f'    <pubdata date.publication="{date:%Y%m%d}T000000" ex-ref="x"/>')
        byline = "" if obituary else f'<byline class="print_byline">By {rng.choice(["Ann Holt", "R. Diaz", "Lee Park"])}</byline>'
        body = "".join(f"<p>{escape(p)}</p>" for p in paragraphs)
        content = f'<body.content><block class="full_text">{body}</block></body.content>' if paragraphs else ""
        xml = (
            '<?xml version="1.0" encoding="UTF-8"?>\n<nitf>\n  <head>\n'
            + "\n".join(head)
            + f"\n  </head>\n  <body>\n    <body.head><hedline><hl1>{escape(headline)}</hl1></hedline>{byline}</body.head>\n"
            + (f"    {content}\n" if content else "")
            + "  </body>\n</nitf>\n"
        )
        write(base / "articles" / f"{doc_id}.xml", xml)
        tokens = normalize(headline)
        for p in paragraphs:
            tokens += normalize(p)
        doc_counts[doc_id] = naive_counts(tokens, entries)
        doc_bins[doc_id] = None if date is None else (date.year, date.month)
    write(base / "manifest.toml", 'corpus_id = "nyt"\nkind = "news_xml"\nfiles = ["articles/*.xml"]\n')

    matched = {pid for c in doc_counts.values() for pid, n in c.items() if n}
    dated = sorted(b for b in doc_bins.values() if b is not None)
    months = []
    y, m = dated[0]
    while (y, m) <= dated[-1]:
        months.append((y, m))
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    rows = series_plan(doc_bins, doc_counts, matched, months)
    write_tsv(
        base / "plan_series_month.tsv",
        ["proverb_id", "bin_start", "occurrences", "documents", "total"],
        [(pid, f"{y:04d}-{m:02d}", o, d, t) for pid, (y, m), o, d, t in rows],
    )


def google(rng):
    base = ROOT / "google"
    grams = [p for p, _ in LEXICON if len(normalize(p)) == 3] + [
        "in the house",
        "one of the",
        "at the end",
        "as well as",
    ]
    lines, plan = [], defaultdict(lambda: [0, 0])
    totals = []
    for year in range(1990, 2000):
        year_total, year_volumes = rng.randrange(10**7, 10**8), rng.randrange(10**4, 10**5)
        if year != 1995:
            totals.append((year, year_total, year_volumes))
        for g in grams:
            if rng.random() < 0.2:
                continue
            for variant in [g, g.capitalize(), g.upper()] if rng.random() < 0.4 else [g]:
                occ = rng.randrange(1, 5000)
                vols = rng.randrange(1, occ + 1)
                lines.append(f"{variant}\t{year}\t{occ}\t{vols}")
                key = (" ".join(normalize(variant)), year)
                plan[key][0] += occ
                plan[key][1] += vols
    lines.sort()
    lines += ["broken line without fields", "time will tell\t1994\t-3\t1", "time will tell\t1994\t5\t9"]
    write(base / "ngrams.tsv", "\n".join(lines) + "\n")
    write_tsv(base / "totals.tsv", ["period", "occurrences", "documents"], totals)
    write(
        base / "manifest.toml",
        'corpus_id = "google"\nkind = "ngram_tsv"\nfiles = ["ngrams.tsv"]\ntotals = "totals.tsv"\n',
    )
    write_tsv(
        base / "plan_ngrams.tsv",
        ["ngram", "year", "occurrences", "volumes"],
        sorted((g, y, o, v) for (g, y), (o, v) in plan.items()),
    )


def twitter(rng):
    base = ROOT / "twitter"
    grams = ["time will tell", "never say never", "rock the boat", "hold your tongue", "see you soon", "i love you"]
    rows, plan = [], defaultdict(int)
    mass = 0
    for d in range(10):
        day = dt.date(2012, 1, 1) + dt.timedelta(days=d)
        total = rng.randrange(10**6, 10**7)
        for g in grams:
            variants = [g, " ".join(w.capitalize() for w in g.split()), g.upper()]
            for v in variants:
                c = rng.randrange(1, 1000)
                rows.append((day.isoformat(), v, c, rng.randrange(1, 5000), total))
                plan[(day.isoformat(), g)] += c
                mass += c
    rng.shuffle(rows)
    write_tsv(base / "feed.tsv", ["date", "ngram", "count", "rank", "total"], rows)
    write(base / "manifest.toml", 'corpus_id = "twitter"\nkind = "daily_feed"\nfiles = ["feed.tsv"]\n')
    write_tsv(base / "plan_merged.tsv", ["date", "ngram", "count"], sorted((d, g, c) for (d, g), c in plan.items()))
    write(base / "plan_mass.txt", f"{mass}\n")


def main():
    rng = random.Random(SEED)
    entries = lexicon_entries()
    lexicon_files(rng)
    gutenberg(rng, entries)
    nyt(rng, entries)
    google(rng)
    twitter(rng)


if __name__ == "__main__":
    main()
