#!/usr/bin/env python3
"""Generate the small deterministic corpus used by the CLI tests.

Writes crates/cli/tests/fixtures/mini/. Re-running produces identical files.
"""

import hashlib
import json
import os
import random
import shutil
import sys

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..")
OUT = os.path.join(ROOT, "crates", "cli", "tests", "fixtures", "mini")

rng = random.Random(20240611)

COUNTRIES = ["PEOPLES R CHINA", "USA", "SOUTH KOREA", "JAPAN", "GERMANY", "ENGLAND", "FRANCE", "INDIA"]
SURNAMES = ["Zhang", "Smith", "Kim", "Sato", "Muller", "Brown", "Martin", "Patel", "Li", "Wang",
            "Chen", "Lee", "Park", "Tanaka", "Weber", "Jones", "Dubois", "Singh", "Liu", "Yang"]
WORDS = ["graphene", "oxide", "transistor", "membrane", "exfoliation", "electrode", "sensor",
         "synthesis", "layered", "composite", "thermal", "optical", "spintronic", "catalyst",
         "flexible", "battery", "ink", "coating", "heterostructure", "nanoribbon", "doping",
         "strain", "phonon", "boron", "nitride", "molybdenum", "disulfide", "film", "growth"]
PATENT_REGIONS = [("US", "EN"), ("EP", "EN"), ("WO", "EN"), ("CN", "ZH"), ("JP", "JA"),
                  ("KR", "KO"), ("DE", "DE"), ("WO", "ZH"), ("EP", "DE"), ("WO", "JA")]

WINDOW = range(2004, 2018)
GROUPS_S = [("G-S", 60), ("NT-S", 50), ("(2D+TMO+TMD)-S", 40), (None, 50)]
GROUPS_T = [("G-T", 60), ("NT-T", 50), ("(2D+TMO+TMD)-T", 40), (None, 50)]


def title():
    return " ".join(rng.choice(WORDS) for _ in range(rng.randint(4, 7))).capitalize()


def years_for(n):
    # every window year at least once, then a few pre-window records
    ys = [WINDOW[i % len(WINDOW)] for i in range(n - 2)] + [2002, 2003]
    rng.shuffle(ys)
    return ys


def typo(s):
    i = rng.randrange(1, len(s))
    return s[:i] + s[i + 1:]


def recent_sample(pool, year, k):
    # references concentrate on the last few years, like real citation profiles
    pool = list(pool)
    out = []
    while pool and len(out) < k:
        w = [1.0 / (1 + max(0, year - x["year"])) ** 2 for x in pool]
        out.append(pool.pop(rng.choices(range(len(pool)), weights=w)[0]))
    return out


def main():
    if os.path.isdir(OUT):
        shutil.rmtree(OUT)
    os.makedirs(os.path.join(OUT, "collections"))
    api = os.path.join(OUT, "api")
    os.makedirs(api)

    def fixture(query, items):
        body = json.dumps({"status": "ok", "message": {"items": items}}, sort_keys=True)
        key = hashlib.sha256(query.encode()).hexdigest()
        with open(os.path.join(api, key + ".json"), "w") as f:
            f.write(body)

    def item(p):
        return {"DOI": p["doi"], "title": [p["title"]],
                "author": [{"given": a[0], "family": a[1]} for a in p["auth"]]}

    # ---- papers ----
    papers = []
    i = 0
    for name, n in GROUPS_S:
        for y in years_for(n):
            auth = []
            for _ in range(rng.randint(1, 3)):
                auth.append((rng.choice("ABCDEFGHJK"), rng.choice(SURNAMES)))
            papers.append({"doi": f"10.5555/mini.{i:03d}", "year": y, "group": name,
                           "title": title(), "auth": auth})
            i += 1
    papers.sort(key=lambda p: (p["year"], p["doi"]))

    # ---- patents ----
    patents = []
    i = 0
    for name, n in GROUPS_T:
        for y in years_for(n):
            region, lang = rng.choice(PATENT_REGIONS)
            kind = {"US": "B2", "EP": "A1", "WO": "A1", "CN": "A", "JP": "A", "KR": "B1", "DE": "A1"}[region]
            patents.append({"num": f"{region}{7100000 + i}{kind}", "region": region, "lang": lang,
                            "year": y, "group": name, "digits": str(7100000 + i)})
            i += 1
    patents.sort(key=lambda p: (p["year"], p["num"]))

    def cite_text(p, style):
        names = " ".join(f"{a[0]} {a[1]}" for a in p["auth"])
        if style == "clean":
            return f'{names} "{p["title"]}" J. Mini Mater. {p["year"]}'
        return f'{typo(names)} {typo(p["title"])} ({p["year"]})'

    # ---- journal lines ----
    jlines = []
    for p in papers:
        refs = []
        earlier = [q for q in papers if q["year"] <= p["year"] and q is not p]
        for q in recent_sample(earlier, p["year"], rng.randint(2, 7)):
            r = rng.random()
            if r < 0.35:
                refs.append({"raw": cite_text(q, "clean"), "doi": q["doi"]})
            elif r < 0.75:
                t = cite_text(q, "clean" if r < 0.6 else "fuzzy")
                fixture(t, [item(q)])
                refs.append({"raw": t})
            elif r < 0.9:
                # wrong top candidate: rejected
                t = cite_text(q, "clean")
                other = rng.choice(papers)
                fixture(t, [item(other)] if other is not q else [])
                refs.append({"raw": t})
            else:
                t = f"Unpublished work by {q['auth'][0][1]} et al. {q['year']}"
                refs.append({"raw": t})  # no fixture: transport error
        if rng.random() < 0.3:
            tp = rng.choice([t for t in patents if t["year"] <= p["year"]] or patents)
            form = rng.random()
            refs.append({"patent": tp["num"] if form < 0.6 else tp["digits"]})
        if rng.random() < 0.1:
            refs.append({"patent": "XX0001"})
        authors = []
        for a in p["auth"]:
            r = rng.random()
            if r < 0.7:
                affs = [{"raw": f"Dept Phys, Univ {rng.choice(SURNAMES)}, City, {rng.choice(COUNTRIES)}"}]
            elif r < 0.85:
                affs = [{"raw": "Lab", "region": rng.choice(["CN", "US", "KR"])},
                        {"raw": f"Inst, Town, {rng.choice(COUNTRIES)}"}]
            else:
                affs = []
            authors.append({"name": f"{a[1]}, {a[0]}", "affiliations": affs})
        jlines.append(json.dumps({"doi": p["doi"], "year": p["year"], "title": p["title"],
                                  "authors": authors, "refs": refs,
                                  "funded": rng.random() < 0.4}, sort_keys=True))
    jlines.insert(17, '{"doi": "10.5555/broken", "year": ')
    jlines.insert(40, json.dumps({"doi": "10.5555/noyear", "title": "x"}))
    jlines.insert(90, jlines[5])  # duplicate
    with open(os.path.join(OUT, "journals.jsonl"), "w") as f:
        f.write("\n".join(jlines) + "\n")

    # ---- patent lines ----
    plines = []
    for t in patents:
        earlier = [u for u in patents if u["year"] <= t["year"] and u is not t]
        prefs = [u["num"] for u in recent_sample(earlier, t["year"], rng.randint(0, 5))]
        if rng.random() < 0.2:
            prefs.append("US5000001A")
        npl, resolved = [], []
        cands = [p for p in papers if p["year"] <= t["year"]]
        for q in recent_sample(cands, t["year"], rng.randint(0, 4)):
            if rng.random() < 0.5:
                resolved.append(q["doi"])
            else:
                txt = cite_text(q, "clean")
                fixture(txt, [item(q)])
                npl.append(txt)
        plines.append(json.dumps({"pub_number": t["num"], "year": t["year"], "language": t["lang"],
                                  "patent_refs": prefs, "npl_refs": npl, "resolved_npl": resolved},
                                 sort_keys=True))
    plines.insert(33, json.dumps({"pub_number": "", "year": 2010}))
    with open(os.path.join(OUT, "patents.jsonl"), "w") as f:
        f.write("\n".join(plines) + "\n")

    # ---- collections ----
    def write_ids(name, ids):
        with open(os.path.join(OUT, "collections", name + ".ids"), "w") as f:
            f.write("# " + name + "\n" + "\n".join(ids) + "\n")

    for name, _ in GROUPS_S[:3]:
        ids = [p["doi"] for p in papers if p["group"] == name]
        if name == "NT-S":
            # overlap with G-S; the higher family keeps the label
            ids += [p["doi"] for p in papers if p["group"] == "G-S"][:5]
        ids.append(f"10.5555/absent.{name}")
        write_ids(name, ids)
    for name, _ in GROUPS_T[:3]:
        ids = [t["num"] for t in patents if t["group"] == name]
        if name == "NT-T":
            ids += [t["num"] for t in patents if t["group"] == "G-T"][:4]
        write_ids(name, ids)

    # ---- calibration sample ----
    cal = []
    for q in rng.sample(papers, 40):
        text = cite_text(q, "clean" if rng.random() < 0.5 else "fuzzy")
        query = text
        if rng.random() < 0.75:
            fixture(query, [item(q)])
        else:
            fixture(query, [item(rng.choice([p for p in papers if p is not q]))])
        cal.append(json.dumps({"text": f"{text}. DOI: {q['doi']}", "doi": q["doi"]}))
    # two queries without a recorded response count as client failures
    for q in papers[:2]:
        cal.append(json.dumps({"text": f"Lost reference {q['doi']}", "doi": q["doi"]}))
    with open(os.path.join(OUT, "calibration.jsonl"), "w") as f:
        f.write("\n".join(cal) + "\n")

    with open(os.path.join(OUT, "proj.conf"), "w") as f:
        f.write("""# mini project
journal_records = journals.jsonl
patent_records = patents.jsonl
collections_dir = collections
calibration_sample = calibration.jsonl
metadata_fixtures = api
window_start = 2004
window_end = 2017
sample_size = 20
seed = 7
rate_limit = 0
""")


if __name__ == "__main__":
    sys.exit(main())
