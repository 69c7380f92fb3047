#!/usr/bin/env python3
# Copyright 2026 The scilist Authors
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

"""Writes the 60-user demo fixture under data/demo/.

Three research groups of twenty users each, follow edges dense within a
group and sparse across groups, lists named after titles, and statuses
with scientific, general and shortened links. Output is deterministic.
"""

import argparse
import json
import pathlib
import random

GROUPS = [
    {
        "key": "bio",
        "titles": ["marine biologist", "ecologist", "microbiologist", "geneticist"],
        "lists": ["marine biologists", "ecologists", "microbiologists"],
        "science": ["nature.com", "journals.plos.org", "biorxiv.org", "elifesciences.org"],
        "words": ["coral", "reef", "ocean", "species", "genome", "microbes"],
    },
    {
        "key": "phys",
        "titles": ["physicist", "astronomer", "chemist", "astrophysicist"],
        "lists": ["physicists", "astronomers", "chemists"],
        "science": ["arxiv.org", "journals.aps.org", "iopscience.iop.org", "pubs.acs.org"],
        "words": ["quantum", "galaxy", "telescope", "lattice", "spectra", "dark"],
    },
    {
        "key": "soc",
        "titles": ["economist", "psychologist", "statistician", "sociologist"],
        "lists": ["economists", "psychologists", "statisticians"],
        "science": ["nber.org", "ssrn.com", "aeaweb.org", "journals.sagepub.com"],
        "words": ["labor", "markets", "survey", "inequality", "behavior", "policy"],
    },
]
GENERAL = ["nytimes.com", "youtube.com", "theguardian.com", "github.com", "wikipedia.org"]
FEMALE = ["Mary", "Linda", "Susan", "Karen", "Sarah", "Emily", "Nancy", "Helen", "Lisa", "Donna"]
MALE = ["James", "John", "Robert", "David", "Thomas", "Daniel", "Paul", "Mark", "George", "Brian"]
OPAQUE = ["Kiran", "Quill", "Zephyr", "Sol"]
SURNAMES = ["Lee", "Ray", "Moss", "Hart", "Cole", "Reed", "Fox", "Lane", "Wu", "Park",
            "Diaz", "Khan", "Ito", "Berg", "Nash", "Roth", "Vega", "Shaw", "Kerr", "Ng"]
PLACES = ["State University", "the Institute", "a national lab", "College", "the Museum"]
RANKS = ["", "PhD student, ", "Postdoc, ", "Professor, ", ""]


def build(rng):
    users, lists, follows, statuses = [], [], [], {}
    faces, redirects = {}, {}
    members = {g["key"]: [] for g in GROUPS}
    for i in range(60):
        g = GROUPS[i % 3]
        uid = f"u{i + 1:02d}"
        if i % 10 == 7:
            first = OPAQUE[(i // 10) % len(OPAQUE)]
        elif i % 2:
            first = FEMALE[i % len(FEMALE)]
        else:
            first = MALE[i % len(MALE)]
        last = SURNAMES[i % len(SURNAMES)]
        title = g["titles"][(i // 3) % len(g["titles"])]
        if i % 20 == 19:
            description = "Coffee, hiking and " + rng.choice(g["words"]) + "."
        else:
            description = f"{RANKS[i % len(RANKS)]}{title} at {PLACES[i % len(PLACES)]}. " \
                          f"Interested in {rng.choice(g['words'])} and {rng.choice(g['words'])}."
        image = f"https://img.example.org/{uid}.jpg"
        user = {
            "user_id": uid,
            "screen_name": f"{first.lower()}_{last.lower()}{i + 1}",
            "display_name": f"{first} {last}",
            "description": description,
            "profile_image_url": image,
            "is_public": True,
            "listed_count": 5 + (i * 7) % 23,
        }
        if first in OPAQUE:
            faces[image] = {"gender": "female" if i % 2 else "male", "confidence": 95.5}
        users.append(user)
        members[g["key"]].append(uid)

    lid = 0
    for g in GROUPS:
        ids = members[g["key"]]
        for name in g["lists"]:
            lid += 1
            chosen = sorted(rng.sample(ids, 12))
            lists.append({"list_id": f"L{lid:02d}", "name": name,
                          "description": f"{name} I follow", "is_public": True,
                          "member_ids": chosen})
        lid += 1
        lists.append({"list_id": f"L{lid:02d}", "name": "my friends", "description": "",
                      "is_public": True, "member_ids": sorted(rng.sample(ids, 6))})
    lid += 1
    lists.append({"list_id": f"L{lid:02d}", "name": "physicists", "description": "private",
                  "is_public": False, "member_ids": ["u02", "u05"]})

    group_of = {}
    for g in GROUPS:
        for uid in members[g["key"]]:
            group_of[uid] = g
    ids = [u["user_id"] for u in users]
    for a in ids:
        for b in ids:
            if a == b:
                continue
            p = 0.45 if group_of[a] is group_of[b] else 0.015
            if rng.random() < p:
                follows.append({"follower": a, "followee": b})

    screen = {u["user_id"]: u["screen_name"] for u in users}
    sid = 1000
    originals = []
    short = 0
    for u in users:
        uid = u["user_id"]
        g = group_of[uid]
        out = []
        for k in range(rng.randint(5, 9)):
            sid += 1
            r = rng.random()
            peers = [x for x in members[g["key"]] if x != uid]
            if r < 0.45:
                domain = rng.choice(g["science"]) if rng.random() < 0.6 else rng.choice(GENERAL)
                url = f"https://{domain}/a/{sid}"
                if rng.random() < 0.25:
                    short += 1
                    s = f"https://bit.ly/d{short:03d}"
                    redirects[s] = url
                    url = s
                text = f"New on {rng.choice(g['words'])}: {url}"
                st = {"status_id": str(sid), "author_id": uid, "kind": "Tweet", "text": text,
                      "urls": [url], "original": None}
                originals.append(st)
            elif r < 0.7:
                other = rng.choice(peers)
                text = f"@{screen[other]} nice result on {rng.choice(g['words'])}"
                st = {"status_id": str(sid), "author_id": uid, "kind": "Reply", "text": text,
                      "urls": [], "original": None}
            elif r < 0.9 and originals:
                pool = [o for o in originals if o["author_id"] != uid
                        and group_of[o["author_id"]] is g] or \
                       [o for o in originals if o["author_id"] != uid]
                if not pool:
                    continue
                o = rng.choice(pool)
                st = {"status_id": str(sid), "author_id": uid, "kind": "Retweet",
                      "text": f"RT @{screen[o['author_id']]}: {o['text']}",
                      "urls": list(o["urls"]),
                      "original": {"author_id": o["author_id"], "status_id": o["status_id"],
                                   "urls": list(o["urls"])}}
            else:
                sci = rng.choice(g["science"])
                gen = rng.choice(GENERAL)
                text = f"Compare https://{sci}/p/{sid} with https://{gen}/n/{sid}"
                st = {"status_id": str(sid), "author_id": uid, "kind": "Tweet", "text": text,
                      "urls": [f"https://{sci}/p/{sid}", f"https://{gen}/n/{sid}"],
                      "original": None}
                originals.append(st)
            out.append(st)
        statuses[uid] = list(reversed(out))

    seeds = []
    for u in users:
        i = int(u["user_id"][1:]) - 1
        g = group_of[u["user_id"]]
        if i % 20 == 19:
            continue
        words = [{"word": "science", "weight": 0.9},
                 {"word": g["titles"][(i // 3) % len(g["titles"])], "weight": 0.8}]
        words += [{"word": w, "weight": 0.5 - 0.05 * n} for n, w in enumerate(g["words"][:3])]
        listed = 12 if i % 4 == 0 else 3
        seeds.append({"user_id": u["user_id"], "listed_count": listed, "attributes": words})
    seeds.append({"user_id": "x01", "listed_count": 40,
                  "attributes": [{"word": "music", "weight": 0.9}, {"word": "science", "weight": 0.4}]})
    return users, lists, follows, statuses, faces, redirects, seeds


def dump(path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "demo"))
    ap.add_argument("--seed", type=int, default=2026)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    users, lists, follows, statuses, faces, redirects, seeds = build(rng)
    out = pathlib.Path(args.out)
    fixture = out / "fixture"
    (fixture / "statuses").mkdir(parents=True, exist_ok=True)
    dump(fixture / "users.json", {"version": 1, "users": users})
    dump(fixture / "lists.json", {"version": 1, "lists": lists})
    dump(fixture / "edges.json", {"version": 1, "follows": follows})
    for uid, sts in statuses.items():
        dump(fixture / "statuses" / f"{uid}.json", {"version": 1, "statuses": sts})
    dump(out / "faces.json", faces)
    dump(out / "redirects.json", redirects)
    with open(out / "seeds.jsonl", "w") as f:
        for s in seeds:
            f.write(json.dumps(s, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
