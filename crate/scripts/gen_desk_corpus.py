#!/usr/bin/env python3
"""Generate the desk-scale corpus: template sentences in a parliamentary register.

Usage: gen_desk_corpus.py [--seed N] [--count N] [--out PATH]
"""
import argparse
import random

ROLE = ["rapporteur", "commissioner", "president", "minister", "council", "committee", "presidency", "member"]
TOPIC = ["fisheries", "agriculture", "energy", "transport", "health", "education", "trade", "research",
         "tourism", "employment", "climate", "water", "security", "migration", "culture", "taxation"]
ISSUE = ["budget", "directive", "regulation", "proposal", "report", "strategy", "programme", "agreement",
         "framework", "resolution"]
ADJ = ["important", "difficult", "necessary", "urgent", "clear", "fair", "balanced", "ambitious",
       "realistic", "sustainable"]
REGION = ["europe", "the union", "the member states", "africa", "asia", "the regions", "our countries",
          "the candidate countries"]
GROUP = ["citizens", "farmers", "workers", "consumers", "women", "young people", "small businesses",
         "fishermen", "patients", "students"]
TIME = ["today", "this year", "next week", "as soon as possible", "without delay", "in the long term"]
MODAL = ["must", "should", "will", "can", "cannot"]
VERB = ["support", "reject", "improve", "adopt", "examine", "amend", "review", "strengthen"]
QUALITY = ["excellent", "detailed", "balanced", "thorough", "useful"]
NUMBER = ["two", "three", "five", "ten", "twenty", "fifty"]

TEMPLATES = [
    "i would like to thank the {role} for the {quality} report on {topic} .",
    "the {role} {modal} {verb} the {issue} on {topic} {time} .",
    "we need a {adj} {issue} for {topic} in {region} .",
    "the {issue} on {topic} is {adj} for {group} in {region} .",
    "this {issue} will {verb} the situation of {group} across {region} .",
    "the {role} said that the {issue} on {topic} is {adj} .",
    "we {modal} {verb} the {issue} because {group} deserve a {adj} answer .",
    "in {region} , {number} million {group} depend on {topic} .",
    "the debate on {topic} is closed and the vote will take place {time} .",
    "madam president , the {issue} on {topic} is not {adj} enough .",
    "my group {modal} {verb} the {issue} , but {group} expect more from {region} .",
    "the {role} has presented a {adj} {issue} on {topic} and {topic2} .",
    "{group} in {region} want a {adj} policy on {topic} {time} .",
    "why does the {role} not {verb} the {issue} on {topic} ?",
    "we have {number} amendments to the {issue} on {topic} .",
]

SLOTS = {
    "role": ROLE, "topic": TOPIC, "topic2": TOPIC, "issue": ISSUE, "adj": ADJ, "region": REGION,
    "group": GROUP, "time": TIME, "modal": MODAL, "verb": VERB, "quality": QUALITY, "number": NUMBER,
}


def sentence(rng):
    template = rng.choice(TEMPLATES)
    values = {k: rng.choice(v) for k, v in SLOTS.items()}
    while values["topic2"] == values["topic"]:
        values["topic2"] = rng.choice(TOPIC)
    return template.format(**values)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=2023)
    ap.add_argument("--count", type=int, default=2500)
    ap.add_argument("--out", default="crates/core/assets/desk_corpus.txt")
    args = ap.parse_args()
    rng = random.Random(args.seed)
    seen, lines = set(), []
    while len(lines) < args.count:
        s = sentence(rng)
        if s not in seen:
            seen.add(s)
            lines.append(s)
    with open(args.out, "w") as f:
        f.write("\n".join(lines) + "\n")
    words = {w for line in lines for w in line.split()}
    lengths = [len([w for w in line.split() if w not in ".,!?;:'\"()-"]) for line in lines]
    print(f"{len(lines)} sentences, {len(words)} distinct tokens, words per sentence {min(lengths)}-{max(lengths)}")


if __name__ == "__main__":
    main()
